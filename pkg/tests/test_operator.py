import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hillcert import fourier
from hillcert.eig import spectral_norm
from hillcert.operator import (
    HermitianMatrix,
    OperatorSpec,
    assemble,
    bloch_transform,
    constant_operator,
    hermiticity_defect,
    hill_operator,
    load_spec,
    rectangular_block,
    save_spec,
    spec_from_dict,
    spec_to_dict,
)
from hillcert.specfun import elliptic_K, hill_b, hill_diagonal, jacobi_sn


def coef_values(c):
    return {m: c[m] for m in range(-c.m_max, c.m_max + 1) if c[m] != 0}


def test_mu_zero_is_identity():
    spec = hill_operator(0.3)
    b = bloch_transform(spec, 0.0)
    assert b.coeffs[0] == spec.coeffs[0]
    assert b.coeffs[1] == spec.coeffs[1]
    assert b.coefficient(2)[0] == pytest.approx(-math.sqrt(spec.period))


def test_hill_bloch_coefficients():
    spec = hill_operator(0.1)
    L = spec.period
    mu = 0.4
    b = bloch_transform(spec, mu)
    rootL = math.sqrt(L)
    # f_1 = -2 i mu, constant
    assert coef_values(b.coeffs[1]) == pytest.approx({0: -2j * mu * rootL})
    # f_0 = V + mu^2
    V = spec.coeffs[0]
    f0 = b.coeffs[0]
    assert f0[0] == pytest.approx(V[0] + mu**2 * rootL, rel=1e-14)
    for m in range(1, 20):
        assert f0[m] == pytest.approx(V[m], abs=1e-15)


@settings(max_examples=25)
@given(st.floats(0.0, 6.0), st.sampled_from([1.0, -1.0]))
def test_first_order_bloch(mu, leading):
    L = 2 * math.pi
    spec = OperatorSpec(1, leading, (fourier.zero(L),))
    b = bloch_transform(spec, mu * 0.99 / 6.0 * 2 * math.pi / L)
    mu_used = b.mu
    assert b.coeffs[0][0] == pytest.approx(1j * mu_used * leading * math.sqrt(L), abs=1e-15)


def test_mu_out_of_range():
    spec = hill_operator(0.1)
    with pytest.raises(ValueError):
        bloch_transform(spec, -0.1)
    with pytest.raises(ValueError):
        bloch_transform(spec, 2 * math.pi / spec.period)


def test_hill_diagonal_calibration():
    a = assemble(bloch_transform(hill_operator(0.1, 2), 0.0), 3)
    d = np.diag(a.entries).real
    # truncated printed digits: -3.9799..., -2.9849..., ~0, 4.9749...
    assert math.trunc(d[3] * 1e4) == -39799
    assert math.trunc(d[2] * 1e4) == math.trunc(d[4] * 1e4) == -29849
    assert abs(d[1]) < 1e-6 and abs(d[5]) < 1e-6
    assert math.trunc(d[0] * 1e4) == math.trunc(d[6] * 1e4) == 49749


@settings(max_examples=30)
@given(st.floats(0.0, 0.95), st.floats(0.0, 0.999), st.integers(1, 3))
def test_hill_diagonal_matches_closed_form(ell, frac, M):
    spec = hill_operator(ell, M)
    mu = frac * 2 * math.pi / spec.period
    a = assemble(bloch_transform(spec, mu), 6)
    d = np.diag(a.entries)
    for i, n in enumerate(range(-6, 7)):
        # the mode-n diagonal entry equals the closed-form D at index -n
        assert d[i].real == pytest.approx(hill_diagonal(ell, mu, M, -n), abs=1e-12)
        assert abs(d[i].imag) < 1e-12
    assert sorted(d.real) == pytest.approx(sorted(hill_diagonal(ell, mu, M, n) for n in range(-6, 7)), abs=1e-12)


def test_hill_off_diagonals():
    ell, M = 0.3, 2
    a = assemble(bloch_transform(hill_operator(ell, M), 0.0), 8).entries
    for j in range(1, 4):
        assert a[8, 8 + M * j].real == pytest.approx(hill_b(ell, j), rel=1e-13)
        assert a[8 + M * j, 8].real == pytest.approx(hill_b(ell, j), rel=1e-13)
    assert a[8, 9] == 0


def test_constant_coefficient_diagonal():
    L = 3.0
    values = [2.0, 0.5]
    spec = constant_operator(values, -1.0, L)
    a = assemble(bloch_transform(spec, 0.0), 4).entries
    assert np.count_nonzero(a - np.diag(np.diag(a))) == 0
    for i, n in enumerate(range(-4, 5)):
        s = -2j * math.pi * n / L
        assert a[i, i] == pytest.approx(values[0] + values[1] * s - s**2)


@pytest.mark.parametrize("mu", [0.0, 0.2, 0.7])
def test_zero_modulus_diagonal(mu):
    spec = hill_operator(0.0, 2)
    L = spec.period
    a = assemble(bloch_transform(spec, mu), 5).entries
    assert np.count_nonzero(a - np.diag(np.diag(a))) == 0
    expected = sorted((mu + 2 * math.pi * n / L) ** 2 - 4 for n in range(-5, 6))
    assert sorted(np.diag(a).real) == pytest.approx(expected, abs=1e-13)


@settings(max_examples=30)
@given(st.floats(0.0, 0.95), st.floats(0.0, 0.999), st.integers(1, 3), st.integers(1, 20))
def test_hill_hermitian(ell, frac, M, N):
    spec = hill_operator(ell, M)
    a = assemble(bloch_transform(spec, frac * 2 * math.pi / spec.period), N)
    assert hermiticity_defect(a) < 1e-12 * a.scale


def test_defect_examples():
    a = assemble(bloch_transform(hill_operator(0.2), 0.1), 4).entries.copy()
    a[1, 3] += 1e-3
    assert hermiticity_defect(a) >= 1e-3
    assert hermiticity_defect(np.zeros((3, 3))) == 0.0


@pytest.mark.parametrize("ell,mu", [(0.1, 0.0), (0.6, 0.3)])
def test_galerkin_consistency(ell, mu):
    b = bloch_transform(hill_operator(ell), mu)
    big = assemble(b, 20)
    for N in (1, 5, 12, 19):
        assert np.array_equal(big.submatrix(N).entries, assemble(b, N).entries)


@pytest.mark.parametrize("ell,mu", [(0.1, 0.0), (0.5, 0.25), (0.9, 0.1)])
def test_matvec_quadrature_oracle(ell, mu):
    # apply -(d/dx + i mu)^2 + V in physical space and project back onto e_n
    N, L = 16, 4 * elliptic_K(ell)
    rng = np.random.default_rng(11)
    coeffs = rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)
    modes = np.arange(-N, N + 1)
    x = L * np.arange(2048) / 2048
    basis = np.exp(-2j * np.pi * np.outer(x, modes) / L) / math.sqrt(L)
    k = -2j * np.pi * modes / L + 1j * mu
    Su = basis @ (-(k**2) * coeffs) + (6 * ell**2 * jacobi_sn(x, ell) ** 2 - 4 - ell**2) * (basis @ coeffs)
    projected = (L / x.size) * basis.conj().T @ Su
    a = assemble(bloch_transform(hill_operator(ell), mu), N).entries
    got = a @ coeffs
    assert np.linalg.norm(got - projected) < 1e-8 * np.linalg.norm(projected)


def test_norm_growth_bounded():
    b = bloch_transform(hill_operator(0.5), 0.0)
    ratios = [spectral_norm(rectangular_block(b, N, 4 * N)) / N**2.5 for N in (8, 16, 32, 64)]
    # evidence of the N^(p+1/2) ceiling: the normalised norm does not grow
    assert all(b_ <= a_ * 1.05 for a_, b_ in zip(ratios, ratios[1:]))


def test_rectangular_block_contains_square():
    b = bloch_transform(hill_operator(0.4), 0.2)
    r = rectangular_block(b, 5, 20)
    assert r.shape == (11, 41)
    assert np.array_equal(r[:, 15:26], assemble(b, 5).entries)


def test_hermitian_matrix_validation():
    with pytest.raises(ValueError):
        HermitianMatrix(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        HermitianMatrix(np.zeros((3, 5)))
    with pytest.raises(ValueError):
        assemble(bloch_transform(hill_operator(0.1), 0.0), 0)


def test_spec_validation():
    with pytest.raises(ValueError):
        OperatorSpec(2, 2.0, (fourier.zero(1.0), fourier.zero(1.0)))
    with pytest.raises(ValueError):
        OperatorSpec(2, 1.0, (fourier.zero(1.0),))
    with pytest.raises(ValueError):
        OperatorSpec(2, 1.0, (fourier.zero(1.0), fourier.zero(2.0)))


def test_spec_json_round_trip(tmp_path):
    spec = hill_operator(0.3, 2)
    back = spec_from_dict(spec_to_dict(spec))
    assert back == spec
    save_spec(spec, tmp_path / "s.json")
    assert load_spec(tmp_path / "s.json") == spec


def test_spec_file_references(tmp_path):
    L = 2.0
    fourier.save_coefficient(fourier.constant(-4.0, L), tmp_path / "f0.json")
    (tmp_path / "op.json").write_text(
        '{"order": 2, "leading": -1, "period": 2.0, "coefficients": ["f0.json", null]}'
    )
    spec = load_spec(tmp_path / "op.json")
    assert spec.coeffs[0][0] == pytest.approx(-4 * math.sqrt(L))
    assert spec.coeffs[1].is_constant
