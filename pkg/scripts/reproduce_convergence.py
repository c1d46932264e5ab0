"""Errors and certified bounds for the lowest Hill band edge as N grows.

Writes one CSV per modulus and prints error, bound and total bound side by
side.  The Gershgorin ball is tried first; when it does not isolate the
eigenvalue (larger moduli) the empirical ball is used, and when neither works
the errors are still recorded without a bound.

    python3 scripts/reproduce_convergence.py --ells 0.1,0.3,0.5 --Ns 5,10,15,20
"""

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from hillcert.certify import IsolationError
from hillcert.sweep import (
    CONVERGENCE_ELLS,
    CONVERGENCE_NS,
    ERROR_FLOOR,
    ensure_dir,
    fit_exponential_rate,
    hill_convergence_study,
    hill_predicted_rate,
    write_converge_csv,
)


@dataclass
class ConvergenceConfig:
    ells: list = field(default_factory=lambda: list(CONVERGENCE_ELLS))
    Ns: list = field(default_factory=lambda: list(CONVERGENCE_NS))
    M: int = 2
    out_dir: str = "runs/convergence"


def study(ell, Ns, M):
    for ball in ("gershgorin", "empirical"):
        try:
            recs = hill_convergence_study(ell, Ns, 0.0, M, ball=ball)
        except IsolationError:
            continue
        if any(r.bound is not None for r in recs):
            return recs, ball
    return hill_convergence_study(ell, Ns, 0.0, M, ball="none"), "none"


def fmt(x):
    return "-" if x is None else f"{x:.3e}"


def main(cfg: ConvergenceConfig) -> None:
    out = ensure_dir(cfg.out_dir)
    for ell in cfg.ells:
        recs, ball = study(ell, cfg.Ns, cfg.M)
        write_converge_csv(recs, Path(out) / f"converge_ell{ell:g}.csv")
        print(f"\nell={ell:g}  ball={ball}  predicted rate {hill_predicted_rate(ell, cfg.M):.3f}")
        print(f"{'N':>4} {'error':>11} {'bound':>11} {'total':>11}")
        for r in recs:
            print(f"{r.N:>4} {fmt(r.error):>11} {fmt(r.bound):>11} {fmt(r.total_bound):>11}")
        try:
            fit = fit_exponential_rate(recs, p=2)
            print(f"fitted rate {fit.rate:.3f} (r2 {fit.r_squared:.3f}, {fit.n_points} points)")
        except ValueError:
            print(f"fewer than 4 errors above {ERROR_FLOOR:g}; no rate fit")


def _floats(s):
    return [float(t) for t in s.split(",")]


def _ints(s):
    return [int(t) for t in s.split(",")]


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    d = ConvergenceConfig()
    p.add_argument("--ells", type=_floats, default=d.ells)
    p.add_argument("--Ns", type=_ints, default=d.Ns)
    p.add_argument("--M", type=int, default=d.M)
    p.add_argument("--out_dir", default=d.out_dir)
    main(ConvergenceConfig(**vars(p.parse_args())))
