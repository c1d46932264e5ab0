"""Decay rate of the lowest Hill band-edge error with a multiprecision truncation.

Double precision bottoms out after a handful of N at small moduli, which
leaves too few points for a rate fit.  This rebuilds the mu = 0 truncation
with mpmath (independently of the package) and fits the rate there.
Needs mpmath.

    python3 scripts/extended_precision_rate.py --ell 0.1 --Nmax 17 --dps 60
"""

import argparse
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from hillcert.sweep import hill_predicted_rate


@dataclass
class RateConfig:
    ell: str = "0.1"
    Nmax: int = 17
    dps: int = 60


def errors(cfg: RateConfig) -> dict:
    mp.mp.dps = cfg.dps
    ell = mp.mpf(cfg.ell)
    m = ell**2
    K, Kp, E = mp.ellipk(m), mp.ellipk(1 - m), mp.ellipe(m)
    q = mp.exp(-mp.pi * Kp / K)
    L = 4 * K
    b0 = 6 * (1 - E / K) - 4 - m
    sig_a = m - 2 - 2 * mp.sqrt(1 - m + m**2)
    out = {}
    for N in range(1, cfg.Nmax + 1):
        n = 2 * N + 1
        A = mp.matrix(n, n)
        for i in range(n):
            A[i, i] = (2 * mp.pi * (i - N) / L) ** 2 + b0
            for j in range(1, N + 1):
                if i + 2 * j < n:
                    A[i, i + 2 * j] = A[i + 2 * j, i] = -(6 * mp.pi**2 / K**2) * j * q**j / (1 - q ** (2 * j))
        out[N] = min(abs(e - sig_a) for e in mp.eigsy(A, eigvals_only=True))
        print(f"{N:>3}  {mp.nstr(out[N], 6)}")
    return out


def main(cfg: RateConfig) -> None:
    errs = errors(cfg)
    floor = mp.mpf(10) ** (5 - cfg.dps)
    N = np.array([n for n in errs if errs[n] > floor], dtype=float)
    y = np.array([float(mp.log(errs[int(n)])) for n in N]) - 2.5 * np.log(N)
    slope, icpt = np.polyfit(N, y, 1)
    r2 = 1 - np.sum((y - slope * N - icpt) ** 2) / np.sum((y - y.mean()) ** 2)
    pred = hill_predicted_rate(float(cfg.ell))
    print(f"fitted rate {-slope:.3f}, r2 {r2:.4f}; predicted {pred:.3f}, 0.9x = {0.9 * pred:.3f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    d = RateConfig()
    p.add_argument("--ell", default=d.ell)
    p.add_argument("--Nmax", type=int, default=d.Nmax)
    p.add_argument("--dps", type=int, default=d.dps)
    main(RateConfig(**vars(p.parse_args())))
