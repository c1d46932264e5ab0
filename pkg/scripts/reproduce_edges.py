"""Band edges of the Hill operator against their closed forms, over a grid of moduli.

    python3 scripts/reproduce_edges.py --out runs/edges.csv
"""

import argparse
from dataclasses import dataclass

import numpy as np

from hillcert.sweep import DEFAULT_ELL_GRID, band_edges_vs_ell, ensure_dir, write_edges_csv


@dataclass
class EdgesConfig:
    N: int = 40
    M: int = 2
    points: int = len(DEFAULT_ELL_GRID)
    ell_max: float = 0.99
    out: str = "runs/edges.csv"


def main(cfg: EdgesConfig) -> None:
    grid = np.linspace(0.0, cfg.ell_max, cfg.points)
    rows = band_edges_vs_ell(grid, N=cfg.N, M=cfg.M)
    ensure_dir(__import__("pathlib").Path(cfg.out).parent)
    write_edges_csv(rows, cfg.out)
    errs = np.array([np.abs(np.subtract(r.computed, r.exact)) for r in rows])
    clean = [i for i, r in enumerate(rows) if not r.ambiguous]
    print(f"{len(rows)} moduli, N={cfg.N}, M={cfg.M} -> {cfg.out}")
    print(f"max |computed - exact| (a, b, c): {errs[clean].max(axis=0)}")
    flagged = [f"{r.ell:.4f}" for r in rows if r.ambiguous]
    if flagged:
        print(f"ambiguous identification at ell = {', '.join(flagged)}")
    worst = int(np.argmax(errs.max(axis=1)))
    print(f"worst row ell={rows[worst].ell:.4f}: {errs[worst].max():.2e}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(EdgesConfig()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    main(EdgesConfig(**vars(p.parse_args())))
