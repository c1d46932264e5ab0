"""Spectral norm of the truncated Hill block acting on modes [-4N, 4N].

Prints the norm normalised by N^(5/2) (the proven ceiling) and by N^2 (the
growth of the largest diagonal symbol) so the two can be compared.

    python3 scripts/norm_growth.py --ell 0.5 --Ns 8,16,32,64,128
"""

import argparse
from dataclasses import dataclass, field

from hillcert.eig import spectral_norm
from hillcert.operator import bloch_transform, hill_operator, rectangular_block


@dataclass
class NormConfig:
    ell: float = 0.5
    M: int = 2
    Ns: list = field(default_factory=lambda: [8, 16, 32, 64])
    width: int = 4


def main(cfg: NormConfig) -> None:
    bloch = bloch_transform(hill_operator(cfg.ell, cfg.M), 0.0)
    print(f"{'N':>5} {'norm':>12} {'/N^2.5':>9} {'/N^2':>9}")
    r25 = []
    for N in cfg.Ns:
        s = spectral_norm(rectangular_block(bloch, N, cfg.width * N))
        r25.append(s / N**2.5)
        print(f"{N:>5} {s:>12.4f} {s / N**2.5:>9.4f} {s / N**2:>9.4f}")
    print(f"max/min of norm/N^2.5: {max(r25) / min(r25):.3f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    d = NormConfig()
    p.add_argument("--ell", type=float, default=d.ell)
    p.add_argument("--M", type=int, default=d.M)
    p.add_argument("--Ns", type=lambda s: [int(t) for t in s.split(",")], default=d.Ns)
    p.add_argument("--width", type=int, default=d.width)
    main(NormConfig(**vars(p.parse_args())))
