"""Command-line front end.

    hillcert spectrum  --operator 'hill(0.1,2)' --mu 0 --N 10
    hillcert bands     --operator spec.json --N 20 --mu-count 64 --out bands.csv
    hillcert converge  --operator 'hill(0.1,2)' --N-list 5,10,15 --out converge.csv
    hillcert certify   --operator 'hill(0.1,2)' --mu 0 --N 10
    hillcert gersh     --operator 'hill(0.1,2)' --mu 0 --N 5
    hillcert hill-demo --out demo/

Exit status: 0 on success, 1 on invalid input, 2 on numerical failure
(non-Hermitian truncation, or failed isolation when a certificate was asked for).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path


from hillcert import sweep
from hillcert.certify import (
    CertifiedEigenvalue,
    IsolationError,
    aposteriori_bound,
    certify_components,
    check_isolation,
    gershgorin,
    hill_interval_radius,
)
from hillcert.fourier import CertLevel
from hillcert.eig import NotHermitianError, eigh
from hillcert.operator import OperatorSpec, assemble, bloch_transform, hill_operator, load_spec
from hillcert.specfun import DomainError

COMMANDS = ("spectrum", "bands", "converge", "certify", "gersh", "hill-demo")
_HILL_RE = re.compile(r"^\s*hill\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)\s*$")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    operator: str = "hill(0.1,2)"
    mu: float = 0.0
    N: int = 10
    N_list: list = field(default_factory=lambda: list(sweep.CONVERGENCE_NS))
    ell_grid: list = field(default_factory=lambda: list(sweep.DEFAULT_ELL_GRID))
    mu_count: int = 64
    output: str | None = None
    format: str = "json"
    zeta: float | None = None
    r: float | None = None
    reference: float | None = None
    ball: str = "gershgorin"

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        if self.format not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")
        if self.N < 1:
            raise ConfigError("--N must be a positive integer")
        if not self.N_list or any(n < 1 for n in self.N_list):
            raise ConfigError("--N-list needs positive integers")
        if self.N_list != sorted(self.N_list):
            raise ConfigError("--N-list must be ascending")
        if self.mu_count < 2:
            raise ConfigError("--mu-count must be at least 2")
        if self.r is not None and self.r <= 0:
            raise ConfigError("--r must be positive")
        if self.ball not in ("gershgorin", "empirical", "none"):
            raise ConfigError("--ball must be gershgorin, empirical or none")
        if any(not (0.0 <= e < 1.0) for e in self.ell_grid):
            raise ConfigError("--ell-grid values must lie in [0, 1)")
        if self.command != "hill-demo":
            self.operator_spec()  # raises ConfigError on bad operators

    def hill_params(self) -> tuple[float, int] | None:
        m = _HILL_RE.match(self.operator)
        if not m:
            return None
        try:
            ell, M = float(m.group(1)), int(m.group(2))
        except ValueError as exc:
            raise ConfigError(f"cannot parse {self.operator!r}: {exc}") from None
        if not (0.0 < ell < 1.0):
            raise ConfigError(f"hill(ell, M) needs 0 < ell < 1, got ell={ell}")
        if M < 1:
            raise ConfigError(f"hill(ell, M) needs M >= 1, got M={M}")
        return ell, M

    def operator_spec(self) -> OperatorSpec:
        hp = self.hill_params()
        if hp is not None:
            spec = hill_operator(*hp)
        else:
            path = Path(self.operator)
            if not path.is_file():
                raise ConfigError(f"operator {self.operator!r} is neither hill(ell,M) nor a readable spec file")
            try:
                spec = load_spec(path)
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"invalid operator spec {path}: {exc}") from None
        if not (0.0 <= self.mu < 2 * math.pi / spec.period):
            raise ConfigError(f"--mu must lie in [0, {2 * math.pi / spec.period:.17g})")
        return spec


def _f(x):
    """Floats rounded through 17 significant digits (exact for doubles)."""
    if x is None:
        return None
    return float(f"{float(x):.17g}")


def _dump_json(payload) -> str:
    return json.dumps(payload, indent=1, allow_nan=True) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text)


# --- payload builders (pure; the tests call these directly) -----------------


def spectrum_payload(cfg: RunConfig) -> dict:
    spec = cfg.operator_spec()
    values = sweep.spectrum(spec, cfg.mu, cfg.N)
    return {"operator": cfg.operator, "mu": _f(cfg.mu), "N": cfg.N, "eigenvalues": [_f(v) for v in values]}


def gersh_payload(cfg: RunConfig) -> dict:
    spec = cfg.operator_spec()
    matrix = assemble(bloch_transform(spec, cfg.mu), cfg.N)
    values = [p.value for p in eigh(matrix)]
    comps = []
    for c in gershgorin(matrix):
        inside = [v for v in values if c.contains(v, slack=1e-12 * max(1.0, abs(v)))]
        comps.append(
            {
                "lo": _f(c.lo),
                "hi": _f(c.hi),
                "center": _f(c.center),
                "radius": _f(c.radius),
                "disk_count": c.disk_count,
                "eigenvalue_count": len(inside),
                "member_centers": [_f(x) for x in c.member_centers],
                "eigenvalues": [_f(v) for v in inside],
            }
        )
    return {"operator": cfg.operator, "mu": _f(cfg.mu), "N": cfg.N, "components": comps}


def certify_payload(cfg: RunConfig) -> tuple[dict, bool]:
    """Certificates for every single-disk component; second value says the target passed."""
    spec = cfg.operator_spec()
    bloch = bloch_transform(spec, cfg.mu)
    hp = cfg.hill_params()

    def ball(comp):
        zeta = comp.center
        if hp is not None:
            r = hill_interval_radius(hp[0])
        else:
            r = comp.radius
        return zeta, r

    certs, clusters = certify_components(bloch, cfg.N, ball)
    if cfg.zeta is not None:
        # explicit ball: certify the eigenvalue nearest zeta as well
        matrix = assemble(bloch, cfg.N)
        pairs = eigh(matrix)
        values = [p.value for p in pairs]
        pair = min(pairs, key=lambda p: abs(p.value - cfg.zeta))
        r = cfg.r if cfg.r is not None else (hill_interval_radius(hp[0]) if hp else None)
        if r is None:
            raise ConfigError("--zeta needs --r for operators other than hill(ell,M)")
        if check_isolation(pair.value, values, cfg.zeta, r):
            target = aposteriori_bound(bloch, cfg.N, pair, cfg.zeta, r, matrix=matrix, spectrum=values)
        else:
            level = CertLevel.weakest(bloch.coefficient(j).cert_level for j in range(bloch.order + 1))
            target = CertifiedEigenvalue(pair.value, cfg.zeta, r, None, level.value, False, N=cfg.N)
    else:
        target = min(certs, key=lambda c: c.lambda_N) if certs else None
    rep = lambda c: {k: (_f(v) if isinstance(v, float) else v) for k, v in c.to_dict().items()}
    payload = {
        "operator": cfg.operator,
        "mu": _f(cfg.mu),
        "N": cfg.N,
        "target": rep(target) if target is not None else None,
        "certificates": [rep(c) for c in certs],
        "clusters": [
            {k: ([_f(x) for x in v] if isinstance(v, list) else (_f(v) if isinstance(v, float) else v))
             for k, v in c.to_dict().items()}
            for c in clusters
        ],
    }
    return payload, target is not None and target.isolation_ok


def converge_records(cfg: RunConfig):
    hp = cfg.hill_params()
    if hp is not None and cfg.zeta is None and cfg.reference is None:
        ell, M = hp
        return sweep.hill_convergence_study(ell, cfg.N_list, cfg.mu, M, ball=cfg.ball)
    spec = cfg.operator_spec()
    if cfg.zeta is None or cfg.r is None or cfg.reference is None:
        raise ConfigError("converge needs --zeta, --r and --reference for this operator")
    return sweep.convergence_study(spec, cfg.mu, cfg.N_list, cfg.reference, cfg.zeta, cfg.r)


def _records_payload(records) -> dict:
    return {
        "records": [
            {"N": r.N, "lambda_N": _f(r.lambda_N), "error": _f(r.error), "bound": _f(r.bound),
             "total_bound": _f(r.total_bound)}
            for r in records
        ]
    }


def _csv_text(writer, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in writer(rows):
        w.writerow(row)
    return buf.getvalue()


def hill_demo(cfg: RunConfig, out_dir: Path) -> dict:
    """Band edges, convergence and bounds, and a Gershgorin report into ``out_dir``."""
    out_dir = sweep.ensure_dir(out_dir)
    edges = sweep.band_edges_vs_ell(cfg.ell_grid, N=40, M=2)
    sweep.write_edges_csv(edges, out_dir / "edges.csv")
    summary = {"edges": len(edges), "converge": {}}
    for ell in sweep.CONVERGENCE_ELLS:
        try:
            recs = sweep.hill_convergence_study(ell, cfg.N_list, 0.0, 2, ball="gershgorin")
            ball = "gershgorin"
            if all(r.bound is None for r in recs):
                recs = sweep.hill_convergence_study(ell, cfg.N_list, 0.0, 2, ball="empirical")
                ball = "empirical"
        except IsolationError:
            recs, ball = sweep.hill_convergence_study(ell, cfg.N_list, 0.0, 2, ball="none"), "none"
        sweep.write_converge_csv(recs, out_dir / f"converge_ell{ell:g}.csv")
        summary["converge"][f"{ell:g}"] = ball
    sub = RunConfig("gersh", operator="hill(0.1,2)", mu=0.0, N=5)
    (out_dir / "gersh.json").write_text(_dump_json(gersh_payload(sub)))
    cert_cfg = RunConfig("certify", operator="hill(0.1,2)", mu=0.0, N=10)
    (out_dir / "certify.json").write_text(_dump_json(certify_payload(cert_cfg)[0]))
    points = sweep.band_sweep(hill_operator(0.1, 2), 20, cfg.mu_count)
    sweep.write_bands_csv(points, out_dir / "bands.csv")
    (out_dir / "summary.json").write_text(_dump_json(summary))
    return summary


def run(cfg: RunConfig) -> int:
    cfg.validate()
    c = cfg.command
    if c == "spectrum":
        payload = spectrum_payload(cfg)
        if cfg.format == "csv":
            text = "index,lambda\n" + "".join(f"{i},{v:.17g}\n" for i, v in enumerate(payload["eigenvalues"]))
        else:
            text = _dump_json(payload)
        _emit(text, cfg.output)
    elif c == "bands":
        points = sweep.band_sweep(cfg.operator_spec(), cfg.N, cfg.mu_count)
        if cfg.format == "csv":
            if cfg.output:
                sweep.write_bands_csv(points, cfg.output)
            else:
                _emit(_csv_text(_bands_rows, points), None)
        else:
            _emit(_dump_json({"bands": [{"mu": _f(p.mu), "eigenvalues": [_f(v) for v in p.eigenvalues]} for p in points]}), cfg.output)
    elif c == "converge":
        records = converge_records(cfg)
        if cfg.format == "csv":
            if cfg.output:
                sweep.write_converge_csv(records, cfg.output)
            else:
                _emit(_csv_text(_converge_rows, records), None)
        else:
            _emit(_dump_json(_records_payload(records)), cfg.output)
    elif c == "certify":
        payload, ok = certify_payload(cfg)
        _emit(_dump_json(payload), cfg.output)
        if not ok:
            print("certification failed: isolation condition not met", file=sys.stderr)
            return 2
    elif c == "gersh":
        _emit(_dump_json(gersh_payload(cfg)), cfg.output)
    elif c == "hill-demo":
        out = Path(cfg.output or "hill-demo")
        summary = hill_demo(cfg, out)
        print(f"wrote hill demo to {out} ({summary['edges']} edge rows)")
    return 0


def _bands_rows(points):
    yield ["mu", "index", "lambda"]
    for p in points:
        for i, lam in enumerate(p.eigenvalues):
            yield [f"{p.mu:.17g}", i, f"{lam:.17g}"]


def _converge_rows(records):
    yield ["N", "lambda_N", "error", "bound", "total_bound"]
    fmt = lambda x: "" if x is None else f"{x:.17g}"
    for r in records:
        yield [r.N, fmt(r.lambda_N), fmt(r.error), fmt(r.bound), fmt(r.total_bound)]


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hillcert", description="Hill's method with certified eigenvalue bounds")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--operator", default="hill(0.1,2)", help="hill(ell,M) or an operator spec JSON file")
        p.add_argument("--mu", type=float, default=0.0)
        p.add_argument("--N", type=int, default=10)
        p.add_argument("--N-list", dest="N_list", type=_int_list, default=list(sweep.CONVERGENCE_NS))
        p.add_argument("--ell-grid", dest="ell_grid", type=_float_list, default=list(sweep.DEFAULT_ELL_GRID))
        p.add_argument("--mu-count", dest="mu_count", type=int, default=64)
        p.add_argument("--out", dest="output", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv" if name in ("bands", "converge") else "json")
        p.add_argument("--zeta", type=float, default=None)
        p.add_argument("--r", type=float, default=None)
        p.add_argument("--reference", type=float, default=None)
        p.add_argument("--ball", choices=("gershgorin", "empirical", "none"), default="gershgorin")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    cfg = RunConfig(**vars(args))
    try:
        return run(cfg)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NotHermitianError, IsolationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
