"""Command-line front end: weight ingestion, criterion runs, verification sweeps and table emission."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import admissibility, muckenhoupt, norms, verifier
from .admissibility import AdmissibilityVerdict, UnsupportedGeometry, classify
from .profiles import (DomainError, DomainKind, DomainSpec, NotFoundError, RadialWeight, catalog_lookup,
                       load_weight_config, parse_name, read_table_csv)
from .rearrange import rearrangement

SCHEMA_VERSION = 1
COMMANDS = ("rearrange", "norm", "muckenhoupt", "classify", "verify", "check-lemmas", "report")
FORMATS = ("json", "csv", "table")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_UNSUPPORTED = 3


class UsageError(ValueError):
    """Malformed command line or configuration."""


@dataclass
class RunConfig:
    command: str
    weight: str = "power:alpha=4,N=5"
    domain: str | None = None
    space: str | None = None
    rtrunc: float = 1e3
    nodes: int = 2000
    grid: float = 1.0
    seed: int = 0
    format: str = "json"
    out: str | None = None
    exhaustive: bool = False
    points: int = 64
    samples: int = 10

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}; expected one of {', '.join(FORMATS)}")
        if not (self.rtrunc > 1.0 and math.isfinite(self.rtrunc)):
            raise UsageError("--rtrunc must be a finite number above 1")
        if self.nodes < 4 or self.points < 1 or self.samples < 1:
            raise UsageError("--nodes, --points and --samples must be positive (nodes at least 4)")
        if not self.grid > 0:
            raise UsageError("--grid must be positive")
        if self.command == "norm" and self.space is None:
            raise UsageError("norm needs --space")
        if self.space is not None:
            parse_space(self.space)
        return self


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a JSON or YAML file whose keys mirror RunConfig fields."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            import yaml

            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except Exception as exc:  # parser errors differ between yaml and json
        raise UsageError(f"malformed config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a mapping")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hardyrellich", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON or YAML file with RunConfig fields")
        p.add_argument("--weight", help="catalog name (e.g. power:alpha=4,N=5), weight config, or CSV table")
        p.add_argument("--domain", help="fullspace, ball:R=1, exterior:R=2, annulus:R=2 (N=.. sets dimension)")
        p.add_argument("--space", help="p,q[,alpha] for Lorentz(-Zygmund) spaces, or mlogl")
        p.add_argument("--rtrunc", type=float, help="truncation radius for unbounded domains")
        p.add_argument("--nodes", type=int, help="finite elements in the radial mesh")
        p.add_argument("--grid", type=float, help="panel density multiplier for rearrangement grids")
        p.add_argument("--seed", type=int, help="seed for random test functions and candidates")
        p.add_argument("--format", choices=FORMATS, help="output format")
        p.add_argument("--out", help="write the artifact here instead of stdout")
        p.add_argument("--exhaustive", action="store_true", default=None,
                       help="evaluate every criterion instead of stopping at the first that fires")
        p.add_argument("--points", type=int, help="sample points for rearrange output")
        p.add_argument("--samples", type=int, help="random test functions per check")
    return parser


def config_from_args(argv: list[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError(f"missing command; expected one of {', '.join(COMMANDS)}")
    data: dict[str, Any] = {}
    if args.config:
        data.update(load_config(args.config))
    data.pop("command", None)
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        val = getattr(args, f.name, None)
        if val is not None:
            data[f.name] = val
    try:
        cfg = RunConfig(command=args.command, **data)
        cfg.rtrunc, cfg.grid = float(cfg.rtrunc), float(cfg.grid)
        cfg.nodes, cfg.seed, cfg.points, cfg.samples = int(cfg.nodes), int(cfg.seed), int(cfg.points), int(cfg.samples)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad configuration value: {exc}") from exc
    return cfg.validate()


def parse_space(text: str) -> tuple:
    """'p,q' or 'p,q,alpha' (inf allowed) or 'mlogl' -> ("mlogl",) or (p, q) or (p, q, alpha)."""
    t = text.strip().lower()
    if t in ("mlogl", "m-log-l"):
        return ("mlogl",)
    try:
        parts = tuple(float(x) for x in t.split(","))
    except ValueError as exc:
        raise UsageError(f"malformed --space {text!r}") from exc
    if len(parts) not in (2, 3) or any(math.isnan(x) for x in parts):
        raise UsageError("--space takes p,q or p,q,alpha")
    if not (parts[0] >= 1.0 and parts[1] >= 1.0):
        raise UsageError("--space needs p >= 1 and q >= 1")
    return parts


def parse_domain(text: str, default_dim: int | None) -> DomainSpec:
    base, params = parse_name(text)
    if "N" in params:
        n = params["N"]
    elif default_dim is not None:
        n = default_dim
    else:
        raise UsageError("--domain needs N=.. when the weight does not fix a dimension")
    if int(n) != n:
        raise UsageError("dimension must be an integer")
    try:
        kind = DomainKind(base)
    except ValueError as exc:
        raise UsageError(f"unknown domain shape {base!r}") from exc
    radius = params.get("R", math.inf if kind in (DomainKind.FULLSPACE, DomainKind.EXTERIOR) else 1.0)
    return DomainSpec(kind, int(n), radius)


def resolve_weight(cfg: RunConfig) -> tuple[RadialWeight, DomainSpec]:
    ref = cfg.weight
    path = Path(ref)
    dom: DomainSpec | None = None
    if path.suffix.lower() in (".json", ".yaml", ".yml") and path.exists():
        weight, dom = load_weight_config(path)
    elif path.suffix.lower() == ".csv" and path.exists():
        weight = read_table_csv(path)
    else:
        entry = catalog_lookup(ref)
        weight, dom = entry.weight, entry.domain
    if cfg.domain is not None:
        dom = parse_domain(cfg.domain, dom.dimension if dom is not None else None)
    if dom is None:
        raise UsageError("the weight does not come with a domain; pass --domain")
    return weight, dom


# ---------------------------------------------------------------------------
# commands; each returns (metadata, rows)
# ---------------------------------------------------------------------------

Rows = list[dict[str, Any]]


def _enc(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _sample_points(rp, count: int) -> np.ndarray:
    if rp.zero:
        return np.geomspace(rp.lo, rp.hi, count)
    end = min(rp.support, rp.measure)
    hi = end if math.isfinite(end) else rp.hi
    return np.geomspace(rp.lo, hi * (1 - 1e-12), count)


def cmd_rearrange(cfg: RunConfig) -> tuple[dict, Rows]:
    weight, dom = resolve_weight(cfg)
    rp = rearrangement(weight, dom, per_unit=cfg.grid)
    t = _sample_points(rp, cfg.points)
    star = rp.star(t)
    dstar = rp.doublestar(t)
    rows = [{"t": float(a), "g_star": float(b), "g_doublestar": float(c)} for a, b, c in zip(t, star, dstar)]
    meta = {"weight": weight.name, "domain": dom.to_dict(), "support": _enc(rp.support),
            "integral": _enc(rp.integral)}
    return meta, rows


def cmd_norm(cfg: RunConfig) -> tuple[dict, Rows]:
    weight, dom = resolve_weight(cfg)
    rp = rearrangement(weight, dom, per_unit=cfg.grid)
    space = parse_space(cfg.space)
    rows: Rows = []
    if space == ("mlogl",):
        rows.append({"space": "MlogL", "functional": "sup t log(|dom|/t) g**", "value": _enc(norms.mlogl_norm(rp))})
    elif len(space) == 2:
        p, q = space
        label = f"L^({p:g},{q:g})"
        rows.append({"space": label, "functional": "quasinorm (g*)", "value": _enc(norms.lorentz_quasinorm(rp, p, q))})
        rows.append({"space": label, "functional": "norm (g**)", "value": _enc(norms.lorentz_norm(rp, p, q))})
    else:
        p, q, alpha = space
        label = f"L^({p:g},{q:g},{alpha:g})"
        for functional, maximal in (("quasinorm (g*)", False), ("norm (g**)", True)):
            val = norms.lorentz_zygmund_quasinorm(rp, p, q, alpha, maximal=maximal)
            rows.append({"space": label, "functional": functional, "value": _enc(val)})
    return {"weight": weight.name, "domain": dom.to_dict()}, rows


def cmd_muckenhoupt(cfg: RunConfig) -> tuple[dict, Rows]:
    weight, dom = resolve_weight(cfg)
    rp = rearrangement(weight.positive_part(), dom, per_unit=cfg.grid)
    rows: Rows = []
    for hp in muckenhoupt.lemma_pairs(weight, dom, rp):
        emp = muckenhoupt.empirical_max_ratio(hp, n_candidates=max(cfg.samples, 41), seed=cfg.seed)
        a = emp.constant
        rows.append({"pair": hp.name, "direction": hp.direction.value, "A": _enc(a),
                     "bracket_low": _enc(a), "bracket_high": _enc(4.0 * a),
                     "empirical_max_ratio": _enc(emp.max_ratio), "candidates": emp.n_candidates})
    return {"weight": weight.name, "domain": dom.to_dict(), "seed": cfg.seed}, rows


def cmd_classify(cfg: RunConfig) -> tuple[dict, Rows]:
    weight, dom = resolve_weight(cfg)
    verdict = classify(weight, dom, exhaustive=cfg.exhaustive)
    meta = {"weight": weight.name, "domain": dom.to_dict(), "verdict": verdict.to_dict()}
    rows = [r.to_dict() for r in verdict.details]
    return meta, rows


def _mesh(weight: RadialWeight, dom: DomainSpec, cfg: RunConfig) -> verifier.RadialMesh:
    if dom.kind is DomainKind.FULLSPACE:
        r_min = 1e-7
        per_decade = max(int(round(cfg.nodes / math.log10(cfg.rtrunc / r_min))), 1)
        return verifier.RadialMesh.log_uniform(r_min, cfg.rtrunc, per_decade, dom.dimension)
    return verifier.RadialMesh.for_domain(weight, dom, n_elements=cfg.nodes, r_trunc=cfg.rtrunc)


def cmd_verify(cfg: RunConfig) -> tuple[dict, Rows]:
    weight, dom = resolve_weight(cfg)
    mesh = _mesh(weight, dom, cfg)
    est = verifier.best_constant_estimate(weight, dom, mesh)
    row = {"elements": mesh.n_elements, "r_trunc": _enc(cfg.rtrunc if not dom.bounded else dom.outer_radius),
           "estimate": _enc(est)}
    return {"weight": weight.name, "domain": dom.to_dict()}, [row]


def cmd_check_lemmas(cfg: RunConfig) -> tuple[dict, Rows]:
    """Random-bump runs of the pointwise rearrangement bound, the polar identity and the embeddings."""
    rng = np.random.default_rng(cfg.seed)
    rows: Rows = []

    def record(name, n, lhs, rhs, tol=0.0):
        lhs, rhs = np.atleast_1d(lhs), np.atleast_1d(rhs)
        viol = int(np.sum(lhs > rhs * (1 + 1e-9) + tol))
        with np.errstate(all="ignore"):
            ratio = float(np.max(np.where(rhs > 0, lhs / rhs, 0.0)))
        rows.append({"check": name, "dimension": n, "violations": viol, "max_ratio": ratio})

    for n in (3, 5):
        dom = DomainSpec.fullspace(n)
        for _ in range(cfg.samples):
            u = verifier.random_bumps(rng)
            s = rng.uniform(0.0, dom.omega * u.support[1] ** n, 20)
            lhs, rhs = verifier.cianchi_check(u, dom, s, per_unit=cfg.grid)
            record("pointwise", n, lhs, rhs)
    for n in (3, 4, 5):
        dom = DomainSpec.fullspace(n) if n != 4 else DomainSpec.ball(4, 1.0)
        for _ in range(cfg.samples):
            lhs, rhs = verifier.polar_second_derivative_check(verifier.random_bumps(rng), dom)
            record("polar", n, lhs, rhs, 1e-8 * max(abs(rhs), 1.0))
    for dom in (DomainSpec.fullspace(5), DomainSpec.ball(4, 1.0)):
        c1 = verifier.embedding_constant(dom)
        for _ in range(cfg.samples):
            lhs, rhs = verifier.embedding_check(verifier.random_bumps(rng), dom, c1)
            record("embedding", dom.dimension, lhs, rhs)
    summary: dict[tuple, dict] = {}
    for r in rows:
        key = (r["check"], r["dimension"])
        s = summary.setdefault(key, {"check": r["check"], "dimension": r["dimension"], "cases": 0,
                                     "violations": 0, "max_ratio": 0.0})
        s["cases"] += 1
        s["violations"] += r["violations"]
        s["max_ratio"] = max(s["max_ratio"], r["max_ratio"])
    return {"seed": cfg.seed, "samples": cfg.samples}, list(summary.values())


REPORT_WEIGHTS = ("power:alpha=4,N=5", "shifted-power:beta=0.9,N=5", "schwarz-shifted-power:beta=0.9,N=5",
                  "critical-log:R=1", "annulus-log", "power:alpha=2,N=3,R=1", "constant:c=1,N=2,R=1", "zero")


def cmd_report(cfg: RunConfig) -> tuple[dict, Rows]:
    """Every report weight through classify (all criteria) and the eigenvalue estimate."""
    rows: Rows = []
    criteria = [c.value for c in admissibility.Criterion]
    for name in REPORT_WEIGHTS:
        entry = catalog_lookup(name)
        row: dict[str, Any] = {"weight": name, "domain": entry.domain.kind.value, "N": entry.domain.dimension}
        verdict = classify(entry.weight, entry.domain, exhaustive=True)
        row["status"] = verdict.status.value
        row["criterion"] = verdict.criterion.value
        row["constant_bound"] = _enc(verdict.constant_bound) if verdict.constant_bound is not None else ""
        for c in criteria:
            res = verdict.result_for(admissibility.Criterion(c))
            row[c] = "" if res is None else _enc(res.value)
        try:
            mesh = _mesh(entry.weight, entry.domain, cfg)
            row["estimate"] = _enc(verifier.best_constant_estimate(entry.weight, entry.domain, mesh))
        except (verifier.DegenerateError, DomainError) as exc:
            _diag(f"{name}: no estimate ({exc})")
            row["estimate"] = ""
        _diag(f"{name}: {row['status']}/{row['criterion']}")
        rows.append(row)
    return {"nodes": cfg.nodes, "rtrunc": cfg.rtrunc}, rows


HANDLERS: dict[str, Callable[[RunConfig], tuple[dict, Rows]]] = {
    "rearrange": cmd_rearrange,
    "norm": cmd_norm,
    "muckenhoupt": cmd_muckenhoupt,
    "classify": cmd_classify,
    "verify": cmd_verify,
    "check-lemmas": cmd_check_lemmas,
    "report": cmd_report,
}


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _csv_value(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render(cfg: RunConfig, meta: dict, rows: Rows) -> str:
    if cfg.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": cfg.command, **meta, "rows": rows}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    header = ["schema_version"] + (list(rows[0]) if rows else [])
    table = [[str(SCHEMA_VERSION)] + [_csv_value(r.get(k, "")) for k in header[1:]] for r in rows]
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(table)
        return buf.getvalue()
    widths = [max(len(h), *(len(r[i]) for r in table)) if table else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in table]
    return "\n".join(lines) + "\n"


def verdict_from_output(text: str) -> AdmissibilityVerdict:
    """Re-read the verdict from a JSON classify artifact."""
    return AdmissibilityVerdict.from_dict(json.loads(text)["verdict"])


def _diag(msg: str) -> None:
    print(msg, file=sys.stderr)


def run(cfg: RunConfig) -> str:
    meta, rows = HANDLERS[cfg.command](cfg)
    return render(cfg, meta, rows)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
    except UsageError as exc:
        _diag(f"usage error: {exc}")
        return EXIT_USAGE
    try:
        text = run(cfg)
    except UnsupportedGeometry as exc:
        _diag(f"unsupported geometry: {exc}")
        return EXIT_UNSUPPORTED
    except UsageError as exc:
        _diag(f"usage error: {exc}")
        return EXIT_USAGE
    except NotFoundError as exc:
        _diag(f"unknown weight: {exc}")
        return EXIT_USAGE
    except (DomainError, ValueError, ArithmeticError) as exc:
        _diag(f"error: {exc}")
        return EXIT_ERROR
    if cfg.out:
        Path(cfg.out).write_text(text)
        _diag(f"wrote {cfg.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
