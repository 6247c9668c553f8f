"""Radial weights, domains, and the catalog of worked examples."""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import optimize
from scipy.special import gammaln


class DomainError(ValueError):
    pass


class NotFoundError(KeyError):
    pass


def omega_n(n: int) -> float:
    """Lebesgue measure of the unit ball in R^n."""
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    return math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1.0))


class DomainKind(str, Enum):
    BALL = "ball"
    FULLSPACE = "fullspace"
    EXTERIOR = "exterior"
    ANNULUS = "annulus"


@dataclass(frozen=True)
class DomainSpec:
    kind: DomainKind
    dimension: int
    outer_radius: float = math.inf
    inner_radius: float = 0.0

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.dimension!r}")
        object.__setattr__(self, "kind", DomainKind(self.kind))
        if self.kind is DomainKind.BALL:
            if not (0 < self.outer_radius < math.inf):
                raise DomainError("a ball needs a finite positive radius")
            object.__setattr__(self, "inner_radius", 0.0)
        elif self.kind is DomainKind.FULLSPACE:
            object.__setattr__(self, "inner_radius", 0.0)
            object.__setattr__(self, "outer_radius", math.inf)
        else:
            object.__setattr__(self, "inner_radius", 1.0)
            if not self.outer_radius > 1.0:
                raise DomainError("exterior/annular domains need outer radius > 1 (inner radius is 1)")
            if self.kind is DomainKind.ANNULUS and math.isinf(self.outer_radius):
                raise DomainError("an annulus needs a finite outer radius")

    @classmethod
    def ball(cls, n: int, radius: float = 1.0) -> "DomainSpec":
        return cls(DomainKind.BALL, n, radius)

    @classmethod
    def fullspace(cls, n: int) -> "DomainSpec":
        return cls(DomainKind.FULLSPACE, n)

    @classmethod
    def exterior(cls, n: int, radius: float = math.inf) -> "DomainSpec":
        return cls(DomainKind.EXTERIOR, n, radius)

    @classmethod
    def annulus(cls, n: int, radius: float) -> "DomainSpec":
        return cls(DomainKind.ANNULUS, n, radius)

    @property
    def omega(self) -> float:
        return omega_n(self.dimension)

    @property
    def measure(self) -> float:
        if math.isinf(self.outer_radius):
            return math.inf
        return self.omega * (self.outer_radius ** self.dimension - self.inner_radius ** self.dimension)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.outer_radius)

    @property
    def radial_range(self) -> tuple[float, float]:
        return self.inner_radius, self.outer_radius

    def symmetrized(self) -> "DomainSpec":
        """The centred ball (or R^N) with the same measure."""
        if not self.bounded:
            return DomainSpec.fullspace(self.dimension)
        radius = (self.measure / self.omega) ** (1.0 / self.dimension)
        return DomainSpec.ball(self.dimension, radius)

    def to_dict(self) -> dict:
        return {"shape": self.kind.value, "dimension": self.dimension,
                "radius": _json_float(self.outer_radius), "measure": _json_float(self.measure)}


def _json_float(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class Piece:
    """Radial interval on which the weight is monotone: -1 nonincreasing, +1 nondecreasing, 0 constant."""

    lo: float
    hi: float
    direction: int


@dataclass(frozen=True)
class Singularity:
    """``g(r) ~ coef * d**-exponent * (log(1/d) + shift)**-log_exponent`` with d the distance to ``location``.

    At ``location = inf`` the distance is replaced by ``r`` and ``log(1/d)`` by
    ``log r``, i.e. this describes the decay rate.  ``sides`` is how many
    sides of an interior point the blow-up occurs on.
    """

    location: float
    exponent: float
    log_exponent: float = 0.0
    coef: float | None = None
    shift: float = 0.0
    sides: int = 1


@dataclass(frozen=True, eq=False)
class RadialWeight:
    evaluator: Callable[[np.ndarray], np.ndarray]
    pieces: tuple[Piece, ...]
    singularities: tuple[Singularity, ...] = ()
    closed_form_rearrangement: Callable[[np.ndarray], np.ndarray] | None = None
    closed_form_maximal: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "weight"
    # optional g(anchor + d) computed from the signed offset d, for accuracy near singular radii
    local: Callable[[float, np.ndarray], np.ndarray] | None = None
    # radii where the weight is continuous but not smooth
    kinks: tuple[float, ...] = ()

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.asarray(self.evaluator(r), dtype=float)
        return np.broadcast_to(out, r.shape).astype(float)

    def at_offset(self, anchor: float, d) -> np.ndarray:
        """g(anchor + d), exact in d when a local evaluator is available."""
        d = np.asarray(d, dtype=float)
        if self.local is None:
            return self(anchor + d)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.asarray(self.local(anchor, d), dtype=float)
        return np.broadcast_to(out, d.shape).astype(float)

    @property
    def breakpoints(self) -> list[float]:
        pts = {p.lo for p in self.pieces} | {p.hi for p in self.pieces} | set(self.kinks)
        return sorted(x for x in pts if math.isfinite(x))

    def singularity_at(self, location: float) -> Singularity | None:
        for s in self.singularities:
            if s.location == location:
                return s
        return None

    def scaled(self, c: float) -> "RadialWeight":
        if c < 0:
            raise ValueError("scale must be nonnegative")
        ev = self.evaluator
        star = self.closed_form_rearrangement
        dstar = self.closed_form_maximal
        sings = tuple(replace(s, coef=None if s.coef is None else s.coef * c) for s in self.singularities)
        pieces = self.pieces if c > 0 else tuple(Piece(p.lo, p.hi, 0) for p in self.pieces)
        loc = self.local
        return RadialWeight(
            lambda r: c * ev(r), pieces, sings if c > 0 else (),
            None if star is None else (lambda t: c * star(t)),
            None if dstar is None else (lambda t: c * dstar(t)),
            f"{c}*{self.name}",
            None if loc is None else (lambda a, d: c * loc(a, d)), self.kinks)

    def positive_part(self) -> "RadialWeight":
        ev = self.evaluator
        loc = self.local
        return replace(self, evaluator=lambda r: np.maximum(ev(r), 0.0), name=f"({self.name})+",
                       local=None if loc is None else (lambda a, d: np.maximum(loc(a, d), 0.0)))

    def restricted(self, lo: float, hi: float) -> "RadialWeight":
        """Same weight multiplied by the indicator of lo < r <= hi."""
        ev = self.evaluator
        pieces = []
        if lo > 0:
            pieces.append(Piece(0.0, lo, 0))
        for p in self.pieces:
            a, b = max(p.lo, lo), min(p.hi, hi)
            if a < b:
                pieces.append(Piece(a, b, p.direction))
        if math.isfinite(hi):
            pieces.append(Piece(hi, math.inf, 0))
        sings = tuple(s for s in self.singularities if lo <= s.location <= hi)
        return RadialWeight(lambda r: np.where((r > lo) & (r <= hi), ev(r), 0.0), tuple(pieces),
                            sings, name=f"{self.name}|({lo},{hi}]",
                            kinks=tuple(k for k in self.kinks if lo < k < hi))

    def check_monotone(self, n: int = 1000, rel_tol: float = 1e-9) -> bool:
        for p in self.pieces:
            hi = p.hi if math.isfinite(p.hi) else max(10.0 * max(p.lo, 1.0), 1e6)
            if p.lo > 0:
                r = np.geomspace(p.lo, hi, n + 2)[1:-1]
            else:
                r = np.geomspace(hi * 1e-12, hi, n + 2)[1:-1]
            v = self(r)
            fin = np.isfinite(v)
            v = v[fin]
            if len(v) < 2:
                continue
            d = np.diff(v)
            tol = rel_tol * np.maximum(np.abs(v[1:]), np.abs(v[:-1]))
            if p.direction < 0 and np.any(d > tol):
                return False
            if p.direction > 0 and np.any(d < -tol):
                return False
            if p.direction == 0 and np.any(np.abs(d) > tol):
                return False
        return True


def detect_pieces(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                  breakpoints: Sequence[float] = (), n: int = 2048) -> tuple[Piece, ...]:
    """Split [lo, hi] into monotone pieces by sampling and refining local extrema."""
    cuts = sorted({lo, hi, *[b for b in breakpoints if lo < b < hi]})
    pieces: list[Piece] = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        pieces.extend(_detect_on(f, a, b, n))
    return tuple(pieces)


def _detect_on(f, a, b, n):
    top = b if math.isfinite(b) else max(1e3 * max(a, 1.0), 1e6)
    lin = np.linspace(a, top, n)
    if a == 0:
        geo = np.geomspace(top * 1e-9, top, n // 4)
        r = np.unique(np.concatenate([lin, geo]))
    else:
        r = lin
    with np.errstate(all="ignore"):
        v = np.asarray(f(r), dtype=float)
    scale = np.nanmax(np.abs(v[np.isfinite(v)]), initial=0.0)
    tol = 1e-13 * max(scale, 1e-300)
    d = np.diff(v)
    sgn = np.where(np.abs(d) <= tol, 0, np.sign(d)).astype(int)
    # collapse to runs of nonzero direction
    segs = []  # (start_index, direction)
    for i, s in enumerate(sgn):
        if not segs:
            segs.append([i, s])
        elif s != segs[-1][1]:
            if segs[-1][1] == 0:
                segs[-1][1] = s
            elif s != 0:
                segs.append([i, s])
    if not segs:
        return [Piece(a, b, 0)]
    edges = [a]
    for k in range(1, len(segs)):
        i = segs[k][0]
        lo_i, hi_i = r[max(i - 1, 0)], r[min(i + 1, len(r) - 1)]
        direction = segs[k - 1][1]
        sign = -1.0 if direction > 0 else 1.0  # maximize at a peak, minimize at a trough
        res = optimize.minimize_scalar(lambda x: sign * float(f(np.array([x]))[0]),
                                       bounds=(lo_i, hi_i), method="bounded",
                                       options={"xatol": 1e-13 * max(1.0, abs(hi_i))})
        edges.append(float(res.x))
    edges.append(b)
    return [Piece(edges[k], edges[k + 1], int(segs[k][1])) for k in range(len(segs))
            if edges[k + 1] > edges[k]]


# ---------------------------------------------------------------------------
# concrete weights
# ---------------------------------------------------------------------------

def power_weight(alpha: float, coef: float = 1.0) -> RadialWeight:
    """coef * r**-alpha (alpha may be 0 for constants)."""
    sings = (Singularity(0.0, alpha, 0.0, coef), Singularity(math.inf, alpha, 0.0, coef)) if alpha != 0 else ()
    direction = -1 if alpha > 0 else (1 if alpha < 0 else 0)
    return RadialWeight(lambda r: coef * np.power(r, -float(alpha)), (Piece(0.0, math.inf, direction),),
                        sings, name=f"power(alpha={alpha})")


def power_star(alpha: float, n: int, radius: float = math.inf) -> tuple[Callable, Callable]:
    w = omega_n(n)
    cap = w * radius ** n if math.isfinite(radius) else math.inf

    def star(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < cap, (w / t) ** (alpha / n), 0.0)

    def dstar(t):
        t = np.asarray(t, dtype=float)
        inside = n / (n - alpha) * (w / t) ** (alpha / n)
        outside = n / (n - alpha) * (w / cap) ** (alpha / n) * cap / t if math.isfinite(cap) else 0.0
        return np.where(t < cap, inside, outside)

    return star, dstar


def constant_weight(c: float) -> RadialWeight:
    return RadialWeight(lambda r: np.full_like(np.asarray(r, dtype=float), c), (Piece(0.0, math.inf, 0),),
                        name=f"constant(c={c})",
                        closed_form_rearrangement=lambda t: np.full_like(np.asarray(t, dtype=float), c))


def zero_weight() -> RadialWeight:
    w = constant_weight(0.0)
    return replace(w, name="zero")


def shifted_power_weight(beta: float, n: int) -> RadialWeight:
    """(r - 1)**-beta on 1 < r <= 2, zero elsewhere."""
    w = omega_n(n)
    cap = w * (2 ** n - 1)

    def ev(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where((r > 1.0) & (r <= 2.0), np.power(np.abs(r - 1.0), -beta), 0.0)

    def star(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t <= cap, np.power(np.expm1(np.log1p(t / w) / n), -beta), 0.0)

    def local(anchor, d):
        if anchor != 1.0:
            return ev(anchor + d)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where((d > 0) & (d <= 1.0), np.power(np.abs(d), -beta), 0.0)

    pieces = (Piece(0.0, 1.0, 0), Piece(1.0, 2.0, -1), Piece(2.0, math.inf, 0))
    return RadialWeight(ev, pieces, (Singularity(1.0, beta, 0.0, 1.0, 0.0, 1),),
                        closed_form_rearrangement=star, name=f"shifted-power(beta={beta})", local=local)


def shifted_power_distribution(beta: float, n: int, s) -> np.ndarray:
    w = omega_n(n)
    s = np.asarray(s, dtype=float)
    return np.where(s < 1.0, w * (2 ** n - 1), w * (s ** (-1.0 / beta) + 1.0) ** n - w)


def power_log_weight(alpha: float, beta: float, radius: float, log_dim: int) -> RadialWeight:
    """r**-alpha * log(e * (R/r)**m)**-beta on 0 < r < R, with m = log_dim.

    With alpha = m this is the family 1/(|x|^m [log((R/|x|)^m e)]^beta);
    (alpha, beta, m) = (4, 2, 4) is the critical four-dimensional weight and
    (N, n + 2, N) the appendix family f_n.
    """
    m = log_dim

    def ev(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lg = 1.0 + m * (math.log(radius) - np.log(r))
            return np.where(r < radius, np.power(r, -alpha) * np.power(np.maximum(lg, 1e-300), -beta), 0.0)

    # d/dr log g = -(alpha - m*beta/L)/r ; decreasing while L > m*beta/alpha
    l_turn = m * beta / alpha if alpha > 0 else math.inf
    pieces: list[Piece] = []
    if alpha > 0 and l_turn > 1.0:
        r_turn = radius * math.exp(-(l_turn - 1.0) / m)
        pieces = [Piece(0.0, r_turn, -1), Piece(r_turn, radius, 1)]
    else:
        pieces = [Piece(0.0, radius, -1)]
    pieces.append(Piece(radius, math.inf, 0))
    # near 0: log(e (R/r)^m) = m (log(1/r) + log R + 1/m)
    sing = Singularity(0.0, alpha, beta, m ** (-beta), math.log(radius) + 1.0 / m)
    return RadialWeight(ev, tuple(pieces), (sing,), name=f"power-log(alpha={alpha},beta={beta},R={radius},m={m})")


def fn_formulas(n_index: int, n: int, radius: float) -> tuple[Callable, Callable]:
    """The closed forms t -> omega/(t L^(k+2)) and omega/((k+1) t L^(k+1)), L = log(e|Omega|/t)."""
    w = omega_n(n)
    meas = w * radius ** n

    def star(t):
        t = np.asarray(t, dtype=float)
        return w / (t * np.log(math.e * meas / t) ** (n_index + 2))

    def dstar(t):
        t = np.asarray(t, dtype=float)
        return w / ((n_index + 1) * t * np.log(math.e * meas / t) ** (n_index + 1))

    return star, dstar


def annulus_log_weight() -> RadialWeight:
    """1/((r^4 - 1) log(16e/(r^4 - 1))^(3/2)) on 1 < r < 2 in R^4: integrable, not in M log L."""

    def ev(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.expm1(4.0 * np.log(np.where(r > 1.0, r, 2.0)))
            val = 1.0 / (x * np.log(16.0 * math.e / x) ** 1.5)
        return np.where((r > 1.0) & (r < 2.0), val, 0.0)

    def local(anchor, d):
        if anchor != 1.0:
            return ev(anchor + d)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.expm1(4.0 * np.log1p(np.where(d > 0, d, 1.0)))
            val = 1.0 / (x * np.log(16.0 * math.e / x) ** 1.5)
        return np.where((d > 0) & (d < 1.0), val, 0.0)

    # near r = 1: r^4 - 1 ~ 4 d, log(16e/(4d)) = log(1/d) + log(4e)
    sing = Singularity(1.0, 1.0, 1.5, 0.25, math.log(4.0 * math.e), 1)
    pieces = (Piece(0.0, 1.0, 0), Piece(1.0, 2.0, -1), Piece(2.0, math.inf, 0))
    return RadialWeight(ev, pieces, (sing,), name="annulus-log", local=local)


def table_weight(radii, values, name: str = "table") -> RadialWeight:
    """Piecewise-linear interpolant of tabulated samples (strictly increasing radii), zero outside."""
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    if radii.ndim != 1 or len(radii) != len(values) or len(radii) < 2:
        raise ValueError("table needs two equal-length columns with at least two rows")
    if np.any(np.diff(radii) <= 0):
        raise ValueError("table radii must be strictly increasing")
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ValueError("table values must be finite and nonnegative")

    def ev(r):
        r = np.asarray(r, dtype=float)
        inside = (r >= radii[0]) & (r <= radii[-1])
        return np.where(inside, np.interp(r, radii, values), 0.0)

    pieces: list[Piece] = []
    if radii[0] > 0:
        pieces.append(Piece(0.0, radii[0], 0))
    d = np.sign(np.diff(values)).astype(int)
    start = 0
    for i in range(1, len(d) + 1):
        if i == len(d) or d[i] != d[start]:
            pieces.append(Piece(float(radii[start]), float(radii[i]), int(d[start])))
            start = i
    pieces.append(Piece(float(radii[-1]), math.inf, 0))
    return RadialWeight(ev, tuple(pieces), name=name, kinks=tuple(float(x) for x in radii))


def read_table_csv(path: str | Path) -> RadialWeight:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if rows:
                    raise
                continue  # header
    arr = np.array(rows)
    return table_weight(arr[:, 0], arr[:, 1], name=Path(path).stem)


def composite_weight(weights: Sequence[RadialWeight], lo: float = 0.0, hi: float = math.inf) -> RadialWeight:
    """Pointwise sum; monotone pieces are re-detected numerically."""
    evs = [w.evaluator for w in weights]

    def ev(r):
        return sum(np.asarray(e(r), dtype=float) for e in evs)

    bps = sorted({b for w in weights for b in w.breakpoints} | {s.location for w in weights for s in w.singularities
                                                                 if math.isfinite(s.location)})
    pieces = detect_pieces(ev, lo, hi, bps)
    sings = []
    for loc in {s.location for w in weights for s in w.singularities}:
        cands = [w.singularity_at(loc) for w in weights if w.singularity_at(loc) is not None]
        worst = max(cands, key=lambda s: (s.exponent, -s.log_exponent) if math.isfinite(loc) or loc == 0
                    else (-s.exponent, s.log_exponent))
        sings.append(replace(worst, coef=None))
    return RadialWeight(ev, pieces, tuple(sings), name="+".join(w.name for w in weights), kinks=tuple(bps))


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightCatalogEntry:
    name: str
    weight: RadialWeight
    domain: DomainSpec
    known_facts: tuple[tuple[str, str], ...] = field(default_factory=tuple)


_NAME_RE = re.compile(r"^\s*([A-Za-z][\w\-]*)\s*(?:[(:]\s*(.*?)\s*\)?\s*)?$")


def parse_name(name: str) -> tuple[str, dict[str, float]]:
    """'power(alpha=4,N=5,R=inf)' or 'power:alpha=4,N=5' -> ('power', {...})."""
    m = _NAME_RE.match(name)
    if not m:
        raise NotFoundError(name)
    base, args = m.group(1), m.group(2)
    params: dict[str, float] = {}
    if args:
        for part in args.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise NotFoundError(f"malformed parameter {part!r} in {name!r}")
            k, v = part.split("=", 1)
            params[k.strip()] = float(v)
    return base.lower(), params


def _int(params, key, default):
    v = params.get(key, default)
    if int(v) != v:
        raise DomainError(f"{key} must be an integer")
    return int(v)


def _power_entry(p):
    alpha = p.get("alpha", 4.0)
    n = _int(p, "N", 5)
    radius = p.get("R", math.inf)
    dom = DomainSpec.fullspace(n) if math.isinf(radius) else DomainSpec.ball(n, radius)
    w = power_weight(alpha)
    star, dstar = power_star(alpha, n, radius)
    w = replace(w, closed_form_rearrangement=star, closed_form_maximal=dstar if alpha < n else None)
    member = alpha <= 4 if math.isfinite(radius) else alpha == 4
    facts = [("WeakLorentz", "member" if member else "not-member")]
    if n >= 5 and member:
        facts.append(("classify", "Admissible/WeakLorentzN5"))
    return w, dom, facts


def _shifted_entry(p):
    n = _int(p, "N", 5)
    beta = p.get("beta", 0.9)
    w = shifted_power_weight(beta, n)
    facts = []
    if 4.0 / n < beta < 1.0:
        facts = [("WeakLorentz", "not-member"), ("IntegralR3", "finite"),
                 ("classify", "Admissible/IntegralR3")]
    return w, DomainSpec.fullspace(n), facts


def _critical_log_entry(p):
    radius = p.get("R", 1.0)
    w = power_log_weight(4.0, 2.0, radius, 4)
    star, dstar = fn_formulas(0, 4, radius)
    w = replace(w, closed_form_maximal=dstar, name=f"critical-log(R={radius})")
    return w, DomainSpec.ball(4, radius), [("MLogL", "member"), ("MLogL-norm", "omega_4")]


def _fn_entry(p):
    k = _int(p, "n", 1)
    n = _int(p, "N", 5)
    radius = p.get("R", 1.0)
    w = power_log_weight(float(n), k + 2.0, radius, n)
    w = replace(w, name=f"fn(n={k},N={n},R={radius})")
    return w, DomainSpec.ball(n, radius), [("appendix", "(n+1)|f_n|_MlogL <= |f_n|_(1,inf,2)")]


def _zero_entry(p):
    n = _int(p, "N", 5)
    radius = p.get("R", math.inf)
    dom = DomainSpec.fullspace(n) if math.isinf(radius) else DomainSpec.ball(n, radius)
    return zero_weight(), dom, [("classify", "Admissible (trivially, constant 0)")]


def _constant_entry(p):
    n = _int(p, "N", 5)
    radius = p.get("R", 1.0)
    return constant_weight(p.get("c", 1.0)), DomainSpec.ball(n, radius), [("every finite-measure space", "member")]


def _annulus_log_entry(p):
    return annulus_log_weight(), DomainSpec.annulus(4, 2.0), [("AnnulusL1", "finite"), ("MLogL", "not-member")]


def _schwarz_shifted_entry(p):
    from .rearrange import rearrangement, schwarz_weight

    w, dom, _ = _shifted_entry(p)
    sym = schwarz_weight(rearrangement(w, dom), dom)
    return sym, dom.symmetrized(), [("classify", "NotAdmissible/NecessityWeakLorentz")]


CATALOG: dict[str, Callable] = {
    "power": _power_entry,
    "shifted-power": _shifted_entry,
    "critical-log": _critical_log_entry,
    "fn": _fn_entry,
    "zero": _zero_entry,
    "constant": _constant_entry,
    "annulus-log": _annulus_log_entry,
    "schwarz-shifted-power": _schwarz_shifted_entry,
}


def catalog_lookup(name: str) -> WeightCatalogEntry:
    base, params = parse_name(name)
    if base not in CATALOG:
        raise NotFoundError(f"unknown weight {base!r}; known: {', '.join(sorted(CATALOG))}")
    weight, dom, facts = CATALOG[base](params)
    return WeightCatalogEntry(name, weight, dom, tuple(facts))


def catalog_names() -> list[str]:
    return sorted(CATALOG)


# ---------------------------------------------------------------------------
# config ingestion
# ---------------------------------------------------------------------------

def domain_from_dict(d: dict) -> DomainSpec:
    shape = str(d.get("shape", "ball")).lower()
    n = int(d["dimension"])
    radius = float(d.get("radius", math.inf if shape in ("fullspace", "exterior") else 1.0))
    return DomainSpec(DomainKind(shape), n, radius)


def weight_from_dict(d: dict, base_dir: Path | None = None) -> RadialWeight:
    kind = str(d["kind"]).lower()
    if kind == "power":
        return power_weight(float(d.get("alpha", 4.0)), float(d.get("coef", 1.0)))
    if kind == "power-log":
        return power_log_weight(float(d["alpha"]), float(d["beta"]), float(d.get("R", 1.0)),
                                int(d.get("log_dim", d.get("N", 4))))
    if kind == "shifted-power":
        return shifted_power_weight(float(d["beta"]), int(d.get("N", 5)))
    if kind == "table":
        path = Path(d["path"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return read_table_csv(path)
    if kind == "composite":
        return composite_weight([weight_from_dict(c, base_dir) for c in d["parts"]])
    if kind == "constant":
        return constant_weight(float(d.get("c", 1.0)))
    if kind == "zero":
        return zero_weight()
    raise ValueError(f"unknown weight kind {kind!r}")


def load_weight_config(path: str | Path) -> tuple[RadialWeight, DomainSpec | None]:
    """Read a JSON or YAML weight definition with an optional ``domain`` block."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml

        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    weight = weight_from_dict(data["weight"] if "weight" in data else data, path.parent)
    dom = domain_from_dict(data["domain"]) if "domain" in data else None
    return weight, dom
