"""Sufficient and necessary admissibility criteria, with certificates and constant bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy import optimize

from . import norms
from .muckenhoupt import a1_constant, a2_constant, lemma_pairs
from .profiles import DomainError, DomainKind, DomainSpec, RadialWeight, omega_n
from .quad import EndHint
from .rearrange import RearrangedProfile, rearrangement


class UnsupportedGeometry(DomainError):
    """Dimension/domain combination outside the covered cases."""


class Status(str, Enum):
    ADMISSIBLE = "Admissible"
    NOT_ADMISSIBLE = "NotAdmissible"
    INCONCLUSIVE = "Inconclusive"


class Criterion(str, Enum):
    WEAK_LORENTZ_N5 = "WeakLorentzN5"
    INTEGRAL_R3 = "IntegralR3"
    MLOGL4 = "MLogL4"
    EXTERIOR_N34 = "ExteriorN34"
    EXTERIOR_N2 = "ExteriorN2"
    ANNULUS_L1 = "AnnulusL1"
    BOUNDED_LOW_DIM_L1 = "BoundedLowDimL1"
    NECESSITY_WEAK_LORENTZ = "NecessityWeakLorentz"
    NECESSITY_MLOGL = "NecessityMLogL"


NECESSITY = {Criterion.NECESSITY_WEAK_LORENTZ, Criterion.NECESSITY_MLOGL}


@dataclass(frozen=True)
class CriterionResult:
    criterion: Criterion
    value: float
    passed: bool

    def to_dict(self) -> dict:
        return {"criterion": self.criterion.value, "value": _enc(self.value), "passed": self.passed}

    @classmethod
    def from_dict(cls, d: dict) -> "CriterionResult":
        return cls(Criterion(d["criterion"]), _dec(d["value"]), bool(d["passed"]))


@dataclass(frozen=True)
class AdmissibilityVerdict:
    status: Status
    criterion: Criterion | None
    certificate_value: float
    constant_bound: float | None = None
    details: tuple[CriterionResult, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "status", Status(self.status))
        if self.criterion is not None:
            object.__setattr__(self, "criterion", Criterion(self.criterion))
        if self.status is Status.ADMISSIBLE:
            if self.criterion is None or self.criterion in NECESSITY or not math.isfinite(self.certificate_value):
                raise ValueError("an admissible verdict needs a finite sufficiency certificate")
        if self.status is Status.NOT_ADMISSIBLE and self.criterion not in NECESSITY:
            raise ValueError("only necessity criteria can reject a weight")

    def result_for(self, criterion: Criterion) -> CriterionResult | None:
        for r in self.details:
            if r.criterion is criterion:
                return r
        return None

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "criterion": None if self.criterion is None else self.criterion.value,
            "certificate_value": _enc(self.certificate_value),
            "constant_bound": None if self.constant_bound is None else _enc(self.constant_bound),
            "details": [r.to_dict() for r in self.details],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AdmissibilityVerdict":
        cb = d.get("constant_bound")
        return cls(Status(d["status"]), None if d.get("criterion") is None else Criterion(d["criterion"]),
                   _dec(d["certificate_value"]), None if cb is None else _dec(cb),
                   tuple(CriterionResult.from_dict(r) for r in d.get("details", [])))


def _enc(x: float):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return float(x)


def _dec(x) -> float:
    return float(x)


# ---------------------------------------------------------------------------
# radial integrals of the majorant
# ---------------------------------------------------------------------------

def radial_majorant(g: RadialWeight) -> RadialWeight:
    """For radial weights the tightest majorant w(|x|) >= g(x) is g itself."""
    return g


def weighted_radial_integral(w: RadialWeight, lo: float, hi: float, kernel: Callable[[np.ndarray], np.ndarray],
                             power_at_zero: float = 0.0, power_at_inf: float = 0.0,
                             log_at_inf: float = 0.0) -> float:
    """int_lo^hi w(r) k(r) dr, where k ~ r^power_at_zero near 0 and r^power_at_inf log(r)^log_at_inf near inf."""
    def f(r):
        with np.errstate(all="ignore"):
            v = w(r) * kernel(r)
        return np.where(np.isnan(v), 0.0, v)

    hints: dict[float, EndHint] = {}
    bps = [b for b in w.breakpoints if lo < b < hi]
    for s in w.singularities:
        if s.location == 0.0 and lo == 0.0:
            hints[0.0] = EndHint(s.exponent - power_at_zero, s.log_exponent, s.shift)
        elif math.isinf(s.location) and math.isinf(hi):
            hints[math.inf] = EndHint(s.exponent - power_at_inf, s.log_exponent - log_at_inf, s.shift)
        elif lo <= s.location < hi and math.isfinite(s.location):
            hints[s.location] = EndHint(s.exponent, s.log_exponent, s.shift)
            if lo < s.location:
                bps.append(s.location)
    cuts = sorted({lo, hi, *bps})
    total = 0.0
    def at_offset(anchor, d):
        with np.errstate(all="ignore"):
            v = w.at_offset(anchor, d) * kernel(anchor + d)
        return np.where(np.isnan(v), 0.0, v)
    offset = at_offset if w.local is not None else None
    from .quad import integrate_graded
    for c, d in zip(cuts[:-1], cuts[1:]):
        total += integrate_graded(f, c, d, left=hints.get(c), right=hints.get(d), offset=offset)
        if math.isinf(total) or math.isnan(total):
            return math.inf
    return total


def integral_r3(w: RadialWeight, dom: DomainSpec) -> float:
    rin, rout = dom.radial_range
    return weighted_radial_integral(w, rin, rout, lambda r: r ** 3, 3.0, 3.0)


def exterior_integral(w: RadialWeight, dom: DomainSpec) -> float:
    """int_1^R w r^(N+1) (N = 3, 4) or int_1^R w r^3 log r (N = 2)."""
    n = dom.dimension
    _, rout = dom.radial_range
    if n == 2:
        return weighted_radial_integral(w, 1.0, rout, lambda r: r ** 3 * np.log(r), 3.0, 3.0, 1.0)
    return weighted_radial_integral(w, 1.0, rout, lambda r: r ** (n + 1), n + 1.0, n + 1.0)


def annulus_integral(w: RadialWeight, dom: DomainSpec) -> float:
    _, rout = dom.radial_range
    return weighted_radial_integral(w, 1.0, rout, lambda r: np.ones_like(r))


def exterior_constant(w: RadialWeight, dom: DomainSpec) -> float:
    """I = int_1^R r^(N+1) (int_1^r t^(1-N) dt) w(r) dr, the constant of the exterior estimate."""
    n = dom.dimension
    _, rout = dom.radial_range

    def k(r):
        r = np.asarray(r, dtype=float)
        if n == 2:
            inner = np.log(r)
        else:
            inner = -np.expm1((2.0 - n) * np.log(r)) / (n - 2.0)
        return np.power(r, n + 1.0) * inner

    if n == 2:
        return weighted_radial_integral(w, 1.0, rout, k, 3.0, 3.0, 1.0)
    return weighted_radial_integral(w, 1.0, rout, k, n + 1.0, n + 1.0)


def l1_norm(w: RadialWeight, dom: DomainSpec) -> float:
    n, om = dom.dimension, dom.omega
    rin, rout = dom.radial_range
    return n * om * weighted_radial_integral(w, rin, rout, lambda r: np.power(r, n - 1.0), n - 1.0, n - 1.0)


def sup_embedding_constant(dom: DomainSpec) -> float:
    """C with sup|u|^2 <= C int |Lap u|^2 for u supported in a ball of radius R, N <= 3.

    N = 3, 2: representation through the fundamental solution shifted to be
    one-signed on B(x, 2R).  N = 1: u(x) = int (|x-y|/2 - alpha - beta y) u'' dy
    for any alpha, beta, minimized over the affine part.
    """
    n = dom.dimension
    radius = dom.outer_radius
    if n == 3:
        return radius / (2.0 * math.pi)
    if n == 2:
        return radius ** 2 / (2.0 * math.pi)
    if n == 1:
        return radius ** 3 * _beam_factor()
    raise DomainError("only dimensions 1 to 3")


def _beam_factor() -> float:
    y, wts = np.polynomial.legendre.leggauss(64)

    def resid(x):
        # least squares fit of |x-y|/2 by alpha + beta y over [-1, 1], split at the kink y = x
        ys, ws = [], []
        for a, b in ((-1.0, x), (x, 1.0)):
            if b - a <= 0:
                continue
            ys.append(0.5 * (b - a) * y + 0.5 * (a + b))
            ws.append(0.5 * (b - a) * wts)
        yy = np.concatenate(ys)
        ww = np.concatenate(ws)
        h = 0.5 * np.abs(x - yy)
        basis = np.vstack([np.ones_like(yy), yy]).T
        sw = np.sqrt(ww)
        coef, *_ = np.linalg.lstsq(basis * sw[:, None], h * sw, rcond=None)
        return float(np.sum(ww * (h - basis @ coef) ** 2))

    res = optimize.minimize_scalar(lambda x: -resid(x), bounds=(0.0, 1.0), method="bounded",
                                   options={"xatol": 1e-12})
    return max(-res.fun, resid(0.0))


def cianchi_factor(n: int) -> float:
    """The constant K = 1/(2(N-2) omega_N^(2/N)) of the pointwise rearrangement bound."""
    return 1.0 / (2.0 * (n - 2.0) * omega_n(n) ** (2.0 / n))


def hardy_route_constant(a1: float, a2: float, n: int, hardy_factor: float = 4.0) -> float:
    """2 K^2 (C1 + C2) with C_i <= hardy_factor * A_i."""
    k = cianchi_factor(n)
    return 2.0 * k * k * hardy_factor * (a1 + a2)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def _is_radially_decreasing(g: RadialWeight, dom: DomainSpec) -> bool:
    if dom.kind not in (DomainKind.BALL, DomainKind.FULLSPACE):
        return False
    rin, rout = dom.radial_range
    for p in g.pieces:
        if min(p.hi, rout) > max(p.lo, rin) and p.direction > 0:
            return False
    top = rout if math.isfinite(rout) else 1e6
    r = np.geomspace(top * 1e-12, top * (1 - 1e-12), 4000)
    v = g(r)
    v = v[np.isfinite(v)]
    return bool(np.all(np.diff(v) <= 1e-12 * np.maximum(np.abs(v[1:]), 1e-300)))


def _is_zero(g: RadialWeight, dom: DomainSpec) -> bool:
    if g.singularities:
        return False
    rin, rout = dom.radial_range
    top = rout if math.isfinite(rout) else max(2.0 * rin, 1.0) * 1e6
    r = rin + (top - rin) * np.linspace(0.0, 1.0, 2001)[1:-1]
    # geometric samples as well, so compact bumps on long ranges are not skipped
    r = np.concatenate([r, rin + (top - rin) * np.geomspace(1e-12, 1.0, 4001)[:-1]])
    return bool(np.all(g(r) == 0.0))


def _check_scope(dom: DomainSpec) -> None:
    n = dom.dimension
    if n >= 5:
        return
    if dom.kind is DomainKind.FULLSPACE:
        raise UnsupportedGeometry(f"dimension {n} on the whole space is not covered")
    if n == 1 and dom.kind is DomainKind.EXTERIOR and not dom.bounded:
        raise UnsupportedGeometry("dimension 1 exterior domains are not covered")


@dataclass
class _Context:
    g: RadialWeight
    dom: DomainSpec
    _rp: RearrangedProfile | None = None

    @property
    def rp(self) -> RearrangedProfile:
        if self._rp is None:
            self._rp = rearrangement(self.g, self.dom)
        return self._rp


def _weak_lorentz(ctx: _Context) -> float:
    return norms.lorentz_norm(ctx.rp, ctx.dom.dimension / 4.0, math.inf)


def _mlogl(ctx: _Context) -> float:
    return norms.mlogl_norm(ctx.rp)


def _plan(dom: DomainSpec) -> list[tuple[Criterion, Callable[[_Context], float]]]:
    """Sufficiency criteria in evaluation order for this geometry."""
    n = dom.dimension
    kind = dom.kind
    annular = kind is DomainKind.ANNULUS or (kind is DomainKind.EXTERIOR and dom.bounded)
    plan: list[tuple[Criterion, Callable[[_Context], float]]] = []
    if n >= 5:
        plan.append((Criterion.WEAK_LORENTZ_N5, _weak_lorentz))
        plan.append((Criterion.INTEGRAL_R3, lambda c: integral_r3(c.g, c.dom)))
        return plan
    if n == 4 and dom.bounded:
        plan.append((Criterion.MLOGL4, _mlogl))
    if 2 <= n <= 4:
        if kind is DomainKind.EXTERIOR and not dom.bounded:
            crit = Criterion.EXTERIOR_N2 if n == 2 else Criterion.EXTERIOR_N34
            plan.append((crit, lambda c: exterior_integral(c.g, c.dom)))
        if annular:
            plan.append((Criterion.ANNULUS_L1, lambda c: annulus_integral(c.g, c.dom)))
    if n <= 3 and dom.bounded:
        plan.append((Criterion.BOUNDED_LOW_DIM_L1, lambda c: l1_norm(c.g, c.dom)))
    return plan


def classify(g: RadialWeight, dom: DomainSpec, exhaustive: bool = False,
             rp: RearrangedProfile | None = None) -> AdmissibilityVerdict:
    _check_scope(dom)
    g = g.positive_part()
    plan = _plan(dom)
    if _is_zero(g, dom):
        crit = plan[0][0]
        res = CriterionResult(crit, 0.0, True)
        return AdmissibilityVerdict(Status.ADMISSIBLE, crit, 0.0, 0.0, (res,))
    ctx = _Context(g, dom, rp)
    details: list[CriterionResult] = []
    fired: CriterionResult | None = None
    for crit, fn in plan:
        value = float(fn(ctx))
        res = CriterionResult(crit, value, math.isfinite(value))
        details.append(res)
        if res.passed and fired is None:
            fired = res
            if not exhaustive:
                break
    if fired is not None:
        verdict = AdmissibilityVerdict(Status.ADMISSIBLE, fired.criterion, fired.value, None, tuple(details))
        bound = constant_bound(g, dom, verdict, ctx)
        return AdmissibilityVerdict(Status.ADMISSIBLE, fired.criterion, fired.value, bound, tuple(details))
    # necessity: radially decreasing weights on balls or the whole space
    n = dom.dimension
    if _is_radially_decreasing(g, dom):
        if n >= 5:
            res = details[0] if details and details[0].criterion is Criterion.WEAK_LORENTZ_N5 else None
            value = res.value if res is not None else _weak_lorentz(ctx)
            nres = CriterionResult(Criterion.NECESSITY_WEAK_LORENTZ, value, math.isfinite(value))
            details.append(nres)
            if math.isinf(value):
                return AdmissibilityVerdict(Status.NOT_ADMISSIBLE, Criterion.NECESSITY_WEAK_LORENTZ, value, None,
                                            tuple(details))
        elif n == 4 and dom.bounded:
            res = details[0] if details and details[0].criterion is Criterion.MLOGL4 else None
            value = res.value if res is not None else _mlogl(ctx)
            nres = CriterionResult(Criterion.NECESSITY_MLOGL, value, math.isfinite(value))
            details.append(nres)
            if math.isinf(value):
                return AdmissibilityVerdict(Status.NOT_ADMISSIBLE, Criterion.NECESSITY_MLOGL, value, None,
                                            tuple(details))
    return AdmissibilityVerdict(Status.INCONCLUSIVE, None, math.inf, None, tuple(details))


def constant_bound(g: RadialWeight, dom: DomainSpec, verdict: AdmissibilityVerdict,
                   ctx: _Context | None = None) -> float:
    """Upper bound for the best constant implied by the certifying criterion."""
    if verdict.status is not Status.ADMISSIBLE:
        raise ValueError("constant bounds exist only for admissible verdicts")
    ctx = ctx or _Context(g, dom)
    n, om = dom.dimension, dom.omega
    value = verdict.certificate_value
    crit = verdict.criterion
    if value == 0.0:
        return 0.0
    if crit is Criterion.WEAK_LORENTZ_N5:
        return n / ((n - 4.0) * (n - 2.0) ** 2 * om ** (4.0 / n)) * value
    if crit is Criterion.INTEGRAL_R3:
        return n * om / (n - 4.0) * value
    if crit in (Criterion.EXTERIOR_N34, Criterion.EXTERIOR_N2, Criterion.ANNULUS_L1):
        return exterior_constant(g, dom)
    if crit is Criterion.BOUNDED_LOW_DIM_L1:
        return sup_embedding_constant(dom) * value
    if crit is Criterion.MLOGL4:
        p1, p2 = lemma_pairs(g, dom, ctx.rp)
        return hardy_route_constant(a1_constant(p1), a2_constant(p2), n)
    raise ValueError(f"no constant bound for {crit}")
