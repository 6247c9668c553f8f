"""Lorentz, Lorentz-Zygmund and M log L functionals of rearranged profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate

from .quad import PowerLog, golden_max
from .rearrange import RearrangedProfile

# a scanned supremum that grows past this is reported as divergent
DIVERGENCE_THRESHOLD = 1e12


class Family(str, Enum):
    LORENTZ = "Lorentz"
    LORENTZ_ZYGMUND = "LorentzZygmund"
    MLOGL = "MLogL"
    LEBESGUE = "Lebesgue"
    WEIGHTED_LEBESGUE = "WeightedLebesgue"


@dataclass(frozen=True)
class SpaceSpec:
    family: Family
    p: float = 1.0
    q: float = math.inf
    alpha: float = 0.0
    reference_measure: float = math.inf
    radial_weight_tag: str | None = None
    # use the maximal function g** instead of g* (the equivalent norm)
    maximal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family in (Family.LORENTZ_ZYGMUND, Family.MLOGL) and not math.isfinite(self.reference_measure):
            raise ValueError(f"{self.family.value} needs a finite reference measure")
        if not (1.0 <= self.p <= math.inf) or not (1.0 <= self.q <= math.inf):
            if self.family is not Family.MLOGL:
                raise ValueError("p and q must lie in [1, inf]")

    @classmethod
    def weak(cls, p: float, measure: float = math.inf, maximal: bool = False) -> "SpaceSpec":
        return cls(Family.LORENTZ, p, math.inf, 0.0, measure, maximal=maximal)

    @property
    def label(self) -> str:
        if self.family is Family.MLOGL:
            return "MlogL"
        if self.family is Family.LEBESGUE:
            return f"L^{_fmt(self.p)}"
        star = "**" if self.maximal else "*"
        if self.family is Family.LORENTZ_ZYGMUND:
            return f"L^({_fmt(self.p)},{_fmt(self.q)},{_fmt(self.alpha)}){star}"
        return f"L^({_fmt(self.p)},{_fmt(self.q)}){star}"


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:g}"


@dataclass(frozen=True)
class SupResult:
    value: float
    argmax: float
    grid_size: int
    # how much golden-section refinement added to the best grid value
    refinement_gain: float = 0.0


# ---------------------------------------------------------------------------
# suprema and integrals of t^x (log(e a / t))^y h(t)
# ---------------------------------------------------------------------------

def _log_factor(t, a: float, y: float):
    if y == 0.0:
        return 1.0
    return np.power(np.log(math.e * a / np.asarray(t, dtype=float)), y)


def supremum(rp: RearrangedProfile, x: float, y: float = 0.0, maximal: bool = False,
             log_kind: str = "e") -> SupResult:
    """sup over (0, measure) of ``t**x * L(t)**y * h(t)`` with h = g* or g**.

    ``log_kind='e'`` uses L = log(e|dom|/t); ``'plain'`` uses log(|dom|/t).
    """
    a = rp.measure
    if y != 0.0 and not math.isfinite(a):
        raise ValueError("logarithmic factors need a finite measure")
    if rp.zero:
        return SupResult(0.0, float("nan"), 0)
    cst = 1.0 if log_kind == "e" else 0.0

    def L(t):
        if y == 0.0:
            return 1.0
        with np.errstate(all="ignore"):
            return np.power(np.maximum(np.log(a / np.asarray(t, dtype=float)) + cst, 0.0), y)

    def h(t):
        return rp.doublestar(t) if maximal else rp.star(t)

    def F(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        with np.errstate(all="ignore"):
            v = np.power(t, x) * L(t) * h(t)
        return np.where(np.isnan(v), 0.0, v)

    nodes = rp.nodes
    hv = rp.maximal_nodes() if maximal else rp.values
    with np.errstate(all="ignore"):
        vals = np.power(nodes, x) * L(nodes) * hv
    vals = np.where(np.isnan(vals), 0.0, vals)
    n_eval = len(nodes)
    if np.any(np.isinf(vals)):
        return SupResult(math.inf, float(nodes[np.argmax(vals)]), n_eval)

    # end limits from the power-log models
    model0 = rp.maximal_zero_model() if maximal else rp.zero_model
    lim0 = model0.limit(x, y)
    best, arg = lim0, 0.0
    if math.isinf(best):
        return SupResult(math.inf, 0.0, n_eval)
    extra_t = np.zeros(0)
    if math.isfinite(rp.support):
        # left limit at the end of the support, which no interior node reaches
        end = F(np.array([rp.support * (1 - 1e-14)]))[0]
        n_eval += 1
        if end > best:
            best, arg = float(end), rp.support
    if math.isfinite(a):
        if rp.support < a:
            extra_t = np.geomspace(rp.support, a, 66)[1:-1]
    else:
        model_inf = rp.maximal_inf_model() if maximal else (rp.inf_model if not math.isfinite(rp.support) else None)
        if model_inf is not None:
            lim = model_inf.limit(x, y)
            if lim > best:
                best, arg = lim, math.inf
            if math.isinf(best):
                return SupResult(math.inf, math.inf, n_eval)
        if math.isfinite(rp.support):
            extra_t = np.geomspace(rp.support, rp.support * 1e12, 130)[1:]
    if len(extra_t):
        ev = F(extra_t)
        n_eval += len(extra_t)
        i = int(np.argmax(ev))
        if ev[i] > best:
            best, arg = float(ev[i]), float(extra_t[i])
    grid_best = best
    order = np.argsort(vals)[::-1]
    if vals[order[0]] > best:
        best, arg = float(vals[order[0]]), float(nodes[order[0]])
        grid_best = best
    # refine around the three largest node values
    for k in order[:3]:
        lo = nodes[max(k - 1, 0)]
        hi = nodes[min(k + 1, len(nodes) - 1)]
        if hi <= lo:
            continue
        tx, fx = golden_max(lambda t: float(F(np.array([t]))[0]), lo, hi, log=True, xtol=1e-12)
        n_eval += 30
        if fx > best:
            best, arg = fx, tx
    # a maximum at the lowest node that is still climbing toward t = 0 signals an undeclared blow-up
    if order[0] == 0 and best > DIVERGENCE_THRESHOLD and vals[0] > vals[1]:
        return SupResult(math.inf, arg, n_eval)
    return SupResult(float(best), float(arg), n_eval, float(best - grid_best))


def profile_integral(rp: RearrangedProfile, x: float, q: float = 1.0, y: float = 0.0,
                     maximal: bool = False) -> float:
    """int_0^measure t**x * log(e|dom|/t)**y * h(t)**q dt with h = g* or g**."""
    a = rp.measure
    if y != 0.0 and not math.isfinite(a):
        raise ValueError("logarithmic factors need a finite measure")
    if rp.zero:
        return 0.0
    nodes = rp.nodes
    hv = rp.maximal_nodes() if maximal else rp.values
    with np.errstate(all="ignore"):
        f = np.power(nodes, x) * _log_factor(nodes, a, y) * np.power(hv, q)
    f = np.where(np.isnan(f), 0.0, f)
    if np.any(np.isinf(f)):
        return math.inf
    total = float(np.dot(rp.grid.weights, f))
    yshift = 1.0 + math.log(a) if math.isfinite(a) else 0.0
    model0 = rp.maximal_zero_model() if maximal else rp.zero_model
    total += model0.tail(rp.lo, x, q, y, yshift)
    if math.isinf(total):
        return total
    top = rp.hi
    if math.isfinite(rp.support):
        if maximal and rp.support < a:
            total += _beyond_support(rp.integral, rp.support, a, x, q, y)
    else:
        model_inf = rp.maximal_inf_model() if maximal else rp.inf_model
        if model_inf is None:
            return math.inf
        v_top = float((rp.doublestar if maximal else rp.star)(np.array([top]))[0])
        m = PowerLog.matched(v_top, top, model_inf.p, model_inf.b, model_inf.shift, "inf")
        total += m.tail(top, x, q)
    return total


def _beyond_support(T: float, s: float, a: float, x: float, q: float, y: float) -> float:
    """int_s^a t**x log(e a/t)**y (T/t)**q dt."""
    if math.isinf(a):
        return PowerLog(T, 1.0, 0.0, 0.0, "inf").tail(s, x, q)

    def f(u):
        t = math.exp(u)
        return t ** (x + 1.0) * (math.log(math.e * a / t)) ** y * (T / t) ** q
    val, _ = integrate.quad(f, math.log(s), math.log(a), epsrel=1e-12, limit=200)
    return val


# ---------------------------------------------------------------------------
# public norms
# ---------------------------------------------------------------------------

def lorentz_quasinorm(rp: RearrangedProfile, p: float, q: float) -> float:
    """|f|_(p,q) built on f*: sup t^(1/p) f*(t) for q = inf."""
    _check_pq(p, q)
    if math.isinf(q):
        return supremum(rp, 1.0 / p).value
    val = profile_integral(rp, q / p - 1.0, q)
    return val ** (1.0 / q)


def lorentz_norm(rp: RearrangedProfile, p: float, q: float) -> float:
    """The equivalent norm built on the maximal function f**."""
    _check_pq(p, q)
    if math.isinf(q):
        return supremum(rp, 1.0 / p, maximal=True).value
    val = profile_integral(rp, q / p - 1.0, q, maximal=True)
    return val ** (1.0 / q)


def _check_pq(p, q):
    if not (1.0 <= p < math.inf):
        raise ValueError("p must lie in [1, inf)")
    if not (1.0 <= q <= math.inf):
        raise ValueError("q must lie in [1, inf]")


def lorentz_zygmund_quasinorm(rp: RearrangedProfile, p: float, q: float, alpha: float,
                              maximal: bool = False) -> float:
    """L^q norm over (0,|dom|) of log(e|dom|/t)^alpha t^(1/p-1/q) f*(t)."""
    if not math.isfinite(rp.measure):
        raise ValueError("Lorentz-Zygmund functionals need a finite measure")
    if not (1.0 <= p <= math.inf and 1.0 <= q <= math.inf):
        raise ValueError("p and q must lie in [1, inf]")
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    if math.isinf(q):
        return supremum(rp, inv_p, alpha, maximal=maximal).value
    val = profile_integral(rp, q * inv_p - 1.0, q, alpha * q, maximal=maximal)
    return val ** (1.0 / q)


def mlogl_norm(rp: RearrangedProfile) -> float:
    """sup over (0,|dom|) of t log(|dom|/t) g**(t)."""
    return mlogl_sup(rp).value


def mlogl_sup(rp: RearrangedProfile) -> SupResult:
    if not math.isfinite(rp.measure):
        raise ValueError("M log L needs a finite measure")
    return supremum(rp, 1.0, 1.0, maximal=True, log_kind="plain")


def lebesgue_norm(rp: RearrangedProfile, p: float) -> float:
    if math.isinf(p):
        return float(rp.star(np.array([rp.lo]))[0]) if rp.zero_model.p == 0 else math.inf
    return profile_integral(rp, 0.0, p) ** (1.0 / p)


def evaluate(rp: RearrangedProfile, spec: SpaceSpec) -> float:
    fam = spec.family
    if fam is Family.MLOGL:
        return mlogl_norm(rp)
    if fam is Family.LEBESGUE:
        return lebesgue_norm(rp, spec.p)
    if fam is Family.LORENTZ_ZYGMUND:
        return lorentz_zygmund_quasinorm(rp, spec.p, spec.q, spec.alpha, spec.maximal)
    if fam is Family.LORENTZ:
        return (lorentz_norm if spec.maximal else lorentz_quasinorm)(rp, spec.p, spec.q)
    raise ValueError("weighted Lebesgue criteria are evaluated on the weight, see admissibility")


def membership(rp: RearrangedProfile, spec: SpaceSpec) -> tuple[bool, float]:
    value = evaluate(rp, spec)
    return bool(math.isfinite(value)), value


# ---------------------------------------------------------------------------
# the (inf, 2, -1) quasinorm / norm pair
# ---------------------------------------------------------------------------

def critical_pair(rp: RearrangedProfile) -> tuple[float, float]:
    """(int (u**/L)^2 dt/t, int (u*/L)^2 dt/t) with L = log(e|dom|/t)."""
    with_max = profile_integral(rp, -1.0, 2.0, -2.0, maximal=True)
    plain = profile_integral(rp, -1.0, 2.0, -2.0)
    return with_max, plain


def from_decreasing(star: Callable[[np.ndarray], np.ndarray], measure: float,
                    zero_model: PowerLog | None = None, breakpoints=(), per_unit: float = 1.0,
                    name: str = "profile") -> RearrangedProfile:
    """Wrap an already nonincreasing function on (0, measure) as a profile."""
    return RearrangedProfile(star, measure, measure, zero_model, None, breakpoints, name=name,
                             per_unit=per_unit)
