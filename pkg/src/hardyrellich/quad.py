"""Panel Gauss-Legendre quadrature on graded grids.

Everything in the package integrates over half-lines or intervals whose
integrands blow up (or decay) like ``t**-p * log(1/t)**-b`` at an end.
The grids here are uniform in ``log t`` (or in ``logit t`` for finite
intervals), and the part of the integral beyond the last panel is taken
from a :class:`PowerLog` model of the integrand, which either integrates it
in closed-ish form or certifies divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import legendre
from scipy import integrate, optimize

ORDER = 16
_GX, _GW = legendre.leggauss(ORDER)

# exponents closer than this are treated as equal (critical case)
EXPONENT_TOL = 1e-9

Vectorized = Callable[[np.ndarray], np.ndarray]


def _integration_matrix(x: np.ndarray) -> np.ndarray:
    """Q[i, j] such that sum_j Q[i, j] f(x_j) = int_{-1}^{x_i} f for polynomial f."""
    n = len(x)
    vander = legendre.legvander(x, n - 1)
    prim = np.empty((n, n))
    for k in range(n):
        coeff = np.zeros(n)
        coeff[k] = 1.0
        prim[:, k] = legendre.legval(x, legendre.legint(coeff, lbnd=-1))
    return prim @ np.linalg.inv(vander)


_Q = _integration_matrix(_GX)

# Legendre coefficients of the primitives of P_0..P_{ORDER-1}, and the node-to-coefficient map
_PRIM = np.stack([legendre.legint(np.eye(ORDER)[k], lbnd=-1) for k in range(ORDER)], axis=1)
_VINV = np.linalg.inv(legendre.legvander(_GX, ORDER - 1))


def _partial_weights(x: np.ndarray) -> np.ndarray:
    """Rows w with sum_j w[j] f(_GX[j]) = int_{-1}^{x} f for polynomial f of degree < ORDER."""
    return legendre.legvander(np.asarray(x, dtype=float), ORDER) @ _PRIM @ _VINV


# ---------------------------------------------------------------------------
# power-log end models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerLog:
    """End behaviour ``h(t) ~ coef * t**-p * (ell(t) + shift)**-b``.

    ``ell(t) = log(1/t)`` at the zero end and ``log(t)`` at the infinite end.
    """

    coef: float
    p: float
    b: float = 0.0
    shift: float = 0.0
    end: str = "zero"

    def ell(self, t):
        return -np.log(t) if self.end == "zero" else np.log(t)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.coef == 0.0:
            return np.zeros_like(t)
        ell = self.ell(t) + self.shift
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            out = self.coef * np.exp(-self.p * np.log(t)) * np.power(np.maximum(ell, 1e-300), -self.b)
        return out

    def scaled(self, c: float) -> "PowerLog":
        return PowerLog(self.coef * c, self.p, self.b, self.shift, self.end)

    def _decay_rate(self, x: float, q: float) -> float:
        # exponent of exp(-kappa * ell) after substituting t = exp(-+ell)
        k = 1.0 + x - q * self.p
        return k if self.end == "zero" else -k

    def tail(self, t0: float, x: float = 0.0, q: float = 1.0,
             y: float = 0.0, yshift: float = 0.0) -> float:
        """Integral beyond ``t0`` (toward the end) of ``t**x (ell+yshift)**y h**q``."""
        if self.coef == 0.0:
            return 0.0
        if not math.isfinite(self.coef):
            return math.inf
        kappa = self._decay_rate(x, q)
        ell0 = float(self.ell(t0))
        logc = q * math.log(self.coef)
        m = y - q * self.b
        if kappa < -EXPONENT_TOL:
            return math.inf
        if abs(kappa) <= EXPONENT_TOL:
            if m >= -1.0 - EXPONENT_TOL:
                return math.inf
            if abs(self.shift - yshift) < 1e-300 or y == 0.0 or self.b == 0.0:
                s = self.shift if y == 0.0 else yshift
                return math.exp(logc) * (ell0 + s) ** (m + 1.0) / (-(m + 1.0))
        def integrand(ell):
            a = ell + self.shift
            val = logc - kappa * (ell - ell0) - q * self.b * math.log(a)
            if y != 0.0:
                val += y * math.log(ell + yshift)
            return math.exp(val)
        val, _ = integrate.quad(integrand, ell0, np.inf, epsabs=0.0, epsrel=1e-11, limit=400)
        # undo the exp(-kappa*ell0) factored out above
        return val * math.exp(-kappa * ell0) if kappa > 0 else val

    def limit(self, x: float = 0.0, y: float = 0.0) -> float:
        """Limit at the end of ``t**x * ell**y * h(t)``."""
        if self.coef == 0.0:
            return 0.0
        e = x - self.p
        if self.end == "inf":
            e = -e
        if e > EXPONENT_TOL:
            return 0.0
        if e < -EXPONENT_TOL:
            return math.inf
        m = y - self.b
        if m > EXPONENT_TOL:
            return math.inf
        if m < -EXPONENT_TOL:
            return 0.0
        return self.coef

    def maximal(self) -> "PowerLog":
        """Zero-end model of ``(1/t) int_0^t h`` given this model of ``h``."""
        if self.end != "zero":
            raise ValueError("maximal function model only defined at the zero end")
        if self.coef == 0.0:
            return self
        if self.p < 1.0 - EXPONENT_TOL:
            return PowerLog(self.coef / (1.0 - self.p), self.p, self.b, self.shift)
        if abs(self.p - 1.0) <= EXPONENT_TOL and self.b > 1.0 + EXPONENT_TOL:
            return PowerLog(self.coef / (self.b - 1.0), 1.0, self.b - 1.0, self.shift)
        return PowerLog(math.inf, self.p, self.b, self.shift)

    @classmethod
    def matched(cls, value: float, t0: float, p: float, b: float = 0.0,
                shift: float = 0.0, end: str = "zero") -> "PowerLog":
        """Model with given exponents whose coefficient reproduces ``value`` at ``t0``."""
        ell = (-math.log(t0) if end == "zero" else math.log(t0)) + shift
        if value == 0.0:
            return cls(0.0, p, b, shift, end)
        coef = value * math.exp(p * math.log(t0)) * max(ell, 1e-300) ** b
        return cls(coef, p, b, shift, end)

    @classmethod
    def fit(cls, h: Vectorized, t0: float, end: str = "zero", step: float = 10.0) -> "PowerLog":
        """Three-point fit of ``(coef, p, b)`` with zero shift, sampling inward from ``t0``."""
        sgn = 1.0 if end == "zero" else -1.0
        ts = t0 * np.exp(sgn * step * np.arange(3))
        vals = np.asarray(h(ts), dtype=float)
        if np.all(vals == 0.0):
            return cls(0.0, 0.0, 0.0, 0.0, end)
        if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
            # not a clean power-log end; fall back to a constant model
            return cls(float(np.max(vals[np.isfinite(vals)], initial=0.0)), 0.0, 0.0, 0.0, end)
        ell = -np.log(ts) if end == "zero" else np.log(ts)
        if np.any(ell <= 0):
            a = np.column_stack([np.ones(3), -np.log(ts)])
            sol, *_ = np.linalg.lstsq(a, np.log(vals), rcond=None)
            return cls.matched(vals[0], t0, _snap(sol[1]), 0.0, 0.0, end)
        a = np.column_stack([np.ones(3), -np.log(ts), -np.log(ell)])
        sol = np.linalg.solve(a, np.log(vals))
        p, b = _snap(sol[1]), _snap(sol[2])
        if abs(b) > 50.0 or not math.isfinite(b):
            # log exponent is not identifiable from these samples; fit a pure power
            p = _snap(float(np.log(vals[0] / vals[1]) / np.log(ts[1] / ts[0])))
            b = 0.0
        try:
            return cls.matched(vals[0], t0, p, b, 0.0, end)
        except OverflowError:
            return cls(float(vals[0]), 0.0, 0.0, 0.0, end)


def _snap(x: float, tol: float = 1e-6) -> float:
    """Round fitted exponents to nearby simple rationals (denominator <= 12)."""
    for den in range(1, 13):
        r = round(x * den) / den
        if abs(r - x) < tol:
            return r
    return float(x)


# ---------------------------------------------------------------------------
# panel grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PanelGrid:
    """Gauss-Legendre panels in a mapped variable ``u`` with ``t = phi(u)``.

    ``kind='log'``: t = exp(u).  ``kind='logit'``: t = a / (1 + exp(-u)).
    """

    u_edges: np.ndarray
    kind: str = "log"
    a: float = math.inf

    @classmethod
    def log(cls, lo: float, hi: float, per_unit: float = 1.0, min_panels: int = 128,
            breakpoints=()) -> "PanelGrid":
        ulo, uhi = math.log(lo), math.log(hi)
        n = max(min_panels, int(math.ceil((uhi - ulo) * per_unit)))
        edges = np.linspace(ulo, uhi, n + 1)
        bps = [math.log(b) for b in breakpoints if lo < b < hi]
        return cls(_merge_edges(edges, bps), "log")

    @classmethod
    def logit(cls, lo: float, a: float, top_gap: float = 1e-13, per_unit: float = 1.0,
              min_panels: int = 128, breakpoints=()) -> "PanelGrid":
        ulo = math.log(lo) - math.log(a - lo)
        uhi = math.log(a) - math.log(a * top_gap)
        n = max(min_panels, int(math.ceil((uhi - ulo) * per_unit)))
        edges = np.linspace(ulo, uhi, n + 1)
        bps = [math.log(b) - math.log(a - b) for b in breakpoints if 0 < b < a]
        bps = [b for b in bps if ulo < b < uhi]
        return cls(_merge_edges(edges, bps), "logit", a)

    def phi(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "log":
            return np.exp(u)
        return self.a / (1.0 + np.exp(-u))

    def phi_inv(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "log":
            return np.log(t)
        return np.log(t) - np.log(self.a - t)

    def jac(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "log":
            return np.exp(u)
        e = np.exp(-u)
        return self.a * e / (1.0 + e) ** 2

    @property
    def lo(self) -> float:
        return float(self.phi(self.u_edges[0]))

    @property
    def hi(self) -> float:
        return float(self.phi(self.u_edges[-1]))

    @property
    def edges(self) -> np.ndarray:
        return self.phi(self.u_edges)

    @property
    def n_panels(self) -> int:
        return len(self.u_edges) - 1

    def _panel_nodes(self, ua, ub):
        half = 0.5 * (ub - ua)
        mid = 0.5 * (ub + ua)
        u = mid[..., None] + half[..., None] * _GX
        return u, half

    @property
    def nodes(self) -> np.ndarray:
        u, _ = self._panel_nodes(self.u_edges[:-1], self.u_edges[1:])
        return self.phi(u).ravel()

    @property
    def weights(self) -> np.ndarray:
        u, half = self._panel_nodes(self.u_edges[:-1], self.u_edges[1:])
        return (half[:, None] * _GW * self.jac(u)).ravel()

    def refined(self, factor: int = 2) -> "PanelGrid":
        ue = self.u_edges
        sub = [ue[:-1] + (ue[1:] - ue[:-1]) * k / factor for k in range(factor)]
        edges = np.sort(np.concatenate(sub + [ue[-1:]]))
        return PanelGrid(edges, self.kind, self.a)

    def partial(self, f: Vectorized, ua, ub) -> np.ndarray:
        """Gauss integral of f over [phi(ua), phi(ub)] (arrays, each inside one panel)."""
        ua = np.atleast_1d(np.asarray(ua, dtype=float))
        ub = np.atleast_1d(np.asarray(ub, dtype=float))
        u, half = self._panel_nodes(ua, ub)
        vals = np.asarray(f(self.phi(u).ravel()), dtype=float).reshape(u.shape)
        return np.sum(vals * _GW * self.jac(u), axis=-1) * half


def _merge_edges(edges: np.ndarray, extra) -> np.ndarray:
    if not extra:
        return edges
    allp = np.sort(np.concatenate([edges, np.asarray(extra, dtype=float)]))
    span = allp[-1] - allp[0]
    keep = np.concatenate([[True], np.diff(allp) > 1e-12 * max(span, 1.0)])
    out = allp[keep]
    out[-1] = edges[-1]
    return out


class Cumulative:
    """Running integrals of ``f`` over a :class:`PanelGrid` plus end tails.

    ``head`` is the integral from the start of the range (0, or the
    interval's left end) to ``grid.lo``; ``top`` from ``grid.hi`` to the
    right end.  Either may be ``inf``.
    """

    def __init__(self, grid: PanelGrid, f: Vectorized, values: np.ndarray | None = None,
                 head: float = 0.0, top: float = 0.0):
        self.grid = grid
        self.f = f
        if values is None:
            values = np.asarray(f(grid.nodes), dtype=float)
        self.values = values
        u, half = grid._panel_nodes(grid.u_edges[:-1], grid.u_edges[1:])
        self._jw = self.values.reshape(u.shape) * grid.jac(u)
        self._half = half
        panels = np.sum(self._jw * _GW, axis=1) * half
        self.panels = panels
        self.forward = np.concatenate([[0.0], np.cumsum(panels)])
        self.backward = np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]])
        self.head = head
        self.top = top

    @property
    def total(self) -> float:
        return self.head + self.forward[-1] + self.top

    def _locate(self, t):
        u = self.grid.phi_inv(t)
        k = np.clip(np.searchsorted(self.grid.u_edges, u, side="right") - 1, 0, self.grid.n_panels - 1)
        return u, k

    def _from_lo(self, t):
        """int_{lo}^t f, returned as forward and backward representations."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        u, k = self._locate(t)
        ue = self.grid.u_edges
        # interpolate the stored panel values instead of evaluating f again
        x = np.clip((u - ue[k]) / self._half[k] - 1.0, -1.0, 1.0)
        part = np.sum(_partial_weights(x) * self._jw[k], axis=-1) * self._half[k]
        fwd = self.forward[k] + part
        bwd = self.backward[k] - part  # = int_t^{hi}
        return fwd, bwd

    def between(self, x, y):
        """int_x^y f for lo <= x <= y <= hi (vectorized)."""
        fx, bx = self._from_lo(x)
        fy, by = self._from_lo(y)
        fwd = fy - fx
        bwd = bx - by
        use_fwd = np.abs(fy) <= np.abs(bx)
        return np.where(use_fwd, fwd, bwd)

    def from_start(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        fwd, _ = self._from_lo(np.clip(t, self.grid.lo, self.grid.hi))
        out = self.head + fwd
        out = np.where(t <= self.grid.lo, self.head, out)
        return out

    def to_end(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        _, bwd = self._from_lo(np.clip(t, self.grid.lo, self.grid.hi))
        out = bwd + self.top
        return np.where(t >= self.grid.hi, self.top, out)

    def nodes_from_start(self) -> np.ndarray:
        """int_0^{t_i} f at every grid node."""
        inner = (self._jw @ _Q.T) * self._half[:, None]
        return (self.head + self.forward[:-1, None] + inner).ravel()

    def nodes_to_end(self) -> np.ndarray:
        inner = (self._jw @ _Q.T) * self._half[:, None]
        return (self.backward[:-1, None] - inner).ravel() + self.top


# ---------------------------------------------------------------------------
# radial integrals with singular endpoints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EndHint:
    """Declared end exponents for a radial integrand near a point (distance variable)."""

    p: float
    b: float = 0.0
    shift: float = 0.0


def integrate_graded(f: Vectorized, c: float, d: float, *, left: EndHint | None = None,
                     right: EndHint | None = None, left_floor: float | None = None,
                     right_floor: float | None = None, per_unit: float = 2.0,
                     offset: Callable[[float, np.ndarray], np.ndarray] | None = None) -> float:
    """int_c^d f with log grading toward both ends and power-log end tails.

    ``d`` may be ``inf``.  Returns ``inf`` when a tail model diverges.
    ``offset(anchor, s)``, when given, evaluates f(anchor + s) without
    rounding the small offset s away.
    """
    if d <= c:
        return 0.0
    if math.isinf(d):
        mid = c + 1.0 if c == 0 else 2.0 * c
        lower = integrate_graded(f, c, mid, left=left, left_floor=left_floor, per_unit=per_unit, offset=offset)
        if math.isinf(lower):
            return lower
        hi = 1e100 * mid
        grid = PanelGrid.log(mid - c, hi - c, per_unit=per_unit, min_panels=64)

        def g(s):
            return f(c + s)
        cum = Cumulative(grid, g)
        s_top = grid.hi
        if right is not None:
            model = PowerLog.matched(float(g(np.array([s_top]))[0]), s_top, right.p, right.b,
                                     right.shift, end="inf")
        else:
            model = PowerLog.fit(g, s_top, end="inf")
        tail = model.tail(s_top)
        return lower + cum.forward[-1] + tail
    half = 0.5 * (d - c)
    total = 0.0
    for side, hint, floor in (("left", left, left_floor), ("right", right, right_floor)):
        anchor = c if side == "left" else d
        sgn = 1.0 if side == "left" else -1.0
        if floor is None:
            # evaluating f(anchor + s) loses digits once s << |anchor|
            floor = (1e-100 if anchor == 0.0 or offset is not None else 1e-8) * half
        grid = PanelGrid.log(floor, half, per_unit=per_unit, min_panels=64)

        def g(s, anchor=anchor, sgn=sgn):
            if offset is not None:
                return offset(anchor, sgn * np.asarray(s, dtype=float))
            return f(anchor + sgn * s)
        cum = Cumulative(grid, g)
        v0 = float(g(np.array([floor]))[0])
        if hint is not None:
            model = PowerLog.matched(v0, floor, hint.p, hint.b, hint.shift)
        else:
            # keep the fit samples inside this half of the interval
            model = PowerLog.fit(g, floor, step=min(10.0, math.log(half / floor) / 3.0))
        tail = model.tail(floor)
        total += cum.forward[-1] + tail
        if math.isinf(total):
            return total
    return total


def golden_max(F: Callable[[float], float], lo: float, hi: float, log: bool = True,
               xtol: float = 1e-10) -> tuple[float, float]:
    """Maximize a unimodal scalar function on [lo, hi]; returns (argmax, max)."""
    if log:
        res = optimize.minimize_scalar(lambda u: -F(math.exp(u)), bounds=(math.log(lo), math.log(hi)),
                                       method="bounded", options={"xatol": xtol})
        x = math.exp(res.x)
    else:
        res = optimize.minimize_scalar(lambda x: -F(x), bounds=(lo, hi), method="bounded",
                                       options={"xatol": xtol})
        x = res.x
    return x, -res.fun
