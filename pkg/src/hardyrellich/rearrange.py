"""Distribution functions, decreasing rearrangements and maximal functions of radial weights."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .profiles import DomainError, DomainSpec, Piece, RadialWeight, Singularity
from .quad import Cumulative, EndHint, PanelGrid, PowerLog, integrate_graded

_EPS = np.finfo(float).eps
_LOGMAX = 709.0
_LOGMIN = -745.0

# relative span of the t-grid below the top end for singular / bounded profiles
SINGULAR_FLOOR = 1e-60
BOUNDED_FLOOR = 1e-14
INTERIOR_FLOOR = 1e-8
INFINITE_TOP = 1e40


def illinois(G: Callable[[np.ndarray], np.ndarray], a, b, ga, gb, xtol: float = 1e-14,
             ftol: float = 1e-14, maxiter: int = 200,
             resolved: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None) -> np.ndarray:
    """Vectorized bracketed root of an increasing function G with G(a) <= 0 <= G(b).

    Regula falsi with the Illinois modification; an entry whose bracket has not
    halved over three steps takes a plain bisection, so jumps and infinite
    values cannot stall it.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    ga = np.array(ga, dtype=float)
    gb = np.array(gb, dtype=float)
    done = (ga >= 0) | (gb <= 0)
    root = np.where(ga >= 0, a, b)
    side = np.zeros(a.shape, dtype=int)
    active = ~done
    hist = np.full((3, a.size), np.inf)
    for it in range(maxiter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        aa, bb, fa, fb = a[idx], b[idx], ga[idx], gb[idx]
        with np.errstate(all="ignore"):
            sec = (aa * fb - bb * fa) / (fb - fa)
        mid = 0.5 * (aa + bb)
        ok = np.isfinite(sec)
        # keep the secant point off the endpoints so a root next to one still shrinks the bracket fast
        w = 1e-3 * (bb - aa)
        sec = np.clip(np.where(ok, sec, mid), aa + w, bb - w)
        slow = (bb - aa) > 0.5 * hist[it % 3, idx]
        hist[it % 3, idx] = bb - aa
        x = np.where(ok & ~slow, sec, mid)
        gx = np.asarray(_call(G, x, idx), dtype=float)
        hit = np.abs(gx) <= ftol
        left = gx < 0
        right = ~left & ~hit
        # Illinois: halve the stale endpoint value when the same side moves twice
        sd = side[idx]
        fb = np.where(left & (sd == -1), 0.5 * fb, fb)
        fa = np.where(right & (sd == 1), 0.5 * fa, fa)
        aa = np.where(left, x, aa)
        fa = np.where(left, gx, fa)
        bb = np.where(right, x, bb)
        fb = np.where(right, gx, fb)
        side[idx] = np.where(left, -1, np.where(right, 1, 0))
        aa = np.where(hit, x, aa)
        bb = np.where(hit, x, bb)
        a[idx], b[idx], ga[idx], gb[idx] = aa, bb, fa, fb
        conv = hit | (bb - aa <= xtol * np.maximum(1.0, np.abs(aa) + np.abs(bb)))
        if resolved is not None:
            conv |= resolved(aa, bb)
        root[idx] = np.where(conv, np.where(hit, x, 0.5 * (aa + bb)), root[idx])
        active[idx[conv]] = False
    if active.any():
        root[active] = 0.5 * (a[active] + b[active])
    return root


def _call(G, x, idx):
    # callbacks take the indices of the still-active entries
    return G(x, idx)


def shell_volume(omega: float, n: int, anchor: np.ndarray | float, delta, outward: bool) -> np.ndarray:
    """omega * |b**n - a**n| for the shell between ``anchor`` and ``anchor +- delta``, without cancellation."""
    anchor = np.asarray(anchor, dtype=float)
    delta = np.asarray(delta, dtype=float)
    with np.errstate(all="ignore"):
        if outward:
            pos = omega * np.power(anchor, n) * np.expm1(n * np.log1p(delta / anchor))
            out = np.where(anchor > 0, pos, omega * np.power(delta, n))
        else:
            out = -omega * np.power(anchor, n) * np.expm1(n * np.log1p(-np.minimum(delta, anchor) / anchor))
    return np.where(delta > 0, out, 0.0)


_TABLE_SIZE = 2049


@dataclass(frozen=True)
class _ClippedPiece:
    lo: float
    hi: float
    direction: int


class LevelSets:
    """Measures of super-level sets ``{x in domain : g(|x|) > s}`` of a radial weight."""

    def __init__(self, weight: RadialWeight, dom: DomainSpec):
        self.weight = weight
        self.dom = dom
        self.n = dom.dimension
        self.omega = dom.omega
        rin, rout = dom.radial_range
        pieces = []
        for p in weight.pieces:
            lo, hi = max(p.lo, rin), min(p.hi, rout)
            if lo < hi:
                pieces.append(_ClippedPiece(lo, hi, p.direction))
        if not pieces:
            raise DomainError("weight pieces do not cover the domain")
        self.pieces = pieces
        self._tables: dict[tuple[float, float], tuple[np.ndarray, np.ndarray]] = {}

    def _near(self, anchor: float) -> float:
        return 4.0 * _EPS * anchor if anchor > 0 else 1e-300

    def _g(self, r):
        v = self.weight(r)
        return np.where(np.isnan(v), 0.0, v)

    def _g_off(self, anchor, d):
        v = self.weight.at_offset(anchor, d)
        return np.where(np.isnan(v), 0.0, v)

    def _piece_measure(self, p: _ClippedPiece, s: np.ndarray) -> np.ndarray:
        if p.direction == 0:
            r_mid = 0.5 * (p.lo + p.hi) if math.isfinite(p.hi) else 2.0 * p.lo + 1.0
            val = float(self._g(np.array([r_mid]))[0])
            whole = self._volume(p.lo, p.hi)
            return np.where(val > s, whole, 0.0)
        if p.direction < 0:
            anchor, outward = p.lo, True
            width = p.hi - p.lo
        else:
            if math.isinf(p.hi):
                # increasing toward infinity: every level below the limit has infinite measure
                far = float(self._g(np.array([1e300]))[0])
                near = float(self._g(np.array([p.lo + self._near(p.lo)]))[0])
                return np.where(s < far, math.inf, np.where(s < near, 0.0, 0.0))
            anchor, outward = p.hi, False
            width = p.hi - p.lo
        sgn = 1.0 if outward else -1.0
        dmin = self._near(anchor)
        if math.isinf(width):
            dmax = 1e300
            r_far = 1e300
        else:
            dmax = width * (1.0 - 4.0 * _EPS) if width > 2 * dmin else width
            far_anchor = p.hi if outward else p.lo
            r_far = far_anchor - sgn * self._near(far_anchor) if far_anchor > 0 else far_anchor + 1e-300
        g_near = float(self._g_off(anchor, np.array([sgn * dmin]))[0])
        g_far = float(self._g(np.array([r_far]))[0])
        whole = self._volume(p.lo, p.hi)
        out = np.zeros_like(s)
        full = s < g_far
        out = np.where(full, whole, out)
        mid = (~full) & (s < g_near)
        if mid.any():
            sm = s[mid]
            # log offsets resolve blow-ups at the anchor and unbounded pieces; plain offsets keep
            # the far end of a bounded piece well conditioned
            log_param = math.isinf(width) or self.weight.singularity_at(anchor) is not None
            to_d = np.exp if log_param else (lambda x: x)

            def G(x, idx=None):
                # increasing in x, for a piece decreasing away from the anchor.  Near a blow-up the
                # bounded form (s - g)/(s + g) keeps regula falsi moving; elsewhere (s - g)/s is
                # closest to linear in the offset
                ss = sm if idx is None else sm[idx]
                with np.errstate(all="ignore"):
                    gv = self._g_off(anchor, sgn * to_d(x))
                    if log_param:
                        return np.where(np.isinf(gv), -1.0, (ss - gv) / (ss + gv))
                    return (ss - gv) / ss

            # offsets below the spacing of doubles near the anchor are not resolvable
            res = 8.0 * _EPS * anchor

            def below_spacing(xa, xb, res=res):
                return to_d(xb) - to_d(xa) <= res
            resolved = below_spacing if self.weight.local is None and anchor > 0 else None

            lo_x, hi_x = (math.log(dmin), math.log(dmax)) if log_param else (dmin, dmax)
            xa, xb, guess = self._bracket(p, anchor, sgn, lo_x, hi_x, to_d, sm)
            # first try a narrow bracket around the interpolated guess, keep the cell where it fails
            eps = 0.02 * (xb - xa)
            na, nb = np.maximum(guess - eps, xa), np.minimum(guess + eps, xb)
            gna, gnb = G(na), G(nb)
            ok = (gna <= 0) & (gnb >= 0)
            gwa = np.empty_like(gna)
            gwb = np.empty_like(gnb)
            if (~ok).any():
                bad = np.flatnonzero(~ok)
                gwa[bad] = G(xa[bad], bad)
                gwb[bad] = G(xb[bad], bad)
            xa, xb = np.where(ok, na, xa), np.where(ok, nb, xb)
            ga, gb = np.where(ok, gna, gwa), np.where(ok, gnb, gwb)
            x = illinois(G, xa, xb, ga, gb, resolved=resolved)
            delta = to_d(x)
            out[mid] = shell_volume(self.omega, self.n, anchor, delta, outward)
        return out

    def _bracket(self, p: _ClippedPiece, anchor: float, sgn: float, xlo: float, xhi: float,
                 to_d: Callable[[np.ndarray], np.ndarray], s: np.ndarray
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Brackets and interpolated guesses for the levels s from a table sampled once per piece."""
        key = (p.lo, p.hi)
        tab = self._tables.get(key)
        if tab is None:
            x = np.linspace(xlo, xhi, _TABLE_SIZE)
            with np.errstate(all="ignore"):
                gv = self._g_off(anchor, sgn * to_d(x))
            # enforce monotone decrease so the search below is well defined
            gv = np.minimum.accumulate(np.where(np.isfinite(gv), gv, np.inf))
            tab = (x, gv)
            self._tables[key] = tab
        x, gv = tab
        j = np.searchsorted(-gv, -s, side="right")  # first index with g <= s
        j = np.clip(j, 1, len(x) - 1)
        g0, g1 = gv[j - 1], gv[j]
        with np.errstate(all="ignore"):
            frac = np.where((g1 > 0) & np.isfinite(g0), np.log(g0 / s) / np.log(g0 / g1), (g0 - s) / (g0 - g1))
        frac = np.where(np.isfinite(frac), np.clip(frac, 0.0, 1.0), 0.5)
        return x[j - 1], x[j], x[j - 1] + frac * (x[j] - x[j - 1])

    def _volume(self, lo: float, hi: float) -> float:
        if math.isinf(hi):
            return math.inf
        return float(shell_volume(self.omega, self.n, lo, hi - lo, True))

    def __call__(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        total = np.zeros_like(s)
        for p in self.pieces:
            total = total + self._piece_measure(p, s)
        return total

    def level_table(self, per_piece: int = 48) -> np.ndarray:
        """Sampled positive finite values of the weight over the pieces, sorted."""
        vals = []
        for p in self.pieces:
            if math.isinf(p.hi):
                r = p.lo + np.geomspace(max(self._near(p.lo), 1e-300), 1e300, per_piece)
            else:
                w = p.hi - p.lo
                d = np.geomspace(max(self._near(p.lo), 1e-300 if p.lo == 0 else 1e-16 * w), 0.5 * w, per_piece // 2)
                r = np.concatenate([p.lo + d, p.hi - d, np.linspace(p.lo, p.hi, per_piece)[1:-1]])
            vals.append(self._g(r))
        v = np.concatenate(vals)
        v = v[np.isfinite(v) & (v > 0)]
        return np.unique(v)


class RearrangedProfile:
    """Decreasing rearrangement ``g*`` and maximal function ``g**`` on (0, measure).

    ``star_fn`` evaluates ``g*`` exactly (vectorized) on ``[lo, support)``.
    Below ``lo`` a power-log model takes over; between the grid nodes
    integrals use Gauss panels, so ``g**`` is accurate to quadrature error.
    """

    def __init__(self, star_fn: Callable[[np.ndarray], np.ndarray], measure: float, support: float,
                 zero_model: PowerLog | None = None, inf_model: PowerLog | None = None,
                 breakpoints=(), name: str = "profile", per_unit: float = 1.0,
                 floor: float | None = None, top: float | None = None, scale: float | None = None,
                 min_panels: int = 128):
        self.name = name
        self.breakpoints = tuple(float(b) for b in breakpoints)
        self.measure = float(measure)
        self.support = float(min(support, measure))
        self._star_fn = star_fn
        if scale is None:
            scale = self.support if math.isfinite(self.support) and self.support > 0 else 1.0
        self.scale = scale
        if self.support == 0.0:
            self.zero = True
            self.grid = PanelGrid.log(1e-14 * scale, scale, per_unit, 16)
            self.zero_model = PowerLog(0.0, 0.0)
            self.inf_model = None
            self.cum = Cumulative(self.grid, lambda t: np.zeros_like(t), np.zeros(len(self.grid.nodes)))
            self.nodes = self.grid.nodes
            self.values = np.zeros_like(self.nodes)
            return
        self.zero = False
        if math.isfinite(self.support):
            hi = self.support
        else:
            hi = (top if top is not None else INFINITE_TOP * scale)
        if floor is None:
            singular = zero_model is not None and zero_model.p > 0
            floor = (SINGULAR_FLOOR if singular else BOUNDED_FLOOR) * scale
        floor = min(floor, 1e-3 * hi)
        self.grid = PanelGrid.log(floor, hi, per_unit=per_unit, min_panels=min_panels,
                                  breakpoints=[b for b in breakpoints if floor < b < hi])
        self.nodes = self.grid.nodes
        self.values = np.asarray(star_fn(self.nodes), dtype=float)
        lo = self.grid.lo
        v_lo = float(star_fn(np.array([lo]))[0])
        if zero_model is None:
            zero_model = PowerLog(v_lo, 0.0)
        self.zero_model = PowerLog.matched(v_lo, lo, zero_model.p, zero_model.b, zero_model.shift)
        top_tail = 0.0
        if not math.isfinite(self.support):
            v_hi = float(star_fn(np.array([hi]))[0])
            if inf_model is None:
                inf_model = PowerLog.fit(star_fn, hi, end="inf", step=2.0)
            else:
                inf_model = PowerLog.matched(v_hi, hi, inf_model.p, inf_model.b, inf_model.shift, end="inf")
            top_tail = inf_model.tail(hi)
        self.inf_model = inf_model
        head = self.zero_model.tail(lo)
        self.cum = Cumulative(self.grid, star_fn, self.values, head=head, top=top_tail)

    # -- evaluation -------------------------------------------------------

    @property
    def lo(self) -> float:
        return self.grid.lo

    @property
    def hi(self) -> float:
        return self.grid.hi

    @property
    def integral(self) -> float:
        """int_0^measure g*."""
        return self.cum.total

    def star(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros_like(t)
        if self.zero:
            return out
        low = t < self.lo
        mid = (~low) & (t < self.support)
        if low.any():
            out[low] = self.zero_model(t[low])
        if mid.any():
            out[mid] = self._star_fn(t[mid])
        return out

    __call__ = star

    def primitive(self, t) -> np.ndarray:
        """int_0^t g*."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.zero:
            return np.zeros_like(t)
        out = np.empty_like(t)
        low = t < self.lo
        mid = (~low) & (t <= self.hi)
        high = t > self.hi
        for i in np.flatnonzero(low):
            out[i] = self.zero_model.tail(float(t[i]))
        if mid.any():
            out[mid] = self.cum.from_start(t[mid])
        if high.any():
            base = self.cum.head + self.cum.forward[-1]
            if self.inf_model is None:
                out[high] = base
            else:
                tt = t[high]
                out[high] = base + self.inf_model.tail(self.hi) - np.array(
                    [self.inf_model.tail(float(x)) if math.isfinite(self.inf_model.tail(self.hi))
                     else -_inf_partial(self.inf_model, self.hi, float(x)) for x in tt])
        return out

    def doublestar(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        with np.errstate(invalid="ignore", over="ignore"):
            return self.primitive(t) / t

    def maximal_nodes(self) -> np.ndarray:
        """g** at every grid node."""
        with np.errstate(invalid="ignore", over="ignore"):
            return self.cum.nodes_from_start() / self.nodes

    def maximal_zero_model(self) -> PowerLog:
        return self.zero_model.maximal()

    def maximal_inf_model(self) -> PowerLog | None:
        """Model of g** at the infinite end."""
        if math.isfinite(self.support) or self.inf_model is None:
            return PowerLog(self.integral, 1.0, 0.0, 0.0, "inf") if math.isfinite(self.integral) else None
        m = self.inf_model
        if math.isfinite(self.integral):
            return PowerLog(self.integral, 1.0, 0.0, 0.0, "inf")
        if m.p < 1.0:
            return PowerLog(m.coef / (1.0 - m.p), m.p, m.b, m.shift, "inf")
        if m.b < 1.0:
            return PowerLog(m.coef / (1.0 - m.b), 1.0, m.b - 1.0, m.shift, "inf")
        return PowerLog(m.coef, 1.0, -1.0, m.shift, "inf")


def _inf_partial(model: PowerLog, a: float, b: float) -> float:
    from scipy import integrate as _int

    val, _ = _int.quad(lambda u: float(model(np.array([math.exp(u)]))[0]) * math.exp(u),
                       math.log(a), math.log(b), limit=200)
    return val


# ---------------------------------------------------------------------------
# building profiles from weights
# ---------------------------------------------------------------------------

def _zero_end_model(weight: RadialWeight, dom: DomainSpec) -> tuple[PowerLog | None, float | None]:
    """Power-log model of g* near t = 0 from the declared singularities, and a suggested floor."""
    n, om = dom.dimension, dom.omega
    rin, rout = dom.radial_range
    best = None
    for s in weight.singularities:
        if not (rin <= s.location < rout) or s.exponent <= 0:
            continue
        coef = 1.0 if s.coef is None else s.coef
        if s.location == 0.0:
            cand = (s.exponent / n, s.log_exponent,
                    PowerLog(coef * om ** (s.exponent / n) * n ** s.log_exponent, s.exponent / n,
                             s.log_exponent, math.log(om) + n * s.shift), None)
        else:
            sides = 1 if s.location == rin else s.sides
            kappa = sides * n * om * s.location ** (n - 1)
            cand = (s.exponent, s.log_exponent,
                    PowerLog(coef * kappa ** s.exponent, s.exponent, s.log_exponent,
                             math.log(kappa) + s.shift), INTERIOR_FLOOR * kappa)
        if best is None or (cand[0], -cand[1]) > (best[0], -best[1]):
            best = cand
    if best is None:
        return None, None
    return best[2], best[3]


def _inf_end_model(weight: RadialWeight, dom: DomainSpec) -> PowerLog | None:
    s = weight.singularity_at(math.inf)
    if s is None:
        return None
    n, om = dom.dimension, dom.omega
    coef = 1.0 if s.coef is None else s.coef
    return PowerLog(coef * om ** (-s.exponent / n) * n ** s.log_exponent, s.exponent / n, s.log_exponent,
                    -math.log(om) + n * s.shift, "inf")


def distribution(w: RadialWeight, dom: DomainSpec, s) -> np.ndarray | float:
    """Measure of ``{x in dom : g(|x|) > s}``; ``inf`` for unbounded level sets."""
    scalar = np.ndim(s) == 0
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr <= 0):
        raise ValueError("levels must be positive")
    out = LevelSets(w, dom)(s_arr)
    return float(out[0]) if scalar else out


def _single_decreasing(w: RadialWeight, dom: DomainSpec) -> bool:
    rin, rout = dom.radial_range
    active = [p for p in w.pieces if min(p.hi, rout) > max(p.lo, rin)]
    return len(active) == 1 and active[0].direction < 0


def rearrangement(w: RadialWeight, dom: DomainSpec, per_unit: float = 1.0,
                  min_panels: int = 128) -> RearrangedProfile:
    """Decreasing rearrangement of the radial weight over the domain."""
    star_fn, support, breakpoints = _star_solver(w, dom)
    zero_model, floor = _zero_end_model(w, dom)
    inf_model = _inf_end_model(w, dom) if not dom.bounded else None
    scale = support if 0 < support < math.inf else dom.omega
    return RearrangedProfile(star_fn, dom.measure, support, zero_model, inf_model, breakpoints,
                             name=w.name, per_unit=per_unit, floor=floor, scale=scale, min_panels=min_panels)


def star_values(w: RadialWeight, dom: DomainSpec, t) -> np.ndarray:
    """g*(t) at the given points, without building the quadrature grid."""
    star_fn, _, _ = _star_solver(w, dom)
    return np.asarray(star_fn(np.atleast_1d(np.asarray(t, dtype=float))), dtype=float)


def _star_solver(w: RadialWeight, dom: DomainSpec):
    levels = LevelSets(w, dom)
    n, om = dom.dimension, dom.omega
    rin, rout = dom.radial_range
    tiny = np.array([1e-300])
    support = float(levels(tiny)[0])

    if _single_decreasing(w, dom):
        base = om * rin ** n

        def star_fn(t):
            t = np.asarray(t, dtype=float)
            if rin > 0:
                r = rin * np.exp(np.log1p(t / base) / n)
            else:
                r = np.power(t / om, 1.0 / n)
            v = w(r)
            return np.where(t < support, np.where(np.isnan(v), 0.0, v), 0.0)
    else:
        table = levels.level_table()
        alpha_tab = levels(table) if len(table) else np.zeros(0)
        log_tab = np.log(table)

        def star_fn(t):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            out = np.zeros_like(t)
            act = t < support
            if not act.any():
                return out
            ta = t[act]
            logt = np.log(ta)
            # alpha_tab is nonincreasing in the (increasing) table levels
            k = np.searchsorted(-alpha_tab, -ta, side="left")  # first level with alpha < t
            va = np.where(k > 0, log_tab[np.maximum(k - 1, 0)], _LOGMIN)
            vb = np.where(k < len(log_tab), log_tab[np.minimum(k, len(log_tab) - 1)], _LOGMAX)

            def G(v, idx=None):
                lt = logt if idx is None else logt[idx]
                with np.errstate(divide="ignore"):
                    return lt - np.log(levels(np.exp(v)))

            # interpolate log alpha linearly in log level for a narrow starting bracket
            inner = (k > 0) & (k < len(log_tab))
            with np.errstate(all="ignore"):
                la = np.log(alpha_tab[np.maximum(k - 1, 0)])
                lb = np.log(np.maximum(alpha_tab[np.minimum(k, len(log_tab) - 1)], 1e-300))
                frac = np.clip((logt - la) / (lb - la), 0.0, 1.0)
            guess = np.where(inner & np.isfinite(frac), va + frac * (vb - va), 0.5 * (va + vb))
            half = np.where(inner, 0.02 * (vb - va), 0.0)
            na, nb = np.maximum(guess - half, va), np.minimum(guess + half, vb)
            ids = np.arange(len(ta))
            gna, gnb = G(np.concatenate([na, nb]), np.concatenate([ids, ids])).reshape(2, -1)
            use = inner & (gna <= 0) & (gnb >= 0)
            ga, gb = gna, gnb
            if not use.all():
                rest = np.flatnonzero(~use)
                ga[rest], gb[rest] = G(np.concatenate([va[rest], vb[rest]]),
                                       np.concatenate([rest, rest])).reshape(2, -1)
            va, vb = np.where(use, na, va), np.where(use, nb, vb)
            v = illinois(G, va, vb, ga, gb, xtol=1e-13, ftol=0.0)
            out[act] = np.exp(v)
            return out

    bps = []
    kinks = {r for p in levels.pieces for r in (p.lo, p.hi)} | set(w.breakpoints)
    for r in sorted(kinks):
        if 0 <= r < math.inf and rin <= r <= rout:
            val = w(np.array([r * (1 + 1e-12), r * (1 - 1e-12)]))
            val = val[np.isfinite(val) & (val > 0)]
            bps.extend(levels(val).tolist())
    breakpoints = [b for b in bps if 0 < b < support]
    return star_fn, support, breakpoints


def maximal(rp: RearrangedProfile, t) -> np.ndarray | float:
    """(1/t) int_0^t g*; ``inf`` when g* is not integrable at 0."""
    scalar = np.ndim(t) == 0
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr <= 0):
        raise ValueError("t must be positive")
    out = rp.doublestar(t_arr)
    return float(out[0]) if scalar else out


def symmetrized_domain(dom: DomainSpec) -> DomainSpec:
    return dom.symmetrized()


def schwarz(rp: RearrangedProfile, dom: DomainSpec, x_norm) -> np.ndarray | float:
    """g*(omega_N |x|^N) on the ball with the same measure as the domain."""
    star_dom = dom.symmetrized()
    x = np.atleast_1d(np.asarray(x_norm, dtype=float))
    if np.any(x <= 0) or np.any(x > star_dom.outer_radius):
        raise DomainError("radius outside the symmetrized domain")
    out = rp.star(dom.omega * np.power(x, dom.dimension))
    return float(out[0]) if np.ndim(x_norm) == 0 else out


def schwarz_weight(rp: RearrangedProfile, dom: DomainSpec) -> RadialWeight:
    """The Schwarz symmetrization as a radially decreasing weight on the symmetrized domain."""
    n, om = dom.dimension, dom.omega
    star_dom = dom.symmetrized()
    radius = star_dom.outer_radius
    supp_r = (rp.support / om) ** (1.0 / n) if math.isfinite(rp.support) else math.inf

    def ev(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < supp_r, rp.star(om * np.power(r, n)), 0.0)

    m = rp.zero_model
    sings = []
    if m.p > 0:
        sings.append(Singularity(0.0, n * m.p, m.b, m.coef * om ** (-m.p) * n ** (-m.b),
                                 (m.shift - math.log(om)) / n))
    pieces = [Piece(0.0, min(supp_r, radius), -1)]
    if supp_r < radius:
        pieces.append(Piece(supp_r, radius, 0))
    return RadialWeight(ev, tuple(pieces), tuple(sings), closed_form_rearrangement=rp.star,
                        name=f"schwarz({rp.name})")


# ---------------------------------------------------------------------------
# radial integrals and the Hardy-Littlewood inequality
# ---------------------------------------------------------------------------

def radial_integral(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                    breakpoints=(), hints: dict[float, EndHint] | None = None) -> float:
    """int_lo^hi f(r) dr split at breakpoints, graded toward every split point."""
    hints = hints or {}
    cuts = sorted({lo, hi, *[b for b in breakpoints if lo < b < hi]})
    total = 0.0
    for c, d in zip(cuts[:-1], cuts[1:]):
        total += integrate_graded(f, c, d, left=hints.get(c), right=hints.get(d))
        if math.isinf(total):
            return total
    return total


def _volume_integrand(dom: DomainSpec, h: Callable[[np.ndarray], np.ndarray]):
    n, om = dom.dimension, dom.omega

    def f(r):
        with np.errstate(all="ignore"):
            v = h(r) * n * om * np.power(r, n - 1)
        return np.where(np.isnan(v), 0.0, v)
    return f


def domain_integral(h: Callable[[np.ndarray], np.ndarray], dom: DomainSpec, breakpoints=()) -> float:
    """int_dom h(|x|) dx."""
    rin, rout = dom.radial_range
    return radial_integral(_volume_integrand(dom, h), rin, rout, breakpoints)


def hardy_littlewood_gap(f: RadialWeight, g: RadialWeight, dom: DomainSpec) -> float:
    """int_0^|dom| f* g* dt - int_dom f g dx (nonnegative up to quadrature error)."""
    rf = rearrangement(f, dom)
    rg = rearrangement(g, dom)
    bps = sorted(set(f.breakpoints) | set(g.breakpoints)
                 | {s.location for s in f.singularities + g.singularities if math.isfinite(s.location)})
    direct = domain_integral(lambda r: f(r) * g(r), dom, bps)
    rearr = rearranged_product_integral(rf, rg)
    if math.isinf(direct) and math.isinf(rearr):
        raise ArithmeticError("both sides of the Hardy-Littlewood inequality are infinite")
    return rearr - direct


def rearranged_product_integral(rf: RearrangedProfile, rg: RearrangedProfile) -> float:
    """int_0^inf f* g* dt."""
    if rf.zero or rg.zero:
        return 0.0
    end = min(rf.support, rg.support)
    lo = min(rf.lo, rg.lo)
    top = end if math.isfinite(end) else max(rf.hi, rg.hi)
    bps = [b for b in list(rf.grid.edges) + list(rg.grid.edges) if lo < b < top]
    grid = PanelGrid.log(lo, top, per_unit=1.0, min_panels=128)
    edges = [grid.u_edges, np.log(_thin(bps, lo, top))]
    if math.isfinite(end):
        # grade toward the end of the support, where g* may vanish like a fractional power
        edges.append(np.log(end - (end - lo) * 2.0 ** -np.arange(1, 48)))
    grid = PanelGrid(np.unique(np.concatenate(edges)), "log")

    def prod(t):
        return rf.star(t) * rg.star(t)
    cum = Cumulative(grid, prod)
    mf, mg = rf.zero_model, rg.zero_model
    v_lo = float(prod(np.array([lo]))[0])
    head = PowerLog.matched(v_lo, lo, mf.p + mg.p, mf.b + mg.b,
                            mf.shift if mf.shift == mg.shift else 0.0).tail(lo)
    tail = 0.0
    if not math.isfinite(end) and rf.inf_model is not None and rg.inf_model is not None:
        a, b = rf.inf_model, rg.inf_model
        tail = PowerLog.matched(float(prod(np.array([top]))[0]), top, a.p + b.p, a.b + b.b, 0.0, "inf").tail(top)
    return head + cum.forward[-1] + tail


def _thin(points, lo, hi):
    """Keep breakpoints at least a factor 1.01 apart."""
    pts = np.unique(np.asarray(points, dtype=float))
    keep = []
    last = lo
    for p in pts:
        if p > last * 1.01 and p < hi / 1.01:
            keep.append(p)
            last = p
    return np.asarray(keep) if keep else np.array([math.sqrt(lo * hi)])
