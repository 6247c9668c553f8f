"""Numerical checks of the weighted biharmonic inequality and the lemmas behind it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import linalg, sparse

from .admissibility import cianchi_factor, hardy_route_constant
from .muckenhoupt import Direction, HardyPair, a1_constant, a2_constant, power_pair
from .profiles import DomainError, DomainKind, DomainSpec, Piece, RadialWeight, Singularity, detect_pieces
from .quad import Cumulative, EndHint, PowerLog
from .rearrange import radial_integral, rearrangement, star_values

Vectorized = Callable[[np.ndarray], np.ndarray]


class DegenerateError(ValueError):
    """Raised when a quotient or eigenproblem has a vanishing weighted mass."""


# ---------------------------------------------------------------------------
# radial test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialTestFunction:
    """A radial profile u(r) with its first two derivatives, supported in ``support``."""

    evaluator: Vectorized
    first_derivative: Vectorized
    second_derivative: Vectorized
    support: tuple[float, float]
    breakpoints: tuple[float, ...] = ()
    # blow-up of the Laplacian at r = 0, as (exponent, coefficient), if any
    laplacian_blowup: tuple[float, float] | None = None
    name: str = "u"
    # optional fused evaluator (r, N) -> Delta u, zero outside the support
    laplacian_fn: Callable[[np.ndarray, int], np.ndarray] | None = None

    def __call__(self, r) -> np.ndarray:
        return self._masked(self.evaluator, r)

    def d1(self, r) -> np.ndarray:
        return self._masked(self.first_derivative, r)

    def d2(self, r) -> np.ndarray:
        return self._masked(self.second_derivative, r)

    def _masked(self, fn: Vectorized, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        lo, hi = self.support
        inside = (r >= lo) & (r <= hi)
        with np.errstate(all="ignore"):
            v = np.asarray(fn(np.where(inside, r, 0.5 * (lo + hi))), dtype=float)
        return np.where(inside, np.broadcast_to(v, r.shape), 0.0)

    def laplacian(self, r, n: int) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.laplacian_fn is not None:
            return self.laplacian_fn(r, n)
        with np.errstate(all="ignore"):
            return self.d2(r) + (n - 1.0) * self.d1(r) / r

    @property
    def is_zero(self) -> bool:
        lo, hi = self.support
        r = np.linspace(lo, hi, 1001)
        return bool(np.all(self(r) == 0.0))

    def cuts(self) -> list[float]:
        lo, hi = self.support
        return sorted({lo, hi, *[b for b in self.breakpoints if lo < b < hi]})

    def scaled_argument(self, lam: float) -> "RadialTestFunction":
        """x -> u(lam x)."""
        f, f1, f2 = self.evaluator, self.first_derivative, self.second_derivative
        lo, hi = self.support
        blow = None
        if self.laplacian_blowup is not None:
            e, c = self.laplacian_blowup
            blow = (e, c * lam ** (2.0 - e))
        return RadialTestFunction(lambda r: f(lam * np.asarray(r)), lambda r: lam * f1(lam * np.asarray(r)),
                                  lambda r: lam * lam * f2(lam * np.asarray(r)), (lo / lam, hi / lam),
                                  tuple(b / lam for b in self.breakpoints), blow, f"{self.name}(x*{lam:g})")

    def abs_weight(self) -> RadialWeight:
        """|u| as a radial weight with detected monotone pieces."""
        ev = self.evaluator if self.laplacian_fn is not None else self
        return _as_weight(lambda r: np.abs(ev(r)), self.support, self.cuts(), None, f"|{self.name}|")

    def laplacian_weight(self, n: int) -> RadialWeight:
        """|Delta u| as a radial weight with detected monotone pieces."""
        sing = None
        if self.laplacian_blowup is not None and self.support[0] == 0.0:
            e, c = self.laplacian_blowup
            sing = Singularity(0.0, e, 0.0, abs(c))
        return _as_weight(lambda r: np.abs(self.laplacian(r, n)), self.support, self.cuts(), sing,
                          f"|Lap {self.name}|")


def _as_weight(fn: Vectorized, support, cuts, sing: Singularity | None, name: str) -> RadialWeight:
    lo, hi = support

    def ev(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(all="ignore"):
            v = fn(r)
        return np.where((r >= lo) & (r <= hi) & np.isfinite(v), v, 0.0)

    pieces = list(detect_pieces(ev, lo, hi, cuts))
    if lo > 0:
        pieces.insert(0, Piece(0.0, lo, 0))
    pieces.append(Piece(hi, math.inf, 0))
    return RadialWeight(ev, tuple(pieces), () if sing is None else (sing,), name=name)


def zero_function(radius: float = 1.0) -> RadialTestFunction:
    z = lambda r: np.zeros_like(np.asarray(r, dtype=float))  # noqa: E731
    return RadialTestFunction(z, z, z, (0.0, radius), name="0")


class PiecewisePolynomial:
    """Polynomials in r on consecutive intervals, zero outside [edges[0], edges[-1]]."""

    def __init__(self, edges: Sequence[float], coefs: np.ndarray):
        self.edges = np.asarray(edges, dtype=float)
        self.coefs = np.atleast_2d(np.asarray(coefs, dtype=float))  # lowest degree first
        if len(self.edges) != len(self.coefs) + 1:
            raise ValueError("need one coefficient row per interval")

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        k = np.searchsorted(self.edges, r, side="right") - 1
        k = np.where(r == self.edges[-1], len(self.coefs) - 1, k)
        inside = (k >= 0) & (k < len(self.coefs))
        c = self.coefs[np.clip(k, 0, len(self.coefs) - 1)]
        out = np.zeros_like(r)
        for j in range(self.coefs.shape[1] - 1, -1, -1):
            out = out * r + c[..., j]
        return np.where(inside, out, 0.0)

    def laplacian(self, r, n: int) -> np.ndarray:
        """u'' + (N-1) u'/r in one pass."""
        r = np.asarray(r, dtype=float)
        k = np.searchsorted(self.edges, r, side="right") - 1
        k = np.where(r == self.edges[-1], len(self.coefs) - 1, k)
        inside = (k >= 0) & (k < len(self.coefs))
        kk = np.clip(k, 0, len(self.coefs) - 1)
        # Delta r^j = j (j + N - 2) r^(j-2): a polynomial plus a c_1 (N-1)/r term
        deg = self.coefs.shape[1] - 1
        j = np.arange(2, deg + 1)
        lc = self.coefs[kk][..., 2:] * (j * (j + n - 2.0))
        out = np.zeros_like(r)
        for i in range(lc.shape[-1] - 1, -1, -1):
            out = out * r + lc[..., i]
        if deg >= 1:
            with np.errstate(all="ignore"):
                out = out + (n - 1.0) * self.coefs[kk][..., 1] / r
        return np.where(inside, out, 0.0)

    def derivative(self) -> "PiecewisePolynomial":
        deg = self.coefs.shape[1]
        if deg == 1:
            return PiecewisePolynomial(self.edges, np.zeros_like(self.coefs))
        return PiecewisePolynomial(self.edges, self.coefs[:, 1:] * np.arange(1, deg)[None, :])


def piecewise_function(pp: PiecewisePolynomial, name: str = "u") -> RadialTestFunction:
    d1 = pp.derivative()
    d2 = d1.derivative()
    e = pp.edges
    return RadialTestFunction(pp, d1, d2, (float(e[0]), float(e[-1])), tuple(float(x) for x in e[1:-1]),
                              name=name, laplacian_fn=pp.laplacian)


def _bump_coefs(a: float, b: float, c: float) -> np.ndarray:
    P = np.polynomial.polynomial
    return c * P.polymul(P.polypow([a, -1.0], 2), P.polypow([-b, 1.0], 2))


def bump(outer: float, inner: float = 0.0, coef: float = 1.0) -> RadialTestFunction:
    """coef (outer - r)^2 (r - inner)^2 on [inner, outer]; C^1 at both ends."""
    return bump_sum([(outer, inner, coef)])


def bump_sum(terms: Sequence[tuple[float, float, float]]) -> RadialTestFunction:
    """Sum of coef (a - r)^2_+ (r - b)^2_+ over (a, b, coef) terms with 0 <= b < a."""
    for a, b, _ in terms:
        if not 0.0 <= b < a:
            raise DomainError("need 0 <= inner < outer")
    edges = np.unique([x for a, b, _ in terms for x in (a, b)])
    coefs = np.zeros((len(edges) - 1, 5))
    mids = 0.5 * (edges[:-1] + edges[1:])
    for a, b, c in terms:
        active = (mids > b) & (mids < a)
        coefs[active] += _bump_coefs(a, b, c)
    name = "+".join(f"bump({a:g},{b:g})" for a, b, _ in terms)
    return piecewise_function(PiecewisePolynomial(edges, coefs), name)


def random_bumps(rng: np.random.Generator, radius: float = 1.0, max_terms: int = 3,
                 signed: bool = True) -> RadialTestFunction:
    """Sum of 1 to max_terms bumps with random supports inside [0, radius]."""
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        a = radius * rng.uniform(0.1, 1.0)
        b = 0.0 if rng.random() < 0.3 else a * rng.uniform(0.0, 0.9)
        c = rng.lognormal(0.0, 1.0) * (rng.choice([-1.0, 1.0]) if signed else 1.0)
        terms.append((a, b, c / (a - b) ** 4))
    return bump_sum(terms)


def necessity_test_function(r: float, dom: DomainSpec) -> RadialTestFunction:
    """The test functions used to show necessity of the weak-Lorentz and M log L conditions."""
    n = dom.dimension
    outer = dom.outer_radius
    if dom.kind not in (DomainKind.BALL, DomainKind.FULLSPACE):
        raise DomainError("test functions live on balls or the whole space")
    if n >= 5:
        if not 0.0 < r < outer:
            raise DomainError("need 0 < r < R")
        u = RadialTestFunction(lambda x: (r - x) ** 2, lambda x: -2.0 * (r - x),
                               lambda x: 2.0 + 0.0 * x, (0.0, r), (), ((1.0, -(2.0 * n - 2.0) * r)),
                               name=f"u_r({r:g})")
        return u
    if n == 4:
        if not dom.bounded or not 0.0 < r < outer / math.e:
            raise DomainError("need a bounded ball and 0 < r < R/e")
        return _log_test_function(r, outer)
    raise DomainError("test functions exist for N >= 4")


def _log_test_function(r: float, R: float) -> RadialTestFunction:
    lr = math.log(R / r)

    def F(L):
        return L * L * np.exp(-2.0 * L / lr)

    def F1(L):
        return (2.0 * L - 2.0 * L * L / lr) * np.exp(-2.0 * L / lr)

    def F2(L):
        return (2.0 - 8.0 * L / lr + 4.0 * L * L / lr ** 2) * np.exp(-2.0 * L / lr)

    inner = lr * lr / math.e ** 2

    def u(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.where(x <= r, inner, F(np.log(R / x)))

    def u1(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.where(x <= r, 0.0, -F1(np.log(R / x)) / x)

    def u2(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            L = np.log(R / x)
            return np.where(x <= r, 0.0, (F2(L) + F1(L)) / (x * x))

    return RadialTestFunction(u, u1, u2, (0.0, R), (r,), name=f"u_r({r:g})")


# ---------------------------------------------------------------------------
# radial quadrature
# ---------------------------------------------------------------------------

def _volume(n: int) -> float:
    from .profiles import omega_n
    return n * omega_n(n)


def dirichlet_energy(u: RadialTestFunction, n: int) -> float:
    """int |Delta u|^2 dx."""
    sn = _volume(n)

    def f(r):
        with np.errstate(all="ignore"):
            v = u.laplacian(r, n) ** 2 * sn * np.power(r, n - 1.0)
        return np.where(np.isfinite(v), v, 0.0)

    hints = {}
    if u.laplacian_blowup is not None:
        hints[0.0] = EndHint(2.0 * u.laplacian_blowup[0] - (n - 1.0))
    lo, hi = u.support
    return radial_integral(f, lo, hi, u.cuts(), hints)


def weighted_mass(g: RadialWeight, u: RadialTestFunction, n: int) -> float:
    """int g u^2 dx."""
    sn = _volume(n)

    def f(r):
        with np.errstate(all="ignore"):
            v = g(r) * u(r) ** 2 * sn * np.power(r, n - 1.0)
        return np.where(np.isfinite(v), v, 0.0)

    lo, hi = u.support
    hints: dict[float, EndHint] = {}
    cuts = list(u.cuts()) + [b for b in g.breakpoints if lo < b < hi]
    for s in g.singularities:
        if s.location == 0.0 and lo == 0.0:
            hints[0.0] = EndHint(s.exponent - (n - 1.0), s.log_exponent, s.shift)
        elif lo <= s.location < hi:
            hints[s.location] = EndHint(s.exponent, s.log_exponent, s.shift)
            cuts.append(s.location)
    return radial_integral(f, lo, hi, cuts, hints)


def rellich_quotient(g: RadialWeight, u: RadialTestFunction, dom: DomainSpec) -> float:
    n = dom.dimension
    mass = weighted_mass(g, u, n)
    if not mass > 0.0:
        raise DegenerateError("the weighted mass of u vanishes")
    return dirichlet_energy(u, n) / mass


def polar_second_derivative_check(u: RadialTestFunction, dom: DomainSpec) -> tuple[float, float]:
    """(N omega_N int r^(N-1) u''^2 dr, int |Delta u|^2 dx)."""
    n = dom.dimension
    sn = _volume(n)
    lo, hi = u.support

    def f(r):
        with np.errstate(all="ignore"):
            v = u.d2(r) ** 2 * sn * np.power(r, n - 1.0)
        return np.where(np.isfinite(v), v, 0.0)

    return radial_integral(f, lo, hi, u.cuts()), dirichlet_energy(u, n)


# ---------------------------------------------------------------------------
# rearrangement-side checks
# ---------------------------------------------------------------------------

# panels of the rearrangement grid for test-function profiles; bounded smooth profiles need few
PROFILE_PANELS = 16


def _profile_domain(u: RadialTestFunction, dom: DomainSpec) -> DomainSpec:
    return DomainSpec.fullspace(dom.dimension) if not dom.bounded else DomainSpec.ball(dom.dimension,
                                                                                        dom.outer_radius)


def cianchi_check(u: RadialTestFunction, dom: DomainSpec, s: float | Sequence[float],
                  per_unit: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """(u*(s), K (s^(-1+2/N) int_0^s f* + int_s^inf f* t^(-1+2/N))) with f = |Delta u|."""
    n = dom.dimension
    if n < 3:
        raise DomainError("the pointwise bound needs N >= 3")
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if u.is_zero:
        return np.zeros_like(s), np.zeros_like(s)
    pdom = _profile_domain(u, dom)
    panels = int(round(PROFILE_PANELS * per_unit))
    rf = rearrangement(u.laplacian_weight(n), pdom, per_unit=per_unit, min_panels=panels)
    k = cianchi_factor(n)
    gam = -1.0 + 2.0 / n
    lhs = star_values(u.abs_weight(), pdom, s)
    rhs = np.zeros_like(s)
    if rf.zero:
        return np.asarray(lhs, dtype=float), rhs
    weighted = Cumulative(rf.grid, lambda t: rf.star(t) * np.power(t, gam), rf.values * rf.nodes ** gam)
    inner = s >= rf.lo
    tail = np.zeros_like(s)
    tail[inner] = weighted.to_end(s[inner])
    for i in np.flatnonzero(~inner):
        head = radial_integral(lambda t: rf.zero_model(t) * np.power(t, gam), float(s[i]), rf.lo, [])
        tail[i] = head + weighted.to_end(np.array([rf.lo]))[0]
    rhs = k * (s ** gam * rf.primitive(s) + tail)
    return np.asarray(lhs, dtype=float), rhs


def _embedding_pairs(n: int, measure: float) -> tuple[HardyPair, HardyPair]:
    """Hardy pairs for the Lorentz-side function phi in place of g*."""
    if n >= 5:
        return (power_pair(-2.0, 0.0, math.inf, Direction.FROM_ZERO),
                power_pair(-4.0 / n, 2.0 - 4.0 / n, math.inf, Direction.FROM_A))
    a = measure
    shift = 1.0 + math.log(a)

    def phi(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            return 1.0 / (t * np.log(math.e * a / t) ** 2)

    one = lambda t: np.ones_like(np.asarray(t, dtype=float))  # noqa: E731
    first = HardyPair(lambda t: phi(t) / np.asarray(t, dtype=float), one, a, Direction.FROM_ZERO, one,
                      u_zero=PowerLog(1.0, 2.0, 2.0, shift), vinv_zero=PowerLog(1.0, 0.0),
                      v_zero=PowerLog(1.0, 0.0), name="phi/t")
    second = HardyPair(phi, lambda t: np.asarray(t, dtype=float), a, Direction.FROM_A,
                       lambda t: 1.0 / np.asarray(t, dtype=float),
                       u_zero=PowerLog(1.0, 1.0, 2.0, shift), vinv_zero=PowerLog(1.0, 1.0),
                       v_zero=PowerLog(1.0, -1.0), name="phi")
    return first, second


def embedding_constant(dom: DomainSpec) -> float:
    """C_1 with |u|^2 on the Lorentz side <= C_1 int |Delta u|^2, through the Hardy route."""
    n = dom.dimension
    if n < 4 or (n == 4 and not dom.bounded):
        raise DomainError("embeddings need N >= 5, or N = 4 on a bounded domain")
    p1, p2 = _embedding_pairs(n, dom.measure)
    return hardy_route_constant(a1_constant(p1), a2_constant(p2), n)


def embedding_check(u: RadialTestFunction, dom: DomainSpec, c1: float | None = None) -> tuple[float, float]:
    n = dom.dimension
    if u.is_zero:
        return 0.0, 0.0
    c1 = embedding_constant(dom) if c1 is None else c1
    rp = rearrangement(u.abs_weight(), _profile_domain(u, dom), min_panels=PROFILE_PANELS)
    if n >= 5:
        def kernel(t):
            return np.power(t, -4.0 / n)
    else:
        a = dom.measure

        def kernel(t):
            return 1.0 / (t * np.log(math.e * a / t) ** 2)

    def f(t):
        t = np.asarray(t, dtype=float)
        return kernel(t) * rp.star(t) ** 2

    body = Cumulative(rp.grid, f, kernel(rp.nodes) * rp.values ** 2).total
    hint = {0.0: EndHint(4.0 / n if n >= 5 else 1.0, 0.0 if n >= 5 else 2.0)}
    head = radial_integral(lambda t: kernel(np.asarray(t, dtype=float)) * rp.zero_model(t) ** 2,
                           0.0, rp.lo, [], hint)
    lorentz = head + body
    return lorentz, c1 * dirichlet_energy(u, n)


# ---------------------------------------------------------------------------
# Hermite finite elements
# ---------------------------------------------------------------------------

_QX, _QW = np.polynomial.legendre.leggauss(8)
_QX = 0.5 * (_QX + 1.0)
_QW = 0.5 * _QW


@dataclass(frozen=True, eq=False)
class RadialMesh:
    """Nodes carrying (u, u') with clamped or symmetric ends.

    ``inner`` is "clamped" (u = u' = 0) or "center" (u' = 0, u extended as a
    constant on [0, nodes[0]]).  The outer end is always clamped.
    """

    nodes: np.ndarray
    dimension: int
    inner: str = "center"
    outer: str = "clamped"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 2 or np.any(np.diff(nodes) <= 0):
            raise ValueError("mesh nodes must be strictly increasing")
        if self.inner not in ("center", "clamped") or self.outer != "clamped":
            raise ValueError("unsupported boundary flags")
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_elements(self) -> int:
        return len(self.nodes) - 1

    @property
    def boundary(self) -> tuple[str, str]:
        return self.inner, self.outer

    @classmethod
    def log_uniform(cls, r_min: float, r_max: float, per_decade: int, dimension: int,
                    inner: str = "center") -> "RadialMesh":
        decades = math.log10(r_max / r_min)
        n = max(int(round(decades * per_decade)), 1)
        nodes = r_min * 10.0 ** (np.arange(n + 1) / per_decade)
        nodes[-1] = r_max
        return cls(nodes, dimension, inner)

    @classmethod
    def for_domain(cls, g: RadialWeight, dom: DomainSpec, n_elements: int = 2000,
                   r_trunc: float = 1e3, r_min: float = 1e-7) -> "RadialMesh":
        """Geometric toward r = 0 (or the inner sphere) and toward interior singular radii."""
        n = dom.dimension
        rin, rout = dom.radial_range
        rout = rout if math.isfinite(rout) else r_trunc
        singular = [s.location for s in g.singularities if rin < s.location < rout]
        budget = max(n_elements - 60 * len(singular), 16)
        if rin == 0.0:
            nodes = np.geomspace(r_min * rout, rout, budget + 1)
            inner = "center"
        else:
            width = rout - rin
            nodes = rin + np.concatenate([[0.0], np.geomspace(1e-8 * width, width, budget)])
            inner = "clamped"
        extra = []
        for loc in singular:
            dist = 0.5 * min(loc - rin, rout - loc)
            d = np.geomspace(1e-9 * loc, dist, 30)
            extra.extend(loc - d)
            extra.extend(loc + d)
            extra.append(loc)
        nodes = np.unique(np.concatenate([nodes, extra]))
        return cls(nodes, n, inner)


def _hermite(xi: np.ndarray, h: np.ndarray):
    """Values, r-derivatives and second r-derivatives of the four cubic Hermite shapes."""
    x = xi[None, :]
    hh = h[:, None]
    one = np.ones_like(hh)
    val = np.stack([one * (1 - 3 * x ** 2 + 2 * x ** 3), hh * (x - 2 * x ** 2 + x ** 3),
                    one * (3 * x ** 2 - 2 * x ** 3), hh * (-x ** 2 + x ** 3)])
    d1 = np.stack([(-6 * x + 6 * x ** 2) / hh, one * (1 - 4 * x + 3 * x ** 2),
                   (6 * x - 6 * x ** 2) / hh, one * (-2 * x + 3 * x ** 2)])
    d2 = np.stack([(-6 + 12 * x) / hh ** 2, (-4 + 6 * x) / hh,
                   (6 - 12 * x) / hh ** 2, (-2 + 6 * x) / hh])
    return val, d1, d2


@dataclass
class Assembled:
    stiffness: sparse.csr_matrix
    mass: sparse.csr_matrix
    free: np.ndarray
    mesh: RadialMesh


def assemble(g: RadialWeight, mesh: RadialMesh) -> Assembled:
    r = mesh.nodes
    n = mesh.dimension
    sn = _volume(n)
    h = np.diff(r)
    ne = len(h)
    val, d1, d2 = _hermite(_QX, h)
    rq = r[:-1, None] + h[:, None] * _QX[None, :]
    meas = sn * np.power(rq, n - 1.0) * h[:, None] * _QW[None, :]
    lap = d2 + (n - 1.0) * d1 / rq[None, :, :]
    with np.errstate(all="ignore"):
        gq = g(rq)
    gq = np.where(np.isfinite(gq), gq, 0.0)
    ke = np.einsum("aeq,beq,eq->eab", lap, lap, meas)
    me = np.einsum("aeq,beq,eq->eab", val, val, meas * gq)
    me += _singular_corrections(g, mesh)
    dof = 2 * np.arange(ne)[:, None] + np.arange(4)[None, :]
    rows = np.repeat(dof, 4, axis=1).ravel()
    cols = np.tile(dof, (1, 4)).ravel()
    size = 2 * len(r)
    K = sparse.csr_matrix((ke.ravel(), (rows, cols)), shape=(size, size))
    M = sparse.csr_matrix((me.ravel(), (rows, cols)), shape=(size, size))
    if mesh.inner == "center" and r[0] > 0.0:
        core = _core_mass(g, r[0], n)
        M = M + sparse.csr_matrix(([core], ([0], [0])), shape=(size, size))
    fixed = {1, size - 2, size - 1}
    if mesh.inner == "clamped":
        fixed.add(0)
    free = np.array([i for i in range(size) if i not in fixed])
    return Assembled(K, M, free, mesh)


def _core_mass(g: RadialWeight, r0: float, n: int) -> float:
    sn = _volume(n)

    def f(r):
        with np.errstate(all="ignore"):
            v = g(r) * sn * np.power(r, n - 1.0)
        return np.where(np.isfinite(v), v, 0.0)

    hints = {}
    for s in g.singularities:
        if s.location == 0.0:
            hints[0.0] = EndHint(s.exponent - (n - 1.0), s.log_exponent, s.shift)
    return radial_integral(f, 0.0, r0, [b for b in g.breakpoints if 0 < b < r0], hints)


def _singular_corrections(g: RadialWeight, mesh: RadialMesh) -> np.ndarray:
    """Replace plain Gauss mass on elements ending at an interior singular radius by a graded rule."""
    r = mesh.nodes
    ne = len(r) - 1
    out = np.zeros((ne, 4, 4))
    locs = [s.location for s in g.singularities if 0.0 < s.location < math.inf]
    if not locs:
        return out
    n = mesh.dimension
    sn = _volume(n)
    for loc in locs:
        for e in np.flatnonzero((np.isclose(r[:-1], loc, rtol=0, atol=1e-14 * loc))
                                | np.isclose(r[1:], loc, rtol=0, atol=1e-14 * loc)):
            a, b = r[e], r[e + 1]
            h = b - a
            at_left = abs(a - loc) < abs(b - loc)
            # geometric sub-panels toward the singular end, Gauss on each
            d = np.concatenate([[0.0], np.geomspace(1e-14, 1.0, 60)])
            xs, ws = [], []
            for lo_, hi_ in zip(d[:-1], d[1:]):
                xs.append(lo_ + (hi_ - lo_) * _QX)
                ws.append((hi_ - lo_) * _QW)
            off = np.concatenate(xs)
            w = np.concatenate(ws)
            xi = off if at_left else 1.0 - off
            val, _, _ = _hermite(xi, np.array([h]))
            rq = a + h * xi
            with np.errstate(all="ignore"):
                gq = g.at_offset(loc, rq - loc)
            gq = np.where(np.isfinite(gq), gq, 0.0)
            meas = sn * np.power(rq, n - 1.0) * h * w * gq
            plain_val, _, _ = _hermite(_QX, np.array([h]))
            rp = a + h * _QX
            with np.errstate(all="ignore"):
                gp = g(rp)
            gp = np.where(np.isfinite(gp), gp, 0.0)
            plain = np.einsum("aq,bq,q->ab", plain_val[:, 0], plain_val[:, 0], sn * rp ** (n - 1.0) * h * _QW * gp)
            out[e] += np.einsum("aq,bq,q->ab", val[:, 0], val[:, 0], meas) - plain
    return out


@dataclass(frozen=True)
class EigenResult:
    eigenvalue: float
    constant: float
    iterations: int
    vector: np.ndarray = field(repr=False)


def _reduced(asm: Assembled):
    f = asm.free
    K = asm.stiffness[f][:, f].tocsr()
    M = asm.mass[f][:, f].tocsr()
    d = K.diagonal()
    if np.any(d <= 0):
        raise DegenerateError("stiffness is not positive on the clamped subspace")
    s = 1.0 / np.sqrt(d)
    S = sparse.diags(s)
    return (S @ K @ S).tocsr(), (S @ M @ S).tocsr(), s


def _band_of(K: sparse.csr_matrix, bw: int) -> np.ndarray:
    n = K.shape[0]
    ab = np.zeros((bw + 1, n))
    Kd = K.todia()
    for off, data in zip(Kd.offsets, Kd.data):
        if 0 <= off <= bw:
            ab[bw - off, off:] = data[off:]
    return ab


def inverse_iteration(asm: Assembled, block: int = 4, tol: float = 1e-10, maxiter: int = 1000,
                      seed: int = 0) -> EigenResult:
    """Smallest eigenvalue of K x = lam M x by block inverse iteration on banded Cholesky factors."""
    K, M, s = _reduced(asm)
    if M.count_nonzero() == 0 or not np.any(M.diagonal() > 0):
        raise DegenerateError("the mass form vanishes on the mesh")
    n = K.shape[0]
    bw = 3
    chol = linalg.cholesky_banded(_band_of(K, bw), lower=False)
    rng = np.random.default_rng(seed)
    p = min(block, n)
    Y = rng.standard_normal((n, p))
    Y[:, 0] = 1.0
    prev = math.inf
    lam = math.inf
    it = 0
    for it in range(1, maxiter + 1):
        X = linalg.cho_solve_banded((chol, False), M @ Y)
        X, _ = np.linalg.qr(X)
        Kp = X.T @ (K @ X)
        Mp = X.T @ (M @ X)
        Kp = 0.5 * (Kp + Kp.T)
        Mp = 0.5 * (Mp + Mp.T)
        mu, V = linalg.eigh(Mp, Kp)
        Y = X @ V[:, ::-1]
        if mu[-1] <= 0:
            raise DegenerateError("no positive eigenvalue: the weight vanishes on the mesh")
        lam = 1.0 / mu[-1]
        if abs(prev - lam) <= tol * abs(lam):
            break
        prev = lam
    vec = np.zeros(asm.stiffness.shape[0])
    vec[asm.free] = s * Y[:, 0]
    return EigenResult(lam, 1.0 / lam, it, vec)


def dense_eigen(asm: Assembled) -> EigenResult:
    """Dense generalized eigensolve, for small meshes and cross-checks."""
    K, M, s = _reduced(asm)
    mu, V = linalg.eigh(M.toarray(), K.toarray())
    if mu[-1] <= 0:
        raise DegenerateError("no positive eigenvalue: the weight vanishes on the mesh")
    vec = np.zeros(asm.stiffness.shape[0])
    vec[asm.free] = s * V[:, -1]
    return EigenResult(1.0 / mu[-1], mu[-1], 0, vec)


def best_constant_estimate(g: RadialWeight, dom: DomainSpec, mesh: RadialMesh,
                           dense: bool | None = None) -> float:
    """1/lambda_min of (stiffness, mass) on the clamped subspace; a lower bound for the best constant."""
    if mesh.dimension != dom.dimension:
        raise ValueError("mesh and domain dimensions differ")
    asm = assemble(g, mesh)
    use_dense = dense if dense is not None else mesh.n_elements < 150
    res = dense_eigen(asm) if use_dense else inverse_iteration(asm)
    return res.constant


def rellich_sweep(g: RadialWeight, dom: DomainSpec, r_truncs: Sequence[float] = (1e1, 1e2, 1e3),
                  elements: Sequence[int] = (500, 1000, 2000, 4000), r_min: float = 1e-7,
                  reference_trunc: float = 1e3) -> dict:
    """Estimates on nested log-uniform meshes: refinement at the largest truncation, and truncation growth
    at the finest density.  Bounded or punctured domains are meshed to their own radii, so only the
    refinement sweep applies there."""
    if dom.kind is not DomainKind.FULLSPACE:
        rt = dom.outer_radius if dom.bounded else reference_trunc
        per_mesh = [best_constant_estimate(g, dom, RadialMesh.for_domain(g, dom, ne, rt, r_min)) for ne in elements]
        return {"elements": list(elements), "estimates_per_mesh": per_mesh, "r_truncs": [rt],
                "estimates_per_trunc": [per_mesh[-1]]}
    decades = math.log10(reference_trunc / r_min)
    per_mesh = []
    for ne in elements:
        per_decade = ne / decades
        mesh = RadialMesh.log_uniform(r_min, reference_trunc, int(round(per_decade)), dom.dimension)
        per_mesh.append(best_constant_estimate(g, dom, mesh))
    per_trunc = []
    finest = int(round(elements[-1] / decades))
    for rt in r_truncs:
        mesh = RadialMesh.log_uniform(r_min, rt, finest, dom.dimension)
        per_trunc.append(best_constant_estimate(g, dom, mesh))
    return {"elements": list(elements), "estimates_per_mesh": per_mesh, "r_truncs": list(r_truncs),
            "estimates_per_trunc": per_trunc}


def clamped_ball_constant(n: int, radius: float = 1.0) -> float:
    """1/k^4 for the first radial clamped biharmonic eigenvalue of the ball, from Bessel functions."""
    from scipy import optimize, special
    nu = n / 2.0 - 1.0

    def det(k):
        return special.jv(nu, k) * special.iv(nu + 1, k) + special.iv(nu, k) * special.jv(nu + 1, k)

    ks = np.linspace(0.5, 20.0, 4000)
    vals = det(ks)
    i = int(np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0])
    k = optimize.brentq(det, ks[i], ks[i + 1], xtol=1e-15)
    return (radius / k) ** 4
