import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import polynomial as P

from hardyrellich.profiles import DomainError, DomainSpec, constant_weight, omega_n, power_weight, zero_weight
from hardyrellich.verifier import (DegenerateError, PiecewisePolynomial, RadialMesh, assemble,
                                   best_constant_estimate, bump, bump_sum, clamped_ball_constant, dense_eigen,
                                   dirichlet_energy, inverse_iteration, necessity_test_function,
                                   piecewise_function, polar_second_derivative_check, random_bumps,
                                   rellich_quotient, rellich_sweep, weighted_mass)

W5 = omega_n(5)

# first radial clamped-plate eigenvalue of the unit ball, 1/k^4, from 50-digit Bessel root finding
CLAMPED = {3: 0.00420661075766499, 4: 0.00221236730515227, 5: 0.00129876289170174}


def radial_integral_exact(coefs, n):
    """n omega_n int_0^1 r^(n-1) p(r) dr for a polynomial p."""
    prim = P.polyint(P.polymul(coefs, [0.0] * (n - 1) + [1.0]))
    return n * omega_n(n) * P.polyval(1.0, prim)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_clamped_ball_bessel_oracle(n):
    assert clamped_ball_constant(n) == pytest.approx(CLAMPED[n], rel=1e-12)
    assert clamped_ball_constant(n, 2.0) == pytest.approx(16 * CLAMPED[n], rel=1e-12)


@pytest.mark.parametrize("n", [3, 5])
def test_fem_clamped_ball_approaches_bessel_from_below(n):
    mesh = RadialMesh.log_uniform(1e-6, 1.0, 40, n)
    est = best_constant_estimate(constant_weight(1.0), DomainSpec.ball(n, 1.0), mesh)
    assert est <= CLAMPED[n] * (1 + 1e-9)
    assert est == pytest.approx(CLAMPED[n], rel=1e-5)


def test_sweep_on_ball_uses_its_radius():
    sweep = rellich_sweep(constant_weight(1.0), DomainSpec.ball(5, 2.0), elements=(100, 200))
    assert sweep["r_truncs"] == [2.0]
    assert sweep["estimates_per_mesh"][-1] == pytest.approx(16 * CLAMPED[5], rel=1e-5)
    assert sweep["estimates_per_mesh"][0] <= sweep["estimates_per_mesh"][1] * (1 + 1e-12)


def test_dense_and_iterative_eigensolvers_agree():
    mesh = RadialMesh.log_uniform(1e-5, 1.0, 40, 5)
    asm = assemble(power_weight(2), mesh)
    dense, it = dense_eigen(asm), inverse_iteration(asm)
    assert mesh.n_elements == 200
    assert it.eigenvalue == pytest.approx(dense.eigenvalue, rel=1e-8)


def test_stiffness_and_mass_reproduce_cubic_exactly():
    # u = 1 - 3 r^2 + 2 r^3 has u(1) = u'(1) = u'(0) = 0 and lies in the Hermite space
    n = 5
    nodes = np.linspace(0.0, 1.0, 11)
    asm = assemble(constant_weight(1.0), RadialMesh(nodes, n))
    x = np.empty(2 * len(nodes))
    x[0::2] = 1 - 3 * nodes ** 2 + 2 * nodes ** 3
    x[1::2] = -6 * nodes + 6 * nodes ** 2
    lap = [-30.0, 36.0]  # u'' + 4 u'/r
    assert x @ asm.stiffness @ x == pytest.approx(radial_integral_exact(P.polymul(lap, lap), n), rel=1e-12)
    u = [1.0, 0.0, -3.0, 2.0]
    assert x @ asm.mass @ x == pytest.approx(radial_integral_exact(P.polymul(u, u), n), rel=1e-12)
    tf = piecewise_function(PiecewisePolynomial([0.0, 1.0], np.array([u])))
    assert dirichlet_energy(tf, n) == pytest.approx(radial_integral_exact(P.polymul(lap, lap), n), rel=1e-10)


def test_rellich_quotient_of_bump_against_polynomial_oracle():
    # bump(1) = r^2 - 2 r^3 + r^4, Laplacian in dimension 5 is 10 - 36 r + 28 r^2
    u, lap = [0.0, 0.0, 1.0, -2.0, 1.0], [10.0, -36.0, 28.0]
    energy = radial_integral_exact(P.polymul(lap, lap), 5)
    mass = radial_integral_exact(P.polymul(u, u), 5)
    q = rellich_quotient(constant_weight(1.0), bump(1.0), DomainSpec.ball(5, 1.0))
    assert q == pytest.approx(energy / mass, rel=1e-9)
    # any admissible u gives a lower bound for the best constant
    assert 1.0 / q <= CLAMPED[5]


def test_laplacian_matches_finite_differences():
    u = bump_sum([(1.0, 0.0, 1.0), (0.7, 0.2, -3.0)])
    r = np.linspace(0.05, 0.95, 37)
    r = r[np.min(np.abs(r[:, None] - np.array([0.2, 0.7])), axis=1) > 1e-3]  # u'' jumps at the kinks
    h = 1e-4
    fd2 = (u(r + h) - 2 * u(r) + u(r - h)) / h ** 2
    fd1 = (u(r + h) - u(r - h)) / (2 * h)
    for n in (3, 5):
        assert np.allclose(u.laplacian(r, n), fd2 + (n - 1) * fd1 / r, rtol=1e-5, atol=1e-5)
        assert np.allclose(u.laplacian(r, n), u.d2(r) + (n - 1) * u.d1(r) / r, rtol=1e-10, atol=1e-10)


def test_polar_check_example():
    # u = (1 - r)^2 on the unit ball in dimension 5: int u''^2 = 4 omega, int |Lap u|^2 = 20 omega / 3
    u = necessity_test_function(1.0, DomainSpec.ball(5, 2.0))
    lhs, rhs = polar_second_derivative_check(u, DomainSpec.ball(5, 2.0))
    assert lhs == pytest.approx(4 * W5, rel=1e-10)
    assert rhs == pytest.approx(20 * W5 / 3, rel=1e-8)


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scale_covariance(lam):
    dom1, doml = DomainSpec.ball(5, 1.0), DomainSpec.ball(5, lam)
    base = RadialMesh.log_uniform(1e-6, 1.0, 30, 5)
    scaled = RadialMesh(base.nodes * lam, 5)
    one = constant_weight(1.0)
    assert best_constant_estimate(one, doml, scaled) == pytest.approx(
        lam ** 4 * best_constant_estimate(one, dom1, base), rel=1e-9)
    # |x|^-4 is scale invariant
    crit = power_weight(4)
    assert best_constant_estimate(crit, doml, scaled) == pytest.approx(
        best_constant_estimate(crit, dom1, base), rel=1e-9)


@settings(max_examples=15, deadline=None)
@given(lam=st.floats(0.25, 4.0), n=st.sampled_from([3, 4, 5]))
def test_energy_scaling_of_test_functions(lam, n):
    u = bump(1.0, 0.2)
    assert dirichlet_energy(u.scaled_argument(lam), n) == pytest.approx(
        lam ** (4 - n) * dirichlet_energy(u, n), rel=1e-9)


def test_refinement_is_monotone():
    dom = DomainSpec.fullspace(5)
    ests = [best_constant_estimate(power_weight(4), dom, RadialMesh.log_uniform(1e-7, 1e2, k, 5))
            for k in (5, 10, 20, 40)]
    assert all(np.diff(ests) >= 0)


def test_rayleigh_quotients_bounded_by_estimate():
    rng = np.random.default_rng(11)
    dom = DomainSpec.ball(5, 1.0)
    est = best_constant_estimate(constant_weight(1.0), dom, RadialMesh.log_uniform(1e-6, 1.0, 40, 5))
    for _ in range(20):
        u = random_bumps(rng)
        assert 1.0 / rellich_quotient(constant_weight(1.0), u, dom) <= est * (1 + 1e-9)


def test_degenerate_inputs():
    dom = DomainSpec.ball(5, 1.0)
    with pytest.raises(DegenerateError):
        rellich_quotient(zero_weight(), bump(1.0), dom)
    asm = assemble(zero_weight(), RadialMesh.log_uniform(1e-3, 1.0, 5, 5))
    with pytest.raises(DegenerateError):
        inverse_iteration(asm)
    with pytest.raises(ValueError):
        RadialMesh(np.array([0.5, 0.2, 1.0]), 5)
    with pytest.raises(ValueError):
        best_constant_estimate(constant_weight(1.0), dom, RadialMesh.log_uniform(1e-3, 1.0, 5, 4))
    with pytest.raises(DomainError):
        bump(0.5, 0.7)
    assert weighted_mass(constant_weight(1.0), bump(1.0, 0.5, 0.0), 5) == 0.0
