import numpy as np
import pytest
from scipy import integrate

from slaplace.density import (
    QuadratureRule,
    SLParams,
    default_rule,
    density,
    log_densities,
    log_density,
    log_normalizing_constant,
    mean_distance,
    normalizing_constant,
    radial_integral,
    radial_moment_ratios,
    surface_area,
)
from slaplace.sphere import unit_vector

SIGMAS = [1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0]


def _c1_closed(sigma):
    return 2.0 * sigma * (1.0 - np.exp(-np.pi / sigma))


def _c2_closed(sigma):
    return 2.0 * np.pi * sigma**2 * (1.0 + np.exp(-np.pi / sigma)) / (1.0 + sigma**2)


def test_surface_area_known_values():
    assert surface_area(0) == pytest.approx(2.0, rel=1e-14)
    assert surface_area(1) == pytest.approx(2.0 * np.pi, rel=1e-14)
    assert surface_area(2) == pytest.approx(4.0 * np.pi, rel=1e-14)
    assert surface_area(3) == pytest.approx(2.0 * np.pi**2, rel=1e-14)
    with pytest.raises(ValueError):
        surface_area(-1)


@pytest.mark.parametrize("sigma", SIGMAS)
def test_normalizing_constant_circle(sigma):
    assert normalizing_constant(1, sigma) == pytest.approx(_c1_closed(sigma), rel=1e-12)


@pytest.mark.parametrize("sigma", SIGMAS)
def test_normalizing_constant_sphere(sigma):
    assert normalizing_constant(2, sigma) == pytest.approx(_c2_closed(sigma), rel=1e-12)


def test_normalizing_constant_uniform_limit():
    # huge sigma flattens the density toward uniform, so C -> surface area
    assert normalizing_constant(2, 1e3) == pytest.approx(4.0 * np.pi, rel=1e-2)


@pytest.mark.parametrize("p", [1, 2, 5])
@pytest.mark.parametrize("sigma", [0.3, 1.0])
def test_radial_integral_against_quad(p, sigma):
    for order, extra in ((0, lambda r: 1.0), (1, lambda r: r / sigma**2),
                         (2, lambda r: r**2 / sigma**4 - 2.0 * r / sigma**3)):
        ref, err = integrate.quad(
            lambda r: extra(r) * np.exp(-r / sigma) * np.sin(r) ** (p - 1),
            0.0, np.pi, epsabs=0.0, epsrel=1e-11, limit=200)
        assert radial_integral(p, sigma, order=order) == pytest.approx(ref, rel=1e-8)


# p=1 with tiny sigma is excluded: there d2I0/dsigma2 is exponentially small
# and the finite difference is pure cancellation noise
@pytest.mark.parametrize("p,sigma", [(1, 0.5), (1, 2.0), (2, 0.05), (2, 0.5),
                                     (5, 0.05), (5, 2.0), (10, 0.05), (10, 0.5)])
def test_radial_integral_derivative_consistency(p, sigma):
    # order 1 and 2 are the sigma-derivatives of order 0
    i0 = lambda s: radial_integral(p, s, order=0)
    h1 = 1e-5 * sigma
    fd1 = (i0(sigma + h1) - i0(sigma - h1)) / (2.0 * h1)
    h2 = 1e-4 * sigma
    fd2 = (i0(sigma + h2) - 2.0 * i0(sigma) + i0(sigma - h2)) / h2**2
    assert radial_integral(p, sigma, order=1) == pytest.approx(fd1, rel=1e-6)
    assert radial_integral(p, sigma, order=2) == pytest.approx(fd2, rel=1e-4)


def test_radial_moment_ratios_match_integrals():
    p, sigma = 4, 0.7
    i0 = radial_integral(p, sigma, order=0)
    i1 = radial_integral(p, sigma, order=1)
    i2 = radial_integral(p, sigma, order=2)
    ratio1, centered2 = radial_moment_ratios(p, sigma)
    assert ratio1 == pytest.approx(i1 / i0, rel=1e-12)
    assert centered2 == pytest.approx(i2 / i0 - (i1 / i0) ** 2, rel=1e-9)


@pytest.mark.parametrize("p,sigma", [(1, 0.2), (2, 0.1), (5, 0.8), (10, 0.05)])
def test_mean_distance_against_quad(p, sigma):
    num, _ = integrate.quad(lambda r: r * np.exp(-r / sigma) * np.sin(r) ** (p - 1),
                            0.0, np.pi, epsabs=0.0, epsrel=1e-11, limit=200)
    den, _ = integrate.quad(lambda r: np.exp(-r / sigma) * np.sin(r) ** (p - 1),
                            0.0, np.pi, epsabs=0.0, epsrel=1e-11, limit=200)
    assert mean_distance(p, sigma) == pytest.approx(num / den, rel=1e-8)
    assert 0.0 < mean_distance(p, sigma) < np.pi / 2


def test_log_normalizing_constant_consistent():
    for p, sigma in [(1, 0.01), (3, 0.5), (8, 2.0)]:
        assert np.exp(log_normalizing_constant(p, sigma)) == pytest.approx(
            normalizing_constant(p, sigma), rel=1e-12)


def test_density_integrates_to_one_on_circle():
    # non-axis location exercises the full geodesic path; the density has a
    # kink at the location angle, so hand quad the split point
    params = SLParams(unit_vector([0.3, -0.8]), 0.25)
    phi = np.arctan2(params.mu[1], params.mu[0])
    total, _ = integrate.quad(
        lambda t: density(np.array([np.cos(t), np.sin(t)]), params),
        phi - np.pi, phi + np.pi, points=[phi], epsabs=1e-12, epsrel=1e-12,
        limit=400)
    assert total == pytest.approx(1.0, abs=1e-10)


def test_log_densities_matches_scalar():
    rng = np.random.default_rng(5)
    params = SLParams(unit_vector(rng.standard_normal(4)), 0.4)
    pts = np.stack([unit_vector(rng.standard_normal(4)) for _ in range(10)])
    batch = log_densities(pts, params)
    single = [log_density(row, params) for row in pts]
    assert np.allclose(batch, single, atol=1e-12)
    assert np.allclose(np.exp(batch[0]), density(pts[0], params), rtol=1e-12)


def test_params_validation():
    params = SLParams([2.0, 0.0, 0.0], 0.5)
    assert np.allclose(params.mu, [1.0, 0.0, 0.0])
    assert params.p == 2
    with pytest.raises(ValueError):
        SLParams([1.0, 0.0], 0.0)
    with pytest.raises(ValueError):
        SLParams([1.0, 0.0], -1.0)


def test_quadrature_rule_validation():
    rule = default_rule()
    assert np.all(rule.nodes > 0.0) and np.all(rule.nodes < np.pi)
    assert np.all(rule.weights > 0.0)
    assert rule.weights.sum() == pytest.approx(np.pi, abs=1e-10)
    with pytest.raises(ValueError):
        QuadratureRule(np.array([-0.1, 1.0]), np.array([1.0, np.pi - 1.0]), 2)
    with pytest.raises(ValueError):
        QuadratureRule(np.array([0.5, 1.0]), np.array([-0.5, np.pi + 0.5]), 2)
    with pytest.raises(ValueError):
        QuadratureRule(np.array([0.5, 1.0]), np.array([1.0, 1.0]), 2)
