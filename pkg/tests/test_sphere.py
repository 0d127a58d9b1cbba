import numpy as np
import pytest

from slaplace.sphere import (
    exp_map,
    geodesic_distance,
    geodesic_distances,
    log_map,
    log_maps,
    project_to_tangent,
    unit_vector,
)


def _random_unit(rng, dim):
    return unit_vector(rng.standard_normal(dim))


def _random_tangent(rng, x, norm):
    u = project_to_tangent(x, rng.standard_normal(x.size))
    return norm * u / np.linalg.norm(u)


def test_unit_vector_normalizes():
    v = unit_vector([3.0, 4.0])
    assert np.allclose(v, [0.6, 0.8])
    assert np.linalg.norm(unit_vector(np.ones(7))) == pytest.approx(1.0)


def test_unit_vector_rejects_bad_input():
    with pytest.raises(ValueError):
        unit_vector([0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        unit_vector([1.0])


def test_distance_basics():
    e0 = np.array([1.0, 0.0, 0.0])
    e1 = np.array([0.0, 1.0, 0.0])
    assert geodesic_distance(e0, e0) == 0.0
    assert geodesic_distance(e0, -e0) == pytest.approx(np.pi)
    assert geodesic_distance(e0, e1) == pytest.approx(np.pi / 2)


def test_distance_clips_roundoff():
    # a renormalized vector can have dot(x, x) slightly above 1
    x = unit_vector(np.full(6, 1.0 / np.sqrt(6.0)))
    assert geodesic_distance(x, x) == 0.0


def test_distance_symmetry_and_triangle():
    rng = np.random.default_rng(101)
    for _ in range(100):
        x, y, z = (_random_unit(rng, 4) for _ in range(3))
        assert geodesic_distance(x, y) == pytest.approx(geodesic_distance(y, x), abs=1e-14)
        assert geodesic_distance(x, z) <= geodesic_distance(x, y) + geodesic_distance(y, z) + 1e-12


def test_distances_matches_scalar():
    rng = np.random.default_rng(7)
    x = _random_unit(rng, 5)
    pts = np.stack([_random_unit(rng, 5) for _ in range(20)])
    batch = geodesic_distances(pts, x)
    single = [geodesic_distance(row, x) for row in pts]
    assert np.allclose(batch, single, atol=1e-15)


def test_projection_orthogonal_and_idempotent():
    rng = np.random.default_rng(11)
    for _ in range(20):
        x = _random_unit(rng, 6)
        u = project_to_tangent(x, rng.standard_normal(6))
        assert abs(np.dot(x, u)) < 1e-12
        assert np.allclose(project_to_tangent(x, u), u, atol=1e-12)


def test_exp_log_round_trip():
    rng = np.random.default_rng(23)
    for _ in range(50):
        x = _random_unit(rng, 4)
        u = _random_tangent(rng, x, rng.uniform(1e-3, np.pi - 0.1))
        y = exp_map(x, u)
        assert np.linalg.norm(y) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(log_map(x, y), u, atol=1e-8)


def test_exp_map_is_isometric_along_geodesics():
    rng = np.random.default_rng(29)
    for _ in range(50):
        x = _random_unit(rng, 3)
        norm = rng.uniform(1e-3, np.pi - 0.1)
        y = exp_map(x, _random_tangent(rng, x, norm))
        assert geodesic_distance(x, y) == pytest.approx(norm, abs=1e-10)


def test_exp_map_zero_tangent_returns_base():
    x = unit_vector([1.0, 2.0, 2.0])
    assert np.array_equal(exp_map(x, np.zeros(3)), x)


def test_exp_map_rejects_non_tangent():
    x = np.array([0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        exp_map(x, np.array([0.0, 0.1, 0.5]))


def test_log_map_edge_cases():
    x = np.array([1.0, 0.0, 0.0])
    assert np.array_equal(log_map(x, x), np.zeros(3))
    with pytest.raises(ValueError):
        log_map(x, -x)


def test_log_maps_matches_scalar():
    rng = np.random.default_rng(31)
    x = _random_unit(rng, 4)
    pts = np.stack([exp_map(x, _random_tangent(rng, x, rng.uniform(0.1, 2.5)))
                    for _ in range(15)])
    batch = log_maps(x, pts)
    for i in range(15):
        assert np.allclose(batch[i], log_map(x, pts[i]), atol=1e-12)


def test_log_maps_handles_coincident_rows():
    # an axis base point is bit-exact, so the self row is exactly zero
    e0 = np.array([1.0, 0.0, 0.0])
    assert np.array_equal(log_maps(e0, e0[None, :])[0], np.zeros(3))
    # a renormalized base point self-dots to 1 - O(eps); near zero is the
    # best float can promise, and batch must agree with scalar
    x = unit_vector([1.0, 1.0, 0.0])
    pts = np.stack([x, unit_vector([0.0, 1.0, 1.0])])
    out = log_maps(x, pts)
    assert np.linalg.norm(out[0]) < 1e-12
    assert np.allclose(out[0], log_map(x, pts[0]), atol=1e-15)
    assert np.allclose(out[1], log_map(x, pts[1]), atol=1e-12)
