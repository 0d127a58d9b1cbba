"""Riemannian primitives on the unit hypersphere S^p embedded in R^(p+1).

Points are unit-norm numpy arrays of length p + 1 (p >= 1). Tangent vectors
at x are arrays of the same length orthogonal to x. The geodesic distance is
the arc length d(x, y) = arccos(<x, y>), taking values in [0, pi].
"""

import numpy as np

# Below this norm a tangent vector is treated as zero and a distance as a
# coincidence of points.
_ZERO_TOL = 1e-14
# Orthogonality slack allowed between a base point and a tangent vector.
_ORTHO_TOL = 1e-8


def unit_vector(coords) -> np.ndarray:
    """Return coords renormalized to unit length as a point on S^p.

    Raises ValueError for vectors of dimension < 2 (the circle S^1 in R^2 is
    the smallest supported sphere) and for vectors of zero norm.
    """
    x = np.asarray(coords, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError(f"expected a vector in R^(p+1) with p >= 1, got shape {x.shape}")
    nrm = np.linalg.norm(x)
    if nrm < _ZERO_TOL:
        raise ValueError("cannot normalize a zero vector onto the sphere")
    return x / nrm


def geodesic_distance(x, y) -> float:
    """Arc length between two points on the sphere, in [0, pi]."""
    dot = float(np.dot(x, y))
    return float(np.arccos(np.clip(dot, -1.0, 1.0)))


def geodesic_distances(points: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Arc lengths from each row of points (N, p+1) to a single point y."""
    dots = points @ y
    return np.arccos(np.clip(dots, -1.0, 1.0))


def project_to_tangent(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Orthogonal projection of an ambient vector z onto the tangent space at x."""
    if x.shape != z.shape:
        raise ValueError(f"dimension mismatch: point {x.shape}, vector {z.shape}")
    return z - np.dot(x, z) * x


def exp_map(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Exponential map: follow the geodesic from x with initial velocity u.

    u must lie in the tangent space at x. Norms below 1e-14 return x itself.
    The result is renormalized to counter accumulated rounding.
    """
    if x.shape != u.shape:
        raise ValueError(f"dimension mismatch: point {x.shape}, tangent {u.shape}")
    if abs(np.dot(x, u)) > _ORTHO_TOL * max(1.0, float(np.linalg.norm(u))):
        raise ValueError("tangent vector is not orthogonal to its base point")
    t = float(np.linalg.norm(u))
    if t < _ZERO_TOL:
        return x.copy()
    y = np.cos(t) * x + (np.sin(t) / t) * u
    return y / np.linalg.norm(y)


def log_map(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Inverse of exp_map: the tangent vector at x pointing to y.

    Defined for d(x, y) < pi; antipodal pairs raise ValueError. Coincident
    points (d < 1e-14) return the zero tangent vector.
    """
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    d = geodesic_distance(x, y)
    if d < _ZERO_TOL:
        return np.zeros_like(x)
    if np.pi - d < 1e-12:
        raise ValueError("log_map is undefined for antipodal points")
    v = project_to_tangent(x, y - x)
    nrm = float(np.linalg.norm(v))
    # arccos can report d ~ sqrt(eps) for points whose chord is exactly zero
    if nrm < _ZERO_TOL:
        return np.zeros_like(x)
    return (d / nrm) * v


def log_maps(x: np.ndarray, points: np.ndarray, dists: np.ndarray | None = None) -> np.ndarray:
    """Vectorized log_map from x to each row of points.

    dists may pass precomputed geodesic distances. Rows coincident with x map
    to zero vectors; antipodal rows raise ValueError.
    """
    if dists is None:
        dists = geodesic_distances(points, x)
    if np.any(np.pi - dists < 1e-12):
        raise ValueError("log_map is undefined for antipodal points")
    # || points - <x, .> x || = sin(d) exactly for unit vectors
    proj = points - np.outer(points @ x, x)
    sin_d = np.sin(dists)
    scale = np.where(dists < _ZERO_TOL, 0.0, dists / np.maximum(sin_d, _ZERO_TOL))
    return scale[:, None] * proj
