"""Maximum likelihood estimation for the spherical Laplace distribution.

The location MLE is the weighted Frechet median, computed by a geometric
Weiszfeld iteration: starting from the normalized extrinsic mean, each step
maps the data into the tangent space at the current iterate, averages with
weights w_n / d(mu, x_n), and maps back through the exponential map.

Given the median, the scale MLE solves g'(sigma) = 0 for
g(sigma) = S / sigma + log C_p(sigma), with S the weighted mean geodesic
distance to the median. Two Newton iterations are provided: an exact one
using the radial integral ratios

    g'(sigma)  = -S/sigma^2 + I_1/I_0
    g''(sigma) = 2 S/sigma^3 + (I_0 I_2 - I_1^2)/I_0^2

and a derivative-free one using central differences of g itself. Both fall
back to bisection of g' on [1e-6, 1e3] when an iterate escapes (0, inf) or
the step budget runs out.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .density import SLParams, log_normalizing_constant, radial_moment_ratios
from .sphere import exp_map, geodesic_distance, geodesic_distances, log_maps

_COINCIDENT_TOL = 1e-14
_GRAD_TOL = 1e-6
_BISECT_LO = 1e-6
_BISECT_HI = 1e3


@dataclass
class WeightedSample:
    """Points (N, p+1) with non-negative weights normalized to sum to one."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] < 2:
            raise ValueError(f"points must be (N, p+1) with p >= 1, got {self.points.shape}")
        n = self.points.shape[0]
        if self.weights is None:
            self.weights = np.full(n, 1.0 / n)
        else:
            self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (n,):
            raise ValueError(f"weights must have shape ({n},), got {self.weights.shape}")
        if np.any(self.weights < 0.0):
            raise ValueError("weights must be non-negative")
        total = float(self.weights.sum())
        if not total > 0.0:
            raise ValueError("weights must not all be zero")
        self.weights = self.weights / total

    @classmethod
    def uniform(cls, points) -> "WeightedSample":
        return cls(np.asarray(points, dtype=float), None)


@dataclass
class MedianResult:
    mu_hat: np.ndarray
    objective: float
    iterations: int
    converged: bool
    hit_data_point: bool


@dataclass
class ScaleResult:
    sigma_hat: float
    iterations: int
    converged: bool


def weighted_objective(sample: WeightedSample, mu: np.ndarray) -> float:
    """Sum of weighted geodesic distances from mu to the sample."""
    return float(np.dot(sample.weights, geodesic_distances(sample.points, mu)))


def frechet_median(sample: WeightedSample, eps: float = 1e-8, max_iter: int = 500) -> MedianResult:
    """Weighted geodesic median on the sphere by Weiszfeld iteration.

    Stops when consecutive iterates are within eps (geodesic or chordal), when
    the iterate lands on a positive-weight data point, or after max_iter
    updates (converged then reports False).
    """
    pts, w = sample.points, sample.weights
    m = w @ pts
    nrm = float(np.linalg.norm(m))
    if nrm < 1e-12:
        raise ValueError("degenerate initialization: weighted extrinsic mean is zero")
    mu = m / nrm

    positive = w > 0.0
    iterations = 0
    converged = False
    hit = False
    for _ in range(max_iter):
        d = geodesic_distances(pts, mu)
        if np.any(d[positive] < _COINCIDENT_TOL):
            converged = True
            hit = True
            break
        # scaled weights w_n / d_n; zero-weight points stay at zero
        wt = np.where(positive, w / np.maximum(d, _COINCIDENT_TOL), 0.0)
        logs = log_maps(mu, pts, d)
        step = (wt @ logs) / wt.sum()
        mu_next = exp_map(mu, step)
        iterations += 1
        moved = geodesic_distance(mu, mu_next)
        mu = mu_next
        if moved < eps or np.linalg.norm(step) < eps:
            converged = True
            break
    return MedianResult(
        mu_hat=mu,
        objective=weighted_objective(sample, mu),
        iterations=iterations,
        converged=converged,
        hit_data_point=hit,
    )


def scale_objective(s: float, p: int, sigma: float) -> float:
    """g(sigma) = S/sigma + log C_p(sigma), the negative mean log likelihood."""
    return s / sigma + log_normalizing_constant(p, sigma)


def scale_gradient(s: float, p: int, sigma: float) -> float:
    """g'(sigma) expressed through the radial integral ratio I_1/I_0."""
    q1, _ = radial_moment_ratios(p, sigma)
    return -s / sigma**2 + q1


def _check_dispersion(s: float):
    if not 0.0 < s < np.pi:
        raise ValueError(f"mean distance S must lie strictly inside (0, pi), got {s}")


def _safeguarded_newton(s, p, sigma0, eps, max_iter, proposal):
    """Newton iteration on g' kept inside a shrinking sign-change bracket.

    proposal(sigma) returns (grad_estimate, candidate or None). The candidate
    is taken when it stays inside the current bracket [lo, hi] with
    g'(lo) < 0 < g'(hi); otherwise the step bisects the bracket, which is the
    guaranteed fallback since g' changes sign exactly once on [1e-6, 1e3].
    """
    lo, hi = _BISECT_LO, _BISECT_HI
    if scale_gradient(s, p, lo) > 0.0 or scale_gradient(s, p, hi) < 0.0:
        raise RuntimeError(
            f"no scale root inside [{lo}, {hi}] for S={s}; the sample dispersion "
            "is outside the range the estimator can invert"
        )
    sigma = float(s if sigma0 is None else sigma0)
    if not sigma > 0.0:
        raise ValueError(f"sigma0 must be positive, got {sigma}")
    sigma = min(max(sigma, lo), hi)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        grad, candidate = proposal(sigma)
        if grad < 0.0:
            lo = sigma
        else:
            hi = sigma
        if candidate is None or not np.isfinite(candidate) or not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        moved = abs(candidate - sigma)
        sigma = candidate
        if moved < eps:
            break
    converged = abs(scale_gradient(s, p, sigma)) <= _GRAD_TOL
    return ScaleResult(sigma_hat=sigma, iterations=iterations, converged=converged)


def estimate_sigma_newton_exact(
    s: float, p: int, sigma0: float | None = None, eps: float = 1e-8, max_iter: int = 500
) -> ScaleResult:
    """Scale MLE by Newton steps with analytic derivatives from I_0, I_1, I_2.

    The raw update sigma - g'/g'' is used whenever the curvature is positive
    and the step stays inside the current root bracket; elsewhere the step
    bisects (g is not convex far from the root, where the raw update
    diverges).
    """
    _check_dispersion(s)

    def proposal(sigma):
        q1, var = radial_moment_ratios(p, sigma)
        grad = -s / sigma**2 + q1
        hess = 2.0 * s / sigma**3 + var
        if not np.isfinite(hess) or hess <= 0.0:
            return grad, None
        return grad, sigma - grad / hess

    return _safeguarded_newton(s, p, sigma0, eps, max_iter, proposal)


def estimate_sigma_newton_approx(
    s: float,
    p: int,
    sigma0: float | None = None,
    eps: float = 1e-8,
    max_iter: int = 500,
    h: float | None = None,
) -> ScaleResult:
    """Scale MLE by Newton steps on central finite differences of g itself.

    h defaults to 1e-5 * sigma at each iterate; a fixed h at or above the
    current iterate is shrunk to sigma/2 for that step. Safeguarded by the
    same root bracket as the exact variant.
    """
    _check_dispersion(s)
    if h is not None and not h > 0.0:
        raise ValueError(f"h must be positive, got {h}")

    def proposal(sigma):
        hh = 1e-5 * sigma if h is None else float(h)
        if hh >= sigma:
            hh = 0.5 * sigma
        g_minus = scale_objective(s, p, sigma - hh)
        g_mid = scale_objective(s, p, sigma)
        g_plus = scale_objective(s, p, sigma + hh)
        grad = (g_plus - g_minus) / (2.0 * hh)
        denom = g_plus - 2.0 * g_mid + g_minus
        if denom <= 0.0 or not np.isfinite(denom):
            return grad, None
        return grad, sigma - 0.5 * hh * (g_plus - g_minus) / denom

    return _safeguarded_newton(s, p, sigma0, eps, max_iter, proposal)


def fit_mle(points: np.ndarray, eps: float = 1e-8, max_iter: int = 500):
    """Fit location and scale to points (N, p+1). Returns (SLParams, loglik).

    Warns (without failing) when the sample is not contained in the open ball
    of radius pi/4 around the fitted median, the regime where the MLE is
    guaranteed unique.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 2:
        raise ValueError(f"need at least two points, got shape {points.shape}")
    sample = WeightedSample.uniform(points)
    med = frechet_median(sample, eps=eps, max_iter=max_iter)
    d = geodesic_distances(points, med.mu_hat)
    s = float(d.mean())
    if s < 1e-12:
        raise ValueError("zero dispersion: all points coincide, scale is unidentifiable")
    if float(d.max()) >= np.pi / 4:
        warnings.warn(
            "sample spread exceeds the pi/4 ball around the median; "
            "uniqueness of the MLE is not guaranteed",
            UserWarning,
            stacklevel=2,
        )
    scale = estimate_sigma_newton_exact(s, points.shape[1] - 1, eps=eps, max_iter=max_iter)
    params = SLParams(mu=med.mu_hat, sigma=scale.sigma_hat)
    n = points.shape[0]
    loglik = float(-d.sum() / scale.sigma_hat - n * log_normalizing_constant(params.p, scale.sigma_hat))
    return params, loglik
