"""Model-based clustering with mixtures of spherical Laplace components.

EM alternates a soft E-step

    gamma_nk proportional to pi_k f(x_n | mu_k, sigma_k)

(computed in log space with per-row max subtraction) with an M-step that
re-fits component weights, weighted Frechet medians, and scales. Two
heuristics modify the membership matrix between the steps: 'hard' replaces
each row by the one-hot argmax (ties to the lowest index), 'stochastic'
samples one component per row from the row distribution. The scales can be
tied across components ('homogeneous'), in which case one scale is fit to the
pooled membership-weighted dispersion.

Initialization is Euclidean k-means on the ambient coordinates (10 restarts,
best within-cluster sum of squares, seeded) followed by one full M-step on
the resulting one-hot membership matrix. Iteration stops when the Frobenius
distance between consecutive membership matrices falls below eps_gamma.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.cluster import KMeans

from .density import SLParams, log_normalizing_constant
from .mle import (
    WeightedSample,
    estimate_sigma_newton_exact,
    frechet_median,
    weighted_objective,
)
from .sphere import geodesic_distances, unit_vector

_EMPTY_MASS = 1e-10
_ZERO_DISPERSION = 1e-12


@dataclass
class SLMixture:
    """A K-component mixture: weights (K,), locations (K, p+1), scales (K,)."""

    weights: np.ndarray
    locations: np.ndarray
    scales: np.ndarray
    homogeneous: bool = False

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.locations = np.asarray(self.locations, dtype=float)
        self.scales = np.asarray(self.scales, dtype=float)
        k = self.weights.size
        if self.locations.ndim != 2 or self.locations.shape[0] != k or self.scales.shape != (k,):
            raise ValueError("weights, locations and scales disagree on the number of components")
        if np.any(self.weights < 0.0) or abs(self.weights.sum() - 1.0) > 1e-8:
            raise ValueError("component weights must be non-negative and sum to one")
        if np.any(self.scales <= 0.0):
            raise ValueError("component scales must be positive")
        self.locations = np.stack([unit_vector(row) for row in self.locations])
        if self.homogeneous and np.ptp(self.scales) > 1e-12 * self.scales.max():
            raise ValueError("homogeneous mixtures must share a single scale")

    @property
    def n_components(self) -> int:
        return self.weights.size

    @property
    def p(self) -> int:
        return self.locations.shape[1] - 1

    def component(self, k: int) -> SLParams:
        return SLParams(mu=self.locations[k], sigma=float(self.scales[k]))

    def to_dict(self) -> dict:
        return {
            "K": int(self.n_components),
            "homogeneous": bool(self.homogeneous),
            "weights": [float(w) for w in self.weights],
            "locations": [[float(v) for v in row] for row in self.locations],
            "scales": [float(s) for s in self.scales],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "SLMixture":
        mix = cls(
            weights=np.array(d["weights"], dtype=float),
            locations=np.array(d["locations"], dtype=float),
            scales=np.array(d["scales"], dtype=float),
            homogeneous=bool(d["homogeneous"]),
        )
        if int(d["K"]) != mix.n_components:
            raise ValueError("stored K disagrees with the number of components")
        return mix

    @classmethod
    def from_json(cls, text: str) -> "SLMixture":
        return cls.from_dict(json.loads(text))


@dataclass
class EMOptions:
    """Knobs for fit_em."""

    assignment: str = "soft"  # 'soft' | 'hard' | 'stochastic'
    homogeneous: bool = False
    eps_gamma: float = 1e-6
    max_iter: int = 200
    seed: int = 0
    solver_eps: float = 1e-8
    solver_max_iter: int = 500

    def __post_init__(self):
        if self.assignment not in ("soft", "hard", "stochastic"):
            raise ValueError(f"unknown assignment heuristic {self.assignment!r}")


@dataclass
class EMResult:
    mixture: SLMixture
    gamma: np.ndarray
    trace: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def _log_component_matrix(points: np.ndarray, mixture: SLMixture) -> np.ndarray:
    """log(pi_k) + log f_k(x_n) for every point/component pair, (N, K)."""
    n, k = points.shape[0], mixture.n_components
    out = np.empty((n, k))
    with np.errstate(divide="ignore"):
        log_pi = np.log(mixture.weights)
    for j in range(k):
        d = geodesic_distances(points, mixture.locations[j])
        sigma = float(mixture.scales[j])
        out[:, j] = log_pi[j] - d / sigma - log_normalizing_constant(mixture.p, sigma)
    return out


def log_likelihood(points: np.ndarray, mixture: SLMixture) -> float:
    """Incomplete-data log likelihood sum_n log sum_k pi_k f_k(x_n)."""
    lm = _log_component_matrix(points, mixture)
    m = lm.max(axis=1, keepdims=True)
    return float((m[:, 0] + np.log(np.exp(lm - m).sum(axis=1))).sum())


def e_step(points: np.ndarray, mixture: SLMixture) -> np.ndarray:
    """Soft membership matrix, rows on the probability simplex."""
    lm = _log_component_matrix(points, mixture)
    lm -= lm.max(axis=1, keepdims=True)
    gamma = np.exp(lm)
    gamma /= gamma.sum(axis=1, keepdims=True)
    return gamma


def apply_hard(gamma: np.ndarray) -> np.ndarray:
    """One-hot argmax per row; ties break to the lowest component index."""
    out = np.zeros_like(gamma)
    out[np.arange(gamma.shape[0]), gamma.argmax(axis=1)] = 1.0
    return out


def apply_stochastic(gamma: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One-hot draw per row from the row distribution."""
    cdf = np.cumsum(gamma, axis=1)
    u = rng.random((gamma.shape[0], 1)) * cdf[:, -1:]
    idx = (u > cdf).sum(axis=1)
    out = np.zeros_like(gamma)
    out[np.arange(gamma.shape[0]), idx] = 1.0
    return out


def predict_labels(gamma: np.ndarray) -> np.ndarray:
    """Map a membership matrix to hard labels."""
    return gamma.argmax(axis=1)


def _component_location(points, gamma_k, prev_mu, eps, max_iter):
    """Weiszfeld median on the positive-weight subset, kept only if it does
    not lose to the previous location (preserves EM ascent)."""
    idx = np.flatnonzero(gamma_k > 0.0)
    sub = WeightedSample(points[idx], gamma_k[idx])
    med = frechet_median(sub, eps=eps, max_iter=max_iter)
    if prev_mu is not None and weighted_objective(sub, prev_mu) < med.objective:
        return prev_mu
    return med.mu_hat


def m_step(
    points: np.ndarray,
    gamma: np.ndarray,
    homogeneous: bool = False,
    prev: SLMixture | None = None,
    eps: float = 1e-8,
    max_iter: int = 500,
) -> SLMixture:
    """Re-fit weights, locations, and scales from a membership matrix.

    Components whose column mass falls below 1e-10, or whose weighted
    dispersion collapses below 1e-12, are frozen at their previous parameters
    (requires prev) and reported through a UserWarning.
    """
    points = np.asarray(points, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != points.shape[0]:
        raise ValueError(f"gamma must be (N, K) aligned with points, got {gamma.shape}")
    n, k = gamma.shape
    p = points.shape[1] - 1
    mass = gamma.sum(axis=0)
    weights = mass / n

    locations = np.empty((k, points.shape[1]))
    dispersions = np.full(k, np.nan)
    frozen = []
    for j in range(k):
        if mass[j] < _EMPTY_MASS:
            if prev is None:
                raise ValueError(f"component {j} received no mass and no previous parameters exist")
            frozen.append(j)
            locations[j] = prev.locations[j]
            continue
        prev_mu = prev.locations[j] if prev is not None else None
        locations[j] = _component_location(points, gamma[:, j], prev_mu, eps, max_iter)
        dispersions[j] = float(gamma[:, j] @ geodesic_distances(points, locations[j])) / mass[j]

    if frozen:
        warnings.warn(
            f"components {frozen} are empty and were frozen at their previous parameters",
            UserWarning,
            stacklevel=2,
        )

    active = [j for j in range(k) if j not in frozen]
    scales = np.empty(k)
    if homogeneous:
        pooled = float(sum(mass[j] * dispersions[j] for j in active)) / float(sum(mass[j] for j in active))
        if pooled < _ZERO_DISPERSION:
            if prev is None:
                raise ValueError("pooled dispersion is zero and no previous parameters exist")
            scales[:] = prev.scales
        else:
            fit = estimate_sigma_newton_exact(pooled, p, eps=eps, max_iter=max_iter)
            # the scale is shared by model structure, so frozen components move with it
            scales[:] = fit.sigma_hat
    else:
        for j in active:
            if dispersions[j] < _ZERO_DISPERSION:
                if prev is None:
                    raise ValueError(f"component {j} has zero dispersion and no previous parameters exist")
                scales[j] = prev.scales[j]
                warnings.warn(
                    f"component {j} collapsed to zero dispersion; scale frozen",
                    UserWarning,
                    stacklevel=2,
                )
                continue
            fit = estimate_sigma_newton_exact(dispersions[j], p, eps=eps, max_iter=max_iter)
            scales[j] = fit.sigma_hat
        for j in frozen:
            scales[j] = prev.scales[j]

    return SLMixture(weights=weights, locations=locations, scales=scales, homogeneous=homogeneous)


def init_kmeans(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """One-hot membership from Euclidean k-means on the ambient coordinates."""
    points = np.asarray(points, dtype=float)
    if k < 1 or k > points.shape[0]:
        raise ValueError(f"need 1 <= K <= N, got K={k} for N={points.shape[0]}")
    seed = int(rng.integers(2**31 - 1))
    km = KMeans(n_clusters=k, n_init=10, random_state=seed)
    labels = km.fit_predict(points)
    gamma = np.zeros((points.shape[0], k))
    gamma[np.arange(points.shape[0]), labels] = 1.0
    return gamma


def fit_em(points: np.ndarray, k: int, options: EMOptions | None = None) -> EMResult:
    """Fit a K-component mixture by EM. Returns an EMResult with the fitted
    mixture, the final membership matrix, and the per-iteration incomplete
    log-likelihood trace."""
    options = options or EMOptions()
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < k:
        raise ValueError(f"points must be (N, p+1) with N >= K, got {points.shape}")
    rng = np.random.default_rng(options.seed)

    gamma_prev = init_kmeans(points, k, rng)
    mixture = m_step(
        points,
        gamma_prev,
        homogeneous=options.homogeneous,
        prev=None,
        eps=options.solver_eps,
        max_iter=options.solver_max_iter,
    )

    trace: list[float] = []
    iterations = 0
    converged = False
    gamma = gamma_prev
    for _ in range(options.max_iter):
        lm = _log_component_matrix(points, mixture)
        m = lm.max(axis=1, keepdims=True)
        trace.append(float((m[:, 0] + np.log(np.exp(lm - m).sum(axis=1))).sum()))
        gamma = np.exp(lm - m)
        gamma /= gamma.sum(axis=1, keepdims=True)
        if options.assignment == "hard":
            gamma = apply_hard(gamma)
        elif options.assignment == "stochastic":
            gamma = apply_stochastic(gamma, rng)
        iterations += 1
        if np.linalg.norm(gamma - gamma_prev) < options.eps_gamma:
            converged = True
            break
        mixture = m_step(
            points,
            gamma,
            homogeneous=options.homogeneous,
            prev=mixture,
            eps=options.solver_eps,
            max_iter=options.solver_max_iter,
        )
        gamma_prev = gamma
    return EMResult(mixture=mixture, gamma=gamma, trace=trace, iterations=iterations, converged=converged)
