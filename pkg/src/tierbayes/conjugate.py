"""Conjugate Bayesian linear regression with a normal-inverse-gamma prior.

Model: ``y = X b + noise`` with ``noise ~ N(0, sigma^2)``, prior
``b ~ N(0, v * I)`` and ``sigma^2 ~ InverseGamma(a0, b0)``. The posterior is
again normal-inverse-gamma, with Student-t coefficient marginals; this
module exposes the exact batch update, single-row incremental update,
coefficient marginals, tail probabilities, credible intervals, the Gaussian
KL used for posterior-stability checks, and posterior predictive
calibration diagnostics.

All operations are pure functions of immutable inputs and are deterministic:
identical inputs produce bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .rng import PURPOSE_PIT, mix64

student_t_cdf = _kernels.student_t_cdf
student_t_ppf = _kernels.student_t_ppf
kolmogorov_sf = _kernels.kolmogorov_sf


@dataclass(frozen=True)
class PriorConfig:
    """Hyperparameters of the normal-inverse-gamma prior.

    ``coefficient_variance`` is the scalar v with coefficient prior
    covariance v * I; ``ig_shape``/``ig_rate`` parameterize the
    inverse-gamma prior on the noise variance.
    """

    coefficient_variance: float = 10.0
    ig_shape: float = 2.0
    ig_rate: float = 1.0

    def __post_init__(self) -> None:
        if self.coefficient_variance <= 0:
            raise ValueError("coefficient_variance must be > 0")
        if self.ig_shape <= 0 or self.ig_rate <= 0:
            raise ValueError("ig_shape and ig_rate must be > 0")


@dataclass(frozen=True)
class PosteriorState:
    """Normal-inverse-gamma posterior after absorbing ``n_obs`` rows."""

    coef_mean: np.ndarray
    coef_precision: np.ndarray
    ig_shape: float
    ig_rate: float
    n_obs: int

    @property
    def dim(self) -> int:
        return len(self.coef_mean)

    def to_json_dict(self) -> dict:
        return {
            "coef_mean": self.coef_mean.tolist(),
            "coef_precision": self.coef_precision.tolist(),
            "ig_shape": self.ig_shape,
            "ig_rate": self.ig_rate,
            "n_obs": self.n_obs,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PosteriorState":
        return cls(
            coef_mean=np.asarray(data["coef_mean"], dtype=float),
            coef_precision=np.asarray(data["coef_precision"], dtype=float),
            ig_shape=float(data["ig_shape"]),
            ig_rate=float(data["ig_rate"]),
            n_obs=int(data["n_obs"]),
        )


@dataclass(frozen=True)
class CoefficientMarginal:
    """Student-t marginal of a single coefficient."""

    location: float
    scale: float
    dof: float

    def __post_init__(self) -> None:
        if self.scale <= 0 or self.dof <= 0:
            raise ValueError("marginal requires scale > 0 and dof > 0")


def prior_state(prior: PriorConfig, dim: int) -> PosteriorState:
    """The prior embedded as a zero-observation posterior of dimension dim."""
    return PosteriorState(
        coef_mean=np.zeros(dim),
        coef_precision=np.eye(dim) / prior.coefficient_variance,
        ig_shape=prior.ig_shape,
        ig_rate=prior.ig_rate,
        n_obs=0,
    )


def posterior_update(
    prior: PriorConfig,
    design_rows: Sequence[Sequence[float]] | np.ndarray,
    outcomes: Sequence[float] | np.ndarray,
    *,
    dim: int | None = None,
) -> PosteriorState:
    """Exact batch conjugate update on the full data.

    ``dim`` is only consulted for empty data (defaulting to 2, the
    intercept-plus-effect pairwise design); otherwise the row width rules.
    """
    X = np.asarray(design_rows, dtype=float)
    y = np.asarray(outcomes, dtype=float)
    if X.size == 0:
        if y.size != 0:
            raise ValueError("design rows and outcomes must have equal length")
        return prior_state(prior, 2 if dim is None else dim)
    if X.ndim != 2:
        raise ValueError("design rows must form a 2-D matrix")
    if y.ndim != 1 or len(y) != X.shape[0]:
        raise ValueError("design rows and outcomes must have equal length")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("non-finite inputs")
    k = X.shape[1]
    precision = np.eye(k) / prior.coefficient_variance + X.T @ X
    mean = np.linalg.solve(precision, X.T @ y)
    shape = prior.ig_shape + 0.5 * len(y)
    rate = prior.ig_rate + 0.5 * (y @ y - mean @ precision @ mean)
    return PosteriorState(mean, precision, shape, float(max(rate, 1e-12)), len(y))


def absorb(state: PosteriorState, row: Sequence[float], y: float) -> PosteriorState:
    """Absorb one observation into an existing posterior (rank-1 update).

    Chaining ``absorb`` row by row from the prior embedding reproduces the
    batch update exactly (up to floating-point tolerance).
    """
    r = np.asarray(row, dtype=float)
    if r.shape != (state.dim,):
        raise ValueError(f"row must have dimension {state.dim}")
    if not (np.isfinite(r).all() and math.isfinite(y)):
        raise ValueError("non-finite inputs")
    precision = state.coef_precision + np.outer(r, r)
    mean = np.linalg.solve(precision, state.coef_precision @ state.coef_mean + r * y)
    old_quad = state.coef_mean @ state.coef_precision @ state.coef_mean
    new_quad = mean @ precision @ mean
    rate = state.ig_rate + 0.5 * (y * y + old_quad - new_quad)
    return PosteriorState(
        mean, precision, state.ig_shape + 0.5, float(max(rate, 1e-12)), state.n_obs + 1
    )


def coefficient_marginal(state: PosteriorState, index: int) -> CoefficientMarginal:
    """Student-t marginal of coefficient ``index``."""
    if not 0 <= index < state.dim:
        raise IndexError(f"coefficient index {index} out of range for dim {state.dim}")
    unit = np.zeros(state.dim)
    unit[index] = 1.0
    cov_ii = float(np.linalg.solve(state.coef_precision, unit)[index])
    scale2 = (state.ig_rate / state.ig_shape) * cov_ii
    return CoefficientMarginal(
        location=float(state.coef_mean[index]),
        scale=math.sqrt(scale2),
        dof=2.0 * state.ig_shape,
    )


def prob_positive(marginal: CoefficientMarginal) -> float:
    """Posterior probability that the coefficient exceeds zero."""
    return 1.0 - student_t_cdf(-marginal.location / marginal.scale, marginal.dof)


def prob_negative(marginal: CoefficientMarginal) -> float:
    """Exact complement of :func:`prob_positive`."""
    return 1.0 - prob_positive(marginal)


def credible_interval(
    marginal: CoefficientMarginal, level: float
) -> tuple[float, float]:
    """Equal-tailed credible interval, symmetric about the location."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    half_width = student_t_ppf(0.5 + 0.5 * level, marginal.dof) * marginal.scale
    return marginal.location - half_width, marginal.location + half_width


def kl_stability(
    current: CoefficientMarginal, lagged: CoefficientMarginal
) -> float:
    """KL divergence (nats) between moment-matched Gaussian approximations.

    Student-t KL has no closed form; both marginals are replaced by
    Gaussians with the same mean and variance (variance exists only for
    dof > 2, otherwise stability is undefined and a ValueError is raised --
    callers treat that as "not yet stable").
    """
    if current.dof <= 2 or lagged.dof <= 2:
        raise ValueError("stability undefined: marginal dof must exceed 2")
    var_cur = current.scale**2 * current.dof / (current.dof - 2.0)
    var_lag = lagged.scale**2 * lagged.dof / (lagged.dof - 2.0)
    ratio = var_cur / var_lag
    return 0.5 * (
        ratio - 1.0 - math.log(ratio) + (current.location - lagged.location) ** 2 / var_lag
    )


def _predictive_params(
    state: PosteriorState, row: np.ndarray
) -> tuple[float, float, float]:
    """(center, scale, dof) of the Student-t posterior predictive at ``row``."""
    center = float(row @ state.coef_mean)
    solved = np.linalg.solve(state.coef_precision, row)
    scale2 = (state.ig_rate / state.ig_shape) * (1.0 + float(row @ solved))
    return center, math.sqrt(scale2), 2.0 * state.ig_shape


def posterior_predictive_coverage(
    state: PosteriorState,
    design_rows: Sequence[Sequence[float]] | np.ndarray,
    outcomes: Sequence[float] | np.ndarray,
    level: float,
) -> float:
    """Fraction of outcomes inside their equal-tailed predictive interval."""
    if state.n_obs <= 0:
        raise ValueError("coverage requires a posterior with n_obs > 0")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    X = np.asarray(design_rows, dtype=float)
    y = np.asarray(outcomes, dtype=float)
    if len(y) == 0:
        raise ValueError("empty evaluation set")
    inside = 0
    for row, value in zip(X, y):
        center, scale, dof = _predictive_params(state, row)
        half_width = student_t_ppf(0.5 + 0.5 * level, dof) * scale
        if center - half_width <= value <= center + half_width:
            inside += 1
    return inside / len(y)


def ks_statistic(pits: Sequence[float]) -> float:
    """Kolmogorov-Smirnov distance of values in [0, 1] from uniformity."""
    if len(pits) == 0:
        raise ValueError("empty PIT set")
    ordered = sorted(pits)
    n = len(ordered)
    d = 0.0
    for i, p in enumerate(ordered):
        d = max(d, (i + 1) / n - p, p - i / n)
    return d


def ks_calibration(
    state: PosteriorState,
    design_rows: Sequence[Sequence[float]] | np.ndarray,
    outcomes: Sequence[float] | np.ndarray,
    n_samples: int,
) -> tuple[float, float]:
    """Posterior predictive calibration check via sampled PIT values.

    For each observation the probability integral transform is estimated as
    the fraction of ``n_samples`` posterior predictive draws falling below
    the observed outcome (draws come from a fixed internal counter stream,
    so the result is deterministic). Under a calibrated predictive the PITs
    are uniform; returns the KS statistic against uniformity and the
    asymptotic Kolmogorov p-value.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    X = np.asarray(design_rows, dtype=float)
    y = np.asarray(outcomes, dtype=float)
    if len(y) == 0:
        raise ValueError("empty data")
    pits = []
    for i, (row, value) in enumerate(zip(X, y)):
        center, scale, dof = _predictive_params(state, row)
        cutoff = student_t_cdf((value - center) / scale, dof)
        key = mix64(PURPOSE_PIT, state.n_obs, i)
        below = _kernels.count_uniforms_below(key, n_samples, cutoff)
        pits.append(below / n_samples)
    d = ks_statistic(pits)
    return d, kolmogorov_sf(math.sqrt(len(pits)) * d)
