"""Closed-form predictors for minima of many Gaussian cost samples.

Everything here is elementary arithmetic on distribution parameters: given a
Gaussian base distribution and a sample budget m, a Laplace (saddle-point)
approximation places the minimum of m draws at the mode of the exact
min-density and matches the curvature there.  All logarithms are natural.

The asymptotics break down when the budget is too small for the saddle point
to exist; those inputs raise :class:`AsymptoticsError` instead of silently
clamping.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, erfc, exp, log, pi, sqrt

import numpy as np

__all__ = [
    "NumericDomainError",
    "AsymptoticsError",
    "GaussianSpec",
    "TheoryParams",
    "MixturePrediction",
    "normal_cdf",
    "min_distribution",
    "required_iterations",
    "global_min_estimate",
    "schema_strength",
    "theory_params",
    "offspring_distribution",
    "offspring_min_distribution",
    "predicted_offspring_variance",
    "mixture_prediction",
]


class NumericDomainError(ValueError):
    """An input lies outside the mathematical domain of a predictor."""


class AsymptoticsError(NumericDomainError):
    """The large-m asymptotics behind a predictor are invalid for this input."""


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the (correctly rounded) stdlib erfc."""
    return 0.5 * erfc(-x / sqrt(2.0))


@dataclass(frozen=True)
class GaussianSpec:
    """A Gaussian distribution given by mean and variance."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise NumericDomainError(f"variance must be >= 0, got {self.variance}")

    @property
    def std(self) -> float:
        return sqrt(self.variance)


def min_distribution(base: GaussianSpec, m: int, form: str = "exact") -> GaussianSpec:
    """Distribution of the minimum of m draws from ``base``.

    ``form="exact"`` keeps the full saddle-point expression

        mean     mu - sigma * sqrt(L),   L = log(m^2 / (2 pi log(m^2 sigma^2)))
        variance sigma^2 / (L - 1)

    while ``form="approximate"`` keeps only the leading order,
    mu - sigma*sqrt(2 log m) and sigma^2 / (2 log m).
    """
    if m < 2:
        raise NumericDomainError(f"need m >= 2 draws, got {m}")
    if base.variance == 0:
        raise NumericDomainError("base distribution must have positive variance")
    mu, var = base.mean, base.variance
    sigma = base.std
    if form == "approximate":
        two_log_m = 2.0 * log(m)
        return GaussianSpec(mu - sigma * sqrt(two_log_m), var / two_log_m)
    if form != "exact":
        raise ValueError(f"form must be 'exact' or 'approximate', got {form!r}")
    inner = log(float(m) * m * var)
    if inner <= 0.0:
        raise AsymptoticsError(
            f"asymptotics invalid: log(m^2 * variance) = {inner:.3g} <= 0"
        )
    arg = float(m) * m / (2.0 * pi * inner)
    if arg <= math.e:
        raise AsymptoticsError(
            f"asymptotics invalid: m^2/(2 pi log(m^2 variance)) = {arg:.3g} <= e"
        )
    big_l = log(arg)
    return GaussianSpec(mu - sigma * sqrt(big_l), var / (big_l - 1.0))


def required_iterations(target: float, base: GaussianSpec) -> float:
    """Samples needed before the running minimum typically reaches ``target``.

    Inverts the saddle-point condition m * density(target) = -(target - mu)/var:

        m = sqrt(2 pi z^2) * exp(z^2 / 2),   z = (target - mu) / sigma.
    """
    if base.variance == 0:
        raise NumericDomainError("base distribution must have positive variance")
    if target >= base.mean:
        raise NumericDomainError(
            f"target {target} must lie below the mean {base.mean}"
        )
    z2 = (target - base.mean) ** 2 / base.variance
    try:
        return sqrt(2.0 * pi * z2) * exp(z2 / 2.0)
    except OverflowError:
        return float("inf")


def global_min_estimate(n_dims: int) -> float:
    """Expected global minimum over all 2^N states of a normalized instance."""
    if n_dims < 1:
        raise NumericDomainError(f"n_dims must be >= 1, got {n_dims}")
    return -sqrt(2.0 * n_dims * log(2.0))


# ---------------------------------------------------------------------------
# crossover offspring


def schema_strength(n_dims: int, order_variance: np.ndarray) -> float:
    """Variance weight debited to terms confined to one half of the coordinates.

    For parents that agree on half the positions, this is the share of cost
    variance their offspring inherit deterministically:
    sum_{beta=1..floor(N/2)} C(floor(N/2), beta) * order_variance[beta-1].
    """
    var = np.asarray(order_variance, dtype=np.float64)
    if var.shape != (n_dims,):
        raise ValueError(f"order_variance must have length {n_dims}, got {var.shape}")
    norm = sum(comb(n_dims, a) * var[a - 1] for a in range(1, n_dims + 1))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"order variances must normalize to 1, got {norm!r}")
    half = n_dims // 2
    return float(sum(comb(half, b) * var[b - 1] for b in range(1, half + 1)))


@dataclass(frozen=True)
class TheoryParams:
    """Derived constants describing two-parent crossover on one instance class.

    ``gain`` is the squared improvement factor of crossover over blind
    sampling; ``cost_base`` = 2**(1/gain) < 2 is the per-dimension base of the
    predicted total search cost 3 * cost_base**N.
    """

    schema_strength: float
    gain: float
    cost_base: float
    n_differing: int

    @classmethod
    def from_strength(cls, strength: float, n_differing: int) -> "TheoryParams":
        if not 0.0 <= strength <= 1.0:
            raise NumericDomainError(
                f"schema strength must lie in [0, 1], got {strength}"
            )
        gain = (2.0 * strength + sqrt(1.0 - strength)) ** 2
        return cls(strength, gain, 2.0 ** (1.0 / gain), n_differing)

    def predicted_total_cost(self, n_dims: int) -> float:
        """Budget at which crossover is predicted to reach the global minimum."""
        return 3.0 * self.cost_base**n_dims


def theory_params(n_dims: int, order_variance: np.ndarray) -> TheoryParams:
    """Crossover constants for instances with the given order variances."""
    return TheoryParams.from_strength(
        schema_strength(n_dims, order_variance), n_dims // 2
    )


def _pool_log(m: int) -> float:
    """log(m^2 / (2 pi log m^2)), the repeated budget factor of the offspring forms."""
    if m < 2:
        raise NumericDomainError(f"need pool size m >= 2, got {m}")
    arg = float(m) * m / (2.0 * pi * log(float(m) * m))
    if arg <= 1.0:
        raise AsymptoticsError(f"asymptotics invalid: m^2/(2 pi log m^2) = {arg:.3g} <= 1")
    return log(arg)


def offspring_distribution(params: TheoryParams, m: int) -> GaussianSpec:
    """Cost distribution of offspring of two pool-of-m minimizers.

    The parents' shared structure contributes the mean -2*eta*sqrt(L) with
    eta the schema strength and L = log(m^2/(2 pi log m^2)); what they differ
    on stays random, leaving variance 1 - eta.
    """
    big_l = _pool_log(m)
    eta = params.schema_strength
    return GaussianSpec(-2.0 * eta * sqrt(big_l), 1.0 - eta)


def offspring_min_distribution(params: TheoryParams, m: int) -> GaussianSpec:
    """Distribution of the best of m offspring (pools of m parents each)."""
    big_l = _pool_log(m)
    if big_l <= 1.0:
        raise AsymptoticsError(
            f"asymptotics invalid: log(m^2/(2 pi log m^2)) = {big_l:.3g} <= 1"
        )
    eta = params.schema_strength
    mean = -(2.0 * eta + sqrt(1.0 - eta)) * sqrt(big_l)
    return GaussianSpec(mean, (1.0 - eta) / (big_l - 1.0))


def predicted_offspring_variance(
    n_dims: int, n_differing: int, order_variance: np.ndarray
) -> float:
    """Offspring cost variance when parents agree on n_dims - n_differing positions.

    The terms confined to the agreeing positions are frozen; everything else
    keeps unit-normalized variance: 1 - sum_{beta} C(N-d, beta) * sigma_beta^2.
    """
    if not 0 <= n_differing <= n_dims:
        raise NumericDomainError(
            f"need 0 <= n_differing <= {n_dims}, got {n_differing}"
        )
    var = np.asarray(order_variance, dtype=np.float64)
    if var.shape != (n_dims,):
        raise ValueError(f"order_variance must have length {n_dims}, got {var.shape}")
    fixed = n_dims - n_differing
    return 1.0 - float(sum(comb(fixed, b) * var[b - 1] for b in range(1, fixed + 1)))


# ---------------------------------------------------------------------------
# many-parent mixtures


@dataclass(frozen=True)
class MixturePrediction:
    """Offspring statistics for independent per-position (mean-field) mixing."""

    offspring_mean: float
    offspring_variance: float
    min_estimate: float


def mixture_prediction(mixture_mean: float, m: int) -> MixturePrediction:
    """Best of m offspring drawn independently per position.

    ``mixture_mean`` is the expected offspring cost R (the multilinear
    extension of the instance at the parents' coordinatewise mean); offspring
    variance is 1 - R^2, and the best of m draws sits near
    R - sqrt((1 - R^2) * 2 log m), which is bounded below by
    -sqrt(1 + 2 log m) whatever R is.
    """
    if abs(mixture_mean) > 1.0 + 1e-12:
        raise NumericDomainError(
            f"mixture mean must lie in [-1, 1], got {mixture_mean}"
        )
    if m < 2:
        raise NumericDomainError(f"need m >= 2 draws, got {m}")
    r = min(1.0, max(-1.0, mixture_mean))
    variance = 1.0 - r * r
    return MixturePrediction(r, variance, r - sqrt(variance * 2.0 * log(m)))
