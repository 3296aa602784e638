"""Proposal kernels and truncated-Gaussian helpers.

The central kernel is the position-dependent Gaussian random walk built
from a covariance field: from ``x`` it proposes ``y ~ N(x, h * S(x))``.
Two uniform kernels over moving planar shapes (a unit disc and a
level-dependent ellipse) support the narrowing-rectangle analysis, where
acceptance probabilities reduce to area ratios.

Argument order convention: ``log_q(y, x)`` is the log density at ``y`` of
the proposal launched from ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.special import log_ndtr

from .errors import NumericError, ParameterError
from .fields import CovarianceField

__all__ = [
    "ProposalKernel",
    "gaussian_proposal",
    "circle_proposal",
    "ellipse_proposal",
    "ellipse_semi_width",
    "TruncatedGaussianSpec",
    "truncated_mean",
    "truncated_mgf",
    "gaussian_tail_bound",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ProposalKernel:
    """A Markov proposal mechanism with evaluable density.

    Attributes
    ----------
    dim : int
        State dimension.
    sample : callable
        ``sample(x, rng)`` draws one proposal from ``x``.
    log_q : callable
        ``log_q(y, x)`` is the log proposal density at ``y`` given start
        ``x``; ``-inf`` where the proposal cannot reach.
    label : str
        Identifier used in config digests.
    sample_batch : callable, optional
        ``sample_batch(x, n, rng)`` draws ``n`` proposals from the same
        start as an ``(n, dim)`` array, consuming the stream exactly as
        ``n`` single draws would not necessarily match; batch users only
        need identical distribution, not identical draws.
    """

    dim: int
    sample: Callable[[np.ndarray, np.random.Generator], np.ndarray]
    log_q: Callable[[np.ndarray, np.ndarray], float]
    label: str
    sample_batch: Optional[
        Callable[[np.ndarray, int, np.random.Generator], np.ndarray]
    ] = None


def gaussian_proposal(field: CovarianceField, h: float) -> ProposalKernel:
    """Random walk with position-dependent covariance ``h * S(x)``.

    One-dimensional fields use a scalar fast path; higher dimensions go
    through a Cholesky factor per evaluation.  A field value that fails
    to factor raises :class:`NumericError` naming the point.
    """
    if not h > 0:
        raise ParameterError(f"step size must be positive, got {h}")
    h = float(h)
    dim = field.dim
    inv_metric = field.inv_metric

    if dim == 1:

        def _std(x: np.ndarray) -> float:
            g = float(inv_metric(x)[0, 0])
            if not g > 0 or not math.isfinite(g):
                raise NumericError(f"field value {g:g} at {x} is not usable")
            return math.sqrt(h * g)

        def sample(x, rng):
            return x + _std(x) * rng.standard_normal(1)

        def log_q(y, x):
            s = _std(x)
            u = (float(y[0]) - float(x[0])) / s
            return -0.5 * _LOG_2PI - math.log(s) - 0.5 * u * u

        def sample_batch(x, n, rng):
            return x[None, :] + _std(x) * rng.standard_normal((n, 1))

    else:

        def _chol(x: np.ndarray) -> np.ndarray:
            m = inv_metric(x)
            try:
                return cholesky(h * m, lower=True)
            except np.linalg.LinAlgError as exc:
                raise NumericError(f"covariance at {x} failed to factor") from exc

        def sample(x, rng):
            return x + _chol(x) @ rng.standard_normal(dim)

        def log_q(y, x):
            low = _chol(x)
            v = solve_triangular(low, y - x, lower=True)
            logdet = 2.0 * float(np.sum(np.log(np.diag(low))))
            return -0.5 * (dim * _LOG_2PI + logdet + float(v @ v))

        def sample_batch(x, n, rng):
            return x[None, :] + rng.standard_normal((n, dim)) @ _chol(x).T

    return ProposalKernel(
        dim, sample, log_q, f"gaussian(h={h:g},{field.label})", sample_batch
    )


def _disc_offsets(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on the unit disc, shape (n, 2)."""
    r = np.sqrt(rng.random(n))
    theta = 2.0 * math.pi * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def circle_proposal() -> ProposalKernel:
    """Uniform proposal on the unit disc centered at the current point."""
    log_density = -math.log(math.pi)

    def sample(x, rng):
        return x + _disc_offsets(1, rng)[0]

    def log_q(y, x):
        d = y - x
        return log_density if float(d @ d) <= 1.0 else -math.inf

    def sample_batch(x, n, rng):
        return x[None, :] + _disc_offsets(n, rng)

    return ProposalKernel(2, sample, log_q, "uniform_disc", sample_batch)


def ellipse_semi_width(x2: float) -> float:
    """Horizontal semi-axis of the level-adapted ellipse at height ``x2``.

    Equal to the half-width of the rectangle level below the point:
    ``3**(1 - floor(x2))``.  At level one this is 3; the ellipse proposal
    clips it to 1 so the shape reduces to the unit disc there.
    """
    return 3.0 ** (1 - math.floor(x2))


def ellipse_proposal() -> ProposalKernel:
    """Uniform proposal on an axis-aligned ellipse that narrows with height.

    Semi-axes are ``(min(w, 1), 1)`` with ``w = ellipse_semi_width(x2)``,
    so the shape tracks the rectangle level containing the start point and
    degenerates to the unit disc at the lowest level.  Because ``w``
    depends on the start, the density ratio between forward and reverse
    moves is the area ratio of the two ellipses.
    """

    def _w(x: np.ndarray) -> float:
        return min(ellipse_semi_width(float(x[1])), 1.0)

    def sample(x, rng):
        off = _disc_offsets(1, rng)[0]
        off[0] *= _w(x)
        return x + off

    def log_q(y, x):
        w = _w(x)
        du = (float(y[0]) - float(x[0])) / w
        dv = float(y[1]) - float(x[1])
        if du * du + dv * dv <= 1.0:
            return -math.log(math.pi * w)
        return -math.inf

    def sample_batch(x, n, rng):
        off = _disc_offsets(n, rng)
        off[:, 0] *= _w(x)
        return x[None, :] + off

    return ProposalKernel(2, sample, log_q, "uniform_ellipse", sample_batch)


# --- truncated Gaussian helpers -------------------------------------------


def _log_gauss_mass(alpha: float, beta: float) -> float:
    """log(Phi(beta) - Phi(alpha)) without cancellation, alpha < beta."""
    if beta < 0.0:
        return _log_gauss_mass(-beta, -alpha)
    if alpha > 0.0:
        # both standardized limits positive: work with upper tails
        la = log_ndtr(-alpha)
        lb = log_ndtr(-beta)  # -inf when beta is inf
        diff = -math.expm1(lb - la) if lb > -math.inf else 1.0
        if diff <= 0.0:
            raise NumericError(
                f"interval [{alpha:g}, {beta:g}] has no representable mass"
            )
        return la + math.log(diff)
    # limits straddle zero: the mass is order one, direct difference is fine
    from scipy.special import ndtr

    mass = float(ndtr(beta) - ndtr(alpha))
    if mass <= 0.0:
        raise NumericError(
            f"interval [{alpha:g}, {beta:g}] has no representable mass"
        )
    return math.log(mass)


@dataclass(frozen=True)
class TruncatedGaussianSpec:
    """A Gaussian N(mu, sigma^2) conditioned to the interval [a, b].

    Infinite endpoints recover one-sided or no truncation.  Intervals so
    far into a tail that their mass underflows the log-domain computation
    are rejected at construction.
    """

    mu: float
    sigma: float
    a: float = -math.inf
    b: float = math.inf

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if not self.a < self.b:
            raise ParameterError(
                f"need a < b, got a={self.a:g}, b={self.b:g}"
            )
        if self.log_mass < -690.0:
            raise ParameterError(
                f"interval [{self.a:g}, {self.b:g}] mass underflows"
            )

    @property
    def alpha(self) -> float:
        return (self.a - self.mu) / self.sigma

    @property
    def beta(self) -> float:
        return (self.b - self.mu) / self.sigma

    @property
    def log_mass(self) -> float:
        """Log of the Gaussian mass of the truncation interval."""
        return _log_gauss_mass(self.alpha, self.beta)


def _log_phi(t: float) -> float:
    if math.isinf(t):
        return -math.inf
    return -0.5 * (t * t + _LOG_2PI)


def truncated_mean(spec: TruncatedGaussianSpec) -> float:
    """Mean of the truncated Gaussian, computed in the log domain.

    mu + sigma * (phi(alpha) - phi(beta)) / Z with the ratio assembled
    from logs so one-sided far truncations stay accurate.
    """
    log_z = spec.log_mass
    la, lb = _log_phi(spec.alpha), _log_phi(spec.beta)
    term_a = math.exp(la - log_z) if la > -math.inf else 0.0
    term_b = math.exp(lb - log_z) if lb > -math.inf else 0.0
    return spec.mu + spec.sigma * (term_a - term_b)


def truncated_mgf(spec: TruncatedGaussianSpec, t: float) -> float:
    """Moment generating function E[e^{tX}] of the truncated Gaussian.

    Exponential tilting shifts the standardized limits by ``sigma * t``:
    the result is exp(mu t + sigma^2 t^2 / 2) times the ratio of tilted
    to untilted interval masses.
    """
    t = float(t)
    shift = spec.sigma * t
    log_tilted = _log_gauss_mass(spec.alpha - shift, spec.beta - shift)
    log_val = spec.mu * t + 0.5 * shift * shift + log_tilted - spec.log_mass
    return math.exp(log_val)


def gaussian_tail_bound(x: float) -> float:
    """Upper bound exp(-x^2/2) / (x sqrt(2 pi)) on the standard normal
    upper tail, valid and tight for large positive ``x``."""
    if not x > 0:
        raise ParameterError(f"tail bound needs x > 0, got {x}")
    return math.exp(-0.5 * x * x) / (x * math.sqrt(2.0 * math.pi))
