"""Unnormalized target densities with tail metadata.

Every factory here returns an immutable :class:`TargetDensity` carrying a
log-density, a support test, and a :class:`TailClass` tag that the
diagnostics and oracle modules key their expectations on.  Densities are
unnormalized throughout; all Metropolis quantities depend only on ratios.

Points are 1-D numpy arrays of length ``dim``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParameterError

__all__ = [
    "TailClass",
    "log_concave",
    "subexponential",
    "polynomial",
    "COMPACT",
    "OTHER",
    "TargetDensity",
    "RectangleDensity",
    "make_exponential_tail",
    "make_subexponential_tail",
    "make_polynomial_tail",
    "make_gaussian",
    "make_ridge_2d",
    "make_rectangle",
    "get_target",
]


@dataclass(frozen=True)
class TailClass:
    """Tail-behaviour tag for a one-dimensional density.

    ``kind`` is one of ``"log_concave"`` (ratio bound e^{-a(y-x)} in the
    tails, parameter ``rate``), ``"subexponential"`` (ratio bound
    e^{-a(y^beta - x^beta)}, parameters ``rate`` and ``exponent``),
    ``"polynomial"`` (decay |x|^{-p}, parameter ``power``), ``"compact"``,
    or ``"other"``.
    """

    kind: str
    rate: float | None = None
    exponent: float | None = None
    power: float | None = None


def log_concave(a: float) -> TailClass:
    return TailClass("log_concave", rate=float(a))


def subexponential(a: float, beta: float) -> TailClass:
    return TailClass("subexponential", rate=float(a), exponent=float(beta))


def polynomial(p: float) -> TailClass:
    return TailClass("polynomial", power=float(p))


COMPACT = TailClass("compact")
OTHER = TailClass("other")


@dataclass(frozen=True)
class TargetDensity:
    """An unnormalized target distribution.

    Attributes
    ----------
    dim : int
        Dimension of the state space.
    log_density : callable
        Maps a length-``dim`` point to a float, ``-inf`` off support.
    tail_class : TailClass
        Metadata describing the tail regime.
    support_test : callable
        Maps a point to ``True`` iff the density is positive there.
    label : str
        Short human-readable identifier, used in config digests.
    """

    dim: int
    log_density: Callable[[np.ndarray], float]
    tail_class: TailClass
    support_test: Callable[[np.ndarray], bool]
    label: str


@dataclass(frozen=True)
class RectangleDensity(TargetDensity):
    """Piecewise-constant staircase density on narrowing rectangles.

    Support is ``{y : y2 >= 1, |y1| <= 3**(1 - floor(y2))}``.  Level ``k``
    occupies ``k <= y2 < k+1`` with unnormalized density ``3**(-k)``, so
    each level is a third the width and a third the height (in density) of
    the one below.  Total unnormalized mass is ``sum_k 3**(-k) * 2*3**(1-k)
    = 3/4``.
    """

    #: closed form of the geometric series of level masses
    total_mass: float = 0.75

    @staticmethod
    def level(y: np.ndarray) -> int:
        """Level index of a support point (floor of the height)."""
        return int(math.floor(y[1]))

    @staticmethod
    def half_width(k: int) -> float:
        """Horizontal half-extent of level ``k``."""
        return 3.0 ** (1 - k)


def _always(_: np.ndarray) -> bool:
    return True


def make_exponential_tail(a: float) -> TargetDensity:
    """Density with log pi(x) = -a|x| on the line.

    Log-concave in the tails with rate ``a``; the reference case for the
    drift analysis under sub-quadratic variance growth.
    """
    if not a > 0:
        raise ParameterError(f"decay rate must be positive, got {a}")
    a = float(a)

    def logp(x: np.ndarray) -> float:
        return -a * abs(float(x[0]))

    return TargetDensity(1, logp, log_concave(a), _always, f"exp_tail(a={a:g})")


def make_subexponential_tail(a: float, beta: float) -> TargetDensity:
    """Density with log pi(x) = -a|x|^beta, beta in (0,1).

    Tails heavier than any exponential but lighter than polynomial.
    """
    if not a > 0:
        raise ParameterError(f"decay rate must be positive, got {a}")
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"tail exponent must lie in (0,1), got {beta}")
    a, beta = float(a), float(beta)

    def logp(x: np.ndarray) -> float:
        return -a * abs(float(x[0])) ** beta

    return TargetDensity(
        1, logp, subexponential(a, beta), _always, f"subexp_tail(a={a:g},beta={beta:g})"
    )


def make_polynomial_tail(p: float) -> TargetDensity:
    """Density with log pi(x) = -p*log(1+|x|).

    Smooth at the origin and exactly |x|^{-p} in the tails; a piecewise
    splice point is avoided on purpose.  Requires p >= 1.
    """
    if not p >= 1:
        raise ParameterError(f"tail power must be >= 1, got {p}")
    p = float(p)

    def logp(x: np.ndarray) -> float:
        return -p * math.log1p(abs(float(x[0])))

    return TargetDensity(1, logp, polynomial(p), _always, f"poly_tail(p={p:g})")


def make_gaussian(sigma: float = 1.0) -> TargetDensity:
    """Unnormalized Gaussian, log pi(x) = -x^2 / (2 sigma^2).

    Used by the step-size scans and as the textbook case for the
    reciprocal-density covariance field.
    """
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    s2 = float(sigma) ** 2

    def logp(x: np.ndarray) -> float:
        v = float(x[0])
        return -0.5 * v * v / s2

    return TargetDensity(1, logp, OTHER, _always, f"gaussian(sigma={sigma:g})")


def make_ridge_2d() -> TargetDensity:
    """Two-dimensional ridge: log pi(x,y) = -x^2 - y^2 - x^2 y^2.

    Mass concentrates along the coordinate axes in two narrowing arms,
    so a sensible proposal covariance varies strongly with position.
    """

    def logp(x: np.ndarray) -> float:
        u, v = float(x[0]), float(x[1])
        return -u * u - v * v - u * u * v * v

    return TargetDensity(2, logp, OTHER, _always, "ridge_2d")


_LOG3 = math.log(3.0)


def make_rectangle() -> RectangleDensity:
    """Staircase density on narrowing stacked rectangles.

    See :class:`RectangleDensity` for the geometry. log-density inside
    level ``k`` is ``-k*log(3)``; ``-inf`` outside the support.
    """

    def in_support(y: np.ndarray) -> bool:
        y2 = float(y[1])
        if y2 < 1.0:
            return False
        k = math.floor(y2)
        return abs(float(y[0])) <= 3.0 ** (1 - k)

    def logp(y: np.ndarray) -> float:
        if not in_support(y):
            return -math.inf
        return -math.floor(float(y[1])) * _LOG3

    return RectangleDensity(2, logp, OTHER, in_support, "rectangle_staircase")


def get_target(name: str, **params) -> TargetDensity:
    """Look up a density family by name; used by the experiment configs."""
    factories = {
        "exponential": make_exponential_tail,
        "subexponential": make_subexponential_tail,
        "polynomial": make_polynomial_tail,
        "gaussian": make_gaussian,
        "ridge": make_ridge_2d,
        "rectangle": make_rectangle,
    }
    if name not in factories:
        raise ParameterError(
            f"unknown target family {name!r}; choose from {sorted(factories)}"
        )
    return factories[name](**params)
