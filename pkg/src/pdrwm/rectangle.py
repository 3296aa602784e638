"""Exact planar geometry for the narrowing-rectangle target.

The staircase target lives on stacked rectangles that shrink by a factor
of three per level.  With uniform shape proposals (a unit disc, or the
level-adapted ellipse) every acceptance probability is a density ratio
times an area, so rejection probabilities and hemisphere overlaps have
exact values by one-dimensional quadrature over chord lengths.  This
module computes those values to quadrature accuracy; it is the
ground-truth side against which the Monte Carlo probes are reconciled.

All areas integrate the horizontal chord of the shape clipped to the
rectangle widths, with explicit breakpoints where the clipping switches
on or off so the adaptive quadrature never straddles a kink.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import NumericError, ParameterError, SupportError
from .targets import RectangleDensity, make_rectangle

__all__ = [
    "LevelRectangle",
    "chord_overlap_integral",
    "overlap_area",
    "exact_rejection_disc",
    "disc_rejection_lower_bound",
    "disc_rejection_area_bound",
    "HemisphereOverlap",
    "hemisphere_overlap_check",
    "crosses_level_boundary",
    "HemisphereSweepRow",
    "hemisphere_sweep",
]

#: quadrature must certify at least this absolute accuracy per area
_AREA_TOL = 1e-8


@dataclass(frozen=True)
class LevelRectangle:
    """Level ``k`` of the staircase support: ``[k, k+1) x [-w, w]``
    with half-width ``w = 3**(1-k)`` and density weight ``3**(-k)``."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError(f"levels start at 1, got {self.k}")

    @property
    def half_width(self) -> float:
        return 3.0 ** (1 - self.k)

    @property
    def density_weight(self) -> float:
        return 3.0 ** (-self.k)

    @property
    def y_lo(self) -> float:
        return float(self.k)

    @property
    def y_hi(self) -> float:
        return float(self.k + 1)


def chord_overlap_integral(
    c1: float,
    c2: float,
    semi_width: float,
    semi_height: float,
    window_half_width: float,
    y_lo: float,
    y_hi: float,
) -> float:
    """Area of an axis-aligned ellipse slice clipped to a vertical strip.

    The ellipse is centered at ``(c1, c2)`` with the given semi-axes; the
    area integrates its horizontal chord over ``[y_lo, y_hi]`` after
    clipping to ``|x| <= window_half_width``.  Raises if the quadrature
    cannot certify eight decimals.
    """
    if semi_width <= 0 or semi_height <= 0:
        raise ParameterError("semi-axes must be positive")
    if window_half_width <= 0:
        raise ParameterError("window half-width must be positive")
    lo = max(y_lo, c2 - semi_height)
    hi = min(y_hi, c2 + semi_height)
    if hi <= lo:
        return 0.0

    w = window_half_width

    def chord(y: float) -> float:
        u = (y - c2) / semi_height
        s = semi_width * math.sqrt(max(0.0, 1.0 - u * u))
        return max(0.0, min(c1 + s, w) - max(c1 - s, -w))

    # clipping switches where the chord endpoints cross the strip edges
    points = []
    for t in (w - c1, w + c1):
        if 0.0 < t < semi_width:
            r = semi_height * math.sqrt(1.0 - (t / semi_width) ** 2)
            for y in (c2 - r, c2 + r):
                if lo < y < hi:
                    points.append(y)

    val, abserr = quad(
        chord, lo, hi, points=sorted(points), limit=200, epsabs=1e-12, epsrel=1e-10
    )
    if abserr > _AREA_TOL:
        raise NumericError(
            f"chord quadrature only reached abserr {abserr:g} on [{lo:g}, {hi:g}]"
        )
    return float(val)


def overlap_area(
    center: Sequence[float],
    level: int,
    semi_width: float = 1.0,
    semi_height: float = 1.0,
) -> float:
    """Area of the ellipse (default: unit disc) at ``center`` inside the
    level-``level`` rectangle of the staircase support."""
    rect = LevelRectangle(level)
    c1, c2 = float(center[0]), float(center[1])
    return chord_overlap_integral(
        c1, c2, semi_width, semi_height, rect.half_width, rect.y_lo, rect.y_hi
    )


def _levels_touching(c2: float, semi_height: float = 1.0) -> range:
    lo = max(1, math.floor(c2 - semi_height))
    hi = math.floor(c2 + semi_height)
    return range(lo, hi + 1)


def exact_rejection_disc(x: Sequence[float]) -> float:
    """Exact rejection probability of the unit-disc proposal at ``x``.

    A proposal into level ``m`` from a point in level ``k`` is accepted
    with probability ``min(1, 3**(k-m))`` (the density ratio), so the
    accepted mass is a weighted sum of per-level overlap areas over pi.
    ``x`` must lie in the staircase support.
    """
    xv = np.asarray(x, dtype=float).ravel()
    if xv.shape != (2,):
        raise ParameterError(f"expected a planar point, got shape {xv.shape}")
    if not _RECT.support_test(xv):
        raise SupportError(f"{xv} is outside the staircase support")
    k = RectangleDensity.level(xv)
    accepted = 0.0
    for m in _levels_touching(float(xv[1])):
        area = overlap_area(xv, m)
        if area > 0.0:
            accepted += min(1.0, 3.0 ** (k - m)) * area
    r = 1.0 - accepted / math.pi
    return min(1.0, max(0.0, r))


_RECT = make_rectangle()


def disc_rejection_lower_bound(p: int) -> float:
    """Reference lower-bound constant for rejection at the level-p center.

        1 - (3**(2-p) + 3**(1-p)) / pi

    This constant bounds the accepted mass by the *half*-widths of the
    two levels the unit disc at ``(0, p)`` can reach, one width unit per
    level.  The full rectangle areas are twice that, which is what
    :func:`disc_rejection_area_bound` uses; the exact rejection from
    :func:`exact_rejection_disc` always dominates the area bound but sits
    below this tighter constant at small ``p``.  It is kept as the
    published comparison value for the acceptance checks.
    """
    if p < 3:
        raise ParameterError(f"the bound is stated for levels p >= 3, got {p}")
    return 1.0 - (3.0 ** (2 - p) + 3.0 ** (1 - p)) / math.pi


def disc_rejection_area_bound(p: int) -> float:
    """Provable bound: accepted mass at ``(0, p)`` is at most the full
    area ``2 * 3**(2-p) + 2 * 3**(1-p)`` of the two reachable levels,
    so rejection is at least one minus that over pi."""
    if p < 3:
        raise ParameterError(f"the bound is stated for levels p >= 3, got {p}")
    return 1.0 - 2.0 * (3.0 ** (2 - p) + 3.0 ** (1 - p)) / math.pi


class HemisphereOverlap(NamedTuple):
    lower: float
    upper: float
    passes: bool


def crosses_level_boundary(x: Sequence[float]) -> bool:
    """Whether the level-adapted ellipse at ``x`` pokes into the next
    level's rectangle with positive area.

    With ``frac`` the height of ``x`` above its level floor and ``w`` the
    level half-width, the ellipse reaches the boundary plane iff
    ``frac > 0``, and its chord there must overlap the narrower upper
    rectangle: ``|x1| < w * sqrt(1 - (1-frac)^2) + w/3``.  Points passing
    this test are exactly the ones where the lower hemisphere overlap is
    strictly larger than the upper one.
    """
    xv = np.asarray(x, dtype=float).ravel()
    k = math.floor(xv[1])
    frac = float(xv[1]) - k
    if frac <= 0.0:
        return False
    w = 3.0 ** (1 - k)
    reach = w * math.sqrt(1.0 - (1.0 - frac) ** 2)
    return abs(float(xv[0])) < reach + w / 3.0


def hemisphere_overlap_check(x: Sequence[float]) -> HemisphereOverlap:
    """Support overlap of the two hemispheres of the ellipse proposal.

    For ``x`` in level ``k >= 2`` the proposal ellipse has semi-axes
    ``(3**(1-k), 1)``.  The move-down hemisphere only ever meets levels
    ``k`` and the wider ``k-1``, while the move-up hemisphere is clipped
    by the narrower level ``k+1``; ``lower >= upper`` therefore always,
    and strictly when the ellipse actually crosses into level ``k+1``
    (see :func:`crosses_level_boundary`).  ``passes`` records the strict
    comparison.
    """
    xv = np.asarray(x, dtype=float).ravel()
    if xv.shape != (2,):
        raise ParameterError(f"expected a planar point, got shape {xv.shape}")
    if not _RECT.support_test(xv):
        raise SupportError(f"{xv} is outside the staircase support")
    k = RectangleDensity.level(xv)
    if k < 2:
        raise ParameterError(
            "hemisphere comparison needs a level k >= 2 start (the level-1 "
            "rectangle has nothing wider below it)"
        )
    c1, c2 = float(xv[0]), float(xv[1])
    w = 3.0 ** (1 - k)

    def hemisphere(y_lo: float, y_hi: float) -> float:
        total = 0.0
        for m in _levels_touching(c2):
            rect = LevelRectangle(m)
            seg_lo = max(y_lo, rect.y_lo)
            seg_hi = min(y_hi, rect.y_hi)
            if seg_hi > seg_lo:
                total += chord_overlap_integral(
                    c1, c2, w, 1.0, rect.half_width, seg_lo, seg_hi
                )
        return total

    lower = hemisphere(c2 - 1.0, c2)
    upper = hemisphere(c2, c2 + 1.0)
    return HemisphereOverlap(lower, upper, lower > upper)


class HemisphereSweepRow(NamedTuple):
    k: int
    x1: float
    x2: float
    lower_overlap: float
    upper_overlap: float
    passes: bool


def hemisphere_sweep(
    levels: Sequence[int] = tuple(range(2, 13)),
    height_fracs: Sequence[float] = (0.2, 0.35, 0.5, 0.65, 0.8),
    x1_fracs: Sequence[float] = (-0.8, -0.4, 0.0, 0.4, 0.8),
) -> list[HemisphereSweepRow]:
    """Hemisphere comparison on a grid of boundary-crossing starts.

    The default grid takes eleven levels, five heights within each level
    and five horizontal positions as fractions of the level half-width,
    275 points in all, every one of which crosses its upper level
    boundary, so ``passes`` is expected to hold at each row.
    """
    rows = []
    for k in levels:
        w = 3.0 ** (1 - k)
        for frac in height_fracs:
            if not 0.0 < frac < 1.0:
                raise ParameterError(f"height fractions must lie in (0,1), got {frac}")
            for xf in x1_fracs:
                if not -1.0 < xf < 1.0:
                    raise ParameterError(
                        f"x1 fractions must lie in (-1,1), got {xf}"
                    )
                x = (xf * w, k + frac)
                if not crosses_level_boundary(x):
                    raise ParameterError(
                        f"sweep point {x} does not cross its level boundary; "
                        "widen the height fractions"
                    )
                res = hemisphere_overlap_check(x)
                rows.append(
                    HemisphereSweepRow(
                        int(k), x[0], x[1], res.lower, res.upper, res.passes
                    )
                )
    return rows
