"""Monte Carlo diagnostics for geometric ergodicity.

Drift of a Lyapunov function, tail rejection probabilities, the mass of
the good acceptance set, deterministic tail acceptance profiles, and
expected squared jumping distance scans.  Everything here is a frozen
function of its seed: probes at different positions reuse the same seed
so curves over position are common-random-number smooth.

The probes estimate one-step integrals under the proposal, not ergodic
averages, so their standard errors are iid Monte Carlo errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .chain import log_accept_ratio, log_accept_ratio_closed_form, run_chain
from .errors import NumericError, ParameterError
from .fields import CovarianceField, power_field
from .proposals import ProposalKernel, gaussian_proposal
from .targets import TargetDensity

__all__ = [
    "LyapunovFunction",
    "exp_abs",
    "exp_abs_pow",
    "abs_pow",
    "rectangle_v",
    "DriftResult",
    "ProbeEstimate",
    "drift_ratio",
    "rejection_probability",
    "acceptance_set_mass",
    "ProfilePoint",
    "tail_acceptance_profile",
    "EsjdPoint",
    "esjd_scan",
    "tune_step_size",
    "DiagnosticReport",
]

#: cap on the one-sample Lyapunov ratio V(y)/V(x) inside the drift probe
V_RATIO_CAP = 1e15
_LOG_CAP = math.log(V_RATIO_CAP)


@dataclass(frozen=True)
class LyapunovFunction:
    """A drift function V >= 1 with a log-domain evaluator.

    ``log_evaluate`` is the primary interface; ``evaluate`` exponentiates
    and returns ``inf`` past the float range, which is why every consumer
    in this package works with the logs.
    """

    label: str
    log_evaluate: Callable[[np.ndarray], float]

    def evaluate(self, x: np.ndarray) -> float:
        try:
            return math.exp(self.log_evaluate(x))
        except OverflowError:
            return math.inf


def exp_abs(s: float) -> LyapunovFunction:
    """V(x) = exp(s |x|).  The workhorse for exponential-tail targets;
    pick ``s`` below the target's decay rate."""
    if not s > 0:
        raise ParameterError(f"scale must be positive, got {s}")
    s = float(s)
    return LyapunovFunction(
        f"exp_abs(s={s:g})", lambda x: s * float(np.linalg.norm(x))
    )


def exp_abs_pow(s: float, beta: float) -> LyapunovFunction:
    """V(x) = exp(s |x|^beta) for subexponential tails, beta in (0, 1)."""
    if not s > 0:
        raise ParameterError(f"scale must be positive, got {s}")
    if not 0.0 < beta < 1.0:
        raise ParameterError(f"exponent must lie in (0,1), got {beta}")
    s, beta = float(s), float(beta)
    return LyapunovFunction(
        f"exp_abs_pow(s={s:g},beta={beta:g})",
        lambda x: s * float(np.linalg.norm(x)) ** beta,
    )


def abs_pow(s: float) -> LyapunovFunction:
    """V(x) = max(1, |x|^s) for polynomial-tail targets."""
    if not s > 0:
        raise ParameterError(f"power must be positive, got {s}")
    s = float(s)

    def logv(x: np.ndarray) -> float:
        r = float(np.linalg.norm(x))
        return max(0.0, s * math.log(r)) if r > 0 else 0.0

    return LyapunovFunction(f"abs_pow(s={s:g})", logv)


def rectangle_v() -> LyapunovFunction:
    """V(y) = |y2| + max(1, |y1|), tailored to the staircase target:
    it grows with height, which is the direction the chain must drift
    back down."""

    def logv(y: np.ndarray) -> float:
        return math.log(abs(float(y[1])) + max(1.0, abs(float(y[0]))))

    return LyapunovFunction("rectangle_v", logv)


class DriftResult(NamedTuple):
    estimate: float
    se: float
    truncated_mass: float


class ProbeEstimate(NamedTuple):
    estimate: float
    se: float


def _proposals(
    kernel: ProposalKernel, x: np.ndarray, n: int, rng: np.random.Generator
) -> np.ndarray:
    if kernel.sample_batch is not None:
        return kernel.sample_batch(x, n, rng)
    return np.stack([kernel.sample(x, rng) for _ in range(n)])


def _alphas(
    target: TargetDensity, kernel: ProposalKernel, x: np.ndarray, ys: np.ndarray
) -> np.ndarray:
    """Acceptance probability for each proposed point, zero off support."""
    out = np.empty(len(ys))
    for i, y in enumerate(ys):
        if target.support_test(y):
            out[i] = math.exp(log_accept_ratio(target, kernel, x, y))
        else:
            out[i] = 0.0
    return out


def drift_ratio(
    target: TargetDensity,
    kernel: ProposalKernel,
    lyapunov: LyapunovFunction,
    x,
    n: int = 100_000,
    seed: int = 0,
) -> DriftResult:
    """Monte Carlo estimate of E[V(X_1)] / V(x) for the chain started at x.

    Each proposal contributes ``alpha * V(y)/V(x) + (1 - alpha)``,
    assembled as ``exp(log alpha + log V(y) - log V(x))`` so huge ratios
    never pass through the linear domain.  Ratios above ``V_RATIO_CAP``
    are clipped and the clipped fraction reported as ``truncated_mass``;
    a nonzero value means the estimate is a lower bound, which for a
    drift *failure* diagnosis (ratio >= 1) is the conservative side.

    Values below 1 indicate contraction of V at x; a curve of these over
    growing |x| bounded away from 1 is the numerical fingerprint of a
    geometric drift condition.
    """
    if n < 1000:
        raise ParameterError(f"need n >= 1000 proposals, got {n}")
    x = np.asarray(x, dtype=float).ravel()
    log_vx = lyapunov.log_evaluate(x)
    if not math.isfinite(log_vx):
        raise ParameterError(f"V must be finite at the probe point, got {log_vx}")
    rng = np.random.default_rng(seed)
    ys = _proposals(kernel, x, n, rng)

    summands = np.empty(n)
    clipped = 0
    for i, y in enumerate(ys):
        if not target.support_test(y):
            summands[i] = 1.0  # certain rejection leaves V in place
            continue
        la = log_accept_ratio(target, kernel, x, y)
        dv = lyapunov.log_evaluate(y) - log_vx
        if dv > _LOG_CAP:
            clipped += 1
            dv = _LOG_CAP
        a = math.exp(la)
        summands[i] = (1.0 - a) + math.exp(la + dv)

    estimate = float(summands.mean())
    se = float(summands.std(ddof=1) / math.sqrt(n))
    return DriftResult(estimate, se, clipped / n)


def rejection_probability(
    target: TargetDensity,
    kernel: ProposalKernel,
    x,
    n: int = 100_000,
    seed: int = 0,
) -> ProbeEstimate:
    """Monte Carlo estimate of r(x) = 1 - E[alpha(x, Y)], Y ~ proposal.

    r(x) -> 1 along a sequence of x's rules out geometric ergodicity;
    sup r(x) < 1 is one of the two legs certifying it.
    """
    if n < 1000:
        raise ParameterError(f"need n >= 1000 proposals, got {n}")
    x = np.asarray(x, dtype=float).ravel()
    rng = np.random.default_rng(seed)
    alphas = _alphas(target, kernel, x, _proposals(kernel, x, n, rng))
    return ProbeEstimate(
        1.0 - float(alphas.mean()), float(alphas.std(ddof=1) / math.sqrt(n))
    )


def acceptance_set_mass(
    target: TargetDensity,
    kernel: ProposalKernel,
    x,
    eps: float,
    n: int = 100_000,
    seed: int = 0,
) -> ProbeEstimate:
    """Proposal mass of the set where acceptance is at least ``eps``.

    Estimates Q(x, A_eps) with A_eps = {y : alpha(x, y) >= eps}.  A mass
    bounded away from zero uniformly in x (for some fixed eps) is the
    complementary leg to the rejection probe: the chain always keeps a
    non-vanishing chance of a genuine move.
    """
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must lie in (0,1), got {eps}")
    if n < 1000:
        raise ParameterError(f"need n >= 1000 proposals, got {n}")
    x = np.asarray(x, dtype=float).ravel()
    rng = np.random.default_rng(seed)
    alphas = _alphas(target, kernel, x, _proposals(kernel, x, n, rng))
    hits = (alphas >= eps).astype(float)
    return ProbeEstimate(
        float(hits.mean()), float(hits.std(ddof=1) / math.sqrt(n))
    )


class ProfilePoint(NamedTuple):
    offset: float
    y: float
    alpha: float


def tail_acceptance_profile(
    target: TargetDensity,
    cov_field: CovarianceField,
    h: float,
    x: float,
    offsets: Sequence[float],
    x0: float = 20.0,
) -> list[ProfilePoint]:
    """Deterministic acceptance profile at fixed multiples of the local scale.

    For each offset ``c`` the probe evaluates alpha(x, x + c * s(x)) with
    ``s(x) = sqrt(h * S(x))`` the local proposal standard deviation.  One
    dimension only, and only in the tail (|x| >= x0): near the mode the
    profile says nothing about ergodicity and is refused rather than
    silently returned.
    """
    if target.dim != 1 or cov_field.dim != 1:
        raise ParameterError("profile is defined for one-dimensional problems")
    if abs(x) < x0:
        raise ParameterError(
            f"profile probes the tail; need |x| >= {x0:g}, got {x:g}"
        )
    xv = np.array([float(x)])
    s = math.sqrt(h * float(cov_field.inv_metric(xv)[0, 0]))
    out = []
    for c in offsets:
        y = float(x) + float(c) * s
        yv = np.array([y])
        if target.support_test(yv):
            a = math.exp(log_accept_ratio_closed_form(target, cov_field, h, xv, yv))
        else:
            a = 0.0
        out.append(ProfilePoint(float(c), y, a))
    return out


class EsjdPoint(NamedTuple):
    b: float
    step_size: float
    esjd: float
    se: float
    acceptance_rate: float


def tune_step_size(
    target: TargetDensity,
    cov_field: CovarianceField,
    h0: float,
    target_rate: float,
    seed: int,
    probe_steps: int = 4000,
    max_iter: int = 16,
) -> float:
    """Bisect on log h until short probe chains accept near ``target_rate``.

    Every probe reuses the same seed, so the acceptance-versus-h map is a
    fixed noisy decreasing function and plain bisection converges.  Fails
    loudly if no bracket exists within twenty decades.
    """
    if not 0.0 < target_rate < 1.0:
        raise ParameterError(f"target rate must lie in (0,1), got {target_rate}")
    if not h0 > 0:
        raise ParameterError(f"initial step size must be positive, got {h0}")

    x0 = np.zeros(target.dim)

    def acc(h: float) -> float:
        kern = gaussian_proposal(cov_field, h)
        return run_chain(target, kern, x0, probe_steps, seed).acceptance_rate

    lo = hi = float(h0)
    a0 = acc(h0)
    if a0 > target_rate:
        for _ in range(20):
            hi *= 10.0
            if acc(hi) < target_rate:
                break
        else:
            raise NumericError("no step size large enough to reach the target rate")
    else:
        for _ in range(20):
            lo /= 10.0
            if acc(lo) > target_rate:
                break
        else:
            raise NumericError("no step size small enough to reach the target rate")

    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        a = acc(mid)
        if abs(a - target_rate) <= 0.01:
            return mid
        if a > target_rate:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def esjd_scan(
    target: TargetDensity,
    b_values: Sequence[float],
    h: float,
    n_steps: int = 100_000,
    seed: int = 0,
    tune_acceptance: float | None = 0.44,
) -> list[EsjdPoint]:
    """Expected squared jumping distance across power-field exponents.

    For each exponent ``b`` the scan builds the ``(1+|x|)^b`` field,
    optionally tunes the step size to the given acceptance rate, runs one
    long chain from the origin, and reports mean squared jumps with a
    batch-means standard error.  One dimension only.

    Chains for different ``b`` use seeds derived from ``seed`` by fixed
    arithmetic, so the scan is one deterministic artifact.
    """
    if target.dim != 1:
        raise ParameterError("the scan is defined for one-dimensional targets")
    if n_steps < 100:
        raise ParameterError(f"need n_steps >= 100, got {n_steps}")
    out = []
    for i, b in enumerate(b_values):
        fld = power_field(float(b))
        seed_tune = seed + 7919 * i + 1
        seed_run = seed + 7919 * i + 2
        if tune_acceptance is not None:
            h_b = tune_step_size(target, fld, h, tune_acceptance, seed_tune)
        else:
            h_b = float(h)
        traj = run_chain(
            target, gaussian_proposal(fld, h_b), np.zeros(1), n_steps, seed_run
        )
        jumps_sq = np.diff(traj.states[:, 0]) ** 2
        esjd = float(jumps_sq.mean())
        n_batches = int(math.isqrt(len(jumps_sq)))
        batch = len(jumps_sq) // n_batches
        means = jumps_sq[: n_batches * batch].reshape(n_batches, batch).mean(axis=1)
        se = float(means.std(ddof=1) / math.sqrt(n_batches))
        out.append(EsjdPoint(float(b), h_b, esjd, se, traj.acceptance_rate))
    return out


@dataclass
class DiagnosticReport:
    """Accumulates probe rows and writes the diagnostics CSV.

    Columns: probe, x, estimate, se, n, seed.  Multi-dimensional probe
    points are joined with ';' inside the x column.
    """

    rows: list = dc_field(default_factory=list)

    def add(self, probe: str, x, estimate: float, se: float, n: int, seed: int):
        if np.ndim(x) == 0:
            x_str = repr(float(x))
        else:
            x_str = ";".join(repr(float(v)) for v in np.ravel(x))
        self.rows.append((probe, x_str, float(estimate), float(se), int(n), int(seed)))

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("probe,x,estimate,se,n,seed\n")
            for probe, x_str, est, se, n, seed in self.rows:
                fh.write(f"{probe},{x_str},{est!r},{se!r},{n},{seed}\n")
