"""Acceptance gate: ten numbered verification checks.

Each check pins its own targets, fields, tolerances, and sample sizes,
runs deterministically from a seed, and reports one PASS/FAIL line.  A
FAIL is reported as measured; several checks below assert properties
whose measured values genuinely fall short, and their detail strings
carry the numbers.  The README's verification notes walk through each of
those shortfalls.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.stats import norm, truncnorm

from .chain import log_accept_ratio, log_accept_ratio_closed_form, run_chain
from .diagnostics import (
    abs_pow,
    acceptance_set_mass,
    drift_ratio,
    esjd_scan,
    exp_abs,
    rectangle_v,
)
from .experiments import one_plus_square_field, run_oracle_cells
from .fields import constant_field, power_field
from .oracle import (
    build_discretized,
    drift_ratio_quadrature,
    spectral_gap,
    tv_decay_curve,
)
from .proposals import (
    TruncatedGaussianSpec,
    ellipse_proposal,
    gaussian_proposal,
    gaussian_tail_bound,
    truncated_mean,
    truncated_mgf,
)
from .rectangle import disc_rejection_lower_bound, exact_rejection_disc, hemisphere_sweep
from .targets import (
    make_exponential_tail,
    make_gaussian,
    make_polynomial_tail,
    make_rectangle,
    make_subexponential_tail,
)


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    elapsed: float


def _random_target(rng: np.random.Generator):
    k = int(rng.integers(4))
    if k == 0:
        return make_exponential_tail(rng.uniform(0.5, 2.0))
    if k == 1:
        return make_subexponential_tail(rng.uniform(0.5, 1.5), rng.uniform(0.3, 0.8))
    if k == 2:
        return make_polynomial_tail(rng.uniform(1.5, 4.0))
    return make_gaussian(rng.uniform(0.5, 2.0))


def _random_field(rng: np.random.Generator):
    k = int(rng.integers(3))
    if k == 0:
        return constant_field(rng.uniform(0.3, 3.0))
    if k == 1:
        return power_field(rng.uniform(0.0, 3.0))
    return one_plus_square_field()


def criterion_1(seed: int = 0) -> CriterionResult:
    """Generic acceptance ratio agrees with the closed form to 1e-10.

    1000 randomized (target, field, x, y, h) cases, proposals drawn up to
    a couple of proposal standard deviations out.  A constant field must
    reduce the closed form to the plain density ratio bit for bit.
    """
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(1000):
        target = _random_target(rng)
        fld = _random_field(rng)
        h = float(np.exp(rng.uniform(np.log(0.05), np.log(5.0))))
        x = np.array([rng.uniform(-20.0, 20.0)])
        std = float(np.sqrt(h * fld.inv_metric(x)[0, 0]))
        y = x + 2.0 * std * rng.standard_normal(1)
        kern = gaussian_proposal(fld, h)
        generic = log_accept_ratio(target, kern, x, y)
        closed = log_accept_ratio_closed_form(target, fld, h, x, y)
        worst = max(worst, abs(generic - closed))

    exact_ok = True
    for _ in range(100):
        target = _random_target(rng)
        fld = constant_field(rng.uniform(0.3, 3.0))
        h = float(np.exp(rng.uniform(np.log(0.05), np.log(5.0))))
        x = np.array([rng.uniform(-20.0, 20.0)])
        y = np.array([rng.uniform(-20.0, 20.0)])
        closed = log_accept_ratio_closed_form(target, fld, h, x, y)
        plain = min(0.0, target.log_density(y) - target.log_density(x))
        exact_ok &= closed == plain

    passed = worst <= 1e-10 and exact_ok
    return CriterionResult(
        1, "closed_form_acceptance", passed,
        f"max |generic - closed| = {worst:.3e} over 1000 cases; "
        f"constant-field reduction exact: {exact_ok}",
        time.perf_counter() - t0,
    )


def criterion_2(seed: int = 0) -> CriterionResult:
    """Exact staircase disc rejection against the pinned closed-form bound.

    Asks for exact >= 1 - (1/(3^(p-2) pi) + 1/(3^(p-1) pi)) at p = 3..8
    and exact > 0.99 by p = 6.  The exact overlap integrals land below
    the pinned bound at every p (the bound's constant allows for only
    half the acceptance area the axis-centred disc actually sees), so
    this check records a real shortfall; the full-area version of the
    bound does hold.
    """
    t0 = time.perf_counter()
    rows = []
    all_meet = True
    p6_ok = False
    for p in range(3, 9):
        exact = exact_rejection_disc((0.0, float(p)))
        bound = disc_rejection_lower_bound(p)
        rows.append((p, exact, bound))
        all_meet &= exact >= bound
        if p == 6:
            p6_ok = exact > 0.99
    passed = all_meet and p6_ok
    detail = "; ".join(f"p={p}: exact {e:.7f} vs bound {b:.7f}" for p, e, b in rows)
    return CriterionResult(
        2, "staircase_disc_rejection_bound", passed, detail, time.perf_counter() - t0
    )


def criterion_3(seed: int = 0) -> CriterionResult:
    """Hemisphere overlaps hold at every probe and the chain descends.

    The full sweep over levels 2..12 must pass at every boundary-crossing
    probe point, and a long ellipse-proposal chain started on level 10
    must reach level 1 with a small mean Lyapunov value over its second
    half.
    """
    t0 = time.perf_counter()
    sweep = hemisphere_sweep(levels=range(2, 13))
    sweep_ok = all(r.passes for r in sweep)

    rect = make_rectangle()
    traj = run_chain(rect, ellipse_proposal(), (0.0, 10.5), 100_000, seed)
    levels = np.floor(traj.states[:, 1]).astype(int)
    reached = bool((levels == 1).any())
    V = rectangle_v()
    tail = traj.states[traj.n_steps // 2 :]
    mean_v = float(np.mean([V.evaluate(s) for s in tail]))
    passed = sweep_ok and reached and mean_v < 4.0
    return CriterionResult(
        3, "hemisphere_overlap_and_descent", passed,
        f"{len(sweep)} probes all pass: {sweep_ok}; reached level 1: {reached}; "
        f"mean V over last half = {mean_v:.3f}",
        time.perf_counter() - t0,
    )


def criterion_4(seed: int = 0) -> CriterionResult:
    """Acceptance-set mass vanishes along the tail for a fast field.

    exp(-|x|) target, (1+|x|)^4 field, h=1, eps=0.1: the mass of
    {alpha >= eps} must fall strictly over x in {10,20,40,80} under
    common random numbers and be below 0.05 at the far point.
    """
    t0 = time.perf_counter()
    target = make_exponential_tail(1.0)
    kern = gaussian_proposal(power_field(4.0), 1.0)
    masses = []
    for x in (10.0, 20.0, 40.0, 80.0):
        est = acceptance_set_mass(target, kern, x, eps=0.1, n=100_000, seed=seed)
        masses.append(est.estimate)
    decreasing = all(masses[i + 1] < masses[i] for i in range(3))
    passed = decreasing and masses[-1] < 0.05
    return CriterionResult(
        4, "far_tail_acceptance_mass", passed,
        "masses " + ", ".join(f"{m:.5f}" for m in masses)
        + f"; strictly decreasing: {decreasing}",
        time.perf_counter() - t0,
    )


def criterion_5(seed: int = 0) -> CriterionResult:
    """Drift contraction in the light-tail / sub-linear-field regime.

    exp(-|x|) target, (1+|x|)^1.5 field, h=1, V = exp(|x|/2): estimate
    plus three standard errors stays below one at x in {20,40,80}, and an
    independent quadrature route agrees within 2 percent.
    """
    t0 = time.perf_counter()
    target = make_exponential_tail(1.0)
    fld = power_field(1.5)
    kern = gaussian_proposal(fld, 1.0)
    V = exp_abs(0.5)
    uppers = []
    rels = []
    for i, x in enumerate((20.0, 40.0, 80.0)):
        r = drift_ratio(target, kern, V, x, n=100_000, seed=seed + i)
        q = drift_ratio_quadrature(target, fld, 1.0, V, x)
        uppers.append(r.estimate + 3.0 * r.se)
        rels.append(abs(r.estimate - q.estimate) / q.estimate)
    passed = all(u < 1.0 for u in uppers) and all(r <= 0.02 for r in rels)
    return CriterionResult(
        5, "light_tail_drift_contraction", passed,
        "upper bounds " + ", ".join(f"{u:.4f}" for u in uppers)
        + "; quadrature rel gaps " + ", ".join(f"{r:.4f}" for r in rels),
        time.perf_counter() - t0,
    )


def criterion_6(seed: int = 0) -> CriterionResult:
    """Heavy-tail drift: small steps contract, large steps must not.

    1/(1+|x|)^2 target, 1 + x^2 field, V = |x|^0.25.  At h = 0.01 the
    estimate plus three standard errors must sit below one at x in
    {50,100,200}.  At h = 100 the check asks for a drift ratio at or
    above one somewhere on the same grid; measured ratios stay just
    below one (about 0.991, quadrature agreeing), so the second clause
    records a real shortfall rather than a verified property.
    """
    t0 = time.perf_counter()
    target = make_polynomial_tail(2.0)
    fld = one_plus_square_field()
    V = abs_pow(0.25)
    xs = (50.0, 100.0, 200.0)

    kern_small = gaussian_proposal(fld, 0.01)
    uppers = []
    for i, x in enumerate(xs):
        r = drift_ratio(target, kern_small, V, x, n=100_000, seed=seed + i)
        uppers.append(r.estimate + 3.0 * r.se)
    small_ok = all(u < 1.0 for u in uppers)

    kern_large = gaussian_proposal(fld, 100.0)
    estimates = []
    for i, x in enumerate(xs):
        r = drift_ratio(target, kern_large, V, x, n=100_000, seed=seed + 17 + i)
        estimates.append(r.estimate)
    large_fails = any(e >= 1.0 for e in estimates)

    passed = small_ok and large_fails
    return CriterionResult(
        6, "heavy_tail_drift_step_size", passed,
        "h=0.01 upper bounds " + ", ".join(f"{u:.5f}" for u in uppers)
        + "; h=100 estimates " + ", ".join(f"{e:.5f}" for e in estimates)
        + f"; drift failure seen: {large_fails}",
        time.perf_counter() - t0,
    )


def criterion_7(seed: int = 0) -> CriterionResult:
    """Windowed spectral-gap verdicts on four classification cells.

    Window pair 20/80.  Three cells classify as expected; the
    super-quadratic field's gap decays like one over the window size, so
    its 4x ratio sits near 0.28, inside the inconclusive band, which
    this check counts as a failure by design.
    """
    t0 = time.perf_counter()
    results = run_oracle_cells()
    parts = []
    all_match = True
    for name, h, ppu, g_s, g_l, verdict, expected in results:
        ok = verdict == expected
        all_match &= ok
        parts.append(f"{name}: ratio {g_l / g_s:.4f} -> {verdict} (want {expected})")
    return CriterionResult(
        7, "gap_trend_classification", all_match, "; ".join(parts),
        time.perf_counter() - t0,
    )


def criterion_8(seed: int = 0) -> CriterionResult:
    """Jump-distance optimum over field exponents on the unit Gaussian.

    Exponent grid 0..3.2 by 0.4, each step size pre-tuned to acceptance
    0.44 +/- 0.05, 1e5 steps per exponent; the argmax of the estimated
    expected squared jump must land in [1.2, 2.0].  The underlying curve
    is nearly flat (quadrature puts the top two points 0.0013 apart), so
    at this chain length the measured argmax is noise-dominated; the
    check is reported as measured.
    """
    t0 = time.perf_counter()
    b_values = [round(0.4 * i, 1) for i in range(9)]
    points = esjd_scan(
        make_gaussian(1.0), b_values, 1.0, n_steps=100_000, seed=seed,
        tune_acceptance=0.44,
    )
    rates_ok = all(abs(p.acceptance_rate - 0.44) <= 0.05 for p in points)
    best = max(points, key=lambda p: p.esjd)
    in_range = 1.2 <= best.b <= 2.0
    passed = rates_ok and in_range
    return CriterionResult(
        8, "esjd_optimum_location", passed,
        f"argmax b = {best.b:g} (esjd {best.esjd:.5f} +/- {best.se:.5f}); "
        f"acceptance rates in window: {rates_ok}; curve "
        + ", ".join(f"{p.b:g}:{p.esjd:.4f}" for p in points),
        time.perf_counter() - t0,
    )


def criterion_9(seed: int = 0) -> CriterionResult:
    """Truncated-Gaussian moments against simulation, and the tail bound.

    20 randomized truncation specs (two-sided, left-open, right-open in
    rotation): closed-form mean and mgf must sit within four standard
    errors of 1e6-draw Monte Carlo; the closed-form Mills-ratio tail
    bound must strictly dominate the high-accuracy complementary CDF on
    x in [0.1, 10].
    """
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst_mean = 0.0
    worst_mgf = 0.0
    n = 1_000_000
    for i in range(20):
        mu = float(rng.uniform(-2.0, 2.0))
        sigma = float(np.exp(rng.uniform(np.log(0.3), np.log(3.0))))
        lo = mu + sigma * float(rng.uniform(-3.0, 0.5))
        hi = lo + sigma * float(np.exp(rng.uniform(np.log(0.5), np.log(3.0))))
        kind = i % 3
        a = -np.inf if kind == 1 else lo
        b = np.inf if kind == 2 else hi
        spec = TruncatedGaussianSpec(mu, sigma, a, b)
        t = float(rng.uniform(-0.5, 0.5)) / sigma

        draws = truncnorm.rvs(
            spec.alpha, spec.beta, loc=mu, scale=sigma, size=n,
            random_state=np.random.default_rng(seed + 100 + i),
        )
        se_mean = draws.std(ddof=1) / np.sqrt(n)
        worst_mean = max(worst_mean, abs(truncated_mean(spec) - draws.mean()) / se_mean)
        g = np.exp(t * draws)
        se_mgf = g.std(ddof=1) / np.sqrt(n)
        worst_mgf = max(worst_mgf, abs(truncated_mgf(spec, t) - g.mean()) / se_mgf)

    xs = np.linspace(0.1, 10.0, 250)
    dominates = all(gaussian_tail_bound(float(x)) > norm.sf(x) for x in xs)

    passed = worst_mean <= 4.0 and worst_mgf <= 4.0 and dominates
    return CriterionResult(
        9, "truncated_moments_and_tail_bound", passed,
        f"worst z: mean {worst_mean:.2f}, mgf {worst_mgf:.2f}; "
        f"tail bound dominates on [0.1, 10]: {dominates}",
        time.perf_counter() - t0,
    )


def criterion_10(seed: int = 0) -> CriterionResult:
    """Internal consistency of the discretized-chain oracle.

    Three pinned chains: stationarity (L1 residual of pi P - pi below
    1e-6), reversibility (detailed-balance residual below 1e-10
    entrywise), and agreement between the spectral gap and the fitted
    total-variation decay rate within 10 percent wherever the gap
    exceeds 0.01.
    """
    t0 = time.perf_counter()
    cases = (
        (make_exponential_tail(1.0), power_field(1.0), 1.0, 15.0, 151),
        (make_gaussian(1.0), constant_field(1.0), 0.5, 10.0, 201),
        (make_polynomial_tail(3.0), constant_field(1.0), 1.0, 12.0, 121),
    )
    stat_res = []
    rev_res = []
    rate_rel = []
    for target, fld, h, L, n in cases:
        ch = build_discretized(target, fld, h, L, n)
        stat_res.append(float(np.abs(ch.pi_hat @ ch.transition - ch.pi_hat).sum()))
        rev_res.append(ch.reversibility_residual())
        res = spectral_gap(ch)
        if res.gap > 0.01:
            d = tv_decay_curve(ch, n // 5, 100)
            fitted = (d[100] / d[60]) ** (1.0 / 40.0)
            rate_rel.append(abs(fitted - (1.0 - res.gap)) / (1.0 - res.gap))
    passed = (
        all(s < 1e-6 for s in stat_res)
        and all(r < 1e-10 for r in rev_res)
        and all(r <= 0.10 for r in rate_rel)
    )
    return CriterionResult(
        10, "discretized_chain_consistency", passed,
        "L1 stationarity " + ", ".join(f"{s:.1e}" for s in stat_res)
        + "; reversibility " + ", ".join(f"{r:.1e}" for r in rev_res)
        + "; gap-vs-TV rel " + ", ".join(f"{r:.4f}" for r in rate_rel),
        time.perf_counter() - t0,
    )


CRITERIA: tuple[tuple[int, Callable[[int], CriterionResult]], ...] = (
    (1, criterion_1),
    (2, criterion_2),
    (3, criterion_3),
    (4, criterion_4),
    (5, criterion_5),
    (6, criterion_6),
    (7, criterion_7),
    (8, criterion_8),
    (9, criterion_9),
    (10, criterion_10),
)


def verify_all(
    seed: int = 0,
    indices: Iterable[int] | None = None,
    stream: Callable[[str], None] = print,
) -> list[CriterionResult]:
    """Run the numbered checks, one PASS/FAIL line each.

    ``indices`` restricts the run; the returned results carry the full
    detail strings.  Deterministic for a fixed seed.
    """
    wanted = set(indices) if indices is not None else None
    results = []
    for idx, fn in CRITERIA:
        if wanted is not None and idx not in wanted:
            continue
        r = fn(seed)
        mark = "PASS" if r.passed else "FAIL"
        stream(f"criterion {idx:02d} {mark} {r.name} ({r.elapsed:.1f}s): {r.detail}")
        results.append(r)
    return results
