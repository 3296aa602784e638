"""Named, reproducible experiment scenarios.

Each scenario builds its inputs from a small declarative config, writes
one or more CSV artifacts, and evaluates a list of named checks whose
outcomes make up the scenario's pass/fail summary.  Scenario bodies are
deterministic functions of (params, seed): re-running with an identical
config reproduces every output file byte for byte.

Output files start with a comment line carrying the config digest and
the seed, so an artifact can always be traced back to the settings that
produced it.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import yaml

from .chain import log_accept_ratio, log_accept_ratio_closed_form, run_chain
from .diagnostics import (
    abs_pow,
    acceptance_set_mass,
    drift_ratio,
    esjd_scan,
    exp_abs,
    rectangle_v,
)
from .errors import ConfigError, PDRWMError
from .fields import (
    CovarianceField,
    GrowthClass,
    constant_field,
    power_field,
    tempered_langevin_field,
)
from .oracle import classify_gap_trend, drift_ratio_quadrature, gap_growth_scan
from .proposals import ellipse_proposal, gaussian_proposal
from .rectangle import (
    disc_rejection_area_bound,
    disc_rejection_lower_bound,
    exact_rejection_disc,
    hemisphere_sweep,
)
from .targets import (
    TargetDensity,
    get_target,
    make_exponential_tail,
    make_gaussian,
    make_polynomial_tail,
    make_rectangle,
    make_ridge_2d,
    make_subexponential_tail,
)

OUTPUT_DIR_ENV = "PDRWM_OUTPUT_DIR"


def one_plus_square_field() -> CovarianceField:
    """One-dimensional field with inverse metric 1 + x^2.

    The canonical quadratic-growth proposal variance: unit sized at the
    origin, scaling like x^2 in the tails.
    """

    def inv_metric(x: np.ndarray) -> np.ndarray:
        return np.array([[1.0 + float(x[0]) ** 2]])

    return CovarianceField(
        dim=1,
        inv_metric=inv_metric,
        growth_class=GrowthClass("quadratic", 2.0),
        label="one_plus_square",
    )


def ridge_conditional_field() -> CovarianceField:
    """Two-dimensional field matched to the ridge target's conditionals.

    Under exp(-x1^2 - x2^2 - x1^2 x2^2) each coordinate given the other
    is a centred Gaussian with variance 1 / (2 (1 + other^2)); the field
    simply proposes with those conditional variances on the diagonal.
    """

    def inv_metric(x: np.ndarray) -> np.ndarray:
        return np.diag(
            [
                1.0 / (2.0 * (1.0 + float(x[1]) ** 2)),
                1.0 / (2.0 * (1.0 + float(x[0]) ** 2)),
            ]
        )

    return CovarianceField(
        dim=2,
        inv_metric=inv_metric,
        growth_class=GrowthClass("bounded", 0.0),
        label="ridge_conditional",
    )


@dataclass(frozen=True)
class ScenarioCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ScenarioResult:
    scenario: str
    digest: str
    seed: int
    files: tuple[str, ...]
    checks: tuple[ScenarioCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    seed: int
    output_dir: str | None = None
    params: dict = dataclass_field(default_factory=dict)


def scenario_digest(scenario: str, seed: int, params: dict) -> str:
    """Twelve hex chars identifying (scenario, seed, params)."""
    blob = json.dumps(
        {"scenario": scenario, "seed": seed, "params": params},
        sort_keys=True,
        default=str,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _fmt(v) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_rows(path: Path, digest: str, seed: int, header: Sequence[str], rows) -> None:
    lines = [f"# config={digest} seed={seed}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# config plumbing

_TARGET_KEYS = {
    "exponential": ("a",),
    "subexponential": ("a", "beta"),
    "polynomial": ("p",),
    "gaussian": ("sigma",),
    "ridge": (),
    "rectangle": (),
}


def build_target(spec: dict) -> TargetDensity:
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("target spec must be a mapping with a 'name'", key="target")
    name = spec["name"]
    if name not in _TARGET_KEYS:
        raise ConfigError(f"unknown target {name!r}", key="target.name")
    params = {k: v for k, v in spec.items() if k != "name"}
    extra = set(params) - set(_TARGET_KEYS[name])
    if extra:
        raise ConfigError(
            f"target {name!r} does not take {sorted(extra)}",
            key=f"target.{sorted(extra)[0]}",
        )
    try:
        return get_target(name, **params)
    except PDRWMError as exc:
        raise ConfigError(str(exc), key="target") from exc


def build_field(spec: dict, target: TargetDensity | None = None) -> CovarianceField:
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("field spec must be a mapping with a 'name'", key="field")
    name = spec["name"]
    params = {k: v for k, v in spec.items() if k != "name"}
    try:
        if name == "constant":
            sigma = params.pop("sigma2", 1.0)
            dim = int(params.pop("dim", 1))
            if params:
                raise ConfigError(
                    f"constant field does not take {sorted(params)}",
                    key=f"field.{sorted(params)[0]}",
                )
            return constant_field(np.eye(dim) * sigma if dim > 1 else sigma)
        if name == "power":
            b = params.pop("b", 1.0)
            dim = int(params.pop("dim", 1))
            if params:
                raise ConfigError(
                    f"power field does not take {sorted(params)}",
                    key=f"field.{sorted(params)[0]}",
                )
            return power_field(float(b), dim=dim)
        if name == "one_plus_square":
            if params:
                raise ConfigError(
                    f"one_plus_square field does not take {sorted(params)}",
                    key=f"field.{sorted(params)[0]}",
                )
            return one_plus_square_field()
        if name == "tempered_langevin":
            if target is None:
                raise ConfigError(
                    "tempered_langevin field needs a target", key="field"
                )
            return tempered_langevin_field(target, **params)
        if name == "ridge_conditional":
            return ridge_conditional_field()
    except ConfigError:
        raise
    except PDRWMError as exc:
        raise ConfigError(str(exc), key="field") from exc
    raise ConfigError(f"unknown field {name!r}", key="field.name")


def load_config(path) -> ExperimentConfig:
    """Parse and validate a single-document YAML scenario config."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}", key="path")
    try:
        raw = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}", key="path") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping", key="path")

    allowed = {"scenario", "seed", "output_dir", "params"}
    for k in raw:
        if k not in allowed:
            raise ConfigError(f"unknown config key {k!r}", key=str(k))
    if "scenario" not in raw:
        raise ConfigError("config needs a 'scenario'", key="scenario")
    scenario = raw["scenario"]
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}", key="scenario")
    if "seed" not in raw:
        raise ConfigError("config needs an explicit integer 'seed'", key="seed")
    seed = raw["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}", key="seed")
    params = raw.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigError("params must be a mapping", key="params")
    output_dir = raw.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("output_dir must be a string", key="output_dir")
    return ExperimentConfig(
        scenario=scenario, seed=seed, output_dir=output_dir, params=dict(params)
    )


def resolve_output_dir(config: ExperimentConfig) -> Path:
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env) / config.scenario
    if config.output_dir:
        return Path(config.output_dir)
    return Path("artifacts") / config.scenario


# ---------------------------------------------------------------------------
# scenario bodies

def _scenario_figure1(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Per-proposal acceptance under a fast-growing field, by start point."""
    xs = [float(v) for v in params.get("x_points", [5.0, 10.0, 20.0, 40.0])]
    n = int(params.get("n_proposals", 2000))
    b = float(params.get("b", 4.0))
    h = float(params.get("h", 1.0))
    a = float(params.get("a", 1.0))
    if n < 100:
        raise ConfigError("n_proposals must be at least 100", key="n_proposals")

    target = make_exponential_tail(a)
    fld = power_field(b)
    rng = np.random.default_rng(seed)
    rows = []
    fractions = []
    for x in xs:
        std = float(np.sqrt(h * fld.inv_metric(np.array([x]))[0, 0]))
        ys = x + std * rng.standard_normal(n)
        above = 0
        for y in ys:
            la = log_accept_ratio_closed_form(
                target, fld, h, np.array([x]), np.array([y])
            )
            alpha = float(np.exp(la))
            flag = alpha > 0.5
            above += flag
            rows.append((x, float(y), alpha, flag))
        fractions.append(above / n)

    path = out / "figure1_proposals.csv"
    _write_rows(path, digest, seed, ("x", "y", "alpha", "above_half"), rows)
    decreasing = all(fractions[i + 1] < fractions[i] for i in range(len(fractions) - 1))
    checks = (
        ScenarioCheck(
            "above_half_fraction_decreasing",
            decreasing,
            "fractions " + ", ".join(f"{f:.4f}" for f in fractions),
        ),
    )
    return ScenarioResult("figure1", digest, seed, (str(path),), checks)


def _scenario_figure2(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Ridge-target acceptance along the arm, fixed vs position-matched field."""
    arm = [float(v) for v in params.get("arm_positions", [0.0, 1.0, 2.0, 4.0, 8.0])]
    n = int(params.get("n_proposals", 3000))
    h = float(params.get("h", 1.0))
    sigma2 = float(params.get("sigma2", 0.25))
    if n < 100:
        raise ConfigError("n_proposals must be at least 100", key="n_proposals")

    ridge = make_ridge_2d()
    fields = {
        "spherical": constant_field(np.eye(2) * sigma2),
        "conditional": ridge_conditional_field(),
    }
    means: dict[str, list[float]] = {k: [] for k in fields}
    rows = []
    for x1 in arm:
        x = np.array([x1, 0.0])
        row = [x1]
        for name, fld in fields.items():
            kern = gaussian_proposal(fld, h)
            rng = np.random.default_rng(seed)  # common draws across arm points
            acc = 0.0
            for _ in range(n):
                y = kern.sample(x, rng)
                acc += float(np.exp(log_accept_ratio(ridge, kern, x, y)))
            means[name].append(acc / n)
            row.append(acc / n)
        rows.append(tuple(row))

    path = out / "figure2_arm_acceptance.csv"
    _write_rows(
        path, digest, seed, ("x1", "mean_alpha_spherical", "mean_alpha_conditional"), rows
    )
    sph, cond = means["spherical"], means["conditional"]
    checks = (
        ScenarioCheck(
            "spherical_acceptance_collapses",
            sph[-1] < 0.5 * sph[0],
            f"far/near = {sph[-1]:.4f}/{sph[0]:.4f}",
        ),
        ScenarioCheck(
            "conditional_acceptance_holds",
            cond[-1] >= 0.35,
            f"far arm mean alpha = {cond[-1]:.4f}",
        ),
        ScenarioCheck(
            "conditional_beats_spherical_far",
            cond[-1] > 1.5 * sph[-1],
            f"{cond[-1]:.4f} vs {sph[-1]:.4f}",
        ),
    )
    return ScenarioResult("figure2_data", digest, seed, (str(path),), checks)


def _scenario_figure3(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Staircase geometry of the rectangle target, plus hemisphere overlaps."""
    max_level = int(params.get("max_level", 12))
    probe_levels = [int(k) for k in params.get("probe_levels", [2, 3, 4, 5, 6])]
    frac = float(params.get("height_frac", 0.5))
    if max_level < 2:
        raise ConfigError("max_level must be at least 2", key="max_level")

    rows = []
    cum = 0.0
    for k in range(1, max_level + 1):
        w = 3.0 ** (1 - k)
        # density 3^-k over a 2*3^(1-k) wide, unit tall slab
        mass = 6.0 * 9.0 ** (-k)
        cum += mass
        rows.append((k, w, mass, cum / 0.75))
    levels_path = out / "figure3_levels.csv"
    _write_rows(
        levels_path, digest, seed, ("level", "half_width", "mass", "cum_mass_fraction"), rows
    )

    sweep = hemisphere_sweep(levels=probe_levels, height_fracs=(frac,), x1_fracs=(0.0,))
    hemi_rows = [
        (r.k, r.x1, r.x2, r.lower_overlap, r.upper_overlap, r.passes) for r in sweep
    ]
    hemi_path = out / "figure3_hemispheres.csv"
    _write_rows(
        hemi_path,
        digest,
        seed,
        ("k", "x1", "x2", "lower_overlap", "upper_overlap", "passes"),
        hemi_rows,
    )

    widths = [row[1] for row in rows]
    ratio_ok = all(
        abs(widths[i + 1] / widths[i] - 1.0 / 3.0) < 1e-12 for i in range(len(widths) - 1)
    )
    total = sum(row[2] for row in rows)
    expected_total = 0.75 * (1.0 - 9.0 ** (-max_level))
    checks = (
        ScenarioCheck("half_width_ratio_one_third", ratio_ok, f"{len(widths)} levels"),
        ScenarioCheck(
            "level_masses_sum",
            abs(total - expected_total) < 1e-12,
            f"sum {total!r} vs {expected_total!r}",
        ),
        ScenarioCheck(
            "hemisphere_overlaps_pass", all(r.passes for r in sweep), f"{len(sweep)} probes"
        ),
    )
    return ScenarioResult(
        "figure3_data", digest, seed, (str(levels_path), str(hemi_path)), checks
    )


# (target factory, field factory, h, windows, grid density, expected verdict)
_TABLE1_CELLS: tuple[tuple[str, str, Callable, Callable, float, tuple, int, str], ...] = (
    ("polynomial", "subquadratic", lambda: make_polynomial_tail(2.0),
     lambda: power_field(1.5), 1.0, (10.0, 320.0), 5, "not_geometric"),
    ("subexponential", "subquadratic", lambda: make_subexponential_tail(1.0, 0.5),
     lambda: power_field(1.5), 1.0, (40.0, 160.0), 5, "geometric"),
    ("log_concave", "subquadratic", lambda: make_exponential_tail(1.0),
     lambda: power_field(1.5), 1.0, (20.0, 80.0), 5, "geometric"),
    ("polynomial", "quadratic", lambda: make_polynomial_tail(2.0),
     lambda: one_plus_square_field(), 0.01, (20.0, 80.0), 50, "geometric"),
    ("subexponential", "quadratic", lambda: make_subexponential_tail(1.0, 0.5),
     lambda: one_plus_square_field(), 0.01, (20.0, 80.0), 50, "geometric"),
    ("log_concave", "quadratic", lambda: make_exponential_tail(1.0),
     lambda: one_plus_square_field(), 0.01, (20.0, 80.0), 50, "geometric"),
    ("polynomial", "superquadratic", lambda: make_polynomial_tail(2.0),
     lambda: power_field(4.0), 1.0, (10.0, 160.0), 5, "not_geometric"),
    ("subexponential", "superquadratic", lambda: make_subexponential_tail(1.0, 0.5),
     lambda: power_field(4.0), 1.0, (10.0, 160.0), 5, "not_geometric"),
    ("log_concave", "superquadratic", lambda: make_exponential_tail(1.0),
     lambda: power_field(4.0), 1.0, (10.0, 160.0), 5, "not_geometric"),
)


def _scenario_table1(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Tail-by-growth classification grid from windowed spectral gaps.

    Three tail classes crossed with three variance growth classes; each
    cell gets a gap trend verdict that is compared against the expected
    classification.  Window spans are sized per cell: slow heavy-tail
    collapse needs a wide span, heavy-tailed targets need a large first
    window before the gap means anything.
    """
    rows = []
    checks = []
    for tail, growth, mk_target, mk_field, h, windows, ppu, expected in _TABLE1_CELLS:
        pts = gap_growth_scan(mk_target(), mk_field(), h, list(windows), points_per_unit=ppu)
        g_small, g_large = pts[0].gap, pts[-1].gap
        verdict = classify_gap_trend(g_small, g_large)
        rows.append(
            (tail, growth, h, windows[0], windows[-1], g_small, g_large,
             g_large / g_small, verdict, expected, verdict == expected)
        )
        checks.append(
            ScenarioCheck(
                f"cell_{tail}_{growth}",
                verdict == expected,
                f"ratio {g_large / g_small:.4f} -> {verdict} (expected {expected})",
            )
        )
    path = out / "table1_grid.csv"
    _write_rows(
        path,
        digest,
        seed,
        ("tail", "growth", "h", "window_small", "window_large", "gap_small",
         "gap_large", "ratio", "verdict", "expected", "cell_pass"),
        rows,
    )
    return ScenarioResult("table1_grid", digest, seed, (str(path),), tuple(checks))


def _scenario_lemma2(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Drift-ratio probe in the light-tail regime with a sub-linear field."""
    a = float(params.get("a", 1.0))
    b = float(params.get("b", 1.5))
    h = float(params.get("h", 1.0))
    s = float(params.get("s", 0.5))
    xs = [float(v) for v in params.get("xs", [20.0, 40.0, 80.0])]
    n = int(params.get("n", 20_000))

    target = make_exponential_tail(a)
    fld = power_field(b)
    kern = gaussian_proposal(fld, h)
    V = exp_abs(s)
    rows = []
    all_contract = True
    all_quad = True
    for i, x in enumerate(xs):
        r = drift_ratio(target, kern, V, x, n=n, seed=seed + i)
        q = drift_ratio_quadrature(target, fld, h, V, x)
        rel = abs(r.estimate - q.estimate) / q.estimate
        upper = r.estimate + 3.0 * r.se
        rows.append((x, r.estimate, r.se, upper, q.estimate, rel))
        all_contract &= upper < 1.0
        all_quad &= rel <= 0.02
    path = out / "lemma2_drift.csv"
    _write_rows(
        path, digest, seed,
        ("x", "estimate", "se", "upper_3se", "quadrature", "rel_gap"), rows,
    )
    checks = (
        ScenarioCheck(
            "contractive_at_all_probes", all_contract,
            "upper bounds " + ", ".join(f"{row[3]:.4f}" for row in rows),
        ),
        ScenarioCheck(
            "quadrature_within_2pct", all_quad,
            "rel gaps " + ", ".join(f"{row[5]:.4f}" for row in rows),
        ),
    )
    return ScenarioResult("lemma2_drift", digest, seed, (str(path),), checks)


def _scenario_lemma3(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Drift-ratio probe for a heavy-tail target with a quadratic field.

    Runs the same probe grid at a small and a large step size.  The
    small step size should contract everywhere.  The large-step check
    asks for a drift failure (ratio at or above one) somewhere on the
    grid; measured ratios sit just below one, so that check documents a
    real shortfall rather than a verified property.  See the README's
    verification notes.
    """
    p = float(params.get("p", 2.0))
    s = float(params.get("s", 0.25))
    xs = [float(v) for v in params.get("xs", [50.0, 100.0, 200.0])]
    h_small = float(params.get("h_small", 0.01))
    h_large = float(params.get("h_large", 100.0))
    # the small-step contraction margin is under 1e-3, so the probe
    # needs the full sample size for est + 3 se to resolve it
    n = int(params.get("n", 100_000))

    target = make_polynomial_tail(p)
    fld = one_plus_square_field()
    V = abs_pow(s)
    rows = []
    small_ok = True
    large_fail_seen = False
    for h in (h_small, h_large):
        kern = gaussian_proposal(fld, h)
        for i, x in enumerate(xs):
            r = drift_ratio(target, kern, V, x, n=n, seed=seed + i)
            upper = r.estimate + 3.0 * r.se
            rows.append((h, x, r.estimate, r.se, upper))
            if h == h_small:
                small_ok &= upper < 1.0
            else:
                large_fail_seen |= r.estimate >= 1.0
    path = out / "lemma3_drift.csv"
    _write_rows(path, digest, seed, ("h", "x", "estimate", "se", "upper_3se"), rows)
    checks = (
        ScenarioCheck(
            "small_h_contractive", small_ok,
            "upper bounds " + ", ".join(f"{r[4]:.4f}" for r in rows[: len(xs)]),
        ),
        ScenarioCheck(
            "large_h_drift_fails_somewhere", large_fail_seen,
            "estimates " + ", ".join(f"{r[2]:.4f}" for r in rows[len(xs):]),
        ),
    )
    return ScenarioResult("lemma3_drift", digest, seed, (str(path),), checks)


def _scenario_lemma4(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Acceptance-set mass decay under a super-quadratic field."""
    a = float(params.get("a", 1.0))
    b = float(params.get("b", 4.0))
    h = float(params.get("h", 1.0))
    eps = float(params.get("eps", 0.1))
    xs = [float(v) for v in params.get("xs", [10.0, 20.0, 40.0, 80.0])]
    n = int(params.get("n", 20_000))

    target = make_exponential_tail(a)
    kern = gaussian_proposal(power_field(b), h)
    rows = []
    # same seed at every x: common random numbers make the comparison exact
    for x in xs:
        est = acceptance_set_mass(target, kern, x, eps=eps, n=n, seed=seed)
        rows.append((x, est.estimate, est.se))
    path = out / "lemma4_probe.csv"
    _write_rows(path, digest, seed, ("x", "mass", "se"), rows)
    masses = [r[1] for r in rows]
    checks = (
        ScenarioCheck(
            "mass_strictly_decreasing",
            all(masses[i + 1] < masses[i] for i in range(len(masses) - 1)),
            "masses " + ", ".join(f"{m:.5f}" for m in masses),
        ),
        ScenarioCheck(
            "mass_small_at_far_point", masses[-1] < 0.05, f"{masses[-1]:.5f} at x={xs[-1]:g}"
        ),
    )
    return ScenarioResult("lemma4_probe", digest, seed, (str(path),), checks)


def _scenario_lemma6(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Exact unit-disc rejection on the rectangle target versus its bounds.

    The exact overlap computation is cross-checked by Monte Carlo and
    against the provable full-area bound.  The pinned closed-form bound
    is also reported: the exact values fall short of it at every p (and
    below 0.99 at p = 6), consistent with that constant counting one
    half-width per level where the axis-centred disc sees the full
    width.  The corresponding checks document the shortfall
    deliberately; see the README's verification notes.
    """
    ps = [int(v) for v in params.get("p_values", [3, 4, 5, 6, 7, 8])]
    draws = int(params.get("mc_draws", 100_000))
    if min(ps) < 3:
        raise ConfigError("p_values must be >= 3", key="p_values")

    rect = make_rectangle()
    rng = np.random.default_rng(seed)
    rows = []
    mc_ok = True
    meets_pinned = True
    for p in ps:
        exact = exact_rejection_disc((0.0, float(p)))
        pinned = disc_rejection_lower_bound(p)
        area = disc_rejection_area_bound(p)
        # uniform draws on the unit disc at (0, p); alpha is the level
        # weight ratio clipped at one
        r = np.sqrt(rng.random(draws))
        th = rng.random(draws) * 2.0 * np.pi
        y1 = r * np.cos(th)
        y2 = p + r * np.sin(th)
        alpha = np.zeros(draws)
        for i in range(draws):
            y = np.array([y1[i], y2[i]])
            if rect.support_test(y):
                alpha[i] = min(1.0, 3.0 ** (p - rect.level(y)))
        rej = 1.0 - alpha
        mc_est = float(rej.mean())
        mc_se = float(rej.std(ddof=1) / np.sqrt(draws))
        z = abs(exact - mc_est) / mc_se
        rows.append((p, exact, pinned, area, exact >= pinned, mc_est, mc_se, z))
        mc_ok &= z <= 4.0
        meets_pinned &= exact >= pinned
    path = out / "lemma6_exact.csv"
    _write_rows(
        path, digest, seed,
        ("p", "exact", "pinned_bound", "area_bound", "meets_pinned",
         "mc_estimate", "mc_se", "mc_z"),
        rows,
    )
    p6 = next((r[1] for r in rows if r[0] == 6), None)
    checks = (
        ScenarioCheck(
            "exact_matches_monte_carlo", mc_ok,
            "z " + ", ".join(f"{r[7]:.2f}" for r in rows),
        ),
        ScenarioCheck(
            "exact_dominates_area_bound",
            all(r[1] >= r[3] - 1e-12 for r in rows),
            "full-area bound is provable",
        ),
        ScenarioCheck(
            "meets_pinned_bound_all_p", meets_pinned,
            "exact " + ", ".join(f"p={r[0]}: {r[1]:.6f} vs {r[2]:.6f}" for r in rows[:2])
            + ", ...",
        ),
        ScenarioCheck(
            "exceeds_099_by_p6",
            p6 is not None and p6 > 0.99,
            f"exact at p=6 is {p6:.6f}" if p6 is not None else "p=6 not probed",
        ),
    )
    return ScenarioResult("lemma6_exact", digest, seed, (str(path),), checks)


def _scenario_lemma7(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Hemisphere sweep plus a long ellipse-proposal chain down the staircase."""
    levels = [int(k) for k in params.get("levels", list(range(2, 13)))]
    n_steps = int(params.get("n_steps", 20_000))
    start_level = float(params.get("start_level", 10.0))
    if n_steps < 1000:
        raise ConfigError("n_steps must be at least 1000", key="n_steps")

    sweep = hemisphere_sweep(levels=levels)
    sweep_path = out / "lemma7_sweep.csv"
    _write_rows(
        sweep_path, digest, seed,
        ("k", "x1", "x2", "lower_overlap", "upper_overlap", "passes"),
        [(r.k, r.x1, r.x2, r.lower_overlap, r.upper_overlap, r.passes) for r in sweep],
    )

    rect = make_rectangle()
    traj = run_chain(rect, ellipse_proposal(), (0.0, start_level + 0.5), n_steps, seed)
    levels_visited = np.floor(traj.states[:, 1]).astype(int)
    hits = np.nonzero(levels_visited == 1)[0]
    V = rectangle_v()
    tail = traj.states[traj.n_steps // 2 :]
    mean_v = float(np.mean([V.evaluate(s) for s in tail]))
    summary_path = out / "lemma7_chain.csv"
    _write_rows(
        summary_path, digest, seed,
        ("n_steps", "start_level", "min_level", "first_level1_step",
         "mean_v_last_half", "acceptance_rate"),
        [(n_steps, start_level, int(levels_visited.min()),
          int(hits[0]) if hits.size else -1, mean_v, traj.acceptance_rate)],
    )
    checks = (
        ScenarioCheck(
            "sweep_all_pass", all(r.passes for r in sweep), f"{len(sweep)} probe points"
        ),
        ScenarioCheck(
            "chain_reaches_first_level", hits.size > 0,
            f"first hit at step {int(hits[0])}" if hits.size else "never reached",
        ),
        ScenarioCheck("mean_v_small", mean_v < 4.0, f"mean V = {mean_v:.3f}"),
    )
    return ScenarioResult(
        "lemma7_sweep", digest, seed, (str(sweep_path), str(summary_path)), checks
    )


def _scenario_esjd(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Jump-distance scan over field exponents at a fixed acceptance rate."""
    b_values = [float(v) for v in params.get("b_values", [round(0.4 * i, 1) for i in range(9)])]
    n_steps = int(params.get("n_steps", 20_000))
    h = float(params.get("h", 1.0))
    acc = params.get("tune_acceptance", 0.44)
    sigma = float(params.get("sigma", 1.0))

    points = esjd_scan(
        make_gaussian(sigma), b_values, h, n_steps=n_steps, seed=seed,
        tune_acceptance=acc,
    )
    path = out / "esjd_scan.csv"
    _write_rows(
        path, digest, seed,
        ("b", "step_size", "esjd", "se", "acceptance_rate"),
        [(p.b, p.step_size, p.esjd, p.se, p.acceptance_rate) for p in points],
    )
    window_ok = acc is None or all(abs(p.acceptance_rate - acc) <= 0.05 for p in points)
    checks = (
        ScenarioCheck(
            "acceptance_in_window", window_ok,
            "rates " + ", ".join(f"{p.acceptance_rate:.3f}" for p in points),
        ),
    )
    return ScenarioResult("esjd_scan", digest, seed, (str(path),), checks)


# the four classification probes used by the acceptance gate, at the
# gate's pinned windows
ORACLE_CELLS: tuple[tuple[str, Callable, Callable, float, int, str], ...] = (
    ("log_concave_subquadratic", lambda: make_exponential_tail(1.0),
     lambda: power_field(1.5), 1.0, 5, "geometric"),
    ("polynomial_bounded", lambda: make_polynomial_tail(2.0),
     lambda: constant_field(1.0), 1.0, 5, "not_geometric"),
    ("polynomial_quadratic_small_h", lambda: make_polynomial_tail(2.0),
     lambda: one_plus_square_field(), 0.01, 50, "geometric"),
    ("log_concave_superquadratic", lambda: make_exponential_tail(1.0),
     lambda: power_field(4.0), 1.0, 5, "not_geometric"),
)

ORACLE_WINDOWS = (20.0, 80.0)


def run_oracle_cells():
    """Gap trend verdicts for the four pinned classification cells."""
    results = []
    for name, mk_target, mk_field, h, ppu, expected in ORACLE_CELLS:
        pts = gap_growth_scan(
            mk_target(), mk_field(), h, list(ORACLE_WINDOWS), points_per_unit=ppu
        )
        g_small, g_large = pts[0].gap, pts[-1].gap
        verdict = classify_gap_trend(g_small, g_large)
        results.append((name, h, ppu, g_small, g_large, verdict, expected))
    return results


def _scenario_oracle(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """Pinned-window spectral-gap verdicts on four classification cells.

    One cell is documented red: the super-quadratic field's gap decays
    like an escape rate, one over the window size, so the gap ratio at a
    4x window span sits near 1/4, inside the inconclusive band of the
    pinned thresholds.  See the README's verification notes.
    """
    results = run_oracle_cells()
    rows = [
        (name, h, ORACLE_WINDOWS[0], ORACLE_WINDOWS[1], g_s, g_l, g_l / g_s,
         verdict, expected, verdict == expected)
        for name, h, ppu, g_s, g_l, verdict, expected in results
    ]
    path = out / "oracle_scan.csv"
    _write_rows(
        path, digest, seed,
        ("cell", "h", "window_small", "window_large", "gap_small", "gap_large",
         "ratio", "verdict", "expected", "cell_pass"),
        rows,
    )
    checks = tuple(
        ScenarioCheck(
            f"cell_{name}", verdict == expected,
            f"ratio {g_l / g_s:.4f} -> {verdict} (expected {expected})",
        )
        for name, h, ppu, g_s, g_l, verdict, expected in results
    )
    return ScenarioResult("oracle_scan", digest, seed, (str(path),), checks)


def _scenario_custom(params: dict, out: Path, seed: int, digest: str) -> ScenarioResult:
    """One chain with a user-specified target, field, and step size."""
    for key in ("target", "field", "x0", "n_steps"):
        if key not in params:
            raise ConfigError(f"custom scenario needs {key!r}", key=key)
    n_steps = params["n_steps"]
    if not isinstance(n_steps, int) or isinstance(n_steps, bool) or n_steps < 1:
        raise ConfigError(
            f"n_steps must be a positive integer, got {n_steps!r}", key="n_steps"
        )
    h = float(params.get("h", 1.0))
    if not h > 0:
        raise ConfigError(f"h must be positive, got {h}", key="h")

    target = build_target(params["target"])
    fld = build_field(params["field"], target)
    x0 = np.atleast_1d(np.asarray(params["x0"], dtype=float))
    if x0.shape != (target.dim,):
        raise ConfigError(
            f"x0 must have {target.dim} coordinates, got {x0.shape[0]}", key="x0"
        )
    kern = gaussian_proposal(fld, h)
    try:
        traj = run_chain(target, kern, x0, n_steps, seed)
    except PDRWMError as exc:
        raise ConfigError(str(exc), key="x0") from exc
    path = out / "custom_trajectory.csv"
    traj.to_csv(path)
    checks = (
        ScenarioCheck(
            "chain_completed", True,
            f"{n_steps} steps, acceptance rate {traj.acceptance_rate:.4f}",
        ),
    )
    return ScenarioResult("custom", digest, seed, (str(path),), checks)


SCENARIOS: dict[str, Callable[[dict, Path, int, str], ScenarioResult]] = {
    "figure1": _scenario_figure1,
    "figure2_data": _scenario_figure2,
    "figure3_data": _scenario_figure3,
    "table1_grid": _scenario_table1,
    "lemma2_drift": _scenario_lemma2,
    "lemma3_drift": _scenario_lemma3,
    "lemma4_probe": _scenario_lemma4,
    "lemma6_exact": _scenario_lemma6,
    "lemma7_sweep": _scenario_lemma7,
    "esjd_scan": _scenario_esjd,
    "oracle_scan": _scenario_oracle,
    "custom": _scenario_custom,
}


def list_scenarios() -> list[tuple[str, str]]:
    """(name, one-line description) for every registered scenario."""
    out = []
    for name, fn in SCENARIOS.items():
        doc = (fn.__doc__ or "").strip().splitlines()
        out.append((name, doc[0] if doc else ""))
    return out


def run_scenario(config: ExperimentConfig) -> ScenarioResult:
    """Validate the config, run the scenario body, write its artifacts.

    Config problems surface as ``ConfigError`` before any file is
    written; the output directory is only created once the parameters
    have been accepted.
    """
    if config.scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {config.scenario!r}", key="scenario")
    if not isinstance(config.seed, int) or config.seed < 0:
        raise ConfigError(f"seed must be a non-negative integer", key="seed")
    digest = scenario_digest(config.scenario, config.seed, config.params)
    out = resolve_output_dir(config)

    runner = SCENARIOS[config.scenario]
    if config.scenario == "custom":
        # validate before touching the filesystem: a rejected config
        # must leave no files behind
        probe = dict(config.params)
        n_steps = probe.get("n_steps")
        for key in ("target", "field", "x0", "n_steps"):
            if key not in probe:
                raise ConfigError(f"custom scenario needs {key!r}", key=key)
        if not isinstance(n_steps, int) or isinstance(n_steps, bool) or n_steps < 1:
            raise ConfigError(
                f"n_steps must be a positive integer, got {n_steps!r}", key="n_steps"
            )
        build_field(probe["field"], build_target(probe["target"]))

    out.mkdir(parents=True, exist_ok=True)
    return runner(dict(config.params), out, config.seed, digest)
