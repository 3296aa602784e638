import math

import numpy as np
import pytest
from scipy.special import ndtr

from pdrwm import (
    DiagnosticReport,
    ParameterError,
    abs_pow,
    acceptance_set_mass,
    constant_field,
    drift_ratio,
    drift_ratio_quadrature,
    esjd_scan,
    exp_abs,
    exp_abs_pow,
    gaussian_proposal,
    make_exponential_tail,
    make_gaussian,
    make_polynomial_tail,
    power_field,
    rectangle_v,
    rejection_probability,
    tail_acceptance_profile,
    tune_step_size,
)


def pt(*vals):
    return np.array(vals, dtype=float)


def analytic_exp_drift(s: float) -> float:
    """E[V(X_1)]/V(x) for target exp(-|x|), constant unit field, h=1,
    V = exp(s|x|), far from the origin.

    With Z the standard normal jump: alpha = e^{-Z} for Z > 0 and 1
    otherwise, so the ratio is
        E[e^{(s-1)Z}; Z>0] + E[e^{sZ}; Z<0] + E[1 - e^{-Z}; Z>0]
    and each piece is a Gaussian tail moment e^{t^2/2} Phi(sgn t).
    """

    def half_moment(t):  # E[e^{tZ}; Z > 0]
        return math.exp(0.5 * t * t) * ndtr(t)

    def neg_half_moment(t):  # E[e^{tZ}; Z < 0]
        return math.exp(0.5 * t * t) * ndtr(-t)

    return (
        half_moment(s - 1.0) + neg_half_moment(s) + 0.5 - half_moment(-1.0)
    )


class TestLyapunovCatalogue:
    def test_exp_abs(self):
        v = exp_abs(0.5)
        assert v.log_evaluate(pt(3.0)) == pytest.approx(1.5)
        assert v.evaluate(pt(0.0)) == 1.0
        assert v.evaluate(pt(1e6)) == math.inf  # saturates instead of raising

    def test_exp_abs_pow(self):
        v = exp_abs_pow(2.0, 0.5)
        assert v.log_evaluate(pt(9.0)) == pytest.approx(6.0)
        with pytest.raises(ParameterError):
            exp_abs_pow(1.0, 1.0)

    def test_abs_pow(self):
        v = abs_pow(0.25)
        assert v.evaluate(pt(0.5)) == 1.0  # floored at one inside the ball
        assert v.log_evaluate(pt(16.0)) == pytest.approx(0.25 * math.log(16.0))

    def test_rectangle_v(self):
        v = rectangle_v()
        assert v.evaluate(pt(2.0, 5.0)) == pytest.approx(7.0)
        assert v.evaluate(pt(0.3, 1.0)) == pytest.approx(2.0)

    def test_parameter_domains(self):
        for bad in (0.0, -1.0):
            with pytest.raises(ParameterError):
                exp_abs(bad)
            with pytest.raises(ParameterError):
                abs_pow(bad)


class TestDriftRatio:
    def test_matches_analytic_value(self):
        t = make_exponential_tail(1.0)
        k = gaussian_proposal(constant_field(1.0), 1.0)
        v = exp_abs(0.5)
        res = drift_ratio(t, k, v, pt(30.0), n=200_000, seed=4)
        expected = analytic_exp_drift(0.5)
        assert res.truncated_mass == 0.0
        assert abs(res.estimate - expected) < 4 * res.se
        assert res.se < 0.01

    def test_matches_quadrature_route(self):
        # same quantity through deterministic quadrature, different code path
        t = make_exponential_tail(1.0)
        f = power_field(1.5)
        k = gaussian_proposal(f, 1.0)
        v = exp_abs(0.5)
        mc = drift_ratio(t, k, v, pt(30.0), n=200_000, seed=11)
        qd = drift_ratio_quadrature(t, f, 1.0, v, 30.0)
        assert qd.abserr < 1e-8
        assert abs(mc.estimate - qd.estimate) < 4 * mc.se

    def test_polynomial_case_against_quadrature(self):
        t = make_polynomial_tail(3.0)
        f = power_field(2.0)
        k = gaussian_proposal(f, 1.0)
        v = abs_pow(0.5)
        mc = drift_ratio(t, k, v, pt(50.0), n=100_000, seed=13)
        qd = drift_ratio_quadrature(t, f, 1.0, v, 50.0)
        assert abs(mc.estimate - qd.estimate) < 4 * mc.se

    def test_contraction_in_the_classic_case(self):
        t = make_exponential_tail(1.0)
        k = gaussian_proposal(constant_field(1.0), 1.0)
        res = drift_ratio(t, k, exp_abs(0.5), pt(20.0), n=50_000, seed=1)
        assert res.estimate + 4 * res.se < 1.0

    def test_seed_determinism(self):
        t = make_gaussian()
        k = gaussian_proposal(constant_field(1.0), 1.0)
        a = drift_ratio(t, k, exp_abs(0.1), pt(2.0), n=5000, seed=3)
        b = drift_ratio(t, k, exp_abs(0.1), pt(2.0), n=5000, seed=3)
        assert a == b

    def test_domains(self):
        t = make_gaussian()
        k = gaussian_proposal(constant_field(1.0), 1.0)
        with pytest.raises(ParameterError):
            drift_ratio(t, k, exp_abs(0.1), pt(0.0), n=10, seed=0)


class TestRejectionProbability:
    def test_against_quadrature(self):
        # r(x) = 1 - integral of alpha(x,y) q(y|x) dy, done directly here
        from scipy.integrate import quad

        t = make_gaussian()
        h = 4.0
        k = gaussian_proposal(constant_field(1.0), h)
        x = 1.5
        std = math.sqrt(h)

        def integrand(y):
            a = min(1.0, math.exp(t.log_density(pt(y)) - t.log_density(pt(x))))
            q = math.exp(-0.5 * ((y - x) / std) ** 2) / (std * math.sqrt(2 * math.pi))
            return a * q

        acc, _ = quad(integrand, x - 12 * std, x + 12 * std, limit=200)
        est = rejection_probability(t, k, pt(x), n=200_000, seed=6)
        assert abs(est.estimate - (1.0 - acc)) < 4 * est.se

    def test_heavy_tail_rejection_grows(self):
        # reciprocal-density covariance on an exponential target: far out,
        # nearly every proposal lands where the density ratio kills it
        t = make_exponential_tail(1.0)
        from pdrwm import tempered_langevin_field

        f = tempered_langevin_field(t)
        k = gaussian_proposal(f, 1.0)
        r20 = rejection_probability(t, k, pt(20.0), n=20_000, seed=2)
        r40 = rejection_probability(t, k, pt(40.0), n=20_000, seed=2)
        assert r40.estimate > r20.estimate > 0.9


class TestAcceptanceSetMass:
    def test_gaussian_closed_form(self):
        # target N(0,1), start at the mode, constant unit field: alpha(0,y)
        # = e^{-y^2/2} so {alpha >= eps} = {|y| <= sqrt(-2 log eps)} and the
        # proposal mass is 2 Phi(radius/sqrt(h)) - 1
        t = make_gaussian()
        h = 2.0
        k = gaussian_proposal(constant_field(1.0), h)
        eps = 0.3
        radius = math.sqrt(-2.0 * math.log(eps))
        expected = 2.0 * ndtr(radius / math.sqrt(h)) - 1.0
        est = acceptance_set_mass(t, k, pt(0.0), eps, n=200_000, seed=21)
        assert abs(est.estimate - expected) < 4 * est.se

    def test_monotone_in_eps(self):
        t = make_exponential_tail(1.0)
        k = gaussian_proposal(power_field(1.0), 1.0)
        masses = [
            acceptance_set_mass(t, k, pt(10.0), e, n=20_000, seed=5).estimate
            for e in (0.1, 0.3, 0.6, 0.9)
        ]
        assert all(a >= b for a, b in zip(masses, masses[1:]))

    def test_eps_domain(self):
        t = make_gaussian()
        k = gaussian_proposal(constant_field(1.0), 1.0)
        for eps in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(ParameterError):
                acceptance_set_mass(t, k, pt(0.0), eps, n=2000, seed=0)


class TestTailProfile:
    def test_exponential_constant_field_values(self):
        # alpha(x, x+c) = min(1, e^{-c}) exactly, in the far tail
        t = make_exponential_tail(1.0)
        f = constant_field(1.0)
        rows = tail_acceptance_profile(t, f, 1.0, 25.0, [-1.0, 0.5, 2.0])
        assert rows[0].alpha == pytest.approx(1.0)
        assert rows[1].alpha == pytest.approx(math.exp(-0.5), abs=1e-12)
        assert rows[2].alpha == pytest.approx(math.exp(-2.0), abs=1e-12)
        # offsets are in local std units; here the std is 1
        assert rows[2].y == pytest.approx(27.0)

    def test_offsets_scale_with_field(self):
        t = make_exponential_tail(1.0)
        f = power_field(2.0)
        rows = tail_acceptance_profile(t, f, 1.0, 30.0, [1.0])
        assert rows[0].y == pytest.approx(30.0 + 31.0)  # std = (1+30)

    def test_near_mode_refused(self):
        t = make_exponential_tail(1.0)
        with pytest.raises(ParameterError):
            tail_acceptance_profile(t, constant_field(1.0), 1.0, 3.0, [1.0])


class TestEsjdScan:
    def test_tuned_scan_hits_acceptance_window(self):
        t = make_gaussian()
        pts = esjd_scan(t, [0.0, 1.0], h=1.0, n_steps=20_000, seed=14)
        for p in pts:
            assert abs(p.acceptance_rate - 0.44) < 0.05
            assert p.esjd > 0 and p.se > 0

    def test_deterministic(self):
        t = make_gaussian()
        a = esjd_scan(t, [0.5], h=1.0, n_steps=5000, seed=3)
        b = esjd_scan(t, [0.5], h=1.0, n_steps=5000, seed=3)
        assert a == b

    def test_untuned_uses_given_h(self):
        t = make_gaussian()
        pts = esjd_scan(t, [0.0], h=0.7, n_steps=2000, seed=1, tune_acceptance=None)
        assert pts[0].step_size == 0.7


def test_tune_step_size_converges():
    t = make_gaussian()
    f = constant_field(1.0)
    h = tune_step_size(t, f, 1.0, 0.44, seed=10)
    k = gaussian_proposal(f, h)
    from pdrwm import run_chain

    rate = run_chain(t, k, [0.0], 20_000, seed=99).acceptance_rate
    assert abs(rate - 0.44) < 0.04


def test_report_csv(tmp_path):
    rep = DiagnosticReport()
    rep.add("drift", 30.0, 0.95, 0.001, 100_000, 7)
    rep.add("rejection", pt(0.0, 1.5), 0.5, 0.002, 50_000, 8)
    path = tmp_path / "diag.csv"
    rep.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "probe,x,estimate,se,n,seed"
    assert lines[1].startswith("drift,30.0,0.95,")
    assert lines[2].startswith("rejection,0.0;1.5,")
