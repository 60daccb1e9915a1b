import math

import numpy as np
import pytest

from bousslab.symbol import (
    Klass,
    classify,
    eigen,
    low_freq_threshold,
    propagator_entries,
    semigroup_norm_bound,
    semigroup_norm_exact,
    symbol_matrix,
)
from bousslab.systems import Dissipation, make_spec, multipliers, preset

from test_systems import random_c1_specs


def random_specs(rng, n):
    """Mix of C1 and C2 systems over all three dissipation tags."""
    tags = list(Dissipation)
    out = random_c1_specs(rng, n - n // 3)
    out = [make_spec(*s.coefficients, diss=rng.choice(tags)) for s in out]
    while len(out) < n:
        a = rng.uniform(0.01, 0.16)
        b = rng.uniform(0.0, 1.0 / 3.0 - 2 * a)
        d = 1.0 / 3.0 - 2 * a - b
        if d < 0:
            continue
        out.append(make_spec(a, b, a, d, rng.choice(tags)))
    return out


class TestSymbolMatrix:
    def test_zero_matrix_at_origin(self):
        sm = symbol_matrix(preset("kdv-bbm"), 0.0)
        assert sm.d11 == 0 and sm.d22 == 0
        assert sm.off12 == 0 and sm.off21 == 0

    def test_bbm_bbm_xi_one(self):
        sm = symbol_matrix(preset("bbm-bbm"), 1.0)
        assert sm.d11 == pytest.approx(6 / 7, rel=1e-15)
        assert sm.d22 == pytest.approx(6 / 7, rel=1e-15)
        assert sm.off12 == pytest.approx(6 / 7, rel=1e-15)
        assert sm.off21 == pytest.approx(6 / 7, rel=1e-15)

    def test_kdv_kdv_resonance_diagonal(self):
        sm = symbol_matrix(preset("kdv-kdv"), math.sqrt(6.0))
        assert sm.d11 == pytest.approx(6.0, rel=1e-14)
        assert sm.d22 == pytest.approx(6.0, rel=1e-14)
        assert abs(sm.off12) < 1e-14 and abs(sm.off21) < 1e-14

    def test_skewness_of_coupling(self):
        # entries are i*off12 and i*off21 with off12*off21 = xi^2 sigma^2 >= 0
        rng = np.random.default_rng(0)
        for spec in random_specs(rng, 12):
            xi = rng.uniform(-30, 30)
            sm = symbol_matrix(spec, xi)
            m = multipliers(spec, xi)
            assert sm.off12 * sm.off21 == pytest.approx(
                (xi * m.sigma) ** 2, rel=1e-12, abs=1e-300)


class TestEigen:
    def test_zero_at_origin(self):
        ed = eigen(preset("bona-smith"), 0.0)
        assert ed.lambda1 == 0 and ed.lambda2 == 0

    def test_bbm_bbm_conjugate_pair(self):
        ed = eigen(preset("bbm-bbm"), 1.0)
        assert ed.delta < 0
        assert ed.lambda1 == pytest.approx(6 / 7 - 6j / 7, rel=1e-14)
        assert ed.lambda2 == pytest.approx(6 / 7 + 6j / 7, rel=1e-14)
        assert ed.tr == pytest.approx(12 / 7, rel=1e-14)
        assert ed.det == pytest.approx(72 / 49, rel=1e-14)

    def test_slow_eigenvalue_high_mode(self):
        # damping only in u: smallest eigenvalue ~ 1/(d xi^2) at high wavenumber
        ed = eigen(preset("bbm-bbm", "partial-u"), 100.0)
        assert ed.lambda1.real == pytest.approx(6.0e-4, rel=0.05)
        assert ed.lambda1.imag == 0

    def test_vietas_formulas(self):
        rng = np.random.default_rng(5)
        for spec in random_specs(rng, 20):
            xi = rng.uniform(-50, 50, size=200)
            ed = eigen(spec, xi)
            np.testing.assert_allclose((ed.lambda1 + ed.lambda2).real, ed.tr,
                                       rtol=1e-10, atol=1e-12)
            np.testing.assert_allclose((ed.lambda1 * ed.lambda2).real, ed.det,
                                       rtol=1e-10, atol=1e-12)

    def test_perturbation_range_equal_real_parts(self):
        rng = np.random.default_rng(6)
        for spec in random_specs(rng, 10):
            xi = rng.uniform(-50, 50, size=500)
            ed = eigen(spec, xi)
            mask = ed.delta <= 0
            np.testing.assert_allclose(ed.lambda1.real[mask], 0.5 * ed.tr[mask],
                                       rtol=0, atol=1e-10)
            np.testing.assert_allclose(ed.lambda2.real[mask], 0.5 * ed.tr[mask],
                                       rtol=0, atol=1e-10)

    def test_partial_u_direct_root_formula(self):
        # with damping only in u and delta > 0:
        #   2 lambda1 = epsilon (1 - sqrt(1 - 4 xi^2 sigma^2/epsilon^2))
        rng = np.random.default_rng(8)
        specs = [make_spec(*s.coefficients, diss=Dissipation.PARTIAL_U)
                 for s in random_c1_specs(rng, 10)]
        for spec in specs:
            xi = rng.uniform(0.1, 50, size=300)
            ed = eigen(spec, xi)
            m = multipliers(spec, xi)
            mask = ed.delta > 0
            if not np.any(mask):
                continue
            eps = m.epsilon[mask]
            ratio = 4 * (xi[mask] * m.sigma[mask]) ** 2 / eps**2
            expected = 0.5 * eps * (1 - np.sqrt(1 - ratio))
            np.testing.assert_allclose(ed.lambda1.real[mask], expected,
                                       rtol=1e-8, atol=1e-13)


class TestSemigroupNorms:
    def test_identity_at_t_zero(self):
        assert semigroup_norm_exact(preset("bbm-bbm"), 3.7, 0.0) == pytest.approx(1.0)

    def test_bound_is_sqrt2_at_t_zero(self):
        assert semigroup_norm_bound(preset("bbm-bbm"), 3.7, 0.0) == pytest.approx(
            math.sqrt(2.0))

    def test_bound_at_origin(self):
        assert semigroup_norm_bound(preset("bbm-bbm"), 0.0, 5.0) == pytest.approx(
            math.sqrt(2.0))

    def test_normal_case_exact(self):
        # for b = d, a = c = 0 the matrix is alpha*I + skew, hence normal
        spec = preset("bbm-bbm")
        assert semigroup_norm_exact(spec, 1.0, 1.0) == pytest.approx(
            math.exp(-6 / 7), rel=1e-12)
        assert semigroup_norm_bound(spec, 1.0, 1.0) == pytest.approx(
            math.sqrt(2.0) * math.exp(-6 / 7), rel=1e-12)

    def test_diagonal_case_exact(self):
        spec = preset("kdv-kdv")
        assert semigroup_norm_exact(spec, math.sqrt(6.0), 1.0) == pytest.approx(
            math.exp(-6.0), rel=1e-10)

    def test_confluent_limit_matches_series(self):
        # time chosen so |q| crosses the small-q branch
        spec = preset("bbm-bbm", "partial-u")
        xi = 2.0  # delta = 0 exactly for b = d = 1/6
        for t in (1e-9, 1e-3, 0.1, 1.0, 10.0):
            n = semigroup_norm_exact(spec, xi, t)
            b = semigroup_norm_bound(spec, xi, t)
            assert np.isfinite(n) and np.isfinite(b)
            assert n <= b + 1e-9

    def test_contraction(self):
        rng = np.random.default_rng(9)
        for spec in random_specs(rng, 20):
            xi = rng.uniform(-50, 50, size=100)
            t = rng.uniform(0, 100, size=100)
            n = semigroup_norm_exact(spec, xi, t)
            assert np.all(n <= 1.0 + 1e-12)

    def test_exact_dominated_by_bound_bulk(self):
        rng = np.random.default_rng(10)
        for spec in random_specs(rng, 40):
            xi = rng.uniform(-50, 50, size=250)
            t = rng.uniform(0, 100, size=250)
            exact = semigroup_norm_exact(spec, xi, t)
            bound = semigroup_norm_bound(spec, xi, t)
            assert np.all(exact <= bound + 1e-9)

    def test_exact_at_least_spectral_floor(self):
        rng = np.random.default_rng(12)
        for spec in random_specs(rng, 10):
            xi = rng.uniform(-30, 30, size=100)
            t = rng.uniform(0, 20, size=100)
            ed = eigen(spec, xi)
            floor = np.exp(-t * ed.lambda1.real)
            n = semigroup_norm_exact(spec, xi, t)
            assert np.all(n >= floor - 1e-10)

    def test_large_arguments_stay_finite(self):
        spec = preset("kdv-kdv")
        n = semigroup_norm_exact(spec, 50.0, 100.0)
        b = semigroup_norm_bound(spec, 50.0, 100.0)
        assert np.isfinite(n) and np.isfinite(b)
        assert n >= 0 and b >= 0


class TestClassify:
    def test_corollary_table(self):
        for diss in ("complete", "partial-u"):
            assert classify(preset("classical-boussinesq", diss)).klass is Klass.BBM_BURGERS
            assert classify(preset("bona-smith", diss)).klass is Klass.BBM_BURGERS
            assert classify(preset("kdv-bbm", diss)).klass is Klass.BBM_BURGERS
            assert classify(preset("bbm-kdv", diss)).klass is Klass.BBM_BURGERS
        assert classify(preset("kdv-kdv")).klass is Klass.KDV_BURGERS
        assert classify(preset("bbm-bbm", "partial-u")).klass is Klass.SLOW_DECAY
        assert classify(preset("bbm-bbm")).klass is Klass.BBM_BURGERS

    def test_weakly_dispersive_with_negative_a_or_c(self):
        for coeffs in ((-1 / 6, 1 / 6, 0.0, 1 / 3), (0.0, 1 / 6, -1 / 6, 1 / 3)):
            for diss in ("complete", "partial-u"):
                spec = make_spec(*coeffs, diss=diss)
                assert classify(spec).klass is Klass.BBM_BURGERS

    def test_partial_eta_mirror(self):
        # swapping the damped equation swaps the roles of alpha and epsilon
        assert classify(preset("bbm-bbm", "partial-eta")).klass is Klass.SLOW_DECAY
        assert classify(preset("kdv-kdv", "partial-eta")).klass is Klass.KDV_BURGERS
        assert classify(preset("bona-smith", "partial-eta")).klass is Klass.BBM_BURGERS

    def test_threshold_invariants(self):
        rng = np.random.default_rng(13)
        for spec in random_specs(rng, 15):
            cl = classify(spec)
            assert 0 < cl.delta_m <= cl.delta_M
            if spec.constraint == "C2":
                assert cl.resonance == pytest.approx(spec.a ** -0.5)
                assert cl.delta_m <= cl.resonance <= cl.delta_M
            else:
                assert cl.resonance is None

    def test_classification_deterministic(self):
        a = classify(preset("bona-smith", "partial-u"))
        b = classify(preset("bona-smith", "partial-u"))
        assert a == b


class TestLowFreqThreshold:
    def test_bbm_bbm_complete(self):
        # alpha = epsilon kills the discriminant; the trace ratio fails at sqrt(6)
        delta_m = low_freq_threshold(preset("bbm-bbm"))
        assert delta_m >= 0.5
        assert delta_m == pytest.approx(math.sqrt(6.0), abs=2e-3)

    def test_positive_for_all_presets(self):
        from bousslab.systems import PRESETS
        for name in PRESETS:
            for diss in ("complete", "partial-u", "partial-eta"):
                assert low_freq_threshold(preset(name, diss)) > 0

    def test_kdv_kdv_partial_sign_change_before_resonance(self):
        # discriminant first vanishes at the positive root of xi^2 + 3 xi - 6
        delta_m = low_freq_threshold(preset("kdv-kdv", "partial-u"))
        root = (-3.0 + math.sqrt(33.0)) / 2.0
        assert delta_m == pytest.approx(root, abs=2e-3)
        assert delta_m < math.sqrt(6.0)

    def test_kdv_kdv_complete_passes_whole_grid(self):
        # with complete damping delta = -4 xi^2 sigma^2 <= 0 and the trace
        # ratio is exactly 1, so the scan runs to its upper end
        assert low_freq_threshold(preset("kdv-kdv")) == pytest.approx(10.0)


class TestDichotomy:
    @staticmethod
    def _beta_hat(spec, cl, scale):
        ts = np.array([1.0, 10.0, 100.0])
        xs = np.linspace(cl.delta_m, 10.0 * cl.delta_M, 37)
        best = np.inf
        for t in ts:
            n = np.maximum(semigroup_norm_exact(spec, xs, t), 1e-300)
            best = min(best, float(np.min(-np.log(n) / (scale(xs) * t))))
        return best

    def test_kdv_burgers_gaussian_rate(self):
        for spec in (preset("kdv-kdv"), preset("kdv-kdv", "partial-u")):
            cl = classify(spec)
            beta = self._beta_hat(spec, cl, lambda x: x * x)
            assert beta > 0

    def test_bbm_burgers_uniform_rate(self):
        for name in ("bbm-bbm", "bona-smith", "classical-boussinesq", "kdv-bbm"):
            spec = preset(name)
            cl = classify(spec)
            beta = self._beta_hat(spec, cl, lambda x: np.ones_like(x))
            assert beta > 0

    def test_slow_decay_lower_bound(self):
        # damping only in u leaves high modes decaying no faster than
        # exp(-beta t / xi^2); check with beta = 1.5/d against the exact norm
        spec = preset("bbm-bbm", "partial-u")
        beta = 1.5 / spec.d
        for xi0 in (10.0, 20.0):
            for t in (10.0, 30.0, 50.0):
                n = semigroup_norm_exact(spec, xi0, t)
                assert n >= 0.5 * math.exp(-beta * t / xi0**2)


class TestC2Resonance:
    def test_determinant_vanishes_under_partial_u(self):
        spec = preset("kdv-kdv", "partial-u")
        ed = eigen(spec, spec.a ** -0.5)
        assert abs(ed.det) < 1e-25
        assert abs(ed.lambda1) < 1e-12

    def test_undamped_direction(self):
        spec = preset("kdv-kdv", "partial-u")
        r = spec.a ** -0.5
        for t in (0.5, 5.0, 50.0):
            assert semigroup_norm_exact(spec, r, t) >= 1.0 / math.sqrt(2.0)

    def test_complete_damps_resonance(self):
        spec = preset("kdv-kdv")
        assert semigroup_norm_exact(spec, spec.a ** -0.5, 1.0) < 1e-2


class TestPropagator:
    def test_entries_identity_at_t_zero(self):
        e11, e12, e21, e22 = propagator_entries(preset("bbm-bbm"), 2.0, 0.0)
        assert e11 == 1.0 and e22 == 1.0
        assert e12 == 0.0 and e21 == 0.0

    def test_semigroup_property_entrywise(self):
        rng = np.random.default_rng(21)
        for spec in random_specs(rng, 10):
            xi = rng.uniform(-20, 20, size=50)
            a = propagator_entries(spec, xi, 0.3)
            b = propagator_entries(spec, xi, 0.7)
            c = propagator_entries(spec, xi, 1.0)
            prod = (a[0] * b[0] + a[1] * b[2],
                    a[0] * b[1] + a[1] * b[3],
                    a[2] * b[0] + a[3] * b[2],
                    a[2] * b[1] + a[3] * b[3])
            for x, y in zip(prod, c):
                np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-14)
