"""Slowly varying calculus: evaluation, algebra, asymptotics, membership."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinterp.errors import DomainError, ParameterError, TableMissError
from kinterp.grid import GeometricGrid, default_grid, FULL, UNIT
from kinterp.norms import sv_profile
from kinterp.sv import (Bar, ComposePower, Const, Envelope, LogPow, ONE,
                        eval_sv, is_slowly_varying, log_exponent, log_pow,
                        lognorm_asymptotic, lq_log_band, lq_log_head, sv_bar,
                        sv_compose_power, sv_defect, sv_mul, sv_pow)

INF = math.inf


class TestEval:
    def test_ell_at_one(self):
        assert eval_sv(log_pow(2), 1.0) == 1.0

    def test_ell_at_inv_e(self):
        assert eval_sv(log_pow(1), math.exp(-1)) == pytest.approx(2.0, rel=1e-15)

    def test_bar_of_broken_log(self):
        # b(t) = inner(1/t); at t = e the inner sees e^{-1} <= 1, branch alpha
        e = sv_bar(log_pow(1, 2))
        assert eval_sv(e, math.e) == pytest.approx(2.0 ** 1, rel=1e-12)

    def test_broken_log_branches(self):
        e = log_pow(1, -2)
        assert eval_sv(e, math.exp(-1)) == pytest.approx(2.0)
        assert eval_sv(e, math.exp(3)) == pytest.approx(4.0 ** -2)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            eval_sv(log_pow(1), 0.0)
        with pytest.raises(DomainError):
            eval_sv(log_pow(1), -2.0)

    def test_vectorized(self):
        t = np.array([0.1, 1.0, 10.0])
        np.testing.assert_allclose(eval_sv(log_pow(1), t), 1 + np.abs(np.log(t)))


class TestAlgebra:
    def test_mul_cancellation(self):
        e = sv_mul(log_pow(1), log_pow(-1))
        for t in (1e-6, 0.3, 1.0, 7.0, 1e5):
            assert eval_sv(e, t) == pytest.approx(1.0, rel=1e-12)

    def test_pow_sqrt(self):
        e = sv_pow(log_pow(2), 0.5)
        assert eval_sv(e, math.exp(-1)) == pytest.approx(2.0, rel=1e-12)

    def test_bar_involution(self):
        e = log_pow(3)
        assert sv_bar(sv_bar(e)) == e
        nested = sv_bar(sv_bar(sv_mul(log_pow(1, -2), Const(3.0))))
        t = np.geomspace(1e-4, 1e4, 41)
        np.testing.assert_allclose(eval_sv(nested, t),
                                   eval_sv(sv_mul(log_pow(1, -2), Const(3.0)), t),
                                   rtol=1e-12)

    def test_product_semantics(self):
        e1, e2 = log_pow(1.5), log_pow(-0.5, 2)
        prod = sv_mul(e1, e2)
        t = np.geomspace(1e-5, 1e5, 31)
        np.testing.assert_allclose(eval_sv(prod, t),
                                   np.asarray(eval_sv(e1, t)) * np.asarray(eval_sv(e2, t)),
                                   rtol=1e-13)

    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.01, 100))
    @settings(max_examples=50, deadline=None)
    def test_pow_pointwise(self, alpha, r, t):
        e = sv_pow(log_pow(alpha), r)
        expected = float(eval_sv(log_pow(alpha), t)) ** r
        assert eval_sv(e, t) == pytest.approx(expected, rel=1e-10)


class TestComposePower:
    def test_constant_outer(self):
        e = sv_compose_power(ONE, 2.0, log_pow(5))
        assert eval_sv(e, 0.37) == 1.0

    def test_reduces_to_ell(self):
        e = sv_compose_power(log_pow(1), 1.0, ONE)
        assert eval_sv(e, math.exp(-1)) == pytest.approx(2.0, rel=1e-12)

    def test_two_step_oracle(self):
        # compose(outer, g, inner)(u) computed against explicit two-step eval
        outer, gamma, inner = log_pow(-0.375), 0.25, log_pow(-0.25)
        e = sv_compose_power(outer, gamma, inner)
        for u in (1e-6, 1e-3, 0.1, 0.9):
            arg = u ** gamma * float(eval_sv(inner, u))
            assert eval_sv(e, u) == pytest.approx(float(eval_sv(outer, arg)), rel=1e-13)

    def test_rejects_nonpositive_gamma(self):
        with pytest.raises(ParameterError):
            sv_compose_power(log_pow(1), 0.0, ONE)
        with pytest.raises(ParameterError):
            sv_compose_power(log_pow(1), -1.0, ONE)

    def test_result_is_slowly_varying(self):
        grid = default_grid(UNIT, 512)
        e = sv_compose_power(log_pow(-0.375), 0.25, log_pow(-0.25))
        assert is_slowly_varying(e, grid)


class TestEnvelope:
    def test_interpolation_and_miss(self):
        lu = np.linspace(-5.0, 0.0, 11)
        env = Envelope("t", lu, np.exp(0.1 * lu) + 1.0)
        mid = math.exp(-2.5)
        assert float(eval_sv(env, mid)) > 0
        with pytest.raises(TableMissError):
            eval_sv(env, math.exp(1.0))

    def test_extension(self):
        lu = np.linspace(-5.0, 0.0, 11)
        env = Envelope("t", lu, np.full(11, 2.0), extend=True)
        assert eval_sv(env, math.exp(2.0)) == pytest.approx(2.0)


class TestSandwich:
    @staticmethod
    def _sandwich_constants(e, n, eps):
        # C_eps = sup b(st) / (max(s^e, s^-e) b(t)), c_eps the matching inf
        grid = default_grid(FULL, n)
        bt = np.asarray(eval_sv(e, grid.t))
        svals = np.geomspace(1e-3, 1e3, 13)
        hi, lo = 0.0, math.inf
        for s in svals:
            st_vals = np.asarray(eval_sv(e, s * grid.t))
            hi = max(hi, float(np.max(st_vals / (bt * max(s ** eps, s ** -eps)))))
            lo = min(lo, float(np.min(st_vals / (bt * min(s ** eps, s ** -eps)))))
        return lo, hi

    def test_sv_sandwich_property(self):
        # c_eps min(s^-e, s^e) b(t) <= b(st) <= C_eps max(s^e, s^-e) b(t)
        # with finite constants whose values are stable under refinement
        exprs = [log_pow(2), log_pow(-1.5), sv_mul(log_pow(1, -1), Const(2.0)),
                 sv_compose_power(log_pow(1), 0.5, ONE)]
        for e in exprs:
            for eps in (0.1, 0.5):
                lo1, hi1 = self._sandwich_constants(e, 256, eps)
                lo2, hi2 = self._sandwich_constants(e, 512, eps)
                assert 0.0 < lo1 and math.isfinite(hi1)
                assert hi2 <= 1.5 * hi1
                assert lo2 >= lo1 / 1.5

    def test_membership(self):
        grid = default_grid(FULL, 256)
        assert is_slowly_varying(log_pow(3, -2), grid)
        assert is_slowly_varying(sv_pow(log_pow(2), -1.5), grid)
        # a genuine power is not slowly varying
        class FakePower(Const):
            def _eval(self, t):
                return t ** 0.3
        assert not is_slowly_varying(FakePower(1.0), grid)

    def test_monotone_defect_finite_and_stable(self):
        from kinterp.sv import sv_monotone_defect
        d1 = sv_monotone_defect(log_pow(2), default_grid(FULL, 256))
        d2 = sv_monotone_defect(log_pow(2), default_grid(FULL, 512))
        assert 0.0 < d1 < 1.0
        assert abs(d2 - d1) < 0.05


class TestLogNorms:
    def test_head_closed_form_half(self):
        # integral_2^inf x^-2 dx = 1/2 after x = 1 - log t
        assert lq_log_head(-2, 1.0, math.exp(-1)) == pytest.approx(0.5, rel=1e-14)

    def test_head_against_quadrature(self):
        # independent oracle after the substitution x = 1 - log t
        from scipy.integrate import quad
        val, err = quad(lambda x: x ** -2, 2.0, math.inf)
        assert lq_log_head(-2, 1.0, math.exp(-1)) == pytest.approx(val, rel=1e-9)

    def test_band_against_quadrature(self):
        from scipy.integrate import quad
        for sigma, q, u, w in [(-2, 1.0, 0.01, 0.5), (1.0, 2.0, 1e-4, 1.0), (-1, 1.0, 0.1, 1.0)]:
            val, _ = quad(lambda x: x ** (sigma * q), 1 - math.log(w), 1 - math.log(u))
            assert lq_log_band(sigma, q, u, w) == pytest.approx(val ** (1 / q), rel=1e-9)

    def test_divergent_head(self):
        assert lq_log_head(0, 1.0, 0.5) == INF
        assert lq_log_head(1.0, INF, 0.5) == INF

    def test_numeric_profile_matches_closed_form(self):
        # tail-completed quadrature within 1 + 1e-6 of the antiderivative
        grid = default_grid(UNIT, 8192)
        prof = sv_profile(grid, log_pow(-2), 1.0, "lower")
        for u in (1e-7, 1e-4, 0.01, math.exp(-1)):
            i = grid.node_index(u)
            exact = lq_log_head(-2, 1.0, float(grid.t[i]))
            assert prof[i] == pytest.approx(exact, rel=1e-6)


class TestAsymptotic:
    def test_lower_example(self):
        e = lognorm_asymptotic(-2, 1.0, "lower")
        assert isinstance(e, LogPow) and float(e.alpha) == -1.0

    def test_upper_example(self):
        e = lognorm_asymptotic(0, 1.0, "upper")
        assert float(e.alpha) == 1.0

    def test_precondition_errors(self):
        with pytest.raises(ParameterError, match="sigma \\+ 1/q < 0"):
            lognorm_asymptotic(-0.5, 2.0, "lower")
        with pytest.raises(ParameterError, match="sigma \\+ 1/q > 0"):
            lognorm_asymptotic(-2, 1.0, "upper")
        with pytest.raises(ParameterError, match="sigma <= 0"):
            lognorm_asymptotic(1.0, INF, "lower")

    def test_ratio_bounded_over_sweep(self):
        # numeric / asymptotic spread <= 4 over u in (1e-8, 1/2)
        grid = default_grid(UNIT, 2048)
        half = int(np.searchsorted(grid.t, 0.5))
        for sigma, q in [(-2, 1.0), (-1.5, 2.0), (-0.5, INF)]:
            prof = sv_profile(grid, log_pow(sigma), q, "lower")
            asym = np.asarray(eval_sv(lognorm_asymptotic(sigma, q, "lower"), grid.t))
            r = prof[:half] / asym[:half]
            assert r.max() / r.min() <= 4.0


class TestLogExponent:
    def test_arithmetic(self):
        from fractions import Fraction
        e = sv_mul(sv_pow(log_pow(Fraction(1, 2)), Fraction(3)), log_pow(Fraction(-1, 4), 2))
        assert log_exponent(e, 0) == Fraction(5, 4)
        assert log_exponent(e, INF) == Fraction(7, 2)
        assert log_exponent(sv_bar(e), 0) == Fraction(7, 2)

    def test_compose_rule(self):
        e = sv_compose_power(log_pow(-3), 0.25, log_pow(2))
        assert log_exponent(e, 0) == -3
