"""Weighted dt/t norms, profiles and tail completion."""

import math
import warnings

import numpy as np
import pytest

from kinterp.errors import InvariantError
from kinterp.grid import FULL, UNIT, GeometricGrid, default_grid
from kinterp.norms import (EmptyIntervalWarning, HomNorms, band_profile,
                           edge_mass_fraction, hom_norm, hom_norm_sv,
                           inner_profile_lower, inner_profile_upper,
                           outer_norm, sv_profile, weighted_integrand)
from kinterp.sampling import chi, chi_cutoff, peetre_k, power_log
from kinterp.sv import INF, LqSpace, log_pow, ONE, eval_sv

UNIT_G = default_grid(UNIT, 512)
FULL_G = default_grid(FULL, 512)


class TestHomNorm:
    def test_constant_l1(self):
        v = np.ones(UNIT_G.n)
        for a, b in [(1e-6, 1e-2), (1e-4, 0.5), (UNIT_G.t_min, UNIT_G.t_max)]:
            assert hom_norm(UNIT_G, v, 1.0, a, b) == pytest.approx(math.log(b / a), rel=1e-12)

    def test_sup_at_right_endpoint(self):
        # g(t) = t over (0, 1): essential sup 1, attained at the last node
        assert hom_norm(UNIT_G, UNIT_G.t, INF, 0.0, 1.0) == pytest.approx(1.0)

    def test_log_weight_head(self):
        # closed-form antiderivative oracle: 1/2 within 1e-4
        val = hom_norm_sv(UNIT_G, log_pow(-2), 1.0, 0.0, math.exp(-1))
        assert val == pytest.approx(0.5, abs=1e-4)

    def test_empty_interval_warns(self):
        with pytest.warns(EmptyIntervalWarning):
            assert hom_norm(UNIT_G, np.ones(UNIT_G.n), 1.0, 0.5, 0.5) == 0.0

    def test_nan_rejected(self):
        v = np.ones(UNIT_G.n)
        v[3] = math.nan
        with pytest.raises(InvariantError):
            hom_norm(UNIT_G, v, 1.0, 0.0, 1.0)

    def test_lattice_property(self):
        rng = np.random.default_rng(3)
        g1 = rng.uniform(0, 1, UNIT_G.n)
        g2 = g1 + rng.uniform(0, 1, UNIT_G.n)
        for q in (1.0, 2.0, 3.5, INF):
            for lo, hi in [(0.0, 1.0), (1e-5, 1e-2)]:
                assert hom_norm(UNIT_G, g1, q, lo, hi) <= hom_norm(UNIT_G, g2, q, lo, hi) + 1e-15


class TestProfiles:
    def test_constant_sup_profile(self):
        v = np.ones(UNIT_G.n)
        np.testing.assert_array_equal(inner_profile_lower(UNIT_G, v, INF), 1.0)
        np.testing.assert_array_equal(inner_profile_upper(UNIT_G, v, INF), 1.0)

    def test_constant_l1_prefix(self):
        v = np.ones(UNIT_G.n)
        prof = inner_profile_lower(UNIT_G, v, 1.0)
        expected = np.log(UNIT_G.t / UNIT_G.t_min)
        np.testing.assert_allclose(prof, expected, rtol=1e-10, atol=1e-14)

    def test_profile_matches_hom_norm_exactly(self):
        rng = np.random.default_rng(5)
        v = rng.uniform(0.1, 2.0, UNIT_G.n)
        for q in (1.0, 2.0, INF):
            low = inner_profile_lower(UNIT_G, v, q)
            up = inner_profile_upper(UNIT_G, v, q)
            # sup profiles include the anchoring node, so the k = 0 / k = n-1
            # endpoints coincide with hom_norm only for q < inf
            ks = (1, 17, 200, UNIT_G.n - 2) if q == INF else (0, 1, 17, 200, UNIT_G.n - 1)
            for k in ks:
                assert low[k] == pytest.approx(
                    hom_norm(UNIT_G, v, q, UNIT_G.t_min, UNIT_G.t[k]), rel=1e-12, abs=1e-300)
                assert up[k] == pytest.approx(
                    hom_norm(UNIT_G, v, q, UNIT_G.t[k], UNIT_G.t_max), rel=1e-12, abs=1e-300)

    def test_windows_match_hom_norm(self):
        rng = np.random.default_rng(6)
        v = rng.uniform(0.1, 2.0, UNIT_G.n)
        for q in (1.0, 2.5, INF):
            h = HomNorms(UNIT_G, v, q)
            for i, j in [(0, 10), (5, 400), (100, 101), (17, 17)]:
                direct = h.window(i, j)
                if i < j:
                    assert direct == pytest.approx(
                        hom_norm(UNIT_G, v, q, UNIT_G.t[i], UNIT_G.t[j]), rel=1e-12)
                else:
                    assert direct == 0.0
            for m in (3, 50, 300):
                lw = h.left_windows(m)
                rw = h.right_windows(m)
                for i in (0, m // 2, m):
                    assert lw[i] == pytest.approx(h.window(i, m), rel=1e-12, abs=1e-300)
                for j in (m, m + 5, UNIT_G.n - 1):
                    assert rw[j - m] == pytest.approx(h.window(m, j), rel=1e-12, abs=1e-300)


class TestWeightedIntegrand:
    def test_identity(self):
        f = power_log(UNIT_G, 2.0)
        out = weighted_integrand(f, 0.0, None)
        np.testing.assert_array_equal(out.values, f.values)

    def test_linear_k(self):
        k = peetre_k(chi(FULL_G, FULL_G.t_max))  # K(t) = t on the whole grid
        out = weighted_integrand(k, 1.0, None)
        np.testing.assert_allclose(out.values, 1.0, rtol=1e-12)

    def test_direct_arithmetic(self):
        k = peetre_k(chi(FULL_G, 1.0))
        a = chi_cutoff(FULL_G, 1.0)
        out = weighted_integrand(k, 0.5, log_pow(1))
        i = FULL_G.node_index(math.exp(-1))
        t = float(FULL_G.t[i])
        ell = 1.0 + abs(math.log(t))
        assert out.values[i] == pytest.approx(t ** -0.5 * ell * min(t, a), rel=1e-10)


class TestBandProfile:
    def test_constant_band(self):
        v = np.ones(FULL_G.n)
        band = band_profile(FULL_G, v, 1.0, math.log(2.0))
        ok = np.isfinite(band)
        np.testing.assert_allclose(band[ok], math.log(2.0), rtol=1e-10)

    def test_power_band_oracle(self):
        t = FULL_G.t
        band = band_profile(FULL_G, t, 1.0, math.log(2.0))
        ok = np.isfinite(band)
        np.testing.assert_allclose(band[ok], t[ok], rtol=5e-4)  # integral t..2t of s ds/s = t


class TestTailCompletion:
    def test_lower_profile_exact_for_logpow(self):
        from kinterp.sv import lq_log_head
        grid = default_grid(UNIT, 2048)
        prof = sv_profile(grid, log_pow(-2), 1.0, "lower")
        for u in (1e-8, 1e-5, 1e-2, 0.5):
            i = grid.node_index(u)
            assert prof[i] == pytest.approx(lq_log_head(-2, 1.0, float(grid.t[i])), rel=2e-4)

    def test_divergent_lower(self):
        grid = default_grid(UNIT, 128)
        assert np.all(np.isinf(sv_profile(grid, ONE, 1.0, "lower")))

    def test_upper_profile_full_domain(self):
        from kinterp.sv import lq_log_head
        grid = default_grid(FULL, 2048)
        prof = sv_profile(grid, log_pow(-2), 1.0, "upper")
        # by t -> 1/t symmetry the upper norm at u equals the head at 1/u
        for u in (1e2, 1e5):
            i = grid.node_index(u)
            assert prof[i] == pytest.approx(lq_log_head(-2, 1.0, 1.0 / float(grid.t[i])), rel=2e-4)

    def test_edge_mass_flags_slow_decay(self):
        grid = default_grid(UNIT, 512)
        heavy = (1 + np.abs(np.log(grid.t))) ** -1.0
        light = grid.t ** 0.5
        assert edge_mass_fraction(grid, heavy, 1.0) > 0.01
        assert edge_mass_fraction(grid, light, 1.0) < 0.01


class TestOuterNorm:
    def test_unit_vs_full_interval(self):
        # the (0, 1) interval carries the full first cell and half the last
        v = np.ones(UNIT_G.n)
        assert outer_norm(UNIT_G, v, 1.0) == pytest.approx(
            (UNIT_G.n - 0.5) * UNIT_G.dlog, rel=1e-12)
        vf = np.ones(FULL_G.n)
        assert outer_norm(FULL_G, vf, 1.0) == pytest.approx(
            FULL_G.n * FULL_G.dlog, rel=1e-12)
