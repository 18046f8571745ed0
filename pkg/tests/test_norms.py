"""Oscillation norms, weight constants, maximal functions vs. scan oracles."""

import math

import numpy as np
import pytest

from dyadlab.lattice import DyadicInterval, HaarFunction, TruncatedLattice, Window, lattice
from dyadlab.norms import (
    WeightVector,
    ap_constant,
    bmo2_dyadic,
    bmo_dyadic,
    bmo_r,
    bmo_shifted_lower,
    cmo_distance,
    dyadic_maximal,
    phi,
    sharp_maximal,
    weighted_lp_norm,
)
from dyadlab.operators import Exponents
from dyadlab.stepfn import StepFunction

from oracles import bmo_scan, maximal_scan

UNIT = DyadicInterval.unit()
H01 = StepFunction.haar(HaarFunction.standard(UNIT))
CHI01 = StepFunction.indicator(UNIT)


def window_cells(lat):
    return lat.window.cell_count() << (lat.coarsest - lat.finest)


def const_on(lat, c):
    n = window_cells(lat)
    return StepFunction.on_window(lat.window, lat.finest, np.full(n, float(c)))


def random_step(rng, lat, bits=10):
    n = lat.window.cell_count() << (lat.coarsest - lat.finest)
    values = rng.integers(-(1 << bits), 1 << bits, size=n) / float(1 << bits)
    return StepFunction.on_window(lat.window, lat.finest, values)


def hat(resolution=-6, half_width=1.0, center=0.0, height=1.0):
    """Step sampling (exact cell averages) of the tent max(0, 1 - |x-c|/w)."""
    side = 2.0 ** resolution
    lo = math.floor((center - half_width) / side)
    hi = math.ceil((center + half_width) / side)
    edges = np.arange(lo, hi + 1, dtype=np.float64) * side

    def antideriv(x):
        x = np.clip(x, center - half_width, center + half_width)
        u = np.abs(x - center)
        base = x - center
        return height * (base - np.sign(base) * u * u / (2 * half_width))

    cell_avgs = (antideriv(edges[1:]) - antideriv(edges[:-1])) / side
    return StepFunction(resolution, (lo,), (hi,), cell_avgs)


class TestBmoDyadic:
    def test_constant_is_zero(self):
        lat = lattice(K=1, L=3)
        c = StepFunction.on_window(lat.window, lat.coarsest, np.full(2, 4.5))
        assert bmo_dyadic(c, lat).value == 0.0

    def test_haar_is_one_with_maximizer(self):
        lat = lattice(K=1, L=3)
        rep = bmo_dyadic(H01, lat)
        assert rep.value == 1.0
        assert rep.maximizer == UNIT

    def test_matches_scan_oracle(self):
        lat = lattice(K=1, L=3)
        rng = np.random.default_rng(101)
        for _ in range(5):
            b = random_step(rng, lat)
            val, _ = bmo_scan(b, lat)
            assert bmo_dyadic(b, lat).value == pytest.approx(val, rel=1e-12)

    def test_homogeneity_and_shift_invariance(self):
        lat = lattice(K=1, L=3)
        b = random_step(np.random.default_rng(7), lat)
        c = StepFunction.on_window(lat.window, lat.coarsest, np.full(2, 2.25))
        assert bmo_dyadic(b.scale_by(-3.0), lat).value == pytest.approx(
            3.0 * bmo_dyadic(b, lat).value, rel=1e-12)
        assert bmo_dyadic(b + c, lat).value == pytest.approx(
            bmo_dyadic(b, lat).value, rel=1e-12)


class TestBmoR:
    def test_rejects_r_at_most_one(self):
        with pytest.raises(ValueError):
            bmo_r(H01, 1.0, lattice(K=1, L=2))

    def test_haar_r2(self):
        rep = bmo_r(H01, 2.0, lattice(K=1, L=3))
        assert rep.value == pytest.approx(1.0, abs=1e-14)

    def test_jensen_dominates_l1_oscillation(self):
        lat = lattice(K=1, L=3)
        rng = np.random.default_rng(31)
        for r in (1.5, 2.0, 3.0):
            b = random_step(rng, lat)
            assert bmo_r(b, r, lat).value >= bmo_dyadic(b, lat).value - 1e-12

    def test_matches_scan_oracle(self):
        lat = lattice(K=1, L=3)
        b = random_step(np.random.default_rng(33), lat)
        val, _ = bmo_scan(b, lat, r=2.0)
        assert bmo_r(b, 2.0, lat).value == pytest.approx(val, rel=1e-12)


class TestBmo2:
    def test_constant_is_zero(self):
        lat = lattice(K=1, L=3)
        c = StepFunction.on_window(lat.window, lat.coarsest, np.full(2, 1.5))
        assert bmo2_dyadic(c, lat).value == 0.0

    def test_haar_display_value(self):
        # at I = [0,1): (1/|I|) * <b,h_I>^2/|I|^2 = 1
        rep = bmo2_dyadic(H01, lattice(K=1, L=3))
        assert rep.value == pytest.approx(1.0, abs=1e-14)
        assert rep.maximizer == UNIT

    def test_distant_small_bump_leaves_value(self):
        lat = lattice(K=2, L=3)
        bump = StepFunction.haar(HaarFunction.standard(DyadicInterval(1, (1,)))).scale_by(0.1)
        base = bmo2_dyadic(H01, lat).value
        assert bmo2_dyadic(H01 + bump, lat).value == pytest.approx(base, rel=1e-12)

    def test_standard_variant_matches_r2_norm(self):
        # the single-|J| variant is the Haar-side computation of the r = 2 norm
        lat = lattice(K=1, L=4)
        b = random_step(np.random.default_rng(55), lat)
        rep = bmo2_dyadic(b, lat)
        assert rep.extras["standard_value"] == pytest.approx(
            bmo_r(b, 2.0, lat).value, rel=1e-10)


class TestShiftedLower:
    def test_dominates_dyadic_scan(self):
        lat = lattice(K=1, L=5)
        b = random_step(np.random.default_rng(77), lat)
        assert bmo_shifted_lower(b, lat).value >= bmo_dyadic(b, lat).value - 1e-12

    def test_haar_unchanged(self):
        lat = lattice(K=1, L=5)
        rep = bmo_shifted_lower(H01.refine(-5), lat)
        assert rep.value == pytest.approx(1.0, abs=1e-12)


class TestCmoDistance:
    def test_sampled_hat_is_near_smooth_class(self):
        lat = lattice(K=1, L=10)
        b = hat(resolution=-10)
        assert cmo_distance(b, lat, smoothing_scales=(-3, -4, -5)) <= 0.05

    def test_step_across_window_stays_far(self):
        lat = lattice(K=1, L=6)
        b = StepFunction(-6, (-128,), (128,), np.concatenate(
            [np.zeros(128), np.ones(128)]))
        assert cmo_distance(b, lat) > 0.2

    def test_zero_symbol(self):
        lat = lattice(K=1, L=4)
        z = StepFunction.zero(-4, (-4,), (4,))
        assert cmo_distance(z, lat) == 0.0


class TestApConstant:
    def test_unit_weights_exactly_one(self):
        lat = lattice(K=1, L=3)
        one = const_on(lat, 1.0)
        for exps in (Exponents.of(2.0), Exponents.of(2.0, 2.0), Exponents.of(3.0, 1.5)):
            w = WeightVector((one,) * exps.m, exps)
            assert ap_constant(w, lat) == 1.0

    def test_bumped_weight_scan_value(self):
        lat = lattice(K=1, L=3)
        n = window_cells(lat)
        vals = np.ones(n)
        vals[n // 2:n // 2 + n // 4] = 2.0  # w = 2 on [0,1), 1 elsewhere on [-2,2)
        w1 = StepFunction.on_window(lat.window, lat.finest, vals)
        exps = Exponents.of(2.0)
        got = ap_constant(WeightVector((w1,), exps), lat)
        # brute-force scan: sup_I sqrt(<w>_I <1/w>_I), maximized at I = [0,2)
        best = 0.0
        for I in lat.enumerate():
            ind = StepFunction.indicator(I, lat.finest)
            avg_w = (w1 * ind).integral() / I.measure
            avg_winv = (w1.power(-1.0) * ind).integral() / I.measure
            best = max(best, math.sqrt(avg_w * avg_winv))
        assert got == pytest.approx(best, rel=1e-12)
        assert got == pytest.approx(math.sqrt(9.0 / 8.0), rel=1e-12)

    def test_random_weights_at_least_one(self):
        lat = lattice(K=1, L=3)
        rng = np.random.default_rng(13)
        for exps in (Exponents.of(2.0, 2.0), Exponents.of(3.0, 1.5)):
            n = window_cells(lat)
            ws = tuple(
                StepFunction.on_window(lat.window, lat.finest,
                                       rng.uniform(0.25, 4.0, size=n))
                for _ in range(exps.m)
            )
            c = ap_constant(WeightVector(ws, exps), lat)
            assert 1.0 - 1e-12 <= c < math.inf

    def test_unit_exponent_uses_essential_sup(self):
        lat = lattice(K=1, L=2)
        n = window_cells(lat)
        vals = np.full(n, 1.0)
        vals[0] = 0.25
        w1 = StepFunction.on_window(lat.window, lat.finest, vals)
        exps = Exponents.of(1.0)
        got = ap_constant(WeightVector((w1,), exps), lat)
        best = 0.0
        for I in lat.enumerate():
            ind = StepFunction.indicator(I, lat.finest)
            avg_w = (w1 * ind).integral() / I.measure
            sel = (w1 * ind).values
            wmin = sel[np.nonzero(sel)].min()
            best = max(best, avg_w * (1.0 / wmin))
        assert got == pytest.approx(best, rel=1e-12)


class TestMaximalFunctions:
    def test_indicator_profile(self):
        lat = lattice(K=1, L=3)
        M = dyadic_maximal(CHI01, lat, s=1.0)
        assert M.evaluate(0.5) == 1.0
        assert M.evaluate(1.5) == 0.5
        assert M.evaluate(-1.0) == 0.0

    def test_matches_containment_scan(self):
        lat = lattice(K=1, L=3)
        rng = np.random.default_rng(99)
        f = random_step(rng, lat)
        M = dyadic_maximal(f, lat, s=1.0)
        for x in (-1.9375, -0.0625, 0.3125, 1.8125):
            assert M.evaluate(x) == pytest.approx(maximal_scan(f, lat, x), rel=1e-12)

    def test_dominates_function_and_homogeneous(self):
        lat = lattice(K=1, L=3)
        f = random_step(np.random.default_rng(3), lat)
        M = dyadic_maximal(f, lat)
        assert np.all(M.values >= np.abs(f.values) - 1e-12)
        M3 = dyadic_maximal(f.scale_by(-3.0), lat)
        assert M3.max_abs_difference(M.scale_by(3.0)) < 1e-12

    def test_sharp_maximal_values(self):
        lat = lattice(K=1, L=3)
        sharp = sharp_maximal(H01, lat)
        assert sharp.evaluate(0.25) == 1.0
        assert sharp.evaluate(1.5) == 0.5
        c = StepFunction.on_window(lat.window, lat.coarsest, np.full(2, 2.0))
        assert sharp_maximal(c, lat).is_zero()

    def test_sharp_below_twice_maximal(self):
        lat = lattice(K=1, L=3)
        f = random_step(np.random.default_rng(21), lat)
        sharp = sharp_maximal(f, lat)
        M = dyadic_maximal(f, lat)
        assert np.all(sharp.values <= 2.0 * M.values + 1e-12)


class TestPhiAndWeightedNorm:
    def test_phi_values(self):
        assert phi(1.0) == 1.0
        assert phi(0.5) == 0.5
        assert phi(math.e) == pytest.approx(2.0 * math.e, rel=1e-13)
        assert phi(math.e, iterations=2) == pytest.approx(
            2 * math.e * (1 + math.log(2 * math.e)), rel=1e-13)
        with pytest.raises(ValueError):
            phi(-1.0)

    def test_weighted_norm_reduces_to_plain(self):
        lat = lattice(K=1, L=3)
        f = random_step(np.random.default_rng(5), lat)
        one = const_on(lat, 1.0)
        for p in (1.0, 2.0):
            assert weighted_lp_norm(f, p, one) == pytest.approx(f.lp_norm(p), rel=1e-13)

    def test_doubled_weight_on_support(self):
        lat = lattice(K=1, L=3)
        n = window_cells(lat)
        vals = np.ones(n)
        vals[n // 2:n // 2 + n // 4] = 2.0
        w = StepFunction.on_window(lat.window, lat.finest, vals)
        assert weighted_lp_norm(CHI01, 1.0, w) == 2.0

    def test_monotone_in_weight(self):
        lat = lattice(K=1, L=3)
        f = random_step(np.random.default_rng(9), lat)
        w1 = const_on(lat, 1.0)
        w2 = const_on(lat, 1.5)
        assert weighted_lp_norm(f, 2.0, w2) >= weighted_lp_norm(f, 2.0, w1)

    def test_rejects_nonpositive_weight(self):
        lat = lattice(K=1, L=3)
        w = StepFunction.on_window(lat.window, lat.finest, np.zeros(window_cells(lat)))
        with pytest.raises(ValueError):
            weighted_lp_norm(CHI01, 1.0, w)
