from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import F_CRITICAL, TYPE_I, TYPE_II, type_one, type_two
from stark_resonance.crossing import (
    THRESHOLD_RATIO,
    CrossingType,
    agmon_lengths,
    classify_numeric,
    classify_semiclassical,
    continued_pair,
    critical_field,
    semiclassical_fc,
    semiclassical_report,
)
from stark_resonance.errors import (
    InconclusiveError,
    InvalidParameters,
    NoBarrierError,
    NoSignChangeError,
)
from stark_resonance.kernel import ModelParams
from stark_resonance.resonances import track_branches

TYPE_I_SWEEP = np.linspace(0.15, 0.23, 41)
TYPE_II_SWEEP = np.linspace(0.26, 0.36, 41)
# ten ratios across both types, minus those inside the 2% threshold band
OUTSIDE_BAND = [r for r in np.linspace(1.1, 1.9, 10) if abs(r / THRESHOLD_RATIO - 1) > 0.02]


def ratio_params(ratio, F=0.2):
    return ModelParams.from_separation(-2.0 * ratio, -2.0, 5.0, F)


class TestAgmon:
    @given(st.floats(0.05, 0.4), st.floats(0.1, 3.0))
    def test_matches_barrier_integral(self, F, depth):
        # E sits `depth` below the potential at x2, so both barriers exist
        p = type_one(F)
        E = -F * p.x2 - depth
        inner, outer = agmon_lengths(p, E)
        V = lambda x: -F * x
        ref_inner = quad(lambda x: np.sqrt(V(x) - E), p.x1, p.x2, epsabs=0, epsrel=1e-12)[0]
        ref_outer = quad(lambda x: np.sqrt(V(x) - E), p.x2, -E / F, epsabs=0, epsrel=1e-12)[0]
        assert inner == pytest.approx(ref_inner, rel=1e-9)
        assert outer == pytest.approx(ref_outer, rel=1e-9)

    def test_outer_length_grows_like_inverse_field(self):
        E = -2.0
        lengths = [agmon_lengths(type_one(F), E)[1] for F in (1e-3, 1e-4)]
        assert lengths[1] / lengths[0] == pytest.approx(10.0, rel=1e-2)

    def test_barrier_edge(self):
        p = type_one(0.2)
        inner, outer = agmon_lengths(p, -p.F * p.a)
        assert outer == 0
        assert inner == pytest.approx(2 / (3 * p.F) * (p.F * p.a) ** 1.5)

    def test_no_barrier(self):
        p = type_one(0.2)
        with pytest.raises(NoBarrierError):
            agmon_lengths(p, -p.F * p.a + 1e-6)

    @pytest.mark.parametrize("alphas", [TYPE_I, TYPE_II])
    def test_semiclassical_crossing_values(self, alphas):
        g1, g2 = abs(alphas["alpha1"]), abs(alphas["alpha2"])
        p = ModelParams.from_separation(F=1.0, **alphas)
        fc = semiclassical_fc(p)
        inner, outer = agmon_lengths(p.with_field(fc), -(g1 ** 2) / 4)
        assert inner == pytest.approx((g1 ** 3 - g2 ** 3) / (12 * fc), rel=1e-12)
        assert outer == pytest.approx(g2 ** 3 / (12 * fc), rel=1e-12)


class TestSemiclassical:
    def test_critical_fields(self):
        assert semiclassical_fc(type_one()) == pytest.approx(0.192, abs=1e-15)
        assert semiclassical_fc(type_two()) == pytest.approx(0.312, abs=1e-15)
        assert semiclassical_fc(ModelParams(-2.0, -2.0, 0.0, 5.0, 0.1)) == 0

    def test_shallower_left_well_rejected(self):
        p = SimpleNamespace(alpha1=-2.0, alpha2=-2.8, a=5.0)
        with pytest.raises(InvalidParameters):
            semiclassical_fc(p)

    def test_table_sets(self):
        one = classify_semiclassical(type_one())
        two = classify_semiclassical(type_two())
        assert one.crossing_type is CrossingType.TYPE_I and not one.near_threshold
        assert two.crossing_type is CrossingType.TYPE_II and not two.near_threshold
        assert one.ratio == pytest.approx(1.4) and two.ratio == pytest.approx(1.6)

    def test_threshold_flag(self):
        assert classify_semiclassical(ratio_params(THRESHOLD_RATIO)).near_threshold
        assert classify_semiclassical(ratio_params(THRESHOLD_RATIO * 1.019)).near_threshold
        assert not classify_semiclassical(ratio_params(THRESHOLD_RATIO * 1.03)).near_threshold

    def test_equal_wells_have_no_lengths(self):
        v = classify_semiclassical(ModelParams(-2.0, -2.0, 0.0, 5.0, 0.1))
        assert v.crossing_type is CrossingType.TYPE_I
        assert np.isnan(v.rho_inner) and np.isnan(v.rho_outer)

    @pytest.mark.parametrize("ratio", OUTSIDE_BAND)
    def test_lengths_agree_with_ratio_rule(self, ratio):
        v = classify_semiclassical(ratio_params(ratio))
        by_ratio = CrossingType.TYPE_I if ratio < THRESHOLD_RATIO else CrossingType.TYPE_II
        by_lengths = CrossingType.TYPE_I if v.rho_inner < 2 * v.rho_outer else CrossingType.TYPE_II
        assert v.crossing_type is by_ratio is by_lengths
        assert v.rho_inner > 0 and v.rho_outer > 0

    def test_report(self):
        r = semiclassical_report(type_one())
        assert r.method == "semiclassical" and r.f_critical is None
        assert r.crossing_type is CrossingType.TYPE_I
        assert r.rho_inner < 2 * r.rho_outer

    def test_type_names(self):
        assert str(CrossingType.TYPE_I) == "TypeI"
        assert CrossingType("TypeII") is CrossingType.TYPE_II


class TestNumeric:
    def test_type_one_sweep(self):
        track = track_branches(type_one(0.15), TYPE_I_SWEEP)
        assert classify_numeric(track) is CrossingType.TYPE_I

    def test_type_two_sweep(self):
        track = track_branches(type_two(0.26), TYPE_II_SWEEP)
        assert classify_numeric(track) is CrossingType.TYPE_II

    @pytest.mark.parametrize(
        "params,grid", [(type_one(0.15), TYPE_I_SWEEP), (type_two(0.26), TYPE_II_SWEEP)]
    )
    def test_refinement_stable(self, params, grid):
        coarse = grid[::2]
        fine = np.linspace(grid[0], grid[-1], 2 * grid.size - 1)
        verdicts = {classify_numeric(track_branches(params, g)) for g in (coarse, grid, fine)}
        assert len(verdicts) == 1

    def test_window_missing_the_crossing(self):
        track = track_branches(type_one(0.15), np.linspace(0.15, 0.17, 5))
        with pytest.raises(InconclusiveError, match="widen"):
            classify_numeric(track)

    @pytest.mark.parametrize("ratio", [1.1, 1.2, 1.3, 1.65, 1.75, 1.9])
    def test_agrees_with_semiclassical_away_from_threshold(self, ratio):
        p = ratio_params(ratio)
        fc = semiclassical_fc(p)
        track = track_branches(p.with_field(0.8 * fc), np.linspace(0.8 * fc, 1.2 * fc, 21))
        assert classify_numeric(track) is classify_semiclassical(p).crossing_type


@pytest.fixture(scope="module")
def report():
    return critical_field(type_one(), (0.17, 0.21))


class TestCriticalField:
    def test_value(self, report):
        assert report.f_critical == pytest.approx(F_CRITICAL, abs=1e-9)
        assert abs(report.f_critical - 0.1902) < 1e-3
        assert report.crossing_type is CrossingType.TYPE_I
        assert report.method == "numeric"

    def test_widths_equal(self, report):
        r1, r2 = report.e_common
        assert abs(r1.energy.imag - r2.energy.imag) < 1e-6
        for r in (r1, r2):
            assert abs(r.energy.imag - -0.368e-3) <= 1e-6

    def test_semiclassical_agreement(self, report):
        assert report.semiclassical_fc == pytest.approx(0.192)
        assert abs(report.semiclassical_fc - report.f_critical) / report.f_critical < 0.02

    def test_lengths(self, report):
        assert report.rho_inner > 0 and report.rho_outer > 0
        assert report.rho_inner < 2 * report.rho_outer
        r1 = report.e_common[0]
        expected = agmon_lengths(type_one(report.f_critical), r1.energy.real)
        assert (report.rho_inner, report.rho_outer) == pytest.approx(expected)

    def test_labels_continuous_through_refinement(self, report):
        # the branch called E1 at F_C lies on the tracked E1 curve
        track = report.track
        k = np.searchsorted(track.f_grid, report.f_critical)
        w = (report.f_critical - track.f_grid[k - 1]) / (track.f_grid[k] - track.f_grid[k - 1])
        interp = (1 - w) * track.energies[k - 1] + w * track.energies[k]
        r1, r2 = report.e_common
        assert abs(r1.energy - interp[0]) < abs(r1.energy - interp[1])
        assert abs(r2.energy - interp[1]) < abs(r2.energy - interp[0])

    def test_no_sign_change(self):
        with pytest.raises(NoSignChangeError):
            critical_field(type_one(), (0.15, 0.17))

    def test_bracket_validation(self):
        with pytest.raises(ValueError):
            critical_field(type_one(), (0.2, 0.1))


class TestContinuedPair:
    def test_labels_follow_the_deep_well_level(self):
        p = type_one(0.21)
        continued = continued_pair(p)
        assert continued[0].energy.real == pytest.approx(-2.066, abs=1e-3)
        assert continued[1].energy.real == pytest.approx(-1.963, abs=1e-3)
        assert [r.label for r in continued] == [1, 2]

    def test_below_crossing_same_as_find_pair(self):
        from stark_resonance.resonances import find_pair

        p = type_one(0.17)
        a = [r.energy for r in continued_pair(p)]
        b = [r.energy for r in find_pair(p)]
        assert np.allclose(a, b, rtol=0, atol=1e-12)
