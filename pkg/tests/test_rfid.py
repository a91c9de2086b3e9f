import math

import pytest

import mecode as mc
from mecode.errors import ValidationError
from mecode.rfid import (
    REGIME_DEFICIT,
    REGIME_SURPLUS,
    antenna_voltage,
    rectified_voltage,
    wavelength_from_frequency,
)


def make_link(**overrides) -> mc.RfidLink:
    params = dict(
        p_t=4.0,
        g_t=1.0,
        g_r=1.64,
        wavelength=wavelength_from_frequency(915e6),
        r=3.0,
        l_p=0.5,
        r_ant=50.0,
        n_stages=3,
        v_t=0.2,
        p_tag=1e-5,
        t0=12.5e-6,
        t1=12.5e-6,
    )
    params.update(overrides)
    return mc.RfidLink(**params)


class TestInputPower:
    def test_unit_free_space_term(self):
        lam = 0.327
        link = make_link(p_t=1.0, g_t=1.0, g_r=1.0, l_p=1.0, wavelength=lam, r=lam / (4 * math.pi))
        assert mc.input_power(link) == pytest.approx(1.0)

    def test_inverse_square(self):
        near = make_link(r=2.0)
        far = make_link(r=4.0)
        assert mc.input_power(near) == pytest.approx(4 * mc.input_power(far))

    def test_link_budget_value(self):
        link = make_link(p_t=4.0, g_t=1.0, g_r=1.0, l_p=0.5, wavelength=0.327, r=3.0)
        expected = 4.0 * (0.327 / (4 * math.pi * 3.0)) ** 2 * 0.5
        assert mc.input_power(link) == pytest.approx(expected)
        assert expected == pytest.approx(1.51e-4, rel=5e-3)

    def test_mismatch_multiplier(self):
        assert mc.input_power(make_link(l_match=0.5)) == pytest.approx(
            0.5 * mc.input_power(make_link())
        )


class TestHarvestedPower:
    def test_ideal_rectifier(self):
        link = make_link(v_t=0.0)
        assert mc.harvested_dc_power(link) == pytest.approx(mc.input_power(link))

    def test_zero_at_threshold_boundary(self):
        # choose v_t exactly at the antenna voltage: bracket hits zero
        link = make_link()
        boundary = make_link(v_t=antenna_voltage(link))
        assert mc.harvested_dc_power(boundary) == 0.0

    def test_hand_evaluated_bracket(self):
        # with R_ant = 50 and P_in = 1e-4 the antenna voltage is 0.2; a
        # fourfold power increase halves the relative threshold loss
        base = make_link(v_t=0.2)
        p_in = mc.input_power(base)
        scaled = make_link(v_t=0.2, p_t=base.p_t * (1e-4 / p_in))
        assert mc.input_power(scaled) == pytest.approx(1e-4)
        assert mc.harvested_dc_power(scaled) == pytest.approx(0.0, abs=1e-18)
        quadrupled = make_link(v_t=0.2, p_t=scaled.p_t * 4)
        assert mc.harvested_dc_power(quadrupled) == pytest.approx(0.5 * 4e-4)

    def test_never_exceeds_input(self):
        for r in (0.5, 1.0, 2.0, 5.0, 10.0):
            link = make_link(r=r)
            dc = mc.harvested_dc_power(link)
            assert 0.0 <= dc <= mc.input_power(link)

    def test_rectified_voltage_diagnostic(self):
        link = make_link(v_t=0.0)
        assert rectified_voltage(link) == pytest.approx(2 * 3 * antenna_voltage(link))
        dead = make_link(v_t=1e6)
        assert rectified_voltage(dead) == 0.0


class TestTagCosts:
    def test_deficit_regime_values(self):
        # force harvested power to 4 uW against a 10 uW draw
        link = make_link(r=40.0, v_t=0.0, p_tag=1e-5)
        p_dc = mc.harvested_dc_power(link)
        scale_r = math.sqrt(p_dc / 4e-6)
        link = make_link(r=40.0 * scale_r, v_t=0.0, p_tag=1e-5)
        assert mc.harvested_dc_power(link) == pytest.approx(4e-6, rel=1e-9)
        beta0, beta1, regime = mc.tag_costs(link)
        assert regime == REGIME_DEFICIT
        assert beta0 == pytest.approx(7.5e-11, rel=1e-9)
        assert beta1 == pytest.approx(1.25e-10, rel=1e-9)
        assert mc.cost_ratio(link) == pytest.approx(5 / 3, rel=1e-9)

    def test_surplus_regime(self):
        link = make_link(r=0.5)
        assert mc.harvested_dc_power(link) >= link.p_tag
        beta0, beta1, regime = mc.tag_costs(link)
        assert regime == REGIME_SURPLUS
        assert beta0 == 0.0
        assert math.isinf(mc.cost_ratio(link))

    def test_out_of_range_gives_unity_gamma(self):
        link = make_link(r=1000.0)
        assert mc.harvested_dc_power(link) == 0.0
        assert mc.cost_ratio(link) == pytest.approx(link.t1 / link.t0)

    def test_validation(self):
        with pytest.raises(ValidationError, match="l_p"):
            make_link(l_p=1.5)
        with pytest.raises(ValidationError, match="n_stages"):
            make_link(n_stages=0)
        with pytest.raises(ValidationError, match="r:"):
            make_link(r=-1.0)


class TestRegimeSweep:
    def test_surplus_flips_to_deficit_with_distance(self):
        distances = [0.25 * 2**i for i in range(10)]
        regimes = [mc.tag_costs(make_link(r=r))[2] for r in distances]
        assert regimes[0] == REGIME_SURPLUS
        assert regimes[-1] == REGIME_DEFICIT
        flip = regimes.index(REGIME_DEFICIT)
        assert all(x == REGIME_SURPLUS for x in regimes[:flip])
        assert all(x == REGIME_DEFICIT for x in regimes[flip:])

    def test_gamma_non_increasing_in_distance_within_deficit(self):
        # lower diode threshold widens the finite-gamma deficit band
        gammas = []
        for r in (15.0, 18.0, 20.0, 25.0, 30.0, 40.0, 60.0):
            link = make_link(r=r, v_t=0.02)
            _, _, regime = mc.tag_costs(link)
            assert regime == REGIME_DEFICIT
            gammas.append(mc.cost_ratio(link))
        assert gammas[0] > gammas[-1]
        assert all(a >= b - 1e-15 for a, b in zip(gammas, gammas[1:]))


class TestCostModelBridge:
    def test_scaled_model_keeps_ratio(self):
        link = make_link(r=5.0)
        cm = mc.cost_model_from_link(link)
        assert cm.gamma == pytest.approx(mc.cost_ratio(link), rel=1e-12)
        assert (cm.t0, cm.t1) == (link.t0, link.t1)

    def test_epsilon_matches_pure_gamma_run(self):
        link = make_link(r=15.0, v_t=0.02)
        assert mc.tag_costs(link)[2] == REGIME_DEFICIT
        assert 1.0 < mc.cost_ratio(link) < math.inf
        src = mc.uniform_source(8)
        link_cm = mc.cost_model_from_link(link)
        pure_cm = mc.model_from_gamma(link_cm.gamma)
        for optimize in (
            lambda cm: mc.optimize_fixed(src, cm)[0],
            lambda cm: mc.optimize_prefix(src, cm, dp=7),
        ):
            eps_link = mc.energy_saving(src, optimize(link_cm), link_cm)
            eps_pure = mc.energy_saving(src, optimize(pure_cm), pure_cm)
            assert abs(eps_link - eps_pure) <= 1e-12

    def test_scale_validation(self):
        with pytest.raises(ValidationError, match="scale"):
            mc.cost_model_from_link(make_link(), scale=0.0)


class TestHalfwaveBaseline:
    def test_reference_value(self, gamma5):
        assert mc.halfwave_baseline(8, gamma5) == 9.0

    def test_symmetric(self):
        cm = mc.CostModel(2.0, 2.0, 1, 1)
        assert mc.halfwave_baseline(8, cm) == 2.0 * 3

    def test_two_symbols(self, gamma5):
        assert mc.halfwave_baseline(2, gamma5) == (gamma5.beta0 + gamma5.beta1) / 2

    def test_equals_metrics_baseline(self, gamma5):
        for m in (2, 8, 32):
            assert mc.halfwave_baseline(m, gamma5) == mc.uncoded_cost(mc.uniform_source(m), gamma5)


class TestLinkSummary:
    def test_fields_present_and_consistent(self):
        link = make_link(r=5.0)
        summary = mc.link_summary(link)
        assert summary["p_in_w"] == mc.input_power(link)
        assert summary["p_in_dc_w"] == mc.harvested_dc_power(link)
        assert summary["regime"] in (REGIME_DEFICIT, REGIME_SURPLUS)
        assert summary["gamma"] == mc.cost_ratio(link)
