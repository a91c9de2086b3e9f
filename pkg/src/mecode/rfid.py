"""Backscatter link budget: physical tag parameters to abstract bit costs.

A passive tag absorbs carrier power while sending a zero bit (harvesting)
and reflects while sending a one bit, so the effective cost of a zero is
the tag's power draw minus whatever the rectifier delivers, clamped at
zero. Everything here is steady-state bookkeeping: Friis path loss, the
rectifier threshold bracket, and the resulting cost ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .costmodel import CostModel
from .errors import ValidationError

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_ENERGY_SCALE = 1e-12  # joules per dimensionless cost unit

REGIME_DEFICIT = "deficit"
REGIME_SURPLUS = "surplus"


@dataclass(frozen=True)
class RfidLink:
    """Reader-to-tag link and tag front-end parameters, SI units throughout.

    ``l_match`` is an optional mismatch-loss multiplier on the absorbed
    power; 1.0 keeps the ideal perfectly-matched front end.
    """

    p_t: float  # reader carrier power, W
    g_t: float  # reader antenna gain, linear
    g_r: float  # tag antenna gain, linear
    wavelength: float  # carrier wavelength, m
    r: float  # reader-tag distance, m
    l_p: float  # polarization loss, linear, in (0, 1]
    r_ant: float  # antenna resistance, ohm
    n_stages: int  # rectifier voltage-multiplier stages
    v_t: float  # rectifier diode threshold voltage, V
    p_tag: float  # tag circuit power consumption, W
    t0: float  # zero-bit duration, s
    t1: float  # one-bit duration, s
    l_match: float = 1.0  # mismatch loss, linear, in (0, 1]

    def __post_init__(self) -> None:
        positive = ("p_t", "g_t", "g_r", "wavelength", "r", "r_ant", "p_tag", "t0", "t1")
        for name in positive:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ValidationError(f"{name}: must be a positive finite number, got {value!r}")
        for name in ("l_p", "l_match"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not 0 < value <= 1:
                raise ValidationError(f"{name}: must be in (0, 1], got {value!r}")
        if not isinstance(self.n_stages, int) or isinstance(self.n_stages, bool) or self.n_stages < 1:
            raise ValidationError(f"n_stages: must be an integer >= 1, got {self.n_stages!r}")
        if not isinstance(self.v_t, (int, float)) or not math.isfinite(self.v_t) or self.v_t < 0:
            raise ValidationError(f"v_t: must be a finite number >= 0, got {self.v_t!r}")


def wavelength_from_frequency(freq_hz: float) -> float:
    if freq_hz <= 0:
        raise ValidationError(f"freq: must be positive, got {freq_hz!r}")
    return SPEED_OF_LIGHT / freq_hz


def input_power(link: RfidLink) -> float:
    """Power absorbed by the matched tag front end (free-space path loss)."""
    friis = link.p_t * (link.wavelength / (4.0 * math.pi * link.r)) ** 2
    return friis * link.g_t * link.g_r * link.l_p * link.l_match


def antenna_voltage(link: RfidLink) -> float:
    """Open-circuit antenna voltage 2*sqrt(2*R_ant*P_in)."""
    return 2.0 * math.sqrt(2.0 * link.r_ant * input_power(link))


def rectified_voltage(link: RfidLink) -> float:
    """Diagnostic multiplier-chain output 2*N*(V_ant - V_t), clamped at 0."""
    return max(0.0, 2.0 * link.n_stages * (antenna_voltage(link) - link.v_t))


def harvested_dc_power(link: RfidLink) -> float:
    """DC power delivered to storage: the threshold bracket times P_in.

    Below the diode threshold (V_ant <= V_t) the rectifier delivers
    nothing; the bracket clamps at zero rather than going negative.
    """
    p_in = input_power(link)
    v_ant = 2.0 * math.sqrt(2.0 * link.r_ant * p_in)
    if v_ant <= link.v_t:
        return 0.0
    return (1.0 - link.v_t / v_ant) * p_in


def tag_costs(link: RfidLink) -> tuple[float, float, str]:
    """(beta0, beta1, regime) in joules.

    A one bit always costs the tag's full draw for its duration. A zero
    bit costs only the unharvested part of the draw, clamped at zero:
    when harvesting covers the circuit (surplus regime), zeros are free.
    """
    p_dc = harvested_dc_power(link)
    beta1 = link.p_tag * link.t1
    beta0 = max(0.0, link.p_tag - p_dc) * link.t0
    regime = REGIME_DEFICIT if link.p_tag > p_dc else REGIME_SURPLUS
    return beta0, beta1, regime


def cost_ratio(link: RfidLink) -> float:
    """gamma = beta1/beta0; math.inf in the surplus regime."""
    beta0, beta1, _ = tag_costs(link)
    if beta0 == 0.0:
        return math.inf
    return beta1 / beta0


def cost_model_from_link(link: RfidLink, scale: float = DEFAULT_ENERGY_SCALE) -> CostModel:
    """Dimensionless cost model for the optimizers; scale is joules per unit."""
    if not (isinstance(scale, (int, float)) and math.isfinite(scale) and scale > 0):
        raise ValidationError(f"scale: must be a positive finite number, got {scale!r}")
    beta0, beta1, _ = tag_costs(link)
    return CostModel(beta0 / scale, beta1 / scale, link.t0, link.t1)


def halfwave_baseline(m: int, cm: CostModel) -> float:
    """Per-symbol cost of symmetric half-wave line coding (FM0/Miller style).

    Half-wave pulses spend the same energy on either bit, so the uncoded
    average is log2(M) bits at the mean per-bit cost. Savings relative to
    this baseline equal the energy-saving factor of the metrics module.
    """
    if m < 2:
        raise ValidationError(f"m: must be >= 2, got {m}")
    return math.log2(m) * (cm.beta0 + cm.beta1) / 2.0


def link_summary(link: RfidLink) -> dict:
    """All derived link quantities in one record (CLI and diagnostics)."""
    beta0, beta1, regime = tag_costs(link)
    return {
        "p_in_w": input_power(link),
        "v_ant_v": antenna_voltage(link),
        "v_dc_v": rectified_voltage(link),
        "p_in_dc_w": harvested_dc_power(link),
        "beta0_j": beta0,
        "beta1_j": beta1,
        "gamma": cost_ratio(link),
        "regime": regime,
    }
