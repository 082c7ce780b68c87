"""Naive DiD, mixing-proportion identification, and the two-period panel
bounds for the four latent target groups.

Estimated proportions outside [0,1] are clamped to the nearest endpoint and a
named warning is attached to the result; clamps are never silent. A trim share
of zero (vacuous identification) is an error, not an infinite bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    FrechetInterval,
    cond_prob_s1,
    frechet_interval,
    trimmed_mean_lower,
    trimmed_mean_upper,
)
from .data import AssumptionSet, PanelDataset
from .errors import EmptyCell, InvalidAssumptions, VacuousIdentification

STRATA_NAMES = ("OOO", "ONO", "ONN", "NOO", "NNO", "NNN")


@dataclass
class MixingProportions:
    """Point (or interval) estimates of the mixing weights and, optionally,
    the twelve strata proportions pi_gd."""

    p_ooo1: float
    p_ooo0: float
    source: str
    p_ooo1_interval: FrechetInterval | None = None
    p_ooo0_interval: FrechetInterval | None = None
    p_ono0: float | None = None
    p_nno1: float | None = None
    strata: dict | None = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "p_ooo1": self.p_ooo1,
            "p_ooo0": self.p_ooo0,
            "source": self.source,
        }
        if self.p_ooo1_interval is not None:
            out["p_ooo1_interval"] = [self.p_ooo1_interval.lo, self.p_ooo1_interval.hi]
        if self.p_ooo0_interval is not None:
            out["p_ooo0_interval"] = [self.p_ooo0_interval.lo, self.p_ooo0_interval.hi]
        if self.p_ono0 is not None:
            out["p_ono0"] = self.p_ono0
        if self.p_nno1 is not None:
            out["p_nno1"] = self.p_nno1
        if self.strata is not None:
            out["strata"] = {f"{g}{d}": v for (g, d), v in self.strata.items()}
        return out


@dataclass
class BoundsResult:
    parameter: str
    assumptions: AssumptionSet
    lb: float
    ub: float
    proportions: MixingProportions
    support_minima: dict | None = None
    warnings: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "parameter": self.parameter,
            "assumptions": self.assumptions.to_dict(),
            "lb": self.lb,
            "ub": self.ub,
            "proportions": self.proportions.to_dict(),
            "support_minima": self.support_minima,
            "warnings": list(self.warnings),
        }
        out.update(self.extras)
        return out


def _delta_y(data: PanelDataset, d: int) -> np.ndarray:
    """Delta Y for units observed in both periods within arm d, row order."""
    mask = (data.d == d) & (data.s0 == 1) & (data.s1 == 1)
    if not mask.any():
        raise EmptyCell(f"no units with d={d}, s0=1, s1=1", d=d, s0=1, s1=1)
    return data.y1[mask] - data.y0[mask]


def _cell_y(data: PanelDataset, d: int, s0: int, s1: int, period: int) -> np.ndarray:
    mask = (data.d == d) & (data.s0 == s0) & (data.s1 == s1)
    if not mask.any():
        raise EmptyCell(f"no units with d={d}, s0={s0}, s1={s1}", d=d, s0=s0, s1=s1)
    return (data.y0 if period == 0 else data.y1)[mask]


def naive_did(data: PanelDataset) -> float:
    """DiD contrast on units observed in both periods, ignoring selection."""
    return float(np.mean(_delta_y(data, 1))) - float(np.mean(_delta_y(data, 0)))


def mixing_no_mono(data: PanelDataset) -> MixingProportions:
    """Least-favorable Frechet weights plus full intervals for reporting."""
    p0 = cond_prob_s1(data, d=0, s0=1)
    p1 = cond_prob_s1(data, d=1, s0=1)
    if p1.value == 0.0:
        raise EmptyCell("no treated units observed in both periods", d=1, s0=1, s1=1)
    if p0.value == 0.0:
        raise EmptyCell("no control units observed in both periods", d=0, s0=1, s1=1)
    joint = frechet_interval(p0.value, p1.value)
    warns = []
    if joint.lo == 0.0:
        warns.append("VacuousIdentification")
    return MixingProportions(
        p_ooo1=joint.lo / p1.value,
        p_ooo0=joint.lo / p0.value,
        source="Frechet",
        p_ooo1_interval=FrechetInterval(joint.lo / p1.value, joint.hi / p1.value),
        p_ooo0_interval=FrechetInterval(joint.lo / p0.value, joint.hi / p0.value),
        warnings=warns,
    )


def mixing_mono(data: PanelDataset, direction: str = "positive") -> MixingProportions:
    """Point-identified weights under monotone sample selection + PTS(a)."""
    p0 = cond_prob_s1(data, d=0, s0=1)
    p1 = cond_prob_s1(data, d=1, s0=1)
    warns = []
    if direction == "positive":
        if p1.value == 0.0:
            raise EmptyCell("no treated units observed in both periods", d=1, s0=1, s1=1)
        raw = p0.value / p1.value
        p_ooo1, p_ooo0 = raw, 1.0
    elif direction == "negative":
        if p0.value == 0.0:
            raise EmptyCell("no control units observed in both periods", d=0, s0=1, s1=1)
        raw = p1.value / p0.value
        p_ooo1, p_ooo0 = 1.0, raw
    else:
        raise InvalidAssumptions(f"unknown direction {direction!r}")
    if raw > 1.0:
        warns.append("MonotonicityViolatedInSample")
        if direction == "positive":
            p_ooo1 = 1.0
        else:
            p_ooo0 = 1.0
    return MixingProportions(
        p_ooo1=p_ooo1, p_ooo0=p_ooo0, source="Monotone+PTSa", warnings=warns
    )


def _p_ono0(data: PanelDataset, warns: list) -> float:
    """1 - P[S1=0|S0=1,D=1] / P[S1=0|S0=1,D=0], clamped to [0,1]."""
    stay1 = cond_prob_s1(data, d=1, s0=1)
    stay0 = cond_prob_s1(data, d=0, s0=1)
    drop1 = 1.0 - stay1.value
    drop0 = 1.0 - stay0.value
    if drop0 == 0.0:
        raise EmptyCell("no control attriters (d=0, s0=1, s1=0)", d=0, s0=1, s1=0)
    raw = 1.0 - drop1 / drop0
    if raw < 0.0:
        warns.append("NegativeProportionClamped")
        return 0.0
    return raw


def _p_nno1(data: PanelDataset, warns: list) -> float:
    """1 - P[S1=1|S0=0,D=0] / P[S1=1|S0=0,D=1], clamped to [0,1]."""
    join0 = cond_prob_s1(data, d=0, s0=0)
    join1 = cond_prob_s1(data, d=1, s0=0)
    if join1.value == 0.0:
        raise EmptyCell("no treated joiners (d=1, s0=0, s1=1)", d=1, s0=0, s1=1)
    raw = 1.0 - join0.value / join1.value
    if raw < 0.0:
        warns.append("NegativeProportionClamped")
        return 0.0
    return raw


def strata_proportions(data: PanelDataset) -> MixingProportions:
    """All twelve pi_gd under positive monotonicity + joint independence.

    Difference formulas can go slightly negative in sample; those are clamped
    to 0 with a warning. Pre-clamp arm totals equal P[D=d] by construction.
    """
    n = data.n
    warns: list = []

    def cellp(s0, s1, d):
        return float(np.sum((data.s0 == s0) & (data.s1 == s1) & (data.d == d))) / n

    def armp(s0, d):
        return float(np.sum((data.s0 == s0) & (data.d == d))) / n

    stay_c = cond_prob_s1(data, d=0, s0=1).value      # P[S1=1|S0=1,D=0]
    drop_t = 1.0 - cond_prob_s1(data, d=1, s0=1).value  # P[S1=0|S0=1,D=1]
    join_c = cond_prob_s1(data, d=0, s0=0).value      # P[S1=1|S0=0,D=0]
    noin_t = 1.0 - cond_prob_s1(data, d=1, s0=0).value  # P[S1=0|S0=0,D=1]

    raw = {
        ("OOO", 0): cellp(1, 1, 0),
        ("OOO", 1): stay_c * armp(1, 1),
        ("ONO", 0): cellp(1, 0, 0) - drop_t * armp(1, 0),
        ("ONO", 1): cellp(1, 1, 1) - stay_c * armp(1, 1),
        ("ONN", 0): drop_t * armp(1, 0),
        ("ONN", 1): cellp(1, 0, 1),
        ("NOO", 0): cellp(0, 1, 0),
        ("NOO", 1): join_c * armp(0, 1),
        ("NNO", 0): cellp(0, 0, 0) - noin_t * armp(0, 0),
        ("NNO", 1): cellp(0, 1, 1) - join_c * armp(0, 1),
        ("NNN", 0): noin_t * armp(0, 0),
        ("NNN", 1): cellp(0, 0, 1),
    }
    strata = {}
    for key, value in raw.items():
        if value < 0.0:
            warns.append(f"NegativeProportionClamped:{key[0]}{key[1]}")
            value = 0.0
        strata[key] = value

    mono = mixing_mono(data, "positive")
    warns.extend(mono.warnings)
    return MixingProportions(
        p_ooo1=mono.p_ooo1,
        p_ooo0=1.0,
        source="Joint",
        p_ono0=_p_ono0(data, warns),
        p_nno1=_p_nno1(data, warns),
        strata=strata,
        warnings=warns,
    )


def group_proportion(mix: MixingProportions, group: str) -> float:
    """Population share of a latent group: pi_g0 + pi_g1."""
    if mix.strata is None:
        raise InvalidAssumptions("strata proportions not computed")
    return mix.strata[(group, 0)] + mix.strata[(group, 1)]


def _support_minima(data: PanelDataset, overrides: dict | None = None) -> dict:
    """Observed support minima for the pre/post outcome distributions."""
    out = {}
    specs = {
        "y00_lb": ((data.d == 0) & (data.s0 == 1), data.y0),
        "y01_lb": ((data.d == 0) & (data.s1 == 1), data.y1),
        "y10_lb": ((data.d == 1) & (data.s0 == 1), data.y0),
    }
    for key, (mask, arr) in specs.items():
        if overrides and key in overrides and overrides[key] is not None:
            out[key] = float(overrides[key])
            continue
        if not mask.any():
            raise EmptyCell(f"no observations available for {key}", field=key)
        out[key] = float(np.min(arr[mask]))
    return out


def bounds_tau_ooo(data: PanelDataset, assumptions: AssumptionSet) -> BoundsResult:
    """Trimming bounds for the always-observed group."""
    treated = _delta_y(data, 1)
    control = _delta_y(data, 0)
    if not assumptions.monotone:
        mix = mixing_no_mono(data)
        if mix.p_ooo1 <= 0.0 or mix.p_ooo0 <= 0.0:
            raise VacuousIdentification(
                "Frechet lower weight is zero; data uninformative about the "
                "always-observed group"
            )
        lb = trimmed_mean_lower(treated, mix.p_ooo1) - trimmed_mean_upper(
            control, mix.p_ooo0
        )
        ub = trimmed_mean_upper(treated, mix.p_ooo1) - trimmed_mean_lower(
            control, mix.p_ooo0
        )
    else:
        mix = mixing_mono(data, assumptions.direction)
        if assumptions.direction == "positive":
            if mix.p_ooo1 <= 0.0:
                raise VacuousIdentification("p_ooo1 is zero")
            control_mean = float(np.mean(control))
            lb = trimmed_mean_lower(treated, mix.p_ooo1) - control_mean
            ub = trimmed_mean_upper(treated, mix.p_ooo1) - control_mean
        else:
            if mix.p_ooo0 <= 0.0:
                raise VacuousIdentification("p_ooo0 is zero")
            treated_mean = float(np.mean(treated))
            lb = treated_mean - trimmed_mean_upper(control, mix.p_ooo0)
            ub = treated_mean - trimmed_mean_lower(control, mix.p_ooo0)
    return BoundsResult(
        parameter="tau_OOO",
        assumptions=assumptions,
        lb=lb,
        ub=ub,
        proportions=mix,
        warnings=list(mix.warnings),
    )


def _require_other_group_assumptions(assumptions: AssumptionSet, dominance: str):
    if not (
        assumptions.monotone
        and assumptions.direction == "positive"
        and assumptions.mean_dominance == dominance
    ):
        raise InvalidAssumptions(
            f"this bound requires with_monotonicity(positive) and mean "
            f"dominance {dominance}"
        )


def bounds_tau_ono(
    data: PanelDataset,
    assumptions: AssumptionSet,
    support_overrides: dict | None = None,
) -> BoundsResult:
    """Bounds for units observed only when untreated (ONO)."""
    _require_other_group_assumptions(assumptions, "5a")
    if not assumptions.joint_independence:
        raise InvalidAssumptions("tau_ONO requires joint_independence")
    warns: list = []
    mono = mixing_mono(data, "positive")
    warns.extend(mono.warnings)
    trim = 1.0 - mono.p_ooo1
    if trim <= 0.0:
        raise VacuousIdentification("1 - p_ooo1 is zero; no ONO mass in the treated cell")
    p_ono0 = _p_ono0(data, warns)
    if p_ono0 <= 0.0:
        raise VacuousIdentification("p_ono0 is zero after clamping")

    treated = _delta_y(data, 1)
    control_post = _cell_y(data, d=0, s0=1, s1=1, period=1)
    attrit_pre = _cell_y(data, d=0, s0=1, s1=0, period=0)
    minima = _support_minima(data, support_overrides)

    lb = (
        trimmed_mean_lower(treated, trim)
        - float(np.mean(control_post))
        + trimmed_mean_lower(attrit_pre, p_ono0)
    )
    ub = (
        trimmed_mean_upper(treated, trim)
        - minima["y01_lb"]
        + trimmed_mean_upper(attrit_pre, p_ono0)
    )
    mix = MixingProportions(
        p_ooo1=mono.p_ooo1, p_ooo0=1.0, source="Joint", p_ono0=p_ono0, warnings=warns
    )
    return BoundsResult(
        parameter="tau_ONO",
        assumptions=assumptions,
        lb=lb,
        ub=ub,
        proportions=mix,
        support_minima=minima,
        warnings=list(warns),
    )


def bounds_tau_nno(
    data: PanelDataset,
    assumptions: AssumptionSet,
    support_overrides: dict | None = None,
) -> BoundsResult:
    """Bounds for units unobserved at baseline, observed only when treated (NNO)."""
    _require_other_group_assumptions(assumptions, "5b")
    if not assumptions.joint_independence:
        raise InvalidAssumptions("tau_NNO requires joint_independence")
    warns: list = []
    mono = mixing_mono(data, "positive")
    warns.extend(mono.warnings)
    trim_ooo = 1.0 - mono.p_ooo1
    if trim_ooo <= 0.0:
        raise VacuousIdentification("1 - p_ooo1 is zero")
    p_nno1 = _p_nno1(data, warns)
    if p_nno1 <= 0.0:
        raise VacuousIdentification("p_nno1 is zero after clamping")
    p_ono0 = _p_ono0(data, warns)
    if p_ono0 <= 0.0:
        raise VacuousIdentification("p_ono0 is zero after clamping")

    joiner_post = _cell_y(data, d=1, s0=0, s1=1, period=1)
    both_pre = _cell_y(data, d=1, s0=1, s1=1, period=0)
    control_joiner_post = _cell_y(data, d=0, s0=0, s1=1, period=1)
    attrit_pre = _cell_y(data, d=0, s0=1, s1=0, period=0)
    minima = _support_minima(data, support_overrides)

    lb = (
        trimmed_mean_lower(joiner_post, p_nno1)
        - trimmed_mean_lower(both_pre, trim_ooo)
        - float(np.mean(control_joiner_post))
        + minima["y00_lb"]
    )
    ub = (
        trimmed_mean_upper(joiner_post, p_nno1)
        - minima["y10_lb"]
        - minima["y01_lb"]
        + trimmed_mean_lower(attrit_pre, p_ono0)
    )
    mix = MixingProportions(
        p_ooo1=mono.p_ooo1,
        p_ooo0=1.0,
        source="Joint",
        p_ono0=p_ono0,
        p_nno1=p_nno1,
        warnings=warns,
    )
    return BoundsResult(
        parameter="tau_NNO",
        assumptions=assumptions,
        lb=lb,
        ub=ub,
        proportions=mix,
        support_minima=minima,
        warnings=list(warns),
    )


def bounds_tau_noo(
    data: PanelDataset,
    assumptions: AssumptionSet,
    support_overrides: dict | None = None,
) -> BoundsResult:
    """Bounds for units unobserved at baseline, observed either way after (NOO)."""
    _require_other_group_assumptions(assumptions, "5c")
    warns: list = []
    mono = mixing_mono(data, "positive")
    warns.extend(mono.warnings)
    if mono.p_ooo1 <= 0.0:
        raise VacuousIdentification("p_ooo1 is zero")
    p_nno1 = _p_nno1(data, warns)
    trim = 1.0 - p_nno1
    if trim <= 0.0:
        raise VacuousIdentification("1 - p_nno1 is zero")

    joiner_post = _cell_y(data, d=1, s0=0, s1=1, period=1)
    both_pre = _cell_y(data, d=1, s0=1, s1=1, period=0)
    control_joiner_post = _cell_y(data, d=0, s0=0, s1=1, period=1)
    control_both_pre = _cell_y(data, d=0, s0=1, s1=1, period=0)
    minima = _support_minima(data, support_overrides)

    lb = (
        trimmed_mean_lower(joiner_post, trim)
        - trimmed_mean_lower(both_pre, mono.p_ooo1)
        - float(np.mean(control_joiner_post))
        + minima["y00_lb"]
    )
    ub = (
        trimmed_mean_upper(joiner_post, trim)
        - minima["y10_lb"]
        - float(np.mean(control_joiner_post))
        + float(np.mean(control_both_pre))
    )
    mix = MixingProportions(
        p_ooo1=mono.p_ooo1, p_ooo0=1.0, source="Joint", p_nno1=p_nno1, warnings=warns
    )
    return BoundsResult(
        parameter="tau_NOO",
        assumptions=assumptions,
        lb=lb,
        ub=ub,
        proportions=mix,
        support_minima=minima,
        warnings=list(warns),
    )
