"""Synthetic DGP generator, Monte Carlo replication harness, and the
independent numerical oracle for the true mixing proportion and bounds.

The latent draws per unit are (c,a) and (u0,v0), (u1,v1) bivariate normal
pairs plus independent b and w. One (u1,v1) pair is shared across the two
counterfactual treatment states; this makes positive monotonicity of selection
hold exactly unit by unit and induces the degenerate covariance pattern
(var 2 / cov 2) between the two counterfactual post-period selection indices.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtri

from . import bounds as _bounds
from .data import (
    MONO_POSITIVE,
    WITHOUT_MONOTONICITY,
    AssumptionSet,
    PanelDataset,
)
from .errors import EstimationError, ValidationError

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT_2PI


@dataclass(frozen=True)
class DgpConfig:
    n: int = 1000
    rho_ca: float = 0.7
    # 0.6 reproduces the reference true bounds / conditional moments exactly;
    # see the docs for why this is the internally consistent value.
    rho_uv: float = 0.6
    outcome_intercept: float = 5.0
    att: float = 4.0
    selection_shift: float = 1.5
    seed: object = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("n must be >= 2")
        for name in ("rho_ca", "rho_uv"):
            rho = getattr(self, name)
            if not (-1.0 < rho < 1.0):
                raise ValidationError(f"{name} must be in (-1,1), got {rho}")


def _latents(rng: np.random.Generator, n: int, config: DgpConfig) -> dict:
    x = rng.standard_normal((n, 8))
    ca = math.sqrt(1.0 - config.rho_ca**2)
    uv = math.sqrt(1.0 - config.rho_uv**2)
    return {
        "c": x[:, 0],
        "a": config.rho_ca * x[:, 0] + ca * x[:, 1],
        "u0": x[:, 2],
        "v0": config.rho_uv * x[:, 2] + uv * x[:, 3],
        "u1": x[:, 4],
        "v1": config.rho_uv * x[:, 4] + uv * x[:, 5],
        "b": x[:, 6],
        "w": x[:, 7],
    }


def generate_panel(config: DgpConfig, debug: bool = False):
    """Draw a two-period panel from the DGP.

    With ``debug`` the latent draws and potential selections are returned as a
    second value for simulator-only diagnostics.
    """
    rng = np.random.default_rng(config.seed)
    lat = _latents(rng, config.n, config)
    d = (lat["a"] + lat["w"] > 0).astype(np.int8)
    s0 = (lat["b"] + lat["v0"] > 0).astype(np.int8)
    s1_0 = (lat["b"] + lat["v1"] > 0).astype(np.int8)
    s1_1 = (config.selection_shift + lat["b"] + lat["v1"] > 0).astype(np.int8)
    s1 = np.where(d == 1, s1_1, s1_0)
    y0_star = lat["c"] + lat["u0"]
    y1_star = (
        config.outcome_intercept
        + config.att * (d == 1)
        + lat["c"]
        + lat["u1"]
    )
    y0 = np.where(s0 == 1, y0_star, np.nan)
    y1 = np.where(s1 == 1, y1_star, np.nan)
    panel = PanelDataset.from_records(
        [str(i + 1) for i in range(config.n)], d, s0, s1, y0, y1
    )
    if debug:
        return panel, {**lat, "s1_0": s1_0, "s1_1": s1_1, "d": d}
    return panel


@dataclass
class OracleResult:
    p_true: float
    lb_true: float
    ub_true: float
    mu1: float
    mu2: float
    mu3: float
    mc_draws: int
    se_mc: float
    p_true_alt: float = 0.0  # consistency check: ratio without the D condition

    def to_dict(self) -> dict:
        return {
            "p_true": self.p_true,
            "lb_true": self.lb_true,
            "ub_true": self.ub_true,
            "mu1": self.mu1,
            "mu2": self.mu2,
            "mu3": self.mu3,
            "mc_draws": self.mc_draws,
            "se": self.se_mc,
        }


def oracle_true_values(
    config: DgpConfig, mc_draws: int, seed: int = 123456789
) -> OracleResult:
    """True mixing proportion, conditional moments, and bounds by Monte Carlo
    integration over the exact joint normal latent structure, with antithetic
    variates. The trimmed tail means use closed-form truncated-normal moments.
    """
    if mc_draws < 10**5:
        raise ValidationError("mc_draws must be >= 1e5")
    rng = np.random.default_rng(seed)
    half = (mc_draws + 1) // 2
    chunk = 1_000_000
    shift = config.selection_shift

    def stats_matrix(lat: dict, sign: float) -> np.ndarray:
        z1 = sign * (lat["b"] + lat["v0"])
        z2 = sign * (lat["b"] + lat["v1"])   # both counterfactual post indices
        z4 = sign * (lat["a"] + lat["w"])
        du = sign * (lat["u1"] - lat["u0"])
        cond_t = (z1 > 0) & (z2 > -shift)    # treated observed-both conditioning
        cond_c = (z1 > 0) & (z2 > 0)         # control observed-both conditioning
        g_ooo1 = (cond_c & (z2 > -shift) & (z4 > 0)).astype(float)
        g_ono1 = ((z1 > 0) & (z2 < 0) & (z2 > -shift) & (z4 > 0)).astype(float)
        at = cond_t.astype(float)
        ac = cond_c.astype(float)
        return np.column_stack(
            [g_ooo1, g_ono1, at, at * du, at * du * du, ac, ac * du,
             (cond_c & cond_t).astype(float)]
        )

    # accumulated sums over antithetic pair-averages
    sums = np.zeros(8)
    sq = np.zeros(2)   # for the delta-method se of p_true
    cross = 0.0
    pairs = 0
    done = 0
    while done < half:
        m = min(chunk, half - done)
        lat = _latents(rng, m, config)
        acc = 0.5 * (stats_matrix(lat, 1.0) + stats_matrix(lat, -1.0))
        sums += acc.sum(axis=0)
        sq += (acc[:, :2] ** 2).sum(axis=0)
        cross += float((acc[:, 0] * acc[:, 1]).sum())
        pairs += m
        done += m

    pi_ooo1 = sums[0] / pairs
    pi_ono1 = sums[1] / pairs
    p_true = pi_ooo1 / (pi_ooo1 + pi_ono1)
    mu1 = sums[3] / sums[2]
    mu2 = sums[4] / sums[2]
    mu3 = sums[6] / sums[5]
    p_true_alt = sums[7] / sums[2]

    # delta-method MC standard error for p_true over antithetic pair-averages
    var1 = sq[0] / pairs - pi_ooo1**2
    var2 = sq[1] / pairs - pi_ono1**2
    cov12 = cross / pairs - pi_ooo1 * pi_ono1
    tot = pi_ooo1 + pi_ono1
    d1 = pi_ono1 / tot**2
    d2 = -pi_ooo1 / tot**2
    se_mc = math.sqrt(
        max(d1 * d1 * var1 + 2 * d1 * d2 * cov12 + d2 * d2 * var2, 0.0) / pairs
    )

    sigma_w = math.sqrt(mu2 - mu1**2)
    mu_w = config.outcome_intercept + config.att + mu1
    control_mean = config.outcome_intercept + mu3
    z_p = float(ndtri(p_true))
    lb_true = mu_w - sigma_w * _norm_pdf(z_p) / p_true - control_mean
    ub_true = mu_w + sigma_w * _norm_pdf(float(ndtri(1.0 - p_true))) / p_true - control_mean
    return OracleResult(
        p_true=p_true,
        lb_true=lb_true,
        ub_true=ub_true,
        mu1=mu1,
        mu2=mu2,
        mu3=mu3,
        mc_draws=2 * pairs,
        se_mc=se_mc,
        p_true_alt=p_true_alt,
    )


ASSUMPTION_SET_NAMES = {
    "nomono": WITHOUT_MONOTONICITY,
    "mono-pos": MONO_POSITIVE,
}

MC_COLUMNS = [
    "n",
    "reps",
    "assumption_set",
    "mean_lb",
    "mean_ub",
    "mean_naive",
    "mean_p_ooo1",
    "coverage",
]


@dataclass
class MonteCarloRow:
    n: int
    reps: int
    assumption_set: str
    mean_lb: float
    mean_ub: float
    mean_naive: float
    mean_p_ooo1: float
    coverage: float
    failed_reps: int = 0
    lbs: list = field(default_factory=list)
    ubs: list = field(default_factory=list)

    def to_record(self) -> list:
        return [
            self.n,
            self.reps,
            self.assumption_set,
            self.mean_lb,
            self.mean_ub,
            self.mean_naive,
            self.mean_p_ooo1,
            self.coverage,
        ]


def run_monte_carlo(
    config: DgpConfig,
    reps: int,
    assumption_sets: list,
    coverage: str = "att",
    oracle: OracleResult | None = None,
    oracle_draws: int = 2_000_000,
) -> list:
    """Replication study over fresh DGP draws.

    ``coverage`` selects what the estimated interval must contain per
    replicate: "att" (the true treatment effect; default — the definition
    consistent with the reported coverage columns) or "interval" (the entire
    true bound interval).
    """
    if reps < 1:
        raise ValidationError("reps must be >= 1")
    if coverage not in ("att", "interval"):
        raise ValidationError(f"unknown coverage definition {coverage!r}")
    named = []
    for aset in assumption_sets:
        if isinstance(aset, str):
            if aset not in ASSUMPTION_SET_NAMES:
                raise ValidationError(f"unknown assumption set {aset!r}")
            named.append((aset, ASSUMPTION_SET_NAMES[aset]))
        else:
            name = "mono-pos" if aset.monotone else "nomono"
            named.append((name, aset))
    if coverage == "interval" and oracle is None:
        oracle = oracle_true_values(config, oracle_draws)
    lb_true = oracle.lb_true if oracle else None
    ub_true = oracle.ub_true if oracle else None

    acc = {
        name: {"lb": [], "ub": [], "p": [], "covered": 0, "failed": 0}
        for name, _ in named
    }
    naive_vals = []
    for rep in range(reps):
        cfg = replace(config, seed=[_seed_scalar(config.seed), rep])
        panel = generate_panel(cfg)
        naive_vals.append(_bounds.naive_did(panel))
        for name, aset in named:
            try:
                res = _bounds.bounds_tau_ooo(panel, aset)
            except EstimationError:
                acc[name]["failed"] += 1
                continue
            acc[name]["lb"].append(res.lb)
            acc[name]["ub"].append(res.ub)
            acc[name]["p"].append(res.proportions.p_ooo1)
            if coverage == "att":
                covered = res.lb <= config.att <= res.ub
            else:
                covered = res.lb <= lb_true and res.ub >= ub_true
            acc[name]["covered"] += bool(covered)

    rows = []
    mean_naive = float(np.mean(naive_vals))
    for name, _ in named:
        a = acc[name]
        ok = len(a["lb"])
        rows.append(
            MonteCarloRow(
                n=config.n,
                reps=reps,
                assumption_set=name,
                mean_lb=float(np.mean(a["lb"])) if ok else math.nan,
                mean_ub=float(np.mean(a["ub"])) if ok else math.nan,
                mean_naive=mean_naive,
                mean_p_ooo1=float(np.mean(a["p"])) if ok else math.nan,
                coverage=a["covered"] / ok if ok else math.nan,
                failed_reps=a["failed"],
                lbs=a["lb"],
                ubs=a["ub"],
            )
        )
    return rows


def _seed_scalar(seed) -> int:
    if isinstance(seed, (list, tuple)):
        return int(seed[0])
    return int(seed)


def monte_carlo_csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MC_COLUMNS)
    for row in rows:
        writer.writerow(row.to_record())
    return buf.getvalue()
