"""Dataset types, latent-group taxonomy, assumption sets, and CSV ingestion.

Missing outcomes are blank CSV fields (never sentinel numbers) and are stored
as NaN internally; an outcome is defined exactly when the matching selection
indicator is 1. All dataset types are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    DataWarning,
    DegenerateSampling,
    EmptyFile,
    InconsistentGvar,
    InvalidAssumptions,
    MalformedRow,
    MissingBaseline,
    MissingOutcome,
)

PANEL_HEADER = ["id", "d", "s0", "s1", "y0", "y1"]
RCS_HEADER = ["id", "t", "d", "s", "y"]
MULTI_HEADER = ["id", "gvar", "t", "s", "y"]


class LatentGroup(Enum):
    """The eight principal strata defined by (S0(0), S1(0), S1(1))."""

    NNN = (0, 0, 0)
    NNO = (0, 0, 1)
    NON = (0, 1, 0)
    NOO = (0, 1, 1)
    ONN = (1, 0, 0)
    ONO = (1, 0, 1)
    OON = (1, 1, 0)
    OOO = (1, 1, 1)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class AssumptionSet:
    """Which identifying assumptions a bound is computed under.

    ``variant`` is "without_monotonicity" or "with_monotonicity"; in the latter
    case ``direction`` is "positive" or "negative". The other-group bounds
    additionally require joint independence of counterfactual selection and
    a mean-dominance flag ("5a" for tau_ONO, "5b" for tau_NNO, "5c" for
    tau_NOO).
    """

    variant: str = "without_monotonicity"
    direction: str | None = None
    joint_independence: bool = False
    mean_dominance: str | None = None

    def __post_init__(self):
        if self.variant not in ("without_monotonicity", "with_monotonicity"):
            raise InvalidAssumptions(f"unknown variant {self.variant!r}")
        if self.variant == "with_monotonicity":
            if self.direction not in ("positive", "negative"):
                raise InvalidAssumptions(
                    "with_monotonicity requires direction 'positive' or 'negative'"
                )
        elif self.direction is not None:
            raise InvalidAssumptions("direction only applies with monotonicity")
        if self.mean_dominance not in (None, "5a", "5b", "5c"):
            raise InvalidAssumptions(f"unknown mean_dominance {self.mean_dominance!r}")

    @property
    def monotone(self) -> bool:
        return self.variant == "with_monotonicity"

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "direction": self.direction,
            "joint_independence": self.joint_independence,
            "mean_dominance": self.mean_dominance,
        }


WITHOUT_MONOTONICITY = AssumptionSet("without_monotonicity")
MONO_POSITIVE = AssumptionSet("with_monotonicity", "positive")
MONO_NEGATIVE = AssumptionSet("with_monotonicity", "negative")


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PanelDataset:
    """Two-period panel: per unit (id, D, S0, S1, Y0, Y1)."""

    ids: tuple
    d: np.ndarray
    s0: np.ndarray
    s1: np.ndarray
    y0: np.ndarray
    y1: np.ndarray

    @classmethod
    def from_records(cls, ids, d, s0, s1, y0, y1) -> "PanelDataset":
        return cls(
            ids=tuple(str(i) for i in ids),
            d=_frozen_array(d, np.int8),
            s0=_frozen_array(s0, np.int8),
            s1=_frozen_array(s1, np.int8),
            y0=_frozen_array(y0, np.float64),
            y1=_frozen_array(y1, np.float64),
        )

    @property
    def n(self) -> int:
        return len(self.ids)

    def take(self, indices) -> "PanelDataset":
        """Row subset/resample (used by the bootstrap); ids carried over."""
        idx = np.asarray(indices, dtype=np.intp)
        return PanelDataset(
            ids=tuple(self.ids[i] for i in idx),
            d=_frozen_array(self.d[idx], np.int8),
            s0=_frozen_array(self.s0[idx], np.int8),
            s1=_frozen_array(self.s1[idx], np.int8),
            y0=_frozen_array(self.y0[idx], np.float64),
            y1=_frozen_array(self.y1[idx], np.float64),
        )


@dataclass(frozen=True)
class RcsDataset:
    """Repeated cross-sections: per row (id, T, D, S, Y)."""

    ids: tuple
    t: np.ndarray
    d: np.ndarray
    s: np.ndarray
    y: np.ndarray

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def lam(self) -> float:
        """Share of rows sampled in the post-treatment period."""
        return float(np.mean(self.t))

    def take(self, indices) -> "RcsDataset":
        idx = np.asarray(indices, dtype=np.intp)
        return RcsDataset(
            ids=tuple(self.ids[i] for i in idx),
            t=_frozen_array(self.t[idx], np.int8),
            d=_frozen_array(self.d[idx], np.int8),
            s=_frozen_array(self.s[idx], np.int8),
            y=_frozen_array(self.y[idx], np.float64),
        )


@dataclass(frozen=True)
class MultiPeriodPanel:
    """Long-format staggered panel; gvar=0 encodes never-treated."""

    ids: tuple          # row-level id tokens
    gvar: np.ndarray
    t: np.ndarray
    s: np.ndarray
    y: np.ndarray
    unit_ids: tuple = field(default=())   # distinct ids in first-seen order

    @property
    def periods(self) -> tuple:
        return tuple(sorted(set(int(v) for v in self.t)))


def _read_rows(path, header):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: empty file", path=str(path))
        if got != header:
            raise MalformedRow(
                f"{path}: expected header {','.join(header)}, got {','.join(got)}",
                line=1,
            )
        rows = list(reader)
    if not rows:
        raise EmptyFile(f"{path}: no data rows", path=str(path))
    return rows


def _parse_binary(raw, line, col):
    if raw not in ("0", "1"):
        raise MalformedRow(f"line {line}: {col} must be 0 or 1, got {raw!r}", line=line)
    return int(raw)


def _parse_outcome(raw, s, line, col):
    """Outcome field: blank iff the matching selection indicator allows it."""
    if raw == "":
        if s == 1:
            raise MissingOutcome(f"line {line}: {col} blank but selected", line=line)
        return np.nan
    try:
        value = float(raw)
    except ValueError:
        raise MalformedRow(f"line {line}: {col} not numeric: {raw!r}", line=line)
    if s == 0:
        warnings.warn(
            f"line {line}: {col} present but unit not selected; value dropped",
            DataWarning,
            stacklevel=3,
        )
        return np.nan
    return value


def load_panel_csv(path) -> PanelDataset:
    rows = _read_rows(path, PANEL_HEADER)
    ids, d, s0, s1, y0, y1 = [], [], [], [], [], []
    for i, row in enumerate(rows):
        line = i + 2
        if len(row) != 6:
            raise MalformedRow(f"line {line}: expected 6 fields, got {len(row)}", line=line)
        ids.append(row[0])
        d.append(_parse_binary(row[1], line, "d"))
        s0.append(_parse_binary(row[2], line, "s0"))
        s1.append(_parse_binary(row[3], line, "s1"))
        y0.append(_parse_outcome(row[4], s0[-1], line, "y0"))
        y1.append(_parse_outcome(row[5], s1[-1], line, "y1"))
    return PanelDataset.from_records(ids, d, s0, s1, y0, y1)


def load_rcs_csv(path) -> RcsDataset:
    rows = _read_rows(path, RCS_HEADER)
    ids, t, d, s, y = [], [], [], [], []
    for i, row in enumerate(rows):
        line = i + 2
        if len(row) != 5:
            raise MalformedRow(f"line {line}: expected 5 fields, got {len(row)}", line=line)
        ids.append(row[0])
        t.append(_parse_binary(row[1], line, "t"))
        d.append(_parse_binary(row[2], line, "d"))
        s.append(_parse_binary(row[3], line, "s"))
        y.append(_parse_outcome(row[4], s[-1], line, "y"))
    lam = sum(t) / len(t)
    if lam <= 0.0 or lam >= 1.0:
        raise DegenerateSampling(
            f"post-period sampling share must lie strictly in (0,1), got {lam}", lam=lam
        )
    return RcsDataset(
        ids=tuple(ids),
        t=_frozen_array(t, np.int8),
        d=_frozen_array(d, np.int8),
        s=_frozen_array(s, np.int8),
        y=_frozen_array(y, np.float64),
    )


def load_multi_csv(path) -> MultiPeriodPanel:
    rows = _read_rows(path, MULTI_HEADER)
    ids, gvar, t, s, y = [], [], [], [], []
    seen_gvar: dict = {}
    for i, row in enumerate(rows):
        line = i + 2
        if len(row) != 5:
            raise MalformedRow(f"line {line}: expected 5 fields, got {len(row)}", line=line)
        uid = row[0]
        try:
            g = int(row[1])
            per = int(row[2])
        except ValueError:
            raise MalformedRow(f"line {line}: gvar/t must be integers", line=line)
        if g < 0 or per < 0:
            raise MalformedRow(f"line {line}: gvar/t must be non-negative", line=line)
        if uid in seen_gvar and seen_gvar[uid] != g:
            raise InconsistentGvar(
                f"line {line}: id {uid} has gvar {g} but earlier gvar {seen_gvar[uid]}",
                id=uid,
            )
        seen_gvar[uid] = g
        ids.append(uid)
        gvar.append(g)
        t.append(per)
        s.append(_parse_binary(row[3], line, "s"))
        y.append(_parse_outcome(row[4], s[-1], line, "y"))
    has_period0 = {uid for uid, per in zip(ids, t) if per == 0}
    missing = [uid for uid in seen_gvar if uid not in has_period0]
    if missing:
        raise MissingBaseline(f"ids without a period-0 row: {missing[:5]}", ids=missing)
    return MultiPeriodPanel(
        ids=tuple(ids),
        gvar=_frozen_array(gvar, np.int64),
        t=_frozen_array(t, np.int64),
        s=_frozen_array(s, np.int8),
        y=_frozen_array(y, np.float64),
        unit_ids=tuple(seen_gvar),
    )


def _format_outcome(v) -> str:
    if np.isnan(v):
        return ""
    return repr(float(v))


def write_panel_csv(data: PanelDataset, path) -> None:
    """Canonical writer: rows sorted by id, shortest round-trip floats."""
    order = sorted(range(data.n), key=lambda i: data.ids[i])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PANEL_HEADER)
        for i in order:
            writer.writerow(
                [
                    data.ids[i],
                    int(data.d[i]),
                    int(data.s0[i]),
                    int(data.s1[i]),
                    _format_outcome(data.y0[i]),
                    _format_outcome(data.y1[i]),
                ]
            )


def cell_counts(data: PanelDataset) -> dict:
    """Counts by (s0, s1, d); the 8 cells always sum to n."""
    counts = {}
    for s0 in (0, 1):
        for s1 in (0, 1):
            for d in (0, 1):
                counts[(s0, s1, d)] = int(
                    np.sum((data.s0 == s0) & (data.s1 == s1) & (data.d == d))
                )
    return counts
