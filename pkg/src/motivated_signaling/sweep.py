"""Region tables over parameter grids and the interval data behind the
three-panel equilibrium visualization.

Emits plot-ready data only (CSV); rendering lives in :mod:`.report`.

CSV schemas (fixed column order, full-precision values via ``str(float)``):

* region table: ``<varied params...>,bne_sep,bne_poolH,bne_poolL,me_row1,
  me_row2,me_row3,me_row4,me_row5,me_row6`` with 0/1 flags
* interval endpoints: ``line,gamma_lo,gamma_hi`` where ``line`` is one of
  ``me_row1`` .. ``me_row6`` and an unbounded upper endpoint renders as
  ``inf``
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

from .equilibrium import BneKind, enumerate_me, enumerate_pure_bne, me_region
from .game_core import GameParams, OffPathPolicy

SWEEPABLE_PARAMS = (
    "prior",
    "honesty_weight",
    "rating_weight",
    "bias_true",
    "bias_hat_receiver",
    "bias_hat_sender",
)

_FLAG_COLUMNS = (
    "bne_sep",
    "bne_poolH",
    "bne_poolL",
    "me_row1",
    "me_row2",
    "me_row3",
    "me_row4",
    "me_row5",
    "me_row6",
)

_KIND_TO_FLAG = {
    BneKind.SEPARATING: "bne_sep",
    BneKind.POOL_H: "bne_poolH",
    BneKind.POOL_L: "bne_poolL",
}

# short CSV column names for the varied parameters
_PARAM_COLUMN = {
    "prior": "pi",
    "honesty_weight": "tau",
    "rating_weight": "gamma",
    "bias_true": "lambda",
    "bias_hat_receiver": "lambda_hat_r",
    "bias_hat_sender": "lambda_hat_s",
}


@dataclass(frozen=True)
class SweepSpec:
    """Grid over one or two scalar parameters, everything else fixed."""

    vary: tuple[str, ...]
    minimum: float
    maximum: float
    step: float
    fixed: GameParams

    def __post_init__(self) -> None:
        if not 1 <= len(self.vary) <= 2:
            raise ValueError("vary must name one or two parameters")
        for name in self.vary:
            if name not in SWEEPABLE_PARAMS:
                raise ValueError(f"unknown sweep parameter {name!r}; choose from {SWEEPABLE_PARAMS}")
        if len(set(self.vary)) != len(self.vary):
            raise ValueError("vary names must be distinct")
        if not self.minimum < self.maximum:
            raise ValueError("sweep requires minimum < maximum")
        if not self.step > 0.0:
            raise ValueError("sweep step must be positive")

    def grid(self) -> list[float]:
        n = int(math.floor((self.maximum - self.minimum) / self.step + 1e-9)) + 1
        return [self.minimum + k * self.step for k in range(n)]


@dataclass(frozen=True)
class RegionRow:
    values: tuple[float, ...]
    bne_flags: dict[str, bool]
    me_flags: dict[str, bool]
    me_min_slacks: dict[str, float]


@dataclass(frozen=True)
class RegionTable:
    spec: SweepSpec
    rows: tuple[RegionRow, ...]

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(_PARAM_COLUMN[p] for p in self.spec.vary) + _FLAG_COLUMNS


def _params_with(fixed: GameParams, updates: dict[str, float]) -> GameParams:
    return dataclasses.replace(fixed, **updates)


def sweep(spec: SweepSpec) -> RegionTable:
    """Pointwise BNE/ME flags over the grid, ascending, one row per point."""
    axes = [spec.grid() for _ in spec.vary]
    points: Iterable[tuple[float, ...]]
    if len(spec.vary) == 1:
        points = [(v,) for v in axes[0]]
    else:
        points = [(a, b) for a in axes[0] for b in axes[1]]

    rows = []
    for values in points:
        params = _params_with(spec.fixed, dict(zip(spec.vary, values)))
        kinds = {
            b.kind
            for b in enumerate_pure_bne(
                params.prior,
                params.honesty_weight,
                params.rating_weight,
                params.bias_true,
                params.off_path,
            )
        }
        mes = enumerate_me(params)
        me_rows = {m.row for m in mes}
        rows.append(
            RegionRow(
                values=values,
                bne_flags={flag: kind in kinds for kind, flag in _KIND_TO_FLAG.items()},
                me_flags={f"me_row{r}": r in me_rows for r in range(1, 7)},
                me_min_slacks={f"me_row{m.row}": m.min_slack for m in mes},
            )
        )
    return RegionTable(spec, tuple(rows))


def write_region_csv(table: RegionTable, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow(
            [str(v) for v in row.values]
            + [int(row.bne_flags[c]) for c in _FLAG_COLUMNS[:3]]
            + [int(row.me_flags[c]) for c in _FLAG_COLUMNS[3:]]
        )


# ---------------------------------------------------------------------------
# Equilibrium-visualization panels

PANEL_PARAMS: dict[str, GameParams] = {
    # shared calibration: prior 0.587, honesty weight 1, true bias equal to
    # the receiver's believed bias, full punishment off path; the panels
    # differ in the two belief parameters. rating_weight is the swept axis
    # and irrelevant here (set to 1).
    "A": GameParams(0.587, 1.0, 1.0, 0.114, 0.114, 0.30, OffPathPolicy.full_punishment()),
    "B": GameParams(0.587, 1.0, 1.0, 0.114, 0.114, 0.114, OffPathPolicy.full_punishment()),
    "C": GameParams(0.587, 1.0, 1.0, 0.30, 0.30, 0.30, OffPathPolicy.full_punishment()),
}


@dataclass(frozen=True)
class LineInterval:
    line: str
    gamma_lo: float
    gamma_hi: float


def figure_eqviz_data(panel: str, gamma_range: tuple[float, float] = (0.0, 30.0)) -> list[LineInterval]:
    """Analytic rating-weight interval per equilibrium line of one panel.

    Rows whose interval is empty, degenerates to a single point (equal
    belief parameters), or misses ``gamma_range`` are omitted; an unbounded
    interval carries ``math.inf``.
    """
    key = panel.upper()
    if key not in PANEL_PARAMS:
        raise ValueError(f"panel must be one of {sorted(PANEL_PARAMS)}, got {panel!r}")
    params = PANEL_PARAMS[key]
    lo, hi = gamma_range
    region = me_region(params, (max(lo, 1e-12), hi if hi > 0 else 30.0))
    out = []
    for row in range(1, 7):
        for a, b in region[row]:
            if b > a:
                out.append(LineInterval(f"me_row{row}", a, b))
    return out


def write_endpoints_csv(lines: list[LineInterval], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["line", "gamma_lo", "gamma_hi"])
    for li in lines:
        writer.writerow([li.line, str(li.gamma_lo), "inf" if math.isinf(li.gamma_hi) else str(li.gamma_hi)])
