"""Rendered outputs: the equilibrium-interval panels and treatment-effect
charts, written as image files next to the delimited data they draw."""

from __future__ import annotations

import csv
import dataclasses
import math
from pathlib import Path
from typing import Sequence, TextIO

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .experiment import EffectEstimate, TrialRecord, aggregate_effects
from .sweep import PANEL_PARAMS, LineInterval, figure_eqviz_data

_LINE_LABELS = {
    "me_row1": "truthful (perceived = actual)",
    "me_row2": "pool high (perceived = actual)",
    "me_row3": "pool low (perceived = actual)",
    "me_row4": "pool high, perceived truthful",
    "me_row5": "truthful, perceived pool low",
    "me_row6": "pool high, perceived pool low",
}

_LINE_COLORS = {
    "me_row1": "black",
    "me_row2": "dimgray",
    "me_row3": "silver",
    "me_row4": "tab:cyan",
    "me_row5": "teal",
    "me_row6": "tab:orange",
}


def render_eqviz_panels(path: str | Path, gamma_max: float = 30.0) -> None:
    """Three stacked interval panels over the rating weight, one per belief scenario."""
    fig, axes = plt.subplots(3, 1, figsize=(9, 7), sharex=True)
    for ax, panel in zip(axes, ("A", "B", "C")):
        params = PANEL_PARAMS[panel]
        lines = figure_eqviz_data(panel, (0.0, gamma_max))
        for y, li in enumerate(reversed(lines)):
            hi = min(li.gamma_hi, gamma_max)
            arrow = math.isinf(li.gamma_hi)
            color = _LINE_COLORS[li.line]
            ax.plot([li.gamma_lo, hi], [y, y], color=color, lw=3, solid_capstyle="round")
            marker_hi = ">" if arrow else "o"
            ax.plot([li.gamma_lo], [y], marker="o", color=color, ms=5)
            ax.plot([hi], [y], marker=marker_hi, color=color, ms=5)
            ax.annotate(
                _LINE_LABELS[li.line],
                xy=(hi if not arrow else gamma_max, y),
                xytext=(4, 0),
                textcoords="offset points",
                va="center",
                fontsize=8,
                color=color,
            )
        ax.set_yticks([])
        ax.set_ylim(-0.7, len(lines) - 0.3)
        ax.set_title(
            f"Panel {panel}: sender belief {params.bias_hat_sender:g}, "
            f"receiver belief {params.bias_hat_receiver:g}",
            fontsize=10,
            loc="left",
        )
    axes[-1].set_xlabel("rating weight")
    axes[-1].set_xlim(-0.5, gamma_max + 6.5)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def standard_effects(records: Sequence[TrialRecord], seed: int = 0) -> list[EffectEstimate]:
    """The default battery of contrasts, with incentive-arm subsets labeled."""
    incentivized = [r for r in records if r.incentivized or r.phase == "demand"]
    unincentivized = [r for r in records if not r.incentivized]
    out: list[EffectEstimate] = []

    def add(label: str, subset: Sequence[TrialRecord], contrast: str) -> None:
        try:
            est = aggregate_effects(subset, contrast, seed=seed)
        except Exception:
            return  # contrast not available for this mode/subset
        out.append(dataclasses.replace(est, contrast=label))

    add("party_false_vs_true[incentivized]", incentivized, "party_false_vs_true")
    add("party_false_vs_true[unincentivized]", unincentivized, "party_false_vs_true")
    add("party_false_vs_noinfo[incentivized]", incentivized, "party_false_vs_noinfo")
    add("political_vs_neutral[incentivized]", incentivized, "political_vs_neutral")
    add("incentivized_vs_not", records, "incentivized_vs_not")
    add("own_party_false[unincentivized]", unincentivized, "own_party_false")
    if any(r.phase == "demand" for r in records):
        add("info_purchase_gap", records, "info_purchase_gap")
    return out


def write_effects_csv(estimates: Sequence[EffectEstimate], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["contrast", "estimate_pp", "ci_lo_pp", "ci_hi_pp", "n_clusters", "n_obs"])
    for e in estimates:
        writer.writerow([e.contrast, str(e.estimate), str(e.ci_lo), str(e.ci_hi), e.n_clusters, e.n_obs])


def render_effects(estimates: Sequence[EffectEstimate], path: str | Path) -> None:
    """Horizontal point-and-whisker chart of the estimated contrasts."""
    fig, ax = plt.subplots(figsize=(8, 0.6 * max(len(estimates), 4) + 1.5))
    ys = range(len(estimates))
    for y, e in zip(ys, estimates):
        ax.errorbar(
            [e.estimate],
            [y],
            xerr=[[e.estimate - e.ci_lo], [e.ci_hi - e.estimate]],
            fmt="o",
            color="tab:blue",
            capsize=4,
        )
    ax.axvline(0.0, color="gray", lw=1, ls="--")
    ax.set_yticks(list(ys))
    ax.set_yticklabels([e.contrast for e in estimates], fontsize=9)
    ax.invert_yaxis()
    ax.set_xlabel("false-share difference (percentage points)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
