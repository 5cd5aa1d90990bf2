"""Report rendering: plain-text tables, JSON documents, and PNG figures.

Score reports always come out as JSON plus a text table; when an output
directory is given, a matplotlib figure lands next to them.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.dates as mdates
import matplotlib.pyplot as plt

from .domain import DECISION_USEFUL, Timeline
from .evalharness import RetrievalReport, SplitStats, round_half_up


def filtering_table(precision: float, recall: float, f1: float) -> str:
    lines = [
        "metric     value",
        "---------  -----",
        f"precision  {round_half_up(precision):.3f}",
        f"recall     {round_half_up(recall):.3f}",
        f"f1         {round_half_up(f1):.3f}",
    ]
    return "\n".join(lines)


def filtering_report_dict(precision: float, recall: float, f1: float) -> dict:
    return {
        "precision": round_half_up(precision),
        "recall": round_half_up(recall),
        "f1": round_half_up(f1),
    }


def retrieval_table(reports: list[RetrievalReport]) -> str:
    header = (
        f"{'system':<24} {'P(pledge)':>9} {'R(pledge)':>9} {'F1(pledge)':>10} "
        f"{'P(url)':>7} {'R(url)':>7} {'F1(url)':>8} {'novelty':>8}"
    )
    lines = [header, "-" * len(header)]
    for report in reports:
        pp, pr, pf = (round_half_up(v) for v in report.pledge_level)
        up, ur, uf = (round_half_up(v) for v in report.url_level)
        lines.append(
            f"{report.system_name:<24} {pp:>9.3f} {pr:>9.3f} {pf:>10.3f} "
            f"{up:>7.3f} {ur:>7.3f} {uf:>8.3f} {report.novelty:>8d}"
        )
    return "\n".join(lines)


def retrieval_report_dict(reports: list[RetrievalReport]) -> dict:
    return {
        "systems": [
            {
                "system": r.system_name,
                "pledge_level": {
                    "precision": round_half_up(r.pledge_level[0]),
                    "recall": round_half_up(r.pledge_level[1]),
                    "f1": round_half_up(r.pledge_level[2]),
                },
                "url_level": {
                    "precision": round_half_up(r.url_level[0]),
                    "recall": round_half_up(r.url_level[1]),
                    "f1": round_half_up(r.url_level[2]),
                },
                "novelty": r.novelty,
                "requests_scored": r.requests_scored,
                "warning": r.warning,
            }
            for r in reports
        ]
    }


def splits_table(stats: dict[str, SplitStats]) -> str:
    header = f"{'split':<7} {'instances':>9} {'pledges':>8} {'useful%':>8} {'events/pledge':>14}"
    lines = [header, "-" * len(header)]
    for split in ("train", "dev", "test"):
        s = stats[split]
        lines.append(
            f"{split:<7} {s.instances:>9d} {s.pledges:>8d} "
            f"{round_half_up(s.useful_pct, 2):>8.2f} {round_half_up(s.events_per_pledge, 2):>14.2f}"
        )
    return "\n".join(lines)


def splits_report_dict(stats: dict[str, SplitStats]) -> dict:
    return {
        split: {
            "instances": s.instances,
            "pledges": s.pledges,
            "useful_pct": round_half_up(s.useful_pct, 2),
            "events_per_pledge": round_half_up(s.events_per_pledge, 2),
        }
        for split, s in stats.items()
    }


def render_filtering_figure(precision: float, recall: float, f1: float, path: str | Path):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    names = ["precision", "recall", "f1"]
    values = [precision, recall, f1]
    bars = ax.bar(names, values, color=["#4c72b0", "#55a868", "#c44e52"])
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    ax.set_title("Fulfilment filtering quality")
    ax.bar_label(bars, fmt="%.3f", padding=2)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_retrieval_figure(reports: list[RetrievalReport], path: str | Path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.4), sharey=True)
    names = [r.system_name for r in reports]
    width = 0.25
    positions = range(len(names))
    for ax, level, title in (
        (axes[0], [r.pledge_level for r in reports], "Pledge-level (macro)"),
        (axes[1], [r.url_level for r in reports], "URL-level (micro)"),
    ):
        ax.bar([p - width for p in positions], [v[0] for v in level], width, label="P")
        ax.bar(list(positions), [v[1] for v in level], width, label="R")
        ax.bar([p + width for p in positions], [v[2] for v in level], width, label="F1")
        ax.set_xticks(list(positions))
        ax.set_xticklabels(names, rotation=15, ha="right", fontsize=8)
        ax.set_ylim(0, 1.05)
        ax.set_title(title)
    axes[0].set_ylabel("score")
    axes[1].legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_splits_figure(stats: dict[str, SplitStats], path: str | Path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
    splits = ["train", "dev", "test"]
    ax1.bar(splits, [stats[s].useful_pct for s in splits], color="#4c72b0")
    ax1.set_ylabel("useful (%)")
    ax1.set_title("Useful labels per split")
    ax2.bar(splits, [stats[s].events_per_pledge for s in splits], color="#55a868")
    ax2.set_ylabel("events per pledge")
    ax2.set_title("Annotation density")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_timeline_figure(timeline: Timeline, path: str | Path):
    """Dot-per-event date chart; useful events sit above filtered ones."""
    fig, ax = plt.subplots(figsize=(8, 2.8))
    if timeline.events:
        dates = [e.timestamp.date for e in timeline.events]
        levels = [1 if e.decision == DECISION_USEFUL else 0 for e in timeline.events]
        colors = ["#55a868" if lv else "#c44e52" for lv in levels]
        ax.scatter(dates, levels, c=colors, s=60, zorder=3)
        ax.xaxis.set_major_formatter(mdates.DateFormatter("%Y-%m-%d"))
        fig.autofmt_xdate()
    ax.set_yticks([0, 1])
    ax.set_yticklabels(["filtered", "useful"])
    ax.set_ylim(-0.5, 1.5)
    ax.set_title(f"Timeline events ({len(timeline.events)})")
    ax.grid(axis="x", linestyle=":", alpha=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
