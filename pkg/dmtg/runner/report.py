# file: dmtg/runner/report.py

"""
Comparison tables from a results directory: one row per method with total
loss, mean NormGain and planted-partition recovery averaged over seeds,
plus the spread over seeds and the relative encoder complexity.
"""

import os
from dataclasses import dataclass
from typing import List, Optional

import pandas as pd

from dmtg.errors import EmptyResultsError
from dmtg.runner.records import RELATIVE_ENCODER_COMPLEXITY, RunRecord
from dmtg.runner.results_writer import atomic_write_text, read_records
from logger import AppLogger

logger = AppLogger().get_logger("report")

SUMMARY_CSV = "summary.csv"
SUMMARY_TXT = "summary.txt"
GROUPS_CSV = "groups.csv"
PLOT_PNG = "normgain.png"


@dataclass
class Report:
    summary: pd.DataFrame
    groups: pd.DataFrame
    text: str


def records_to_frame(records: List[RunRecord]) -> pd.DataFrame:
    return pd.DataFrame([{
        "method": r.method,
        "seed": r.seed,
        "total_loss": r.total_loss,
        "mean_normgain_pct": r.mean_normgain_pct,
        "exact_match": r.exact_match,
        "rand_index": r.rand_index,
        "partition": r.partition,
        "groups": r.groups,
    } for r in records])


def summarize(frame: pd.DataFrame) -> pd.DataFrame:
    """Per-method means and population spread over seeds, methods in order of first appearance."""
    grouped = frame.groupby("method", sort=False)
    summary = pd.DataFrame({
        "seeds": grouped["seed"].count(),
        "total_loss": grouped["total_loss"].mean(),
        "total_loss_spread": grouped["total_loss"].std(ddof=0),
        "mean_normgain_pct": grouped["mean_normgain_pct"].mean(),
        "normgain_spread": grouped["mean_normgain_pct"].std(ddof=0),
    })
    if frame["rand_index"].notna().any():
        summary["exact_match_rate"] = grouped["exact_match"].apply(
            lambda s: s.dropna().astype(float).mean() if s.notna().any() else float("nan"))
        summary["rand_index"] = grouped["rand_index"].mean()
    summary["encoder_complexity"] = [RELATIVE_ENCODER_COMPLEXITY.get(m, "?") for m in summary.index]
    return summary.reset_index()


def format_summary(summary: pd.DataFrame) -> str:
    shown = summary.copy()
    shown["total_loss"] = [f"{m:.4g} ± {s:.2g}" for m, s in zip(summary["total_loss"], summary["total_loss_spread"])]
    shown["NormGain_L (%)"] = [f"{m:+.2f} ± {s:.2f}"
                               for m, s in zip(summary["mean_normgain_pct"], summary["normgain_spread"])]
    shown = shown.drop(columns=["total_loss_spread", "mean_normgain_pct", "normgain_spread"])
    for column in ("exact_match_rate", "rand_index"):
        if column in shown:
            shown[column] = [f"{v:.2f}" for v in shown[column]]
    return shown.to_string(index=False)


def create_visualization(summary: pd.DataFrame, save_path: str) -> str:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(summary)), 4))
    bars = ax.bar(summary["method"], summary["mean_normgain_pct"], yerr=summary["normgain_spread"],
                  color="skyblue", capsize=4)
    ax.axhline(0.0, color="gray", linewidth=0.8)
    ax.set_title("Mean NormGain over naive MTL")
    ax.set_ylabel("NormGain_L (%)")

    # value labels on the bars
    for bar, value in zip(bars, summary["mean_normgain_pct"]):
        ax.text(bar.get_x() + bar.get_width() / 2, bar.get_height(), f"{value:+.2f}", ha="center", va="bottom")

    fig.tight_layout()
    fig.savefig(save_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    logger.info(f"📊 NormGain chart saved to {save_path}")
    return save_path


def report(records_dir: str, plot: bool = False, out_dir: Optional[str] = None) -> Report:
    """
    Aggregate run records into comparison tables.

    Args:
        records_dir: directory holding records.jsonl.
        plot: also save a NormGain bar chart.
        out_dir: where summary files go; records_dir when omitted.

    Returns:
        Report with the per-method summary, the per-seed groupings and the aligned text.
    """
    records = read_records(records_dir)
    if not records:
        logger.error(f"❌ No run records in {records_dir}")
        raise EmptyResultsError(f"no run records found in {records_dir}")

    frame = records_to_frame(records)
    summary = summarize(frame)
    groups = frame[["method", "seed", "partition", "groups"]]
    text = format_summary(summary)

    out_dir = out_dir or records_dir
    os.makedirs(out_dir, exist_ok=True)
    atomic_write_text(os.path.join(out_dir, SUMMARY_CSV), summary.to_csv(index=False, lineterminator="\n"))
    atomic_write_text(os.path.join(out_dir, GROUPS_CSV), groups.to_csv(index=False, lineterminator="\n"))
    atomic_write_text(os.path.join(out_dir, SUMMARY_TXT), text + "\n")
    if plot:
        create_visualization(summary, os.path.join(out_dir, PLOT_PNG))
    logger.info(f"✅ Report over {len(records)} records written to {out_dir}")
    return Report(summary=summary, groups=groups, text=text)
