"""Report figures: rendered to PNG files next to the CSV/JSON output.

Two figures mirror the two report tables: the %/lp ratio chart for the
parsing metrics and the out-of-lexicon assignation chart.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluate import BASELINE, METRICS, EvalReport


def render_ratio_figure(report: EvalReport, path):
    """Bar chart of 100*avg(config)/avg(lp) per metric, log scale (term
    simplification moves NbL and PT by orders of magnitude)."""
    configs = [agg for agg in report.configs if agg.name != BASELINE]
    metrics = [m for m in METRICS if any(agg.ratios.get(m) for agg in configs)]
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / max(len(configs), 1)
    for k, agg in enumerate(configs):
        xs, ys = [], []
        for i, metric in enumerate(metrics):
            ratio = agg.ratios.get(metric)
            if ratio is None:
                continue
            xs.append(i + k * width)
            ys.append(float(ratio))
        ax.bar(xs, ys, width=width, label=agg.name)
    ax.axhline(100.0, color="grey", linewidth=0.8, linestyle="--", label=f"{BASELINE} = 100%")
    ax.set_yscale("log")
    ax.set_xticks([i + width * (len(configs) - 1) / 2 for i in range(len(metrics))])
    ax.set_xticklabels(metrics)
    ax.set_ylabel("% of lp average")
    ax.set_title("Parsing metrics relative to the base configuration")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_ool_figure(report: EvalReport, path):
    """Out-of-lexicon totals per config, split into guessed and unknown,
    with incorrect-assignation rates when a gold category file was given."""
    names = [agg.name for agg in report.configs]
    uw = [agg.uw_total for agg in report.configs]
    gw = [agg.gw_total for agg in report.configs]
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = range(len(names))
    ax.bar(xs, gw, label="guessed (GW)", color="#4c9f70")
    ax.bar(xs, uw, bottom=gw, label="unknown (UW)", color="#c2543d")
    if report.gold_category_file:
        for i, agg in enumerate(report.configs):
            errors = (agg.uw_errors or 0) + (agg.gw_errors or 0)
            pct = agg.error_pct(errors, agg.ool_total)
            if pct is not None:
                ax.text(
                    i, agg.ool_total, f"{pct:.1f}% wrong",
                    ha="center", va="bottom", fontsize=9,
                )
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names)
    ax.set_ylabel("out-of-lexicon assignations")
    ax.set_title("Out-of-lexicon words per configuration")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figures(report: EvalReport, out_dir) -> list:
    paths = []
    ratio_path = os.path.join(out_dir, "report-ratios.png")
    render_ratio_figure(report, ratio_path)
    paths.append(ratio_path)
    ool_path = os.path.join(out_dir, "report-ool.png")
    render_ool_figure(report, ool_path)
    paths.append(ool_path)
    return paths
