"""Evaluation harness: run configurations over a corpus, compute the
per-sentence and aggregate metrics, compare with gold annotations and emit
machine-readable reports.

Metrics per sentence: NbW (words fed to the parser), NbL (linkage count),
PT (parse seconds), CLF (complete linkage found), EL (erroneous links
against gold, on the best linkage mapped to original token indices) and CQ
(a judged quality score ingested from a sidecar file, never computed).
Aggregates are arithmetic means; ratio columns are 100*avg(config)/avg(lp).
Sentences that time out count CLF=0 and are excluded from the NbL and PT
averages, with the exclusion count reported.
"""

from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .errors import MissingBaselineError, ResourceError
from .morpho import GuessStatus
from .normalize import segment_sentences
from .pipeline import ConfigSpec, Pipeline

BASELINE = "lp"


# --- corpus and gold files ---------------------------------------------------

def load_corpus(path, abbreviations=()) -> list:
    """Sentences as (id, text).  Each line of the corpus file is segmented
    independently; ids are s001, s002, ... in reading order."""
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            sentences.extend(segment_sentences(line, abbreviations))
    return [(f"s{i:03d}", s) for i, s in enumerate(sentences, 1)]


def load_gold_links(path) -> dict:
    """Gold link sets: sentence id -> set of (left, right, label)."""
    gold = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ResourceError(
                    "BAD_GOLD_LINE", f"expected 'id<TAB>left<TAB>right<TAB>label', got {line!r}",
                    path, lineno,
                )
            sid, left, right, label = parts
            try:
                triple = (int(left), int(right), label)
            except ValueError:
                raise ResourceError(
                    "BAD_GOLD_LINE", f"non-integer index in {line!r}", path, lineno
                ) from None
            gold.setdefault(sid, set()).add(triple)
    return gold


def load_gold_categories(path) -> dict:
    cats = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ResourceError(
                    "BAD_GOLD_LINE", f"expected 'word<TAB>category', got {line!r}", path, lineno
                )
            cats[parts[0]] = parts[1]
    return cats


def ingest_cq_scores(path) -> dict:
    """Sentence id -> judged quality score in [0, 1]."""
    scores = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ResourceError(
                    "BAD_CQ_LINE", f"expected 'id<TAB>score', got {line!r}", path, lineno
                )
            try:
                value = float(parts[1])
            except ValueError:
                raise ResourceError(
                    "SCORE_OUT_OF_RANGE", f"not a number: {parts[1]!r}", path, lineno
                ) from None
            if not 0.0 <= value <= 1.0:
                raise ResourceError(
                    "SCORE_OUT_OF_RANGE", f"score {value} outside [0, 1]", path, lineno
                )
            scores[parts[0]] = value
    return scores


def count_erroneous_links(best_links, gold_links) -> int:
    """EL: links of the best linkage absent from the gold set."""
    return len({tuple(l) for l in best_links} - set(gold_links))


# --- corpus runs -------------------------------------------------------------

_WORKER_PIPELINES = {}


def _worker_process(config, sid, raw):
    pipeline = _WORKER_PIPELINES.get(config)
    if pipeline is None:
        pipeline = Pipeline(config)
        _WORKER_PIPELINES[config] = pipeline
    return pipeline.process(sid, raw)


def run_config(sentences, config: ConfigSpec, jobs=1) -> list:
    """Process (id, text) pairs under one configuration.  Per-sentence
    errors are recorded on the outcome, never aborting the run; resource
    errors propagate immediately."""
    if jobs <= 1:
        pipeline = Pipeline(config)
        return [pipeline.process(sid, raw) for sid, raw in sentences]
    Pipeline(config)  # fail fast on resource errors before forking
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_worker_process, config, sid, raw) for sid, raw in sentences]
        return [f.result() for f in futures]


# --- aggregation -------------------------------------------------------------

METRICS = ("NbW", "NbL", "PT", "CLF", "EL", "CQ")


def format_percent(value) -> str:
    """Half-up rounding to one decimal place, keeping two decimals below
    one percent so small ratios stay visible."""
    d = Decimal(str(value))
    places = Decimal("0.01") if abs(d) < 1 else Decimal("0.1")
    return str(d.quantize(places, rounding=ROUND_HALF_UP))


def ratio_percent(value, base) -> str:
    return format_percent(100.0 * value / base)


def combine_error_rates(uw_total, uw_err_pct, gw_total, gw_err_pct):
    """Aggregate an out-of-lexicon error rate from per-row totals and
    percentages, via integer error counts."""
    uw_errors = int(
        Decimal(str(uw_total * uw_err_pct / 100.0)).quantize(Decimal("1"), rounding=ROUND_HALF_UP)
    )
    gw_errors = int(
        Decimal(str(gw_total * gw_err_pct / 100.0)).quantize(Decimal("1"), rounding=ROUND_HALF_UP)
    )
    total = uw_total + gw_total
    rate = 100.0 * (uw_errors + gw_errors) / total if total else 0.0
    return uw_errors + gw_errors, rate


def _mean(values):
    values = list(values)
    return sum(values) / len(values) if values else None


@dataclass
class ConfigAggregate:
    name: str
    averages: dict
    ratios: dict = field(default_factory=dict)   # metric -> formatted "%/lp"
    uw_total: int = 0
    gw_total: int = 0
    uw_errors: int = None
    gw_errors: int = None
    timeouts: int = 0
    conflicts: int = 0
    el_sentences: int = 0
    cq_sentences: int = 0

    @property
    def ool_total(self):
        return self.uw_total + self.gw_total

    def error_pct(self, errors, total):
        if errors is None or not total:
            return None
        return 100.0 * errors / total


@dataclass
class EvalReport:
    configs: list                 # ConfigAggregate, lp first
    per_sentence: dict            # config name -> [SentenceOutcome]
    gold_category_file: bool = False

    def aggregate_for(self, name):
        for agg in self.configs:
            if agg.name == name:
                return agg
        raise KeyError(name)

    def to_json_dict(self):
        return {
            "configs": [
                {
                    "name": agg.name,
                    "averages": agg.averages,
                    "ratios": agg.ratios,
                    "table1": {
                        "UW": agg.uw_total,
                        "GW": agg.gw_total,
                        "OoL": agg.ool_total,
                        "UWErrors": agg.uw_errors,
                        "GWErrors": agg.gw_errors,
                        "UWErrorPct": agg.error_pct(agg.uw_errors, agg.uw_total),
                        "GWErrorPct": agg.error_pct(agg.gw_errors, agg.gw_total),
                        "OoLErrorPct": agg.error_pct(
                            (agg.uw_errors or 0) + (agg.gw_errors or 0)
                            if agg.uw_errors is not None
                            else None,
                            agg.ool_total,
                        ),
                    },
                    "timeoutsExcluded": agg.timeouts,
                    "reexpansionConflicts": agg.conflicts,
                    "sentencesWithGoldLinks": agg.el_sentences,
                    "sentencesWithCQ": agg.cq_sentences,
                }
                for agg in self.configs
            ],
            "sentences": {
                name: [o.to_json_dict() for o in outcomes]
                for name, outcomes in self.per_sentence.items()
            },
        }


def aggregate(results, gold_links=None, gold_categories=None, cq_scores=None) -> EvalReport:
    """Fold per-sentence outcomes for all configs into an EvalReport.

    ``results``: {config name: [SentenceOutcome]}; the lp baseline must be
    present.  ``cq_scores``: {config name: {sentence id: score}}.
    """
    if BASELINE not in results:
        raise MissingBaselineError(f"ratio baseline {BASELINE!r} missing from results")
    gold_links = gold_links or {}
    cq_scores = cq_scores or {}

    aggregates = {}
    for name, outcomes in results.items():
        per_config_cq = cq_scores.get(name, {})
        nbl_values, pt_values, el_values, cq_values = [], [], [], []
        nbw_values, clf_values = [], []
        uw = gw = timeouts = conflicts = 0
        uw_err = gw_err = 0
        for o in outcomes:
            nbw_values.append(o.nbw)
            clf_values.append(o.clf)
            if o.timed_out:
                timeouts += 1
            else:
                nbl_values.append(o.nbl)
                pt_values.append(o.pt)
            if o.reexpansion_conflict:
                conflicts += 1
            uw += o.uw
            gw += o.gw
            if gold_categories:
                for word, status, category in o.guesses:
                    gold_cat = gold_categories.get(word) or gold_categories.get(word.lower())
                    if status is GuessStatus.KNOWN or gold_cat is None:
                        continue
                    wrong = gold_cat != category
                    if status is GuessStatus.UNKNOWN_FALLBACK:
                        uw_err += wrong
                    else:
                        gw_err += wrong
            gold = gold_links.get(o.sentence_id)
            if gold is not None and o.best_links is not None:
                max_index = max(max(l, r) for l, r, _ in gold) if gold else 0
                if max_index >= o.original_nbw:
                    o.error = f"GOLD_INDEX_OUT_OF_RANGE: {o.sentence_id}"
                else:
                    el_values.append(count_erroneous_links(o.best_links, gold))
            score = per_config_cq.get(o.sentence_id)
            if score is not None:
                cq_values.append(score)
        agg = ConfigAggregate(
            name=name,
            averages={
                "NbW": _mean(nbw_values),
                "NbL": _mean(nbl_values),
                "PT": _mean(pt_values),
                "CLF": _mean(clf_values),
                "EL": _mean(el_values),
                "CQ": _mean(cq_values),
            },
            uw_total=uw,
            gw_total=gw,
            uw_errors=uw_err if gold_categories else None,
            gw_errors=gw_err if gold_categories else None,
            timeouts=timeouts,
            conflicts=conflicts,
            el_sentences=len(el_values),
            cq_sentences=len(cq_values),
        )
        aggregates[name] = agg

    base = aggregates[BASELINE].averages
    for name, agg in aggregates.items():
        for metric in METRICS:
            value, baseline = agg.averages.get(metric), base.get(metric)
            if value is None or baseline in (None, 0):
                agg.ratios[metric] = None
            else:
                agg.ratios[metric] = ratio_percent(value, baseline)

    ordered = [aggregates[BASELINE]] + [
        aggregates[n] for n in results if n != BASELINE
    ]
    return EvalReport(ordered, dict(results), gold_category_file=bool(gold_categories))


# --- report rendering ---------------------------------------------------------

def _fmt_avg(value):
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return f"{value:.4g}" if value < 1000 else f"{value:,.0f}"
    return str(value)


def render_table2_rows(report: EvalReport):
    """Rows shaped like the parsing time and quality table: one row per
    criterion, per config an average and a %/lp column (skipped for lp)."""
    header = ["crit"]
    for agg in report.configs:
        header.append(f"{agg.name} avg")
        if agg.name != BASELINE:
            header.append(f"{agg.name} %/lp")
    rows = [header]
    for metric in METRICS:
        row = [metric]
        for agg in report.configs:
            row.append(_fmt_avg(agg.averages.get(metric)))
            if agg.name != BASELINE:
                ratio = agg.ratios.get(metric)
                row.append("n/a" if ratio is None else f"{ratio}%")
        rows.append(row)
    return rows


def render_table1_rows(report: EvalReport):
    header = ["row"]
    for agg in report.configs:
        header.append(f"{agg.name} total")
        header.append(f"{agg.name} incorrect%")
    rows = [header]
    for label in ("UW", "GW", "OoL"):
        row = [label]
        for agg in report.configs:
            if label == "UW":
                total, errors = agg.uw_total, agg.uw_errors
            elif label == "GW":
                total, errors = agg.gw_total, agg.gw_errors
            else:
                total = agg.ool_total
                errors = (
                    (agg.uw_errors or 0) + (agg.gw_errors or 0)
                    if agg.uw_errors is not None
                    else None
                )
            row.append(str(total))
            pct = agg.error_pct(errors, total)
            row.append("n/a" if pct is None else f"{format_percent(pct)}%")
        rows.append(row)
    return rows


def render_text_tables(report: EvalReport) -> str:
    lines = ["Parsing time and quality ('%/lp' = 100*avg/avg(lp)):"]
    for rows in (render_table2_rows(report),):
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        for r in rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)))
    lines.append("")
    lines.append("Morpho-syntactic assignations (out-of-lexicon words):")
    rows = render_table1_rows(report)
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)))
    excluded = {agg.name: agg.timeouts for agg in report.configs}
    if any(excluded.values()):
        lines.append("")
        lines.append(f"Timed-out sentences excluded from NbL/PT averages: {excluded}")
    return "\n".join(lines)


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-report-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report_json(report: EvalReport, path):
    _atomic_write(path, json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n")


def write_report_csv(report: EvalReport, path):
    lines = ["# Table 2: parsing time and quality"]
    lines += [",".join(row) for row in render_table2_rows(report)]
    lines.append("")
    lines.append("# Table 1: incorrect morpho-syntactic category assignations")
    lines += [",".join(row) for row in render_table1_rows(report)]
    _atomic_write(path, "\n".join(lines) + "\n")
