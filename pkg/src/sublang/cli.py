"""Command-line entry point.

Subcommands: ``parse`` (one sentence, ASCII arc diagram + JSON),
``eval`` (corpus run producing report.json/report.csv and figures) and
``validate`` (load every configured resource and report OK or the first
error).  Exit codes: 0 success, 1 resource or configuration error, 2 no
complete linkage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .engine import render_diagram
from .errors import SublangError
from .evaluate import (
    aggregate,
    ingest_cq_scores,
    load_corpus,
    load_gold_categories,
    load_gold_links,
    render_text_tables,
    run_config,
    write_report_csv,
    write_report_json,
)
from .grammar import apply_overlay, load_dictionary
from .morpho import load_mg_rules, validate_rules
from .normalize import EntityDictionary, load_deletion_rules, load_wordlist
from .pipeline import ALL_PRESETS, Pipeline
from .runconfig import RunConfig
from .terms import load_term_dictionary


def _load_run_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig.bundled()
    if getattr(args, "preset", None):
        cfg.presets = [p.strip() for p in args.preset.split(",") if p.strip()]
    if getattr(args, "cap", None) is not None:
        cfg.cap = args.cap
    if getattr(args, "timeout", None) is not None:
        cfg.timeout = args.timeout
    if getattr(args, "jobs", None) is not None:
        cfg.jobs = args.jobs
    if getattr(args, "out", None) is not None:
        cfg.out = args.out
    if getattr(args, "corpus", None) is not None:
        cfg.corpus = args.corpus
    return cfg


def cmd_parse(args) -> int:
    cfg = _load_run_config(args)
    preset = cfg.presets[0] if cfg.presets else "lp-bio-t"
    try:
        pipeline = Pipeline(cfg.config_spec(preset))
    except (SublangError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    outcome = pipeline.process("cli", args.sentence)
    payload = outcome.to_json_dict()
    payload["preset"] = preset
    if outcome.error and outcome.nbl == 0 and not outcome.best_links:
        print(f"error: {outcome.error}", file=sys.stderr)
    if outcome.clf and outcome.best_links:
        from .engine import Link, Linkage

        links = tuple(Link(*l) for l in outcome.best_links)
        surfaces = _original_surfaces(pipeline, args.sentence, outcome)
        print(render_diagram(surfaces, Linkage(links, None, 0)))
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    print("no complete linkage")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 2


def _original_surfaces(pipeline: Pipeline, raw, outcome):
    # the best links are over pre-simplification positions; recover those
    # token surfaces for the diagram
    record = pipeline.normalizer.sentence_record(raw)
    surfaces = [t.surface for t in record.tokens]
    if len(surfaces) >= outcome.nbw:
        return surfaces
    return outcome.tokens


def cmd_eval(args) -> int:
    cfg = _load_run_config(args)
    if "lp" not in cfg.presets:
        print("error: MISSING_BASELINE: preset list must include lp", file=sys.stderr)
        return 1
    unknown = [p for p in cfg.presets if p not in ALL_PRESETS]
    if unknown:
        print(f"error: unknown presets {unknown}", file=sys.stderr)
        return 1
    try:
        sentences = load_corpus(
            cfg.corpus, load_wordlist(cfg.resources["abbreviations"])
            if cfg.resources.get("abbreviations")
            else (),
        )
        gold_links = load_gold_links(cfg.gold_links) if cfg.gold_links else {}
        gold_categories = (
            load_gold_categories(cfg.gold_categories) if cfg.gold_categories else {}
        )
        cq = {}
        for preset in cfg.presets:
            path = cfg.cq_scores.get(preset)
            if path and os.path.exists(path):
                cq[preset] = ingest_cq_scores(path)
        results = {}
        for preset in cfg.presets:
            results[preset] = run_config(sentences, cfg.config_spec(preset), jobs=cfg.jobs)
    except (SublangError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = aggregate(results, gold_links, gold_categories, cq)
    os.makedirs(cfg.out, exist_ok=True)
    json_path = os.path.join(cfg.out, "report.json")
    csv_path = os.path.join(cfg.out, "report.csv")
    write_report_json(report, json_path)
    write_report_csv(report, csv_path)
    from .figures import render_report_figures

    figure_paths = render_report_figures(report, cfg.out)
    print(render_text_tables(report))
    print()
    for path in [json_path, csv_path, *figure_paths]:
        print(f"wrote {path}")
    return 0


def cmd_validate(args) -> int:
    cfg = _load_run_config(args)
    loaders = {
        "corpus": lambda p: load_corpus(p),
        "dictionary": load_dictionary,
        "overlay": lambda p: apply_overlay(load_dictionary(cfg.resources["dictionary"]), p),
        "mg_rules": load_mg_rules,
        "entity_dict": EntityDictionary.load,
        "term_dict": load_term_dictionary,
        "norm_rules": load_deletion_rules,
        "abbreviations": load_wordlist,
        "units": load_wordlist,
        "gold_links": load_gold_links,
        "gold_categories": load_gold_categories,
    }
    all_ok = True
    mg_rules = None
    lexicon = None
    for name, path, required in cfg.validate_files():
        if path is None or not os.path.exists(path):
            if required:
                print(f"{name}: MISSING ({path})")
                all_ok = False
            else:
                print(f"{name}: not configured")
            continue
        loader = loaders.get(name.split(".")[0], ingest_cq_scores if name.startswith("cq") else None)
        try:
            value = loader(path) if loader else None
            if name == "dictionary":
                lexicon = value
            if name == "mg_rules":
                mg_rules = value
            print(f"{name}: OK ({path})")
        except (SublangError, OSError) as exc:
            print(f"{name}: {exc}")
            all_ok = False
    if lexicon is not None and mg_rules:
        try:
            validate_rules(mg_rules, lexicon)
            print("mg_rules macros: OK")
        except SublangError as exc:
            print(f"mg_rules macros: {exc}")
            all_ok = False
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sublang",
        description="Link-grammar parser with sublanguage adaptation and evaluation harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration file (defaults to bundled resources)")
    common.add_argument("--preset", help="comma-separated preset list (lp, lp-bio, lp-bio-t)")
    common.add_argument("--cap", type=int, help="max linkages materialised per sentence")
    common.add_argument("--timeout", type=float, help="per-sentence parse budget in seconds")

    p = sub.add_parser("parse", parents=[common], help="parse one sentence and draw the best linkage")
    p.add_argument("sentence", help="sentence text")
    p.set_defaults(func=cmd_parse)

    e = sub.add_parser("eval", parents=[common], help="run the evaluation harness over a corpus")
    e.add_argument("--corpus", help="corpus text file (one mini-document per line)")
    e.add_argument("--jobs", type=int, help="parallel workers (default 1)")
    e.add_argument("--out", help="output directory for report files")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("validate", parents=[common], help="load every configured resource and report")
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
