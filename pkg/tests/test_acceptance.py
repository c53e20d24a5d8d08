"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.  The corpus-level
criteria run the bundled resources through the same code paths as the CLI.
"""

import json
import random
import time

import pytest
from oracle import oracle_linkages

from conftest import random_toy_lexicon
from sublang.cli import main as cli_main
from sublang.engine import Link, count_linkages, enumerate_linkages, validate_linkage
from sublang.evaluate import (
    aggregate,
    combine_error_rates,
    load_corpus,
    ratio_percent,
    run_config,
)
from sublang.grammar import apply_overlay, load_dictionary, load_dictionary_text
from sublang.morpho import GuessStatus, MorphoGuessRule, guess
from sublang.normalize import TokenKind, load_wordlist, strip_extratextual, tokenize
from sublang.pipeline import Pipeline, SentenceOutcome
from sublang.runconfig import RunConfig
from sublang.terms import reexpand, simplify


def _report(number, description, passed=True):
    marker = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {number:02d} [{marker}] {description}")


@pytest.fixture(scope="module")
def bundle():
    return RunConfig.bundled()


@pytest.fixture(scope="module")
def corpus_sentences(bundle):
    return load_corpus(bundle.corpus, load_wordlist(bundle.resources["abbreviations"]))


@pytest.fixture(scope="module")
def corpus_results(bundle, corpus_sentences):
    return {
        preset: run_config(corpus_sentences, bundle.config_spec(preset))
        for preset in ("lp", "lp-bio", "lp-bio-t")
    }


# --- 1 & 2: oracle equivalence and linkage validity --------------------------

def _sample_sentence(rng, words, length, lexicon):
    # keep the brute-force oracle tractable: bound the candidate link pairs
    from oracle import _pairs_with_potential
    from sublang.grammar import expand_disjuncts

    for _ in range(30):
        sentence = [rng.choice(words) for _ in range(length)]
        per_token = [
            [(e, d) for e in lexicon.resolve(s) for d in expand_disjuncts(e.expression)]
            for s in sentence
        ]
        if len(_pairs_with_potential(sentence, per_token)) <= 18:
            return sentence
    return [rng.choice(words) for _ in range(min(length, 4))]


def _parseable_sample(rng, words, length, lex):
    # bias the suite toward sentences with linkages so validity is exercised
    from sublang.errors import ParseTimeout

    best = None
    for _ in range(40):
        sentence = _sample_sentence(rng, words, length, lex)
        try:
            if count_linkages(sentence, lex, timeout=10) > 0:
                return sentence
        except ParseTimeout:
            continue
        best = sentence
    return best


def test_criterion_01_and_02_oracle_equivalence_and_validity(bundle, corpus_sentences):
    rng = random.Random(421)
    start = time.monotonic()
    lexicons = 200
    checked = 0
    validated = 0
    for trial in range(lexicons):
        lex, words = random_toy_lexicon(rng)
        sentences = [_sample_sentence(rng, words, length, lex) for length in range(1, 8)]
        sentences.append(_parseable_sample(rng, words, rng.randint(2, 5), lex))
        for sentence in sentences:
            expected = oracle_linkages(sentence, lex)
            result = enumerate_linkages(sentence, lex, cap=200_000, timeout=60)
            assert result.linkage_count == len(expected), (trial, sentence)
            assert count_linkages(sentence, lex) == len(expected), (trial, sentence)
            got = {(l.links, tuple(l.disjunct_choice)) for l in result.linkages}
            oracle_ids = {
                (tuple(Link(*t) for t in links), choice) for links, choice in expected
            }
            assert got == oracle_ids, (trial, sentence)
            for linkage in result.linkages:
                assert validate_linkage(sentence, lex, linkage), (trial, sentence)
                validated += 1
            checked += 1
    elapsed = time.monotonic() - start
    assert elapsed < 300, f"oracle sweep took {elapsed:.0f}s (budget 300s)"
    _report(1, f"oracle equivalence on {lexicons} lexicons / {checked} sentences in {elapsed:.0f}s")

    # validity additionally swept over every linkage the ambiguity-heavy
    # configuration materialises on the bundled corpus
    pipeline = Pipeline(bundle.config_spec("lp-bio"))
    for sid, raw in corpus_sentences:
        record = pipeline.normalizer.sentence_record(raw)
        result = enumerate_linkages(record.tokens, pipeline.lexicon, cap=1000, timeout=30)
        for linkage in result.linkages:
            assert validate_linkage(record.tokens, pipeline.lexicon, linkage), sid
            validated += 1
    assert validated >= 1000, f"only {validated} linkages exercised validity"
    _report(2, f"validity of all {validated} enumerated linkages")


# --- 3: ratio-column arithmetic fidelity --------------------------------------

PAPER_AVERAGES = {
    "lp": {"NbW": 24.05, "NbL": 190306, "PT": 37.83, "CLF": 0.54, "EL": 2.87, "CQ": 0.54},
    "lp-bio": {"NbW": 24.05, "NbL": 232622, "PT": 29.4, "CLF": 0.72, "EL": 1.91, "CQ": 0.7},
    "lp-bio-t": {"NbW": 18.9, "NbL": 1431, "PT": 0.53, "CLF": 0.77, "EL": 1.15, "CQ": 0.8},
}

# reported ratio cells; two cells deviate from the source table's print:
# 133 prints as the computed 133.3, and the EL cell computes to 66.6 while
# the table prints 66.5 (the table's own averages give 1.91/2.87 = 66.55..%,
# which rounds half-up to 66.6 - the printed 66.5 is not reproducible from
# the printed averages under any rounding that also yields the NbW cell 78.6)
EXPECTED_RATIOS = {
    "lp-bio": {"NbW": "100.0", "NbL": "122.2", "PT": "77.7", "CLF": "133.3", "EL": "66.6", "CQ": "129.6"},
    "lp-bio-t": {"NbW": "78.6", "NbL": "0.75", "PT": "1.4", "CLF": "142.6", "EL": "40.1", "CQ": "148.1"},
}

EL_DISTRIBUTIONS = {
    "lp": [3] * 87 + [2] * 13,        # mean 2.87
    "lp-bio": [2] * 91 + [1] * 9,     # mean 1.91
    "lp-bio-t": [2] * 15 + [1] * 85,  # mean 1.15
}


def _synthetic_outcomes(name):
    averages = PAPER_AVERAGES[name]
    outcomes = []
    for i, el in enumerate(EL_DISTRIBUTIONS[name]):
        o = SentenceOutcome(f"s{i:03d}", "synthetic")
        o.nbw = averages["NbW"]
        o.original_nbw = 30
        o.nbl = averages["NbL"]
        o.pt = averages["PT"]
        o.clf = averages["CLF"]
        o.best_links = [(0, 1, "G")] + [(1, 2 + j, "X") for j in range(el)]
        outcomes.append(o)
    return outcomes


def test_criterion_03_table2_ratio_fidelity():
    results = {name: _synthetic_outcomes(name) for name in PAPER_AVERAGES}
    gold = {f"s{i:03d}": {(0, 1, "G")} for i in range(100)}
    cq = {
        name: {f"s{i:03d}": PAPER_AVERAGES[name]["CQ"] for i in range(100)}
        for name in PAPER_AVERAGES
    }
    report = aggregate(results, gold_links=gold, cq_scores=cq)
    for name, expected in EXPECTED_RATIOS.items():
        agg = report.aggregate_for(name)
        assert abs(agg.averages["EL"] - PAPER_AVERAGES[name]["EL"]) < 1e-9
        for metric, cell in expected.items():
            assert agg.ratios[metric] == cell, (name, metric, agg.ratios[metric])
    # the same arithmetic straight from the stated averages
    for name, expected in EXPECTED_RATIOS.items():
        for metric, cell in expected.items():
            got = ratio_percent(PAPER_AVERAGES[name][metric], PAPER_AVERAGES["lp"][metric])
            assert got == cell, (name, metric, got)
    _report(3, "ratio cells reproduced (133->133.3 and 66.5->66.6 print deviations noted)")


# --- 4: out-of-lexicon aggregation identity -----------------------------------

def test_criterion_04_table1_aggregation_identity():
    errors, rate = combine_error_rates(244, 41.4, 24, 4.2)
    assert errors == 102 and round(rate) == 38
    errors, rate = combine_error_rates(53, 52.8, 72, 0.0)
    assert errors == 28 and round(rate, 1) == 22.4
    errors, rate = combine_error_rates(26, 19.2, 31, 0.0)
    assert errors == 5 and round(rate, 1) == 8.8
    # the stated reduction claims fall out of the same arithmetic
    assert round(100 * (1 - 1.15 / 2.87), 1) == 59.9
    assert round(100 * (1 - 1.15 / 2.87)) == 60
    assert round(100 * (1 - 18.9 / 24.05), 1) == 21.4
    _report(4, "38% / 22.4% / 8.8% and the 60% / 21.4% reductions reproduced")


# --- 5: word-count law ---------------------------------------------------------

def test_criterion_05_word_count_law(bundle, corpus_sentences, corpus_results):
    pipeline = Pipeline(bundle.config_spec("lp-bio-t"))
    bio = corpus_results["lp-bio"]
    t = corpus_results["lp-bio-t"]
    assert len(bio) == len(t) == len(corpus_sentences)
    for b, s, (sid, raw) in zip(bio, t, corpus_sentences):
        record = pipeline.normalizer.sentence_record(raw)
        simp = simplify(record.tokens, pipeline.term_index)
        removed = sum(sub.length - 1 for sub in simp.substitutions)
        assert b.nbw == len(record.tokens), sid
        assert s.nbw == b.nbw - removed, sid
    _report(5, f"NbW(lp-bio-t) = NbW(lp-bio) - sum(len(term)-1) on all {len(t)} sentences")


# --- 6: complexity reduction ---------------------------------------------------

def test_criterion_06_complexity_reduction(corpus_results):
    bio, t = corpus_results["lp-bio"], corpus_results["lp-bio-t"]
    n = len(bio)
    avg = lambda xs: sum(xs) / len(xs)
    nbl_bio, nbl_t = avg([o.nbl for o in bio]), avg([o.nbl for o in t])
    pt_bio, pt_t = avg([o.pt for o in bio]), avg([o.pt for o in t])
    clf_bio, clf_t = avg([o.clf for o in bio]), avg([o.clf for o in t])
    assert nbl_t < nbl_bio, (nbl_t, nbl_bio)
    assert pt_t < pt_bio, (pt_t, pt_bio)
    assert clf_t >= clf_bio, (clf_t, clf_bio)
    _report(
        6,
        f"NbL {nbl_bio:.2f}->{nbl_t:.2f}, PT {pt_bio*1000:.2f}ms->{pt_t*1000:.2f}ms, "
        f"CLF {clf_bio:.2f}->{clf_t:.2f} over {n} sentences",
    )


# --- 7: re-expansion round trip -------------------------------------------------

def test_criterion_07_reexpansion_round_trip(bundle, corpus_sentences):
    pipeline = Pipeline(bundle.config_spec("lp-bio-t"))
    conflicts = 0
    complete = 0
    for sid, raw in corpus_sentences:
        record = pipeline.normalizer.sentence_record(raw)
        simp = simplify(record.tokens, pipeline.term_index)
        result = enumerate_linkages(
            simp.simplified_tokens, pipeline.lexicon, cap=bundle.cap, timeout=bundle.timeout
        )
        if not result.complete:
            continue
        complete += 1
        best = result.best()
        expanded = reexpand(best, simp)
        n = len(record.tokens)
        assert validate_linkage(record.tokens, pipeline.lexicon, expanded), sid
        if n > 1:
            covered = {i for l in expanded.links for i in (l.left, l.right)}
            assert covered == set(range(n)), sid
        # outer links survive with remapped indices
        offsets = {}
        pos = 0
        by_replacement = {s.replacement_index: s for s in simp.substitutions}
        for idx in range(len(simp.simplified_tokens)):
            sub = by_replacement.get(idx)
            if sub:
                offsets[idx] = sub.start + sub.term.head_index
                pos = sub.start + sub.length
            else:
                offsets[idx] = pos
                pos += 1
        for link in best.links:
            mapped = Link(offsets[link.left], offsets[link.right], link.label)
            assert mapped in expanded.links, (sid, link)
        for sub in simp.substitutions:
            for i, j, label in sub.term.internal_links:
                assert Link(sub.start + i, sub.start + j, label) in expanded.links, sid
    assert conflicts == 0
    _report(7, f"round trip verified on {complete} complete parses, 0 conflicts")


# --- 8: morpho-guesser precedence and monotonicity ------------------------------

ADVERSARIAL_GRAMMAR = """
<m-noun>: {D-} & S+;
<m-adj>: A+;
known.n: {D-} & S+;
"""

ADVERSARIAL_RULES = [
    MorphoGuessRule("l", "n", "m-noun"),
    MorphoGuessRule("al", "a", "m-adj"),
    MorphoGuessRule("nal", "n", "m-noun"),
    MorphoGuessRule("onal", "a", "m-adj"),
    MorphoGuessRule("ional", "n", "m-noun"),
]


def test_criterion_08_morpho_guesser(bundle, corpus_sentences):
    lex = load_dictionary_text(ADVERSARIAL_GRAMMAR)
    rules = sorted(ADVERSARIAL_RULES, key=lambda r: (-len(r.suffix), r.suffix))
    out = guess("transcriptional", lex, rules)
    assert out.rule_used == "-ional" and out.category == "n"
    out = guess("hexagonal", lex, rules)
    assert out.rule_used == "-onal"
    out = guess("signal", lex, rules)
    assert out.rule_used == "-nal"
    out = guess("known", lex, rules)
    assert out.status is GuessStatus.KNOWN

    base = load_dictionary(bundle.resources["dictionary"])
    merged = apply_overlay(base, bundle.resources["overlay"])
    mg = []  # classification without suffix rules isolates the overlay effect
    converted = 0
    for sid, raw in corpus_sentences:
        for token in tokenize(raw):
            before = guess(token.surface, base, mg).status
            after = guess(token.surface, merged, mg).status
            if before is GuessStatus.KNOWN:
                assert after is GuessStatus.KNOWN, token.surface
            if before is not GuessStatus.KNOWN and after is GuessStatus.KNOWN:
                converted += 1
    assert converted >= 1
    _report(8, f"suffix/lexicon precedence hold; overlay converted {converted} UW occurrences")


# --- 9: normalizer idempotence and round trip -----------------------------------

def test_criterion_09_normalizer_round_trip(bundle, corpus_sentences):
    pipeline = Pipeline(bundle.config_spec("lp-bio"))
    norm = pipeline.normalizer
    replaced_total = 0
    for sid, raw in corpus_sentences:
        record = norm.sentence_record(raw)
        # idempotence at both levels
        assert norm.normalize_tokens(record.tokens) == record.tokens, sid
        stripped = strip_extratextual(raw, norm.deletion_rules)
        assert strip_extratextual(stripped, norm.deletion_rules) == stripped, sid
        # bit-exact recovery of every replaced token's original surfaces
        raw_tokens = tokenize(stripped)
        for token in record.tokens:
            if token.kind is TokenKind.WORD:
                continue
            replaced_total += 1
            assert token.original is not None, (sid, token)
            inside = [
                t.surface
                for t in raw_tokens
                if token.source_span[0] <= t.source_span[0] and t.source_span[1] <= token.source_span[1]
            ]
            assert " ".join(inside) == token.original, (sid, token)
    assert replaced_total > 0
    _report(9, f"idempotence and recovery verified; {replaced_total} replaced tokens restored")


# --- 10: end-to-end CLI run ------------------------------------------------------

def _strip_pt(payload):
    for outcomes in payload["sentences"].values():
        for o in outcomes:
            o["PT"] = None
    for config in payload["configs"]:
        config["averages"]["PT"] = None
        config["ratios"]["PT"] = None
    return payload


def test_criterion_10_end_to_end(tmp_path, capsys):
    out4 = tmp_path / "jobs4"
    out1 = tmp_path / "jobs1"
    start = time.monotonic()
    code = cli_main(["eval", "--jobs", "4", "--out", str(out4)])
    elapsed = time.monotonic() - start
    assert code == 0
    assert elapsed < 60, f"eval took {elapsed:.1f}s"
    code = cli_main(["eval", "--jobs", "1", "--out", str(out1)])
    assert code == 0
    capsys.readouterr()
    a = _strip_pt(json.loads((out4 / "report.json").read_text()))
    b = _strip_pt(json.loads((out1 / "report.json").read_text()))
    assert a == b
    for name in ("report.json", "report.csv", "report-ratios.png", "report-ool.png"):
        assert (out4 / name).exists()
    sentences = a["sentences"]["lp"]
    assert len(sentences) >= 140
    _report(10, f"eval over {len(sentences)} sentences, 3 presets, jobs=4 in {elapsed:.1f}s; deterministic modulo PT")
