import pytest

from sublang.engine import count_linkages
from sublang.errors import ResourceError
from sublang.grammar import Origin, apply_overlay_text, load_dictionary_text
from sublang.morpho import (
    GuessStatus,
    GuessingLexicon,
    MorphoGuessRule,
    classify_corpus,
    guess,
    load_mg_rules,
    validate_rules,
)

BASE = """
<generic-noun>: {D-} & (S+ or O-);
<generic-verb>: S- & {O+};
<generic-adjective>: A+;
the.d: D+;
cat.n: D- & (S+ or O-);
ran.v: S-;
"""

RULES = [
    MorphoGuessRule("ase", "n", "generic-noun"),
    MorphoGuessRule("ity", "n", "generic-noun"),
    MorphoGuessRule("al", "a", "generic-adjective"),
    MorphoGuessRule("ional", "a", "generic-adjective"),
    MorphoGuessRule("ous", "a", "generic-adjective"),
]


def ordered(rules):
    return sorted(rules, key=lambda r: (-len(r.suffix), r.suffix))


class TestGuess:
    def test_suffix_guess_noun(self):
        lex = load_dictionary_text(BASE)
        out = guess("kinase", lex, ordered(RULES))
        assert out.status is GuessStatus.GUESSED
        assert out.category == "n"
        assert out.rule_used == "-ase"

    def test_suffix_guess_adjective(self):
        lex = load_dictionary_text(BASE)
        out = guess("transcriptional", lex, ordered(RULES))
        assert out.status is GuessStatus.GUESSED
        assert out.category == "a"

    def test_lexicon_precedence(self):
        lex = load_dictionary_text(BASE + "phosphatase.n: D- & S+;")
        out = guess("phosphatase", lex, ordered(RULES))
        assert out.status is GuessStatus.KNOWN

    def test_longest_suffix_wins(self):
        lex = load_dictionary_text(BASE)
        out = guess("transcriptional", lex, ordered(RULES))
        assert out.rule_used == "-ional"

    def test_short_stem_blocks_rule(self):
        lex = load_dictionary_text(BASE)
        # remainder before "-ase" would be 1 character
        out = guess("base", lex, ordered(RULES))
        assert out.status is GuessStatus.UNKNOWN_FALLBACK

    def test_unknown_fallback(self):
        lex = load_dictionary_text(BASE)
        out = guess("zzqw", lex, ordered(RULES))
        assert out.status is GuessStatus.UNKNOWN_FALLBACK
        assert out.category == "n"

    def test_determinism(self):
        lex = load_dictionary_text(BASE)
        a = guess("kinase", lex, ordered(RULES))
        b = guess("kinase", lex, ordered(RULES))
        assert a == b

    def test_monotonicity_of_lexicon_extension(self):
        lex = load_dictionary_text(BASE)
        assert guess("operon", lex, ordered(RULES)).status is GuessStatus.UNKNOWN_FALLBACK
        extended = apply_overlay_text(lex, "operon.n: D- & (S+ or O-);")
        assert guess("operon", extended, ordered(RULES)).status is GuessStatus.KNOWN


class TestGuessingLexicon:
    def test_resolves_guessed_entries(self):
        lex = load_dictionary_text(BASE)
        glex = GuessingLexicon(lex, ordered(RULES))
        entries = glex.resolve("kinase")
        assert entries and entries[0].origin is Origin.MORPHO_GUESS
        assert entries[0].category == "n"

    def test_resolves_fallback_entries(self):
        lex = load_dictionary_text(BASE)
        glex = GuessingLexicon(lex, ordered(RULES))
        entries = glex.resolve("zzqw")
        assert {e.origin for e in entries} == {Origin.UNKNOWN_FALLBACK}
        assert [e.category for e in entries] == ["n", "v", "a"]

    def test_parse_with_guessed_word(self):
        lex = load_dictionary_text(BASE)
        glex = GuessingLexicon(lex, ordered(RULES))
        assert count_linkages(["the", "kinase", "ran"], glex) == 1

    def test_rules_validated_against_macros(self):
        lex = load_dictionary_text(BASE)
        bad = [MorphoGuessRule("ase", "n", "missing-macro")]
        with pytest.raises(ResourceError):
            GuessingLexicon(lex, bad)


class TestClassifyCorpus:
    def test_all_known(self):
        lex = load_dictionary_text(BASE)
        _, counts = classify_corpus([["the", "cat", "ran"]], lex, ordered(RULES))
        assert counts == {"UW": 0, "GW": 0, "OoL": 0}

    def test_counts_per_occurrence(self):
        lex = load_dictionary_text(BASE)
        stream = [["the", "kinase", "zzqw"], ["kinase", "zzqw", "zzqw"]]
        _, counts = classify_corpus(stream, lex, ordered(RULES))
        assert counts == {"UW": 3, "GW": 2, "OoL": 5}

    def test_ool_is_uw_plus_gw(self):
        lex = load_dictionary_text(BASE)
        stream = [["activity", "zz", "stability", "cat", "qqqal"]]
        _, counts = classify_corpus(stream, lex, ordered(RULES))
        assert counts["OoL"] == counts["UW"] + counts["GW"]


class TestRuleLoading:
    def test_load_and_order(self, tmp_path):
        p = tmp_path / "mg.tsv"
        p.write_text("# suffix rules\nal\ta\tgeneric-adjective\nional\ta\tgeneric-adjective\n")
        rules = load_mg_rules(p)
        assert [r.suffix for r in rules] == ["ional", "al"]

    def test_duplicate_suffix_rejected(self, tmp_path):
        p = tmp_path / "mg.tsv"
        p.write_text("al\ta\tm1\nal\ta\tm2\n")
        with pytest.raises(ResourceError):
            load_mg_rules(p)

    def test_validate_rules_needs_macros(self):
        lex = load_dictionary_text(BASE)
        validate_rules([MorphoGuessRule("ase", "n", "generic-noun")], lex)
        with pytest.raises(ResourceError):
            validate_rules([MorphoGuessRule("ase", "n", "nope")], lex)
