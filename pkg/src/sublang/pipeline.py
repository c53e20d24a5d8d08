"""Per-configuration processing pipeline.

A ConfigSpec names the resources of one parser configuration.  The three
presets are fixed: ``lp`` is the base dictionary alone, ``lp-bio`` adds the
overlay, the morpho-guess rules and text normalization, and ``lp-bio-t``
adds term simplification on top.  Sentence segmentation and tokenization
run in every preset.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import engine
from .engine import enumerate_linkages
from .errors import ReexpansionConflict, SublangError
from .grammar import apply_overlay, load_dictionary
from .morpho import GuessStatus, GuessingLexicon, guess, load_mg_rules
from .normalize import EntityDictionary, Normalizer, load_deletion_rules, load_wordlist
from .terms import load_term_dictionary, reexpand, simplify

PRESETS = ("lp", "lp-bio", "lp-bio-t")
ALL_PRESETS = PRESETS + ("custom",)


@dataclass(frozen=True)
class ConfigSpec:
    name: str
    dictionary: str
    overlay: str = None
    mg_rules: str = None
    entity_dict: str = None
    term_dict: str = None
    norm_rules: str = None
    abbreviations: str = None
    units: str = None
    cap: int = engine.DEFAULT_CAP
    timeout: float = engine.DEFAULT_TIMEOUT

    @classmethod
    def preset(cls, name, resources, cap=engine.DEFAULT_CAP, timeout=engine.DEFAULT_TIMEOUT):
        """Build a preset from a resource-path mapping with keys dictionary/
        overlay/mg_rules/entity_dict/term_dict/norm_rules/abbreviations/units.

        The three fixed presets enable their stage sets; ``custom`` enables
        every configured resource.
        """
        if name not in ALL_PRESETS:
            raise ValueError(f"unknown preset {name!r} (expected one of {ALL_PRESETS})")
        kwargs = {
            "name": name,
            "dictionary": resources["dictionary"],
            "abbreviations": resources.get("abbreviations"),
            "cap": cap,
            "timeout": timeout,
        }
        if name in ("lp-bio", "lp-bio-t", "custom"):
            kwargs.update(
                overlay=resources.get("overlay"),
                mg_rules=resources.get("mg_rules"),
                entity_dict=resources.get("entity_dict"),
                norm_rules=resources.get("norm_rules"),
                units=resources.get("units"),
            )
        if name in ("lp-bio-t", "custom"):
            kwargs["term_dict"] = resources.get("term_dict")
        return cls(**kwargs)

    @property
    def stages(self):
        names = ["segment", "parse"]
        if self.norm_rules or self.entity_dict or self.units:
            names.insert(1, "normalize")
        if self.mg_rules:
            names.insert(-1, "guess")
        if self.term_dict:
            names.insert(-1, "simplify")
        return names


@dataclass
class SentenceOutcome:
    """Everything the harness needs from one sentence under one config."""

    sentence_id: str
    raw: str
    tokens: list = field(default_factory=list)   # surfaces fed to the parser
    nbw: int = 0
    original_nbw: int = 0   # token count before term simplification
    nbl: int = 0
    pt: float = 0.0
    clf: int = 0
    timed_out: bool = False
    best_links: list = None        # (left, right, label) over original indices
    guesses: list = field(default_factory=list)  # (word, status, category)
    uw: int = 0
    gw: int = 0
    reexpansion_conflict: bool = False
    error: str = None

    def to_json_dict(self):
        return {
            "id": self.sentence_id,
            "raw": self.raw,
            "tokens": list(self.tokens),
            "NbW": self.nbw,
            "originalNbW": self.original_nbw,
            "NbL": self.nbl,
            "PT": self.pt,
            "CLF": self.clf,
            "timedOut": self.timed_out,
            "bestLinks": [list(l) for l in self.best_links] if self.best_links else None,
            "UW": self.uw,
            "GW": self.gw,
            "guesses": [
                {"word": w, "status": s.value, "category": c} for w, s, c in self.guesses
            ],
            "reexpansionConflict": self.reexpansion_conflict,
            "error": self.error,
        }


class Pipeline:
    """Loaded resources for one configuration; process() is pure per
    sentence and safe to call from parallel workers."""

    def __init__(self, config: ConfigSpec):
        self.config = config
        lexicon = load_dictionary(config.dictionary)
        if config.overlay:
            lexicon = apply_overlay(lexicon, config.overlay)
        self.base_lexicon = lexicon
        self.rules = load_mg_rules(config.mg_rules) if config.mg_rules else []
        self.lexicon = GuessingLexicon(lexicon, self.rules)
        self.normalizer = Normalizer(
            abbreviations=load_wordlist(config.abbreviations) if config.abbreviations else (),
            deletion_rules=load_deletion_rules(config.norm_rules) if config.norm_rules else (),
            entity_dict=EntityDictionary.load(config.entity_dict) if config.entity_dict else None,
            units=load_wordlist(config.units) if config.units else (),
            numeric=config.units is not None,
        )
        self.term_index = load_term_dictionary(config.term_dict) if config.term_dict else None

    def segment(self, text):
        return self.normalizer.segment(text)

    def process(self, sentence_id, raw_sentence) -> SentenceOutcome:
        out = SentenceOutcome(sentence_id, raw_sentence)
        try:
            record = self.normalizer.sentence_record(raw_sentence)
            tokens = record.tokens
            simp = simplify(tokens, self.term_index) if self.term_index else None
            parse_tokens = simp.simplified_tokens if simp else tokens
            out.tokens = [t.surface for t in parse_tokens]
            out.nbw = len(parse_tokens)
            out.original_nbw = len(tokens)
            for token in parse_tokens:
                g = guess(token.surface, self.base_lexicon, self.rules)
                out.guesses.append((token.surface, g.status, g.category))
                if g.status is GuessStatus.UNKNOWN_FALLBACK:
                    out.uw += 1
                elif g.status is GuessStatus.GUESSED:
                    out.gw += 1
            result = enumerate_linkages(
                parse_tokens, self.lexicon, cap=self.config.cap, timeout=self.config.timeout
            )
            out.pt = result.parse_time_seconds
            out.timed_out = result.timed_out
            out.nbl = 0 if result.timed_out else result.linkage_count
            out.clf = 1 if result.complete and not result.timed_out else 0
            best = result.best()
            if best is not None:
                links = best.links
                if simp is not None and simp.substitutions:
                    try:
                        links = reexpand(best, simp).links
                    except ReexpansionConflict as exc:
                        out.reexpansion_conflict = True
                        out.error = str(exc)
                        links = None
                out.best_links = [tuple(l) for l in links] if links is not None else None
        except SublangError as exc:
            out.error = str(exc)
            out.clf = 0
            out.nbl = 0
        return out
