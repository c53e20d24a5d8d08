"""Declarative run configuration.

A run config is a key=value text file ('#' comments).  Recognized keys:

    corpus, dictionary, overlay, mg_rules, entity_dict, term_dict,
    norm_rules, abbreviations, units, gold_links, gold_categories,
    presets (comma list), cap, timeout, jobs, out,
    cq_scores (applies to every preset) or cq_scores.<preset>

Relative paths are resolved against the config file's directory.  Values
falling back to the bundled resources when a key is omitted, so the file
may be as short as a corpus override.  Command-line flags override file
values.
"""

from __future__ import annotations

import importlib.resources
import os
from dataclasses import dataclass, field

from .errors import ResourceError
from .pipeline import ALL_PRESETS, PRESETS, ConfigSpec

RESOURCE_KEYS = (
    "dictionary",
    "overlay",
    "mg_rules",
    "entity_dict",
    "term_dict",
    "norm_rules",
    "abbreviations",
    "units",
)

_BUNDLED_FILES = {
    "corpus": "corpus.txt",
    "dictionary": "base.dict",
    "overlay": "bio-overlay.dict",
    "mg_rules": "mg-rules.tsv",
    "entity_dict": "entities.tsv",
    "term_dict": "terms.tsv",
    "norm_rules": "norm-rules.txt",
    "abbreviations": "abbreviations.txt",
    "units": "units.txt",
    "gold_links": "gold-links.tsv",
    "gold_categories": "gold-categories.tsv",
}

_BUNDLED_CQ = {name: f"cq-{name}.tsv" for name in PRESETS}


def bundled_path(filename) -> str:
    return str(importlib.resources.files("sublang").joinpath("data", filename))


@dataclass
class RunConfig:
    corpus: str = None
    presets: list = field(default_factory=lambda: list(PRESETS))
    resources: dict = field(default_factory=dict)
    gold_links: str = None
    gold_categories: str = None
    cq_scores: dict = field(default_factory=dict)  # preset -> path
    cap: int = 1000
    timeout: float = 30.0
    jobs: int = 1
    out: str = "eval-out"

    @classmethod
    def bundled(cls):
        cfg = cls()
        cfg.corpus = bundled_path(_BUNDLED_FILES["corpus"])
        cfg.resources = {k: bundled_path(_BUNDLED_FILES[k]) for k in RESOURCE_KEYS}
        cfg.gold_links = bundled_path(_BUNDLED_FILES["gold_links"])
        cfg.gold_categories = bundled_path(_BUNDLED_FILES["gold_categories"])
        cfg.cq_scores = {name: bundled_path(f) for name, f in _BUNDLED_CQ.items()}
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        cfg = cls.bundled()
        base = os.path.dirname(os.path.abspath(path))

        def resolve(p):
            return p if os.path.isabs(p) else os.path.join(base, p)

        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ResourceError(
                        "BAD_CONFIG_LINE", f"expected key = value, got {line!r}", path, lineno
                    )
                key, value = (part.strip() for part in line.split("=", 1))
                if key == "corpus":
                    cfg.corpus = resolve(value)
                elif key in RESOURCE_KEYS:
                    cfg.resources[key] = resolve(value)
                elif key == "presets":
                    cfg.presets = [p.strip() for p in value.split(",") if p.strip()]
                elif key == "gold_links":
                    cfg.gold_links = resolve(value)
                elif key == "gold_categories":
                    cfg.gold_categories = resolve(value)
                elif key == "cq_scores":
                    cfg.cq_scores = {name: resolve(value) for name in ALL_PRESETS}
                elif key.startswith("cq_scores."):
                    cfg.cq_scores[key.split(".", 1)[1]] = resolve(value)
                elif key == "cap":
                    cfg.cap = int(value)
                elif key == "timeout":
                    cfg.timeout = float(value)
                elif key == "jobs":
                    cfg.jobs = int(value)
                elif key == "out":
                    cfg.out = resolve(value)
                else:
                    raise ResourceError(
                        "BAD_CONFIG_KEY", f"unknown key {key!r}", path, lineno
                    )
        return cfg

    def config_spec(self, preset) -> ConfigSpec:
        return ConfigSpec.preset(preset, self.resources, cap=self.cap, timeout=self.timeout)

    def validate_files(self):
        """(description, path, required) triples for resource validation."""
        plan = [("corpus", self.corpus, True), ("dictionary", self.resources.get("dictionary"), True)]
        for key in RESOURCE_KEYS:
            if key == "dictionary":
                continue
            plan.append((key, self.resources.get(key), False))
        plan.append(("gold_links", self.gold_links, False))
        plan.append(("gold_categories", self.gold_categories, False))
        for preset, path in sorted(self.cq_scores.items()):
            plan.append((f"cq_scores.{preset}", path, False))
        return plan
