"""Experiment configuration and the seeded class corpus."""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import jsonschema

from ..bandit import Environment, environment_from_dict, load_environment
from ..concept_class import ConceptClass, dumps, full_class, load, random_class
from ..list_learning import FiniteDistribution

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "class": {
            "oneOf": [
                {"type": "string"},
                {"type": "object", "required": ["random"], "properties": {"random": {
                    "type": "object", "required": ["n", "k", "count", "seed"],
                    "properties": {k: {"type": "integer", "minimum": 0} for k in ("n", "k", "count", "seed")},
                }}},
                {"type": "object", "required": ["full"], "properties": {"full": {
                    "type": "object", "required": ["n", "k"],
                    "properties": {k: {"type": "integer", "minimum": 1} for k in ("n", "k")},
                }}},
            ]
        },
        "environment": {"oneOf": [{"type": "string"}, {"type": "object"}, {"type": "null"}]},
        "epsilon": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "scale": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "epsilons": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
        "scales": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}},
        "prefix_mode": {"enum": ["exclusive", "inclusive"]},
        "corpus": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "size": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "max_k": {"type": "integer", "minimum": 2},
                "max_n": {"type": "integer", "minimum": 1},
                "max_count": {"type": ["integer", "null"], "minimum": 1},
                "loo_samples": {"type": "integer", "minimum": 0},
                "max_sample": {"type": "integer", "minimum": 1},
            },
        },
    },
}

# The K = 4 class and environment used by the cascade PAC check.
DESIGNATED_CLASS = {"random": {"n": 3, "k": 4, "count": 20, "seed": 4}}
DESIGNATED_ENV = {"masses": ["1/2", "3/10", "1/5"], "target": 5}


@dataclass
class CorpusSpec:
    size: int = 1000
    seed: int = 0
    max_k: int = 6
    max_n: int = 4
    max_count: Optional[int] = None
    loo_samples: int = 3
    max_sample: int = 6


@dataclass(frozen=True)
class CorpusEntry:
    index: int
    n: int
    k: int
    count: int
    seed: int

    def build(self) -> ConceptClass:
        return random_class(self.n, self.k, self.count, self.seed)


def corpus_entries(spec: CorpusSpec) -> list[CorpusEntry]:
    """Deterministic corpus: K uniform in 2..max_k, n in 1..max_n, class size uniform."""
    rng = random.Random(spec.seed)
    out = []
    for i in range(spec.size):
        k = rng.randint(2, spec.max_k)
        n = rng.randint(1, spec.max_n)
        top = k ** n if spec.max_count is None else min(k ** n, spec.max_count)
        count = rng.randint(1, top)
        out.append(CorpusEntry(i, n, k, count, rng.randrange(2 ** 31)))
    return out


@dataclass
class ExperimentConfig:
    class_source: object = field(default_factory=lambda: dict(DESIGNATED_CLASS))
    environment: object = field(default_factory=lambda: dict(DESIGNATED_ENV))
    epsilon: float = 0.1
    delta: float = 0.2
    scale: float = 1.0
    seed: int = 0
    trials: int = 200
    epsilons: list = field(default_factory=lambda: [0.1, 0.2, 0.3])
    scales: list = field(default_factory=lambda: [0.001, 0.003, 0.01, 0.03])
    prefix_mode: str = "exclusive"
    corpus: CorpusSpec = field(default_factory=CorpusSpec)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        jsonschema.validate(data, CONFIG_SCHEMA)
        kw = dict(data)
        if "class" in kw:
            kw["class_source"] = kw.pop("class")
            # the designated environment belongs to the designated class
            kw.setdefault("environment", None)
        if "corpus" in kw:
            kw["corpus"] = CorpusSpec(**kw["corpus"])
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def load_class(self) -> ConceptClass:
        src = self.class_source
        if isinstance(src, str):
            return load(src)
        if "random" in src:
            r = src["random"]
            return random_class(r["n"], r["k"], r["count"], r["seed"])
        if "full" in src:
            return full_class(src["full"]["n"], src["full"]["k"])
        raise ValueError(f"unknown class source {src!r}")

    def load_environment(self, cls: ConceptClass) -> Environment:
        env = self.environment
        if env is None:
            n = cls.n
            return Environment(cls, FiniteDistribution(tuple(Fraction(1, n) for _ in range(n)), cls.hypotheses[0]))
        if isinstance(env, str):
            return load_environment(cls, env)
        return environment_from_dict(cls, env)

    def resolved(self) -> dict:
        """JSON-safe view used for hashing; file sources are replaced by content hashes."""
        cls = self.load_class()
        env = self.load_environment(cls)
        out = asdict(self)
        out.pop("class_source")
        out["class"] = {"sha256": hashlib.sha256(dumps(cls).encode()).hexdigest(), "k": cls.k, "n": cls.n,
                        "size": len(cls)}
        out["environment"] = {"masses": [str(p) for p in env.dist.masses], "target": list(env.target)}
        return out
