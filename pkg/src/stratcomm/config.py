"""JSON experiment configuration with field-level diagnostics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core import Distribution, TypeVector, as_fraction, enumerate_types, typical_types
from .game import DEFAULT_SEQUENCE_CAP, ReceiverStrategy, TieRule, make_strategy
from .utility import UtilityMatrix, normalize

STRATEGY_KINDS = ("closest_type", "type_class_list", "typical_set", "explicit")
ENGINES = ("sequence", "type", "auto")


class ConfigError(ValueError):
    """Invalid configuration; ``where`` names the offending field or position."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _rational(value, where: str) -> Fraction:
    try:
        return as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(where, f"not a rational number ({exc})") from None


def _int(value, where: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(where, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(where, f"must be >= {minimum}")
    return value


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class StrategySpec:
    kind: str = "closest_type"
    anchor: Any = "lex_min"
    types: list[tuple[int, ...]] = field(default_factory=list)
    eps: Fraction | None = None
    sequences: list[tuple[int, ...]] = field(default_factory=list)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "anchor": self.anchor}
        if self.kind == "type_class_list":
            out["types"] = [list(t) for t in self.types]
        if self.kind == "typical_set":
            out["eps"] = fmt_rational(self.eps)
        if self.kind == "explicit":
            out["sequences"] = [list(s) for s in self.sequences]
        return out


@dataclass
class ExperimentConfig:
    q: int
    source: Distribution
    utility: UtilityMatrix
    d: Fraction = Fraction(0)
    delta: Fraction = Fraction(0)
    n_min: int = 1
    n_max: int = 4
    strategy: StrategySpec = field(default_factory=StrategySpec)
    tie: str = "worst_case"
    engine: str = "auto"
    cap: int = DEFAULT_SEQUENCE_CAP
    output: str | None = None

    @property
    def threshold(self) -> Fraction:
        return self.d + self.delta

    def tie_rule(self) -> TieRule:
        if self.tie == "lex_min":
            return TieRule.lex_min()
        return TieRule.worst_case(self.threshold)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "source": [fmt_rational(v) for v in self.source.probs],
            "utility": [[fmt_rational(v) for v in row] for row in self.utility.entries],
            "d": fmt_rational(self.d),
            "delta": fmt_rational(self.delta),
            "n_min": self.n_min,
            "n_max": self.n_max,
            "strategy": self.strategy.to_json(),
            "tie": self.tie,
            "engine": self.engine,
            "cap": self.cap,
            "output": self.output,
        }


_KNOWN = {"q", "source", "utility", "d", "delta", "n_min", "n_max", "strategy", "tie",
          "engine", "cap", "output"}


def parse_config(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    unknown = sorted(set(doc) - _KNOWN)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    for key in ("source", "utility"):
        if key not in doc:
            raise ConfigError(key, "required field is missing")

    source = doc["source"]
    if not isinstance(source, list):
        raise ConfigError("source", "expected a list of probabilities")
    probs = [_rational(v, f"source[{i}]") for i, v in enumerate(source)]
    q = _int(doc.get("q", len(probs)), "q", minimum=2)
    if len(probs) != q:
        raise ConfigError("source", f"expected {q} entries, got {len(probs)}")
    try:
        dist = Distribution(probs)
    except ValueError as exc:
        raise ConfigError("source", str(exc)) from None

    raw = doc["utility"]
    if not isinstance(raw, list) or len(raw) != q:
        raise ConfigError("utility", f"expected a {q}x{q} matrix")
    rows = []
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != q:
            raise ConfigError(f"utility[{i}]", f"expected {q} entries")
        rows.append([_rational(v, f"utility[{i}][{j}]") for j, v in enumerate(row)])
    utility = normalize(rows)

    d = _rational(doc.get("d", 0), "d")
    delta = _rational(doc.get("delta", 0), "delta")
    if not 0 <= d + delta <= 1 or d < 0 or delta < 0:
        raise ConfigError("d", "d and delta must be nonnegative with d + delta <= 1")
    n_min = _int(doc.get("n_min", 1), "n_min", minimum=1)
    n_max = _int(doc.get("n_max", n_min), "n_max", minimum=n_min)

    tie = doc.get("tie", "worst_case")
    if tie not in ("worst_case", "lex_min"):
        raise ConfigError("tie", "expected 'worst_case' or 'lex_min'")
    engine = doc.get("engine", "auto")
    if engine not in ENGINES:
        raise ConfigError("engine", f"expected one of {', '.join(ENGINES)}")
    cap = _int(doc.get("cap", DEFAULT_SEQUENCE_CAP), "cap", minimum=1)
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output", "expected a path string")

    return ExperimentConfig(q, dist, utility, d, delta, n_min, n_max,
                            _parse_strategy(doc.get("strategy", {}), q), tie, engine, cap, output)


def _parse_strategy(spec, q: int) -> StrategySpec:
    if not isinstance(spec, dict):
        raise ConfigError("strategy", "expected an object")
    kind = spec.get("kind", "closest_type")
    if kind not in STRATEGY_KINDS:
        raise ConfigError("strategy.kind", f"expected one of {', '.join(STRATEGY_KINDS)}")
    anchor = spec.get("anchor", "lex_min")
    if anchor != "lex_min":
        if not isinstance(anchor, list) or not all(isinstance(s, int) and 0 <= s < q for s in anchor):
            raise ConfigError("strategy.anchor", "expected 'lex_min' or a sequence of symbols")
    out = StrategySpec(kind, anchor)
    if kind == "type_class_list":
        types = spec.get("types")
        if not isinstance(types, list) or not types:
            raise ConfigError("strategy.types", "expected a nonempty list of count vectors")
        for i, t in enumerate(types):
            if not isinstance(t, list) or len(t) != q or not all(
                    isinstance(c, int) and not isinstance(c, bool) and c >= 0 for c in t):
                raise ConfigError(f"strategy.types[{i}]", f"expected {q} nonnegative integers")
        out.types = [tuple(t) for t in types]
    elif kind == "typical_set":
        eps = _rational(spec.get("eps"), "strategy.eps")
        if eps <= 0:
            raise ConfigError("strategy.eps", "must be positive")
        out.eps = eps
    elif kind == "explicit":
        seqs = spec.get("sequences")
        if not isinstance(seqs, list) or not seqs:
            raise ConfigError("strategy.sequences", "expected a nonempty list of sequences")
        for i, s in enumerate(seqs):
            if not isinstance(s, list) or not s or not all(isinstance(v, int) and 0 <= v < q for v in s):
                raise ConfigError(f"strategy.sequences[{i}]", "expected a list of symbols")
        out.sequences = [tuple(s) for s in seqs]
    return out


def load_config(path: str | Path) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return parse_config(doc)


def closest_type(p: Distribution, n: int) -> TypeVector:
    """Type at the least L1 distance from ``p``; the lexicographically smallest wins ties."""
    best = None
    for t in enumerate_types(n, p.q):
        dist = sum(abs(Fraction(c, n) - pi) for c, pi in zip(t.counts, p.probs))
        if best is None or dist < best[0]:
            best = (dist, t)
    return best[1]


def build_strategy(cfg: ExperimentConfig, n: int) -> ReceiverStrategy:
    """Receiver strategy for block length ``n``; raises ConfigError if the image is empty."""
    spec, q = cfg.strategy, cfg.q
    if spec.kind == "closest_type":
        image: list = [closest_type(cfg.source, n)]
    elif spec.kind == "type_class_list":
        image = [TypeVector(t) for t in spec.types if sum(t) == n]
    elif spec.kind == "typical_set":
        image = typical_types(cfg.source, spec.eps, n)
    else:
        image = [s for s in spec.sequences if len(s) == n]
    if not image:
        raise ConfigError("strategy", f"empty image at n={n}")
    anchor = spec.anchor if spec.anchor == "lex_min" else tuple(spec.anchor)
    try:
        return make_strategy(image, n, q, anchor)
    except ValueError as exc:
        raise ConfigError("strategy", f"n={n}: {exc}") from None
