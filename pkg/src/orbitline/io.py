"""System files and deterministic JSON rendering."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO

from .errors import ParseError, ValidationError
from .orbits import Line, PolyPair, SemigroupSystem, SequenceSpec
from .poly import LinearMap, Polynomial, as_rational, format_rational


@dataclass
class SystemFile:
    system: SemigroupSystem
    base: tuple[Fraction, Fraction] | None = None
    line: Line | None = None
    sequences: dict[str, SequenceSpec] = field(default_factory=dict)
    budgets: dict[str, int] = field(default_factory=dict)
    rng_seed: int | None = None

    def to_json(self) -> dict:
        out: dict = {
            "generators": [{"f": g.f.to_json(), "g": g.g.to_json()} for g in self.system.generators]
        }
        if self.base is not None:
            out["base"] = {"x": format_rational(self.base[0]), "y": format_rational(self.base[1])}
        if self.line is not None:
            out["line"] = self.line.to_json()
        if self.sequences:
            out["sequences"] = {k: str(v) for k, v in sorted(self.sequences.items())}
        if self.budgets:
            out["budgets"] = dict(sorted(self.budgets.items()))
        if self.rng_seed is not None:
            out["rng_seed"] = self.rng_seed
        return out


_BUDGET_KEYS = ("max_words", "max_digits", "max_depth")


def _poly(obj, where: str) -> Polynomial:
    try:
        return Polynomial.from_json(obj)
    except ParseError as exc:
        raise ValidationError(str(exc), field=where) from None


def system_from_json(data) -> SystemFile:
    if not isinstance(data, dict):
        raise ValidationError("top level must be an object", field="$")
    gens = data.get("generators")
    if not isinstance(gens, list) or not gens:
        raise ValidationError("must be a nonempty list", field="generators")
    pairs = []
    for i, gen in enumerate(gens, 1):
        if not isinstance(gen, dict) or "f" not in gen or "g" not in gen:
            raise ValidationError("needs 'f' and 'g'", field=f"generators[{i}]")
        pairs.append(PolyPair(_poly(gen["f"], f"generators[{i}].f"), _poly(gen["g"], f"generators[{i}].g")))
    system = SemigroupSystem(pairs)
    out = SystemFile(system)
    if "base" in data:
        b = data["base"]
        try:
            out.base = (as_rational(b["x"]), as_rational(b["y"]))
        except (KeyError, TypeError, ParseError) as exc:
            raise ValidationError(f"needs rational 'x' and 'y' ({exc})", field="base") from None
    if "line" in data:
        ln = data["line"]
        try:
            out.line = Line.parse(ln) if isinstance(ln, str) else Line(LinearMap.from_json(ln))
        except (ParseError, ValueError) as exc:
            raise ValidationError(str(exc), field="line") from None
    for name, spec in (data.get("sequences") or {}).items():
        try:
            seq = SequenceSpec.from_json(spec)
        except (ParseError, ValidationError) as exc:
            raise ValidationError(str(exc), field=f"sequences.{name}") from None
        for letter in seq.letters_used():
            if letter > system.s:
                raise ValidationError(f"letter {letter} exceeds {system.s} generators", field=f"sequences.{name}")
        out.sequences[name] = seq
    for key, val in (data.get("budgets") or {}).items():
        if key not in _BUDGET_KEYS:
            raise ValidationError(f"unknown budget {key!r}", field="budgets")
        if not isinstance(val, int) or val <= 0:
            raise ValidationError("must be a positive integer", field=f"budgets.{key}")
        out.budgets[key] = val
    if "rng_seed" in data:
        if not isinstance(data["rng_seed"], int):
            raise ValidationError("must be an integer", field="rng_seed")
        out.rng_seed = data["rng_seed"]
    return out


def parse_system(source: str | IO[str]) -> SystemFile:
    """Read a system file from a path or an open text stream."""
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    return system_from_json(data)


# ------------------------------------------------------------- rendering

def _float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def dumps(obj, pretty: bool = False, _indent: int = 0) -> str:
    """JSON with insertion-ordered keys and 17-significant-digit floats."""
    pad = "  " * (_indent + 1) if pretty else ""
    end = "  " * _indent if pretty else ""
    nl = "\n" if pretty else ""
    sep = ": " if pretty else ":"
    comma = "," + nl if pretty else ","
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return json.dumps(format_rational(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}{sep}{dumps(v, pretty, _indent + 1)}" for k, v in obj.items()]
        return "{" + nl + comma.join(items) + nl + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, pretty, _indent + 1)}" for v in obj]
        return "[" + nl + comma.join(items) + nl + end + "]"
    if hasattr(obj, "to_json"):
        return dumps(obj.to_json(), pretty, _indent)
    raise TypeError(f"cannot render {type(obj).__name__}")
