"""Words, sequences and orbits of pairs of polynomials acting on the plane.

Two composition conventions appear and are never mixed implicitly:

* ``Order.INNER_FIRST``: ``(w1, ..., wn)`` means ``phi_wn ∘ ... ∘ phi_w1``;
  the first letter is applied first. Forward orbits and semigroup words use it.
* ``Order.OUTER_FIRST``: ``(w1, ..., wn)`` means ``phi_w1 ∘ ... ∘ phi_wn``;
  the first letter is outermost. Coherent orbits use it.

Generator indices are 1-based throughout.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .budget import Budget
from .errors import BadIndex, BudgetExceeded, InsufficientSupport, ParseError, ValidationError
from .poly import LinearMap, Polynomial, as_rational, compose, is_monomial_equivalent

Word = tuple[int, ...]
Point = tuple[Fraction, Fraction]


class Order(str, enum.Enum):
    INNER_FIRST = "inner_first"
    OUTER_FIRST = "outer_first"


@dataclass(frozen=True)
class PolyPair:
    f: Polynomial
    g: Polynomial

    def __call__(self, point: Point) -> Point:
        return self.f.evaluate(point[0]), self.g.evaluate(point[1])

    @property
    def degrees(self) -> tuple[int, int]:
        return self.f.degree(), self.g.degree()


@dataclass(frozen=True)
class SemigroupSystem:
    generators: tuple[PolyPair, ...]

    def __init__(self, generators: Iterable[PolyPair | tuple[Polynomial, Polynomial]]):
        gens = tuple(g if isinstance(g, PolyPair) else PolyPair(*g) for g in generators)
        if not gens:
            raise ValidationError("a system needs at least one generator", field="generators")
        for i, gen in enumerate(gens, 1):
            for name, p in (("f", gen.f), ("g", gen.g)):
                if p.is_constant():
                    raise ValidationError(f"coordinate is constant ({p})", field=f"generators[{i}].{name}")
        object.__setattr__(self, "generators", gens)

    @property
    def s(self) -> int:
        return len(self.generators)

    def __len__(self):
        return len(self.generators)

    def __getitem__(self, index: int) -> PolyPair:
        """1-based access."""
        if not 1 <= index <= len(self.generators):
            raise BadIndex(f"generator index {index} outside 1..{len(self.generators)}")
        return self.generators[index - 1]

    @property
    def fs(self) -> list[Polynomial]:
        return [g.f for g in self.generators]

    @property
    def gs(self) -> list[Polynomial]:
        return [g.g for g in self.generators]

    @cached_property
    def metadata(self) -> list[dict]:
        out = []
        for gen in self.generators:
            row = {"deg_f": gen.f.degree(), "deg_g": gen.g.degree()}
            for name, p in (("f", gen.f), ("g", gen.g)):
                row[f"monomial_equivalent_{name}"] = (
                    bool(is_monomial_equivalent(p)) if p.degree() >= 2 else None
                )
            out.append(row)
        return out

    def commutes(self) -> bool:
        """Whether all generators commute pairwise, checked by exact composition."""
        gens = self.generators
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                a, b = gens[i], gens[j]
                if compose(a.f, b.f) != compose(b.f, a.f) or compose(a.g, b.g) != compose(b.g, a.g):
                    return False
        return True


def _check_word(system: SemigroupSystem, word: Sequence[int]):
    for letter in word:
        if not 1 <= letter <= system.s:
            raise BadIndex(f"letter {letter} outside 1..{system.s}")


def evaluate_word(system: SemigroupSystem, word: Sequence[int], base: Point, order: Order) -> Point:
    """Apply the generators named by ``word`` to ``base`` in the stated order."""
    order = Order(order)
    _check_word(system, word)
    letters = word if order is Order.INNER_FIRST else reversed(word)
    x, y = as_rational(base[0]), as_rational(base[1])
    for letter in letters:
        gen = system.generators[letter - 1]
        x, y = gen.f.evaluate(x), gen.g.evaluate(y)
    return x, y


def compose_word(polys: Sequence[Polynomial], word: Sequence[int], order: Order) -> Polynomial:
    """Composite polynomial of a word over one coordinate."""
    order = Order(order)
    letters = word if order is Order.INNER_FIRST else reversed(word)
    out = Polynomial.x()
    for letter in letters:
        if not 1 <= letter <= len(polys):
            raise BadIndex(f"letter {letter} outside 1..{len(polys)}")
        out = compose(polys[letter - 1], out)
    return out


# ---------------------------------------------------------------- sequences

_SEQ_RE = re.compile(r"^\s*(?:pre:(?P<pre>[\d,\s]*)/)?cyc:(?P<cyc>[\d,\s]+)\s*$")


@dataclass(frozen=True)
class SequenceSpec:
    """The eventually periodic sequence ``preperiod · cycle^ω`` (1-based)."""

    preperiod: Word = ()
    cycle: Word = (1,)

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ValidationError("cycle must be nonempty", field="cycle")
        if any(i < 1 for i in self.preperiod + self.cycle):
            raise ValidationError("letters are 1-based positive integers", field="sequence")

    @classmethod
    def constant(cls, letter: int) -> "SequenceSpec":
        return cls((), (letter,))

    @classmethod
    def parse(cls, text: str) -> "SequenceSpec":
        """``pre:1,2/cyc:2,1``; the preperiod may be empty or omitted (``cyc:1``)."""
        m = _SEQ_RE.match(text)
        if not m:
            raise ParseError(f"sequence must look like 'pre:1,2/cyc:2,1', got {text!r}")

        def letters(s):
            return tuple(int(t) for t in s.replace(" ", "").split(",") if t)

        return cls(letters(m["pre"] or ""), letters(m["cyc"]))

    def __str__(self):
        return f"pre:{','.join(map(str, self.preperiod))}/cyc:{','.join(map(str, self.cycle))}"

    def letter(self, n: int) -> int:
        """The n-th letter, n >= 1."""
        if n < 1:
            raise IndexError("sequence positions start at 1")
        p = len(self.preperiod)
        if n <= p:
            return self.preperiod[n - 1]
        return self.cycle[(n - p - 1) % len(self.cycle)]

    def prefix(self, n: int) -> Word:
        return tuple(self.letter(k) for k in range(1, n + 1))

    def phase(self, n: int) -> int | None:
        """Position inside the cycle of the letter *after* step n, or None
        while still in the preperiod (used for exact repetition tests)."""
        p = len(self.preperiod)
        if n < p:
            return None
        return (n - p) % len(self.cycle)

    def shift(self, m: int = 1) -> "SequenceSpec":
        """The shift map applied m times."""
        p = len(self.preperiod)
        if m <= p:
            return SequenceSpec(self.preperiod[m:], self.cycle)
        r = (m - p) % len(self.cycle)
        return SequenceSpec((), self.cycle[r:] + self.cycle[:r])

    def letters_used(self) -> set[int]:
        return set(self.preperiod) | set(self.cycle)

    def to_json(self) -> dict:
        return {"preperiod": list(self.preperiod), "cycle": list(self.cycle)}

    @classmethod
    def from_json(cls, obj) -> "SequenceSpec":
        if isinstance(obj, str):
            return cls.parse(obj)
        try:
            return cls(tuple(obj.get("preperiod", ())), tuple(obj["cycle"]))
        except (KeyError, AttributeError, TypeError):
            raise ParseError(f"cannot read a sequence from {obj!r}") from None


# -------------------------------------------------------------------- lines

@dataclass(frozen=True)
class Line:
    """The line ``X = l(Y)``; ``link=None`` is the diagonal."""

    link: LinearMap | None = None

    @classmethod
    def diagonal(cls) -> "Line":
        return cls(None)

    @property
    def map(self) -> LinearMap:
        return self.link if self.link is not None else LinearMap.identity()

    def contains(self, point: Point) -> bool:
        x, y = point
        if self.link is None:
            return x == y
        return x == self.link(y)

    @classmethod
    def parse(cls, text: str) -> "Line":
        from .poly import parse_linear

        if text.strip().lower() in ("diag", "diagonal", "delta"):
            return cls.diagonal()
        return cls(parse_linear(text))

    def to_json(self):
        return "diag" if self.link is None else self.link.to_json()


# ------------------------------------------------------------------ records

@dataclass(frozen=True)
class OrbitRecord:
    point: Point
    word: Word
    depth: int
    on_line: bool = False
    order: Order = Order.INNER_FIRST

    def recheck(self, system: SemigroupSystem, base: Point) -> bool:
        return evaluate_word(system, self.word, base, self.order) == self.point

    def to_json(self) -> dict:
        from .poly import format_rational

        return {
            "point": [format_rational(self.point[0]), format_rational(self.point[1])],
            "word": list(self.word),
            "depth": self.depth,
            "on_line": self.on_line,
            "order": self.order.value,
        }


@dataclass
class OrbitEnumeration:
    records: list[OrbitRecord]
    preperiodic: bool = False
    truncated: bool = False
    words_evaluated: int = 0
    depth_reached: int = 0
    usage: dict = field(default_factory=dict)

    @property
    def points(self) -> set[Point]:
        return {r.point for r in self.records}

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def enumerate_semigroup_orbit(
    system: SemigroupSystem,
    base: Point,
    max_depth: int,
    dedup: bool = True,
    line: Line | None = None,
    budget: Budget | None = None,
) -> OrbitEnumeration:
    """Breadth-first walk of the word tree, lexicographic within each depth.

    Words use the inner-first convention. With ``dedup`` a point already seen
    is neither recorded again nor expanded (its subtree only repeats points),
    and ``preperiodic`` is set once a whole level produces nothing new. When
    the budget binds, the partial enumeration is returned with
    ``truncated=True``.
    """
    budget = budget or Budget()
    line = line or Line.diagonal()
    base = (as_rational(base[0]), as_rational(base[1]))
    out = OrbitEnumeration([OrbitRecord(base, (), 0, line.contains(base))])
    seen = {base}
    frontier: list[tuple[Word, Point]] = [((), base)]
    gens = system.generators
    try:
        for depth in range(1, max_depth + 1):
            nxt = []
            for word, (x, y) in frontier:
                for idx, gen in enumerate(gens, 1):
                    budget.charge_words()
                    out.words_evaluated += 1
                    pt = (gen.f.evaluate(x), gen.g.evaluate(y))
                    budget.check_point(*pt)
                    w = word + (idx,)
                    if dedup:
                        if pt in seen:
                            continue
                        seen.add(pt)
                    out.records.append(OrbitRecord(pt, w, depth, line.contains(pt)))
                    nxt.append((w, pt))
            out.depth_reached = depth
            frontier = nxt
            if dedup and not frontier:
                out.preperiodic = True
                break
    except BudgetExceeded:
        out.truncated = True
    out.usage = budget.usage()
    return out


def enumerate_sequence_orbit(
    system: SemigroupSystem,
    seq: SequenceSpec,
    base: Point,
    n_max: int,
    mode: str = "forward",
    line: Line | None = None,
    cache_prefix: bool = False,
    budget: Budget | None = None,
) -> OrbitEnumeration:
    """Orbit of ``base`` along one sequence, depths 0..n_max.

    ``forward`` puts each new map outside (``phi_in ∘ ... ∘ phi_i1``) and
    advances incrementally. ``coherent`` puts it inside
    (``phi_i1 ∘ ... ∘ phi_in``), so each point is recomputed from the base;
    with ``cache_prefix`` the composite polynomials of the outer prefix are
    kept instead and evaluated once per depth.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if mode not in ("forward", "coherent"):
        raise ValueError(f"mode must be 'forward' or 'coherent', got {mode!r}")
    budget = budget or Budget()
    line = line or Line.diagonal()
    for letter in seq.letters_used():
        system[letter]
    base = (as_rational(base[0]), as_rational(base[1]))
    order = Order.INNER_FIRST if mode == "forward" else Order.OUTER_FIRST
    out = OrbitEnumeration([OrbitRecord(base, (), 0, line.contains(base), order)])
    word = seq.prefix(n_max)
    try:
        if mode == "forward":
            x, y = base
            for n in range(1, n_max + 1):
                gen = system[word[n - 1]]
                budget.charge_words()
                x, y = gen.f.evaluate(x), gen.g.evaluate(y)
                budget.check_point(x, y)
                out.records.append(OrbitRecord((x, y), word[:n], n, line.contains((x, y)), order))
                out.words_evaluated += 1
                out.depth_reached = n
        else:
            pf, pg = Polynomial.x(), Polynomial.x()
            for n in range(1, n_max + 1):
                budget.charge_words()
                if cache_prefix:
                    gen = system[word[n - 1]]
                    pf, pg = compose(pf, gen.f), compose(pg, gen.g)
                    pt = (pf.evaluate(base[0]), pg.evaluate(base[1]))
                else:
                    pt = evaluate_word(system, word[:n], base, Order.OUTER_FIRST)
                budget.check_point(*pt)
                out.records.append(OrbitRecord(pt, word[:n], n, line.contains(pt), order))
                out.words_evaluated += 1
                out.depth_reached = n
    except BudgetExceeded:
        out.truncated = True
    out.usage = budget.usage()
    return out


def intersect_with_line(records: Iterable[OrbitRecord], line: Line) -> list[OrbitRecord]:
    hits = []
    for r in records:
        if line.contains(r.point):
            hits.append(r if r.on_line else OrbitRecord(r.point, r.word, r.depth, True, r.order))
    return hits


def extract_coherent_suffix(hit_words: Sequence[Sequence[int]], min_support: int) -> Word:
    """Greedy pigeonhole extraction of a common tail from hit words.

    ``hit_words`` use the inner-first convention, so the last letter is the
    outermost map. Step k keeps the words whose last k letters read
    ``t_k ... t_1`` and picks ``t_(k+1)`` as the most frequent next letter from
    the end, provided at least ``min_support`` words back it. Ties go to the
    lowest index. Returns ``(t_1, t_2, ...)``.
    """
    if min_support < 2:
        raise ValueError("min_support must be at least 2")
    pool = [tuple(w) for w in hit_words]
    extracted: list[int] = []
    while True:
        k = len(extracted)
        votes = Counter(w[-(k + 1)] for w in pool if len(w) > k)
        if not votes:
            break
        letter, count = min(votes.items(), key=lambda kv: (-kv[1], kv[0]))
        if count < min_support:
            break
        extracted.append(letter)
        pool = [w for w in pool if len(w) > k and w[-(k + 1)] == letter]
    if not extracted:
        raise InsufficientSupport(f"no final letter is shared by {min_support} hit words")
    return tuple(extracted)
