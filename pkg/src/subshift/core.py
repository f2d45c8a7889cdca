"""Lattice geometry shared by every other module.

Lattice points are tuples of ints, one entry per coordinate, even when d = 1.
Boxes are the cubes F_n: ``{0..n}^d`` for the monoid N^d and ``{-n..n}^d``
for the group Z^d, with F_{-1} the empty set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import NotABoxDomain, TranslateOutOfMonoid

Point = tuple[int, ...]


@dataclass(frozen=True)
class GroupSpec:
    variant: str
    d: int

    def __post_init__(self):
        if self.variant not in ("N", "Z"):
            raise ValueError(f"group variant must be 'N' or 'Z', got {self.variant!r}")
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"lattice dimension must be a positive integer, got {self.d!r}")

    def box(self, n: int) -> "BoxDomain":
        return BoxDomain(self, n)

    def zero(self) -> Point:
        return (0,) * self.d


@dataclass(frozen=True)
class BoxDomain:
    group: GroupSpec
    n: int

    def __post_init__(self):
        if self.n < -1:
            raise ValueError(f"box index must be >= -1, got {self.n}")

    @property
    def side(self) -> int:
        if self.n < 0:
            return 0
        return self.n + 1 if self.group.variant == "N" else 2 * self.n + 1

    @property
    def size(self) -> int:
        return self.side ** self.group.d

    @property
    def lo(self) -> int:
        return 0 if self.group.variant == "N" else -self.n

    @property
    def hi(self) -> int:
        return self.n

    def points(self) -> Iterator[Point]:
        """Stream the box in lexicographic order without materializing it."""
        if self.n < 0:
            return iter(())
        return itertools.product(range(self.lo, self.hi + 1), repeat=self.group.d)

    def __contains__(self, pt) -> bool:
        if self.n < 0 or len(pt) != self.group.d:
            return False
        return all(self.lo <= c <= self.hi for c in pt)


def box_points(b: BoxDomain) -> list[Point]:
    return list(b.points())


def box_size(group: GroupSpec, n: int) -> int:
    return BoxDomain(group, n).size


def rectangle_points(sides: Sequence[int], origin: Sequence[int] | None = None) -> list[Point]:
    """Lexicographically ordered points of an axis-aligned rectangle."""
    if origin is None:
        origin = (0,) * len(sides)
    return list(itertools.product(*(range(o, o + s) for o, s in zip(origin, sides))))


def add(g: Point, h: Point) -> Point:
    return tuple(a + b for a, b in zip(g, h))


def sub(g: Point, h: Point) -> Point:
    return tuple(a - b for a, b in zip(g, h))


class Pattern:
    """A finite partial configuration: lattice point -> symbol index.

    Symbols are interned to dense indices into ``alphabet``; the alphabet
    strings are only used for I/O. Instances are immutable and hashable.
    """

    __slots__ = ("alphabet", "_cells", "_hash")

    def __init__(self, alphabet: Sequence[str], cells: Mapping[Sequence[int], int] | Iterable):
        alphabet = tuple(alphabet)
        items = cells.items() if isinstance(cells, Mapping) else cells
        store: dict[Point, int] = {}
        dim = None
        for pt, sym in items:
            pt = tuple(int(c) for c in pt)
            if dim is None:
                dim = len(pt)
            elif len(pt) != dim:
                raise ValueError("pattern cells have inconsistent dimensions")
            if not 0 <= sym < len(alphabet):
                raise ValueError(f"symbol index {sym} outside alphabet of size {len(alphabet)}")
            if pt in store:
                raise ValueError(f"duplicate cell {pt}")
            store[pt] = int(sym)
        self.alphabet = alphabet
        self._cells = store
        self._hash = None

    @classmethod
    def from_values(cls, alphabet, points: Iterable[Point], values: Iterable[int]) -> "Pattern":
        return cls(alphabet, zip(points, values))

    @classmethod
    def word(cls, alphabet, values: Sequence[int], start: int = 0) -> "Pattern":
        """1-D pattern occupying ``start .. start+len(values)-1``."""
        return cls(alphabet, (((start + i,), v) for i, v in enumerate(values)))

    @property
    def cells(self) -> Mapping[Point, int]:
        return MappingProxyType(self._cells)

    @property
    def domain(self) -> frozenset:
        return frozenset(self._cells)

    @property
    def dim(self) -> int | None:
        for pt in self._cells:
            return len(pt)
        return None

    def __len__(self) -> int:
        return len(self._cells)

    def __getitem__(self, pt) -> int:
        return self._cells[tuple(pt)]

    def __contains__(self, pt) -> bool:
        return tuple(pt) in self._cells

    def items(self):
        return self._cells.items()

    def sorted_points(self) -> list[Point]:
        return sorted(self._cells)

    def values_in(self, points: Iterable[Point]) -> list[int]:
        return [self._cells[p] for p in points]

    def restrict(self, points: Iterable[Point]) -> "Pattern":
        return Pattern(self.alphabet, ((p, self._cells[p]) for p in points))

    def symbols(self) -> list[str]:
        """Alphabet strings in lexicographic cell order."""
        return [self.alphabet[self._cells[p]] for p in self.sorted_points()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.alphabet == other.alphabet and self._cells == other._cells

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.alphabet, frozenset(self._cells.items())))
        return self._hash

    def __repr__(self) -> str:
        if len(self._cells) <= 12:
            body = ", ".join(f"{p}={self.alphabet[s]}" for p, s in sorted(self._cells.items()))
        else:
            body = f"{len(self._cells)} cells"
        return f"Pattern({body})"


def lex_min(points: Iterable[Point]) -> Point:
    return min(points)


def extent(points: Iterable[Point]) -> tuple[Point, Point]:
    """Per-axis (min, max) corners of a nonempty point set."""
    pts = list(points)
    d = len(pts[0])
    lo = tuple(min(p[a] for p in pts) for a in range(d))
    hi = tuple(max(p[a] for p in pts) for a in range(d))
    return lo, hi


def translate(p: Pattern, g: Sequence[int], group: GroupSpec | None = None) -> Pattern:
    """The g-translate: dom = {g+h : h in dom(p)}, value at g+h is p(h).

    With an N-variant ``group`` every translated point must stay in N^d.
    """
    g = tuple(g)
    moved = {add(g, h): s for h, s in p.items()}
    if group is not None and group.variant == "N":
        for pt in moved:
            if any(c < 0 for c in pt):
                raise TranslateOutOfMonoid(f"translate by {g} moves a cell to {pt}")
    return Pattern(p.alphabet, moved)


def box_of(p: Pattern, group: GroupSpec) -> BoxDomain:
    """The box F_n that is exactly the domain of ``p``."""
    size = len(p)
    if size == 0:
        return BoxDomain(group, -1)
    if p.dim != group.d:
        raise NotABoxDomain(f"pattern has dimension {p.dim}, group has {group.d}")
    lo, hi = extent(p.domain)
    n = hi[0]
    box = BoxDomain(group, n) if n >= 0 else None
    if box is None or box.size != size or any(
        lo[a] != box.lo or hi[a] != box.hi for a in range(group.d)
    ):
        raise NotABoxDomain(f"domain of {p!r} is not a box F_n for {group}")
    return box


def infer_box(p: Pattern, group: GroupSpec | None = None) -> BoxDomain:
    """Like :func:`box_of` but tries both group variants when none is given."""
    if group is not None:
        return box_of(p, group)
    d = p.dim or 1
    for variant in ("N", "Z"):
        try:
            return box_of(p, GroupSpec(variant, d))
        except NotABoxDomain:
            continue
    raise NotABoxDomain(f"domain of {p!r} is not a box")


def cylinder_diameter(p: Pattern, group: GroupSpec | None = None) -> int:
    """Base-2 exponent of diam([[p]]) under the standard metric.

    The diameter is exactly ``2 ** result``; the exponent is ``-|F_n|``.
    """
    box = infer_box(p, group)
    if box.n < 0:
        raise NotABoxDomain("cylinder diameter needs a box F_n with n >= 0")
    return -box.size
