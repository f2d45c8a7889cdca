"""Compressor-based upper-bound proxy for Kolmogorov complexity rates.

True K is uncomputable. The proxy here is the cost of an LZ78 parse: a
sequence is split into c distinct phrases, each an earlier phrase plus one
symbol, and phrase i costs ceil(log2 i) + ceil(log2 |A|) bits. A trailing
phrase that repeats an earlier one still counts as a phrase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .core import GroupSpec, Pattern, infer_box
from .errors import InconsistentPointSource


def serialize_pattern(p: Pattern, group: GroupSpec | None = None) -> list[int]:
    """Symbol indices of a box pattern in lexicographic (row-major) cell order."""
    box = infer_box(p, group)
    return p.values_in(box.points())


def _ceil_log2(i: int) -> int:
    return (i - 1).bit_length() if i > 1 else 0


class ProxyCodec:
    """LZ78 phrase parser with a fixed bit-cost model.

    The phrase trie is rebuilt for every input, so the codec itself carries no
    state between calls.
    """

    def __init__(self, alphabet_size: int):
        if alphabet_size < 1:
            raise ValueError("alphabet size must be positive")
        self.alphabet_size = alphabet_size
        self.symbol_bits = _ceil_log2(alphabet_size)

    def phrase_bits(self, i: int) -> int:
        return _ceil_log2(i) + self.symbol_bits

    def cost(self, phrases: int) -> int:
        return sum(self.phrase_bits(i) for i in range(1, phrases + 1))

    def prefix_phrase_counts(self, seq: Sequence[int]) -> list[int]:
        """Phrase count of every prefix ``seq[:t]`` for t = 0..len(seq)."""
        children: list[dict] = [{}]
        node = 0
        complete = 0
        out = [0]
        for s in seq:
            nxt = children[node].get(s)
            if nxt is None:
                children.append({})
                children[node][s] = len(children) - 1
                complete += 1
                node = 0
            else:
                node = nxt
            out.append(complete + (1 if node else 0))
        return out

    def phrase_count(self, seq: Sequence[int]) -> int:
        return self.prefix_phrase_counts(seq)[-1]

    def bits(self, seq: Sequence[int]) -> int:
        return self.cost(self.phrase_count(seq))

    def prefix_bits(self, seq: Sequence[int]) -> list[int]:
        counts = self.prefix_phrase_counts(seq)
        table = [0]
        for i in range(1, counts[-1] + 1):
            table.append(table[-1] + self.phrase_bits(i))
        return [table[c] for c in counts]


def proxy_complexity(p: Pattern, group: GroupSpec | None = None) -> int:
    """LZ78 proxy bits for the box pattern ``p``."""
    seq = serialize_pattern(p, group)
    return ProxyCodec(len(p.alphabet)).bits(seq)


@dataclass(frozen=True)
class ComplexityRecord:
    n: int
    box_size: int
    proxy_bits: int
    rate: float


@dataclass
class ComplexityRateSeries:
    records: list

    @property
    def rates(self) -> list[float]:
        return [r.rate for r in self.records]

    def __len__(self):
        return len(self.records)


PointSource = Union[Pattern, Callable[[int], Pattern]]


def restriction_source(point: Pattern, group: GroupSpec) -> Callable[[int], Pattern]:
    """Point source returning restrictions of one large pattern."""

    def source(n):
        return point.restrict(group.box(n).points())

    return source


def constant_source(alphabet, group: GroupSpec, symbol: int = 0) -> Callable[[int], Pattern]:
    def source(n):
        return Pattern.from_values(alphabet, group.box(n).points(), iter(lambda: symbol, None))

    return source


def complexity_rate_series(
    point_source: PointSource,
    n_max: int,
    group: GroupSpec,
    n_values: Sequence[int] | None = None,
) -> ComplexityRateSeries:
    """Proxy rates proxy_bits(x|F_n) / |F_n| for n in ``n_values`` (default 0..n_max).

    ``point_source`` is either the pattern x|F_{n_max} itself or a callable
    n -> x|F_n; a callable is checked at every recorded n against the
    restriction of its n_max value.
    """
    if n_values is None:
        n_values = range(n_max + 1)
    n_values = sorted(set(n_values))
    if n_values and (n_values[0] < 0 or n_values[-1] > n_max):
        raise ValueError("n_values must lie in 0..n_max")
    if isinstance(point_source, Pattern):
        top = point_source.restrict(group.box(n_max).points())
        fetch = None
    else:
        top = point_source(n_max)
        fetch = point_source
    top_box = infer_box(top, group)
    if top_box.n != n_max:
        raise InconsistentPointSource(f"source returned F_{top_box.n} for n = {n_max}")
    codec = ProxyCodec(len(top.alphabet))
    if group.d == 1 and group.variant == "N":
        # in 1-D over N, x|F_n is a prefix of x|F_{n_max}
        prefix = codec.prefix_bits(serialize_pattern(top, group))
        bits_at = lambda n: prefix[n + 1]  # noqa: E731
    else:
        bits_at = None
    records = []
    for n in n_values:
        box = group.box(n)
        piece = None
        if fetch is not None and n != n_max:
            piece = top.restrict(box.points())
            if fetch(n) != piece:
                raise InconsistentPointSource(f"x|F_{n} disagrees with the restriction of x|F_{n_max}")
        if bits_at is not None:
            bits = bits_at(n)
        else:
            if piece is None:
                piece = top.restrict(box.points())
            bits = codec.bits(serialize_pattern(piece, group))
        records.append(ComplexityRecord(n, box.size, bits, bits / box.size))
    return ComplexityRateSeries(records)


@dataclass(frozen=True)
class LimsupReport:
    passed: bool
    max_rate: float
    bound: float
    tail: int


def check_limsup_bound(series: ComplexityRateSeries, entropy: float, tail: int, slack: float) -> LimsupReport:
    """Pass iff the largest of the last ``tail`` rates is <= entropy + slack."""
    if slack <= 0:
        raise ValueError("slack must be positive")
    if not 1 <= tail <= len(series):
        raise ValueError("tail must be between 1 and the series length")
    worst = max(r.rate for r in series.records[-tail:])
    bound = entropy + slack
    return LimsupReport(worst <= bound, worst, bound, tail)
