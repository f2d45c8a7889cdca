"""Hausdorff dimension under the standard metric, packing and encoding.

Cylinder diameters are exact powers of two, so every cover sum is carried as
a base-2 logarithm.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (
    BoxDomain,
    GroupSpec,
    Pattern,
    Point,
    add,
    box_of,
    cylinder_diameter,
    extent,
    lex_min,
    rectangle_points,
    sub,
)
from .errors import (
    BoundsViolated,
    BoxTooSmall,
    DictionaryError,
    InconclusiveTrend,
    MalformedEncoding,
)
from .sft import SftSpec, entropy_series, enumerate_domain, enumerate_patterns

BLANK = -1
DEFAULT_GRID_POINTS = 64
DEFAULT_SEPARATION = 16


# ---------------------------------------------------------------------------
# cover sums


@dataclass(frozen=True)
class CylinderCover:
    group: GroupSpec
    cylinders: tuple

    def __post_init__(self):
        object.__setattr__(self, "cylinders", tuple(self.cylinders))
        for c in self.cylinders:
            box_of(c, self.group)

    def covers(self, patterns) -> bool:
        """True when every pattern in ``patterns`` lies in some cylinder of the cover."""
        for p in patterns:
            if not any(all(pt in p and p[pt] == s for pt, s in c.items()) for c in self.cylinders):
                return False
        return True


def uniform_cover(spec: SftSpec, n: int, margin: int = 0) -> CylinderCover:
    """The depth-n cover {[[sigma]] : sigma admissible on F_n}."""
    return CylinderCover(spec.group, tuple(enumerate_patterns(spec, n, margin)))


def log2_sum_exp2(exponents: dict) -> float:
    """log2 of sum(mult * 2**e) for a {e: mult} map, computed stably."""
    if not exponents:
        return -math.inf
    top = max(exponents)
    total = sum(mult * 2.0 ** (e - top) for e, mult in exponents.items())
    return top + math.log2(total)


def hausdorff_sum(cover: CylinderCover, s: float) -> float:
    """log2 of sum over E of diam(E)**s."""
    if s < 0:
        raise ValueError("s must be >= 0")
    by_size = Counter(cylinder_diameter(c, cover.group) for c in cover.cylinders)
    if len(by_size) == 1:
        (e, mult), = by_size.items()
        return math.log2(mult) + s * e
    exponents: Counter = Counter()
    for e, mult in by_size.items():
        exponents[s * e] += mult
    return log2_sum_exp2(exponents)


# ---------------------------------------------------------------------------
# dimension estimate


def make_s_grid(alphabet_size: int, points: int = DEFAULT_GRID_POINTS, step: float | None = None) -> list[float]:
    """Equally spaced s values on [0, log2 |A|]."""
    top = math.log2(alphabet_size)
    if top == 0:
        return [0.0]
    if step is not None:
        count = int(math.floor(top / step + 1e-9))
        return [round(i * step, 12) for i in range(count + 1)]
    return [float(v) for v in np.linspace(0.0, top, points)]


@dataclass(frozen=True)
class TrendRow:
    s: float
    trend: str  # "down", "flat", "up" or "inconclusive"
    slope: float
    last_value: float


@dataclass
class DimReport:
    rows: list
    estimate: float
    interval: tuple
    consistent: bool
    series: object = field(repr=False, default=None)

    def contains(self, value: float) -> bool:
        return self.interval[0] <= value <= self.interval[1]


def classify_trend(counts: Sequence[int], sizes: Sequence[int], s: float, flat_tol: float = 1e-9):
    """Trend of log2(count) - s |F_n| over the second half of the n range.

    Returns (trend, mean slope per cell). The trend is decided by the signs of
    the per-cell increments: all within ``flat_tol`` is flat, all negative is
    down, all positive is up, anything mixed (or fewer than one increment) is
    inconclusive.
    """
    values = [math.log2(c) - s * z for c, z in zip(counts, sizes)]
    start = (len(values) - 1) // 2
    incs = [
        (values[i + 1] - values[i]) / (sizes[i + 1] - sizes[i])
        for i in range(start, len(values) - 1)
    ]
    if not incs:
        return "inconclusive", math.nan
    slope = (values[-1] - values[start]) / (sizes[-1] - sizes[start])
    signs = {0 if abs(v) <= flat_tol else (1 if v > 0 else -1) for v in incs}
    if signs == {0}:
        return "flat", slope
    if signs <= {0, -1}:
        return "down", slope
    if signs <= {0, 1}:
        return "up", slope
    return "inconclusive", slope


def dim_estimate(
    spec: SftSpec,
    n_max: int,
    s_grid: Sequence[float] | None = None,
    margin: int = 0,
    workers: int = 1,
    series=None,
) -> DimReport:
    """Locate the s where |X|F_n| 2^{-s|F_n|} switches from growing to vanishing.

    The estimate is the flat grid point if one exists (interval: its grid
    neighbours), otherwise the gap between the largest "up" and the smallest
    "down" grid point.
    """
    if s_grid is None:
        s_grid = make_s_grid(len(spec.alphabet))
    s_grid = list(s_grid)
    if s_grid != sorted(s_grid):
        raise ValueError("s_grid must be sorted ascending")
    top = math.log2(len(spec.alphabet))
    if s_grid and (s_grid[0] < 0 or s_grid[-1] > top + 1e-12):
        raise ValueError("s_grid must lie in [0, log2|A|]")
    if series is None:
        series = entropy_series(spec, n_max, margin, workers)
    counts = [r.count for r in series.records[: n_max + 1]]
    sizes = [r.box_size for r in series.records[: n_max + 1]]
    rows = []
    for s in s_grid:
        trend, slope = classify_trend(counts, sizes, s)
        rows.append(TrendRow(s, trend, slope, math.log2(counts[-1]) - s * sizes[-1]))
    decided = [r for r in rows if r.trend != "inconclusive"]
    if not decided:
        raise InconclusiveTrend(f"n_max = {n_max} is too small to classify any s")
    ups = [r.s for r in decided if r.trend == "up"]
    downs = [r.s for r in decided if r.trend == "down"]
    flats = [i for i, r in enumerate(rows) if r.trend == "flat"]
    consistent = not ups or not downs or max(ups) < min(downs)
    if flats:
        i = flats[len(flats) // 2]
        est = rows[i].s
        lo = rows[i - 1].s if i > 0 else est
        hi = rows[i + 1].s if i + 1 < len(rows) else est
    else:
        lo = max(ups) if ups else 0.0
        hi = min(downs) if downs else top
        est = (lo + hi) / 2
    return DimReport(rows, est, (lo, hi), consistent, series)


# ---------------------------------------------------------------------------
# Vitali packing


@dataclass(frozen=True)
class LevelStat:
    level: int
    candidate_cells: int
    selected_cells: int
    selected: int


@dataclass(frozen=True)
class PackResult:
    box: BoxDomain
    epsilon: float
    pieces: tuple  # (flat dictionary index, translate g)
    piece_cells: tuple  # lexicographically sorted cells of each piece
    covered_cells: int
    level_stats: tuple = ()

    @property
    def piece_count(self) -> int:
        return len(self.pieces)

    @property
    def ok(self) -> bool:
        return True


@dataclass(frozen=True)
class ShortfallReport(PackResult):
    """A packing that misses at least one of the two epsilon bounds."""

    reasons: tuple = ()

    @property
    def ok(self) -> bool:
        return False


def flatten_levels(levels) -> list[Pattern]:
    if levels and isinstance(levels[0], Pattern):
        return list(levels)
    return [p for level in levels for p in level]


def exact_epsilon(epsilon) -> Fraction:
    """epsilon as the decimal it was written as, so 0.4 * 20 is exactly 8."""
    if isinstance(epsilon, Fraction):
        return epsilon
    return Fraction(str(epsilon))


def bound_failures(size: int, covered: int, pieces: int, epsilon: float) -> list[str]:
    eps = exact_epsilon(epsilon)
    out = []
    if not covered > (1 - eps) * size:
        out.append(f"coverage {covered}/{size} is not > (1 - eps)|F_n|")
    if not pieces < eps * size:
        out.append(f"{pieces} pieces is not < eps|F_n|")
    return out


def _placements(sigma: Pattern, box: BoxDomain):
    lo, hi = extent(sigma.domain)
    ranges = [range(box.lo - lo[a], box.hi - hi[a] + 1) for a in range(len(lo))]
    return itertools.product(*ranges)


def vitali_pack(
    target: Pattern,
    dictionary_levels: Sequence[Sequence[Pattern]],
    epsilon: float,
    group: GroupSpec,
    separation: float = DEFAULT_SEPARATION,
) -> PackResult:
    """Greedy disjoint packing of ``target`` by translated dictionary patterns.

    Levels are given finest first and processed coarsest first. Inside a
    level the matching translates that avoid already covered cells are taken
    largest first, ties broken by lexicographically least anchor and then by
    dictionary index, skipping any that overlap an earlier choice.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    box = box_of(target, group)
    if box.n < 0:
        raise BoxTooSmall("target is empty")
    levels = [list(level) for level in dictionary_levels]
    flat = flatten_levels(levels)
    if not flat:
        raise DictionaryError("dictionary is empty")
    sizes = [[len(p) for p in level] for level in levels]
    nonempty = [s for s in sizes if s]
    for lower, upper in zip(nonempty, nonempty[1:]):
        if not min(upper) >= separation * max(lower) or not min(upper) > max(lower):
            raise DictionaryError(
                f"levels must be separated: min size {min(upper)} < {separation} x {max(lower)}"
            )
    for p in flat:
        if p.alphabet != target.alphabet:
            raise DictionaryError("dictionary pattern uses a different alphabet")
        lo, hi = extent(p.domain)
        if any(h - l + 1 > box.side for l, h in zip(lo, hi)):
            raise BoxTooSmall(f"dictionary pattern of extent {[h - l + 1 for l, h in zip(lo, hi)]} "
                              f"does not fit in F_{box.n}")

    covered: set = set()
    pieces = []
    piece_cells = []
    stats = []
    offsets = np.cumsum([0] + [len(level) for level in levels])
    cells = target.cells
    for li in reversed(range(len(levels))):
        candidates = []
        for j, sigma in enumerate(levels[li]):
            items = list(sigma.items())
            anchor0 = lex_min(sigma.domain)
            for g in _placements(sigma, box):
                pts = [add(g, h) for h, _ in items]
                if any(p in covered for p in pts):
                    continue
                if all(cells[p] == s for p, (_, s) in zip(pts, items)):
                    candidates.append((-len(items), add(g, anchor0), int(offsets[li]) + j, g, pts))
        candidates.sort(key=lambda c: (c[0], c[1], c[2]))
        cand_cells = set()
        for c in candidates:
            cand_cells.update(c[4])
        before = len(covered)
        chosen = 0
        for _, _, idx, g, pts in candidates:
            if any(p in covered for p in pts):
                continue
            covered.update(pts)
            pieces.append((idx, g))
            piece_cells.append(tuple(sorted(pts)))
            chosen += 1
        stats.append(LevelStat(li, len(cand_cells), len(covered) - before, chosen))

    kwargs = dict(
        box=box,
        epsilon=epsilon,
        pieces=tuple(pieces),
        piece_cells=tuple(piece_cells),
        covered_cells=len(covered),
        level_stats=tuple(stats),
    )
    reasons = bound_failures(box.size, len(covered), len(pieces), epsilon)
    if reasons:
        return ShortfallReport(**kwargs, reasons=tuple(reasons))
    return PackResult(**kwargs)


def tiling_dictionary(spec: SftSpec, block: int) -> list[Pattern]:
    """All locally admissible patterns on the cube {0..block-1}^d."""
    return list(enumerate_domain(spec, rectangle_points((block,) * spec.group.d)))


# ---------------------------------------------------------------------------
# encoding


@dataclass(frozen=True)
class EncodedPattern:
    """Gap symbols a_1..a_m (BLANK marks an anchor or padding) and dictionary words."""

    group: GroupSpec
    n: int
    epsilon: float
    alphabet: tuple
    gap_symbols: tuple
    dictionary_words: tuple  # flat dictionary indices, in anchor order

    @property
    def m(self) -> int:
        return len(self.gap_symbols)

    @property
    def k(self) -> int:
        return len(self.dictionary_words)

    def description_size(self, dictionary) -> int:
        """m + sum |sigma_i|, in symbols."""
        flat = flatten_levels(dictionary)
        return self.m + sum(len(flat[i]) for i in self.dictionary_words)


def gap_length(epsilon: float, size: int) -> int:
    return 2 * math.floor(exact_epsilon(epsilon) * size)


def encode_pattern(target: Pattern, pack: PackResult, epsilon: float) -> EncodedPattern:
    """Encode ``target`` as uncovered symbols plus the ordered dictionary words.

    V is the union of the uncovered cells U and the piece anchors (least cell
    of each piece); a_j is the symbol at the j-th cell of V in lexicographic
    order, or BLANK at anchors, and BLANK pads the list to m = 2 floor(eps |F_n|).
    """
    box = pack.box
    if box_of(target, box.group) != box:
        raise BoundsViolated("target is not on the packed box")
    reasons = bound_failures(box.size, pack.covered_cells, pack.piece_count, epsilon)
    if reasons:
        raise BoundsViolated("; ".join(reasons))
    anchors = {}
    covered = set()
    for (idx, _), pts in zip(pack.pieces, pack.piece_cells):
        if any(p in covered or p not in box for p in pts):
            raise BoundsViolated("pack pieces overlap or leave the box")
        covered.update(pts)
        anchors[pts[0]] = idx
    v_cells = sorted({p for p in box.points() if p not in covered} | set(anchors))
    m = gap_length(epsilon, box.size)
    if len(v_cells) > m:
        raise BoundsViolated(f"|V| = {len(v_cells)} exceeds m = {m}")
    gaps = [BLANK if c in anchors else target[c] for c in v_cells]
    gaps += [BLANK] * (m - len(gaps))
    words = tuple(anchors[c] for c in sorted(anchors))
    return EncodedPattern(box.group, box.n, epsilon, target.alphabet, tuple(gaps), words)


def decode_pattern(enc: EncodedPattern, dictionary, n: int) -> Pattern:
    """Rebuild the target from its encoding by a single lexicographic sweep."""
    if n != enc.n:
        raise MalformedEncoding(f"encoding is for F_{enc.n}, not F_{n}")
    box = BoxDomain(enc.group, n)
    flat = flatten_levels(dictionary)
    if enc.m != gap_length(enc.epsilon, box.size):
        raise MalformedEncoding("gap list length does not match 2 floor(eps |F_n|)")
    if not enc.k < exact_epsilon(enc.epsilon) * box.size:
        raise MalformedEncoding("too many dictionary words for epsilon")
    q = len(enc.alphabet)
    filled: dict[Point, int] = {}
    j = 0
    words = iter(enc.dictionary_words)
    for c in box.points():
        if c in filled:
            continue
        if j >= enc.m:
            raise MalformedEncoding("gap list exhausted before the box was filled")
        a = enc.gap_symbols[j]
        j += 1
        if a == BLANK:
            idx = next(words, None)
            if idx is None or not 0 <= idx < len(flat):
                raise MalformedEncoding("missing or invalid dictionary word")
            sigma = flat[idx]
            g = sub(c, lex_min(sigma.domain))
            for h, s in sigma.items():
                p = add(g, h)
                if p not in box or p in filled:
                    raise MalformedEncoding(f"dictionary word {idx} does not fit at {c}")
                filled[p] = s
        elif 0 <= a < q:
            filled[c] = a
        else:
            raise MalformedEncoding(f"gap symbol {a} outside alphabet")
    if next(words, None) is not None:
        raise MalformedEncoding("unused dictionary words")
    if any(a != BLANK for a in enc.gap_symbols[j:]):
        raise MalformedEncoding("padding must be blank")
    return Pattern(enc.alphabet, filled)
