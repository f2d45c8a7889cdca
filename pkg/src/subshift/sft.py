"""Subshifts of finite type: pattern enumeration, counting and entropy.

Counts are of *locally admissible* patterns: no translate of a forbidden
pattern fits inside the domain. With a positive ``margin`` a pattern on F_n is
only counted when it extends to a locally admissible pattern on F_{n+margin}.
Both are upper bounds on |X|F_n|; for d = 1 with margin >= the forbidden
extent they are exact.
"""

from __future__ import annotations

import functools
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .core import BoxDomain, GroupSpec, Pattern, Point, add, extent, rectangle_points, sub
from .errors import (
    ConvergenceError,
    EmptySubshiftSuspected,
    NotOneDimensional,
    StripTooNarrow,
    ZeroMatrix,
)


@dataclass(frozen=True)
class SftSpec:
    """A subshift presented by a finite list of forbidden patterns."""

    alphabet: tuple
    group: GroupSpec
    forbidden: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "forbidden", tuple(self.forbidden))
        if len(self.alphabet) < 1:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet symbols must be distinct")
        for f in self.forbidden:
            if len(f) == 0:
                raise ValueError("forbidden patterns must have nonempty domains")
            if f.alphabet != self.alphabet:
                raise ValueError("forbidden pattern uses a different alphabet")
            if f.dim != self.group.d:
                raise ValueError(f"forbidden pattern has dimension {f.dim}, expected {self.group.d}")

    @property
    def extents(self) -> tuple[int, ...]:
        """Per-axis maximum width of the forbidden patterns (0 when none)."""
        widths = [0] * self.group.d
        for f in self.forbidden:
            lo, hi = extent(f.domain)
            for a in range(self.group.d):
                widths[a] = max(widths[a], hi[a] - lo[a] + 1)
        return tuple(widths)


@dataclass(frozen=True)
class CountRecord:
    n: int
    box_size: int
    count: int
    rate: float


@dataclass(frozen=True)
class SubmultCheck:
    """One instance of C_{nk} <= C_n ** (k**d)."""

    n: int
    k: int
    holds: bool


@dataclass
class RateSeries:
    records: list
    diagnostics: list = field(default_factory=list)

    @property
    def rates(self) -> list[float]:
        return [r.rate for r in self.records]

    @property
    def violations(self) -> list:
        return [c for c in self.diagnostics if not c.holds]

    def __getitem__(self, n):
        return self.records[n]

    def __len__(self):
        return len(self.records)


def log2_rate(count: int, size: int) -> float:
    """log2(count) / size, exact when count is a perfect size-th power."""
    if count <= 0:
        raise ValueError("rate undefined for a zero count")
    if count == 1:
        return 0.0
    lg = math.log2(count)
    root = round(2.0 ** (lg / size))
    if root > 1 and root ** size == count:
        return math.log2(root)
    return lg / size


# ---------------------------------------------------------------------------
# backtracking engine


class _Engine:
    """Backtracking over ``inner`` cells with an existence check on ``outer``.

    Each forbidden translate lying inside inner+outer is attached to the cell
    of highest position in the assignment order, so it is checked exactly once,
    as soon as its last cell is assigned.
    """

    def __init__(self, spec: SftSpec, inner: Sequence[Point], outer: Sequence[Point] = ()):
        self.spec = spec
        self.q = len(spec.alphabet)
        order = list(inner) + list(outer)
        self.order = order
        self.n_inner = len(inner)
        index = {p: i for i, p in enumerate(order)}
        checks: list[list] = [[] for _ in order]
        for f in spec.forbidden:
            cells = sorted(f.items())
            h0 = cells[0][0]
            for c in order:
                g = sub(c, h0)
                idx = []
                for h, _ in cells:
                    j = index.get(add(g, h))
                    if j is None:
                        break
                    idx.append(j)
                else:
                    check = tuple(zip(idx, (s for _, s in cells)))
                    checks[max(idx)].append(check)
        self.checks = checks
        used = set()
        for lst in checks:
            for check in lst:
                used.update(i for i, _ in check)
        self.used = used
        self.active_inner = [i for i in range(self.n_inner) if i in used]
        self.free_inner = self.n_inner - len(self.active_inner)
        self.active_outer = [i for i in range(self.n_inner, len(order)) if i in used]
        frontier = set()
        for i in self.active_outer:
            for check in checks[i]:
                frontier.update(j for j, _ in check if j < self.n_inner)
        self.frontier = sorted(frontier)
        self._memo: dict = {}

    def _ok(self, assign, pos) -> bool:
        for check in self.checks[pos]:
            for j, s in check:
                if assign[j] != s:
                    break
            else:
                return False
        return True

    def _extendable(self, assign) -> bool:
        if not self.active_outer:
            return True
        key = tuple(assign[j] for j in self.frontier)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        outer = self.active_outer
        q = self.q

        def search(k):
            if k == len(outer):
                return True
            pos = outer[k]
            for s in range(q):
                assign[pos] = s
                if self._ok(assign, pos) and search(k + 1):
                    assign[pos] = -1
                    return True
            assign[pos] = -1
            return False

        found = search(0)
        self._memo[key] = found
        return found

    def count(self, prefix: Sequence[int] = ()) -> int:
        """Number of admissible inner assignments, times |A| per free cell.

        ``prefix`` fixes the symbols of the first active inner cells.
        """
        assign = [-1] * len(self.order)
        active = self.active_inner
        for k, s in enumerate(prefix):
            assign[active[k]] = s
            if not self._ok(assign, active[k]):
                return 0
        q = self.q

        def rec(k):
            if k == len(active):
                return 1 if self._extendable(assign) else 0
            pos = active[k]
            total = 0
            for s in range(q):
                assign[pos] = s
                if self._ok(assign, pos):
                    total += rec(k + 1)
            assign[pos] = -1
            return total

        return rec(len(prefix)) * q ** self.free_inner

    def prefixes(self, depth: int) -> list[tuple[int, ...]]:
        """Locally consistent assignments of the first ``depth`` active cells."""
        active = self.active_inner[:depth]
        assign = [-1] * len(self.order)
        out = []

        def rec(k, acc):
            if k == len(active):
                out.append(tuple(acc))
                return
            pos = active[k]
            for s in range(self.q):
                assign[pos] = s
                if self._ok(assign, pos):
                    acc.append(s)
                    rec(k + 1, acc)
                    acc.pop()
            assign[pos] = -1

        rec(0, [])
        return out

    def assignments(self) -> Iterator[list[int]]:
        """Every admissible inner assignment, in lexicographic cell order."""
        assign = [-1] * len(self.order)
        n_inner = self.n_inner
        q = self.q

        def rec(pos):
            if pos == n_inner:
                if self._extendable(assign):
                    yield assign[:n_inner]
                return
            for s in range(q):
                assign[pos] = s
                if self._ok(assign, pos):
                    yield from rec(pos + 1)
            assign[pos] = -1

        return rec(0)


def _margin_domains(spec: SftSpec, n: int, margin: int):
    inner = list(BoxDomain(spec.group, n).points())
    if margin <= 0:
        return inner, []
    inside = set(inner)
    outer = [p for p in BoxDomain(spec.group, n + margin).points() if p not in inside]
    return inner, outer


@functools.lru_cache(maxsize=32)
def _engine(spec: SftSpec, n: int, margin: int) -> _Engine:
    inner, outer = _margin_domains(spec, n, margin)
    return _Engine(spec, inner, outer)


def _count_chunk(spec, n, margin, prefixes):
    eng = _engine(spec, n, margin)
    return sum(eng.count(p) for p in prefixes)


def enumerate_patterns(spec: SftSpec, n: int, margin: int = 0) -> Iterator[Pattern]:
    """Stream the admissible patterns on F_n in lexicographic order."""
    if n < 0:
        raise ValueError("n must be >= 0")
    eng = _Engine(spec, *_margin_domains(spec, n, margin))
    points = eng.order[: eng.n_inner]
    for values in eng.assignments():
        yield Pattern.from_values(spec.alphabet, points, values)


def enumerate_domain(spec: SftSpec, points: Sequence[Point]) -> Iterator[Pattern]:
    """Locally admissible patterns on an arbitrary finite domain."""
    points = sorted(points)
    eng = _Engine(spec, points)
    for values in eng.assignments():
        yield Pattern.from_values(spec.alphabet, points, values)


def count_rectangle(spec: SftSpec, sides: Sequence[int]) -> int:
    """Number of locally admissible patterns on a ``sides[0] x sides[1] x ...`` window."""
    if len(sides) != spec.group.d:
        raise ValueError("window must have one side per lattice axis")
    return _Engine(spec, rectangle_points(sides)).count()


def count_patterns(spec: SftSpec, n: int, margin: int = 0, workers: int = 1) -> CountRecord:
    """Exact count of admissible patterns on F_n and its rate.

    With ``workers > 1`` the search is split on the first assigned cells and
    the partial counts are summed in a fixed order; the result is identical to
    the single-process count.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    eng = _engine(spec, n, margin)
    if workers <= 1 or len(eng.active_inner) < 4:
        count = eng.count()
    else:
        depth = min(len(eng.active_inner) - 1, max(1, math.ceil(math.log(8 * workers, eng.q))))
        prefixes = eng.prefixes(depth)
        chunks = [prefixes[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_count_chunk, itertools.repeat(spec), itertools.repeat(n),
                                  itertools.repeat(margin), chunks))
        count = sum(parts)
    size = BoxDomain(spec.group, n).size
    if count == 0:
        raise EmptySubshiftSuspected(n)
    return CountRecord(n=n, box_size=size, count=count, rate=log2_rate(count, size))


def entropy_series(spec: SftSpec, n_max: int, margin: int = 0, workers: int = 1) -> RateSeries:
    """Rates log2|X|F_n| / |F_n| for n = 0..n_max with submultiplicativity checks."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    records = [count_patterns(spec, n, margin, workers) for n in range(n_max + 1)]
    d = spec.group.d
    diagnostics = []
    for n in range(1, n_max + 1):
        for k in range(2, n_max // n + 1):
            holds = records[n * k].count <= records[n].count ** (k ** d)
            diagnostics.append(SubmultCheck(n, k, holds))
    return RateSeries(records, diagnostics)


# ---------------------------------------------------------------------------
# transfer matrices and spectral radius


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """0/1 matrix over admissible blocks; ``m[i, j] = 1`` iff block j may follow block i."""

    alphabet: tuple
    states: tuple
    m: np.ndarray

    @property
    def block(self) -> int:
        return len(self.states[0]) if self.states else 0

    def word_count(self, length: int) -> int:
        """Number of locally admissible words of ``length >= block``."""
        k = self.block
        if length < k:
            raise ValueError(f"length must be >= {k}")
        vec = [1] * len(self.states)
        rows = [[int(v) for v in row] for row in self.m]
        for _ in range(length - k):
            vec = [sum(r * v for r, v in zip(row, vec)) for row in rows]
        return sum(vec)


def transfer_matrix_1d(spec: SftSpec) -> TransferMatrix:
    """Transfer matrix on locally admissible words of length max(w - 1, 1)."""
    if spec.group.d != 1:
        raise NotOneDimensional(f"transfer_matrix_1d needs d = 1, got d = {spec.group.d}")
    w = spec.extents[0]
    k = max(w - 1, 1)
    eng = _Engine(spec, [(i,) for i in range(k)])
    states = [tuple(a) for a in eng.assignments()]
    index = {s: i for i, s in enumerate(states)}
    glue = _Engine(spec, [(i,) for i in range(k + 1)])
    m = np.zeros((len(states), len(states)), dtype=np.int64)
    for word in glue.assignments():
        i = index.get(tuple(word[:k]))
        j = index.get(tuple(word[1:]))
        if i is not None and j is not None:
            m[i, j] = 1
    return TransferMatrix(spec.alphabet, tuple(states), m)


def power_iteration(a, tol: float = 1e-12, max_iter: int = 1_000_000, vector_tol: float | None = None):
    """Perron root and right eigenvector of an irreducible nonnegative matrix.

    Iterates on ``a + I``, which is primitive whenever ``a`` is irreducible and
    keeps a positive start vector positive. The Collatz-Wielandt ratios
    min/max (Bx)_i / x_i bracket the Perron root of B = a + I; iteration stops
    once the bracket is narrower than ``tol`` (relative above 1). With
    ``vector_tol`` the normalized iterate must also have settled to that
    sup-norm distance.
    """
    a = np.asarray(a, dtype=float)
    size = a.shape[0]
    if size == 0 or not a.any():
        raise ZeroMatrix("matrix has no nonzero entry")
    shifted = a + np.eye(size)
    x = np.full(size, 1.0 / size)
    for _ in range(max_iter):
        y = shifted @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        y /= y.sum()
        moved = float(np.max(np.abs(y - x)))
        x = y
        if hi - lo <= tol * max(1.0, hi) and (vector_tol is None or moved < vector_tol):
            break
    else:
        raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")
    # a convex combination of the ratios, so it stays inside the bracket
    lam = float((a @ x).sum() / x.sum())
    return lam, x


def spectral_radius(m, tol: float = 1e-12) -> float:
    """Spectral radius of a nonnegative matrix: max Perron root over its strong components."""
    a = np.asarray(m, dtype=float)
    if a.size == 0:
        return 0.0
    n_comp, labels = connected_components(a != 0, directed=True, connection="strong")
    best = 0.0
    for c in range(n_comp):
        idx = np.flatnonzero(labels == c)
        block = a[np.ix_(idx, idx)]
        if not block.any():
            continue
        lam, _ = power_iteration(block, tol)
        best = max(best, lam)
    return best


def entropy_exact_1d(spec: SftSpec, tol: float = 1e-12) -> float:
    """log2 of the spectral radius of the transfer matrix."""
    tm = transfer_matrix_1d(spec)
    lam = spectral_radius(tm.m, tol)
    # integer matrices have spectral radius 0 or >= 1
    if lam < 0.5:
        raise ZeroMatrix("empty subshift: transfer matrix has spectral radius 0")
    return math.log2(lam)


# ---------------------------------------------------------------------------
# 2-D strip brackets


@dataclass(frozen=True)
class StripBracket:
    width: int
    lower: float | None
    upper: float


def strip_transfer_matrix(spec: SftSpec, width: int) -> TransferMatrix:
    """Height-``width`` strip as a 1-D SFT over admissible column blocks.

    Strips run along axis 1; a column is a vertical run of ``width`` cells.
    The vertical boundary is free, so the strip over-counts the plane.
    """
    if spec.group.d != 2:
        raise ValueError("strip transfer matrices need d = 2")
    ext_v, ext_h = spec.extents
    if spec.forbidden:
        fits = [extent(f.domain) for f in spec.forbidden]
        if all(hi[0] - lo[0] + 1 > width for lo, hi in fits):
            raise StripTooNarrow(f"no forbidden pattern fits in a strip of height {width}")
    if width < 1:
        raise StripTooNarrow("strip height must be >= 1")
    k = max(ext_h - 1, 1)
    eng = _Engine(spec, rectangle_points((width, k)))
    states = [tuple(a) for a in eng.assignments()]
    index = {s: i for i, s in enumerate(states)}
    glue_pts = rectangle_points((width, k + 1))
    glue = _Engine(spec, glue_pts)
    m = np.zeros((len(states), len(states)), dtype=np.int64)
    # cells are ordered row-major; column block c covers axis-1 positions c..c+k-1
    left = [i for i, p in enumerate(glue_pts) if p[1] < k]
    right = [i for i, p in enumerate(glue_pts) if p[1] >= 1]
    for block in glue.assignments():
        i = index.get(tuple(block[j] for j in left))
        j = index.get(tuple(block[j] for j in right))
        if i is not None and j is not None:
            m[i, j] = 1
    return TransferMatrix(spec.alphabet, tuple(states), m)


def strip_entropy_bracket_2d(spec: SftSpec, widths: Sequence[int], tol: float = 1e-12) -> list[StripBracket]:
    """Entropy brackets from strips of each height in ``widths``.

    upper(w) = log2(lambda_w) / w and lower(w) = log2(lambda_w) - log2(lambda_{w-1}),
    taking lambda_0 = 1 (the empty strip has a single configuration).
    """
    if spec.group.d != 2:
        raise ValueError("strip brackets need d = 2")
    cache: dict[int, float] = {0: 0.0}

    def log_lam(w):
        if w not in cache:
            lam = spectral_radius(strip_transfer_matrix(spec, w).m, tol)
            if lam < 0.5:
                raise ZeroMatrix(f"strip of height {w} admits no bi-infinite configuration")
            cache[w] = math.log2(lam)
        return cache[w]

    out = []
    for w in widths:
        upper = log_lam(w) / w
        try:
            lower = log_lam(w) - log_lam(w - 1)
        except StripTooNarrow:
            lower = None
        out.append(StripBracket(w, lower, upper))
    return out


def is_locally_admissible(spec: SftSpec, p: Pattern) -> bool:
    """True when no forbidden translate fits inside dom(p) and matches p."""
    points = p.sorted_points()
    eng = _Engine(spec, points)
    assign = p.values_in(points)
    return all(eng._ok(assign, pos) for pos in range(len(points)))


def random_admissible_pattern(spec: SftSpec, points: Sequence[Point], seed: int) -> Pattern:
    """A locally admissible pattern found by backtracking in a seeded random symbol order."""
    points = sorted(points)
    eng = _Engine(spec, points)
    rng = np.random.Generator(np.random.PCG64(seed))
    assign = [-1] * len(points)
    orders = [rng.permutation(eng.q).tolist() for _ in points]

    def rec(pos):
        if pos == len(points):
            return True
        for s in orders[pos]:
            assign[pos] = s
            if eng._ok(assign, pos) and rec(pos + 1):
                return True
        assign[pos] = -1
        return False

    if not rec(0):
        raise EmptySubshiftSuspected(None, "no locally admissible pattern on the requested domain")
    return Pattern.from_values(spec.alphabet, points, assign)
