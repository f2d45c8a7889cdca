"""Command-line interface.

CSV goes to stdout (header row first, ``\\n`` line endings); diagnostics and
``error:`` lines go to stderr. Exit codes: 0 success, 1 usage, 2 spec parse
error, 3 computation error. ``verify`` also exits 1 when any check fails.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from .complexity import (
    ComplexityRateSeries,
    check_limsup_bound,
    complexity_rate_series,
    constant_source,
)
from .core import Pattern
from .dimension import (
    decode_pattern,
    dim_estimate,
    encode_pattern,
    hausdorff_sum,
    make_s_grid,
    tiling_dictionary,
    uniform_cover,
    vitali_pack,
)
from .errors import EmptySubshiftSuspected, ParseError, SubshiftError
from .measure import bernoulli_measure, is_irreducible, measure_entropy, parry_measure, sample_point, smb_check
from .sft import (
    SftSpec,
    count_patterns,
    entropy_exact_1d,
    entropy_series,
    is_locally_admissible,
    random_admissible_pattern,
    strip_entropy_bracket_2d,
    transfer_matrix_1d,
)
from .specfile import parse_spec

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_COMPUTE = 0, 1, 2, 3

DEFAULT_MARGIN = 2
DEFAULT_TOL = 1e-12
DEFAULT_SLACK = 0.05


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "-inf" if x < 0 else "inf"
        return f"{x:.12f}"
    return str(x)


class CsvOut:
    def __init__(self, stream):
        self.stream = stream
        self.tables = 0

    def table(self, header, rows):
        if self.tables:
            self.stream.write("\n")
        self.tables += 1
        self.stream.write(",".join(header) + "\n")
        for row in rows:
            self.stream.write(",".join(fmt(v) for v in row) + "\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _default_nmax(spec: SftSpec) -> int:
    return 18 if spec.group.d == 1 else 2


def _width_list(text: str) -> list[int]:
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(w) for w in text.split(",")]


def _seed(text: str) -> int:
    value = int(text, 10)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a decimal 64-bit unsigned integer")
    return value


# ---------------------------------------------------------------------------
# point sources


def _sample_word(spec: SftSpec, seed: int, length: int, source: str = "parry") -> Pattern:
    if source == "zero":
        return Pattern.word(spec.alphabet, [0] * length)
    if spec.group.d != 1:
        raise SubshiftError(f"{source} sampling needs a 1-D spec")
    if source == "uniform":
        mu = bernoulli_measure(spec.alphabet)
    else:
        tm = transfer_matrix_1d(spec)
        mu = parry_measure(tm)
    x = sample_point(mu, seed, length)
    if not is_locally_admissible(spec, x):
        raise SubshiftError("sampled point violates the forbidden patterns")
    return x


def _point_for(spec, seed, n_max, source):
    box = spec.group.box(n_max)
    if source == "zero":
        point = constant_source(spec.alphabet, spec.group)(n_max)
    else:
        x = _sample_word(spec, seed, box.size, source)
        point = Pattern.from_values(spec.alphabet, box.points(), x.values_in(x.sorted_points()))
    if not is_locally_admissible(spec, point):
        raise SubshiftError("point violates the forbidden patterns")
    return point


def _packing_target(spec: SftSpec, seed: int, n: int) -> Pattern:
    box = spec.group.box(n)
    if spec.group.d == 1:
        x = _sample_word(spec, seed, box.size)
        return Pattern.from_values(spec.alphabet, box.points(), x.values_in(x.sorted_points()))
    return random_admissible_pattern(spec, list(box.points()), seed)


# ---------------------------------------------------------------------------
# commands


def cmd_count(spec, args, out):
    rows = []
    for n in args.n:
        r = count_patterns(spec, n, args.margin, args.workers)
        rows.append((r.n, r.box_size, r.count, r.rate))
    out.table(["n", "box_size", "count", "rate"], rows)
    return EXIT_OK


def cmd_entropy(spec, args, out):
    n_max = args.nmax if args.nmax is not None else _default_nmax(spec)
    series = entropy_series(spec, n_max, args.margin, args.workers)
    out.table(["n", "box_size", "count", "rate"], [(r.n, r.box_size, r.count, r.rate) for r in series.records])
    out.table(["n", "k", "submultiplicative"], [(c.n, c.k, c.holds) for c in series.diagnostics])
    if spec.group.d == 1:
        out.table(["quantity", "value"], [("entropy_exact", entropy_exact_1d(spec, args.tol))])
    elif spec.group.d == 2:
        brackets = strip_entropy_bracket_2d(spec, args.widths, args.tol)
        out.table(["width", "lower", "upper"], [(b.width, b.lower, b.upper) for b in brackets])
    return EXIT_OK


def cmd_dim(spec, args, out):
    n_max = args.nmax if args.nmax is not None else _default_nmax(spec)
    if args.step is not None:
        grid = make_s_grid(len(spec.alphabet), step=args.step)
    else:
        grid = make_s_grid(len(spec.alphabet), points=args.grid_points)
    rep = dim_estimate(spec, n_max, grid, args.margin, args.workers)
    out.table(["s", "trend", "slope", "last_value"], [(r.s, r.trend, r.slope, r.last_value) for r in rep.rows])
    out.table(
        ["quantity", "value"],
        [
            ("dim_estimate", rep.estimate),
            ("dim_lower", rep.interval[0]),
            ("dim_upper", rep.interval[1]),
            ("consistent", rep.consistent),
            ("entropy_rate_nmax", rep.series.records[-1].rate),
        ],
    )
    return EXIT_OK


def _complexity_series(spec, seed, n_max, source, geometric) -> ComplexityRateSeries:
    point = _point_for(spec, seed, n_max, source)
    n_values = None
    if geometric:
        n_values = sorted({n for n in range(n_max + 1) if spec.group.box(n).size & (spec.group.box(n).size - 1) == 0}
                          | {n_max})
    return complexity_rate_series(point, n_max, spec.group, n_values)


def cmd_complexity(spec, args, out):
    series = _complexity_series(spec, args.seed, args.nmax, args.source, args.geometric)
    out.table(["n", "box_size", "proxy_bits", "rate"], [(r.n, r.box_size, r.proxy_bits, r.rate) for r in series.records])
    return EXIT_OK


def cmd_sample(spec, args, out):
    x = _sample_word(spec, args.seed, args.length, args.source)
    out.table(["seed", "length", "point"], [(args.seed, args.length, " ".join(x.symbols()))])
    return EXIT_OK


def _pack(spec, args):
    target = _packing_target(spec, args.seed, args.n)
    dictionary = tiling_dictionary(spec, args.block)
    pack = vitali_pack(target, [dictionary], args.epsilon, spec.group)
    return target, dictionary, pack


def cmd_vitali(spec, args, out):
    _, dictionary, pack = _pack(spec, args)
    rows = [
        ("n", args.n),
        ("box_size", pack.box.size),
        ("epsilon", args.epsilon),
        ("dictionary_size", len(dictionary)),
        ("piece_count", pack.piece_count),
        ("covered_cells", pack.covered_cells),
        ("bounds_met", pack.ok),
    ]
    for reason in getattr(pack, "reasons", ()):
        rows.append(("shortfall", reason.replace(",", ";")))
    out.table(["quantity", "value"], rows)
    return EXIT_OK


def cmd_encode(spec, args, out):
    target, dictionary, pack = _pack(spec, args)
    enc = encode_pattern(target, pack, args.epsilon)
    back = decode_pattern(enc, [dictionary], args.n)
    out.table(
        ["quantity", "value"],
        [
            ("n", args.n),
            ("box_size", pack.box.size),
            ("epsilon", args.epsilon),
            ("m", enc.m),
            ("k", enc.k),
            ("uncovered", pack.box.size - pack.covered_cells),
            ("description_size", enc.description_size([dictionary])),
            ("gap_symbols", " ".join("_" if a < 0 else spec.alphabet[a] for a in enc.gap_symbols)),
            ("dictionary_words", " ".join(str(i) for i in enc.dictionary_words)),
            ("roundtrip", back == target),
        ],
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


@dataclass
class Check:
    name: str
    value: object
    target: object
    tolerance: object
    status: str


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def run_verify(spec: SftSpec, workers: int = 1, margin: int = DEFAULT_MARGIN, seed: int = 0) -> list[Check]:
    """Desk-scale reproduction of entropy = dimension = complexity for one spec."""
    checks: list[Check] = []
    d = spec.group.d
    n_max = _default_nmax(spec)
    series = entropy_series(spec, n_max, margin, workers)
    checks.append(Check("submultiplicativity_violations", len(series.violations), 0, 0,
                        _status(not series.violations)))
    step = 0.01
    grid = make_s_grid(len(spec.alphabet), step=step)
    dim = dim_estimate(spec, n_max, grid, margin, series=series)
    checks.append(Check("entropy_rate_nmax", series.records[-1].rate, "", "", "INFO"))
    checks.append(Check("dim_estimate", dim.estimate, f"[{dim.interval[0]:.2f};{dim.interval[1]:.2f}]", step, "INFO"))
    easy = dim.estimate <= series.records[-1].rate + step
    checks.append(Check("dim_le_entropy_rate", dim.estimate, series.records[-1].rate, step, _status(easy)))

    if d == 1:
        ent = entropy_exact_1d(spec, DEFAULT_TOL)
        tm = transfer_matrix_1d(spec)
        oracle = math.log2(max(abs(np.linalg.eigvals(tm.m.astype(float)))))
        checks.append(Check("entropy_exact", ent, oracle, 1e-9, _status(abs(ent - oracle) <= 1e-9)))
        checks.append(Check("dim_interval_contains_entropy", ent, f"[{dim.interval[0]:.2f};{dim.interval[1]:.2f}]",
                            step, _status(dim.contains(ent))))
        worst = 0.0
        for n in range(n_max + 1):
            cover = uniform_cover(spec, n, margin)
            count = series.records[n].count
            for s in (0.5, ent, 1.0):
                expected = math.log2(count) - s * series.records[n].box_size
                worst = max(worst, abs(hausdorff_sum(cover, s) - expected))
        checks.append(Check("hausdorff_sum_identity", worst, 0.0, 1e-9, _status(worst <= 1e-9)))
        if not is_irreducible(tm.m):
            for name in ("variational_principle", "smb_mean", "smb_max_deviation",
                         "complexity_rate", "limsup_bound", "vitali_bounds", "encode_roundtrip"):
                checks.append(Check(name, "", "", "", "SKIP"))
            return checks
        mu = parry_measure(tm, DEFAULT_TOL)
        h = measure_entropy(mu)
        checks.append(Check("variational_principle", h, ent, 1e-9, _status(abs(h - ent) <= 1e-9)))
        smb = smb_check(mu, range(seed, seed + 100), 10 ** 4)
        checks.append(Check("smb_mean", smb.mean, ent, 0.01, _status(abs(smb.mean - ent) <= 0.01)))
        checks.append(Check("smb_max_deviation", smb.max_deviation, 0.0, 0.05,
                            _status(smb.max_deviation <= 0.05 and smb.support_violations == 0)))
        cx = _complexity_series(spec, seed, 2 ** 16 - 1, "parry", True)
        rate = cx.records[-1].rate
        checks.append(Check("complexity_rate", rate, ent, DEFAULT_SLACK, _status(abs(rate - ent) <= DEFAULT_SLACK)))
        tail = sum(1 for r in cx.records if r.box_size >= 2 ** 14)
        lim = check_limsup_bound(cx, ent, tail, DEFAULT_SLACK)
        checks.append(Check("limsup_bound", lim.max_rate, lim.bound, DEFAULT_SLACK, _status(lim.passed)))
        met = trips = 0
        dictionary = tiling_dictionary(spec, 4)
        box = spec.group.box(15)
        for k in range(100):
            x = sample_point(mu, seed + k, box.size)
            target = Pattern.from_values(spec.alphabet, box.points(), x.values_in(x.sorted_points()))
            pack = vitali_pack(target, [dictionary], 0.3, spec.group)
            if pack.ok:
                met += 1
                enc = encode_pattern(target, pack, 0.3)
                trips += decode_pattern(enc, [dictionary], 15) == target
        checks.append(Check("vitali_bounds", met, 100, 0, _status(met == 100)))
        checks.append(Check("encode_roundtrip", trips, 100, 0, _status(trips == 100)))
    elif d == 2:
        widths = list(range(1, 9))
        br = strip_entropy_bracket_2d(spec, widths, DEFAULT_TOL)
        nested = all(b.lower is None or b.lower <= b.upper + 1e-12 for b in br) and all(
            b2.upper <= b1.upper + 1e-12 for b1, b2 in zip(br, br[1:])
        )
        checks.append(Check("strip_brackets_nested", nested, True, 0, _status(nested)))
        last = br[-1]
        width = last.upper - (last.lower if last.lower is not None else 0.0)
        checks.append(Check("strip_bracket_width_8", width, 0.0, 0.1, _status(width <= 0.1)))
        worst = max(r.rate for r in series.records)
        checks.append(Check("box_rates_le_upper_8", worst, last.upper, 0.02, _status(worst <= last.upper + 0.02)))
    return checks


def cmd_verify(spec, args, out):
    checks = run_verify(spec, args.workers, args.margin, args.seed)
    out.table(["check", "value", "target", "tolerance", "status"],
              [(c.name, c.value, c.target, c.tolerance, c.status) for c in checks])
    return EXIT_OK if all(c.status != "FAIL" for c in checks) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="subshift", description="Entropy, dimension and complexity of subshifts of finite type.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, margin=True, workers=True):
        p.add_argument("--spec", required=True, help="spec file")
        if margin:
            p.add_argument("--margin", type=int, default=DEFAULT_MARGIN)
        if workers:
            p.add_argument("--workers", type=int, default=1, help="processes used for counting")

    p = sub.add_parser("count", help="count admissible patterns on F_n")
    common(p)
    p.add_argument("--n", type=int, nargs="+", required=True)

    p = sub.add_parser("entropy", help="entropy rate series and exact value or 2-D bracket")
    common(p)
    p.add_argument("--nmax", type=int)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--widths", type=_width_list, default=list(range(1, 9)), help="strip heights, e.g. 1..8 or 1,2,4")

    p = sub.add_parser("dim", help="Hausdorff dimension estimate from the s-threshold")
    common(p)
    p.add_argument("--nmax", type=int)
    p.add_argument("--grid-points", type=int, default=64)
    p.add_argument("--step", type=float, help="grid step; overrides --grid-points")

    p = sub.add_parser("complexity", help="LZ78 proxy complexity rates of a sampled point")
    common(p, margin=False, workers=False)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--source", choices=("parry", "uniform", "zero"), default="parry")
    p.add_argument("--geometric", action="store_true", help="only rows where |F_n| is a power of two, plus n_max")

    p = sub.add_parser("sample", help="sample a point from the Parry measure")
    common(p, margin=False, workers=False)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--source", choices=("parry", "uniform", "zero"), default="parry")

    for name, help_text in (("vitali", "greedy packing of a sampled pattern"),
                            ("encode", "encode and decode a sampled pattern")):
        p = sub.add_parser(name, help=help_text)
        common(p, margin=False, workers=False)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--n", type=int, default=15)
        p.add_argument("--block", type=int, default=4, help="side of the tiling dictionary cube")
        p.add_argument("--epsilon", type=float, default=0.3)

    p = sub.add_parser("verify", help="check entropy = dimension = complexity at desk scale")
    common(p)
    p.add_argument("--seed", type=_seed, default=0)
    return parser


COMMANDS = {
    "count": cmd_count,
    "entropy": cmd_entropy,
    "dim": cmd_dim,
    "complexity": cmd_complexity,
    "sample": cmd_sample,
    "vitali": cmd_vitali,
    "encode": cmd_encode,
    "verify": cmd_verify,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = parse_spec(args.spec)
    except OSError as exc:
        stderr.write(f"error: cannot read spec: {exc}\n")
        return EXIT_PARSE
    except ParseError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    try:
        return COMMANDS[args.command](spec, args, CsvOut(stdout))
    except EmptySubshiftSuspected:
        stderr.write("error: empty subshift\n")
        return EXIT_COMPUTE
    except (SubshiftError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_COMPUTE


def run() -> None:
    """Console-script entry point."""
    raise SystemExit(main())


if __name__ == "__main__":
    run()
