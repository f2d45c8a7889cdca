"""Plain-text SFT spec files.

Format (one item per line, ``#`` starts a comment, blank lines ignored)::

    alphabet: 0 1
    group: N
    dimension: 1
    forbidden:
    (0)=1 (1)=1

Every line after ``forbidden:`` is one forbidden pattern written as
whitespace-separated ``(coords)=symbol`` cells. Symbols are tokens without
whitespace or any of ``,()=#``.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from .core import GroupSpec, Pattern
from .errors import ParseError, SemanticError
from .sft import SftSpec

SECTIONS = ("alphabet", "group", "dimension", "forbidden")
_HEADER = re.compile(r"^([A-Za-z_]+)\s*:\s*(.*)$")
_CELL = re.compile(r"^\((-?\d+(?:\s*,\s*-?\d+)*)\)=([^\s,()=#]+)$")
_SYMBOL = re.compile(r"^[^\s,()=#]+$")


def parse_spec_text(text: str) -> SftSpec:
    values: dict[str, tuple[int, str]] = {}
    forbidden_lines: list[tuple[int, str, int]] = []
    in_forbidden = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        body = line.strip()
        if not body:
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        m = _HEADER.match(body)
        if m and not body.startswith("("):
            name, rest = m.group(1), m.group(2).strip()
            if name not in SECTIONS:
                raise ParseError(f"unknown section {name!r}", lineno, col0)
            if name in values:
                raise ParseError(f"duplicate section {name!r}", lineno, col0)
            values[name] = (lineno, rest)
            in_forbidden = name == "forbidden"
            if in_forbidden and rest:
                raise ParseError("forbidden patterns go on the lines after 'forbidden:'", lineno, col0)
            continue
        if not in_forbidden:
            raise ParseError(f"unexpected text {body!r}", lineno, col0)
        forbidden_lines.append((lineno, line, col0))

    for name in ("alphabet", "group", "dimension"):
        if name not in values:
            raise ParseError(f"missing section {name!r}")

    line_a, rest = values["alphabet"]
    symbols = rest.split()
    if not symbols:
        raise ParseError("alphabet is empty", line_a)
    for s in symbols:
        if not _SYMBOL.match(s):
            raise ParseError(f"invalid symbol {s!r}", line_a)
    if len(set(symbols)) != len(symbols):
        raise SemanticError("alphabet symbols must be distinct", line_a)

    line_g, variant = values["group"]
    if variant not in ("N", "Z"):
        raise ParseError(f"group must be N or Z, got {variant!r}", line_g)
    line_d, dim_text = values["dimension"]
    if not re.fullmatch(r"[1-9]\d*", dim_text):
        raise ParseError(f"dimension must be a positive integer, got {dim_text!r}", line_d)
    group = GroupSpec(variant, int(dim_text))
    index = {s: i for i, s in enumerate(symbols)}

    forbidden = []
    for lineno, line, _ in forbidden_lines:
        cells = {}
        for tok in re.finditer(r"\S+", line):
            col = tok.start() + 1
            m = _CELL.match(tok.group())
            if not m:
                raise ParseError(f"malformed cell {tok.group()!r}", lineno, col)
            coords = tuple(int(c) for c in m.group(1).split(","))
            sym = m.group(2)
            if len(coords) != group.d:
                raise SemanticError(
                    f"cell {tok.group()!r} has {len(coords)} coordinates, dimension is {group.d}", lineno, col
                )
            if sym not in index:
                raise SemanticError(f"symbol {sym!r} is not in the alphabet", lineno, col)
            if coords in cells:
                raise SemanticError(f"duplicate cell {coords}", lineno, col)
            cells[coords] = index[sym]
        forbidden.append(Pattern(symbols, cells))
    return SftSpec(tuple(symbols), group, tuple(forbidden))


def parse_spec(path) -> SftSpec:
    return parse_spec_text(Path(path).read_text())


def format_spec(spec: SftSpec) -> str:
    lines = [
        "alphabet: " + " ".join(spec.alphabet),
        f"group: {spec.group.variant}",
        f"dimension: {spec.group.d}",
        "forbidden:",
    ]
    for f in spec.forbidden:
        cells = []
        for pt, s in sorted(f.items()):
            cells.append("(" + ",".join(str(c) for c in pt) + ")=" + spec.alphabet[s])
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


def bundled_spec_path(name: str) -> Path:
    """Path of a spec shipped with the package, e.g. ``golden_mean``."""
    if not name.endswith(".sft"):
        name += ".sft"
    return Path(str(resources.files("subshift") / "specs" / name))


def bundled_spec(name: str) -> SftSpec:
    return parse_spec(bundled_spec_path(name))
