"""Syntax-level parsing of Delaney-Dress symbols.

Only the textual form is checked: ``<[a.b:]size dim:ops:ms>`` where ``ops``
has ``dim + 1`` comma-separated groups of space-separated integers and
``ms`` has ``dim`` groups.  Symbols are never expanded into tilings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..errors import ParseError

__all__ = ["DSymbolRecord", "parse_dsymbol", "read_dsymbol_file"]

_VERSION = re.compile(r"^\d+\.\d+$")


@dataclass(frozen=True)
class DSymbolRecord:
    size: int
    dim: int
    op_lists: tuple[tuple[int, ...], ...]
    m_lists: tuple[tuple[int, ...], ...]
    text: str


def _ints(group: str, where: str) -> tuple[int, ...]:
    toks = group.split()
    if not toks:
        raise ParseError("empty group", where)
    out = []
    for t in toks:
        if not t.isdigit():
            raise ParseError(f"not a positive integer: {t!r}", where)
        v = int(t)
        if v <= 0:
            raise ParseError(f"not a positive integer: {t!r}", where)
        out.append(v)
    return tuple(out)


def parse_dsymbol(text: str) -> DSymbolRecord:
    s = text.strip()
    if not (s.startswith("<") and s.endswith(">")):
        raise ParseError("a D-symbol is enclosed in <...>", "delimiters")
    parts = s[1:-1].split(":")
    if parts and _VERSION.match(parts[0].strip()):
        parts = parts[1:]
    if len(parts) != 3:
        raise ParseError(f"expected header and two sections, got {len(parts)} parts", "sections")
    header = _ints(parts[0], "header")
    if len(header) != 2:
        raise ParseError("header must be 'size dim'", "header")
    size, dim = header
    ops = [g for g in parts[1].split(",")]
    ms = [g for g in parts[2].split(",")]
    if len(ops) != dim + 1:
        raise ParseError(f"expected {dim + 1} operation groups, got {len(ops)}", "operations")
    if len(ms) != dim:
        raise ParseError(f"expected {dim} branching groups, got {len(ms)}", "branching")
    op_lists = tuple(_ints(g, f"operations[{i}]") for i, g in enumerate(ops))
    for i, g in enumerate(op_lists):
        if max(g) > size:
            raise ParseError(f"element {max(g)} exceeds size {size}", f"operations[{i}]")
    m_lists = tuple(_ints(g, f"branching[{i}]") for i, g in enumerate(ms))
    return DSymbolRecord(size, dim, op_lists, m_lists, s)


def read_dsymbol_file(path) -> list[DSymbolRecord]:
    """One symbol per line; blank lines and ``#`` comments are skipped.

    Anything after the closing ``>`` on a line is ignored, so files may
    carry extra columns.
    """
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        end = line.find(">")
        sym = line[: end + 1] if end >= 0 else line
        try:
            out.append(parse_dsymbol(sym))
        except ParseError as exc:
            raise ParseError(str(exc), f"line {lineno}") from None
    return out
