"""Plain-text tableau files.

Layout::

    s
    c_1 ... c_s
    a_11 ... a_1s
    ...
    a_s1 ... a_ss
    b_1 ... b_s

Numbers are whitespace separated, decimal or scientific.  Blank lines and
``#`` comments are ignored.  The writer uses 17 significant digits, which
round-trips every double exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .tableau import ButcherTableau


class TableauFormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def format_tableau(tab: ButcherTableau) -> str:
    lines = [str(tab.s), " ".join(_fmt(x) for x in tab.c)]
    lines += [" ".join(_fmt(x) for x in row) for row in tab.A]
    lines.append(" ".join(_fmt(x) for x in tab.b))
    return "\n".join(lines) + "\n"


def parse_tableau(text: str, name: str = "") -> ButcherTableau:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise TableauFormatError("empty tableau file")
    lineno, first = rows[0]
    if len(first) != 1:
        raise TableauFormatError(f"line {lineno}: expected the stage count alone")
    try:
        s = int(first[0])
    except ValueError:
        raise TableauFormatError(f"line {lineno}: stage count {first[0]!r} is not an integer") from None
    if s < 1:
        raise TableauFormatError(f"line {lineno}: stage count must be positive")
    if len(rows) != s + 3:
        raise TableauFormatError(f"expected {s + 3} non-empty lines for s={s}, found {len(rows)}")
    values = []
    for lineno, fields in rows[1:]:
        if len(fields) != s:
            raise TableauFormatError(f"line {lineno}: expected {s} numbers, found {len(fields)}")
        try:
            values.append([float(f) for f in fields])
        except ValueError as exc:
            raise TableauFormatError(f"line {lineno}: {exc}") from None
    c = np.array(values[0])
    A = np.array(values[1:s + 1])
    b = np.array(values[s + 1])
    try:
        return ButcherTableau(A, b, c, name)
    except ValueError as exc:
        raise TableauFormatError(str(exc)) from None


def read_tableau(path) -> ButcherTableau:
    path = Path(path)
    return parse_tableau(path.read_text(), name=path.stem)


def write_tableau(tab: ButcherTableau, path) -> None:
    Path(path).write_text(format_tableau(tab))
