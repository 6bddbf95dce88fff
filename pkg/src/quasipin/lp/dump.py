"""Plain-text dump of linear programs for cross-checking with external solvers.

The layout follows the common LP file format (objective, ``Subject To``,
``Bounds``, ``End``) but keeps coefficients as exact fractions such as
``3/4``; scale rows before feeding solvers that only read decimals.
"""

from __future__ import annotations

from fractions import Fraction
from typing import TextIO

from .program import EQ, GE, LE, LinearProgram

_REL = {LE: "<=", GE: ">=", EQ: "="}


def _term(coeff: Fraction, name: str, first: bool) -> str:
    sign = "-" if coeff < 0 else ("" if first else "+")
    mag = abs(coeff)
    body = name if mag == 1 else f"{mag} {name}"
    return f"{sign} {body}".strip() if first else f" {sign} {body}"


def _expr(coeffs, names) -> str:
    parts = []
    for a, name in zip(coeffs, names):
        if a:
            parts.append(_term(Fraction(a), name, not parts))
    return "".join(parts) if parts else "0"


def format_lp(lp: LinearProgram, title: str | None = None) -> str:
    lines = []
    if title:
        lines.append(f"\\ {title}")
    lines.append("Maximize" if lp.sense == "max" else "Minimize")
    obj = _expr(lp.objective, lp.names)
    if lp.constant:
        obj += f" + {lp.constant} const" if lp.constant > 0 else f" - {-lp.constant} const"
    lines.append(f" obj: {obj}")
    lines.append("Subject To")
    for k, row in enumerate(lp.rows, 1):
        name = row.name or f"c{k}"
        lines.append(f" {name}: {_expr(row.coeffs, lp.names)} {_REL[row.relation]} {row.rhs}")
    lines.append("Bounds")
    for (lo, hi), name in zip(lp.bounds, lp.names):
        if lo is None and hi is None:
            lines.append(f" {name} free")
        elif lo is not None and hi is not None:
            lines.append(f" {lo} <= {name} <= {hi}")
        elif lo is not None:
            lines.append(f" {name} >= {lo}")
        else:
            lines.append(f" -inf <= {name} <= {hi}")
    if lp.constant:
        lines.append(" const = 1")
    lines.append("End")
    return "\n".join(lines) + "\n"


class LPDumpWriter:
    """Recorder that appends every program it sees to an open text stream."""

    def __init__(self, stream: TextIO):
        self.stream = stream
        self.count = 0

    def __call__(self, title: str, lp: LinearProgram) -> None:
        self.count += 1
        self.stream.write(format_lp(lp, f"{self.count}: {title}"))
        self.stream.write("\n")
