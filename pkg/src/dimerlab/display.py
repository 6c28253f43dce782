"""Single display-rule formatter and tabular emitters.

All numeric output of the package funnels through ``display``: values are
computed with at least 30 significant digits and rounded half away from zero
to the requested number of decimal places. Exact rationals are serialized as
"numerator/denominator" strings so that every table cell round-trips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Context, Decimal
from fractions import Fraction

#: Working precision (significant digits) for decimal conversion; the
#: display contract requires at least 30.
WORKING_PRECISION = 36

_CTX = Context(prec=WORKING_PRECISION)


def to_decimal(value: Fraction | int | Decimal) -> Decimal:
    """Convert an exact value to a Decimal at working precision."""
    if isinstance(value, Decimal):
        return value
    if isinstance(value, int):
        return Decimal(value)
    return _CTX.divide(Decimal(value.numerator), Decimal(value.denominator))


def round_display(value: Fraction | int | Decimal, places: int = 4) -> Decimal:
    """Round to ``places`` decimals, halves away from zero."""
    quantum = Decimal(1).scaleb(-places)
    # Decimal is sign-magnitude, so ROUND_HALF_UP rounds halves away from zero.
    return to_decimal(value).quantize(quantum, rounding=ROUND_HALF_UP)


def display(value: Fraction | int | Decimal, places: int = 4) -> str:
    """Format a value under the display rule, e.g. ``0.2992`` or ``-0.0087``."""
    return str(round_display(value, places))


def frac_str(value: Fraction | int) -> str:
    """Canonical exact-fraction string, denominator always present."""
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


def parse_frac(text: str) -> Fraction:
    """Parse a "num/den" string (or a bare integer) into a Fraction."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


@dataclass
class SeriesTable:
    """A labelled table of display-ready cells with TSV and JSON emitters."""

    name: str
    columns: list[str]
    rows: list[list[str]]

    def to_tsv(self) -> str:
        lines = ["\t".join(self.columns)]
        lines.extend("\t".join(row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {"name": self.name, "columns": self.columns, "rows": self.rows},
            indent=2,
        ) + "\n"

    def render(self, fmt: str = "tsv") -> str:
        if fmt == "tsv":
            return self.to_tsv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown table format: {fmt!r}")
