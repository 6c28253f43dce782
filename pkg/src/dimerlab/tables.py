"""Reference tables and approximant sequences for the entropy expansion.

``jbar`` holds the exact per-site coefficient table for d = 1, 2, 3 and
i = 1..6; ``jbar_general`` evaluates the closed general-dimension formulas
(polynomials in 1/d) that must reproduce the table entry for entry. The
``a_series`` approximants are partial sums of the 1/d expansion

    A_r = (1/2) ln(2d) - 1/2 + sum_{i<=r} c_i / d^i

with the three known expansion coefficients; ``b_reference`` carries the
published second approximation sequence as stored data (its defining
substitution lives outside this package, so it is data, not a computation).

``diagnostics`` assembles convergence indicators: first differences of both
sequences, signed errors against the exact 2-d constant, and the transferred
3-d estimates B_r(3) - (B_r(2) - lambda_2) checked against the proven 3-d
bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Context, Decimal
from fractions import Fraction

from .display import (
    SeriesTable,
    WORKING_PRECISION,
    display,
    frac_str,
    round_display,
    to_decimal,
)
from .oracles import (
    LAMBDA3_LOWER,
    LAMBDA3_UPPER,
    lambda2_constant,
    lambda3_bounds_check,
)

_F = Fraction

#: Exact table entries, keyed by (d, i).
JBAR: dict[tuple[int, int], Fraction] = {
    (1, 1): _F(0),
    (1, 2): _F(1, 8),
    (1, 3): _F(1, 12),
    (1, 4): _F(-3, 64),
    (1, 5): _F(-13, 80),
    (1, 6): _F(-19, 192),
    (2, 1): _F(0),
    (2, 2): _F(1, 16),
    (2, 3): _F(1, 48),
    (2, 4): _F(-9, 512),
    (2, 5): _F(-23, 1280),
    (2, 6): _F(25, 3072),
    (3, 1): _F(0),
    (3, 2): _F(1, 24),
    (3, 3): _F(1, 108),
    (3, 4): _F(-5, 576),
    (3, 5): _F(-11, 2160),
    (3, 6): _F(175, 46656),
}

#: General-dimension formulas: i -> ((power of 1/d, coefficient), ...).
JBAR_GENERAL: dict[int, tuple[tuple[int, Fraction], ...]] = {
    1: (),
    2: ((1, _F(1, 8)),),
    3: ((2, _F(1, 12)),),
    4: ((2, _F(-3, 32)), (3, _F(3, 64))),
    5: ((3, _F(-1, 8)), (4, _F(-3, 80))),
    6: ((3, _F(7, 48)), (4, _F(-5, 64)), (5, _F(-1, 6))),
}

#: 1/d expansion coefficients beyond the leading logarithm.
ASYMPTOTIC_COEFFICIENTS: dict[int, Fraction] = {
    1: _F(1, 8),
    2: _F(5, 96),
    3: _F(5, 64),
}

#: Stored second-sequence approximants, keyed by (d, r), as printed values.
B_REFERENCE: dict[tuple[int, int], Decimal] = {
    (2, 0): Decimal("0.1931"),
    (2, 1): Decimal("0.2556"),
    (2, 2): Decimal("0.2921"),
    (2, 3): Decimal("0.2992"),
    (2, 4): Decimal("0.2905"),
    (2, 5): Decimal("0.2814"),
    (3, 0): Decimal("0.3959"),
    (3, 1): Decimal("0.4375"),
    (3, 2): Decimal("0.4538"),
    (3, 3): Decimal("0.4524"),
    (3, 4): Decimal("0.4468"),
    (3, 5): Decimal("0.4445"),
}

MAX_A_ORDER = 3
MAX_B_ORDER = 5


def jbar(d: int, i: int) -> Fraction:
    """Exact table value for d in {1,2,3}, i in 1..6."""
    if (d, i) not in JBAR:
        raise ValueError(f"jbar is tabulated for d in 1..3, i in 1..6; got ({d}, {i})")
    return JBAR[(d, i)]


def jbar_general(i: int, d: int) -> Fraction:
    """Evaluate the general-dimension formula for i in 1..6 at any d >= 1."""
    if i not in JBAR_GENERAL:
        raise ValueError(f"general formulas cover i in 1..6; got {i}")
    if d < 1:
        raise ValueError(f"d must be at least 1; got {d}")
    return sum(
        (coeff / _F(d) ** power for power, coeff in JBAR_GENERAL[i]),
        start=_F(0),
    )


@dataclass(frozen=True)
class AValue:
    """One first-sequence approximant with its exact rational tail."""

    d: int
    r: int
    tail: Fraction  # sum of c_i / d^i for i <= r
    value: Decimal  # working-precision value
    display: str  # 4-decimal form


def a_series(d: int, r: int) -> AValue:
    """A_r(d) = (1/2) ln(2d) - 1/2 + sum_{i<=r} c_i/d^i."""
    if d < 1:
        raise ValueError(f"d must be at least 1; got {d}")
    if not 0 <= r <= MAX_A_ORDER:
        raise ValueError(
            f"no expansion coefficient beyond order {MAX_A_ORDER}; got r={r}"
        )
    tail = sum(
        (ASYMPTOTIC_COEFFICIENTS[i] / _F(d) ** i for i in range(1, r + 1)),
        start=_F(0),
    )
    ctx = Context(prec=WORKING_PRECISION)
    value = ctx.divide(ctx.ln(Decimal(2 * d)), Decimal(2))
    value = ctx.add(value, Decimal("-0.5"))
    value = ctx.add(value, to_decimal(tail))
    return AValue(d=d, r=r, tail=tail, value=value, display=display(value))


def b_reference(d: int, r: int) -> Decimal:
    """Stored second-sequence value for d in {2,3}, r in 0..5."""
    if (d, r) not in B_REFERENCE:
        raise ValueError(
            f"b_reference is stored for d in {{2,3}}, r in 0..5; got ({d}, {r})"
        )
    return B_REFERENCE[(d, r)]


@dataclass(frozen=True)
class LambdaConstants:
    lambda2: Decimal
    lambda3_lower: Fraction
    lambda3_upper: Fraction


def lambda_constants() -> LambdaConstants:
    return LambdaConstants(
        lambda2=lambda2_constant(),
        lambda3_lower=LAMBDA3_LOWER,
        lambda3_upper=LAMBDA3_UPPER,
    )


@dataclass(frozen=True)
class TransferredEstimate:
    r: int
    value: Decimal
    in_bounds: bool


@dataclass
class DiagnosticsReport:
    """Convergence indicators for the two approximation sequences."""

    d: int
    a_values: list[AValue]
    b_values: list[Decimal]
    a_differences: list[Decimal]
    b_differences: list[Decimal]
    a_errors: list[Decimal] | None  # vs lambda_2, d=2 only
    b_errors: list[Decimal] | None
    b_max_r: int
    b_decreasing_after_max: bool
    transferred: list[TransferredEstimate]
    a3_d3_display: str
    a3_d3_in_bounds: bool

    def as_table(self) -> SeriesTable:
        rows: list[list[str]] = []
        for av in self.a_values:
            rows.append(["a", str(av.r), av.display, frac_str(av.tail)])
        for r, bv in enumerate(self.b_values):
            rows.append(["b", str(r), str(bv), ""])
        for r, diff in enumerate(self.a_differences, start=1):
            rows.append(["a-diff", str(r), str(diff), ""])
        for r, diff in enumerate(self.b_differences, start=1):
            rows.append(["b-diff", str(r), str(diff), ""])
        if self.a_errors is not None:
            for r, err in enumerate(self.a_errors):
                rows.append(["a-error", str(r), str(err), "vs exact 2d constant"])
        if self.b_errors is not None:
            for r, err in enumerate(self.b_errors):
                rows.append(["b-error", str(r), str(err), "vs exact 2d constant"])
        rows.append(["b-max", str(self.b_max_r), str(self.b_values[self.b_max_r]),
                     "decreasing after" if self.b_decreasing_after_max else "NOT decreasing after"])
        for est in self.transferred:
            rows.append([
                "transfer",
                str(est.r),
                display(est.value),
                "within 3d bounds" if est.in_bounds else "OUTSIDE 3d bounds",
            ])
        rows.append([
            "a3-bounds",
            "3",
            self.a3_d3_display,
            "within 3d bounds" if self.a3_d3_in_bounds else "OUTSIDE 3d bounds",
        ])
        return SeriesTable(
            name=f"diagnostics-d{self.d}",
            columns=["series", "r", "value", "note"],
            rows=rows,
        )


def diagnostics(d: int) -> DiagnosticsReport:
    """Difference, error, and bounds diagnostics for d in {2, 3}."""
    if d not in (2, 3):
        raise ValueError(f"diagnostics cover d in {{2,3}}; got {d}")
    lam2 = lambda2_constant()
    a_vals = [a_series(d, r) for r in range(MAX_A_ORDER + 1)]
    b_vals = [b_reference(d, r) for r in range(MAX_B_ORDER + 1)]
    a_diffs = [
        round_display(a_vals[r].value - a_vals[r - 1].value)
        for r in range(1, MAX_A_ORDER + 1)
    ]
    b_diffs = [b_vals[r] - b_vals[r - 1] for r in range(1, MAX_B_ORDER + 1)]
    if d == 2:
        a_errors = [round_display(av.value - lam2) for av in a_vals]
        b_errors = [round_display(bv - lam2) for bv in b_vals]
    else:
        a_errors = None
        b_errors = None
    b_max_r = max(range(len(b_vals)), key=lambda r: b_vals[r])
    decreasing = all(
        b_vals[r] < b_vals[r - 1] for r in range(b_max_r + 1, len(b_vals))
    )
    transferred = []
    for r in range(MAX_B_ORDER + 1):
        est = b_reference(3, r) - (b_reference(2, r) - lam2)
        transferred.append(
            TransferredEstimate(r=r, value=est, in_bounds=lambda3_bounds_check(est))
        )
    a3 = a_series(3, MAX_A_ORDER)
    return DiagnosticsReport(
        d=d,
        a_values=a_vals,
        b_values=b_vals,
        a_differences=a_diffs,
        b_differences=b_diffs,
        a_errors=a_errors,
        b_errors=b_errors,
        b_max_r=b_max_r,
        b_decreasing_after_max=decreasing,
        transferred=transferred,
        a3_d3_display=a3.display,
        a3_d3_in_bounds=lambda3_bounds_check(Decimal(a3.display)),
    )


# ---------------------------------------------------------------------------
# table emitters
# ---------------------------------------------------------------------------

def jbar_table() -> SeriesTable:
    rows = [
        [str(d), str(i), frac_str(JBAR[(d, i)]), display(JBAR[(d, i)], places=10)]
        for d in (1, 2, 3)
        for i in range(1, 7)
    ]
    return SeriesTable(
        name="jbar",
        columns=["d", "i", "value_exact", "value_decimal"],
        rows=rows,
    )


def jbar_general_table(d: int) -> SeriesTable:
    rows = [
        [
            str(d),
            str(i),
            frac_str(jbar_general(i, d)),
            display(jbar_general(i, d), places=10),
        ]
        for i in range(1, 7)
    ]
    return SeriesTable(
        name="jbar-general",
        columns=["d", "i", "value_exact", "value_decimal"],
        rows=rows,
    )


def a_series_table(d: int) -> SeriesTable:
    rows = []
    for r in range(MAX_A_ORDER + 1):
        av = a_series(d, r)
        rows.append([str(d), str(r), av.display, frac_str(av.tail)])
    return SeriesTable(
        name="a-series",
        columns=["d", "r", "value", "rational_tail"],
        rows=rows,
    )


def b_reference_table(d: int) -> SeriesTable:
    if d not in (2, 3):
        raise ValueError(f"b_reference is stored for d in {{2,3}}; got {d}")
    rows = [
        [str(d), str(r), str(b_reference(d, r))] for r in range(MAX_B_ORDER + 1)
    ]
    return SeriesTable(name="b-reference", columns=["d", "r", "value"], rows=rows)
