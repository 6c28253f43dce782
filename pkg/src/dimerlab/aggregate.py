"""Conversion of tree tallies into per-site connected-sequence sums.

The quantity assembled here, for sequence length s, weight functional W and
activity a, is

    (1/s!) * [per-site sum over connected ordered s-sequences of a^s W]

where "per-site" counts translation classes of sequences. The enumeration
layer supplies counts of anchored trees (prefix-connected sequences starting
at the fixed anchor dimer) per canonical pattern, and the conversion is

    per-site sum = sum over patterns P of d * tally(P) * ratio(P) * W(P)

with ratio the ordering ratio of the pattern. Why this holds: group
sequences by the translation class of their tile multiset M. Every distinct
prefix-connected ordering of M has exactly one translate whose first tile
sits at the origin, and the d axis classes of first tiles contribute the
factor d, so d * tally counts prefix-connected orderings of the classes. All
orderings of M (the connected-sequence sum wants every ordering, connected
as a whole) exceed the prefix-connected ones by exactly ratio(P): both
ordering counts refer to the s! label permutations, and the repeated-tile
overcount cancels between numerator and denominator. W depends only on the
pattern, so the per-class factor is well defined.

Activity ``f`` is the fixed rational 1/(2d) per tile; ``z`` leaves a formal
unit activity so the values serve as power-series coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping

from .display import SeriesTable, display, frac_str
from .errors import (
    IncompleteTallyError,
    MissingTallyError,
    UndefinedWeightError,
)
from .patterns import is_connected, ordering_ratio, parse_key
from .trees import PatternTally
from .weights import WeightFunctional

ACTIVITY_MODES = ("f", "z")


@dataclass(frozen=True)
class ConnectedSum:
    """One exact per-site connected-sequence sum."""

    d: int
    s: int
    value: Fraction
    weight_name: str
    activity: str


def activity_value(d: int, activity: str) -> Fraction:
    if activity == "f":
        return Fraction(1, 2 * d)
    if activity == "z":
        return Fraction(1)
    raise ValueError(f"unknown activity mode {activity!r}")


def connected_sum(
    tally: PatternTally, w: WeightFunctional, activity: str = "f"
) -> ConnectedSum:
    """Per-site connected-sequence sum for one tally under one weight."""
    if not tally.complete:
        raise IncompleteTallyError(
            f"tally for d={tally.d}, s={tally.s} is a checkpoint, not complete"
        )
    a = activity_value(tally.d, activity)
    acc = Fraction(0)
    missing: list[str] = []
    for key in sorted(tally.counts):
        pattern = parse_key(key)
        if not is_connected(pattern):
            raise ValueError(
                f"tally contains disconnected pattern {key!r}; "
                "tree tallies cannot contain one"
            )
        try:
            weight = w.weight_of_key(key)
        except UndefinedWeightError:
            missing.append(key)
            continue
        acc += tally.counts[key] * ordering_ratio(pattern) * weight
    if missing:
        raise UndefinedWeightError(missing)
    value = Fraction(tally.d) * acc * a**tally.s / factorial(tally.s)
    return ConnectedSum(
        d=tally.d, s=tally.s, value=value, weight_name=w.name, activity=activity
    )


@dataclass
class PressureSeries:
    """Power-series coefficients b_1..b_order of the per-site log."""

    d: int
    weight_name: str
    coefficients: dict[int, Fraction]

    @property
    def order(self) -> int:
        return max(self.coefficients)

    def as_table(self) -> SeriesTable:
        rows = [
            [
                str(self.d),
                str(s),
                self.weight_name,
                "z",
                frac_str(self.coefficients[s]),
                display(self.coefficients[s], places=10),
            ]
            for s in sorted(self.coefficients)
        ]
        return SeriesTable(
            name="pressure-series",
            columns=["d", "s", "weight", "activity", "value_exact", "value_decimal"],
            rows=rows,
        )


def pressure_series(
    d: int,
    max_order: int,
    w: WeightFunctional,
    tallies: Mapping[int, PatternTally],
) -> PressureSeries:
    """Assemble formal-activity coefficients from tallies for s = 1..max_order."""
    coeffs: dict[int, Fraction] = {}
    for s in range(1, max_order + 1):
        tally = tallies.get(s)
        if tally is None:
            raise MissingTallyError(d, s)
        if tally.d != d or tally.s != s:
            raise MissingTallyError(d, s)
        coeffs[s] = connected_sum(tally, w, activity="z").value
    return PressureSeries(d=d, weight_name=w.name, coefficients=coeffs)


def connected_sum_table(sums: list[ConnectedSum]) -> SeriesTable:
    """TSV-ready table of connected sums."""
    rows = [
        [
            str(cs.d),
            str(cs.s),
            cs.weight_name,
            cs.activity,
            frac_str(cs.value),
            display(cs.value, places=10),
        ]
        for cs in sums
    ]
    return SeriesTable(
        name="connected-sums",
        columns=["d", "s", "weight", "activity", "value_exact", "value_decimal"],
        rows=rows,
    )
