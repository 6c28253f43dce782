"""Connected-weight functionals on overlap patterns.

The built-in hard-core Ursell functional assigns each pattern the alternating
sum over connected spanning subgraphs of its incompatibility graph (positions
are incompatible when their tiles are equal or intersect; a tile is
incompatible with itself, so ``E`` pairs carry an edge):

    ursell(p) = sum over connected spanning H of (-1)^{number of edges of H}

The sum is evaluated exactly by a subset recursion: splitting every subgraph
by the connected component of the lowest vertex gives

    C(S) = [S has no internal edges] - sum C(T)

over proper subsets ``T`` of ``S`` that contain the lowest vertex of ``S``
and whose complement S\\T is an independent set. ``C`` of the full vertex set
is the subgraph sum above; it vanishes on disconnected patterns.

User-supplied weights are lookup tables keyed by canonical pattern key with a
configurable miss policy. Evaluators are memoized per canonical pattern; the
memo behaves as one logical map under concurrent use (entries are idempotent).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Literal

from .display import frac_str, parse_frac
from .errors import UndefinedWeightError
from .patterns import (
    OverlapPattern,
    _boolean_adjacency,
    canonicalize,
    parse_key,
)


@lru_cache(maxsize=None)
def _ursell_of_rows(rows: tuple[str, ...]) -> int:
    adj = _boolean_adjacency(OverlapPattern(rows))
    s = len(rows)
    full = (1 << s) - 1

    # has_edge[mask]: does the induced graph on mask contain an edge?
    has_edge = [False] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        has_edge[mask] = has_edge[rest] or bool(adj[i] & rest)

    connected_sum = [0] * (full + 1)
    for mask in range(1, full + 1):
        low = mask & -mask
        acc = 0 if has_edge[mask] else 1
        rest = mask ^ low
        # proper subsets T containing the lowest vertex: T = low | sub
        sub = (rest - 1) & rest
        while True:
            comp = rest ^ sub
            if not has_edge[comp]:
                acc -= connected_sum[low | sub]
            if sub == 0:
                break
            sub = (sub - 1) & rest
        connected_sum[mask] = acc
    return connected_sum[full]


def ursell(p: OverlapPattern) -> Fraction:
    """Hard-core Ursell weight of a pattern (0 when disconnected)."""
    canonical = canonicalize(p)
    return Fraction(_ursell_of_rows(canonical.pattern.rows))


def _ursell_by_key(key: str) -> Fraction:
    return Fraction(_ursell_of_rows(parse_key(key).rows))


@dataclass(frozen=True)
class WeightFunctional:
    """Named rule assigning an exact rational weight to a canonical pattern."""

    name: str
    evaluate_key: Callable[[str], Fraction]
    domain_note: str = "total"

    def weight_of_key(self, key: str) -> Fraction:
        return self.evaluate_key(key)

    def weight(self, p: OverlapPattern) -> Fraction:
        return self.evaluate_key(canonicalize(p).key)


URSELL = WeightFunctional(
    name="ursell",
    evaluate_key=_ursell_by_key,
    domain_note="total (defined on every pattern)",
)

Policy = Literal["error", "zero"]


@dataclass
class WeightTable:
    """Canonical-key lookup table with a policy for missing keys."""

    entries: dict[str, Fraction] = field(default_factory=dict)
    default_policy: Policy = "error"

    def __post_init__(self):
        if self.default_policy not in ("error", "zero"):
            raise ValueError(f"unknown default policy {self.default_policy!r}")
        for key in self.entries:
            canonical = canonicalize(parse_key(key))
            if canonical.key != key:
                raise ValueError(
                    f"table key {key!r} is not in canonical form"
                )

    def lookup(self, key: str) -> Fraction:
        if key in self.entries:
            return self.entries[key]
        if self.default_policy == "zero":
            return Fraction(0)
        raise UndefinedWeightError([key])


def table_weight(tbl: WeightTable, name: str = "table") -> WeightFunctional:
    """Wrap a WeightTable as a functional."""
    note = (
        "partial (policy=error on misses)"
        if tbl.default_policy == "error"
        else "total (missing keys weigh 0)"
    )
    return WeightFunctional(name=name, evaluate_key=tbl.lookup, domain_note=note)


def save_weight_table(tbl: WeightTable, path: str | Path) -> None:
    """Write the line-oriented table format (policy header, key TAB n/d)."""
    lines = [f"default-policy: {tbl.default_policy}"]
    for key in sorted(tbl.entries):
        lines.append(f"{key}\t{frac_str(tbl.entries[key])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_weight_table(path: str | Path) -> WeightTable:
    """Parse a weight-table file; '#' starts a comment line."""
    path = Path(path)
    entries: dict[str, Fraction] = {}
    policy: Policy | None = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("default-policy:"):
            value = line.split(":", 1)[1].strip()
            if value not in ("error", "zero"):
                raise ValueError(
                    f"{path}:{lineno}: field 'default-policy' has "
                    f"invalid value {value!r}"
                )
            policy = value  # type: ignore[assignment]
            continue
        if "\t" not in line:
            raise ValueError(
                f"{path}:{lineno}: field 'entry' is malformed "
                "(expected 'pattern-key<TAB>num/den')"
            )
        key, _, frac_text = line.partition("\t")
        try:
            parse_key(key)
        except ValueError as exc:
            raise ValueError(
                f"{path}:{lineno}: field 'pattern-key': {exc}"
            ) from exc
        try:
            value_frac = parse_frac(frac_text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(
                f"{path}:{lineno}: field 'weight': {exc}"
            ) from exc
        entries[key] = value_frac
    if policy is None:
        raise ValueError(f"{path}: missing 'default-policy' header line")
    return WeightTable(entries=entries, default_policy=policy)
