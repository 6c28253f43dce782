"""Overlap patterns of dimer sequences and their combinatorics.

A sequence of located dimers induces an overlap pattern: for every pair of
positions, whether the tiles are equal (``E``), distinct but intersecting
(``O``), or disjoint (``D``). Patterns keep equality separate from mere
overlap because repeated tiles matter to weight functionals and to ordering
counts; the boolean view (intersecting or not) treats ``E`` as overlapping.

Canonical form is the lexicographically minimal row-major letter matrix over
all simultaneous row/column permutations, letters compared in ASCII order
(``D`` < ``E`` < ``O``). The serialized key joins rows with ``/``, e.g. the
two-position overlap-distinct pattern is ``"EO/OE"``. Keys are a stable
interchange format: cache files depend on them bit for bit.

``ordering_ratio`` converts counts of prefix-connected orderings into counts
of all orderings. It is computed over the s! label permutations rather than
over distinct orderings of the underlying multiset: both the permutation
count and the prefix-connected permutation count overcount distinct
orderings by the same factor (the product of factorials of repeated-tile
class sizes), so the factor cancels in the ratio.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial
from typing import Iterable, NamedTuple, Sequence

from .errors import CapExceededError
from .lattice import Dimer, overlap

EQUAL = "E"
OVERLAP = "O"
DISJOINT = "D"

#: Largest sequence length accepted by canonicalization (guards the s!
#: permutation sweep).
DEFAULT_MAX_PATTERN_SIZE = 8


class OverlapPattern(NamedTuple):
    """Symmetric relation matrix stored as one string row per position."""

    rows: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.rows)

    def rel(self, i: int, j: int) -> str:
        return self.rows[i][j]

    def key(self) -> str:
        return "/".join(self.rows)


class CanonicalPattern(NamedTuple):
    """A pattern in canonical form together with its serialized key."""

    pattern: OverlapPattern
    key: str


def pattern_of(seq: Sequence[Dimer]) -> OverlapPattern:
    """Overlap pattern of a nonempty dimer sequence."""
    if not seq:
        raise ValueError("sequence must be nonempty")
    s = len(seq)
    rows = []
    for i in range(s):
        row = []
        for j in range(s):
            if i == j or seq[i] == seq[j]:
                row.append(EQUAL)
            elif overlap(seq[i], seq[j]):
                row.append(OVERLAP)
            else:
                row.append(DISJOINT)
        rows.append("".join(row))
    return OverlapPattern(tuple(rows))


def validate_pattern(p: OverlapPattern) -> None:
    """Check structural invariants; raises ValueError on violation."""
    s = p.size
    if s < 1:
        raise ValueError("pattern must have at least one position")
    for i, row in enumerate(p.rows):
        if len(row) != s:
            raise ValueError(f"row {i} has length {len(row)}, expected {s}")
        for ch in row:
            if ch not in (EQUAL, OVERLAP, DISJOINT):
                raise ValueError(f"invalid relation character {ch!r}")
    for i in range(s):
        if p.rows[i][i] != EQUAL:
            raise ValueError(f"diagonal entry ({i},{i}) must be {EQUAL}")
        for j in range(i + 1, s):
            if p.rows[i][j] != p.rows[j][i]:
                raise ValueError(f"pattern not symmetric at ({i},{j})")
            if p.rows[i][j] == EQUAL and p.rows[i] != p.rows[j]:
                raise ValueError(
                    f"equal positions {i},{j} have differing rows"
                )


def parse_key(key: str) -> OverlapPattern:
    """Parse and validate a serialized pattern key."""
    p = OverlapPattern(tuple(key.split("/")))
    validate_pattern(p)
    return p


def _matrix_under(rows: tuple[str, ...], perm: tuple[int, ...]) -> tuple[str, ...]:
    return tuple(
        "".join(rows[perm[i]][perm[j]] for j in range(len(perm)))
        for i in range(len(perm))
    )


@lru_cache(maxsize=None)
def _canonical_rows(rows: tuple[str, ...]) -> tuple[str, ...]:
    best = rows
    for perm in permutations(range(len(rows))):
        cand = _matrix_under(rows, perm)
        if cand < best:
            best = cand
    return best


def canonicalize(
    p: OverlapPattern, max_size: int = DEFAULT_MAX_PATTERN_SIZE
) -> CanonicalPattern:
    """Canonical form: minimal matrix over simultaneous permutations."""
    if p.size > max_size:
        raise CapExceededError(
            f"pattern size {p.size} exceeds canonicalization cap {max_size}"
        )
    rows = _canonical_rows(p.rows)
    pattern = OverlapPattern(rows)
    return CanonicalPattern(pattern, pattern.key())


def canonical_key_of(seq: Sequence[Dimer]) -> str:
    """Canonical key of a dimer sequence's overlap pattern."""
    return canonicalize(pattern_of(seq)).key


def _boolean_adjacency(p: OverlapPattern) -> list[int]:
    """Bitmask adjacency of the boolean-overlap graph (E or O, off-diagonal)."""
    s = p.size
    adj = [0] * s
    for i in range(s):
        for j in range(s):
            if i != j and p.rows[i][j] != DISJOINT:
                adj[i] |= 1 << j
    return adj


def is_connected(p: OverlapPattern) -> bool:
    """Connectivity of the boolean-overlap graph on positions.

    A sequence fails to be connected exactly when its positions split into
    two groups with no intersection between any tile of one group and any
    tile of the other; that split exists iff this graph is disconnected.
    """
    s = p.size
    adj = _boolean_adjacency(p)
    seen = 1
    frontier = [0]
    while frontier:
        i = frontier.pop()
        rest = adj[i] & ~seen
        while rest:
            j = (rest & -rest).bit_length() - 1
            seen |= 1 << j
            frontier.append(j)
            rest &= rest - 1
    return seen == (1 << s) - 1


@lru_cache(maxsize=None)
def _prefix_connected_orderings(rows: tuple[str, ...]) -> int:
    """Number of the s! position orderings whose every prefix is connected.

    An ordering is prefix-connected iff each position after the first is
    adjacent (E or O) to some earlier one, so the count satisfies a subset
    recursion over the last element removed.
    """
    p = OverlapPattern(rows)
    adj = _boolean_adjacency(p)
    s = p.size
    full = (1 << s) - 1
    counts = {0: 0}
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            counts[mask] = 1
            continue
        total = 0
        rest = mask
        while rest:
            i = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            others = mask ^ (1 << i)
            if adj[i] & others:
                total += counts[others]
        counts[mask] = total
    return counts[full]


def prefix_connected_orderings(p: OverlapPattern) -> int:
    return _prefix_connected_orderings(p.rows)


def ordering_ratio(p: OverlapPattern) -> Fraction:
    """Ratio of all orderings to prefix-connected orderings, at least 1."""
    if not is_connected(p):
        raise ValueError(
            f"ordering_ratio requires a connected pattern, got {p.key()!r}"
        )
    good = prefix_connected_orderings(p)
    return Fraction(factorial(p.size), good)


def equal_classes(p: OverlapPattern) -> list[list[int]]:
    """Partition of positions into classes of equal tiles."""
    classes: list[list[int]] = []
    assigned = [False] * p.size
    for i in range(p.size):
        if assigned[i]:
            continue
        cls = [j for j in range(p.size) if p.rows[i][j] == EQUAL]
        for j in cls:
            assigned[j] = True
        classes.append(cls)
    return classes


def patterns_from_keys(keys: Iterable[str]) -> list[OverlapPattern]:
    return [parse_key(k) for k in keys]
