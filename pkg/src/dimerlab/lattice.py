"""Located dimers on the integer lattice Z^d.

A dimer is a unit edge occupying two adjacent sites. It is stored as
``(base, axis)`` where ``base`` is the lexicographically smaller endpoint and
``axis`` is the coordinate direction of the step to the other endpoint; this
representation is unique, hashable, and totally ordered, which gives all
higher layers deterministic iteration for free. Coordinates are unbounded
signed integers: per-site quantities are translation invariant, so an
infinite lattice with a fixed anchor replaces any finite box.
"""

from __future__ import annotations

from typing import NamedTuple

Site = tuple[int, ...]


class Dimer(NamedTuple):
    """A located dimer: ``base`` plus the unit step along ``axis``."""

    base: Site
    axis: int

    @property
    def dimension(self) -> int:
        return len(self.base)


def make_dimer(base: Site, axis: int) -> Dimer:
    """Validating constructor."""
    d = len(base)
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if not 0 <= axis < d:
        raise ValueError(f"axis {axis} out of range for dimension {d}")
    if not all(isinstance(c, int) for c in base):
        raise ValueError("site coordinates must be integers")
    return Dimer(tuple(base), axis)


def sites_of(t: Dimer) -> tuple[Site, Site]:
    """The two occupied sites, in lexicographic order."""
    other = tuple(
        c + 1 if i == t.axis else c for i, c in enumerate(t.base)
    )
    return t.base, other


def overlap(a: Dimer, b: Dimer) -> bool:
    """True iff the two dimers share at least one site (equality counts)."""
    if len(a.base) != len(b.base):
        raise ValueError(
            f"dimension mismatch: {len(a.base)} vs {len(b.base)}"
        )
    if a == b:
        return True
    sa = sites_of(a)
    sb = sites_of(b)
    return sa[0] in sb or sa[1] in sb


def dimers_at(site: Site) -> list[Dimer]:
    """All 2d dimers incident to a site."""
    d = len(site)
    out = []
    for axis in range(d):
        out.append(Dimer(site, axis))
        lowered = tuple(
            c - 1 if i == axis else c for i, c in enumerate(site)
        )
        out.append(Dimer(lowered, axis))
    return out


def dimers_overlapping(t: Dimer) -> list[Dimer]:
    """All dimers sharing at least one site with ``t``, sorted.

    The result has exactly 4d - 1 elements: t itself plus 2(2d - 1)
    distinct neighbors.
    """
    found = set()
    for site in sites_of(t):
        found.update(dimers_at(site))
    return sorted(found)


def translate(t: Dimer, shift: Site) -> Dimer:
    """Translate a dimer by an integer vector."""
    if len(shift) != len(t.base):
        raise ValueError("shift dimension mismatch")
    return Dimer(tuple(c + v for c, v in zip(t.base, shift)), t.axis)


def anchor_dimer(d: int, axis: int = 0) -> Dimer:
    """The axis-aligned dimer at the origin used to fix translations."""
    return make_dimer(tuple(0 for _ in range(d)), axis)
