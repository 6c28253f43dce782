"""Independent exact references: matching counts, the 2-d entropy constant,
monomer-dimer pressure series, and 3-d entropy bounds.

Everything here is meant to be trustworthy on its own terms so it can serve
as an oracle for the enumeration pipeline: counts are exact integers from
dynamic programming over column profiles (no Pfaffians, no floats), the
entropy constant comes from classical series with explicit remainder
bounds, and the pressure oracles are finite-lattice computations on windows
large enough that no cluster of the requested order can wrap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from functools import lru_cache
from math import comb, isqrt
from typing import Iterable, Sequence

from .errors import CapExceededError

#: Maximum profile width for the matching-count DPs (2^width states).
DEFAULT_WIDTH_CAP = 14

LAMBDA3_LOWER = Fraction(440075, 1_000_000)
LAMBDA3_UPPER = Fraction(457547, 1_000_000)


@dataclass(frozen=True)
class MatchingCount:
    """Exact perfect-matching count of a finite rectangular lattice."""

    geometry: str  # "open" or "torus"
    dims: tuple[int, int]
    count: int


# ---------------------------------------------------------------------------
# column-profile DP (primary counting method)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _vertical_fill_ways(m: int, cyclic: bool) -> tuple[int, ...]:
    """ways[mask] = tilings of the masked cells of a height-m column by
    vertical dominoes (0, 1, or 2; 2 only for the full even cycle)."""
    full = (1 << m) - 1
    ways = [0] * (full + 1)
    for mask in range(full + 1):
        if mask == 0:
            ways[0] = 1
            continue
        if cyclic:
            if mask == full:
                ways[mask] = 2 if m % 2 == 0 else 0
                continue
            cut = next(i for i in range(m) if not (mask >> i) & 1)
            run = 0
            ok = True
            for step in range(1, m + 1):
                i = (cut + step) % m
                if (mask >> i) & 1:
                    run += 1
                elif run % 2:
                    ok = False
                    break
                else:
                    run = 0
            ways[mask] = 1 if ok else 0
        else:
            run = 0
            ok = True
            for i in range(m):
                if (mask >> i) & 1:
                    run += 1
                elif run % 2:
                    ok = False
                    break
                else:
                    run = 0
            ways[mask] = 1 if ok and run % 2 == 0 else 0
    return tuple(ways)


@lru_cache(maxsize=4)
def _column_transitions(m: int, cyclic: bool) -> tuple[tuple[tuple[int, int], ...], ...]:
    """For each incoming-horizontal mask, the compatible (out, ways) pairs."""
    full = (1 << m) - 1
    ways = _vertical_fill_ways(m, cyclic)
    table = []
    for a in range(full + 1):
        comp = full ^ a
        pairs = []
        sub = comp
        while True:
            w = ways[comp ^ sub]
            if w:
                pairs.append((sub, w))
            if sub == 0:
                break
            sub = (sub - 1) & comp
        table.append(tuple(pairs))
    return tuple(table)


def _dp_pass(vec: dict[int, int], trans, n: int) -> dict[int, int]:
    for _ in range(n):
        new: dict[int, int] = {}
        for a, c in vec.items():
            for b, w in trans[a]:
                acc = new.get(b)
                new[b] = c * w if acc is None else acc + c * w
        vec = new
    return vec


def _rotate_mask(mask: int, m: int, k: int) -> int:
    full = (1 << m) - 1
    k %= m
    return ((mask << k) | (mask >> (m - k))) & full


def _reflect_mask(mask: int, m: int) -> int:
    out = 0
    for i in range(m):
        if (mask >> i) & 1:
            out |= 1 << (m - 1 - i)
    return out


def _seam_orbits(m: int) -> list[tuple[int, int]]:
    """Representatives and orbit sizes of masks under the column's dihedral
    symmetries (which fix the trace contribution of each seam)."""
    seen = [False] * (1 << m)
    orbits = []
    for a in range(1 << m):
        if seen[a]:
            continue
        orbit = set()
        for k in range(m):
            r = _rotate_mask(a, m, k)
            orbit.add(r)
            orbit.add(_reflect_mask(r, m))
        for b in orbit:
            seen[b] = True
        orbits.append((a, len(orbit)))
    return orbits


def count_matchings_2d(
    geometry: str, m: int, n: int, width_cap: int = DEFAULT_WIDTH_CAP
) -> MatchingCount:
    """Exact perfect-matching count of an m x n open grid or torus.

    Column-profile dynamic programming: the state between columns is the set
    of horizontal dimers crossing the cut, and a column step enumerates the
    vertical-domino fillings of the remaining cells. Open grids run a single
    pass from the empty profile; tori sum the closed-loop passes over seam
    profiles (grouped by the column symmetries) with cyclic columns.
    """
    if geometry not in ("open", "torus"):
        raise ValueError(f"unknown geometry {geometry!r}")
    if m < 1 or n < 1:
        raise ValueError("dimensions must be positive")
    dims = (m, n)
    if m > n:
        m, n = n, m
    if m > width_cap:
        raise CapExceededError(
            f"profile width {m} exceeds width cap {width_cap}"
        )
    if (m * n) % 2:
        return MatchingCount(geometry, dims, 0)
    if geometry == "open":
        trans = _column_transitions(m, cyclic=False)
        vec = _dp_pass({0: 1}, trans, n)
        return MatchingCount(geometry, dims, vec.get(0, 0))
    if m < 3 or n < 3:
        raise ValueError("torus counting requires both sides >= 3")
    trans = _column_transitions(m, cyclic=True)
    total = 0
    for seam, orbit_size in _seam_orbits(m):
        vec = _dp_pass({seam: 1}, trans, n)
        total += orbit_size * vec.get(seam, 0)
    return MatchingCount(geometry, dims, total)


def count_matchings_2d_scanline(m: int, n: int, width_cap: int = DEFAULT_WIDTH_CAP) -> MatchingCount:
    """Independent method for open grids: cell-by-cell broken-profile DP.

    Sweeps cells row by row carrying a coverage frontier; shares nothing
    with the column-transition method beyond the grid itself.
    """
    dims = (m, n)
    if m < n:
        m, n = n, m  # n becomes the frontier width
    if n > width_cap:
        raise CapExceededError(f"profile width {n} exceeds width cap {width_cap}")
    if (m * n) % 2:
        return MatchingCount("open", dims, 0)
    full = (1 << n) - 1
    dp = {full: 1}  # virtual row above the grid is fully covered
    for _ in range(m):
        for c in range(n):
            new: dict[int, int] = {}
            for mask, cnt in dp.items():
                if not (mask >> c) & 1:
                    # cell above is uncovered: forced vertical dimer
                    nm = mask | (1 << c)
                    new[nm] = new.get(nm, 0) + cnt
                    continue
                # leave the current cell open for a later dimer
                nm = mask & ~(1 << c)
                new[nm] = new.get(nm, 0) + cnt
                # or close it with a horizontal dimer to the left
                if c and not (mask >> (c - 1)) & 1:
                    nm = mask | (1 << (c - 1)) | (1 << c)
                    new[nm] = new.get(nm, 0) + cnt
            dp = new
    return MatchingCount("open", dims, dp.get(full, 0))


# ---------------------------------------------------------------------------
# 2-d entropy constant
# ---------------------------------------------------------------------------

_SCALE_DIGITS = 40
_SCALE = 10**_SCALE_DIGITS


def _atan_inv_scaled(x: int) -> int:
    # alternating series, remainder below the first omitted term; each
    # integer division contributes at most one unit of 10^-40
    total = 0
    k = 0
    power = x
    while True:
        term = _SCALE // (power * (2 * k + 1))
        if term == 0:
            break
        total += term if k % 2 == 0 else -term
        k += 1
        power *= x * x
    return total


def _pi_scaled() -> int:
    return 16 * _atan_inv_scaled(5) - 4 * _atan_inv_scaled(239)


def _log_2_plus_sqrt3_scaled() -> int:
    # ln(2+sqrt(3)) = (2/sqrt(3)) * sum_k 1/((2k+1) 3^k); positive series with
    # geometric tail bound 3/(2(2K+3)3^(K+1))
    total = 0
    k = 0
    p3 = 1
    while True:
        term = _SCALE // ((2 * k + 1) * p3)
        if term == 0:
            break
        total += term
        k += 1
        p3 *= 3
    sqrt3 = isqrt(3 * _SCALE * _SCALE)
    return 2 * total * _SCALE // sqrt3


def _central_sum_scaled() -> int:
    # sum_n (n!)^2 / ((2n)! (2n+1)^2); the term ratio is below 1/4 for all n,
    # so the tail is bounded by 4/3 of the first omitted term
    total = 0
    t = _SCALE  # scaled (n!)^2/(2n)!
    n = 0
    while t:
        total += t // ((2 * n + 1) ** 2)
        t = t * (n + 1) // (2 * (2 * n + 1))
        n += 1
    return total


def _catalan_scaled() -> int:
    # G = (pi/8) ln(2+sqrt(3)) + (3/8) sum_n (n!)^2/((2n)!(2n+1)^2)
    return _pi_scaled() * _log_2_plus_sqrt3_scaled() // (8 * _SCALE) + (
        3 * _central_sum_scaled() // 8
    )


def lambda2_constant(places: int = 30) -> Decimal:
    """The exact square-lattice dimer entropy constant, Catalan / pi.

    Every series above carries a proven remainder bound and the integer
    floor divisions contribute at most a few hundred units of 10^-40, so
    the result is correct to well over ``places`` <= 30 decimals.
    """
    if places > 30:
        raise ValueError("at most 30 decimal places are guaranteed")
    value = Decimal(_catalan_scaled() * _SCALE // _pi_scaled()) / Decimal(_SCALE)
    return value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def lambda3_bounds_check(x) -> bool:
    """True iff x lies in the closed interval of proven 3-d entropy bounds."""
    if isinstance(x, float):
        value = Fraction(str(x))
    elif isinstance(x, Decimal):
        value = Fraction(x)
    else:
        value = Fraction(x)
    return LAMBDA3_LOWER <= value <= LAMBDA3_UPPER


# ---------------------------------------------------------------------------
# per-site entropy of finite tori
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyRow:
    size: int
    count: int
    entropy: float
    error: float


@dataclass(frozen=True)
class EntropyTable:
    rows: tuple[EntropyRow, ...]
    reference: float
    monotone: bool

    def final_error(self) -> float:
        return abs(self.rows[-1].error)


def per_site_entropy_2d(sizes: Iterable[int]) -> EntropyTable:
    """ln(count)/(m*n) for square tori, compared against the exact constant."""
    reference = float(lambda2_constant())
    rows = []
    for size in sizes:
        if (size * size) % 2:
            raise ValueError(f"size {size} has an odd number of sites")
        count = count_matchings_2d("torus", size, size).count
        entropy = math.log(count) / (size * size)
        rows.append(EntropyRow(size, count, entropy, entropy - reference))
    errors = [abs(r.error) for r in rows]
    monotone = all(a > b for a, b in zip(errors, errors[1:]))
    return EntropyTable(tuple(rows), reference, monotone)


# ---------------------------------------------------------------------------
# monomer-dimer pressure oracles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PressureOracleSeries:
    d: int
    order: int
    coefficients: dict[int, Fraction]  # s -> coefficient of z^s


def series_log(coeffs: Sequence[Fraction], order: int) -> list[Fraction]:
    """Coefficients 0..order of ln(f) for a power series with f(0) = 1."""
    if coeffs[0] != 1:
        raise ValueError("series must have constant term 1")
    out = [Fraction(0)] * (order + 1)
    for n in range(1, order + 1):
        acc = Fraction(coeffs[n]) if n < len(coeffs) else Fraction(0)
        for k in range(1, n):
            c = coeffs[n - k] if n - k < len(coeffs) else 0
            acc -= Fraction(k, n) * out[k] * c
        out[n] = acc
    return out


def _chain_growth_series(order: int) -> list[Fraction]:
    """Power series of the 1-d monomer-dimer growth rate (1+sqrt(1+4z))/2.

    This is the dominant eigenvalue of the chain recurrence
    Xi_n = Xi_{n-1} + z Xi_{n-2}; its expansion has Catalan-number
    coefficients with alternating signs.
    """
    coeffs = [Fraction(1)]
    catalan = 1
    for k in range(1, order + 1):
        coeffs.append(Fraction((-1) ** (k + 1) * catalan))
        catalan = catalan * 2 * (2 * k - 1) // (k + 1)
    return coeffs


def _path_matching_poly(length: int, kmax: int) -> tuple[int, ...]:
    return tuple(
        comb(length - k, k) if length - k >= k else 0 for k in range(kmax + 1)
    )


def _cycle_matching_poly(length: int, kmax: int) -> tuple[int, ...]:
    out = [1]
    for k in range(1, kmax + 1):
        if length - k >= k:
            out.append(comb(length - k, k) * length // (length - k))
        else:
            out.append(0)
    return tuple(out)


def _poly_mul(a: Sequence[int], b: Sequence[int], kmax: int) -> tuple[int, ...]:
    out = [0] * (kmax + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if i + j > kmax:
                break
            if bj:
                out[i + j] += ai * bj
    return tuple(out)


@lru_cache(maxsize=4)
def _monomer_column_transitions(m: int, kmax: int):
    """Cyclic-column transitions for the monomer-dimer torus polynomial.

    Weight of (in, out) is z^{|out|} times the matching polynomial of the
    free cells (paths, or the full cycle), truncated past z^kmax.
    """
    full = (1 << m) - 1

    def free_poly(mask: int) -> tuple[int, ...]:
        if mask == full:
            return _cycle_matching_poly(m, kmax)
        poly = (1,) + (0,) * kmax
        cut = next(i for i in range(m) if not (mask >> i) & 1)
        run = 0
        for step in range(1, m + 1):
            i = (cut + step) % m
            if (mask >> i) & 1:
                run += 1
            else:
                if run:
                    poly = _poly_mul(poly, _path_matching_poly(run, kmax), kmax)
                run = 0
        return poly

    table = []
    for a in range(full + 1):
        comp = full ^ a
        entries = []
        sub = comp
        while True:
            nb = sub.bit_count()
            if nb <= kmax:
                fp = free_poly(comp ^ sub)
                weight = [0] * (kmax + 1)
                for k in range(kmax + 1 - nb):
                    weight[k + nb] = fp[k]
                if any(weight):
                    entries.append((sub, tuple(weight)))
            if sub == 0:
                break
            sub = (sub - 1) & comp
        table.append(tuple(entries))
    return tuple(table)


def _torus_matching_polynomial(size: int, kmax: int) -> list[int]:
    """Numbers of k-dimer configurations on the size x size torus, k <= kmax."""
    trans = _monomer_column_transitions(size, kmax)
    zero = (0,) * (kmax + 1)
    total = [0] * (kmax + 1)
    for seam, orbit_size in _seam_orbits(size):
        vec = {seam: (1,) + (0,) * kmax}
        for _ in range(size):
            new: dict[int, tuple[int, ...]] = {}
            for a, poly in vec.items():
                for b, w in trans[a]:
                    upd = _poly_mul(poly, w, kmax)
                    prev = new.get(b)
                    if prev is None:
                        new[b] = upd
                    else:
                        new[b] = tuple(x + y for x, y in zip(prev, upd))
            vec = new
        found = vec.get(seam, zero)
        for k in range(kmax + 1):
            total[k] += orbit_size * found[k]
    return total


def monomer_dimer_pressure_oracle(d: int, order: int) -> PressureOracleSeries:
    """Exact activity-series coefficients of the per-site free energy.

    d=1 expands the closed-form chain growth rate; d=2 takes the per-site
    logarithm of the exact monomer-dimer polynomial on a torus wide enough
    (2*order + 2 per axis) that no cluster of the requested order wraps.
    """
    if d == 1:
        if not 1 <= order <= 4:
            raise ValueError("d=1 oracle covers orders 1..4")
        logs = series_log(_chain_growth_series(order), order)
        coeffs = {s: logs[s] for s in range(1, order + 1)}
        return PressureOracleSeries(d=1, order=order, coefficients=coeffs)
    if d == 2:
        if not 1 <= order <= 3:
            raise ValueError("d=2 oracle covers orders 1..3")
        size = 2 * order + 2
        poly = _torus_matching_polynomial(size, order)
        logs = series_log([Fraction(c) for c in poly], order)
        coeffs = {s: logs[s] / (size * size) for s in range(1, order + 1)}
        return PressureOracleSeries(d=2, order=order, coefficients=coeffs)
    raise ValueError("pressure oracle covers d in {1, 2}")
