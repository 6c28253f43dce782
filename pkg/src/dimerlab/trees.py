"""Enumeration of s-dimer trees anchored at the origin, tallied by pattern.

An s-dimer tree is an ordered sequence of located dimers in which every
prefix is connected (each tile after the first intersects at least one
earlier tile). The first tile is fixed to the axis-0 dimer at the origin;
per-site aggregation later multiplies by d, because the d axis classes of
first tiles map onto the anchored one by hypercubic symmetry without
changing any overlap pattern.

The enumeration is organized as independent tasks, one per fixed-depth
prefix. Task results are plain pattern-count maps merged by addition, so the
outcome is deterministic regardless of worker count or scheduling. Completed
work and the frontier of pending tasks can be persisted to a line-oriented
checkpoint file and resumed later; a resumed run reproduces the
uninterrupted result byte for byte.

An optional reduction quotients the search by the symmetries of the lattice
that fix the anchor dimer (permutations and reflections of the non-anchor
axes, and the mirror exchanging the anchor's endpoints). Orbit
representatives are enumerated with their orbit sizes as multiplicities;
patterns are invariant under these isometries, so reduced tallies equal
unreduced ones exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CapExceededError, CheckpointError
from .lattice import Dimer, anchor_dimer, dimers_overlapping, make_dimer, sites_of
from .patterns import EQUAL, _canonical_rows, canonicalize, parse_key, pattern_of

FORMAT_VERSION = 1
ANCHOR_CONVENTION = "origin-axis0"
FRONTIER_SEPARATOR = "%%frontier"

#: Practical sequence-length limit; lengths past this need new theory and
#: far more compute, not just patience.
DEFAULT_MAX_S = 6


@dataclass
class PatternTally:
    """Counts of anchored s-dimer trees per canonical overlap pattern."""

    d: int
    s: int
    counts: dict[str, int]
    anchor: str = ANCHOR_CONVENTION
    reduction: str = "none"
    complete: bool = True

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass
class EnumerationJob:
    """Parameters of one enumeration run."""

    d: int
    s: int
    threads: int = 1
    checkpoint_interval: float = 60.0
    out: Path | str | None = None
    reduction: str = "none"
    prefix_depth: int | None = None
    stop_after_tasks: int | None = None
    max_s: int = DEFAULT_MAX_S

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if not 1 <= self.s <= self.max_s:
            raise CapExceededError(
                f"s={self.s} outside supported range 1..{self.max_s}"
            )
        if self.reduction not in ("none", "hyperoctahedral"):
            raise ValueError(f"unknown reduction {self.reduction!r}")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


# ---------------------------------------------------------------------------
# anchor-stabilizer symmetries
# ---------------------------------------------------------------------------

# An element is (mirror, perm, signs): optionally reflect the axis-0
# coordinate across the anchor's midpoint (x0 -> 1 - x0), then send source
# axis k (1 <= k < d) to axis perm[k-1] with sign signs[k-1].
SymmetryElement = tuple[bool, tuple[int, ...], tuple[int, ...]]


def anchor_stabilizer(d: int) -> tuple[SymmetryElement, ...]:
    elems = []
    for perm in permutations(range(1, d)):
        for signs in product((1, -1), repeat=d - 1):
            for mirror in (False, True):
                elems.append((mirror, perm, signs))
    return tuple(elems)


def apply_to_site(elem: SymmetryElement, site: tuple[int, ...]) -> tuple[int, ...]:
    mirror, perm, signs = elem
    out = [0] * len(site)
    out[0] = 1 - site[0] if mirror else site[0]
    for k in range(1, len(site)):
        out[perm[k - 1]] = signs[k - 1] * site[k]
    return tuple(out)


def apply_to_dimer(elem: SymmetryElement, t: Dimer) -> Dimer:
    p, q = (apply_to_site(elem, s) for s in sites_of(t))
    if q < p:
        p, q = q, p
    axis = next(i for i in range(len(p)) if p[i] != q[i])
    return Dimer(p, axis)


def _stabilizer_of_prefix(
    group: Sequence[SymmetryElement], prefix: Sequence[Dimer]
) -> tuple[SymmetryElement, ...]:
    return tuple(
        g for g in group if all(apply_to_dimer(g, t) == t for t in prefix)
    )


# ---------------------------------------------------------------------------
# core depth-first enumeration
# ---------------------------------------------------------------------------

_NEIGHBOR_CACHE: dict[Dimer, tuple[Dimer, ...]] = {}


def _neighbors(t: Dimer) -> tuple[Dimer, ...]:
    cached = _NEIGHBOR_CACHE.get(t)
    if cached is None:
        cached = tuple(dimers_overlapping(t))
        _NEIGHBOR_CACHE[t] = cached
    return cached


def _relation(a: Dimer, b: Dimer) -> str:
    if a == b:
        return "E"
    pa, qa = sites_of(a)
    pb, qb = sites_of(b)
    return "O" if (pa == pb or pa == qb or qa == pb or qa == qb) else "D"


def _row_against(c: Dimer, seq: Sequence[Dimer]) -> str:
    return "".join(_relation(c, t) for t in seq)


def _leaf_key(lower_rows: tuple[str, ...]) -> str:
    s = len(lower_rows)
    full = tuple(
        "".join(
            EQUAL if i == j else (lower_rows[i][j] if j < i else lower_rows[j][i])
            for j in range(s)
        )
        for i in range(s)
    )
    return "/".join(_canonical_rows(full))


def _complete_prefix(
    d: int,
    s: int,
    prefix: Sequence[Dimer],
    weight: int,
    reduction: str,
) -> dict[str, int]:
    """Tally all s-trees extending ``prefix`` (weighted by ``weight``)."""
    tally: dict[str, int] = {}
    seq = list(prefix)
    lower = [""]
    for i in range(1, len(seq)):
        lower.append(_row_against(seq[i], seq[:i]))
    if len(seq) == s:
        key = _leaf_key(tuple(lower))
        tally[key] = tally.get(key, 0) + weight
        return tally

    cands: set[Dimer] = set()
    for t in seq:
        cands.update(_neighbors(t))

    reduce_orbits = reduction == "hyperoctahedral"
    stab = (
        _stabilizer_of_prefix(anchor_stabilizer(d), seq) if reduce_orbits else ()
    )

    def rec(cands: set[Dimer], stab: Sequence[SymmetryElement], w: int):
        depth = len(seq)
        at_leaf = depth == s - 1
        if reduce_orbits and len(stab) > 1:
            seen: set[Dimer] = set()
            for c in sorted(cands):
                if c in seen:
                    continue
                orbit = {apply_to_dimer(g, c) for g in stab}
                seen.update(orbit)
                _extend(c, cands, stab, w * len(orbit), at_leaf)
        else:
            trivial = ()
            for c in cands:
                _extend(c, cands, trivial, w, at_leaf)

    def _extend(c, cands, stab, w, at_leaf):
        lower.append(_row_against(c, seq))
        seq.append(c)
        if at_leaf:
            key = _leaf_key(tuple(lower))
            tally[key] = tally.get(key, 0) + w
        else:
            child_stab = (
                tuple(g for g in stab if apply_to_dimer(g, c) == c)
                if stab
                else ()
            )
            rec(cands | set(_neighbors(c)), child_stab, w)
        seq.pop()
        lower.pop()

    rec(cands, stab, weight)
    return tally


# ---------------------------------------------------------------------------
# task partitioning
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Task:
    prefix: tuple[Dimer, ...]
    weight: int


def _generate_tasks(d: int, s: int, depth: int, reduction: str) -> list[Task]:
    """All depth-``depth`` prefixes (orbit representatives when reducing)."""
    anchor = anchor_dimer(d)
    group = anchor_stabilizer(d) if reduction == "hyperoctahedral" else ()
    tasks: list[Task] = []

    def grow(seq: tuple[Dimer, ...], weight: int):
        if len(seq) == depth:
            tasks.append(Task(seq, weight))
            return
        cands: set[Dimer] = set()
        for t in seq:
            cands.update(_neighbors(t))
        if group:
            stab = _stabilizer_of_prefix(group, seq)
            if len(stab) > 1:
                seen: set[Dimer] = set()
                for c in sorted(cands):
                    if c in seen:
                        continue
                    orbit = {apply_to_dimer(g, c) for g in stab}
                    seen.update(orbit)
                    grow(seq + (c,), weight * len(orbit))
                return
        for c in sorted(cands):
            grow(seq + (c,), weight)

    grow((anchor,), 1)
    return tasks


def _auto_prefix_depth(s: int, threads: int) -> int:
    if s <= 2:
        return s
    depth = 2
    if threads >= 8 and s >= 5:
        depth = 3
    return min(depth, s - 1) if s > 1 else 1


def _run_task(payload) -> dict[str, int]:
    d, s, prefix_coords, weight, reduction = payload
    prefix = tuple(Dimer(tuple(entry[:-1]), entry[-1]) for entry in prefix_coords)
    return _complete_prefix(d, s, prefix, weight, reduction)


def _task_payload(task: Task, d: int, s: int, reduction: str):
    coords = tuple(tuple(t.base) + (t.axis,) for t in task.prefix)
    return (d, s, coords, task.weight, reduction)


# ---------------------------------------------------------------------------
# tally / checkpoint files
# ---------------------------------------------------------------------------

def _header_line(tally: PatternTally, status: str) -> str:
    return json.dumps(
        {
            "format_version": FORMAT_VERSION,
            "d": tally.d,
            "s": tally.s,
            "anchor": tally.anchor,
            "status": status,
            "reduction": tally.reduction,
        }
    )


def write_tally_file(
    path: Path | str,
    tally: PatternTally,
    frontier: Sequence[Task] | None = None,
) -> None:
    """Write a tally (complete) or checkpoint (with frontier) atomically.

    Lines are emitted in stream order and never rewritten within one file
    version; each write replaces the file as a whole. The trailing line
    carries a sha256 checksum of everything above it.
    """
    status = "complete" if frontier is None else "checkpoint"
    lines = [_header_line(tally, status)]
    for key in sorted(tally.counts):
        lines.append(f"{key}\t{tally.counts[key]}")
    if frontier is not None:
        lines.append(FRONTIER_SEPARATOR)
        for task in frontier:
            lines.append(
                json.dumps(
                    {
                        "prefix": [
                            list(t.base) + [t.axis] for t in task.prefix
                        ],
                        "weight": task.weight,
                    }
                )
            )
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    body += f"checksum\tsha256:{digest}\n"
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(body)
    os.replace(tmp, path)


def read_tally_file(path: Path | str) -> tuple[PatternTally, list[Task] | None]:
    """Read and validate a tally/checkpoint file.

    Returns the tally and, for checkpoints, the frontier of pending tasks.
    Raises CheckpointError naming the offending field on any mismatch.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise CheckpointError(f"{path}: empty file", field="header")
    if not lines[-1].startswith("checksum\tsha256:"):
        raise CheckpointError(
            f"{path}: missing trailing checksum line", field="checksum"
        )
    stated = lines[-1].split("sha256:", 1)[1].strip()
    body = "\n".join(lines[:-1]) + "\n"
    actual = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if stated != actual:
        raise CheckpointError(
            f"{path}: checksum mismatch (file corrupt)", field="checksum"
        )
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CheckpointError(
            f"{path}: line 1: header is not valid JSON: {exc}", field="header"
        ) from exc
    for fieldname in ("format_version", "d", "s", "anchor", "status", "reduction"):
        if fieldname not in header:
            raise CheckpointError(
                f"{path}: header missing field '{fieldname}'", field=fieldname
            )
    if header["format_version"] != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: field 'format_version' is {header['format_version']}, "
            f"expected {FORMAT_VERSION}",
            field="format_version",
        )
    if header["status"] not in ("complete", "checkpoint"):
        raise CheckpointError(
            f"{path}: field 'status' has invalid value {header['status']!r}",
            field="status",
        )
    if header["anchor"] != ANCHOR_CONVENTION:
        raise CheckpointError(
            f"{path}: field 'anchor' is {header['anchor']!r}, expected "
            f"{ANCHOR_CONVENTION!r}",
            field="anchor",
        )

    counts: dict[str, int] = {}
    frontier: list[Task] | None = None
    section = "counts"
    for lineno, line in enumerate(lines[1:-1], start=2):
        if line == FRONTIER_SEPARATOR:
            if header["status"] != "checkpoint":
                raise CheckpointError(
                    f"{path}:{lineno}: frontier section in a complete file",
                    field="status",
                )
            section = "frontier"
            frontier = []
            continue
        if section == "counts":
            if "\t" not in line:
                raise CheckpointError(
                    f"{path}:{lineno}: field 'count line' is malformed",
                    field="counts",
                )
            key, _, count_text = line.partition("\t")
            try:
                pattern = parse_key(key)
                if canonicalize(pattern).key != key:
                    raise ValueError("key is not in canonical form")
            except ValueError as exc:
                raise CheckpointError(
                    f"{path}:{lineno}: field 'pattern key': {exc}",
                    field="pattern-key",
                ) from exc
            try:
                value = int(count_text)
            except ValueError as exc:
                raise CheckpointError(
                    f"{path}:{lineno}: field 'count': not an integer",
                    field="count",
                ) from exc
            if value < 0:
                raise CheckpointError(
                    f"{path}:{lineno}: field 'count': negative", field="count"
                )
            counts[key] = counts.get(key, 0) + value
        else:
            try:
                entry = json.loads(line)
                prefix = tuple(
                    Dimer(tuple(item[:-1]), item[-1]) for item in entry["prefix"]
                )
                weight = int(entry["weight"])
            except (
                json.JSONDecodeError,
                KeyError,
                TypeError,
                IndexError,
                ValueError,
            ) as exc:
                raise CheckpointError(
                    f"{path}:{lineno}: field 'frontier task': {exc}",
                    field="frontier",
                ) from exc
            frontier.append(Task(prefix, weight))
    if header["status"] == "checkpoint" and frontier is None:
        raise CheckpointError(
            f"{path}: checkpoint file lacks a frontier section",
            field="frontier",
        )
    tally = PatternTally(
        d=header["d"],
        s=header["s"],
        counts=counts,
        anchor=header["anchor"],
        reduction=header["reduction"],
        complete=header["status"] == "complete",
    )
    return tally, frontier


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def _merge(into: dict[str, int], part: dict[str, int]) -> None:
    for key, value in part.items():
        into[key] = into.get(key, 0) + value


def _execute(
    d: int,
    s: int,
    reduction: str,
    tasks: list[Task],
    counts: dict[str, int],
    threads: int,
    checkpoint_interval: float,
    out: Path | None,
    stop_after_tasks: int | None,
) -> PatternTally:
    """Run tasks, merging into ``counts``; checkpoint to ``out`` if set."""
    pending = list(tasks)
    completed = 0
    last_checkpoint = time.monotonic()

    def tally(complete: bool) -> PatternTally:
        return PatternTally(
            d=d, s=s, counts=dict(counts), reduction=reduction, complete=complete
        )

    def maybe_checkpoint(force: bool = False) -> None:
        nonlocal last_checkpoint
        if out is None:
            return
        if force or time.monotonic() - last_checkpoint >= checkpoint_interval:
            write_tally_file(out, tally(False), frontier=pending)
            last_checkpoint = time.monotonic()

    stopped = False
    if threads == 1:
        while pending:
            task = pending[0]
            part = _complete_prefix(d, s, task.prefix, task.weight, reduction)
            _merge(counts, part)
            pending.pop(0)
            completed += 1
            if stop_after_tasks is not None and completed >= stop_after_tasks and pending:
                maybe_checkpoint(force=True)
                stopped = True
                break
            maybe_checkpoint()
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            future_to_task = {
                pool.submit(_run_task, _task_payload(t, d, s, reduction)): t
                for t in pending
            }
            not_done = set(future_to_task)
            while not_done:
                done, not_done = wait(not_done, return_when=FIRST_COMPLETED)
                for fut in done:
                    _merge(counts, fut.result())
                    pending.remove(future_to_task[fut])
                    completed += 1
                if (
                    stop_after_tasks is not None
                    and completed >= stop_after_tasks
                    and pending
                ):
                    for fut in not_done:
                        fut.cancel()
                    maybe_checkpoint(force=True)
                    stopped = True
                    not_done = set()
                else:
                    maybe_checkpoint()

    result = tally(complete=not stopped)
    if out is not None and not stopped:
        write_tally_file(out, result)
    return result


def enumerate_trees(job: EnumerationJob) -> PatternTally:
    """Enumerate all anchored s-dimer trees and tally by canonical pattern."""
    depth = job.prefix_depth or _auto_prefix_depth(job.s, job.threads)
    depth = max(1, min(depth, job.s))
    tasks = _generate_tasks(job.d, job.s, depth, job.reduction)
    counts: dict[str, int] = {}
    out = Path(job.out) if job.out is not None else None
    return _execute(
        job.d,
        job.s,
        job.reduction,
        tasks,
        counts,
        job.threads,
        job.checkpoint_interval,
        out,
        job.stop_after_tasks,
    )


def resume(
    path: Path | str,
    *,
    threads: int = 1,
    checkpoint_interval: float = 60.0,
    stop_after_tasks: int | None = None,
    expect_d: int | None = None,
    expect_s: int | None = None,
    expect_reduction: str | None = None,
) -> PatternTally:
    """Continue an interrupted enumeration from a checkpoint file.

    A complete file is returned unchanged. ``expect_*`` arguments guard
    against resuming into the wrong job.
    """
    path = Path(path)
    tally, frontier = read_tally_file(path)
    for fieldname, expected, actual in (
        ("d", expect_d, tally.d),
        ("s", expect_s, tally.s),
        ("reduction", expect_reduction, tally.reduction),
    ):
        if expected is not None and expected != actual:
            raise CheckpointError(
                f"{path}: field '{fieldname}' is {actual!r}, "
                f"job expects {expected!r}",
                field=fieldname,
            )
    if tally.complete:
        return tally
    return _execute(
        tally.d,
        tally.s,
        tally.reduction,
        list(frontier or []),
        dict(tally.counts),
        threads,
        checkpoint_interval,
        path,
        stop_after_tasks,
    )


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def window_dimers(d: int, window: int) -> list[Dimer]:
    """All dimers whose both endpoints have coordinates within +-window."""
    out = []
    for base in product(range(-window, window + 1), repeat=d):
        for axis in range(d):
            if base[axis] + 1 <= window:
                out.append(Dimer(tuple(base), axis))
    return sorted(out)


def enumerate_trees_bruteforce(d: int, s: int, window: int) -> PatternTally:
    """Independent oracle: filter raw sequences of window dimers.

    Extends sequences by every dimer in the window, keeping those whose
    every prefix is connected (checked from scratch on site sets), and
    tallies full-length sequences by canonical pattern. Usable only at small
    sizes; shares no search logic with `enumerate_trees`.
    """
    if window < 2 * s + 2:
        raise ValueError(
            f"window {window} too small: need at least 2*s+2 = {2 * s + 2}"
        )
    universe = window_dimers(d, window)
    site_sets = {t: frozenset(sites_of(t)) for t in universe}
    anchor = anchor_dimer(d)
    counts: dict[str, int] = {}

    def rec(seq: list[Dimer]):
        if len(seq) == s:
            key = canonicalize(pattern_of(seq)).key
            counts[key] = counts.get(key, 0) + 1
            return
        for c in universe:
            cs = site_sets[c]
            if any(not cs.isdisjoint(site_sets[t]) for t in seq):
                seq.append(c)
                rec(seq)
                seq.pop()

    rec([anchor])
    return PatternTally(d=d, s=s, counts=counts)
