"""Decide the commutative / algebraic / maximal family properties, with witnesses.

Every failing check reports the smallest violating tuple in canonical order
(cardinality, then mask value), so verdicts and witnesses are deterministic
and independent of how the scans are partitioned across workers.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import EmptyFamily, EvenMemberPresent, GroundTooLargeForEnumeration, WrongCardinality
from .setcore import (
    MATERIALIZE_MAX_N,
    SetFamily,
    SubsetMask,
    canonical_sort,
    full_mask,
    pair_masks,
    popcount_array,
    subset_array,
)


class ViolationKind(enum.Enum):
    DISJOINT_PAIR = "DisjointPair"
    MISSING_ALGEBRAIC_UNION = "MissingAlgebraicUnion"
    MAXIMALITY_WITNESS_MISSING = "MaximalityWitnessMissingFailed"
    WRONG_CARDINALITY = "WrongCardinality"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    subjects: tuple[SubsetMask, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "subjects": [s.indices for s in self.subjects]}


@dataclass(frozen=True)
class Check:
    ok: bool
    violation: Violation | None = None

    def __bool__(self) -> bool:
        return self.ok


def _workers(threads: int | None) -> int:
    return max(1, threads or os.cpu_count() or 1)


def _require_nonempty(F: SetFamily) -> None:
    if not len(F):
        raise EmptyFamily("property checks need a nonempty family")


def _require_odd(F: SetFamily) -> None:
    cards = F.cardinalities()
    even = np.flatnonzero(cards % 2 == 0)
    if even.size:
        raise EvenMemberPresent(f"member {F[int(even[0])]} has even cardinality")


def _first_disjoint_in_rows(masks: np.ndarray, reach: np.ndarray, start: int, stop: int):
    for i in range(start, stop):
        end = reach[i]
        if end <= i + 1:
            continue
        hits = np.flatnonzero((masks[i + 1:end] & masks[i]) == 0)
        if hits.size:
            return i, i + 1 + int(hits[0])
    return None


def first_disjoint_pair(F: SetFamily, threads: int | None = None) -> tuple[int, int] | None:
    """Index pair ``(i, j)``, ``i < j``, of the canonically first disjoint pair in ``F``.

    Pairs with ``|A| + |B| > n`` are skipped: they always meet.
    """
    masks = F.masks
    cards = F.cardinalities()
    # members are sorted by cardinality, so the partners worth testing form a prefix
    reach = np.searchsorted(cards, F.n - cards, side="right")
    size = masks.size
    workers = _workers(threads)
    bounds = np.linspace(0, size, workers * 4 + 1).astype(int)
    spans = [(int(s), int(e)) for s, e in zip(bounds[:-1], bounds[1:]) if e > s]
    if workers == 1:
        for s, e in spans:
            hit = _first_disjoint_in_rows(masks, reach, s, e)
            if hit is not None:
                return hit
        return None
    with ThreadPoolExecutor(workers) as pool:
        hits = [h for h in pool.map(lambda se: _first_disjoint_in_rows(masks, reach, *se), spans) if h]
    return min(hits) if hits else None


def is_commutative_system(F: SetFamily, threads: int | None = None) -> Check:
    _require_nonempty(F)
    _require_odd(F)
    hit = first_disjoint_pair(F, threads)
    if hit is None:
        return Check(True)
    return Check(False, Violation(ViolationKind.DISJOINT_PAIR, (F[hit[0]], F[hit[1]])))


def is_algebraic_system(F: SetFamily) -> Check:
    """Closure under union with every disjoint 2-subset.

    An even set is a disjoint union of 2-subsets, so this is equivalent to
    closure under union with every disjoint even set.
    """
    _require_nonempty(F)
    _require_odd(F)
    pairs = pair_masks(F.n)
    masks = F.masks
    step = 4096
    for start in range(0, masks.size, step):
        block = masks[start:start + step, None]
        free = (block & pairs[None, :]) == 0
        unions = block | pairs[None, :]
        missing = free & ~F.contains_many(unions)
        if missing.any():
            r, c = np.argwhere(missing)[0]
            n = F.n
            s, p = int(block[r, 0]), int(pairs[c])
            subjects = (SubsetMask(s, n), SubsetMask(p, n), SubsetMask(s | p, n))
            return Check(False, Violation(ViolationKind.MISSING_ALGEBRAIC_UNION, subjects))
    return Check(True)


def downset_table(masks: np.ndarray, n: int) -> np.ndarray:
    """``table[X]`` is true iff some given mask is a subset of ``X``."""
    table = np.zeros(1 << n, dtype=bool)
    table[masks.astype(np.int64)] = True
    for b in range(n):
        view = table.reshape(-1, 2, 1 << b)
        view[:, 1, :] |= view[:, 0, :]
    return table


def _uncovered(F: SetFamily, candidates: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Candidates outside ``F`` with no member of ``F`` inside their complement."""
    if candidates.size == 0:
        return candidates
    comp = (np.uint64(full_mask(F.n)) ^ candidates).astype(np.int64)
    bad = ~table[comp] & ~F.contains_many(candidates)
    return candidates[bad]


def is_maximal_system(F: SetFamily) -> Check:
    """Every odd subset outside ``F`` must miss some member of ``F``.

    The scan uses a subset-closure table over all 2**n masks, so the cost is
    independent of how many members each odd set must be compared with.
    """
    if F.n > MATERIALIZE_MAX_N:
        raise GroundTooLargeForEnumeration(f"maximality scan capped at n={MATERIALIZE_MAX_N}")
    table = downset_table(F.masks, F.n)
    every = np.arange(1 << F.n, dtype=np.uint32)
    odd = every[np.bitwise_count(every) & 1 == 1].astype(np.uint64)
    bad = _uncovered(F, odd, table)
    if bad.size == 0:
        return Check(True)
    first = int(canonical_sort(bad)[0])
    return Check(False, Violation(ViolationKind.MAXIMALITY_WITNESS_MISSING, (SubsetMask(first, F.n),)))


def disjoint_partner(F: SetFamily, S: SubsetMask) -> SubsetMask | None:
    """Canonically first member of ``F`` disjoint from ``S``."""
    hits = np.flatnonzero((F.masks & np.uint64(S.bits)) == 0)
    return F[int(hits[0])] if hits.size else None


def is_bicommutative(F: SetFamily, s: int, within: SubsetMask | None = None,
                     threads: int | None = None) -> Check:
    """Pairwise intersecting ``s``-sets, maximal among ``s``-subsets of ``within`` (default [n])."""
    cards = F.cardinalities()
    wrong = np.flatnonzero(cards != s)
    if wrong.size:
        raise WrongCardinality(f"member {F[int(wrong[0])]} does not have cardinality {s}")
    ground = full_mask(F.n) if within is None else within.bits
    outside = np.flatnonzero(F.masks & ~np.uint64(ground))
    if outside.size:
        raise WrongCardinality(f"member {F[int(outside[0])]} leaves the ground window")
    _require_nonempty(F)
    hit = first_disjoint_pair(F, threads)
    if hit is not None:
        return Check(False, Violation(ViolationKind.DISJOINT_PAIR, (F[hit[0]], F[hit[1]])))
    candidates = subset_array(F.n, s, within=None if within is None else ground)
    if F.n <= MATERIALIZE_MAX_N:
        table = downset_table(F.masks, F.n)
        bad = _uncovered(F, candidates, table)
    else:
        missing = candidates[~F.contains_many(candidates)]
        bad = np.array([c for c in missing if not np.any((F.masks & c) == 0)], dtype=np.uint64)
    if bad.size == 0:
        return Check(True)
    first = int(canonical_sort(bad)[0])
    return Check(False, Violation(ViolationKind.MAXIMALITY_WITNESS_MISSING, (SubsetMask(first, F.n),)))


@dataclass
class MacsReport:
    n: int
    size: int
    commutative: bool
    algebraic: bool
    maximal: bool
    witnesses: dict[str, Violation] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.commutative and self.algebraic and self.maximal

    @property
    def dimension(self) -> int:
        return 2 ** (self.n - 1) + self.size

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "size": self.size,
            "commutative": self.commutative,
            "algebraic": self.algebraic,
            "maximal": self.maximal,
            "dimension": self.dimension,
            "witnesses": {k: v.to_dict() for k, v in sorted(self.witnesses.items())},
        }


def verify_macs(F: SetFamily, threads: int | None = None) -> MacsReport:
    """Run the three checks; a passing family spans a maximal commutative subalgebra."""
    checks = {
        "commutative": is_commutative_system(F, threads),
        "algebraic": is_algebraic_system(F),
        "maximal": is_maximal_system(F),
    }
    return MacsReport(
        n=F.n,
        size=len(F),
        witnesses={k: c.violation for k, c in checks.items() if c.violation is not None},
        **{k: c.ok for k, c in checks.items()},
    )
