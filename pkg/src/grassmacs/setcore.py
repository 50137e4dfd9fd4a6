"""Word-level subset algebra over [n] and the family operators join-one and cone.

A subset of [n] is a machine word: element ``i`` (1-based, as printed) lives at
bit ``i - 1``.  Families keep their members in a read-only ``uint64`` array,
sorted canonically by (cardinality, numeric mask value).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Union

import numpy as np

from .errors import (
    DuplicateIndex,
    EmptyFamily,
    GroundMismatch,
    GroundTooLargeForEnumeration,
    IndexOutOfRange,
    InvalidParams,
    SizeOutOfRange,
)

WORD_BITS = 63
MATERIALIZE_MAX_N = 24
_ROW_CHUNK = 4096


def popcount(x: int) -> int:
    return x.bit_count()


def popcount_array(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(masks).astype(np.int64)


def full_mask(n: int) -> int:
    return (1 << n) - 1


def bits_to_indices(bits: int) -> list[int]:
    out = []
    i = 1
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out


def _check_ground(n: int) -> None:
    if not 2 <= n <= WORD_BITS:
        raise InvalidParams(f"ground size must lie in [2, {WORD_BITS}], got {n}")


@dataclass(frozen=True, order=False)
class SubsetMask:
    """A subset of [n] stored as a bit word."""

    bits: int
    n: int

    def __post_init__(self) -> None:
        _check_ground(self.n)
        if self.bits < 0 or self.bits >> self.n:
            raise IndexOutOfRange(f"mask {self.bits:#x} has bits outside [1, {self.n}]")

    @property
    def indices(self) -> list[int]:
        return bits_to_indices(self.bits)

    @property
    def cardinality(self) -> int:
        return popcount(self.bits)

    @property
    def parity(self) -> int:
        return popcount(self.bits) & 1

    def sort_key(self) -> tuple[int, int]:
        return (self.cardinality, self.bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return self.cardinality

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.indices)) + "}"


MaskLike = Union[SubsetMask, int]


def mask_from_indices(indices: Iterable[int], n: int) -> SubsetMask:
    _check_ground(n)
    bits = 0
    for i in indices:
        if not 1 <= i <= n:
            raise IndexOutOfRange(f"element {i} outside [1, {n}]")
        b = 1 << (i - 1)
        if bits & b:
            raise DuplicateIndex(f"element {i} repeated")
        bits |= b
    return SubsetMask(bits, n)


class SetAlgebra(NamedTuple):
    intersection: SubsetMask
    union: SubsetMask
    is_disjoint: bool
    complement_of_a: SubsetMask
    cardinality_of_a: int
    parity_of_a: int


def set_algebra(a: SubsetMask, b: SubsetMask) -> SetAlgebra:
    if a.n != b.n:
        raise GroundMismatch(f"ground sizes differ: {a.n} vs {b.n}")
    n = a.n
    inter = a.bits & b.bits
    return SetAlgebra(
        intersection=SubsetMask(inter, n),
        union=SubsetMask(a.bits | b.bits, n),
        is_disjoint=inter == 0,
        complement_of_a=SubsetMask(full_mask(n) ^ a.bits, n),
        cardinality_of_a=a.cardinality,
        parity_of_a=a.parity,
    )


def _gosper(n: int, size: int) -> Iterator[int]:
    # next word with the same popcount, ascending numeric order
    if size == 0:
        yield 0
        return
    x = (1 << size) - 1
    limit = 1 << n
    while x < limit:
        yield x
        c = x & -x
        r = x + c
        x = (((r ^ x) >> 2) // c) | r


def enumerate_subsets(n: int, size: int) -> Iterator[SubsetMask]:
    """Yield every ``size``-subset of [n] in canonical order."""
    if n > WORD_BITS:
        raise GroundTooLargeForEnumeration(f"n={n} exceeds the {WORD_BITS}-bit word")
    if not 0 <= size <= n:
        raise SizeOutOfRange(f"size {size} outside [0, {n}]")
    _check_ground(n)
    for bits in _gosper(n, size):
        yield SubsetMask(bits, n)


def subset_array(n: int, size: int, within: int | None = None) -> np.ndarray:
    """All ``size``-subsets of [n] (or of the mask ``within``) as a canonical uint64 array."""
    if within is None:
        if not 0 <= size <= n:
            return np.empty(0, dtype=np.uint64)
        return np.fromiter(_gosper(n, size), dtype=np.uint64)
    positions = [p for p in range(n) if within >> p & 1]
    if not 0 <= size <= len(positions):
        return np.empty(0, dtype=np.uint64)
    out = np.fromiter(
        (sum(1 << p for p in combo) for combo in combinations(positions, size)),
        dtype=np.uint64,
    )
    out.sort()
    return out


def pair_masks(n: int) -> np.ndarray:
    return subset_array(n, 2)


def odd_masks(n: int) -> np.ndarray:
    """All odd-cardinality subsets of [n], canonical order (n <= 24)."""
    if n > MATERIALIZE_MAX_N:
        raise GroundTooLargeForEnumeration(f"n={n} exceeds materialization cap {MATERIALIZE_MAX_N}")
    every = np.arange(1 << n, dtype=np.uint32)
    return canonical_sort(every[np.bitwise_count(every) & 1 == 1].astype(np.uint64))


def canonical_sort(masks: np.ndarray) -> np.ndarray:
    masks = np.unique(np.asarray(masks, dtype=np.uint64))
    order = np.lexsort((masks, popcount_array(masks)))
    return masks[order]


def _as_bits(x: MaskLike) -> int:
    return x.bits if isinstance(x, SubsetMask) else int(x)


class SetFamily:
    """Deduplicated, canonically ordered collection of subsets of [n]."""

    __slots__ = ("n", "masks", "_numeric")

    def __init__(self, n: int, members: Iterable[MaskLike] | np.ndarray = ()):
        _check_ground(n)
        if isinstance(members, np.ndarray):
            raw = members.astype(np.uint64, copy=False)
        else:
            raw_list = []
            for m in members:
                if isinstance(m, SubsetMask) and m.n != n:
                    raise GroundMismatch(f"member over n={m.n} in family over n={n}")
                raw_list.append(_as_bits(m))
            raw = np.array(raw_list, dtype=np.uint64)
        if raw.size and np.any(raw >> np.uint64(n)):
            raise IndexOutOfRange(f"family member has bits outside [1, {n}]")
        masks = canonical_sort(raw)
        masks.flags.writeable = False
        self.n = n
        self.masks = masks
        self._numeric = None

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(n, [mask_from_indices(s, n) for s in sets])

    def __len__(self) -> int:
        return int(self.masks.size)

    def __iter__(self) -> Iterator[SubsetMask]:
        n = self.n
        return (SubsetMask(int(b), n) for b in self.masks)

    def __getitem__(self, i: int) -> SubsetMask:
        return SubsetMask(int(self.masks[i]), self.n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SetFamily):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.masks, other.masks)

    def __hash__(self) -> int:
        return hash((self.n, self.masks.tobytes()))

    def __repr__(self) -> str:
        return f"SetFamily(n={self.n}, size={len(self)})"

    @property
    def numeric(self) -> np.ndarray:
        if self._numeric is None:
            self._numeric = np.sort(self.masks)
        return self._numeric

    def contains_many(self, masks: np.ndarray) -> np.ndarray:
        ref = self.numeric
        if ref.size == 0:
            return np.zeros(np.shape(masks), dtype=bool)
        pos = np.searchsorted(ref, masks)
        pos = np.minimum(pos, ref.size - 1)
        return ref[pos] == masks

    def __contains__(self, item: MaskLike) -> bool:
        if isinstance(item, SubsetMask) and item.n != self.n:
            return False
        q = np.array([_as_bits(item)], dtype=np.uint64)
        return bool(self.contains_many(q)[0])

    def cardinalities(self) -> np.ndarray:
        return popcount_array(self.masks)

    def layers(self) -> dict[int, "SetFamily"]:
        cards = self.cardinalities()
        return {int(c): SetFamily(self.n, self.masks[cards == c]) for c in np.unique(cards)}

    def layer_sizes(self) -> dict[int, int]:
        cards, counts = np.unique(self.cardinalities(), return_counts=True)
        return {int(c): int(k) for c, k in zip(cards, counts)}

    def union(self, *others: "SetFamily") -> "SetFamily":
        for o in others:
            if o.n != self.n:
                raise GroundMismatch(f"ground sizes differ: {self.n} vs {o.n}")
        return SetFamily(self.n, np.concatenate([self.masks, *(o.masks for o in others)]))

    def issubset(self, other: "SetFamily") -> bool:
        return self.n == other.n and bool(np.all(other.contains_many(self.masks)))

    def all_odd(self) -> bool:
        return bool(np.all(self.cardinalities() & 1))

    def as_sets(self) -> list[list[int]]:
        return [bits_to_indices(int(b)) for b in self.masks]


def _join_masks(masks: np.ndarray, n: int) -> np.ndarray:
    pairs = pair_masks(n)
    grown = []
    for start in range(0, masks.size, _ROW_CHUNK):
        block = masks[start:start + _ROW_CHUNK, None]
        free = (block & pairs[None, :]) == 0
        grown.append((block | pairs[None, :])[free])
    if not grown:
        return np.empty(0, dtype=np.uint64)
    return np.unique(np.concatenate(grown))


def join_one(family: SetFamily) -> SetFamily:
    """Adjoin ``S | P`` for every member ``S`` and every 2-subset ``P`` disjoint from it."""
    if not len(family):
        raise EmptyFamily("join_one of an empty family")
    grown = _join_masks(family.masks, family.n)
    return SetFamily(family.n, np.concatenate([family.masks, grown]))


def cone_closure(seed: SetFamily) -> SetFamily:
    """Least join_one-closed family containing ``seed``, built layer by layer."""
    if not len(seed):
        raise EmptyFamily("cone of an empty family")
    n = seed.n
    buckets: dict[int, list[np.ndarray]] = {}
    cards = seed.cardinalities()
    for c in np.unique(cards):
        buckets[int(c)] = [seed.masks[cards == c]]
    done = []
    for c in range(n + 1):
        if c not in buckets:
            continue
        layer = np.unique(np.concatenate(buckets.pop(c)))
        done.append(layer)
        if c + 2 <= n:
            buckets.setdefault(c + 2, []).append(_join_masks(layer, n))
    return SetFamily(n, np.concatenate(done))


# -- family file format ----------------------------------------------------

def dumps_family(family: SetFamily) -> str:
    lines = [f"n={family.n}"]
    for bits in family.masks:
        if bits == 0:
            raise ValueError("the empty set is not representable in the family file format")
        lines.append(",".join(map(str, bits_to_indices(int(bits)))))
    return "\n".join(lines) + "\n"


def loads_family(text: str) -> SetFamily:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("family file must start with a line 'n=<int>'")
    n = int(lines[0][2:])
    members = []
    for ln in lines[1:]:
        members.append(mask_from_indices([int(t) for t in ln.split(",")], n))
    return SetFamily(n, members)


def write_family(family: SetFamily, path: str | Path) -> None:
    Path(path).write_text(dumps_family(family), encoding="utf-8")


def read_family(path: str | Path) -> SetFamily:
    return loads_family(Path(path).read_text(encoding="utf-8"))


# -- construction parameters -------------------------------------------------

class Variant(enum.Enum):
    N4K = "4k"
    N4K2 = "4k+2"
    N4K7 = "4k+7"
    N4K9 = "4k+9"


_VARIANT_RULES = {
    Variant.N4K: (0, 1),
    Variant.N4K2: (2, 1),
    Variant.N4K7: (7, 2),
    Variant.N4K9: (9, 2),
}


@dataclass(frozen=True)
class ConstructionParams:
    k: int
    variant: Variant

    def __post_init__(self) -> None:
        _, k_min = _VARIANT_RULES[self.variant]
        if self.k < k_min:
            raise InvalidParams(f"variant n={self.variant.value} needs k >= {k_min}, got k={self.k}")

    @property
    def n(self) -> int:
        shift, _ = _VARIANT_RULES[self.variant]
        return 4 * self.k + shift

    def require_materializable(self) -> None:
        if self.n > MATERIALIZE_MAX_N:
            raise GroundTooLargeForEnumeration(
                f"n={self.n} exceeds materialization cap {MATERIALIZE_MAX_N}"
            )
