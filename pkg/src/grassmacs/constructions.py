"""Explicit intersecting families: Fano windows, cones, and the layered k-families.

Every k-family splits the ground set into a 7-point window carrying a Fano
plane and a low block ``[L] = {1..L}``.  Blocks are generated by signature:
a pattern on the window glued to every subset of ``[L]`` of a fixed size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ConstructionMismatch, GroundTooLargeForEnumeration, IndexOutOfRange, WindowOverflow
from .setcore import (
    MATERIALIZE_MAX_N,
    WORD_BITS,
    ConstructionParams,
    SetFamily,
    SubsetMask,
    Variant,
    cone_closure,
    full_mask,
    join_one,
    odd_masks,
    popcount_array,
    subset_array,
)

FANO_LINES = ((1, 2, 5), (1, 3, 6), (1, 4, 7), (2, 3, 7), (3, 4, 5), (5, 6, 7), (2, 4, 6))

# complements of the Fano lines inside the window, in the order E_1..E_7
FANO_COMPLEMENTS = ((1, 2, 6, 7), (2, 3, 5, 6), (3, 4, 6, 7), (1, 3, 5, 7),
                    (1, 2, 3, 4), (1, 4, 5, 6), (2, 4, 5, 7))


def _bits(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << (i - 1)
    return out


@dataclass(frozen=True)
class Window:
    """Seven consecutive points ``offset+1 .. offset+7``."""

    offset: int
    width: int = 7

    @property
    def bits(self) -> int:
        return full_mask(self.width) << self.offset

    def shift(self, relative: Iterable[int]) -> int:
        return _bits(relative) << self.offset

    def subsets(self, size: int) -> np.ndarray:
        return subset_array(self.offset + self.width, size, within=self.bits)


@dataclass(frozen=True)
class FanoBlock:
    triples: tuple[int, ...]
    window_offset: int

    @property
    def window(self) -> Window:
        return Window(self.window_offset)

    def as_family(self, n: int | None = None) -> SetFamily:
        return SetFamily(n or self.window_offset + 7, list(self.triples))

    def masks(self) -> np.ndarray:
        return np.array(self.triples, dtype=np.uint64)


def fano(offset: int = 0) -> FanoBlock:
    if offset < 0 or offset + 7 > WORD_BITS:
        raise WindowOverflow(f"window [{offset + 1}, {offset + 7}] does not fit a {WORD_BITS}-bit word")
    w = Window(offset)
    return FanoBlock(tuple(w.shift(line) for line in FANO_LINES), offset)


@dataclass
class LayeredFamily:
    layers: dict[int, SetFamily]
    total: SetFamily
    parts: dict[str, object] = field(default_factory=dict)

    @classmethod
    def from_total(cls, total: SetFamily, **parts) -> "LayeredFamily":
        return cls(total.layers(), total, dict(parts))

    def layer_sizes(self) -> dict[int, int]:
        return {j: len(f) for j, f in sorted(self.layers.items())}


def _cap(n: int) -> None:
    if n > MATERIALIZE_MAX_N:
        raise GroundTooLargeForEnumeration(f"n={n} exceeds materialization cap {MATERIALIZE_MAX_N}")


def glue(high: np.ndarray | Iterable[int], low_size: int, low_n: int) -> np.ndarray:
    """``{h | s : h in high, s a low_size-subset of [low_n]}``."""
    high = np.asarray(list(high) if not isinstance(high, np.ndarray) else high, dtype=np.uint64)
    low = subset_array(low_n, low_size)
    if high.size == 0 or low.size == 0:
        return np.empty(0, dtype=np.uint64)
    return (high[:, None] | low[None, :]).ravel()


def full_layers(n: int, sizes: Iterable[int]) -> np.ndarray:
    parts = [subset_array(n, j) for j in sizes if 0 <= j <= n]
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.uint64)


def cone_singleton(n: int, i: int) -> SetFamily:
    _cap(n)
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"element {i} outside [1, {n}]")
    return cone_closure(SetFamily(n, [1 << (i - 1)]))


def odd_sets_containing(n: int, i: int) -> SetFamily:
    """Direct description of ``cone_singleton(n, i)``."""
    odd = odd_masks(n)
    return SetFamily(n, odd[(odd >> np.uint64(i - 1)) & np.uint64(1) == 1])


def family_example2(k: int) -> SetFamily:
    """Full odd layers ``2k+1 .. 4k-1`` over ``n = 4k``."""
    n = ConstructionParams(k, Variant.N4K).n
    _cap(n)
    return SetFamily(n, full_layers(n, range(2 * k + 1, 4 * k, 2)))


def family_example3(k: int, i: int) -> SetFamily:
    """Full odd layers ``2k+3 .. 4k+1`` plus the ``(2k+1)``-sets through ``i``, over ``n = 4k+2``."""
    n = ConstructionParams(k, Variant.N4K2).n
    _cap(n)
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"element {i} outside [1, {n}]")
    mid = subset_array(n, 2 * k + 1)
    through_i = mid[(mid >> np.uint64(i - 1)) & np.uint64(1) == 1]
    return SetFamily(n, np.concatenate([full_layers(n, range(2 * k + 3, 4 * k + 2, 2)), through_i]))


class BBlocks(NamedTuple):
    blocks: list[SetFamily]
    am: SetFamily


def _params47(k: int) -> tuple[int, int, Window]:
    n = ConstructionParams(k, Variant.N4K7).n
    _cap(n)
    return n, 4 * k, Window(4 * k)


def blocks_b(k: int) -> BBlocks:
    """The ten ``(2k+3)``-set blocks over ``n = 4k+7`` and their union ``A_m``."""
    n, low, w = _params47(k)
    lines = fano(4 * k).triples
    raw = [glue([line], 2 * k, low) for line in lines]
    raw.append(glue(w.subsets(2), 2 * k + 1, low))
    raw.append(glue(w.subsets(1), 2 * k + 2, low))
    raw.append(glue([0], 2 * k + 3, low))
    blocks = [SetFamily(n, b) for b in raw]
    return BBlocks(blocks, SetFamily(n, np.concatenate(raw)))


def cone47(k: int, check_closure: bool = True) -> LayeredFamily:
    """``Cone(Cone_{2k+1} | Cone_{2k+3})`` over ``n = 4k+7``.

    Built from the closed layer description; with ``check_closure`` the cone is
    also computed by brute-force closure and the two must coincide.
    """
    n, low, w = _params47(k)
    bb = blocks_b(k)
    cone_2k1 = SetFamily(n, subset_array(low, 2 * k + 1))
    cone_2k3 = bb.blocks[0].union(*bb.blocks[1:7])
    # size-(2k+5) part of join_one(A_m)
    grown = join_one(bb.am)
    cone_2k5 = SetFamily(n, grown.masks[grown.cardinalities() == 2 * k + 5])

    u5 = [glue(w.subsets(j), 2 * k + 5 - j, low) for j in range(0, 6)]
    closed = SetFamily(n, np.concatenate([
        cone_2k1.masks,
        bb.am.masks,
        *u5,
        full_layers(n, range(2 * k + 7, n + 1, 2)),
    ]))
    if check_closure:
        direct = cone_closure(cone_2k1.union(cone_2k3))
        if direct != closed:
            raise ConstructionMismatch("closed-form cone layers differ from the computed closure")
        if SetFamily(n, closed.masks[closed.cardinalities() == 2 * k + 5]) != cone_2k5:
            raise ConstructionMismatch("layer 2k+5 differs from join_one of the B blocks")
    return LayeredFamily.from_total(
        closed, cone_2k1=cone_2k1, cone_2k3=cone_2k3, cone_2k5=cone_2k5, blocks=bb.blocks, am=bb.am
    )


def delta47(k: int) -> LayeredFamily:
    """``A_m`` plus every odd layer of size at least ``2k+5``, over ``n = 4k+7``."""
    n, _, _ = _params47(k)
    bb = blocks_b(k)
    total = SetFamily(n, np.concatenate([bb.am.masks, full_layers(n, range(2 * k + 5, n + 1, 2))]))
    return LayeredFamily.from_total(total, am=bb.am, blocks=bb.blocks)


@dataclass
class C49Parts:
    a3: FanoBlock
    e_sets: list[int]
    q_sets: list[int]
    f_blocks: list[SetFamily]
    d_blocks: list[SetFamily]


def c49_window_parts(k: int) -> tuple[FanoBlock, list[int], list[int]]:
    """Shifted Fano system, the seven line complements ``E_i`` and the 28 sets ``Q_i``."""
    w = Window(4 * k + 2)
    a3 = fano(4 * k + 2)
    e_sets = [w.shift(e) for e in FANO_COMPLEMENTS]
    excluded = set(e_sets)
    q_sets = [int(q) for q in w.subsets(4) if int(q) not in excluded]
    return a3, e_sets, q_sets


def c49(k: int) -> LayeredFamily:
    """The layered family over ``n = 4k+9`` with window ``[4k+3, 4k+9]``."""
    n = ConstructionParams(k, Variant.N4K9).n
    _cap(n)
    low = 4 * k + 2
    w = Window(low)
    a3, e_sets, q_sets = c49_window_parts(k)

    f_raw = [glue([line], 2 * k, low) for line in a3.triples]
    f_raw.append(glue([0], 2 * k + 3, low))

    d_raw = [
        glue([0], 2 * k + 5, low),
        glue(w.subsets(1), 2 * k + 4, low),
        glue(w.subsets(2), 2 * k + 3, low),
    ]
    d_raw += [glue([line], 2 * k + 2, low) for line in a3.triples]
    d_raw += [glue([q], 2 * k + 1, low) for q in q_sets]
    d_raw.append(glue(w.subsets(5), 2 * k, low))

    total = SetFamily(n, np.concatenate([*f_raw, *d_raw, full_layers(n, range(2 * k + 7, n + 1, 2))]))
    parts = C49Parts(
        a3=a3,
        e_sets=e_sets,
        q_sets=q_sets,
        f_blocks=[SetFamily(n, b) for b in f_raw],
        d_blocks=[SetFamily(n, b) for b in d_raw],
    )
    return LayeredFamily.from_total(total, window=parts)


def window_facts(k: int) -> dict[str, bool]:
    """Exhaustive checks of the three finite window facts used by ``c49``."""
    w = Window(4 * k + 2)
    a3, e_sets, q_sets = c49_window_parts(k)
    lines = a3.triples
    every_line_meets_every_q = all(line & q for line in lines for q in q_sets)
    extended = {line | (1 << p) for line in lines for p in range(w.offset, w.offset + 7) if not line >> p & 1}
    complements_are_lines = all((w.bits ^ e) in lines for e in e_sets)
    return {
        "lines_meet_q": every_line_meets_every_q,
        "line_plus_point_is_q": extended == set(q_sets) and len(q_sets) == 28,
        "complements_are_lines": complements_are_lines,
    }


def fano_axioms(block: FanoBlock) -> bool:
    """Two lines meet in one point; every window point lies on three lines."""
    t = block.triples
    pairs_ok = all((a & b).bit_count() == 1 for i, a in enumerate(t) for b in t[i + 1:])
    counts = [sum(1 for line in t if line >> p & 1)
              for p in range(block.window_offset, block.window_offset + 7)]
    return pairs_ok and counts == [3] * 7 and all(x.bit_count() == 3 for x in t)


NAMED_FAMILIES = ("cone-singleton", "ex2", "ex3", "am", "cone47", "delta47", "c49", "fano")


def build_named(name: str, k: int | None = None, i: int | None = None,
                offset: int | None = None, n: int | None = None) -> SetFamily:
    """Look up a named construction by its CLI name."""
    if name == "fano":
        block = fano(offset if offset is not None else 0)
        return block.as_family(n)
    if name == "cone-singleton":
        if n is None:
            raise ValueError("family 'cone-singleton' needs --n")
        return cone_singleton(n, i or 1)
    if k is None:
        raise ValueError(f"family {name!r} needs --k")
    if name == "ex2":
        return family_example2(k)
    if name == "ex3":
        return family_example3(k, i or 1)
    if name == "am":
        return blocks_b(k).am
    if name == "cone47":
        return cone47(k).total
    if name == "delta47":
        return delta47(k).total
    if name == "c49":
        return c49(k).total
    raise ValueError(f"unknown family {name!r}")
