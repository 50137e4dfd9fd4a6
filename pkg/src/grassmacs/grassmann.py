"""Signed monomial arithmetic in G(n) and the family/subalgebra bridge.

Monomials are ``v_I = v_{i1} v_{i2} ... v_{ik}`` with ``i1 < i2 < ... < ik``.
Multiplying ``v_I v_J`` sorts the concatenated generator word; every swap of
two distinct generators flips the sign, so the sign is ``(-1)**inv`` where
``inv`` counts pairs ``(i in I, j in J)`` with ``i > j``.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple

import numpy as np

from .errors import EvenMemberPresent, FamilyTooLarge, GroundMismatch, GroundTooLarge
from .setcore import SetFamily, SubsetMask, bits_to_indices, popcount

PAIR_SCAN_LIMIT = 5000
IDENTITY_MAX_N = 10


def inversion_count(a: int, b: int) -> int:
    """Pairs ``(i in a, j in b)`` with ``i > j``."""
    inv = 0
    while b:
        low = b & -b
        j = low.bit_length() - 1
        inv += popcount(a >> (j + 1))
        b ^= low
    return inv


@dataclass(frozen=True)
class SignedMonomial:
    coeff: int
    support: SubsetMask

    def __post_init__(self) -> None:
        if self.coeff not in (-1, 0, 1):
            raise ValueError(f"monomial coefficient must be -1, 0 or +1, got {self.coeff}")

    @classmethod
    def of(cls, indices, n: int, coeff: int = 1) -> "SignedMonomial":
        from .setcore import mask_from_indices

        return cls(coeff, mask_from_indices(indices, n))

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0

    def __str__(self) -> str:
        if self.coeff == 0:
            return "0"
        return ("+" if self.coeff > 0 else "-") + "v" + str(self.support)


def monomial_product(a: SignedMonomial, b: SignedMonomial) -> SignedMonomial:
    if a.support.n != b.support.n:
        raise GroundMismatch(f"ground sizes differ: {a.support.n} vs {b.support.n}")
    n = a.support.n
    if a.coeff == 0 or b.coeff == 0 or a.support.bits & b.support.bits:
        return SignedMonomial(0, SubsetMask(0, n))
    sign = -1 if inversion_count(a.support.bits, b.support.bits) & 1 else 1
    return SignedMonomial(a.coeff * b.coeff * sign, SubsetMask(a.support.bits | b.support.bits, n))


class CommuteResult(NamedTuple):
    commute: bool
    # (-1)**(|I||J|) when the products are nonzero; None for zero products
    sign_relation: int | None


def commute_check(I: SubsetMask, J: SubsetMask) -> CommuteResult:
    if I.n != J.n:
        raise GroundMismatch(f"ground sizes differ: {I.n} vs {J.n}")
    ij = monomial_product(SignedMonomial(1, I), SignedMonomial(1, J))
    ji = monomial_product(SignedMonomial(1, J), SignedMonomial(1, I))
    if ij.is_zero:
        return CommuteResult(True, None)
    relation = ij.coeff * ji.coeff
    return CommuteResult(relation == 1, relation)


@dataclass(frozen=True)
class GradedElement:
    """A finite linear combination of monomials with exact rational coefficients."""

    n: int
    terms: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for bits, c in self.terms.items():
            if bits >> self.n:
                raise GroundMismatch(f"term {bits:#x} outside ground n={self.n}")
            c = Fraction(c)
            if c:
                clean[int(bits)] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def monomial(cls, indices, n: int, coeff=1) -> "GradedElement":
        bits = 0
        for i in indices:
            bits |= 1 << (i - 1)
        return cls(n, {bits: Fraction(coeff)})

    def _check(self, other: "GradedElement") -> None:
        if self.n != other.n:
            raise GroundMismatch(f"ground sizes differ: {self.n} vs {other.n}")

    def __add__(self, other: "GradedElement") -> "GradedElement":
        self._check(other)
        out = dict(self.terms)
        for bits, c in other.terms.items():
            out[bits] = out.get(bits, 0) + c
        return GradedElement(self.n, out)

    def __neg__(self) -> "GradedElement":
        return GradedElement(self.n, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def __mul__(self, other: "GradedElement") -> "GradedElement":
        self._check(other)
        out: dict[int, Fraction] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                if a & b:
                    continue
                c = ca * cb
                if inversion_count(a, b) & 1:
                    c = -c
                out[a | b] = out.get(a | b, 0) + c
        return GradedElement(self.n, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def even_part(self) -> "GradedElement":
        return GradedElement(self.n, {b: c for b, c in self.terms.items() if not popcount(b) & 1})

    def odd_part(self) -> "GradedElement":
        return GradedElement(self.n, {b: c for b, c in self.terms.items() if popcount(b) & 1})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for bits in sorted(self.terms, key=lambda b: (popcount(b), b)):
            c = self.terms[bits]
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            label = "v{" + ",".join(map(str, bits_to_indices(bits))) + "}" if bits else "1"
            if not bits:
                parts.append(f"{sign}{mag}")
            elif mag == 1:
                parts.append(f"{sign}{label}")
            else:
                parts.append(f"{sign}{mag}*{label}")
        return " ".join(parts)


def commutator(x: GradedElement, y: GradedElement) -> GradedElement:
    return x * y - y * x


def random_element(n: int, rng: random.Random, max_terms: int = 6, max_num: int = 3) -> GradedElement:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        bits = rng.getrandbits(n)
        num = rng.randint(-max_num, max_num)
        den = rng.randint(1, max_num)
        terms[bits] = Fraction(num, den)
    return GradedElement(n, terms)


def verify_metabelian_identity(n: int, trials: int, seed: int) -> bool:
    """Check ``[[x, y], z] == 0`` exactly on ``trials`` random triples."""
    if n > IDENTITY_MAX_N:
        raise GroundTooLarge(f"identity check capped at n={IDENTITY_MAX_N}, got {n}")
    rng = random.Random(seed)
    for _ in range(trials):
        x, y, z = (random_element(n, rng) for _ in range(3))
        if not commutator(commutator(x, y), z).is_zero():
            return False
    return True


def _require_odd(T: SetFamily) -> None:
    cards = T.cardinalities()
    even = np.flatnonzero(cards % 2 == 0)
    if even.size:
        raise EvenMemberPresent(f"member {T[int(even[0])]} has even cardinality")


def family_to_dimension(T: SetFamily) -> int:
    """Dimension of ``G_0 + span{v_I : I in T}``."""
    _require_odd(T)
    return 2 ** (T.n - 1) + len(T)


def _inversion_parity_vec(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    parity = np.zeros(a.shape, dtype=np.int64)
    one = np.uint64(1)
    for p in range(n):
        has = ((b >> np.uint64(p)) & one).astype(np.int64)
        above = np.bitwise_count(a >> np.uint64(p + 1)).astype(np.int64)
        parity += has * above
    return parity & 1


def _bridge_rows(masks: np.ndarray, n: int, start: int, stop: int) -> bool:
    for i in range(start, stop):
        a = masks[i]
        rest = masks[i + 1:]
        disjoint = (rest & a) == 0
        if not disjoint.any():
            continue
        b = rest[disjoint]
        av = np.full(b.shape, a, dtype=np.uint64)
        # nonzero products: commute iff v_I v_J and v_J v_I carry the same sign
        commute = _inversion_parity_vec(av, b, n) == _inversion_parity_vec(b, av, n)
        # disjoint pairs must anticommute for the bridge to hold
        if commute.any():
            return False
    return True


def subalgebra_commutes_iff_intersecting(
    T: SetFamily, max_size: int | None = PAIR_SCAN_LIMIT, threads: int | None = None
) -> bool:
    """Confirm that ``v_I, v_J`` commute exactly when ``I`` and ``J`` meet, over all pairs of ``T``.

    Intersecting pairs give zero products on both sides and commute trivially;
    disjoint pairs get their two signs computed independently by inversion count.
    ``max_size=None`` lifts the quadratic-scan cap.
    """
    _require_odd(T)
    if max_size is not None and len(T) > max_size:
        raise FamilyTooLarge(f"|T|={len(T)} exceeds pair-scan cap {max_size}")
    masks = T.masks
    size = masks.size
    workers = threads or os.cpu_count() or 1
    bounds = np.linspace(0, size, workers * 4 + 1).astype(int)
    spans = [(int(s), int(e)) for s, e in zip(bounds[:-1], bounds[1:]) if e > s]
    if workers == 1:
        return all(_bridge_rows(masks, T.n, s, e) for s, e in spans)
    with ThreadPoolExecutor(workers) as pool:
        return all(pool.map(lambda se: _bridge_rows(masks, T.n, *se), spans))
