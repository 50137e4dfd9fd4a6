"""Brute-force ground truth for the fast predicates and the closed-form counts.

Nothing here reuses the vectorized scans: families are plain Python sets of
ints, and every definition is applied literally.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Any, Callable, Iterable

from . import constructions, counts
from .errors import EmptyFamily, EvenMemberPresent, GroundTooLargeForExhaustion
from .predicates import is_algebraic_system
from .setcore import SetFamily, bits_to_indices, cone_closure, popcount

MACS_MAX_N = 5
SLOW_ALGEBRAIC_MAX_N = 8
DEFAULT_SEED = 20240229


@dataclass
class OracleReport:
    instance: str
    fast_result: Any
    slow_result: Any
    agree: bool
    elapsed: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "instance": self.instance,
            "fast_result": self.fast_result,
            "slow_result": self.slow_result,
            "agree": self.agree,
            "elapsed": round(self.elapsed, 6),
        }


def _odd_subsets(n: int) -> list[int]:
    odd = [m for m in range(1, 1 << n) if popcount(m) & 1]
    return sorted(odd, key=lambda m: (popcount(m), m))


def _even_submasks(mask: int) -> Iterable[int]:
    sub = mask
    while True:
        if not popcount(sub) & 1:
            yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def enumerate_all_macs(n: int) -> list[SetFamily]:
    """Every maximal commutative algebraic family of odd subsets of [n], by exhaustion."""
    if n > MACS_MAX_N:
        raise GroundTooLargeForExhaustion(f"MACS exhaustion capped at n={MACS_MAX_N}, got {n}")
    odd = _odd_subsets(n)
    index = {m: i for i, m in enumerate(odd)}
    full = (1 << n) - 1
    disjoint = [sum(1 << j for j, b in enumerate(odd) if not a & b) for a in odd]
    # direct definition: unions with every disjoint even set, the empty one included
    needs = [
        sum(1 << index[a | e] for e in _even_submasks(full ^ a))
        for a in odd
    ]
    found = []
    for fam in range(1, 1 << len(odd)):
        members = [i for i in range(len(odd)) if fam >> i & 1]
        if any(disjoint[i] & fam for i in members):
            continue
        if any(needs[i] & ~fam for i in members):
            continue
        outside = (i for i in range(len(odd)) if not fam >> i & 1)
        if all(disjoint[i] & fam for i in outside):
            found.append(SetFamily(n, [odd[i] for i in members]))
    return sorted(found, key=lambda f: (len(f), [(popcount(int(m)), int(m)) for m in f.masks]))


def slow_algebraic_check(F: SetFamily) -> bool:
    """Algebraic-system definition applied to every disjoint even subset."""
    if F.n > SLOW_ALGEBRAIC_MAX_N:
        raise GroundTooLargeForExhaustion(f"slow check capped at n={SLOW_ALGEBRAIC_MAX_N}, got {F.n}")
    if not len(F):
        raise EmptyFamily("property checks need a nonempty family")
    members = {int(m) for m in F.masks}
    if any(not popcount(m) & 1 for m in members):
        raise EvenMemberPresent("algebraic systems hold odd sets only")
    full = (1 << F.n) - 1
    return all(a | e in members for a in members for e in _even_submasks(full ^ a))


def random_odd_families(n: int, count: int, rng: random.Random) -> list[SetFamily]:
    """A mix of unstructured families, cones, and cones with one member dropped."""
    odd = _odd_subsets(n)
    out = []
    while len(out) < count:
        style = rng.randrange(3)
        if style == 0:
            p = rng.random()
            picked = [m for m in odd if rng.random() < p] or [rng.choice(odd)]
            out.append(SetFamily(n, picked))
            continue
        seeds = rng.sample(odd, rng.randint(1, 3))
        cone = cone_closure(SetFamily(n, seeds))
        if style == 2 and len(cone) > 1:
            drop = rng.randrange(len(cone))
            cone = SetFamily(n, [int(m) for i, m in enumerate(cone.masks) if i != drop])
        out.append(cone)
    return out


def _outcome(check: Callable[[SetFamily], Any], F: SetFamily) -> Any:
    try:
        return bool(check(F))
    except EmptyFamily:
        return "EmptyFamily"


def crosscheck_algebraic(families: Iterable[SetFamily], instance: str) -> OracleReport:
    start = time.perf_counter()
    total = mismatches = 0
    first_mismatch = None
    for F in families:
        total += 1
        fast = _outcome(is_algebraic_system, F)
        slow = _outcome(slow_algebraic_check, F)
        if fast != slow:
            mismatches += 1
            first_mismatch = first_mismatch or F.as_sets()
    return OracleReport(
        instance=instance,
        fast_result={"families": total, "mismatches": mismatches},
        slow_result={"first_mismatch": first_mismatch},
        agree=mismatches == 0,
        elapsed=time.perf_counter() - start,
    )


def all_families_n4() -> list[SetFamily]:
    odd = _odd_subsets(4)
    return [SetFamily(4, [odd[i] for i in range(8) if f >> i & 1]) for f in range(1 << 8)]


def crosscheck_algebraic_random(ns: Iterable[int] = (5, 6, 7, 8), per_n: int = 2500,
                                seed: int = DEFAULT_SEED) -> OracleReport:
    rng = random.Random(seed)
    fams = [F for n in ns for F in random_odd_families(n, per_n, rng)]
    report = crosscheck_algebraic(fams, f"random families n={list(ns)} seed={seed}")
    report.fast_result["seed"] = seed
    return report


_BUILDERS = {
    "cone47": (constructions.cone47, counts.count_cone47),
    "delta47": (constructions.delta47, counts.count_delta47),
    "c49": (constructions.c49, counts.count_c49),
}


def crosscheck_counts(k_set: Iterable[int]) -> list[OracleReport]:
    """Enumerated layer sizes against the closed-form layer counts."""
    reports = []
    for k in sorted(k_set):
        for name, (build, count) in _BUILDERS.items():
            start = time.perf_counter()
            built = build(k)
            closed = count(k)
            enumerated = {str(j): v for j, v in built.layer_sizes().items()}
            formula = {str(j): v for j, v in sorted(closed.layers.items()) if v}
            reports.append(OracleReport(
                instance=f"{name} k={k}",
                fast_result={"total": closed.total, "layers": formula},
                slow_result={"total": len(built.total), "layers": enumerated},
                agree=closed.total == len(built.total) and formula == enumerated,
                elapsed=time.perf_counter() - start,
            ))
    return reports


def macs_summary(families: list[SetFamily]) -> dict[str, Any]:
    sizes: dict[int, int] = {}
    for F in families:
        sizes[len(F)] = sizes.get(len(F), 0) + 1
    return {
        "count": len(families),
        "sizes": {str(s): c for s, c in sorted(sizes.items())},
        "families": [[bits_to_indices(int(m)) for m in F.masks] for F in families],
    }
