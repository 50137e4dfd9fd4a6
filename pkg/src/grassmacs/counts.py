"""Closed-form family sizes and their ratios to 2**(n-2), in exact arithmetic."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import InvalidParams


def binom(n: int, r: int) -> int:
    if r < 0 or n < 0 or r > n:
        return 0
    return math.comb(n, r)


def _need_k(k: int, k_min: int = 2) -> None:
    if k < k_min:
        raise InvalidParams(f"k must be >= {k_min}, got {k}")


class LayerCount(NamedTuple):
    total: int
    layers: dict[int, int]


def _odd_tail(n: int, start: int) -> dict[int, int]:
    """``{j: binom(n, j)}`` for odd ``j >= start``, walking the row incrementally."""
    out = {}
    c = binom(n, start)
    for j in range(start, n + 1):
        if j % 2 == 1:
            out[j] = c
        c = c * (n - j) // (j + 1)
    return out


def count_cone_singleton(n: int) -> int:
    if n < 2:
        raise InvalidParams(f"n must be >= 2, got {n}")
    return 2 ** (n - 2)


def count_example2(k: int) -> int:
    _need_k(k, 1)
    return sum(binom(4 * k, j) for j in range(2 * k + 1, 4 * k, 2))


def count_example3(k: int) -> int:
    _need_k(k, 1)
    n = 4 * k + 2
    return binom(n - 1, 2 * k) + sum(binom(n, j) for j in range(2 * k + 3, 4 * k + 2, 2))


def am_components(k: int) -> tuple[int, int, int, int]:
    """Sizes of the Fano-line blocks, the 2-point, 1-point and 0-point window blocks."""
    low = 4 * k
    return (
        7 * binom(low, 2 * k),
        binom(7, 2) * binom(low, 2 * k + 1),
        binom(7, 1) * binom(low, 2 * k + 2),
        binom(low, 2 * k + 3),
    )


def count_am(k: int) -> int:
    _need_k(k)
    return sum(am_components(k))


def count_cone47(k: int) -> LayerCount:
    _need_k(k)
    n, low = 4 * k + 7, 4 * k
    layers = {
        2 * k + 1: binom(low, 2 * k + 1),
        2 * k + 3: count_am(k),
        2 * k + 5: sum(binom(7, i) * binom(low, 2 * k + 5 - i) for i in range(6)),
    }
    layers.update(_odd_tail(n, 2 * k + 7))
    return LayerCount(sum(layers.values()), layers)


def count_delta47(k: int) -> LayerCount:
    _need_k(k)
    n = 4 * k + 7
    layers = {2 * k + 3: count_am(k)}
    layers.update(_odd_tail(n, 2 * k + 5))
    return LayerCount(sum(layers.values()), layers)


def cone_delta_gap(k: int) -> int:
    """Closed form of ``|delta47| - |cone47|``."""
    _need_k(k)
    return binom(4 * k, 2 * k - 2) + 6 * binom(4 * k, 2 * k - 1)


def count_c49(k: int) -> LayerCount:
    _need_k(k)
    n, low = 4 * k + 9, 4 * k + 2
    layers = {
        2 * k + 3: 7 * binom(low, 2 * k) + binom(low, 2 * k + 3),
        2 * k + 5: (
            binom(low, 2 * k + 5)
            + binom(7, 1) * binom(low, 2 * k + 4)
            + binom(7, 2) * binom(low, 2 * k + 3)
            + 7 * binom(low, 2 * k + 2)
            + 28 * binom(low, 2 * k + 1)
            + binom(7, 5) * binom(low, 2 * k)
        ),
    }
    layers.update(_odd_tail(n, 2 * k + 7))
    return LayerCount(sum(layers.values()), layers)


def ekr_bound(k: int) -> int:
    _need_k(k)
    return binom(4 * k + 6, 2 * k + 2)


def am_ratio_components(k: int) -> tuple[Fraction, ...]:
    """Each binomial ``binom(4k, 2k+j)`` for ``j = 0..3`` over the EKR bound; each tends to 1/64."""
    bound = ekr_bound(k)
    return tuple(Fraction(binom(4 * k, 2 * k + j), bound) for j in range(4))


def am_ratio(k: int) -> Fraction:
    return Fraction(count_am(k), ekr_bound(k))


def ratio_to_quarter_power(count: int, n: int) -> Fraction:
    return Fraction(count, 2 ** (n - 2))


def format_sf(x: Fraction, digits: int = 5) -> str:
    """Decimal string of ``x`` to ``digits`` significant figures, rounding half to even."""
    if x == 0:
        return "0." + "0" * (digits - 1)
    sign = "-" if x < 0 else ""
    x = abs(Fraction(x))
    e = len(str(x.numerator // x.denominator)) - 1 if x >= 1 else -_leading_zeros(x) - 1
    scaled = round(x * Fraction(10) ** (digits - 1 - e))
    if scaled >= 10 ** digits:
        e += 1
        scaled = round(x * Fraction(10) ** (digits - 1 - e))
    text = str(scaled)
    point = e + 1
    if point <= 0:
        return f"{sign}0." + "0" * (-point) + text
    if point >= digits:
        return sign + text + "0" * (point - digits)
    return f"{sign}{text[:point]}.{text[point:]}"


def _leading_zeros(x: Fraction) -> int:
    # number of zeros right after the decimal point, for 0 < x < 1
    z = 0
    while x * 10 < 1:
        x *= 10
        z += 1
    return z


@dataclass(frozen=True)
class SequenceRow:
    k: int
    cone_count: int
    delta_count: int
    c_count: int

    @property
    def n_cone(self) -> int:
        return 4 * self.k + 7

    @property
    def n_c(self) -> int:
        return 4 * self.k + 9

    @property
    def s(self) -> Fraction:
        return ratio_to_quarter_power(self.cone_count, self.n_cone)

    @property
    def d(self) -> Fraction:
        return ratio_to_quarter_power(self.delta_count, self.n_cone)

    @property
    def K(self) -> Fraction:
        return ratio_to_quarter_power(self.c_count, self.n_c)


@dataclass
class SequenceTable:
    rows: list[SequenceRow]
    flags: dict[str, bool] = field(default_factory=dict)
    # k values where a trend breaks between row k and row k+1
    trend_breaks: dict[str, list[int]] = field(default_factory=dict)

    def row(self, k: int) -> SequenceRow:
        return self.rows[k - 2]

    def K_by_n(self, n: int) -> Fraction:
        if n % 4 != 1 or n < 17:
            raise InvalidParams(f"K is defined for n = 4k+9 >= 17, got n={n}")
        return self.row((n - 9) // 4).K

    def to_records(self) -> list[dict]:
        out = []
        for r in self.rows:
            s, d, K = r.s, r.d, r.K
            out.append({
                "k": r.k,
                "n": r.n_cone,
                "count": r.cone_count,
                "ratio_exact": f"{s.numerator}/{s.denominator}",
                "ratio_5sf": format_sf(s),
                "delta_count": r.delta_count,
                "d_exact": f"{d.numerator}/{d.denominator}",
                "d_5sf": format_sf(d),
                "n_c": r.n_c,
                "c_count": r.c_count,
                "K_exact": f"{K.numerator}/{K.denominator}",
                "K_5sf": format_sf(K),
                "s_lt_1": int(s < 1),
                "d_gt_1": int(d > 1),
                "K_lt_1": int(K < 1),
            })
        return out

    def to_csv(self) -> str:
        records = self.to_records()
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        return buf.getvalue()


def _breaks(rows: list[SequenceRow], values: list[Fraction], increasing: bool) -> list[int]:
    return [
        r.k for r, a, b in zip(rows, values, values[1:])
        if not ((a < b) if increasing else (a > b))
    ]


def sequences(k_max: int = 250) -> SequenceTable:
    """Rows ``k = 2..k_max`` of the cone, delta and c49 ratios, plus trend flags.

    The flags are observations over the computed range, not limit claims.
    """
    _need_k(k_max)
    rows = [
        SequenceRow(k, count_cone47(k).total, count_delta47(k).total, count_c49(k).total)
        for k in range(2, k_max + 1)
    ]
    s = [r.s for r in rows]
    d = [r.d for r in rows]
    K = [r.K for r in rows]
    breaks = {
        "s_increasing": _breaks(rows, s, True),
        "d_decreasing": _breaks(rows, d, False),
        "K_increasing": _breaks(rows, K, True),
    }
    flags = {name: not ks for name, ks in breaks.items()}
    flags.update({
        "s_below_one": all(x < 1 for x in s),
        "d_above_one": all(x > 1 for x in d),
        "K_below_one": all(x < 1 for x in K),
    })
    return SequenceTable(rows, flags, breaks)


def odd_binomial_sum(n: int) -> int:
    return sum(_odd_tail(n, 1).values())
