"""Exhaustive sublevel sets of BS(1,2) acting on the upper half-plane times its Bass-Serre tree.

Standalone: elements are affine maps ``z -> 2^k z + r`` with ``r`` in Z[1/2],
word lengths come from a breadth-first search over those maps, and tree
distances come from the reduced form ``t^-p a^m t^q``.  The search region is
bounded a priori, so each sublevel set is found in full, not only inside a ball.

Run ``python tests/oracles/bs_sublevel_oracle.py`` to print the table frozen
into the test suite.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import mpmath

N = 2
THRESHOLDS = (2, 4, 6)
mpmath.mp.dps = 60


def two_adic_valuation(x: Fraction) -> int:
    num, den = x.numerator, x.denominator
    v = 0
    while num % N == 0:
        num //= N
        v += 1
    while den % N == 0:
        den //= N
        v -= 1
    return v


def tree_distance(k: int, r: Fraction) -> int:
    """Distance from <a> to g<a> for g = a^r t^k, via the reduced form t^-p a^m t^q."""
    if r == 0:
        return abs(k)
    p = max(0, -two_adic_valuation(r))
    q = p + k
    if q < 0:
        return -k
    if p == 0 or q == 0:
        return max(p, q)
    return p + q


def cosh_uhp(k: int, r: Fraction) -> Fraction:
    """cosh of the hyperbolic distance from i to 2^k i + r."""
    s = Fraction(N) ** k
    return 1 + (r * r + (s - 1) ** 2) / (2 * s)


def sublevel(c: int) -> set[tuple[int, Fraction]]:
    k_max = int(c / math.log(N)) + 1
    out = set()
    for k in range(-k_max, k_max + 1):
        s = Fraction(N) ** k
        # cosh d >= 1 + r^2 / (2 s) bounds |r|; tree distance >= p bounds the denominator
        r_bound = math.isqrt(int(2 * s * (math.cosh(c) - 1)) + 1) + 1
        den = N ** c
        for j in range(-r_bound * den, r_bound * den + 1):
            r = Fraction(j, den)
            dt = tree_distance(k, r)
            if dt > c:
                continue
            ch = cosh_uhp(k, r)
            if mpmath.mpf(ch.numerator) / ch.denominator <= mpmath.cosh(c - dt):
                out.add((k, r))
    return out


def word_lengths(targets: set, radius: int) -> dict:
    """Breadth-first search over affine maps until every target is reached."""
    gens = [(0, Fraction(1)), (0, Fraction(-1)), (1, Fraction(0)), (-1, Fraction(0))]
    seen = {(0, Fraction(0)): 0}
    frontier = [(0, Fraction(0))]
    depth = 0
    while not targets <= seen.keys():
        depth += 1
        if depth > radius:
            raise RuntimeError("search radius too small")
        nxt = []
        for k, r in frontier:
            for gk, gr in gens:
                # right multiplication by a generator: (k, r) * (gk, gr)
                y = (k + gk, r + Fraction(N) ** k * gr)
                if y not in seen:
                    seen[y] = depth
                    nxt.append(y)
        frontier = nxt
    return seen


def main() -> dict:
    table = {}
    for c in THRESHOLDS:
        elems = sublevel(c)
        lengths = word_lengths(elems, 20)
        by_len = [lengths[g] for g in elems]
        cumulative = [sum(1 for x in by_len if x <= r) for r in range(max(by_len) + 1)]
        table[str(c)] = {"total": len(elems), "max_word_length": max(by_len), "cumulative_by_radius": cumulative}
    return table


if __name__ == "__main__":
    print(json.dumps(main(), indent=1))
