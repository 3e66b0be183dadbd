"""Brute-force conjugation search for point groups of rank 2.

A finite point group is diagonalizable over Z when some P in GL_2(Z) makes
every ``P^-1 M P`` diagonal with entries +-1.  This oracle tries every P with
entries in [-3, 3]; it is independent of the eigenlattice construction.
"""

from __future__ import annotations

import itertools
import json

BOX = range(-3, 4)
FIXTURES = {
    "reflection": [((1, 0), (0, -1))],
    "minus-identity": [((-1, 0), (0, -1))],
    "triangle": [((0, -1), (1, -1))],
    "swap": [((0, 1), (1, 0))],
}


def mul(x, y):
    return tuple(tuple(sum(x[i][t] * y[t][j] for t in range(2)) for j in range(2)) for i in range(2))


def conjugator(gens):
    """First P (lexicographic over the box) diagonalizing every generator, or None."""
    for a, b, c, d in itertools.product(BOX, repeat=4):
        det = a * d - b * c
        if det not in (1, -1):
            continue
        p = ((a, b), (c, d))
        p_inv = ((d * det, -b * det), (-c * det, a * det))
        if all(_is_sign_diagonal(mul(mul(p_inv, m), p)) for m in gens):
            return p
    return None


def _is_sign_diagonal(m) -> bool:
    return m[0][1] == 0 and m[1][0] == 0 and abs(m[0][0]) == 1 and abs(m[1][1]) == 1


def main() -> dict:
    out = {}
    for name, gens in FIXTURES.items():
        p = conjugator(gens)
        out[name] = {"verdict": "yes" if p else "no", "conjugator": p}
    return out


if __name__ == "__main__":
    print(json.dumps(main()))
