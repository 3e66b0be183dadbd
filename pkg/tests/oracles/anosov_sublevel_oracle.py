"""Exhaustive sublevel sets of the Anosov torus Z^2 x|_phi Z, phi = [[2,1],[1,1]], on two upper half-planes.

Standalone: an element ``(v, k)`` is the affine map ``x -> phi^k x + v`` of
Z^2; it acts on the two planes by ``z -> lam^(+-k) z + <v, w_+->`` with
``w_+-`` the left eigenvectors ``(1, lam_+- - 2)`` of ``phi``.  The
eigen-data are computed numerically at 60 digits.  Sublevel sets are bounded a
priori: ``|k| log(lam) <= C`` and ``|<v, w_+->|`` is bounded by the plane
distance.  Word lengths come from a breadth-first search over affine maps.
"""

from __future__ import annotations

import json

import mpmath

PHI = ((2, 1), (1, 1))
THRESHOLDS = (2, 4)
mpmath.mp.dps = 60


def eigen():
    tr = PHI[0][0] + PHI[1][1]
    disc = mpmath.sqrt(tr * tr - 4)
    lam_plus, lam_minus = (tr + disc) / 2, (tr - disc) / 2
    # left eigenvector (1, y): 2 + y = lam (first column) since w^T phi = lam w^T
    return [(lam_plus, (1, lam_plus - PHI[0][0])), (lam_minus, (1, lam_minus - PHI[0][0]))]


def displacement(v, k, data) -> mpmath.mpf:
    total = mpmath.mpf(0)
    for lam, w in data:
        scale = lam ** k  # lam_- = 1 / lam_+, so the second plane sees lam_+^-k
        s = v[0] * w[0] + v[1] * w[1]
        total += mpmath.acosh(1 + (s * s + (scale - 1) ** 2) / (2 * scale))
    return total


def sublevel(c: int, data) -> set:
    k_max = int(c / mpmath.log(data[0][0])) + 1
    out = set()
    box = 60
    for k in range(-k_max, k_max + 1):
        for x in range(-box, box + 1):
            for y in range(-box, box + 1):
                if displacement((x, y), k, data) <= c:
                    if abs(x) == box or abs(y) == box:
                        raise RuntimeError("search box too small")
                    out.add(((x, y), k))
    return out


def mat_pow(k: int):
    m = ((1, 0), (0, 1))
    base = PHI if k >= 0 else ((PHI[1][1], -PHI[0][1]), (-PHI[1][0], PHI[0][0]))
    for _ in range(abs(k)):
        m = tuple(tuple(sum(m[i][t] * base[t][j] for t in range(2)) for j in range(2)) for i in range(2))
    return m


def word_lengths(targets: set, radius: int) -> dict:
    gens = [((1, 0), 0), ((-1, 0), 0), ((0, 1), 0), ((0, -1), 0), ((0, 0), 1), ((0, 0), -1)]
    ident = ((0, 0), 0)
    seen = {ident: 0}
    frontier = [ident]
    depth = 0
    while not targets <= seen.keys():
        depth += 1
        if depth > radius:
            raise RuntimeError("search radius too small")
        nxt = []
        for v, k in frontier:
            m = mat_pow(k)
            for gv, gk in gens:
                y = ((v[0] + m[0][0] * gv[0] + m[0][1] * gv[1], v[1] + m[1][0] * gv[0] + m[1][1] * gv[1]), k + gk)
                if y not in seen:
                    seen[y] = depth
                    nxt.append(y)
        frontier = nxt
    return seen


def main() -> dict:
    data = eigen()
    table = {}
    for c in THRESHOLDS:
        elems = sublevel(c, data)
        lengths = word_lengths(elems, 16)
        by_len = [lengths[g] for g in elems]
        cumulative = [sum(1 for x in by_len if x <= r) for r in range(max(by_len) + 1)]
        table[str(c)] = {"total": len(elems), "max_word_length": max(by_len), "cumulative_by_radius": cumulative}
    return table


if __name__ == "__main__":
    print(json.dumps(main(), indent=1))
