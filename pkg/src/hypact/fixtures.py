"""Built-in fixtures: the CLI fixture suite plus quasimorphism samples for testing.

``FIXTURE_CONFIG`` is the canonical experiment suite; ``configs/fixtures.json``
in the repository is a serialized copy of it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .ball import enumerate_ball
from .groups import (AnosovTorus, BaumslagSolitar, Crystallographic, Element, FreeAbelian, Group, Heisenberg)
from .quasimorph import (Quasimorphism, bounded_perturbation, floor_quasimorphism, heisenberg_coordinate,
                         linear_combination, linear_form, residue_quasimorphism, t_exponent, transfer)
from .scalar import QuadScalar, floor_scalar

__all__ = ["FIXTURE_CONFIG", "HomogenizationFixture", "homogenization_fixtures", "TransferFixture",
           "transfer_fixtures", "random_rational_forms"]


# ---------------------------------------------------------------------------
# CLI fixture suite
# ---------------------------------------------------------------------------

FIXTURE_CONFIG: dict = {
    "version": 1,
    "groups": {
        "heisenberg": {"family": "heisenberg"},
        "heisenberg-abc": {"family": "heisenberg", "generators": ["a", "b", "c"]},
        "bs2": {"family": "bs", "n": 2},
        "bs3": {"family": "bs", "n": 3},
        "anosov": {"family": "anosov-torus", "matrix": [[2, 1], [1, 1]]},
        "z1": {"family": "free-abelian", "rank": 1},
        "z2": {"family": "free-abelian", "rank": 2},
        "z3": {"family": "free-abelian", "rank": 3},
        "c2": {"family": "cyclic", "order": 2},
        "z2-times-c2": {"family": "direct-product", "factors": ["z2", "c2"]},
        "bs2-times-z": {"family": "direct-product", "factors": ["bs2", "z1"]},
        "z-times-z2": {"family": "direct-product", "factors": ["z1", "z2"]},
        "reflection-lattice": {"family": "crystallographic", "rank": 2,
                               "point_generators": [[[1, 0], [0, -1]]]},
        "heisenberg-amalgam": {"family": "amalgamated-product", "H": "heisenberg", "K": "z2",
                               "z_H": ["c"], "z_K": ["e1"]},
        "heisenberg-mod-center": {"family": "central-quotient", "base": "heisenberg", "central": ["c"]},
    },
    "quasimorphisms": {
        "phi-a": {"tag": "coordinate", "group": "heisenberg", "coordinate": "a"},
        "phi-b": {"tag": "coordinate", "group": "heisenberg", "coordinate": "b"},
        "bs2-height": {"tag": "t-exponent", "group": "bs2"},
        "anosov-height": {"tag": "t-exponent", "group": "anosov"},
        "z-floor-sqrt2": {"tag": "floor", "group": "z1", "coefficients": ["sqrt(2)"]},
        "z-residue": {"tag": "residue", "group": "z1", "slope": 2, "modulus": 3},
        "z-identity": {"tag": "linear", "group": "z1", "coefficients": [1]},
        "z3-x-plus-y": {"tag": "linear", "group": "z3", "coefficients": [1, 1, 0]},
        "z3-y": {"tag": "linear", "group": "z3", "coefficients": [0, 1, 0]},
    },
    "actions": {
        "bs2-uhp": {"model": "uhp", "group": "bs2"},
        "bs2-tree": {"model": "bass-serre", "group": "bs2"},
        "anosov-expanding": {"model": "uhp", "group": "anosov", "eigendirection": "expanding"},
        "anosov-contracting": {"model": "uhp", "group": "anosov", "eigendirection": "contracting"},
        "heisenberg-line-a": {"model": "quasi-line", "quasimorphism": "phi-a"},
        "heisenberg-line-b": {"model": "quasi-line", "quasimorphism": "phi-b"},
        "bs2-height-line": {"model": "quasi-line", "quasimorphism": "bs2-height"},
        "anosov-height-line": {"model": "quasi-line", "quasimorphism": "anosov-height"},
        "z-floor-line": {"model": "quasi-line", "quasimorphism": "z-floor-sqrt2"},
        "z-residue-line": {"model": "quasi-line", "quasimorphism": "z-residue"},
        "z-cayley": {"model": "cayley", "group": "z1", "lineal": True},
        "z2-cayley": {"model": "cayley", "group": "z2"},
        "z2-mod-e1": {"model": "quotient", "base": "z2-cayley", "central": "e1"},
        "heisenberg-cayley": {"model": "cayley", "group": "heisenberg"},
        "heisenberg-cayley-mod-c": {"model": "quotient", "base": "heisenberg-cayley", "central": "c", "window": 4},
        "heisenberg-line-a-mod-c": {"model": "quotient", "base": "heisenberg-line-a", "central": "c", "window": 8},
    },
    "extensions": {
        "heisenberg": {"group": "heisenberg", "free": ["c"]},
        "trivial-product": {"group": "z-times-z2", "free": ["e1"]},
        "split-z3": {"group": "z3", "free": ["e3"]},
        "z3-square-twist": {"group": "z3", "free": ["e1", "e2"],
                            "section": {"tag": "square-twist", "coordinate": 2, "central": 0}},
        "z2-c2-parity-twist": {"group": "z2-times-c2", "free": ["e2"], "torsion": ["x"],
                               "section": {"tag": "parity-twist", "coordinate": 0, "torsion": 0}},
        "bs2-z-square-twist": {"group": "bs2-times-z", "free": ["e1"],
                               "section": {"tag": "square-twist", "coordinate": 2, "central": 0}},
        "heisenberg-corrupt": {"group": "heisenberg", "free": ["c"],
                               "section": {"tag": "corrupt", "generator": "b", "image": "b a"}},
    },
    "experiments": [
        {"name": "balls-heisenberg", "command": "balls", "group": "heisenberg", "radius": 6},
        {"name": "balls-bs2", "command": "balls", "group": "bs2", "radius": 6},
        {"name": "balls-anosov", "command": "balls", "group": "anosov", "radius": 5},
        {"name": "properness-bs2", "command": "properness", "group": "bs2",
         "actions": ["bs2-uhp", "bs2-tree"], "radius": 12, "thresholds": [2, 4, 6]},
        {"name": "properness-anosov", "command": "properness", "group": "anosov",
         "actions": ["anosov-expanding", "anosov-contracting"], "radius": 8, "thresholds": [2, 4]},
        {"name": "properness-heisenberg-lines", "command": "properness", "group": "heisenberg",
         "actions": ["heisenberg-line-a", "heisenberg-line-b"], "radius": 10, "thresholds": [1]},
        {"name": "properness-heisenberg-abc-lines", "command": "properness", "group": "heisenberg-abc",
         "actions": ["heisenberg-line-a", "heisenberg-line-b"], "radius": 10, "thresholds": [1]},
        {"name": "cobound-bs2-uhp", "command": "cobound", "action": "bs2-uhp", "radius": 4},
        {"name": "cobound-bs2-tree", "command": "cobound", "action": "bs2-tree", "radius": 4},
        {"name": "cobound-z-line", "command": "cobound", "action": "z-cayley", "radius": 4},
        {"name": "cobound-heisenberg-line-a", "command": "cobound", "action": "heisenberg-line-a", "radius": 4},
        {"name": "euler-heisenberg", "command": "euler", "extension": "heisenberg", "radius": 8},
        {"name": "euler-trivial-product", "command": "euler", "extension": "trivial-product", "radius": 6},
        {"name": "euler-split-z3", "command": "euler", "extension": "split-z3", "radius": 6},
        {"name": "euler-z3-square-twist", "command": "euler", "extension": "z3-square-twist", "radius": 6},
        {"name": "euler-z2-c2-parity-twist", "command": "euler", "extension": "z2-c2-parity-twist", "radius": 6},
        {"name": "euler-bs2-z-square-twist", "command": "euler", "extension": "bs2-z-square-twist", "radius": 4},
        {"name": "euler-heisenberg-corrupt", "command": "euler", "extension": "heisenberg-corrupt", "radius": 4},
        {"name": "retraction-z3", "command": "retraction", "extension": "z3-square-twist",
         "quasimorphisms": ["z3-x-plus-y", "z3-y"], "radius": 6},
        {"name": "crysto-reflection", "command": "crysto", "rank": 2, "matrices": [[[1, 0], [0, -1]]]},
        {"name": "crysto-minus-identity", "command": "crysto", "rank": 2, "matrices": [[[-1, 0], [0, -1]]]},
        {"name": "crysto-triangle", "command": "crysto", "rank": 2, "matrices": [[[0, -1], [1, -1]]]},
        {"name": "crysto-swap", "command": "crysto", "rank": 2, "matrices": [[[0, 1], [1, 0]]]},
        {"name": "qm-z", "command": "qm", "quasimorphisms": ["z-floor-sqrt2", "z-residue", "z-identity"],
         "radius": 6, "elements": ["e1", "e1^3", "e1^-5"], "exponents": [8, 64, 512],
         "lines": ["z-floor-line", "z-residue-line", "z-cayley"]},
        {"name": "qm-heisenberg", "command": "qm", "quasimorphisms": ["phi-a", "phi-b"], "radius": 4,
         "elements": ["a", "b^2 a", "a b a^-1 b^-1"], "exponents": [8, 64, 512],
         "lines": ["heisenberg-line-a", "heisenberg-line-b"]},
        {"name": "qm-heights", "command": "qm", "quasimorphisms": ["bs2-height"], "radius": 4,
         "elements": ["t", "a t^2"], "exponents": [8, 64], "lines": ["bs2-height-line"]},
        {"name": "quotient-z2-mod-e1", "command": "quotient", "action": "z2-mod-e1", "radius": 6},
        {"name": "quotient-heisenberg-line-mod-c", "command": "quotient", "action": "heisenberg-line-a-mod-c",
         "radius": 4},
        {"name": "quotient-heisenberg-cayley-mod-c", "command": "quotient", "action": "heisenberg-cayley-mod-c",
         "radius": 2},
        {"name": "dominance-heisenberg", "command": "dominance", "group": "heisenberg",
         "S": ["a", "b"], "T": ["a", "b", "c"], "radius": 6},
        {"name": "dominance-z", "command": "dominance", "group": "z1", "S": ["e1"], "T": ["e1^2", "e1^3"],
         "radius": 4},
        {"name": "obstruction-heisenberg", "command": "obstruction", "group": "heisenberg", "radius": 2},
        {"name": "obstruction-bs2", "command": "obstruction", "group": "bs2", "radius": 3},
    ],
}


# ---------------------------------------------------------------------------
# Homogenization sample: quasimorphisms with sampled elements
# ---------------------------------------------------------------------------

@dataclass
class HomogenizationFixture:
    qm: Quasimorphism
    elements: list[Element]


def _sample(group: Group, count: int, seed: int) -> list[Element]:
    radius = 1
    ball = enumerate_ball(group, radius)
    while len(ball) < 2 * count:
        radius += 1
        ball = enumerate_ball(group, radius)
    return random.Random(seed).sample(ball.elements, count)


def _floor_of(qm: Quasimorphism, scale, name: str) -> Quasimorphism:
    """``floor(scale * qm)`` for a homomorphism ``qm``; the defect is at most 1."""
    return Quasimorphism(qm.domain, lambda g: floor_scalar(scale * qm(g)), 1, name=name)


def homogenization_fixtures(count: int = 50) -> list[HomogenizationFixture]:
    """Twenty quasimorphisms across the example families, each with ``count`` sampled elements."""
    sqrt2, sqrt3, sqrt5 = QuadScalar.sqrt(2), QuadScalar.sqrt(3), QuadScalar.sqrt(5)
    golden = (1 + sqrt5) / 2
    z1, z2, z3 = FreeAbelian(1), FreeAbelian(2), FreeAbelian(3)
    heis = Heisenberg()
    bs2, bs3 = BaumslagSolitar(2), BaumslagSolitar(3)
    anosov = AnosovTorus([[2, 1], [1, 1]])
    phi_a, phi_b = heisenberg_coordinate(heis, "a"), heisenberg_coordinate(heis, "b")
    qms = [
        floor_quasimorphism(z1, [sqrt2]),
        floor_quasimorphism(z1, [sqrt3]),
        floor_quasimorphism(z1, [QuadScalar(1) / 3]),
        floor_quasimorphism(z1, [golden]),
        residue_quasimorphism(z1, 2, 3),
        residue_quasimorphism(z1, -1, 5),
        residue_quasimorphism(z1, 0, 7),
        floor_quasimorphism(z2, [sqrt2, 1]),
        floor_quasimorphism(z2, [QuadScalar(1) / 2, -sqrt2]),
        floor_quasimorphism(z3, [sqrt5, 2, QuadScalar(-1) / 3]),
        linear_form(z3, [1, 2, 3]),
        phi_a,
        phi_b,
        bounded_perturbation(phi_a, lambda g: g.nf[2] % 4, 3, name="phi_a+(k mod 4)"),
        bounded_perturbation(phi_b, lambda g: int(g.nf[1] > 0), 1, name="phi_b+[n>0]"),
        t_exponent(bs2),
        bounded_perturbation(t_exponent(bs3), lambda g: int(bs3.translation(g) > 0), 1, name="t-exponent+[u>0]"),
        t_exponent(anosov),
        linear_combination([phi_a, phi_b], [2, QuadScalar(-3) / 2]),
        _floor_of(phi_a, sqrt2, "floor(sqrt2*phi_a)"),
    ]
    return [HomogenizationFixture(q, _sample(q.domain, count, seed=1000 + i)) for i, q in enumerate(qms)]


# ---------------------------------------------------------------------------
# Transfer fixtures (index-2 normal subgroups)
# ---------------------------------------------------------------------------

@dataclass
class TransferFixture:
    name: str
    group: Group
    qm: Quasimorphism  # defined on the subgroup, evaluated on ambient elements
    reps: list[Element]
    member: Callable[[Element], bool]
    central: list[Element]  # central elements of the subgroup to test on

    def transferred(self) -> Quasimorphism:
        return transfer(self.qm, self.group, self.reps, self.member)


def transfer_fixtures(radius: int = 5) -> list[TransferFixture]:
    """Index-2 subgroups with a quasimorphism on the subgroup and its central elements up to ``radius``."""
    sqrt2 = QuadScalar.sqrt(2)
    out = []

    z = FreeAbelian(1)
    even = lambda g: g.nf[0] % 2 == 0  # noqa: E731
    ident = Quasimorphism(z, lambda g: g.nf[0], 0, name="identity on 2Z")
    out.append(TransferFixture("Z over 2Z", z, ident, [z(0), z(1)], even,
                               [z(2 * k) for k in range(-radius, radius + 1)]))

    heis = Heisenberg()
    h_even = lambda g: g.nf[0] % 2 == 0  # noqa: E731
    phi = Quasimorphism(heis, lambda g: floor_scalar(sqrt2 * g.nf[1]) + g.nf[2] % 3, 5,
                        name="floor(sqrt2 n) + (k mod 3)")
    out.append(TransferFixture("Heisenberg over even a-exponent", heis, phi, [heis.identity, heis.word("a")],
                               h_even, [heis(0, 0, k) for k in range(-radius, radius + 1)]))

    cryst = Crystallographic(2, [[[1, 0], [0, -1]]])
    lattice = lambda g: g.nf[1] == 0  # noqa: E731
    psi = Quasimorphism(cryst, lambda g: floor_scalar(sqrt2 * g.nf[0][0]) + g.nf[0][1], 1,
                        name="floor(sqrt2 x) + y")
    out.append(TransferFixture("reflection lattice over Z^2", cryst, psi, [cryst.identity, cryst.word("m1")],
                               lattice, [cryst.word(f"e1^{k}") for k in range(-radius, radius + 1)]))
    return out


# ---------------------------------------------------------------------------
# Random rational forms for rank extraction
# ---------------------------------------------------------------------------

def random_rational_forms(rng: random.Random, rank: int = 3) -> list[Quasimorphism]:
    """Between 1 and 5 linear forms on Z^rank with small rational coefficients.

    Some forms are deliberately combinations of earlier ones so the rank varies.
    """

    group = FreeAbelian(rank)
    count = rng.randint(1, 5)
    rows: list[list[Fraction]] = []
    for _ in range(count):
        if rows and rng.random() < 0.4:
            a, b = rng.choice(rows), rng.choice(rows)
            s, t = Fraction(rng.randint(-3, 3), rng.randint(1, 3)), Fraction(rng.randint(-3, 3), rng.randint(1, 3))
            rows.append([s * x + t * y for x, y in zip(a, b)])
        else:
            rows.append([Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(rank)])
    return [linear_form(group, row) for row in rows]
