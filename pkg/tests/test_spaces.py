from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bs_sublevel_oracle import tree_distance
from hypact.ball import enumerate_ball
from hypact.errors import ContractError, StructuralError
from hypact.groups import AnosovTorus, BaumslagSolitar, FreeAbelian, Heisenberg
from hypact.quasimorph import floor_quasimorphism, heisenberg_coordinate
from hypact.scalar import QuadScalar
from hypact.spaces import (BassSerreTree, CayleyAction, CoshDistance, QuasiLine, QuotientSpace, TreeVertex,
                           UHPoint, anosov_uhp_actions, bs_uhp_action, classify_isometry, left_eigenvector)

BS2 = BaumslagSolitar(2)
BS2_BALL = enumerate_ball(BS2, 4).elements
ANOSOV = AnosovTorus([[2, 1], [1, 1]])
ANOSOV_BALL = enumerate_ball(ANOSOV, 3).elements


def test_bs_uhp_generators():
    act = bs_uhp_action(BS2)
    i = act.basepoint
    assert act.act(BS2.word("t"), i) == UHPoint(0, 2)
    assert act.act(BS2.word("a"), i) == UHPoint(1, 1)
    assert act.dist(i, UHPoint(0, 2)) == CoshDistance(QuadScalar(Fraction(5, 4)))


@given(st.sampled_from(BS2_BALL), st.sampled_from(BS2_BALL))
def test_bs_uhp_is_an_action(g, h):
    act = bs_uhp_action(BS2)
    p = UHPoint(Fraction(1, 3), Fraction(2, 5))
    assert act.act(g * h, p) == act.act(g, act.act(h, p))
    q = act.basepoint
    assert act.dist(act.act(g, p), act.act(g, q)) == act.dist(p, q)


@given(st.sampled_from(ANOSOV_BALL), st.sampled_from(ANOSOV_BALL))
def test_anosov_actions_are_actions(g, h):
    for act in anosov_uhp_actions(ANOSOV):
        o = act.basepoint
        assert act.act(g * h, o) == act.act(g, act.act(h, o))


def test_left_eigenvector():
    lam, (w1, w2) = left_eigenvector([[2, 1], [1, 1]])
    assert lam == (3 + QuadScalar.sqrt(5)) / 2
    # w phi = lam w
    assert w1 * 2 + w2 * 1 == lam * w1
    assert w1 * 1 + w2 * 1 == lam * w2


def test_uhp_rejects_lower_half_plane():
    with pytest.raises(StructuralError):
        UHPoint(0, -1)


@given(st.sampled_from(BS2_BALL))
def test_tree_distance_matches_oracle(g):
    tree = BassSerreTree(BS2)
    d = tree.displacement(g)
    assert d == tree_distance(BS2.exponent(g), BS2.translation(g))


@given(st.sampled_from(BS2_BALL), st.sampled_from(BS2_BALL))
def test_tree_action_and_metric(g, h):
    tree = BassSerreTree(BS2)
    o = tree.basepoint
    p = tree.act(h, o)
    assert tree.act(g * h, o) == tree.act(g, p)
    assert tree.dist(tree.act(g, o), tree.act(g, p)) == tree.dist(o, p)
    assert tree.dist(o, p) == tree.dist(p, o)


def test_tree_codes_round_trip():
    tree = BassSerreTree(BS2)
    for g in BS2_BALL:
        v = tree.vertex_of(g)
        p, q, m = v.code
        assert TreeVertex.from_code(2, p, q, m) == v
        assert p == 0 or q == 0 or m % 2 == 1
    assert TreeVertex.make(2, 0, 0) == tree.basepoint


def test_tree_neighbours_are_at_distance_one():
    tree = BassSerreTree(BS2)
    v = tree.vertex_of(BS2.word("a t^-1 a"))
    nbrs = tree.neighbours(v)
    assert len(nbrs) == 3
    assert all(tree.dist(v, w) == 1 for w in nbrs)


def test_cayley_l1_fast_path_equals_search():
    Z2 = FreeAbelian(2)
    fast = CayleyAction(Z2)
    slow = CayleyAction(Z2)
    slow._l1 = False
    assert fast._l1
    pts = enumerate_ball(Z2, 3).elements
    for p, q in itertools.product(pts[::3], pts[::5]):
        assert fast.dist(p, q) == slow.dist(p, q)


def test_cayley_heisenberg_distance():
    H = Heisenberg()
    act = CayleyAction(H)
    assert act.dist(H.identity, H.word("c")) == 4
    assert act.dist(H.word("a"), H.word("a b")) == 1


def test_quasi_line_displacement():
    Z = FreeAbelian(1)
    line = QuasiLine(floor_quasimorphism(Z, [QuadScalar.sqrt(2)]))
    assert line.displacement(Z.word("e1^3")) == 4
    assert line.eps == 1 and line.lineal and line.orientable


def test_quotient_of_plane_by_axis():
    Z2 = FreeAbelian(2)
    space = QuotientSpace(CayleyAction(Z2), Z2.word("e1"), k_max=8)
    pts = enumerate_ball(Z2, 4).elements
    for p, q in itertools.product(pts[::4], pts[::7]):
        assert space.dist(p, q) == abs(p.nf[1] - q.nf[1])


def test_quotient_window_grows_until_interior_minimum():
    Z2 = FreeAbelian(2)
    space = QuotientSpace(CayleyAction(Z2), Z2.word("e1"), k_max=2)
    res = space.quotient_distance(Z2.identity, Z2.word("e1^10 e2"))
    assert res.value == 1 and res.shift == -10 and not res.uncertain
    assert res.window >= 10


def test_quotient_reports_uncertain_at_limit():
    Z2 = FreeAbelian(2)
    space = QuotientSpace(CayleyAction(Z2), Z2.word("e1"), k_max=2, k_limit=4)
    assert space.quotient_distance(Z2.identity, Z2.word("e1^30")).uncertain


def test_quotient_needs_central_element():
    H = Heisenberg()
    with pytest.raises(ContractError):
        QuotientSpace(CayleyAction(H), H.word("a"))


def test_quotient_is_pseudometric_below_base():
    H = Heisenberg()
    base = QuasiLine(heisenberg_coordinate(H, "a"))
    space = QuotientSpace(base, H.word("c"), k_max=4)
    rng = random.Random(7)
    pts = enumerate_ball(H, 3).elements
    for _ in range(200):
        p, q, r = (base.act(rng.choice(pts), 0) for _ in range(3))
        assert space.dist(p, q) <= base.dist(p, q)
        assert space.dist(p, r) <= space.dist(p, q) + space.dist(q, r)


def test_classify_isometry():
    act = bs_uhp_action(BS2)
    assert classify_isometry(act, BS2.word("t")).verdict == "loxodromic-evidence"
    assert classify_isometry(act, BS2.word("a")).verdict == "inconclusive"
    tree = BassSerreTree(BS2)
    assert classify_isometry(tree, BS2.word("a")).verdict == "elliptic-evidence"
    with pytest.raises(ContractError):
        classify_isometry(act, BS2.word("t"), m_max=2)
