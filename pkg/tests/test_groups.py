from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from families import derived_families, law_families
from heisenberg_oracle import A as MA, B as MB, C as MC, inv as minv, mul as mmul, to_triple
from hypact.ball import enumerate_ball
from hypact.errors import StructuralError
from hypact.groups import (AnosovTorus, BaumslagSolitar, Crystallographic, CyclicGroup, DirectProduct,
                           FreeAbelian, Heisenberg, QuotientGroup, matrix_closure)

ALL = {**law_families(), **derived_families()}


@st.composite
def triples(draw, name):
    group = ALL[name]
    elems = enumerate_ball(group, 3).elements
    return tuple(draw(st.sampled_from(elems)) for _ in range(3))


@pytest.mark.parametrize("name", sorted(ALL))
@given(data=st.data())
def test_group_axioms(name, data):
    group = ALL[name]
    g, h, k = data.draw(triples(name))
    e = group.identity
    assert (g * h) * k == g * (h * k)
    assert g * e == g == e * g
    assert g * g.inv() == e == g.inv() * g
    assert group.power(g, 3) == g * g * g
    assert group.power(g, -2) == (g * g).inv()


# -- Heisenberg -------------------------------------------------------------

def test_heisenberg_products_match_matrix_oracle():
    H = Heisenberg()
    assert (H(1, 0, 0) * H(0, 1, 0)).nf == (1, 1, 0)
    assert (H(0, 1, 0) * H(1, 0, 0)).nf == to_triple(mmul(MB, MA)) == (1, 1, -1)
    assert H(1, 1, 0).inv().nf == to_triple(minv(mmul(MA, MB))) == (-1, -1, -1)
    assert H.commutator(H.word("a"), H.word("b")) == H.word("c")
    assert to_triple(mmul(mmul(MA, MB), mmul(minv(MA), minv(MB)))) == to_triple(MC)


@given(st.lists(st.sampled_from(["a", "a^-1", "b", "b^-1", "c", "c^-1"]), max_size=12))
def test_heisenberg_words_match_matrix_oracle(word):
    H = Heisenberg()
    letters = {"a": MA, "b": MB, "c": MC}
    m = letters["a"]
    m = mmul(m, minv(m))
    for tok in word:
        x = letters[tok[0]]
        m = mmul(m, minv(x) if tok.endswith("-1") else x)
    assert H.word(" ".join(word)).nf == to_triple(m)


def test_heisenberg_center():
    H = Heisenberg()
    assert H.is_central(H.word("c"))
    assert not H.is_central(H.word("a"))
    assert H.order(H.word("c")) is None


# -- BS(1,n) ----------------------------------------------------------------

def test_bs_relation_and_inverse():
    B = BaumslagSolitar(2)
    t, a = B.word("t"), B.word("a")
    assert t * a * t.inv() == a * a
    g = a * t
    assert g.inv() == B.word("t^-1 a^-1")
    assert B.translation(g.inv()) == Fraction(-1, 2)
    assert B.exponent(g.inv()) == -1


def test_bs_rejects_foreign_denominators():
    B = BaumslagSolitar(2)
    with pytest.raises(StructuralError):
        B(Fraction(1, 3), 0)


def test_bs3_relation():
    B = BaumslagSolitar(3)
    assert B.word("t a t^-1") == B.word("a^3")


# -- crystallographic ---------------------------------------------------------

def test_crystallographic_reflection():
    G = Crystallographic(2, [[[1, 0], [0, -1]]])
    m, e2 = G.word("m1"), G.word("e2")
    assert m * e2 * m.inv() == e2.inv()
    assert m * m == G.identity
    assert G.order(m) == 2
    assert G.is_central(G.word("e1"))


def test_matrix_closure_triangle_group():
    closure = matrix_closure([((0, -1), (1, -1))], 2)
    assert len(closure) == 3


def test_matrix_closure_infinite_group_hits_bound():
    with pytest.raises(StructuralError):
        matrix_closure([((1, 1), (0, 1))], 2, bound=50)


# -- Anosov torus ---------------------------------------------------------------

def test_anosov_conjugation():
    A = AnosovTorus([[2, 1], [1, 1]])
    t, e1, e2 = A.word("t"), A.word("e1"), A.word("e2")
    # t v t^-1 = phi(v)
    assert t * e1 * t.inv() == A.word("e1^2 e2")
    assert t * e2 * t.inv() == A.word("e1 e2")


@pytest.mark.parametrize("matrix", [[[1, 1], [0, 1]], [[2, 0], [0, 1]], [[0, 1], [-1, 0]]])
def test_anosov_rejects_non_hyperbolic(matrix):
    with pytest.raises(StructuralError):
        AnosovTorus(matrix)


# -- constructions ----------------------------------------------------------------

def test_direct_product_renames_colliding_labels():
    P = DirectProduct(FreeAbelian(2), FreeAbelian(1))
    labels = [lbl for lbl, _ in P.generators]
    assert len(labels) == len(set(labels))
    assert len(P.labels) == 3


def test_quotient_by_center_is_abelian():
    H = Heisenberg()
    Q = QuotientGroup(H, [H.word("c")])
    a, b = Q.word("a"), Q.word("b")
    assert a * b == b * a
    assert Q.project(H.word("c")) == Q.identity
    assert Q.project(Q.lift(a * b)) == a * b


def test_cyclic_group():
    C = CyclicGroup(5)
    x = C.word("x")
    assert C.power(x, 5) == C.identity
    assert C.order(x) == 5


def test_mixing_groups_is_rejected():
    H, B = Heisenberg(), BaumslagSolitar(2)
    with pytest.raises(StructuralError):
        H.mul(H.word("a"), B.word("a"))


def test_unknown_generator_token():
    with pytest.raises(StructuralError):
        Heisenberg().word("a q")


def test_with_generators_keeps_group():
    H = Heisenberg()
    H3 = H.with_generators(["a", "b", "c"])
    assert H3.same_group(H)
    assert len(H3.generators) == 6
    assert H3.word("c") == H.word("c")
