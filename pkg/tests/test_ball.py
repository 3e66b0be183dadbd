from __future__ import annotations

import pytest

from frozen import BS2_SPHERE_SIZES_R10, HEISENBERG
from hypact.ball import clear_cache, enumerate_ball, order_key, word_length
from hypact.errors import BudgetError
from hypact.groups import BaumslagSolitar, FreeAbelian, Heisenberg


def test_heisenberg_sphere_sizes():
    assert enumerate_ball(Heisenberg(), 8).sphere_sizes() == HEISENBERG["sphere_sizes_ab_r10"][:9]


@pytest.mark.slow
def test_heisenberg_sphere_sizes_r10():
    assert enumerate_ball(Heisenberg(), 10).sphere_sizes() == HEISENBERG["sphere_sizes_ab_r10"]


def test_bs2_sphere_sizes():
    assert enumerate_ball(BaumslagSolitar(2), 10).sphere_sizes() == BS2_SPHERE_SIZES_R10


def test_free_abelian_sphere_sizes():
    assert enumerate_ball(FreeAbelian(2), 5).sphere_sizes() == [1, 4, 8, 12, 16, 20]


def test_ball_with_central_generator():
    H = Heisenberg().with_generators(["a", "b", "c"])
    assert len(enumerate_ball(H, 2)) == HEISENBERG["naive_ball_abc_r2"]


def test_word_length_of_commutator():
    H = Heisenberg()
    assert word_length(H, H.word("c")) == HEISENBERG["length_of_c"]
    assert word_length(H, H.identity) == 0


def test_word_length_agrees_with_ball():
    H = Heisenberg()
    ball = enumerate_ball(H, 5)
    for g in ball.elements[::37]:
        assert word_length(H, g) == ball.length(g)


def test_word_length_budget_reports_lower_bound():
    H = Heisenberg()
    with pytest.raises(BudgetError) as info:
        word_length(H, H.word("c^40"), budget=200)
    assert info.value.partial["lower_bound"] >= 1


def test_ball_budget_reports_complete_radius():
    clear_cache()
    with pytest.raises(BudgetError) as info:
        enumerate_ball(BaumslagSolitar(2), 10, budget=100)
    assert info.value.partial["complete_radius"] == 4
    assert info.value.partial["elements"] == sum(BS2_SPHERE_SIZES_R10[:5])


def test_cache_restriction_and_extension_agree():
    clear_cache()
    G = BaumslagSolitar(2)
    small = enumerate_ball(G, 4)
    big = enumerate_ball(G, 7)
    assert [g.nf for g in big.restrict(4)] == [g.nf for g in small]
    clear_cache()
    fresh = enumerate_ball(G, 7)
    assert [g.nf for g in fresh] == [g.nf for g in big]


def test_ball_order_is_deterministic():
    ball = enumerate_ball(FreeAbelian(2), 3)
    for k in range(4):
        sphere = ball.sphere(k)
        assert [order_key(g.nf) for g in sphere] == sorted(order_key(g.nf) for g in sphere)
    assert ball.to_csv().splitlines()[0] == "element,word_length"


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        enumerate_ball(FreeAbelian(1), -1)
