from __future__ import annotations

from fractions import Fraction

import pytest

from crysto_oracle import FIXTURES as CRYSTO_FIXTURES, conjugator
from frozen import ANOSOV_SUBLEVEL, BS2_SUBLEVEL, CRYSTO
from hypact.ball import enumerate_ball
from hypact.errors import ContractError, StructuralError
from hypact.groups import AnosovTorus, BaumslagSolitar, FreeAbelian, Heisenberg
from hypact.quasimorph import heisenberg_coordinate
from hypact.scalar import QuadScalar
from hypact.spaces import BassSerreTree, CayleyAction, CoshDistance, QuasiLine, anosov_uhp_actions, bs_uhp_action
from hypact.verify import (Displacement, coboundedness_window, crysto_decide, displacement, displacement_profile,
                           dominance_compare, properness_report)

BS2 = BaumslagSolitar(2)


def test_displacement_exact_and_mixed():
    bs = [bs_uhp_action(BS2), BassSerreTree(BS2)]
    d = displacement(bs, BS2.word("t"))
    # cosh d(i, 2i) = 5/4 plus one tree edge
    assert d.exact == 1 and d.cosh_terms == (QuadScalar(Fraction(5, 4)),)
    assert d.compare(1) == 1
    assert d.compare(2) == -1  # arccosh(5/4) = log 2
    assert "digits" in d.text()


def test_displacement_compare_near_threshold():
    d = Displacement.from_distances([CoshDistance(QuadScalar(Fraction(5, 4)))])
    # log 2 = 0.693147...; separate it from rationals a hair away
    assert d.compare(Fraction(693147, 10 ** 6)) == 1
    assert d.compare(Fraction(693148, 10 ** 6)) == -1


def test_exact_displacement_compares_exactly():
    line = QuasiLine(heisenberg_coordinate(Heisenberg(), "a"))
    d = displacement([line], Heisenberg().word("a^2 b"))
    assert d.is_exact and d.compare(2) == 0 and d.text() == "2"


def test_bs2_profile_matches_oracle():
    prof = displacement_profile(BS2, [bs_uhp_action(BS2), BassSerreTree(BS2)], 10, thresholds=[2, 4, 6])
    for c, row in BS2_SUBLEVEL.items():
        counts = prof.counts[str(c)]
        cum = row["cumulative_by_radius"]
        expect = cum + [cum[-1]] * (11 - len(cum))
        assert counts == expect
    # the C = 6 count reaches its final value at R = 10 itself, so stability
    # is only visible from R = 11 on; C = 2 and C = 4 are settled by R = 10
    assert properness_report(prof, [2, 4]).verdict == "proper-evidence"
    rows = properness_report(prof, [2, 4]).per_threshold
    assert [r["stabilization_radius"] for r in rows] == [2, 6]


@pytest.mark.slow
def test_bs2_profile_stabilizes_by_r12():
    prof = displacement_profile(BS2, [bs_uhp_action(BS2), BassSerreTree(BS2)], 12, thresholds=[2, 4, 6])
    report = properness_report(prof)
    assert report.verdict == "proper-evidence"
    assert [r["stabilization_radius"] for r in report.per_threshold] == [2, 6, 10]


def test_anosov_profile_matches_oracle():
    A = AnosovTorus([[2, 1], [1, 1]])
    prof = displacement_profile(A, list(anosov_uhp_actions(A)), 6, thresholds=[2, 4])
    for c, row in ANOSOV_SUBLEVEL.items():
        cum = row["cumulative_by_radius"]
        assert prof.counts[str(c)] == cum + [cum[-1]] * (7 - len(cum))
    assert properness_report(prof).verdict == "proper-evidence"


def test_heisenberg_lines_not_proper():
    H = Heisenberg()
    lines = [QuasiLine(heisenberg_coordinate(H, "a")), QuasiLine(heisenberg_coordinate(H, "b"))]
    prof = displacement_profile(H, lines, 6, thresholds=[1])
    counts = prof.counts["1"]
    assert counts[-1] > counts[-2]
    assert properness_report(prof).verdict == "not-proper-evidence"
    # c^k is never displaced
    assert all(displacement(lines, H.power(H.word("c"), k)).exact == 0 for k in range(-20, 21))


def test_profile_rejects_foreign_action():
    with pytest.raises(StructuralError):
        displacement_profile(Heisenberg(), [bs_uhp_action(BS2)], 2)


def test_properness_report_needs_counts():
    prof = displacement_profile(BS2, [BassSerreTree(BS2)], 2, thresholds=[1])
    with pytest.raises(ContractError):
        properness_report(prof, [5])


# -- coboundedness ------------------------------------------------------------

def test_cobound_integer_line():
    Z = FreeAbelian(1)
    rep = coboundedness_window(CayleyAction(Z, lineal=True), enumerate_ball(Z, 4))
    assert rep.covering_radius == Fraction(1, 2)


def test_cobound_tree_is_zero():
    rep = coboundedness_window(BassSerreTree(BS2), enumerate_ball(BS2, 4))
    assert rep.covering_radius == 0


def test_cobound_uhp_is_finite():
    rep = coboundedness_window(bs_uhp_action(BS2), enumerate_ball(BS2, 4))
    assert isinstance(rep.covering_radius, CoshDistance)
    assert rep.covering_radius.cosh < 2


def test_cobound_line_needs_two_sided_orbit():
    Z = FreeAbelian(1)
    with pytest.raises(ContractError):
        coboundedness_window(CayleyAction(Z, lineal=True), enumerate_ball(Z, 0))


# -- crystallographic decider ---------------------------------------------------

@pytest.mark.parametrize("name", sorted(CRYSTO))
def test_crysto_agrees_with_oracle(name):
    gens = CRYSTO_FIXTURES[name]
    decision = crysto_decide([list(map(list, m)) for m in gens], 2)
    assert decision.to_json()["verdict"] == CRYSTO[name]
    assert (conjugator(gens) is not None) == decision.verdict


def test_crysto_witnesses():
    assert crysto_decide([[[0, -1], [1, -1]]], 2).witness["order"] == 3
    swap = crysto_decide([[[0, 1], [1, 0]]], 2)
    assert swap.reason == "eigenlattice-index" and swap.witness["index"] == 2
    minus = crysto_decide([[[-1, 0], [0, -1]]], 2)
    assert minus.verdict and minus.witness["basis"] == [[1, 0], [0, 1]]


def test_crysto_noncommuting():
    d = crysto_decide([[[1, 0], [0, -1]], [[0, 1], [1, 0]]], 2)
    assert not d.verdict and d.reason in ("order", "noncommuting")


def test_crysto_rejects_bad_input():
    with pytest.raises(StructuralError):
        crysto_decide([[[2, 0], [0, 1]]], 2)
    with pytest.raises(StructuralError):
        crysto_decide([[[1, 0, 0], [0, 1, 0]]], 2)


# -- dominance -------------------------------------------------------------------

def test_dominance_heisenberg():
    d = dominance_compare(Heisenberg(), ["a", "b"], ["a", "b", "c"], 6)
    assert (d.sup_t_in_s, d.sup_s_in_t) == (4, 1)


def test_dominance_integers():
    d = dominance_compare(FreeAbelian(1), ["e1"], ["e1^2", "e1^3"], 4)
    assert (d.sup_t_in_s, d.sup_s_in_t) == (3, 2)


def test_dominance_detects_non_generating_set():
    with pytest.raises(StructuralError):
        dominance_compare(FreeAbelian(1), ["e1"], ["e1^2"], 3)
