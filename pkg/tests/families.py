"""Group families shared by the test modules."""

from __future__ import annotations

from hypact.groups import (AmalgamatedProduct, AnosovTorus, BaumslagSolitar, Crystallographic, CyclicGroup,
                           DirectProduct, FreeAbelian, Heisenberg, QuotientGroup)


def law_families() -> dict:
    """The families of the group-law suite."""
    return {
        "heisenberg": Heisenberg(),
        "bs2": BaumslagSolitar(2),
        "bs3": BaumslagSolitar(3),
        "z3": FreeAbelian(3),
        "reflection-lattice": Crystallographic(2, [[[1, 0], [0, -1]]]),
        "anosov": AnosovTorus([[2, 1], [1, 1]]),
    }


def derived_families() -> dict:
    heis = Heisenberg()
    z2 = FreeAbelian(2)
    return {
        "z2-x-c3": DirectProduct(z2, CyclicGroup(3)),
        "heisenberg-mod-c": QuotientGroup(heis, [heis.word("c")]),
        "heisenberg-amalgam": AmalgamatedProduct(heis, z2, [heis.word("c")], [z2.word("e1")]),
        "bs2-x-z": DirectProduct(BaumslagSolitar(2), FreeAbelian(1)),
    }
