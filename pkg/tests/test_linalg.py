from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from sympy.matrices.normalforms import smith_normal_form
from hypothesis import strategies as st

from hypact import linalg
from hypact.scalar import QuadScalar

small = st.integers(min_value=-6, max_value=6)


def int_matrices(rows=st.integers(1, 4), cols=st.integers(1, 4)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(small, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0]))


def square(n=st.integers(1, 4)):
    return n.flatmap(lambda k: st.lists(st.lists(small, min_size=k, max_size=k), min_size=k, max_size=k))


@given(int_matrices())
def test_rank_matches_sympy(m):
    assert linalg.rank(m) == sympy.Matrix(m).rank()


@given(square())
def test_det_matches_sympy(m):
    assert linalg.det(m) == sympy.Matrix(m).det()


@given(square())
def test_inverse_roundtrip(m):
    if sympy.Matrix(m).det() == 0:
        with pytest.raises(ZeroDivisionError):
            linalg.inverse(m)
        return
    inv = linalg.inverse(m)
    assert linalg.mat_mul(m, inv) == linalg.identity(len(m))


@given(int_matrices())
def test_integer_echelon_transform(m):
    e, u = linalg.integer_echelon(m)
    assert linalg.mat_mul(u, m) == e
    assert abs(linalg.integer_det(u)) == 1


@given(int_matrices())
def test_integer_kernel_is_saturated_basis(m):
    ncols = len(m[0])
    basis = linalg.integer_kernel(m, ncols)
    assert len(basis) == ncols - sympy.Matrix(m).rank()
    for v in basis:
        assert linalg.mat_vec(m, v) == [0] * len(m)
    if basis:
        # saturated: the gcd of the maximal minors is 1 (Smith form has unit invariants)
        smith = smith_normal_form(sympy.Matrix(basis), domain=sympy.ZZ)
        assert all(abs(smith[i, i]) == 1 for i in range(len(basis)))


def test_independent_rows_earliest_first():
    rows = [[1, 2], [2, 4], [0, 1], [1, 1]]
    assert linalg.independent_rows(rows) == [0, 2]


def test_quadratic_entries():
    r5 = QuadScalar.sqrt(5)
    m = [[1, r5], [r5, 1]]
    assert linalg.det(m) == -4
    inv = linalg.inverse(m)
    assert linalg.mat_mul(m, inv) == [[1, 0], [0, 1]]
    assert linalg.rank([[1, r5], [r5, 5]]) == 1


def test_kernel_of_swap_minus_identity():
    # swap - I has kernel spanned by (1, 1)
    basis = linalg.integer_kernel([[-1, 1], [1, -1]], 2)
    assert basis in ([[1, 1]], [[-1, -1]])


def test_echelon_pivots():
    m, piv = linalg.echelon([[0, 2, 4], [0, 1, 2], [1, 0, 1]])
    assert piv == [0, 1]
    assert m[0] == [1, 0, 1] and m[1] == [0, 1, 2]
    assert all(x == Fraction(0) for x in m[2])
