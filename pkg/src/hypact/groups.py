"""Normal-form arithmetic for the example groups.

Every group is a :class:`Group` subclass that knows how to multiply and invert
normal forms (plain nested tuples of ints).  Group elements are
:class:`Element` objects pairing a normal form with the group handle that
produced it, so products of elements from different groups are caught.

A handle also carries a designated finite symmetric generating set with
labels; :meth:`Group.with_generators` returns a handle for the same group with
another generating set (and therefore another word metric).
"""

from __future__ import annotations

import copy
import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .errors import StructuralError

__all__ = [
    "Element",
    "Group",
    "FreeAbelian",
    "CyclicGroup",
    "Heisenberg",
    "BaumslagSolitar",
    "Crystallographic",
    "AnosovTorus",
    "DirectProduct",
    "QuotientGroup",
    "AmalgamatedProduct",
]

NF = tuple


class Element:
    """A group element: a normal form bound to its group."""

    __slots__ = ("group", "nf")

    def __init__(self, group: Group, nf: NF):
        self.group = group
        self.nf = nf

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.nf == other.nf and (
            self.group is other.group or self.group.signature == other.group.signature
        )

    def __hash__(self):
        return hash(self.nf)

    def __mul__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.group.mul(self, other)

    def __pow__(self, k: int):
        return self.group.power(self, k)

    def inv(self) -> Element:
        return self.group.inv(self)

    def is_identity(self) -> bool:
        return self.nf == self.group.identity_nf

    def __repr__(self):
        return f"<{self.group.family} {self.group.format(self)}>"

    def __str__(self):
        return self.group.format(self)


_TOKEN = re.compile(r"^(?P<label>[A-Za-z_][\w.]*)(?:\^(?P<exp>[+-]?\d+))?$")


class Group:
    """Base class: subclasses implement ``_mul``, ``_inv`` and ``identity_nf``."""

    family = "abstract"
    identity_nf: NF = ()
    torsion_free = False
    default_labels: tuple[str, ...] = ()

    def __init__(self, labels: Sequence[str] | None = None):
        self._set_generators(labels if labels is not None else self.default_labels)

    # -- identity of the group ----------------------------------------------
    @property
    def signature(self) -> tuple:
        """Hashable description of the abstract group (not the generating set)."""
        return (self.family, self.params())

    def params(self) -> tuple:
        return ()

    def describe(self) -> dict:
        return {"family": self.family, "generators": [lbl for lbl, _ in self.generators]}

    def same_group(self, other: Group) -> bool:
        return self is other or self.signature == other.signature

    def check(self, *elements: Element) -> None:
        for g in elements:
            if not isinstance(g, Element) or not (g.group is self or g.group.signature == self.signature):
                raise StructuralError(
                    f"element {g!r} does not belong to {self.family} group {self.params()}"
                )

    # -- named generators and words -------------------------------------------
    def named(self) -> dict[str, NF]:
        """Named base generators (label -> normal form)."""
        return {}

    def element(self, nf: NF) -> Element:
        return Element(self, nf)

    @property
    def identity(self) -> Element:
        return Element(self, self.identity_nf)

    def word(self, text: str) -> Element:
        """Evaluate a word such as ``"a b^-1 c^2"`` (``*`` also separates letters)."""
        names = self.named()
        result = self.identity_nf
        for tok in text.replace("*", " ").split():
            m = _TOKEN.match(tok)
            if not m or m.group("label") not in names:
                raise StructuralError(f"unknown generator token {tok!r} for {self.family}")
            base = names[m.group("label")]
            exp = int(m.group("exp") or 1)
            result = self._mul(result, self._pow(base, exp))
        return Element(self, result)

    def _set_generators(self, labels: Sequence[str]) -> None:
        gens: list[tuple[str, Element]] = []
        seen = {self.identity_nf}
        for label in labels:
            g = self.word(label)
            for lbl, h in ((label, g), (_inverse_label(label), self.inv(g))):
                if h.nf not in seen:
                    seen.add(h.nf)
                    gens.append((lbl, h))
        self.generators: tuple[tuple[str, Element], ...] = tuple(gens)
        self.labels = tuple(labels)

    def with_generators(self, labels: Sequence[str]) -> Group:
        """Same group, different designated generating set."""
        other = copy.copy(self)
        other._set_generators(labels)
        return other

    def with_generating_elements(self, elements: Iterable[Element], labels: Sequence[str] | None = None) -> Group:
        """Same group with generators given as elements (closed under inverses)."""
        elements = list(elements)
        self.check(*elements)
        other = copy.copy(self)
        gens: list[tuple[str, Element]] = []
        seen = {self.identity_nf}
        labels = list(labels) if labels is not None else [self.format(g) for g in elements]
        for label, g in zip(labels, elements):
            for lbl, h in ((label, g), (_inverse_label(label), self.inv(g))):
                if h.nf not in seen:
                    seen.add(h.nf)
                    gens.append((lbl, h))
        other.generators = tuple(gens)
        other.labels = tuple(labels)
        return other

    # -- arithmetic -----------------------------------------------------------
    def _mul(self, x: NF, y: NF) -> NF:
        raise NotImplementedError

    def _inv(self, x: NF) -> NF:
        raise NotImplementedError

    def _pow(self, x: NF, k: int) -> NF:
        if k < 0:
            x, k = self._inv(x), -k
        result = self.identity_nf
        while k:
            if k & 1:
                result = self._mul(result, x)
            x = self._mul(x, x)
            k >>= 1
        return result

    def mul(self, g: Element, h: Element) -> Element:
        self.check(g, h)
        return Element(self, self._mul(g.nf, h.nf))

    def inv(self, g: Element) -> Element:
        self.check(g)
        return Element(self, self._inv(g.nf))

    def power(self, g: Element, k: int) -> Element:
        self.check(g)
        return Element(self, self._pow(g.nf, k))

    def prod(self, *elements: Element) -> Element:
        self.check(*elements)
        nf = self.identity_nf
        for g in elements:
            nf = self._mul(nf, g.nf)
        return Element(self, nf)

    def commutator(self, g: Element, h: Element) -> Element:
        """``[g, h] = g h g^-1 h^-1``."""
        self.check(g, h)
        x, y = g.nf, h.nf
        return Element(self, self._mul(self._mul(x, y), self._mul(self._inv(x), self._inv(y))))

    def conjugate(self, h: Element, g: Element) -> Element:
        """``h g h^-1``."""
        self.check(g, h)
        return Element(self, self._mul(self._mul(h.nf, g.nf), self._inv(h.nf)))

    # -- structure --------------------------------------------------------------
    def key(self, g: Element):
        return g.nf

    def format(self, g: Element) -> str:
        return "(" + ",".join(str(x) for x in _flatten(g.nf)) + ")"

    def size_bits(self, g: Element) -> int:
        return sum(abs(int(x)).bit_length() for x in _flatten(g.nf))

    def is_central(self, g: Element) -> bool:
        """Commutes with every named generator (hence with the whole group)."""
        self.check(g)
        return all(self._mul(g.nf, s) == self._mul(s, g.nf) for s in self.named().values())

    def order(self, g: Element, bound: int = 4096) -> int | None:
        """Order of ``g``; ``None`` means infinite (exact for torsion-free families)."""
        self.check(g)
        if g.nf == self.identity_nf:
            return 1
        if self.torsion_free:
            return None
        x = g.nf
        for k in range(2, bound + 1):
            x = self._mul(x, g.nf)
            if x == self.identity_nf:
                return k
        return None

    def central_reduce(self, g: Element, zgens: Sequence[Element]) -> tuple[Element, list[int]]:
        """Canonical representative of ``g`` modulo the central subgroup ``<zgens>``.

        Returns ``(rep, coeffs)`` with ``g == rep * prod(z_i ** coeffs_i)``.
        """
        if not zgens:
            return g, []
        raise StructuralError(f"central reduction is not available for the {self.family} family")

    def __repr__(self):
        return f"{type(self).__name__}{self.params()}"


def _inverse_label(label: str) -> str:
    label = label.strip()
    if " " in label or "*" in label:
        return f"({label})^-1"
    m = _TOKEN.match(label)
    if m and m.group("exp"):
        e = -int(m.group("exp"))
        return m.group("label") if e == 1 else f"{m.group('label')}^{e}"
    return f"{label}^-1"


def _flatten(t):
    if isinstance(t, tuple):
        for x in t:
            yield from _flatten(x)
    else:
        yield t


def _reduce_integer(value: int, multipliers: Sequence[int], modulus: int = 0) -> tuple[int, list[int]]:
    """Reduce ``value`` modulo the subgroup of Z (or Z/modulus) generated by ``multipliers``.

    Returns ``(rem, coeffs)`` with ``value == rem + sum(c*m)`` (mod ``modulus``)
    and ``rem`` the least non-negative representative.
    """
    g, coeffs = modulus, [0] * len(multipliers)
    # running Bezout combination: g == sum(coeffs[i]*multipliers[i]) (mod modulus)
    for i, m in enumerate(multipliers):
        if m == 0:
            continue
        if g == 0:
            g, coeffs = abs(m), [0] * len(multipliers)
            coeffs[i] = 1 if m > 0 else -1
            continue
        d, x, y = _egcd(g, m)
        coeffs = [x * c for c in coeffs]
        coeffs[i] += y
        g = d
    if g == 0:
        return value, [0] * len(multipliers)
    q, rem = divmod(value, g)
    if modulus:
        rem %= modulus
    return rem, [q * c for c in coeffs]


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# Abelian families
# ---------------------------------------------------------------------------

class FreeAbelian(Group):
    """Z^r with generators ``e1 .. er``."""

    family = "free-abelian"
    torsion_free = True

    def __init__(self, rank: int, labels: Sequence[str] | None = None):
        if rank < 1:
            raise StructuralError("rank must be positive")
        self.rank = rank
        self.identity_nf = (0,) * rank
        self.default_labels = tuple(f"e{i + 1}" for i in range(rank))
        super().__init__(labels)

    def params(self):
        return (self.rank,)

    def describe(self):
        return {**super().describe(), "rank": self.rank}

    def named(self):
        return {f"e{i + 1}": tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)}

    def __call__(self, *coords: int) -> Element:
        if len(coords) != self.rank:
            raise StructuralError(f"expected {self.rank} coordinates")
        return Element(self, tuple(int(c) for c in coords))

    def _mul(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def _inv(self, x):
        return tuple(-a for a in x)

    def _pow(self, x, k):
        return tuple(k * a for a in x)

    def is_central(self, g):
        self.check(g)
        return True

    def central_reduce(self, g, zgens):
        self.check(g, *zgens)
        if not zgens:
            return g, []
        h, u = linalg.integer_echelon([list(z.nf) for z in zgens])
        v = list(g.nf)
        coeff_h = [0] * len(h)
        for j, row in enumerate(h):
            piv = next((c for c, x in enumerate(row) if x), None)
            if piv is None:
                continue
            q = v[piv] // row[piv]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
                coeff_h[j] = q
        coeffs = [sum(coeff_h[j] * u[j][i] for j in range(len(h))) for i in range(len(zgens))]
        return Element(self, tuple(v)), coeffs


class CyclicGroup(Group):
    """Finite cyclic group Z/n with generator ``x``."""

    family = "cyclic"
    default_labels = ("x",)

    def __init__(self, order: int, labels: Sequence[str] | None = None):
        if order < 1:
            raise StructuralError("order must be positive")
        self.n = order
        self.identity_nf = (0,)
        super().__init__(labels)

    def params(self):
        return (self.n,)

    def describe(self):
        return {**super().describe(), "order": self.n}

    def named(self):
        return {"x": (1 % self.n,)}

    def __call__(self, k: int) -> Element:
        return Element(self, (k % self.n,))

    def _mul(self, x, y):
        return ((x[0] + y[0]) % self.n,)

    def _inv(self, x):
        return ((-x[0]) % self.n,)

    def _pow(self, x, k):
        return ((k * x[0]) % self.n,)

    def is_central(self, g):
        self.check(g)
        return True

    def order(self, g, bound=4096):
        self.check(g)
        return self.n // math.gcd(self.n, g.nf[0])

    def central_reduce(self, g, zgens):
        self.check(g, *zgens)
        rem, coeffs = _reduce_integer(g.nf[0], [z.nf[0] for z in zgens], self.n)
        return Element(self, (rem,)), coeffs


# ---------------------------------------------------------------------------
# Heisenberg group
# ---------------------------------------------------------------------------

class Heisenberg(Group):
    """``<a, b, c | [a,c] = [b,c] = 1, [a,b] = c>`` in normal form ``a^m b^n c^k``.

    From ``ab = c ba`` one gets
    ``(m,n,k)(m',n',k') = (m+m', n+n', k+k' - n*m')``.
    """

    family = "heisenberg"
    identity_nf = (0, 0, 0)
    torsion_free = True
    default_labels = ("a", "b")

    def named(self):
        return {"a": (1, 0, 0), "b": (0, 1, 0), "c": (0, 0, 1)}

    def __call__(self, m: int, n: int, k: int) -> Element:
        return Element(self, (int(m), int(n), int(k)))

    def _mul(self, x, y):
        m, n, k = x
        m2, n2, k2 = y
        return (m + m2, n + n2, k + k2 - n * m2)

    def _inv(self, x):
        m, n, k = x
        return (-m, -n, -k - n * m)

    def _pow(self, x, j):
        # (m,n,k)^j = (jm, jn, jk - mn*j(j-1)/2)
        m, n, k = x
        return (j * m, j * n, j * k - m * n * (j * (j - 1) // 2))

    def format(self, g):
        m, n, k = g.nf
        return f"a^{m} b^{n} c^{k}"

    def is_central(self, g):
        self.check(g)
        return g.nf[0] == 0 and g.nf[1] == 0

    def central_reduce(self, g, zgens):
        self.check(g, *zgens)
        if any(z.nf[:2] != (0, 0) for z in zgens):
            raise StructuralError("central subgroup generators must be powers of c")
        m, n, k = g.nf
        rem, coeffs = _reduce_integer(k, [z.nf[2] for z in zgens])
        return Element(self, (m, n, rem)), coeffs


# ---------------------------------------------------------------------------
# Baumslag-Solitar groups BS(1, n)
# ---------------------------------------------------------------------------

class BaumslagSolitar(Group):
    """``BS(1,n) = <a, t | t a t^-1 = a^n>`` as the affine group Z[1/n] x| Z.

    The element ``a^r t^k`` is stored as ``(u, e, k)`` with ``r = u / n^e`` and
    ``e == 0 or n does not divide u``; it acts on the line by ``x -> n^k x + r``
    and the product is ``(r,k)(r',k') = (r + n^k r', k + k')``.
    """

    family = "bs"
    identity_nf = (0, 0, 0)
    torsion_free = True
    default_labels = ("a", "t")

    def __init__(self, n: int, labels: Sequence[str] | None = None):
        if n < 2:
            raise StructuralError("BS(1,n) requires n >= 2")
        self.n = n
        super().__init__(labels)

    def params(self):
        return (self.n,)

    def describe(self):
        return {**super().describe(), "n": self.n}

    def named(self):
        return {"a": (1, 0, 0), "t": (0, 0, 1)}

    def _canon(self, u: int, e: int) -> tuple[int, int]:
        n = self.n
        if u == 0:
            return 0, 0
        if e < 0:
            return u * n ** (-e), 0
        while e > 0 and u % n == 0:
            u //= n
            e -= 1
        return u, e

    def __call__(self, r, k: int) -> Element:
        r = Fraction(r)
        rest = r.denominator
        while (g := math.gcd(rest, self.n)) > 1:
            rest //= g
        if rest != 1:
            raise StructuralError(f"{r} is not in Z[1/{self.n}]")
        e = 0
        while (r * self.n ** e).denominator != 1:
            e += 1
        u = int(r * self.n ** e)
        return Element(self, (*self._canon(u, e), int(k)))

    def translation(self, g: Element) -> Fraction:
        u, e, _ = g.nf
        return Fraction(u, self.n ** e)

    def exponent(self, g: Element) -> int:
        return g.nf[2]

    def _mul(self, x, y):
        u, e, k = x
        u2, e2, k2 = y
        n = self.n
        # n^k * u2 / n^e2 = u2 / n^(e2 - k)
        e2s = e2 - k
        if e2s < 0:
            u2, e2s = u2 * n ** (-e2s), 0
        big = max(e, e2s)
        total = u * n ** (big - e) + u2 * n ** (big - e2s)
        return (*self._canon(total, big), k + k2)

    def _inv(self, x):
        u, e, k = x
        # (r,k)^-1 = (-n^-k r, -k)
        return (*self._canon(-u, e + k), -k)

    def format(self, g):
        return f"a^({self.translation(g)}) t^{g.nf[2]}"

    def is_central(self, g):
        self.check(g)
        return g.nf == self.identity_nf


# ---------------------------------------------------------------------------
# Crystallographic groups A x| F
# ---------------------------------------------------------------------------

Matrix = tuple  # tuple of row tuples


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))) for i in range(len(a)))


def _mat_vec(a: Matrix, v: tuple) -> tuple:
    return tuple(sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a)))


def _as_matrix(m) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in m)


def matrix_closure(gens: Sequence[Matrix], rank: int, bound: int = 10_000) -> list[Matrix]:
    """All products of ``gens``; raises if more than ``bound`` matrices appear."""
    ident = tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank))
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = _mat_mul(a, g)
                if b not in elems:
                    elems.add(b)
                    nxt.append(b)
                    if len(elems) > bound:
                        raise StructuralError(
                            f"point-group closure exceeds {bound} elements (not a finite group?)"
                        )
        frontier = nxt
    return [ident] + sorted(elems - {ident})


class Crystallographic(Group):
    """``Z^r x| F`` for a finite point group ``F < GL_r(Z)``.

    Elements are ``(v, i)`` with ``v`` a lattice vector and ``i`` the index of
    the point-group matrix ``F[i]``; ``(v,A)(v',A') = (v + A v', A A')``.
    """

    family = "crystallographic"

    def __init__(self, rank: int, point_generators: Sequence, labels: Sequence[str] | None = None,
                 closure_bound: int = 10_000):
        self.rank = rank
        gens = [_as_matrix(m) for m in point_generators]
        for m in gens:
            if len(m) != rank or any(len(row) != rank for row in m):
                raise StructuralError(f"point-group matrix {m} is not {rank}x{rank}")
            if abs(linalg.integer_det([list(r) for r in m])) != 1:
                raise StructuralError(f"point-group matrix {m} is not in GL_{rank}(Z)")
        self.point_generators = tuple(gens)
        self.point_group = matrix_closure(gens, rank, closure_bound)
        self._index = {m: i for i, m in enumerate(self.point_group)}
        self._table = [[self._index[_mat_mul(a, b)] for b in self.point_group] for a in self.point_group]
        ident = self.point_group[0]
        self._inverse = [next(j for j, b in enumerate(self.point_group) if _mat_mul(a, b) == ident)
                         for a in self.point_group]
        self.identity_nf = ((0,) * rank, 0)
        self.default_labels = tuple(f"e{i + 1}" for i in range(rank)) + tuple(
            f"m{j + 1}" for j in range(len(gens)))
        super().__init__(labels)

    def params(self):
        return (self.rank, self.point_generators)

    def describe(self):
        return {**super().describe(), "rank": self.rank,
                "point_generators": [list(map(list, m)) for m in self.point_generators],
                "point_group_order": len(self.point_group)}

    def named(self):
        out = {f"e{i + 1}": (tuple(int(i == j) for j in range(self.rank)), 0) for i in range(self.rank)}
        for j, m in enumerate(self.point_generators):
            out[f"m{j + 1}"] = ((0,) * self.rank, self._index[m])
        return out

    def __call__(self, v: Sequence[int], matrix=None) -> Element:
        idx = 0 if matrix is None else self._index.get(_as_matrix(matrix))
        if idx is None:
            raise StructuralError(f"{matrix} is not in the point group")
        return Element(self, (tuple(int(x) for x in v), idx))

    def matrix(self, g: Element) -> Matrix:
        return self.point_group[g.nf[1]]

    def _mul(self, x, y):
        v, i = x
        w, j = y
        aw = _mat_vec(self.point_group[i], w)
        return (tuple(p + q for p, q in zip(v, aw)), self._table[i][j])

    def _inv(self, x):
        v, i = x
        j = self._inverse[i]
        av = _mat_vec(self.point_group[j], v)
        return (tuple(-p for p in av), j)

    def format(self, g):
        v, i = g.nf
        return f"({','.join(map(str, v))};F{i})"

    def order(self, g, bound=4096):
        self.check(g)
        v, i = g.nf
        a = self.point_group[i]
        k, power = 1, a
        ident = self.point_group[0]
        while power != ident:
            power = _mat_mul(power, a)
            k += 1
        total = self._pow(g.nf, k)
        if total == self.identity_nf:
            return k if g.nf != self.identity_nf else 1
        return None


# ---------------------------------------------------------------------------
# Anosov mapping tori Z^2 x|_phi Z
# ---------------------------------------------------------------------------

class AnosovTorus(Group):
    """``Z^2 x|_phi Z`` with ``(v,k)(v',k') = (v + phi^k v', k + k')``."""

    family = "anosov-torus"
    identity_nf = (0, 0, 0)
    torsion_free = True
    default_labels = ("e1", "e2", "t")

    def __init__(self, matrix, labels: Sequence[str] | None = None):
        phi = _as_matrix(matrix)
        if len(phi) != 2 or any(len(r) != 2 for r in phi):
            raise StructuralError("phi must be a 2x2 integer matrix")
        det = phi[0][0] * phi[1][1] - phi[0][1] * phi[1][0]
        tr = phi[0][0] + phi[1][1]
        if det != 1 or abs(tr) <= 2:
            raise StructuralError(f"phi={phi} is not Anosov (need det 1 and |trace| > 2)")
        self.phi = phi
        self.phi_inv = ((phi[1][1], -phi[0][1]), (-phi[1][0], phi[0][0]))
        self._powers: dict[int, Matrix] = {0: ((1, 0), (0, 1)), 1: phi, -1: self.phi_inv}
        super().__init__(labels)

    def params(self):
        return (self.phi,)

    def describe(self):
        return {**super().describe(), "matrix": [list(r) for r in self.phi]}

    def named(self):
        return {"e1": (1, 0, 0), "e2": (0, 1, 0), "t": (0, 0, 1)}

    def __call__(self, v: Sequence[int], k: int) -> Element:
        return Element(self, (int(v[0]), int(v[1]), int(k)))

    def phi_power(self, k: int) -> Matrix:
        m = self._powers.get(k)
        if m is None:
            half = self.phi_power(k // 2)
            m = _mat_mul(half, half)
            if k % 2:
                m = _mat_mul(m, self.phi)
            if abs(k) <= 64:
                self._powers[k] = m
        return m

    def _mul(self, x, y):
        a = self.phi_power(x[2])
        w = _mat_vec(a, (y[0], y[1]))
        return (x[0] + w[0], x[1] + w[1], x[2] + y[2])

    def _inv(self, x):
        a = self.phi_power(-x[2])
        w = _mat_vec(a, (x[0], x[1]))
        return (-w[0], -w[1], -x[2])

    def format(self, g):
        v1, v2, k = g.nf
        return f"(({v1},{v2}),{k})"


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

class DirectProduct(Group):
    """``G_1 x ... x G_s`` with componentwise normal forms."""

    family = "direct-product"

    def __init__(self, *factors: Group, labels: Sequence[str] | None = None):
        if len(factors) < 2:
            raise StructuralError("a direct product needs at least two factors")
        self.factors = tuple(factors)
        self.identity_nf = tuple(f.identity_nf for f in factors)
        self.torsion_free = all(f.torsion_free for f in factors)
        self._names = self._build_names()
        self.default_labels = tuple(
            self._rename[(i, lbl)] for i, f in enumerate(factors) for lbl in f.labels
        )
        super().__init__(labels)

    def _build_names(self) -> dict[str, NF]:
        counts: dict[str, int] = {}
        for f in self.factors:
            for lbl in f.named():
                counts[lbl] = counts.get(lbl, 0) + 1
        self._rename: dict[tuple[int, str], str] = {}
        names = {}
        for i, f in enumerate(self.factors):
            for lbl, nf in f.named().items():
                new = lbl if counts[lbl] == 1 else f"{lbl}_{i + 1}"
                self._rename[(i, lbl)] = new
                names[new] = self.embed_nf(i, nf)
            for lbl in f.labels:
                if (i, lbl) not in self._rename:
                    self._rename[(i, lbl)] = lbl if counts.get(lbl, 0) <= 1 else f"{lbl}_{i + 1}"
        return names

    def params(self):
        return tuple(f.signature for f in self.factors)

    def describe(self):
        return {**super().describe(), "factors": [f.describe() for f in self.factors]}

    def named(self):
        return self._names

    def word(self, text):
        try:
            return super().word(text)
        except StructuralError:
            # factor generator labels that are words ("a b") are resolved per factor
            for i, f in enumerate(self.factors):
                try:
                    return self.embed(i, f.word(text))
                except StructuralError:
                    continue
            raise

    def embed_nf(self, i: int, nf: NF) -> NF:
        return tuple(nf if j == i else f.identity_nf for j, f in enumerate(self.factors))

    def embed(self, i: int, g: Element) -> Element:
        self.factors[i].check(g)
        return Element(self, self.embed_nf(i, g.nf))

    def component(self, g: Element, i: int) -> Element:
        self.check(g)
        return Element(self.factors[i], g.nf[i])

    def __call__(self, *components: Element) -> Element:
        for f, c in zip(self.factors, components):
            f.check(c)
        return Element(self, tuple(c.nf for c in components))

    def _mul(self, x, y):
        return tuple(f._mul(a, b) for f, a, b in zip(self.factors, x, y))

    def _inv(self, x):
        return tuple(f._inv(a) for f, a in zip(self.factors, x))

    def _pow(self, x, k):
        return tuple(f._pow(a, k) for f, a in zip(self.factors, x))

    def format(self, g):
        return " x ".join(f.format(Element(f, c)) for f, c in zip(self.factors, g.nf))

    def is_central(self, g):
        self.check(g)
        return all(f.is_central(Element(f, c)) for f, c in zip(self.factors, g.nf))

    def order(self, g, bound=4096):
        self.check(g)
        orders = [f.order(Element(f, c), bound) for f, c in zip(self.factors, g.nf)]
        if any(o is None for o in orders):
            return None
        return math.lcm(*orders)

    def central_reduce(self, g, zgens):
        self.check(g, *zgens)
        owner: list[int] = []
        for z in zgens:
            support = [i for i, (f, c) in enumerate(zip(self.factors, z.nf)) if c != f.identity_nf]
            if len(support) > 1:
                raise StructuralError("central generators must each live in a single factor")
            owner.append(support[0] if support else 0)
        rep = list(g.nf)
        coeffs = [0] * len(zgens)
        for i, f in enumerate(self.factors):
            idx = [j for j, o in enumerate(owner) if o == i]
            if not idx:
                continue
            r, c = f.central_reduce(Element(f, g.nf[i]), [Element(f, zgens[j].nf[i]) for j in idx])
            rep[i] = r.nf
            for j, cj in zip(idx, c):
                coeffs[j] = cj
        return Element(self, tuple(rep)), coeffs


class QuotientGroup(Group):
    """``G / <z_1, ..., z_s>`` for central ``z_i``, via canonical representatives.

    Normal forms are normal forms of representatives in ``G``; generators
    default to the images of ``G``'s designated generators.
    """

    family = "central-quotient"

    def __init__(self, base: Group, central: Sequence[Element], labels: Sequence[str] | None = None):
        base.check(*central)
        for z in central:
            if not base.is_central(z):
                raise StructuralError(f"{z} is not central in {base!r}")
        self.base = base
        self.central = tuple(central)
        self.identity_nf = self._reduce(base.identity_nf)
        self.torsion_free = False
        self.default_labels = base.labels
        super().__init__(labels)

    def _reduce(self, nf: NF) -> NF:
        return self.base.central_reduce(Element(self.base, nf), self.central)[0].nf

    def params(self):
        return (self.base.signature, tuple(z.nf for z in self.central))

    def describe(self):
        return {**super().describe(), "base": self.base.describe(),
                "central": [self.base.format(z) for z in self.central]}

    def named(self):
        return {lbl: self._reduce(nf) for lbl, nf in self.base.named().items()}

    def project(self, g: Element) -> Element:
        self.base.check(g)
        return Element(self, self._reduce(g.nf))

    def lift(self, g: Element) -> Element:
        """The canonical representative of ``g`` in the base group."""
        self.check(g)
        return Element(self.base, g.nf)

    def _mul(self, x, y):
        return self._reduce(self.base._mul(x, y))

    def _inv(self, x):
        return self._reduce(self.base._inv(x))

    def format(self, g):
        return "[" + self.base.format(Element(self.base, g.nf)) + "]"


class AmalgamatedProduct(Group):
    """``H x_Z K = (H x K) / <(z, z^-1)>`` for a shared central subgroup ``Z``.

    ``z_h[i]`` and ``z_k[i]`` are the images of the i-th generator of ``Z``.
    Normal forms push the ``Z``-part of the ``K`` coordinate into ``H``: the
    pair ``(h, k)`` with ``k = k0 * z_k(c)`` becomes ``(h * z_h(c), k0)``.
    """

    family = "amalgamated-product"

    def __init__(self, h: Group, k: Group, z_h: Sequence[Element], z_k: Sequence[Element],
                 labels: Sequence[str] | None = None):
        if len(z_h) != len(z_k):
            raise StructuralError("embeddings of Z must have the same number of generators")
        h.check(*z_h)
        k.check(*z_k)
        for z in z_h:
            if not h.is_central(z):
                raise StructuralError(f"{z} is not central in H")
        for z in z_k:
            if not k.is_central(z):
                raise StructuralError(f"{z} is not central in K")
        self.H, self.K = h, k
        self.z_h, self.z_k = tuple(z_h), tuple(z_k)
        self.identity_nf = self._normal(h.identity_nf, k.identity_nf)
        names = {}
        for lbl, nf in h.named().items():
            names[lbl if lbl not in k.named() else f"{lbl}_H"] = self._normal(nf, k.identity_nf)
        for lbl, nf in k.named().items():
            names[lbl if lbl not in h.named() else f"{lbl}_K"] = self._normal(h.identity_nf, nf)
        self._names = names
        self.default_labels = tuple(lbl for lbl in names if self._names[lbl] != self.identity_nf)
        super().__init__(labels)

    def _normal(self, hn: NF, kn: NF) -> NF:
        if not self.z_k:
            return (hn, kn)
        k0, c = self.K.central_reduce(Element(self.K, kn), self.z_k)
        for z, ci in zip(self.z_h, c):
            if ci:
                hn = self.H._mul(hn, self.H._pow(z.nf, ci))
        return (hn, k0.nf)

    def params(self):
        return (self.H.signature, self.K.signature, tuple(z.nf for z in self.z_h), tuple(z.nf for z in self.z_k))

    def describe(self):
        return {**super().describe(), "H": self.H.describe(), "K": self.K.describe(),
                "z_H": [self.H.format(z) for z in self.z_h], "z_K": [self.K.format(z) for z in self.z_k]}

    def named(self):
        return self._names

    def from_pair(self, h: Element, k: Element) -> Element:
        self.H.check(h)
        self.K.check(k)
        return Element(self, self._normal(h.nf, k.nf))

    def embed_h(self, h: Element) -> Element:
        return self.from_pair(h, self.K.identity)

    def embed_k(self, k: Element) -> Element:
        return self.from_pair(self.H.identity, k)

    def _mul(self, x, y):
        return self._normal(self.H._mul(x[0], y[0]), self.K._mul(x[1], y[1]))

    def _inv(self, x):
        return self._normal(self.H._inv(x[0]), self.K._inv(x[1]))

    def format(self, g):
        return f"<{self.H.format(Element(self.H, g.nf[0]))} | {self.K.format(Element(self.K, g.nf[1]))}>"

    def is_central(self, g):
        self.check(g)
        return all(self._mul(g.nf, s) == self._mul(s, g.nf) for s in self._names.values())

    def central_reduce(self, g, zgens):
        """Reduction modulo the amalgamated subgroup itself (generators ``z_h``)."""
        self.check(g, *zgens)
        zs = [self.embed_h(z) for z in self.z_h]
        if [z.nf for z in zgens] != [z.nf for z in zs]:
            return super().central_reduce(g, zgens)
        h0, c = self.H.central_reduce(Element(self.H, g.nf[0]), self.z_h)
        return Element(self, (h0.nf, g.nf[1])), c
