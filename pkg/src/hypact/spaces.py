"""Metric spaces with (quasi-)actions of the example groups.

Every model is a :class:`SpaceAction`: a space, the group acting on it, a
basepoint and the quasi-action constants ``(lam, eps)`` (``(1, 0)`` for
isometric actions).  Distances are exact whenever the model allows:

* upper half-plane: :class:`CoshDistance`, carrying ``cosh d`` exactly;
* Bass-Serre tree and Cayley graphs: integers;
* quasi-lines: ``|x - y|`` in the scalar type of the quasimorphism values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Any, Callable

import mpmath

from .ball import word_length
from .errors import ContractError, StructuralError
from .groups import AnosovTorus, BaumslagSolitar, Element, FreeAbelian, Group
from .scalar import QuadScalar, as_scalar, squarefree_part

__all__ = [
    "UHPoint",
    "Affine",
    "CoshDistance",
    "TreeVertex",
    "SpaceAction",
    "UHPAction",
    "BassSerreTree",
    "QuasiLine",
    "CayleyAction",
    "QuotientSpace",
    "QuotientDistance",
    "IsometryClassification",
    "bs_uhp_action",
    "anosov_uhp_actions",
    "left_eigenvector",
    "distance_value",
    "act",
    "dist",
    "quotient_dist",
    "classify_isometry",
]


# ---------------------------------------------------------------------------
# Upper half-plane
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UHPoint:
    """A point ``x + i y`` of the upper half-plane with exact coordinates."""

    x: QuadScalar
    y: QuadScalar

    def __post_init__(self):
        object.__setattr__(self, "x", as_scalar(self.x))
        object.__setattr__(self, "y", as_scalar(self.y))
        if self.y.sign() <= 0:
            raise StructuralError(f"imaginary part must be positive, got {self.y}")

    def __str__(self):
        return f"({self.x}, {self.y})"

    def to_json(self) -> list[str]:
        return [str(self.x), str(self.y)]


@dataclass(frozen=True)
class Affine:
    """The isometry ``z -> alpha z + beta`` of the upper half-plane (``alpha > 0``)."""

    alpha: QuadScalar
    beta: QuadScalar

    def __call__(self, z: UHPoint) -> UHPoint:
        return UHPoint(self.alpha * z.x + self.beta, self.alpha * z.y)

    def compose(self, other: Affine) -> Affine:
        """``self o other``."""
        return Affine(self.alpha * other.alpha, self.alpha * other.beta + self.beta)


@total_ordering
@dataclass(frozen=True)
class CoshDistance:
    """A hyperbolic distance stored through its exact hyperbolic cosine.

    ``arccosh`` is monotone, so comparisons between distances are exact
    comparisons of the cosh values.
    """

    cosh: QuadScalar

    def value(self, dps: int = 50):
        with mpmath.workdps(dps + 10):
            return +mpmath.acosh(self.cosh.to_mpf(dps + 10))

    def __float__(self):
        return float(self.value(30))

    def is_zero(self) -> bool:
        return self.cosh == 1

    def __eq__(self, other):
        if isinstance(other, CoshDistance):
            return self.cosh == other.cosh
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, CoshDistance):
            return self.cosh < other.cosh
        return NotImplemented

    def __hash__(self):
        return hash(self.cosh)

    def __str__(self):
        return f"arccosh({self.cosh})"


def uhp_cosh_distance(z: UHPoint, w: UHPoint) -> QuadScalar:
    """``cosh d(z, w) = 1 + |z - w|^2 / (2 Im z Im w)``."""
    dx, dy = z.x - w.x, z.y - w.y
    return 1 + (dx * dx + dy * dy) / (2 * z.y * w.y)


def distance_value(d, dps: int = 50):
    """High-precision real value of any distance returned by :func:`dist`."""
    if isinstance(d, CoshDistance):
        return d.value(dps)
    if isinstance(d, QuadScalar):
        return d.to_mpf(dps)
    if isinstance(d, Fraction):
        with mpmath.workdps(dps):
            return mpmath.mpf(d.numerator) / d.denominator
    return mpmath.mpf(d)


# ---------------------------------------------------------------------------
# Bass-Serre tree of BS(1, n)
# ---------------------------------------------------------------------------

def _nu(x: Fraction, n: int) -> float | int:
    """Largest ``j`` with ``x`` in ``n^j Z`` (``inf`` for ``x == 0``)."""
    if x == 0:
        return math.inf
    num, den = x.numerator, x.denominator
    if den != 1:
        e = 0
        while (x * n ** e).denominator != 1:
            e += 1
        return -e
    j = 0
    while num % n == 0:
        num //= n
        j += 1
    return j


@dataclass(frozen=True)
class TreeVertex:
    """The coset ``g<a>`` of ``g = a^r t^k``, i.e. the pair ``(k, r mod n^k Z)``.

    ``r`` is stored as the least non-negative representative.  The reduced
    code ``(p, q, m)`` names the same coset as ``t^-p a^m t^q <a>``.
    """

    n: int
    level: int
    r: Fraction

    @classmethod
    def make(cls, n: int, level: int, r) -> TreeVertex:
        mod = Fraction(n) ** level
        return cls(n, level, Fraction(r) % mod)

    @classmethod
    def from_code(cls, n: int, p: int, q: int, m: int) -> TreeVertex:
        if p < 0 or q < 0:
            raise StructuralError("tree codes need non-negative p and q")
        return cls.make(n, q - p, Fraction(m, n ** p))

    @property
    def code(self) -> tuple[int, int, int]:
        """Reduced ``(p, q, m)``: ``p == 0`` or ``q == 0`` or ``n`` does not divide ``m``."""
        e = 0
        while (self.r * self.n ** e).denominator != 1:
            e += 1
        p = max(e, -self.level)
        q = self.level + p
        m = int(self.r * self.n ** p) % self.n ** q
        return p, q, m

    def __str__(self):
        p, q, m = self.code
        return f"t^-{p} a^{m} t^{q}"


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------

@dataclass
class SpaceAction:
    """Base class for a group (quasi-)acting on a metric space."""

    group: Group
    basepoint: Any
    lam: Any = 1
    eps: Any = 0
    delta: Any = None
    model: str = field(default="abstract", init=False)
    exact: bool = field(default=True, init=False)
    lineal: bool = field(default=False, init=False)
    orientable: bool = field(default=False, init=False)

    @property
    def isometric(self) -> bool:
        return self.lam == 1 and self.eps == 0

    def act(self, g: Element, p):
        raise NotImplementedError

    def dist(self, p, q):
        raise NotImplementedError

    def check_point(self, p) -> None:
        pass

    def displacement(self, g: Element, point=None):
        """``d(x, g x)`` at ``point`` (default: the basepoint)."""
        x = self.basepoint if point is None else point
        return self.dist(x, self.act(g, x))

    def describe(self) -> dict:
        out = {"model": self.model, "group": self.group.describe(), "basepoint": _point_json(self.basepoint),
               "lambda": _num_json(self.lam), "epsilon": _num_json(self.eps),
               "lineal": self.lineal, "orientable": self.orientable}
        if self.delta is not None:
            out["delta"] = _num_json(self.delta)
        return out


class UHPAction(SpaceAction):
    """An action on the upper half-plane by affine isometries ``z -> alpha z + beta``."""

    def __init__(self, group: Group, affine_of: Callable[[Element], Affine], name: str = "uhp",
                 basepoint: UHPoint | None = None):
        # thin-triangle constant of the hyperbolic plane, metadata only
        super().__init__(group, basepoint or UHPoint(0, 1), 1, 0, delta=math.log(1 + math.sqrt(2)))
        self.model = "uhp"
        self.name = name
        self._affine_of = affine_of

    def affine(self, g: Element) -> Affine:
        self.group.check(g)
        return self._affine_of(g)

    def act(self, g, p):
        self.check_point(p)
        return self.affine(g)(p)

    def check_point(self, p):
        if not isinstance(p, UHPoint):
            raise StructuralError(f"{p!r} is not a point of the upper half-plane")

    def dist(self, p, q):
        self.check_point(p)
        self.check_point(q)
        return CoshDistance(uhp_cosh_distance(p, q))

    def describe(self):
        return {**super().describe(), "name": self.name}


def bs_uhp_action(group: BaumslagSolitar) -> UHPAction:
    """``a^r t^k`` acts by ``z -> n^k z + r`` (``t: z -> n z``, ``a: z -> z + 1``)."""
    n = group.n

    def affine(g):
        k = g.nf[2]
        return Affine(QuadScalar(Fraction(n) ** k), QuadScalar(group.translation(g)))

    return UHPAction(group, affine, name=f"bs{n}-uhp")


def left_eigenvector(matrix, expanding: bool = True) -> tuple[QuadScalar, tuple[QuadScalar, QuadScalar]]:
    """Eigenvalue ``lam`` and left eigenvector ``w = (1, x)`` with ``w phi = lam w``.

    ``expanding`` selects the eigenvalue of modulus > 1.
    """
    (p11, p12), (p21, p22) = matrix
    tr = p11 + p22
    disc = tr * tr - 4
    if disc <= 0 or squarefree_part(disc)[0] == 1:
        raise StructuralError(f"{matrix} has no irrational real eigenvalues")
    root = QuadScalar.sqrt(disc)
    sign = 1 if (tr > 0) == expanding else -1
    lam = (tr + sign * root) / 2
    x = (lam - p11) / p21
    return lam, (QuadScalar(1), x)


def anosov_uhp_actions(group: AnosovTorus) -> tuple[UHPAction, UHPAction]:
    """The two eigendirection actions ``(v,k) z = lam^(+-k) z + <v, w_+->``."""
    tr = group.phi[0][0] + group.phi[1][1]
    if tr <= 2:
        raise ContractError("eigendirection actions need trace > 2 (positive eigenvalues)")
    actions = []
    for expanding, name in ((True, "expanding"), (False, "contracting")):
        lam, (w1, w2) = left_eigenvector(group.phi, expanding)

        def affine(g, lam=lam, w1=w1, w2=w2):
            v1, v2, k = g.nf
            return Affine(lam ** k, w1 * v1 + w2 * v2)

        actions.append(UHPAction(group, affine, name=f"anosov-{name}"))
    return actions[0], actions[1]


class BassSerreTree(SpaceAction):
    """BS(1,n) acting on its Bass-Serre tree; ``g`` sends ``h<a>`` to ``gh<a>``."""

    def __init__(self, group: BaumslagSolitar):
        if not isinstance(group, BaumslagSolitar):
            raise StructuralError("the Bass-Serre tree model needs a BS(1,n) group")
        super().__init__(group, TreeVertex(group.n, 0, Fraction(0)), 1, 0, delta=0)
        self.model = "bass-serre"
        self.n = group.n

    def vertex_of(self, g: Element) -> TreeVertex:
        """The vertex ``g<a>``."""
        self.group.check(g)
        return TreeVertex.make(self.n, g.nf[2], self.group.translation(g))

    def check_point(self, p):
        if not isinstance(p, TreeVertex) or p.n != self.n:
            raise StructuralError(f"{p!r} is not a vertex of the BS(1,{self.n}) tree")

    def act(self, g, p):
        self.check_point(p)
        self.group.check(g)
        k = g.nf[2]
        return TreeVertex.make(self.n, k + p.level, Fraction(self.n) ** k * p.r + self.group.translation(g))

    def dist(self, p, q):
        self.check_point(p)
        self.check_point(q)
        j = min(p.level, q.level, _nu(p.r - q.r, self.n))
        return p.level + q.level - 2 * j

    def neighbours(self, p: TreeVertex) -> list[TreeVertex]:
        step = Fraction(self.n) ** p.level
        up = [TreeVertex.make(self.n, p.level + 1, p.r + j * step) for j in range(self.n)]
        return [TreeVertex.make(self.n, p.level - 1, p.r)] + up


class QuasiLine(SpaceAction):
    """The quasi-action ``x -> x + phi(g)`` of a quasimorphism on the real line.

    The constants are ``lam = 1`` and ``eps = ||D(phi)||`` (declared bound).
    """

    def __init__(self, qm, name: str | None = None):
        super().__init__(qm.domain, Fraction(0), 1, qm.defect_bound, delta=0)
        self.model = "quasi-line"
        self.qm = qm
        self.name = name or qm.name
        self.exact = qm.exact
        self.lineal = True
        self.orientable = True

    def act(self, g, p):
        return p + self.qm(g)

    def dist(self, p, q):
        d = p - q
        return -d if d < 0 else d

    def describe(self):
        return {**super().describe(), "name": self.name, "quasimorphism": self.qm.describe()}


class CayleyAction(SpaceAction):
    """Left multiplication on the Cayley graph of the designated generators."""

    def __init__(self, group: Group, lineal: bool = False):
        super().__init__(group, group.identity, 1, 0)
        self.model = "cayley"
        self.lineal = lineal
        self.orientable = lineal
        self._lengths: dict = {}
        self._l1 = isinstance(group, FreeAbelian) and _is_standard_basis(group)

    def check_point(self, p):
        self.group.check(p)

    def act(self, g, p):
        return self.group.mul(g, p)

    def dist(self, p, q):
        self.check_point(p)
        self.check_point(q)
        x = self.group._mul(self.group._inv(p.nf), q.nf)
        if self._l1:
            return sum(abs(c) for c in x)
        d = self._lengths.get(x)
        if d is None:
            d = word_length(self.group, Element(self.group, x))
            self._lengths[x] = d
        return d


def _is_standard_basis(group: FreeAbelian) -> bool:
    """True when the generators are exactly the unit vectors and their inverses."""
    units = {tuple(s * int(i == j) for j in range(group.rank)) for i in range(group.rank) for s in (1, -1)}
    return {g.nf for _, g in group.generators} == units


# ---------------------------------------------------------------------------
# Quotient by a central cyclic subgroup
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuotientDistance:
    value: Any
    shift: int
    window: int
    uncertain: bool


class QuotientSpace(SpaceAction):
    """``X / <c>`` with the metric ``min_k d(p, c^k r)`` over a finite window.

    The window starts at ``k_max`` and is doubled while the minimum sits on
    its boundary, up to ``k_limit``; a boundary minimum at the limit is
    reported as uncertain.
    """

    def __init__(self, base: SpaceAction, c: Element, k_max: int = 64, k_limit: int = 2 ** 14):
        base.group.check(c)
        if not base.group.is_central(c):
            raise ContractError(f"{c} is not central")
        if k_max < 1:
            raise ContractError("window must be at least 1")
        super().__init__(base.group, base.basepoint, base.lam, base.eps, delta=None)
        self.model = "quotient"
        self.base = base
        self.c = c
        self.k_max = k_max
        self.k_limit = max(k_limit, k_max)
        self.exact = base.exact
        self.lineal = base.lineal
        self.orientable = base.orientable

    def act(self, g, p):
        return self.base.act(g, p)

    def check_point(self, p):
        self.base.check_point(p)

    def quotient_distance(self, p, r) -> QuotientDistance:
        group = self.base.group
        window = self.k_max
        cache: dict[int, Any] = {}

        def at(k):
            if k not in cache:
                cache[k] = self.base.dist(p, self.base.act(group.power(self.c, k), r))
            return cache[k]

        while True:
            best_k = 0
            best = at(0)
            for k in range(1, window + 1):
                for s in (k, -k):
                    d = at(s)
                    if d < best:
                        best, best_k = d, s
            on_boundary = abs(best_k) == window
            if not on_boundary or window >= self.k_limit:
                return QuotientDistance(best, best_k, window, on_boundary)
            window = min(2 * window, self.k_limit)

    def dist(self, p, q):
        return self.quotient_distance(p, q).value

    def describe(self):
        return {**super().describe(), "base": self.base.describe(), "central": self.group.format(self.c),
                "window": self.k_max}


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def act(action: SpaceAction, g: Element, p):
    return action.act(g, p)


def dist(action: SpaceAction, p, q):
    return action.dist(p, q)


def quotient_dist(space: QuotientSpace, p, r) -> QuotientDistance:
    return space.quotient_distance(p, r)


@dataclass(frozen=True)
class IsometryClassification:
    verdict: str  # loxodromic-evidence | elliptic-evidence | inconclusive
    translation_estimate: float
    samples: tuple  # (m, d(o, g^m o)) as floats

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "translation_estimate": self.translation_estimate,
                "samples": [[m, d] for m, d in self.samples]}


def classify_isometry(action: SpaceAction, g: Element, m_max: int = 32) -> IsometryClassification:
    """Evidence for the type of ``g`` from the orbit ``d(o, g^m o)``, ``m <= m_max``.

    * elliptic-evidence: the second half of the sampled orbit never goes
      further than the first half did;
    * loxodromic-evidence: the sampled distances are non-decreasing and grow
      linearly between ``m_max/2`` and ``m_max`` (increment at least half of
      ``(m_max/2) * tau``);
    * otherwise inconclusive (e.g. parabolic-looking logarithmic growth).
    """
    if m_max < 4:
        raise ContractError("m_max must be at least 4")
    o = action.basepoint
    values = []
    for m in range(1, m_max + 1):
        d = action.dist(o, action.act(action.group.power(g, m), o))
        values.append(float(distance_value(d, 30)))
    half = m_max // 2
    tau = values[-1] / m_max
    first, second = max(values[:half]), max(values[half:])
    tol = 1e-12
    if second <= first + tol:
        verdict = "elliptic-evidence"
    elif (all(b >= a - tol for a, b in zip(values, values[1:]))
          and values[-1] - values[half - 1] >= 0.5 * (m_max - half) * tau and tau > tol):
        verdict = "loxodromic-evidence"
    else:
        verdict = "inconclusive"
    samples = tuple((m, values[m - 1]) for m in range(1, m_max + 1))
    return IsometryClassification(verdict, tau, samples)


def _num_json(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, (Fraction, QuadScalar)):
        return str(x)
    return float(x)


def _point_json(p):
    if isinstance(p, UHPoint):
        return p.to_json()
    if isinstance(p, TreeVertex):
        return list(p.code)
    if isinstance(p, Element):
        return p.group.format(p)
    return _num_json(p)
