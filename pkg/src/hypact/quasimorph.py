"""Quasimorphisms: evaluation, defects, homogenization, transfer, rank extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from . import linalg
from .ball import Ball
from .errors import BudgetError, ContractError, StructuralError
from .groups import (AnosovTorus, BaumslagSolitar, Element, FreeAbelian, Group,
                     Heisenberg)
from .scalar import QuadScalar, floor_scalar

__all__ = [
    "Quasimorphism",
    "HomogenizationResult",
    "BusemannResult",
    "RankExtractionReport",
    "homomorphism",
    "linear_form",
    "heisenberg_coordinate",
    "t_exponent",
    "floor_quasimorphism",
    "residue_quasimorphism",
    "bounded_perturbation",
    "linear_combination",
    "table_quasimorphism",
    "defect_estimate",
    "homogenize",
    "busemann_qm",
    "busemann_quasimorphism",
    "transfer",
    "extract_rank",
    "reduce_by_witnesses",
    "commutator_displacement_bound",
    "SVD_CUTOFF",
    "CONDITION_LIMIT",
]

SVD_CUTOFF = 1e-9
CONDITION_LIMIT = 1e6
HOMOGENIZE_BIT_LIMIT = 1 << 22


class Quasimorphism:
    """A map ``G -> R`` with a declared defect bound.

    ``tag`` is one of ``coordinate-homomorphism``, ``busemann-approx``,
    ``composed-with-section`` or ``user-table``.  ``defect_bound`` may be
    ``None`` when no bound is known (e.g. maps that are not quasimorphisms).
    Values are exact (int, Fraction, QuadScalar) when ``exact`` is true.
    """

    def __init__(self, domain: Group, fn: Callable[[Element], Any], defect_bound=None, *,
                 name: str = "phi", tag: str = "user-table", exact: bool = True,
                 params: dict | None = None, homogeneous: bool = False):
        self.domain = domain
        self._fn = fn
        self.defect_bound = defect_bound
        self.name = name
        self.tag = tag
        self.exact = exact
        self.params = params or {}
        self.homogeneous = homogeneous
        self._cache: dict = {}

    def __call__(self, g: Element):
        self.domain.check(g)
        v = self._cache.get(g.nf)
        if v is None:
            v = self._fn(g)
            if len(self._cache) < 1_000_000:
                self._cache[g.nf] = v
        return v

    @property
    def is_homomorphism(self) -> bool:
        return self.defect_bound == 0

    def describe(self) -> dict:
        out = {"name": self.name, "tag": self.tag, "exact": self.exact,
               "defect_bound": None if self.defect_bound is None else _num(self.defect_bound)}
        if self.params:
            out["params"] = {k: _num(v) if not isinstance(v, (list, str)) else v for k, v in self.params.items()}
        return out

    def __repr__(self):
        return f"Quasimorphism({self.name!r}, D<={self.defect_bound})"


def _num(x):
    if isinstance(x, (int, str)) or x is None:
        return x
    if isinstance(x, (Fraction, QuadScalar)):
        return str(x)
    return float(x)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def homomorphism(domain: Group, fn: Callable[[Element], Any], name: str = "hom", **params) -> Quasimorphism:
    return Quasimorphism(domain, fn, 0, name=name, tag="coordinate-homomorphism", params=params,
                         homogeneous=True)


def linear_form(domain: FreeAbelian, coeffs: Sequence, name: str | None = None) -> Quasimorphism:
    """``v -> sum c_i v_i`` on ``Z^r`` (coefficients rational or in one Q(sqrt d))."""
    if not isinstance(domain, FreeAbelian) or len(coeffs) != domain.rank:
        raise StructuralError("linear forms need a free abelian domain of matching rank")
    coeffs = [c if isinstance(c, QuadScalar) else Fraction(c) for c in coeffs]
    simple = all(isinstance(c, Fraction) and c.denominator == 1 for c in coeffs)
    if simple:
        ints = [int(c) for c in coeffs]
        fn = lambda g: sum(c * x for c, x in zip(ints, g.nf))  # noqa: E731
    else:
        fn = lambda g: sum((c * x for c, x in zip(coeffs, g.nf)), Fraction(0))  # noqa: E731
    label = name or "linear(" + ",".join(str(c) for c in coeffs) + ")"
    return homomorphism(domain, fn, label, coefficients=[str(c) for c in coeffs])


def heisenberg_coordinate(domain: Heisenberg, which: str) -> Quasimorphism:
    """The homomorphisms ``phi_a(a^m b^n c^k) = m`` and ``phi_b = n``."""
    idx = {"a": 0, "b": 1}.get(which)
    if idx is None or not isinstance(domain, Heisenberg):
        raise StructuralError("Heisenberg coordinate homomorphisms are 'a' and 'b'")
    return homomorphism(domain, lambda g: g.nf[idx], f"phi_{which}", coordinate=which)


def t_exponent(domain: Group) -> Quasimorphism:
    """The exponent sum of the stable letter for BS(1,n) and Anosov tori."""
    if not isinstance(domain, (BaumslagSolitar, AnosovTorus)):
        raise StructuralError("t-exponent needs a BS(1,n) or Anosov torus group")
    return homomorphism(domain, lambda g: g.nf[2], "t-exponent")


def floor_quasimorphism(domain: FreeAbelian, coeffs: Sequence, name: str | None = None) -> Quasimorphism:
    """``v -> floor(sum c_i v_i)``; defect at most 1."""
    base = linear_form(domain, coeffs)
    label = name or f"floor({base.name})"
    return Quasimorphism(domain, lambda g: floor_scalar(base(g)), 1, name=label, tag="user-table",
                         params={"coefficients": [str(c) for c in coeffs]})


def residue_quasimorphism(domain: FreeAbelian, slope: int, modulus: int, name: str | None = None) -> Quasimorphism:
    """On Z: ``m -> slope*m + (m mod modulus)``; its defect takes the values 0 and ``modulus``."""
    if not isinstance(domain, FreeAbelian) or domain.rank != 1:
        raise StructuralError("residue quasimorphisms live on Z")
    label = name or f"{slope}m+(m mod {modulus})"
    return Quasimorphism(domain, lambda g: slope * g.nf[0] + g.nf[0] % modulus, modulus, name=label,
                         params={"slope": slope, "modulus": modulus})


def bounded_perturbation(qm: Quasimorphism, bump: Callable[[Element], Any], bound, name: str | None = None) -> Quasimorphism:
    """``qm + bump`` for ``|bump| <= bound``; the defect grows by at most ``3*bound``."""
    d = None if qm.defect_bound is None else qm.defect_bound + 3 * bound
    return Quasimorphism(qm.domain, lambda g: qm(g) + bump(g), d, name=name or f"{qm.name}+bump",
                         tag=qm.tag if qm.tag != "coordinate-homomorphism" else "user-table",
                         exact=qm.exact, params={"bump_bound": bound})


def linear_combination(qms: Sequence[Quasimorphism], coeffs: Sequence, name: str | None = None) -> Quasimorphism:
    if not qms:
        raise StructuralError("empty combination")
    domain = qms[0].domain
    for q in qms:
        if not q.domain.same_group(domain):
            raise StructuralError("quasimorphisms live on different groups")
    bounds = [q.defect_bound for q in qms]
    d = None if any(b is None for b in bounds) else sum(abs(c) * b for c, b in zip(coeffs, bounds))
    label = name or " + ".join(f"{c}*{q.name}" for c, q in zip(coeffs, qms))
    fn = lambda g: sum((c * q(g) for c, q in zip(coeffs, qms)), 0)  # noqa: E731
    return Quasimorphism(domain, fn, d, name=label, tag="user-table" if d != 0 else "coordinate-homomorphism",
                         exact=all(q.exact for q in qms), homogeneous=all(q.homogeneous for q in qms))


def table_quasimorphism(domain: Group, table: dict, default=0, bound=None, name: str = "table") -> Quasimorphism:
    """Values looked up by normal form; anything missing maps to ``default``."""
    return Quasimorphism(domain, lambda g: table.get(g.nf, default), bound, name=name, tag="user-table")


# ---------------------------------------------------------------------------
# Defect and homogenization
# ---------------------------------------------------------------------------

def defect_estimate(qm: Quasimorphism, ball: Ball):
    """``max |phi(gh) - phi(g) - phi(h)|`` over ``ball x ball`` (exact when ``phi`` is)."""
    if not ball.group.same_group(qm.domain):
        raise StructuralError("ball and quasimorphism live on different groups")
    group = qm.domain
    elems = [Element(group, g.nf) for g in ball.elements]
    vals = [qm(g) for g in elems]
    best = 0
    mul = group._mul
    for g, vg in zip(elems, vals):
        for h, vh in zip(elems, vals):
            d = qm(Element(group, mul(g.nf, h.nf))) - vg - vh
            if d < 0:
                d = -d
            if d > best:
                best = d
    return best


@dataclass(frozen=True)
class HomogenizationResult:
    value: Any
    error_bound: Any
    exponent: int

    def to_json(self) -> dict:
        return {"value": _num(self.value), "error_bound": _num(self.error_bound), "exponent": self.exponent}


def homogenize(qm: Quasimorphism, g: Element, n: int, bit_limit: int = HOMOGENIZE_BIT_LIMIT) -> HomogenizationResult:
    """``phi(g^N) / N`` with the guaranteed error ``D / N`` to the homogenization."""
    if n < 1:
        raise ContractError("exponent must be positive")
    if qm.defect_bound is None:
        raise ContractError(f"{qm.name} has no declared defect bound")
    power = qm.domain.power(g, n)
    if qm.domain.size_bits(power) > bit_limit:
        raise BudgetError(f"normal form of g^{n} exceeds {bit_limit} bits", partial={"exponent": n})
    v = qm(power)
    value = Fraction(v, n) if isinstance(v, (int, Fraction)) else v / n
    err = qm.defect_bound / n if not isinstance(qm.defect_bound, int) else Fraction(qm.defect_bound, n)
    return HomogenizationResult(value, err, n)


# ---------------------------------------------------------------------------
# Busemann quasimorphisms of lineal actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BusemannResult:
    value: Any
    depth: int
    delta: Any
    stabilized: bool

    def to_json(self) -> dict:
        return {"value": _num(self.value), "depth": self.depth, "delta": _num(self.delta),
                "stabilized": self.stabilized}


def _signed_position(action, p):
    if action.model == "quasi-line":
        return p - action.basepoint
    if action.model == "cayley" and isinstance(action.group, FreeAbelian) and action.group.rank == 1:
        return p.nf[0] - action.basepoint.nf[0]
    raise ContractError(f"no orientation available on the {action.model} model")


def busemann_qm(action, g: Element, depth: int = 32, direction: Element | None = None,
                tolerance: float = 1e-6, max_depth: int = 2 ** 10) -> BusemannResult:
    """``beta(g) = pos(g h^m o) - pos(h^m o)`` along a loxodromic direction ``h``.

    Starting at ``depth`` the estimate is compared with the one at half the
    depth and the depth is doubled until the two differ by less than
    ``tolerance`` or ``max_depth`` is reached.
    """
    if not (action.lineal and action.orientable):
        raise ContractError(f"Busemann quasimorphisms need an orientable lineal action, not {action.model}")
    group = action.group
    h = direction if direction is not None else getattr(action, "direction", None)
    if h is None:
        h = _default_direction(action)
    o = action.basepoint

    def estimate(m):
        hm = group.power(h, m)
        return _signed_position(action, action.act(group.mul(g, hm), o)) - _signed_position(action, action.act(hm, o))

    m = max(depth, 2)
    prev, cur = estimate(m // 2), estimate(m)
    while abs(cur - prev) >= tolerance and m < max_depth:
        m *= 2
        prev, cur = cur, estimate(m)
    delta = abs(cur - prev)
    return BusemannResult(cur, m, delta, bool(delta < tolerance))


def _default_direction(action) -> Element:
    """First designated generator that moves the basepoint."""
    o = action.basepoint
    for _, s in action.group.generators:
        pos = _signed_position(action, action.act(s, o))
        if pos > 0:
            return s
    raise ContractError("no generator translates the quasi-line; action is not lineal")


def busemann_quasimorphism(action, depth: int = 32, direction: Element | None = None) -> Quasimorphism:
    """The Busemann approximation as a :class:`Quasimorphism` (declared defect = action epsilon)."""
    if not (action.lineal and action.orientable):
        raise ContractError("Busemann quasimorphisms need an orientable lineal action")
    h = direction or _default_direction(action)
    return Quasimorphism(action.group, lambda g: busemann_qm(action, g, depth, h).value,
                         action.eps, name=f"busemann[{getattr(action, 'name', action.model)}]",
                         tag="busemann-approx", exact=action.exact)


# ---------------------------------------------------------------------------
# Transfer from a finite-index normal subgroup
# ---------------------------------------------------------------------------

def transfer(qm: Quasimorphism, group: Group, reps: Sequence[Element],
             member: Callable[[Element], bool], name: str | None = None) -> Quasimorphism:
    """``T(phi)(g) = (1/n) sum_i phi(t_i g t_{sigma(i)}^-1)`` with ``t_i g in t_sigma(i) H``.

    ``qm`` is evaluated on elements of ``group`` lying in ``H`` (``member``);
    ``reps`` must be a transversal of the normal subgroup ``H``.
    """
    group.check(*reps)
    if not qm.domain.same_group(group):
        raise StructuralError("phi must be evaluated on elements of the ambient group")
    reps = list(reps)
    n = len(reps)
    for i in range(n):
        for j in range(i + 1, n):
            if member(group.mul(reps[i].inv(), reps[j])):
                raise StructuralError(f"representatives {i} and {j} lie in the same coset")
    inv_reps = [t.inv() for t in reps]

    def coset(x: Element) -> int:
        for j, ti in enumerate(inv_reps):
            if member(group.mul(ti, x)):
                return j
        raise StructuralError(f"{x} lies in no listed coset; representatives are not a transversal")

    def fn(g: Element):
        total = 0
        for t in reps:
            tg = group.mul(t, g)
            j = coset(tg)
            total = total + qm(group.mul(tg, inv_reps[j]))
        return Fraction(total, n) if isinstance(total, int) else total / n

    bound = None if qm.defect_bound is None else qm.defect_bound
    return Quasimorphism(group, fn, bound, name=name or f"transfer({qm.name})", tag=qm.tag,
                         exact=qm.exact, params={"index": n})


# ---------------------------------------------------------------------------
# Rank extraction
# ---------------------------------------------------------------------------

@dataclass
class RankExtractionReport:
    rank: int
    selected: list[int]
    witnesses: list[Element]
    witness_positions: list[int]
    theta: list[list]
    threshold_radius: int | None
    threshold_level: Any
    cobounded_constant: Any
    rank_by_radius: list[int]
    exact: bool
    condition_number: float | None = None
    names: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "selected": self.selected,
            "selected_names": [self.names[i] for i in self.selected] if self.names else [],
            "witnesses": [w.group.format(w) for w in self.witnesses],
            "theta": [[_num(x) for x in row] for row in self.theta],
            "threshold_radius": self.threshold_radius,
            "threshold_level": _num(self.threshold_level),
            "cobounded_constant": _num(self.cobounded_constant),
            "rank_by_radius": self.rank_by_radius,
            "exact": self.exact,
            "condition_number": self.condition_number,
        }


def _numeric_rank(rows) -> int:
    a = np.array([[float(x) for x in row] for row in rows], dtype=float)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > SVD_CUTOFF * s[0]))


def extract_rank(qms: Sequence[Quasimorphism], ball: Ball) -> RankExtractionReport:
    """Rank of the evaluation matrix ``(phi_i(g_j))`` over a ball, with witnesses.

    Selected quasimorphisms are the earliest-first maximal independent subset;
    witnesses are the earliest ball elements (enumeration order) whose columns
    raise the rank of the selected rows.
    """
    if not qms:
        raise StructuralError("no quasimorphisms supplied")
    domain = qms[0].domain
    for q in qms:
        if not q.domain.same_group(domain):
            raise StructuralError("quasimorphisms live on different groups")
    if not ball.group.same_group(domain):
        raise StructuralError("ball is not from the quasimorphisms' domain")
    exact = all(q.exact for q in qms)
    elems = [Element(domain, g.nf) for g in ball.elements]
    rows = [[q(g) for g in elems] for q in qms]
    rank_fn = linalg.rank if exact else _numeric_rank

    if exact:
        selected = linalg.independent_rows(rows)
    else:
        selected, basis = [], []
        for i, row in enumerate(rows):
            if _numeric_rank(basis + [row]) > len(basis):
                basis.append(row)
                selected.append(i)
    r = len(selected)

    witness_pos: list[int] = []
    cols: list[list] = []
    if r:
        for j, g in enumerate(elems):
            col = [rows[i][j] for i in selected]
            if all(x == 0 for x in col):
                continue
            if rank_fn(cols + [col]) > len(cols):
                cols.append(col)
                witness_pos.append(j)
                if len(cols) == r:
                    break
    theta = [[rows[i][j] for j in witness_pos] for i in selected]

    rank_by_radius = []
    for k in range(ball.radius + 1):
        end = ball.starts[k + 1]
        rank_by_radius.append(rank_fn([row[:end] for row in rows]) if end else 0)

    threshold_radius = ball.index[elems[witness_pos[-1]].nf] if witness_pos else None
    level = max((abs(x) for row in theta for x in row), default=0)
    bounds = [qms[i].defect_bound for i in selected]
    if r and all(b is not None for b in bounds):
        constant = r * (level + max(bounds))
    else:
        constant = None
    cond = None
    if r and not exact:
        cond = float(np.linalg.cond(np.array([[float(x) for x in row] for row in theta])))
    return RankExtractionReport(r, selected, [elems[j] for j in witness_pos], witness_pos, theta,
                                threshold_radius, level, constant, rank_by_radius, exact, cond,
                                [q.name for q in qms])


def reduce_by_witnesses(report: RankExtractionReport, qms: Sequence[Quasimorphism], g: Element):
    """Write ``Phi(g) = sum b_n Phi(g_n)`` and return ``g * prod g_n^-floor(b_n)`` with the ``b_n``.

    For homogeneous quasimorphisms every ``|phi_i|`` of the result is at most
    ``report.cobounded_constant``.
    """
    if not report.rank:
        raise ContractError("rank 0: nothing to reduce against")
    group = qms[0].domain
    sel = [qms[i] for i in report.selected]
    phi = [q(g) for q in sel]
    if report.exact:
        inv = linalg.inverse(report.theta)
        b = linalg.mat_vec(inv, phi)
    else:
        b = list(np.linalg.solve(np.array([[float(x) for x in row] for row in report.theta]),
                                 np.array([float(x) for x in phi])))
    out = g
    for w, bn in zip(report.witnesses, b):
        out = group.mul(out, group.power(w, -floor_scalar(bn) if report.exact else -math.floor(bn)))
    return out, b


# ---------------------------------------------------------------------------
# Commutator displacement on lineal actions
# ---------------------------------------------------------------------------

def commutator_displacement_bound(action, ball: Ball):
    """``max d(o, [g,h] o)`` over ``ball x ball`` for an orientable lineal action."""
    if not (action.lineal and action.orientable):
        raise ContractError(f"commutator bound needs an orientable lineal action, not {action.model}")
    group = action.group
    elems = [Element(group, g.nf) for g in ball.elements]
    o = action.basepoint
    best = 0
    seen = set()
    for g in elems:
        for h in elems:
            c = group.commutator(g, h)
            if c.nf in seen:
                continue
            seen.add(c.nf)
            d = action.dist(o, action.act(c, o))
            if d > best:
                best = d
    return best
