"""Evidence for properness and coboundedness, plus the crystallographic decider."""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import mpmath
from mpmath import iv

from . import linalg
from .ball import Ball, enumerate_ball
from .errors import ContractError, StructuralError
from .groups import Element, Group, _mat_mul, matrix_closure
from .scalar import QuadScalar, floor_scalar
from .serialize import tagged_decimal
from .spaces import BassSerreTree, CoshDistance, SpaceAction, UHPAction, UHPoint, uhp_cosh_distance

__all__ = [
    "Displacement",
    "DisplacementProfile",
    "ProperReport",
    "CoboundednessReport",
    "CrystallographicDecision",
    "DominanceSample",
    "displacement",
    "displacement_profile",
    "properness_report",
    "coboundedness_window",
    "crysto_decide",
    "dominance_compare",
]

REPORT_DPS = 50
MAX_DECISION_DPS = 2000


@contextlib.contextmanager
def _iv_dps(dps: int):
    old = iv.prec
    iv.dps = dps
    try:
        yield
    finally:
        iv.prec = old


def _iv_scalar(x) -> Any:
    """Rigorous interval enclosure of an exact scalar at the current precision."""
    if isinstance(x, QuadScalar):
        v = iv.mpf(x.p.numerator) / x.p.denominator
        if x.q:
            v = v + iv.mpf(x.q.numerator) / x.q.denominator * iv.sqrt(iv.mpf(x.d))
        return v
    x = Fraction(x)
    return iv.mpf(x.numerator) / x.denominator


# ---------------------------------------------------------------------------
# Displacements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Displacement:
    """``D = exact + sum arccosh(c_i)`` with every ``c_i > 1`` exact.

    Comparisons with exact thresholds use interval arithmetic at increasing
    precision, so they never rely on a rounded floating-point value.
    """

    exact: Any
    cosh_terms: tuple = ()

    @classmethod
    def from_distances(cls, dists: Sequence) -> Displacement:
        exact: Any = 0
        terms = []
        for d in dists:
            if isinstance(d, CoshDistance):
                if not d.is_zero():
                    terms.append(d.cosh)
            else:
                exact = exact + d
        return cls(exact, tuple(terms))

    @property
    def is_exact(self) -> bool:
        return not self.cosh_terms

    def enclosure(self, dps: int):
        with _iv_dps(dps):
            v = _iv_scalar(self.exact)
            for c in self.cosh_terms:
                x = _iv_scalar(c)
                v = v + iv.log(x + iv.sqrt(x * x - 1))
            return v

    def compare(self, threshold) -> int:
        """Exact sign of ``D - threshold`` for a rational or quadratic ``threshold``."""
        if self.is_exact:
            diff = self.exact - threshold
            return (diff > 0) - (diff < 0)
        dps = 30
        while dps <= MAX_DECISION_DPS:
            with _iv_dps(dps):
                v = self.enclosure(dps) - _iv_scalar(threshold)
                if v.a > 0:
                    return 1
                if v.b < 0:
                    return -1
            dps *= 2
        raise ContractError(f"could not separate displacement from {threshold} at {MAX_DECISION_DPS} digits")

    def value(self, dps: int = REPORT_DPS):
        with mpmath.workdps(dps + 10):
            v = self.exact.to_mpf(dps + 10) if isinstance(self.exact, QuadScalar) else mpmath.mpf(Fraction(self.exact).numerator) / Fraction(self.exact).denominator
            for c in self.cosh_terms:
                v += mpmath.acosh(c.to_mpf(dps + 10))
            return +v

    def text(self, digits: int = 15) -> str:
        """Exact text when exact, else a decimal with ``digits`` significant digits."""
        if self.is_exact:
            return str(self.exact)
        return tagged_decimal(self.value(), digits)

    def __lt__(self, other: Displacement) -> bool:
        if self.is_exact and other.is_exact:
            return self.exact < other.exact
        return self.value() < other.value()


def displacement(actions: Sequence[SpaceAction], g: Element, points: Sequence | None = None) -> Displacement:
    """``D(g) = sum_i d(x_i, g x_i)`` at the basepoints (or the given points)."""
    pts = points if points is not None else [a.basepoint for a in actions]
    return Displacement.from_distances([a.dist(x, a.act(g, x)) for a, x in zip(actions, pts)])


@dataclass
class DisplacementProfile:
    group: Group
    actions: list[SpaceAction]
    radius: int
    ball: Ball
    displacements: list[Displacement]
    sphere_min: list[Displacement]
    sphere_max: list[Displacement]
    thresholds: list
    counts: dict  # threshold text -> list of sublevel counts per radius
    partial: bool = False

    def to_csv(self) -> str:
        heads = ["radius", "min_D", "max_D"] + [f"count@{c}" for c in self.thresholds]
        lines = [",".join(heads)]
        for r in range(self.radius + 1):
            row = [str(r), self.sphere_min[r].text(), self.sphere_max[r].text()]
            row += [str(self.counts[str(c)][r]) for c in self.thresholds]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def displacement_profile(group: Group, actions: Sequence[SpaceAction], r_max: int,
                         thresholds: Sequence = ()) -> DisplacementProfile:
    """Exact displacements over ``B(r_max)`` with sphere extremes and sublevel counts."""
    for a in actions:
        if not a.group.same_group(group):
            raise StructuralError(f"action {a.model} is bound to another group")
    ball = enumerate_ball(group, r_max)
    elems = [Element(group, g.nf) for g in ball]
    disp = [displacement(actions, g) for g in elems]
    smin, smax = [], []
    for r in range(r_max + 1):
        sphere = disp[ball.starts[r]:ball.starts[r + 1]]
        smin.append(min(sphere))
        smax.append(max(sphere))
    counts = {}
    for c in thresholds:
        below = [1 if d.compare(c) <= 0 else 0 for d in disp]
        running, per_radius = 0, []
        for r in range(r_max + 1):
            running += sum(below[ball.starts[r]:ball.starts[r + 1]])
            per_radius.append(running)
        counts[str(c)] = per_radius
    return DisplacementProfile(group, list(actions), r_max, ball, disp, smin, smax, list(thresholds), counts)


@dataclass
class ProperReport:
    verdict: str  # proper-evidence | not-proper-evidence
    per_threshold: list[dict]
    min_growth: list[str]

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "thresholds": self.per_threshold, "min_displacement_by_radius": self.min_growth}


def properness_report(profile: DisplacementProfile, thresholds: Sequence | None = None) -> ProperReport:
    """Per threshold: sublevel counts, whether they stabilized before ``R_max``, and where.

    A count has stabilized when the last two radii agree; its stabilization
    radius is the first radius reaching the final count.
    """
    thresholds = list(profile.thresholds if thresholds is None else thresholds)
    missing = [c for c in thresholds if str(c) not in profile.counts]
    if missing:
        raise ContractError(f"profile has no counts for thresholds {missing}")
    rows = []
    for c in thresholds:
        counts = profile.counts[str(c)]
        final = counts[-1]
        stabilized = len(counts) >= 2 and counts[-2] == final
        radius = next(r for r, v in enumerate(counts) if v == final) if stabilized else None
        rows.append({"threshold": str(c), "counts": counts, "stabilized": stabilized,
                     "stabilization_radius": radius, "final_count": final})
    verdict = "proper-evidence" if all(r["stabilized"] for r in rows) else "not-proper-evidence"
    return ProperReport(verdict, rows, [d.text() for d in profile.sphere_min])


# ---------------------------------------------------------------------------
# Coboundedness
# ---------------------------------------------------------------------------

@dataclass
class CoboundednessReport:
    model: str
    covering_radius: Any  # exact on lines, arccosh(...) on the plane
    covering_text: str
    witness: Any
    samples: int

    def to_json(self) -> dict:
        return {"model": self.model, "covering_radius": self.covering_text,
                "witness": self.witness, "samples": self.samples}


def _line_position(action, p):
    if action.model == "quasi-line":
        return p
    if action.model == "cayley" and action.group.family == "free-abelian" and action.group.rank == 1:
        return Fraction(p.nf[0])
    raise ContractError(f"no line coordinates on the {action.model} model")


def coboundedness_window(action: SpaceAction, ball: Ball, window=None, rectangle: Sequence | None = None,
                         grid: int = 8) -> CoboundednessReport:
    """Covering radius of the orbit ``{g o : g in ball}``.

    Lines: exact covering radius of the window ``[-W, W]``; by default ``W``
    is half the smaller orbit extent on either side, so the window sits well
    inside the sampled orbit.  Trees: vertices within ``W`` (default 2) of
    the basepoint.  Upper
    half-plane: largest distance from a ``(grid+1)^2`` grid of the rectangle
    ``[x0, x1] x [y0, y1]`` (default ``[0,1] x [1,n]`` for BS(1,n)) to the
    orbit of ``i``.
    """
    group = action.group
    elems = [Element(group, g.nf) for g in ball]
    if action.model in ("quasi-line", "cayley"):
        o = action.basepoint
        pts = sorted({_line_position(action, action.act(g, o)) for g in elems})
        w = window if window is not None else floor_scalar(min(-pts[0], pts[-1]) / 2)
        if w <= 0:
            raise ContractError("the sampled orbit does not extend to both sides of the basepoint")
        inside = [p for p in pts if -w <= p <= w]
        left = max((p for p in pts if p < -w), default=None)
        right = min((p for p in pts if p > w), default=None)
        cand = ([left] if left is not None else []) + inside + ([right] if right is not None else [])
        if not cand:
            raise ContractError("orbit misses the window entirely")
        best, where = 0, None
        # ends of the window not covered from outside
        if left is None and cand[0] > -w:
            best, where = cand[0] + w, -w
        if right is None and cand[-1] < w and w - cand[-1] > best:
            best, where = w - cand[-1], w
        for a, b in zip(cand, cand[1:]):
            lo, hi = max(a, -w), min(b, w)
            if lo > hi:
                continue
            mid = (a + b) / 2
            x = min(max(mid, lo), hi)
            gap = min(x - a, b - x)
            if gap > best:
                best, where = gap, x
        best = Fraction(best) if not isinstance(best, QuadScalar) else best
        return CoboundednessReport(action.model, best, str(best), None if where is None else str(where), len(pts))
    if isinstance(action, UHPAction):
        if rectangle is None:
            n = getattr(group, "n", None)
            if n is None:
                raise ContractError("a rectangle is required for this action")
            rectangle = (0, 1, 1, n)
        x0, x1, y0, y1 = (Fraction(v) for v in rectangle)
        orbit = {}
        for g in elems:
            p = action.act(g, action.basepoint)
            orbit[(p.x, p.y)] = p
        orbit_pts = list(orbit.values())
        worst, where = QuadScalar(1), None
        for i in range(grid + 1):
            for j in range(grid + 1):
                q = UHPoint(x0 + (x1 - x0) * Fraction(i, grid), y0 + (y1 - y0) * Fraction(j, grid))
                nearest = min(uhp_cosh_distance(q, p) for p in orbit_pts)
                if nearest > worst:
                    worst, where = nearest, q
        d = CoshDistance(worst)
        return CoboundednessReport("uhp", d, tagged_decimal(d.value()),
                                   None if where is None else where.to_json(), len(orbit_pts))
    if isinstance(action, BassSerreTree):
        w = 2 if window is None else int(window)
        orbit = {action.act(g, action.basepoint) for g in elems}
        seen = {action.basepoint}
        frontier = [action.basepoint]
        for _ in range(w):
            frontier = [v for u in frontier for v in action.neighbours(u) if v not in seen]
            seen.update(frontier)
        worst, where = 0, None
        for v in sorted(seen, key=lambda v: v.code):
            nearest = min(action.dist(v, p) for p in orbit)
            if nearest > worst:
                worst, where = nearest, v
        return CoboundednessReport("bass-serre", worst, str(worst), None if where is None else list(where.code),
                                   len(orbit))
    raise ContractError(f"coboundedness window is not defined for the {action.model} model")


# ---------------------------------------------------------------------------
# Crystallographic decider
# ---------------------------------------------------------------------------

@dataclass
class CrystallographicDecision:
    verdict: bool
    reason: str  # diagonalizable | order | noncommuting | eigenlattice-index
    witness: Any
    closure_order: int
    eigenlattices: list = field(default_factory=list)
    interpretation: str = "basis-free: conjugacy in GL_r(Z) into diagonal +-1 matrices"

    def to_json(self) -> dict:
        return {"verdict": "yes" if self.verdict else "no", "reason": self.reason,
                "witness": self.witness, "closure_order": self.closure_order,
                "eigenlattices": self.eigenlattices, "interpretation": self.interpretation}


def _matrix_order(m, ident) -> int:
    k, p = 1, m
    while p != ident:
        p = _mat_mul(p, m)
        k += 1
    return k


def crysto_decide(matrices: Sequence, rank: int, closure_bound: int = 10_000) -> CrystallographicDecision:
    """Decide whether the point group is conjugate in ``GL_r(Z)`` to diagonal ``+-1`` matrices."""
    gens = [tuple(tuple(int(x) for x in row) for row in m) for m in matrices]
    for m in gens:
        if len(m) != rank or any(len(row) != rank for row in m):
            raise StructuralError(f"{m} is not {rank}x{rank}")
        if abs(linalg.integer_det(m)) != 1:
            raise StructuralError(f"{m} is not invertible over Z")
    closure = matrix_closure(gens, rank, closure_bound)
    ident = closure[0]
    for m in closure:
        k = _matrix_order(m, ident)
        if k > 2:
            return CrystallographicDecision(False, "order", {"element": [list(r) for r in m], "order": k},
                                            len(closure))
    for a in closure:
        for b in closure:
            if _mat_mul(a, b) != _mat_mul(b, a):
                return CrystallographicDecision(False, "noncommuting",
                                                {"pair": [[list(r) for r in a], [list(r) for r in b]]}, len(closure))
    lattices = []
    seen_chars = set()
    for signs in _sign_patterns(len(gens)):
        stacked = []
        for m, s in zip(gens, signs):
            stacked += [[m[i][j] - (s if i == j else 0) for j in range(rank)] for i in range(rank)]
        basis = linalg.integer_kernel(stacked, rank) if stacked else linalg.identity(rank)
        if basis and signs not in seen_chars:
            seen_chars.add(signs)
            lattices.append({"character": list(signs), "basis": basis})
    columns = [v for lat in lattices for v in lat["basis"]]
    if len(columns) != rank:
        return CrystallographicDecision(False, "eigenlattice-index",
                                        {"index": None, "dimension": len(columns)}, len(closure), lattices)
    b = [[columns[j][i] for j in range(rank)] for i in range(rank)]
    det = linalg.integer_det(b)
    if abs(det) != 1:
        return CrystallographicDecision(False, "eigenlattice-index", {"index": abs(det)}, len(closure), lattices)
    binv = linalg.inverse(b)
    for m in closure:
        conj = linalg.mat_mul(linalg.mat_mul(binv, [list(r) for r in m]), b)
        if any(conj[i][j] != 0 for i in range(rank) for j in range(rank) if i != j) or \
                any(abs(conj[i][i]) != 1 for i in range(rank)):
            raise AssertionError("eigenbasis failed to diagonalize the point group")
    return CrystallographicDecision(True, "diagonalizable", {"basis": b}, len(closure), lattices)


def _sign_patterns(k: int):
    if k == 0:
        yield ()
        return
    for rest in _sign_patterns(k - 1):
        for s in (1, -1):
            yield rest + (s,)


# ---------------------------------------------------------------------------
# Dominance between finite generating sets
# ---------------------------------------------------------------------------

@dataclass
class DominanceSample:
    s_labels: list[str]
    t_labels: list[str]
    sup_t_in_s: int  # max |t|_S
    sup_s_in_t: int  # max |s|_T
    relation: str
    radius: int

    def to_json(self) -> dict:
        return {"S": self.s_labels, "T": self.t_labels, "sup_t_in_S": self.sup_t_in_s,
                "sup_s_in_T": self.sup_s_in_t, "relation": self.relation, "radius": self.radius}


def dominance_compare(group: Group, s: Sequence[str], t: Sequence[str], radius: int) -> DominanceSample:
    """Observed Lipschitz constants between the word metrics of two generating sets.

    Each generator of one set is looked up in the radius-``radius`` ball of the
    other; a miss means the set does not generate that ball (structural error).
    """
    gs = group.with_generators(list(s))
    gt = group.with_generators(list(t))
    ball_s = enumerate_ball(gs, radius)
    ball_t = enumerate_ball(gt, radius)

    def sup(gens, ball, name):
        best = 0
        for lbl, x in gens:
            if x.nf not in ball.index:
                raise StructuralError(f"{lbl} is not in the radius-{radius} ball of {name}")
            best = max(best, ball.index[x.nf])
        return best

    t_in_s = sup(gt.generators, ball_s, "S")
    s_in_t = sup(gs.generators, ball_t, "T")
    return DominanceSample(list(s), list(t), t_in_s, s_in_t, "~", radius)
