"""Central extensions, Euler cocycles and quasi-retractions onto the center."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .ball import Ball, enumerate_ball
from .errors import ContractError, RankError, StructuralError
from .groups import AmalgamatedProduct, DirectProduct, Element, Group, QuotientGroup
from .quasimorph import Quasimorphism, _num
from .scalar import floor_scalar

__all__ = [
    "CenterDecomposition",
    "CentralExtension",
    "EulerCocycleSample",
    "QuasiRetraction",
    "CocycleCheck",
    "AmalgamatedProductReport",
    "euler_cocycle",
    "cocycle_growth",
    "build_quasi_retraction",
    "bounded_section",
    "central_commutator_obstruction",
    "induced_quotient_qm",
    "induced_quotient_quasimorphism",
    "section_coordinate_map",
    "amalgamated_product",
    "cocycle_identity_check",
]


# ---------------------------------------------------------------------------
# Center and extensions
# ---------------------------------------------------------------------------

class CenterDecomposition:
    """A central subgroup ``Z = <c_1..c_r> + F`` of ``E`` with ``F`` finite.

    The norm of ``z`` is ``sum |n_i|`` over its free coordinates plus 1 when
    its torsion part is non-trivial.
    """

    def __init__(self, group: Group, free: Sequence[Element], torsion: Sequence[Element] = ()):
        group.check(*free, *torsion)
        self.group = group
        self.free = tuple(free)
        self.torsion = tuple(torsion)
        for z in self.free + self.torsion:
            if not group.is_central(z):
                raise StructuralError(f"{group.format(z)} is not central")
        for z in self.free:
            if group.order(z) is not None:
                raise StructuralError(f"free generator {group.format(z)} has finite order")
        for t in self.torsion:
            if group.order(t) is None:
                raise StructuralError(f"torsion generator {group.format(t)} has infinite order")
        # free generators must be independent (checked on powers up to 12)
        # and meet F trivially
        for i, z in enumerate(self.free):
            others = self.free[:i] + self.free[i + 1:] + self.torsion
            if others and any(group.central_reduce(group.power(z, k), others)[0].is_identity()
                              for k in range(1, 13)):
                raise StructuralError("free generators are not independent")
        for t in self.torsion:
            if not t.is_identity() and self.free and group.central_reduce(t, self.free)[0].is_identity():
                raise StructuralError("torsion meets the free part")

    @property
    def rank(self) -> int:
        return len(self.free)

    @property
    def generators(self) -> tuple[Element, ...]:
        return self.free + self.torsion

    def decompose(self, z: Element) -> tuple[list[int], Element]:
        """Free coordinates and torsion part of ``z`` (raises if ``z`` is not in Z)."""
        group = self.group
        rep, coeffs = group.central_reduce(z, self.generators)
        if not rep.is_identity():
            raise StructuralError(f"{group.format(z)} is not in the central subgroup")
        free = coeffs[: self.rank]
        tors = group.identity
        for t, c in zip(self.torsion, coeffs[self.rank:]):
            tors = group.mul(tors, group.power(t, c))
        return free, tors

    def contains(self, z: Element) -> bool:
        try:
            self.decompose(z)
        except StructuralError:
            return False
        return True

    def norm(self, z: Element) -> int:
        free, tors = self.decompose(z)
        return sum(abs(c) for c in free) + (0 if tors.is_identity() else 1)

    def rho(self, coords: Sequence[int]) -> Element:
        """``c_1^n_1 ... c_r^n_r``."""
        out = self.group.identity
        for c, n in zip(self.free, coords):
            out = self.group.mul(out, self.group.power(c, n))
        return out

    def describe(self) -> dict:
        f = self.group.format
        return {"rank": self.rank, "free": [f(z) for z in self.free], "torsion": [f(t) for t in self.torsion]}


class CentralExtension:
    """``1 -> Z -> E -> G -> 1`` with ``G = E / Z`` and a section ``s: G -> E``.

    The default section lifts a class to its canonical representative, i.e.
    drops the central coordinates of the normal form.
    """

    def __init__(self, center: CenterDecomposition, section: Callable[[Element], Element] | None = None,
                 name: str = "extension", section_tag: str = "normal-form-lift"):
        self.E = center.group
        self.Z = center
        self.G = QuotientGroup(self.E, center.generators)
        self.name = name
        self.section_tag = section_tag
        self._section = section or self.G.lift

    def project(self, g: Element) -> Element:
        return self.G.project(g)

    def section(self, g: Element) -> Element:
        self.G.check(g)
        return self._section(g)

    def with_section(self, section: Callable[[Element], Element], tag: str, name: str | None = None) -> CentralExtension:
        return CentralExtension(self.Z, section, name or f"{self.name}/{tag}", tag)

    def check_section(self, ball: Ball) -> bool:
        """``pi(s(g)) == g`` on the ball and ``s(1) == 1``."""
        if not self.section(self.G.identity).is_identity():
            return False
        return all(self.project(self.section(Element(self.G, g.nf))) == Element(self.G, g.nf) for g in ball)

    def describe(self) -> dict:
        return {"name": self.name, "E": self.E.describe(), "Z": self.Z.describe(), "section": self.section_tag}


def euler_cocycle(ext: CentralExtension, g: Element, h: Element, strict: bool = True) -> Element:
    """``omega(g, h) = s(g) s(h) s(gh)^-1``.

    With ``strict`` the section must be normalized and the value must lie in
    ``Z``; otherwise the raw element of ``E`` is returned.
    """
    G, E = ext.G, ext.E
    G.check(g, h)
    if strict and not ext.section(G.identity).is_identity():
        raise StructuralError("section is not normalized: s(1) != 1")
    w = E.mul(E.mul(ext.section(g), ext.section(h)), E.inv(ext.section(G.mul(g, h))))
    if strict and not ext.Z.contains(w):
        raise StructuralError(f"cocycle value {E.format(w)} is not in Z; the section is not a lift")
    return w


@dataclass
class EulerCocycleSample:
    table: list[tuple[int, int]]  # (radius, max norm)
    exponent: float | None
    verdict: str  # bounded-evidence | growing
    name: str = ""

    def to_csv(self) -> str:
        return "radius,max_norm\n" + "".join(f"{r},{v}\n" for r, v in self.table)

    def to_json(self) -> dict:
        return {"extension": self.name, "table": [[r, v] for r, v in self.table],
                "growth_exponent": None if self.exponent is None else round(self.exponent, 6),
                "verdict": self.verdict}


def _growth_sample(values_by_radius: list[int], name: str) -> EulerCocycleSample:
    table = []
    best = 0
    for r, v in enumerate(values_by_radius):
        best = max(best, v)
        table.append((r, best))
    pts = [(r, v) for r, v in table if r > 0 and v > 0]
    exponent = None
    if len(pts) >= 2:
        xs = np.log([r for r, _ in pts])
        ys = np.log([v for _, v in pts])
        exponent = float(np.polyfit(xs, ys, 1)[0])
    tail = [v for _, v in table[-3:]]
    growing = len(tail) == 3 and tail[0] < tail[1] < tail[2]
    return EulerCocycleSample(table, exponent, "growing" if growing else "bounded-evidence", name)


def cocycle_growth(ext: CentralExtension, r_max: int) -> EulerCocycleSample:
    """Max central norm of ``omega`` over ``B(R)^2`` for ``R = 0..r_max``."""
    if r_max < 2:
        raise ContractError("r_max must be at least 2")
    ball = enumerate_ball(ext.G, r_max)
    elems = [Element(ext.G, g.nf) for g in ball]
    lengths = ball.lengths
    sections = [ext.section(g) for g in elems]
    E, G = ext.E, ext.G
    by_radius = [0] * (r_max + 1)
    for i, g in enumerate(elems):
        sg = sections[i]
        for j, h in enumerate(elems):
            gh = G.mul(g, h)
            w = E.mul(E.mul(sg, sections[j]), E.inv(ext.section(gh)))
            n = ext.Z.norm(w)
            r = max(lengths[i], lengths[j])
            if n > by_radius[r]:
                by_radius[r] = n
    return _growth_sample(by_radius, ext.name)


# ---------------------------------------------------------------------------
# Cocycle identity
# ---------------------------------------------------------------------------

@dataclass
class CocycleCheck:
    passed: bool
    triples: int
    witness: tuple | None = None
    reason: str = ""

    def to_json(self) -> dict:
        return {"passed": self.passed, "triples_checked": self.triples,
                "witness": list(self.witness) if self.witness else None, "reason": self.reason}


def cocycle_identity_check(ext: CentralExtension, ball: Ball) -> CocycleCheck:
    """``omega(g,h) omega(gh,k) == omega(h,k) omega(g,hk)`` for all triples of the ball.

    Stops at the first violation, which is either a value outside ``Z`` or a
    failure of the identity.
    """
    G, E = ext.G, ext.E
    elems = [Element(G, g.nf) for g in ball]
    memo: dict = {}

    def omega(x, y):
        key = (x.nf, y.nf)
        w = memo.get(key)
        if w is None:
            w = euler_cocycle(ext, x, y, strict=False)
            memo[key] = w
        return w

    count = 0
    for g in elems:
        for h in elems:
            w_gh = omega(g, h)
            if not ext.Z.contains(w_gh):
                return CocycleCheck(False, count, (G.format(g), G.format(h)),
                                    f"omega({G.format(g)}, {G.format(h)}) = {E.format(w_gh)} is not central")
            gh = G.mul(g, h)
            for k in elems:
                count += 1
                lhs = E.mul(w_gh, omega(gh, k))
                rhs = E.mul(omega(h, k), omega(g, G.mul(h, k)))
                if lhs != rhs:
                    return CocycleCheck(False, count, (G.format(g), G.format(h), G.format(k)),
                                        f"identity fails: {E.format(lhs)} != {E.format(rhs)}")
    return CocycleCheck(True, count)


# ---------------------------------------------------------------------------
# Quasi-retraction onto the center
# ---------------------------------------------------------------------------

@dataclass
class QuasiRetraction:
    """``phi = rho o eta o Phi`` with ``eta(alpha) = floor(Theta^-1 alpha)``."""

    center: CenterDecomposition
    qms: list[Quasimorphism]
    theta: list[list]
    theta_inv: list[list]
    A: list[tuple] = field(default_factory=list)  # free coordinates of c^-1 phi(c)
    step2_radius: int = 0
    step2_passed: bool = False

    def coordinates(self, g: Element) -> list[int]:
        """``eta(Phi(g))``."""
        vals = [q(g) for q in self.qms]
        return [floor_scalar(x) for x in linalg.mat_vec(self.theta_inv, vals)]

    def __call__(self, g: Element) -> Element:
        return self.center.rho(self.coordinates(g))

    def defect_set(self, ball: Ball) -> set[tuple]:
        """Free coordinates of ``phi(g) phi(h) phi(gh)^-1`` over the ball squared."""
        E = self.center.group
        elems = [Element(E, g.nf) for g in ball]
        coords = {g.nf: self.coordinates(g) for g in elems}
        out = set()
        for g in elems:
            for h in elems:
                gh = E.mul(g, h)
                c = coords.get(gh.nf) or self.coordinates(gh)
                out.add(tuple(a + b - x for a, b, x in zip(coords[g.nf], coords[h.nf], c)))
        return out

    def defect_growth(self, r_max: int) -> list[tuple[int, int]]:
        """Max ``l1`` norm of the defect set over ``B(R)^2`` per radius."""
        E = self.center.group
        return [(r, max(sum(abs(x) for x in d) for d in self.defect_set(enumerate_ball(E, r))))
                for r in range(r_max + 1)]

    def to_json(self) -> dict:
        return {"center": self.center.describe(), "quasimorphisms": [q.name for q in self.qms],
                "theta": [[_num(x) for x in row] for row in self.theta],
                "A": [list(a) for a in self.A], "step2_radius": self.step2_radius,
                "step2_passed": self.step2_passed}


def _central_box(center: CenterDecomposition, radius: int) -> list[tuple[int, ...]]:
    r = center.rank
    pts = [v for v in product(range(-radius, radius + 1), repeat=r) if sum(map(abs, v)) <= radius]
    return sorted(pts, key=lambda v: (sum(map(abs, v)), v))


def build_quasi_retraction(center: CenterDecomposition, qms: Sequence[Quasimorphism],
                           step2_radius: int = 6) -> QuasiRetraction:
    """Build ``phi`` from ``r`` quasimorphisms with ``Theta = (Phi(c_1), ..., Phi(c_r))`` invertible.

    Step 2 collects ``A = {c^-1 phi(c)}`` over the central box of
    ``step2_radius`` and passes when the box of half the radius already
    produces every element of ``A``.
    """
    qms = list(qms)
    E = center.group
    for q in qms:
        if not q.domain.same_group(E):
            raise StructuralError(f"{q.name} is not defined on E")
    r = center.rank
    if len(qms) != r:
        raise RankError(f"need exactly {r} quasimorphisms for a rank-{r} center, got {len(qms)}",
                        dependent_index=r if len(qms) > r else None)
    theta = [[q(c) for c in center.free] for q in qms]
    if r:
        indep = linalg.independent_rows(theta)
        if len(indep) < r:
            bad = next(i for i in range(r) if i not in indep)
            raise RankError(f"Theta is singular: {qms[bad].name} depends on the earlier quasimorphisms",
                            dependent_index=bad)
        theta_inv = linalg.inverse(theta)
    else:
        theta_inv = []
    ret = QuasiRetraction(center, qms, theta, theta_inv, step2_radius=step2_radius)
    full, half = set(), set()
    for v in _central_box(center, step2_radius):
        c = center.rho(v)
        a = tuple(x - y for x, y in zip(ret.coordinates(c), v))
        full.add(a)
        if sum(map(abs, v)) <= (step2_radius + 1) // 2:
            half.add(a)
    ret.A = sorted(full)
    ret.step2_passed = full <= half
    return ret


@dataclass
class BoundedSectionReport:
    extension: CentralExtension
    values: list[tuple]  # free coordinates of phi(s(g)) observed
    B: list[tuple]
    contained: bool
    before: EulerCocycleSample
    after: EulerCocycleSample

    def to_json(self) -> dict:
        return {"section": self.extension.section_tag, "phi_of_section": [list(v) for v in self.values],
                "B": [list(b) for b in self.B], "contained_in_B": self.contained,
                "before": self.before.to_json(), "after": self.after.to_json()}


def bounded_section(ext: CentralExtension, ret: QuasiRetraction, r_max: int = 6) -> BoundedSectionReport:
    """Replace the section by ``g -> phi(g0)^-1 g0`` (``g0`` the old lift) and resample.

    ``B = A . D`` is observed from the pairs ``(phi(g0)^-1, g0)`` that the new
    section actually uses; every ``phi(s(g))`` is checked to lie in it.
    """
    if not ret.step2_passed:
        raise ContractError("the quasi-retraction failed its Step-2 check")
    if not ret.center.group.same_group(ext.E):
        raise StructuralError("retraction and extension use different groups")
    E = ext.E
    center = ret.center

    def new_section(g: Element) -> Element:
        g0 = ext.section(g)
        return E.mul(E.inv(ret(g0)), g0)

    new = ext.with_section(new_section, "bounded")
    ball = enumerate_ball(ext.G, r_max)
    values, defects = set(), set()
    for g in ball:
        g = Element(ext.G, g.nf)
        g0 = ext.section(g)
        z = E.inv(ret(g0))
        cz, cg = ret.coordinates(z), ret.coordinates(g0)
        cs = ret.coordinates(E.mul(z, g0))
        values.add(tuple(cs))
        defects.add(tuple(x - a - b for x, a, b in zip(cs, cz, cg)))
    zero = tuple([0] * center.rank)
    A = set(ret.A) | {zero}
    B = {tuple(a + d for a, d in zip(x, y)) for x in A for y in defects}
    before = cocycle_growth(ext, r_max)
    after = cocycle_growth(new, r_max)
    return BoundedSectionReport(new, sorted(values), sorted(B), values <= B, before, after)


# ---------------------------------------------------------------------------
# Obstruction: central commutators of infinite order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutatorWitness:
    g: Element
    h: Element
    commutator: Element

    def to_json(self) -> dict:
        f = self.g.group.format
        return {"g": f(self.g), "h": f(self.h), "commutator": f(self.commutator)}


def central_commutator_obstruction(group: Group, radius: int) -> CommutatorWitness | None:
    """First pair of ``B(R)^2`` (ball order) whose commutator is central of infinite order."""
    ball = enumerate_ball(group, radius)
    elems = [Element(group, g.nf) for g in ball]
    seen = set()
    for g in elems:
        for h in elems:
            c = group.commutator(g, h)
            if c.is_identity() or c.nf in seen:
                continue
            seen.add(c.nf)
            if group.is_central(c) and group.order(c) is None:
                return CommutatorWitness(g, h, c)
    return None


# ---------------------------------------------------------------------------
# Quotient quasimorphisms induced through a section
# ---------------------------------------------------------------------------

def induced_quotient_qm(ext: CentralExtension, line, g: Element):
    """``chi'(g) = chi(s(g))`` where ``chi(x)`` is the position of ``x . o`` on the line."""
    if line.model != "quasi-line":
        raise ContractError("induced quotient maps need a quasi-line action")
    if not line.group.same_group(ext.E):
        raise StructuralError("the quasi-line is not an action of E")
    return line.act(ext.section(g), line.basepoint) - line.basepoint


def induced_quotient_quasimorphism(ext: CentralExtension, line, ball: Ball | None = None) -> Quasimorphism:
    """``chi'`` as a quasimorphism on ``G``.

    The declared defect is ``2 D(chi) + max |chi(omega)|`` with the last term
    sampled over ``ball`` (default ``B(3)`` of ``G``).
    """
    ball = ball or enumerate_ball(ext.G, 3)
    base = line.eps
    contribution = 0
    for g in ball:
        for h in ball:
            w = euler_cocycle(ext, Element(ext.G, g.nf), Element(ext.G, h.nf), strict=False)
            v = abs(line.act(w, line.basepoint) - line.basepoint)
            contribution = max(contribution, v)
    bound = None if base is None else 2 * base + contribution
    return Quasimorphism(ext.G, lambda g: induced_quotient_qm(ext, line, g), bound,
                         name=f"{line.name}'", tag="composed-with-section", exact=line.exact,
                         params={"section_contribution": contribution})


def section_coordinate_map(ext: CentralExtension, index: int = 0) -> Quasimorphism:
    """``g -> n_index`` where ``g = s(pi g) * c_1^n_1 ... c_r^n_r`` (no defect bound known)."""
    E, Z = ext.E, ext.Z

    def fn(g):
        z = E.mul(E.inv(ext.section(ext.project(g))), g)
        return Z.decompose(z)[0][index]

    return Quasimorphism(E, fn, None, name=f"section-coordinate[{index}]", tag="composed-with-section")


# ---------------------------------------------------------------------------
# Amalgamated direct products
# ---------------------------------------------------------------------------

@dataclass
class AmalgamatedProductReport:
    group: AmalgamatedProduct
    generated: bool
    intersection_is_z: bool
    commuting: bool
    quotient_matches: bool
    radius: int

    def to_json(self) -> dict:
        return {"group": self.group.describe(), "generated_by_H_and_K": self.generated,
                "intersection_is_Z": self.intersection_is_z, "factors_commute": self.commuting,
                "quotient_is_product": self.quotient_matches, "check_radius": self.radius}


def amalgamated_product(h: Group, k: Group, z_h: Sequence[Element], z_k: Sequence[Element],
                        radius: int = 3) -> AmalgamatedProductReport:
    """``(H x K) / <(z, z^-1)>`` with the defining properties checked.

    (i) generators come from ``H`` or ``K``; (ii) ``H`` and ``K`` meet in
    ``Z`` on balls of radius ``radius``; (iii) generators of the two factors
    commute; and ``G/Z`` matches ``H/Z x K/Z`` on balls up to ``radius``.
    """
    G = AmalgamatedProduct(h, k, z_h, z_k)
    from_h = {G.embed_h(Element(h, x.nf)).nf for _, x in h.generators}
    from_k = {G.embed_k(Element(k, x.nf)).nf for _, x in k.generators}
    generated = all(s.nf in from_h or s.nf in from_k for _, s in G.generators)

    img_h = {G.embed_h(x).nf: x for x in (Element(h, y.nf) for y in enumerate_ball(h, radius))}
    img_k = {G.embed_k(Element(k, y.nf)).nf for y in enumerate_ball(k, radius)}
    intersection_ok = True
    for nf in img_h.keys() & img_k:
        x = img_h[nf]
        if z_h and not h.central_reduce(x, z_h)[0].is_identity():
            intersection_ok = False
        if not z_h and not x.is_identity():
            intersection_ok = False

    commuting = all(G.mul(G.embed_h(Element(h, a.nf)), G.embed_k(Element(k, b.nf)))
                    == G.mul(G.embed_k(Element(k, b.nf)), G.embed_h(Element(h, a.nf)))
                    for _, a in h.generators for _, b in k.generators)

    quotient_ok = _quotient_matches_product(G, h, k, z_h, z_k, radius)
    return AmalgamatedProductReport(G, generated, intersection_ok, commuting, quotient_ok, radius)


def _quotient_matches_product(G: AmalgamatedProduct, h: Group, k: Group, z_h, z_k, radius: int) -> bool:
    zs = [G.embed_h(z) for z in z_h]
    gbar = QuotientGroup(G, zs) if zs else G
    hbar = QuotientGroup(h, list(z_h)) if z_h else h
    kbar = QuotientGroup(k, list(z_k)) if z_k else k
    prod_group = DirectProduct(hbar, kbar)
    # generators of G/Z in the order (H gens, K gens) mapped into the product
    pairs = []
    for _, a in h.generators:
        pairs.append((G.embed_h(Element(h, a.nf)), prod_group.embed(0, Element(hbar, _red(hbar, a)))))
    for _, b in k.generators:
        pairs.append((G.embed_k(Element(k, b.nf)), prod_group.embed(1, Element(kbar, _red(kbar, b)))))
    gbar_g = gbar.with_generating_elements([_proj(gbar, x) for x, _ in pairs])
    prod_g = prod_group.with_generating_elements([y for _, y in pairs])
    # the map sends (h, k) to (h mod Z, k mod Z)
    def image(x: Element) -> tuple:
        hn, kn = x.nf
        return (_red(hbar, Element(h, hn)), _red(kbar, Element(k, kn)))

    ball_g = enumerate_ball(gbar_g, radius)
    ball_p = enumerate_ball(prod_g, radius)
    if ball_g.sphere_sizes() != ball_p.sphere_sizes():
        return False
    mapped = {image(x): ball_g.length(x) for x in ball_g}
    if len(mapped) != len(ball_g):
        return False
    return all(mapped.get(y.nf) == ball_p.length(y) for y in ball_p)


def _red(quot: Group, x: Element):
    return quot._reduce(x.nf) if isinstance(quot, QuotientGroup) else x.nf


def _proj(quot: Group, x: Element) -> Element:
    return quot.project(x) if isinstance(quot, QuotientGroup) else x
