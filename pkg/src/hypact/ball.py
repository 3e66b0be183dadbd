"""Word-metric balls and geodesic word lengths."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterator

from .errors import BudgetError
from .groups import Element, Group

__all__ = ["Ball", "enumerate_ball", "word_length", "order_key", "DEFAULT_BALL_BUDGET", "DEFAULT_SEARCH_BUDGET"]

DEFAULT_BALL_BUDGET = 3_000_000
DEFAULT_SEARCH_BUDGET = 1_000_000


@dataclass
class Ball:
    """Exact ball ``B(R)`` of a word metric.

    ``elements`` are ordered by (word length, normal-form key); elements of
    the sphere ``S(k)`` occupy ``elements[starts[k]:starts[k+1]]``.
    """

    group: Group
    radius: int
    elements: list[Element]
    starts: list[int]
    index: dict = field(repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __contains__(self, g: Element) -> bool:
        return g.nf in self.index

    def length(self, g: Element) -> int:
        """Word length of ``g`` (must lie in the ball)."""
        return self.index[g.nf]

    @property
    def lengths(self) -> list[int]:
        return [self.index[g.nf] for g in self.elements]

    def sphere(self, k: int) -> list[Element]:
        return self.elements[self.starts[k]:self.starts[k + 1]]

    def sphere_sizes(self) -> list[int]:
        return [self.starts[k + 1] - self.starts[k] for k in range(self.radius + 1)]

    def restrict(self, r: int) -> Ball:
        """The sub-ball ``B(r)`` for ``r <= radius``."""
        if r > self.radius:
            raise ValueError(f"radius {r} exceeds ball radius {self.radius}")
        if r == self.radius:
            return self
        end = self.starts[r + 1]
        elems = self.elements[:end]
        return Ball(self.group, r, elems, self.starts[: r + 2],
                    {g.nf: self.index[g.nf] for g in elems})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["element", "word_length"])
        for g in self.elements:
            w.writerow([self.group.format(g), self.index[g.nf]])
        return buf.getvalue()


_CACHE: dict[tuple, Ball] = {}


def order_key(nf) -> tuple:
    """Deterministic sort key on normal forms.

    Coordinates compare as (is zero, magnitude, is negative), so within a
    sphere ``a`` precedes ``a^-1`` and both precede ``b``.
    """
    return tuple((x == 0, abs(x), x < 0) for x in _flat(nf))


def _flat(t):
    if isinstance(t, tuple):
        for x in t:
            yield from _flat(x)
    else:
        yield t


def _cache_key(group: Group) -> tuple:
    return (group.signature, tuple(g.nf for _, g in group.generators))


def enumerate_ball(group: Group, radius: int, budget: int = DEFAULT_BALL_BUDGET) -> Ball:
    """Breadth-first enumeration of ``B(radius)`` for the designated generators.

    Raises :class:`BudgetError` (``partial`` = last complete radius) when more
    than ``budget`` elements would be stored.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    key = _cache_key(group)
    cached = _CACHE.get(key)
    if cached is not None and cached.radius >= radius:
        ball = cached.restrict(radius)
        return ball if ball.group is group else Ball(group, ball.radius, [Element(group, g.nf) for g in ball.elements],
                                                      ball.starts, ball.index)

    gens = [s.nf for _, s in group.generators]
    mul = group._mul
    if cached is not None:
        index = dict(cached.index)
        elements = [g.nf for g in cached.elements]
        starts = list(cached.starts)
        frontier = elements[starts[-2]:]
        done = cached.radius
    else:
        ident = group.identity_nf
        index = {ident: 0}
        elements = [ident]
        starts = [0, 1]
        frontier = [ident]
        done = 0
    for k in range(done + 1, radius + 1):
        new = set()
        for x in frontier:
            for s in gens:
                y = mul(x, s)
                if y not in index and y not in new:
                    new.add(y)
        if len(index) + len(new) > budget:
            raise BudgetError(
                f"ball of radius {k} exceeds the budget of {budget} elements",
                partial={"complete_radius": k - 1, "elements": len(index)},
            )
        frontier = sorted(new, key=order_key)
        for y in frontier:
            index[y] = k
        elements.extend(frontier)
        starts.append(len(elements))
    ball = Ball(group, radius, [Element(group, nf) for nf in elements], starts, index)
    _CACHE[key] = ball
    return ball


def clear_cache() -> None:
    _CACHE.clear()


def word_length(group: Group, g: Element, budget: int = DEFAULT_SEARCH_BUDGET) -> int:
    """Exact word length by bidirectional breadth-first search.

    Raises :class:`BudgetError` with ``partial={"lower_bound": L}`` when more
    than ``budget`` states are visited before the two searches meet.
    """
    group.check(g)
    target = g.nf
    ident = group.identity_nf
    if target == ident:
        return 0
    gens = [s.nf for _, s in group.generators]
    mul = group._mul
    dist = [{ident: 0}, {target: 0}]
    frontier = [[ident], [target]]
    depth = [0, 0]
    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        mine, other = dist[side], dist[1 - side]
        nxt = []
        best = None
        d = depth[side] + 1
        for x in frontier[side]:
            for s in gens:
                # the generating set is symmetric, so right multiplication
                # explores the Cayley graph from either endpoint
                y = mul(x, s)
                if y in mine:
                    continue
                mine[y] = d
                nxt.append(y)
                if y in other:
                    total = d + other[y]
                    best = total if best is None else min(best, total)
        if best is not None:
            return best
        frontier[side] = nxt
        depth[side] = d
        if len(dist[0]) + len(dist[1]) > budget:
            raise BudgetError(
                f"word-length search exceeded {budget} states",
                partial={"lower_bound": depth[0] + depth[1] + 1},
            )
    raise BudgetError("generators do not reach the element", partial={"lower_bound": None})
