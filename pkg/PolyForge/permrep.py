"""
permrep.py

Permutation images of coset actions and the group computations done on them: element orders,
cyclic-subgroup intersections, group orders and derived series.

Permutations act on 0..n-1 and compose left to right: (p*q)(i) = q(p(i)).

Group orders come from one of two places:
- a regular group (transitive, with a transitive centralizer) has order equal to its degree, and
  every subgroup of it is semiregular, so subgroup orders are orbit lengths;
- anything else goes through a deterministic Schreier-Sims stabilizer chain.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import logger, DEBUG, DEGREE_BOUND, DERIVED_SERIES_CAP
from .cosetenum import CosetTable
from .fpcore import Word
from .utils import ResourceLimitError


class DegreeBoundError(ResourceLimitError):
    pass


class Permutation:
    __slots__ = ("images",)

    def __init__(self, images):
        self.images = np.asarray(images, dtype=np.int64)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(np.arange(degree, dtype=np.int64))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return int(self.images[point])

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(other.images[self.images])

    def __invert__(self) -> "Permutation":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(len(self.images), dtype=np.int64)
        return Permutation(inv)

    def __pow__(self, k: int) -> "Permutation":
        if k < 0:
            return (~self) ** -k
        result = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.images, other.images)

    def __hash__(self) -> int:
        return hash(self.images.tobytes())

    def __repr__(self) -> str:
        return f"Permutation(degree={self.degree}, order={self.order()})"

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(len(self.images))))

    def cycle_lengths(self) -> List[int]:
        images = self.images.tolist()
        seen = bytearray(len(images))
        lengths = []
        for start in range(len(images)):
            if seen[start]:
                continue
            length = 0
            i = start
            while not seen[i]:
                seen[i] = 1
                i = images[i]
                length += 1
            lengths.append(length)
        return lengths

    def order(self) -> int:
        result = 1
        for length in set(self.cycle_lengths()):
            result = result * length // math.gcd(result, length)
        return result


def element_order(p: Permutation) -> int:
    """Least common multiple of the cycle lengths."""
    return p.order()


def cyclic_intersection_order(p: Permutation, q: Permutation) -> int:
    """|<p> ∩ <q>| by listing both cyclic groups."""
    powers_p = set()
    x = Permutation.identity(p.degree)
    for _ in range(p.order()):
        powers_p.add(x.images.tobytes())
        x = x * p
    count = 0
    y = Permutation.identity(q.degree)
    for _ in range(q.order()):
        if y.images.tobytes() in powers_p:
            count += 1
        y = y * q
    return count


class _ChainLevel:
    """One level of a stabilizer chain: a base point, its Schreier tree and the stabilizer below."""

    def __init__(self, degree: int):
        self.degree = degree
        self.basepoint: Optional[int] = None
        # every generator this level has accepted, including those that fix the base point
        self.tree_gens: List[Tuple[Permutation, Permutation]] = []
        # point -> (index into tree_gens, use inverse) moving the point one step towards the base point
        self.tree: Dict[int, Optional[Tuple[int, bool]]] = {}
        self.stab: Optional["_ChainLevel"] = None

    def order(self) -> int:
        if self.basepoint is None:
            return 1
        return len(self.tree) * self.stab.order()

    def _visit(self, a: int, i: int, fresh: List[int]):
        g, g_inv = self.tree_gens[i]
        for use_inverse, h in ((False, g), (True, g_inv)):
            b = int(h.images[a])
            if b not in self.tree:
                # h moves a to b, so the opposite letter moves b back to a
                self.tree[b] = (i, not use_inverse)
                fresh.append(b)

    def _grow_tree(self, old_points: List[int], new_index: int) -> List[int]:
        """Extend the orbit after tree_gens[new_index] was appended; returns the points added.

        Existing tree edges are kept, so the transversal of an old point never changes.
        """
        fresh: List[int] = []
        for a in old_points:
            self._visit(a, new_index, fresh)
        k = 0
        while k < len(fresh):
            a = fresh[k]
            k += 1
            for i in range(len(self.tree_gens)):
                self._visit(a, i, fresh)
        return fresh

    def move_to_basepoint(self, a: int, p: Permutation) -> Optional[Permutation]:
        if a not in self.tree:
            return None
        while a != self.basepoint:
            i, use_inverse = self.tree[a]
            g = self.tree_gens[i][1] if use_inverse else self.tree_gens[i][0]
            a = int(g.images[a])
            p = p * g
        return p

    def sift(self, p: Permutation) -> Permutation:
        if self.basepoint is None:
            return p
        moved = self.move_to_basepoint(int(p.images[self.basepoint]), p)
        if moved is None:
            return p
        return self.stab.sift(moved)

    def add_gen(self, p: Permutation):
        p = self.sift(p)
        if not p.is_identity():
            self._add_nonmember(p)

    def schreier_generator(self, a: int, i: int) -> Permutation:
        identity = Permutation.identity(self.degree)
        t = ~self.move_to_basepoint(a, identity) * self.tree_gens[i][0]
        return self.move_to_basepoint(int(t.images[self.basepoint]), t)

    def _add_nonmember(self, p: Permutation):
        if self.basepoint is None:
            moved = np.nonzero(p.images != np.arange(self.degree))[0]
            if len(moved) == 0:
                return
            self.basepoint = int(moved[0])
            self.stab = _ChainLevel(self.degree)
            self.tree = {self.basepoint: None}
        old_points = list(self.tree)
        self.tree_gens.append((p, ~p))
        new_index = len(self.tree_gens) - 1
        if int(p.images[self.basepoint]) == self.basepoint:
            self.stab._add_nonmember(p)
        fresh = self._grow_tree(old_points, new_index)
        # (old point, old generator) pairs were sifted when they first appeared
        pairs = [(a, new_index) for a in old_points]
        pairs += [(a, i) for a in fresh for i in range(len(self.tree_gens))]
        for a, i in pairs:
            self.stab.add_gen(self.schreier_generator(a, i))


class StabilizerChain:
    """Deterministic Schreier-Sims; base points are the first moved point of each new generator."""

    def __init__(self, generators: Sequence[Permutation], degree: int):
        self.top = _ChainLevel(degree)
        for g in generators:
            self.top.add_gen(g)

    def order(self) -> int:
        return self.top.order()

    def contains(self, p: Permutation) -> bool:
        return self.top.sift(p).is_identity()

    def base(self) -> List[int]:
        points = []
        level = self.top
        while level is not None and level.basepoint is not None:
            points.append(level.basepoint)
            level = level.stab
        return points


@dataclass
class DerivedSeries:
    orders: List[int]
    solvable: Optional[bool]
    verdict: str  # "solvable", "not solvable" or "undecided"
    method: str = "stabilizer-chain"

    def to_dict(self) -> dict:
        return {
            "orders": self.orders,
            "solvable": self.solvable,
            "verdict": self.verdict,
            "method": self.method,
        }


class PermGroup:
    """A permutation group with one generator per presentation generator."""

    def __init__(self, generators: Sequence[Permutation], names: Sequence[str] = None):
        if not generators:
            raise ValueError("A permutation group needs at least one generator")
        degree = generators[0].degree
        for g in generators:
            if g.degree != degree:
                raise ValueError("Generators act on different numbers of points")
        self.degree = degree
        self.generators = list(generators)
        self.inverses = [~g for g in self.generators]
        self.names = list(names) if names else [f"g{i}" for i in range(len(generators))]
        self._regular: Optional[bool] = None
        self._chain: Optional[StabilizerChain] = None

    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def evaluate(self, w: Word) -> Permutation:
        images = np.arange(self.degree, dtype=np.int64)
        for x in w.letters:
            g = self.generators[x - 1] if x > 0 else self.inverses[-x - 1]
            images = g.images[images]
        return Permutation(images)

    def apply_word(self, element: Permutation, w: Word) -> Permutation:
        return element * self.evaluate(w)

    def is_identity(self, element: Permutation) -> bool:
        return element.is_identity()

    def orbit(self, point: int = 0, gens: Sequence[Permutation] = None) -> List[int]:
        gens = self.generators if gens is None else gens
        seen = np.zeros(self.degree, dtype=bool)
        seen[point] = True
        orbit = [point]
        k = 0
        while k < len(orbit):
            a = orbit[k]
            k += 1
            for g in gens:
                b = int(g.images[a])
                if not seen[b]:
                    seen[b] = True
                    orbit.append(b)
        return orbit

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree

    def is_regular(self) -> bool:
        """
        Transitive with a transitive centralizer. The centralizer elements tried are the left
        multiplications by the generators, built along a breadth-first tree of point 0.
        """
        if self._regular is not None:
            return self._regular
        self._regular = False
        if not self.is_transitive():
            return False
        # breadth-first tree: point -> (parent, generator index)
        parent = np.full(self.degree, -1, dtype=np.int64)
        via = np.full(self.degree, -1, dtype=np.int64)
        order = [0]
        parent[0] = 0
        k = 0
        while k < len(order):
            a = order[k]
            k += 1
            for i, g in enumerate(self.generators):
                b = int(g.images[a])
                if parent[b] < 0:
                    parent[b] = a
                    via[b] = i
                    order.append(b)
        centralizer = []
        for g in self.generators:
            c = np.full(self.degree, -1, dtype=np.int64)
            c[0] = g.images[0]
            for b in order[1:]:
                c[b] = self.generators[via[b]].images[c[parent[b]]]
            if len(np.unique(c)) != self.degree:
                return False
            for h in self.generators:
                # c commutes with h: c(x·h) == c(x)·h for every x
                if not np.array_equal(c[h.images], h.images[c]):
                    return False
            centralizer.append(Permutation(c))
        self._regular = len(self.orbit(0, centralizer)) == self.degree
        return self._regular

    def chain(self) -> StabilizerChain:
        if self.degree > DEGREE_BOUND:
            raise DegreeBoundError(f"Degree {self.degree} exceeds the configured bound {DEGREE_BOUND}")
        if self._chain is None:
            self._chain = StabilizerChain(self.generators, self.degree)
        return self._chain

    def order(self) -> int:
        if self.degree > DEGREE_BOUND:
            raise DegreeBoundError(f"Degree {self.degree} exceeds the configured bound {DEGREE_BOUND}")
        if self.is_regular():
            return self.degree
        return self.chain().order()

    def contains(self, p: Permutation) -> bool:
        return self.chain().contains(p)


def image_of_table(t: CosetTable) -> PermGroup:
    """Each generator acts on the cosets of a complete standardized table by c -> c·g."""
    t.require_complete("image_of_table")
    if not t.is_standard:
        from .cosetenum import standardize
        t = standardize(t)
    perms = [Permutation(np.frombuffer(col, dtype=np.int32).astype(np.int64)) for col in t.columns[0::2]]
    return PermGroup(perms, t.presentation.alphabet.names)


def evaluate(g: PermGroup, w: Word) -> Permutation:
    return g.evaluate(w)


def group_order(g: PermGroup) -> int:
    return g.order()


def _commutator(p: Permutation, q: Permutation) -> Permutation:
    return (~p) * (~q) * p * q


def _derived_series_regular(g: PermGroup, cap: int) -> DerivedSeries:
    """
    Subgroups of a regular group act semiregularly: |H| is the orbit length of point 0 and
    x ∈ G lies in H iff 0·x lies in that orbit.
    """
    orders = [g.degree]
    current = list(g.generators)
    for _ in range(cap):
        candidates = []
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                c = _commutator(current[i], current[j])
                if not c.is_identity():
                    candidates.append(c)
        if not candidates:
            orders.append(1)
            return DerivedSeries(orders, True, "solvable", "regular-orbit")
        seen = np.zeros(g.degree, dtype=bool)
        seen[0] = True
        orbit = [0]
        gens: List[Permutation] = []

        def add(p: Permutation):
            gens.append(p)
            # extend the orbit of 0 under the enlarged generating set
            start = len(orbit)
            for b in p.images[np.array(orbit)].tolist():
                if not seen[b]:
                    seen[b] = True
                    orbit.append(b)
            # old points are closed under the old generators; only new points need every generator
            k = start
            while k < len(orbit):
                a = orbit[k]
                k += 1
                for h in gens:
                    b = int(h.images[a])
                    if not seen[b]:
                        seen[b] = True
                        orbit.append(b)

        for c in candidates:
            if not seen[c.images[0]]:
                add(c)
        # normal closure in <current>
        changed = True
        while changed:
            changed = False
            for k in list(gens):
                for s in current:
                    conj = (~s) * k * s
                    if not seen[conj.images[0]]:
                        add(conj)
                        changed = True
        order = len(orbit)
        if order == orders[-1]:
            orders.append(order)
            return DerivedSeries(orders, False, "not solvable", "regular-orbit")
        orders.append(order)
        if order == 1:
            return DerivedSeries(orders, True, "solvable", "regular-orbit")
        current = gens
    return DerivedSeries(orders, None, "undecided", "regular-orbit")


def _derived_series_chain(g: PermGroup, cap: int) -> DerivedSeries:
    orders = [g.order()]
    current = list(g.generators)
    for _ in range(cap):
        gens = []
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                c = _commutator(current[i], current[j])
                if not c.is_identity():
                    gens.append(c)
        if not gens:
            orders.append(1)
            return DerivedSeries(orders, True, "solvable")
        chain = StabilizerChain(gens, g.degree)
        changed = True
        while changed:
            changed = False
            for k in list(gens):
                for s in current:
                    conj = (~s) * k * s
                    if not chain.contains(conj):
                        gens.append(conj)
                        chain.top.add_gen(conj)
                        changed = True
        order = chain.order()
        if order == orders[-1]:
            orders.append(order)
            return DerivedSeries(orders, False, "not solvable")
        orders.append(order)
        if order == 1:
            return DerivedSeries(orders, True, "solvable")
        current = gens
    return DerivedSeries(orders, None, "undecided")


def derived_series(g: PermGroup, cap: int = DERIVED_SERIES_CAP) -> DerivedSeries:
    """
    Orders of G ≥ G' ≥ G'' ≥ ... until the series stabilizes. Solvable iff it reaches 1;
    a series that has not stabilized after `cap` steps is reported as undecided.
    """
    if g.degree > DEGREE_BOUND:
        raise DegreeBoundError(f"Degree {g.degree} exceeds the configured bound {DEGREE_BOUND}")
    if g.is_regular():
        series = _derived_series_regular(g, cap)
    else:
        series = _derived_series_chain(g, cap)
    if DEBUG:
        logger.debug(f"Derived series {series.orders}: {series.verdict}")
    return series
