"""
quotient.py

The finite quotients G_m = U / <x_1^m, ..., x_4^m> of a group U by characteristic subgroups of a
free abelian normal subgroup N with basis x_1..x_4.

An element is a pair (q, v): q a coset of N, v a vector mod m. The pair stands for t(q)·u with t the
Schreier transversal and u ∈ N of coordinates v, so a generator acts by

    (q, v)·g = (q·g, v·A_g + τ(q, g))     where t(q)·g = t(q·g)·n and τ(q, g) = coordinates(n).

The τ tables and action matrices are computed once per case over Z and checked exactly before any
reduction mod m.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .config import logger, DEBUG, ORDER_CAP, CROSS_VALIDATE_BUDGET, VALIDATE_ALL_FIBERS
from .cosetenum import EnumConfig, enumerate_cosets, standardize
from .fpcore import Presentation, Word
from .intlinalg import ActionPair, action_matrices
from .permrep import image_of_table
from .presets import CaseData, WITNESS_BASE, WITNESS_IMAGE
from .subgrouppres import CoordinateMap
from .utils import PolyForgeError, ResourceLimitError

# exact-mode vectors are int64; anything this large means the data is wrong
EXACT_BOUND = 2 ** 40


class PairValidationError(PolyForgeError):
    """Exact pair arithmetic disagrees with the presentation. A convention or transversal bug."""


class OrderCapError(ResourceLimitError):
    pass


@dataclass
class TwistData:
    """
    Exact data shared by every modulus. Arrays are indexed by column: generator g owns column 2g,
    its inverse column 2g+1.
    """
    case_id: int
    presentation: Presentation
    index: int
    perms: List[np.ndarray]
    # tau[col][q] is τ(q, letter of col), shape (index, rank)
    tau: List[np.ndarray]
    matrices: List[np.ndarray]
    rank: int = 4
    validated_fibers: int = 0

    @property
    def generator_offsets(self) -> Dict[str, Tuple[int, ...]]:
        """δ_g = τ(0, g) for every signed generator."""
        out = {}
        for col, tau in enumerate(self.tau):
            name = self.presentation.alphabet.names[col >> 1]
            out[name if col % 2 == 0 else f"{name}^-1"] = tuple(int(x) for x in tau[0])
        return out


def _column(letter: int) -> int:
    return 2 * (abs(letter) - 1) + (letter < 0)


def _evaluate_exact(data: TwistData, w: Word, q: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Apply w to every pair (q[i], v[i]) at once, over Z."""
    for x in w.letters:
        col = _column(x)
        v = v @ data.matrices[col] + data.tau[col][q]
        q = data.perms[col][q]
    if len(v) and np.abs(v).max() >= EXACT_BOUND:
        raise PairValidationError(f"Exact pair vectors exceed {EXACT_BOUND}")
    return q, v


def build_twist_data(case: CaseData, cm: CoordinateMap, ap: Optional[ActionPair] = None,
                     all_fibers: bool = VALIDATE_ALL_FIBERS) -> TwistData:
    """
    τ tables for every coset and signed generator, then the exact checks: every relator of the
    presentation fixes (q, 0) for every coset q (or just q = 0), and every x_i maps (0, 0) to (0, e_i).
    """
    ap = ap or action_matrices(cm)
    t = cm.table
    p = cm.presentation
    n = t.live_count
    rank = cm.rank
    perms = [np.frombuffer(col, dtype=np.int32).astype(np.int64) for col in t.columns]
    matrices = []
    for m in ap.matrices:
        matrices.append(np.array(m.to_list(), dtype=np.int64))
        matrices.append(np.array(m.inverse().to_list(), dtype=np.int64))

    # M[c] = action matrix of the transversal word t(c), built along the transversal tree
    reps = cm.transversal.representatives
    transforms = np.zeros((n, rank, rank), dtype=np.int64)
    transforms[0] = np.eye(rank, dtype=np.int64)
    for c in sorted(range(1, n), key=lambda c: len(reps[c])):
        last = reps[c].letters[-1]
        col = _column(last)
        parent = perms[col ^ 1][c]
        transforms[c] = transforms[parent] @ matrices[col]

    tau = []
    for g in range(p.rank):
        schreier = np.array(cm.generator_coords[g], dtype=np.int64)
        forward = perms[2 * g]
        # s^{t(q·g)} for n = t(q·g)^-1 t(q) g
        tau.append(np.einsum("ij,ijk->ik", schreier, transforms[forward]))
        back = perms[2 * g + 1]
        # (s_{r,g}^-1)^{t(r)} with r = q·g^-1
        tau.append(-np.einsum("ij,ijk->ik", schreier[back], transforms[back]))

    data = TwistData(case.case_id, p, n, perms, tau, matrices, rank)
    starts = np.arange(n, dtype=np.int64) if all_fibers else np.zeros(1, dtype=np.int64)
    for r in p.relators:
        q, v = _evaluate_exact(data, r, starts, np.zeros((len(starts), rank), dtype=np.int64))
        if not np.array_equal(q, starts) or v.any():
            bad = int(np.nonzero((q != starts) | v.any(axis=1))[0][0])
            logger.error(f"Relator {p.format(r)} moves ({int(starts[bad])}, 0) in case {case.case_id}")
            raise PairValidationError(
                f"Relator {p.format(r)} is not the identity from coset {int(starts[bad]) + 1}"
            )
    for i, x in enumerate(cm.basis):
        q, v = _evaluate_exact(data, x, np.zeros(1, dtype=np.int64), np.zeros((1, rank), dtype=np.int64))
        expected = np.eye(rank, dtype=np.int64)[i]
        if q[0] != 0 or not np.array_equal(v[0], expected):
            logger.error(f"Basis word {p.format(x)} maps to ({int(q[0])}, {v[0].tolist()})")
            raise PairValidationError(f"Basis word x{i + 1} does not evaluate to e{i + 1}")
    data.validated_fibers = len(starts)
    if DEBUG:
        logger.debug(f"Twist data for case {case.case_id} validated on {len(starts)} fibers")
    return data


_TWIST_CACHE: Dict[tuple, TwistData] = {}


def twist_data_for(case: CaseData, cm: CoordinateMap, ap: Optional[ActionPair] = None) -> TwistData:
    """Cached build_twist_data; one entry per case and coordinate map."""
    key = (case.case_id, cm.table.live_count, cm.basis_matrix.rows)
    if key not in _TWIST_CACHE:
        _TWIST_CACHE[key] = build_twist_data(case, cm, ap)
    return _TWIST_CACHE[key]


@dataclass(frozen=True)
class PairElement:
    q: int
    v: Tuple[int, ...]


class PairGroup:
    """Q ⋉ (Z/m)^4 as a group on the pairs reachable from (0, 0)."""

    def __init__(self, case: CaseData, m: int, data: TwistData):
        if m < 1:
            raise ValueError(f"Modulus must be at least 1, got {m}")
        self.case = case
        self.m = m
        self.data = data
        self.rank = data.rank
        self.perms = [p.tolist() for p in data.perms]
        self.tau = [(t % m).tolist() for t in data.tau]
        self.matrices = [(a % m).tolist() for a in data.matrices]

    @property
    def presentation(self) -> Presentation:
        return family_presentation(self.case, self.m, self.data.presentation)

    def identity(self) -> PairElement:
        return PairElement(0, (0,) * self.rank)

    def is_identity(self, e: PairElement) -> bool:
        return e.q == 0 and not any(e.v)

    def order(self) -> int:
        return self.data.index * self.m ** self.rank

    def apply_letter(self, e: PairElement, letter: int) -> PairElement:
        col = _column(letter)
        a = self.matrices[col]
        tau = self.tau[col][e.q]
        m = self.m
        v = tuple(
            (sum(e.v[i] * a[i][j] for i in range(self.rank)) + tau[j]) % m
            for j in range(self.rank)
        )
        return PairElement(self.perms[col][e.q], v)

    def apply_word(self, e: PairElement, w: Word) -> PairElement:
        for x in w.letters:
            e = self.apply_letter(e, x)
        return e

    def evaluate(self, w: Word) -> PairElement:
        return self.apply_word(self.identity(), w)

    def element_order(self, w: Word, cap: int = ORDER_CAP) -> int:
        x = self.evaluate(w)
        e = x
        k = 1
        while not self.is_identity(e):
            k += 1
            if k > cap:
                raise OrderCapError(f"Element order exceeds the cap {cap}")
            e = self.apply_word(e, w)
        return k


def family_presentation(case: CaseData, m: int, u: Presentation) -> Presentation:
    """U's relators plus x_i^m: the full presentation of G_m."""
    return u.with_relators([x ** m for x in case.basis(u)])


def build_pair_group(case: CaseData, m: int, cm: CoordinateMap, ap: Optional[ActionPair] = None) -> PairGroup:
    if m < 1:
        raise ValueError(f"Modulus must be at least 1, got {m}")
    return PairGroup(case, m, twist_data_for(case, cm, ap))


def apply_generator(g: PairGroup, e: PairElement, letter: int) -> PairElement:
    return g.apply_letter(e, letter)


def evaluate_word_pair(g: PairGroup, w: Word) -> PairElement:
    return g.evaluate(w)


def element_order_pair(g: PairGroup, w: Word, cap: int = ORDER_CAP) -> int:
    return g.element_order(w, cap)


@dataclass
class CrossValidation:
    case_id: int
    m: int
    status: str  # "agree", "disagree" or "skipped"
    pair_order: int
    direct_index: Optional[int] = None
    orders: Dict[str, Tuple[int, int]] = field(default_factory=dict)
    message: str = ""
    # the permutation image of the direct enumeration, when it closed
    image: Optional[Any] = field(default=None, repr=False)

    @property
    def agrees(self) -> bool:
        return self.status == "agree"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "pair_order": self.pair_order,
            "direct_index": self.direct_index,
            "orders": {k: list(v) for k, v in self.orders.items()},
            "message": self.message,
        }


def comparison_words(u: Presentation) -> Dict[str, Word]:
    return {
        "a": u.parse("a"),
        "b": u.parse("b"),
        "ab": u.parse("a*b"),
        "witness": u.parse(WITNESS_BASE),
        "witness image": u.parse(WITNESS_IMAGE),
    }


def cross_validate(g: PairGroup, budget: int = CROSS_VALIDATE_BUDGET, cfg: Optional[EnumConfig] = None) -> CrossValidation:
    """
    Enumerate U over <x_i^m> directly and compare the index and a handful of element orders with
    the pair representation.
    """
    expected = g.order()
    if expected > budget:
        message = f"order {expected} is over the direct-enumeration budget {budget}"
        logger.warning(f"Skipping cross-validation of case {g.case.case_id}, m={g.m}: {message}")
        return CrossValidation(g.case.case_id, g.m, "skipped", expected, message=message)
    u = g.data.presentation
    subgroup = [x ** g.m for x in g.case.basis(u)]
    table = enumerate_cosets(u, subgroup, cfg)
    if not table.complete:
        message = f"direct enumeration did not close within {table.defined} cosets"
        logger.warning(message)
        return CrossValidation(g.case.case_id, g.m, "skipped", expected, message=message)
    image = image_of_table(standardize(table))
    result = CrossValidation(g.case.case_id, g.m, "agree", expected, direct_index=table.index, image=image)
    if table.index != expected:
        result.status = "disagree"
        result.message = f"direct index {table.index} != pair order {expected}"
    for name, w in comparison_words(u).items():
        direct = image.evaluate(w).order()
        paired = g.element_order(w)
        result.orders[name] = (direct, paired)
        if direct != paired and result.status == "agree":
            result.status = "disagree"
            result.message = f"order of {name}: direct {direct}, pair {paired}"
    if DEBUG:
        logger.debug(f"Cross-validation case {g.case.case_id}, m={g.m}: {result.status}")
    return result
