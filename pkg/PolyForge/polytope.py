"""
polytope.py

Decide whether a finite group with distinguished generators a, b is the rotation group of a
chiral or a regular 3-polytope, and compute the Euler characteristic and genus of its map.

The group may be anything that offers identity(), apply_word(element, word), is_identity(element)
and order(), with hashable elements: PermGroup and PairGroup both qualify.

Regularity is decided by homomorphism extension: the mirror twist a -> a^-1, b -> a^2 b extends to
an automorphism iff every relator of a full presentation of the group maps to the identity.
"""

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .config import logger, DEBUG, ORDER_CAP
from .fpcore import Presentation, Word, substitute
from .utils import InputError, ResourceLimitError

SCHEMA = "polyforge.atlas/1"

CHIRAL = "chiral"
REGULAR = "regular"
NOT_POLYTOPAL = "not-polytopal"

# a -> a^-1, b -> a^2 b on the first two generators
MIRROR = {0: Word((-1,)), 1: Word((1, 1, 2))}


class EulerCharacteristicError(InputError):
    pass


@dataclass
class ChiralWitness:
    relator: str
    root: str
    exponent: int
    substituted_root: str
    relator_order: int
    root_order: int

    def to_dict(self) -> dict:
        return {
            "relator": self.relator,
            "root": self.root,
            "exponent": self.exponent,
            "substituted_root": self.substituted_root,
            "substituted_relator_order": self.relator_order,
            "substituted_root_order": self.root_order,
        }


@dataclass
class PolytopeReport:
    order: int
    k1: int
    k2: int
    product_order: int
    intersection: int
    verdict: str
    witness: Optional[ChiralWitness] = None
    chi: Optional[int] = None
    genus: Optional[int] = None
    solvability: Optional[Dict[str, Any]] = None

    @property
    def type(self) -> List[int]:
        return [self.k1, self.k2]


def _element_order(group, w: Word, cap: int = ORDER_CAP) -> int:
    x = group.apply_word(group.identity(), w)
    e = x
    k = 1
    while not group.is_identity(e):
        k += 1
        if k > cap:
            raise ResourceLimitError(f"Element order exceeds the cap {cap}")
        e = group.apply_word(e, w)
    return k


def _powers(group, w: Word, order: int) -> List[Any]:
    out = []
    e = group.identity()
    for _ in range(order):
        out.append(e)
        e = group.apply_word(e, w)
    return out


def mirror_relators(p: Presentation) -> List[Word]:
    """Every relator of p under a -> a^-1, b -> a^2 b."""
    if p.rank < 2:
        raise InputError("The mirror twist needs at least two generators")
    images = dict(MIRROR)
    for i in range(2, p.rank):
        images[i] = Word.generator(i)
    return [substitute(r, images) for r in p.relators]


def certify(group, presentation: Optional[Presentation], cap: int = ORDER_CAP) -> PolytopeReport:
    """
    Orders of a, b and ab, the intersection |<a> ∩ <b>|, and the verdict. The presentation must
    be a full presentation of `group` on a, b: the regular verdict is only sound then.
    """
    if presentation is None:
        raise InputError("certify needs a full presentation of the group")
    if presentation.rank != 2:
        raise InputError(f"Expected a presentation on two generators, got {presentation.rank}")
    for r in presentation.relators:
        if not group.is_identity(group.apply_word(group.identity(), r)):
            raise InputError(f"Relator {presentation.format(r)} does not hold in the group")

    a, b = Word.generator(0), Word.generator(1)
    k1 = _element_order(group, a, cap)
    k2 = _element_order(group, b, cap)
    k12 = _element_order(group, a * b, cap)
    a_powers = set(_powers(group, a, k1))
    intersection = sum(1 for e in _powers(group, b, k2) if e in a_powers)
    order = group.order()

    report = PolytopeReport(order, k1, k2, k12, intersection, NOT_POLYTOPAL)
    if k12 != 2 or intersection != 1:
        if DEBUG:
            logger.debug(f"Not polytopal: order(ab)={k12}, intersection={intersection}")
        return report

    report.verdict = REGULAR
    for r, image in zip(presentation.relators, mirror_relators(presentation)):
        if group.is_identity(group.apply_word(group.identity(), image)):
            continue
        root, exponent = r.root()
        root_image = substitute(root, MIRROR)
        report.verdict = CHIRAL
        report.witness = ChiralWitness(
            relator=presentation.format(r),
            root=presentation.format(root),
            exponent=exponent,
            substituted_root=presentation.format(root_image),
            relator_order=_element_order(group, image, cap),
            root_order=_element_order(group, root_image, cap),
        )
        break
    report.chi, report.genus = euler_genus(order, k1, k2)
    if DEBUG:
        logger.debug(f"Polytope report: order {order}, type {{{k1},{k2}}}, {report.verdict}")
    return report


def euler_genus(order: int, k1: int, k2: int) -> Tuple[int, int]:
    """χ = order·(1/k1 + 1/k2 - 1/2) over the rationals, g = (2 - χ)/2."""
    if k1 < 1 or k2 < 1 or order % k1 or order % k2:
        raise EulerCharacteristicError(f"{k1} and {k2} must divide the group order {order}")
    chi = order * (Fraction(1, k1) + Fraction(1, k2) - Fraction(1, 2))
    if chi.denominator != 1 or chi.numerator % 2:
        raise EulerCharacteristicError(f"Euler characteristic {chi} is not an even integer")
    chi = int(chi)
    return chi, (2 - chi) // 2


def atlas_record(report: PolytopeReport, case: Optional[int], m: Optional[int]) -> Dict[str, Any]:
    record = {
        "schema": SCHEMA,
        "case": case,
        "m": m,
        "order": report.order,
        "type": report.type,
        "product_order": report.product_order,
        "intersection": report.intersection,
        "verdict": report.verdict,
        "chi": report.chi,
        "genus": report.genus,
        "witness": report.witness.to_dict() if report.witness else None,
    }
    if report.solvability is not None:
        record["solvability"] = report.solvability
    return record


CSV_FIELDS = ("case", "m", "order", "type", "verdict", "chi", "genus", "intersection", "witness_order")


def grid_csv(records: Sequence[Dict[str, Any]]) -> str:
    """One row per (case, m) record."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        witness = r.get("witness") or {}
        writer.writerow([
            r.get("case"), r.get("m"), r.get("order"),
            "{%d,%d}" % tuple(r["type"]),
            r.get("verdict"), r.get("chi"), r.get("genus"), r.get("intersection"),
            witness.get("substituted_root_order", ""),
        ])
    return out.getvalue()
