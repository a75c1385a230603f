"""
presets.py

Built-in presentations: the group U of type {4,8} and the four kernels N^1..N^4 with their
bases and expected conjugation tables, plus a few small oracle groups used by tests and the CLI.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

from .fpcore import Alphabet, Presentation, Word, parse_word
from .utils import InputError

U_GENERATORS = ("a", "b")
U_RELATORS = (
    "a^4",
    "b^8",
    "(a*b)^2",
    "(a^2,b^2)^2",
    "(a*b^3*a^2*b^4)^2",
)

# The mirror twist (a, b) -> (a^-1, a^2 b)
MIRROR_IMAGES = ("a^-1", "a^2*b")

# The base of the last relator, and the reference word whose order witnesses chirality.
# WITNESS_IMAGE is a^-1 times the literal mirror image of WITNESS_BASE.
WITNESS_BASE = "a*b^3*a^2*b^4"
WITNESS_IMAGE = "a^-2*(a^2*b)^3*a^-2*(a^2*b)^4"


def group_u() -> Presentation:
    return Presentation.from_strings(U_GENERATORS, U_RELATORS)


@dataclass(frozen=True)
class CaseData:
    """One of the four families: basis words of N^k and the conjugation table they satisfy."""
    case_id: int
    family: str
    basis_text: Tuple[str, str, str, str]
    expected_index: int
    # basis_i^a for i = 1..4, then basis_i^b, as words in the basis names
    table_text: Tuple[str, str, str, str, str, str, str, str]

    @property
    def basis_names(self) -> List[str]:
        return [f"{self.family}{i}" for i in range(1, 5)]

    def basis(self, presentation: Presentation = None) -> List[Word]:
        presentation = presentation or group_u()
        return [presentation.parse(t) for t in self.basis_text]

    def expected_table(self) -> Dict[Tuple[int, str], Tuple[int, int, int, int]]:
        """{(i, g): exponent vector of basis_i^g in the basis}, i 0-based, g in {"a", "b"}."""
        alphabet = Alphabet(self.basis_names)
        table = {}
        for k, text in enumerate(self.table_text):
            g = "a" if k < 4 else "b"
            table[(k % 4, g)] = tuple(parse_word(text, alphabet).exponent_sums(4))
        return table

    def order(self, m: int = 1) -> int:
        return self.expected_index * m ** 4


CASES: Dict[int, CaseData] = {
    1: CaseData(
        case_id=1,
        family="x",
        basis_text=(
            "(b^-2*a)^4",
            "(b^4)^(a*b^-1) * (b^4)^(a^-1)",
            "(b^2*a^2)^4",
            "((b^2*a^2)^4)^a",
        ),
        expected_index=1024,
        table_text=(
            "x2*x4^-1", "x1^-1*x3^-1", "x4", "x1^-1*x2^-1",
            "x1*x4", "x1^-1", "x1^-1*x2*x3^-1*x4^-1", "x3",
        ),
    ),
    2: CaseData(
        case_id=2,
        family="y",
        basis_text=(
            "b^2*a^2*b*a^-1*b^4*a^-1*b^2*a^-1*b*a^-1",
            "(b^-1*a)^8",
            "b^3*a^2*b^2*a*b^-1*a*b^-1*a*b^-3*a^-1",
            "(a*b^-3)^4",
        ),
        expected_index=2048,
        table_text=(
            "y3", "y1*y3^-1*y4^-1", "y3*y4", "y2*y4^-1",
            "y2^-1*y3^-1", "y1^-1*y3^-1*y4^-1", "y1", "y1^-1*y3^-1",
        ),
    ),
    3: CaseData(
        case_id=3,
        family="z",
        basis_text=(
            "(b^-1*a)^8",
            "(b^-3*a)^4",
            "(a*b^-1)^8",
            "(a*b^2*a^-1*b*a^-1)^4",
        ),
        expected_index=4096,
        table_text=(
            "z3^-1", "z2^-1*z3^-1", "z1", "z1^-1*z4",
            "z2*z4^-1", "z1^-1*z2", "z1", "z3^-1*z4^-1",
        ),
    ),
    4: CaseData(
        case_id=4,
        family="w",
        basis_text=(
            "(a*b^-1)^8",
            "((b^-1*a)^8)^b",
            "((b^-2*a)^8)^b",
            "((a^2*b^2)^4)^(b^-1) * ((b^-2*a^2)^4)^a",
        ),
        expected_index=8192,
        table_text=(
            "w2*w3^-1*w4^-1", "w2*w3^-1", "w3^-1", "w1*w2",
            "w2*w3^-1*w4^-1", "w2^-1*w3", "w1^-1*w2^-1*w3", "w1*w2^-1",
        ),
    ),
}


def get_case(case_id: int) -> CaseData:
    if case_id not in CASES:
        raise InputError(f"Unknown case {case_id}; expected one of {sorted(CASES)}")
    return CASES[case_id]


# Small groups with known answers

def symmetric3() -> Presentation:
    """The symmetric group on 3 letters, order 6."""
    return Presentation.from_strings(("a", "b"), ("a^2", "b^3", "(a*b)^2"))


def cube_rotations() -> Presentation:
    """Rotation group of the cube, type {4,3}, the symmetric group on 4 letters."""
    return Presentation.from_strings(("s", "t"), ("s^4", "t^3", "(s*t)^2"))


def cyclic(n: int) -> Presentation:
    return Presentation.from_strings(("a",), (f"a^{n}",))


def free_group(rank: int) -> Presentation:
    names = ("a", "b", "c", "d", "e", "f")[:rank]
    return Presentation.from_strings(names, ())
