"""
intlinalg.py

Exact integer matrices: Smith normal form and the 4x4 conjugation-action matrices of a group on
a free abelian subgroup of rank 4. Entries are Python integers throughout; sympy does the
determinants and inverses.
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import sympy

from .config import logger, DEBUG
from .fpcore import Presentation, Word
from .utils import PolyForgeError

if TYPE_CHECKING:
    from .subgrouppres import CoordinateMap


class SingularMatrixError(PolyForgeError):
    """An action matrix with no integral inverse. Only happens if the data is corrupt."""


class IntMatrix:
    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[int]]):
        self.rows: Tuple[Tuple[int, ...], ...] = tuple(tuple(int(x) for x in r) for r in rows)
        if self.rows and any(len(r) != len(self.rows[0]) for r in self.rows):
            raise ValueError("IntMatrix rows must all have the same length")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls([[0] * ncols for _ in range(nrows)])

    @classmethod
    def from_sympy(cls, m: sympy.Matrix) -> "IntMatrix":
        return cls(m.tolist())

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def __getitem__(self, index):
        i, j = index
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]})"

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        cols = list(zip(*other.rows))
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])

    def to_sympy(self) -> sympy.Matrix:
        return sympy.Matrix(self.rows)

    def to_list(self) -> List[List[int]]:
        return [list(r) for r in self.rows]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self.rows)))

    def det(self) -> int:
        return int(self.to_sympy().det())

    def inverse(self) -> "IntMatrix":
        """Integral inverse; raises unless det = ±1."""
        d = self.det()
        if d not in (1, -1):
            raise SingularMatrixError(f"Matrix has determinant {d}, no integral inverse")
        return IntMatrix.from_sympy(self.to_sympy().inv())

    def power(self, k: int) -> "IntMatrix":
        if k < 0:
            return self.inverse().power(-k)
        result = IntMatrix.identity(self.shape[0])
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def row_times(self, v: Sequence[int]) -> Tuple[int, ...]:
        """The row vector v·M."""
        return tuple(sum(v[i] * self.rows[i][j] for i in range(len(v))) for j in range(self.shape[1]))


@dataclass
class SmithForm:
    """D = P·M·Q with P, Q unimodular (present only when transforms were requested)."""
    divisors: List[int]
    diagonal: IntMatrix
    P: Optional[IntMatrix] = None
    Q: Optional[IntMatrix] = None


def _min_pivot(a: List[List[int]], t: int) -> Optional[Tuple[int, int]]:
    best = None
    for i in range(t, len(a)):
        for j in range(t, len(a[i])):
            x = a[i][j]
            if x and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                best = (i, j)
    return best


def smith_normal_form(m: IntMatrix, transforms: bool = False) -> SmithForm:
    """
    Elementary row and column reduction with the pivot of least absolute value.

    Returns min(rows, cols) divisors d_1 | d_2 | ..., zeros last. With transforms=True the
    unimodular factors P and Q with D = P·M·Q are tracked as well.
    """
    nrows, ncols = m.shape
    a = m.to_list()
    p = IntMatrix.identity(nrows).to_list() if transforms else None
    q = IntMatrix.identity(ncols).to_list() if transforms else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if p is not None:
            p[i], p[j] = p[j], p[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        if q is not None:
            for r in q:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):
        # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        if p is not None:
            p[dst] = [x + k * y for x, y in zip(p[dst], p[src])]

    def add_col(dst, src, k):
        for r in a:
            r[dst] += k * r[src]
        if q is not None:
            for r in q:
                r[dst] += k * r[src]

    t = 0
    while t < min(nrows, ncols):
        pivot = _min_pivot(a, t)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            d = a[t][t]
            clean = True
            for i in range(t + 1, nrows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // d))
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, ncols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // d))
                    if a[t][j]:
                        clean = False
            if not clean:
                # a smaller remainder sits in row t or column t; move it to the pivot
                best = (t, t)
                for i in range(t + 1, nrows):
                    if a[i][t] and abs(a[i][t]) < abs(a[best[0]][best[1]]):
                        best = (i, t)
                for j in range(t + 1, ncols):
                    if a[t][j] and abs(a[t][j]) < abs(a[best[0]][best[1]]):
                        best = (t, j)
                swap_rows(t, best[0])
                swap_cols(t, best[1])
                continue
            # divisibility: the pivot must divide the rest of the submatrix
            bad_row = next(
                (i for i in range(t + 1, nrows) for j in range(t + 1, ncols) if a[i][j] % d),
                None,
            )
            if bad_row is None:
                break
            add_row(t, bad_row, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if p is not None:
                p[t] = [-x for x in p[t]]
        t += 1

    divisors = [a[i][i] for i in range(min(nrows, ncols))]
    return SmithForm(
        divisors=divisors,
        diagonal=IntMatrix(a),
        P=IntMatrix(p) if p is not None else None,
        Q=IntMatrix(q) if q is not None else None,
    )


def abelian_invariants(relation_matrix: IntMatrix, rank: int) -> List[int]:
    """
    Invariants of Z^rank / rowspace(relation_matrix), GAP style: divisors other than 1, with 0
    for each free factor.
    """
    if relation_matrix.shape[0] == 0:
        return [0] * rank
    divisors = smith_normal_form(relation_matrix).divisors
    divisors = divisors + [0] * (rank - len(divisors))
    return sorted((d for d in divisors if d != 1), key=lambda d: (d == 0, d))


@dataclass
class ActionPair:
    """One matrix per generator; row i of A_g holds the coordinates of basis_i^g."""
    names: List[str]
    matrices: List[IntMatrix]

    def __getitem__(self, name: str) -> IntMatrix:
        return self.matrices[self.names.index(name)]

    def word_matrix(self, w: Word) -> IntMatrix:
        """Left-to-right product; inverse letters use the inverse matrix."""
        n = self.matrices[0].shape[0]
        result = IntMatrix.identity(n)
        inverses: Dict[int, IntMatrix] = {}
        for x in w.letters:
            if x > 0:
                result = result @ self.matrices[x - 1]
            else:
                if x not in inverses:
                    inverses[x] = self.matrices[-x - 1].inverse()
                result = result @ inverses[x]
        return result

    def determinants(self) -> Dict[str, int]:
        return {name: m.det() for name, m in zip(self.names, self.matrices)}

    def to_dict(self) -> dict:
        return {name: m.to_list() for name, m in zip(self.names, self.matrices)}


def action_matrices(cm: "CoordinateMap") -> ActionPair:
    """A_g[i] = coordinates(basis_i^g) for every generator g of the ambient presentation."""
    names = cm.presentation.alphabet.names
    matrices = []
    for gi in range(cm.presentation.rank):
        g = Word.generator(gi)
        matrices.append(IntMatrix([cm.coordinates(x.conjugate(g)) for x in cm.basis]))
    if DEBUG:
        logger.debug(f"Action matrices: {[m.to_list() for m in matrices]}")
    return ActionPair(list(names), matrices)


def verify_action_relations(ap: ActionPair, p: Presentation) -> bool:
    """True iff every relator of p maps to the identity matrix."""
    n = ap.matrices[0].shape[0] if ap.matrices else 0
    identity = IntMatrix.identity(n)
    for r in p.relators:
        try:
            image = ap.word_matrix(r)
        except SingularMatrixError:
            logger.error(f"Singular action matrix while checking relator {p.format(r)}")
            raise
        if image != identity:
            if DEBUG:
                logger.debug(f"Relator {p.format(r)} acts as {image.to_list()}")
            return False
    return True
