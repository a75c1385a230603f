import random

import pytest

from PolyForge.fpcore import Presentation
from PolyForge.intlinalg import (
    ActionPair, IntMatrix, SingularMatrixError, abelian_invariants, action_matrices,
    smith_normal_form, verify_action_relations,
)
from PolyForge.presets import get_case, group_u

CASE1_A = IntMatrix([[0, 1, 0, -1], [-1, 0, -1, 0], [0, 0, 0, 1], [-1, -1, 0, 0]])
CASE1_B = IntMatrix([[1, 0, 0, 1], [-1, 0, 0, 0], [-1, 1, -1, -1], [0, 0, 1, 0]])


def random_unimodular(rng, n, steps=12):
    rows = IntMatrix.identity(n).to_list()
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            rows[i] = [-x for x in rows[i]]
            continue
        k = rng.randint(-2, 2)
        rows[i] = [x + k * y for x, y in zip(rows[i], rows[j])]
    return IntMatrix(rows)


@pytest.mark.parametrize("rows, divisors", [
    ([[2, 0], [0, 3]], [1, 6]),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 1, 1]),
    ([[0] * 4 for _ in range(6)], [0, 0, 0, 0]),
    ([[4]], [4]),
    ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], [2, 6, 12]),
])
def test_smith_normal_form_oracles(rows, divisors):
    assert smith_normal_form(IntMatrix(rows)).divisors == divisors


def test_smith_transforms():
    m = IntMatrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    snf = smith_normal_form(m, transforms=True)
    assert snf.P @ m @ snf.Q == snf.diagonal
    assert abs(snf.P.det()) == 1
    assert abs(snf.Q.det()) == 1


def test_smith_form_is_invariant_under_unimodular_change():
    rng = random.Random(3)
    for _ in range(200):
        nrows, ncols = rng.randint(1, 4), rng.randint(1, 4)
        m = IntMatrix([[rng.randint(-5, 5) for _ in range(ncols)] for _ in range(nrows)])
        snf = smith_normal_form(m, transforms=True)
        d = snf.divisors
        assert snf.P @ m @ snf.Q == snf.diagonal
        assert all(x >= 0 for x in d)
        for x, y in zip(d, d[1:]):
            assert (x == 0 and y == 0) or (x != 0 and y % x == 0)
        other = random_unimodular(rng, nrows) @ m @ random_unimodular(rng, ncols)
        assert smith_normal_form(other).divisors == d


def test_abelian_invariants():
    assert abelian_invariants(IntMatrix([[4]]), 1) == [4]
    assert abelian_invariants(IntMatrix([[2, 0], [0, 3]]), 2) == [6]
    assert abelian_invariants(IntMatrix([[2, 0]]), 2) == [2, 0]
    assert abelian_invariants(IntMatrix([]), 3) == [0, 0, 0]
    assert abelian_invariants(IntMatrix([[1, 1], [1, -1]]), 2) == [2]


def test_matrix_basics():
    assert CASE1_A.det() == -1
    assert CASE1_B.det() == 1
    assert CASE1_A @ CASE1_A.inverse() == IntMatrix.identity(4)
    assert CASE1_A.power(-1) == CASE1_A.inverse()
    assert CASE1_A.power(0) == IntMatrix.identity(4)
    assert CASE1_A.row_times([1, 0, 0, 0]) == (0, 1, 0, -1)
    assert IntMatrix([[1, 2], [3, 4]]).transpose() == IntMatrix([[1, 3], [2, 4]])
    with pytest.raises(ValueError):
        IntMatrix([[1, 2], [3]])


def test_singular_inverse():
    with pytest.raises(SingularMatrixError):
        IntMatrix([[2, 0], [0, 1]]).inverse()


def test_case_one_matrices_satisfy_the_relations(u):
    ap = ActionPair(["a", "b"], [CASE1_A, CASE1_B])
    assert CASE1_A.power(4) == IntMatrix.identity(4)
    assert CASE1_B.power(8) == IntMatrix.identity(4)
    assert (CASE1_A @ CASE1_B).power(2) == IntMatrix.identity(4)
    assert verify_action_relations(ap, u)
    assert ap.word_matrix(u.parse("a*b")) == CASE1_A @ CASE1_B
    assert ap.word_matrix(u.parse("a^-1*b")) == CASE1_A.inverse() @ CASE1_B
    assert ap.determinants() == {"a": -1, "b": 1}


def test_mutated_matrix_breaks_the_relations(u):
    rows = CASE1_A.to_list()
    rows[0][1] = -rows[0][1]
    mutated = ActionPair(["a", "b"], [IntMatrix(rows), CASE1_B])
    assert mutated["a"].power(4) != IntMatrix.identity(4)
    assert not verify_action_relations(mutated, u)


def test_relations_of_a_small_group():
    p = Presentation.from_strings(("a",), ("a^2",))
    ap = ActionPair(["a"], [IntMatrix([[0, 1], [1, 0]])])
    assert verify_action_relations(ap, p)
    assert not verify_action_relations(ActionPair(["a"], [IntMatrix([[0, -1], [1, 0]])]), p)


def test_case_one_action_matrices(case1_coordinates):
    ap = action_matrices(case1_coordinates)
    assert ap["a"] == CASE1_A
    assert ap["b"] == CASE1_B
    for (i, g), expected in get_case(1).expected_table().items():
        assert ap[g].rows[i] == expected
    assert verify_action_relations(ap, group_u())
