import pytest

from PolyForge.fpcore import Word
from PolyForge.presets import WITNESS_IMAGE, get_case
from PolyForge.quotient import (
    OrderCapError, PairElement, PairGroup, build_pair_group, comparison_words, cross_validate,
    element_order_pair, evaluate_word_pair, family_presentation, twist_data_for,
)


@pytest.fixture(scope="module")
def case1_pair(case1_coordinates):
    return build_pair_group(get_case(1), 1, case1_coordinates)


def test_pair_group_orders(case1_coordinates):
    case = get_case(1)
    for m in (1, 2, 3):
        g = build_pair_group(case, m, case1_coordinates)
        assert g.order() == 1024 * m ** 4 == case.order(m)


def test_twist_data_is_validated_on_every_fiber(case1_coordinates):
    data = twist_data_for(get_case(1), case1_coordinates)
    assert data.index == 1024
    assert data.validated_fibers == 1024
    assert data.generator_offsets["a"] == tuple(int(x) for x in data.tau[0][0])
    # cached per case
    assert twist_data_for(get_case(1), case1_coordinates) is data


def test_generator_orders(case1_coordinates, u):
    for m in (1, 2):
        g = build_pair_group(get_case(1), m, case1_coordinates)
        assert g.element_order(u.parse("a")) == 4
        assert g.element_order(u.parse("b")) == 8
        assert element_order_pair(g, u.parse("a*b")) == 2


def test_witness_image_order(case1_pair, u):
    assert case1_pair.element_order(u.parse(WITNESS_IMAGE)) == 8


def test_relators_and_basis(case1_coordinates, u):
    case = get_case(1)
    g = build_pair_group(case, 3, case1_coordinates)
    for r in u.relators:
        assert g.is_identity(evaluate_word_pair(g, r))
    x = case.basis(u)
    assert evaluate_word_pair(g, x[0]) == PairElement(0, (1, 0, 0, 0))
    assert evaluate_word_pair(g, x[2] ** 3) == g.identity()
    assert g.element_order(x[1]) == 3
    assert len(g.presentation.relators) == len(u.relators) + 4


def test_family_presentation(u):
    case = get_case(2)
    p = family_presentation(case, 5, u)
    assert p.relators[: len(u.relators)] == u.relators
    assert p.relators[-1] == case.basis(u)[-1] ** 5


def test_order_cap(case1_pair, u):
    with pytest.raises(OrderCapError):
        case1_pair.element_order(u.parse("b"), cap=4)


def test_identity_word(case1_pair):
    assert case1_pair.element_order(Word.identity()) == 1


def test_invalid_modulus(case1_coordinates):
    with pytest.raises(ValueError):
        build_pair_group(get_case(1), 0, case1_coordinates)
    with pytest.raises(ValueError):
        PairGroup(get_case(1), -1, twist_data_for(get_case(1), case1_coordinates))


def test_comparison_words(u):
    words = comparison_words(u)
    assert set(words) == {"a", "b", "ab", "witness", "witness image"}
    assert words["ab"] == u.parse("a*b")


def test_cross_validation_at_modulus_one(case1_pair):
    check = cross_validate(case1_pair)
    assert check.agrees
    assert check.direct_index == 1024
    assert check.orders["b"] == (8, 8)
    assert check.orders["witness image"] == (8, 8)
    assert check.image is not None
    assert check.to_dict()["status"] == "agree"


def test_cross_validation_over_budget(case1_pair):
    check = cross_validate(case1_pair, budget=10)
    assert check.status == "skipped"
    assert not check.agrees
    assert check.direct_index is None
    assert "budget" in check.message


@pytest.mark.slow
def test_cross_validation_at_modulus_two(case1_coordinates):
    g = build_pair_group(get_case(1), 2, case1_coordinates)
    check = cross_validate(g)
    assert check.agrees
    assert check.direct_index == 16384


@pytest.mark.slow
def test_case_four_witness_image_order(case_coordinates, u):
    g = build_pair_group(get_case(4), 1, case_coordinates(4))
    assert g.order() == 8192
    assert g.element_order(u.parse(WITNESS_IMAGE)) == 8
