import random

import pytest

from PolyForge.cosetenum import enumerate_cosets
from PolyForge.fpcore import Presentation, Word, free_reduce, substitute
from PolyForge.permrep import image_of_table
from PolyForge.polytope import (
    CHIRAL, CSV_FIELDS, MIRROR, NOT_POLYTOPAL, REGULAR, SCHEMA, EulerCharacteristicError,
    atlas_record, certify, euler_genus, grid_csv, mirror_relators,
)
from PolyForge.presets import cube_rotations, cyclic, get_case
from PolyForge.quotient import build_pair_group
from PolyForge.utils import InputError

# a*b^3*a^2*b^4 under a -> a^-1, b -> a^2*b
MIRRORED_BASE = "a^-1*(a^2*b)^3*a^-2*(a^2*b)^4"


def regular_image(p):
    return image_of_table(enumerate_cosets(p, []))


def test_cube_is_regular():
    p = cube_rotations()
    report = certify(regular_image(p), p)
    assert report.verdict == REGULAR
    assert report.type == [4, 3]
    assert report.product_order == 2
    assert report.intersection == 1
    assert report.order == 24
    assert (report.chi, report.genus) == (2, 0)
    assert report.witness is None


def test_symmetric3_as_dihedral_is_not_polytopal():
    p = Presentation.from_strings(("a", "b"), ("a^2", "b^2", "(a*b)^3"))
    report = certify(regular_image(p), p)
    assert report.verdict == NOT_POLYTOPAL
    assert report.product_order == 3
    assert report.chi is None and report.genus is None


def test_cyclic_generators_are_not_polytopal():
    # a = b^2 in Z/4 makes <a> ∩ <b> nontrivial
    p = Presentation.from_strings(("a", "b"), ("b^4", "a*b^-2", "(a,b)"))
    report = certify(regular_image(p), p)
    assert report.intersection > 1
    assert report.verdict == NOT_POLYTOPAL


@pytest.mark.parametrize("order, k1, k2, chi, genus", [
    (1024, 4, 8, -128, 65),
    (2048, 4, 8, -256, 129),
    (16384, 4, 8, -2048, 1025),
    (24, 4, 3, 2, 0),
    (8, 4, 4, 0, 1),
])
def test_euler_genus(order, k1, k2, chi, genus):
    assert euler_genus(order, k1, k2) == (chi, genus)


@pytest.mark.parametrize("order, k1, k2", [(10, 4, 3), (12, 4, 3), (24, 0, 3)])
def test_euler_genus_errors(order, k1, k2):
    with pytest.raises(EulerCharacteristicError):
        euler_genus(order, k1, k2)


def test_mirror_relators(u):
    images = mirror_relators(u)
    assert len(images) == len(u.relators)
    assert images[0] == u.parse("a^-4")
    assert images[2] == u.parse("(a*b)^2")
    assert images[-1] == u.parse(f"({MIRRORED_BASE})^2")
    with pytest.raises(InputError):
        mirror_relators(cyclic(3))


def test_certify_input_errors():
    p = cube_rotations()
    g = regular_image(p)
    with pytest.raises(InputError):
        certify(g, None)
    with pytest.raises(InputError):
        certify(g, cyclic(4))
    with pytest.raises(InputError):
        certify(g, Presentation.from_strings(("s", "t"), ("s^2",)))


def test_atlas_record_and_csv():
    p = cube_rotations()
    report = certify(regular_image(p), p)
    record = atlas_record(report, None, None)
    assert record["schema"] == SCHEMA
    assert record["verdict"] == REGULAR
    assert record["type"] == [4, 3]
    assert record["witness"] is None
    assert "solvability" not in record
    text = grid_csv([dict(record, case=0, m=1)])
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_FIELDS)
    assert lines[1] == "0,1,24,\"{4,3}\",regular,2,0,1,"


def test_case_one_at_modulus_one_is_regular(case1_coordinates, u):
    g = build_pair_group(get_case(1), 1, case1_coordinates)
    report = certify(g, g.presentation)
    assert report.verdict == REGULAR
    assert report.witness is None
    assert report.order == 1024
    assert report.type == [4, 8]
    assert report.intersection == 1
    assert (report.chi, report.genus) == (-128, 65)
    # the mirrored extra relator collapses here
    assert g.element_order(u.parse(MIRRORED_BASE)) == 2
    record = atlas_record(report, 1, 1)
    assert record["verdict"] == REGULAR
    assert record["witness"] is None


def test_case_one_at_modulus_two_is_chiral(case1_coordinates):
    g = build_pair_group(get_case(1), 2, case1_coordinates)
    report = certify(g, g.presentation)
    assert report.verdict == CHIRAL
    assert report.order == 16384
    assert (report.chi, report.genus) == (-2048, 1025)
    assert report.witness is not None
    assert report.witness.root_order > 1
    record = atlas_record(report, 1, 2)
    assert record["witness"]["substituted_root_order"] == report.witness.root_order


def test_mirror_is_an_involution(u):
    rng = random.Random(7)
    for _ in range(50):
        w = free_reduce([rng.choice((1, -1, 2, -2)) for _ in range(rng.randint(0, 20))])
        assert substitute(substitute(w, MIRROR), MIRROR) == w
    for r in u.relators:
        assert substitute(substitute(r, MIRROR), MIRROR) == free_reduce(r)
    assert substitute(Word((2,)), MIRROR) == u.parse("a^2*b")


@pytest.mark.parametrize("n, case_id, m", [
    (10, 1, 1), (11, 2, 1), (12, 3, 1), (13, 4, 1), (14, 1, 2), (15, 2, 2), (16, 3, 2),
])
def test_genus_over_the_family_grid(n, case_id, m):
    order = get_case(case_id).order(m)
    assert order == 2 ** n
    assert euler_genus(order, 4, 8) == (-2 ** (n - 3), 2 ** (n - 4) + 1)


@pytest.mark.slow
@pytest.mark.parametrize("case_id", [1, 2, 3, 4])
def test_family_grid(case_coordinates, case_id):
    case = get_case(case_id)
    cm = case_coordinates(case_id)
    for m in range(1, 7):
        g = build_pair_group(case, m, cm)
        report = certify(g, g.presentation)
        assert report.order == case.order(m), m
        assert report.type == [4, 8]
        assert report.product_order == 2
        assert report.intersection == 1
        # only the smallest quotient of the first family admits the mirror twist
        assert report.verdict == (REGULAR if (case_id, m) == (1, 1) else CHIRAL), m
        assert (report.chi, report.genus) == euler_genus(case.order(m), 4, 8)
