import pytest

from PolyForge.config import MAX_COSETS, coset_limit
from PolyForge.cosetenum import (
    UNDEFINED, DeadCosetError, EnumConfig, PartialTableError, certify_trivial_word,
    certify_trivial_words, enumerate_cosets, is_normal, search_conjugation_table, standardize, trace,
)
from PolyForge.fpcore import Presentation, Word
from PolyForge.presets import cube_rotations, cyclic, free_group, get_case, symmetric3
from PolyForge.utils import InputError

# (presentation, order) pairs with orders known by hand
SMALL_GROUPS = [
    (symmetric3(), 6),
    (cube_rotations(), 24),
    (cyclic(12), 12),
    (Presentation.from_strings(("a", "b"), ("a^4", "b^2", "(a*b)^2")), 8),
    (Presentation.from_strings(("a", "b"), ("a^4", "a^2*b^-2", "b^-1*a*b*a")), 8),
    (Presentation.from_strings(("a", "b"), ("a^2", "b^3", "(a*b)^3")), 12),
    (Presentation.from_strings(("a", "b"), ("a^2", "b^3", "(a*b)^4")), 24),
    (Presentation.from_strings(("a", "b"), ("a^6", "b^2", "(a*b)^2")), 12),
]


@pytest.mark.parametrize("strategy", ["hlt", "felsch"])
def test_symmetric3_over_a_reflection(strategy):
    p = symmetric3()
    t = enumerate_cosets(p, [p.parse("a")], EnumConfig(strategy=strategy))
    assert t.complete
    assert t.index == 3
    assert not is_normal(t)


@pytest.mark.parametrize("strategy", ["hlt", "felsch"])
@pytest.mark.parametrize("p, order", SMALL_GROUPS)
def test_group_orders(p, order, strategy):
    t = enumerate_cosets(p, [], EnumConfig(strategy=strategy))
    assert t.index == order
    assert is_normal(t)


@pytest.mark.parametrize("p, order", SMALL_GROUPS)
def test_regular_table_is_a_group_table(p, order):
    """Every relator fixes every coset of the trivial subgroup, and the action is a permutation."""
    t = standardize(enumerate_cosets(p, []))
    for r in p.relators:
        for c in range(order):
            assert t.trace(c, r) == c
    for column in t.columns:
        assert sorted(column) == list(range(order))


def test_index_of_cyclic_subgroup():
    p = cube_rotations()
    assert enumerate_cosets(p, [p.parse("s")]).index == 6
    assert enumerate_cosets(p, [p.parse("t")]).index == 8
    assert enumerate_cosets(p, [p.parse("s*t")]).index == 12


def test_normal_subgroup_of_cyclic_group():
    p = cyclic(6)
    t = enumerate_cosets(p, [p.parse("a^2")])
    assert t.index == 2
    assert is_normal(t)


def test_strategies_agree_on_tables():
    p = cube_rotations()
    subgroup = [p.parse("s^2"), p.parse("t")]
    hlt = standardize(enumerate_cosets(p, subgroup, EnumConfig(strategy="hlt")))
    felsch = standardize(enumerate_cosets(p, subgroup, EnumConfig(strategy="felsch")))
    assert hlt.index == felsch.index == 2
    assert [list(c) for c in hlt.columns] == [list(c) for c in felsch.columns]


def test_free_group_subgroup_of_index_two():
    p = free_group(2)
    t = enumerate_cosets(p, [p.parse("a^2"), p.parse("a*b"), p.parse("a*b^-1")])
    assert t.index == 2


def test_limit_gives_partial_table():
    p = free_group(2)
    t = enumerate_cosets(p, [], EnumConfig(max_cosets=50))
    assert not t.complete
    assert t.status == "partial"
    assert t.defined == 50
    with pytest.raises(PartialTableError):
        t.index
    with pytest.raises(PartialTableError):
        standardize(t)
    with pytest.raises(PartialTableError):
        is_normal(t)


def test_standardize():
    p = cube_rotations()
    t = standardize(enumerate_cosets(p, [p.parse("s")], EnumConfig(strategy="hlt")))
    assert t.is_standard
    assert t.size == t.live_count == 6
    # breadth-first numbering: the first new coset is 0·s, 0·s^-1, 0·t, ... in that order
    firsts = []
    for c in range(t.live_count):
        for column in t.columns:
            d = column[c]
            if d not in firsts and d != 0:
                firsts.append(d)
    assert firsts == sorted(firsts)
    lines = t.to_text().splitlines()
    assert len(lines) == 6
    assert lines[0].startswith("1: ")
    assert t.to_dict()["columns"] == ["s", "s^-1", "t", "t^-1"]


def test_trace_and_dead_cosets():
    p = symmetric3()
    t = standardize(enumerate_cosets(p, [p.parse("a")]))
    assert trace(t, 0, p.parse("a")) == 0
    assert t.trace(0, p.parse("b^3")) == 0
    with pytest.raises(DeadCosetError):
        t.trace(99, p.parse("a"))


def test_partial_trace_stops_at_gaps():
    p = free_group(2)
    t = enumerate_cosets(p, [], EnumConfig(max_cosets=5))
    long_word = p.parse("a^10")
    assert t.trace(0, long_word) is None
    assert UNDEFINED in t.columns[0]


def test_enum_config_validation():
    with pytest.raises(InputError):
        EnumConfig(strategy="random")
    with pytest.raises(InputError):
        EnumConfig(max_cosets=0)
    assert EnumConfig(strategy="HLT").strategy == "hlt"


def test_subgroup_letters_checked():
    with pytest.raises(InputError):
        enumerate_cosets(cyclic(4), [Word((2,))])


def test_coset_limit_from_environment(monkeypatch):
    monkeypatch.setenv("POLYFORGE_LIMIT", "1234")
    assert coset_limit() == 1234
    monkeypatch.setenv("POLYFORGE_LIMIT", "lots")
    assert coset_limit() == MAX_COSETS
    monkeypatch.delenv("POLYFORGE_LIMIT")
    assert coset_limit() == MAX_COSETS


def test_certify_trivial_words_in_a_finite_group():
    p = symmetric3()
    certificates, table = certify_trivial_words(p, [p.parse("b*a*b*a"), p.parse("a")])
    assert certificates[0].proven
    assert not certificates[1].proven
    assert certificates[1].verdict == "unknown"
    assert table.complete


def test_certificate_is_never_a_false_positive():
    p = free_group(2)
    cert = certify_trivial_word(p, p.parse("(a,b)"), EnumConfig(max_cosets=100, strategy="hlt"))
    assert cert.verdict == "unknown"
    assert not cert.complete
    cert = certify_trivial_word(p, p.parse("a*b*b^-1*a^-1"), EnumConfig(max_cosets=100, strategy="hlt"))
    assert cert.proven


def test_certificate_from_partial_table_of_infinite_group():
    # <a, b | (a,b)> is Z^2; the limit is hit long before anything closes
    p = Presentation.from_strings(("a", "b"), ("(a,b)",))
    cfg = EnumConfig(max_cosets=200, strategy="hlt")
    cert = certify_trivial_word(p, p.parse("a*b*a^-1*b^-1"), cfg)
    assert cert.proven
    assert not cert.complete


def test_search_conjugation_table():
    p = Presentation.from_strings(("a", "b"), ("a^2", "b^2", "(a*b)^2"))
    t = enumerate_cosets(p, [])
    found = search_conjugation_table(t, [p.parse("a"), p.parse("b")], [0, 1])
    assert (1, 0) in found[(0, 0)]
    assert (0, 1) in found[(1, 0)]
    assert (0, 0) not in found[(0, 1)]


def test_case_one_index(case1_table):
    assert case1_table.index == get_case(1).expected_index
    assert is_normal(case1_table)


def test_case_two_index(u):
    t = enumerate_cosets(u, get_case(2).basis(u))
    assert t.index == 2048
    assert is_normal(t)


@pytest.mark.slow
@pytest.mark.parametrize("case_id", [3, 4])
def test_large_case_indices(u, case_id):
    case = get_case(case_id)
    t = enumerate_cosets(u, case.basis(u))
    assert t.index == case.expected_index
    assert is_normal(t)


def case_one_identities(u):
    x = get_case(1).basis(u)
    a, b = u.parse("a"), u.parse("b")
    return [
        x[0].conjugate(a) * x[3] * ~x[1],
        x[0].conjugate(b) * ~(x[0] * x[3]),
    ]


@pytest.mark.slow
def test_case_one_identities_from_a_partial_table(u):
    cfg = EnumConfig(max_cosets=110000, strategy="hlt")
    certificates, table = certify_trivial_words(u, case_one_identities(u), cfg)
    assert [c.verdict for c in certificates] == ["proven", "proven"]
    assert not table.complete
    assert all(not c.complete and c.defined <= 110000 for c in certificates)


@pytest.mark.slow
def test_nontrivial_words_stay_unknown_in_u(u):
    x = get_case(1).basis(u)
    # a has order 4, b has order 8, and x1^a has coordinates (0, 1, 0, -1)
    words = [u.parse("a^2"), u.parse("b^4"), x[0].conjugate(u.parse("a")) * ~x[1]]
    certificates, table = certify_trivial_words(u, words, EnumConfig(max_cosets=20000, strategy="hlt"))
    assert [c.verdict for c in certificates] == ["unknown"] * 3
    assert not table.complete


def column_letter(col):
    return (col // 2 + 1) * (-1 if col % 2 else 1)


def test_partial_table_entries_hold_in_the_group():
    p = cube_rotations()
    complete = enumerate_cosets(p, [])
    partial = enumerate_cosets(p, [], EnumConfig(max_cosets=15, strategy="hlt"))
    assert not partial.complete

    def live(d):
        while partial.parent[d] != d:
            d = partial.parent[d]
        return d

    # a representative word for every coset reachable through defined entries
    reps = {0: Word.identity()}
    queue = [0]
    while queue:
        c = queue.pop(0)
        for col, column in enumerate(partial.columns):
            d = column[c]
            if d != UNDEFINED and live(d) not in reps:
                reps[live(d)] = reps[c] * Word((column_letter(col),))
                queue.append(live(d))
    checked = 0
    for c, rep in reps.items():
        for col, column in enumerate(partial.columns):
            d = column[c]
            if d == UNDEFINED:
                continue
            letter = Word((column_letter(col),))
            assert complete.trace(0, rep * letter) == complete.trace(0, reps[live(d)])
            checked += 1
    assert checked >= len(reps) > 1


@pytest.mark.slow
def test_hlt_and_felsch_agree_on_case_one(u, case1_table):
    assert case1_table.strategy == "felsch"
    hlt = standardize(enumerate_cosets(u, get_case(1).basis(u), EnumConfig(strategy="hlt")))
    assert hlt.index == case1_table.index == 1024
    assert [list(c) for c in hlt.columns] == [list(c) for c in case1_table.columns]
