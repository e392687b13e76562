import json
import random

import pytest
from hypothesis import given, strategies as st

from braidcomm.bettilab import pure_braid_subgroup, pure_generators
from braidcomm.braid import BraidGroup, equal, length, permutation
from braidcomm.commensurator import length_mod_subgroup, subgroup_K
from braidcomm.fpgroups import (
    CosetLimitError,
    CosetTable,
    NotInSubgroupError,
    Presentation,
    SchemaError,
    braid_presentation,
    cyclic_images,
    free_presentation,
    intersect,
    is_subgroup,
    reidemeister_schreier,
    table_from_finite_quotient,
    todd_coxeter,
    whole_group,
)

sympy_fp = pytest.importorskip("sympy.combinatorics.fp_groups")
from sympy.combinatorics.free_groups import free_group  # noqa: E402

B4 = braid_presentation(4)
# the six A_ij of PB_4
PURE_GENS = [(1, 1), (2, 2), (3, 3), (2, 1, 1, -2), (3, 2, 2, -3), (3, 2, 1, 1, -2, -3)]


def sympy_index(pres: Presentation, subgens) -> int:
    """Coset count from sympy's enumerator, used only as an outside oracle."""
    names = " ".join(f"g{i}" for i in range(1, pres.generators + 1))
    F, *gens = free_group(names)

    def word(w):
        out = F.identity
        for x in w:
            out = out * (gens[x - 1] if x > 0 else gens[-x - 1] ** -1)
        return out

    G = sympy_fp.FpGroup(F, [word(r) for r in pres.relators])
    return G.index([word(w) for w in subgens])


def check_complete(t: CosetTable) -> None:
    for c in range(t.index):
        for r in t.presentation.relators:
            assert t.trace(r, c) == c


def test_braid_presentation_relators():
    g = BraidGroup(5)
    rels = braid_presentation(5).relators
    # 3 braid relations and 3 commutations
    assert len(rels) == 6
    assert all(equal(g.word(r), g.identity) for r in rels)


@pytest.mark.parametrize(
    "pres, subgens, expected",
    [
        (B4, [(1,), (2,), (3,)], 1),
        (B4, [(1, 1), (2,), (3,)], 4),
        (free_presentation(2), [(1, 1), (2,), (1, 2, -1)], 2),
        (B4, PURE_GENS, 24),
    ],
)
def test_todd_coxeter_index(pres, subgens, expected):
    t = todd_coxeter(pres, subgens)
    assert t.index == expected
    check_complete(t)
    assert all(t.contains(w) for w in subgens)
    if pres.relators:
        assert sympy_index(pres, subgens) == expected


def test_strand_stabilizer_oracle():
    # <s1^2, s2, s3> is the preimage of the stabilizer of strand 1 in S_4
    t = todd_coxeter(B4, [(1, 1), (2,), (3,)])
    orbit = {permutation(BraidGroup(4).word(w))[0] for w in t.representatives}
    assert t.index == len(orbit) == 4


def test_todd_coxeter_matches_known_tables():
    g = BraidGroup(4)
    k = subgroup_K(g)
    assert todd_coxeter(B4, k.schreier_generators) == k
    pb = pure_braid_subgroup(g)
    assert todd_coxeter(B4, [w.letters for w in pure_generators(g).values()]) == pb
    assert sympy_index(B4, [w.letters for w in pure_generators(g).values()]) == 24


def test_todd_coxeter_limit():
    with pytest.raises(CosetLimitError):
        todd_coxeter(B4, PURE_GENS, limit=10)


def test_finite_quotients():
    g = BraidGroup(4)
    assert subgroup_K(g).index == 12
    assert pure_braid_subgroup(g).index == 24
    trivial = table_from_finite_quotient(B4, [(0,)] * 3)
    assert trivial.index == 1
    with pytest.raises(ValueError):
        table_from_finite_quotient(B4, [(1, 0), (0, 1), (0, 1)])


@given(m=st.integers(1, 40))
def test_length_mod_m_has_index_m(m):
    t = length_mod_subgroup(BraidGroup(4), m)
    assert t.index == m
    check_complete(t)


def test_membership():
    g = BraidGroup(4)
    pb = pure_braid_subgroup(g)
    assert pb.contains((1, 1))
    assert not pb.contains((1,))
    assert pb.contains(())
    assert subgroup_K(g).contains(g.z.letters)


def test_schreier_generators():
    w = whole_group(B4)
    assert w.schreier_generators == ((1,), (2,), (3,))
    f2 = todd_coxeter(free_presentation(2), [(1, 1), (2,), (1, 2, -1)])
    assert len(f2.schreier_generators) == 3
    pb = pure_braid_subgroup(BraidGroup(4))
    assert len(pb.schreier_generators) == 24 * (3 - 1) + 1
    # one generator per table entry off the spanning tree
    tree_edges = pb.index - 1
    assert len(pb.schreier_entries) == pb.index * 3 - tree_edges


def test_reidemeister_schreier_counts():
    sp = reidemeister_schreier(whole_group(B4))
    assert sp.presentation == B4
    f2 = todd_coxeter(free_presentation(2), [(1, 1), (2,), (1, 2, -1)])
    sp = reidemeister_schreier(f2)
    assert sp.generators == 3 and sp.relators == ()
    k = reidemeister_schreier(subgroup_K(BraidGroup(4)))
    assert k.generators == 12 * 2 + 1
    # every one of the 3 relators rewritten at every coset; none collapses
    assert len(k.relators) == 12 * 3


def test_rewrite_examples():
    t = subgroup_K(BraidGroup(4))
    assert t.rewrite(()) == ()
    w = whole_group(B4)
    assert w.expand(w.rewrite((1, 2))) == (1, 2)
    with pytest.raises(NotInSubgroupError):
        t.rewrite((1,))


@pytest.mark.parametrize("name", ["K", "PB", "K&PB"])
def test_rewrite_round_trip(name):
    g = BraidGroup(4)
    tables = {"K": subgroup_K(g), "PB": pure_braid_subgroup(g)}
    tables["K&PB"] = intersect(tables["K"], tables["PB"])
    t = tables[name]
    rng = random.Random(name)
    for _ in range(200):
        w = t.random_element(rng, factors=3)
        assert equal(g.word(t.expand(t.rewrite(w))), g.word(w))
        # closure: products of members are members
        assert t.contains(w + t.random_element(rng, 2))


def test_intersection():
    g = BraidGroup(4)
    k, pb = subgroup_K(g), pure_braid_subgroup(g)
    both = intersect(k, pb)
    assert 24 <= both.index <= 288 and 288 % both.index == 0
    # L restricted to PB_4 has image 2Z, so K & PB_4 has index 24 * 6
    assert both.index == 144
    assert intersect(k, whole_group(B4)).index == k.index
    assert intersect(k, k) == k
    assert is_subgroup(both, k) and is_subgroup(both, pb)
    assert not is_subgroup(k, pb)


@given(a=st.integers(1, 12), b=st.integers(1, 12))
def test_intersection_index_bounds(a, b):
    g = BraidGroup(4)
    ta, tb = length_mod_subgroup(g, a), length_mod_subgroup(g, b)
    t = intersect(ta, tb)
    assert t.index >= max(ta.index, tb.index)
    from math import lcm

    assert t.index == lcm(a, b)


def test_json_round_trip(tmp_path):
    t = subgroup_K(BraidGroup(4))
    doc = json.loads(json.dumps(t.to_json()))
    back = CosetTable.from_json(doc)
    assert back == t and back.digest == t.digest
    doc["schema"] = "fpgroups-table-v0"
    with pytest.raises(SchemaError):
        CosetTable.from_json(doc)
    doc = t.to_json()
    doc["table"][0] = 5
    with pytest.raises(ValueError):
        CosetTable.from_json(doc)


def test_cyclic_images_length_map():
    g = BraidGroup(4)
    t = table_from_finite_quotient(B4, cyclic_images(B4, [1, 1, 1], 12))
    rng = random.Random(0)
    for _ in range(50):
        w = g.random_word(15, rng)
        assert t.contains(w.letters) == (length(w) % 12 == 0)
