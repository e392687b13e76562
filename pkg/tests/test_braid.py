import itertools
import random

import pytest
from hypothesis import given, strategies as st

from braidcomm.braid import (
    BraidGroup,
    ContextMismatchError,
    WordParseError,
    canonical_word,
    center_power,
    commute,
    equal,
    finishing_set,
    free_reduce,
    is_identity,
    length,
    multiply,
    normal_form,
    perm_mul,
    permutation,
    starting_set,
)
from braidcomm.fpgroups import braid_presentation

from conftest import burau


def words(n, max_size=14):
    letters = st.sampled_from([s * i for i in range(1, n) for s in (1, -1)])
    return st.lists(letters, max_size=max_size).map(tuple)


def test_multiply_cancels(b4):
    s1, s2, s3 = b4.generators
    assert multiply(s1, s1.inverse()).letters == ()
    assert multiply(s1, s2).letters == (1, 2)
    assert multiply(b4.word((1, 2)), b4.word((-2, 3))).letters == (1, 3)


def test_context_mismatch():
    with pytest.raises(ContextMismatchError):
        BraidGroup(4).sigma(1) * BraidGroup(5).sigma(1)


def test_braid_and_commutation_relations(b4):
    s1, s2, s3 = b4.generators
    assert normal_form(s1 * s2 * s1) == normal_form(s2 * s1 * s2)
    assert normal_form(s1 * s3) == normal_form(s3 * s1)
    nf = normal_form(s1 * s1.inverse())
    assert (nf.inf, nf.factors) == (0, ())


def test_equality_examples(b4):
    s1, s2, _ = b4.generators
    z = b4.z
    assert equal(z * s1 * z.inverse(), s1)
    assert is_identity(b4.identity)
    assert not equal(s1, s2)
    assert permutation(s1) != permutation(s2)


def test_permutation_examples(b4):
    assert permutation(b4.sigma(1)) == (1, 0, 2, 3)
    assert permutation(b4.identity) == (0, 1, 2, 3)
    assert permutation(b4.z) == (0, 1, 2, 3)


def test_length_and_center_power(b4):
    s1, s2, _ = b4.generators
    assert length(b4.z) == 12
    assert length(BraidGroup(5).z) == 20
    assert length(s1 * s2.inverse()) == 0
    assert length(s1 * s2 * s1) == 3
    assert center_power(b4.z_power(2)) == 2
    assert center_power(s1) is None
    assert center_power(b4.word((1, 2, 3) * 4)) == 1


def test_parse():
    g = BraidGroup(4)
    assert g.parse("s1S2s3").letters == (1, -2, 3)
    assert g.parse("").letters == ()
    with pytest.raises(WordParseError) as err:
        g.parse("s1q2")
    assert err.value.position == 2
    with pytest.raises(WordParseError) as err:
        g.parse("s1s4")
    assert err.value.position == 2


def test_normal_form_of_positive_permutation_braids():
    # every permutation braid is its own single normal-form factor
    g = BraidGroup(4)
    from braidcomm.braid import permutation_braid_word

    for p in itertools.permutations(range(4)):
        nf = normal_form(g.word(permutation_braid_word(p)))
        if p == g.identity_perm:
            assert nf.factors == () and nf.inf == 0
        elif p == g.delta_perm:
            assert nf.factors == () and nf.inf == 1
        else:
            assert nf.factors == (p,) and nf.inf == 0


@pytest.mark.parametrize("n", [3, 4, 5])
@given(data=st.data())
def test_normal_form_agrees_with_burau(n, data):
    g = BraidGroup(n)
    u = data.draw(words(n))
    v = data.draw(words(n))
    if equal(g.word(u), g.word(v)):
        assert burau(n, u) == burau(n, v)
    if burau(n, u) != burau(n, v):
        assert not equal(g.word(u), g.word(v))
    assert burau(n, canonical_word(g.word(u)).letters) == burau(n, u)


@pytest.mark.parametrize("n", [4, 5])
@given(data=st.data())
def test_relator_insertion(n, data):
    g = BraidGroup(n)
    w = list(data.draw(words(n)))
    r = data.draw(st.sampled_from(braid_presentation(n).relators))
    if data.draw(st.booleans()):
        r = tuple(-x for x in reversed(r))
    k = data.draw(st.integers(0, len(w)))
    assert normal_form(g.word(w)) == normal_form(g.word(w[:k] + list(r) + w[k:]))


@pytest.mark.parametrize("n", [3, 4, 5])
@given(data=st.data())
def test_length_and_permutation_are_homomorphisms(n, data):
    g = BraidGroup(n)
    u, v = g.word(data.draw(words(n))), g.word(data.draw(words(n)))
    assert length(u * v) == length(u) + length(v)
    assert permutation(u * v) == perm_mul(permutation(u), permutation(v))


@pytest.mark.parametrize("n", [4, 5])
@given(data=st.data())
def test_center_is_central(n, data):
    g = BraidGroup(n)
    w = g.word(data.draw(words(n)))
    assert commute(g.z, w)


@given(k=st.integers(-10, 10))
def test_center_power_of_z_powers(k):
    for n in (4, 5):
        assert center_power(BraidGroup(n).z_power(k)) == k


@given(w=words(4), k=st.integers(-3, 3))
def test_center_power_unique(w, k):
    g = BraidGroup(4)
    w = g.word(w)
    if center_power(w) is None:
        assert center_power(w * g.z_power(k)) is None
    else:
        assert center_power(w * g.z_power(k)) == center_power(w) + k


@given(w=words(5, 20))
def test_normal_form_idempotent_and_left_weighted(w):
    g = BraidGroup(5)
    nf = normal_form(g.word(w))
    assert normal_form(g.word(nf.to_word())) == nf
    for a, b in zip(nf.factors, nf.factors[1:]):
        assert starting_set(b) <= finishing_set(a)
    assert all(p not in (g.identity_perm, g.delta_perm) for p in nf.factors)


def test_random_word_is_reproducible(b4):
    assert b4.random_word(20, random.Random(3)) == b4.random_word(20, random.Random(3))


@given(w=st.lists(st.integers(-3, 3).filter(bool), max_size=20))
def test_free_reduce(w):
    r = free_reduce(w)
    assert all(a != -b for a, b in zip(r, r[1:]))
    assert free_reduce(r) == r
    assert burau(4, r) == burau(4, w)
