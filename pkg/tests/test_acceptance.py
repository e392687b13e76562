"""
Acceptance gate: twelve end-to-end criteria, each with a wall-clock budget.

Every criterion prints one PASS/FAIL line (visible in ``pytest -v`` output)
and fails the test if either its checks or its time budget fail.
"""

import functools
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from braidcomm import abelian, bettilab, commensurator as cm
from braidcomm.braid import BraidGroup, center_power, commute, equal, free_reduce, length, normal_form
from braidcomm.fpgroups import braid_presentation, intersect, reidemeister_schreier

G4 = BraidGroup(4)


@pytest.fixture
def report(capsys):
    def emit(label, budget, fn):
        start = time.perf_counter()
        ok, detail = fn()
        elapsed = time.perf_counter() - start
        passed = ok and elapsed < budget
        with capsys.disabled():
            status = "PASS" if passed else "FAIL"
            print(f"\n[{status}] {label}: {detail} ({elapsed:.2f}s, budget {budget}s)")
        assert ok, detail
        assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"

    return emit


@functools.lru_cache(maxsize=None)
def three_domains():
    k = cm.subgroup_K(G4)
    pb = bettilab.pure_braid_subgroup(G4)
    pull = bettilab.pullback_subgroup(G4, bettilab.f2_finite_index_subgroup(2))
    return {
        "K": cm.split_refine(G4, k),
        "K&PB4": cm.split_refine(G4, intersect(k, pb)),
        "pullback:2": cm.split_refine(G4, pull),
    }


def random_in_K(rng):
    w = G4.random_word(10, rng)
    return w * G4.word((1,) * ((-length(w)) % 12))


def simple_transvections(count, rng):
    """Random nonzero simple transvections on K and K & PB_4."""
    out = []
    names = ["K", "K&PB4"]
    while len(out) < count:
        d = three_domains()[names[len(out) % 2]]
        basis = cm.center_free_homs(d)
        coeffs = [rng.randint(-3, 3) for _ in basis]
        if any(coeffs):
            phi = [sum(c * v[j] for c, v in zip(coeffs, basis)) for j in range(len(basis[0]))]
            out.append(cm.make_simple_transvection(d, phi))
    return out


def in_domain(d, rng):
    return G4.word(d.table.random_element(rng, 3))


def criterion_1():
    rng = random.Random(1)
    relators = inserted = 0
    for n in (4, 5):
        g = BraidGroup(n)
        rels = braid_presentation(n).relators
        # braid relations for adjacent i, commutations for |i - j| >= 2
        if len(rels) != (n - 2) + (n - 2) * (n - 3) // 2:
            return False, f"wrong relator count for n={n}"
        for r in rels:
            relators += 1
            if normal_form(g.word(r)) != normal_form(g.identity):
                return False, f"relator {r} not trivial"
        for _ in range(500):
            w = list(g.random_word(12, rng).letters)
            r = rng.choice(rels)
            if rng.random() < 0.5:
                r = tuple(-x for x in reversed(r))
            k = rng.randint(0, len(w))
            if normal_form(g.word(w)) != normal_form(g.word(w[:k] + list(r) + w[k:])):
                return False, "relator insertion changed the normal form"
            inserted += 1
    return True, f"{relators} relators trivial, {inserted} insertions (500 per n) preserved the normal form"


def criterion_2():
    lengths = {}
    for n in (4, 5):
        g = BraidGroup(n)
        if not all(equal(g.z * s, s * g.z) for s in g.generators):
            return False, f"z not central for n={n}"
        lengths[n] = length(g.z)
    return lengths == {4: 12, 5: 20}, f"L(z) = {lengths}"


def criterion_3():
    rng = random.Random(3)
    k = cm.subgroup_K(G4)
    if k.index != 12:
        return False, f"index {k.index}"
    for _ in range(100):
        g = random_in_K(rng)
        h = cm.hat_projection(g)
        if not (k.contains(g.letters) and length(h) == 0 and equal(g, h * G4.z_power(length(g) // 12))):
            return False, f"splitting identity fails for {g}"
    for _ in range(100):
        g, h = random_in_K(rng), random_in_K(rng)
        if not equal(cm.hat_projection(g * h), cm.hat_projection(g) * cm.hat_projection(h)):
            return False, "hat projection is not a homomorphism"
    return True, "[B4:K] = 12, 100 splittings, 100 homomorphism pairs"


def criterion_4():
    rng = random.Random(4)
    parts = []
    for name, d in three_domains().items():
        gens = d.generators()
        zq = d.center_generator
        if not all(commute(zq, s) for s in gens):
            return False, f"z^q not central in {name}"
        checked = 0
        while checked < 50:
            g = in_domain(d, rng)
            if center_power(g) is not None:
                continue
            checked += 1
            if all(commute(g, s) for s in gens):
                return False, f"non-central {g} commutes with all generators of {name}"
        parts.append(f"{name}(q={d.q}, {len(gens)} gens)")
    return True, "z^q central and 50 non-central samples each: " + ", ".join(parts)


def criterion_5():
    parts = []
    for name, d in three_domains().items():
        unit = d.q * 12
        if not all(cm.length_of(w) % unit == 0 for w in d.table.schreier_generators):
            return False, f"{name} is not split"
        if not d.contains(d.center_generator):
            return False, f"z^q not in {name}"
        parts.append(f"{name}: index {d.index}, q={d.q}")
    return True, "; ".join(parts)


def criterion_6():
    rng = random.Random(6)
    elements = simple_transvections(5, rng)
    for e in elements:
        for _ in range(100):
            g, h = in_domain(e.domain, rng), in_domain(e.domain, rng)
            eg = center_power(g.inverse() * e(g))
            eh = center_power(h.inverse() * e(h))
            egh = center_power((g * h).inverse() * e(g * h))
            if None in (eg, eh, egh) or egh != eg + eh:
                return False, "exponent not additive or not a center power"
    return True, "5 simple transvections x 100 pairs"


def criterion_7():
    rng = random.Random(7)
    simple = simple_transvections(5, rng)

    def pick():
        if rng.random() < 0.5:
            return cm.make_scalar(G4, rng.choice((1, -1)) * rng.randint(1, 3), rng.randint(1, 3))
        return rng.choice(simple)

    for _ in range(100):
        a, b = pick(), pick()
        c = cm.compose(a, b)
        q = c.domain.q
        # read theta off the action on the center
        observed = Fraction(center_power(c(G4.z_power(q))), q)
        if not (cm.theta(c) == cm.theta(a) * cm.theta(b) == observed):
            return False, "theta is not multiplicative"
    for r in (Fraction(2), Fraction(1, 2), Fraction(3, 2), Fraction(-1)):
        s = cm.make_scalar(G4, r.numerator, r.denominator)
        for e in simple:
            if not cm.equivalent(cm.compose(s, e), cm.compose(cm.scale_simple(e, r), s)):
                return False, f"semidirect relation fails for r={r}"
    return True, "100 theta pairs, semidirect relation for 4 scalars x 5 elements"


def criterion_8():
    rng = random.Random(8)
    elements = simple_transvections(5, rng)
    for q in (2, 3, 5):
        for e in elements:
            table, phi = abelian.divide_hom(e.phi, e.domain.table, q)
            if abelian.restrict_hom(e.phi, e.domain.table, table) != tuple(q * x for x in phi):
                return False, "divide_hom postcondition"
            root = cm.divide(e, q)
            if not cm.equivalent(cm.power(root, q), e):
                return False, f"q={q}: q-th power of the root differs"
    return True, "5 elements x q in (2, 3, 5)"


def criterion_9():
    def both_ways(sp):
        b1 = abelian.betti_number(sp)
        snf = abelian.smith_normal_form(abelian.relator_matrix(sp))
        dense = sp.generators - snf.rank
        modp = sp.generators - abelian.rank_mod_prime(abelian.relator_rows(sp))
        return b1, b1 == dense == modp

    b1, ok = both_ways(braid_presentation(4))
    if not (ok and b1 == 1):
        return False, f"b1(B4) = {b1}"
    b1, ok = both_ways(reidemeister_schreier(bettilab.pure_braid_subgroup(G4)))
    if not (ok and b1 == 6):
        return False, f"b1(PB4) = {b1}"
    found = {}
    for m in (2, 3, 4):
        t = bettilab.pullback_subgroup(G4, bettilab.f2_finite_index_subgroup(m))
        b1, ok = both_ways(reidemeister_schreier(t))
        found[m] = b1
        if not ok or b1 < m + 1:
            return False, f"pullback m={m}: b1 = {b1}"
    return True, f"b1(B4)=1, b1(PB4)=6, pullbacks {found}"


def criterion_10():
    rng = random.Random(10)
    b3 = BraidGroup(3)
    gens = list(bettilab.pure_generators(b3).values())

    def pure():
        w = b3.identity
        for _ in range(rng.randint(1, 5)):
            a = rng.choice(gens)
            w = w * (a if rng.random() < 0.5 else a.inverse())
        return w

    for _ in range(100):
        u, v = pure(), pure()
        if bettilab.pb3_to_f2(u * v) != free_reduce(bettilab.pb3_to_f2(u) + bettilab.pb3_to_f2(v)):
            return False, "not a homomorphism"
    if any(bettilab.pb3_to_f2(b3.z_power(k)) for k in range(-5, 6)):
        return False, "center not killed"
    a = bettilab.pure_generators(b3)
    if bettilab.pb3_to_f2(a[1, 2]) != (1,) or bettilab.pb3_to_f2(a[2, 3]) != (2,):
        return False, "x or y not attained"
    return True, "100 products, z^k for |k| <= 5, x and y attained"


def criterion_11():
    rng = random.Random(11)
    pool = simple_transvections(3, rng) + [cm.make_scalar(G4, 3, 2), cm.make_scalar(G4, -1, 1)]
    eps = cm.BraidAut.eps()
    for e in pool:
        if not cm.equivalent(cm.aut_act(eps, cm.aut_act(eps, e)), e):
            return False, "eps^2 acts nontrivially"
        inner = cm.BraidAut.inner(G4.random_word(4, rng))
        if cm.theta(cm.aut_act(eps, e)) != cm.theta(e) or cm.theta(cm.aut_act(inner, e)) != cm.theta(e):
            return False, "theta changed under an automorphism"
    return True, "eps^2 trivial on 5 elements, theta invariant under eps and inner"


def criterion_12(tmp_path):
    cmd = [sys.executable, "-m", "braidcomm", "verify", "--suite", "all", "--n", "4", "--seed", "7",
           "--cache-dir", str(tmp_path)]
    runs = [subprocess.run(cmd, capture_output=True) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout
    codes = [r.returncode for r in runs]
    lines = runs[0].stdout.count(b"\n")
    return same and codes == [0, 0] and lines > 0, f"{lines} records, identical={same}, exit codes {codes}"


CRITERIA = [
    ("C1 word problem soundness", 5, criterion_1),
    ("C2 center facts", 1, criterion_2),
    ("C3 splitting of K", 30, criterion_3),
    ("C4 centers of finite-index subgroups", 60, criterion_4),
    ("C5 split refinement certificates", 30, criterion_5),
    ("C6 simple transvection characterization", 60, criterion_6),
    ("C7 theta and the semidirect relation", 120, criterion_7),
    ("C8 divisibility", 120, criterion_8),
    ("C9 Betti growth", 300, criterion_9),
    ("C10 PB3 onto F2", 10, criterion_10),
    ("C11 automorphism slice", 60, criterion_11),
]


@pytest.mark.parametrize("label, budget, fn", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(report, label, budget, fn):
    report(label, budget, fn)


def test_criterion_12_determinism(report, tmp_path):
    report("C12 determinism", 600, lambda: criterion_12(tmp_path))
