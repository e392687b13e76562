"""
Verification suites: each module invariant as a pass/fail record.

Every record is a plain dict ``{"suite", "check", "pass", "count", ...}`` so
the CLI can emit it as one JSON line. Sampling is driven by a
``random.Random`` seeded from ``(seed, suite)``, which makes reports
reproducible byte for byte.
"""

from __future__ import annotations

import dataclasses
import functools
import random
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from . import abelian, bettilab, braid, commensurator as cm
from .braid import BraidGroup, BraidWord, center_power, commute, equal, length
from .fpgroups import (
    braid_presentation,
    intersect,
    reidemeister_schreier,
    todd_coxeter,
)

SUITES = ("p1", "lemma-virtcent", "p3", "lemma-ss", "lemma-tvchar", "divisibility", "betti-growth")


@dataclasses.dataclass
class Config:
    n: int = 4
    samples: int = 100
    seed: int = 0
    m_list: tuple[int, ...] = (1, 2, 3, 4)
    coset_limit: int = 10**6


def _record(suite: str, check: str, ok: bool, count: int, **detail) -> dict:
    rec = {"suite": suite, "check": check, "pass": bool(ok), "count": count}
    if detail:
        rec["detail"] = detail
    return rec


def _rng(cfg: Config, suite: str) -> random.Random:
    return random.Random(f"{cfg.seed}:{suite}:{cfg.n}")


# -- shared fixtures ----------------------------------------------------------

@functools.lru_cache(maxsize=None)
def standard_domains(n: int) -> dict[str, cm.SplitDomain]:
    """K, K with PB_n, and the pullback of the index-2 free subgroup, all split."""
    group = BraidGroup(n)
    k = cm.subgroup_K(group)
    pb = bettilab.pure_braid_subgroup(group)
    pull = bettilab.pullback_subgroup(group, bettilab.f2_finite_index_subgroup(2))
    return {
        "K": cm.split_refine(group, k),
        "K&PBn": cm.split_refine(group, intersect(k, pb)),
        "pullback:2": cm.split_refine(group, pull),
    }


@functools.lru_cache(maxsize=None)
def _center_free(n: int, name: str) -> tuple[tuple[int, ...], ...]:
    return tuple(cm.center_free_homs(standard_domains(n)[name]))


def sample_simple_transvections(n: int, count: int, rng: random.Random) -> list[cm.TvElement]:
    """Random nonzero simple transvections on K and on K with PB_n."""
    out = []
    names = ["K", "K&PBn"]
    while len(out) < count:
        name = names[len(out) % 2]
        basis = _center_free(n, name)
        if not basis:
            name = "K&PBn"
            basis = _center_free(n, name)
        coeffs = [rng.randint(-3, 3) for _ in basis]
        if not any(coeffs):
            continue
        phi = [sum(c * v[j] for c, v in zip(coeffs, basis)) for j in range(len(basis[0]))]
        out.append(cm.make_simple_transvection(standard_domains(n)[name], phi))
    return out


def random_in_K(group: BraidGroup, rng: random.Random, size: int = 10) -> BraidWord:
    w = group.random_word(size, rng)
    fix = (-length(w)) % group.center_length
    return w * group.word((1,) * fix)


def random_in_domain(domain: cm.SplitDomain, rng: random.Random, factors: int = 3) -> BraidWord:
    return domain.group.word(domain.table.random_element(rng, factors))


# -- suites -------------------------------------------------------------------

def suite_p1(cfg: Config) -> Iterator[dict]:
    name = "p1"
    rng = _rng(cfg, name)
    group = BraidGroup(cfg.n)
    pres = braid_presentation(cfg.n)

    ok = all(braid.is_identity(group.word(r)) for r in pres.relators)
    yield _record(name, "relators-trivial", ok, len(pres.relators))

    trials = 5 * cfg.samples
    good = 0
    for _ in range(trials):
        w = list(group.random_word(12, rng).letters)
        r = rng.choice(pres.relators)
        if rng.random() < 0.5:
            r = tuple(-x for x in reversed(r))
        k = rng.randint(0, len(w))
        good += braid.normal_form(group.word(w)) == braid.normal_form(group.word(w[:k] + list(r) + w[k:]))
    yield _record(name, "relator-insertion", good == trials, trials)

    gens = group.generators
    ok = all(equal(group.z * s, s * group.z) for s in gens) and length(group.z) == cfg.n * (cfg.n - 1)
    yield _record(name, "center", ok, len(gens), L_z=length(group.z))

    if cfg.n < 4:
        return
    k_table = cm.subgroup_K(group)
    unit = group.center_length
    yield _record(name, "index-K", k_table.index == unit, 1, index=k_table.index)

    good = 0
    for _ in range(cfg.samples):
        g = random_in_K(group, rng)
        h = cm.hat_projection(g)
        good += (
            k_table.contains(g.letters)
            and length(h) == 0
            and equal(g, h * group.z_power(length(g) // unit))
            and cm.hat_projection(h) == h
        )
    yield _record(name, "hat-projection", good == cfg.samples, cfg.samples)

    good = 0
    for _ in range(cfg.samples):
        g, h = random_in_K(group, rng), random_in_K(group, rng)
        good += (
            length(g * h) // unit == length(g) // unit + length(h) // unit
            and equal(cm.hat_projection(g * h), cm.hat_projection(g) * cm.hat_projection(h))
        )
    yield _record(name, "splitting-homomorphism", good == cfg.samples, cfg.samples)


def suite_lemma_virtcent(cfg: Config) -> Iterator[dict]:
    name = "lemma-virtcent"
    rng = _rng(cfg, name)
    for label, domain in standard_domains(cfg.n).items():
        gens = domain.generators()
        zq = domain.center_generator
        ok = domain.contains(zq) and all(commute(zq, s) for s in gens)
        yield _record(name, f"center-commutes:{label}", ok, len(gens), q=domain.q)

        wanted, checked, fails = 50, 0, 0
        while checked < wanted:
            g = random_in_domain(domain, rng)
            if center_power(g) is not None:
                continue
            checked += 1
            if any(not commute(g, s) for s in gens):
                fails += 1
        yield _record(name, f"noncentral-samples:{label}", fails == wanted, wanted)


def suite_lemma_ss(cfg: Config) -> Iterator[dict]:
    name = "lemma-ss"
    group = BraidGroup(cfg.n)
    unit = group.center_length
    domains = dict(standard_domains(cfg.n))
    domains["Lmod:2N"] = cm.split_refine(group, cm.length_mod_subgroup(group, 2 * unit))
    expected_q = {"K": 1, "K&PBn": 1, "pullback:2": 1, "Lmod:2N": 2}
    for label, d in domains.items():
        gens = d.table.schreier_generators
        ok = (
            d.q == expected_q[label]
            and all(cm.length_of(w) % (d.q * unit) == 0 for w in gens)
            and d.contains(d.center_generator)
        )
        yield _record(name, f"split-certificate:{label}", ok, len(gens), q=d.q, index=d.index)


def suite_lemma_tvchar(cfg: Config) -> Iterator[dict]:
    name = "lemma-tvchar"
    rng = _rng(cfg, name)
    elements = sample_simple_transvections(cfg.n, 5, rng)
    for i, e in enumerate(elements):
        good = 0
        for _ in range(cfg.samples):
            g = random_in_domain(e.domain, rng)
            h = random_in_domain(e.domain, rng)
            eg = center_power(g.inverse() * cm.apply(e, g))
            eh = center_power(h.inverse() * cm.apply(e, h))
            egh = center_power((g * h).inverse() * cm.apply(e, g * h))
            good += None not in (eg, eh, egh) and egh == eg + eh
        yield _record(name, f"center-power-additive:{i}", good == cfg.samples, cfg.samples, index=e.domain.index)

    e = elements[0]
    good = 0
    for _ in range(cfg.samples):
        g = random_in_domain(e.domain, rng)
        h = braid.canonical_word(g) if rng.random() < 0.5 else random_in_domain(e.domain, rng)
        good += equal(cm.apply(e, g), cm.apply(e, h)) == equal(g, h)
    yield _record(name, "injective", good == cfg.samples, cfg.samples)


def _random_element(n: int, rng: random.Random, simple: Sequence[cm.TvElement]) -> cm.TvElement:
    if rng.random() < 0.5:
        p = rng.choice((1, -1)) * rng.randint(1, 3)
        q = rng.randint(1, 3)
        return cm.make_scalar(BraidGroup(n), p, q)
    return rng.choice(simple)


def suite_p3(cfg: Config) -> Iterator[dict]:
    name = "p3"
    rng = _rng(cfg, name)
    group = BraidGroup(cfg.n)
    simple = sample_simple_transvections(cfg.n, 5, rng)

    good = 0
    for _ in range(cfg.samples):
        a = _random_element(cfg.n, rng, simple)
        b = _random_element(cfg.n, rng, simple)
        c = cm.compose(a, b)
        q = c.domain.q
        observed = center_power(cm.apply(c, group.z_power(q)))
        good += cm.theta(c) == cm.theta(a) * cm.theta(b) and Fraction(observed, q) == cm.theta(c)
    yield _record(name, "theta-homomorphism", good == cfg.samples, cfg.samples)

    for r in (Fraction(2), Fraction(1, 2), Fraction(3, 2), Fraction(-1)):
        scalar = cm.make_scalar(group, r.numerator, r.denominator)
        good = 0
        for e in simple:
            lhs = cm.compose(scalar, e)
            rhs = cm.compose(cm.scale_simple(e, r), scalar)
            good += cm.equivalent(lhs, rhs)
        yield _record(name, f"semidirect:{r}", good == len(simple), len(simple))

    eps = cm.BraidAut.eps()
    pool = simple + [cm.make_scalar(group, 3, 2), cm.make_scalar(group, -1, 1)]
    good = sum(cm.equivalent(cm.aut_act(eps, cm.aut_act(eps, e)), e) for e in pool[:5])
    yield _record(name, "eps-squared-trivial", good == 5, 5)

    good = 0
    for e in pool:
        w = group.random_word(4, rng)
        good += (
            cm.theta(cm.aut_act(eps, e)) == cm.theta(e)
            and cm.theta(cm.aut_act(cm.BraidAut.inner(w), e)) == cm.theta(e)
        )
    yield _record(name, "theta-aut-invariant", good == len(pool), len(pool))

    good = sum(cm.equivalent(cm.aut_act(cm.BraidAut.inner(group.z), e), e) for e in pool)
    yield _record(name, "inner-by-z-trivial", good == len(pool), len(pool))


def suite_divisibility(cfg: Config) -> Iterator[dict]:
    name = "divisibility"
    rng = _rng(cfg, name)
    elements = sample_simple_transvections(cfg.n, 5, rng)
    for q in (2, 3, 5):
        good = 0
        for e in elements:
            root = cm.divide(e, q)
            good += cm.equivalent(cm.power(root, q), e)
        yield _record(name, f"root:{q}", good == len(elements), len(elements))


def suite_betti_growth(cfg: Config) -> Iterator[dict]:
    name = "betti-growth"
    rng = _rng(cfg, name)
    group = BraidGroup(cfg.n)
    pres = braid_presentation(cfg.n)
    b1 = abelian.betti_number(pres)
    cross = pres.generators - abelian.rank_mod_prime(abelian.relator_rows(pres))
    yield _record(name, "b1-braid-group", b1 == 1 == cross, 1, b1=b1)

    pb = reidemeister_schreier(bettilab.pure_braid_subgroup(group))
    b1 = abelian.betti_number(pb)
    cross = pb.generators - abelian.rank_mod_prime(abelian.relator_rows(pb))
    want = cfg.n * (cfg.n - 1) // 2
    yield _record(name, "b1-pure-braid-group", b1 == want == cross, 1, b1=b1)

    if cfg.n >= 4:
        for rec in bettilab.betti_growth_experiment(group, cfg.m_list):
            yield _record(name, f"pullback:{rec['m']}", rec["pass"], 1, b1=rec["b1"], index=rec["index"])

    b3 = BraidGroup(3)
    gens3 = list(bettilab.pure_generators(b3).values())

    def pure3():
        out = b3.identity
        for _ in range(rng.randint(1, 5)):
            a = rng.choice(gens3)
            out = out * (a if rng.random() < 0.5 else a.inverse())
        return out

    good = 0
    for _ in range(cfg.samples):
        u, v = pure3(), pure3()
        good += bettilab.pb3_to_f2(u * v) == braid.free_reduce(bettilab.pb3_to_f2(u) + bettilab.pb3_to_f2(v))
    yield _record(name, "pb3-to-f2-homomorphism", good == cfg.samples, cfg.samples)

    ok = all(bettilab.pb3_to_f2(b3.z_power(k)) == () for k in range(-5, 6))
    yield _record(name, "pb3-to-f2-kills-center", ok, 11)

    a = bettilab.pure_generators(b3)
    ok = bettilab.pb3_to_f2(a[1, 2]) == (1,) and bettilab.pb3_to_f2(a[2, 3]) == (2,)
    yield _record(name, "pb3-to-f2-surjective", ok, 2)

    if cfg.n >= 4:
        gens = list(bettilab.pure_generators(group).values())
        good = 0
        for _ in range(cfg.samples):
            u = group.identity
            v = group.identity
            for _ in range(3):
                u = u * rng.choice(gens) ** rng.choice((1, -1))
                v = v * rng.choice(gens) ** rng.choice((1, -1))
            keep = sorted(rng.sample(range(1, cfg.n + 1), 3))
            lhs = bettilab.forget_strands(u * v, keep)
            rhs = bettilab.forget_strands(u, keep) * bettilab.forget_strands(v, keep)
            good += equal(lhs, rhs)
        yield _record(name, "forget-strands-homomorphism", good == cfg.samples, cfg.samples)


_SUITE_FUNCS: dict[str, Callable[[Config], Iterator[dict]]] = {
    "p1": suite_p1,
    "lemma-virtcent": suite_lemma_virtcent,
    "p3": suite_p3,
    "lemma-ss": suite_lemma_ss,
    "lemma-tvchar": suite_lemma_tvchar,
    "divisibility": suite_divisibility,
    "betti-growth": suite_betti_growth,
}


def run_suite(suite: str, cfg: Config) -> list[dict]:
    if suite == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, cfg))
        return out
    if suite not in _SUITE_FUNCS:
        raise KeyError(f"unknown suite {suite!r}")
    if suite != "betti-growth" and suite != "p1":
        cm.require_commensurator_rank(BraidGroup(cfg.n))
    return list(_SUITE_FUNCS[suite](cfg))
