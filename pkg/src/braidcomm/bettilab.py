"""
Pure braids, forgetting strands, and pullbacks of free-group subgroups.

Every pure braid group PB_n maps onto F_2 = <x, y>: forget all strands but
1, 2, 3 and then kill the center of PB_3. Pulling back the finite-index
subgroups of F_2 gives subgroups of B_n whose first Betti number is at least
the rank of the free subgroup, so Betti numbers of finite-index subgroups
grow without bound.
"""

from __future__ import annotations

import functools
import itertools
from typing import Iterable, Sequence

from .abelian import betti_number, rank_mod_prime, relator_rows
from .braid import (
    BraidGroup,
    BraidWord,
    Perm,
    equal,
    free_reduce,
    normal_form,
    perm_mul,
    permutation,
    permutation_braid_word,
    transposition,
)
from .fpgroups import (
    CosetTable,
    Word,
    braid_presentation,
    cyclic_images,
    free_presentation,
    inverse,
    reidemeister_schreier,
    table_from_action,
    table_from_finite_quotient,
)

BETTI_SCHEMA = "betti-report-v1"

X, Y = 1, 2


class NotPureError(ValueError):
    pass


def pure_generator(group: BraidGroup, i: int, j: int) -> BraidWord:
    """A_ij = (s_{j-1} ... s_{i+1}) s_i^2 (s_{i+1}^-1 ... s_{j-1}^-1), 1 <= i < j <= n."""
    if not 1 <= i < j <= group.n:
        raise ValueError(f"need 1 <= i < j <= {group.n}")
    down = tuple(range(j - 1, i, -1))
    return group.word(down + (i, i) + inverse(down))


def pure_generators(group: BraidGroup) -> dict[tuple[int, int], BraidWord]:
    return {(i, j): pure_generator(group, i, j) for i, j in itertools.combinations(range(1, group.n + 1), 2)}


def _require_pure(w: BraidWord) -> None:
    if permutation(w) != w.group.identity_perm:
        raise NotPureError(f"{w} is not a pure braid")


def forget_strands(w: BraidWord, keep: Iterable[int]) -> BraidWord:
    """Delete all strands not in ``keep`` (strands labelled 1..n by start position)."""
    _require_pure(w)
    kept = sorted(set(keep))
    if len(kept) < 2 or kept[0] < 1 or kept[-1] > w.n:
        raise ValueError(f"invalid strand subset {kept}")
    kept_set = set(kept)
    at = list(range(1, w.n + 1))
    out = []
    for x in w.letters:
        i = abs(x)
        a, b = at[i - 1], at[i]
        if a in kept_set and b in kept_set:
            k = sum(1 for s in at[: i - 1] if s in kept_set) + 1
            out.append(k if x > 0 else -k)
        at[i - 1], at[i] = b, a
    return BraidGroup(len(kept)).word(free_reduce(out))


# -- PB_3 / Z  ->  F_2 --------------------------------------------------------

_A_IMAGES = {(1, 2): (X,), (2, 3): (Y,), (1, 3): (-X, -Y)}


def _transversal(group: BraidGroup) -> dict[Perm, tuple[int, ...]]:
    return {p: permutation_braid_word(p) for p in itertools.permutations(range(group.n))}


@functools.lru_cache(maxsize=None)
def _pb3_rewriting() -> dict[tuple[Perm, int], Word]:
    """F_2-image of b_p * x * b_p'^-1 for each transversal element and letter."""
    b3 = BraidGroup(3)
    gens = pure_generators(b3)
    z_product = gens[1, 2] * gens[1, 3] * gens[2, 3]
    if not equal(z_product, b3.z):
        raise RuntimeError("center convention z = A12 A13 A23 failed in B_3")

    # short words in the A_ij, indexed by normal form
    letters = [(key, s) for key in sorted(gens) for s in (1, -1)]
    found = {normal_form(b3.identity): ()}
    frontier = [((), ())]
    for _ in range(4):
        nxt = []
        for braid, f2 in frontier:
            for key, s in letters:
                g = gens[key].letters if s > 0 else gens[key].inverse().letters
                img = _A_IMAGES[key] if s > 0 else inverse(_A_IMAGES[key])
                w = free_reduce(braid + g)
                nf = normal_form(b3.word(w))
                if nf not in found:
                    found[nf] = free_reduce(f2 + img)
                    nxt.append((w, found[nf]))
        frontier = nxt

    trans = _transversal(b3)
    out = {}
    for p, bp in trans.items():
        for x in (1, -1, 2, -2):
            q = perm_mul(p, transposition(3, abs(x)))
            u = b3.word(free_reduce(bp + (x,) + inverse(trans[q])))
            nf = normal_form(u)
            if nf not in found:
                raise RuntimeError(f"no A_ij expression found for {u}")
            out[p, x] = found[nf]
    return out


def pb3_to_f2(w: BraidWord) -> Word:
    """Image in F_2 of a pure 3-braid: A12 -> x, A23 -> y, A13 -> x^-1 y^-1."""
    if w.n != 3:
        raise ValueError("pb3_to_f2 expects a 3-strand braid")
    _require_pure(w)
    table = _pb3_rewriting()
    p = (0, 1, 2)
    out: list[int] = []
    for x in w.letters:
        out.extend(table[p, x])
        p = perm_mul(p, transposition(3, abs(x)))
    return free_reduce(out)


def pure_to_f2(w: BraidWord) -> Word:
    """PB_n -> PB_3 -> F_2, forgetting all strands but 1, 2, 3."""
    return pb3_to_f2(forget_strands(w, (1, 2, 3)))


# -- subgroups ----------------------------------------------------------------

def f2_finite_index_subgroup(m: int) -> CosetTable:
    """Kernel of F_2 -> Z/m, x, y -> 1; free of rank m + 1."""
    if m < 1:
        raise ValueError("m must be positive")
    f2 = free_presentation(2)
    return table_from_finite_quotient(f2, cyclic_images(f2, [1, 1], m))


def pure_braid_subgroup(group: BraidGroup) -> CosetTable:
    """PB_n as the kernel of the regular action on the symmetric group."""
    pres = braid_presentation(group.n)
    swaps = [transposition(group.n, i) for i in range(1, group.n)]
    return table_from_action(pres, lambda p, k: perm_mul(p, swaps[k - 1]), group.identity_perm)


def pullback_subgroup(group: BraidGroup, f: CosetTable) -> CosetTable:
    """{w in PB_n : pure_to_f2(w) lies in f}, as a subgroup of B_n of index n! * [F_2 : f]."""
    if group.n < 3:
        raise ValueError("pullbacks need n >= 3")
    if f.presentation != free_presentation(2):
        raise ValueError("expected a coset table over F_2")
    trans = _transversal(group)
    swaps = [transposition(group.n, i) for i in range(1, group.n)]
    images = {}
    for p, bp in trans.items():
        for k in range(1, group.n):
            q = perm_mul(p, swaps[k - 1])
            u = group.word(free_reduce(bp + (k,) + inverse(trans[q])))
            images[p, k] = pure_to_f2(u)

    def step(state, k):
        p, c = state
        return perm_mul(p, swaps[k - 1]), f.trace(images[p, k], c)

    return table_from_action(braid_presentation(group.n), step, (group.identity_perm, 0))


# -- the experiment -------------------------------------------------------------

def betti_growth_experiment(group: BraidGroup, m_list: Sequence[int]) -> list[dict]:
    """Per m: pullback of the index-m free subgroup and its first Betti number."""
    if group.n < 4:
        raise ValueError("the experiment needs n >= 4")
    records = []
    for m in m_list:
        table = pullback_subgroup(group, f2_finite_index_subgroup(m))
        sp = reidemeister_schreier(table)
        b1 = betti_number(sp)
        cross = sp.generators - rank_mod_prime(relator_rows(sp))
        records.append(
            {
                "schema": BETTI_SCHEMA,
                "m": m,
                "index": table.index,
                "generators": sp.generators,
                "relators": len(sp.relators),
                "b1": b1,
                "b1_mod_p": cross,
                "bound_m_plus_1": m + 1,
                "pass": b1 >= m + 1 and b1 == cross,
            }
        )
    return records
