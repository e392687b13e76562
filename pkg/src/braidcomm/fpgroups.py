"""
Finite-index subgroups of finitely presented groups.

Words are tuples of signed generator indices (``k`` for generator k, ``-k``
for its inverse, generators numbered from 1). A coset table stores, for each
coset and each column, the image coset; column ``2*(k-1)`` is generator k and
column ``2*(k-1)+1`` its inverse. Coset 0 is the subgroup itself.

Every table is stored in standard form: cosets numbered in breadth-first
order from coset 0, columns scanned in index order. Two standardized tables
over the same presentation are equal exactly when their subgroups are.
"""

from __future__ import annotations

import dataclasses
import functools
import hashlib
import json
import random
from collections import deque
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .braid import free_reduce

Word = tuple[int, ...]

TABLE_SCHEMA = "fpgroups-table-v1"
DEFAULT_COSET_LIMIT = 10**6


class CosetLimitError(RuntimeError):
    """Enumeration needed more cosets than allowed."""


class NotInSubgroupError(ValueError):
    pass


class SchemaError(ValueError):
    """A serialized document does not carry the expected schema tag."""


def inverse(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def column(letter: int) -> int:
    return 2 * (abs(letter) - 1) + (letter < 0)


@dataclasses.dataclass(frozen=True)
class Presentation:
    generators: int
    relators: tuple[Word, ...]

    def __post_init__(self):
        for r in self.relators:
            for x in r:
                if x == 0 or abs(x) > self.generators:
                    raise ValueError(f"relator letter {x} out of range")
        object.__setattr__(self, "relators", tuple(free_reduce(r) for r in self.relators))

    def to_json(self) -> dict:
        return {"generators": self.generators, "relators": [list(r) for r in self.relators]}

    @classmethod
    def from_json(cls, doc: dict) -> "Presentation":
        return cls(doc["generators"], tuple(tuple(r) for r in doc["relators"]))


def braid_presentation(n: int) -> Presentation:
    """Artin presentation: braid relations for adjacent, commutation for distant generators."""
    rels = []
    for i in range(1, n - 1):
        rels.append((i, i + 1, i, -(i + 1), -i, -(i + 1)))
    for i in range(1, n):
        for j in range(i + 2, n):
            rels.append((i, j, -i, -j))
    return Presentation(n - 1, tuple(rels))


def free_presentation(rank: int) -> Presentation:
    return Presentation(rank, ())


# -- tables -----------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class CosetTable:
    presentation: Presentation
    table: tuple[tuple[int, ...], ...]
    subgroup_generators: tuple[Word, ...] = dataclasses.field(default=(), compare=False)

    @property
    def index(self) -> int:
        return len(self.table)

    def trace(self, word: Iterable[int], start: int = 0) -> int:
        c = start
        table = self.table
        for x in word:
            c = table[c][2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1]
        return c

    def contains(self, word: Iterable[int]) -> bool:
        return self.trace(word) == 0

    # spanning tree and Schreier generators

    @functools.cached_property
    def _tree(self) -> tuple[dict, list[Word]]:
        """Tree edges as {(coset, column)} and a representative word per coset."""
        reps: list[Optional[Word]] = [None] * self.index
        reps[0] = ()
        edges = set()
        queue = deque([0])
        ncols = 2 * self.presentation.generators
        while queue:
            c = queue.popleft()
            for col in range(ncols):
                d = self.table[c][col]
                if reps[d] is None:
                    letter = col // 2 + 1 if col % 2 == 0 else -(col // 2 + 1)
                    reps[d] = reps[c] + (letter,)
                    edges.add((c, col))
                    edges.add((d, col ^ 1))
                    queue.append(d)
        return edges, reps

    @property
    def representatives(self) -> list[Word]:
        return self._tree[1]

    @functools.cached_property
    def schreier_entries(self) -> tuple[tuple[int, int], ...]:
        """Non-tree (coset, generator) pairs in table-scan order."""
        edges = self._tree[0]
        out = []
        for c in range(self.index):
            for k in range(1, self.presentation.generators + 1):
                if (c, 2 * (k - 1)) not in edges:
                    out.append((c, k))
        return tuple(out)

    @functools.cached_property
    def _schreier_lookup(self) -> dict[tuple[int, int], int]:
        return {entry: i + 1 for i, entry in enumerate(self.schreier_entries)}

    @functools.cached_property
    def schreier_generators(self) -> tuple[Word, ...]:
        """Ambient words rep(c) * x * rep(c.x)^-1, one per non-tree entry."""
        reps = self.representatives
        out = []
        for c, k in self.schreier_entries:
            d = self.table[c][2 * (k - 1)]
            out.append(free_reduce(reps[c] + (k,) + inverse(reps[d])))
        return tuple(out)

    def rewrite(self, word: Iterable[int], start: int = 0, check: bool = True) -> Word:
        """Reidemeister rewriting of ``word`` into Schreier generators."""
        lookup = self._schreier_lookup
        table = self.table
        c = start
        out = []
        for x in word:
            if x > 0:
                s = lookup.get((c, x))
                if s:
                    out.append(s)
                c = table[c][2 * (x - 1)]
            else:
                d = table[c][2 * (-x - 1) + 1]
                s = lookup.get((d, -x))
                if s:
                    out.append(-s)
                c = d
        if check and c != start:
            raise NotInSubgroupError("word does not lie in the subgroup")
        return free_reduce(out)

    def expand(self, word: Iterable[int]) -> Word:
        """Ambient word for a word in Schreier generators."""
        gens = self.schreier_generators
        out: list[int] = []
        for s in word:
            out.extend(gens[s - 1] if s > 0 else inverse(gens[-s - 1]))
        return free_reduce(out)

    def evaluate(self, values: Sequence[int], word: Iterable[int]) -> int:
        """Value of the homomorphism given by ``values`` on Schreier generators."""
        lookup = self._schreier_lookup
        table = self.table
        c = 0
        total = 0
        for x in word:
            if x > 0:
                s = lookup.get((c, x))
                if s:
                    total += values[s - 1]
                c = table[c][2 * (x - 1)]
            else:
                d = table[c][2 * (-x - 1) + 1]
                s = lookup.get((d, -x))
                if s:
                    total -= values[s - 1]
                c = d
        if c != 0:
            raise NotInSubgroupError("word does not lie in the subgroup")
        return total

    def random_element(self, rng: random.Random, factors: int = 4) -> Word:
        """Random product of Schreier generators and their inverses."""
        gens = self.schreier_generators
        out: list[int] = []
        for _ in range(factors):
            g = rng.choice(gens)
            out.extend(g if rng.random() < 0.5 else inverse(g))
        return free_reduce(out)

    # serialization

    def to_json(self) -> dict:
        return {
            "schema": TABLE_SCHEMA,
            "presentation": self.presentation.to_json(),
            "index": self.index,
            "table": [d for row in self.table for d in row],
            "subgroup_generators": [list(w) for w in self.subgroup_generators],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CosetTable":
        if doc.get("schema") != TABLE_SCHEMA:
            raise SchemaError(f"expected schema {TABLE_SCHEMA!r}, got {doc.get('schema')!r}")
        pres = Presentation.from_json(doc["presentation"])
        width = 2 * pres.generators
        flat = doc["table"]
        if len(flat) != doc["index"] * width:
            raise SchemaError("table length does not match index")
        rows = tuple(tuple(flat[i:i + width]) for i in range(0, len(flat), width))
        t = cls(pres, rows, tuple(tuple(w) for w in doc["subgroup_generators"]))
        _check_closed(t)
        return t

    @functools.cached_property
    def digest(self) -> str:
        payload = json.dumps([self.presentation.to_json(), self.table], separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _check_closed(t: CosetTable) -> None:
    ncols = 2 * t.presentation.generators
    for c, row in enumerate(t.table):
        if len(row) != ncols:
            raise ValueError("table row has wrong width")
        for col, d in enumerate(row):
            if not 0 <= d < t.index or t.table[d][col ^ 1] != c:
                raise ValueError(f"table is not a permutation action at coset {c}")
    for r in t.presentation.relators:
        for c in range(t.index):
            if t.trace(r, c) != c:
                raise ValueError(f"relator {r} does not close at coset {c}")


def _standardize(pres: Presentation, rows: Sequence[Sequence[int]], subgens: Sequence[Word]) -> CosetTable:
    ncols = 2 * pres.generators
    order = {0: 0}
    queue = [0]
    i = 0
    while i < len(queue):
        c = queue[i]
        i += 1
        for col in range(ncols):
            d = rows[c][col]
            if d not in order:
                order[d] = len(queue)
                queue.append(d)
    table = tuple(tuple(order[rows[c][col]] for col in range(ncols)) for c in queue)
    t = CosetTable(pres, table, tuple(subgens))
    _check_closed(t)
    return t


def table_from_action(
    pres: Presentation,
    step: Callable[[Hashable, int], Hashable],
    base: Hashable,
    limit: int = DEFAULT_COSET_LIMIT,
    subgroup_generators: Optional[Sequence[Word]] = None,
) -> CosetTable:
    """Table of the stabilizer of ``base`` under a finite right action.

    ``step(state, k)`` is the image of ``state`` under generator ``k`` (1-based);
    inverse columns are obtained by inverting the action on the orbit. Raises
    ValueError when the action does not satisfy the relators.
    """
    states = [base]
    where = {base: 0}
    forward = []
    i = 0
    g = pres.generators
    while i < len(states):
        s = states[i]
        row = []
        for k in range(1, g + 1):
            t = step(s, k)
            j = where.get(t)
            if j is None:
                if len(states) >= limit:
                    raise CosetLimitError(f"orbit exceeds {limit} points")
                j = where[t] = len(states)
                states.append(t)
            row.append(j)
        forward.append(row)
        i += 1
    size = len(states)
    rows = [[0] * (2 * g) for _ in range(size)]
    for k in range(g):
        seen = [False] * size
        for c in range(size):
            d = forward[c][k]
            if seen[d]:
                raise ValueError(f"generator {k + 1} does not act as a permutation")
            seen[d] = True
            rows[c][2 * k] = d
            rows[d][2 * k + 1] = c
    t = _standardize(pres, rows, ())
    if subgroup_generators is None:
        subgroup_generators = t.schreier_generators
    return dataclasses.replace(t, subgroup_generators=tuple(subgroup_generators))


def table_from_finite_quotient(pres: Presentation, images: Sequence[Sequence[int]]) -> CosetTable:
    """Kernel-style subgroup from a map of generators into a permutation group.

    ``images[k]`` is the permutation of ``range(d)`` assigned to generator k+1.
    The subgroup is the preimage of the stabilizer of point 0; for a regular
    representation of a finite group this is the kernel of the map.
    """
    if len(images) != pres.generators:
        raise ValueError("need one image per generator")
    degree = len(images[0]) if images else 1
    perms = [tuple(p) for p in images]
    for p in perms:
        if sorted(p) != list(range(degree)):
            raise ValueError("images must be permutations of one common degree")
    inv = []
    for p in perms:
        q = [0] * degree
        for a, b in enumerate(p):
            q[b] = a
        inv.append(q)
    for r in pres.relators:
        for pt in range(degree):
            c = pt
            for x in r:
                c = perms[x - 1][c] if x > 0 else inv[-x - 1][c]
            if c != pt:
                raise ValueError(f"relator {r} is violated by the images")
    return table_from_action(pres, lambda s, k: perms[k - 1][s], 0)


def cyclic_images(pres: Presentation, values: Sequence[int], modulus: int) -> list[tuple[int, ...]]:
    """Regular representation of Z/modulus for generator values ``values``."""
    return [tuple((s + v) % modulus for s in range(modulus)) for v in values]


def cyclic_cover(t: CosetTable, values: Sequence[int], modulus: int) -> CosetTable:
    """Kernel of the Z/modulus-valued homomorphism of ``t``'s subgroup.

    ``values`` gives the homomorphism on the Schreier generators of ``t``. The
    result is a table over the same ambient presentation, of index
    ``t.index`` times the size of the image.
    """
    if all(v % modulus == 0 for v in values):
        return t
    lookup = t._schreier_lookup
    table = t.table

    def step(state, k):
        c, a = state
        s = lookup.get((c, k))
        if s:
            a = (a + values[s - 1]) % modulus
        return table[c][2 * (k - 1)], a

    return table_from_action(t.presentation, step, (0, 0))


def intersect(t1: CosetTable, t2: CosetTable, limit: int = DEFAULT_COSET_LIMIT) -> CosetTable:
    if t1.presentation != t2.presentation:
        raise ValueError("tables over different presentations")
    if t1 == t2:
        return t1
    a, b = t1.table, t2.table
    return table_from_action(
        t1.presentation, lambda s, k: (a[s[0]][2 * (k - 1)], b[s[1]][2 * (k - 1)]), (0, 0), limit
    )


def whole_group(pres: Presentation) -> CosetTable:
    return table_from_action(pres, lambda s, k: 0, 0)


def is_subgroup(t_small: CosetTable, t_big: CosetTable) -> bool:
    return all(t_big.contains(w) for w in t_small.schreier_generators)


# -- Todd-Coxeter -----------------------------------------------------------

class _Enumeration:
    """HLT coset enumeration with coincidence processing (Holt et al., ch. 5)."""

    def __init__(self, pres: Presentation, limit: int):
        self.pres = pres
        self.ncols = 2 * pres.generators
        self.limit = limit
        self.table: list[list[int]] = [[-1] * self.ncols]
        self.parent = [0]

    def live(self, c: int) -> bool:
        return self.parent[c] == c

    def rep(self, c: int) -> int:
        root = c
        parent = self.parent
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def define(self, c: int, col: int) -> None:
        if len(self.table) >= self.limit:
            raise CosetLimitError(f"more than {self.limit} cosets")
        d = len(self.table)
        self.table.append([-1] * self.ncols)
        self.parent.append(d)
        self.table[c][col] = d
        self.table[d][col ^ 1] = c

    def _merge(self, a: int, b: int, queue: list[int]) -> None:
        a, b = self.rep(a), self.rep(b)
        if a != b:
            lo, hi = min(a, b), max(a, b)
            self.parent[hi] = lo
            queue.append(hi)

    def coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []
        table = self.table
        self._merge(a, b, queue)
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            for col in range(self.ncols):
                d = table[g][col]
                if d < 0:
                    continue
                table[d][col ^ 1] = -1
                mu, nu = self.rep(g), self.rep(d)
                if table[mu][col] >= 0:
                    self._merge(nu, table[mu][col], queue)
                elif table[nu][col ^ 1] >= 0:
                    self._merge(mu, table[nu][col ^ 1], queue)
                else:
                    table[mu][col] = nu
                    table[nu][col ^ 1] = mu

    def scan_and_fill(self, alpha: int, word: Sequence[int], fill: bool = True) -> None:
        table = self.table
        cols = [column(x) for x in word]
        f, i = alpha, 0
        b, j = alpha, len(cols) - 1
        while True:
            while i <= j and table[f][cols[i]] >= 0:
                f = table[f][cols[i]]
                i += 1
            if i > j:
                if f != alpha:
                    self.coincidence(f, alpha)
                return
            while j >= i and table[b][cols[j] ^ 1] >= 0:
                b = table[b][cols[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                table[f][cols[i]] = b
                table[b][cols[i] ^ 1] = f
                return
            if not fill:
                return
            self.define(f, cols[i])

    def lookahead(self) -> None:
        for c in range(len(self.table)):
            for r in self.pres.relators:
                if not self.live(c):
                    break
                self.scan_and_fill(c, r, fill=False)

    def compact(self, alpha: int) -> int:
        live = [c for c in range(len(self.table)) if self.live(c)]
        new = {c: i for i, c in enumerate(live)}
        self.table = [[new[d] if d >= 0 else -1 for d in self.table[c]] for c in live]
        self.parent = list(range(len(live)))
        return next((new[c] for c in live if c >= alpha), len(live))

    def run(self, subgens: Sequence[Word]) -> None:
        for w in subgens:
            self.scan_and_fill(0, w)
        alpha = 0
        while alpha < len(self.table):
            try:
                for r in self.pres.relators:
                    if not self.live(alpha):
                        break
                    self.scan_and_fill(alpha, r)
                if self.live(alpha):
                    for col in range(self.ncols):
                        if self.table[alpha][col] < 0:
                            self.define(alpha, col)
            except CosetLimitError:
                self.lookahead()
                before = len(self.table)
                alpha = self.compact(alpha)
                if len(self.table) >= before:
                    raise
                continue
            alpha += 1


def todd_coxeter(
    pres: Presentation, subgens: Sequence[Sequence[int]], limit: int = DEFAULT_COSET_LIMIT
) -> CosetTable:
    """Enumerate the cosets of the subgroup generated by ``subgens``."""
    if limit <= 0:
        raise ValueError("limit must be positive")
    words = tuple(free_reduce(w) for w in subgens)
    run = _Enumeration(pres, limit)
    run.run(words)
    live = [c for c in range(len(run.table)) if run.live(c)]
    pos = {c: i for i, c in enumerate(live)}
    rows = [[pos[run.rep(run.table[c][col])] for col in range(run.ncols)] for c in live]
    return _standardize(pres, rows, words)


# -- Reidemeister-Schreier --------------------------------------------------

@dataclasses.dataclass(frozen=True)
class SubgroupPresentation:
    """Presentation of a subgroup on its Schreier generators."""

    table: CosetTable
    generator_words: tuple[Word, ...]
    presentation: Presentation

    @property
    def generators(self) -> int:
        return self.presentation.generators

    @property
    def relators(self) -> tuple[Word, ...]:
        return self.presentation.relators


def reidemeister_schreier(t: CosetTable) -> SubgroupPresentation:
    rels = []
    for c in range(t.index):
        for r in t.presentation.relators:
            w = t.rewrite(r, start=c)
            if w:
                rels.append(w)
    gens = t.schreier_generators
    return SubgroupPresentation(t, gens, Presentation(len(gens), tuple(rels)))
