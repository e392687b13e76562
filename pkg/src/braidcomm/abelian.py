"""
Exact integer linear algebra for first cohomology.

Hom(G, Z) for a finitely presented G is the integer kernel of the relator
matrix (exponent sums). Everything here uses Python integers, so there is no
overflow and no rounding.
"""

from __future__ import annotations

import dataclasses
import heapq
from typing import Sequence, Union

from .fpgroups import (
    CosetTable,
    Presentation,
    SubgroupPresentation,
    cyclic_cover,
)

ABELIAN_SCHEMA = "abelian-v1"


class NotSubgroupError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]
    ncols: int

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(rows, ncols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        return IntMatrix(
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows),
            other.ncols,
        )

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def to_json(self) -> dict:
        return {
            "schema": ABELIAN_SCHEMA,
            "kind": "matrix",
            "rows": self.nrows,
            "cols": self.ncols,
            "data": [[str(x) for x in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "IntMatrix":
        if doc.get("schema") != ABELIAN_SCHEMA:
            raise ValueError(f"expected schema {ABELIAN_SCHEMA!r}")
        return cls.from_rows([[int(x) for x in r] for r in doc["data"]], doc["cols"])


def determinant(m: IntMatrix) -> int:
    """Fraction-free (Bareiss) determinant of a square matrix."""
    n = m.nrows
    if n != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    a = [list(r) for r in m.rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


@dataclasses.dataclass(frozen=True)
class SmithDecomposition:
    """U @ M @ V == D with U, V unimodular and d_1 | d_2 | ... on the diagonal."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def smith_normal_form(m: IntMatrix) -> SmithDecomposition:
    nr, nc = m.shape
    a = [list(r) for r in m.rows]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        # row dst += c * row src
        rs, rd = a[src], a[dst]
        a[dst] = [x + c * y for x, y in zip(rd, rs)]
        us, ud = u[src], u[dst]
        u[dst] = [x + c * y for x, y in zip(ud, us)]

    def add_col(dst, src, c):
        for row in a:
            if row[src]:
                row[dst] += c * row[src]
        for row in v:
            if row[src]:
                row[dst] += c * row[src]

    t = 0
    while t < min(nr, nc):
        # smallest nonzero entry of the trailing block
        best = None
        for i in range(t, nr):
            row = a[i]
            for j in range(t, nc):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                # move the smallest leftover of row/column t onto the pivot
                cands = [(abs(a[i][t]), i, t) for i in range(t + 1, nr) if a[i][t]]
                cands += [(abs(a[t][j]), t, j) for j in range(t + 1, nc) if a[t][j]]
                _, i, j = min(cands)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            if abs(p) != 1:
                bad = next(
                    (i for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % p),
                    None,
                )
                if bad is not None:
                    add_row(t, bad, 1)
                    continue
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    factors = tuple(a[i][i] for i in range(min(nr, nc)) if a[i][i])
    return SmithDecomposition(
        IntMatrix.from_rows(u, nr), IntMatrix.from_rows(a, nc), IntMatrix.from_rows(v, nc), factors
    )


# -- abelianization ---------------------------------------------------------

AnyPresentation = Union[Presentation, SubgroupPresentation]


def _presentation(p: AnyPresentation) -> Presentation:
    return p.presentation if isinstance(p, SubgroupPresentation) else p


def relator_matrix(p: AnyPresentation) -> IntMatrix:
    """One row per relator, entry (r, g) the exponent sum of generator g in r."""
    pres = _presentation(p)
    rows = []
    for r in pres.relators:
        row = [0] * pres.generators
        for x in r:
            row[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(row)
    return IntMatrix.from_rows(rows, pres.generators)


def relator_rows(p: AnyPresentation) -> list[dict[int, int]]:
    """Sparse relator matrix: one {column: exponent sum} per relator, zeros dropped."""
    rows = []
    for r in _presentation(p).relators:
        row: dict[int, int] = {}
        for x in r:
            j = abs(x) - 1
            row[j] = row.get(j, 0) + (1 if x > 0 else -1)
        row = {j: v for j, v in row.items() if v}
        if row:
            rows.append(row)
    return rows


def _eliminate_units(rows: Sequence[dict[int, int]], ncols: int):
    """Solve away variables that occur with coefficient +-1.

    Each step uses a relator c*x_j + rest = 0 with c = +-1 to write
    x_j = -c*rest and substitutes it everywhere. These are unimodular moves, so
    the kernel of the original matrix is the kernel of the residual rows on
    the surviving columns, extended by back-substitution.
    Returns (residual rows, surviving columns, substitutions in order).
    """
    live = {i: dict(r) for i, r in enumerate(rows) if r}
    occurs: dict[int, set[int]] = {}
    for i, r in live.items():
        for j in r:
            occurs.setdefault(j, set()).add(i)
    heap = [(len(r), i) for i, r in live.items()]
    heapq.heapify(heap)
    subs: list[tuple[int, dict[int, int]]] = []
    eliminated = set()
    while heap:
        size, i = heapq.heappop(heap)
        row = live.get(i)
        if row is None or len(row) != size:
            continue
        units = [j for j, v in row.items() if v in (1, -1)]
        if not units:
            continue
        j = min(units, key=lambda col: (len(occurs[col]), col))
        c = row[j]
        expr = {k: -c * v for k, v in row.items() if k != j}
        del live[i]
        for k in row:
            occurs[k].discard(i)
        for other in sorted(occurs[j]):
            target = live[other]
            a = target.pop(j)
            for k, v in expr.items():
                nv = target.get(k, 0) + a * v
                if nv:
                    if k not in target:
                        occurs[k].add(other)
                    target[k] = nv
                elif k in target:
                    del target[k]
                    occurs[k].discard(other)
            if target:
                heapq.heappush(heap, (len(target), other))
            else:
                del live[other]
        occurs[j] = set()
        subs.append((j, expr))
        eliminated.add(j)
    free = [j for j in range(ncols) if j not in eliminated]
    return list(live.values()), free, subs


def _residual_matrix(rows, free) -> IntMatrix:
    pos = {j: k for k, j in enumerate(free)}
    dense = []
    for r in rows:
        v = [0] * len(free)
        for j, x in r.items():
            v[pos[j]] = x
        dense.append(v)
    return IntMatrix.from_rows(dense, len(free))


def sparse_rank(rows: Sequence[dict[int, int]], ncols: int) -> int:
    residual, free, subs = _eliminate_units(rows, ncols)
    return len(subs) + smith_normal_form(_residual_matrix(residual, free)).rank


def sparse_kernel(rows: Sequence[dict[int, int]], ncols: int) -> list[tuple[int, ...]]:
    """Hermite-normalized integer basis of the kernel of a sparse matrix."""
    residual, free, subs = _eliminate_units(rows, ncols)
    snf = smith_normal_form(_residual_matrix(residual, free))
    basis = []
    for col in range(snf.rank, len(free)):
        v = [0] * ncols
        for k, j in enumerate(free):
            v[j] = snf.V.rows[k][col]
        for j, expr in reversed(subs):
            v[j] = sum(c * v[k] for k, c in expr.items())
        basis.append(v)
    return hermite_rows(basis)


def betti_number(p: AnyPresentation) -> int:
    """Generators minus the rank of the relator matrix."""
    pres = _presentation(p)
    return pres.generators - sparse_rank(relator_rows(pres), pres.generators)


def hermite_rows(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row Hermite normal form of a lattice basis; pivots positive, above-pivot entries reduced."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    out_row = 0
    for j in range(ncols):
        # gcd-combine column j among rows out_row..
        while True:
            nz = [i for i in range(out_row, len(a)) if a[i][j]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][j]))
            a[out_row], a[piv] = a[piv], a[out_row]
            done = True
            for i in range(out_row + 1, len(a)):
                if a[i][j]:
                    q = a[i][j] // a[out_row][j]
                    a[i] = [x - q * y for x, y in zip(a[i], a[out_row])]
                    done = done and a[i][j] == 0
            if done:
                break
        if out_row < len(a) and a[out_row][j]:
            if a[out_row][j] < 0:
                a[out_row] = [-x for x in a[out_row]]
            p = a[out_row][j]
            for i in range(out_row):
                q = a[i][j] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[out_row])]
            out_row += 1
            if out_row == len(a):
                break
    return [tuple(r) for r in a[:out_row]]


def integer_kernel(m: IntMatrix) -> list[tuple[int, ...]]:
    """Hermite-normalized basis of {v in Z^cols : m v = 0}."""
    snf = smith_normal_form(m)
    r = snf.rank
    basis = [snf.V.column(j) for j in range(r, m.ncols)]
    return hermite_rows(basis)


@dataclasses.dataclass(frozen=True)
class HomBasis:
    """Integer basis of Hom(G, Z), as values on the presentation's generators."""

    presentation: AnyPresentation
    basis: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        return {
            "schema": ABELIAN_SCHEMA,
            "kind": "hom-basis",
            "generators": _presentation(self.presentation).generators,
            "basis": [[str(x) for x in v] for v in self.basis],
        }


def hom_basis(p: AnyPresentation) -> HomBasis:
    pres = _presentation(p)
    return HomBasis(p, tuple(sparse_kernel(relator_rows(pres), pres.generators)))


def kills_relators(p: AnyPresentation, phi: Sequence[int]) -> bool:
    return all(sum(v * phi[j] for j, v in row.items()) == 0 for row in relator_rows(p))


# -- the direct system of restrictions ---------------------------------------

def restrict_hom(phi: Sequence[int], t1: CosetTable, t2: CosetTable) -> tuple[int, ...]:
    """Values on t2's Schreier generators of the homomorphism ``phi`` of t1's subgroup."""
    if t1 == t2:
        return tuple(phi)
    out = []
    for w in t2.schreier_generators:
        if not t1.contains(w):
            raise NotSubgroupError("second table is not a subgroup of the first")
        out.append(t1.evaluate(phi, w))
    return tuple(out)


def divide_hom(phi: Sequence[int], t: CosetTable, q: int) -> tuple[CosetTable, tuple[int, ...]]:
    """Pass to ker(phi mod q), where phi = q * phi'. Returns (table, phi')."""
    if q < 1:
        raise ValueError("q must be positive")
    if q == 1 or not any(phi):
        return t, tuple(phi)
    sub = cyclic_cover(t, [x % q for x in phi], q)
    restricted = restrict_hom(phi, t, sub)
    if any(x % q for x in restricted):
        raise ArithmeticError("restriction is not divisible; phi is not a homomorphism")
    return sub, tuple(x // q for x in restricted)


def rank_mod_prime(rows: Sequence[dict[int, int]], prime: int = (1 << 61) - 1) -> int:
    """Rank over GF(prime) of a sparse matrix.

    Plain field elimination, independent of the integer routines above; it is
    a lower bound for the rational rank and equal to it for all but finitely
    many primes.
    """
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        r = {j: v % prime for j, v in row.items() if v % prime}
        while r:
            j = min(r)
            piv = pivots.get(j)
            if piv is None:
                inv = pow(r[j], prime - 2, prime)
                pivots[j] = {k: v * inv % prime for k, v in r.items()}
                break
            c = r[j]
            for k, v in piv.items():
                nv = (r.get(k, 0) - c * v) % prime
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return len(pivots)
