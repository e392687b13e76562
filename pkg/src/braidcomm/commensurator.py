"""
Transvection elements of the abstract commensurator of B_n.

Notation: N = n(n-1) = L(z). K is the kernel of B_n -> Z/N given by the
length homomorphism L, and g -> z^(L(g)/N) splits K over its center; the
complement is K-hat = K intersected with ker L.

A split domain is a finite-index subgroup G of K together with the least
q > 0 such that z^q lies in G, subject to L(g) = 0 mod qN for all g in G.
Then G is the direct product of (G intersected with ker L) and <z^q>.

A transvection element is stored as (domain, r, phi) with r = p/q rational
and phi a homomorphism G -> Z vanishing on z^q. It acts by

    g  ->  g * z^(phi(g) + (r - 1) * L(g) / N)

so ``phi`` is the simple-transvection part and ``r`` the scalar part
z^q -> z^p. Composition is "apply the right operand first" and always
returns this (simple) o (scalar) form.
"""

from __future__ import annotations

import dataclasses
import functools
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .abelian import (
    IntMatrix,
    hom_basis,
    integer_kernel,
    kills_relators,
    restrict_hom,
)
from .braid import BraidGroup, BraidWord, free_reduce, length
from .fpgroups import (
    DEFAULT_COSET_LIMIT,
    CosetTable,
    NotInSubgroupError,
    SubgroupPresentation,
    braid_presentation,
    cyclic_cover,
    cyclic_images,
    intersect,
    inverse,
    reidemeister_schreier,
    table_from_action,
    table_from_finite_quotient,
)

TV_SCHEMA = "tv-element-v1"


class DomainError(ValueError):
    """A word or subgroup is outside the domain an operation requires."""


def require_commensurator_rank(group: BraidGroup) -> None:
    if group.n < 4:
        raise ValueError(f"commensurator constructions need n >= 4, got n={group.n}")


def length_mod_subgroup(group: BraidGroup, m: int) -> CosetTable:
    """Kernel of B_n -> Z/m, w -> L(w) mod m."""
    pres = braid_presentation(group.n)
    return table_from_finite_quotient(pres, cyclic_images(pres, [1] * (group.n - 1), m))


def subgroup_K(group: BraidGroup) -> CosetTable:
    """The kernel of L mod n(n-1); index n(n-1)."""
    return length_mod_subgroup(group, group.center_length)


def hat_projection(g: BraidWord) -> BraidWord:
    """The K-hat component g * z^(-L(g)/N) of an element of K."""
    unit = g.group.center_length
    total = length(g)
    if total % unit:
        raise DomainError(f"{g} is not in K")
    return g * g.group.z_power(-(total // unit))


def center_exponent(group: BraidGroup, t: CosetTable) -> int:
    """Least q > 0 with z^q in the subgroup (at most the index)."""
    z = group.z.letters
    c = t.trace(z)
    q = 1
    while c != 0:
        c = t.trace(z, c)
        q += 1
        if q > t.index:
            raise RuntimeError("z acts with an orbit longer than the index")
    return q


@dataclasses.dataclass(frozen=True)
class SplitDomain:
    group: BraidGroup
    table: CosetTable
    q: int

    def __post_init__(self):
        unit = self.q * self.group.center_length
        for w in self.table.schreier_generators:
            if length_of(w) % unit:
                raise DomainError(f"generator {w} has length not divisible by {unit}")
        if center_exponent(self.group, self.table) != self.q:
            raise DomainError("stored center exponent is not minimal")

    @property
    def index(self) -> int:
        return self.table.index

    @functools.cached_property
    def presentation(self) -> SubgroupPresentation:
        return reidemeister_schreier(self.table)

    @functools.cached_property
    def center_generator(self) -> BraidWord:
        return self.group.z_power(self.q)

    def contains(self, g: BraidWord) -> bool:
        return self.table.contains(g.letters)

    def generators(self) -> list[BraidWord]:
        return [self.group.word(w) for w in self.table.schreier_generators]


def length_of(word: Sequence[int]) -> int:
    return sum(1 if x > 0 else -1 for x in word)


def split_refine(group: BraidGroup, t: CosetTable, limit: int = DEFAULT_COSET_LIMIT) -> SplitDomain:
    """Shrink ``t`` to a finite-index subgroup that splits over its center."""
    require_commensurator_rank(group)
    unit = group.center_length
    if any(length_of(w) % unit for w in t.schreier_generators):
        t = intersect(t, subgroup_K(group), limit)
    q = center_exponent(group, t)
    values = [length_of(w) // unit for w in t.schreier_generators]
    refined = cyclic_cover(t, values, q)
    return SplitDomain(group, refined, q)


@dataclasses.dataclass(frozen=True)
class TvElement:
    domain: SplitDomain
    scalar: Fraction
    phi: tuple[int, ...]

    def __post_init__(self):
        if self.scalar == 0:
            raise ValueError("scalar must be nonzero")
        if (self.scalar * self.domain.q).denominator != 1:
            raise DomainError("scalar * q must be an integer on this domain")
        if len(self.phi) != len(self.domain.table.schreier_generators):
            raise ValueError("phi needs one value per Schreier generator")

    @property
    def group(self) -> BraidGroup:
        return self.domain.group

    def exponent(self, g: BraidWord) -> int:
        """The e with apply(g) = g z^e."""
        unit = self.group.center_length
        try:
            value = self.domain.table.evaluate(self.phi, g.letters)
        except NotInSubgroupError:
            raise DomainError(f"{g} is not in the domain") from None
        e = value + (self.scalar - 1) * Fraction(length(g), unit)
        if e.denominator != 1:
            raise DomainError("non-integral exponent; domain is not split")
        return int(e)

    def __call__(self, g: BraidWord) -> BraidWord:
        return apply(self, g)

    def to_json(self) -> dict:
        return {
            "schema": TV_SCHEMA,
            "n": self.group.n,
            "domain": self.domain.table.digest,
            "q": self.domain.q,
            "scalar": f"{self.scalar.numerator}/{self.scalar.denominator}",
            "phi": list(self.phi),
        }

    @classmethod
    def from_json(cls, doc: dict, resolve: Callable[[str], CosetTable]) -> "TvElement":
        if doc.get("schema") != TV_SCHEMA:
            raise ValueError(f"expected schema {TV_SCHEMA!r}, got {doc.get('schema')!r}")
        group = BraidGroup(doc["n"])
        table = resolve(doc["domain"])
        domain = SplitDomain(group, table, doc["q"])
        num, _, den = doc["scalar"].partition("/")
        return make_element(domain, Fraction(int(num), int(den or 1)), doc["phi"])


def _check_hom(domain: SplitDomain, phi: Sequence[int]) -> None:
    if not kills_relators(domain.presentation, phi):
        raise DomainError("phi does not kill the relators of the domain")
    if domain.table.evaluate(phi, domain.center_generator.letters) != 0:
        raise DomainError("phi is nonzero on the center of the domain")


def make_element(domain: SplitDomain, scalar: Fraction, phi: Sequence[int]) -> TvElement:
    phi = tuple(int(x) for x in phi)
    if len(phi) != len(domain.table.schreier_generators):
        raise ValueError("phi needs one value per Schreier generator")
    _check_hom(domain, phi)
    return TvElement(domain, Fraction(scalar), phi)


def make_simple_transvection(domain: SplitDomain, phi: Sequence[int]) -> TvElement:
    """g -> g z^phi(g)."""
    return make_element(domain, Fraction(1), phi)


@functools.lru_cache(maxsize=None)
def _scalar_domain(group: BraidGroup, q: int) -> SplitDomain:
    return split_refine(group, length_mod_subgroup(group, q * group.center_length))


def make_scalar(group: BraidGroup, p: int, q: int) -> TvElement:
    """The section of theta: identity on K-hat, z^q -> z^p."""
    require_commensurator_rank(group)
    if p == 0:
        raise ValueError("p = 0 is not injective on the center")
    if q < 1:
        raise ValueError("q must be positive")
    domain = _scalar_domain(group, q)
    return TvElement(domain, Fraction(p, q), (0,) * len(domain.table.schreier_generators))


def identity_element(group: BraidGroup) -> TvElement:
    return make_scalar(group, 1, 1)


def apply(e: TvElement, g: BraidWord) -> BraidWord:
    return g * g.group.z_power(e.exponent(g))


def theta(e: TvElement) -> Fraction:
    return e.scalar


def compose(a: TvElement, b: TvElement, limit: int = DEFAULT_COSET_LIMIT) -> TvElement:
    """a o b: apply b first."""
    group = a.group
    if b.group != group:
        raise ValueError("elements over different braid groups")
    unit = group.center_length
    ta, tb = a.domain.table, b.domain.table
    common = intersect(ta, tb, limit)
    # keep only g with b(g) in a's domain
    phib = restrict_hom(b.phi, tb, common)
    values = []
    for w, v in zip(common.schreier_generators, phib):
        e = v + b.scalar * Fraction(length_of(w), unit)
        values.append(int(e) % a.domain.q)
    domain = split_refine(group, cyclic_cover(common, values, a.domain.q), limit)
    pa = restrict_hom(a.phi, ta, domain.table)
    pb = restrict_hom(b.phi, tb, domain.table)
    phi = []
    for x, y in zip(pa, pb):
        v = x + a.scalar * y
        if v.denominator != 1:
            raise ArithmeticError("composite is not integral on the refined domain")
        phi.append(int(v))
    return TvElement(domain, a.scalar * b.scalar, tuple(phi))


def power(e: TvElement, k: int, limit: int = DEFAULT_COSET_LIMIT) -> TvElement:
    if k < 1:
        raise ValueError("only positive powers are supported")
    out = e
    for _ in range(k - 1):
        out = compose(out, e, limit)
    return out


def common_refinement(a: TvElement, b: TvElement, limit: int = DEFAULT_COSET_LIMIT) -> SplitDomain:
    if a.domain == b.domain:
        return a.domain
    return split_refine(a.group, intersect(a.domain.table, b.domain.table, limit), limit)


def restrict_element(e: TvElement, domain: SplitDomain) -> TvElement:
    """The same commensurator element on a smaller split domain."""
    return TvElement(domain, e.scalar, restrict_hom(e.phi, e.domain.table, domain.table))


def equivalent(a: TvElement, b: TvElement, limit: int = DEFAULT_COSET_LIMIT) -> bool:
    if a.scalar != b.scalar:
        return False
    domain = common_refinement(a, b, limit)
    return restrict_element(a, domain).phi == restrict_element(b, domain).phi


def divide(e: TvElement, q: int) -> TvElement:
    """A simple transvection e' with e'^q equivalent to e (e must be simple)."""
    from .abelian import divide_hom

    if e.scalar != 1:
        raise ValueError("only simple transvections are divided")
    table, phi = divide_hom(e.phi, e.domain.table, q)
    domain = split_refine(e.group, table)
    return TvElement(domain, Fraction(1), restrict_hom(phi, table, domain.table))


def scale_simple(e: TvElement, r: Fraction) -> TvElement:
    """The simple transvection r * phi, passing to a subgroup where it is integral."""
    r = Fraction(r)
    if e.scalar != 1:
        raise ValueError("expected a simple transvection")
    d = divide(e, r.denominator) if r.denominator > 1 else e
    return TvElement(d.domain, Fraction(1), tuple(r.numerator * x for x in d.phi))


def center_free_homs(domain: SplitDomain) -> list[tuple[int, ...]]:
    """Integer basis of {phi in Hom(G, Z) : phi(z^q) = 0}."""
    basis = hom_basis(domain.presentation).basis
    if not basis:
        return []
    z = domain.center_generator.letters
    on_center = [domain.table.evaluate(v, z) for v in basis]
    coeffs = integer_kernel(IntMatrix.from_rows([on_center], len(basis)))
    out = []
    for c in coeffs:
        out.append(tuple(sum(ci * v[j] for ci, v in zip(c, basis)) for j in range(len(basis[0]))))
    return out


# -- automorphisms ------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class BraidAut:
    """A composite of inner automorphisms and the inversion s_i -> s_i^-1.

    ``steps`` are applied left to right; each is ("inner", letters) for
    g -> w g w^-1, or ("eps",).
    """

    steps: tuple[tuple, ...] = ()

    @classmethod
    def inner(cls, w: BraidWord) -> "BraidAut":
        return cls((("inner", w.letters),))

    @classmethod
    def eps(cls) -> "BraidAut":
        return cls((("eps",),))

    def then(self, other: "BraidAut") -> "BraidAut":
        return BraidAut(self.steps + other.steps)

    def inverse(self) -> "BraidAut":
        out = []
        for step in reversed(self.steps):
            out.append(("inner", inverse(step[1])) if step[0] == "inner" else step)
        return BraidAut(tuple(out))

    @property
    def center_sign(self) -> int:
        """alpha(z) = z^sign."""
        return -1 if sum(1 for s in self.steps if s[0] == "eps") % 2 else 1

    def letters(self, word: Sequence[int]) -> tuple[int, ...]:
        out = tuple(word)
        for step in self.steps:
            if step[0] == "inner":
                out = free_reduce(step[1] + out + inverse(step[1]))
            else:
                out = tuple(-x for x in out)
        return out

    def __call__(self, w: BraidWord) -> BraidWord:
        return w.group.word(self.letters(w.letters))


def transport_table(alpha: BraidAut, t: CosetTable) -> CosetTable:
    """Coset table of alpha(G) from that of G."""
    back = alpha.inverse()
    images = [back.letters((k,)) for k in range(1, t.presentation.generators + 1)]
    return table_from_action(t.presentation, lambda c, k: t.trace(images[k - 1], c), 0)


def aut_act(alpha: BraidAut, e: TvElement) -> TvElement:
    """The conjugate alpha o e o alpha^-1."""
    back = alpha.inverse()
    table = transport_table(alpha, e.domain.table)
    domain = SplitDomain(e.group, table, e.domain.q)
    sign = alpha.center_sign
    phi = tuple(sign * e.domain.table.evaluate(e.phi, back.letters(w)) for w in table.schreier_generators)
    return TvElement(domain, e.scalar, phi)
