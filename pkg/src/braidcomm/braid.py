"""
Braid words and the left Garside normal form.

A braid word is a tuple of signed generator indices: ``i`` stands for
sigma_i and ``-i`` for its inverse. The same encoding is used for words over
any finitely presented group in :mod:`braidcomm.fpgroups`, so braid words can
be traced through coset tables directly.

Permutation braids are stored as permutations in one-line notation,
``p[j]`` being the final position of the strand that starts at position ``j``
(0-based). The product "a then b" is ``(q[p[j]] for j)``.
"""

from __future__ import annotations

import dataclasses
import functools
import random
import re
from typing import Iterable, Optional, Sequence

Perm = tuple[int, ...]


class ContextMismatchError(ValueError):
    """Raised when words from braid groups with different strand counts meet."""


class WordParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# -- permutations -----------------------------------------------------------

def perm_mul(p: Perm, q: Perm) -> Perm:
    """Product "p then q"."""
    return tuple(q[x] for x in p)


def perm_inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for j, x in enumerate(p):
        out[x] = j
    return tuple(out)


def transposition(n: int, i: int) -> Perm:
    """Image of sigma_i: swaps positions i-1 and i."""
    p = list(range(n))
    p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def starting_set(p: Perm) -> frozenset[int]:
    """Generators sigma_i that left-divide the permutation braid ``p``."""
    return frozenset(i for i in range(1, len(p)) if p[i - 1] > p[i])


def finishing_set(p: Perm) -> frozenset[int]:
    """Generators sigma_i that right-divide the permutation braid ``p``."""
    return starting_set(perm_inverse(p))


def _swap_values(p: Perm, i: int) -> Perm:
    # p * s_i
    return tuple(i if x == i - 1 else i - 1 if x == i else x for x in p)


def _swap_positions(p: Perm, i: int) -> Perm:
    # s_i^-1 * p
    q = list(p)
    q[i - 1], q[i] = q[i], q[i - 1]
    return tuple(q)


@functools.lru_cache(maxsize=None)
def _slide(a: Perm, b: Perm) -> tuple[Perm, Perm]:
    """Make the pair (a, b) left-weighted by moving atoms from b into a."""
    while True:
        fin = finishing_set(a)
        movable = [i for i in starting_set(b) if i not in fin]
        if not movable:
            return a, b
        i = movable[0]
        a = _swap_values(a, i)
        b = _swap_positions(b, i)


@functools.lru_cache(maxsize=None)
def _flip(p: Perm) -> Perm:
    # conjugation by the half twist
    n = len(p)
    return tuple(n - 1 - p[n - 1 - j] for j in range(n))


def permutation_braid_word(p: Perm) -> tuple[int, ...]:
    """A positive Artin word (reduced word) for the permutation braid ``p``."""
    letters = []
    while True:
        s = starting_set(p)
        if not s:
            return tuple(letters)
        i = min(s)
        letters.append(i)
        p = _swap_positions(p, i)


# -- words ------------------------------------------------------------------

def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclasses.dataclass(frozen=True)
class BraidGroup:
    """Context object carrying the strand count ``n``."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"braid groups need n >= 2 strands, got {self.n}")

    @property
    def center_length(self) -> int:
        """L(z) = n(n-1)."""
        return self.n * (self.n - 1)

    @property
    def identity_perm(self) -> Perm:
        return tuple(range(self.n))

    @property
    def delta_perm(self) -> Perm:
        return tuple(range(self.n - 1, -1, -1))

    def word(self, letters: Iterable[int] = ()) -> "BraidWord":
        return BraidWord(self, tuple(letters))

    def sigma(self, i: int, sign: int = 1) -> "BraidWord":
        return BraidWord(self, (i if sign > 0 else -i,))

    @property
    def generators(self) -> list["BraidWord"]:
        return [self.sigma(i) for i in range(1, self.n)]

    @property
    def identity(self) -> "BraidWord":
        return BraidWord(self, ())

    @functools.cached_property
    def z(self) -> "BraidWord":
        """The full twist (sigma_1 ... sigma_{n-1})^n generating the center."""
        return BraidWord(self, tuple(range(1, self.n)) * self.n)

    def z_power(self, k: int) -> "BraidWord":
        base = tuple(range(1, self.n)) if k >= 0 else tuple(-i for i in range(self.n - 1, 0, -1))
        return BraidWord(self, base * (self.n * abs(k)))

    @functools.cached_property
    def delta(self) -> "BraidWord":
        return BraidWord(self, permutation_braid_word(self.delta_perm))

    def parse(self, text: str) -> "BraidWord":
        """Parse ``s1s2S1`` style text (``S`` marks an inverse)."""
        letters = []
        pos = 0
        token = re.compile(r"([sS])(\d+)")
        text_len = len(text)
        while pos < text_len:
            if text[pos].isspace():
                pos += 1
                continue
            m = token.match(text, pos)
            if not m:
                raise WordParseError(f"unexpected character {text[pos]!r}", pos)
            i = int(m.group(2))
            if not 1 <= i < self.n:
                raise WordParseError(f"generator index {i} out of range for n={self.n}", pos)
            letters.append(i if m.group(1) == "s" else -i)
            pos = m.end()
        return BraidWord(self, tuple(letters))

    def random_word(self, length: int, rng: random.Random) -> "BraidWord":
        letters = [rng.choice((1, -1)) * rng.randrange(1, self.n) for _ in range(length)]
        return BraidWord(self, tuple(letters))


@dataclasses.dataclass(frozen=True)
class BraidWord:
    group: BraidGroup
    letters: tuple[int, ...]

    def __post_init__(self):
        n = self.group.n
        for x in self.letters:
            if x == 0 or abs(x) >= n:
                raise ValueError(f"letter {x} out of range for n={n}")

    @property
    def n(self) -> int:
        return self.group.n

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return multiply(self, other)

    def __pow__(self, k: int) -> "BraidWord":
        base = self if k >= 0 else self.inverse()
        return BraidWord(self.group, free_reduce(base.letters * abs(k)))

    def inverse(self) -> "BraidWord":
        return BraidWord(self.group, tuple(-x for x in reversed(self.letters)))

    def __str__(self) -> str:
        return "".join(f"s{x}" if x > 0 else f"S{-x}" for x in self.letters)


def _check_context(a: BraidWord, b: BraidWord) -> None:
    if a.group != b.group:
        raise ContextMismatchError(f"cannot mix B_{a.n} and B_{b.n}")


def multiply(a: BraidWord, b: BraidWord) -> BraidWord:
    """Concatenate and cancel adjacent inverse pairs."""
    _check_context(a, b)
    return BraidWord(a.group, free_reduce(a.letters + b.letters))


# -- Garside normal form -----------------------------------------------------

@dataclasses.dataclass(frozen=True)
class GarsideNormalForm:
    """Delta^inf * p_1 ... p_l with left-weighted simple factors."""

    n: int
    inf: int
    factors: tuple[Perm, ...]

    def to_word(self) -> tuple[int, ...]:
        group = BraidGroup(self.n)
        delta = permutation_braid_word(group.delta_perm)
        if self.inf >= 0:
            out = list(delta * self.inf)
        else:
            out = [-x for x in reversed(delta)] * (-self.inf)
        for p in self.factors:
            out.extend(permutation_braid_word(p))
        return tuple(out)

    def __str__(self) -> str:
        body = " ".join("".join(map(str, (x + 1 for x in p))) for p in self.factors)
        return f"D^{self.inf} [{body}]"


def _normal_form_letters(n: int, letters: Sequence[int]) -> GarsideNormalForm:
    identity = tuple(range(n))
    delta = tuple(range(n - 1, -1, -1))
    negatives = sum(1 for x in letters if x < 0)
    remaining = negatives
    inf = -negatives
    nf: list[Perm] = []
    for x in letters:
        if x > 0:
            p = transposition(n, x)
        else:
            remaining -= 1
            # Delta * sigma_i^-1 as a permutation braid
            s = transposition(n, -x)
            p = tuple(s[n - 1 - j] for j in range(n))
        if remaining % 2:
            p = _flip(p)
        nf.append(p)
        j = len(nf) - 2
        while j >= 0:
            a, b = _slide(nf[j], nf[j + 1])
            if a == nf[j]:
                break
            nf[j], nf[j + 1] = a, b
            j -= 1
        while nf and nf[0] == delta:
            nf.pop(0)
            inf += 1
        while nf and nf[-1] == identity:
            nf.pop()
    return GarsideNormalForm(n, inf, tuple(nf))


def normal_form(w: BraidWord) -> GarsideNormalForm:
    return _normal_form_letters(w.n, free_reduce(w.letters))


def canonical_word(w: BraidWord) -> BraidWord:
    """The word read off the normal form; a short representative of ``w``."""
    return BraidWord(w.group, free_reduce(normal_form(w).to_word()))


def is_identity(w: BraidWord) -> bool:
    nf = normal_form(w)
    return nf.inf == 0 and not nf.factors


def equal(u: BraidWord, v: BraidWord) -> bool:
    _check_context(u, v)
    return normal_form(u) == normal_form(v)


def commute(u: BraidWord, v: BraidWord) -> bool:
    return equal(u * v, v * u)


def permutation(w: BraidWord) -> Perm:
    """Image in the symmetric group; ``permutation(u*v) == perm_mul(permutation(u), permutation(v))``."""
    p = list(range(w.n))
    where = list(range(w.n))  # where[position] = strand
    for x in w.letters:
        i = abs(x)
        where[i - 1], where[i] = where[i], where[i - 1]
    for pos, strand in enumerate(where):
        p[strand] = pos
    return tuple(p)


def is_pure(w: BraidWord) -> bool:
    return permutation(w) == w.group.identity_perm


def length(w: BraidWord) -> int:
    """The length homomorphism L (exponent sum)."""
    return sum(1 if x > 0 else -1 for x in w.letters)


def center_power(w: BraidWord) -> Optional[int]:
    """``k`` with ``w = z^k`` in B_n, or None when ``w`` is not central."""
    total = length(w)
    unit = w.group.center_length
    if total % unit:
        return None
    k = total // unit
    nf = normal_form(w)
    # z^k = Delta^(2k)
    if nf.inf == 2 * k and not nf.factors:
        return k
    return None
