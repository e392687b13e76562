"""Braid groups, coset enumeration, abelianization and transvections of braid group commensurators."""

from .braid import BraidGroup, BraidWord, equal, normal_form
from .fpgroups import CosetTable, Presentation, reidemeister_schreier, todd_coxeter
from .abelian import betti_number, hom_basis, smith_normal_form
from .commensurator import (
    TvElement,
    compose,
    equivalent,
    make_scalar,
    make_simple_transvection,
    split_refine,
    theta,
)

__all__ = [
    "BraidGroup",
    "BraidWord",
    "CosetTable",
    "Presentation",
    "TvElement",
    "betti_number",
    "compose",
    "equal",
    "equivalent",
    "hom_basis",
    "make_scalar",
    "make_simple_transvection",
    "normal_form",
    "reidemeister_schreier",
    "smith_normal_form",
    "split_refine",
    "theta",
    "todd_coxeter",
]
