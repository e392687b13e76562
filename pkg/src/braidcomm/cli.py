"""
Command-line front end.

Results go to stdout as JSON lines, progress and summaries to stderr.
Exit codes: 0 pass/true, 1 fail/false, 2 usage or parse error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bettilab, commensurator as cm, verify
from .abelian import betti_number
from .braid import BraidGroup, WordParseError, equal, normal_form
from .cache import CacheCorruptionError, TableCache
from .fpgroups import DEFAULT_COSET_LIMIT, CosetLimitError, CosetTable, intersect, reidemeister_schreier

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3
ENV_PREFIX = "BRAIDCOMM_"


class UsageError(Exception):
    pass


@dataclasses.dataclass
class RunConfig:
    n: int = 4
    coset_limit: int = DEFAULT_COSET_LIMIT
    sample_count: int = 100
    seed: int = 0
    cache_dir: Optional[Path] = None


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "braidcomm"


def _env(name: str, cast, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise UsageError(f"bad value for {ENV_PREFIX}{name}: {raw!r}") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def run_config(args: argparse.Namespace) -> RunConfig:
    """Flags win over BRAIDCOMM_* variables, which win over built-in defaults."""
    cfg = RunConfig(
        n=_env("N", int, 4),
        coset_limit=_env("COSET_LIMIT", int, DEFAULT_COSET_LIMIT),
        sample_count=_env("SAMPLES", int, 100),
        seed=_env("SEED", int, 0),
        cache_dir=_env("CACHE_DIR", Path, default_cache_dir()),
    )
    if args.n is not None:
        cfg.n = args.n
    if args.coset_limit is not None:
        cfg.coset_limit = args.coset_limit
    if args.samples is not None:
        cfg.sample_count = args.samples
    if args.seed is not None:
        cfg.seed = args.seed
    if args.cache_dir is not None:
        cfg.cache_dir = args.cache_dir
    if cfg.n < 2:
        raise UsageError(f"n must be at least 2, got {cfg.n}")
    return cfg


def _emit(doc) -> None:
    print(json.dumps(doc, sort_keys=True, separators=(",", ":")))


def _group(cfg: RunConfig, commensurator: bool = False) -> BraidGroup:
    group = BraidGroup(cfg.n)
    if commensurator:
        try:
            cm.require_commensurator_rank(group)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return group


# -- subgroups ------------------------------------------------------------------

def build_subgroup(kind: str, group: BraidGroup, cache: TableCache, limit: int) -> CosetTable:
    """K, PBn, Lmod:m, pullback:m, or an intersection such as K&PBn."""
    table = _build_subgroup(kind, group, cache, limit)
    if table.index > limit:
        raise CosetLimitError(f"{kind} has index {table.index}, above the coset limit {limit}")
    return table


def _build_subgroup(kind: str, group: BraidGroup, cache: TableCache, limit: int) -> CosetTable:
    if "&" in kind:
        parts = kind.split("&")
        table = _build_subgroup(parts[0], group, cache, limit)
        for part in parts[1:]:
            other = _build_subgroup(part, group, cache, limit)
            table = cache.build(group.n, "intersect", {"tables": [table.digest, other.digest]},
                                lambda: intersect(table, other, limit))
        return table
    name, _, arg = kind.partition(":")
    if name == "K" and not arg:
        return cache.build(group.n, "K", {}, lambda: cm.subgroup_K(group))
    if name == "PBn" and not arg:
        return cache.build(group.n, "PBn", {}, lambda: bettilab.pure_braid_subgroup(group))
    if name in ("Lmod", "pullback") and arg:
        try:
            m = int(arg)
        except ValueError:
            raise UsageError(f"bad parameter in subgroup kind {kind!r}") from None
        if m < 1:
            raise UsageError("subgroup parameter must be positive")
        if name == "Lmod":
            return cache.build(group.n, "Lmod", {"m": m}, lambda: cm.length_mod_subgroup(group, m))
        if group.n < 3:
            raise UsageError("pullback subgroups need n >= 3")
        return cache.build(
            group.n, "pullback", {"m": m},
            lambda: bettilab.pullback_subgroup(group, bettilab.f2_finite_index_subgroup(m)),
        )
    raise UsageError(f"unknown subgroup kind {kind!r}; expected K, PBn, Lmod:m, pullback:m or A&B")


def cmd_nf(args, cfg: RunConfig) -> int:
    w = BraidGroup(cfg.n).parse(args.word)
    nf = normal_form(w)
    _emit({"n": cfg.n, "inf": nf.inf, "factors": [list(p) for p in nf.factors], "normal_form": str(nf)})
    return EXIT_OK


def cmd_eq(args, cfg: RunConfig) -> int:
    group = BraidGroup(cfg.n)
    result = equal(group.parse(args.word1), group.parse(args.word2))
    _emit({"n": cfg.n, "equal": result})
    return EXIT_OK if result else EXIT_FALSE


def cmd_subgroup(args, cfg: RunConfig, cache: TableCache) -> int:
    group = _group(cfg)
    table = build_subgroup(args.kind, group, cache, cfg.coset_limit)
    doc = {"n": cfg.n, "kind": args.kind, "index": table.index, "table": table.digest}
    if args.emit_presentation or args.betti:
        sp = reidemeister_schreier(table)
        doc["generators"] = sp.generators
        doc["relators"] = len(sp.relators)
        if args.emit_presentation:
            doc["presentation"] = sp.presentation.to_json()
        if args.betti:
            doc["b1"] = betti_number(sp)
    _emit(doc)
    return EXIT_OK


# -- transvections -----------------------------------------------------------------

def _read_element(source: str, cache: TableCache) -> cm.TvElement:
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip().startswith("{"):
        text = source
    else:
        text = Path(source).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed element: {exc}") from None
    try:
        return cm.TvElement.from_json(doc, cache.get)
    except KeyError as exc:
        raise UsageError(f"element refers to an unknown table: {exc}") from None


def _emit_element(e: cm.TvElement, cache: TableCache) -> None:
    cache.put(e.domain.table)
    _emit(e.to_json())


def _aut(args, group: BraidGroup) -> cm.BraidAut:
    alpha = cm.BraidAut()
    for step in args.steps:
        if step == "eps":
            alpha = alpha.then(cm.BraidAut.eps())
        elif step.startswith("inner:"):
            alpha = alpha.then(cm.BraidAut.inner(group.parse(step[len("inner:"):])))
        else:
            raise UsageError(f"bad automorphism step {step!r}; expected eps or inner:WORD")
    return alpha


def cmd_tv(args, cfg: RunConfig, cache: TableCache) -> int:
    group = _group(cfg, commensurator=True)
    limit = cfg.coset_limit
    op = args.tv_command
    if op == "make-simple":
        domain = cm.split_refine(group, build_subgroup(args.domain, group, cache, limit), limit)
        basis = cm.center_free_homs(domain)
        if args.phi is not None:
            phi = args.phi
        else:
            coeffs = args.coeffs or ()
            if len(coeffs) != len(basis):
                raise UsageError(f"domain has {len(basis)} center-free homomorphisms; got {len(coeffs)} coefficients")
            phi = [sum(c * v[j] for c, v in zip(coeffs, basis)) for j in range(len(domain.table.schreier_generators))]
        _emit_element(cm.make_simple_transvection(domain, phi), cache)
    elif op == "make-scalar":
        _emit_element(cm.make_scalar(group, args.p, args.q), cache)
    elif op == "apply":
        e = _read_element(args.element, cache)
        _emit({"word": str(cm.apply(e, e.group.parse(args.word)))})
    elif op == "compose":
        a, b = _read_element(args.a, cache), _read_element(args.b, cache)
        _emit_element(cm.compose(a, b, limit), cache)
    elif op == "theta":
        r = cm.theta(_read_element(args.element, cache))
        _emit({"theta": f"{r.numerator}/{r.denominator}"})
    elif op == "equiv":
        result = cm.equivalent(_read_element(args.a, cache), _read_element(args.b, cache), limit)
        _emit({"equivalent": result})
        return EXIT_OK if result else EXIT_FALSE
    elif op == "aut":
        e = _read_element(args.element, cache)
        _emit_element(cm.aut_act(_aut(args, e.group), e), cache)
    return EXIT_OK


# -- verification ------------------------------------------------------------------

def cmd_verify(args, cfg: RunConfig) -> int:
    vcfg = verify.Config(
        n=cfg.n,
        samples=cfg.sample_count,
        seed=cfg.seed,
        coset_limit=cfg.coset_limit,
        m_list=args.m if args.m else verify.Config.m_list,
    )
    if args.suite not in ("p1", "betti-growth"):
        _group(cfg, commensurator=True)
    failed = 0
    records = verify.run_suite(args.suite, vcfg)
    for rec in records:
        _emit(rec)
        failed += not rec["pass"]
    print(f"{len(records) - failed}/{len(records)} checks passed", file=sys.stderr)
    return EXIT_OK if failed == 0 else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="number of strands (default 4)")
    common.add_argument("--coset-limit", type=int, default=None, help="maximum cosets during enumeration")
    common.add_argument("--samples", type=int, default=None, help="random samples per check (default 100)")
    common.add_argument("--seed", type=int, default=None, help="sampling seed (default 0)")
    common.add_argument("--cache-dir", type=Path, default=None, help="directory for cached coset tables")

    parser = argparse.ArgumentParser(prog="braidcomm", description="Braid groups, their finite-index subgroups and transvections.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nf", parents=[common], help="Garside normal form of a word")
    p.add_argument("word", help="word such as s1s2S1 (S = inverse)")

    p = sub.add_parser("eq", parents=[common], help="decide equality of two words")
    p.add_argument("word1")
    p.add_argument("word2")

    p = sub.add_parser("subgroup", parents=[common], help="build a finite-index subgroup")
    p.add_argument("kind", help="K, PBn, Lmod:m, pullback:m, or an intersection like K&PBn")
    p.add_argument("--emit-presentation", action="store_true")
    p.add_argument("--betti", action="store_true")

    p = sub.add_parser("tv", help="transvection elements")
    tv = p.add_subparsers(dest="tv_command", required=True)
    q = tv.add_parser("make-simple", parents=[common], help="simple transvection on a subgroup")
    q.add_argument("--domain", default="K", help="subgroup kind (default K)")
    group = q.add_mutually_exclusive_group()
    group.add_argument("--coeffs", type=_int_list, help="coefficients in the center-free Hom basis")
    group.add_argument("--phi", type=_int_list, help="values on the Schreier generators")
    q = tv.add_parser("make-scalar", parents=[common], help="z^q -> z^p, identity on the complement")
    q.add_argument("p", type=int)
    q.add_argument("q", type=int)
    q = tv.add_parser("apply", parents=[common], help="image of a word")
    q.add_argument("element", help="element JSON, a file holding it, or - for stdin")
    q.add_argument("word")
    q = tv.add_parser("compose", parents=[common], help="a o b (b applied first)")
    q.add_argument("a")
    q.add_argument("b")
    q = tv.add_parser("theta", parents=[common], help="scalar part p/q")
    q.add_argument("element")
    q = tv.add_parser("equiv", parents=[common], help="do two elements agree on a common subgroup")
    q.add_argument("a")
    q.add_argument("b")
    q = tv.add_parser("aut", parents=[common], help="conjugate by an automorphism")
    q.add_argument("element")
    q.add_argument("steps", nargs="+", help="eps or inner:WORD, applied left to right")

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", default="all", choices=verify.SUITES + ("all",))
    p.add_argument("--m", type=_int_list, default=None, help="free-subgroup indices for betti-growth, e.g. 1,2,3,4")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = run_config(args)
        cache = TableCache(cfg.cache_dir)
        if args.command == "nf":
            return cmd_nf(args, cfg)
        if args.command == "eq":
            return cmd_eq(args, cfg)
        if args.command == "subgroup":
            return cmd_subgroup(args, cfg, cache)
        if args.command == "tv":
            return cmd_tv(args, cfg, cache)
        return cmd_verify(args, cfg)
    except WordParseError as exc:
        print(f"parse error at position {exc.position}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CosetLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (CacheCorruptionError, cm.DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
