"""Command line interface.

Exit codes: 0 success, 1 a verification failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .complexes import (
    DoubleComplex,
    FilteredComplex,
    ValidationError,
    stupid_filtration,
    total_complex,
)
from .cosimplicial import (
    CosimplicialAbGroup,
    CosimplicialComplex,
    bar_cosimplicial_complex,
    cohomology_table,
    cosimplicial_complex_from_group,
    cube_from_cosimplicial,
    cube_holim,
    cyclic_group,
    product_group,
    to_double,
)
from .decalage import (
    dec,
    dec_double,
    gamma,
    random_filtered_instance,
    verify_comparison,
    worked_bicomplex,
)
from .modelio import FilteredModel, load
from .specseq import (
    BK,
    CE,
    check_convergence,
    compare_pages,
    convert_convention,
    pages,
    pages_from_couple,
    stabilization_index,
)
from .zlinalg import InvariantFactors

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

GROUPS = {
    "C2": lambda: cyclic_group(2),
    "C3": lambda: cyclic_group(3),
    "C4": lambda: cyclic_group(4),
    "V4": lambda: product_group(cyclic_group(2), cyclic_group(2)),
}


class InputError(Exception):
    """Bad command line input that argparse cannot see; exit code 2."""


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False)


def _group_json(inv: InvariantFactors) -> dict:
    return dict(inv.to_json(), text=str(inv))


# ---------------------------------------------------------------------------
# Loading helpers


def _filtered_input(path: str) -> FilteredModel:
    model = load(path)
    if isinstance(model, FilteredModel):
        return model
    if isinstance(model, DoubleComplex):
        return FilteredModel(stupid_filtration(model))
    # cosimplicial input: column filtration of its normalized bicomplex
    if isinstance(model, CosimplicialAbGroup):
        model = cosimplicial_complex_from_group(model)
    return FilteredModel(stupid_filtration(to_double(model)))


def _cosimplicial_input(path: str) -> CosimplicialComplex:
    model = load(path)
    if isinstance(model, CosimplicialAbGroup):
        return cosimplicial_complex_from_group(model)
    if isinstance(model, CosimplicialComplex):
        return model
    raise InputError(f"{path}: expected a cosimplicial_abelian or cosimplicial_complex model")


# ---------------------------------------------------------------------------
# Page tables


def page_table(F: FilteredComplex, r_max: int | None = None, convention: str = CE) -> dict:
    """Rows ``(r, p, q, group, image of d_r, stable)`` ordered by ``r, p, q``.

    An entry is stable once no later differential enters or leaves it.
    """
    if r_max is None:
        r_max = F.width + 1
    r_max = max(r_max, 1)
    # d_r vanishes once r reaches the filtration width
    plist = pages(F, max(r_max, F.width, 1))
    moving = set()
    for P in plist:
        for (p, q), h in P.differentials.items():
            if not h.is_zero():
                moving.add((P.r, p, q))
                moving.add((P.r, p + P.r, q - P.r + 1))
    last_move = {}
    for r, p, q in moving:
        last_move[(p, q)] = max(last_move.get((p, q), 0), r)
    out_pages = []
    for P in plist[:r_max]:
        shown = P if convention == CE else convert_convention(P)
        rows = []
        for (p, q), inv in shown.table().items():
            ce_q = q if convention == CE else -q
            img = P.d_rank(p, ce_q)
            rows.append({
                "p": p,
                "q": q,
                "group": _group_json(inv),
                "d_image": None if img.is_trivial() else _group_json(img),
                "target": list(shown.target(p, q)),
                "stable": P.r > last_move.get((p, ce_q), 0),
            })
        out_pages.append({"r": P.r, "rows": rows})
    return {
        "convention": convention,
        "r_max": r_max,
        "pages": out_pages,
        "stabilization": {str(n): r for n, r in sorted(stabilization_index(F, plist).items())},
    }


def page_table_tsv(table: dict) -> str:
    lines = [f"# convention {table['convention']}, pages 1..{table['r_max']}",
             "r\tp\tq\tgroup\td_r\tstable"]
    for page in table["pages"]:
        for row in page["rows"]:
            img = row["d_image"]["text"] if row["d_image"] else "-"
            lines.append(f"{page['r']}\t{row['p']}\t{row['q']}\t{row['group']['text']}\t{img}\t"
                         f"{'yes' if row['stable'] else 'no'}")
    return "\n".join(lines) + "\n"


def cohomology_report(command: str, groups: dict, extra: dict | None = None) -> dict:
    rep = {"command": command,
           "cohomology": [{"k": k, "group": _group_json(g)} for k, g in sorted(groups.items())]}
    if extra:
        rep.update(extra)
    return rep


def cohomology_tsv(rep: dict) -> str:
    head = [f"{k} {v}" for k, v in sorted(rep.items()) if k not in ("command", "cohomology")]
    lines = [f"# {rep['command']}" + (f" ({', '.join(head)})" if head else ""), "k\tH^k"]
    lines += [f"{row['k']}\t{row['group']['text']}" for row in rep["cohomology"]]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Faults


def shifted_dec(F: FilteredComplex) -> FilteredComplex:
    """Deliberately wrong décalage: ``Dec^{p+1}`` placed at index ``p``."""
    G = dec(F)
    return FilteredComplex(G.complex, G.pmin - 1, G.pmax - 1,
                           {(p - 1, n): L for (p, n), L in G.filt.items()})


def _comparison(F: FilteredComplex, r_max, claimed: FilteredComplex | None, fault: bool):
    G = shifted_dec(F) if fault else claimed
    rep = verify_comparison(F, r_max, G)
    if fault and rep.passed:
        # a fault that goes unnoticed must not read as success
        rep.fail(None, None, None, "injected fault was not detected")
    return rep


# ---------------------------------------------------------------------------
# Commands


def cmd_pages(args) -> int:
    model = _filtered_input(args.input)
    conv = CE if args.convention == "ce" else BK
    table = page_table(model.filtered, args.r_max, conv)
    if args.format == "json":
        _emit(_json(dict(command="pages", **table)))
    else:
        _emit(page_table_tsv(table))
    return EXIT_OK


def cmd_decalage(args) -> int:
    model = _filtered_input(args.input)
    F = model.filtered
    r_max = args.r_max if args.r_max is not None else F.width + 2
    rep = _comparison(F, r_max, model.dec, args.inject_fault)
    out = dict(rep.to_json(), command="decalage", r_max=r_max,
               pages_checked=sorted({c[2] for c in rep.checks}))
    _emit(_json(out))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _levels(CC: CosimplicialComplex, n: int | None) -> tuple[int, range]:
    if n is None:
        n = CC.top
    if not 0 <= n <= CC.top:
        raise InputError(f"--n {n} outside 0..{CC.top}")
    return n, range(CC.bmin, n + CC.bmax + 1)


def _print_cohomology(args, rep: dict):
    _emit(_json(rep) if args.format == "json" else cohomology_tsv(rep))


def cmd_tot(args) -> int:
    CC = _cosimplicial_input(args.input)
    n, degs = _levels(CC, args.n)
    T = total_complex(to_double(CC).columns_upto(n))
    _print_cohomology(args, cohomology_report("tot", cohomology_table(T, degs), {"n": n}))
    return EXIT_OK


def cmd_cube(args) -> int:
    CC = _cosimplicial_input(args.input)
    n, degs = _levels(CC, args.n)
    H = cube_holim(cube_from_cosimplicial(CC, n), args.strategy)
    _print_cohomology(args, cohomology_report("cube", cohomology_table(H, degs), {"n": n}))
    return EXIT_OK


def _parse_coeff(text: str) -> int:
    if text == "Z":
        return 0
    if text.startswith("Z/"):
        try:
            m = int(text[2:])
        except ValueError:
            m = 0
        if m >= 2:
            return m
    raise InputError(f"--coeff must be Z or Z/m with m >= 2, got {text!r}")


def group_cohomology(group: str, coeff: str, top: int) -> dict:
    """``H^k(G; A)`` for ``0 ≤ k`` below the truncation edge of ``Tot_{(top)}``."""
    if group not in GROUPS:
        raise InputError(f"--group must be one of {', '.join(GROUPS)}, got {group!r}")
    if top < 1:
        raise InputError("--top must be at least 1")
    m = _parse_coeff(coeff)
    CC = bar_cosimplicial_complex(GROUPS[group](), m, top)
    T = total_complex(to_double(CC))
    # columns above top would only reach total degrees >= top + 1 + bmin
    valid = range(0, top + CC.bmin)
    return cohomology_report("demo group-cohomology", cohomology_table(T, valid),
                             {"group": group, "coeff": coeff, "top": top})


def worked_narrative() -> str:
    K = worked_bicomplex()
    F = stupid_filtration(K)
    T = F.complex
    lines = ["Bicomplex K^{0,0} = Z --x2--> K^{1,0} = Z, stupid filtration by columns.",
             f"Tot: ranks {list(T.ranks)} in degrees {T.lo}..{T.hi}, d^0 = {T.diff(0).to_rows()}",
             "", "Pages of F (Cartan-Eilenberg):"]
    for P in pages(F, 3):
        groups = ", ".join(f"E_{P.r}^{{{p},{q}}} = {g}" for (p, q), g in P.table().items())
        lines.append(f"  r = {P.r}: {groups or '0'}")
    G = dec(F)
    lines += ["", "Dec F in degrees 0 and 1:"]
    for p in (0, 1):
        cells = []
        for n in (0, 1):
            L = G.F(p, n)
            cells.append(f"(Dec F)^{p} K^{n} = {'Z' if L.rank else '0'}")
        lines.append("  " + ", ".join(cells))
    same = G.same_lattices(dec_double(K))
    lines.append(f"  agrees with the blockwise formula on Tot: {'yes' if same else 'no'}")
    lines += ["", "Pages of Dec F:"]
    for P in pages(G, 2):
        groups = ", ".join(f"E_{P.r}^{{{p},{q}}} = {g}" for (p, q), g in P.table().items())
        lines.append(f"  r = {P.r}: {groups or '0'}")
    g = gamma(F, 1, 0, 1)
    lines += ["", f"gamma_1: E_1^{{0,1}}(Dec F) = {g.dom.invariants()} -> "
                  f"E_2^{{1,0}}(F) = {g.cod.invariants()}, isomorphism: "
                  f"{'yes' if g.is_iso() else 'no'}"]
    rep = verify_comparison(F)
    lines.append(f"comparison over all (p, q, r): {'pass' if rep.passed else 'FAIL'} "
                 f"({len(rep.checks)} checks)")
    return "\n".join(lines) + "\n"


def cmd_demo(args) -> int:
    if args.name == "group-cohomology":
        rep = group_cohomology(args.group, args.coeff, args.top)
        _print_cohomology(args, rep)
        return EXIT_OK
    if args.name == "worked-bicomplex":
        _emit(worked_narrative())
        return EXIT_OK
    raise InputError(f"unknown demo {args.name!r}; expected group-cohomology or worked-bicomplex")


def trial_seeds(seed: int, trials: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.randrange(2 ** 31) for _ in range(trials)]


def run_trial(s: int, size: int, r_max: int | None, fault: bool = False) -> dict:
    rng = random.Random(s)
    inst = random_filtered_instance(s, columns=rng.randint(1, size))
    F = inst.filtered
    R = r_max if r_max is not None else F.width + 2
    problems = []
    rep = _comparison(F, R, None, fault)
    if not rep.passed:
        cx = rep.counterexample
        problems.append(f"comparison: γ_{cx['r']} at (p, q) = ({cx['p']}, {cx['q']}): {cx['reason']}")
    if not dec(stupid_filtration(inst.bicomplex)).same_lattices(dec_double(inst.bicomplex)):
        problems.append("dec of the stupid filtration differs from the blockwise formula")
    A = pages(F, R)
    problems += [f"engines: {x}" for x in compare_pages(A, pages_from_couple(F, R))]
    problems += [f"convergence: {x}" for x in check_convergence(F)]
    return {"seed": s, "columns": inst.bicomplex.amax + 1, "width": F.width,
            "checks": len(rep.checks), "problems": problems}


def cmd_verify(args) -> int:
    if args.trials < 0 or args.size < 1:
        raise InputError("--trials must be >= 0 and --size >= 1")
    results = [run_trial(s, args.size, args.r_max, args.inject_fault)
               for s in trial_seeds(args.seed, args.trials)]
    failed = [r for r in results if r["problems"]]
    if args.format == "json":
        _emit(_json({"command": "verify", "seed": args.seed, "trials": results,
                     "passed": not failed, "failed": len(failed)}))
    else:
        lines = [f"# verify seed {args.seed}, {args.trials} trials"]
        for i, r in enumerate(results):
            status = "PASS" if not r["problems"] else "FAIL"
            lines.append(f"trial {i}\tseed {r['seed']}\tcolumns {r['columns']}\t"
                         f"checks {r['checks']}\t{status}")
            lines += [f"  {x}" for x in r["problems"]]
        lines.append(f"{'PASS' if not failed else 'FAIL'}: "
                     f"{len(results) - len(failed)}/{len(results)} trials passed")
        _emit("\n".join(lines))
    return EXIT_OK if not failed else EXIT_FAIL


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exactss", description="Exact spectral sequences over Z.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pages", help="page table of a filtered or double complex")
    p.add_argument("input")
    p.add_argument("--r-max", type=int)
    p.add_argument("--convention", choices=("ce", "bk"), default="ce")
    p.add_argument("--format", choices=("json", "tsv"), default="tsv")
    p.set_defaults(func=cmd_pages)

    p = sub.add_parser("decalage", help="check the décalage comparison maps")
    p.add_argument("input")
    p.add_argument("--r-max", type=int)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_decalage)

    for name, func, helptext in (("tot", cmd_tot, "cohomology of Tot_(n)"),
                                 ("cube", cmd_cube, "cohomology of the punctured-cube holim")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("input")
        p.add_argument("--n", type=int)
        p.add_argument("--format", choices=("json", "tsv"), default="tsv")
        if name == "cube":
            p.add_argument("--strategy", choices=("direct", "recursive"), default="direct")
        p.set_defaults(func=func)

    p = sub.add_parser("demo", help="built-in examples")
    p.add_argument("name")
    p.add_argument("--group", default="C2")
    p.add_argument("--coeff", default="Z")
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--format", choices=("json", "tsv"), default="tsv")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("verify", help="randomized décalage and convergence checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--size", type=int, default=6, help="maximal number of columns")
    p.add_argument("--r-max", type=int)
    p.add_argument("--format", choices=("json", "tsv"), default="tsv")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "r_max", None) is not None and args.r_max < 1:
            raise InputError("--r-max must be at least 1")
        return args.func(args)
    except ValidationError as exc:
        where = exc.where or "/"
        print(f"error: invalid input at {where}: {exc.reason}", file=sys.stderr)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
