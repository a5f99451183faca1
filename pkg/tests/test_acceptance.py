"""Acceptance criteria 1-10, one test each.

Each test records a ``criterion N: PASS|FAIL`` line that is printed in the
terminal summary (and by running this file directly).
"""

from __future__ import annotations

import json
import time
from functools import lru_cache

import pytest

import oracles
from conftest import ACCEPTANCE_LINES, FIXTURES
from exactss.cli import main
from exactss.complexes import cohomology, stupid_filtration, total_complex
from exactss.cosimplicial import (
    bar_cosimplicial_complex,
    constant_cosimplicial,
    cosimplicial_complex_from_group,
    cube_from_cosimplicial,
    cube_holim,
    cyclic_group,
    moore_complex,
    normalized_complex,
    product_group,
    random_cosimplicial_complex,
    to_double,
)
from exactss.decalage import (
    dec,
    dec_double,
    gamma,
    random_filtered_instance,
    verify_comparison,
    verify_postnikov_tot,
    worked_bicomplex,
)
from exactss.specseq import (
    check_convergence,
    compare_pages,
    pages,
    pages_from_couple,
    reindex,
)
from exactss.zlinalg import (
    InvariantFactors,
    Lattice,
    Subquotient,
    kernel_lattice,
    lattice_image,
    lattice_intersect,
)

N_FILTERED = 200
N_COSIMPLICIAL = 100
N_POSTNIKOV = 50


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE_LINES[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[n])


@lru_cache(maxsize=None)
def filtered_instances():
    return [random_filtered_instance(s) for s in range(N_FILTERED)]


def demo_complexes():
    """The cosimplicial inputs the demos are built from, at modest tops."""
    C2, C3, C4 = cyclic_group(2), cyclic_group(3), cyclic_group(4)
    V4 = product_group(C2, C2)
    return {
        "C2;Z": bar_cosimplicial_complex(C2, 0, 4),
        "C3;Z": bar_cosimplicial_complex(C3, 0, 4),
        "C4;Z": bar_cosimplicial_complex(C4, 0, 3),
        "C2;Z/2": bar_cosimplicial_complex(C2, 2, 4),
        "C4;Z/2": bar_cosimplicial_complex(C4, 2, 3),
        "V4;Z/2": bar_cosimplicial_complex(V4, 2, 3),
        "constant": cosimplicial_complex_from_group(constant_cosimplicial(1, 3)),
    }


def invs(C, ks):
    return [cohomology(C, k).invariants() for k in ks]


# ---------------------------------------------------------------------------


def test_criterion_01_decalage_comparison():
    t = time.perf_counter()
    bad = []
    checks = 0
    for inst in filtered_instances():
        rep = verify_comparison(inst.filtered)
        checks += len(rep.checks)
        if not rep.passed:
            bad.append((inst.seed, rep.counterexample))
    dt = time.perf_counter() - t
    ok = not bad and dt < 60
    record(1, ok, f"{N_FILTERED} instances, {checks} (p,q,r) checks, {dt:.1f}s; failures {bad[:3]}")
    assert ok


def test_criterion_02_dec_of_stupid_equals_blockwise():
    filtered_instances()
    t = time.perf_counter()
    bad = [inst.seed for inst in filtered_instances()
           if not dec(stupid_filtration(inst.bicomplex)).same_lattices(dec_double(inst.bicomplex))]
    dt = time.perf_counter() - t
    ok = not bad and dt < 10
    record(2, ok, f"{N_FILTERED} instances, {dt:.1f}s; mismatches {bad[:5]}")
    assert ok


def test_criterion_03_dual_engines():
    bad = []
    for inst in filtered_instances():
        F = inst.filtered
        R = F.width + 2
        problems = compare_pages(pages(F, R), pages_from_couple(F, R))
        if problems:
            bad.append((inst.seed, problems[0]))
    record(3, not bad, f"{N_FILTERED} instances; mismatches {bad[:3]}")
    assert not bad


def test_criterion_04_convergence():
    bad = []
    for inst in filtered_instances():
        problems = check_convergence(inst.filtered)
        if problems:
            bad.append((inst.seed, problems[0]))
    record(4, not bad, f"{N_FILTERED} instances; failures {bad[:3]}")
    assert not bad


def test_criterion_05_worked_fixture():
    K = worked_bicomplex()
    F = stupid_filtration(K)
    E = pages(F, 2)
    G = dec(F)
    got = {
        "E1(F)": E[0].table(),
        "E2(F)": E[1].table(),
        "E1(Dec)": pages(G, 1)[0].table(),
        "Dec lattices": {(p, n): G.F(p, n).rank for p in (0, 1) for n in (0, 1)},
    }
    Z, Z2 = InvariantFactors(1), InvariantFactors(0, (2,))
    expected = {
        "E1(F)": {(0, 0): Z, (1, 0): Z},
        "E2(F)": {(1, 0): Z2},
        "E1(Dec)": {(0, 1): Z2},
        "Dec lattices": {(0, 0): 1, (0, 1): 1, (1, 0): 0, (1, 1): 0},
    }
    g = gamma(F, 1, 0, 1)
    d1 = E[0].differentials[(0, 0)]
    ok = (got == expected and g.is_iso() and g.dom.invariants() == Z2
          and d1.image().invariants() == Z and d1.is_injective())
    record(5, ok, "E_2^{1,0}(F) = Z/2, E_1^{0,1}(Dec) = Z/2, γ_1 iso")
    assert ok


def _layer_cohomology(K, n, k):
    """``H^k`` of the kernel of ``Tot_{(n)} -> Tot_{(n-1)}`` (column ``n`` inside Tot)."""
    Kn = K.columns_upto(n)
    T = total_complex(Kn)

    def column(m):
        off, size = Kn.offsets(m).get(n, (0, 0))
        return Lattice.span(T.rank(m), ({off + j: 1} for j in range(size)))

    L, Lprev = column(k), column(k - 1)
    Z = lattice_intersect(kernel_lattice(T.diff(k)), L)
    B = lattice_image(T.diff(k - 1), Lprev)
    return Subquotient(Z, B).invariants()


def _cosimplicial_laws(CC) -> list[str]:
    problems = []
    for b in range(CC.bmin, CC.bmax + 1):
        G = CC.groups[b]
        # the top degree of a truncated object sees no coface out of it
        ks = range(G.top)
        if invs(normalized_complex(G), ks) != invs(moore_complex(G), ks):
            problems.append(f"normalized vs Moore, internal degree {b}")
    K = to_double(CC)
    for n in range(CC.top + 1):
        ks = range(CC.bmin - 1, n + CC.bmax + 2)
        col = K.column(n)
        for k in ks:
            if _layer_cohomology(K, n, k) != cohomology(col, k - n).invariants():
                problems.append(f"layer law n={n} k={k}")
        tot = invs(total_complex(K.columns_upto(n)), ks)
        D = cube_from_cosimplicial(CC, n)
        for strategy in ("direct", "recursive"):
            if invs(cube_holim(D, strategy), ks) != tot:
                problems.append(f"cube law ({strategy}) n={n}")
    return problems


def test_criterion_06_cosimplicial_laws():
    t = time.perf_counter()
    bad = []
    for s in range(N_COSIMPLICIAL):
        problems = _cosimplicial_laws(random_cosimplicial_complex(s))
        if problems:
            bad.append((s, problems[0]))
    for name, CC in demo_complexes().items():
        problems = _cosimplicial_laws(CC)
        if problems:
            bad.append((name, problems[0]))
    dt = time.perf_counter() - t
    ok = not bad and dt < 60
    record(6, ok, f"{N_COSIMPLICIAL} random + {len(demo_complexes())} demo objects, {dt:.1f}s; "
                  f"failures {bad[:3]}")
    assert ok


def test_criterion_07_group_cohomology():
    t = time.perf_counter()
    bad = []
    for m in (2, 3, 4):
        CC = bar_cosimplicial_complex(cyclic_group(m), 0, 6)
        T = total_complex(to_double(CC))
        for k in range(6):
            got = cohomology(T, k).invariants()
            r, tors = oracles.cyclic_cohomology(m, 0, k)
            if got != InvariantFactors(r, tors):
                bad.append((f"Z/{m}", k, str(got)))
    V4 = product_group(cyclic_group(2), cyclic_group(2))
    T = total_complex(to_double(bar_cosimplicial_complex(V4, 2, 6)))
    for k in range(5):
        got = cohomology(T, k).invariants()
        want = oracles.elementary_abelian_dims(k, 2)
        if got != InvariantFactors(0, (2,) * want):
            bad.append(("V4", k, str(got)))
    dt = time.perf_counter() - t
    ok = not bad and dt < 30
    record(7, ok, f"Z/2, Z/3, Z/4 with Z coefficients k <= 5; V4 with Z/2 k <= 4; {dt:.1f}s; "
                  f"mismatches {bad[:3]}")
    assert ok


def test_criterion_08_index_arithmetic():
    bad = []
    for p in range(-20, 21):
        for q in range(-20, 21):
            for r in range(1, 11):
                lhs = reindex("AH_TO_AN", p, q, r)
                rhs = reindex("CE_TO_BK", *reindex("DEC_REINDEX", *reindex("AH_TO_DEC", p, q, r)))
                if lhs != rhs:
                    bad.append((p, q, r, lhs, rhs))
            if reindex("AH_TO_AN", p, q, 1) != (3 * p + q, 2 * p, 3):
                bad.append((p, q, 1))
    record(8, not bad, f"grid |p|,|q| <= 20, 1 <= r <= 10; mismatches {bad[:3]}")
    assert not bad


def test_criterion_09_postnikov_then_tot():
    t = time.perf_counter()
    bad = []
    for name, CC in demo_complexes().items():
        rep = verify_postnikov_tot(CC)
        if not rep.passed:
            bad.append((name, rep.counterexample))
    for s in range(N_POSTNIKOV):
        rep = verify_postnikov_tot(random_cosimplicial_complex(1000 + s))
        if not rep.passed:
            bad.append((s, rep.counterexample))
    dt = time.perf_counter() - t
    ok = not bad and dt < 60
    record(9, ok, f"{len(demo_complexes())} demo + {N_POSTNIKOV} random objects, {dt:.1f}s; "
                  f"failures {bad[:3]}")
    assert ok


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_criterion_10_negative_inputs(tmp_path, capsys):
    results = {}
    dd = tmp_path / "dd.json"
    dd.write_text(json.dumps({"schema": 1, "type": "filtered_complex", "lo": 0,
                              "ranks": [1, 1, 1], "d": {"0": [["1"]], "1": [["1"]]},
                              "pmin": 0, "pmax": 1}))
    code, _, err = _run(["pages", str(dd)], capsys)
    results["d∘d ≠ 0"] = code == 2 and "/d/1" in err and "degree 0 to 2" in err

    broken = tmp_path / "broken.json"
    broken.write_text('{"schema": 1, "type": ')
    code, _, err = _run(["pages", str(broken)], capsys)
    results["bad JSON"] = code == 2 and "line 1" in err

    cos = tmp_path / "cos.json"
    cos.write_text(json.dumps({"schema": 1, "type": "cosimplicial_abelian", "top": 1,
                               "ranks": [1, 1], "coface": {"1,0": [["1"]], "1,1": [["1"]]},
                               "codeg": {"0,0": [["2"]]}}))
    code, _, err = _run(["tot", str(cos)], capsys)
    results["cosimplicial identity"] = code == 2 and "/codeg/0,0" in err and "s^0d^0" in err

    code, out, _ = _run(["decalage", str(FIXTURES / "worked_corrupted_dec.json")], capsys)
    cx = json.loads(out)["counterexample"] if code == 1 else None
    results["corrupted Dec fixture"] = code == 1 and cx is not None and {"p", "q", "r"} <= set(cx)

    code, out, _ = _run(["decalage", str(FIXTURES / "worked_bicomplex.json"), "--inject-fault"],
                        capsys)
    results["decalage fault"] = code == 1 and json.loads(out)["passed"] is False

    code, out, _ = _run(["verify", "--seed", "3", "--trials", "4", "--inject-fault"], capsys)
    results["verify fault"] = code == 1 and "FAIL" in out

    code, _, err = _run(["demo", "no-such-demo"], capsys)
    results["unknown demo"] = code == 2 and "no-such-demo" in err

    failed = [k for k, v in results.items() if not v]
    record(10, not failed, f"{len(results)} negative cases; unexpected outcomes {failed}")
    assert not failed


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
