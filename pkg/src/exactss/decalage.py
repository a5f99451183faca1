"""Décalage of a filtration and the comparison with the original spectral sequence.

``(Dec F)^p K^n = F^{p+n} K^n ∩ d^{-1}(F^{p+n+1} K^{n+1})``.  Its page ``E_r^{p,q}``
is compared with ``E_{r+1}^{2p+q,-p}`` of ``F`` through the map induced by the
identity on chains.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .complexes import (
    CochainComplex,
    DoubleComplex,
    FilteredComplex,
    stupid_filtration,
    total_complex,
)
from .cosimplicial import (
    CosimplicialComplex,
    _inverse_unimodular,
    _random_unimodular,
    random_double_complex,
    termwise_truncation_with_inclusions,
    to_double,
    normalized_basis,
)
from .modelio import dump_model
from .specseq import _Lattices, pages, reindex
from .zlinalg import (
    ContainmentError,
    IntMatrix,
    Lattice,
    Subquotient,
    SubquotientHom,
    induced_hom,
    kernel_lattice,
    lattice_intersect,
    lattice_preimage,
)


def dec(F: FilteredComplex) -> FilteredComplex:
    """Deligne's shifted filtration on the same complex."""
    C = F.complex
    if C.is_zero():
        return FilteredComplex(C, 0, 0, {})
    pmin = F.pmin - C.hi - 1
    pmax = F.pmax - C.lo
    filt = {}
    for n in C.degrees():
        d = C.diff(n)
        for p in range(pmin + 1, pmax):
            filt[(p, n)] = lattice_intersect(F.F(p + n, n),
                                             lattice_preimage(d, F.F(p + n + 1, n + 1)))
    return FilteredComplex(C, pmin, pmax, filt)


def dec_double(K: DoubleComplex) -> FilteredComplex:
    """Blockwise formula on ``Tot(K)``: ``K^{a,b}`` for ``b < -p``, ``ker d2`` for
    ``b = -p`` and ``0`` for ``b > -p``."""
    T = total_complex(K)
    if T.is_zero():
        return FilteredComplex(T, 0, 0, {})
    pmin, pmax = -K.bmax - 1, -K.bmin + 1
    filt = {}
    kers = {}
    for n in T.degrees():
        offs = K.offsets(n)
        for p in range(pmin + 1, pmax):
            gens = []
            for a, (off, size) in offs.items():
                b = n - a
                if b < -p:
                    gens.extend({off + j: 1} for j in range(size))
                elif b == -p:
                    if (a, b) not in kers:
                        kers[(a, b)] = kernel_lattice(K.D2(a, b))
                    for v in kers[(a, b)].vectors():
                        gens.append({off + i: x for i, x in v.items()})
            filt[(p, n)] = Lattice.span(T.rank(n), gens)
    return FilteredComplex(T, pmin, pmax, filt)


def gamma(F: FilteredComplex, r: int, p: int, q: int, dec_filtration: FilteredComplex | None = None,
          _cache: tuple | None = None) -> SubquotientHom:
    """``γ_r: E_r^{p,q}(Dec F) -> E_{r+1}^{2p+q,-p}(F)`` induced by the identity.

    Raises :class:`ContainmentError` if the identity does not carry cycles to
    cycles and boundaries to boundaries.
    """
    if r < 1:
        raise ValueError("γ is only defined from r = 1 on")
    G = dec(F) if dec_filtration is None else dec_filtration
    latF, latG = _cache if _cache is not None else (_Lattices(F), _Lattices(G))
    n = p + q
    P, Q, R = reindex("DEC_REINDEX", p, q, r)
    src = _entry(latG, G, r, p, n)
    dst = _entry(latF, F, R, P, n)
    return induced_hom(IntMatrix.identity(F.complex.rank(n)), src, dst)


def _entry(lat: _Lattices, F: FilteredComplex, r: int, p: int, n: int) -> Subquotient:
    # outside the window the group vanishes but the representative lattices
    # still matter for γ, so never shortcut to 0/0
    return lat.E(r, p, n)


def _d(lat: _Lattices, F: FilteredComplex, r: int, p: int, n: int) -> SubquotientHom:
    src = _entry(lat, F, r, p, n)
    dst = _entry(lat, F, r, p + r, n + 1)
    return induced_hom(F.complex.diff(n), src, dst)


@dataclass
class ComparisonReport:
    """Per ``(p, q, r)``: whether γ_r is an isomorphism and commutes with the differentials."""

    checks: list = field(default_factory=list)  # (p, q, r, iso, commutes, note)
    passed: bool = True
    counterexample: dict | None = None

    def fail(self, p, q, r, note, payload=None):
        self.passed = False
        if self.counterexample is None:
            self.counterexample = {"p": p, "q": q, "r": r, "reason": note}
            if payload:
                self.counterexample.update(payload)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checked": len(self.checks),
            "failures": [dict(zip(("p", "q", "r", "iso", "commutes", "note"), c))
                         for c in self.checks if not (c[3] and c[4])],
            "counterexample": self.counterexample,
        }


def verify_comparison(F: FilteredComplex, r_max: int | None = None,
                      dec_filtration: FilteredComplex | None = None) -> ComparisonReport:
    """Check that every ``γ_r`` (``1 ≤ r ≤ r_max``) is an isomorphism and that
    ``γ ∘ d_r(Dec) = d_{r+1}(F) ∘ γ``.

    Positions are enumerated so that every nonzero entry on either side is
    reached: the index map ``(p, q) -> (2p+q, -p)`` is a bijection.
    """
    if r_max is None:
        r_max = F.width + 2
    G = dec(F) if dec_filtration is None else dec_filtration
    latF, latG = _Lattices(F), _Lattices(G)
    report = ComparisonReport()
    C = F.complex
    for r in range(1, r_max + 1):
        for n in C.degrees():
            if not C.rank(n):
                continue
            ps = set(range(G.pmin, G.pmax)) | {P - n for P in range(F.pmin, F.pmax)}
            for p in sorted(ps):
                q = n - p
                iso, comm, note = True, True, ""
                try:
                    g = gamma(F, r, p, q, G, (latF, latG))
                    iso = g.is_iso()
                    if not iso:
                        note = "γ is not an isomorphism"
                    dG = _d(latG, G, r, p, n)
                    P, Q, _ = reindex("DEC_REINDEX", p, q, r)
                    dF = _d(latF, F, r + 1, P, n)
                    g2 = gamma(F, r, p + r, q - r + 1, G, (latF, latG))
                    comm = g2.compose(dG).agrees_with(dF.compose(g))
                    if not comm:
                        note = "γ does not commute with the differentials"
                except ContainmentError as exc:
                    iso, comm, note = False, False, f"containment failure: {exc}"
                report.checks.append((p, q, r, iso, comm, note))
                if not (iso and comm):
                    report.fail(p, q, r, note)
    if report.counterexample is not None:
        report.counterexample["filtered"] = dump_model(F)
    return report


def verify_postnikov_tot(CC: CosimplicialComplex, r_max: int | None = None) -> ComparisonReport:
    """Tower of Tot's of the levelwise truncations, compared with the double-complex
    décalage: lattices must coincide and the pages must have equal invariants and
    equal ``d_r`` images."""
    K = to_double(CC)
    T = total_complex(K)
    target = dec_double(K)
    report = ComparisonReport()
    if T.is_zero():
        return report
    filt = {}
    pmin, pmax = target.pmin, target.pmax
    for p in range(pmin + 1, pmax):
        sub = _truncated_tot_lattices(CC, K, T, p)
        for n in T.degrees():
            filt[(p, n)] = sub.get(n, Lattice.zero(T.rank(n)))
    tower = FilteredComplex(T, pmin, pmax, filt)
    if not tower.same_lattices(target):
        bad = next((p, n) for n in T.degrees() for p in range(pmin, pmax + 1)
                   if tower.F(p, n) != target.F(p, n))
        report.fail(bad[0], bad[1] - bad[0], 0, "tower lattice differs from Dec",
                    {"degree": bad[1]})
    if r_max is None:
        r_max = target.width + 2
    A, B = pages(tower, r_max), pages(target, r_max)
    for PA, PB in zip(A, B):
        keys = sorted(set(PA.entries) | set(PB.entries))
        for (p, q) in keys:
            same = PA.invariants(p, q) == PB.invariants(p, q)
            drank = PA.d_rank(p, q) == PB.d_rank(p, q)
            report.checks.append((p, q, PA.r, same, drank, ""))
            if not (same and drank):
                report.fail(p, q, PA.r, "page mismatch between tower and Dec")
    return report


def _truncated_tot_lattices(CC: CosimplicialComplex, K: DoubleComplex, T: CochainComplex,
                            p: int) -> dict:
    """Image of ``Tot(N τ_{≤-p} X)`` inside ``Tot(N X)``, degree by degree."""
    Tc, inc = termwise_truncation_with_inclusions(CC, p)
    Kc = to_double(Tc)
    out = {}
    for n in T.degrees():
        offs = K.offsets(n)
        gens = []
        for a, (off, size) in offs.items():
            b = n - a
            if Kc.rank(a, b) == 0:
                continue
            # normalized basis of the truncated level, pushed into X^a_b, then
            # written in the normalized basis of the untruncated level
            Nc = normalized_basis(Tc.groups[b], a)
            N = normalized_basis(CC.groups[b], a)
            emb = inc.get(a) if b == -p else None
            for v in Nc.vectors():
                w = emb.apply(v) if emb is not None else v
                c = N.coords(w)
                if c is None:
                    raise ContainmentError("truncated normalized cochain outside N")
                gens.append({off + i: x for i, x in c.items()})
        out[n] = Lattice.span(T.rank(n), gens)
    return out


# ---------------------------------------------------------------------------
# Random instances


@dataclass
class RandomInstance:
    seed: int
    bicomplex: DoubleComplex
    filtered: FilteredComplex


def random_filtered_instance(seed: int, columns: int | None = None, max_rank: int = 4,
                             max_entry: int = 5, shear: bool = True) -> RandomInstance:
    """Deterministic random filtered complex.

    A random bicomplex (see ``random_double_complex``) is totalized and then
    conjugated by a unimodular map that is block lower triangular for the
    column grading, so it preserves the stupid filtration.
    """
    rng = random.Random(seed)
    if columns is None:
        columns = rng.randint(1, 6)
    summands = rng.randint(0, 2 * columns + 2)
    for _ in range(100):
        K = random_double_complex(rng, columns, -1, 1, summands, max_rank=max_rank,
                                  max_entry=max_entry)
        F = stupid_filtration(K)
        if not shear:
            return RandomInstance(seed, K, F)
        T = F.complex
        S, Sinv = {}, {}
        for n in T.degrees():
            offs = K.offsets(n)
            r = T.rank(n)
            cols = [{j: 1} for j in range(r)]
            for a, (off, size) in offs.items():
                for a2, (off2, size2) in offs.items():
                    if a2 > a and rng.random() < 0.5:
                        for j in range(size):
                            i = rng.randrange(size2)
                            cols[off + j][off2 + i] = rng.randint(-1, 1)
            S[n] = IntMatrix.from_columns(r, cols)
            Sinv[n] = _inverse_unimodular(S[n])
        d = {n: S[n + 1] @ T.diff(n) @ Sinv[n] for n in T.degrees() if T.rank(n + 1)}
        if max((m.max_abs() for m in d.values()), default=0) > max_entry:
            continue
        T2 = CochainComplex(T.lo, T.ranks, d)
        filt = {(p, n): Lattice.span(T.rank(n), (S[n].apply(v) for v in L.vectors()))
                for (p, n), L in F.filt.items()}
        return RandomInstance(seed, K, FilteredComplex(T2, F.pmin, F.pmax, filt))
    return RandomInstance(seed, K, F)


def worked_bicomplex() -> DoubleComplex:
    """``K^{0,0} = Z --×2--> K^{1,0} = Z``."""
    return DoubleComplex(1, 0, 0, {(0, 0): 1, (1, 0): 1}, {(0, 0): IntMatrix.from_rows([[2]])})
