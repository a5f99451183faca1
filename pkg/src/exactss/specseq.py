"""Spectral sequences of filtered complexes.

Two independent engines produce the pages:

* :func:`pages` uses the cycle/boundary lattices
  ``Z_r^p = F^p ∩ d^{-1} F^{p+r}`` and
  ``E_r^{p,q} = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1})`` with ``n = p + q``;
* :func:`pages_from_couple` iterates derived exact couples starting from
  ``D_1 = H(F^p)`` and ``E_1 = H(gr^p)``.

Pages use the Cartan–Eilenberg convention internally: ``d_r`` has bidegree
``(r, 1 - r)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .complexes import FilteredComplex
from .zlinalg import (
    ContainmentError,
    IntMatrix,
    InvariantFactors,
    Lattice,
    Subquotient,
    SubquotientHom,
    induced_hom,
    invariants,
    kernel_lattice,
    lattice_image,
    lattice_intersect,
    lattice_preimage,
    lattice_sum,
    solve,
    zero_hom,
)

CE, BK = "CE", "BK"


@dataclass(frozen=True, eq=False)
class Page:
    """Page ``E_r``: nonzero entries keyed by ``(p, q)`` and ``d_r`` keyed by source."""

    r: int
    convention: str
    entries: Mapping[tuple, Subquotient]
    differentials: Mapping[tuple, SubquotientHom] = field(default_factory=dict)

    def entry(self, p: int, q: int) -> Subquotient:
        e = self.entries.get((p, q))
        return e if e is not None else Subquotient.zero(0)

    def invariants(self, p: int, q: int) -> InvariantFactors:
        e = self.entries.get((p, q))
        return invariants(e) if e is not None else InvariantFactors()

    def bidegree(self) -> tuple:
        return (self.r, 1 - self.r) if self.convention == CE else (self.r, self.r - 1)

    def target(self, p: int, q: int) -> tuple:
        dp, dq = self.bidegree()
        return (p + dp, q + dq)

    def table(self) -> dict:
        """``(p, q) -> InvariantFactors`` for nonzero entries."""
        out = {}
        for k in sorted(self.entries):
            inv = invariants(self.entries[k])
            if not inv.is_trivial():
                out[k] = inv
        return out

    def d_rank(self, p: int, q: int) -> InvariantFactors:
        """Invariants of the image of ``d_r`` out of ``(p, q)``."""
        h = self.differentials.get((p, q))
        return h.image().invariants() if h is not None else InvariantFactors()


# ---------------------------------------------------------------------------
# Cycle/boundary engine


class _Lattices:
    """Memoised ``Z_r^p(n)`` and related lattices of one filtered complex."""

    def __init__(self, F: FilteredComplex):
        self.F = F
        self.C = F.complex
        self._z = {}
        self._dz = {}

    def clamp(self, p: int) -> int:
        return min(max(p, self.F.pmin), self.F.pmax)

    def Z(self, r: int, p: int, n: int) -> Lattice:
        p, top = self.clamp(p), self.clamp(p + r)
        key = (p, top, n)
        L = self._z.get(key)
        if L is None:
            L = lattice_intersect(self.F.F(p, n),
                                  lattice_preimage(self.C.diff(n), self.F.F(top, n + 1)))
            self._z[key] = L
        return L

    def dZ(self, r: int, p: int, n: int) -> Lattice:
        """``d Z_r^p(n)`` inside degree ``n + 1``."""
        key = (self.clamp(p), self.clamp(p + r), n)
        L = self._dz.get(key)
        if L is None:
            L = lattice_image(self.C.diff(n), self.Z(r, p, n))
            self._dz[key] = L
        return L

    def E(self, r: int, p: int, n: int) -> Subquotient:
        Z = self.Z(r, p, n)
        B = lattice_sum(self.Z(r - 1, p + 1, n), self.dZ(r - 1, p - r + 1, n - 1))
        return Subquotient(Z, B)


def _support(F: FilteredComplex):
    C = F.complex
    return [(p, n) for n in C.degrees() if C.rank(n) for p in range(F.pmin, F.pmax)]


def pages(F: FilteredComplex, r_max: int | None = None) -> list[Page]:
    """Pages ``E_1 .. E_{r_max}`` with ``d_r`` induced by the differential."""
    if r_max is None:
        r_max = F.width + 2
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    lat = _Lattices(F)
    support = _support(F)
    out = []
    for r in range(1, r_max + 1):
        entries = {}
        for p, n in support:
            E = lat.E(r, p, n)
            if not E.is_zero():
                entries[(p, n - p)] = E
        diffs = {}
        for (p, q), E in entries.items():
            n = p + q
            tgt = entries.get((p + r, q - r + 1))
            if tgt is None:
                diffs[(p, q)] = zero_hom(E, Subquotient.zero(F.complex.rank(n + 1)))
                continue
            diffs[(p, q)] = induced_hom(F.complex.diff(n), E, tgt)
        out.append(Page(r, CE, entries, diffs))
    return out


# ---------------------------------------------------------------------------
# Exact couples


@dataclass(frozen=True, eq=False)
class ExactCouple:
    """Bigraded exact couple on a finite window, indexed by ``(p, n)`` with ``n = p + q``.

    ``i: D^{p+1,n} -> D^{p,n}``, ``pi: D^{p,n} -> E^{p+s,n}`` with ``s = r - 1``
    on page ``r``, and ``delta: E^{p,n} -> D^{p+1,n+1}``.  ``D`` is stored for
    ``dlo ≤ p < pmax`` and treated as zero from ``pmax`` on; ``E`` lives on
    ``pmin ≤ p < pmax``.
    """

    r: int
    pmin: int
    pmax: int
    dlo: int
    D: Mapping[tuple, Subquotient]
    E: Mapping[tuple, Subquotient]
    i: Mapping[tuple, SubquotientHom]
    pi: Mapping[tuple, SubquotientHom]
    delta: Mapping[tuple, SubquotientHom]
    degrees: tuple

    @property
    def s(self) -> int:
        return self.r - 1

    def d(self, p: int, n: int) -> SubquotientHom:
        """``d_r = pi ∘ delta`` out of ``E^{p,n}``."""
        return self.pi[(p + 1, n + 1)].compose(self.delta[(p, n)])


def _zero_sq(n: int) -> Subquotient:
    return Subquotient.zero(n)


def exact_couple(F: FilteredComplex, depth: int | None = None) -> ExactCouple:
    """``D_1^{p} = H(F^p)``, ``E_1^p = H(gr^p)`` with maps induced by inclusion,
    projection and the differential.  ``depth`` extends the ``D`` window below
    ``pmin`` so that ``depth`` derivations remain defined."""
    C = F.complex
    if depth is None:
        depth = F.width + 3
    degs = tuple(n for n in range(C.lo - 1, C.hi + 2))
    dlo = F.pmin - depth
    D, E = {}, {}
    for n in degs:
        r = C.rank(n)
        dn = C.diff(n)
        dprev = C.diff(n - 1)
        ker = kernel_lattice(dn) if r else Lattice.zero(0)
        for p in range(dlo, F.pmax + 1):
            Fp = F.F(p, n)
            D[(p, n)] = Subquotient(lattice_intersect(Fp, ker),
                                    lattice_image(dprev, F.F(p, n - 1)))
        for p in range(F.pmin, F.pmax):
            Z = lattice_intersect(F.F(p, n), lattice_preimage(dn, F.F(p + 1, n + 1)))
            B = lattice_sum(F.F(p + 1, n), lattice_image(dprev, F.F(p, n - 1)))
            E[(p, n)] = Subquotient(Z, B)
    i, pi, delta = {}, {}, {}
    for n in degs:
        r = C.rank(n)
        ident = IntMatrix.identity(r)
        for p in range(dlo, F.pmax):
            i[(p + 1, n)] = induced_hom(ident, D[(p + 1, n)], D[(p, n)])
        for p in range(dlo, F.pmax + 1):
            tgt = E.get((p, n))
            pi[(p, n)] = (induced_hom(ident, D[(p, n)], tgt) if tgt is not None
                          else zero_hom(D[(p, n)], _zero_sq(0)))
        for p in range(F.pmin, F.pmax):
            if n + 1 in degs:
                delta[(p, n)] = induced_hom(C.diff(n), E[(p, n)], D[(p + 1, n + 1)])
    return ExactCouple(1, F.pmin, F.pmax, dlo, D, E, i, pi, delta, degs)


def _d_lookup(EC: ExactCouple, p: int, n: int) -> Subquotient:
    if p >= EC.pmax:
        return _zero_sq(0)
    return EC.D[(p, n)]


def derive_couple(EC: ExactCouple) -> ExactCouple:
    """The derived couple.

    ``D'^p`` is the image of ``i: D^{p+1} -> D^p``, stored as the coimage
    ``D^{p+1} / ker i``; ``E' = ker d / im d``; ``pi'`` is ``pi`` on the
    coimage representative (so the shift ``s`` grows by one) and ``delta'``
    lifts ``delta`` through ``i``.
    """
    degs = EC.degrees
    D, E, i, pi, delta = {}, {}, {}, {}, {}
    for (p1, n), ip in EC.i.items():
        D[(p1 - 1, n)] = Subquotient(ip.dom.cycles, ip.kernel().cycles)
    for n in degs:
        for p in range(EC.pmin, EC.pmax):
            E0 = EC.E[(p, n)]
            out_d = _couple_d(EC, p, n)
            cyc = out_d.kernel().cycles if out_d is not None else E0.cycles
            bnd = E0.boundaries
            src = p - EC.r
            if EC.pmin <= src < EC.pmax and n - 1 in degs:
                in_d = _couple_d(EC, src, n - 1)
                if in_d is not None:
                    bnd = in_d.image().cycles
            E[(p, n)] = Subquotient(cyc, bnd)
    s_new = EC.s + 1
    for (p, n), dom in D.items():
        src = D.get((p + 1, n))
        if src is not None:
            old = EC.i[(p + 1, n)]
            imgs = [old.apply(v) for v in src.cycles.vectors()]
            i[(p + 1, n)] = SubquotientHom(src, dom, IntMatrix.from_columns(dom.ambient_rank, imgs))
        # the representative lives in D^{p+1}; old pi sends it to E^{p+1+s}
        tgt = E.get((p + s_new, n))
        if tgt is None:
            pi[(p, n)] = zero_hom(dom, _zero_sq(0))
            continue
        old = EC.pi[(p + 1, n)]
        imgs = [old.apply(v) for v in dom.cycles.vectors()]
        pi[(p, n)] = SubquotientHom(dom, tgt, IntMatrix.from_columns(tgt.ambient_rank, imgs))
    for n in degs:
        for p in range(EC.pmin, EC.pmax):
            if (p, n) not in EC.delta:
                continue
            dom = E[(p, n)]
            old = EC.delta[(p, n)]
            tgt = D.get((p + 1, n + 1))
            if tgt is None:
                delta[(p, n)] = zero_hom(dom, _zero_sq(0))
                continue
            # ∂x lies in im(i: D^{p+2} -> D^{p+1}) modulo boundaries; lift it
            ip = EC.i[(p + 2, n + 1)] if (p + 2, n + 1) in EC.i else None
            gens = (ip.images.columns() if ip is not None else []) + \
                old.cod.boundaries.vectors()
            basis = ip.dom.cycles.vectors() if ip is not None else []
            k = len(basis)
            imgs = []
            for v in dom.cycles.vectors():
                w = old.apply(v)
                c = solve(gens, w)
                if c is None:
                    raise ContainmentError("connecting map does not lift through i")
                y: dict = {}
                for j, x in c.items():
                    if j < k:
                        for row, val in basis[j].items():
                            y[row] = y.get(row, 0) + x * val
                imgs.append({a: b for a, b in y.items() if b})
            delta[(p, n)] = SubquotientHom(dom, tgt, IntMatrix.from_columns(tgt.ambient_rank, imgs))
    return ExactCouple(EC.r + 1, EC.pmin, EC.pmax, EC.dlo,
                       D, E, i, pi, delta, degs)


def _couple_d(EC: ExactCouple, p: int, n: int) -> SubquotientHom | None:
    if (p, n) not in EC.delta:
        return None
    nxt = EC.pi.get((p + 1, n + 1))
    if nxt is None:
        return None
    return nxt.compose(EC.delta[(p, n)])


def couple_page(EC: ExactCouple) -> Page:
    entries, diffs = {}, {}
    for (p, n), Ep in EC.E.items():
        if not Ep.is_zero():
            entries[(p, n - p)] = Ep
    for (p, q), Ep in entries.items():
        d = _couple_d(EC, p, p + q)
        if d is None:
            d = zero_hom(Ep, _zero_sq(0))
        diffs[(p, q)] = d
    return Page(EC.r, CE, entries, diffs)


def pages_from_couple(EC: ExactCouple | FilteredComplex, r_max: int | None = None) -> list[Page]:
    if isinstance(EC, FilteredComplex):
        if r_max is None:
            r_max = EC.width + 2
        EC = exact_couple(EC, depth=r_max + 1)
    if r_max is None:
        r_max = EC.pmax - EC.pmin + 2
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    out = [couple_page(EC)]
    while len(out) < r_max:
        EC = derive_couple(EC)
        out.append(couple_page(EC))
    return out


def check_exactness(EC: ExactCouple) -> list[str]:
    """Exactness at both ``D`` positions and at ``E``; returns located failures."""
    problems = []
    s = EC.s
    for n in EC.degrees:
        for p in range(EC.dlo + 1, EC.pmax):
            # D^{p+1} -i-> D^p -pi-> E^{p+s}
            if (p + 1, n) in EC.i and (p, n) in EC.pi:
                im = EC.i[(p + 1, n)].image().cycles
                ker = EC.pi[(p, n)].kernel().cycles
                if im != ker:
                    problems.append(f"im i ≠ ker pi at D^({p},{n})")
        for p in range(EC.pmin, EC.pmax):
            # D^{p-s} -pi-> E^p -delta-> D^{p+1}
            if (p, n) in EC.delta and (p - s, n) in EC.pi:
                im = EC.pi[(p - s, n)].image().cycles
                ker = EC.delta[(p, n)].kernel().cycles
                if im != ker:
                    problems.append(f"im pi ≠ ker delta at E^({p},{n})")
            # E^p -delta-> D^{p+1} -i-> D^p
            if (p, n) in EC.delta and (p + 1, n + 1) in EC.i:
                im = EC.delta[(p, n)].image().cycles
                ker = EC.i[(p + 1, n + 1)].kernel().cycles
                if im != ker:
                    problems.append(f"im delta ≠ ker i at D^({p + 1},{n + 1})")
    return problems


# ---------------------------------------------------------------------------
# Convergence


def abutment_graded(F: FilteredComplex) -> dict:
    """``(p, n) -> `` invariants of ``F^pH^n / F^{p+1}H^n`` (nonzero pieces only)."""
    C = F.complex
    out = {}
    for n in C.degrees():
        if not C.rank(n):
            continue
        ker = kernel_lattice(C.diff(n))
        B = Lattice.from_matrix(C.diff(n - 1))
        for p in range(F.pmin, F.pmax):
            top = lattice_sum(lattice_intersect(F.F(p, n), ker), B)
            bot = lattice_sum(lattice_intersect(F.F(p + 1, n), ker), B)
            inv = Subquotient(top, bot).invariants()
            if not inv.is_trivial():
                out[(p, n)] = inv
    return out


def stabilization_index(F: FilteredComplex, page_list: list[Page] | None = None) -> dict:
    """``n -> r(n)``: one more than the last page with a nonzero differential touching
    total degree ``n``; 1 if there is none."""
    if page_list is None:
        page_list = pages(F, max(F.width, 1))
    out = {n: 1 for n in F.complex.degrees()}
    for P in page_list:
        for (p, q), h in P.differentials.items():
            if not h.is_zero():
                for m in (p + q, p + q + 1):
                    out[m] = max(out.get(m, 1), P.r + 1)
    return out


def stable_page(F: FilteredComplex) -> Page:
    return pages(F, max(F.width, 1) + 1)[-1]


def check_convergence(F: FilteredComplex, page_list: list[Page] | None = None) -> list[str]:
    """Compare the stable page with the graded abutment degree by degree, and
    bound the stabilization index by ``width + 1``.  Returns located failures."""
    r_stop = max(F.width, 1) + 1
    if page_list is None or len(page_list) < r_stop:
        page_list = pages(F, r_stop)
    problems = []
    stable = page_list[r_stop - 1].table()
    graded = abutment_graded(F)
    for n in F.complex.degrees():
        lhs = {p: inv for (p, q), inv in stable.items() if p + q == n}
        rhs = {p: inv for (p, m), inv in graded.items() if m == n}
        if lhs != rhs:
            problems.append(f"degree {n}: stable page {_fmt(lhs)} but abutment {_fmt(rhs)}")
    for n, r in stabilization_index(F, page_list).items():
        if r > F.width + 1:
            problems.append(f"degree {n}: stabilizes at r = {r} > width + 1 = {F.width + 1}")
    return problems


def _fmt(groups: dict) -> str:
    return "{" + ", ".join(f"{p}: {g}" for p, g in sorted(groups.items())) + "}"


def compare_pages(A: list[Page], B: list[Page]) -> list[str]:
    """Differences between two page lists: entry invariants and the image and
    kernel of every ``d_r``."""
    problems = []
    if len(A) != len(B):
        problems.append(f"{len(A)} pages against {len(B)}")
    for PA, PB in zip(A, B):
        ta, tb = PA.table(), PB.table()
        for k in sorted(set(ta) | set(tb)):
            ga, gb = ta.get(k, InvariantFactors()), tb.get(k, InvariantFactors())
            if ga != gb:
                problems.append(f"E_{PA.r}^{k}: {ga} against {gb}")
                continue
            ha, hb = PA.differentials.get(k), PB.differentials.get(k)
            ia, ib = PA.d_rank(*k), PB.d_rank(*k)
            ka = ha.kernel().invariants() if ha is not None else ga
            kb = hb.kernel().invariants() if hb is not None else gb
            if ia != ib or ka != kb:
                problems.append(f"d_{PA.r} at {k}: image {ia} / {ib}, kernel {ka} / {kb}")
    return problems


# ---------------------------------------------------------------------------
# Conventions and index maps


def convert_convention(P: Page) -> Page:
    """``E^{p,q}(CE) = E^{p,-q}(BK)``; an involution."""
    conv = BK if P.convention == CE else CE
    return Page(P.r, conv, {(p, -q): e for (p, q), e in P.entries.items()},
                {(p, -q): h for (p, q), h in P.differentials.items()})


class IndexMapId(str, Enum):
    CE_TO_BK = "CE_TO_BK"
    DEC_REINDEX = "DEC_REINDEX"
    AH_TO_DEC = "AH_TO_DEC"
    AH_TO_AN = "AH_TO_AN"


def reindex(which: IndexMapId | str, p: int, q: int, r: int) -> tuple[int, int, int]:
    if r < 1:
        raise ValueError("page index r must be at least 1")
    which = IndexMapId(which)
    if which is IndexMapId.CE_TO_BK:
        return (p, -q, r)
    if which is IndexMapId.DEC_REINDEX:
        return (2 * p + q, -p, r + 1)
    if which is IndexMapId.AH_TO_DEC:
        return (2 * p, q - p, 2 * r)
    return (3 * p + q, 2 * p, 2 * r + 1)
