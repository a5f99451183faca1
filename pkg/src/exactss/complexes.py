"""Bounded cochain complexes of free abelian groups, bicomplexes and filtrations.

Conventions used throughout the package:

* ``cone(f)^n = A^{n+1} ⊕ B^n`` with ``d(a, b) = (-d a, f a + d b)`` and
  ``hofib(f) = cone(f)[-1]``.
* ``C[k]^n = C^{n+k}`` with differential multiplied by ``(-1)^k``.
* Double complexes store commuting differentials; the total complex uses
  ``d = d1 + (-1)^a d2`` on the ``(a, b)`` block, with blocks of ``Tot^n``
  ordered by increasing ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .zlinalg import (
    IntMatrix,
    Lattice,
    Subquotient,
    kernel_lattice,
    lattice_image,
    lattice_intersect,
    lattice_preimage,
    lattice_sum,
    solve,
)


class ValidationError(ValueError):
    """Input data violates a structural invariant.

    ``where`` is a JSON-pointer style location relative to the model.
    """

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where
        self.reason = message


# ---------------------------------------------------------------------------
# Cochain complexes


@dataclass(frozen=True, eq=False)
class CochainComplex:
    """``C^lo -> ... -> C^hi`` with ``d[n]: C^n -> C^{n+1}``; zero outside ``[lo, hi]``."""

    lo: int
    ranks: tuple
    d: Mapping[int, IntMatrix] = field(default_factory=dict)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if any(r < 0 for r in self.ranks):
            raise ValidationError("negative rank", "/ranks")
        d = {}
        for n, m in self.d.items():
            src, dst = self.rank(n), self.rank(n + 1)
            if m.shape != (dst, src):
                raise ValidationError(
                    f"differential in degree {n} has shape {m.shape}, expected {(dst, src)}",
                    f"/d/{n}")
            if not m.is_zero():
                d[n] = m
        object.__setattr__(self, "d", d)
        if self.check:
            for n in sorted(d):
                if n + 1 in d and not (d[n + 1] @ d[n]).is_zero():
                    raise ValidationError(f"d∘d ≠ 0 from degree {n} to {n + 2}", f"/d/{n + 1}")

    @classmethod
    def from_dict(cls, ranks: Mapping[int, int], d: Mapping[int, IntMatrix] | None = None,
                  check: bool = True) -> "CochainComplex":
        nz = [n for n, r in ranks.items() if r]
        if not nz:
            return cls(0, (), {}, check)
        lo, hi = min(nz), max(nz)
        return cls(lo, tuple(ranks.get(n, 0) for n in range(lo, hi + 1)), dict(d or {}), check)

    @classmethod
    def zero(cls) -> "CochainComplex":
        return cls(0, ())

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def rank(self, n: int) -> int:
        k = n - self.lo
        return self.ranks[k] if 0 <= k < len(self.ranks) else 0

    def diff(self, n: int) -> IntMatrix:
        m = self.d.get(n)
        return m if m is not None else IntMatrix.zeros(self.rank(n + 1), self.rank(n))

    def is_zero(self) -> bool:
        return not any(self.ranks)

    def __eq__(self, other):
        if not isinstance(other, CochainComplex):
            return NotImplemented
        degs = set(self.degrees()) | set(other.degrees())
        return (all(self.rank(n) == other.rank(n) for n in degs)
                and all(self.diff(n) == other.diff(n) for n in degs))

    def __hash__(self):
        return hash(tuple((n, self.rank(n), self.diff(n)) for n in self.degrees() if self.rank(n)))


def cohomology(C: CochainComplex, n: int) -> Subquotient:
    """``H^n(C) = ker d[n] / im d[n-1]``; the empty group outside the support."""
    r = C.rank(n)
    if r == 0:
        return Subquotient.zero(0)
    Z = kernel_lattice(C.diff(n))
    B = Lattice.from_matrix(C.diff(n - 1))
    return Subquotient(Z, B)


def relative_cohomology(C: CochainComplex, sub: Mapping[int, Lattice], n: int) -> Subquotient:
    """``H^n(C / L)`` for a subcomplex given by lattices ``sub[n]``, inside ``C^n``."""
    r = C.rank(n)
    L = sub.get(n) or Lattice.zero(r)
    L1 = sub.get(n + 1) or Lattice.zero(C.rank(n + 1))
    Z = lattice_preimage(C.diff(n), L1)
    B = lattice_sum(Lattice.from_matrix(C.diff(n - 1)), L)
    return Subquotient(Z, B)


def shift(C: CochainComplex, k: int) -> CochainComplex:
    """``C[k]^n = C^{n+k}`` with differential ``(-1)^k d``."""
    sign = -1 if k % 2 else 1
    return CochainComplex(C.lo - k, C.ranks,
                          {n - k: m.scale(sign) for n, m in C.d.items()}, check=False)


def direct_sum(*complexes: CochainComplex) -> CochainComplex:
    parts = [C for C in complexes if not C.is_zero()]
    if not parts:
        return CochainComplex.zero()
    lo = min(C.lo for C in parts)
    hi = max(C.hi for C in parts)
    ranks = {n: sum(C.rank(n) for C in parts) for n in range(lo, hi + 1)}
    d = {}
    for n in range(lo, hi):
        d[n] = IntMatrix.block([C.rank(n + 1) for C in parts], [C.rank(n) for C in parts],
                               {(i, i): C.diff(n) for i, C in enumerate(parts)})
    return CochainComplex.from_dict(ranks, d, check=False)


# ---------------------------------------------------------------------------
# Chain maps, cones, truncation


@dataclass(frozen=True, eq=False)
class ChainMap:
    dom: CochainComplex
    cod: CochainComplex
    f: Mapping[int, IntMatrix] = field(default_factory=dict)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        f = {}
        for n, m in self.f.items():
            if m.shape != (self.cod.rank(n), self.dom.rank(n)):
                raise ValidationError(f"chain map component in degree {n} has shape {m.shape}, "
                                      f"expected {(self.cod.rank(n), self.dom.rank(n))}", f"/f/{n}")
            if not m.is_zero():
                f[n] = m
        object.__setattr__(self, "f", f)
        if self.check:
            lo = min(self.dom.lo, self.cod.lo) - 1
            hi = max(self.dom.hi, self.cod.hi) + 1
            for n in range(lo, hi + 1):
                lhs = self.at(n + 1) @ self.dom.diff(n)
                rhs = self.cod.diff(n) @ self.at(n)
                if lhs != rhs:
                    raise ValidationError(f"chain map does not commute with d in degree {n}",
                                          f"/f/{n}")

    def at(self, n: int) -> IntMatrix:
        m = self.f.get(n)
        return m if m is not None else IntMatrix.zeros(self.cod.rank(n), self.dom.rank(n))

    def compose(self, first: "ChainMap") -> "ChainMap":
        """``self ∘ first``."""
        degs = set(first.dom.degrees())
        return ChainMap(first.dom, self.cod, {n: self.at(n) @ first.at(n) for n in degs},
                        check=False)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        degs = set(self.dom.degrees()) | set(other.dom.degrees())
        return (self.dom == other.dom and self.cod == other.cod
                and all(self.at(n) == other.at(n) for n in degs))

    __hash__ = None


def identity_map(C: CochainComplex) -> ChainMap:
    return ChainMap(C, C, {n: IntMatrix.identity(C.rank(n)) for n in C.degrees()}, check=False)


def zero_map(A: CochainComplex, B: CochainComplex) -> ChainMap:
    return ChainMap(A, B, {}, check=False)


def direct_sum_map(*maps: ChainMap) -> ChainMap:
    dom = direct_sum(*(m.dom for m in maps))
    cod = direct_sum(*(m.cod for m in maps))
    f = {}
    for n in dom.degrees():
        f[n] = IntMatrix.block([m.cod.rank(n) for m in maps], [m.dom.rank(n) for m in maps],
                               {(i, i): m.at(n) for i, m in enumerate(maps)})
    return ChainMap(dom, cod, f, check=False)


def mapping_cone(f: ChainMap) -> CochainComplex:
    """``cone(f)^n = A^{n+1} ⊕ B^n``, ``d(a, b) = (-d a, f a + d b)``."""
    A, B = f.dom, f.cod
    degs = [n - 1 for n in A.degrees() if A.rank(n)] + [n for n in B.degrees() if B.rank(n)]
    if not degs:
        return CochainComplex.zero()
    lo, hi = min(degs), max(degs)
    ranks = {n: A.rank(n + 1) + B.rank(n) for n in range(lo, hi + 1)}
    d = {}
    for n in range(lo, hi):
        d[n] = IntMatrix.block(
            [A.rank(n + 2), B.rank(n + 1)], [A.rank(n + 1), B.rank(n)],
            {(0, 0): -A.diff(n + 1), (1, 0): f.at(n + 1), (1, 1): B.diff(n)})
    return CochainComplex.from_dict(ranks, d)


def hofib(f: ChainMap) -> CochainComplex:
    """Homotopy fibre ``cone(f)[-1]``: ``hofib^n = A^n ⊕ B^{n-1}``."""
    return shift(mapping_cone(f), -1)


def cone_map(f: ChainMap, g: ChainMap, a: ChainMap, b: ChainMap) -> ChainMap:
    """The map ``cone(f) -> cone(g)`` given by ``diag(a, b)`` for a strictly commuting square
    ``g ∘ a = b ∘ f``."""
    src, dst = mapping_cone(f), mapping_cone(g)
    comps = {}
    for n in src.degrees():
        comps[n] = IntMatrix.block([g.dom.rank(n + 1), g.cod.rank(n)],
                                   [f.dom.rank(n + 1), f.cod.rank(n)],
                                   {(0, 0): a.at(n + 1), (1, 1): b.at(n)})
    return ChainMap(src, dst, comps)


def shift_map(m: ChainMap, k: int) -> ChainMap:
    return ChainMap(shift(m.dom, k), shift(m.cod, k), {n - k: x for n, x in m.f.items()},
                    check=False)


def truncation_map(C: CochainComplex, m: int) -> ChainMap:
    """Inclusion ``τ_{≤m} C -> C`` of the canonical truncation.

    Degree ``m`` of the truncation is ``ker d[m]`` written in its HNF basis.
    """
    ranks, d, inc = {}, {}, {}
    for n in C.degrees():
        if n < m:
            ranks[n] = C.rank(n)
            inc[n] = IntMatrix.identity(C.rank(n))
            d[n] = C.diff(n)
        elif n == m:
            K = kernel_lattice(C.diff(m))
            ranks[n] = K.rank
            inc[n] = K.matrix()
    if m - 1 in d and m in inc:
        # d[m-1] lands in ker d[m]; rewrite in the kernel basis
        K = kernel_lattice(C.diff(m))
        cols = []
        for v in C.diff(m - 1).columns():
            c = K.coords(v)
            if c is None:
                raise ArithmeticError("boundary outside kernel: d∘d ≠ 0")
            cols.append(c)
        d[m - 1] = IntMatrix.from_columns(K.rank, cols)
    elif m - 1 in d:
        d[m - 1] = IntMatrix.zeros(0, C.rank(m - 1))
    T = CochainComplex.from_dict(ranks, d, check=False)
    return ChainMap(T, C, {n: x for n, x in inc.items() if T.rank(n)}, check=False)


def canonical_truncation(C: CochainComplex, m: int) -> CochainComplex:
    """``τ_{≤m} C``: cohomology preserved in degrees ``≤ m`` and killed above."""
    return truncation_map(C, m).dom


# ---------------------------------------------------------------------------
# Double complexes


@dataclass(frozen=True, eq=False)
class DoubleComplex:
    """Bicomplex ``K^{a,b}`` for ``0 ≤ a ≤ amax``, ``bmin ≤ b ≤ bmax`` with commuting
    ``d1: K^{a,b} -> K^{a+1,b}`` and ``d2: K^{a,b} -> K^{a,b+1}``."""

    amax: int
    bmin: int
    bmax: int
    ranks: Mapping[tuple, int]
    d1: Mapping[tuple, IntMatrix] = field(default_factory=dict)
    d2: Mapping[tuple, IntMatrix] = field(default_factory=dict)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        ranks = {}
        for (a, b), r in self.ranks.items():
            if r < 0:
                raise ValidationError("negative rank", f"/ranks/{a},{b}")
            if r and not (0 <= a <= self.amax and self.bmin <= b <= self.bmax):
                raise ValidationError(f"bidegree ({a},{b}) outside declared ranges",
                                      f"/ranks/{a},{b}")
            if r:
                ranks[(a, b)] = int(r)
        object.__setattr__(self, "ranks", ranks)
        for name, table, step in (("d1", self.d1, (1, 0)), ("d2", self.d2, (0, 1))):
            clean = {}
            for (a, b), m in table.items():
                exp = (self.rank(a + step[0], b + step[1]), self.rank(a, b))
                if m.shape != exp:
                    raise ValidationError(f"{name} at ({a},{b}) has shape {m.shape}, expected {exp}",
                                          f"/{name}/{a},{b}")
                if not m.is_zero():
                    clean[(a, b)] = m
            object.__setattr__(self, name, clean)
        if self.check:
            self.validate()

    def validate(self):
        for (a, b) in self.ranks:
            if not (self.D1(a + 1, b) @ self.D1(a, b)).is_zero():
                raise ValidationError(f"d1∘d1 ≠ 0 at ({a},{b})", f"/d1/{a + 1},{b}")
            if not (self.D2(a, b + 1) @ self.D2(a, b)).is_zero():
                raise ValidationError(f"d2∘d2 ≠ 0 at ({a},{b})", f"/d2/{a},{b + 1}")
            if self.D1(a, b + 1) @ self.D2(a, b) != self.D2(a + 1, b) @ self.D1(a, b):
                raise ValidationError(f"square at ({a},{b}) does not commute", f"/d2/{a + 1},{b}")

    def rank(self, a: int, b: int) -> int:
        return self.ranks.get((a, b), 0)

    def D1(self, a: int, b: int) -> IntMatrix:
        m = self.d1.get((a, b))
        return m if m is not None else IntMatrix.zeros(self.rank(a + 1, b), self.rank(a, b))

    def D2(self, a: int, b: int) -> IntMatrix:
        m = self.d2.get((a, b))
        return m if m is not None else IntMatrix.zeros(self.rank(a, b + 1), self.rank(a, b))

    def column(self, a: int) -> CochainComplex:
        return CochainComplex.from_dict({b: self.rank(a, b) for b in range(self.bmin, self.bmax + 1)},
                                        {b: self.D2(a, b) for b in range(self.bmin, self.bmax)},
                                        check=False)

    def columns_upto(self, n: int) -> "DoubleComplex":
        """Columns ``a ≤ n`` only."""
        keep = {k: v for k, v in self.ranks.items() if k[0] <= n}
        return DoubleComplex(min(self.amax, n), self.bmin, self.bmax, keep,
                             {k: v for k, v in self.d1.items() if k[0] < n},
                             {k: v for k, v in self.d2.items() if k[0] <= n}, check=False)

    def tot_degrees(self) -> range:
        if not self.ranks:
            return range(0)
        return range(min(a + b for a, b in self.ranks), max(a + b for a, b in self.ranks) + 1)

    def offsets(self, n: int) -> dict:
        """``a -> (offset, size)`` for the blocks of ``Tot^n``."""
        out, off = {}, 0
        for a in range(0, self.amax + 1):
            r = self.rank(a, n - a)
            if r:
                out[a] = (off, r)
                off += r
        return out


def total_complex(K: DoubleComplex) -> CochainComplex:
    """``Tot^n = ⊕_{a+b=n} K^{a,b}`` with ``d = d1 + (-1)^a d2``."""
    degs = K.tot_degrees()
    ranks, d = {}, {}
    for n in degs:
        src = K.offsets(n)
        dst = K.offsets(n + 1)
        ranks[n] = sum(s for _, s in src.values())
        cols = []
        for a, (off, size) in src.items():
            b = n - a
            sign = -1 if a % 2 else 1
            m1, m2 = K.D1(a, b), K.D2(a, b)
            for j in range(size):
                col = {}
                if a + 1 in dst:
                    o = dst[a + 1][0]
                    for i, x in m1.data[j]:
                        col[o + i] = x
                if a in dst:
                    o = dst[a][0]
                    for i, x in m2.data[j]:
                        col[o + i] = sign * x
                cols.append(col)
        d[n] = IntMatrix.from_columns(sum(s for _, s in dst.values()), cols)
    return CochainComplex.from_dict(ranks, d)


# ---------------------------------------------------------------------------
# Filtrations


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """Decreasing filtration ``F^p C^n`` with ``F^{pmin} = C`` and ``F^{pmax} = 0``.

    ``filt`` maps ``(p, n)`` to a lattice for ``pmin < p < pmax``; values outside
    that range are implied.
    """

    complex: CochainComplex
    pmin: int
    pmax: int
    filt: Mapping[tuple, Lattice] = field(default_factory=dict)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.pmax < self.pmin:
            raise ValidationError(f"pmax {self.pmax} < pmin {self.pmin}", "/pmax")
        clean = {}
        for (p, n), L in self.filt.items():
            if not self.pmin < p < self.pmax or self.complex.rank(n) == 0:
                continue
            if L.ambient_rank != self.complex.rank(n):
                raise ValidationError(f"F^{p} in degree {n} lives in Z^{L.ambient_rank}, "
                                      f"expected Z^{self.complex.rank(n)}", f"/F/{p},{n}")
            clean[(p, n)] = L
        object.__setattr__(self, "filt", clean)
        if self.check:
            self.validate()

    def F(self, p: int, n: int) -> Lattice:
        r = self.complex.rank(n)
        if p <= self.pmin:
            return Lattice.full(r)
        if p >= self.pmax:
            return Lattice.zero(r)
        L = self.filt.get((p, n))
        return L if L is not None else Lattice.full(r)

    @property
    def width(self) -> int:
        return self.pmax - self.pmin

    def validate(self):
        C = self.complex
        for n in C.degrees():
            for p in range(self.pmin, self.pmax):
                if not self.F(p + 1, n) <= self.F(p, n):
                    raise ValidationError(f"F^{p + 1} ⊄ F^{p} in degree {n}", f"/F/{p + 1},{n}")
                L = self.F(p, n)
                img = lattice_image(C.diff(n), L)
                if not img <= self.F(p, n + 1):
                    raise ValidationError(f"d(F^{p}) ⊄ F^{p} from degree {n}", f"/F/{p},{n + 1}")

    def same_lattices(self, other: "FilteredComplex") -> bool:
        """Lattice-for-lattice equality, ignoring how far the index range is padded."""
        if self.complex != other.complex:
            return False
        lo = min(self.pmin, other.pmin)
        hi = max(self.pmax, other.pmax)
        return all(self.F(p, n) == other.F(p, n)
                   for n in self.complex.degrees() for p in range(lo, hi + 1))

    def tight(self) -> "FilteredComplex":
        """Shrink ``[pmin, pmax]`` to the range where the filtration actually moves."""
        C = self.complex
        moving = [p for p in range(self.pmin, self.pmax)
                  if any(self.F(p, n) != self.F(p + 1, n) for n in C.degrees())]
        if not moving:
            return FilteredComplex(C, 0, 0, {}, check=False)
        lo, hi = moving[0], moving[-1] + 1
        return FilteredComplex(C, lo, hi, {(p, n): self.F(p, n) for p in range(lo + 1, hi)
                                           for n in C.degrees()}, check=False)


def trivial_filtration(C: CochainComplex, p: int = 0) -> FilteredComplex:
    """``F^{p} = C``, ``F^{p+1} = 0``."""
    return FilteredComplex(C, p, p + 1, {})


def stupid_filtration(K: DoubleComplex) -> FilteredComplex:
    """Filtration of ``Tot(K)`` by column: ``F^p = ⊕_{a ≥ p} K^{a,*}``."""
    T = total_complex(K)
    filt = {}
    for n in T.degrees():
        offs = K.offsets(n)
        r = T.rank(n)
        for p in range(1, K.amax + 1):
            gens = [{off + j: 1} for a, (off, size) in offs.items() if a >= p for j in range(size)]
            filt[(p, n)] = Lattice.span(r, gens)
    return FilteredComplex(T, 0, K.amax + 1, filt)


def graded_piece(F: FilteredComplex, p: int, n: int) -> Subquotient:
    """``H^n(gr^p)`` computed inside ``C^n``."""
    d = F.complex.diff(n)
    Fp, Fp1 = F.F(p, n), F.F(p + 1, n)
    Z = lattice_intersect(Fp, lattice_preimage(d, F.F(p + 1, n + 1)))
    B = lattice_sum(lattice_image(F.complex.diff(n - 1), F.F(p, n - 1)), Fp1)
    return Subquotient(Z, B)


def solve_columns(basis: Lattice, vectors: Iterable[Mapping[int, int]]) -> IntMatrix:
    """Coordinates of ``vectors`` in ``basis``; raises if any vector lies outside."""
    cols = []
    for v in vectors:
        c = basis.coords(v)
        if c is None:
            raise ArithmeticError("vector outside the target lattice")
        cols.append(c)
    return IntMatrix.from_columns(basis.rank, cols)


__all__ = [
    "ValidationError", "CochainComplex", "ChainMap", "DoubleComplex", "FilteredComplex",
    "cohomology", "relative_cohomology", "shift", "direct_sum", "identity_map", "zero_map",
    "direct_sum_map", "mapping_cone", "hofib", "cone_map", "shift_map", "truncation_map",
    "canonical_truncation", "total_complex", "trivial_filtration", "stupid_filtration",
    "graded_piece", "solve_columns", "solve",
]
