"""Truncated cosimplicial abelian groups and complexes.

Index conventions: ``coface(n, i)`` is ``d^i: X^{n-1} -> X^n`` for ``0 ≤ i ≤ n``
and ``codeg(n, i)`` is ``s^i: X^{n+1} -> X^n`` for ``0 ≤ i ≤ n``.  Only levels
``0..top`` exist; identities are checked wherever every map involved exists.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from .complexes import (
    ChainMap,
    CochainComplex,
    DoubleComplex,
    FilteredComplex,
    ValidationError,
    cohomology,
    cone_map,
    direct_sum,
    direct_sum_map,
    hofib,
    identity_map,
    shift,
    shift_map,
    stupid_filtration,
)
from .zlinalg import IntMatrix, Lattice, kernel_lattice, lattice_intersect


# ---------------------------------------------------------------------------
# Cosimplicial abelian groups


@dataclass
class ValidationReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class CosimplicialAbGroup:
    top: int
    ranks: tuple
    cofaces: Mapping[tuple, IntMatrix]
    codegs: Mapping[tuple, IntMatrix] = field(default_factory=dict)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.top < 0 or len(self.ranks) != self.top + 1:
            raise ValidationError(f"expected {self.top + 1} ranks, got {len(self.ranks)}", "/ranks")
        for n in range(1, self.top + 1):
            for i in range(n + 1):
                m = self.cofaces.get((n, i))
                if m is None:
                    raise ValidationError(f"missing coface d^{i} into level {n}", f"/coface/{n},{i}")
                if m.shape != (self.ranks[n], self.ranks[n - 1]):
                    raise ValidationError(f"coface d^{i} into level {n} has shape {m.shape}",
                                          f"/coface/{n},{i}")
        for n in range(0, self.top):
            for i in range(n + 1):
                m = self.codegs.get((n, i))
                if m is None:
                    raise ValidationError(f"missing codegeneracy s^{i} into level {n}",
                                          f"/codeg/{n},{i}")
                if m.shape != (self.ranks[n], self.ranks[n + 1]):
                    raise ValidationError(f"codegeneracy s^{i} into level {n} has shape {m.shape}",
                                          f"/codeg/{n},{i}")
        if self.check:
            report = validate_cosimplicial(self)
            if not report.ok:
                raise ValidationError(report.violations[0][1], report.violations[0][0])

    def coface(self, n: int, i: int) -> IntMatrix:
        return self.cofaces[(n, i)]

    def codeg(self, n: int, i: int) -> IntMatrix:
        return self.codegs[(n, i)]


def _identity_violations(top, rank, coface, codeg):
    out = []
    # d^j d^i = d^i d^{j-1}, i < j, as maps X^{n-1} -> X^{n+1}
    for n in range(1, top):
        for j in range(n + 2):
            for i in range(j):
                if coface(n + 1, j) @ coface(n, i) != coface(n + 1, i) @ coface(n, j - 1):
                    out.append((f"/coface/{n + 1},{j}",
                                f"d^{j}d^{i} ≠ d^{i}d^{j - 1} on level {n - 1}"))
    # s^j s^i = s^i s^{j+1}, i ≤ j, as maps X^{n+2} -> X^n
    for n in range(0, top - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                if codeg(n, j) @ codeg(n + 1, i) != codeg(n, i) @ codeg(n + 1, j + 1):
                    out.append((f"/codeg/{n},{j}", f"s^{j}s^{i} ≠ s^{i}s^{j + 1} on level {n + 2}"))
    # s^j d^i on X^n via X^{n+1}
    for n in range(0, top):
        for j in range(n + 1):
            for i in range(n + 2):
                lhs = codeg(n, j) @ coface(n + 1, i)
                if i < j:
                    rhs, name = coface(n, i) @ codeg(n - 1, j - 1), f"d^{i}s^{j - 1}"
                elif i in (j, j + 1):
                    rhs, name = IntMatrix.identity(rank(n)), "id"
                else:
                    rhs, name = coface(n, i - 1) @ codeg(n - 1, j), f"d^{i - 1}s^{j}"
                if lhs != rhs:
                    out.append((f"/codeg/{n},{j}", f"s^{j}d^{i} ≠ {name} on level {n}"))
    return out


def validate_cosimplicial(C) -> ValidationReport:
    """Check every cosimplicial identity; each violation names the identity and level."""
    if isinstance(C, CosimplicialComplex):
        viol = []
        for b in range(C.bmin, C.bmax + 1):
            viol += [(w, f"{msg} (internal degree {b})")
                     for w, msg in validate_cosimplicial(C.groups[b]).violations]
        return ValidationReport(not viol, viol)
    viol = _identity_violations(C.top, lambda n: C.ranks[n], C.coface, C.codeg)
    return ValidationReport(not viol, viol)


def constant_cosimplicial(rank: int, top: int) -> CosimplicialAbGroup:
    I = IntMatrix.identity(rank)
    return CosimplicialAbGroup(top, (rank,) * (top + 1),
                               {(n, i): I for n in range(1, top + 1) for i in range(n + 1)},
                               {(n, i): I for n in range(top) for i in range(n + 1)})


def normalized_basis(C: CosimplicialAbGroup, n: int) -> Lattice:
    """``N^n = ∩_{i<n} ker s^i`` as a lattice in ``X^n``."""
    return _normalized_basis(C, n)


@lru_cache(maxsize=4096)
def _normalized_basis(C: CosimplicialAbGroup, n: int) -> Lattice:
    if n == 0:
        return Lattice.full(C.ranks[0])
    # stacked codegeneracies: one kernel computation instead of n intersections
    rows, cols = 0, [dict() for _ in range(C.ranks[n])]
    for i in range(n):
        s = C.codeg(n - 1, i)
        for j, col in enumerate(s.data):
            for k, x in col:
                cols[j][rows + k] = x
        rows += s.rows
    return kernel_lattice(IntMatrix.from_columns(rows, cols))


def _alternating(C: CosimplicialAbGroup, n: int) -> IntMatrix:
    """``Σ_i (-1)^i d^i: X^n -> X^{n+1}``."""
    total = IntMatrix.zeros(C.ranks[n + 1], C.ranks[n])
    for i in range(n + 2):
        m = C.coface(n + 1, i)
        total = total + (m if i % 2 == 0 else -m)
    return total


def moore_complex(C: CosimplicialAbGroup) -> CochainComplex:
    """Unnormalized complex ``X^0 -> X^1 -> ...`` with the alternating coface sum."""
    return CochainComplex.from_dict({n: C.ranks[n] for n in range(C.top + 1)},
                                    {n: _alternating(C, n) for n in range(C.top)})


def _restrict(M: IntMatrix, dom: Lattice, cod: Lattice) -> IntMatrix:
    cols = []
    for v in dom.vectors():
        c = cod.coords(M.apply(v))
        if c is None:
            raise ArithmeticError("map does not preserve the normalized subgroup")
        cols.append(c)
    return IntMatrix.from_columns(cod.rank, cols)


def normalized_complex(C: CosimplicialAbGroup) -> CochainComplex:
    """The normalized subcomplex written in the HNF bases of ``N^n``."""
    N = [normalized_basis(C, n) for n in range(C.top + 1)]
    d = {n: _restrict(_alternating(C, n), N[n], N[n + 1]) for n in range(C.top)}
    return CochainComplex.from_dict({n: N[n].rank for n in range(C.top + 1)}, d)


# ---------------------------------------------------------------------------
# Cosimplicial complexes


@dataclass(frozen=True, eq=False)
class CosimplicialComplex:
    """A cosimplicial object in bounded cochain complexes.

    ``groups[b]`` is the cosimplicial abelian group in internal degree ``b`` and
    ``d[(n, b)]: X^n_b -> X^n_{b+1}`` the internal differential of level ``n``.
    """

    top: int
    bmin: int
    bmax: int
    groups: Mapping[int, CosimplicialAbGroup]
    d: Mapping[tuple, IntMatrix] = field(default_factory=dict)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        for b in range(self.bmin, self.bmax + 1):
            g = self.groups.get(b)
            if g is None:
                raise ValidationError(f"missing internal degree {b}", f"/groups/{b}")
            if g.top != self.top:
                raise ValidationError(f"internal degree {b} has top {g.top}, expected {self.top}",
                                      f"/groups/{b}")
        for (n, b), m in self.d.items():
            if m.shape != (self.rank(n, b + 1), self.rank(n, b)):
                raise ValidationError(f"internal d at level {n}, degree {b} has shape {m.shape}",
                                      f"/d/{n},{b}")
        if self.check:
            self.validate()

    def rank(self, n: int, b: int) -> int:
        g = self.groups.get(b)
        return g.ranks[n] if g is not None and 0 <= n <= self.top else 0

    def D(self, n: int, b: int) -> IntMatrix:
        m = self.d.get((n, b))
        return m if m is not None else IntMatrix.zeros(self.rank(n, b + 1), self.rank(n, b))

    def _zero_group(self) -> CosimplicialAbGroup:
        return constant_cosimplicial(0, self.top)

    def group(self, b: int) -> CosimplicialAbGroup:
        g = self.groups.get(b)
        return g if g is not None else self._zero_group()

    def validate(self):
        for b in range(self.bmin, self.bmax + 1):
            rep = validate_cosimplicial(self.groups[b])
            if not rep.ok:
                w, msg = rep.violations[0]
                raise ValidationError(f"{msg} (internal degree {b})", f"/groups/{b}{w}")
        for n in range(self.top + 1):
            for b in range(self.bmin, self.bmax):
                if not (self.D(n, b + 1) @ self.D(n, b)).is_zero():
                    raise ValidationError(f"d∘d ≠ 0 at level {n}, degree {b}", f"/d/{n},{b + 1}")
        for b in range(self.bmin - 1, self.bmax + 1):
            lo, hi = self.group(b), self.group(b + 1)
            for n in range(1, self.top + 1):
                for i in range(n + 1):
                    if self.D(n, b) @ lo.coface(n, i) != hi.coface(n, i) @ self.D(n - 1, b):
                        raise ValidationError(f"coface d^{i} into level {n} is not a chain map "
                                              f"in degree {b}", f"/d/{n},{b}")
            for n in range(self.top):
                for i in range(n + 1):
                    if self.D(n, b) @ lo.codeg(n, i) != hi.codeg(n, i) @ self.D(n + 1, b):
                        raise ValidationError(f"codegeneracy s^{i} into level {n} is not a chain "
                                              f"map in degree {b}", f"/d/{n},{b}")

    def level(self, n: int) -> CochainComplex:
        return CochainComplex.from_dict(
            {b: self.rank(n, b) for b in range(self.bmin, self.bmax + 1)},
            {b: self.D(n, b) for b in range(self.bmin, self.bmax)}, check=False)

    def coface_map(self, n: int, i: int) -> ChainMap:
        return ChainMap(self.level(n - 1), self.level(n),
                        {b: self.groups[b].coface(n, i) for b in range(self.bmin, self.bmax + 1)},
                        check=False)

    def codeg_map(self, n: int, i: int) -> ChainMap:
        return ChainMap(self.level(n + 1), self.level(n),
                        {b: self.groups[b].codeg(n, i) for b in range(self.bmin, self.bmax + 1)},
                        check=False)


def cosimplicial_complex_from_group(G: CosimplicialAbGroup, degree: int = 0) -> CosimplicialComplex:
    return CosimplicialComplex(G.top, degree, degree, {degree: G}, {})


def to_double(CC: CosimplicialComplex) -> DoubleComplex:
    """``K^{a,b} = N^a(X_b)``: normalization in the cosimplicial direction, degreewise."""
    ranks, d1, d2 = {}, {}, {}
    for b in range(CC.bmin, CC.bmax + 1):
        G = CC.groups[b]
        N = normalized_complex(G)
        for a in range(CC.top + 1):
            ranks[(a, b)] = N.rank(a)
            if a < CC.top:
                d1[(a, b)] = N.diff(a)
            if b < CC.bmax:
                d2[(a, b)] = _restrict(CC.D(a, b), normalized_basis(G, a),
                                       normalized_basis(CC.groups[b + 1], a))
    return DoubleComplex(CC.top, CC.bmin, CC.bmax, ranks, d1, d2)


def tot_truncated(CC: CosimplicialComplex, n: int) -> FilteredComplex:
    """``Tot_{(n)}``: stupid filtration on Tot of columns ``≤ n`` of ``to_double(CC)``."""
    if not 0 <= n <= CC.top:
        raise ValueError(f"n = {n} outside 0..{CC.top}")
    return stupid_filtration(to_double(CC).columns_upto(n))


def tot_layer(CC: CosimplicialComplex, n: int) -> CochainComplex:
    """Normalized column ``n`` shifted so that ``H^k(layer) = H^{k-n}(N X^n)``."""
    return shift(to_double(CC).column(n), -n)


def termwise_truncation_with_inclusions(CC: CosimplicialComplex, m: int):
    """Apply ``τ_{≤ -m}`` to every level; also return the degree ``-m`` inclusion matrices."""
    t = -m
    groups, d, inc = {}, {}, {}
    if t < CC.bmin:
        Z = constant_cosimplicial(0, CC.top)
        return CosimplicialComplex(CC.top, 0, 0, {0: Z}, {}), {}
    hi = min(CC.bmax, t)
    for b in range(CC.bmin, hi + 1):
        G = CC.groups[b]
        if b < t:
            groups[b] = G
            continue
        K = [kernel_lattice(CC.D(n, b)) for n in range(CC.top + 1)]
        for n in range(CC.top + 1):
            inc[n] = K[n].matrix()
        cof = {(n, i): _restrict(G.coface(n, i), K[n - 1], K[n])
               for n in range(1, CC.top + 1) for i in range(n + 1)}
        cod = {(n, i): _restrict(G.codeg(n, i), K[n + 1], K[n])
               for n in range(CC.top) for i in range(n + 1)}
        groups[b] = CosimplicialAbGroup(CC.top, tuple(k.rank for k in K), cof, cod, check=False)
    for (n, b), mat in CC.d.items():
        if b + 1 < hi or (b + 1 == hi and hi < t):
            d[(n, b)] = mat
        elif b + 1 == hi == t:
            K = kernel_lattice(CC.D(n, t))
            cols = [K.coords(v) for v in mat.columns()]
            d[(n, b)] = IntMatrix.from_columns(K.rank, cols)
    return CosimplicialComplex(CC.top, CC.bmin, hi, groups, d, check=False), inc


def termwise_truncation(CC: CosimplicialComplex, m: int) -> CosimplicialComplex:
    """Levelwise canonical truncation ``τ_{≤ -m}``; structure maps restricted."""
    T, _ = termwise_truncation_with_inclusions(CC, m)
    T.validate()
    return T


# ---------------------------------------------------------------------------
# Bar construction


def check_group_table(table: Sequence[Sequence[int]]) -> int:
    """Validate a multiplication table and return the identity element."""
    n = len(table)
    if n == 0 or any(len(row) != n for row in table):
        raise ValidationError("group table must be a nonempty square array", "/group")
    for i, row in enumerate(table):
        for j, x in enumerate(row):
            if not 0 <= x < n:
                raise ValidationError(f"entry {x} out of range", f"/group/{i}/{j}")
    e = next((i for i in range(n) if all(table[i][j] == j and table[j][i] == j for j in range(n))),
             None)
    if e is None:
        raise ValidationError("no identity element", "/group")
    for a in range(n):
        if not any(table[a][b] == e for b in range(n)):
            raise ValidationError(f"element {a} has no inverse", f"/group/{a}")
        for b in range(n):
            for c in range(n):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    raise ValidationError(f"associativity fails for ({a},{b},{c})", f"/group/{a}/{b}")
    return e


def cyclic_group(m: int) -> list[list[int]]:
    return [[(i + j) % m for j in range(m)] for i in range(m)]


def product_group(t1, t2) -> list[list[int]]:
    n2 = len(t2)
    n = len(t1) * n2
    return [[t1[a // n2][b // n2] * n2 + t2[a % n2][b % n2] for b in range(n)] for a in range(n)]


def _pullback(src_tuples, dst_index, phi) -> IntMatrix:
    """Matrix of ``f ↦ f∘φ`` from functions on the target set to functions on ``src_tuples``."""
    cols = [dict() for _ in range(len(dst_index))]
    for row, t in enumerate(src_tuples):
        cols[dst_index[phi(t)]][row] = 1
    return IntMatrix.from_columns(len(src_tuples), cols)


def bar_cosimplicial(table: Sequence[Sequence[int]], top: int) -> CosimplicialAbGroup:
    """Inhomogeneous cochains ``C^n = Map(G^n, Z)`` with trivial action."""
    e = check_group_table(table)
    order = len(table)
    tuples = [list(itertools.product(range(order), repeat=n)) for n in range(top + 2)]
    index = [{t: k for k, t in enumerate(ts)} for ts in tuples]

    def face(n, i):
        # φ_i: G^n -> G^{n-1}
        if i == 0:
            return lambda t: t[1:]
        if i == n:
            return lambda t: t[:-1]
        return lambda t: t[:i - 1] + (table[t[i - 1]][t[i]],) + t[i + 1:]

    def degen(j):
        return lambda t: t[:j] + (e,) + t[j:]

    cof = {(n, i): _pullback(tuples[n], index[n - 1], face(n, i))
           for n in range(1, top + 1) for i in range(n + 1)}
    cod = {(n, j): _pullback(tuples[n], index[n + 1], degen(j))
           for n in range(top) for j in range(n + 1)}
    return CosimplicialAbGroup(top, tuple(len(tuples[n]) for n in range(top + 1)), cof, cod)


def bar_cosimplicial_complex(table: Sequence[Sequence[int]], modulus: int,
                             top: int) -> CosimplicialComplex:
    """Cochains with coefficients in ``Z/modulus`` via the presentation ``Z --×m--> Z``.

    Internal degrees ``-1, 0``; for ``modulus == 0`` the coefficient group is ``Z``.
    """
    G = bar_cosimplicial(table, top)
    if modulus == 0:
        return cosimplicial_complex_from_group(G)
    if modulus < 0:
        raise ValidationError("modulus must be nonnegative", "/coeff")
    d = {(n, -1): IntMatrix.identity(G.ranks[n]).scale(modulus) for n in range(top + 1)}
    return CosimplicialComplex(top, -1, 0, {-1: G, 0: G}, d)


# ---------------------------------------------------------------------------
# Random generators


def _surjections(n: int):
    """Monotone surjections ``[n] -> [k]`` as tuples, all ``k``."""
    out = []
    for steps in itertools.product((0, 1), repeat=n):
        s, v = [0], 0
        for x in steps:
            v += x
            s.append(v)
        out.append(tuple(s))
    return out


def _dold_kan_block(sigma, theta):
    """Factor ``σθ = εη`` and classify ``ε``: (η, 'id' | 'last' | None)."""
    comp = tuple(sigma[x] for x in theta)
    image = sorted(set(comp))
    k = sigma[-1]
    eta = tuple(image.index(v) for v in comp)
    if len(image) == k + 1:
        return eta, "id"
    if image == list(range(k)):
        return eta, "last"
    return eta, None


def dold_kan(K: DoubleComplex, top: int) -> CosimplicialComplex:
    """Cosimplicial complex whose normalization recovers ``K`` in columns ``0..top``.

    The dual of the Dold–Kan functor applied degreewise in ``b``: level ``n`` is
    ``⊕_{σ:[n]↠[k]} K^{k,*}``.
    """
    sur = [_surjections(n) for n in range(top + 1)]
    groups, dmaps = {}, {}

    def layout(n, b):
        offs, off = {}, 0
        for s in sur[n]:
            offs[s] = off
            off += K.rank(s[-1], b) if s[-1] <= top else 0
        return offs, off

    for b in range(K.bmin, K.bmax + 1):
        lay = [layout(n, b) for n in range(top + 1)]

        def structure(n_src, n_dst, theta):
            # cosimplicial map X^{n_src} -> X^{n_dst} dual to θ: [n_src] -> [n_dst]
            (dst_off, dst_size), (src_off, src_size) = lay[n_dst], lay[n_src]
            cols = [dict() for _ in range(src_size)]
            for sigma in sur[n_dst]:
                k = sigma[-1]
                eta, kind = _dold_kan_block(sigma, theta)
                if kind is None:
                    continue
                ro, co = dst_off[sigma], src_off[eta]
                if kind == "id":
                    for j in range(K.rank(k, b)):
                        cols[co + j][ro + j] = 1
                else:
                    m = K.D1(k - 1, b)
                    for j, col in enumerate(m.data):
                        for i, x in col:
                            cols[co + j][ro + i] = x
            return IntMatrix.from_columns(dst_size, cols)

        cof = {}
        for n in range(1, top + 1):
            for i in range(n + 1):
                theta = tuple(x if x < i else x + 1 for x in range(n))
                cof[(n, i)] = structure(n - 1, n, theta)
        cod = {}
        for n in range(top):
            for j in range(n + 1):
                theta = tuple(x if x <= j else x - 1 for x in range(n + 2))
                cod[(n, j)] = structure(n + 1, n, theta)
        groups[b] = CosimplicialAbGroup(top, tuple(lay[n][1] for n in range(top + 1)), cof, cod,
                                        check=False)
        if b < K.bmax:
            lay1 = [layout(n, b + 1) for n in range(top + 1)]
            for n in range(top + 1):
                blocks = {}
                for idx, s in enumerate(sur[n]):
                    blocks[(idx, idx)] = K.D2(s[-1], b)
                dmaps[(n, b)] = IntMatrix.block([K.rank(s[-1], b + 1) for s in sur[n]],
                                                [K.rank(s[-1], b) for s in sur[n]], blocks)
    return CosimplicialComplex(top, K.bmin, K.bmax, groups, dmaps)


def _random_unimodular(rng: random.Random, n: int, steps: int = 3, bound: int = 2) -> IntMatrix:
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-bound, bound)
        rows[i] = [x + c * y for x, y in zip(rows[i], rows[j])]
    if n and rng.random() < 0.5:
        k = rng.randrange(n)
        rows[k] = [-x for x in rows[k]]
    return IntMatrix.from_rows(rows, n)


def random_double_complex(rng: random.Random, columns: int, bmin: int, bmax: int,
                          summands: int, max_rank: int = 4, max_mult: int = 3,
                          max_entry: int = 5) -> DoubleComplex:
    """Direct sum of elementary bicomplexes after a per-bidegree change of basis.

    Elementary pieces: a single ``Z``, horizontal ``Z --×m--> Z``, vertical
    ``Z --×m--> Z``, and the commuting square of identities.  Draws are redone
    until every rank is at most ``max_rank`` and every entry at most ``max_entry``.
    """
    for _ in range(200):
        pieces = []
        ranks: dict = {}
        for _ in range(summands):
            kind = rng.choice(("point", "hor", "ver", "square"))
            a = rng.randrange(columns)
            b = rng.randint(bmin, bmax)
            m = rng.choice([1, 1] + list(range(2, max_mult + 1)))
            if kind == "hor" and a + 1 < columns:
                cells = [(a, b), (a + 1, b)]
            elif kind == "ver" and b + 1 <= bmax:
                cells = [(a, b), (a, b + 1)]
            elif kind == "square" and a + 1 < columns and b + 1 <= bmax:
                cells = [(a, b), (a + 1, b), (a, b + 1), (a + 1, b + 1)]
                m = 1
            else:
                kind, cells = "point", [(a, b)]
            pos = {}
            for c in cells:
                pos[c] = ranks.get(c, 0)
                ranks[c] = pos[c] + 1
            pieces.append((kind, cells, pos, m))
        if any(r > max_rank for r in ranks.values()):
            continue
        d1 = {k: [dict() for _ in range(r)] for k, r in ranks.items()}
        d2 = {k: [dict() for _ in range(r)] for k, r in ranks.items()}
        for kind, cells, pos, m in pieces:
            if kind == "hor":
                (c0, c1) = cells
                d1[c0][pos[c0]][pos[c1]] = m
            elif kind == "ver":
                (c0, c1) = cells
                d2[c0][pos[c0]][pos[c1]] = m
            elif kind == "square":
                c00, c10, c01, c11 = cells
                d1[c00][pos[c00]][pos[c10]] = 1
                d1[c01][pos[c01]][pos[c11]] = 1
                d2[c00][pos[c00]][pos[c01]] = 1
                d2[c10][pos[c10]][pos[c11]] = 1

        def mat(table, key, step):
            tgt = (key[0] + step[0], key[1] + step[1])
            return IntMatrix.from_columns(ranks.get(tgt, 0), table[key])

        D1 = {k: mat(d1, k, (1, 0)) for k in ranks}
        D2 = {k: mat(d2, k, (0, 1)) for k in ranks}
        # basis change P_{a,b}: conjugate every map
        P = {k: _random_unimodular(rng, r) for k, r in ranks.items()}
        Pinv = {k: _inverse_unimodular(p) for k, p in P.items()}
        D1 = {k: (P[(k[0] + 1, k[1])] @ m @ Pinv[k]) if (k[0] + 1, k[1]) in P else m
              for k, m in D1.items()}
        D2 = {k: (P[(k[0], k[1] + 1)] @ m @ Pinv[k]) if (k[0], k[1] + 1) in P else m
              for k, m in D2.items()}
        if max((m.max_abs() for m in list(D1.values()) + list(D2.values())), default=0) > max_entry:
            continue
        return DoubleComplex(columns - 1, bmin, bmax, ranks, D1, D2)
    raise RuntimeError("could not draw a bicomplex within the size bounds")


def _inverse_unimodular(P: IntMatrix) -> IntMatrix:
    from .zlinalg import solve
    n = P.rows
    cols = P.columns()
    inv = []
    for j in range(n):
        x = solve(cols, {j: 1})
        if x is None:
            raise ArithmeticError("matrix is not unimodular")
        inv.append(x)
    return IntMatrix.from_columns(n, inv)


def _ordered_simplicial_set(rng: random.Random, vertices: int, top: int):
    """Nondegenerate faces of a random simplicial complex on ordered vertices, plus its
    degenerate simplices through dimension ``top + 1``."""
    facets = []
    for _ in range(rng.randint(1, 3)):
        size = rng.randint(1, min(3, vertices))
        facets.append(tuple(sorted(rng.sample(range(vertices), size))))
    allowed = set()
    for f in facets:
        for r in range(1, len(f) + 1):
            allowed.update(itertools.combinations(f, r))
    simplices = []
    for n in range(top + 2):
        level = [s for s in itertools.combinations_with_replacement(range(vertices), n + 1)
                 if tuple(sorted(set(s))) in allowed]
        simplices.append(level)
    return simplices


def simplicial_cochains(simplices, top: int) -> CosimplicialAbGroup:
    """Cochains ``Z^{S_n}`` on a simplicial set given by monotone vertex sequences."""
    index = [{s: k for k, s in enumerate(level)} for level in simplices]
    cof = {(n, i): _pullback(simplices[n], index[n - 1], lambda s, i=i: s[:i] + s[i + 1:])
           for n in range(1, top + 1) for i in range(n + 1)}
    cod = {(n, j): _pullback(simplices[n], index[n + 1], lambda s, j=j: s[:j + 1] + s[j:])
           for n in range(top) for j in range(n + 1)}
    return CosimplicialAbGroup(top, tuple(len(simplices[n]) for n in range(top + 1)), cof, cod)


def random_cosimplicial_complex(seed: int, top: int | None = None) -> CosimplicialComplex:
    """Deterministic random cosimplicial complex.

    Even seeds use the dual Dold–Kan construction on a random bicomplex, odd
    seeds tensor cochains on a random simplicial set with a small complex.
    """
    rng = random.Random(seed)
    if top is None:
        top = rng.randint(1, 3)
    if seed % 2 == 0:
        K = random_double_complex(rng, top + 1, -1, 1, rng.randint(1, 5), max_rank=2)
        return dold_kan(K, top)
    simplices = _ordered_simplicial_set(rng, rng.randint(1, 3), top)
    G = simplicial_cochains(simplices, top)
    choice = rng.choice(("plain", "mod", "acyclic"))
    if choice == "plain":
        return cosimplicial_complex_from_group(G, rng.randint(-1, 1))
    m = rng.randint(2, 4) if choice == "mod" else 1
    d = {(n, -1): IntMatrix.identity(G.ranks[n]).scale(m) for n in range(top + 1)}
    return CosimplicialComplex(top, -1, 0, {-1: G, 0: G}, d)


# ---------------------------------------------------------------------------
# Punctured cubes


@dataclass(frozen=True, eq=False)
class PuncturedCubeDiagram:
    """A functor from nonempty subsets of ``elements`` to cochain complexes.

    ``maps[(I, j)]`` is the map ``value[I] -> value[I ∪ {j}]`` for ``j ∉ I``.
    """

    elements: tuple
    value: Mapping[frozenset, CochainComplex]
    maps: Mapping[tuple, ChainMap]
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.check:
            self.validate()

    @property
    def n(self) -> int:
        return len(self.elements) - 1

    def subsets(self):
        for k in range(1, len(self.elements) + 1):
            for I in itertools.combinations(self.elements, k):
                yield frozenset(I)

    def validate(self):
        for I in self.subsets():
            rest = [x for x in self.elements if x not in I]
            for j, k in itertools.combinations(rest, 2):
                a = self.maps[(I | {j}, k)].compose(self.maps[(I, j)])
                b = self.maps[(I | {k}, j)].compose(self.maps[(I, k)])
                if a != b:
                    raise ValidationError(f"square at {sorted(I)} adding {j},{k} does not commute",
                                          "/maps")

    def map_between(self, I: frozenset, J: frozenset) -> ChainMap:
        """The structure map for ``I ⊆ J`` (composite along increasing elements)."""
        if not I <= J:
            raise ValueError("not an inclusion")
        m = None
        cur = I
        for j in sorted(J - I):
            step = self.maps[(cur, j)]
            m = step if m is None else step.compose(m)
            cur = cur | {j}
        if m is None:
            return identity_map(self.value[I])
        return m


def cube_from_cosimplicial(CC: CosimplicialComplex, n: int) -> PuncturedCubeDiagram:
    """Subsets of ``{1..n+1}`` in the opposite order; ``value(I)`` is level ``|I|-1``.

    Adding ``j`` to ``I`` is the coface ``d^pos`` with ``pos`` the number of
    elements of ``I ∪ {j}`` greater than ``j``.
    """
    if not 0 <= n <= CC.top:
        raise ValueError(f"n = {n} outside 0..{CC.top}")
    elements = tuple(range(1, n + 2))
    levels = [CC.level(k) for k in range(n + 1)]
    cof = {}
    value, maps = {}, {}
    for k in range(1, n + 2):
        for I in itertools.combinations(elements, k):
            I = frozenset(I)
            value[I] = levels[k - 1]
            for j in elements:
                if j in I:
                    continue
                pos = sum(1 for x in I if x > j)
                key = (k, pos)
                if key not in cof:
                    cof[key] = ChainMap(levels[k - 1], levels[k], {
                        b: CC.groups[b].coface(k, pos) for b in range(CC.bmin, CC.bmax + 1)},
                        check=False)
                maps[(I, j)] = cof[key]
    return PuncturedCubeDiagram(elements, value, maps)


def holim_direct(D: PuncturedCubeDiagram) -> CochainComplex:
    """Total fibre ``⊕_{I≠∅} X(I)[1-|I|]``.

    The internal differential of ``X(I)`` carries ``(-1)^{|I|-1}`` and the map
    ``I -> I ∪ {j}`` carries ``(-1)^{#{i ∈ I : i < j}}``.
    """
    subsets = list(D.subsets())
    degs = set()
    for I in subsets:
        C = D.value[I]
        degs.update(b + len(I) - 1 for b in C.degrees() if C.rank(b))
    if not degs:
        return CochainComplex.zero()
    lo, hi = min(degs), max(degs)

    def layout(m):
        offs, off = {}, 0
        for I in subsets:
            r = D.value[I].rank(m + 1 - len(I))
            offs[I] = (off, r)
            off += r
        return offs, off

    lays = {m: layout(m) for m in range(lo, hi + 2)}
    ranks, d = {}, {}
    for m in range(lo, hi + 1):
        (src, size), (dst, dsize) = lays[m], lays[m + 1]
        ranks[m] = size
        cols = [dict() for _ in range(size)]
        for I in subsets:
            off, r = src[I]
            if not r:
                continue
            b = m + 1 - len(I)
            sign = -1 if (len(I) - 1) % 2 else 1
            inner = D.value[I].diff(b)
            o2 = dst[I][0]
            for j, col in enumerate(inner.data):
                for i, x in col:
                    cols[off + j][o2 + i] = sign * x
            for e in D.elements:
                if e in I:
                    continue
                J = I | {e}
                s = -1 if sum(1 for x in I if x < e) % 2 else 1
                f = D.maps[(I, e)].at(b)
                o3 = dst[J][0]
                for j, col in enumerate(f.data):
                    for i, x in col:
                        cols[off + j][o3 + i] = cols[off + j].get(o3 + i, 0) + s * x
        d[m] = IntMatrix.from_columns(dsize, cols)
    return CochainComplex.from_dict(ranks, d)


class _RecursiveHolim:
    """Recursive homotopy limit by splitting off the largest element.

    Every diagram met in the recursion is a restriction of the input of the
    form ``I ↦ X(I ∪ E)`` or the constant diagram ``I ↦ X(J)`` over an initial
    segment of the elements; these descriptors make memoisation possible.
    """

    def __init__(self, D: PuncturedCubeDiagram):
        self.D = D
        self.elements = tuple(sorted(D.elements))
        self._holim = {}
        self._phi = {}
        self._nat = {}

    def value(self, desc, I):
        k, kind, S = desc
        return self.D.value[I | S if kind == "sub" else S]

    def target(self, desc, I):
        return I | desc[2] if desc[1] == "sub" else desc[2]

    def holim(self, desc) -> CochainComplex:
        if desc in self._holim:
            return self._holim[desc]
        k = desc[0]
        if k == 1:
            out = self.value(desc, frozenset(self.elements[:1]))
        else:
            out = hofib(self.phi(desc))
        self._holim[desc] = out
        return out

    def parts(self, desc):
        k, kind, S = desc
        e = self.elements[k - 1]
        if kind == "const":
            minus = plus = const = (k - 1, "const", S)
        else:
            minus = (k - 1, "sub", S)
            plus = (k - 1, "sub", S | {e})
            const = (k - 1, "const", S | {e})
        return minus, const, plus

    def phi(self, desc) -> ChainMap:
        """``holim(X^-) ⊕ holim(c X_e) -> holim(X^+)`` as ``(α, -β)``."""
        if desc in self._phi:
            return self._phi[desc]
        minus, const, plus = self.parts(desc)
        a = self.nat(minus, plus)
        b = self.nat(const, plus)
        src = direct_sum(a.dom, b.dom)
        comps = {}
        for n in src.degrees():
            comps[n] = IntMatrix.hstack([a.at(n), -b.at(n)], rows=a.cod.rank(n))
        out = ChainMap(src, a.cod, comps, check=False)
        self._phi[desc] = out
        return out

    def nat(self, src, dst) -> ChainMap:
        """Induced map of holims for the natural transformation ``X(h_src(I) ⊆ h_dst(I))``."""
        key = (src, dst)
        if key in self._nat:
            return self._nat[key]
        k = src[0]
        if k == 1:
            I = frozenset(self.elements[:1])
            out = self.D.map_between(self.target(src, I), self.target(dst, I))
        else:
            sm, sc, sp = self.parts(src)
            dm, dc, dp = self.parts(dst)
            a = direct_sum_map(self.nat(sm, dm), self.nat(sc, dc))
            b = self.nat(sp, dp)
            out = shift_map(cone_map(self.phi(src), self.phi(dst), a, b), -1)
        self._nat[key] = out
        return out


def holim_recursive(D: PuncturedCubeDiagram) -> CochainComplex:
    """Homotopy limit as the homotopy fibre of the map between the two sub-cube limits."""
    R = _RecursiveHolim(D)
    return R.holim((len(R.elements), "sub", frozenset()))


def cube_holim(D: PuncturedCubeDiagram, strategy: str = "direct") -> CochainComplex:
    if strategy == "direct":
        return holim_direct(D)
    if strategy == "recursive":
        return holim_recursive(D)
    raise ValueError(f"unknown strategy {strategy!r}")


def cohomology_table(C: CochainComplex, degrees) -> dict:
    return {k: cohomology(C, k).invariants() for k in degrees}
