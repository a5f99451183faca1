"""Exact integer linear algebra.

Matrices are stored column-sparse with Python ints, so entry growth during
reduction is never a concern.  Sublattices of ``Z^n`` are kept in a canonical
column Hermite normal form, which makes lattice equality a plain comparison
of stored tuples.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Sequence

Vec = dict  # sparse column: {row: nonzero int}


class ContainmentError(ValueError):
    """A map does not carry cycles into cycles or boundaries into boundaries."""


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _axpy(v: Vec, c: int, w: Vec) -> Vec:
    """``v + c*w`` as a new sparse vector."""
    if not c:
        return dict(v)
    out = dict(v)
    for k, x in w.items():
        y = out.get(k, 0) + c * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def _lincomb(a: int, v: Vec, b: int, w: Vec) -> Vec:
    out: Vec = {}
    if a:
        for k, x in v.items():
            out[k] = a * x
    if b:
        for k, x in w.items():
            y = out.get(k, 0) + b * x
            if y:
                out[k] = y
            else:
                out.pop(k, None)
    return out


def _neg(v: Vec) -> Vec:
    return {k: -x for k, x in v.items()}


def _freeze(v: Vec) -> tuple:
    return tuple(sorted(v.items()))


# ---------------------------------------------------------------------------
# IntMatrix


@dataclass(frozen=True)
class IntMatrix:
    """An integer matrix of shape ``rows x cols`` stored by sparse columns."""

    rows: int
    cols: int
    data: tuple = field(repr=False)  # per column: sorted ((row, value), ...)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.rows, self.cols, self.data))
            object.__setattr__(self, "_hash", h)
        return h

    @classmethod
    def from_columns(cls, rows: int, columns: Iterable[Mapping[int, int]]) -> "IntMatrix":
        data = tuple(_freeze({k: int(x) for k, x in c.items() if x}) for c in columns)
        for col in data:
            for k, _ in col:
                if not 0 <= k < rows:
                    raise ValueError(f"row index {k} out of range for {rows} rows")
        return cls(rows, len(data), data)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "IntMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if nrows else 0
        cols: list[Vec] = [{} for _ in range(ncols)]
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged matrix rows")
            for j, x in enumerate(row):
                x = int(x)
                if x:
                    cols[j][i] = x
        return cls.from_columns(nrows, cols)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, ((),) * cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple((((j, 1),)) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls.from_columns(n, ({j: v} for j, v in enumerate(values)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> tuple[int, ...]:
        """Dense row-major entries."""
        return tuple(x for row in self.to_rows() for x in row)

    def column(self, j: int) -> Vec:
        return dict(self.data[j])

    def columns(self) -> list[Vec]:
        return [dict(c) for c in self.data]

    def to_rows(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, col in enumerate(self.data):
            for i, x in col:
                out[i][j] = x
        return out

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        for k, x in self.data[j]:
            if k == i:
                return x
        return 0

    def is_zero(self) -> bool:
        return all(not c for c in self.data)

    def apply(self, v: Mapping[int, int]) -> Vec:
        """Matrix times sparse vector."""
        out: Vec = {}
        for j, c in v.items():
            if not c:
                continue
            for i, x in self.data[j]:
                y = out.get(i, 0) + c * x
                if y:
                    out[i] = y
                else:
                    del out[i]
        return out

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return IntMatrix.from_columns(self.rows, (self.apply(dict(c)) for c in other.data))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return IntMatrix.from_columns(
            self.rows, (_axpy(dict(a), 1, dict(b)) for a, b in zip(self.data, other.data))
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple((i, -x) for i, x in c) for c in self.data))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, k: int) -> "IntMatrix":
        if k == 0:
            return IntMatrix.zeros(self.rows, self.cols)
        return IntMatrix(self.rows, self.cols, tuple(tuple((i, k * x) for i, x in c) for c in self.data))

    def transpose(self) -> "IntMatrix":
        cols: list[Vec] = [{} for _ in range(self.rows)]
        for j, col in enumerate(self.data):
            for i, x in col:
                cols[i][j] = x
        return IntMatrix.from_columns(self.cols, cols)

    def max_abs(self) -> int:
        return max((abs(x) for c in self.data for _, x in c), default=0)

    @staticmethod
    def hstack(blocks: Sequence["IntMatrix"], rows: int | None = None) -> "IntMatrix":
        if rows is None:
            rows = blocks[0].rows if blocks else 0
        for b in blocks:
            if b.rows != rows:
                raise ValueError("hstack row mismatch")
        return IntMatrix(rows, sum(b.cols for b in blocks), tuple(c for b in blocks for c in b.data))

    @staticmethod
    def block(row_sizes: Sequence[int], col_sizes: Sequence[int],
              blocks: Mapping[tuple[int, int], "IntMatrix"]) -> "IntMatrix":
        """Assemble a block matrix; missing blocks are zero."""
        roff = [0]
        for s in row_sizes:
            roff.append(roff[-1] + s)
        cols: list[Vec] = []
        for bj, w in enumerate(col_sizes):
            for j in range(w):
                col: Vec = {}
                for bi, h in enumerate(row_sizes):
                    m = blocks.get((bi, bj))
                    if m is None:
                        continue
                    if m.shape != (h, w):
                        raise ValueError(f"block ({bi},{bj}) has shape {m.shape}, expected {(h, w)}")
                    for i, x in m.data[j]:
                        col[roff[bi] + i] = x
                cols.append(col)
        return IntMatrix.from_columns(roff[-1], cols)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "IntMatrix":
        pos = {r: k for k, r in enumerate(row_idx)}
        return IntMatrix.from_columns(
            len(row_idx),
            ({pos[i]: x for i, x in self.data[j] if i in pos} for j in col_idx),
        )


# ---------------------------------------------------------------------------
# Echelon core


def _echelon(columns: Sequence[Vec], tracks: Sequence[Vec] | None = None,
             reduce: bool = True):
    """Column-reduce ``columns`` to Hermite form.

    Returns ``(pivots, kernel)``: ``pivots`` is a list of ``(row, column,
    track)`` sorted by pivot row, and ``kernel`` lists the tracks of columns
    that reduced to zero.  Tracks undergo the same unimodular column
    operations as the columns.
    """
    track = tracks is not None
    piv: dict[int, list] = {}
    kernel: list[Vec] = []
    for idx, col in enumerate(columns):
        v = {k: x for k, x in col.items() if x}
        t = dict(tracks[idx]) if track else None
        while v:
            r = min(v)
            entry = piv.get(r)
            if entry is None:
                if v[r] < 0:
                    v = _neg(v)
                    if track:
                        t = _neg(t)
                piv[r] = [v, t]
                break
            w, tw = entry
            a, b = v[r], w[r]
            if a % b == 0:
                q = a // b
                v = _axpy(v, -q, w)
                if track:
                    t = _axpy(t, -q, tw)
            else:
                g, x, y = _xgcd(a, b)
                new_w = _lincomb(x, v, y, w)
                new_v = _lincomb(b // g, v, -(a // g), w)
                if track:
                    new_tw = _lincomb(x, t, y, tw)
                    t = _lincomb(b // g, t, -(a // g), tw)
                    entry[1] = new_tw
                entry[0] = new_w
                v = new_v
        else:
            if track:
                kernel.append(t)
    rows = sorted(piv)
    cols = [piv[r][0] for r in rows]
    trs = [piv[r][1] for r in rows]
    if reduce:
        for l, rl in enumerate(rows):
            pl = cols[l][rl]
            for j in range(l):
                c = cols[j].get(rl)
                if c is None:
                    continue
                q = c // pl
                if q:
                    cols[j] = _axpy(cols[j], -q, cols[l])
                    if track:
                        trs[j] = _axpy(trs[j], -q, trs[l])
    return list(zip(rows, cols, trs)), kernel


def _unit(j: int) -> Vec:
    return {j: 1}


def _normalize(w: Vec, lo: int, piv: dict) -> Vec:
    """Reduce the entries of ``w`` at pivot rows ``> lo`` into ``[0, pivot)``."""
    heap = [k for k in w if k > lo and k in piv]
    heapq.heapify(heap)
    while heap:
        s = heapq.heappop(heap)
        c = w.get(s)
        if not c:
            continue
        p = piv[s]
        q = c // p[s]
        if q:
            w = _axpy(w, -q, p)
            for k in p:
                if k > s and k in piv:
                    heapq.heappush(heap, k)
    return w


def _reduced_echelon(columns: Iterable[Mapping[int, int]]) -> list[Vec]:
    """Canonical column HNF of the span, sorted by pivot row.

    The partial basis is kept fully reduced after every insertion; reducing
    only at the end lets intermediate entries grow without bound.
    """
    piv: dict[int, Vec] = {}

    def install(r, w):
        w = _normalize(w, r, piv)
        piv[r] = w
        # earlier pivots must be reduced at row r again
        for s in sorted(piv):
            if s >= r:
                break
            u = piv[s]
            if u.get(r):
                piv[s] = _normalize(u, s, piv)

    for col in columns:
        v = {k: x for k, x in col.items() if x}
        while v:
            r = min(v)
            w = piv.get(r)
            if w is None:
                install(r, v if v[r] > 0 else _neg(v))
                break
            a, b = v[r], w[r]
            if a % b == 0:
                v = _axpy(v, -(a // b), w)
                continue
            g, x, y = _xgcd(a, b)
            v, new_w = _lincomb(b // g, v, -(a // g), w), _lincomb(x, v, y, w)
            install(r, new_w)
    return [piv[r] for r in sorted(piv)]


def _lincomb_many(columns: Sequence[Vec], coeffs: Mapping[int, int]) -> Vec:
    out: Vec = {}
    for j, c in coeffs.items():
        for k, x in columns[j].items():
            y = out.get(k, 0) + c * x
            if y:
                out[k] = y
            else:
                out.pop(k, None)
    return out


def _int_kernel(columns: Sequence[Mapping[int, int]]) -> list[Vec]:
    """A basis of the integer kernel of the matrix with the given columns.

    Variables with a ``±1`` coefficient are eliminated first (fewest fill-in
    wins), which keeps entries small; whatever is left goes through the xgcd
    echelon.  The basis is saturated since eliminated variables are integral
    functions of the others.
    """
    rows: dict[int, dict] = {}
    for j, c in enumerate(columns):
        for i, x in c.items():
            if x:
                rows.setdefault(i, {})[j] = x
    col_rows: dict[int, set] = {}
    for i, row in rows.items():
        for j in row:
            col_rows.setdefault(j, set()).add(i)
    solved = []  # (j, {k: coeff}) meaning x_j = sum coeff * x_k
    while True:
        best = None
        for i, row in rows.items():
            for j, x in row.items():
                if x == 1 or x == -1:
                    cost = (len(row) - 1) * (len(col_rows[j]) - 1)
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
                        if cost == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, i, j = best
        prow = rows.pop(i)
        s = prow[j]
        for k in prow:
            col_rows[k].discard(i)
        expr = {k: -s * x for k, x in prow.items() if k != j}
        solved.append((j, expr))
        for l in list(col_rows[j]):
            row = rows[l]
            f = row[j]
            # row_l -= f * s * prow eliminates x_j since s * s = 1
            for k, x in prow.items():
                y = row.get(k, 0) - f * s * x
                if y:
                    if k not in row:
                        col_rows[k].add(l)
                    row[k] = y
                elif k in row:
                    del row[k]
                    col_rows[k].discard(l)
            if not row:
                del rows[l]
        del col_rows[j]
    eliminated = {j for j, _ in solved}
    free = [j for j in range(len(columns)) if j not in eliminated]
    pos = {j: t for t, j in enumerate(free)}
    sub = [{} for _ in free]
    for i, row in rows.items():
        for k, x in row.items():
            sub[pos[k]][i] = x
    _, ker = _echelon(sub, [_unit(t) for t in range(len(free))], reduce=False)
    out = []
    for v in ker:
        x = {free[t]: c for t, c in v.items()}
        for j, expr in reversed(solved):
            val = sum(c * x.get(k, 0) for k, c in expr.items())
            if val:
                x[j] = val
        out.append(x)
    return out


def hnf(M: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Column Hermite normal form ``H = M @ U`` with ``U`` unimodular.

    Nonzero columns of ``H`` come first, sorted by pivot row, each with a
    positive pivot and entries in later pivot rows reduced into
    ``[0, pivot)``; the remaining columns are zero.
    """
    pivots, kernel = _echelon(M.columns(), [_unit(j) for j in range(M.cols)])
    H = IntMatrix.from_columns(M.rows, [c for _, c, _ in pivots] + [{}] * len(kernel))
    U = IntMatrix.from_columns(M.cols, [t for _, _, t in pivots] + kernel)
    return H, U


def snf(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form ``D = U @ M @ V`` with ``U``, ``V`` unimodular."""
    m, n = M.rows, M.cols
    A = M.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, c):  # row_dst += c * row_src
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        done = False
            if not done:
                best = None
                for i in range(t, m):
                    if A[i][t] and (best is None or abs(A[i][t]) < abs(A[best][t])):
                        best = i
                if best != t and best is not None and (
                        abs(A[best][t]) < abs(A[t][t])):
                    swap_rows(t, best)
                    continue
                bestc = None
                for j in range(t, n):
                    if A[t][j] and (bestc is None or abs(A[t][j]) < abs(A[t][bestc])):
                        bestc = j
                if bestc != t and bestc is not None:
                    swap_cols(t, bestc)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return IntMatrix.from_rows(A, n), IntMatrix.from_rows(U, m), IntMatrix.from_rows(V, n)


def smith_diagonal(M: IntMatrix) -> list[int]:
    """Nonzero invariant factors of ``M`` in divisibility order."""
    D, _, _ = snf(M)
    return [D[i, i] for i in range(min(D.rows, D.cols)) if D[i, i]]


def determinant(M: IntMatrix) -> int:
    """Exact determinant by fraction-free elimination (Bareiss)."""
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    A = M.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


# ---------------------------------------------------------------------------
# Lattices


@dataclass(frozen=True)
class Lattice:
    """A sublattice of ``Z^ambient_rank`` in canonical column HNF."""

    ambient_rank: int
    basis: tuple = ()  # canonical sparse columns, sorted by pivot row

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.ambient_rank, self.basis))
            object.__setattr__(self, "_hash", h)
        return h

    @classmethod
    def span(cls, ambient_rank: int, generators: Iterable[Mapping[int, int]]) -> "Lattice":
        gens = [dict(g) for g in generators if g]
        return _span(ambient_rank, tuple(_freeze(g) for g in gens))

    @classmethod
    def full(cls, n: int) -> "Lattice":
        return cls(n, tuple(((j, 1),) for j in range(n)))

    @classmethod
    def zero(cls, n: int) -> "Lattice":
        return cls(n, ())

    @classmethod
    def from_matrix(cls, M: IntMatrix) -> "Lattice":
        return cls.span(M.rows, M.columns())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.rank == self.ambient_rank and all(c[0][1] == 1 for c in self.basis)

    def vectors(self) -> list[Vec]:
        return [dict(c) for c in self.basis]

    def matrix(self) -> IntMatrix:
        return IntMatrix(self.ambient_rank, self.rank, self.basis)

    def coords(self, v: Mapping[int, int]) -> Vec | None:
        """Coordinates of ``v`` in the stored basis, or ``None`` if ``v`` is not in the lattice."""
        piv = _pivot_index(self)
        v = dict(v)
        out: Vec = {}
        while v:
            r = min(v)
            j = piv.get(r)
            if j is None:
                return None
            col = self.basis[j]
            q, rem = divmod(v[r], col[0][1])
            if rem:
                return None
            out[j] = q
            for k, x in col:
                y = v.get(k, 0) - q * x
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
        return out

    def contains(self, v: Mapping[int, int]) -> bool:
        return self.coords(v) is not None

    def __le__(self, other: "Lattice") -> bool:
        return is_sublattice(self, other)

    def __add__(self, other: "Lattice") -> "Lattice":
        return lattice_sum(self, other)

    def __and__(self, other: "Lattice") -> "Lattice":
        return lattice_intersect(self, other)


def _pivot_index(L: Lattice) -> dict:
    piv = L.__dict__.get("_piv")
    if piv is None:
        piv = {col[0][0]: j for j, col in enumerate(L.basis)}
        object.__setattr__(L, "_piv", piv)
    return piv


@lru_cache(maxsize=200_000)
def _span(n: int, gens: tuple) -> Lattice:
    return Lattice(n, tuple(_freeze(c) for c in _reduced_echelon(dict(g) for g in gens)))


@lru_cache(maxsize=200_000)
def is_sublattice(A: Lattice, B: Lattice) -> bool:
    if A.ambient_rank != B.ambient_rank:
        raise ValueError("ambient rank mismatch")
    if A.rank > B.rank:
        return False
    return all(B.coords(dict(c)) is not None for c in A.basis)


@lru_cache(maxsize=200_000)
def lattice_sum(A: Lattice, B: Lattice) -> Lattice:
    if A.ambient_rank != B.ambient_rank:
        raise ValueError("ambient rank mismatch")
    if not A.basis:
        return B
    if not B.basis:
        return A
    return _span(A.ambient_rank, A.basis + B.basis)


@lru_cache(maxsize=200_000)
def lattice_intersect(A: Lattice, B: Lattice) -> Lattice:
    """Canonical ``A ∩ B``."""
    if A.ambient_rank != B.ambient_rank:
        raise ValueError(f"ambient rank mismatch: {A.ambient_rank} vs {B.ambient_rank}")
    if not A.basis or not B.basis:
        return Lattice.zero(A.ambient_rank)
    if A.is_full():
        return B
    if B.is_full():
        return A
    a_cols = A.vectors()
    # A x = B y for (x, y) in the kernel of [A | -B]
    kernel = _int_kernel(a_cols + [_neg(c) for c in B.vectors()])
    na = len(a_cols)
    return Lattice.span(A.ambient_rank,
                        (_lincomb_many(a_cols, {j: c for j, c in v.items() if j < na})
                         for v in kernel))


def kernel_lattice(M: IntMatrix) -> Lattice:
    """Saturated integer kernel of ``M`` inside ``Z^cols``."""
    return _kernel(M)


@lru_cache(maxsize=50_000)
def _kernel(M: IntMatrix) -> Lattice:
    return Lattice.span(M.cols, _int_kernel(M.columns()))


@lru_cache(maxsize=200_000)
def lattice_preimage(M: IntMatrix, L: Lattice) -> Lattice:
    """``{x : M x ∈ L}`` as a canonical lattice in ``Z^cols``."""
    if L.ambient_rank != M.rows:
        raise ValueError(f"preimage: lattice lives in Z^{L.ambient_rank}, map has {M.rows} rows")
    if L.is_full():
        return Lattice.full(M.cols)
    if L.is_zero():
        return _kernel(M)
    kernel = _int_kernel(M.columns() + [_neg(c) for c in L.vectors()])
    n = M.cols
    return Lattice.span(n, ({j: c for j, c in v.items() if j < n} for v in kernel))


def lattice_image(M: IntMatrix, L: Lattice) -> Lattice:
    if L.ambient_rank != M.cols:
        raise ValueError("image: dimension mismatch")
    return Lattice.span(M.rows, (M.apply(v) for v in L.vectors()))


def solve(columns: Sequence[Mapping[int, int]], v: Mapping[int, int]) -> Vec | None:
    """One integer solution ``c`` of ``sum_j c_j columns[j] = v``, or ``None``."""
    pivots, _ = _echelon([dict(c) for c in columns], [_unit(j) for j in range(len(columns))],
                         reduce=False)
    piv = {r: (c, t) for r, c, t in pivots}
    v = dict(v)
    sol: Vec = {}
    while v:
        r = min(v)
        if r not in piv:
            return None
        c, t = piv[r]
        q, rem = divmod(v[r], c[r])
        if rem:
            return None
        v = _axpy(v, -q, c)
        sol = _axpy(sol, q, t)
    return sol


# ---------------------------------------------------------------------------
# Abelian groups


@dataclass(frozen=True)
class InvariantFactors:
    """Isomorphism class ``Z^free_rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k`` with ``d_i | d_{i+1}``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"torsion coefficient {d} < 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"divisibility chain broken: {a} does not divide {b}")

    @classmethod
    def from_diagonal(cls, free_rank: int, diagonal: Iterable[int]) -> "InvariantFactors":
        """Normalize an arbitrary list of cyclic orders into a divisibility chain."""
        ds = [abs(d) for d in diagonal if abs(d) != 1]
        free_rank += sum(1 for d in ds if d == 0)
        ds = [d for d in ds if d]
        changed = True
        while changed:
            changed = False
            ds.sort()
            for i in range(len(ds)):
                for j in range(i + 1, len(ds)):
                    if ds[j] % ds[i]:
                        g = gcd(ds[i], ds[j])
                        ds[i], ds[j] = g, ds[i] * ds[j] // g
                        changed = True
            ds = [d for d in ds if d != 1]
        return cls(free_rank, tuple(sorted(ds)))

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self) -> int | None:
        """Group order, or ``None`` when infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def cokernel_invariants(n: int, generators: Iterable[Mapping[int, int]]) -> InvariantFactors:
    """Invariant factors of ``Z^n / span(generators)``."""
    return _cokernel(Lattice.span(n, generators))


@lru_cache(maxsize=100_000)
def _cokernel(L: Lattice) -> InvariantFactors:
    n = L.ambient_rank
    # a unit pivot lets us drop its row and column: canonical reduction has
    # already cleared the rest of that row
    unit_rows = {c[0][0] for c in L.basis if c[0][1] == 1}
    keep_cols = [dict(c) for c in L.basis if c[0][1] != 1]
    free = n - L.rank
    if not keep_cols:
        return InvariantFactors(free, ())
    rows = sorted({i for c in keep_cols for i in c} - unit_rows)
    M = IntMatrix.from_columns(n, keep_cols).submatrix(rows, range(len(keep_cols)))
    return InvariantFactors.from_diagonal(free, smith_diagonal(M))


@dataclass(frozen=True)
class Subquotient:
    """The group ``cycles / boundaries`` for nested lattices in a common ambient module."""

    cycles: Lattice
    boundaries: Lattice

    def __post_init__(self):
        if self.cycles.ambient_rank != self.boundaries.ambient_rank:
            raise ValueError("subquotient: ambient mismatch")
        if not is_sublattice(self.boundaries, self.cycles):
            raise ContainmentError("subquotient: boundaries are not contained in cycles")

    @classmethod
    def zero(cls, n: int) -> "Subquotient":
        z = Lattice.zero(n)
        return cls(z, z)

    @property
    def ambient_rank(self) -> int:
        return self.cycles.ambient_rank

    def invariants(self) -> InvariantFactors:
        return invariants(self)

    def is_zero(self) -> bool:
        return self.cycles == self.boundaries

    def contains_class(self, v: Mapping[int, int]) -> bool:
        return self.cycles.contains(v)

    def is_boundary(self, v: Mapping[int, int]) -> bool:
        return self.boundaries.contains(v)


@lru_cache(maxsize=100_000)
def invariants(S: Subquotient) -> InvariantFactors:
    """Invariant factors of ``Z/B``, read off ``B`` written in a basis of ``Z``."""
    if S.cycles == S.boundaries:
        return InvariantFactors()
    Z = S.cycles
    coords = [Z.coords(b) for b in S.boundaries.vectors()]
    return _cokernel(Lattice.span(Z.rank, coords))


@dataclass(frozen=True)
class SubquotientHom:
    """A homomorphism ``dom -> cod`` of subquotients.

    ``images`` holds the image of each basis vector of ``dom.cycles`` in the
    ambient module of ``cod``.  ``matrix`` is the ambient matrix when the map
    comes from one; lifted maps (connecting maps of derived exact couples)
    only exist on cycles and leave it ``None``.
    """

    dom: Subquotient
    cod: Subquotient
    images: IntMatrix
    matrix: IntMatrix | None = None

    def __post_init__(self):
        if self.images.shape != (self.cod.ambient_rank, self.dom.cycles.rank):
            raise ValueError(f"images matrix has shape {self.images.shape}, expected "
                             f"{(self.cod.ambient_rank, self.dom.cycles.rank)}")
        for j, v in enumerate(self.images.columns()):
            if not self.cod.cycles.contains(v):
                raise ContainmentError(f"cycle basis vector {j} maps outside target cycles")
        for b in self.dom.boundaries.vectors():
            if not self.cod.boundaries.contains(self.apply(b)):
                raise ContainmentError("a boundary maps outside target boundaries")

    def apply(self, v: Mapping[int, int]) -> Vec:
        """Image of a cycle ``v`` of ``dom``."""
        if self.matrix is not None:
            return self.matrix.apply(v)
        c = self.dom.cycles.coords(v)
        if c is None:
            raise ContainmentError("vector is not a cycle of the domain")
        return self.images.apply(c)

    def kernel(self) -> Subquotient:
        Zc = lattice_preimage(self.images, self.cod.boundaries)
        Z = lattice_image(self.dom.cycles.matrix(), Zc)
        return Subquotient(Z, self.dom.boundaries)

    def image(self) -> Subquotient:
        L = lattice_sum(Lattice.span(self.cod.ambient_rank, self.images.columns()),
                        self.cod.boundaries)
        return Subquotient(L, self.cod.boundaries)

    def cokernel(self) -> Subquotient:
        return Subquotient(self.cod.cycles, self.image().cycles)

    def is_injective(self) -> bool:
        return self.kernel().is_zero()

    def is_surjective(self) -> bool:
        return self.image().cycles == self.cod.cycles

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def is_zero(self) -> bool:
        return all(self.cod.boundaries.contains(v) for v in self.images.columns())

    def rank_data(self) -> tuple[InvariantFactors, InvariantFactors, InvariantFactors]:
        """Invariants of (kernel, image, cokernel)."""
        return (self.kernel().invariants(), self.image().invariants(),
                self.cokernel().invariants())

    def compose(self, first: "SubquotientHom") -> "SubquotientHom":
        """``self ∘ first``."""
        if first.cod != self.dom:
            raise ValueError("compose: codomain/domain mismatch")
        imgs = [self.apply(v) for v in first.images.columns()]
        mat = None
        if self.matrix is not None and first.matrix is not None:
            mat = self.matrix @ first.matrix
        return SubquotientHom(first.dom, self.cod,
                              IntMatrix.from_columns(self.cod.ambient_rank, imgs), mat)

    def restrict(self, dom: Subquotient, cod: Subquotient | None = None) -> "SubquotientHom":
        """The same map on a sub-subquotient ``dom`` (cycles inside ``self.dom.cycles``)."""
        cod = self.cod if cod is None else cod
        imgs = [self.apply(v) for v in dom.cycles.vectors()]
        return SubquotientHom(dom, cod, IntMatrix.from_columns(cod.ambient_rank, imgs),
                              self.matrix)

    def agrees_with(self, other: "SubquotientHom") -> bool:
        """Equal as maps of groups (images differ by boundaries)."""
        if self.dom != other.dom or self.cod != other.cod:
            return False
        B = self.cod.boundaries
        return all(B.contains(_axpy(a, -1, b))
                   for a, b in zip(self.images.columns(), other.images.columns()))


def zero_hom(dom: Subquotient, cod: Subquotient) -> SubquotientHom:
    return SubquotientHom(dom, cod, IntMatrix.zeros(cod.ambient_rank, dom.cycles.rank),
                          IntMatrix.zeros(cod.ambient_rank, dom.ambient_rank))


def induced_hom(f: IntMatrix, dom: Subquotient, cod: Subquotient) -> SubquotientHom:
    """The map of subquotients induced by an ambient matrix; raises ContainmentError if ill-defined."""
    if f.shape != (cod.ambient_rank, dom.ambient_rank):
        raise ValueError(f"induced_hom: matrix shape {f.shape} does not match "
                         f"{cod.ambient_rank} x {dom.ambient_rank}")
    imgs = [f.apply(v) for v in dom.cycles.vectors()]
    return SubquotientHom(dom, cod, IntMatrix.from_columns(f.rows, imgs), f)
