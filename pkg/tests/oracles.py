"""Reference computations that share no code with the package."""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd


def det(rows: list[list[int]]) -> int:
    """Exact determinant by Gaussian elimination over the rationals."""
    n = len(rows)
    A = [[Fraction(x) for x in row] for row in rows]
    out = Fraction(1)
    for j in range(n):
        piv = next((i for i in range(j, n) if A[i][j] != 0), None)
        if piv is None:
            return 0
        if piv != j:
            A[j], A[piv] = A[piv], A[j]
            out = -out
        out *= A[j][j]
        for i in range(j + 1, n):
            f = A[i][j] / A[j][j]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[j])]
    return int(out)


def smith_by_minors(rows: list[list[int]]) -> list[int]:
    """Nonzero invariant factors from determinantal divisors ``d_k = D_k / D_{k-1}``."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    out, prev = [], 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for I in itertools.combinations(range(m), k):
            for J in itertools.combinations(range(n), k):
                g = gcd(g, det([[rows[i][j] for j in J] for i in I]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def rational_rank(rows: list[list[int]]) -> int:
    A = [[Fraction(x) for x in row] for row in rows]
    rank, col = 0, 0
    ncols = len(A[0]) if A else 0
    while rank < len(A) and col < ncols:
        piv = next((i for i in range(rank, len(A)) if A[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for i in range(len(A)):
            if i != rank and A[i][col]:
                f = A[i][col] / A[rank][col]
                A[i] = [a - f * b for a, b in zip(A[i], A[rank])]
        rank += 1
        col += 1
    return rank


def cyclic_cohomology(n: int, m: int, k: int) -> tuple[int, tuple]:
    """``H^k(Z/n; A)`` with ``A = Z`` (``m = 0``) or ``Z/m`` from the 2-periodic
    resolution ``... --N--> Z[G] --(g-1)--> Z[G] -> Z``.

    After ``Hom(-, A)`` the cochain maps alternate between ``0`` (from ``g - 1``)
    and multiplication by ``n`` (from the norm element).  Returns
    ``(free_rank, torsion)``.
    """

    def clean(group):
        r, tors = group
        return r, tuple(t for t in tors if t > 1)

    into = 0 if k == 0 else (0 if k % 2 == 1 else n)  # map arriving in degree k
    out = 0 if k % 2 == 0 else n                        # map leaving degree k
    # H = ker(out) / im(into) computed on cyclic A
    if m == 0:
        if out != 0:
            return (0, ())
        return clean((0, (into,)) if into else (1, ()))
    ker_order = gcd(out, m) if out else m
    im_order = m // gcd(into, m) if into else 1
    return clean((0, (ker_order // im_order,)))


def elementary_abelian_dims(k: int, factors: int) -> int:
    """``dim H^k((Z/2)^factors; Z/2)``: Künneth gives the number of monomials of degree k."""
    from math import comb
    return comb(k + factors - 1, factors - 1)
