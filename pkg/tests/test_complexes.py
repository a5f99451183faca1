import pytest
from hypothesis import given
from hypothesis import strategies as st

from exactss.complexes import (
    ChainMap,
    CochainComplex,
    DoubleComplex,
    FilteredComplex,
    ValidationError,
    canonical_truncation,
    cohomology,
    direct_sum,
    graded_piece,
    hofib,
    identity_map,
    mapping_cone,
    shift,
    stupid_filtration,
    total_complex,
    trivial_filtration,
)
from exactss.decalage import worked_bicomplex
from exactss.zlinalg import IntMatrix, InvariantFactors, Lattice

Z = InvariantFactors(1)
ZERO = InvariantFactors()


def cyclic(k: int) -> InvariantFactors:
    return InvariantFactors(0, (k,))


def two_term(m: int) -> CochainComplex:
    """``Z --m--> Z`` in degrees 0, 1."""
    return CochainComplex(0, (1, 1), {0: IntMatrix.from_rows([[m]])})


def H(C, n):
    return cohomology(C, n).invariants()


@st.composite
def complexes(draw, max_len=4, max_rank=3):
    """Random complexes: the image of each ``d`` lies in the first ``t`` coordinates,
    and the next ``d`` vanishes on those coordinates."""
    length = draw(st.integers(1, max_len))
    lo = draw(st.integers(-2, 2))
    ranks = [draw(st.integers(0, max_rank)) for _ in range(length)]
    d = {}
    t_prev = 0
    for k in range(length - 1):
        src, dst = ranks[k], ranks[k + 1]
        t = draw(st.integers(0, dst))
        rows = [[draw(st.integers(-3, 3)) if i < t and j >= t_prev else 0 for j in range(src)]
                for i in range(dst)]
        d[lo + k] = IntMatrix.from_rows(rows, src)
        t_prev = t
    return CochainComplex(lo, tuple(ranks), d)


def euler(C):
    return sum((-1) ** n * C.rank(n) for n in C.degrees())


# --- examples ---------------------------------------------------------------


@pytest.mark.parametrize("m", [0, 1, 2, 5, -3])
def test_two_term_cohomology(m):
    C = two_term(m)
    if m == 0:
        assert H(C, 0) == Z and H(C, 1) == Z
    else:
        assert H(C, 0) == ZERO
        assert H(C, 1) == (ZERO if abs(m) == 1 else cyclic(abs(m)))


def test_cone_of_identity_is_acyclic():
    C = two_term(2)
    K = mapping_cone(identity_map(C))
    assert all(H(K, n) == ZERO for n in range(-2, 3))


def test_hofib_of_multiplication():
    Zc = CochainComplex(0, (1,))
    f = ChainMap(Zc, Zc, {0: IntMatrix.from_rows([[2]])})
    F = hofib(f)
    assert H(F, 0) == ZERO and H(F, 1) == cyclic(2)
    assert H(mapping_cone(f), 0) == cyclic(2)


def test_square_of_identities_has_acyclic_tot():
    one = IntMatrix.identity(1)
    K = DoubleComplex(1, 0, 1, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
                      {(0, 0): one, (0, 1): one}, {(0, 0): one, (1, 0): one})
    T = total_complex(K)
    assert [T.rank(n) for n in range(3)] == [1, 2, 1]
    assert all(H(T, n) == ZERO for n in range(3))


def test_worked_bicomplex_tot():
    T = total_complex(worked_bicomplex())
    assert H(T, 0) == ZERO and H(T, 1) == cyclic(2)


def test_truncation_kills_upper_cohomology():
    assert canonical_truncation(two_term(2), 0).is_zero()
    C = two_term(0)
    T = canonical_truncation(C, 0)
    assert H(T, 0) == Z and H(T, 1) == ZERO


def test_d_squared_is_reported_with_location():
    one = IntMatrix.from_rows([[1]])
    with pytest.raises(ValidationError) as err:
        CochainComplex(0, (1, 1, 1), {0: one, 1: one})
    assert err.value.where == "/d/1"


def test_bad_shape_and_noncommuting_square():
    with pytest.raises(ValidationError) as err:
        CochainComplex(0, (1, 2), {0: IntMatrix.from_rows([[1]])})
    assert err.value.where == "/d/0"
    one = IntMatrix.identity(1)
    with pytest.raises(ValidationError, match="does not commute"):
        DoubleComplex(1, 0, 1, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
                      {(0, 0): one, (0, 1): one}, {(0, 0): one, (1, 0): -one})


def test_chain_map_must_commute():
    C = two_term(1)
    with pytest.raises(ValidationError, match="commute"):
        ChainMap(C, C, {0: IntMatrix.identity(1)})


def test_filtration_validation():
    C = two_term(1)
    # F^1 holds degree 0 but not its boundary
    with pytest.raises(ValidationError) as err:
        FilteredComplex(C, 0, 2, {(1, 0): Lattice.full(1), (1, 1): Lattice.zero(1)})
    assert err.value.where == "/F/1,1"


def test_graded_pieces_of_trivial_filtration():
    C = two_term(3)
    F = trivial_filtration(C)
    assert graded_piece(F, 0, 1).invariants() == cyclic(3)
    assert graded_piece(F, 1, 1).invariants() == ZERO


def test_stupid_filtration_columns():
    K = worked_bicomplex()
    F = stupid_filtration(K)
    assert F.pmin == 0 and F.pmax == K.amax + 1
    T = F.complex
    for n in T.degrees():
        assert F.F(1, n).rank == sum(K.rank(a, n - a) for a in range(1, K.amax + 1))


# --- properties -------------------------------------------------------------


@given(complexes())
def test_euler_characteristic(C):
    chi = sum((-1) ** n * H(C, n).free_rank for n in C.degrees())
    assert chi == euler(C)


@given(complexes(), st.integers(-3, 3))
def test_shift_moves_cohomology(C, k):
    S = shift(C, k)
    assert all(H(S, n - k) == H(C, n) for n in C.degrees())


@given(complexes(), st.integers(-3, 4))
def test_truncation(C, m):
    T = canonical_truncation(C, m)
    for n in range(C.lo - 1, C.hi + 2):
        assert H(T, n) == (H(C, n) if n <= m else ZERO)


@given(complexes())
def test_cone_of_identity_is_acyclic_in_general(C):
    K = mapping_cone(identity_map(C))
    assert all(H(K, n) == ZERO for n in range(C.lo - 2, C.hi + 2))


@given(complexes(), complexes())
def test_direct_sum_adds_cohomology(A, B):
    S = direct_sum(A, B)
    for n in range(min(A.lo, B.lo), max(A.hi, B.hi) + 1):
        a, b, s = H(A, n), H(B, n), H(S, n)
        assert s.free_rank == a.free_rank + b.free_rank
        assert sorted(s.torsion) == sorted(InvariantFactors.from_diagonal(
            0, list(a.torsion) + list(b.torsion)).torsion)
