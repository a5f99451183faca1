import random
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from exactss.complexes import CochainComplex, ValidationError, cohomology, total_complex
from exactss.cosimplicial import (
    CosimplicialAbGroup,
    CosimplicialComplex,
    bar_cosimplicial,
    bar_cosimplicial_complex,
    check_group_table,
    constant_cosimplicial,
    cosimplicial_complex_from_group,
    cube_from_cosimplicial,
    cube_holim,
    cyclic_group,
    dold_kan,
    moore_complex,
    normalized_complex,
    product_group,
    random_cosimplicial_complex,
    random_double_complex,
    termwise_truncation,
    to_double,
    validate_cosimplicial,
)
from exactss.zlinalg import IntMatrix, InvariantFactors

ZERO = InvariantFactors()


def H(C, n):
    return cohomology(C, n).invariants()


def broken_constant(top: int, level: int, which: str) -> dict:
    """Structure maps of the constant object with one map doubled."""
    I = IntMatrix.identity(1)
    cof = {(n, i): I for n in range(1, top + 1) for i in range(n + 1)}
    cod = {(n, i): I for n in range(top) for i in range(n + 1)}
    (cof if which == "coface" else cod)[(level, 0)] = I.scale(2)
    return {"top": top, "ranks": (1,) * (top + 1), "cofaces": cof, "codegs": cod}


# --- validation -------------------------------------------------------------


def test_constant_object_is_valid():
    G = constant_cosimplicial(2, 3)
    assert validate_cosimplicial(G).ok


@pytest.mark.parametrize("which, level, where", [("codeg", 0, "/codeg/0,0"),
                                                 ("coface", 2, "/coface/2,1")])
def test_violations_name_identity_and_level(which, level, where):
    args = broken_constant(3, level, which)
    rep = validate_cosimplicial(CosimplicialAbGroup(**args, check=False))
    assert not rep.ok
    locations = [w for w, _ in rep.violations]
    assert where in locations
    assert all("level" in msg for _, msg in rep.violations)
    with pytest.raises(ValidationError):
        CosimplicialAbGroup(**args)


def test_missing_and_misshaped_maps():
    args = broken_constant(2, 1, "coface")
    del args["cofaces"][(2, 1)]
    with pytest.raises(ValidationError) as err:
        CosimplicialAbGroup(**args)
    assert err.value.where == "/coface/2,1"
    with pytest.raises(ValidationError) as err:
        CosimplicialAbGroup(1, (1, 1, 1), {}, {})
    assert err.value.where == "/ranks"


def test_group_table_checks():
    assert check_group_table(cyclic_group(4)) == 0
    with pytest.raises(ValueError):
        check_group_table([[0, 1], [0, 1]])


# --- bar construction -------------------------------------------------------


def test_bar_ranks_and_validity():
    G = bar_cosimplicial(cyclic_group(2), 4)
    assert G.ranks == tuple(2 ** n for n in range(5))
    assert validate_cosimplicial(G).ok


@pytest.mark.parametrize("m", [2, 3])
def test_bar_moore_complex_is_group_cohomology(m):
    G = bar_cosimplicial(cyclic_group(m), 4)
    M = moore_complex(G)
    for k in range(4):
        assert H(M, k) == InvariantFactors(*oracles.cyclic_cohomology(m, 0, k))


@pytest.mark.parametrize("m, coeff", [(2, 2), (3, 3), (4, 2), (2, 3)])
def test_bar_with_finite_coefficients(m, coeff):
    CC = bar_cosimplicial_complex(cyclic_group(m), coeff, 4)
    T = total_complex(to_double(CC))
    # the presentation complex sits in internal degrees -1, 0; H^k is reliable below top - 1
    for k in range(3):
        assert H(T, k) == InvariantFactors(*oracles.cyclic_cohomology(m, coeff, k))


def test_klein_four_mod_two():
    V4 = product_group(cyclic_group(2), cyclic_group(2))
    T = total_complex(to_double(bar_cosimplicial_complex(V4, 2, 4)))
    for k in range(3):
        assert H(T, k) == InvariantFactors(0, (2,) * oracles.elementary_abelian_dims(k, 2))


# --- normalization and Dold–Kan --------------------------------------------


def test_constant_diagram_normalizes_to_a_point():
    G = constant_cosimplicial(1, 4)
    N = normalized_complex(G)
    assert [N.rank(n) for n in range(5)] == [1, 0, 0, 0, 0]
    assert H(moore_complex(G), 0) == InvariantFactors(1)
    assert all(H(moore_complex(G), k) == ZERO for k in range(1, 4))


def test_constant_on_acyclic_complex_has_acyclic_tot():
    I = IntMatrix.identity(1)
    G = constant_cosimplicial(1, 3)
    CC = CosimplicialComplex(3, 0, 1, {0: G, 1: G}, {(n, 0): I for n in range(4)})
    T = total_complex(to_double(CC))
    assert all(H(T, k) == ZERO for k in range(4))


@pytest.mark.parametrize("seed", range(6))
def test_dold_kan_ranks_and_normalization(seed):
    rng = random.Random(seed)
    top = 3
    K = random_double_complex(rng, top + 1, -1, 1, 3, max_rank=2)
    CC = dold_kan(K, top)
    for n in range(top + 1):
        for b in range(K.bmin, K.bmax + 1):
            assert CC.rank(n, b) == sum(comb(n, k) * K.rank(k, b) for k in range(n + 1))
    N = to_double(CC)
    for a in range(top + 1):
        for b in range(K.bmin, K.bmax + 1):
            assert N.rank(a, b) == K.rank(a, b)
    for k in range(K.bmin, top + K.bmax + 1):
        assert H(total_complex(N), k) == H(total_complex(K.columns_upto(top)), k)


# --- cubes and truncation ---------------------------------------------------


@pytest.mark.parametrize("seed", range(8))
def test_cube_is_valid_and_strategies_agree(seed):
    CC = random_cosimplicial_complex(seed)
    for n in range(CC.top + 1):
        D = cube_from_cosimplicial(CC, n)
        D.validate()
        direct, recursive = cube_holim(D, "direct"), cube_holim(D, "recursive")
        tot = total_complex(to_double(CC).columns_upto(n))
        for k in range(CC.bmin - 1, n + CC.bmax + 2):
            assert H(direct, k) == H(recursive, k) == H(tot, k)


def test_cube_rejects_bad_level_and_strategy():
    CC = random_cosimplicial_complex(1)
    with pytest.raises(ValueError):
        cube_from_cosimplicial(CC, CC.top + 1)
    with pytest.raises(ValueError):
        cube_holim(cube_from_cosimplicial(CC, 0), "sideways")


@given(st.integers(0, 400), st.integers(-2, 2))
def test_termwise_truncation_levelwise(seed, m):
    CC = random_cosimplicial_complex(seed)
    T = termwise_truncation(CC, m)
    for n in range(CC.top + 1):
        for b in range(CC.bmin - 1, CC.bmax + 2):
            want = H(CC.level(n), b) if b <= -m else ZERO
            assert H(T.level(n), b) == want


def test_cosimplicial_complex_from_group_levels():
    G = constant_cosimplicial(2, 2)
    CC = cosimplicial_complex_from_group(G, 1)
    assert CC.level(0) == CochainComplex(1, (2,))
