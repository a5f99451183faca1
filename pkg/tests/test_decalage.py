import pytest
from hypothesis import given
from hypothesis import strategies as st

from exactss.complexes import CochainComplex, FilteredComplex, stupid_filtration, trivial_filtration
from exactss.cosimplicial import (
    bar_cosimplicial_complex,
    cyclic_group,
    random_cosimplicial_complex,
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
from exactss.specseq import pages
from exactss.zlinalg import InvariantFactors, Lattice, kernel_lattice

Z2 = InvariantFactors(0, (2,))
seeds = st.integers(0, 10_000)


def test_worked_dec_lattices():
    F = stupid_filtration(worked_bicomplex())
    G = dec(F)
    # Dec^0 keeps the cycle-like part: all of degree 0 and 1, nothing above
    assert {(p, n): G.F(p, n).rank for p in (-1, 0, 1) for n in (0, 1)} == {
        (-1, 0): 1, (-1, 1): 1, (0, 0): 1, (0, 1): 1, (1, 0): 0, (1, 1): 0}
    assert pages(G, 1)[0].table() == {(0, 1): Z2}
    assert G.same_lattices(dec_double(worked_bicomplex()))


def test_worked_gamma():
    F = stupid_filtration(worked_bicomplex())
    g = gamma(F, 1, 0, 1)
    assert g.is_iso() and g.dom.invariants() == Z2 and g.cod.invariants() == Z2
    with pytest.raises(ValueError):
        gamma(F, 0, 0, 1)


def test_dec_of_trivial_filtration_is_canonical():
    # Dec of the trivial filtration is the canonical (truncation) filtration
    F = random_filtered_instance(5).filtered
    T = trivial_filtration(F.complex)
    G = dec(T)
    C = F.complex
    for n in C.degrees():
        assert G.F(-n - 1, n) == Lattice.full(C.rank(n))
        assert G.F(-n, n) == kernel_lattice(C.diff(n))
        assert G.F(-n + 1, n) == Lattice.zero(C.rank(n))
    assert verify_comparison(T).passed


def test_corrupted_dec_is_caught():
    F = stupid_filtration(worked_bicomplex())
    rep = verify_comparison(F, dec_filtration=F)
    assert not rep.passed
    assert {"p", "q", "r", "reason"} <= set(rep.counterexample)
    assert rep.to_json()["failures"]


def test_empty_complex():
    F = FilteredComplex(CochainComplex.zero(), 0, 0)
    assert dec(F).width == 0
    assert verify_comparison(F).passed


@given(seeds)
def test_comparison_on_random_instances(seed):
    rep = verify_comparison(random_filtered_instance(seed).filtered)
    assert rep.passed, rep.counterexample


@given(seeds)
def test_dec_matches_blockwise_formula(seed):
    inst = random_filtered_instance(seed, shear=False)
    assert dec(stupid_filtration(inst.bicomplex)).same_lattices(dec_double(inst.bicomplex))


@given(seeds)
def test_dec_is_a_filtration(seed):
    # the constructor validates containment and compatibility with d
    G = dec(random_filtered_instance(seed).filtered)
    G.validate()


@pytest.mark.parametrize("m, coeff", [(2, 0), (3, 3)])
def test_postnikov_tower_of_bar_construction(m, coeff):
    rep = verify_postnikov_tot(bar_cosimplicial_complex(cyclic_group(m), coeff, 3))
    assert rep.passed, rep.counterexample


@given(st.integers(0, 5000))
def test_postnikov_tower_random(seed):
    rep = verify_postnikov_tot(random_cosimplicial_complex(seed))
    assert rep.passed, rep.counterexample
