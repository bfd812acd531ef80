import numpy as np
import pytest

from chaincalc import catalog
from chaincalc.cosets import (FiniteQuotient, ResourceError, core_membership, enumerate_cosets,
                              permutation_rep, schreier_generators)
from chaincalc.groups import heisenberg, heisenberg_subgroup, lattice_subgroup

from helpers import coset_reps


def dihedral_table(n):
    ctx = catalog.dihedral_group()
    return ctx, enumerate_cosets(ctx, lattice_subgroup(ctx, [[2 ** n]], [0, 1]))


def test_table_size_and_reps():
    ctx, tab = dihedral_table(3)
    assert tab.index == 8
    assert tab.rep_word(0) == "e"
    # each representative lies in the coset it labels
    for i, r in enumerate(tab.reps):
        assert tab.locate(r) == i


def test_table_is_deterministic():
    _, t1 = dihedral_table(4)
    _, t2 = dihedral_table(4)
    assert t1.words == t2.words
    assert all(np.array_equal(x, y) for x, y in zip(t1.actions, t2.actions))


def test_actions_are_permutations():
    ctx = heisenberg()
    tab = enumerate_cosets(ctx, heisenberg_subgroup(ctx, [[4, 0], [0, 9]], 2))
    assert tab.index == 72
    for row in tab.actions:
        assert sorted(row.tolist()) == list(range(72))


def test_table_matches_oracle_reps():
    ctx = heisenberg()
    H = heisenberg_subgroup(ctx, [[6, 4], [8, 9]], 2)
    tab = enumerate_cosets(ctx, H)
    assert tab.index == len(coset_reps(ctx, H)) == H.index


def test_cap():
    ctx, _ = dihedral_table(1)
    H = lattice_subgroup(ctx, [[64]], [0, 1])
    with pytest.raises(ResourceError) as err:
        enumerate_cosets(ctx, H, cap=10, level=6)
    assert err.value.level == 6 and err.value.cap == 10


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv("CHAINCALC_COSET_CAP", "5")
    ctx = catalog.dihedral_group()
    with pytest.raises(ResourceError):
        enumerate_cosets(ctx, lattice_subgroup(ctx, [[8]], [0, 1]))


def test_quotient_order_and_stabilizer():
    ctx, tab = dihedral_table(3)
    fq = permutation_rep(tab)
    # G/C_3 is the dihedral group of order 16; D_3 has order 2
    assert fq.order == 16
    assert len(fq.stabilizer) == 2


def test_witness_words_evaluate_to_their_element():
    ctx, tab = dihedral_table(3)
    fq = FiniteQuotient(tab)
    for e in range(fq.order):
        assert fq.element_of(fq.witness_element(e)) == e


def test_compose_inverse():
    ctx, tab = dihedral_table(2)
    fq = FiniteQuotient(tab)
    for i in range(fq.order):
        assert fq.compose(i, fq.inverse(i)) == 0


def test_perm_cap():
    ctx, tab = dihedral_table(4)
    with pytest.raises(ResourceError):
        FiniteQuotient(tab, cap=5)


def test_core_membership():
    ctx, tab = dihedral_table(2)
    fq = FiniteQuotient(tab)
    a, b = ctx.generators
    assert core_membership(fq, ctx.power(a, 4))
    assert not core_membership(fq, b)
    assert not core_membership(fq, ctx.power(a, 2))


@pytest.mark.parametrize("K_lattice,K_m", [([[8, 0], [0, 3]], 2), ([[4, 0], [0, 6]], 2),
                                             ([[4, 0], [0, 3]], 4)])
def test_schreier_generators_generate_subgroup(K_lattice, K_m):
    ctx = heisenberg()
    H = heisenberg_subgroup(ctx, [[4, 0], [0, 3]], 2)
    gens = schreier_generators(enumerate_cosets(ctx, H))
    assert all(H.contains(g) for g in gens)
    # <gens> = H iff its orbit on G/K through the base coset is all of H/K
    K = heisenberg_subgroup(ctx, K_lattice, K_m)
    orbit = enumerate_cosets(ctx, K, generators=gens)
    assert orbit.index == K.index // H.index
