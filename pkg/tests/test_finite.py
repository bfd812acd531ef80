import pytest

from chaincalc import finite as fin


@pytest.mark.parametrize("name,order", [("Z2", 2), ("S3", 6), ("S4", 24), ("A4", 12),
                                        ("A5", 60), ("Z6", 6), ("1", 1)])
def test_builtin_orders(name, order):
    assert fin.builtin(name).order == order


def test_unknown_builtin():
    with pytest.raises(fin.FiniteGroupError):
        fin.builtin("M11")


def test_cycles_rightmost_first():
    # (1,2)(2,3): apply (2,3) first, so 3 -> 2 -> 1
    p = fin.parse_cycles("(1,2)(2,3)", 3)
    assert p[2] == 0
    assert fin.cycle_name(fin.parse_cycles("(1,2,3)", 3)) == "(1,2,3)"


def test_bad_cycles():
    with pytest.raises(fin.FiniteGroupError):
        fin.parse_cycles("(1,4)", 3)
    with pytest.raises(fin.FiniteGroupError):
        fin.parse_cycles("(1,1)", 3)


def test_table_validation():
    with pytest.raises(fin.FiniteGroupError):
        fin.FiniteGroup("bad", ("e", "x"), ((0, 1), (1, 1)), (1,))


def test_stabilizer_subgroup_of_a5():
    A5 = fin.builtin("A5")
    stab = frozenset(k for k, p in enumerate(A5.perms) if p[4] == 4)
    assert len(stab) == 12 and A5.is_subgroup(stab)
    gens = A5.subgroup_generators(stab)
    assert A5.closure(gens) == stab


def test_index_of_by_name_and_cycle():
    S3 = fin.builtin("S3")
    assert S3.index_of("e") == 0
    k = S3.index_of("(1, 2)")
    assert S3.mul(k, k) == 0


def test_permutation_action_is_homomorphism():
    from chaincalc import lattice as lat
    S3 = fin.builtin("S3")
    A = fin.permutation_action(S3)
    for f in range(6):
        for g in range(6):
            assert lat.mat_mul(A[f], A[g]) == A[S3.mul(f, g)]
