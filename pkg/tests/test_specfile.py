from importlib import resources

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaincalc import specfile as sf

DIHEDRAL = """
group {
  family = lattice
  rank = 1
  finite = Z2
  action t = [[-1]]
  names = a, b
}
chain {
  level {
    lattice = [[2^i]]
    finite = {e,t}
  }
}
analysis { depth = 4 }
"""

SWAP = """
group {
  family = lattice; rank = 2; finite = Z2
  action t = [[0, 1], [1, 0]]
}
chain {
  p = 2
  q = 2
  primes p, q
  level { lattice = [[p^i, 0], [0, q^i]] }
}
"""


def bundled():
    root = resources.files("chaincalc") / "specs"
    return sorted((p.name, p.read_text()) for p in root.iterdir() if p.name.endswith(".chain"))


def test_dihedral_spec():
    b = sf.build(sf.parse_spec(DIHEDRAL))
    assert b.depth == 4
    assert [b.chain.level(i).index for i in range(1, 5)] == [2, 4, 8, 16]
    # membership-only levels beyond the depth
    assert b.chain.depth == 6


def test_primes_must_be_distinct():
    with pytest.raises(sf.SpecError, match="primes must be distinct") as err:
        sf.build(sf.parse_spec(SWAP))
    assert err.value.kind == "semantic" and err.value.line == 9


def test_set_override_fixes_primes():
    b = sf.build(sf.parse_spec(SWAP), {"q": 3}, depth=2)
    assert b.chain.level(2).index == 72


def test_unknown_override():
    with pytest.raises(sf.SpecError, match="no such parameter"):
        sf.build(sf.parse_spec(SWAP), {"zz": 3})


def test_empty_chain_block():
    text = "group { family = heisenberg }\nchain {\n}\n"
    with pytest.raises(sf.SpecError) as err:
        sf.parse_spec(text)
    assert err.value.kind == "syntax" and err.value.line == 3


@pytest.mark.parametrize("text,line,col,fragment", [
    ("group { family = lattice\n rank = 1 +\n}", 2, 12, "integer expression"),
    ("group { family = torus }", 1, 18, "unknown family"),
    ("chain { level { lattice = [[1, 2], [3]] } }", 1, 39, "different lengths"),
    ("group {}\nchain { level { lattice = [[2^i]] } }\nfoo {}", 3, 1, "unknown block"),
    ("group { rank = $ }", 1, 16, "unexpected character"),
    ("group {}\ngroup {}", 2, 1, "duplicate"),
    ("chain { level { lattice = [[2]] } }", None, None, "missing group"),
])
def test_syntax_errors(text, line, col, fragment):
    with pytest.raises(sf.SpecError, match=fragment) as err:
        sf.parse_spec(text)
    if line is not None:
        assert (err.value.line, err.value.col) == (line, col)


def test_semantic_errors_name_the_level():
    text = DIHEDRAL.replace("[[2^i]]", "[[2^(4 - i)]]")
    with pytest.raises(sf.SpecError) as err:
        sf.build(sf.parse_spec(text))
    assert err.value.kind == "semantic" and err.value.level is not None


def test_invalid_subgroup_reports_level():
    text = SWAP.replace("q = 2", "q = 3").replace("level { lattice", "level { finite = {e, t}; lattice")
    with pytest.raises(sf.SpecError) as err:
        sf.build(sf.parse_spec(text))
    assert err.value.level == 1 and "invariant" in err.value.message


def test_explicit_levels():
    text = DIHEDRAL.replace("""  level {
    lattice = [[2^i]]
    finite = {e,t}
  }""", "  level 1 { lattice = [[3]]; finite = {e, t} }\n  level 2 { lattice = [[6]] }")
    doc = sf.parse_spec(text)
    assert doc.chain.kind == "explicit"
    b = sf.build(doc, depth=2)
    assert [b.chain.level(i).index for i in (1, 2)] == [3, 12]
    with pytest.raises(sf.SpecError, match="exceeds"):
        sf.build(doc, depth=3)


def test_levels_out_of_order():
    with pytest.raises(sf.SpecError, match="out of order"):
        sf.parse_spec("group {}\nchain { level 2 { lattice = [[2]] } }")


def test_kernel_words_and_tuples():
    doc = sf.parse_spec(DIHEDRAL.replace("depth = 4", "depth = 4; kernel = b, a^2 * b, (3; t)"))
    b = sf.build(doc)
    assert [b.ctx.format(g) for g in b.kernel] == ["(0;t)", "(2;t)", "(3;t)"]


def test_permutation_finite_part():
    text = """
group {
  rank = 3
  finite = <(1,2), (1,2,3)>
  action = permutation
}
chain { level { lattice = [[2^i, 0, 0], [0, 2^i, 0], [0, 0, 2^i]]; finite = all } }
"""
    b = sf.build(sf.parse_spec(text), depth=1)
    assert b.ctx.finite.order == 6
    assert b.chain.level(1).index == 8


def test_heisenberg_level_needs_center():
    text = "group { family = heisenberg }\nchain { level { lattice = [[2, 0], [0, 2]] } }"
    with pytest.raises(sf.SpecError, match="center"):
        sf.build(sf.parse_spec(text))


@pytest.mark.parametrize("name,text", bundled(), ids=[n for n, _ in bundled()])
def test_bundled_round_trip(name, text):
    doc = sf.parse_spec(text)
    canon = sf.serialize(doc)
    again = sf.parse_spec(canon)
    assert again == doc
    assert sf.serialize(again) == canon


def test_round_trip_keeps_meaning():
    doc = sf.parse_spec(DIHEDRAL)
    b1 = sf.build(doc)
    b2 = sf.build(sf.parse_spec(doc.to_text()))
    assert [H.describe() for H in b1.chain.levels] == [H.describe() for H in b2.chain.levels]


# -- expressions ------------------------------------------------------------------

names = st.sampled_from(["p", "q", "i"])
leaves = st.one_of(st.integers(0, 9).map(sf.Num), names.map(sf.Var))


def trees(children):
    return st.one_of(
        st.builds(sf.Neg, children),
        st.builds(sf.Bin, st.sampled_from(["+", "-", "*"]), children, children),
        st.builds(sf.Bin, st.just("^"), children, st.integers(0, 3).map(sf.Num)),
    )


exprs = st.recursive(leaves, trees, max_leaves=8)
ENV = {"p": 2, "q": 3, "i": 2}


def reference(e):
    if isinstance(e, sf.Num):
        return e.value
    if isinstance(e, sf.Var):
        return ENV[e.name]
    if isinstance(e, sf.Neg):
        return -reference(e.arg)
    a, b = reference(e.left), reference(e.right)
    return {"+": a + b, "-": a - b, "*": a * b}[e.op] if e.op != "^" else a ** b


@settings(max_examples=200, deadline=None)
@given(exprs)
def test_expression_round_trip(e):
    text = sf.expr_text(e)
    p = sf._Parser(text)
    back = p.expr()
    assert p.tok.kind == "eof"
    assert back == e
    assert sf.evaluate(back, ENV) == reference(e)


@pytest.mark.parametrize("text,value", [("2^3^2", 512), ("-2^2", -4), ("2 * 3 + 4", 10),
                                        ("2 * (3 + 4)", 14), ("10 - 3 - 2", 5), ("2·3", 6)])
def test_precedence(text, value):
    assert sf.evaluate(sf._Parser(text).expr(), {}) == value


def test_negative_exponent():
    with pytest.raises(sf.SpecError, match="negative exponent"):
        sf.evaluate(sf._Parser("2^(0-1)").expr(), {})
