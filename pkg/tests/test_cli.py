import json

import pytest

from chaincalc import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_dihedral(capsys):
    code, out, _ = run(capsys, "analyze", "dihedral", "--format", "machine")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "chaincalc-report/1"
    assert doc["verdict"]["kind"] == "finite" and doc["verdict"]["size"] == 2
    assert all(e["status"] == "pass" for e in doc["expectations"])
    assert doc["regularity"]["virtuallyRegularWitness"] == "C2"


def test_analyze_human(capsys):
    code, out, _ = run(capsys, "analyze", "dihedral")
    assert code == 0
    assert "discriminant: finite(2)" in out
    assert "expectation" in out


def test_main6_lower_bound(capsys):
    code, out, _ = run(capsys, "analyze", "heis-main6", "--depth", "3", "--format", "machine")
    assert code == 0
    v = json.loads(out)["verdict"]
    assert v["kind"] == "lowerBound"
    assert v["growth"] == [2, 4, 8]


def test_coset_cap_exit_2(capsys):
    code, out, err = run(capsys, "analyze", "dihedral", "--coset-cap", "10", "--format", "machine")
    assert code == 2
    assert json.loads(out)["error"]["kind"] == "resource"
    assert "chaincalc:" in err


def test_distinct_primes_exit_1(capsys):
    code, out, err = run(capsys, "analyze", "dihedral-swap", "--set", "q=2", "--set", "p=2",
                         "--format", "machine")
    assert code == 1
    assert "primes must be distinct" in err
    assert json.loads(out)["error"]["kind"] == "semantic"


def test_bad_set_syntax(capsys):
    code, _, err = run(capsys, "analyze", "dihedral", "--set", "depth")
    assert code == 1 and "k=v" in err


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "analyze", str(tmp_path / "none.chain"))
    assert code == 1


def test_spec_file_and_out(capsys, tmp_path):
    from chaincalc.specfile import parse_spec, serialize
    from importlib import resources
    text = (resources.files("chaincalc") / "specs" / "dihedral.chain").read_text()
    spec = tmp_path / "d.chain"
    spec.write_text(serialize(parse_spec(text)))
    out_file = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", str(spec), "--format", "machine", "--out", str(out_file))
    assert code == 0 and out == ""
    assert json.loads(out_file.read_text())["verdict"]["size"] == 2


def test_catalog_dihedral(capsys):
    code, out, _ = run(capsys, "catalog", "dihedral", "--format", "machine")
    assert code == 0
    doc = json.loads(out)
    assert {c["status"] for c in doc["entries"][0]["claims"]} == {"pass"}


def test_catalog_alias_depth(capsys):
    code, out, _ = run(capsys, "catalog", "example63", "--depth", "2")
    assert code == 0
    assert "pass" in out


def test_catalog_unknown(capsys):
    code, _, err = run(capsys, "catalog", "no-such-example")
    assert code == 1 and err


def test_catalog_unknown_param(capsys):
    code, _, err = run(capsys, "catalog", "dihedral", "--set", "zz=1")
    assert code == 1 and "zz" in err


def tree_header(out):
    head = out.splitlines()[0]
    return dict(kv.split("=") for kv in head.split()[2:])


def test_tree_dihedral(capsys):
    code, out, _ = run(capsys, "tree", "dihedral", "--depth", "2")
    assert code == 0
    h = tree_header(out)
    assert (h["vertices"], h["edges"]) == ("7", "6")
    assert out.splitlines()[1] == "basepoint 0:0 1:0 2:0"


def test_tree_example63(capsys):
    code, out, _ = run(capsys, "tree", "example63", "--depth", "1")
    assert code == 0 and tree_header(out)["vertices"] == "13"


def test_tree_root_only(capsys):
    code, out, _ = run(capsys, "tree", "dihedral", "--depth", "0")
    assert code == 0 and tree_header(out) == {"depth": "0", "vertices": "1", "edges": "0"}


def test_tree_dot(capsys):
    code, out, _ = run(capsys, "tree", "dihedral", "--depth", "1", "--format", "dot")
    assert code == 0 and out.startswith("digraph") and '"0:0" -> "1:1"' in out


def test_kernel_command(capsys):
    code, out, _ = run(capsys, "kernel", "dihedral", "--elements", "b, a^2", "--depth", "3",
                       "--format", "machine")
    assert code == 0
    rows = json.loads(out)["elements"]
    assert [r["word"] for r in rows] == ["b", "a^2"]
    # a^2 lies in G_1 only
    assert rows[1]["imagesTrivial"][0] is True
    assert rows[1]["imagesTrivial"][-1] is False


def test_kernel_needs_elements(capsys):
    code, _, err = run(capsys, "kernel", "heis-wr")
    assert code in (0, 1)
    if code == 1:
        assert "no elements" in err


def test_conjugate(capsys):
    code, out, _ = run(capsys, "conjugate", "dihedral", "--reps", "a", "--depth", "3",
                       "--format", "machine")
    assert code == 0
    prov = json.loads(out)["provenance"]
    assert prov["equivalentToOriginal"] is False
    assert prov["equivalenceFailedAt"][-1] == 2


def test_conjugate_trivial_reps(capsys):
    code, out, _ = run(capsys, "conjugate", "dihedral", "--reps", "e", "--depth", "3",
                       "--format", "machine")
    assert code == 0
    assert json.loads(out)["provenance"]["equivalentToOriginal"] is True


@pytest.mark.parametrize("argv", [["analyze", "dihedral", "--format", "machine"],
                                  ["catalog", "product", "--format", "machine"],
                                  ["tree", "heis-wr", "--depth", "2"]])
def test_deterministic(capsys, argv):
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
