import io
import json
import subprocess
import sys

import pytest

from valquiver import catalog
from valquiver import representations as rp
from valquiver import serialize as sz
from valquiver.cli import build_parser, run
from valquiver.quiver_core import RelValuedQuiver
from valquiver.species_tensor import BimoduleSummand, FqSpecies


@pytest.fixture
def files(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("WORKBENCH_CAP", raising=False)

    def w(name, obj):
        (tmp_path / name).write_text(json.dumps(obj))

    q, s = catalog.five_vertex_fold()
    w("q.json", sz.quiver_to_json(q))
    w("s.json", sz.automorphism_to_json(s))
    for name in ["kronecker", "a2", "b2", "three_six_two", "halving_arrow", "halving_chain"]:
        w(f"{name}.json", sz.quiver_to_json(getattr(catalog, name)()))
    w("rel.json", sz.quiver_to_json(RelValuedQuiver.build("12", [("rho", "1", "2", 2, 1)])))
    twisted = FqSpecies.build(2, 1, {"1": 4, "2": 4}, [("a", "1", "2", [BimoduleSummand(4, 1, 0)])])
    w("twisted.json", sz.species_to_json(twisted))
    a2 = FqSpecies.untwisted(catalog.a2(), 2)
    w("P.json", rp.make_representation(a2, (1, 1), {"a": [[1]]}).to_json())
    w("S1.json", rp.simple(a2, "1").to_json())
    w("S2.json", rp.simple(a2, "2").to_json())
    (tmp_path / "broken.json").write_text("{not json")
    return tmp_path


def cli(*argv, stdin=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        old, sys.stdin = sys.stdin, io.StringIO(stdin)
    try:
        code = run(list(argv), out, err)
    finally:
        if stdin is not None:
            sys.stdin = old
    text = out.getvalue()
    return code, (json.loads(text) if code == 0 and text.startswith(("{", "[")) else text), err.getvalue()


# verb -> (argv, check on the parsed JSON output); each line is one core example
COVERAGE = {
    "validate": (["validate", "--quiver", "q.json"], lambda r: r["valid"] and r["connected"] and r["acyclic"]),
    "fold": (["fold", "--quiver", "q.json", "--auto", "s.json"],
             lambda r: [v["d"] for v in r["vertices"]] == [1, 2, 2] and [a["m"] for a in r["arrows"]] == [2, 2, 2]),
    "unfold": (["unfold", "--quiver", "b2.json"],
               lambda r: len(r["quiver"]["vertices"]) == 3 and len(r["quiver"]["arrows"]) == 2),
    "crush": (["crush", "--quiver", "kronecker.json"], lambda r: [a["m"] for a in r["arrows"]] == [2]),
    "functor-f": (["functor-f", "--quiver", "halving_arrow.json"],
                  lambda r: (r["arrows"][0]["dij"], r["arrows"][0]["dji"]) == (2, 1)),
    "lift": (["lift", "--quiver", "rel.json"],
             lambda r: [v["d"] for v in r["vertices"]] == [2, 1] and r["arrows"][0]["m"] == 2),
    "morphisms": (["morphisms", "--source", "halving_arrow.json", "--target", "halving_chain.json"],
                  lambda r: r == {"count": 1}),
    "paths": (["paths", "--quiver", "q.json", "--length", "3", "--auto", "s.json"],
              lambda r: r["path_counts"] == [5, 6, 4, 0]),
    "cartan": (["cartan", "--quiver", "three_six_two.json"], lambda r: r["matrix"] == [[2, -2], [-3, 2]]),
    "forms": (["forms", "--quiver", "three_six_two.json", "--x", "1,0", "--y", "0,1"], lambda r: r["euler"] == -6),
    "roots": (["roots", "--quiver", "a2.json", "--max-coord", "2"],
              lambda r: r["positive_real"] == [[0, 1], [1, 0], [1, 1]]),
    "classify": (["classify", "--quiver", "kronecker.json"], lambda r: r == {"type": "Affine"}),
    "stable": (["stable", "--quiver", "kronecker.json"], lambda r: r == {"basis": [[1, 1]]}),
    "field": (["field", "--p", "2", "--n", "2", "--embed-into", "4"], lambda r: r["field"]["modulus"] == [1, 1, 1]),
    "tensor-decompose": (["tensor-decompose", "--a", "2", "--b", "4"],
                         lambda r: (r["factors"], r["factor_degree"]) == (2, 4)),
    "species-validate": (["species-validate", "--species", "twisted.json"], lambda r: r["valid"]),
    "tensor-dims": (["tensor-dims", "--species", "b2.json", "--q", "2", "--length", "2"],
                    lambda r: r["dims"] == [3, 2, 0]),
    "crush-species": (["crush-species", "--species", "kronecker.json", "--q", "2"],
                      lambda r: len(r["arrows"]) == 1 and len(r["arrows"][0]["summands"]) == 2),
    "iso-check": (["iso-check", "--species", "a2.json", "--q", "2", "--other", "a2.json"], lambda r: r["isomorphic"]),
    "frobenius-verify": (["frobenius-verify", "--quiver", "q.json", "--auto", "s.json", "--q", "2", "--length", "3"],
                         lambda r: r["pass"] and r["fixed_dims"] == [5, 6, 4, 0]),
    "unfold-closure": (["unfold-closure", "--species", "b2.json", "--q", "2", "--explicit"],
                       lambda r: (r["vertex_count"], r["arrow_count"], r["explicit_agrees"]) == (3, 2, True)),
    "reps-enumerate": (["reps-enumerate", "--species", "a2.json", "--q", "2", "--dim", "1,1"],
                       lambda r: len(r["classes"]) == 2),
    "indecomposables": (["indecomposables", "--species", "kronecker.json", "--q", "2", "--dim", "1,1"],
                        lambda r: len(r["indecomposables"]) == 3),
    "hall-number": (["hall-number", "--species", "a2.json", "--q", "2", "--a", "S1.json", "--b", "S2.json",
                     "--c", "P.json"], lambda r: r == {"hall_number": 1}),
    "hall-product": (["hall-product", "--species", "a2.json", "--q", "2", "--left", "1", "--right", "2"],
                     lambda r: [(t["a"], t["b"]) for t in r["terms"]] == [("0/1", "1/2")] * 2),
    "hall-delta": (["hall-delta", "--species", "a2.json", "--q", "2", "--element", "1"],
                   lambda r: len(r["terms"]) == 2),
    "hall-form": (["hall-form", "--species", "a2.json", "--q", "2", "--left", "1,1", "--right", "1,1"],
                  lambda r: r == {"a": "3/1", "b": "0/1"}),
    "serre-check": (["serre-check", "--species", "a2.json", "--q", "2", "--i", "1", "--j", "2"],
                    lambda r: r["holds"] is True),
    "bialgebra-check": (["bialgebra-check", "--species", "a2.json", "--q", "2", "--degree", "2"],
                        lambda r: r["pass"]),
}


def test_coverage_table_names_every_verb():
    sub = next(a for a in build_parser()._actions if a.dest == "verb")
    assert set(sub.choices) == set(COVERAGE)


@pytest.mark.parametrize("verb", sorted(COVERAGE))
def test_verb(files, verb):
    argv, check = COVERAGE[verb]
    code, out, err = cli(*argv)
    assert code == 0, err
    assert check(out), out


def test_output_is_canonical(files):
    first = io.StringIO()
    run(["fold", "--quiver", "q.json", "--auto", "s.json"], first, io.StringIO())
    second = io.StringIO()
    run(["fold", "--quiver", "q.json", "--auto", "s.json"], second, io.StringIO())
    text = first.getvalue().strip()
    assert text == second.getvalue().strip()
    assert text == json.dumps(json.loads(text), sort_keys=True, separators=(",", ":"))


def test_stdin(files):
    doc = (files / "kronecker.json").read_text()
    assert cli("classify", "--quiver", "-", stdin=doc)[:2] == (0, {"type": "Affine"})


def test_text_format(files):
    code, out, _ = cli("--format", "text", "classify", "--quiver", "kronecker.json")
    assert code == 0 and out.strip() == "type: Affine"
    code, out, _ = cli("cartan", "--format", "text", "--quiver", "three_six_two.json")
    assert code == 0 and "matrix:" in out


def test_hall_element_file(files):
    a2 = FqSpecies.untwisted(catalog.a2(), 2)
    elem = {"terms": [{"class": rp.make_representation(a2, (1, 1), {"a": [[1]]}).to_json(), "a": "1", "b": "0"}]}
    (files / "elem.json").write_text(json.dumps(elem))
    code, out, _ = cli("hall-delta", "--species", "a2.json", "--q", "2", "--element", "elem.json")
    assert code == 0 and len(out["terms"]) == 3


def test_parse_errors(files):
    assert cli("classify", "--quiver", "broken.json")[0] == 4
    assert cli("classify", "--quiver", "missing.json")[0] == 4
    assert cli("no-such-verb")[0] == 4
    assert cli("forms", "--quiver", "a2.json", "--x", "1,z")[0] == 4
    assert cli("reps-enumerate", "--species", "a2.json", "--dim", "1,1")[0] == 4  # needs --q
    code, _, err = cli("classify", "--quiver", "-", stdin='{"vertices": [], "arrows": [], "extra": 1}')
    assert code == 4 and "unknown field" in err


def test_validation_errors(files):
    (files / "bad_div.json").write_text(json.dumps(
        {"vertices": [{"id": "1", "d": 2}, {"id": "2", "d": 3}], "arrows": [{"id": "a", "tail": "1", "head": "2", "m": 4}]}))
    assert cli("cartan", "--quiver", "bad_div.json")[0] == 2
    assert cli("validate", "--quiver", "bad_div.json")[1]["valid"] is False
    assert cli("field", "--p", "4", "--n", "1")[0] == 2
    assert cli("serre-check", "--species", "a2.json", "--q", "2", "--i", "1", "--j", "1")[0] == 2


def test_size_limit_and_env_cap(files, monkeypatch):
    argv = ["reps-enumerate", "--species", "kronecker.json", "--q", "2", "--dim", "2,2"]
    assert cli(*argv, "--cap", "10")[0] == 3
    monkeypatch.setenv("WORKBENCH_CAP", "10")
    assert cli(*argv)[0] == 3
    assert cli(*argv, "--cap", "100000")[0] == 0
    monkeypatch.setenv("WORKBENCH_CAP", "ten")
    assert cli(*argv)[0] == 4


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "valquiver.cli", "classify", "--quiver", "kronecker.json"],
                          capture_output=True, text=True, cwd=files)
    assert proc.returncode == 0 and json.loads(proc.stdout) == {"type": "Affine"}
