import json
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cases import random_premorphism
from ordered_bratteli import ParseError, ValidationError, io
from ordered_bratteli.cli import load_prefix, main
from ordered_bratteli.dot import render_dot
from ordered_bratteli.fixtures import FIXTURES, load_fixture
from ordered_bratteli.generators import random_diagram, random_extension
from ordered_bratteli.premorphism import premorphisms_equivalent

SEEDS = st.integers(0, 10**6)
FAST = settings(max_examples=25, deadline=None)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ------------------------------------------------------------ JSON

@FAST
@given(SEEDS)
def test_diagram_round_trip(seed):
    d = random_diagram(random.Random(seed), max_vertices=3, max_cycle=2)
    assert io.load_diagram(io.dumps(io.diagram_to_json(d))) == d


@FAST
@given(SEEDS)
def test_premorphism_round_trip(seed):
    f = random_premorphism(random.Random(seed))
    g = io.premorphism_from_json(json.loads(io.dumps(io.premorphism_to_json(f))))
    assert g.source == f.source and g.target == f.target
    assert [g.level(n) for n in range(8)] == [f.level(n) for n in range(8)]
    assert all(g.layer(n).fibers == f.layer(n).fibers for n in range(8))
    assert premorphisms_equivalent(f, g)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_values_round_trip(name, tmp_path):
    fx = load_fixture(name)
    for key, d in fx.diagrams.items():
        io.save(d, tmp_path / f"{key}.json")
        assert io.load_diagram(tmp_path / f"{key}.json") == d
    some = next(iter(fx.diagrams.values()))
    for key, x in fx.paths.items():
        assert io.path_from_json(json.loads(io.dumps(x))) == x
    for key, ext in fx.extensions.items():
        back = io.extension_from_json(json.loads(io.dumps(ext)), fx.diagrams.get(key, some))
        assert back.assignment == ext.assignment


@FAST
@given(SEEDS)
def test_extension_round_trip(seed):
    rng = random.Random(seed)
    d = random_diagram(rng, max_vertices=3, max_cycle=2)
    ext = random_extension(rng, d)
    assert io.extension_from_json(io.extension_to_json(ext), d).assignment == ext.assignment


def test_missing_rank_zero_is_a_validation_error():
    obj = io.diagram_to_json(load_fixture("two_odometer").diagrams["B"])
    obj["cycle"][0]["edges"] = [e for e in obj["cycle"][0]["edges"] if e["rank"] != 0]
    with pytest.raises(ValidationError) as info:
        io.diagram_from_json(obj)
    assert not info.value.report.ok


def test_parse_errors_name_the_location():
    with pytest.raises(ParseError, match="line 1 column"):
        io.load_diagram('{"preamble": [}')
    with pytest.raises(ParseError, match="missing field 'cycle'"):
        io.load_diagram('{"preamble": []}')
    with pytest.raises(ParseError, match="rank"):
        io.prefix_from_json([{"range": "a", "rank": "0"}])


def test_extreme_tails_resolve():
    d = load_fixture("fig8").diagrams["B"]
    x = io.path_from_json({"prefix": [{"range": "b", "rank": 0}], "tail": "all_max"}, d)
    assert x.head == (("b", 0),)
    with pytest.raises(ParseError):
        io.path_from_json({"prefix": [], "tail": "all_max"})


def test_premorphism_file_references(tmp_path):
    fx = load_fixture("counterexample")
    f = fx.premorphisms["f"]
    io.save(f.source, tmp_path / "b.json")
    io.save(f.target, tmp_path / "c.json")
    (tmp_path / "f.json").write_text(json.dumps(io.premorphism_to_json(f, "b.json", "c.json")))
    g = io.load_premorphism(tmp_path / "f.json")
    assert g.source == f.source and premorphisms_equivalent(f, g)


def test_inline_prefixes():
    assert load_prefix("a:0,b:1") == (("a", 0), ("b", 1))
    assert load_prefix('[["a", 0]]') == (("a", 0),)
    assert load_prefix("") == ()


# ------------------------------------------------------------ DOT

def test_dot_odometer():
    text = render_dot(load_fixture("two_odometer").diagrams["B"], 3)
    assert text == render_dot(load_fixture("two_odometer").diagrams["B"], 3)
    groups = [line for line in text.splitlines() if "rank=same" in line]
    assert sum(g.count("[label=") for g in groups) == 4
    assert text.count(" -> ") == 6


def test_dot_premorphism_has_one_extra_node_per_level():
    fx = load_fixture("counterexample")
    text = render_dot(fx.premorphisms["f"], 3)
    for n in range(1, 4):
        b_nodes = text.count(f'"B{n}:')
        c_nodes = text.count(f'"C{n}:')
        assert c_nodes > b_nodes  # C nodes also appear as arrow targets
    assert text.count("style=dashed") == 1 + sum(len(fx.premorphisms["f"].layer(n)) for n in range(1, 4))
    assert text.count("rank=same") == 8
    with pytest.raises(ValueError):
        render_dot(fx.diagrams["B"], 0)


def test_dot_node_declarations_per_level():
    fx = load_fixture("counterexample")
    text = render_dot(fx.premorphisms["f"], 3)
    groups = [line for line in text.splitlines() if "rank=same" in line]
    b_groups = [g for g in groups if '"B' in g]
    c_groups = [g for g in groups if '"C' in g]
    for n in range(1, 4):
        assert c_groups[n].count("[label=") == b_groups[n].count("[label=") + 1


# ------------------------------------------------------------ CLI

def test_cli_validate(capsys, tmp_path):
    code, out, _ = run(capsys, "validate", "--fixture", "two_odometer")
    assert code == 0
    obj = io.diagram_to_json(load_fixture("two_odometer").diagrams["B"])
    obj["cycle"][0]["edges"] = [e for e in obj["cycle"][0]["edges"] if e["rank"] != 0]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "validate", "--diagram", str(bad))
    assert code == 1 and "fiber v" in out
    bad.write_text("{")
    code, _, err = run(capsys, "validate", "--diagram", str(bad))
    assert code == 2 and err.startswith("error:")


def test_cli_missing_file(capsys):
    code, _, err = run(capsys, "validate", "--diagram", "/nonexistent/d.json")
    assert code == 2 and "error:" in err


def test_cli_json_output_parses(capsys):
    for argv in (["maxpaths", "--fixture", "fig8"], ["fixtures", "list"],
                 ["rectangles", "--fixture", "counterexample"],
                 ["sadic-export", "--fixture", "two_odometer", "--depth", "3"],
                 ["step", "--fixture", "two_odometer", "--prefix", "v:0,v:1"]):
        code, out, _ = run(capsys, *argv, "--json")
        assert code == 0, argv
        json.loads(out)


def test_cli_step(capsys):
    code, out, _ = run(capsys, "step", "--fixture", "two_odometer", "--prefix", "v:1,v:0")
    assert code == 0 and "v:0 v:1" in out
    code, out, _ = run(capsys, "step", "--fixture", "two_odometer", "--prefix", "v:0,v:1", "--inverse")
    assert code == 0 and "v:1 v:0" in out


def test_cli_construct_then_check(capsys, tmp_path):
    code, _, _ = run(capsys, "construct", "--fixture", "counterexample", "--diagram", "@counterexample/B",
                     "--min", "@counterexample/z", "--max", "@counterexample/y", "--out", str(tmp_path))
    assert code == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"source.json", "target.json", "premorphism.json", "x.json", "tx.json",
            "ext_source.json", "ext_target.json"} <= names
    code, out, _ = run(capsys, "check-factoring", "--premorphism", str(tmp_path / "premorphism.json"),
                       "--ext-source", str(tmp_path / "ext_source.json"),
                       "--ext-target", str(tmp_path / "ext_target.json"), "--json")
    assert code == 1
    report = json.loads(out)
    assert report["verdict"] == "fail"
    x = io.load_path(tmp_path / "x.json")
    assert [io.path_from_json(w["path"]) for w in report["witnesses"]] == [x]


def test_cli_verdicts(capsys):
    assert run(capsys, "check-factoring", "--fixture", "rank2")[0] == 0
    assert run(capsys, "premorph-validate", "--fixture", "counterexample")[0] == 0
    assert run(capsys, "classify-decisive", "--fixture", "fig7", "--min", "@fig7/z", "--max", "@fig7/y")[0] == 0
    code, out, _ = run(capsys, "rank2-reduce", "--fixture", "cantor", "--diagram", "@cantor/right")
    assert code == 0 and "TwoOdometers" in out
    code, out, _ = run(capsys, "pipeline", "--fixture", "counterexample", "--index", "2", "--word-len", "30")
    assert code == 1 and "shift equivariance: FAIL" in out


def test_cli_fixture_export(capsys, tmp_path):
    code, out, _ = run(capsys, "fixtures", "export", "--fixture", "rank2", "--out", str(tmp_path))
    assert code == 0
    d = io.load_diagram(tmp_path / "rank2" / "diagrams" / "B.json")
    assert d == load_fixture("rank2").diagrams["B"]


def test_cli_unknown_fixture(capsys):
    assert run(capsys, "validate", "--fixture", "nope")[0] == 2


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "ordered_bratteli.cli", "fixtures", "list"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "counterexample" in proc.stdout
