import json
import subprocess
import sys

import pytest

from pucover.cli import CHECKS, main
from pucover.pou import SimplicialComplex
from pucover.serialize import export_dot


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


SINGLETONS = {"index": ["1", "2", "3"], "members": {"1": [0], "2": [1], "3": [2]}}
PAIRS = {"index": ["12", "23"], "members": {"12": [0, 1], "23": [1, 2]}}
ROW = {"index": ["a", "b", "c"], "rows": {"0": {"a": "1/2", "b": "3/10", "c": "1/5"}}}


class TestCheck:
    def test_star_refines_passes(self, capsys, write):
        code, out, _ = run(capsys, "check", "star-refines", write("a.json", SINGLETONS), write("b.json", PAIRS))
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_self_star_refinement_fails(self, capsys, write):
        b = write("b.json", PAIRS)
        code, out, _ = run(capsys, "check", "star-refines", b, b)
        assert code == 1
        assert json.loads(out)["witness"]

    def test_sequence_precondition_witness(self, capsys, write):
        code, out, _ = run(capsys, "check", "sequence", write("s.json", {"covers": [PAIRS, PAIRS]}))
        assert code == 1
        assert json.loads(out)["witness"] == [1, 2]

    def test_derivative_set_mode_counterexample(self, capsys, write):
        f = write("f.json", {
            "index": ["a", "b", "c"],
            "rows": {
                "0": {"a": "1/2", "b": "1/4", "c": "1/4"},
                "1": {"a": "1/4", "b": "1/2", "c": "1/4"},
                "2": {"a": "1"},
                "3": {"b": "1"},
            },
        })
        assert run(capsys, "check", "derivative-star", f)[0] == 0
        assert run(capsys, "check", "derivative-star", f, "--mode", "set")[0] == 1

    def test_sierpinski_star_basis(self, capsys, write):
        x = write("x.json", {"points": 2, "basis": [[0], [0, 1]]})
        seq = write("s.json", [{"members": {"X": [0, 1]}}, {"members": {"a": [0], "X": [0, 1]}}])
        for mode in ("star", "starstar", "setstar"):
            assert run(capsys, "check", "star-basis", x, seq, "--mode", mode)[0] == 1

    def test_zero_row_not_normalizable(self, capsys, write):
        p = write("p.json", {"index": ["a"], "rows": {"0": {"a": "2"}, "1": {}}})
        code, out, _ = run(capsys, "check", "normalizable", p)
        assert code == 1 and json.loads(out)["witness"] == 1

    def test_missing_files(self, capsys):
        assert run(capsys, "check", "refines")[0] == 2

    def test_every_check_is_registered(self):
        assert {"refines", "star-refines", "small", "discrete", "point-finite", "star-basis",
                "carriers-basis", "sequence", "derivative", "chain-bounds", "discretization",
                "shrinking", "group-chain", "alexandroff"} <= set(CHECKS)


class TestInputErrors:
    def test_truncated_json(self, capsys, write):
        code, _, err = run(capsys, "derive", write("f.json", '{"index": ["a"], "rows": {'))
        assert code == 2
        assert "line 1" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "derive", str(tmp_path / "nope.json"))[0] == 2

    def test_schema_violation(self, capsys, write):
        bad = write("a.json", {"members": {"x": ["zero"]}})
        assert run(capsys, "check", "refines", bad, bad)[0] == 2

    def test_rows_not_summing_to_one(self, capsys, write):
        assert run(capsys, "derive", write("f.json", {"index": ["a"], "rows": {"0": {"a": "1/2"}}}))[0] == 2


class TestCommands:
    def test_derive(self, capsys, write):
        code, out, _ = run(capsys, "derive", write("f.json", ROW))
        assert code == 0
        assert json.loads(out)["rows"]["0"] == {"{a}": "1/5", "{a,b}": "1/5", "{a,b,c}": "3/5"}

    def test_chain_metric(self, capsys, write):
        whole = {"members": {"X": [0, 1, 2]}}
        seq = write("s.json", {"covers": [whole, whole, SINGLETONS]})
        code, out, _ = run(capsys, "chain-metric", "--covers", seq)
        data = json.loads(out)
        assert code == 0
        assert set(data) == {"rho", "d", "quotient", "pou"}
        assert "0.5" not in out and "1/4" in out

    def test_chain_metric_bad_emit(self, capsys, write):
        seq = write("s.json", [{"members": {"X": [0, 1]}}])
        assert run(capsys, "chain-metric", "--covers", seq, "--emit", "bogus")[0] == 2

    def test_discretize_worked_example(self, capsys, write):
        v = write("v.json", {"index": ["1", "2"], "members": {"1": [0, 1], "2": [1, 2]}})
        u = write("u.json", [{"index": ["a", "b", "c", "bc"],
                              "members": {"a": [0], "b": [1], "c": [2], "bc": [1, 2]}}])
        code, out, _ = run(capsys, "discretize", "--wellordered", v, "--covers", u)
        data = json.loads(out)
        assert code == 0
        assert data["alpha"] == {"a": "1", "b": "1", "c": "2", "bc": "2"}
        assert data["D"] == {"1": [0], "2": [2]}

    def test_shrink_line(self, capsys, write):
        v = write("v.json", PAIRS)
        m = write("m.json", {"points": [[1], [2], [3]]})
        code, out, _ = run(capsys, "shrink", "--cover", v, "--metric", m)
        assert code == 0 and json.loads(out)["verified"] is True

    def test_embed(self, capsys, write):
        code, out, _ = run(capsys, "embed", write("e.json", {"functions": [["1", "0"]]}))
        data = json.loads(out)
        assert code == 0
        assert data["coords"] == {"0": ["1/2"], "1": ["0/1"]} and data["injective"] is True

    def test_generate_random_density_one(self, capsys):
        code, out, _ = run(capsys, "generate", "random", "--points", "3", "--members", "2", "--density", "1")
        assert json.loads(out)["members"] == {"0": [0, 1, 2], "1": [0, 1, 2]}

    def test_generate_group_z4(self, capsys, write):
        chain = write("c.json", {"chain": [[0, 1, 2, 3], [3, 0, 1], [0]]})
        code, out, _ = run(capsys, "generate", "group", "--cyclic", "4", "--chain", chain)
        assert code == 0
        assert json.loads(out)["chain"] == [[0, 1, 2, 3], [0, 1, 3], [0]]

    def test_generate_group_bad_chain(self, capsys, write):
        chain = write("c.json", [[0, 1, 2, 3], [3, 0, 1], [3, 0, 1]])
        code, out, _ = run(capsys, "generate", "group", "--cyclic", "4", "--chain", chain)
        assert code == 1 and json.loads(out)["witness"] == 2

    def test_pipeline(self, capsys):
        code, out, _ = run(capsys, "pipeline", "star-theorem", "--seed", "3")
        assert code == 0 and json.loads(out)["passed"] is True


class TestDot:
    def test_single_vertex(self):
        k = SimplicialComplex.from_faces(["v"], [["v"]])
        assert export_dot(k) == 'graph nerve {\n  "v";\n}\n'

    def test_edge(self):
        k = SimplicialComplex.from_faces(["u", "v"], [["u", "v"]])
        assert export_dot(k).count("--") == 1

    def test_triangle_nerve(self, capsys, write):
        c = write("c.json", {"members": {"12": [0, 1], "23": [1, 2], "31": [2, 0]}})
        code, out, _ = run(capsys, "nerve", c, "--format", "dot")
        assert code == 0
        assert out.count(" -- ") == 3


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["generate", "balls", "--seed", "5", "--depth", "3"],
        ["generate", "group", "--dihedral", "5", "--seed", "2"],
        ["generate", "partition", "--seed", "9", "--points", "7"],
        ["pipeline", "michael-nagami", "--seed", "4"],
        ["pipeline", "birkhoff", "--seed", "1"],
    ])
    def test_byte_identical(self, capsys, argv):
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second

    def test_console_script(self):
        cmd = [sys.executable, "-m", "pucover.cli", "generate", "metric", "--seed", "1", "--points", "3"]
        a = subprocess.run(cmd, capture_output=True, check=True).stdout
        b = subprocess.run(cmd, capture_output=True, check=True).stdout
        assert a == b and b"." not in a
