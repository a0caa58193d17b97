import hashlib
import json
import logging

import pytest

from app.utils.formats import parse_extension, parse_graph, parse_matrix
from main import main
from tests.conftest import E1_TEXT, INTRO_GRAPH_TEXT

O3_TEXT = "vertex v\nedge v v\nedge v v\nedge v v\n"
E2_TEXT_FILE = INTRO_GRAPH_TEXT + "sink v0\naddedge w1 v0\naddedge w3 v0\n"
EXIT_GRAPH_TEXT = "vertex u\nvertex w\nedge u w\nedge w u\nedge u w\n"


@pytest.fixture(autouse=True)
def restore_logging():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def files(tmp_path):
    def write(name, content):
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return str(path)

    return write


def test_ext_of_cuntz_graph(files, capsys):
    assert main(["ext", files("o3.graph", O3_TEXT)]) == 0
    out = capsys.readouterr().out
    assert "coker(A-I) = Z/2" in out
    assert "Ext(C*(G)) = Z/2" in out


def test_ext_refuses_graph_without_condition_L(files, capsys):
    path = files("intro.graph", INTRO_GRAPH_TEXT)
    assert main(["ext", path]) == 3
    assert "Condition (L) fails" in capsys.readouterr().err
    assert main(["ext", "--force", path]) == 0
    out = capsys.readouterr().out
    assert "Ext(C*(G)) = Z" in out
    assert "warning" in out


def test_missing_file_is_a_parse_failure(tmp_path, capsys):
    assert main(["ext", str(tmp_path / "missing.graph")]) == 2


def test_parse_error_exit_code(files):
    assert main(["ext", files("bad.graph", "vertex a\nedge a b\n")]) == 2


def test_wojciech_of_e1(files, capsys):
    assert main(["wojciech", files("e1.ext", E1_TEXT)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "(1,1,2), essential"


def test_wojciech_lists_paths_when_verbose(files, capsys):
    assert main(["wojciech", "-v", files("e1.ext", E1_TEXT)]) == 0
    assert "path w3 -> v0: f3" in capsys.readouterr().out


def test_sum_writes_the_combined_extension(files, tmp_path, capsys):
    target = tmp_path / "sum.ext"
    assert main(["sum", files("e1.ext", E1_TEXT), files("e2.ext", E2_TEXT_FILE), "-o", str(target)]) == 0
    assert "(2,1,3) = (1,1,2) + (1,0,1)" in capsys.readouterr().out
    assert main(["wojciech", str(target)]) == 0
    assert capsys.readouterr().out.startswith("(2,1,3), essential")


def test_sum_of_different_bases(files, capsys):
    other = "vertex a\nedge a a\nedge a a\nsink v0\naddedge a v0\n"
    assert main(["sum", files("e1.ext", E1_TEXT), files("other.ext", other), "-o", files("out.ext", "")]) == 4


def test_essentialize(files, tmp_path, capsys):
    target = tmp_path / "o3.essential.ext"
    assert main(["essentialize", files("o3.graph", O3_TEXT), "-5", "-o", str(target)]) == 0
    assert "Wojciech vector (7)" in capsys.readouterr().out
    extension = parse_extension(target.read_text(encoding="utf-8"))
    assert len(extension.added_edges) == 7


def test_essentialize_checks_vector_length(files):
    assert main(["essentialize", files("o3.graph", O3_TEXT), "1,2"]) == 2


def test_essentialize_reads_a_vector_with_a_leading_minus(files, tmp_path, capsys):
    graph = files("exit.graph", EXIT_GRAPH_TEXT)
    target = tmp_path / "exit.essential.ext"
    assert main(["essentialize", graph, "-5,2", "-o", str(target)]) == 0
    assert "[omega_E] = [(-5,2)] in coker(A-I): True" in capsys.readouterr().out
    assert main(["validate", str(target)]) == 0
    assert "essential: True" in capsys.readouterr().out


def test_counterexample(capsys):
    assert main(["counterexample", "5"]) == 0
    out = capsys.readouterr().out
    assert "5/5 obstructions hold" in out
    assert "every entry of A-I is even: True" in out
    # A-I is twice the path adjacency matrix, singular for odd lengths
    assert "delta_w2 not in im(A-I); class order 2" in out
    assert "delta_w3 not in im(A-I); class order infinite" in out


def test_counterexample_rejects_empty_ladder():
    assert main(["counterexample", "0"]) == 4


def test_snf_writes_the_decomposition(files, tmp_path, capsys):
    matrix_text = "3 3\n0 1 0\n0 -1 1\n0 1 -1\n"
    out = tmp_path / "out"
    assert main(["snf", files("m.txt", matrix_text), "-o", str(out)]) == 0
    assert "coker = Z" in capsys.readouterr().out

    M = parse_matrix(matrix_text)
    U, S, V = (parse_matrix((out / f"m.{part}.txt").read_text(encoding="utf-8")) for part in "USV")
    assert U @ M @ V == S
    assert S.to_lists() == [[1, 0, 0], [0, 1, 0], [0, 0, 0]]


def test_snf_of_several_files(files, tmp_path, capsys):
    out = tmp_path / "out"
    first, second = files("a.txt", "1 1\n6\n"), files("b.txt", "2 1\n2\n4\n")
    assert main(["snf", "--jobs", "2", first, second, "-o", str(out)]) == 0
    assert parse_matrix((out / "a.S.txt").read_text(encoding="utf-8")).to_lists() == [[6]]
    assert parse_matrix((out / "b.S.txt").read_text(encoding="utf-8")).to_lists() == [[2], [0]]


def test_validate_and_check(files, capsys):
    bad = INTRO_GRAPH_TEXT + "sink v0\naddedge w1 v0\naddedge v0 w2\n"
    assert main(["validate", files("bad.ext", bad)]) == 0
    assert "condition (3)" in capsys.readouterr().out
    assert main(["check", files("o3.graph", O3_TEXT)]) == 0
    out = capsys.readouterr().out
    assert "condition (L): True" in out
    assert "essentializing vector: (1)" in out


def test_json_output_is_deterministic(files, capsys):
    path = files("o3.graph", O3_TEXT)
    assert main(["ext", "--format", "json", path]) == 0
    first = capsys.readouterr().out
    assert main(["ext", "--format", "json", path]) == 0
    assert capsys.readouterr().out == first

    document = json.loads(first)
    assert document["command"] == "ext"
    run = document["documents"][0]
    assert run["input_sha256"] == hashlib.sha256(O3_TEXT.encode("utf-8")).hexdigest()
    assert run["result"]["vertex_cokernel"]["invariant_factors"] == [2]
    assert "text" not in run


def test_dot_output(files, capsys):
    assert main(["wojciech", "--format", "dot", files("e1.ext", E1_TEXT)]) == 0
    assert "style=dashed, color=red" in capsys.readouterr().out


def test_batch_over_several_files(files, capsys):
    good = files("o3.graph", O3_TEXT)
    bad = files("intro.graph", INTRO_GRAPH_TEXT)
    assert main(["ext", "--jobs", "2", good, bad, good]) == 3
    captured = capsys.readouterr()
    headers = [line for line in captured.out.splitlines() if line.startswith("== ")]
    assert headers == [f"== {good}", f"== {bad}", f"== {good}"]
    assert "Hypothesis violated" in captured.err


def test_generate(tmp_path, files, capsys):
    ladder = tmp_path / "ladder3.graph"
    assert main(["generate", "ladder", "3", "-o", str(ladder)]) == 0
    graph = parse_graph(ladder.read_text(encoding="utf-8"))
    assert len(graph.edges) == 3 + 4 * 2

    target = tmp_path / "sink.ext"
    assert main(["generate", "add-sink", str(ladder), "w2", "-o", str(target)]) == 0
    extension = parse_extension(target.read_text(encoding="utf-8"))
    assert [e.source for e in extension.added_edges] == ["w2"]
    assert main(["generate", "add-sink", str(ladder), "w7", "-o", str(target)]) == 4


def test_generated_extension_feeds_wojciech(tmp_path, capsys):
    ladder = tmp_path / "l2.graph"
    target = tmp_path / "s.ext"
    assert main(["generate", "ladder", "2", "-o", str(ladder)]) == 0
    assert main(["generate", "add-sink", str(ladder), "w1", "-o", str(target)]) == 0
    assert "addedge w1_v0_1 w1 v0" in target.read_text(encoding="utf-8")
    capsys.readouterr()
    assert main(["wojciech", str(target)]) == 0
    assert capsys.readouterr().out.startswith("(1,0), essential")


@pytest.mark.parametrize("suffix", ["json", "yaml"])
def test_sum_writes_structured_files(files, tmp_path, capsys, suffix):
    target = tmp_path / f"sum.{suffix}"
    assert main(["sum", files("e1.ext", E1_TEXT), files("e2.ext", E2_TEXT_FILE), "-o", str(target)]) == 0
    capsys.readouterr()
    assert main(["wojciech", str(target)]) == 0
    assert capsys.readouterr().out.startswith("(2,1,3), essential")
