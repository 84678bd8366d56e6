import json

import pytest

from app import EXIT_ERROR, EXIT_OK, EXIT_UNDECIDED, run_command
from models.bounds import Bounds
from utils.sketch_parser import print_sketch
from conftest import fixture_path, load_sketch


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for var in ("SKETCH_MAX_ITER", "SKETCH_MAX_WORD_LEN", "SKETCH_MAX_MORPHISMS", "SKETCH_MAX_SIZE",
                "SKETCH_MAX_NODES", "SKETCH_PROBE_WORD_LEN"):
        monkeypatch.delenv(var, raising=False)


def run(*argv):
    return run_command(list(argv))


def test_parse_prints_the_sketch_back():
    code, out = run("parse", fixture_path("prod.sk"))
    assert code == EXIT_OK
    assert out == print_sketch(load_sketch("prod.sk"))


def test_realize_term2():
    code, out = run("realize", fixture_path("term2.sk"))
    assert code == EXIT_OK
    assert out.startswith("Stabilized\n")
    assert "iterations: 2" in out
    assert "morphisms: 3" in out
    assert 'edge "a:term:fill": a -> t;' in out


def test_realize_writes_the_trace(tmp_path):
    trace = tmp_path / "term2.trace"
    code, _ = run("realize", fixture_path("term2.sk"), "--trace", str(trace))
    assert code == EXIT_OK
    assert trace.read_text() == "ATTACH y=a alpha=term legs=[] filler=a:term:fill\n"


def test_structured_output_is_stable():
    first = run("realize", fixture_path("sq.sk"), "--format", "structured")
    second = run("realize", fixture_path("sq.sk"), "--format", "structured")
    assert first == second
    document = json.loads(first[1])
    assert document["status"] == "Stabilized"
    assert len(document["category"]["morphisms"]) == 8
    assert document["trace"][0]["kind"] == "ATTACH"


def test_budget_exhaustion_is_undecided():
    code, out = run("realize", fixture_path("sq.sk"), "--max-iter", "1")
    assert code == EXIT_UNDECIDED
    assert out.startswith("BudgetExhausted\n")


def test_models():
    code, out = run("models", fixture_path("term2.sk"))
    assert code == EXIT_OK
    assert out.startswith("3 models\n")
    code, out = run("models", fixture_path("sq.sk"), "--realized", "--max-size", "1", "--format", "structured")
    assert code == EXIT_OK
    assert json.loads(out)["count"] == 2


@pytest.mark.parametrize("name,expected", [("prod.sk", "true\n"), ("term2.sk", "false\n")])
def test_check_realized(name, expected):
    assert run("check-realized", fixture_path(name)) == (EXIT_OK, expected)


def test_free_cat():
    code, out = run("free-cat", fixture_path("idempotent.sk"))
    assert code == EXIT_OK
    assert out.startswith("2 morphisms\n")
    code, out = run("free-cat", fixture_path("idempotent.sk"), "--from", "v", "--to", "v", "--max-word-len", "3")
    assert code == EXIT_OK
    assert out.startswith("4 paths v -> v\n")


def test_free_cat_on_an_infinite_base(tmp_path):
    loop = tmp_path / "loop.sk"
    loop.write_text("object v;\nedge e: v -> v;\n")
    code, out = run("free-cat", str(loop), "--max-word-len", "3", "--max-morphisms", "16")
    assert code == EXIT_UNDECIDED
    assert out.startswith("Diverged")


def test_orthogonal():
    code, out = run("orthogonal", fixture_path("term2.sk"))
    assert code == EXIT_OK
    assert out.startswith("orthogonal: true\n")
    code, out = run("orthogonal", fixture_path("term2.sk"), "--against", "base")
    assert code == EXIT_OK
    assert out.startswith("orthogonal: false\n")
    assert "a/term: NotOrthogonal" in out


def test_transport():
    code, out = run("transport", fixture_path("term2.sk"))
    assert code == EXIT_OK
    assert out.startswith("bijective: true\n")
    assert "models of E: 3" in out


def test_yoneda():
    code, out = run("yoneda", fixture_path("term2.sk"), "--object", "a")
    assert code == EXIT_OK
    assert out.startswith("Hom(a, -), is_model: true\n")
    assert "t: a:term:fill" in out
    code, out = run("yoneda", fixture_path("term2.sk"), "--object", "z")
    assert code == EXIT_ERROR
    assert out.startswith("error:")


def test_errors_exit_with_2(tmp_path):
    code, out = run("parse", str(tmp_path / "missing.sk"))
    assert code == EXIT_ERROR
    assert out.startswith("error:")

    bad = tmp_path / "bad.sk"
    bad.write_text("object a\nobject b;\n")
    code, out = run("realize", str(bad))
    assert code == EXIT_ERROR
    assert "line 2, column 1" in out

    assert run("frobnicate", fixture_path("term2.sk"))[0] == EXIT_ERROR
    assert run("realize", fixture_path("term2.sk"), "--max-iter", "-1")[0] == EXIT_ERROR


def test_bounds_from_env(monkeypatch):
    monkeypatch.setenv("SKETCH_MAX_SIZE", "3")
    monkeypatch.setenv("SKETCH_MAX_ITER", "4")
    bounds = Bounds.from_env()
    assert bounds.max_size == 3
    assert bounds.max_iter == 4
    assert bounds.max_word_len == 8
    code, out = run("models", fixture_path("term2.sk"), "--max-size", "1")
    assert out.startswith("2 models\n")
