import json
from io import StringIO

import pytest

from skipcheck.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(*argv):
    out = StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_check_stack_passes():
    code, out = run("check", "stack", "--capacity", "2", "--elems", "0,1", "--imem-max", "4", "--mode", "exhaustive")
    assert code == EXIT_OK
    assert "result" in out and "PASS" in out


def test_check_mutant_fails_with_json_counterexample():
    code, out = run("check", "stack", "--mutant", "no-drain", "--imem-max", "3", "--format", "json")
    assert code == EXIT_FAIL
    d = json.loads(out)
    assert not d["passed"] and d["counterexamples"]
    assert d["counterexamples"][0]["obligation"] == "VIOLATION"


def test_check_vec_random():
    code, out = run("check", "vec", "--mode", "random", "--seed", "7", "--samples", "10000", "--format", "json")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["states_checked"] > 10000 and d["max_skip"] == 2


def test_table_and_json_counts_agree():
    args = ("check", "memc", "--reqs-max", "3", "--mutant", "keep-oldest")
    _, table = run(*args)
    _, js = run(*args, "--format", "json")
    d = json.loads(js)
    rows = dict(map(str.strip, line.rsplit(None, 1)) for line in table.splitlines() if not line.startswith("{"))
    assert int(rows["states checked"]) == d["states_checked"]
    assert int(rows["counterexamples"]) == d["total_counterexamples"]
    assert int(rows["VIOLATION"]) == d["histogram"]["VIOLATION"]
    assert int(rows["non-good (skipped)"]) == d["non_good"]


def test_json_schema_is_stable():
    keys = None
    for model in ("stack", "des"):
        _, out = run("check", model, "--imem-max", "2", "--format", "json")
        k = set(json.loads(out))
        assert keys is None or k == keys
        keys = k


@pytest.mark.parametrize(
    "argv",
    [
        ("check", "stack", "--mode", "random"),
        ("check", "stack", "--capacity", "0"),
        ("check", "stack", "--mutant", "bogus"),
        ("des", "/nonexistent/file"),
    ],
)
def test_config_errors_exit_2(argv):
    assert run(*argv)[0] == EXIT_USAGE


def test_bad_flag_value_exits_2():
    with pytest.raises(SystemExit) as e:
        run("check", "stack", "--elems", "a,b")
    assert e.value.code == 2


def test_vectorize_two_adds(tmp_path):
    src = tmp_path / "p.s"
    src.write_text("add a b c\nadd d e f\n")
    dst = tmp_path / "p.v"
    code, out = run("vectorize", str(src), "-o", str(dst))
    assert code == EXIT_OK and "validation: OK" in out
    assert dst.read_text() == "vadd a b c | d e f\n"


def test_vectorize_empty_program(tmp_path):
    src = tmp_path / "empty.s"
    src.write_text("# nothing\n")
    code, out = run("vectorize", str(src))
    assert code == EXIT_OK
    assert "0 scalar -> 0 vector" in out


def test_vectorize_parse_error(tmp_path, capsys):
    src = tmp_path / "bad.s"
    src.write_text("add a b c\nadd a b\n")
    assert run("vectorize", str(src))[0] == EXIT_USAGE
    assert "line 2" in capsys.readouterr().err


def test_validate_vec_rejects_dependent_pack(tmp_path):
    s = tmp_path / "s"
    v = tmp_path / "v"
    s.write_text("add a b c\nadd d a e\n")
    v.write_text("vadd a b c | d a e\n")
    code, out = run("validate-vec", str(s), str(v))
    assert code == EXIT_FAIL
    assert "step 0" in out and "VIOLATION" in out
    v.write_text("add a b c\nadd d a e\n")
    assert run("validate-vec", str(s), str(v))[0] == EXIT_OK


def test_des_single_event(tmp_path):
    ev = tmp_path / "ev"
    ev.write_text("event e1: set x 1\nat 3 e1\n")
    code, out = run("des", str(ev), "--steps", "1")
    assert code == EXIT_OK
    assert "skip 4" in out and "trace: OK" in out


def test_des_empty_schedule(tmp_path):
    ev = tmp_path / "ev"
    ev.write_text("event e1: set x 1\n")
    code, out = run("des", str(ev), "--steps", "5", "--format", "json")
    assert code == EXIT_OK
    d = json.loads(out)
    assert [s["skip_count"] for s in d["steps"]] == [1] * 5


def test_des_mutant(tmp_path):
    ev = tmp_path / "ev"
    ev.write_text("event e1: set x 1\nat 3 e1\n")
    code, out = run("des", str(ev), "--mutant", "forget-remove")
    assert code == EXIT_FAIL
    assert "FAILED at step 1" in out


def test_des_start_after_schedule(tmp_path):
    ev = tmp_path / "ev"
    ev.write_text("at 1 e1\n")
    assert run("des", str(ev), "--start", "5")[0] == EXIT_USAGE


def test_run_machines(tmp_path):
    p = tmp_path / "p"
    p.write_text("push 1\npush 2\ntop\n")
    code, out = run("run", "bstk", str(p))
    assert code == EXIT_OK
    last = json.loads(out.splitlines()[3].split(None, 1)[1])
    assert last["stk"] == [2, 1] and last["ibuf"] == []
    _, out = run("run", "stk", str(p), "--steps", "2")
    assert len(out.splitlines()) == 3

    m = tmp_path / "m"
    m.write_text("write 0 5\nwrite 0 6\nread 0\n")
    code, out = run("run", "optmemc", str(m), "--mem", "0,0")
    assert code == EXIT_OK
    assert json.loads(out.splitlines()[3].split(None, 1)[1])["mem"] == [6, 0]

    v = tmp_path / "v"
    v.write_text("vadd a b c | d e f\n")
    assert run("run", "vector", str(v))[0] == EXIT_OK
    assert run("run", "scalar", str(v))[0] == EXIT_USAGE
