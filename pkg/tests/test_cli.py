from __future__ import annotations

import json
import subprocess
import sys

import pytest

from periodicmaps.cli import main, run
from periodicmaps.report import THREADS_ENV, fixture_path

KNOWN = dict(zip(["a0", "a1", "a2", "b0", "b1", "b2", "c0", "c1", "c2"], (45, 16, 16, 93, 23, 23, 198, 29, 29)))


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


@pytest.fixture
def window_config(tmp_path):
    doc = json.loads(fixture_path("search_displayed.json").read_text())
    doc["bounds"] = {k: [v - 10, v + 10] for k, v in KNOWN.items()}
    path = tmp_path / "window.json"
    path.write_text(json.dumps(doc))
    return path


def test_lattice_known_form(capsys):
    code, rep = call(capsys, "lattice", "check", "--file", str(fixture_path("c25_form10.txt")))
    assert code == 0 and rep["verdict"] == "pass"
    d = rep["details"]
    assert d["det"] == 1 and d["positive_definite"] and d["standard"]
    assert d["reduction"]["identity"] and d["reduction"]["op_count"] == 78


def test_lattice_e8(capsys):
    code, rep = call(capsys, "lattice", "check", "--file", "e8_plus_2.txt")
    assert code == 1
    d = rep["details"]
    assert d["det"] == 1 and d["positive_definite"] and not d["standard"]


def test_verify_391(capsys):
    code, rep = call(capsys, "verify-391")
    assert code == 0 and rep["counts"]["solutions"] == 9


def test_number_theory_commands(capsys):
    assert call(capsys, "verify-identities", "--m", "9")[0] == 0
    assert call(capsys, "check-lemma", "--m", "25")[0] == 0
    assert call(capsys, "check-cancellation", "--m", "25")[0] == 0
    code, rep = call(capsys, "check-theorem2", "--m", "25", "--k-bound", "50")
    assert code == 0 and sorted(rep["certificates"]) == [[5, 1, 1], [5, 24, 24]]
    code, rep = call(capsys, "check-theorem2", "--m", "25", "--k-bound", "4")
    assert code == 0 and rep["certificates"] == []


def test_counterexample_exit_codes(capsys):
    assert call(capsys, "find-counterexample", "--m", "9", "--p", "3", "--t", "0")[0] == 1
    code, rep = call(capsys, "find-counterexample", "--m", "9", "--p", "3", "--t", "4", "--terms", "6")
    assert code == 0 and rep["verdict"] == "found"


def test_defect_sum_fixture(capsys):
    code, rep = call(capsys, "defect-sum", "--file", "example394.json", "--s", "1", "3")
    assert code == 0
    assert rep["details"]["values"]["1"].startswith("6 ") and rep["details"]["values"]["3"].startswith("2 ")


def test_gsig_and_gr(capsys):
    code, rep = call(capsys, "gsig", "verify", "--file", "c25_action.json")
    assert code == 0 and rep["counts"]["powers"] == 24
    code, rep = call(capsys, "gr", "det", "--file", "c25_linking.json")
    assert code == 0
    assert rep["details"]["expanded_det"] == rep["details"]["character_product"] == 1
    assert call(capsys, "gr", "det", "--file", "mod5_template.json")[0] == 1


def test_search_commands(capsys, window_config):
    code, rep = call(capsys, "search", "defect", "--p", "5", "--s", "2")
    assert code == 0 and rep["certificates"] == [[[1, 4], [2, 3]]]
    assert call(capsys, "search", "defect", "--p", "3", "--s", "2")[0] == 1
    assert call(capsys, "search", "action", "--m", "9", "--perm", "(3)")[0] == 1
    code, rep = call(capsys, "search", "action", "--m", "25", "--perm", "2(5)", "--modulo-generator")
    assert code == 0
    code, rep = call(capsys, "search", "matrix", "--config", str(window_config))
    assert code == 0
    assert [c["params"] for c in rep["certificates"]] == [KNOWN]
    assert rep["certificates"][0]["certified"]


def test_cursor_resume(capsys, window_config, tmp_path):
    cursor = tmp_path / "cursor.txt"
    code, first = call(capsys, "search", "matrix", "--config", str(window_config), "--cursor", str(cursor))
    text = cursor.read_text()
    assert text.startswith("config ") and "hit " in text
    # a finished cursor resumes with nothing left to do and the same report
    code2, again = call(capsys, "search", "matrix", "--config", str(window_config), "--cursor", str(cursor))
    assert code2 == code == 0 and again == first
    other = tmp_path / "other.json"
    other.write_text(fixture_path("search_small.json").read_text())
    assert call(capsys, "search", "matrix", "--config", str(other), "--cursor", str(cursor))[0] == 2


def test_partial_cursor_resume(capsys, window_config, tmp_path):
    from periodicmaps.cli import _cursor_digest, _write_cursor
    from periodicmaps.search import PartitionStats, SearchConstraints

    full = call(capsys, "search", "matrix", "--config", str(window_config))[1]
    cursor = tmp_path / "cursor.txt"
    c = SearchConstraints.load(window_config)
    # pretend the first block finished with no hits; the rest must be recomputed
    _write_cursor(cursor, _cursor_digest(c, True), 1, [], PartitionStats())
    resumed = call(capsys, "search", "matrix", "--config", str(window_config), "--cursor", str(cursor))[1]
    assert resumed["certificates"] == full["certificates"]


def test_errors(capsys):
    assert main(["lattice", "check", "--file", "missing.txt"]) == 2
    assert main(["search", "defect", "--p", "4", "--s", "1"]) == 2
    assert main(["no-such-command"]) == 2
    assert main(["verify-identities"]) == 2
    assert main(["--threads", "0", "verify-391"]) == 2
    capsys.readouterr()


def test_malformed_matrix(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\n3 4\n")
    assert main(["lattice", "check", "--file", str(bad)]) == 2
    bad.write_text("1 x\n")
    assert main(["lattice", "check", "--file", str(bad)]) == 2


def test_threads_from_environment(monkeypatch):
    import periodicmaps.cli as cli

    seen = []

    def fake(args):
        seen.append(args.threads)
        return cli.verify_theorem_391()

    monkeypatch.setattr(cli, "cmd_391", fake)
    monkeypatch.setenv(THREADS_ENV, "3")
    assert run(["verify-391"])[0] == 0
    assert run(["--threads", "2", "verify-391"])[0] == 0
    assert run(["verify-391", "--threads", "5"])[0] == 0
    monkeypatch.setenv(THREADS_ENV, "junk")
    assert run(["verify-391"])[0] == 0
    assert seen == [3, 2, 5, 1]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "periodicmaps.cli", "search", "defect", "--p", "5", "--s", "2"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["verdict"] == "found"
