import json
import subprocess
import sys

import pytest

from ramsey_workbench.catalogs import (graph, linear_order, lo_catalog,
                                       save_catalog)
from ramsey_workbench.cli import run
from ramsey_workbench.errors import CorruptCertificate


@pytest.fixture(scope="module")
def lo_paths(tmp_path_factory):
    root = tmp_path_factory.mktemp("catalogs")
    lo6 = root / "lo6.json"
    save_catalog(lo_catalog(6), lo6)
    lo4 = root / "lo4.json"
    save_catalog(lo_catalog(4), lo4)
    return {"lo6": str(lo6), "lo4": str(lo4), "root": root}


def run_json(argv, out_path):
    code = run(argv + ["--out", str(out_path)] if "--out" not in argv else argv)
    with open(out_path, encoding="utf-8") as fh:
        return code, json.load(fh)


class TestArrowCommand:
    def test_holding_instance_exits_zero(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        code = run(["--out", str(out), "arrow", "--catalog", lo_paths["lo6"],
                    "--C", "LO6", "--B", "LO3", "--A", "LO2",
                    "-k", "2", "-t", "1"])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["status"] == "HOLDS"
        assert report["certificates"][0]["type"] == "exhaustion"

    def test_failing_instance_exits_one_with_certificate(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        code = run(["--out", str(out), "arrow", "--catalog", lo_paths["lo6"],
                    "--C", "LO5", "--B", "LO3", "--A", "LO2",
                    "-k", "2", "-t", "1"])
        assert code == 1
        report = json.loads(out.read_text())
        assert report["certificates"][0]["type"] == "bad-coloring"

    def test_unknown_flag_exits_three(self, lo_paths):
        assert run(["arrow", "--catalog", lo_paths["lo6"], "--frobnicate"]) == 3

    def test_missing_catalog_exits_three(self, tmp_path):
        assert run(["arrow", "--catalog", str(tmp_path / "nope.json"),
                    "--C", "LO6", "--B", "LO3", "--A", "LO2",
                    "-k", "2", "-t", "1"]) == 3

    def test_node_budget_gives_exit_two(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        code = run(["--out", str(out), "--budget-nodes", "5",
                    "arrow", "--catalog", lo_paths["lo6"],
                    "--C", "LO6", "--B", "LO3", "--A", "LO2",
                    "-k", "2", "-t", "1"])
        assert code == 2

    def test_cnf_export(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        cnf = tmp_path / "bad.cnf"
        run(["--out", str(out), "arrow", "--catalog", lo_paths["lo6"],
             "--C", "LO5", "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1",
             "--cnf", str(cnf)])
        text = cnf.read_text()
        assert any(line.startswith("p cnf ") for line in text.splitlines())


class TestOtherCommands:
    def test_cat_check(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        code = run(["--out", str(out), "cat", "check",
                    "--catalog", lo_paths["lo4"]])
        assert code == 0
        report = json.loads(out.read_text())
        detail = report["verdicts"][0]["detail"]
        assert detail["all_mono"] and detail["directed"]

    def test_cat_op(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        code = run(["--out", str(out), "cat", "op",
                    "--catalog", lo_paths["lo4"]])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["verdicts"][0]["involutive"]
        assert report["verdicts"][0]["mono_epi_swap"]

    def test_cat_skeleton(self, tmp_path):
        twin = linear_order(2).relabel((1, 0), name="LO2x")
        path = tmp_path / "dup.json"
        save_catalog([linear_order(2), twin], path)
        out = tmp_path / "r.json"
        assert run(["--out", str(out), "cat", "skeleton",
                    "--catalog", str(path)]) == 0
        report = json.loads(out.read_text())
        assert report["verdicts"][0]["representatives"]["LO2x"] == "LO2"

    def test_degree_interval(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        code = run(["--out", str(out), "degree", "--catalog", lo_paths["lo4"],
                    "--A", "LO2", "--kmax", "2", "--bmax", "2"])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["verdicts"][0]["interval"]["upper"] == 1

    def test_amalgam_wap(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        code = run(["--out", str(out), "amalgam", "--catalog",
                    lo_paths["lo4"], "--wap"])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["status"] == "HOLDS"
        assert report["certificates"]

    def test_seq_colim(self, lo_paths, tmp_path):
        seq = {"objects": ["LO1", "LO2", "LO3", "LO4"],
               "bonding": {"0->1": [0], "1->2": [0, 1], "2->3": [0, 1, 2]}}
        seq_path = tmp_path / "seq.json"
        seq_path.write_text(json.dumps(seq))
        out = tmp_path / "r.json"
        code = run(["--out", str(out), "seq", "colim",
                    "--catalog", lo_paths["lo4"], "--seq", str(seq_path)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["verdicts"][0]["size"] == 4

    def test_expand_build_and_check(self, tmp_path):
        cat_path = tmp_path / "g.json"
        save_catalog([graph(1, [], name="K1"), graph(2, [(0, 1)], name="K2"),
                      graph(3, [(0, 1), (1, 2)], name="P3")], cat_path)
        degrees_path = tmp_path / "deg.json"
        degrees_path.write_text(json.dumps({"degrees": {"K2": 2}}))
        out = tmp_path / "r.json"
        code = run(["--out", str(out), "expand", "build",
                    "--catalog", str(cat_path), "--degrees", str(degrees_path)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["verdicts"][0]["fiber_sizes"]["P3"] == 16
        out2 = tmp_path / "r2.json"
        assert run(["--out", str(out2), "expand", "check",
                    "--catalog", str(cat_path),
                    "--degrees", str(degrees_path)]) == 0

    def test_module_entry_point(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        proc = subprocess.run(
            [sys.executable, "-m", "ramsey_workbench", "--out", str(out),
             "arrow", "--catalog", lo_paths["lo6"], "--C", "LO6",
             "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1"],
            capture_output=True, text=True)
        assert proc.returncode == 0


class TestReplay:
    def test_arrow_fails_report_replays(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        run(["--out", str(out), "arrow", "--catalog", lo_paths["lo6"],
             "--C", "LO5", "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1"])
        assert run(["--out", str(tmp_path / "rep.json"),
                    "replay", str(out)]) == 0

    def test_wap_report_replays(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        run(["--out", str(out), "amalgam", "--catalog", lo_paths["lo4"],
             "--wap"])
        assert run(["--out", str(tmp_path / "rep.json"),
                    "replay", str(out)]) == 0

    def test_tampered_report_rejected(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        run(["--out", str(out), "arrow", "--catalog", lo_paths["lo6"],
             "--C", "LO5", "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1"])
        report = json.loads(out.read_text())
        cert = report["certificates"][0]
        cert["values"] = [0 for _ in cert["values"]]
        out.write_text(json.dumps(report))
        from ramsey_workbench.cli import replay
        with pytest.raises(CorruptCertificate):
            replay(str(out))

    def test_empty_report_succeeds(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text(json.dumps({"certificates": []}))
        from ramsey_workbench.cli import replay
        code, result = replay(str(path))
        assert code == 0 and result["replayed"] == 0


class TestDeterminism:
    def test_identical_runs_are_byte_identical(self, lo_paths, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["arrow", "--catalog", lo_paths["lo6"], "--C", "LO5",
                "--B", "LO3", "--A", "LO2", "-k", "2", "-t", "1"]
        run(["--out", str(a)] + argv)
        run(["--out", str(b)] + argv)
        assert a.read_bytes() == b.read_bytes()

    def test_seed_recorded(self, lo_paths, tmp_path):
        out = tmp_path / "r.json"
        run(["--out", str(out), "--seed", "99", "cat", "check",
             "--catalog", lo_paths["lo4"]])
        report = json.loads(out.read_text())
        assert report["config"]["seed"] == 99
