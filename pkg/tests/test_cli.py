import json

from hapticbench.cli import main
from hapticbench.session_io import import_session
from hapticbench.textures import load_library


def run(*argv):
    assert main(list(argv)) == 0


class TestTextures:
    def test_writes_library_and_manifest(self, tmp_path):
        out = tmp_path / "lib"
        run(
            "textures", "--grits", "P60,P120,P1000", "--per-grit", "2",
            "--duration", "0.5", "--seed", "9", "--out", str(out),
        )
        manifest = json.loads((out / "manifest.json").read_text())
        assert len(manifest["stimuli"]) == 6
        library = load_library(out)
        assert len(library.entries) == 6

    def test_deterministic_outputs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            run("textures", "--grits", "P60", "--per-grit", "1", "--duration",
                "0.25", "--seed", "4", "--out", str(out))
        assert (a / "P60_0.csv").read_bytes() == (b / "P60_0.csv").read_bytes()
        assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()


class TestSimulateFitReport:
    def test_analytic_pipeline(self, tmp_path):
        log_path = tmp_path / "session.json"
        run(
            "simulate", "--observer", "analytic", "--beta0", "-2.326",
            "--beta1", "0.01701", "--seed", "5", "--plan-seed", "6",
            "--trials-out", str(log_path),
        )
        log = import_session(log_path)
        assert log.answered == 100

        fit_path = tmp_path / "fit.json"
        run("fit", "--in", str(log_path), "--bootstrap", "200", "--seed", "7",
            "--out", str(fit_path))
        fit = json.loads(fit_path.read_text())
        assert fit["n_trials"] == 100
        assert fit["ci"] is not None and len(fit["ci"]["jnd"]) == 2

    def test_chain_observer_simulation(self, tmp_path):
        log_path = tmp_path / "chain.json"
        run(
            "simulate", "--observer", "chain", "--sigma", "0.3", "--seed", "8",
            "--plan-seed", "9", "--reps", "2", "--duration", "0.5",
            "--trials-out", str(log_path),
        )
        assert import_session(log_path).answered == 10

    def test_report_over_directory(self, tmp_path):
        sessions = tmp_path / "sessions"
        sessions.mkdir()
        for i in range(3):
            run(
                "simulate", "--observer", "analytic", "--seed", str(100 + i),
                "--plan-seed", str(200 + i), "--reps", "5",
                "--condition-label", "A" if i % 2 == 0 else "B",
                "--trials-out", str(sessions / f"s{i}.json"),
            )
        report_path = tmp_path / "report.json"
        run("report", "--in", str(sessions), "--out", str(report_path))
        report = json.loads(report_path.read_text())
        assert len(report["sessions"]) == 3
        assert report["summary"]["n_sessions"] == 3
        assert set(report["by_condition"]) == {"A", "B"}
        assert report["summary"]["median_jnd_um"] > 0

    def test_pipeline_deterministic(self, tmp_path):
        reports = []
        for tag in ("x", "y"):
            sessions = tmp_path / f"sessions_{tag}"
            sessions.mkdir()
            for i in range(2):
                run(
                    "simulate", "--observer", "analytic", "--seed", str(10 + i),
                    "--plan-seed", str(20 + i), "--reps", "20",
                    "--trials-out", str(sessions / f"s{i}.json"),
                )
            out = tmp_path / f"report_{tag}.json"
            run("report", "--in", str(sessions), "--bootstrap", "100", "--seed", "3",
                "--out", str(out))
            reports.append(out.read_bytes())
        assert reports[0] == reports[1]

    def test_degenerate_bootstrap_reported_cleanly(self, tmp_path, capsys):
        # a quasi-separated session: resampled refits keep failing past the
        # 10% budget, and the command surfaces that instead of a traceback
        sessions = tmp_path / "sessions"
        sessions.mkdir()
        run(
            "simulate", "--observer", "analytic", "--seed", "11",
            "--plan-seed", "21", "--reps", "10",
            "--trials-out", str(sessions / "s0.json"),
        )
        code = main(
            ["report", "--in", str(sessions), "--bootstrap", "100", "--seed", "3",
             "--out", str(tmp_path / "r.json")]
        )
        assert code == 2
        assert "resampled fits failed" in capsys.readouterr().err

    def test_fit_rejects_malformed_log(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["fit", "--in", str(bad), "--out", str(tmp_path / "f.json")]) == 2
        assert "error:" in capsys.readouterr().err
