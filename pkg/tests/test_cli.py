import pytest

from vibrotex.cli import main
from vibrotex.harness import read_trials_csv
from vibrotex.scaling import matrix_from_csv
from vibrotex.textures import Color, color_at, load_pgm


class TestTexgen:
    def test_writes_pgm(self, tmp_path, capsys):
        out = tmp_path / "stripes.pgm"
        code = main(["texgen", "--line-width", "4", "--width", "64",
                     "--height", "8", "--out", str(out)])
        assert code == 0
        grid = load_pgm(out.read_bytes())
        assert grid.width_px == 64 and grid.height_px == 8
        assert color_at(grid, 0, 0) == Color.BLACK
        assert color_at(grid, 4, 0) == Color.WHITE

    def test_bad_width_exits_2(self, tmp_path):
        code = main(["texgen", "--line-width", "0", "--width", "64",
                     "--height", "8", "--out", str(tmp_path / "x.pgm")])
        assert code == 2

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["texgen", "--width", "64"])
        assert exc.value.code == 2


class TestAlias:
    def test_reference_table(self, capsys):
        code = main(["alias", "--speed", "240", "--refresh", "60",
                     "--widths", "1,2,4,8,16,32"])
        assert code == 0
        out = capsys.readouterr().out
        lines = [ln.split() for ln in out.splitlines()[2:]]
        table = {float(w): float(alias) for w, _true, alias in lines}
        assert table == {1: 0.0, 2: 0.0, 4: 30.0, 8: 15.0, 16: 7.5, 32: 3.75}

    def test_bad_widths(self, capsys):
        assert main(["alias", "--widths", "a,b"]) == 2


class TestSimulateAnalyze:
    def test_simulate_writes_artifacts(self, tmp_path, capsys):
        out = tmp_path / "cohort"
        code = main(["simulate", "--participants", "2", "--sets", "1",
                     "--seed", "3", "--out-dir", str(out)])
        assert code == 0
        records = read_trials_csv((out / "trials.csv").read_text())
        assert len(records) == 60
        matrix = matrix_from_csv((out / "matrix.csv").read_text())
        assert matrix.labels == (1, 2, 4, 8, 16, 32)
        scales_text = (out / "scales.csv").read_text()
        assert scales_text.splitlines()[0] == "label,scale"

    def test_simulate_with_traces(self, tmp_path):
        out = tmp_path / "cohort"
        code = main(["simulate", "--participants", "1", "--sets", "1",
                     "--seed", "3", "--out-dir", str(out), "--traces"])
        assert code == 0
        traces = list((out / "traces").glob("*.csv"))
        assert len(traces) == 60  # 30 trials x 2 phases

    def test_analyze_from_trials_dir(self, tmp_path, capsys):
        out = tmp_path / "cohort"
        main(["simulate", "--participants", "2", "--sets", "1", "--seed", "3",
              "--out-dir", str(out)])
        capsys.readouterr()
        code = main(["analyze", "--trials", str(out), "--out", str(tmp_path / "scales.csv")])
        assert code == 0
        printed = capsys.readouterr().out
        assert "consistency:" in printed
        assert (tmp_path / "scales.csv").exists()

    def test_analyze_matrix_file(self, tmp_path, capsys):
        from importlib import resources

        ref = (resources.files("vibrotex") / "data" / "pairwise_fineness_reference.csv").read_text()
        matrix_file = tmp_path / "matrix.csv"
        matrix_file.write_text(ref)
        code = main(["analyze", "--matrix", str(matrix_file)])
        assert code == 0
        printed = capsys.readouterr().out
        assert "32" in printed and "consistency:" in printed

    def test_analyze_missing_file_exits_3(self, capsys):
        assert main(["analyze", "--trials", "/nonexistent/dir"]) == 3

    def test_analyze_corrupt_trials_exits_3(self, tmp_path, capsys):
        bad = tmp_path / "trials.csv"
        bad.write_text("participant_id,set_index\nP1,1\n")
        assert main(["analyze", "--trials", str(bad)]) == 3

    def test_analyze_requires_source(self):
        with pytest.raises(SystemExit) as exc:
            main(["analyze"])
        assert exc.value.code == 2
