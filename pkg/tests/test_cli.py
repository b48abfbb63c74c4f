import shutil
from pathlib import Path

import pytest

from rpyscope.cli import main, parse_window
from rpyscope.ingest import YearWindow

DATA_DIR = Path(__file__).resolve().parent / "data"


class TestWindowFlag:
    def test_plain(self):
        assert parse_window("1900:1995") == YearWindow(1900, 1995, False)

    def test_keep_missing(self):
        assert parse_window("1900:1995:keep-missing") == YearWindow(1900, 1995, True)

    def test_drop_missing(self):
        assert parse_window("1962:2018:drop-missing") == YearWindow(1962, 2018, False)

    def test_rejects_garbage(self):
        import argparse

        with pytest.raises(argparse.ArgumentTypeError):
            parse_window("1900")
        with pytest.raises(argparse.ArgumentTypeError):
            parse_window("1995:1900")


class TestRunAndCheck:
    @pytest.fixture()
    def script_dir(self, tmp_path, corpus_path):
        shutil.copy(corpus_path, tmp_path / "synthetic_corpus.txt")
        shutil.copy(DATA_DIR / "pipeline.cre-script", tmp_path / "pipeline.cre-script")
        return tmp_path

    def test_run_pipeline(self, script_dir, capsys):
        code = main(["run", str(script_dir / "pipeline.cre-script")])
        assert code == 0
        out = capsys.readouterr().out
        assert "importFile" in out and "exportFile" in out
        assert (script_dir / "synthetic_CR.csv").exists()

    def test_run_reports_script_error(self, tmp_path, capsys):
        script = tmp_path / "bad.cre-script"
        script.write_text("merge()\n", encoding="utf-8")
        assert main(["run", str(script)]) == 1
        assert "merge" in capsys.readouterr().out

    def test_run_missing_script_is_io_error(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.cre-script")]) == 2

    def test_run_missing_input_is_io_error(self, tmp_path):
        script = tmp_path / "s.cre-script"
        script.write_text(
            'importFile(file:"nope.txt",type:"WOS",RPY:[1900,1995,false],PY:[1962,2018,false])\n',
            encoding="utf-8",
        )
        assert main(["run", str(script)]) == 2

    def test_check_valid(self, script_dir, capsys):
        assert main(["check", str(script_dir / "pipeline.cre-script")]) == 0
        assert "10 commands" in capsys.readouterr().out

    def test_check_syntax_error(self, tmp_path, capsys):
        script = tmp_path / "bad.cre-script"
        script.write_text("cluster(threshold 0.75)\n", encoding="utf-8")
        assert main(["check", str(script)]) == 1
        err = capsys.readouterr().err
        assert "line 1" in err


class TestAnalyze:
    def test_full_flag_pipeline(self, tmp_path, corpus_path, capsys):
        out_cr = tmp_path / "cr.csv"
        out_graph = tmp_path / "graph.csv"
        out_peaks = tmp_path / "peaks.csv"
        saved = tmp_path / "ws.rpys.json"
        code = main(
            [
                "analyze",
                "--input", str(corpus_path),
                "--rpy", "1900:1995",
                "--py", "1962:2018",
                "--marker", "author=Liu,rpy=1960,volume=4,page=1",
                "--cluster-threshold", "0.75",
                "--cluster-use", "volume,page",
                "--remove-ncr", "0:1",
                "--export-cr", str(out_cr),
                "--export-graph", str(out_graph),
                "--export-peaks", str(out_peaks),
                "--top-share", "0.1",
                "--save", str(saved),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "imported: records=48" in out
        assert "marker-filtered: records=30" in out
        for path in (out_cr, out_graph, out_peaks, saved):
            assert path.exists()

    def test_load_previous_workspace(self, tmp_path, corpus_path, capsys):
        saved = tmp_path / "ws.rpys.json"
        assert main(["analyze", "--input", str(corpus_path), "--save", str(saved)]) == 0
        capsys.readouterr()
        assert main(["analyze", "--load", str(saved)]) == 0
        assert "loaded: records=50" in capsys.readouterr().out

    def test_missing_input_is_io_error(self, tmp_path):
        assert main(["analyze", "--input", str(tmp_path / "absent.txt")]) == 2
