import shutil
from pathlib import Path

import pytest

from rpyscope.scripting import (
    Command,
    ExecutionContext,
    ScriptSyntaxError,
    execute,
    format_script,
    parse_script,
    run_script_file,
)
from rpyscope.workspace import load_workspace

DATA_DIR = Path(__file__).resolve().parent / "data"

FULL_PIPELINE = '''importFile(file:"savedrecs_Liu_1960.txt",type:"WOS",
RPY:[1900,1995,false],PY:[1962,2018,false],maxCR:0)
info()
cluster(threshold:0.75,volume:true,page:true,DOI:false)
merge()
info()
removeCR(N_CR: [0, 1])
info()
saveFile(file:"Liu1960.rpys.cre")
exportFile(file:"Liu_1960.rpys_CR.csv",type:"CSV_CR")
exportFile(file:"Liu_1960.rpys_GRAPH.csv",type:"CSV_GRAPH")
'''


class TestParse:
    def test_full_pipeline_parses_to_ten_commands(self):
        prog = parse_script(FULL_PIPELINE)
        assert [c.name for c in prog.commands] == [
            "importFile", "info", "cluster", "merge", "info",
            "removeCR", "info", "saveFile", "exportFile", "exportFile",
        ]
        imp = prog.commands[0]
        assert imp.args == {
            "file": "savedrecs_Liu_1960.txt",
            "type": "WOS",
            "RPY": [1900, 1995, False],
            "PY": [1962, 2018, False],
            "maxCR": 0,
        }
        clu = prog.commands[2]
        assert clu.args == {"threshold": 0.75, "volume": True, "page": True, "DOI": False}
        assert prog.commands[5].args == {"N_CR": [0, 1]}
        assert prog.commands[8].args == {"file": "Liu_1960.rpys_CR.csv", "type": "CSV_CR"}

    def test_zero_arg_command(self):
        prog = parse_script("info()")
        assert prog.commands == (Command(name="info", args={}),)

    def test_list_argument_binding(self):
        prog = parse_script("removeCR(N_CR: [0, 1])")
        assert prog.commands[0].args == {"N_CR": [0, 1]}

    def test_comments_and_whitespace_insignificant(self):
        prog = parse_script("# a comment\n  info (  )  ; # trailing\ninfo()")
        assert [c.name for c in prog.commands] == ["info", "info"]

    def test_string_escapes(self):
        prog = parse_script(r'saveFile(file:"a\"b\\c\nd")')
        assert prog.commands[0].args["file"] == 'a"b\\c\nd'

    def test_spans_recorded(self):
        prog = parse_script("info()\n  cluster(threshold:0.9)")
        assert prog.commands[0].line == 1
        assert prog.commands[1].line == 2
        assert prog.commands[1].column == 3

    @pytest.mark.parametrize(
        "source, fragment",
        [
            ("cluster(threshold 0.75)", "':'"),
            ("info(", "argument name"),
            ('saveFile(file:"unterminated)', "unterminated string"),
            ("merge()cluster", "'('"),
            ("removeCR(N_CR: [0, 1)", "']'"),
            ("what?()", "unexpected character"),
            ("info(a:1, a:2)", "duplicate argument"),
            ("cluster(threshold:)", "value"),
        ],
    )
    def test_syntax_errors_carry_position(self, source, fragment):
        with pytest.raises(ScriptSyntaxError) as err:
            parse_script(source)
        message = str(err.value)
        assert fragment in message
        assert "line" in message and "column" in message
        assert "^" in message  # caret excerpt


class TestFormat:
    def test_round_trip_ast_equality(self):
        prog = parse_script(FULL_PIPELINE)
        again = parse_script(format_script(prog))
        assert again == prog

    def test_idempotence(self):
        prog = parse_script(FULL_PIPELINE)
        once = format_script(prog)
        assert format_script(parse_script(once)) == once

    def test_arg_order_preserved(self):
        source = 'importFile(type:"WOS",file:"x.txt",RPY:[1900,1995,false],PY:[1900,2999,true])'
        formatted = format_script(parse_script(source))
        assert formatted.index("type:") < formatted.index("file:") < formatted.index("RPY:")

    def test_value_rendering(self):
        prog = parse_script('a(x:1,y:0.75,z:true,w:"s",l:[1,2.5,false])')
        assert format_script(prog) == 'a(x: 1, y: 0.75, z: true, w: "s", l: [1, 2.5, false])\n'


@pytest.fixture()
def script_dir(tmp_path, corpus_path):
    shutil.copy(corpus_path, tmp_path / "synthetic_corpus.txt")
    shutil.copy(DATA_DIR / "pipeline.cre-script", tmp_path / "pipeline.cre-script")
    return tmp_path


class TestExecute:
    def test_info_on_empty_environment(self, tmp_path):
        report = execute(parse_script("info()"), ExecutionContext(workdir=tmp_path))
        assert report.ok
        assert report.results[0].detail.startswith("records=0 cr_mentions=0 variants=0")

    def test_pipeline_end_to_end(self, script_dir):
        report = run_script_file(script_dir / "pipeline.cre-script")
        assert report.ok, report.error
        assert len(report.results) == 10
        for name in ("synthetic.rpys.cre", "synthetic_CR.csv", "synthetic_GRAPH.csv"):
            assert (script_dir / name).exists()
        ws = load_workspace(script_dir / "synthetic.rpys.cre")
        assert all(v.ncr >= 2 for v in ws.variants)

    def test_two_runs_are_byte_identical(self, tmp_path, corpus_path):
        outputs = {}
        for run in ("one", "two"):
            d = tmp_path / run
            d.mkdir()
            shutil.copy(corpus_path, d / "synthetic_corpus.txt")
            shutil.copy(DATA_DIR / "pipeline.cre-script", d / "pipeline.cre-script")
            report = run_script_file(d / "pipeline.cre-script")
            assert report.ok
            outputs[run] = {
                name: (d / name).read_bytes()
                for name in ("synthetic.rpys.cre", "synthetic_CR.csv", "synthetic_GRAPH.csv")
            }
            outputs[run]["report"] = report.render()
        assert outputs["one"] == outputs["two"]

    def test_exports_match_committed_goldens(self, script_dir):
        report = run_script_file(script_dir / "pipeline.cre-script")
        assert report.ok
        for name, golden in (
            ("synthetic_CR.csv", "golden_CR.csv"),
            ("synthetic_GRAPH.csv", "golden_GRAPH.csv"),
        ):
            assert (script_dir / name).read_bytes() == (DATA_DIR / golden).read_bytes()

    def test_merge_before_cluster_fails_cleanly(self, script_dir):
        source = (
            'importFile(file:"synthetic_corpus.txt",type:"WOS",'
            "RPY:[1900,1995,false],PY:[1962,2018,false],maxCR:0)\n"
            "merge()\n"
            "info()\n"
        )
        env = ExecutionContext(workdir=script_dir)
        report = execute(parse_script(source), env)
        assert not report.ok
        assert "merge before cluster" in str(report.error)
        assert report.error.command == "merge"
        assert len(report.results) == 1  # import succeeded, nothing ran after merge

    def test_failing_command_preserves_workspace(self, script_dir):
        source = (
            'importFile(file:"synthetic_corpus.txt",type:"WOS",'
            "RPY:[1900,1995,false],PY:[1962,2018,false],maxCR:0)\n"
        )
        env = ExecutionContext(workdir=script_dir)
        report = execute(parse_script(source), env)
        assert report.ok
        ws_before = env.workspace
        bad = parse_script('removeCR(N_CR: [5, 1])')  # inverted range: argument error
        report2 = execute(bad, env)
        assert not report2.ok
        assert env.workspace is ws_before

    def test_unknown_command_reported_with_span(self, tmp_path):
        report = execute(parse_script("info()\nfrobnicate(x:1)"), ExecutionContext(workdir=tmp_path))
        assert not report.ok
        assert report.error.command == "frobnicate"
        assert report.error.line == 2

    def test_unknown_import_type_rejected(self, script_dir):
        source = 'importFile(file:"synthetic_corpus.txt",type:"RIS",RPY:[1900,1995,false],PY:[1962,2018,false])'
        report = execute(parse_script(source), ExecutionContext(workdir=script_dir))
        assert not report.ok
        assert "RIS" in str(report.error)

    def test_unknown_export_type_rejected(self, script_dir):
        source = (
            'importFile(file:"synthetic_corpus.txt",type:"WOS",'
            'RPY:[1900,1995,false],PY:[1962,2018,false])\n'
            'exportFile(file:"x.csv",type:"CSV_WHATEVER")'
        )
        report = execute(parse_script(source), ExecutionContext(workdir=script_dir))
        assert not report.ok
        assert "CSV_WHATEVER" in str(report.error)

    def test_missing_input_file_is_io_error(self, tmp_path):
        source = 'importFile(file:"no_such.txt",type:"WOS",RPY:[1900,1995,false],PY:[1962,2018,false])'
        report = execute(parse_script(source), ExecutionContext(workdir=tmp_path))
        assert not report.ok
        assert report.error.io_error

    def test_wrong_arg_type_names_command(self, script_dir):
        source = 'importFile(file:"synthetic_corpus.txt",type:"WOS",RPY:"oops",PY:[1962,2018,false])'
        report = execute(parse_script(source), ExecutionContext(workdir=script_dir))
        assert not report.ok
        assert report.error.command == "importFile"
        assert "RPY" in str(report.error)

    def test_extension_commands(self, script_dir):
        source = (
            'importFile(file:"synthetic_corpus.txt",type:"WOS",'
            "RPY:[1900,1995,false],PY:[1962,2018,false],maxCR:0)\n"
            'cocite(marker:"author=Liu,rpy=1960,volume=4,page=1",mode:"any")\n'
            'spectrum(file:"spec.csv",from:1900,to:1995)\n'
            'peaks(file:"peaks.csv",minDev:1)\n'
            'topRefs(rpy:1977,share:0.1,file:"top.csv")\n'
        )
        env = ExecutionContext(workdir=script_dir)
        report = execute(parse_script(source), env)
        assert report.ok, report.error
        assert (script_dir / "spec.csv").read_text(encoding="utf-8").splitlines()[0] == (
            "rpy,ncr,distinct_variants,median_dev"
        )
        peaks = (script_dir / "peaks.csv").read_text(encoding="utf-8").splitlines()
        assert peaks[0] == "rpy,ncr,median_dev"
        assert len(peaks) > 1
        top = (script_dir / "top.csv").read_text(encoding="utf-8").splitlines()
        assert top[0] == "variant_id,raw,rpy,ncr,share"
        assert len(top) == 3  # strict 10% rule drops the 0.1 share at 1977

    def test_load_file_round_trip(self, script_dir):
        source = (
            'importFile(file:"synthetic_corpus.txt",type:"WOS",'
            "RPY:[1900,1995,false],PY:[1962,2018,false])\n"
            'saveFile(file:"ws.rpys.cre")\n'
        )
        env = ExecutionContext(workdir=script_dir)
        assert execute(parse_script(source), env).ok
        env2 = ExecutionContext(workdir=script_dir)
        report = execute(parse_script('loadFile(file:"ws.rpys.cre")\ninfo()'), env2)
        assert report.ok
        assert env2.workspace == env.workspace
