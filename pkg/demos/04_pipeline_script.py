"""Drive the whole pipeline from a script in the command language.

The same analysis as demos 01-02, but expressed as a reproducible script:
import, cluster, merge, noise removal, save, export. Also shows the parse
API, the canonical formatter, and what a failing command reports.
"""

import shutil
import tempfile
from pathlib import Path

from rpyscope.scripting import (
    ExecutionContext,
    execute,
    format_script,
    parse_script,
    run_script_file,
)

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "data" / "synthetic_corpus.txt"

SCRIPT = '''# import and disambiguate, then keep only references cited at least twice
importFile(file:"synthetic_corpus.txt",type:"WOS",
           RPY:[1900,1995,false],PY:[1962,2018,false],maxCR:0)
info()
cluster(threshold:0.75,volume:true,page:true,DOI:false)
merge()
removeCR(N_CR: [0, 1])
info()
saveFile(file:"session.rpys.cre")
exportFile(file:"variants.csv",type:"CSV_CR")
exportFile(file:"per_year.csv",type:"CSV_GRAPH")

# extensions beyond the core language: marker filter and peak exports
cocite(marker:"author=Liu,rpy=1960,volume=4,page=1",mode:"any")
peaks(file:"peaks.csv",minDev:1)
topRefs(rpy:1977,share:0.1,file:"top_1977.csv")
'''

prog = parse_script(SCRIPT)
print(f"parsed {len(prog.commands)} commands; canonical form:\n")
print(format_script(prog))

with tempfile.TemporaryDirectory() as tmp:
    workdir = Path(tmp)
    shutil.copy(CORPUS, workdir / "synthetic_corpus.txt")
    env = ExecutionContext(workdir=workdir)
    report = execute(prog, env)
    print(report.render())
    assert report.ok
    print("outputs:", sorted(p.name for p in workdir.iterdir() if p.suffix in (".csv", ".cre")))

    # A failing command halts execution and leaves the workspace untouched:
    # here merge() has no preceding cluster() to take an assignment from.
    bad = parse_script('merge()')
    failed = execute(bad, env)
    print("\nfailing command reports:", failed.error)

    # The same script can live in a file and run through the CLI:
    #   rpyscope run pipeline.cre-script
    script_path = workdir / "pipeline.cre-script"
    script_path.write_text(SCRIPT, encoding="utf-8")
    print("\nrun_script_file ok:", run_script_file(script_path).ok)
