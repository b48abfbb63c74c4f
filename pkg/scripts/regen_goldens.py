#!/usr/bin/env python3
"""Regenerate the committed golden exports for the scripted pipeline.

Runs tests/data/pipeline.cre-script against the synthetic corpus in a
scratch directory and copies the resulting CSVs into tests/data/ as
golden_CR.csv and golden_GRAPH.csv. Inspect the diff before committing:
the goldens pin the byte-exact CSV dialect.
"""

import shutil
import sys
import tempfile
from pathlib import Path

from rpyscope.scripting import run_script_file

DATA_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        tmp_path = Path(tmp)
        shutil.copy(DATA_DIR / "synthetic_corpus.txt", tmp_path / "synthetic_corpus.txt")
        shutil.copy(DATA_DIR / "pipeline.cre-script", tmp_path / "pipeline.cre-script")
        report = run_script_file(tmp_path / "pipeline.cre-script")
        if not report.ok:
            print(f"pipeline failed: {report.error}", file=sys.stderr)
            return 1
        sys.stdout.write(report.render())
        shutil.copy(tmp_path / "synthetic_CR.csv", DATA_DIR / "golden_CR.csv")
        shutil.copy(tmp_path / "synthetic_GRAPH.csv", DATA_DIR / "golden_GRAPH.csv")
    print(f"wrote {DATA_DIR / 'golden_CR.csv'} and {DATA_DIR / 'golden_GRAPH.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
