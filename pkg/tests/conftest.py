import sys
from pathlib import Path

import pytest

from rpyscope import ImportConfig, YearWindow, aggregate, parse_export

DATA_DIR = Path(__file__).resolve().parent / "data"

sys.path.insert(0, str(Path(__file__).resolve().parent))  # for oracle modules


@pytest.fixture(scope="session")
def corpus_path() -> Path:
    return DATA_DIR / "synthetic_corpus.txt"


@pytest.fixture(scope="session")
def corpus_text(corpus_path) -> str:
    return corpus_path.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def open_config() -> ImportConfig:
    return ImportConfig()  # wide-open windows, keep missing years


@pytest.fixture(scope="session")
def paper_style_config() -> ImportConfig:
    return ImportConfig(
        rpy_window=YearWindow(1900, 1995, keep_missing=False),
        py_window=YearWindow(1962, 2018, keep_missing=False),
        max_cr_per_record=0,
    )


@pytest.fixture(scope="session")
def open_records(corpus_text, open_config):
    records, _report = parse_export(corpus_text, open_config)
    return records


@pytest.fixture()
def open_workspace(open_records, open_config):
    return aggregate(list(open_records), open_config)


@pytest.fixture(scope="session")
def windowed_records(corpus_text, paper_style_config):
    records, _report = parse_export(corpus_text, paper_style_config)
    return records


@pytest.fixture()
def windowed_workspace(windowed_records, paper_style_config):
    return aggregate(list(windowed_records), paper_style_config)
