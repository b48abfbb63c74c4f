#!/usr/bin/env python3
"""Regenerate the committed test fixtures under tests/data/.

Deterministic by construction (fixed seed). The fixture file carries planted
structure that the tests rely on:

  * marker reference cited by records 1-30 (record 12 cites it twice);
  * a second marker cited by records 26-35 (overlap 26-30);
  * same-work spelling variants that must cluster at threshold 0.75 with
    volume+page constraints (groups A, B, E, G) and a volume-veto pair (C);
  * a cross-year near-duplicate (D) that blocking must keep apart;
  * year 1977 carries exactly ncr {7, 2, 1} for the strict-share rule;
  * references with no year, pre-1900 and post-1995 years, for window tests;
  * records 49 and 50 sit outside the 1962-2018 PY window and cite only
    one-off references.

Expectations in refparse_golden.json are derived from how each string is
composed, never from the parser under test.
"""

import json
import random
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"
SEED = 20240801

N_RECORDS = 50
N_CR_LINES = 400

MARKER = "Liu BYH, 1960, SOLAR ENERGY, V4, P1"
MARKER2 = "Perez R, 1987, SOLAR ENERGY, V39, P221"

# name -> (raw string, sorted list of citing record indices, 1-based)
NAMED_REFS = {
    "M": (MARKER, list(range(1, 31))),
    "P": (MARKER2, list(range(26, 36))),
    "A1": ("Angstrom A, 1924, Q J ROY METEOR SOC, V50, P121", [1, 2, 3, 4, 5, 6, 7, 8]),
    "A2": ("Angström A, 1924, QUART J ROY METEOROL SOC, V50, P121", [8, 9, 10]),
    "B1": ("Hottel HC, 1942, TRANS ASME, V64, P91", [11, 12, 13, 14, 15, 16]),
    "B2": ("Hottel HC, 1942, T ASME, V64, P91", [17, 18]),
    "C1": ("Haurwitz B, 1945, J METEOROL, V2, P154", [19, 20, 21, 22]),
    "C2": ("Haurwitz B, 1945, J METEOROL, V3, P154", [23, 24, 25]),
    "D1": ("Haurwitz B, 1946, J METEOROL, V3, P123", [26, 27, 28]),
    "E1": ("Erbs DG, 1982, SOLAR ENERGY, V28, P293, DOI 10.1016/0038-092X(82)90302-4",
           [29, 30, 31, 32, 33, 34, 35]),
    "E2": ("Erbs DG, 1982, SOLAR ENERGY, V28, P293", [36, 37]),
    "F1": ("Orgill JF, 1977, SOLAR ENERGY, V19, P357", [1, 2, 3, 4, 5, 6, 7]),
    "F2": ("Klein SA, 1977, SOLAR ENERGY, V19, P325", [8, 9]),
    "F3": ("Temps RC, 1977, SOLAR ENERGY, V19, P179", [10]),
    "G1": ("Whillier A, 1953, Thesis, MIT Cambridge", [11, 12]),
    "G2": ("Whillier A, 1953, PhD Thesis, MIT", [13]),
    "H1": ("ANON, SOLAR RADIATION HANDBOOK", [14, 15]),
    "I1": ("Arrhenius S, 1896, PHILOS MAG, V41, P237", [16, 17]),
    "I2": ("Yang D, 2018, SOLAR ENERGY, V168, P60", [18, 19, 20]),
    "J1": ("Kasten F, 1966, ARCH METEOROL GEOP B, VB14, P206", [21, 22, 23, 24]),
    "L63": ("Liu BYH, 1963, SOLAR ENERGY, V7, P53", [25, 26, 27, 28, 29]),
    "L60b": ("Liu BYH, 1960, SOLAR ENERGY, V4, P19", [31, 32]),
}

MID_REFS = [
    ("Black JN, 1954, Q J ROY METEOR SOC, V80, P231", 4),
    ("Page JK, 1964, P UN C NEW SOURCES E, V4, P378", 3),
    ("Collares-Pereira M, 1979, SOLAR ENERGY, V22, P155", 5),
    ("Klucher TM, 1979, SOLAR ENERGY, V23, P111", 3),
    ("Hay JE, 1979, SOLAR ENERGY, V23, P301", 2),
    ("Reindl DT, 1990, SOLAR ENERGY, V45, P1", 4),
    ("Skartveit A, 1987, SOLAR ENERGY, V38, P271", 2),
    ("Prescott J, 1940, T ROY SOC SOUTH AUST, V64, P114", 3),
    ("Kimball HH, 1919, MON WEATHER REV, V47, P769", 2),
    ("Iqbal M, 1983, INTRO SOLAR RADIATION", 3),
]

SINGLETON_AUTHORS = [
    "Adams QR", "Bergström L", "Chandra V", "Dubois F", "Evans T", "Fonseca R",
    "García-López M", "Hansen O", "Ito K", "Jørgensen P", "Kowalski A", "Lindqvist S",
    "Moreau C", "Nakamura H", "Olsen B", "Pettersen G", "Quinn D", "Rossi L",
    "Schmidt W", "Tanaka Y",
]

SOURCE_POOL = [
    "SOLAR ENERGY", "J APPL METEOROL", "Q J ROY METEOR SOC", "ENERGY CONVERS",
    "MON WEATHER REV", "ARCH METEOROL GEOP B", "GEOGR ANN", "APPL OPTICS",
]

SO_TITLES = [
    "Solar Energy", "Journal of Applied Meteorology", "Energy Conversion",
    "Renewable Energy", "Applied Optics",
]


def record_py(index: int) -> int:
    if index == 49:
        return 1959
    if index == 50:
        return 2020
    return 1962 + ((index * 7) % 57)


def build_corpus(rng: random.Random) -> str:
    lines_per_record = {i: [] for i in range(1, N_RECORDS + 1)}
    for _name, (raw, citing) in NAMED_REFS.items():
        for rec in citing:
            lines_per_record[rec].append(raw)
    # record 12 cites the marker twice: a duplicated line inside one reference list
    lines_per_record[12].append(MARKER)

    used = set(range(1, 49))
    for raw, count in MID_REFS:
        recs = rng.sample(sorted(used), count)
        for rec in recs:
            lines_per_record[rec].append(raw)

    total = sum(len(v) for v in lines_per_record.values())
    singleton_serial = 0

    def next_singleton() -> str:
        nonlocal singleton_serial
        singleton_serial += 1
        author = SINGLETON_AUTHORS[singleton_serial % len(SINGLETON_AUTHORS)]
        year = 1900 + (singleton_serial * 13) % 96  # 1900..1995
        if year == 1977:
            year = 1978  # 1977 carries exactly the planted {7, 2, 1} share structure
        source = SOURCE_POOL[singleton_serial % len(SOURCE_POOL)]
        return f"{author}, {year}, {source}, V{singleton_serial % 60 + 1}, P{singleton_serial * 3 + 1}"

    # records 49/50 carry only one-off references
    for rec, quota in ((49, 5), (50, 6)):
        while len(lines_per_record[rec]) < quota:
            lines_per_record[rec].append(next_singleton())
            total += 1

    order = [i for i in range(1, 49)]
    cursor = 0
    while total < N_CR_LINES:
        rec = order[cursor % len(order)]
        cursor += 1
        if len(lines_per_record[rec]) >= 12:
            continue
        lines_per_record[rec].append(next_singleton())
        total += 1
    assert total == N_CR_LINES, total

    for rec in lines_per_record:
        rng.shuffle(lines_per_record[rec])

    out = ["FN Synthetic Bibliographic Export", "VR 1.0"]
    for i in range(1, N_RECORDS + 1):
        if i != 45:
            out.append(f"UT WOS:SYN{i:04d}")
        out.append(f"PY {record_py(i)}")
        if i != 7:
            out.append(f"SO {SO_TITLES[i % len(SO_TITLES)]}")
        if i <= 3:
            out.append(f"TI Synthetic study number {i} of irradiance records")
        if i == 2:
            out.append("AU Example A")
            out.append("   Example B")
        crs = lines_per_record[i]
        for j, cr in enumerate(crs):
            out.append(f"CR {cr}" if j == 0 else f"   {cr}")
        out.append("ER")
        out.append("")
    out.append("EF")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Reference-string golden table

HAND_CASES = [
    {
        "raw": "Liu BYH, 1960, Solar Energy, V4, P1",
        "expect": {"first_author": "Liu BYH", "rpy": 1960, "source": "Solar Energy",
                   "volume": "4", "start_page": "1", "doi": None},
    },
    {
        "raw": "Whillier A, 1953, Thesis, MIT Cambridge",
        "expect": {"first_author": "Whillier A", "rpy": 1953, "source": "Thesis",
                   "volume": None, "start_page": None, "doi": None},
    },
    {
        "raw": "Angström A, 1924, Quarterly Journal of the Royal Meteorological Society, V50, P121",
        "expect": {"first_author": "Angström A", "rpy": 1924,
                   "source": "Quarterly Journal of the Royal Meteorological Society",
                   "volume": "50", "start_page": "121", "doi": None},
    },
    {
        "raw": "Kasten F, 1966, Arch Meteorol Geop B, VB14, P206",
        "expect": {"first_author": "Kasten F", "rpy": 1966, "source": "Arch Meteorol Geop B",
                   "volume": "B14", "start_page": "206", "doi": None},
    },
    {
        "raw": "Page JK, 1964, P UN C New Sources E, V4, P378",
        "expect": {"first_author": "Page JK", "rpy": 1964, "source": "P UN C New Sources E",
                   "volume": "4", "start_page": "378", "doi": None},
    },
    {
        "raw": "Duffie JA, 1980, Solar engineering of thermal processes, 1 st Ed.",
        "expect": {"first_author": "Duffie JA", "rpy": 1980,
                   "source": "Solar engineering of thermal processes",
                   "volume": None, "start_page": None, "doi": None},
    },
    {
        "raw": "Erbs DG, 1982, Solar Energy, V28, P293, DOI 10.1016/0038-092X(82)90302-4",
        "expect": {"first_author": "Erbs DG", "rpy": 1982, "source": "Solar Energy",
                   "volume": "28", "start_page": "293", "doi": "10.1016/0038-092x(82)90302-4"},
    },
    {
        "raw": "Robinson N, 1966, Solar Radiation",
        "expect": {"first_author": "Robinson N", "rpy": 1966, "source": "Solar Radiation",
                   "volume": None, "start_page": None, "doi": None},
    },
    {
        "raw": "X",
        "expect": {"first_author": "X", "rpy": None, "source": None,
                   "volume": None, "start_page": None, "doi": None},
    },
    {
        "raw": "",
        "expect": {"first_author": None, "rpy": None, "source": None,
                   "volume": None, "start_page": None, "doi": None},
    },
    {
        "raw": "   ",
        "expect": {"first_author": None, "rpy": None, "source": None,
                   "volume": None, "start_page": None, "doi": None},
    },
    {
        "raw": ",,,",
        "expect": {"first_author": None, "rpy": None, "source": None,
                   "volume": None, "start_page": None, "doi": None},
    },
    {
        # year is the last segment: nothing left to fill the source slot
        "raw": "Spencer J, 1971",
        "expect": {"first_author": "Spencer J", "rpy": 1971, "source": None,
                   "volume": None, "start_page": None, "doi": None},
    },
    {
        # the segment after the year is consumed as source even if it looks like a volume
        "raw": "X, 1960, V7, P9",
        "expect": {"first_author": "X", "rpy": 1960, "source": "V7",
                   "volume": None, "start_page": "9", "doi": None},
    },
    {
        # two year-like segments: the first in range wins, the second becomes the source
        "raw": "Two Y, 1960, 1970, J X",
        "expect": {"first_author": "Two Y", "rpy": 1960, "source": "1970",
                   "volume": None, "start_page": None, "doi": None},
    },
    {
        # out-of-range four-digit token is not a year
        "raw": "Old T, 0999, ANCIENT, V1, P2",
        "expect": {"first_author": "Old T", "rpy": None, "source": None,
                   "volume": "1", "start_page": "2", "doi": None},
    },
    {
        # no year: no source slot, but volume/page/DOI still match positionally
        "raw": "Liu BYH, SOLAR ENERGY, V4, P1",
        "expect": {"first_author": "Liu BYH", "rpy": None, "source": None,
                   "volume": "4", "start_page": "1", "doi": None},
    },
    {
        # segment 0 is always the author, even when it carries a DOI marker
        "raw": "DOI 10.1/ONLY",
        "expect": {"first_author": "DOI 10.1/ONLY", "rpy": None, "source": None,
                   "volume": None, "start_page": None, "doi": None},
    },
    {
        # whitespace around segments is trimmed; raw must stay untouched
        "raw": "  Padded P ,  1960 ,  SRC J  , V9 , P77 ",
        "expect": {"first_author": "Padded P", "rpy": 1960, "source": "SRC J",
                   "volume": "9", "start_page": "77", "doi": None},
    },
    {
        "raw": "Boundary Z, 2999, FUTURE J, V1, P1",
        "expect": {"first_author": "Boundary Z", "rpy": 2999, "source": "FUTURE J",
                   "volume": "1", "start_page": "1", "doi": None},
    },
]

GEN_AUTHORS = [
    "Liu BYH", "Angström A", "Hottel HC", "Gómez P", "Van Der Berg K", "O'Neill M",
    "Smith-Jones R", "Müller T", "Haurwitz B", "Prescott J", "Černý V", "Øster L",
]
GEN_SOURCES = [
    "SOLAR ENERGY", "Q J ROY METEOR SOC", "J ATMOS SCI", "ENERGY CONVERS",
    "APPL OPTICS", "MON WEATHER REV", "GEOGR ANN STOCKH", "T ROY SOC SOUTH AUST",
]
GEN_VOLUMES = ["4", "19", "B14", "50", "168", "A2"]
GEN_PAGES = ["1", "121", "A7", "206", "769"]
GEN_DOIS = [
    "10.1016/0038-092X(60)90062-1",
    "10.1002/QJ.49705021008",
    "10.1175/1520-0450(1964)003",
]
GEN_JUNK = ["3RD ED", "PART II", "IN PRESS", "ABSTR ONLY"]


def build_generated_cases(rng: random.Random, count: int) -> list[dict]:
    cases = []
    for _ in range(count):
        author = rng.choice(GEN_AUTHORS)
        segments = [author]
        expect = {"first_author": author, "rpy": None, "source": None,
                  "volume": None, "start_page": None, "doi": None}
        if rng.random() < 0.9:
            year = rng.randrange(1900, 1996)
            segments.append(str(year))
            expect["rpy"] = year
            source = rng.choice(GEN_SOURCES)
            segments.append(source)
            expect["source"] = source
        if rng.random() < 0.65:
            volume = rng.choice(GEN_VOLUMES)
            segments.append(f"V{volume}")
            expect["volume"] = volume
        if rng.random() < 0.65:
            page = rng.choice(GEN_PAGES)
            segments.append(f"P{page}")
            expect["start_page"] = page
        if rng.random() < 0.25:
            segments.append(rng.choice(GEN_JUNK))
        if rng.random() < 0.3:
            doi = rng.choice(GEN_DOIS)
            segments.append(f"DOI {doi}")
            expect["doi"] = doi.lower()
        cases.append({"raw": ", ".join(segments), "expect": expect})
    return cases


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)

    corpus = build_corpus(rng)
    (DATA_DIR / "synthetic_corpus.txt").write_text(corpus, encoding="utf-8")

    cases = HAND_CASES + build_generated_cases(rng, 100 - len(HAND_CASES))
    assert len(cases) == 100
    (DATA_DIR / "refparse_golden.json").write_text(
        json.dumps(cases, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )
    print(f"wrote {DATA_DIR / 'synthetic_corpus.txt'} ({corpus.count(chr(10))} lines)")
    print(f"wrote {DATA_DIR / 'refparse_golden.json'} ({len(cases)} cases)")


if __name__ == "__main__":
    main()
