from pathlib import Path

import pytest

from clusterbench import blc, tables

GOLDEN = Path(__file__).parent / "golden" / "tables.csv"

EXPECTED_MISMATCHES = {
    (2, "TR", 4): (23, 22),
    (3, "TR", 4): (8, 7),
    (3, "TR0", 4): (8, 5),
    (3, "TR0", 5): (38, 22),
    (3, "TR0", 6): (167, 97),
    (4, "TR", 10): (17056, 17756),
    (6, "TR", 4): (9, 8),
    (6, "TR0", 4): (7, 6),
    (6, "TR0", 7): (612, 599),
}


@pytest.fixture(scope="module")
def cells():
    return [c for t in range(1, 7) for c in tables.table_cells(t)]


def test_golden_csv(cells):
    assert tables.to_csv(cells) == GOLDEN.read_text()


def test_flagged_cells(cells):
    got = {(c.table, c.row, c.n): (c.printed, c.recomputed) for c in cells if c.status == "mismatch"}
    assert got == EXPECTED_MISMATCHES


def test_statuses(cells):
    by = {(c.table, c.row, c.n): c for c in cells}
    assert by[6, "TR", 7].status == "within-bound" and by[6, "TR", 7].recomputed == 1168
    assert by[1, "RH", 9].status == "out-of-budget"
    assert by[1, "F", 5].status == "no-data"
    assert all(c.status == "match" for c in cells if c.table == 1 and c.row in ("TR", "TR0"))
    assert [by[3, "RH", n].recomputed for n in range(2, 7)] == [0, 1, 6, 30, 230]
    assert by[6, "RH", 7].recomputed == 2565


def test_prefix_sums_are_consistent(cells):
    by = {(c.table, c.row, c.n): c.recomputed for c in cells}
    for single, collection in ((1, 4), (2, 5), (3, 6)):
        for row in ("TR", "TR0"):
            run = 0
            for n in range(2, 7):
                run += by[single, row, n]
                assert by[collection, row, n] == run


def test_frame_rows_from_ingested_data():
    lines = ["n=3; s=1-2,2-3,1-3; ad="]
    frames = {r.order: blc.load_frame_sum(r) for r in blc.parse_frame_records(lines)}
    row = {c.n: c for c in tables.table_cells(1, frames) if c.row == "F"}
    assert row[3].status == "match" and row[3].recomputed == 1
    assert row[4].status == "out-of-budget"


def test_markdown_marks_mismatches():
    md = tables.to_markdown(2, tables.table_cells(2))
    assert "**22** (mismatch)" in md
    assert "Mismatches: TR n=4 (printed 23, recomputed 22)" in md


def test_unknown_table():
    with pytest.raises(ValueError):
        tables.table_cells(7)
