"""Printed complexity tables, their recomputation and mismatch reporting.

Printed values ship as reference data keyed by (table, row).  Each cell is
recomputed when it is within budget and flagged ``match``, ``mismatch``,
``within-bound`` (printed as an upper bound), ``out-of-budget`` or
``no-data`` (frame-sum rows without ingested ensembles).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from . import blc, criteria, trees
from .blc import BasicLinearCombination

ROW_LABELS = {
    "TR": "L_TR(n)",
    "TR0": "L_TR(n,0)",
    "F": "L_F(n)",
    "RH": "L_RH(n)",
}

# table -> (criterion, collection?, {row: {n: printed}})
PRINTED: dict[int, tuple[int, bool, dict[str, dict[int, int | str]]]] = {
    1: (1, False, {
        "TR": dict(zip(range(2, 11), [1, 2, 5, 14, 44, 157, 634, 2852, 14047])),
        "TR0": dict(zip(range(2, 11), [1, 1, 2, 5, 15, 55, 239, 1169, 6213])),
        "F": dict(zip(range(2, 7), [1, 1, 5, 49, 784])),
        "RH": dict(zip(range(2, 11), [1, 1, 2, 5, 23, 171, 2606, 81564, 4980756])),
    }),
    2: (2, False, {
        "TR": dict(zip(range(2, 7), [1, 5, 23, 93, 403])),
        "TR0": dict(zip(range(2, 7), [1, 3, 11, 42, 172])),
        "F": dict(zip(range(2, 5), [1, 3, 26])),
        "RH": dict(zip(range(2, 7), [1, 3, 12, 50, 345])),
    }),
    3: (3, False, {
        "TR": dict(zip(range(2, 7), [0, 1, 8, 37, 183])),
        "TR0": dict(zip(range(2, 7), [0, 1, 8, 38, 167])),
        "F": dict(zip(range(2, 5), [0, 1, 11])),
        "RH": dict(zip(range(2, 7), [0, 1, 6, 30, 230])),
    }),
    4: (1, True, {
        "TR": dict(zip(range(2, 11), [1, 3, 8, 22, 66, 223, 857, 3709, 17056])),
        "TR0": dict(zip(range(2, 11), [1, 2, 4, 9, 24, 79, 318, 1487, 7700])),
        "F": dict(zip(range(2, 7), [1, 1, 5, 49, 784])),
        "RH": dict(zip(range(2, 11), [1, 1, 2, 5, 23, 171, 2606, 81564, 4980756])),
    }),
    5: (2, True, {
        "TR": dict(zip(range(2, 7), [1, 6, 28, 121, 524])),
        "TR0": dict(zip(range(2, 7), [1, 4, 15, 57, 229])),
        "F": dict(zip(range(2, 5), [1, 3, 26])),
        "RH": dict(zip(range(2, 7), [1, 3, 12, 50, 345])),
    }),
    6: (3, True, {
        "TR": {**dict(zip(range(2, 7), [0, 1, 9, 45, 228])), 7: "<2247"},
        "TR0": dict(zip(range(2, 8), [0, 1, 7, 28, 125, 612])),
        "F": dict(zip(range(2, 5), [0, 1, 11])),
        "RH": dict(zip(range(2, 8), [0, 1, 6, 30, 230, 2565])),
    }),
}

MAX_TREE_ORDER = 8
MAX_RH_ORDER = 7


def citation(table: int, row: str) -> str:
    return f"table{table}:{row}"


@dataclass(frozen=True)
class Cell:
    table: int
    row: str
    n: int
    printed: int | str
    recomputed: int | None
    status: str

    @property
    def citation(self) -> str:
        return citation(self.table, self.row)


@lru_cache(maxsize=None)
def _tree_report(kind: str, n: int) -> criteria.ComplexityReport:
    build = blc.tree_sum_bn_blc if kind == "TR" else blc.tree_sum_an_blc
    return criteria.report(build(n))


@lru_cache(maxsize=None)
def _rh_report(n: int) -> criteria.ComplexityReport:
    return criteria.report(blc.ree_hoover_blc(n))


def single_score(row: str, n: int, crit: int, frames: Mapping[int, BasicLinearCombination]) -> int | None:
    """Criterion of the order-n member of a row, or None when out of budget."""
    if row in ("TR", "TR0"):
        if crit == 1:
            return trees.count_tr(n) if row == "TR" else trees.count_tr0(n)
        return _tree_report(row, n).criterion(crit) if n <= MAX_TREE_ORDER else None
    if row == "RH":
        return _rh_report(n).criterion(crit) if n <= MAX_RH_ORDER else None
    L = frames.get(n)
    return criteria.criterion(L, crit) if L is not None else None


def recompute(table: int, row: str, n: int, frames: Mapping[int, BasicLinearCombination] | None = None) -> int | None:
    crit, collection, _ = PRINTED[table]
    frames = frames or {}
    if collection and row in ("TR", "TR0"):
        parts = [single_score(row, k, crit, frames) for k in range(2, n + 1)]
        return None if any(p is None for p in parts) else sum(parts)
    return single_score(row, n, crit, frames)


def _status(printed, value, row, frames) -> str:
    if value is None:
        return "no-data" if row == "F" and not frames else "out-of-budget"
    if isinstance(printed, str):
        return "within-bound" if value < int(printed.lstrip("<")) else "mismatch"
    return "match" if printed == value else "mismatch"


def table_cells(table: int, frames: Mapping[int, BasicLinearCombination] | None = None) -> list[Cell]:
    if table not in PRINTED:
        raise ValueError(f"table index must be 1..6, got {table}")
    frames = frames or {}
    cells = []
    for row, values in PRINTED[table][2].items():
        for n, printed in values.items():
            value = recompute(table, row, n, frames)
            cells.append(Cell(table, row, n, printed, value, _status(printed, value, row, frames)))
    return cells


CSV_FIELDS = ("table", "row", "n", "printed", "recomputed", "status")


def to_csv(cells: list[Cell]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for c in cells:
        w.writerow([c.table, c.row, c.n, c.printed, "" if c.recomputed is None else c.recomputed, c.status])
    return buf.getvalue()


def to_markdown(table: int, cells: list[Cell]) -> str:
    crit, collection, rows = PRINTED[table]
    ns = sorted({c.n for c in cells})
    name = f"Cr'{crit}" if collection else f"Cr{crit}"
    lines = [f"### Table {table}: {name}", "",
             "| row | " + " | ".join(f"n={n}" for n in ns) + " |",
             "|---|" + "---|" * len(ns)]
    by_key = {(c.row, c.n): c for c in cells}
    for row in rows:
        for kind in ("printed", "recomputed"):
            out = []
            for n in ns:
                c = by_key.get((row, n))
                if c is None:
                    out.append("-")
                elif kind == "printed":
                    out.append(str(c.printed))
                else:
                    out.append(_md_value(c))
            lines.append(f"| {name}({ROW_LABELS[row]}) {kind} | " + " | ".join(out) + " |")
    flagged = [c for c in cells if c.status == "mismatch"]
    lines.append("")
    if flagged:
        lines.append("Mismatches: " + ", ".join(f"{c.row} n={c.n} (printed {c.printed}, recomputed {c.recomputed})"
                                                 for c in flagged))
    else:
        lines.append("Mismatches: none")
    return "\n".join(lines) + "\n"


def _md_value(c: Cell) -> str:
    if c.recomputed is None:
        return c.status
    return f"**{c.recomputed}** (mismatch)" if c.status == "mismatch" else str(c.recomputed)
