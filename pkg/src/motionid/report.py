"""Report emission for sweep results.

A sweep writes four files into its output directory:

* ``table_independent.txt`` - one row per (method, ratio scenario) with
  its best cell, plus the baseline row; accuracies that exceed the
  baseline carry a ``*`` marker.
* ``table_combined.txt``    - baseline plus the mixture rows.
* ``grid.csv``              - every cell, machine readable.
* ``per_user.csv``          - per-user metrics behind every cell.
* ``metadata.json``         - run settings (seed, provider, ...).

Markers are a pure function of the numbers in ``grid.csv``: the baseline
accuracy is the accuracy of the best ``none`` cell, a cell is
``best_in_group`` when it wins its (method, ratio) group on (accuracy,
|FAR-FRR|, C), and ``exceeds_baseline`` when its accuracy is strictly
above the baseline. ``recompute_markers`` re-derives both flags, so
tables can be regenerated from the CSV alone and emitted files can be
self-checked. No timestamps are written: identical runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .errors import DataFormatError
from .protocol import EvalReport

GRID_COLUMNS = (
    "method",
    "parameter",
    "ratio",
    "kernel",
    "C",
    "accuracy",
    "far",
    "frr",
    "best_in_group",
    "exceeds_baseline",
)

INDEPENDENT_METHODS = ("noise", "temporal", "intensity", "warp")
COMBINED_LABELS = {"all": "all methods", "noise+temporal": "noise+temporal"}
METHOD_LABELS = {
    "none": "no augmentation",
    "noise": "random noise",
    "temporal": "temporal scaling",
    "intensity": "intensity scaling",
    "warp": "warping",
    "all": "all methods",
    "noise+temporal": "noise+temporal",
}


def cells_to_rows(cells) -> list[dict]:
    """Plain-dict view of cells, the exact content of grid.csv."""
    rows = []
    for cell in cells:
        rows.append(
            {
                "method": cell.method,
                "parameter": cell.parameter,
                "ratio": "" if cell.ratio is None else repr(float(cell.ratio)),
                "kernel": cell.kernel,
                "C": repr(float(cell.C)),
                "accuracy": repr(float(cell.mean_accuracy)),
                "far": repr(float(cell.mean_far)),
                "frr": repr(float(cell.mean_frr)),
                "best_in_group": "1" if cell.best_in_group else "0",
                "exceeds_baseline": "1" if cell.exceeds_baseline else "0",
            }
        )
    return rows


def _row_rank(row: dict):
    return (
        -float(row["accuracy"]),
        abs(float(row["far"]) - float(row["frr"])),
        float(row["C"]),
        row["parameter"],
        row["kernel"],
        float(row["ratio"]) if row["ratio"] else 0.0,
    )


def recompute_markers(rows: list[dict]) -> list[dict]:
    """Re-derive best_in_group / exceeds_baseline from the numbers alone."""
    groups: dict = {}
    for row in rows:
        groups.setdefault((row["method"], row["ratio"]), []).append(row)
    winners = {group: min(members, key=_row_rank) for group, members in groups.items()}
    if ("none", "") not in winners:
        raise DataFormatError("grid has no baseline ('none') cells")
    baseline_acc = float(winners[("none", "")]["accuracy"])
    out = []
    for row in rows:
        fixed = dict(row)
        fixed["best_in_group"] = "1" if row is winners[(row["method"], row["ratio"])] else "0"
        fixed["exceeds_baseline"] = "1" if float(row["accuracy"]) > baseline_acc else "0"
        out.append(fixed)
    return out


def _fmt_pct(value: float) -> str:
    return f"{100.0 * value:.2f}%"


def _winner_rows(rows: list[dict]) -> dict:
    return {
        (row["method"], row["ratio"]): row for row in rows if row["best_in_group"] == "1"
    }


def _render_table(rows: list[dict], methods_by_ratio, title: str) -> str:
    """Aligned-text table: baseline section, then one section per ratio."""
    winners = _winner_rows(rows)
    header = ("method", "parameter", "kernel", "C", "accuracy", "FAR", "FRR")
    body: list[tuple] = []

    def emit(section: str, wanted: list[tuple[str, str]]):
        body.append(("== " + section,))
        for method, ratio in wanted:
            row = winners.get((method, ratio))
            if row is None:
                continue
            star = "*" if row["exceeds_baseline"] == "1" else ""
            body.append(
                (
                    METHOD_LABELS.get(method, method),
                    row["parameter"],
                    row["kernel"],
                    f"{float(row['C']):g}",
                    _fmt_pct(float(row["accuracy"])) + star,
                    _fmt_pct(float(row["far"])),
                    _fmt_pct(float(row["frr"])),
                )
            )

    emit("no augmentation", [("none", "")])
    for ratio, methods in methods_by_ratio:
        emit(
            f"augmentation of all samples with ratio {float(ratio):g}x",
            [(m, ratio) for m in methods],
        )

    widths = [len(h) for h in header]
    for line in body:
        if len(line) > 1:
            widths = [max(w, len(str(v))) for w, v in zip(widths, line)]
    sep = "  "

    def fmt(line) -> str:
        if len(line) == 1:
            return line[0]
        return sep.join(str(v).ljust(w) for v, w in zip(line, widths)).rstrip()

    lines = [title, "", fmt(header), fmt(tuple("-" * w for w in widths))]
    lines += [fmt(line) for line in body]
    lines.append("")
    lines.append("* accuracy exceeds the no-augmentation baseline")
    return "\n".join(lines) + "\n"


def render_independent_table(rows: list[dict]) -> str:
    """Best cell per independent method and ratio scenario."""
    ratios = sorted(
        {row["ratio"] for row in rows if row["method"] in INDEPENDENT_METHODS and row["ratio"]},
        key=float,
        reverse=True,
    )
    sections = [(ratio, list(INDEPENDENT_METHODS)) for ratio in ratios]
    return _render_table(rows, sections, "Independent augmentation methods (best cell per method)")


def render_combined_table(rows: list[dict]) -> str:
    """Best cell per combined method (mixtures run at ratio 1x)."""
    present = [m for m in COMBINED_LABELS if any(row["method"] == m for row in rows)]
    ratios = sorted(
        {row["ratio"] for row in rows if row["method"] in COMBINED_LABELS and row["ratio"]},
        key=float,
        reverse=True,
    )
    sections = [(ratio, present) for ratio in ratios]
    return _render_table(rows, sections, "Combined augmentation methods (best cell per mixture)")


def write_grid_csv(rows: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=GRID_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def read_grid_csv(path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != GRID_COLUMNS:
            raise DataFormatError(
                f"expected grid columns {','.join(GRID_COLUMNS)}", path, line=1
            )
        rows = list(reader)
    if not rows:
        raise DataFormatError("grid has no cells", path)
    return rows


def write_per_user_csv(cells, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ("method", "parameter", "ratio", "kernel", "C", "user_id", "accuracy", "far", "frr")
        )
        for cell in cells:
            ratio = "" if cell.ratio is None else repr(float(cell.ratio))
            for user, acc, far, frr in zip(cell.user_ids, cell.accuracies, cell.fars, cell.frrs):
                writer.writerow(
                    (
                        cell.method,
                        cell.parameter,
                        ratio,
                        cell.kernel,
                        repr(float(cell.C)),
                        user,
                        repr(float(acc)),
                        repr(float(far)),
                        repr(float(frr)),
                    )
                )


def write_report(report: EvalReport, out_dir) -> list[Path]:
    """Write every report artifact; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = cells_to_rows(report.cells)
    paths = []

    grid_path = out / "grid.csv"
    write_grid_csv(rows, grid_path)
    paths.append(grid_path)

    per_user_path = out / "per_user.csv"
    write_per_user_csv(report.cells, per_user_path)
    paths.append(per_user_path)

    table1 = out / "table_independent.txt"
    table1.write_text(render_independent_table(rows), encoding="utf-8")
    paths.append(table1)

    table2 = out / "table_combined.txt"
    table2.write_text(render_combined_table(rows), encoding="utf-8")
    paths.append(table2)

    meta_path = out / "metadata.json"
    meta_path.write_text(
        json.dumps(report.metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    paths.append(meta_path)
    return paths
