"""JSON report emission and CSV table merging for the CLI."""

from __future__ import annotations

import json

__all__ = ["make_report", "write_report", "read_report", "reports_to_csv"]

# fixed leading column order; remaining array columns follow alphabetically
_PRIORITY = ("lambda", "lhs", "rhs", "ratio")


def make_report(kind: str, params: dict, payload: dict, command: str = "") -> dict:
    from . import __version__

    report = {"kind": kind, "version": __version__, "params": params, "command": command}
    report.update(payload)
    return report


def write_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_report(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _array_columns(report: dict) -> list[str]:
    cols = [k for k, v in report.items() if isinstance(v, list) and v
            and all(isinstance(x, (int, float)) for x in v)]
    ordered = [c for c in _PRIORITY if c in cols]
    ordered += sorted(c for c in cols if c not in _PRIORITY)
    return ordered


def _generator_label(report: dict) -> str:
    gen = report.get("generator")
    if isinstance(gen, dict):
        items = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(gen.items()))
        return items
    if gen:
        return str(gen)
    return report.get("kind", "")


def reports_to_csv(reports: list[dict], path) -> None:
    """Merge sweep reports into one CSV table.

    Column order is fixed (lambda, lhs, rhs, ratio, then extras) and floats
    are printed with 17 significant digits, so identical inputs produce
    byte-identical tables.  All reports must expose the same array columns.
    """
    if not reports:
        with open(path, "w") as fh:
            fh.write("generator\n")
        return
    cols = _array_columns(reports[0])
    for rep in reports[1:]:
        if _array_columns(rep) != cols:
            raise ValueError(
                f"inconsistent report schemas: {cols} vs {_array_columns(rep)}"
            )
    with open(path, "w") as fh:
        fh.write(",".join(["generator"] + cols) + "\n")
        for rep in reports:
            label = _generator_label(rep)
            length = len(rep[cols[0]]) if cols else 0
            for i in range(length):
                row = [label] + [_fmt(rep[c][i]) for c in cols]
                fh.write(",".join(row) + "\n")
