"""Plain-text tables and machine-readable serialization for reports.

Rendered tables round to two decimals; JSON and CSV keep full precision.
"""

from __future__ import annotations

import json

from .fairness import FairnessReport
from .info import InfoReport


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    def line(cells):
        return "  ".join(c.rjust(w) for c, w in zip(cells, widths))
    sep = "  ".join("-" * w for w in widths)
    return "\n".join([line(headers), sep] + [line(r) for r in rows]) + "\n"


def _fmt(v: float) -> str:
    return f"{v:.2f}"


INFO_HEADERS = ["I(X;Y)", "H(Y)", "H(Y|X)", "I(Z;Y)", "I(Z;X)",
                "I(Z,X;Y)", "I(Z;Y|X)"]


def render_info_table(report: InfoReport, title: str = "") -> str:
    row = [_fmt(getattr(report, c)) for c in InfoReport.CELLS]
    text = _table(INFO_HEADERS, [row])
    if title:
        text = title + "\n" + text
    return text


def render_info_rows(rows: dict[str, InfoReport], title: str = "") -> str:
    body = [[name] + [_fmt(getattr(rep, c)) for c in InfoReport.CELLS]
            for name, rep in rows.items()]
    text = _table([""] + INFO_HEADERS, body)
    if title:
        text = title + "\n" + text
    return text


def render_fairness_table(reports: dict[str, FairnessReport],
                          title: str = "") -> str:
    headers = ["", "accuracy", "BA", "Gap RMS", "Gap max"]
    rows = [[name, _fmt(r.accuracy), _fmt(r.ba), _fmt(r.gap_rms), _fmt(r.gap_max)]
            for name, r in reports.items()]
    text = _table(headers, rows)
    if title:
        text = title + "\n" + text
    return text


def render_accuracy_table(accuracies: dict[str, float], title: str = "") -> str:
    headers = ["features", "accuracy"]
    rows = [[name, _fmt(v)] for name, v in accuracies.items()]
    text = _table(headers, rows)
    if title:
        text = title + "\n" + text
    return text


def to_json(payload: dict) -> str:
    """Stable JSON: sorted keys, full float precision."""
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"
