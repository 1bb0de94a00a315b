"""
Report writers
==============

CSV and JSON emitters for bound reports, admissibility reports, norm
breakdowns and coverings. Output is byte-stable: floats are written with 17
significant digits, rows keep their producer's order, JSON keys are sorted
and no timestamps are recorded.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from alphamod.models.covering import AdmissibilityReport, Covering
from alphamod.models.reports import BoundReport
from alphamod.models.spaces import NormBreakdown

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

Report = Union[BoundReport, AdmissibilityReport, NormBreakdown, Covering]


def _plain(value: Any) -> Any:
    """JSON-safe copy: numpy scalars and arrays become Python values, tuples become lists."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def to_json(data: Dict[str, Any]) -> str:
    return json.dumps(_plain(data), sort_keys=True, indent=2) + "\n"


def report_payload(report: Report) -> Dict[str, Any]:
    if isinstance(report, BoundReport):
        return report.summary()
    if isinstance(report, (AdmissibilityReport, NormBreakdown)):
        return report.to_dict()
    if isinstance(report, Covering):
        return report.summary()
    raise TypeError(f"cannot emit {type(report).__name__}")


def report_frame(report: Report) -> pd.DataFrame:
    """Tabular form; norm breakdowns end with a ``total`` footer row."""
    if isinstance(report, BoundReport):
        return report.to_frame()
    if isinstance(report, NormBreakdown):
        frame = report.to_frame()
        footer = pd.DataFrame(
            [{"piece_id_x": "total", "piece_id_xi": "", "weight": "", "band_sup": "", "contribution": report.total}]
        )
        return pd.concat([frame.astype(object), footer], ignore_index=True)
    if isinstance(report, AdmissibilityReport):
        flat = pd.json_normalize(_plain(report.to_dict()), sep=".")
        return flat.T.reset_index().set_axis(["field", "value"], axis=1)
    if isinstance(report, Covering):
        return pd.DataFrame([piece.summary() for piece in report.pieces])
    raise TypeError(f"cannot emit {type(report).__name__}")


def _format_cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)) and math.isfinite(value):
        return FLOAT_FORMAT % value
    return value


def to_csv(report: Report) -> str:
    frame = report_frame(report)
    return frame.map(_format_cell).to_csv(index=False, lineterminator="\n")


def emit_report(report: Report, fmt: str, path: Path) -> None:
    """Write ``report`` as ``csv`` or ``json`` to ``path``.

    Raises:
        ValueError: For an unknown format
        OSError: If the file cannot be written (message carries the path)
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown report format {fmt!r}; expected csv or json")
    text = to_csv(report) if fmt == "csv" else to_json(report_payload(report))
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write report to {path}: {e}") from e
    logger.info(f"Wrote {fmt.upper()} report to {path}")


def write_verification(reports: Sequence[BoundReport], out_dir: Path) -> List[Path]:
    """One CSV per report plus ``summary.json`` with every aggregate and pass flag."""
    out_dir = Path(out_dir)
    written = []
    for report in reports:
        path = out_dir / f"{report.name}.csv"
        emit_report(report, "csv", path)
        written.append(path)
    summary = {
        "passed": all(report.passed for report in reports),
        "reports": [report.summary() for report in reports],
    }
    path = out_dir / "summary.json"
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(to_json(summary), encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write summary to {path}: {e}") from e
    written.append(path)
    return written
