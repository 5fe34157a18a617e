"""
Report generator module for the epoint toolkit.

This module assembles the JSON reports and CSV tables written by the CLI:
EP location reports with route agreement, EP vector reports with phases and
polarization, sweep tables and loop traces. Every number is written with 17
significant digits so identical runs give byte-identical files.
"""

import csv
import io
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from config import CSV_LINE_TERMINATOR, SCHEMA, SWEEP_RESULT_COLUMNS
from eplocate import CrossValidation, EPSolution
from epvector import PhaseTriple, ep_left_vector, polarization, vector_report
from matkit import ModelParams, build_hamiltonian, trs_defect
from monodromy import DoubleLoopReport, LoopTrace
from spectral import eigen2, self_orthogonality
from utils import dumps_json, format_float

logger = logging.getLogger(__name__)


def base_document(command: str, model: Optional[ModelParams] = None) -> Dict[str, Any]:
    """Top-level fields shared by every JSON report."""
    document: Dict[str, Any] = {"schema": SCHEMA, "command": command}
    if model is not None:
        document["model"] = model.to_dict()
    return document


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator=CSV_LINE_TERMINATOR)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("Wrote %s (%d bytes)", out, len(text.encode("utf-8")))


def write_json(document: Dict[str, Any], out: Optional[Path] = None) -> str:
    """Writes a report to `out` (stdout when None) and returns the text."""
    text = dumps_json(document)
    _emit(text, out)
    return text


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], out: Optional[Path] = None) -> str:
    text = render_csv(header, rows)
    _emit(text, out)
    return text


def find_ep_document(p: ModelParams, report: CrossValidation) -> Dict[str, Any]:
    document = base_document("find-ep", p)
    document.update(report.to_dict())
    document["ep_modulus"] = p.ep_modulus
    return document


def branch_report(p: ModelParams, solution: EPSolution) -> Dict[str, Any]:
    """Vector, left partner, self-orthogonality and polarization of one EP branch.

    `spectrum` is the closed-form decomposition of H(lambda_c) itself; at an EP
    its biorthogonal normalization fails.
    """
    left = ep_left_vector(p, solution)
    product = self_orthogonality(left, solution.vec)
    data = solution.to_dict()
    data.update(
        vector=vector_report(solution.vec),
        left_vector=vector_report(left),
        self_orthogonality=product,
        self_orthogonality_abs=abs(product),
        polarization=polarization(solution.vec).to_dict(),
        spectrum=eigen2(build_hamiltonian(p, solution.lambda_c)).to_dict(),
    )
    return data


def vector_document(p: ModelParams, ph: PhaseTriple, solutions: Sequence[EPSolution]) -> Dict[str, Any]:
    document = base_document("vector", p)
    document["phases"] = ph.to_dict()
    document["trs_defect"] = trs_defect(p)
    document["branches"] = {solution.branch: branch_report(p, solution) for solution in solutions}
    return document


def sweep_header(axes: Sequence[str]) -> List[str]:
    return ["index", *axes, *SWEEP_RESULT_COLUMNS]


def sweep_row(index: int, values: Sequence[float], status: str,
              solutions: Optional[Sequence[EPSolution]] = None) -> List[Any]:
    """One sweep table row; result columns stay empty unless status is 'ok'."""
    row: List[Any] = [index, *values, status]
    if not solutions:
        return row + [""] * (len(SWEEP_RESULT_COLUMNS) - 1)
    plus, minus = solutions
    pol_plus, pol_minus = polarization(plus.vec), polarization(minus.vec)
    row += [
        plus.lambda_c.real, plus.lambda_c.imag,
        minus.lambda_c.real, minus.lambda_c.imag,
        plus.xi,
        pol_plus.axial_ratio, pol_plus.handedness.value,
        pol_minus.axial_ratio, pol_minus.handedness.value,
    ]
    return row


def loop_document(p: ModelParams, trace: LoopTrace,
                  double_loop: Optional[DoubleLoopReport] = None) -> Dict[str, Any]:
    document = base_document("encircle", p)
    document.update(trace.summary())
    if double_loop is not None:
        document["double_loop"] = double_loop.to_dict()
    return document
