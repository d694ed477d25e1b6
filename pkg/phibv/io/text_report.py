"""Text report module."""

import logging
from typing import Sequence

import numpy as np
import pandas as pd

from phibv.data_model.report import ConditionReport, ModularReport
from phibv.solver import SweepResult

log = logging.getLogger("phibv")


def _fmt(value) -> str:
    if value is None:
        return "-"
    value = float(value)
    if np.isinf(value):
        return "∞" if value > 0 else "-∞"
    return f"{value:.6g}"


def conditions_table(reports: Sequence[ConditionReport]) -> str:
    """Markdown table of condition verdicts.

    Parameters
    ----------
    reports : Sequence[ConditionReport]
        Condition checks.

    Returns
    -------
    str
        Table string
    """
    if not reports:
        return "No conditions checked."
    rows = [
        {
            "Condition": report.condition,
            "Verdict": report.verdict.value,
            "Constant": _fmt(report.constant),
            "Finest modulus": _fmt(report.table[-1][1]) if report.table else "-",
        }
        for report in reports
    ]
    return pd.DataFrame.from_records(rows).to_markdown(index=False, stralign="right")


def modular_table(report: ModularReport) -> str:
    """Markdown table of an itemized modular, one line per atom."""
    summary = pd.DataFrame.from_records(
        [
            {"Part": "absolutely continuous", "Value": _fmt(report.ac_part)},
            {"Part": "singular", "Value": _fmt(report.singular_part)},
            {"Part": "fidelity", "Value": _fmt(report.fidelity)},
            {"Part": "total", "Value": _fmt(report.total)},
        ]
    ).to_markdown(index=False, stralign="right")
    if report.warnings:
        summary += f"\n\nWarnings: {', '.join(report.warnings)}"
    if not report.atoms:
        return summary
    atoms = pd.DataFrame.from_records(
        [
            {"x": str(atom.x), "Jump": _fmt(atom.jump), "Weight": _fmt(atom.weight)}
            for atom in report.atoms
        ]
    ).to_markdown(index=False, stralign="right")
    return summary + "\n\nAtoms\n\n" + atoms


def sweep_table(result: SweepResult) -> str:
    """Markdown table of a Γ-sweep with its limit summary."""
    table = pd.DataFrame.from_records(
        [
            {
                "k": k,
                "p": f"{p:.6f}",
                "Energy": _fmt(energy),
                "Atomized modular": _fmt(lower),
                "Iterations": iterations,
            }
            for k, (p, energy, lower, iterations) in enumerate(
                zip(result.schedule, result.energies, result.lowerBounds, result.iterations), start=1
            )
        ]
    ).to_markdown(index=False, stralign="right")
    summary = (
        f"Limit modular: {_fmt(result.limitModular.total)}\n"
        f"Gap: {_fmt(result.gap)} (relative {_fmt(result.relativeGap)})\n"
        f"Jump atoms: {len(result.limit.atoms)} above threshold {_fmt(result.threshold)}\n"
    )
    if result.flags:
        summary += f"Flags: {', '.join(result.flags)}\n"
    return table + "\n\n" + summary
