"""
Report Comparison

Ranks datasets (typically one per language pair) by the gain of a tuned
checkpoint over a baseline.
"""

from typing import Dict, List, Optional, Sequence, Tuple

from schemas import EvalReport
from utils.errors import DataValidationError


def rank_pair_improvements(
    baseline_reports: Sequence[EvalReport],
    tuned_reports: Sequence[EvalReport],
    top_k: Optional[int] = None,
) -> List[Tuple[str, float]]:
    """
    Per-dataset best-score gains, largest first; equal gains sort by dataset id.

    Datasets whose score is undefined on either side are skipped.

    Raises:
        DataValidationError: If a tuned report has no baseline counterpart
    """
    baseline: Dict[str, EvalReport] = {r.dataset_id: r for r in baseline_reports}
    gains = []
    for report in tuned_reports:
        base = baseline.get(report.dataset_id)
        if base is None:
            raise DataValidationError(f"No baseline report for dataset '{report.dataset_id}'")
        if base.task != report.task:
            raise DataValidationError(
                f"Dataset '{report.dataset_id}': task {report.task} vs baseline task {base.task}"
            )
        if report.best_score is None or base.best_score is None:
            continue
        gains.append((report.dataset_id, report.best_score - base.best_score))
    gains.sort(key=lambda item: (-item[1], item[0]))
    return gains if top_k is None else gains[:top_k]
