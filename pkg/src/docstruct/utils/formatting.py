"""
Plain-text tables for evaluation reports, cross-validation runs and topics.
"""

from collections.abc import Callable, Mapping, Sequence

from tabulate import tabulate

from ..classifiers.metrics import CrossValidationResult, EvalReport
from .serialization_utils import REPORT_DECIMALS

TABLE_FORMAT = "simple"


def _fmt(value: float, decimals: int = REPORT_DECIMALS) -> str:
    return f"{value:.{decimals}f}"


def format_eval_report(
    report: EvalReport,
    class_name: Callable[[int], str] = str,
    decimals: int = REPORT_DECIMALS,
) -> str:
    """Per-class precision, recall, F1 and support plus a macro row."""
    rows = [
        [
            class_name(label),
            _fmt(report.precision[i], decimals),
            _fmt(report.recall[i], decimals),
            _fmt(report.f1[i], decimals),
            report.support[i],
        ]
        for i, label in enumerate(report.class_alphabet)
    ]
    rows.append(
        [
            "macro avg",
            _fmt(report.macro_precision, decimals),
            _fmt(report.macro_recall, decimals),
            _fmt(report.macro_f1, decimals),
            sum(report.support),
        ]
    )
    table = tabulate(
        rows,
        headers=["class", "precision", "recall", "f1", "support"],
        tablefmt=TABLE_FORMAT,
        disable_numparse=True,
    )
    return f"{table}\naccuracy {_fmt(report.accuracy, decimals)}\n"


def format_cross_validation(result: CrossValidationResult, decimals: int = REPORT_DECIMALS) -> str:
    """Fold-by-fold macro scores followed by the pooled row."""
    rows = [
        [
            str(fold + 1),
            _fmt(report.macro_precision, decimals),
            _fmt(report.macro_recall, decimals),
            _fmt(report.macro_f1, decimals),
        ]
        for fold, report in enumerate(result.folds)
    ]
    pooled = result.pooled
    rows.append(
        [
            "pooled",
            _fmt(pooled.macro_precision, decimals),
            _fmt(pooled.macro_recall, decimals),
            _fmt(pooled.macro_f1, decimals),
        ]
    )
    title = f"{result.kind} ({result.mode or 'unknown'} vectors), {len(result.folds)} folds"
    table = tabulate(
        rows,
        headers=["fold", "precision", "recall", "f1"],
        tablefmt=TABLE_FORMAT,
        disable_numparse=True,
    )
    return f"{title}\n{table}\n"


def format_comparison(reports: Mapping[str, EvalReport], decimals: int = REPORT_DECIMALS) -> str:
    """One macro-score row per named report, in the mapping's order."""
    rows = [
        [
            name,
            _fmt(report.macro_precision, decimals),
            _fmt(report.macro_recall, decimals),
            _fmt(report.macro_f1, decimals),
        ]
        for name, report in reports.items()
    ]
    table = tabulate(
        rows,
        headers=["setting", "precision", "recall", "f1"],
        tablefmt=TABLE_FORMAT,
        disable_numparse=True,
    )
    return table + "\n"


def format_top_terms(topics: Sequence[Sequence[tuple[str, float]]]) -> str:
    """One row per topic with its terms in rank order."""
    rows = [[str(k), ", ".join(term for term, _ in terms)] for k, terms in enumerate(topics)]
    return tabulate(rows, headers=["topic", "top terms"], tablefmt=TABLE_FORMAT) + "\n"


__all__ = [
    "TABLE_FORMAT",
    "format_eval_report",
    "format_cross_validation",
    "format_comparison",
    "format_top_terms",
]
