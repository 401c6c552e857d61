"""Scoring clusterings against case labels, and the detection/localization experiments."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .clustering import ClusteringResult, bisect_kmeans
from .dataset import (RECEIVER_FEATURES, SEVERITY_LOSSES_DB, Dataset, FeatureMatrix, coarse_label,
                      default_cases, generate_dataset, select_features, severity_cases,
                      span_features, standardize)
from .linkmodel import LinkConfig, Location


def contingency(assignments, labels) -> tuple[np.ndarray, list, list]:
    """Label x cluster count table, with label and cluster orderings."""
    assignments = list(assignments)
    labels = list(labels)
    label_order = list(dict.fromkeys(labels))
    cluster_order = sorted(set(assignments))
    li = {v: i for i, v in enumerate(label_order)}
    ci = {v: i for i, v in enumerate(cluster_order)}
    table = np.zeros((len(label_order), len(cluster_order)), dtype=int)
    for a, lab in zip(assignments, labels):
        table[li[lab], ci[a]] += 1
    return table, label_order, cluster_order


def label_matching_rate(assignments, labels) -> tuple[float, dict]:
    """Fraction of rows agreeing with their label under the best one-to-one
    cluster->label mapping.  Returns ``(rate, mapping)``.
    """
    assignments = list(assignments)
    labels = list(labels)
    if len(assignments) != len(labels):
        raise ValueError("assignments and labels differ in length")
    if not labels:
        raise ValueError("cannot score an empty clustering")
    table, label_order, cluster_order = contingency(assignments, labels)
    rows, cols = linear_sum_assignment(table, maximize=True)
    matched = int(table[rows, cols].sum())
    mapping = {cluster_order[c]: label_order[r] for r, c in zip(rows, cols)}
    return matched / len(labels), mapping


@dataclass
class EvalReport:
    name: str
    feature_subset: list[str]
    k: int
    label_matching_rate: float
    sse_total: float
    n_rows: int
    confusion: np.ndarray
    label_order: list
    cluster_order: list

    @property
    def sse_per_dimension(self) -> float:
        return self.sse_total / len(self.feature_subset)


def evaluate(name: str, matrix: FeatureMatrix, result: ClusteringResult, labels: Sequence,
             mask: np.ndarray | None = None) -> EvalReport:
    """Score ``result``; with ``mask`` only the selected rows are scored."""
    assignments = result.assignments
    labels = list(labels)
    if mask is not None:
        assignments = assignments[mask]
        labels = [lab for lab, keep in zip(labels, mask) if keep]
    rate, _ = label_matching_rate(assignments, labels)
    table, label_order, cluster_order = contingency(assignments, labels)
    return EvalReport(name, list(matrix.feature_subset), result.k, rate, result.total_sse,
                      len(labels), table, label_order, cluster_order)


@dataclass
class PlanRun:
    """Everything a plan produced, kept for point dumps."""

    report: EvalReport
    matrix: FeatureMatrix
    result: ClusteringResult
    labels: list


def run_plan(name: str, dataset: Dataset, features: Sequence[str], k: int, labels: Sequence,
             score_mask: np.ndarray | None = None, log_ber: bool = False) -> PlanRun:
    matrix = standardize(select_features(dataset, features, log_ber=log_ber))
    result = bisect_kmeans(matrix, k)
    return PlanRun(evaluate(name, matrix, result, labels, score_mask), matrix, result, list(labels))


# -- detection ---------------------------------------------------------------

@dataclass
class DetectionRun:
    loss_db: float
    run: PlanRun

    @property
    def report(self) -> EvalReport:
        return self.run.report


def detection_experiment(config: LinkConfig, loss_levels: Sequence[float] = SEVERITY_LOSSES_DB,
                         n_per_case: int = 200, seed: int = 0, log_ber: bool = False) -> list[DetectionRun]:
    """Cluster the no-tap case against a pre-booster tap, receiver features only, k = 2.

    Each loss level reuses the same two case streams, so runs for different
    losses share their noise draws.
    """
    loss_levels = list(loss_levels)
    if not loss_levels:
        raise ValueError("loss_levels must not be empty")
    if any(not loss > 0 for loss in loss_levels):
        raise ValueError("every loss level must be > 0 dB")
    runs = []
    for loss in loss_levels:
        data = generate_dataset(config, severity_cases(loss), n_per_case, seed)
        run = run_plan(f"detect_{loss:g}dB", data, RECEIVER_FEATURES, 2, data.labels, log_ber=log_ber)
        runs.append(DetectionRun(float(loss), run))
    return runs


# -- localization --------------------------------------------------------------

@dataclass(frozen=True)
class Plan:
    """One row of the localization table.

    ``labeler`` maps a dataset to per-row labels for the clustered rows;
    ``rows`` selects which rows are clustered; ``score_rows`` optionally
    restricts which clustered rows are scored.
    """

    name: str
    group: str
    features: tuple[str, ...]
    k: int
    labeler: Callable[[Dataset], list]
    rows: Callable[[Dataset], np.ndarray] | None = None
    score_rows: Callable[[Dataset], np.ndarray] | None = None


def coarse_labels(data: Dataset) -> list[str]:
    return [coarse_label(e) for e in data.events]


def before_booster_labels(data: Dataset) -> list[str]:
    return ["after_booster" if e.location is Location.SPAN else lab
            for lab, e in zip(data.labels, data.events)]


def case_labels(data: Dataset) -> list[str]:
    return list(data.labels)


def after_booster_rows(data: Dataset) -> np.ndarray:
    return np.array([e.location is Location.SPAN for e in data.events])


def span_subset_plans(n_spans: int, size: int) -> list[Plan]:
    """One after-booster plan per ``size``-combination of span powers."""
    plans = []
    for combo in itertools.combinations(range(1, n_spans + 1), size):
        tag = "".join(str(i) for i in combo)
        plans.append(Plan(f"after_spans_{tag}", "after", tuple(f"p_span{i}_dbm" for i in combo),
                          n_spans, case_labels, rows=after_booster_rows))
    return plans


def default_plans(n_spans: int = 4) -> list[Plan]:
    """Rough, before-booster and after-booster plans of the localization table."""
    receiver = tuple(RECEIVER_FEATURES)
    plans = [
        Plan("rough_osnr_ber_prx", "rough", receiver, 3, coarse_labels),
        Plan("rough_osnr_prx", "rough", ("osnr_db", "p_rx_dbm"), 3, coarse_labels),
        Plan("rough_k4_spans", "rough", receiver, 4, case_labels, score_rows=after_booster_rows),
        Plan("before_ptx", "before", receiver + ("p_tx_dbm",), 4, before_booster_labels),
        Plan("before_plink", "before", receiver + ("p_link_dbm",), 4, before_booster_labels),
        Plan("before_osnr_prx_ptx", "before", ("osnr_db", "p_rx_dbm", "p_tx_dbm"), 4, before_booster_labels),
        Plan("after_all_spans", "after", tuple(span_features(n_spans)), n_spans, case_labels,
             rows=after_booster_rows),
    ]
    if n_spans > 1:
        plans += span_subset_plans(n_spans, n_spans - 1)
    return plans


PLAN_GROUPS = ("rough", "before", "after")


def localization_experiment(config: LinkConfig, n_per_case: int = 200, seed: int = 0,
                            plans: Sequence[Plan] | None = None, log_ber: bool = False,
                            loss_db: float = 0.8) -> list[PlanRun]:
    """Run every plan over one shared dataset of the default cases."""
    data = generate_dataset(config, default_cases(config.n_spans, loss_db), n_per_case, seed)
    if plans is None:
        plans = default_plans(config.n_spans)
    runs = []
    for plan in plans:
        sub = data if plan.rows is None else data.subset(plan.rows(data))
        mask = None if plan.score_rows is None else plan.score_rows(sub)
        runs.append(run_plan(plan.name, sub, plan.features, plan.k, plan.labeler(sub), mask, log_ber))
    return runs


# -- serialization -----------------------------------------------------------

def _fmt(x) -> str:
    return f"{x:.17g}"


REPORT_HEADER = ["name", "feature_subset", "k", "n_rows", "label_matching_rate", "sse",
                 "sse_per_dimension"]


def reports_to_csv(reports: Sequence[EvalReport], extra: dict[str, Sequence] | None = None) -> str:
    """Table of reports; ``extra`` prepends named columns (one value per report)."""
    extra = extra or {}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*extra, *REPORT_HEADER])
    for i, r in enumerate(reports):
        writer.writerow([*(_fmt(v[i]) if isinstance(v[i], float) else v[i] for v in extra.values()),
                         r.name, "+".join(r.feature_subset), r.k, r.n_rows,
                         _fmt(r.label_matching_rate), _fmt(r.sse_total), _fmt(r.sse_per_dimension)])
    return buf.getvalue()


def points_to_csv(run: PlanRun) -> str:
    """Standardized features, cluster index and label per row, for plotting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*run.matrix.feature_subset, "cluster", "label"])
    for row, cluster, label in zip(run.matrix.values, run.result.assignments, run.labels):
        writer.writerow([*map(_fmt, row), int(cluster), label])
    return buf.getvalue()
