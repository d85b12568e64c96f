"""Criticality scoring and risk report assembly.

The criticality index combines a problem's frequency in the whole dataset,
its frequency in the context/phenomenon subset under consideration, and
the fraction of its linked phenomena already observed:

    (p_i / n) * (p_ij / n_j) * (1 + c_i_true / c_i)

with two degenerate-input conventions: an empty subset scores 0, and a
problem with no linked phenomena gets association factor 1.
"""

from __future__ import annotations

import enum
import hashlib
import io
import json
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .cegraph import build_graph
from .dataset import (
    ContextFilter,
    Dataset,
    select_subset,
    serialize_dataset,
    summarize,
)
from .errors import InvalidInputs, InvalidThresholds, UnknownPhenomenonId
from .inference import BayesNet, Evidence, infer_all

REPORT_FORMAT = "rerisk-report/1"


class Band(enum.Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


@dataclass(frozen=True)
class Thresholds:
    """Band boundaries: criticality <= low_max is Low, >= high_min is High."""

    low_max: float = 0.05
    high_min: float = 0.20

    def __post_init__(self) -> None:
        if not 0 <= self.low_max < self.high_min:
            raise InvalidThresholds(
                f"need 0 <= low_max < high_min, got ({self.low_max}, {self.high_min})"
            )

    def band(self, value: float) -> Band:
        if value <= self.low_max:
            return Band.LOW
        if value >= self.high_min:
            return Band.HIGH
        return Band.MEDIUM


@dataclass(frozen=True)
class CriticalityInputs:
    p_i: int
    n: int
    p_ij: int
    n_j: int
    c_i: float = 0.0
    c_i_true: float = 0.0


def criticality(inputs: CriticalityInputs) -> float:
    """Evaluate the index; see module docstring for the conventions."""
    if inputs.n <= 0:
        raise InvalidInputs("n must be positive")
    if not 0 <= inputs.p_i <= inputs.n:
        raise InvalidInputs(f"p_i={inputs.p_i} outside 0..n={inputs.n}")
    if not 0 <= inputs.p_ij <= inputs.n_j <= inputs.n:
        raise InvalidInputs(
            f"need 0 <= p_ij <= n_j <= n, got p_ij={inputs.p_ij}, "
            f"n_j={inputs.n_j}, n={inputs.n}"
        )
    if not 0 <= inputs.c_i_true <= inputs.c_i:
        raise InvalidInputs(
            f"need 0 <= c_i_true <= c_i, got c_i_true={inputs.c_i_true}, "
            f"c_i={inputs.c_i}"
        )
    if inputs.n_j == 0:
        return 0.0
    association = 1.0 if inputs.c_i == 0 else 1.0 + inputs.c_i_true / inputs.c_i
    return (inputs.p_i / inputs.n) * (inputs.p_ij / inputs.n_j) * association


@dataclass(frozen=True)
class RiskItem:
    problem: str
    posterior: float
    criticality: float
    band: Band
    contributing_causes: tuple[tuple[str, float], ...]
    predicted_effects: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class RiskReport:
    context: ContextFilter
    observed: tuple[str, ...]
    n: int
    dataset_hash: str
    thresholds: Thresholds
    items: tuple[RiskItem, ...]


def dataset_hash(dataset: Dataset) -> str:
    return "sha256:" + hashlib.sha256(serialize_dataset(dataset)).hexdigest()


def _ranked(pairs: Iterable[tuple[str, float]]) -> tuple[tuple[str, float], ...]:
    return tuple(sorted(pairs, key=lambda kv: (-kv[1], kv[0])))


def assess(
    net: BayesNet,
    dataset: Dataset,
    context: ContextFilter = ContextFilter(),
    observed: Iterable[str] = (),
    weights: Mapping[str, float] | None = None,
    thresholds: Thresholds = Thresholds(),
) -> RiskReport:
    """Assemble the per-problem risk picture for one project situation.

    Posteriors come from the network conditioned on the observed phenomena
    and the set context factors; criticality inputs come from recounting
    the dataset restricted to the same context/observations. Linked
    phenomena of a problem are its cause-effect graph neighbors, weighted
    by `weights` (default 1 each).
    """
    observed = sorted(set(observed))
    for pid in observed:
        if pid not in dataset.by_id:
            raise UnknownPhenomenonId(pid)

    phenomenon_states = {pid: True for pid in observed}
    context_states = {
        factor: value.value
        for factor, value in context.items()
        if factor in net.nodes
    }
    posteriors = infer_all(
        net, Evidence(phenomenon_states=phenomenon_states, context_states=context_states)
    )

    frequencies = summarize(dataset)
    subset = select_subset(dataset, context, observed)
    graph = build_graph(dataset)
    observed_set = set(observed)

    def weight(pid: str) -> float:
        return 1.0 if weights is None else float(weights.get(pid, 1.0))

    items = []
    for problem in dataset.problems():
        if problem.id in graph.nodes:
            cause_side = graph.predecessors[problem.id]
            effect_side = graph.successors[problem.id]
        else:
            cause_side = effect_side = ()
        linked = cause_side + effect_side
        c_i = sum(weight(pid) for pid in linked)
        c_i_true = sum(weight(pid) for pid in linked if pid in observed_set)
        value = criticality(
            CriticalityInputs(
                p_i=frequencies.row(problem.id).total,
                n=dataset.n,
                p_ij=subset.p_ij[problem.id],
                n_j=subset.n_j,
                c_i=c_i,
                c_i_true=c_i_true,
            )
        )
        items.append(
            RiskItem(
                problem=problem.id,
                posterior=posteriors[problem.id],
                criticality=value,
                band=thresholds.band(value),
                contributing_causes=_ranked(
                    (pid, posteriors[pid]) for pid in cause_side
                ),
                predicted_effects=_ranked(
                    (pid, posteriors[pid]) for pid in effect_side
                ),
            )
        )
    items.sort(key=lambda item: (-item.criticality, -item.posterior, item.problem))
    return RiskReport(
        context=context,
        observed=tuple(observed),
        n=dataset.n,
        dataset_hash=dataset_hash(dataset),
        thresholds=thresholds,
        items=tuple(items),
    )


def prioritize(report: RiskReport, thresholds: Thresholds) -> RiskReport:
    """Re-band items with the given thresholds; ordering is untouched."""
    items = tuple(
        replace(item, band=thresholds.band(item.criticality)) for item in report.items
    )
    return replace(report, thresholds=thresholds, items=items)


# --- renderings -------------------------------------------------------------


def report_to_json(report: RiskReport) -> dict:
    return {
        "format": REPORT_FORMAT,
        "context": {
            factor: value.value for factor, value in report.context.items()
        },
        "observed": list(report.observed),
        "dataset": {"n": report.n, "hash": report.dataset_hash},
        "thresholds": {
            "low_max": report.thresholds.low_max,
            "high_min": report.thresholds.high_min,
        },
        "items": [
            {
                "problem": item.problem,
                "posterior": item.posterior,
                "criticality": item.criticality,
                "band": item.band.value,
                "contributing_causes": [
                    {"id": pid, "posterior": p} for pid, p in item.contributing_causes
                ],
                "predicted_effects": [
                    {"id": pid, "posterior": p} for pid, p in item.predicted_effects
                ],
            }
            for item in report.items
        ],
    }


def render_json(report: RiskReport) -> str:
    return json.dumps(report_to_json(report), indent=2) + "\n"


REPORT_CSV_COLUMNS = [
    "problem",
    "criticality",
    "band",
    "posterior",
    "top_causes",
    "top_effects",
]


def render_csv(report: RiskReport) -> str:
    import csv

    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(REPORT_CSV_COLUMNS)
    for item in report.items:
        writer.writerow(
            [
                item.problem,
                repr(item.criticality),
                item.band.value,
                repr(item.posterior),
                ";".join(pid for pid, _ in item.contributing_causes),
                ";".join(pid for pid, _ in item.predicted_effects),
            ]
        )
    return out.getvalue()


def render_text(report: RiskReport) -> str:
    lines = []
    context = ", ".join(
        f"{factor}={value.value}" for factor, value in report.context.items()
    )
    lines.append(f"risk assessment over {report.n} records")
    lines.append(f"context: {context or '(unconstrained)'}")
    lines.append(f"observed: {', '.join(report.observed) or '(none)'}")
    lines.append("")
    width = max((len(item.problem) for item in report.items), default=7)
    header = f"{'problem':<{width}}  {'crit':>8}  {'band':<6}  {'post':>6}"
    lines.append(header)
    lines.append("-" * len(header))
    for item in report.items:
        lines.append(
            f"{item.problem:<{width}}  {item.criticality:>8.4f}  "
            f"{item.band.value:<6}  {item.posterior:>6.3f}"
        )
        for label, pairs in (
            ("causes", item.contributing_causes),
            ("effects", item.predicted_effects),
        ):
            if pairs:
                rendered = ", ".join(f"{pid} ({p:.3f})" for pid, p in pairs[:3])
                lines.append(f"{'':<{width}}    {label}: {rendered}")
    return "\n".join(lines) + "\n"
