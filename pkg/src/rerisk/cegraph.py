"""Weighted cause-effect graph over phenomena, with DOT/JSON export.

Two edge layers only: cause -> problem and problem -> effect. Edge weight
is the number of records in which the pair co-occurs within the same
problem report. Node order everywhere is (kind, id) with causes first,
then problems, then effects, so exports are byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .dataset import Dataset, Kind
from .errors import MalformedInput, UnknownPhenomenonId

_KIND_ORDER = {Kind.CAUSE: 0, Kind.PROBLEM: 1, Kind.EFFECT: 2}

# Fill used for highlighted nodes in DOT output (documented contract).
HIGHLIGHT_FILL = "#c0c0c0"


@dataclass(frozen=True)
class CauseEffectGraph:
    kinds: Mapping[str, Kind]
    weights: Mapping[tuple[str, str], int]
    successors: Mapping[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)
    predecessors: Mapping[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        succ: dict[str, list[str]] = {node: [] for node in self.kinds}
        pred: dict[str, list[str]] = {node: [] for node in self.kinds}
        for source, target in self.weights:
            succ[source].append(target)
            pred[target].append(source)
        object.__setattr__(
            self, "successors", {n: tuple(sorted(v)) for n, v in succ.items()}
        )
        object.__setattr__(
            self, "predecessors", {n: tuple(sorted(v)) for n, v in pred.items()}
        )

    @property
    def nodes(self) -> set[str]:
        return set(self.kinds)

    def sorted_nodes(self) -> list[str]:
        return sorted(self.kinds, key=lambda n: (_KIND_ORDER[self.kinds[n]], n))

    def sorted_edges(self) -> list[tuple[str, str, int]]:
        return sorted((s, t, w) for (s, t), w in self.weights.items())

    def neighbors(self, node: str) -> tuple[str, ...]:
        """Direct predecessors and successors, sorted."""
        self._require(node)
        return tuple(sorted(set(self.predecessors[node]) | set(self.successors[node])))

    def _require(self, node: str) -> None:
        if node not in self.kinds:
            raise UnknownPhenomenonId(node)


def build_graph(dataset: Dataset) -> CauseEffectGraph:
    """Count pairwise co-occurrences within problem reports.

    Nodes are exactly the phenomena appearing in at least one record.
    """
    kinds: dict[str, Kind] = {}
    weights: dict[tuple[str, str], int] = {}
    for record in dataset.records:
        for report in record.problems:
            kinds[report.problem] = Kind.PROBLEM
            for cause in report.causes:
                kinds[cause] = Kind.CAUSE
                edge = (cause, report.problem)
                weights[edge] = weights.get(edge, 0) + 1
            for effect in report.effects:
                kinds[effect] = Kind.EFFECT
                edge = (report.problem, effect)
                weights[edge] = weights.get(edge, 0) + 1
    return CauseEffectGraph(kinds=kinds, weights=weights)


def _reachable(adjacency: Mapping[str, tuple[str, ...]], start: str) -> set[str]:
    seen: set[str] = set()
    stack = list(adjacency[start])
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        stack.extend(adjacency[node])
    return seen


def downstream(graph: CauseEffectGraph, phenomenon_id: str) -> set[str]:
    """Transitive successors along directed edges."""
    graph._require(phenomenon_id)
    return _reachable(graph.successors, phenomenon_id)


def upstream(graph: CauseEffectGraph, phenomenon_id: str) -> set[str]:
    """Transitive predecessors along directed edges."""
    graph._require(phenomenon_id)
    return _reachable(graph.predecessors, phenomenon_id)


def export_graph(
    graph: CauseEffectGraph, highlight: Iterable[str] = (), format: str = "dot"
) -> str:
    """Deterministic DOT or JSON text with the given nodes highlighted."""
    marked = set(highlight)
    for node in marked:
        graph._require(node)
    if format == "dot":
        return _to_dot(graph, marked)
    if format == "json":
        return _to_json(graph, marked)
    raise ValueError(f"unknown export format {format!r}")


def _to_dot(graph: CauseEffectGraph, marked: set[str]) -> str:
    lines = ["digraph cause_effect {"]
    for node in graph.sorted_nodes():
        attrs = [f'kind="{graph.kinds[node].value}"']
        if node in marked:
            attrs.append('highlight="true"')
            attrs.append("style=filled")
            attrs.append(f'fillcolor="{HIGHLIGHT_FILL}"')
        lines.append(f'  "{node}" [{", ".join(attrs)}];')
    for source, target, weight in graph.sorted_edges():
        lines.append(f'  "{source}" -> "{target}" [label="{weight}", weight={weight}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _to_json(graph: CauseEffectGraph, marked: set[str]) -> str:
    payload = {
        "nodes": [
            {
                "id": node,
                "kind": graph.kinds[node].value,
                "highlight": node in marked,
            }
            for node in graph.sorted_nodes()
        ],
        "edges": [
            {"source": s, "target": t, "weight": w} for s, t, w in graph.sorted_edges()
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def graph_from_json(text: str) -> CauseEffectGraph:
    """Parse the JSON export back into a graph (inverse of export_graph)."""
    try:
        payload = json.loads(text)
        kinds = {node["id"]: Kind(node["kind"]) for node in payload["nodes"]}
        weights = {
            (edge["source"], edge["target"]): int(edge["weight"])
            for edge in payload["edges"]
        }
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"invalid graph JSON: {exc}") from None
    return CauseEffectGraph(kinds=kinds, weights=weights)
