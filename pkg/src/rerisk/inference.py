"""Discrete Bayesian network over phenomenon and context nodes.

Structure is layered and fixed: context factors are roots and condition
every problem node; causes are roots and parents of the problems they
co-occur with; problems are parents of their effects. Parameters are
smoothed relative frequencies (full CPTs) or noisy-OR activations for
binary nodes with many binary parents.

`posterior` answers exact queries by variable elimination with a min-fill
order restricted to the ancestral subgraph of query and evidence;
`enumerate_joint` is the independent full-joint oracle used by the tests.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Sequence, Union

import numpy as np

from .dataset import CONTEXT_FACTORS, Dataset, Kind, SurveyRecord
from .errors import (
    CycleDetected,
    EmptyDataset,
    InconsistentEvidence,
    MalformedInput,
    TooLarge,
    UnknownNodeId,
)

BINARY_STATES = ("false", "true")
NET_FORMAT = "rerisk-net/1"
ENUMERATION_CAP = 2 ** 20
_ROW_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Cpt:
    """Full conditional probability table.

    `table` has one axis per parent (in parent order) plus a final axis
    over the node's own states; every row along that final axis sums to 1.
    """

    table: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", np.asarray(self.table, dtype=float))
        sums = self.table.sum(axis=-1)
        if not np.all(np.abs(sums - 1.0) <= _ROW_TOLERANCE):
            worst = float(np.max(np.abs(sums - 1.0)))
            raise MalformedInput(f"CPT row sums deviate from 1 by {worst:g}")
        if np.any(self.table < 0):
            raise MalformedInput("CPT contains negative probabilities")


@dataclass(frozen=True)
class NoisyOr:
    """Leaky noisy-OR activation parameters, one weight per parent."""

    leak: float
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        values = (self.leak, *self.weights)
        if any(not 0.0 <= v <= 1.0 for v in values):
            raise MalformedInput("noisy-OR leak/weights must lie in [0, 1]")

    def prob_true(self, parent_states: Sequence[int]) -> float:
        """P(node=true | parent assignment), parents indexed 0=false 1=true."""
        stay_off = 1.0 - self.leak
        for weight, state in zip(self.weights, parent_states):
            if state == 1:
                stay_off *= 1.0 - weight
        return 1.0 - stay_off


Params = Union[Cpt, NoisyOr]


@dataclass(frozen=True)
class BayesNode:
    id: str
    states: tuple[str, ...]
    parents: tuple[str, ...]
    params: Params

    def __post_init__(self) -> None:
        if len(self.states) < 2:
            raise MalformedInput(f"node {self.id!r} needs at least 2 states")
        if len(set(self.states)) != len(self.states):
            raise MalformedInput(f"node {self.id!r} has duplicate state labels")
        if isinstance(self.params, NoisyOr):
            if self.states != BINARY_STATES:
                raise MalformedInput(f"noisy-OR node {self.id!r} must be binary")
            if len(self.params.weights) != len(self.parents):
                raise MalformedInput(
                    f"noisy-OR node {self.id!r}: one weight per parent required"
                )

    @property
    def is_binary(self) -> bool:
        return self.states == BINARY_STATES

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise MalformedInput(
                f"node {self.id!r} has no state {state!r}"
            ) from None


@dataclass(frozen=True)
class BayesNet:
    nodes: Mapping[str, BayesNode]

    def __post_init__(self) -> None:
        for node in self.nodes.values():
            for parent in node.parents:
                if parent not in self.nodes:
                    raise UnknownNodeId(parent)
            if isinstance(node.params, Cpt):
                expected = tuple(len(self.nodes[p].states) for p in node.parents) + (
                    len(node.states),
                )
                if node.params.table.shape != expected:
                    raise MalformedInput(
                        f"node {node.id!r}: CPT shape {node.params.table.shape} "
                        f"does not match parents, expected {expected}"
                    )

    def node(self, node_id: str) -> BayesNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeId(node_id) from None

    def card(self, node_id: str) -> int:
        return len(self.node(node_id).states)

    def children(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {node_id: [] for node_id in self.nodes}
        for node in self.nodes.values():
            for parent in node.parents:
                out[parent].append(node.id)
        return out


@dataclass(frozen=True)
class Evidence:
    """Partial assignment: booleans for phenomena, state labels for context."""

    phenomenon_states: Mapping[str, bool] = field(default_factory=dict)
    context_states: Mapping[str, str] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not self.phenomenon_states and not self.context_states


def _evidence_indices(net: BayesNet, evidence: Evidence) -> dict[str, int]:
    """Resolve evidence to state indices; reject double assignment."""
    assigned: dict[str, int] = {}
    for node_id, value in evidence.phenomenon_states.items():
        node = net.node(node_id)
        if not node.is_binary:
            raise MalformedInput(
                f"node {node_id!r} is not a binary phenomenon node"
            )
        assigned[node_id] = 1 if value else 0
    for node_id, state in evidence.context_states.items():
        if node_id in assigned:
            raise MalformedInput(f"node {node_id!r} assigned twice in evidence")
        node = net.node(node_id)
        assigned[node_id] = node.state_index(state)
    return assigned


# --- DAG validation -------------------------------------------------------


def validate_dag(net: BayesNet) -> None:
    """Raise CycleDetected (with a witness cycle) unless a topological order exists."""
    indegree = {node_id: len(net.nodes[node_id].parents) for node_id in net.nodes}
    children = net.children()
    queue = sorted(node_id for node_id, deg in indegree.items() if deg == 0)
    done = 0
    while queue:
        node_id = queue.pop(0)
        done += 1
        for child in children[node_id]:
            indegree[child] -= 1
            if indegree[child] == 0:
                queue.append(child)
    if done == len(net.nodes):
        return
    # Witness: walk parents within the remaining set (every remaining node
    # has one) until a node repeats, then report the loop in edge direction.
    remaining = {node_id for node_id, deg in indegree.items() if deg > 0}
    start = min(remaining)
    path, seen = [start], {start}
    while True:
        predecessors = sorted(
            p for p in net.nodes[path[-1]].parents if p in remaining
        )
        nxt = predecessors[0]
        if nxt in seen:
            backward = path[path.index(nxt):] + [nxt]
            raise CycleDetected(list(reversed(backward)))
        path.append(nxt)
        seen.add(nxt)


def topological_order(net: BayesNet) -> list[str]:
    validate_dag(net)
    order: list[str] = []
    placed: set[str] = set()
    pending = list(net.nodes)
    while pending:
        rest = []
        for node_id in pending:
            if all(p in placed for p in net.nodes[node_id].parents):
                order.append(node_id)
                placed.add(node_id)
            else:
                rest.append(node_id)
        pending = rest
    return order


# --- factors and variable elimination -------------------------------------


@dataclass(frozen=True)
class _Factor:
    vars: tuple[str, ...]
    values: np.ndarray

    def reduce(self, var: str, state: int) -> "_Factor":
        axis = self.vars.index(var)
        return _Factor(
            self.vars[:axis] + self.vars[axis + 1:],
            np.take(self.values, state, axis=axis),
        )

    def sum_out(self, var: str) -> "_Factor":
        axis = self.vars.index(var)
        return _Factor(
            self.vars[:axis] + self.vars[axis + 1:], self.values.sum(axis=axis)
        )

    def multiply(self, other: "_Factor") -> "_Factor":
        vars_out = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return _Factor(
            vars_out,
            _aligned(self, vars_out) * _aligned(other, vars_out),
        )


def _aligned(factor: _Factor, vars_out: tuple[str, ...]) -> np.ndarray:
    positions = [vars_out.index(v) for v in factor.vars]
    perm = sorted(range(len(factor.vars)), key=lambda i: positions[i])
    arr = np.transpose(factor.values, perm)
    shape = [1] * len(vars_out)
    for i in perm:
        shape[positions[i]] = factor.values.shape[i]
    return arr.reshape(shape)


def _node_factor(net: BayesNet, node: BayesNode) -> _Factor:
    scope = node.parents + (node.id,)
    if isinstance(node.params, Cpt):
        return _Factor(scope, node.params.table)
    stay_off = np.full((), 1.0 - node.params.leak)
    for weight in node.params.weights:
        stay_off = np.multiply.outer(stay_off, np.array([1.0, 1.0 - weight]))
    p_false = np.broadcast_to(
        stay_off, tuple(net.card(p) for p in node.parents)
    )
    return _Factor(scope, np.stack([p_false, 1.0 - p_false], axis=-1))


def _ancestral_closure(net: BayesNet, seed: Iterable[str]) -> set[str]:
    closure: set[str] = set()
    stack = list(seed)
    while stack:
        node_id = stack.pop()
        if node_id in closure:
            continue
        closure.add(node_id)
        stack.extend(net.nodes[node_id].parents)
    return closure


def _min_fill_order(scopes: list[set[str]], keep: set[str]) -> list[str]:
    """Greedy min-fill elimination order over the factor interaction graph."""
    neighbors: dict[str, set[str]] = {}
    for scope in scopes:
        for var in scope:
            neighbors.setdefault(var, set()).update(scope - {var})
    to_eliminate = {v for v in neighbors if v not in keep}
    order = []
    while to_eliminate:
        best_var, best_fill = None, None
        for var in sorted(to_eliminate):
            around = [u for u in neighbors[var] if u != var]
            fill = sum(
                1
                for a, b in itertools.combinations(around, 2)
                if b not in neighbors[a]
            )
            if best_fill is None or fill < best_fill:
                best_var, best_fill = var, fill
        assert best_var is not None
        around = neighbors.pop(best_var)
        for a, b in itertools.combinations(sorted(around), 2):
            neighbors[a].add(b)
            neighbors[b].add(a)
        for u in around:
            neighbors[u].discard(best_var)
        order.append(best_var)
        to_eliminate.remove(best_var)
    return order


def _eliminate(
    factors: list[_Factor], order: Sequence[str]
) -> list[_Factor]:
    current = list(factors)
    for var in order:
        related = [f for f in current if var in f.vars]
        if not related:
            continue
        product = related[0]
        for f in related[1:]:
            product = product.multiply(f)
        current = [f for f in current if var not in f.vars]
        current.append(product.sum_out(var))
    return current


def _marginal(
    net: BayesNet, assigned: dict[str, int], target: str,
    order: Sequence[str] | None = None,
) -> np.ndarray:
    """Unnormalized distribution over the target's states given evidence."""
    relevant = _ancestral_closure(net, [target, *assigned])
    factors = []
    for node_id in relevant:
        factor = _node_factor(net, net.nodes[node_id])
        for var in factor.vars:
            if var in assigned:
                factor = factor.reduce(var, assigned[var])
        factors.append(factor)
    if order is None:
        order = _min_fill_order([set(f.vars) for f in factors], keep={target})
    else:
        order = [v for v in order if v in relevant and v != target and v not in assigned]
    remaining = _eliminate(factors, order)
    leftover = sorted(
        {v for f in remaining for v in f.vars if v != target}
    )
    if leftover:  # a caller-supplied order may be partial
        remaining = _eliminate(remaining, leftover)
    result = _Factor((), np.array(1.0))
    for factor in remaining:
        result = result.multiply(factor)
    if result.vars != (target,):
        result = _Factor(
            (target,), np.broadcast_to(result.values, (net.card(target),)).copy()
        )
    return np.asarray(result.values, dtype=float)


def posterior(
    net: BayesNet,
    evidence: Evidence,
    target: str,
    target_state: str | bool = "true",
    elimination_order: Sequence[str] | None = None,
) -> float:
    """Exact P(target = target_state | evidence) by variable elimination.

    `elimination_order` overrides the min-fill order (results are identical
    for any valid order; the hook exists for the order-independence tests).
    """
    node = net.node(target)
    if isinstance(target_state, bool):
        target_state = BINARY_STATES[int(target_state)]
    state_idx = node.state_index(target_state)
    assigned = _evidence_indices(net, evidence)
    if target in assigned:
        raise MalformedInput(f"target {target!r} is assigned in evidence")
    marginal = _marginal(net, assigned, target, order=elimination_order)
    normalizer = float(marginal.sum())
    if normalizer <= 0.0:
        raise InconsistentEvidence(
            f"evidence has probability 0 (query target {target!r})"
        )
    return float(marginal[state_idx] / normalizer)


def infer_all(net: BayesNet, evidence: Evidence) -> dict[str, float]:
    """P(node=true | evidence) for every binary node; assigned nodes give 0/1."""
    assigned = _evidence_indices(net, evidence)
    result: dict[str, float] = {}
    for node_id, node in net.nodes.items():
        if not node.is_binary:
            continue
        if node_id in assigned:
            result[node_id] = float(assigned[node_id])
        else:
            result[node_id] = posterior(net, evidence, node_id, "true")
    return result


def enumerate_joint(
    net: BayesNet,
    evidence: Evidence,
    target: str,
    target_state: str | bool = "true",
) -> float:
    """Oracle: P(target=state | evidence) by summing the full joint.

    Walks every assignment of the unobserved variables and multiplies raw
    node parameters; shares no code with the elimination path.
    """
    space = 1
    for node_id in net.nodes:
        space *= net.card(node_id)
        if space > ENUMERATION_CAP:
            raise TooLarge(
                f"joint state space exceeds {ENUMERATION_CAP} configurations"
            )
    node = net.node(target)
    if isinstance(target_state, bool):
        target_state = BINARY_STATES[int(target_state)]
    state_idx = node.state_index(target_state)
    assigned = _evidence_indices(net, evidence)
    if target in assigned:
        raise MalformedInput(f"target {target!r} is assigned in evidence")

    free = [node_id for node_id in net.nodes if node_id not in assigned]
    node_list = list(net.nodes.values())
    numerator = 0.0
    denominator = 0.0
    for combo in itertools.product(*(range(net.card(v)) for v in free)):
        assignment = dict(assigned)
        assignment.update(zip(free, combo))
        prob = 1.0
        for n in node_list:
            parent_states = [assignment[p] for p in n.parents]
            if isinstance(n.params, Cpt):
                prob *= float(n.params.table[tuple(parent_states) + (assignment[n.id],)])
            else:
                p_true = n.params.prob_true(parent_states)
                prob *= p_true if assignment[n.id] == 1 else 1.0 - p_true
            if prob == 0.0:
                break
        denominator += prob
        if assignment[target] == state_idx:
            numerator += prob
    if denominator <= 0.0:
        raise InconsistentEvidence(
            f"evidence has probability 0 (query target {target!r})"
        )
    return numerator / denominator


# --- learning --------------------------------------------------------------


_PARAMETERIZATIONS = ("auto", "full_cpt", "noisy_or")
_NOISY_OR_PARENT_LIMIT = 4


@dataclass(frozen=True)
class LearnConfig:
    """Knobs for structure capping and parameter smoothing.

    parameterization "auto" uses noisy-OR for binary nodes with more than
    four all-binary parents and full CPTs otherwise; nodes with a
    multi-state parent (problems conditioned on context) always use a CPT.
    """

    max_parents: int = 4
    smoothing_alpha: float = 1.0
    parameterization: str = "auto"
    include_context_nodes: bool = True

    def __post_init__(self) -> None:
        if self.max_parents < 1:
            raise MalformedInput("max_parents must be >= 1")
        if self.smoothing_alpha < 0:
            raise MalformedInput("smoothing_alpha must be >= 0")
        if self.parameterization not in _PARAMETERIZATIONS:
            raise MalformedInput(
                f"parameterization must be one of {_PARAMETERIZATIONS}"
            )

    def to_json(self) -> dict:
        return {
            "max_parents": self.max_parents,
            "smoothing_alpha": self.smoothing_alpha,
            "parameterization": self.parameterization,
            "include_context_nodes": self.include_context_nodes,
        }


def _smoothed(count: int, total: int, alpha: float, n_states: int) -> float:
    """(count + alpha) / (total + alpha * n_states); uniform when undefined."""
    denominator = total + alpha * n_states
    if denominator == 0:
        return 1.0 / n_states
    return (count + alpha) / denominator


def _binary_row(p_true: float) -> list[float]:
    # complement via 1.0 - p so the pair sums to exactly 1.0 in floats
    return [1.0 - p_true, p_true]


def _co_occurrence(dataset: Dataset) -> tuple[dict[str, dict[str, int]], dict[str, dict[str, int]]]:
    """Per problem: cause co-counts; per effect: problem co-counts."""
    cause_counts: dict[str, dict[str, int]] = {}
    effect_counts: dict[str, dict[str, int]] = {}
    for record in dataset.records:
        for report in record.problems:
            for cause in report.causes:
                per = cause_counts.setdefault(report.problem, {})
                per[cause] = per.get(cause, 0) + 1
            for effect in report.effects:
                per = effect_counts.setdefault(effect, {})
                per[report.problem] = per.get(report.problem, 0) + 1
    return cause_counts, effect_counts


def _cap_parents(counts: dict[str, int], cap: int) -> tuple[str, ...]:
    """Keep the highest co-occurrence parents, ties broken by id."""
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return tuple(pid for pid, _ in ranked[:cap])


def _wants_noisy_or(config: LearnConfig, n_parents: int) -> bool:
    if config.parameterization == "full_cpt":
        return False
    if config.parameterization == "noisy_or":
        return n_parents >= 1
    return n_parents > _NOISY_OR_PARENT_LIMIT


def learn_network(dataset: Dataset, config: LearnConfig = LearnConfig()) -> BayesNet:
    """Fit the layered network to the dataset.

    Nodes cover every catalog phenomenon (binary: occurs / does not occur)
    plus, optionally, one node per context factor. Zero-count cells are
    handled by Laplace smoothing, or by a uniform-row convention when
    smoothing_alpha is 0 and a parent configuration was never observed.
    """
    if dataset.n == 0:
        raise EmptyDataset("cannot learn from an empty dataset")
    alpha = config.smoothing_alpha
    occurrences: list[set[str]] = [record.phenomena() for record in dataset.records]
    cause_counts, effect_counts = _co_occurrence(dataset)

    nodes: dict[str, BayesNode] = {}

    def record_state(record: SurveyRecord, occurring: set[str], node_id: str) -> int:
        if node_id in CONTEXT_FACTORS:
            return list(CONTEXT_FACTORS[node_id]).index(record.context.value_of(node_id))
        return 1 if node_id in occurring else 0

    def learn_cpt(child: str, parents: tuple[str, ...], states: tuple[str, ...]) -> Cpt:
        parent_cards = tuple(len(nodes[p].states) for p in parents)
        counts: dict[tuple[int, ...], list[int]] = {}
        for record, occurring in zip(dataset.records, occurrences):
            key = tuple(record_state(record, occurring, p) for p in parents)
            row = counts.setdefault(key, [0] * len(states))
            row[record_state(record, occurring, child)] += 1
        table = np.empty(parent_cards + (len(states),), dtype=float)
        for key in itertools.product(*(range(c) for c in parent_cards)):
            row = counts.get(key, [0] * len(states))
            total = sum(row)
            if states == BINARY_STATES:
                table[key] = _binary_row(_smoothed(row[1], total, alpha, 2))
            else:
                table[key] = [
                    _smoothed(c, total, alpha, len(states)) for c in row
                ]
        return Cpt(table)

    def learn_noisy_or(child: str, parents: tuple[str, ...]) -> NoisyOr:
        leak_true = leak_total = 0
        only: dict[str, list[int]] = {p: [0, 0] for p in parents}
        for record, occurring in zip(dataset.records, occurrences):
            active = [p for p in parents if p in occurring]
            child_true = child in occurring
            if not active:
                leak_total += 1
                leak_true += child_true
            elif len(active) == 1:
                only[active[0]][0] += 1
                only[active[0]][1] += child_true
        leak = _smoothed(leak_true, leak_total, alpha, 2)
        weights = tuple(
            _smoothed(only[p][1], only[p][0], alpha, 2) for p in parents
        )
        return NoisyOr(leak=leak, weights=weights)

    # context roots
    if config.include_context_nodes:
        for factor, enum_type in CONTEXT_FACTORS.items():
            states = tuple(member.value for member in enum_type)
            tallies = [0] * len(states)
            for record in dataset.records:
                tallies[list(enum_type).index(record.context.value_of(factor))] += 1
            row = [_smoothed(c, dataset.n, alpha, len(states)) for c in tallies]
            nodes[factor] = BayesNode(
                id=factor, states=states, parents=(), params=Cpt(np.array(row))
            )

    context_parents = tuple(CONTEXT_FACTORS) if config.include_context_nodes else ()
    causes = [p.id for p in dataset.catalog if p.kind is Kind.CAUSE]
    problems = [p.id for p in dataset.catalog if p.kind is Kind.PROBLEM]
    effects = [p.id for p in dataset.catalog if p.kind is Kind.EFFECT]

    for cause in causes:
        count = sum(1 for occurring in occurrences if cause in occurring)
        p_true = _smoothed(count, dataset.n, alpha, 2)
        nodes[cause] = BayesNode(
            id=cause, states=BINARY_STATES, parents=(),
            params=Cpt(np.array(_binary_row(p_true))),
        )

    for problem in problems:
        phenomenon_parents = _cap_parents(
            cause_counts.get(problem, {}), config.max_parents
        )
        parents = context_parents + phenomenon_parents
        if _wants_noisy_or(config, len(phenomenon_parents)) and not context_parents:
            params: Params = learn_noisy_or(problem, phenomenon_parents)
        else:
            params = learn_cpt(problem, parents, BINARY_STATES)
        nodes[problem] = BayesNode(
            id=problem, states=BINARY_STATES, parents=parents, params=params
        )

    for effect in effects:
        parents = _cap_parents(effect_counts.get(effect, {}), config.max_parents)
        if _wants_noisy_or(config, len(parents)):
            params = learn_noisy_or(effect, parents)
        elif parents:
            params = learn_cpt(effect, parents, BINARY_STATES)
        else:
            count = sum(1 for occurring in occurrences if effect in occurring)
            params = Cpt(np.array(_binary_row(_smoothed(count, dataset.n, alpha, 2))))
        nodes[effect] = BayesNode(
            id=effect, states=BINARY_STATES, parents=parents, params=params
        )

    net = BayesNet(nodes=nodes)
    validate_dag(net)
    return net


# --- serialization ----------------------------------------------------------


def net_to_json(net: BayesNet) -> dict:
    nodes = []
    for node in net.nodes.values():
        if isinstance(node.params, Cpt):
            params = {"type": "cpt", "table": node.params.table.tolist()}
        else:
            params = {
                "type": "noisy_or",
                "leak": node.params.leak,
                "weights": list(node.params.weights),
            }
        nodes.append(
            {
                "id": node.id,
                "states": list(node.states),
                "parents": list(node.parents),
                "params": params,
            }
        )
    return {"format": NET_FORMAT, "nodes": nodes}


def net_from_json(obj: dict) -> BayesNet:
    if obj.get("format") != NET_FORMAT:
        raise MalformedInput(
            f"unsupported net format {obj.get('format')!r}, expected {NET_FORMAT!r}"
        )
    nodes: dict[str, BayesNode] = {}
    for entry in obj["nodes"]:
        raw = entry["params"]
        params: Params
        if raw["type"] == "cpt":
            params = Cpt(np.array(raw["table"], dtype=float))
        elif raw["type"] == "noisy_or":
            params = NoisyOr(leak=raw["leak"], weights=tuple(raw["weights"]))
        else:
            raise MalformedInput(f"unknown params type {raw['type']!r}")
        nodes[entry["id"]] = BayesNode(
            id=entry["id"],
            states=tuple(entry["states"]),
            parents=tuple(entry["parents"]),
            params=params,
        )
    net = BayesNet(nodes=nodes)
    validate_dag(net)
    return net


def save_net(net: BayesNet, sink: IO[bytes]) -> None:
    sink.write(json.dumps(net_to_json(net), indent=2).encode("utf-8"))


def load_net(source: IO[bytes]) -> BayesNet:
    try:
        obj = json.loads(source.read().decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"invalid net JSON: {exc}") from None
    return net_from_json(obj)
