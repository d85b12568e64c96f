"""Shared fixtures: the bundled dataset, tiny hand-built datasets, and
random generators for datasets and layered networks."""

from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from rerisk.dataset import (
    CompanySizeBand,
    ContextProfile,
    Dataset,
    Distribution,
    Kind,
    Phenomenon,
    ProblemReport,
    ProcessParadigm,
    SurveyRecord,
)
from rerisk.fixture import load_fixture
from rerisk.inference import BayesNet, BayesNode, Cpt

DEFAULT_CONTEXT = ContextProfile(
    company_size_band=CompanySizeBand.SMALL,
    distribution=Distribution.COLOCATED,
    process_paradigm=ProcessParadigm.AGILE,
)


@pytest.fixture(scope="session")
def fixture_dataset() -> Dataset:
    return load_fixture()


def make_catalog(n_causes: int = 3, n_problems: int = 2, n_effects: int = 2):
    catalog = [
        Phenomenon(id=f"cause-{i}", kind=Kind.CAUSE, label=f"Cause {i}")
        for i in range(n_causes)
    ]
    catalog += [
        Phenomenon(id=f"problem-{i}", kind=Kind.PROBLEM, label=f"Problem {i}")
        for i in range(n_problems)
    ]
    catalog += [
        Phenomenon(id=f"effect-{i}", kind=Kind.EFFECT, label=f"Effect {i}")
        for i in range(n_effects)
    ]
    return tuple(catalog)


def make_record(record_id: str, problems=(), context: ContextProfile = DEFAULT_CONTEXT):
    return SurveyRecord(record_id=record_id, context=context, problems=tuple(problems))


@pytest.fixture
def chain_dataset() -> Dataset:
    """One record: cause-0 -> problem-0 -> effect-0."""
    report = ProblemReport(
        problem="problem-0", led_to_failure=False,
        causes=("cause-0",), effects=("effect-0",),
    )
    return Dataset(catalog=make_catalog(), records=(make_record("r1", [report]),))


def random_dataset(rng: random.Random, n_records: int = 12,
                   n_causes: int = 4, n_problems: int = 3, n_effects: int = 3) -> Dataset:
    catalog = make_catalog(n_causes, n_problems, n_effects)
    causes = [p.id for p in catalog if p.kind is Kind.CAUSE]
    problems = [p.id for p in catalog if p.kind is Kind.PROBLEM]
    effects = [p.id for p in catalog if p.kind is Kind.EFFECT]
    records = []
    for i in range(n_records):
        chosen = rng.sample(problems, rng.randint(0, min(len(problems), 3)))
        ranks = rng.sample(range(1, 6), len(chosen))
        reports = []
        for problem, rank in zip(chosen, ranks):
            reports.append(
                ProblemReport(
                    problem=problem,
                    rank=rank if rng.random() < 0.8 else None,
                    led_to_failure=rng.random() < 0.3,
                    causes=tuple(rng.sample(causes, rng.randint(0, min(len(causes), 2)))),
                    effects=tuple(rng.sample(effects, rng.randint(0, min(len(effects), 2)))),
                )
            )
        context = ContextProfile(
            company_size_band=rng.choice(list(CompanySizeBand)),
            distribution=rng.choice(list(Distribution)),
            process_paradigm=rng.choice(list(ProcessParadigm)),
        )
        records.append(
            SurveyRecord(record_id=f"r{i}", context=context, problems=tuple(reports))
        )
    return Dataset(catalog=catalog, records=tuple(records))


def random_layered_net(rng: random.Random, n_nodes: int) -> BayesNet:
    """Random three-layer DAG of binary nodes with random CPTs.

    Edges only run from one layer to the next, mirroring the
    cause -> problem -> effect shape of learned networks.
    """
    cut1 = max(1, n_nodes // 3)
    cut2 = max(cut1 + 1, 2 * n_nodes // 3)
    ids = [f"v{i:02d}" for i in range(n_nodes)]
    layers = [ids[:cut1], ids[cut1:cut2], ids[cut2:]]
    nodes: dict[str, BayesNode] = {}
    for layer_index, layer in enumerate(layers):
        previous = layers[layer_index - 1] if layer_index > 0 else []
        for node_id in layer:
            k = rng.randint(0, min(len(previous), 3))
            parents = tuple(sorted(rng.sample(previous, k)))
            table = np.empty((2,) * len(parents) + (2,))
            for key in itertools.product(*([range(2)] * len(parents))):
                p = rng.uniform(0.05, 0.95)
                table[key] = [1.0 - p, p]
            nodes[node_id] = BayesNode(
                id=node_id, states=("false", "true"), parents=parents,
                params=Cpt(table),
            )
    return BayesNet(nodes=nodes)
