"""Network learning, exact inference, the enumeration oracle, serialization."""

from __future__ import annotations

import io
import itertools
import random

import numpy as np
import pytest

from rerisk.dataset import Dataset, Kind, Phenomenon, ProblemReport
from rerisk.errors import (
    CycleDetected,
    EmptyDataset,
    InconsistentEvidence,
    MalformedInput,
    TooLarge,
    UnknownNodeId,
)
from rerisk.inference import (
    BayesNet,
    BayesNode,
    Cpt,
    Evidence,
    LearnConfig,
    NoisyOr,
    enumerate_joint,
    infer_all,
    learn_network,
    load_net,
    net_from_json,
    net_to_json,
    posterior,
    save_net,
    validate_dag,
)

from .conftest import make_catalog, make_record, random_dataset, random_layered_net


def chain_net(p_c=0.3, p_given=0.8, p_not=0.1, e_given=0.6, e_not=0.05) -> BayesNet:
    nodes = {
        "c": BayesNode("c", ("false", "true"), (), Cpt(np.array([1 - p_c, p_c]))),
        "p": BayesNode(
            "p", ("false", "true"), ("c",),
            Cpt(np.array([[1 - p_not, p_not], [1 - p_given, p_given]])),
        ),
        "e": BayesNode(
            "e", ("false", "true"), ("p",),
            Cpt(np.array([[1 - e_not, e_not], [1 - e_given, e_given]])),
        ),
    }
    return BayesNet(nodes=nodes)


class TestParams:
    def test_cpt_rows_must_normalize(self):
        with pytest.raises(MalformedInput):
            Cpt(np.array([0.5, 0.4]))

    def test_noisy_or_bounds(self):
        with pytest.raises(MalformedInput):
            NoisyOr(leak=-0.1, weights=(0.5,))
        with pytest.raises(MalformedInput):
            NoisyOr(leak=0.1, weights=(1.5,))

    def test_noisy_or_needs_binary_node(self):
        with pytest.raises(MalformedInput):
            BayesNode("x", ("a", "b", "c"), (), NoisyOr(leak=0.1, weights=()))

    def test_cpt_shape_checked_against_parents(self):
        root = BayesNode("a", ("false", "true"), (), Cpt(np.array([0.5, 0.5])))
        bad = BayesNode("b", ("false", "true"), ("a",), Cpt(np.array([0.5, 0.5])))
        with pytest.raises(MalformedInput):
            BayesNet(nodes={"a": root, "b": bad})

    def test_unresolved_parent(self):
        node = BayesNode("b", ("false", "true"), ("missing",),
                         Cpt(np.array([[0.5, 0.5], [0.5, 0.5]])))
        with pytest.raises(UnknownNodeId):
            BayesNet(nodes={"b": node})


class TestValidateDag:
    def test_chain_ok(self):
        validate_dag(chain_net())

    def test_cycle_detected_with_witness(self):
        half = Cpt(np.array([[0.5, 0.5], [0.5, 0.5]]))
        nodes = {
            "a": BayesNode("a", ("false", "true"), ("b",), half),
            "b": BayesNode("b", ("false", "true"), ("a",), half),
        }
        with pytest.raises(CycleDetected) as excinfo:
            validate_dag(BayesNet(nodes=nodes))
        assert excinfo.value.cycle == ["a", "b", "a"]

    def test_cycle_with_downstream_leaf(self):
        half = Cpt(np.array([[0.5, 0.5], [0.5, 0.5]]))
        nodes = {
            "a": BayesNode("a", ("false", "true"), ("b",), half),
            "b": BayesNode("b", ("false", "true"), ("a",), half),
            "x": BayesNode("x", ("false", "true"), ("a",), half),
        }
        with pytest.raises(CycleDetected) as excinfo:
            validate_dag(BayesNet(nodes=nodes))
        assert excinfo.value.cycle == ["a", "b", "a"]

    def test_three_cycle_witness_follows_edges(self):
        half = Cpt(np.array([[0.5, 0.5], [0.5, 0.5]]))
        nodes = {
            "a": BayesNode("a", ("false", "true"), ("c",), half),
            "b": BayesNode("b", ("false", "true"), ("a",), half),
            "c": BayesNode("c", ("false", "true"), ("b",), half),
        }
        with pytest.raises(CycleDetected) as excinfo:
            validate_dag(BayesNet(nodes=nodes))
        assert excinfo.value.cycle == ["a", "b", "c", "a"]

    def test_empty_net_ok(self):
        validate_dag(BayesNet(nodes={}))


class TestPosterior:
    def test_root_prior(self):
        net = chain_net(p_c=0.3)
        assert posterior(net, Evidence(), "c", "true") == 0.3

    def test_chain_effect_marginal(self):
        # independent hand computation: P(p)=0.31, P(e)=0.31*0.6+0.69*0.05
        net = chain_net()
        assert posterior(net, Evidence(), "e", "true") == pytest.approx(0.2205, abs=1e-12)
        assert enumerate_joint(net, Evidence(), "e", "true") == pytest.approx(
            0.2205, abs=1e-12
        )

    def test_normalization(self):
        net = chain_net()
        ev = Evidence(phenomenon_states={"c": True})
        total = posterior(net, ev, "e", "true") + posterior(net, ev, "e", "false")
        assert abs(total - 1.0) <= 1e-12

    def test_bool_target_state(self):
        net = chain_net()
        assert posterior(net, Evidence(), "c", True) == 0.3
        assert posterior(net, Evidence(), "c", False) == pytest.approx(0.7)

    def test_target_assigned_rejected(self):
        net = chain_net()
        with pytest.raises(MalformedInput):
            posterior(net, Evidence(phenomenon_states={"c": True}), "c", "true")

    def test_unknown_target(self):
        with pytest.raises(UnknownNodeId):
            posterior(chain_net(), Evidence(), "ghost", "true")

    def test_inconsistent_evidence(self):
        # deterministic CPT: p follows c exactly; c true with p false is impossible
        net = chain_net(p_c=0.5, p_given=1.0, p_not=0.0)
        ev = Evidence(phenomenon_states={"c": True, "p": False})
        with pytest.raises(InconsistentEvidence):
            posterior(net, ev, "e", "true")
        with pytest.raises(InconsistentEvidence):
            enumerate_joint(net, ev, "e", "true")

    def test_elimination_order_independence(self):
        rng = random.Random(23)
        for _ in range(30):
            net = random_layered_net(rng, rng.randint(4, 10))
            ids = list(net.nodes)
            ev_ids = rng.sample(ids, rng.randint(0, len(ids) // 3))
            ev = Evidence(phenomenon_states={i: rng.random() < 0.5 for i in ev_ids})
            target = rng.choice([i for i in ids if i not in ev_ids])
            order_a = [i for i in ids if i != target and i not in ev_ids]
            order_b = list(reversed(order_a))
            rng.shuffle(order_a)
            pa = posterior(net, ev, target, "true", elimination_order=order_a)
            pb = posterior(net, ev, target, "true", elimination_order=order_b)
            pc = posterior(net, ev, target, "true")
            assert abs(pa - pb) <= 1e-9
            assert abs(pa - pc) <= 1e-9


class TestInferAll:
    def test_empty_net(self):
        assert infer_all(BayesNet(nodes={}), Evidence()) == {}

    def test_assigned_nodes_report_zero_or_one(self):
        net = chain_net()
        result = infer_all(net, Evidence(phenomenon_states={"c": True, "e": False}))
        assert result["c"] == 1.0
        assert result["e"] == 0.0

    def test_agrees_with_posterior(self):
        rng = random.Random(31)
        for _ in range(100):
            net = random_layered_net(rng, rng.randint(3, 8))
            ids = list(net.nodes)
            ev_ids = rng.sample(ids, rng.randint(0, len(ids) // 3))
            ev = Evidence(phenomenon_states={i: rng.random() < 0.5 for i in ev_ids})
            result = infer_all(net, ev)
            for node_id in ids:
                if node_id in ev_ids:
                    continue
                assert result[node_id] == posterior(net, ev, node_id, "true")


class TestEnumerateJoint:
    def test_one_node_prior(self):
        net = BayesNet(
            nodes={"x": BayesNode("x", ("false", "true"), (), Cpt(np.array([0.6, 0.4])))}
        )
        assert enumerate_joint(net, Evidence(), "x", "true") == pytest.approx(0.4)

    def test_too_large(self):
        rng = random.Random(1)
        nodes = {}
        for i in range(21):
            nodes[f"x{i:02d}"] = BayesNode(
                f"x{i:02d}", ("false", "true"), (), Cpt(np.array([0.5, 0.5]))
            )
        net = BayesNet(nodes=nodes)
        with pytest.raises(TooLarge):
            enumerate_joint(net, Evidence(), "x00", "true")

    def test_matches_posterior_on_random_dags(self):
        rng = random.Random(47)
        for _ in range(40):
            net = random_layered_net(rng, rng.randint(4, 10))
            ids = list(net.nodes)
            ev_ids = rng.sample(ids, rng.randint(0, len(ids) // 3))
            ev = Evidence(phenomenon_states={i: rng.random() < 0.5 for i in ev_ids})
            for target in ids:
                if target in ev_ids:
                    continue
                assert abs(
                    posterior(net, ev, target, "true")
                    - enumerate_joint(net, ev, target, "true")
                ) <= 1e-9


class TestLearning:
    def ten_record_dataset(self, occurrences=3):
        catalog = make_catalog(n_causes=1, n_problems=1, n_effects=1)
        records = []
        for i in range(10):
            causes = ("cause-0",) if i < occurrences else ()
            report = ProblemReport(
                problem="problem-0", led_to_failure=False, causes=causes
            )
            records.append(make_record(f"r{i}", [report]))
        return Dataset(catalog=catalog, records=tuple(records))

    def test_mle_prior(self):
        dataset = self.ten_record_dataset()
        net = learn_network(dataset, LearnConfig(smoothing_alpha=0.0))
        assert posterior(net, Evidence(), "cause-0", "true") == 0.3

    def test_laplace_prior(self):
        dataset = self.ten_record_dataset()
        net = learn_network(dataset, LearnConfig(smoothing_alpha=1.0))
        assert posterior(net, Evidence(), "cause-0", "true") == pytest.approx(
            (3 + 1) / (10 + 2), abs=1e-15
        )

    def test_empty_dataset_rejected(self):
        dataset = Dataset(catalog=make_catalog(), records=())
        with pytest.raises(EmptyDataset):
            learn_network(dataset)

    def test_fixture_net_is_valid(self, fixture_dataset):
        net = learn_network(fixture_dataset, LearnConfig())
        validate_dag(net)
        for node in net.nodes.values():
            if isinstance(node.params, Cpt):
                sums = node.params.table.sum(axis=-1)
                assert np.all(np.abs(sums - 1.0) <= 1e-12)

    def test_structure_layers(self, fixture_dataset):
        net = learn_network(fixture_dataset, LearnConfig())
        for phenomenon in fixture_dataset.catalog:
            node = net.nodes[phenomenon.id]
            if phenomenon.kind is Kind.CAUSE:
                assert node.parents == ()
            elif phenomenon.kind is Kind.PROBLEM:
                assert node.parents[:3] == (
                    "company_size_band", "distribution", "process_paradigm"
                )
                for parent in node.parents[3:]:
                    assert fixture_dataset.kind_of(parent) is Kind.CAUSE
            else:
                for parent in node.parents:
                    assert fixture_dataset.kind_of(parent) is Kind.PROBLEM

    def test_no_context_nodes(self, fixture_dataset):
        net = learn_network(fixture_dataset, LearnConfig(include_context_nodes=False))
        assert "process_paradigm" not in net.nodes
        for node in net.nodes.values():
            for parent in node.parents:
                assert parent in net.nodes

    def test_max_parents_cap_and_tie_break(self):
        catalog = make_catalog(n_causes=4, n_problems=1, n_effects=0)
        # co-occurrence: cause-0 x3, cause-1 x2, cause-2 x2, cause-3 x1
        counts = {"cause-0": 3, "cause-1": 2, "cause-2": 2, "cause-3": 1}
        records = []
        i = 0
        for cause, times in counts.items():
            for _ in range(times):
                report = ProblemReport(
                    problem="problem-0", led_to_failure=False, causes=(cause,)
                )
                records.append(make_record(f"r{i}", [report]))
                i += 1
        dataset = Dataset(catalog=catalog, records=tuple(records))
        net = learn_network(
            dataset, LearnConfig(max_parents=2, include_context_nodes=False)
        )
        assert net.nodes["problem-0"].parents == ("cause-0", "cause-1")

    def test_parent_cap_one(self, fixture_dataset):
        net = learn_network(
            fixture_dataset, LearnConfig(max_parents=1, include_context_nodes=False)
        )
        for node in net.nodes.values():
            assert len(node.parents) <= 1

    def test_noisy_or_forced(self, fixture_dataset):
        net = learn_network(
            fixture_dataset,
            LearnConfig(parameterization="noisy_or", include_context_nodes=False),
        )
        saw_noisy = False
        for node in net.nodes.values():
            if node.parents:
                assert isinstance(node.params, NoisyOr)
                saw_noisy = True
        assert saw_noisy

    def test_auto_uses_noisy_or_above_four_parents(self, fixture_dataset):
        net = learn_network(
            fixture_dataset,
            LearnConfig(max_parents=8, include_context_nodes=False),
        )
        for node in net.nodes.values():
            if len(node.parents) > 4:
                assert isinstance(node.params, NoisyOr)
            elif node.parents:
                assert isinstance(node.params, Cpt)

    def test_noisy_or_net_matches_oracle(self, fixture_dataset):
        net = learn_network(
            fixture_dataset,
            LearnConfig(parameterization="noisy_or", include_context_nodes=False,
                        max_parents=2),
        )
        # restrict to a small ancestral slice so enumeration stays cheap
        ev = Evidence(phenomenon_states={"missing-direct-communication-to-customer": True})
        target = "communication-flaws-team-customer"
        sub_ids = {"incorrect-or-missing-features", target}
        frontier = list(sub_ids)
        while frontier:
            parents = net.nodes[frontier.pop()].parents
            frontier.extend(p for p in parents if p not in sub_ids)
            sub_ids.update(parents)
        sub = BayesNet(nodes={nid: net.nodes[nid] for nid in net.nodes if nid in sub_ids})
        a = posterior(sub, ev, target, "true")
        b = enumerate_joint(sub, ev, target, "true")
        assert abs(a - b) <= 1e-9

    def test_learn_config_validation(self):
        with pytest.raises(MalformedInput):
            LearnConfig(max_parents=0)
        with pytest.raises(MalformedInput):
            LearnConfig(smoothing_alpha=-0.5)
        with pytest.raises(MalformedInput):
            LearnConfig(parameterization="bogus")

    def test_context_evidence_shifts_posteriors(self, fixture_dataset):
        net = learn_network(fixture_dataset, LearnConfig())
        free = infer_all(net, Evidence())
        constrained = infer_all(
            net, Evidence(context_states={"distribution": "internationally_distributed"})
        )
        assert any(
            abs(free[node_id] - constrained[node_id]) > 1e-6 for node_id in free
        )


class TestSerialization:
    def test_round_trip_preserves_posteriors(self, fixture_dataset):
        net = learn_network(fixture_dataset, LearnConfig())
        again = net_from_json(net_to_json(net))
        ev = Evidence(phenomenon_states={"lack-of-time": True})
        for target in ("time-boxing", "incomplete-hidden-requirements"):
            assert posterior(net, ev, target) == posterior(again, ev, target)

    def test_round_trip_binary_exact(self, fixture_dataset):
        net = learn_network(fixture_dataset, LearnConfig())
        again = net_from_json(net_to_json(net))
        for node_id, node in net.nodes.items():
            other = again.nodes[node_id]
            assert node.states == other.states
            assert node.parents == other.parents
            if isinstance(node.params, Cpt):
                assert np.array_equal(node.params.table, other.params.table)

    def test_save_and_load(self, fixture_dataset):
        net = learn_network(fixture_dataset, LearnConfig(smoothing_alpha=0.5))
        buffer = io.BytesIO()
        save_net(net, buffer)
        buffer.seek(0)
        again = load_net(buffer)
        assert net_to_json(again) == net_to_json(net)

    def test_format_tag_enforced(self):
        with pytest.raises(MalformedInput):
            net_from_json({"format": "other/9", "nodes": []})
