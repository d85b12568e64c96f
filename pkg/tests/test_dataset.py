"""Dataset model, ingestion, summaries, and subsetting."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rerisk.dataset import (
    CauseCategory,
    CompanySizeBand,
    ContextFilter,
    ContextProfile,
    Dataset,
    Distribution,
    Format,
    Kind,
    Phenomenon,
    ProblemReport,
    ProcessParadigm,
    SurveyRecord,
    dataset_to_csv,
    load_dataset,
    select_subset,
    serialize_dataset,
    summarize,
)
from rerisk.errors import (
    DuplicateRank,
    KindMismatch,
    MalformedInput,
    RankOutOfRange,
    UnknownPhenomenonId,
)

from .conftest import DEFAULT_CONTEXT, make_catalog, make_record, random_dataset


class TestModelInvariants:
    def test_phenomenon_rejects_bad_slug(self):
        with pytest.raises(MalformedInput):
            Phenomenon(id="Not A Slug", kind=Kind.CAUSE, label="x")

    def test_category_only_on_causes(self):
        with pytest.raises(MalformedInput):
            Phenomenon(
                id="p", kind=Kind.PROBLEM, label="x", category=CauseCategory.INPUT
            )
        Phenomenon(id="c", kind=Kind.CAUSE, label="x", category=CauseCategory.TOOLS)

    def test_unknown_problem_reference(self):
        report = ProblemReport(problem="nope", led_to_failure=False)
        with pytest.raises(UnknownPhenomenonId) as excinfo:
            Dataset(catalog=make_catalog(), records=(make_record("r1", [report]),))
        assert excinfo.value.record_id == "r1"

    def test_unknown_cause_reference(self):
        report = ProblemReport(
            problem="problem-0", led_to_failure=False, causes=("ghost",)
        )
        with pytest.raises(UnknownPhenomenonId):
            Dataset(catalog=make_catalog(), records=(make_record("r1", [report]),))

    def test_kind_mismatch(self):
        # an effect id used in cause position
        report = ProblemReport(
            problem="problem-0", led_to_failure=False, causes=("effect-0",)
        )
        with pytest.raises(KindMismatch):
            Dataset(catalog=make_catalog(), records=(make_record("r1", [report]),))

    def test_duplicate_rank(self):
        reports = [
            ProblemReport(problem="problem-0", led_to_failure=False, rank=1),
            ProblemReport(problem="problem-1", led_to_failure=False, rank=1),
        ]
        with pytest.raises(DuplicateRank) as excinfo:
            Dataset(catalog=make_catalog(), records=(make_record("r1", reports),))
        assert excinfo.value.record_id == "r1"

    def test_rank_out_of_range(self):
        report = ProblemReport(problem="problem-0", led_to_failure=False, rank=6)
        with pytest.raises(RankOutOfRange):
            Dataset(catalog=make_catalog(), records=(make_record("r1", [report]),))

    def test_repeated_problem_in_record(self):
        reports = [
            ProblemReport(problem="problem-0", led_to_failure=False, rank=1),
            ProblemReport(problem="problem-0", led_to_failure=False, rank=2),
        ]
        with pytest.raises(MalformedInput):
            Dataset(catalog=make_catalog(), records=(make_record("r1", reports),))

    def test_duplicate_cause_entries(self):
        report = ProblemReport(
            problem="problem-0", led_to_failure=False, causes=("cause-0", "cause-0")
        )
        with pytest.raises(MalformedInput):
            Dataset(catalog=make_catalog(), records=(make_record("r1", [report]),))


class TestLoading:
    def test_bundled_fixture_loads(self, fixture_dataset):
        assert fixture_dataset.n == 228

    def test_empty_records_ok(self):
        data = b'{"catalog": [{"id": "p", "kind": "problem", "label": "P"}], "records": []}'
        dataset = load_dataset(data)
        assert dataset.n == 0

    def test_malformed_json(self):
        with pytest.raises(MalformedInput):
            load_dataset(b"{not json")

    def test_missing_context_field(self):
        data = (
            b'{"catalog": [], "records": [{"record_id": "r1", '
            b'"context": {"company_size_band": "micro"}, "problems": []}]}'
        )
        with pytest.raises(MalformedInput) as excinfo:
            load_dataset(data)
        assert excinfo.value.record_id == "r1"

    def test_round_trip_json(self, fixture_dataset):
        again = load_dataset(serialize_dataset(fixture_dataset))
        assert again == fixture_dataset

    def test_round_trip_random_datasets(self):
        rng = random.Random(3)
        for _ in range(10):
            dataset = random_dataset(rng)
            assert load_dataset(serialize_dataset(dataset)) == dataset

    def test_csv_round_trip_of_records(self, fixture_dataset):
        text = dataset_to_csv(fixture_dataset)
        again = load_dataset(text.encode("utf-8"), Format.CSV)
        assert again.n == fixture_dataset.n
        for a, b in zip(again.records, fixture_dataset.records):
            assert a == b

    def test_csv_requires_header(self):
        with pytest.raises(MalformedInput):
            load_dataset(b"", Format.CSV)

    def test_csv_kind_mismatch_across_columns(self):
        rows = (
            "record_id,company_size_band,distribution,process_paradigm,"
            "problem,rank,led_to_failure,causes,effects\n"
            "r1,micro,colocated,agile,p1,1,false,x,\n"
            "r2,micro,colocated,agile,x,1,false,,\n"
        )
        with pytest.raises(KindMismatch):
            load_dataset(rows.encode(), Format.CSV)

    def test_csv_conflicting_context(self):
        rows = (
            "record_id,company_size_band,distribution,process_paradigm,"
            "problem,rank,led_to_failure,causes,effects\n"
            "r1,micro,colocated,agile,p1,1,false,,\n"
            "r1,small,colocated,agile,p2,2,false,,\n"
        )
        with pytest.raises(MalformedInput):
            load_dataset(rows.encode(), Format.CSV)


class TestSummarize:
    def test_table1_shape(self, fixture_dataset):
        table = summarize(fixture_dataset)
        row = table.row("incomplete-hidden-requirements")
        assert (row.total, row.percent, row.failure) == (109, 48, 43)
        assert row.rank_counts == (34, 25, 23, 17, 10)
        row = table.row("communication-flaws-team-customer")
        assert (row.total, row.percent, row.failure) == (93, 41, 45)
        assert row.rank_counts[0] == 36

    def test_empty_dataset_all_zero(self):
        dataset = Dataset(catalog=make_catalog(), records=())
        table = summarize(dataset)
        assert table.n == 0
        for row in table.rows:
            assert row.total == row.percent == row.failure == 0

    def test_permutation_invariance(self):
        rng = random.Random(11)
        dataset = random_dataset(rng, n_records=20)
        shuffled_records = list(dataset.records)
        rng.shuffle(shuffled_records)
        shuffled = Dataset(catalog=dataset.catalog, records=tuple(shuffled_records))
        assert summarize(shuffled) == summarize(dataset)

    @given(count=st.integers(0, 228))
    def test_percent_rounds_half_up(self, count):
        table = summarize(
            Dataset(
                catalog=make_catalog(),
                records=tuple(
                    make_record(
                        f"r{i}",
                        [ProblemReport(problem="problem-0", led_to_failure=False)]
                        if i < count
                        else [],
                    )
                    for i in range(228)
                ),
            )
        )
        from decimal import ROUND_HALF_UP, Decimal

        expected = int(
            (Decimal(100 * count) / Decimal(228)).quantize(0, rounding=ROUND_HALF_UP)
        )
        assert table.row("problem-0").percent == expected


class TestSelectSubset:
    def test_identity_on_empty_filter(self, fixture_dataset):
        view = select_subset(fixture_dataset)
        assert view.n_j == fixture_dataset.n
        table = summarize(fixture_dataset)
        for row in table.rows:
            assert view.p_ij[row.problem] == row.total

    def test_agile_filter_on_synthetic_six(self):
        # 6 records, exactly 2 agile: brute-force expectation n_j = 2
        paradigms = [
            ProcessParadigm.AGILE, ProcessParadigm.PLAN_DRIVEN,
            ProcessParadigm.HYBRID, ProcessParadigm.AGILE,
            ProcessParadigm.PLAN_DRIVEN, ProcessParadigm.HYBRID,
        ]
        records = tuple(
            SurveyRecord(
                record_id=f"r{i}",
                context=ContextProfile(
                    company_size_band=CompanySizeBand.SMALL,
                    distribution=Distribution.COLOCATED,
                    process_paradigm=paradigm,
                ),
                problems=(ProblemReport(problem="problem-0", led_to_failure=False),),
            )
            for i, paradigm in enumerate(paradigms)
        )
        dataset = Dataset(catalog=make_catalog(), records=records)
        view = select_subset(
            dataset, ContextFilter(process_paradigm=ProcessParadigm.AGILE)
        )
        assert view.n_j == 2
        assert view.p_ij["problem-0"] == 2

    def test_absent_phenomenon_gives_empty_subset(self, fixture_dataset):
        # catalog extended with a cause no record mentions
        catalog = fixture_dataset.catalog + (
            Phenomenon(id="never-seen", kind=Kind.CAUSE, label="Never seen"),
        )
        dataset = Dataset(catalog=catalog, records=fixture_dataset.records)
        view = select_subset(dataset, applying_phenomena={"never-seen"})
        assert view.n_j == 0
        assert all(count == 0 for count in view.p_ij.values())

    def test_unknown_phenomenon_rejected(self, fixture_dataset):
        with pytest.raises(UnknownPhenomenonId):
            select_subset(fixture_dataset, applying_phenomena={"no-such-id"})

    def test_monotone_subsetting(self):
        rng = random.Random(5)
        for _ in range(20):
            dataset = random_dataset(rng, n_records=15)
            base = select_subset(dataset, ContextFilter(), set())
            narrowed = select_subset(
                dataset,
                ContextFilter(process_paradigm=ProcessParadigm.AGILE),
                set(),
            )
            assert narrowed.n_j <= base.n_j
            for problem, count in narrowed.p_ij.items():
                assert count <= base.p_ij[problem]
            cause = "cause-0"
            tightened = select_subset(
                dataset,
                ContextFilter(process_paradigm=ProcessParadigm.AGILE),
                {cause},
            )
            assert tightened.n_j <= narrowed.n_j

    def test_brute_force_agreement(self):
        rng = random.Random(9)
        for _ in range(10):
            dataset = random_dataset(rng, n_records=15)
            filt = ContextFilter(distribution=Distribution.COLOCATED)
            applying = {"cause-1"}
            view = select_subset(dataset, filt, applying)
            expected = [
                r for r in dataset.records
                if r.context.distribution is Distribution.COLOCATED
                and applying <= r.phenomena()
            ]
            assert view.n_j == len(expected)
            for problem in view.p_ij:
                assert view.p_ij[problem] == sum(
                    1 for r in expected for rep in r.problems if rep.problem == problem
                )


def test_records_are_immutable(chain_dataset):
    with pytest.raises(AttributeError):
        chain_dataset.records[0].record_id = "other"
