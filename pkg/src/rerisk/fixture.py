"""Deterministic construction of the bundled 228-record dataset.

The raw survey data behind the published top-10 problem table is not
disclosed, so the repo bundles a synthetic dataset whose per-problem
marginals (totals, failure counts, rank counts over 228 records) equal the
published table exactly. Causes, effects, and context profiles are filled
in from fixed pools with a seeded RNG; rerunning this module always yields
byte-identical output.

Regenerate with:  python -m rerisk.fixture
"""

from __future__ import annotations

import random
from importlib import resources
from pathlib import Path

from .dataset import (
    CauseCategory,
    CompanySizeBand,
    ContextProfile,
    Dataset,
    Distribution,
    Kind,
    Phenomenon,
    ProblemReport,
    ProcessParadigm,
    SurveyRecord,
    load_dataset,
    serialize_dataset,
    summarize,
)

FIXTURE_NAME = "napire-shaped.json"
N_RECORDS = 228
_SEED = 20150228

# Published per-problem statistics the fixture reproduces exactly:
# (problem id, label, total, failure, rank1..rank5); rank counts sum to total.
PUBLISHED_TOP10 = [
    ("incomplete-hidden-requirements",
     "Incomplete and / or hidden requirements", 109, 43, (34, 25, 23, 17, 10)),
    ("communication-flaws-team-customer",
     "Communication flaws between project team and customer", 93, 45, (36, 22, 15, 9, 11)),
    ("moving-targets",
     "Moving targets (changing goals, business processes and / or requirements)",
     76, 39, (23, 16, 13, 12, 12)),
    ("underspecified-requirements",
     "Underspecified requirements that are too abstract", 76, 28, (10, 17, 18, 19, 12)),
    ("time-boxing",
     "Time boxing / Not enough time in general", 72, 24, (16, 11, 14, 17, 14)),
    ("communication-flaws-within-team",
     "Communication flaws within the project team", 62, 25, (19, 13, 11, 9, 10)),
    ("separating-requirements-from-solutions",
     "Stakeholders with difficulties in separating requirements from known "
     "solution designs", 56, 10, (13, 13, 12, 9, 9)),
    ("insufficient-support-by-customer",
     "Insufficient support by customer", 45, 24, (6, 13, 12, 6, 8)),
    ("inconsistent-requirements",
     "Inconsistent requirements", 44, 15, (8, 9, 6, 9, 12)),
    ("weak-access-to-customer-needs",
     "Weak access to customer needs and / or business information",
     42, 16, (7, 10, 8, 8, 9)),
]

_CAUSES = [
    ("unclear-business-needs", CauseCategory.INPUT, "Unclear business needs"),
    ("volatile-business-domain", CauseCategory.INPUT, "Volatile business domain"),
    ("missing-re-process", CauseCategory.METHOD, "Missing or vague RE process"),
    ("insufficient-elicitation-techniques", CauseCategory.METHOD,
     "Insufficient elicitation techniques"),
    ("missing-direct-communication-to-customer", CauseCategory.ORGANIZATION,
     "Missing direct communication to the customer"),
    ("language-barriers", CauseCategory.ORGANIZATION, "Language barriers"),
    ("lack-of-time", CauseCategory.ORGANIZATION, "Lack of time"),
    ("high-team-distribution", CauseCategory.ORGANIZATION, "High team distribution"),
    ("missing-customer-engagement", CauseCategory.PEOPLE,
     "Missing engagement by the customer"),
    ("lack-of-experience", CauseCategory.PEOPLE, "Lack of experience of RE team members"),
    ("missing-domain-knowledge", CauseCategory.PEOPLE, "Missing domain knowledge"),
    ("missing-tool-support", CauseCategory.TOOLS, "Missing tool support for RE"),
    ("media-breaks-in-toolchain", CauseCategory.TOOLS, "Media breaks in the toolchain"),
]

_EFFECTS = [
    ("incorrect-or-missing-features", "Incorrect or missing features"),
    ("poor-product-quality", "Poorer overall product quality"),
    ("time-overrun", "Time overrun"),
    ("budget-overrun", "Budget overrun"),
    ("additional-rework", "Additional or unplanned rework"),
    ("customer-dissatisfaction", "Customer dissatisfaction"),
    ("team-demotivation", "Demotivated team"),
    ("weak-customer-relationship", "Weakened relationship to the customer"),
]

# First cause in each pool is the dominant one and gets picked most often,
# giving the learned network a clear primary cause per problem.
_POOLS: dict[str, tuple[list[str], list[str]]] = {
    "incomplete-hidden-requirements": (
        ["missing-domain-knowledge", "unclear-business-needs",
         "insufficient-elicitation-techniques", "missing-customer-engagement",
         "lack-of-time"],
        ["incorrect-or-missing-features", "additional-rework", "time-overrun"],
    ),
    "communication-flaws-team-customer": (
        ["missing-direct-communication-to-customer", "language-barriers",
         "missing-customer-engagement", "high-team-distribution"],
        ["incorrect-or-missing-features", "poor-product-quality",
         "customer-dissatisfaction", "weak-customer-relationship"],
    ),
    "moving-targets": (
        ["volatile-business-domain", "unclear-business-needs", "missing-re-process"],
        ["additional-rework", "time-overrun", "budget-overrun", "team-demotivation"],
    ),
    "underspecified-requirements": (
        ["lack-of-experience", "insufficient-elicitation-techniques",
         "missing-domain-knowledge", "lack-of-time"],
        ["incorrect-or-missing-features", "additional-rework", "poor-product-quality"],
    ),
    "time-boxing": (
        ["lack-of-time", "missing-re-process", "unclear-business-needs"],
        ["poor-product-quality", "time-overrun", "team-demotivation"],
    ),
    "communication-flaws-within-team": (
        ["high-team-distribution", "language-barriers", "media-breaks-in-toolchain",
         "missing-tool-support"],
        ["additional-rework", "team-demotivation", "time-overrun"],
    ),
    "separating-requirements-from-solutions": (
        ["missing-domain-knowledge", "lack-of-experience",
         "insufficient-elicitation-techniques"],
        ["incorrect-or-missing-features", "additional-rework"],
    ),
    "insufficient-support-by-customer": (
        ["missing-customer-engagement", "missing-direct-communication-to-customer",
         "unclear-business-needs"],
        ["incorrect-or-missing-features", "customer-dissatisfaction",
         "weak-customer-relationship"],
    ),
    "inconsistent-requirements": (
        ["missing-re-process", "missing-tool-support", "media-breaks-in-toolchain",
         "lack-of-experience"],
        ["additional-rework", "poor-product-quality"],
    ),
    "weak-access-to-customer-needs": (
        ["missing-direct-communication-to-customer", "missing-customer-engagement",
         "high-team-distribution"],
        ["incorrect-or-missing-features", "customer-dissatisfaction"],
    ),
}


def fixture_catalog() -> tuple[Phenomenon, ...]:
    catalog = [
        Phenomenon(id=pid, kind=Kind.CAUSE, label=label, category=category)
        for pid, category, label in _CAUSES
    ]
    catalog += [
        Phenomenon(id=pid, kind=Kind.PROBLEM, label=label)
        for pid, label, *_ in PUBLISHED_TOP10
    ]
    catalog += [Phenomenon(id=pid, kind=Kind.EFFECT, label=label) for pid, label in _EFFECTS]
    return tuple(catalog)


def _pack_ranks() -> list[dict[str, int]]:
    """Assign every (problem, rank) mention to a record slot.

    Greedy with a rotating cursor: each placement scans forward (wrapping)
    for the first record that still has the rank free and does not already
    contain the problem. Spreads mentions evenly and is deterministic.
    Returns, per record, a map problem id -> rank.
    """
    assignments: list[dict[str, int]] = [{} for _ in range(N_RECORDS)]
    used_ranks: list[set[int]] = [set() for _ in range(N_RECORDS)]
    cursor = 0
    for pid, _label, _total, _failure, rank_counts in PUBLISHED_TOP10:
        for rank, count in enumerate(rank_counts, start=1):
            for _ in range(count):
                for step in range(N_RECORDS):
                    slot = (cursor + step) % N_RECORDS
                    if rank not in used_ranks[slot] and pid not in assignments[slot]:
                        assignments[slot][pid] = rank
                        used_ranks[slot].add(rank)
                        cursor = (slot + 1) % N_RECORDS
                        break
                else:
                    raise AssertionError(f"cannot place {pid} rank {rank}")
    return assignments


def build_fixture() -> Dataset:
    """Build the 228-record dataset; marginals equal the published table."""
    rng = random.Random(_SEED)
    assignments = _pack_ranks()

    # led_to_failure: for each problem, flag the required number of its
    # records, sampled without replacement for a natural spread.
    failure_slots: dict[str, set[int]] = {}
    for pid, _label, _total, failure, _ranks in PUBLISHED_TOP10:
        holding = sorted(i for i, a in enumerate(assignments) if pid in a)
        failure_slots[pid] = set(rng.sample(holding, failure))

    records = []
    for slot in range(N_RECORDS):
        reports = []
        for pid, rank in sorted(assignments[slot].items(), key=lambda kv: kv[1]):
            cause_pool, effect_pool = _POOLS[pid]
            causes = [cause_pool[0]] if rng.random() < 0.8 else []
            extra = [c for c in cause_pool if c not in causes]
            causes += rng.sample(extra, k=min(len(extra), rng.randint(0, 2)))
            effects = rng.sample(effect_pool, k=rng.randint(1, min(2, len(effect_pool))))
            if not causes:
                causes = [rng.choice(cause_pool)]
            reports.append(
                ProblemReport(
                    problem=pid,
                    rank=rank,
                    led_to_failure=slot in failure_slots[pid],
                    causes=tuple(sorted(causes)),
                    effects=tuple(sorted(effects)),
                )
            )
        # Context leans on record content: communication problems skew
        # towards distributed work, keeping what-if queries instructive.
        problem_ids = set(assignments[slot])
        communication_heavy = bool(
            problem_ids & {"communication-flaws-team-customer",
                           "communication-flaws-within-team",
                           "weak-access-to-customer-needs"}
        )
        dist_weights = [1, 3, 4] if communication_heavy else [4, 3, 1]
        distribution = rng.choices(list(Distribution), weights=dist_weights)[0]
        size = rng.choices(list(CompanySizeBand), weights=[2, 5, 6, 5, 3])[0]
        paradigm = rng.choices(list(ProcessParadigm), weights=[5, 3, 3])[0]
        records.append(
            SurveyRecord(
                record_id=f"r{slot + 1:03d}",
                context=ContextProfile(
                    company_size_band=size,
                    distribution=distribution,
                    process_paradigm=paradigm,
                ),
                problems=tuple(reports),
            )
        )

    dataset = Dataset(catalog=fixture_catalog(), records=tuple(records))
    _check_marginals(dataset)
    return dataset


def _check_marginals(dataset: Dataset) -> None:
    table = summarize(dataset)
    for pid, _label, total, failure, rank_counts in PUBLISHED_TOP10:
        row = table.row(pid)
        ok = (row.total == total and row.failure == failure
              and row.rank_counts == rank_counts)
        if not ok:
            raise AssertionError(f"fixture marginals diverge for {pid}: {row}")


def fixture_bytes() -> bytes:
    return serialize_dataset(build_fixture())


def fixture_path() -> Path:
    """Path of the bundled dataset file."""
    return Path(str(resources.files("rerisk").joinpath("data", FIXTURE_NAME)))


def load_fixture() -> Dataset:
    return load_dataset(fixture_path().read_bytes())


def main() -> None:
    target = Path(__file__).parent / "data" / FIXTURE_NAME
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(fixture_bytes())
    print(f"wrote {target} ({N_RECORDS} records)")


if __name__ == "__main__":
    main()
