"""Cross-company survey data model: phenomena catalog, records, summaries.

A dataset couples a catalog of phenomena (causes, problems, effects) with
per-company records, each reporting up to five ranked problems together
with the causes and effects the respondent linked to them. Everything is
immutable after load; views never copy records.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from .errors import (
    DuplicateRank,
    KindMismatch,
    MalformedInput,
    RankOutOfRange,
    UnknownPhenomenonId,
)

MAX_PROBLEMS_PER_RECORD = 5


class Kind(enum.Enum):
    CAUSE = "cause"
    PROBLEM = "problem"
    EFFECT = "effect"


class CauseCategory(enum.Enum):
    INPUT = "input"
    METHOD = "method"
    ORGANIZATION = "organization"
    PEOPLE = "people"
    TOOLS = "tools"


class CompanySizeBand(enum.Enum):
    """Company size bands: <=10, 11-50, 51-250, 251-2000, >2000 employees."""

    MICRO = "micro"
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"
    VERY_LARGE = "very_large"


class Distribution(enum.Enum):
    COLOCATED = "colocated"
    NATIONALLY_DISTRIBUTED = "nationally_distributed"
    INTERNATIONALLY_DISTRIBUTED = "internationally_distributed"


class ProcessParadigm(enum.Enum):
    AGILE = "agile"
    PLAN_DRIVEN = "plan_driven"
    HYBRID = "hybrid"


CONTEXT_FACTORS: dict[str, type[enum.Enum]] = {
    "company_size_band": CompanySizeBand,
    "distribution": Distribution,
    "process_paradigm": ProcessParadigm,
}

_SLUG_CHARS = set("abcdefghijklmnopqrstuvwxyz0123456789-")


def _check_slug(phenomenon_id: str) -> None:
    if not phenomenon_id or not set(phenomenon_id) <= _SLUG_CHARS:
        raise MalformedInput(
            f"phenomenon id {phenomenon_id!r} is not a slug over [a-z0-9-]",
            field="id",
        )


@dataclass(frozen=True)
class Phenomenon:
    """One observable event: a cause, problem, or effect."""

    id: str
    kind: Kind
    label: str
    category: CauseCategory | None = None

    def __post_init__(self) -> None:
        _check_slug(self.id)
        if self.category is not None and self.kind is not Kind.CAUSE:
            raise MalformedInput(
                f"category set on non-cause phenomenon {self.id!r}", field="category"
            )


@dataclass(frozen=True)
class ContextProfile:
    """Full context assignment: every factor set."""

    company_size_band: CompanySizeBand
    distribution: Distribution
    process_paradigm: ProcessParadigm

    def value_of(self, factor: str) -> enum.Enum:
        return getattr(self, factor)


@dataclass(frozen=True)
class ContextFilter:
    """Partial context assignment; unset fields are unconstrained."""

    company_size_band: CompanySizeBand | None = None
    distribution: Distribution | None = None
    process_paradigm: ProcessParadigm | None = None

    def matches(self, profile: ContextProfile) -> bool:
        for factor in CONTEXT_FACTORS:
            wanted = getattr(self, factor)
            if wanted is not None and getattr(profile, factor) is not wanted:
                return False
        return True

    def items(self) -> list[tuple[str, enum.Enum]]:
        """Set (factor, value) pairs, in canonical factor order."""
        return [
            (factor, getattr(self, factor))
            for factor in CONTEXT_FACTORS
            if getattr(self, factor) is not None
        ]


EMPTY_FILTER = ContextFilter()


@dataclass(frozen=True)
class ProblemReport:
    """One reported problem within a record, with linked causes/effects."""

    problem: str
    led_to_failure: bool
    causes: tuple[str, ...] = ()
    effects: tuple[str, ...] = ()
    rank: int | None = None


@dataclass(frozen=True)
class SurveyRecord:
    """One company's response: context plus up to five ranked problems."""

    record_id: str
    context: ContextProfile
    problems: tuple[ProblemReport, ...] = ()

    def phenomena(self) -> set[str]:
        """All phenomenon ids appearing anywhere in this record."""
        ids: set[str] = set()
        for report in self.problems:
            ids.add(report.problem)
            ids.update(report.causes)
            ids.update(report.effects)
        return ids


@dataclass(frozen=True)
class Dataset:
    catalog: tuple[Phenomenon, ...]
    records: tuple[SurveyRecord, ...]
    by_id: Mapping[str, Phenomenon] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "by_id", {p.id: p for p in self.catalog})
        _validate(self.catalog, self.records, self.by_id)

    @property
    def n(self) -> int:
        return len(self.records)

    def problems(self) -> list[Phenomenon]:
        return [p for p in self.catalog if p.kind is Kind.PROBLEM]

    def kind_of(self, phenomenon_id: str) -> Kind:
        try:
            return self.by_id[phenomenon_id].kind
        except KeyError:
            raise UnknownPhenomenonId(phenomenon_id) from None


def _validate(
    catalog: Iterable[Phenomenon],
    records: Iterable[SurveyRecord],
    by_id: Mapping[str, Phenomenon],
) -> None:
    seen: set[str] = set()
    for phenomenon in catalog:
        if phenomenon.id in seen:
            raise MalformedInput(f"duplicate catalog id {phenomenon.id!r}", field="id")
        seen.add(phenomenon.id)

    def check_ref(pid: str, expected: Kind, record_id: str, fld: str) -> None:
        phenomenon = by_id.get(pid)
        if phenomenon is None:
            raise UnknownPhenomenonId(pid, record_id=record_id, field=fld)
        if phenomenon.kind is not expected:
            raise KindMismatch(
                pid, expected.value, phenomenon.kind.value, record_id=record_id, field=fld
            )

    for record in records:
        if len(record.problems) > MAX_PROBLEMS_PER_RECORD:
            raise MalformedInput(
                f"record {record.record_id!r} reports more than "
                f"{MAX_PROBLEMS_PER_RECORD} problems",
                record_id=record.record_id,
                field="problems",
            )
        ranks_seen: set[int] = set()
        problems_seen: set[str] = set()
        for idx, report in enumerate(record.problems):
            fld = f"problems[{idx}]"
            check_ref(report.problem, Kind.PROBLEM, record.record_id, f"{fld}.problem")
            if report.problem in problems_seen:
                raise MalformedInput(
                    f"problem {report.problem!r} repeated in record {record.record_id!r}",
                    record_id=record.record_id,
                    field=f"{fld}.problem",
                )
            problems_seen.add(report.problem)
            if report.rank is not None:
                if not 1 <= report.rank <= 5:
                    raise RankOutOfRange(record.record_id, report.rank)
                if report.rank in ranks_seen:
                    raise DuplicateRank(record.record_id, report.rank)
                ranks_seen.add(report.rank)
            for lst, kind, name in (
                (report.causes, Kind.CAUSE, "causes"),
                (report.effects, Kind.EFFECT, "effects"),
            ):
                if len(set(lst)) != len(lst):
                    raise MalformedInput(
                        f"duplicate {name} entry in record {record.record_id!r}",
                        record_id=record.record_id,
                        field=f"{fld}.{name}",
                    )
                for pid in lst:
                    check_ref(pid, kind, record.record_id, f"{fld}.{name}")


# --- frequency summaries -------------------------------------------------


@dataclass(frozen=True)
class ProblemFrequency:
    problem: str
    total: int
    percent: int
    failure: int
    rank_counts: tuple[int, int, int, int, int]


@dataclass(frozen=True)
class FrequencyTable:
    n: int
    rows: tuple[ProblemFrequency, ...]

    def row(self, problem_id: str) -> ProblemFrequency:
        for r in self.rows:
            if r.problem == problem_id:
                return r
        raise UnknownPhenomenonId(problem_id)


def _percent(count: int, n: int) -> int:
    """Integer display percent, rounded half-up; 0 when n == 0."""
    if n == 0:
        return 0
    return (200 * count + n) // (2 * n)


def summarize(dataset: Dataset) -> FrequencyTable:
    """Tally per-problem totals, failure counts, and rank counts.

    Rows are ordered by descending total, ties by id, matching the
    presentation of the published top-10 table.
    """
    totals: dict[str, int] = {}
    failures: dict[str, int] = {}
    ranks: dict[str, list[int]] = {}
    for p in dataset.problems():
        totals[p.id] = 0
        failures[p.id] = 0
        ranks[p.id] = [0, 0, 0, 0, 0]
    for record in dataset.records:
        for report in record.problems:
            totals[report.problem] += 1
            if report.led_to_failure:
                failures[report.problem] += 1
            if report.rank is not None:
                ranks[report.problem][report.rank - 1] += 1
    rows = [
        ProblemFrequency(
            problem=pid,
            total=totals[pid],
            percent=_percent(totals[pid], dataset.n),
            failure=failures[pid],
            rank_counts=tuple(ranks[pid]),
        )
        for pid in totals
    ]
    rows.sort(key=lambda r: (-r.total, r.problem))
    return FrequencyTable(n=dataset.n, rows=tuple(rows))


# --- context / phenomenon subsetting -------------------------------------


@dataclass(frozen=True)
class SubsetView:
    """Records matching a context filter and containing given phenomena."""

    records: tuple[SurveyRecord, ...]
    n_j: int
    p_ij: Mapping[str, int]


def select_subset(
    dataset: Dataset,
    context_filter: ContextFilter = EMPTY_FILTER,
    applying_phenomena: Iterable[str] = (),
) -> SubsetView:
    """Restrict to records matching the filter and containing every given id.

    A phenomenon applies in a record when it appears anywhere in it
    (cause, problem, or effect position). Empty filter and empty set give
    the whole dataset back.
    """
    applying = set(applying_phenomena)
    for pid in applying:
        if pid not in dataset.by_id:
            raise UnknownPhenomenonId(pid)
    selected = []
    for record in dataset.records:
        if not context_filter.matches(record.context):
            continue
        if applying and not applying <= record.phenomena():
            continue
        selected.append(record)
    p_ij: dict[str, int] = {p.id: 0 for p in dataset.problems()}
    for record in selected:
        for report in record.problems:
            p_ij[report.problem] += 1
    return SubsetView(records=tuple(selected), n_j=len(selected), p_ij=p_ij)


# --- serialization --------------------------------------------------------


def _context_to_json(context: ContextProfile) -> dict:
    return {factor: context.value_of(factor).value for factor in CONTEXT_FACTORS}


def _context_from_json(obj: dict, record_id: str) -> ContextProfile:
    values = {}
    for factor, enum_type in CONTEXT_FACTORS.items():
        if factor not in obj:
            raise MalformedInput(
                f"missing context factor {factor!r} in record {record_id!r}",
                record_id=record_id,
                field=f"context.{factor}",
            )
        try:
            values[factor] = enum_type(obj[factor])
        except ValueError:
            raise MalformedInput(
                f"invalid value {obj[factor]!r} for context factor {factor!r} "
                f"in record {record_id!r}",
                record_id=record_id,
                field=f"context.{factor}",
            ) from None
    return ContextProfile(**values)


def dataset_to_json(dataset: Dataset) -> dict:
    catalog = []
    for p in dataset.catalog:
        entry: dict = {"id": p.id, "kind": p.kind.value, "label": p.label}
        if p.category is not None:
            entry["category"] = p.category.value
        catalog.append(entry)
    records = []
    for record in dataset.records:
        problems = []
        for report in record.problems:
            entry = {
                "problem": report.problem,
                "led_to_failure": report.led_to_failure,
                "causes": list(report.causes),
                "effects": list(report.effects),
            }
            if report.rank is not None:
                entry["rank"] = report.rank
            problems.append(entry)
        records.append(
            {
                "record_id": record.record_id,
                "context": _context_to_json(record.context),
                "problems": problems,
            }
        )
    return {"catalog": catalog, "records": records}


def serialize_dataset(dataset: Dataset) -> bytes:
    """Canonical JSON bytes; load_dataset inverts this exactly."""
    return json.dumps(dataset_to_json(dataset), indent=2).encode("utf-8") + b"\n"


def _dataset_from_json(obj: dict) -> Dataset:
    if not isinstance(obj, dict) or "catalog" not in obj or "records" not in obj:
        raise MalformedInput("top-level object must have 'catalog' and 'records'")
    catalog = []
    for entry in obj["catalog"]:
        try:
            kind = Kind(entry["kind"])
        except (KeyError, ValueError):
            raise MalformedInput(
                f"catalog entry {entry.get('id')!r} has invalid kind", field="kind"
            ) from None
        category = None
        if entry.get("category") is not None:
            try:
                category = CauseCategory(entry["category"])
            except ValueError:
                raise MalformedInput(
                    f"catalog entry {entry.get('id')!r} has invalid category",
                    field="category",
                ) from None
        catalog.append(
            Phenomenon(
                id=entry.get("id", ""),
                kind=kind,
                label=entry.get("label", entry.get("id", "")),
                category=category,
            )
        )
    records = []
    for rec in obj["records"]:
        record_id = str(rec.get("record_id", f"#{len(records)}"))
        problems = []
        for report in rec.get("problems", []):
            rank = report.get("rank")
            if rank is not None and not isinstance(rank, int):
                raise MalformedInput(
                    f"non-integer rank in record {record_id!r}",
                    record_id=record_id,
                    field="rank",
                )
            problems.append(
                ProblemReport(
                    problem=report.get("problem", ""),
                    led_to_failure=bool(report.get("led_to_failure", False)),
                    causes=tuple(report.get("causes", [])),
                    effects=tuple(report.get("effects", [])),
                    rank=rank,
                )
            )
        records.append(
            SurveyRecord(
                record_id=record_id,
                context=_context_from_json(rec.get("context", {}), record_id),
                problems=tuple(problems),
            )
        )
    return Dataset(catalog=tuple(catalog), records=tuple(records))


CSV_COLUMNS = [
    "record_id",
    "company_size_band",
    "distribution",
    "process_paradigm",
    "problem",
    "rank",
    "led_to_failure",
    "causes",
    "effects",
]


def _dataset_from_csv(text: str) -> Dataset:
    """One row per (record, problem); ;-joined cause/effect lists.

    The CSV form carries no catalog section, so the catalog is synthesized
    from the rows: ids take their kind from the column they appear in, with
    the humanized id as label. An id appearing in two different columns is
    a KindMismatch.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise MalformedInput("empty CSV input: header row is mandatory")
    missing = [c for c in CSV_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise MalformedInput(f"CSV header missing columns: {', '.join(missing)}")

    kinds: dict[str, Kind] = {}

    def note(pid: str, kind: Kind, record_id: str, fld: str) -> None:
        prior = kinds.get(pid)
        if prior is not None and prior is not kind:
            raise KindMismatch(pid, kind.value, prior.value, record_id=record_id, field=fld)
        kinds[pid] = kind

    order: list[str] = []
    rows_by_record: dict[str, list[dict]] = {}
    for line_no, row in enumerate(reader, start=2):
        record_id = (row["record_id"] or "").strip()
        if not record_id:
            raise MalformedInput(f"CSV line {line_no}: empty record_id", field="record_id")
        if record_id not in rows_by_record:
            order.append(record_id)
            rows_by_record[record_id] = []
        rows_by_record[record_id].append(row)

    records = []
    for record_id in order:
        rows = rows_by_record[record_id]
        contexts = {
            tuple((row[factor] or "").strip() for factor in CONTEXT_FACTORS) for row in rows
        }
        if len(contexts) > 1:
            raise MalformedInput(
                f"record {record_id!r} has conflicting context values across rows",
                record_id=record_id,
                field="context",
            )
        context = _context_from_json(
            dict(zip(CONTEXT_FACTORS, next(iter(contexts)))), record_id
        )
        problems = []
        for row in rows:
            problem = (row["problem"] or "").strip()
            if not problem:
                continue  # context-only row: a record with no problems
            note(problem, Kind.PROBLEM, record_id, "problem")
            causes = tuple(c for c in (row["causes"] or "").split(";") if c)
            effects = tuple(e for e in (row["effects"] or "").split(";") if e)
            for pid in causes:
                note(pid, Kind.CAUSE, record_id, "causes")
            for pid in effects:
                note(pid, Kind.EFFECT, record_id, "effects")
            rank_text = (row["rank"] or "").strip()
            if rank_text:
                try:
                    rank = int(rank_text)
                except ValueError:
                    raise MalformedInput(
                        f"non-integer rank {rank_text!r} in record {record_id!r}",
                        record_id=record_id,
                        field="rank",
                    ) from None
            else:
                rank = None
            failure_text = (row["led_to_failure"] or "").strip().lower()
            if failure_text not in ("true", "false", "1", "0", ""):
                raise MalformedInput(
                    f"invalid led_to_failure {failure_text!r} in record {record_id!r}",
                    record_id=record_id,
                    field="led_to_failure",
                )
            problems.append(
                ProblemReport(
                    problem=problem,
                    led_to_failure=failure_text in ("true", "1"),
                    causes=causes,
                    effects=effects,
                    rank=rank,
                )
            )
        records.append(
            SurveyRecord(record_id=record_id, context=context, problems=tuple(problems))
        )

    def humanize(pid: str) -> str:
        return pid.replace("-", " ").capitalize()

    catalog = tuple(
        Phenomenon(id=pid, kind=kind, label=humanize(pid))
        for pid, kind in sorted(kinds.items())
    )
    return Dataset(catalog=catalog, records=tuple(records))


def dataset_to_csv(dataset: Dataset) -> str:
    """Records-only CSV form (the catalog is not representable in CSV)."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(CSV_COLUMNS)
    for record in dataset.records:
        context = [record.context.value_of(factor).value for factor in CONTEXT_FACTORS]
        if not record.problems:
            writer.writerow([record.record_id, *context, "", "", "", "", ""])
        for report in record.problems:
            writer.writerow(
                [
                    record.record_id,
                    *context,
                    report.problem,
                    "" if report.rank is None else report.rank,
                    "true" if report.led_to_failure else "false",
                    ";".join(report.causes),
                    ";".join(report.effects),
                ]
            )
    return out.getvalue()


class Format(enum.Enum):
    JSON = "json"
    CSV = "csv"


def load_dataset(source: bytes | IO[bytes], format: Format = Format.JSON) -> Dataset:
    """Parse and validate a dataset from JSON or CSV bytes."""
    data = source if isinstance(source, bytes) else source.read()
    if format is Format.JSON:
        try:
            obj = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise MalformedInput(f"invalid JSON input: {exc}") from None
        return _dataset_from_json(obj)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedInput(f"CSV input is not UTF-8: {exc}") from None
    return _dataset_from_csv(text)
