"""Command-line interface: ingest | summarize | assess | graph | serve.

The dataset path defaults to the RERISK_DATA environment variable and
falls back to the bundled fixture. Learned networks are cached on disk
keyed by (dataset hash, learn config hash), so repeat assessments stay
interactive. All output is deterministic for identical inputs.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from pathlib import Path

import click

from .assessment import (
    Thresholds,
    assess,
    prioritize,
    render_csv,
    render_json,
    render_text,
)
from .cegraph import build_graph, export_graph
from .dataset import (
    CONTEXT_FACTORS,
    ContextFilter,
    Dataset,
    Format,
    load_dataset,
    summarize,
)
from .errors import RiskError, UnknownPhenomenonId
from .fixture import fixture_path
from .inference import BayesNet, LearnConfig, learn_network, load_net, save_net

EXIT_VALIDATION = 2


def _default_cache_dir() -> Path:
    return Path(os.environ.get("RERISK_CACHE", Path.home() / ".cache" / "rerisk"))


def resolve_dataset_path(path: str | None) -> Path:
    if path:
        return Path(path)
    env = os.environ.get("RERISK_DATA")
    if env:
        return Path(env)
    return fixture_path()


def _read_dataset(path: Path, format: Format = Format.JSON) -> Dataset:
    if not path.exists():
        raise click.ClickException(f"dataset file not found: {path}")
    return load_dataset(path.read_bytes(), format)


def edit_distance(a: str, b: str) -> int:
    """Plain Levenshtein distance, used for id suggestions."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def suggest(unknown: str, candidates: list[str], limit: int = 3) -> list[str]:
    ranked = sorted(candidates, key=lambda c: (edit_distance(unknown, c), c))
    return ranked[:limit]


def _fail_unknown_id(unknown: str, candidates: list[str]) -> None:
    hints = suggest(unknown, candidates)
    click.echo(
        f"error: unknown phenomenon id {unknown!r}; "
        f"closest matches: {', '.join(hints)}",
        err=True,
    )
    sys.exit(EXIT_VALIDATION)


def parse_context(pairs: tuple[str, ...]) -> ContextFilter:
    values: dict[str, object] = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.ClickException(
                f"--context must be key=value, got {pair!r}"
            )
        key, _, raw = pair.partition("=")
        key = key.strip()
        if key not in CONTEXT_FACTORS:
            raise click.ClickException(
                f"unknown context factor {key!r}; choose from "
                f"{', '.join(CONTEXT_FACTORS)}"
            )
        enum_type = CONTEXT_FACTORS[key]
        try:
            values[key] = enum_type(raw.strip().lower())
        except ValueError:
            options = ", ".join(member.value for member in enum_type)
            raise click.ClickException(
                f"invalid value {raw!r} for {key}; choose from {options}"
            ) from None
    return ContextFilter(**values)  # type: ignore[arg-type]


def learned_net(dataset_bytes: bytes, dataset: Dataset, config: LearnConfig,
                cache_dir: Path | None = None) -> BayesNet:
    """Learn or load from the on-disk cache keyed by dataset+config hashes."""
    cache_dir = cache_dir if cache_dir is not None else _default_cache_dir()
    digest = hashlib.sha256(
        dataset_bytes + json.dumps(config.to_json(), sort_keys=True).encode()
    ).hexdigest()
    cache_file = cache_dir / f"net-{digest}.json"
    if cache_file.exists():
        try:
            with cache_file.open("rb") as handle:
                return load_net(handle)
        except RiskError:
            pass  # stale or truncated cache entry: relearn and overwrite
    net = learn_network(dataset, config)
    cache_dir.mkdir(parents=True, exist_ok=True)
    scratch = cache_file.with_suffix(".tmp")
    with scratch.open("wb") as handle:
        save_net(net, handle)
    scratch.replace(cache_file)
    return net


def learn_options(command):
    command = click.option("--alpha", type=float, default=1.0, show_default=True,
                           help="Laplace smoothing strength.")(command)
    command = click.option("--max-parents", type=int, default=4, show_default=True,
                           help="Cap on phenomenon parents per node.")(command)
    command = click.option("--parameterization",
                           type=click.Choice(["auto", "full_cpt", "noisy_or"]),
                           default="auto", show_default=True)(command)
    command = click.option("--no-context-nodes", is_flag=True,
                           help="Learn the network without context factor nodes.")(command)
    command = click.option("--no-cache", is_flag=True,
                           help="Always relearn; skip the on-disk net cache.")(command)
    return command


@click.group()
@click.version_option(package_name="rerisk")
def main() -> None:
    """Evidence-based RE risk assessment."""


@main.command()
@click.argument("path", type=click.Path(path_type=Path))
@click.option("--format", "format_name", type=click.Choice(["json", "csv"]),
              default="json", show_default=True)
def ingest(path: Path, format_name: str) -> None:
    """Validate a dataset file and print a summary line."""
    if not path.exists():
        click.echo(f"error: dataset file not found: {path}", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        dataset = load_dataset(path.read_bytes(), Format(format_name))
    except RiskError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    click.echo(f"records: {dataset.n}")
    click.echo(f"catalog: {len(dataset.catalog)} phenomena")


@main.command("summarize")
@click.argument("path", type=click.Path(path_type=Path), required=False)
@click.option("--format", "format_name", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
def summarize_command(path: Path | None, format_name: str) -> None:
    """Print per-problem frequency statistics."""
    dataset = _read_dataset(resolve_dataset_path(path))
    table = summarize(dataset)
    if format_name == "json":
        payload = {
            "n": table.n,
            "problems": [
                {
                    "problem": row.problem,
                    "total": row.total,
                    "percent": row.percent,
                    "failure": row.failure,
                    "rank_counts": list(row.rank_counts),
                }
                for row in table.rows
            ],
        }
        click.echo(json.dumps(payload, indent=2))
        return
    width = max((len(row.problem) for row in table.rows), default=7)
    click.echo(f"{'problem':<{width}}  total  pct  fail  r1  r2  r3  r4  r5")
    for row in table.rows:
        r = row.rank_counts
        click.echo(
            f"{row.problem:<{width}}  {row.total:>5}  {row.percent:>2}%  "
            f"{row.failure:>4}  {r[0]:>2}  {r[1]:>2}  {r[2]:>2}  {r[3]:>2}  {r[4]:>2}"
        )


@main.command("assess")
@click.argument("path", type=click.Path(path_type=Path), required=False)
@click.option("--context", "context_pairs", multiple=True, metavar="FACTOR=VALUE",
              help="Constrain a context factor; repeatable.")
@click.option("--observed", multiple=True, metavar="ID",
              help="Phenomenon observed to occur; repeatable.")
@click.option("--format", "format_name", type=click.Choice(["json", "csv", "text"]),
              default="text", show_default=True)
@click.option("--low-max", type=float, default=0.05, show_default=True,
              help="Upper criticality bound of the Low band.")
@click.option("--high-min", type=float, default=0.20, show_default=True,
              help="Lower criticality bound of the High band.")
@learn_options
def assess_command(path: Path | None, context_pairs: tuple[str, ...],
                   observed: tuple[str, ...], format_name: str,
                   low_max: float, high_min: float, alpha: float,
                   max_parents: int, parameterization: str,
                   no_context_nodes: bool, no_cache: bool) -> None:
    """Rank problems by criticality for the given project situation."""
    dataset_path = resolve_dataset_path(path)
    if not dataset_path.exists():
        click.echo(f"error: dataset file not found: {dataset_path}", err=True)
        sys.exit(EXIT_VALIDATION)
    dataset_bytes = dataset_path.read_bytes()
    dataset = load_dataset(dataset_bytes)
    context = parse_context(context_pairs)
    for pid in observed:
        if pid not in dataset.by_id:
            _fail_unknown_id(pid, [p.id for p in dataset.catalog])
    config = LearnConfig(
        max_parents=max_parents,
        smoothing_alpha=alpha,
        parameterization=parameterization,
        include_context_nodes=not no_context_nodes,
    )
    if no_cache:
        net = learn_network(dataset, config)
    else:
        net = learned_net(dataset_bytes, dataset, config)
    try:
        thresholds = Thresholds(low_max=low_max, high_min=high_min)
        report = assess(net, dataset, context, observed, thresholds=thresholds)
    except RiskError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    renderer = {"json": render_json, "csv": render_csv, "text": render_text}[format_name]
    click.echo(renderer(report), nl=False)


@main.command("graph")
@click.argument("path", type=click.Path(path_type=Path), required=False)
@click.option("--highlight", multiple=True, metavar="ID",
              help="Phenomenon to highlight; repeatable.")
@click.option("--format", "format_name", type=click.Choice(["dot", "json"]),
              default="dot", show_default=True)
def graph_command(path: Path | None, highlight: tuple[str, ...],
                  format_name: str) -> None:
    """Print the cause-effect graph with the given nodes highlighted."""
    dataset = _read_dataset(resolve_dataset_path(path))
    graph = build_graph(dataset)
    try:
        text = export_graph(graph, highlight=highlight, format=format_name)
    except UnknownPhenomenonId as exc:
        _fail_unknown_id(exc.phenomenon_id, sorted(graph.nodes))
        return
    click.echo(text, nl=False)


@main.command("serve")
@click.argument("path", type=click.Path(path_type=Path), required=False)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=click.IntRange(1, 65535), default=8000, show_default=True)
@click.option("--cors-origin", multiple=True,
              help="Origin allowed to call the API (for the web UI); repeatable.")
@click.option("--low-max", type=float, default=0.05, show_default=True)
@click.option("--high-min", type=float, default=0.20, show_default=True)
@learn_options
def serve_command(path: Path | None, host: str, port: int,
                  cors_origin: tuple[str, ...], low_max: float, high_min: float,
                  alpha: float, max_parents: int, parameterization: str,
                  no_context_nodes: bool, no_cache: bool) -> None:
    """Run the HTTP API (dataset loaded and network learned at startup)."""
    import uvicorn

    from .service import AppConfig, create_app

    config = AppConfig(
        dataset_path=resolve_dataset_path(path),
        learn_config=LearnConfig(
            max_parents=max_parents,
            smoothing_alpha=alpha,
            parameterization=parameterization,
            include_context_nodes=not no_context_nodes,
        ),
        thresholds=Thresholds(low_max=low_max, high_min=high_min),
        cors_origins=cors_origin,
        host=host,
        port=port,
        use_cache=not no_cache,
    )
    uvicorn.run(create_app(config), host=config.host, port=config.port)


if __name__ == "__main__":
    main()
