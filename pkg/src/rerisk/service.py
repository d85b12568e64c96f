"""HTTP API consumed by the web UI: /api/health, /api/phenomena,
/api/context-options, /api/assess, /api/graph.

The dataset is loaded and the network learned once at startup; every
request then runs against that shared immutable state, so identical
requests produce identical responses. Assess responses are serialized
with the same renderer as the CLI, byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .assessment import Thresholds, assess, render_json
from .cegraph import build_graph, export_graph
from .dataset import CONTEXT_FACTORS, ContextFilter, load_dataset
from .errors import InconsistentEvidence, MalformedInput
from .inference import LearnConfig, learn_network


@dataclass(frozen=True)
class AppConfig:
    """Everything the service needs at startup."""

    dataset_path: Path
    learn_config: LearnConfig = LearnConfig()
    thresholds: Thresholds = Thresholds()
    cors_origins: tuple[str, ...] = ()
    host: str = "127.0.0.1"
    port: int = 8000
    use_cache: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "dataset_path", Path(self.dataset_path))
        if not 1 <= self.port <= 65535:
            raise MalformedInput(f"port {self.port} outside 1..65535")
        if not self.dataset_path.exists():
            raise MalformedInput(f"dataset file not found: {self.dataset_path}")


def _field_error(status: int, field_name: str, message: str,
                 suggestions: list[str] | None = None) -> JSONResponse:
    error: dict = {"field": field_name, "message": message}
    if suggestions:
        error["suggestions"] = suggestions
    return JSONResponse(status_code=status, content={"error": error})


def create_app(config: AppConfig) -> FastAPI:
    dataset_bytes = config.dataset_path.read_bytes()
    dataset = load_dataset(dataset_bytes)
    if config.use_cache:
        from .cli import learned_net

        net = learned_net(dataset_bytes, dataset, config.learn_config)
    else:
        net = learn_network(dataset, config.learn_config)
    thresholds = config.thresholds
    graph = build_graph(dataset)
    known_ids = sorted(dataset.by_id)

    app = FastAPI(title="rerisk", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins) or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _suggest(unknown: str) -> list[str]:
        from .cli import suggest

        return suggest(unknown, known_ids)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/phenomena")
    def phenomena() -> list[dict]:
        return [
            {
                "id": p.id,
                "kind": p.kind.value,
                "label": p.label,
                "category": p.category.value if p.category else None,
            }
            for p in dataset.catalog
        ]

    @app.get("/api/context-options")
    def context_options() -> dict:
        return {
            factor: [member.value for member in enum_type]
            for factor, enum_type in CONTEXT_FACTORS.items()
        }

    @app.post("/api/assess")
    async def assess_endpoint(request: Request) -> Response:
        body = await request.body()
        if body:
            import json

            try:
                payload = json.loads(body)
            except json.JSONDecodeError:
                return _field_error(400, "body", "request body is not valid JSON")
            if not isinstance(payload, dict):
                return _field_error(400, "body", "request body must be an object")
        else:
            payload = {}

        raw_context = payload.get("context") or {}
        if not isinstance(raw_context, dict):
            return _field_error(400, "context", "context must be an object")
        context_values: dict = {}
        for factor, raw in raw_context.items():
            if factor not in CONTEXT_FACTORS:
                return _field_error(
                    400, f"context.{factor}", f"unknown context factor {factor!r}"
                )
            if raw is None:
                continue
            enum_type = CONTEXT_FACTORS[factor]
            try:
                context_values[factor] = enum_type(raw)
            except ValueError:
                options = [member.value for member in enum_type]
                return _field_error(
                    400,
                    f"context.{factor}",
                    f"invalid value {raw!r}",
                    suggestions=options,
                )
        context = ContextFilter(**context_values)

        raw_observed = payload.get("observed") or []
        if not isinstance(raw_observed, list):
            return _field_error(400, "observed", "observed must be a list of ids")
        for index, pid in enumerate(raw_observed):
            if not isinstance(pid, str) or pid not in dataset.by_id:
                return _field_error(
                    400,
                    f"observed[{index}]",
                    f"unknown phenomenon id {pid!r}",
                    suggestions=_suggest(str(pid)),
                )

        try:
            report = assess(
                net, dataset, context, raw_observed, thresholds=thresholds
            )
        except InconsistentEvidence as exc:
            return JSONResponse(
                status_code=409,
                content={"error": {"field": "observed", "message": str(exc)}},
            )
        return Response(content=render_json(report), media_type="application/json")

    @app.get("/api/graph")
    def graph_endpoint(highlight: str = Query(default="")) -> Response:
        ids = [part for part in highlight.split(",") if part]
        for pid in ids:
            if pid not in graph.nodes:
                return _field_error(
                    400, "highlight", f"unknown phenomenon id {pid!r}",
                    suggestions=_suggest(pid),
                )
        return Response(
            content=export_graph(graph, highlight=ids, format="json"),
            media_type="application/json",
        )

    return app
