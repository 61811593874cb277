"""HTTP service exposing compile/enumerate/explain over spec files.

Endpoints:

    GET  /health
    GET  /specs
    GET  /specs/{id}
    GET  /specs/{id}/program
    POST /specs/{id}/explain
    POST /specs/{id}/enumerate?world=pre|post&limit=N

Every response carries the schema version header.  Schema violations are
400 with a machine-readable error code and the offending field; unknown
specs are 404; domain outcomes that prevent an answer (instance already
desired, infeasible restrictions) are 422.
"""

from __future__ import annotations

import os
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import engine, fixtures
from .asp_core import serialize
from .errors import (
    DomainError, IllegalCode, InfeasibleRestrictions, NotUndesired,
    UnrealisticInstance,
)
from .render import instance_to_json, pair_to_json, trace_id
from .specfile import SCHEMA, SpecDocument, document_to_dict, load_document

SCHEMA_HEADER = "X-Schema-Version"


class ExplainRequest(BaseModel):
    instance: dict
    restrictions: Optional[dict] = None
    cost_bound: Optional[int] = None
    limit: Optional[int] = None
    minimal_only: bool = False


def _error(status: int, code: str, message: str, field: Optional[str] = None):
    body = {"error": {"code": code, "message": message}}
    if field is not None:
        body["error"]["field"] = field
    return JSONResponse(status_code=status, content=body)


def _load_spec_dir(spec_dir) -> dict:
    directory = Path(spec_dir) if spec_dir else fixtures.fixture_dir()
    docs = {}
    for path in sorted(directory.glob("*.spec")):
        docs[path.stem] = load_document(path)
    return docs


def create_app(spec_dir=None, ui_dir=None) -> FastAPI:
    app = FastAPI(title="cfgs", version="0.1.0")
    app.state.specs = _load_spec_dir(spec_dir)

    ui = Path(ui_dir or os.environ.get("CFGS_UI_DIR", "frontend/dist"))
    if ui.is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=str(ui), html=True), name="ui")

    @app.middleware("http")
    async def add_schema_header(request: Request, call_next):
        response = await call_next(request)
        response.headers[SCHEMA_HEADER] = SCHEMA
        return response

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(x) for x in first.get("loc", ()) if x != "body")
        response = _error(400, "validation", first.get("msg", "invalid request"),
                          field or None)
        response.headers[SCHEMA_HEADER] = SCHEMA
        return response

    def get_doc(spec_id: str) -> SpecDocument:
        doc = app.state.specs.get(spec_id)
        if doc is None:
            raise KeyError(spec_id)
        return doc

    @app.get("/health", response_class=PlainTextResponse)
    async def health():
        return "ok"

    @app.get("/specs")
    async def list_specs():
        out = []
        for spec_id, doc in app.state.specs.items():
            out.append({
                "id": spec_id,
                "dataset": doc.metadata.get("dataset", spec_id),
                "algorithm": doc.metadata.get("algorithm"),
                "undesired": doc.metadata.get("undesired"),
                "features": len(doc.problem.features),
            })
        return {"specs": out}

    @app.get("/specs/{spec_id}")
    async def get_spec(spec_id: str):
        try:
            doc = get_doc(spec_id)
        except KeyError:
            return _error(404, "unknown_spec", f"no spec named {spec_id!r}")
        return document_to_dict(doc)

    @app.get("/specs/{spec_id}/program", response_class=PlainTextResponse)
    async def get_program(spec_id: str):
        try:
            doc = get_doc(spec_id)
        except KeyError:
            return _error(404, "unknown_spec", f"no spec named {spec_id!r}")
        return serialize(engine.compile_spec(doc.problem))

    @app.post("/specs/{spec_id}/explain")
    async def explain(spec_id: str, req: ExplainRequest):
        try:
            doc = get_doc(spec_id)
        except KeyError:
            return _error(404, "unknown_spec", f"no spec named {spec_id!r}")
        spec = doc.problem
        known = {f.name for f in spec.features}
        for field in list(req.instance) + list(req.restrictions or {}):
            if field not in known:
                return _error(400, "unknown_feature",
                              f"spec {spec_id!r} has no feature {field!r}",
                              field=field)
        instance = {}
        for f in spec.features:
            if f.name not in req.instance:
                return _error(400, "missing_feature",
                              f"instance is missing {f.name!r}", field=f.name)
            v = req.instance[f.name]
            if f.kind == "numeric":
                if isinstance(v, float) and v == int(v):
                    v = int(v)
                if isinstance(v, bool) or not isinstance(v, int):
                    return _error(400, "bad_value",
                                  f"{f.name!r} expects an integer", field=f.name)
            else:
                v = str(v)
            instance[f.name] = v
        started = time.perf_counter()
        try:
            pairs = engine.explain(spec, instance, req.restrictions,
                                   cost_bound=req.cost_bound, limit=req.limit,
                                   minimal_only=req.minimal_only)
        except NotUndesired as e:
            return _error(422, "not_undesired", str(e))
        except InfeasibleRestrictions as e:
            return _error(422, "infeasible_restrictions", str(e))
        except (DomainError, UnrealisticInstance, IllegalCode) as e:
            return _error(400, "bad_instance", str(e))
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        rendered = [pair_to_json(spec, p) for p in pairs]
        return {"pairs": rendered,
                "timing_ms": round(elapsed_ms, 3),
                "trace_ids": [trace_id(p) for p in rendered]}

    @app.post("/specs/{spec_id}/enumerate")
    async def enumerate_world(spec_id: str, world: str = "pre",
                              limit: Optional[int] = None):
        try:
            doc = get_doc(spec_id)
        except KeyError:
            return _error(404, "unknown_spec", f"no spec named {spec_id!r}")
        if world not in ("pre", "post"):
            return _error(400, "validation", "world must be pre or post",
                          field="world")
        spec = doc.problem
        started = time.perf_counter()
        it = (engine.enumerate_undesired(spec, limit=limit) if world == "pre"
              else engine.enumerate_counterfactuals(spec, limit=limit))
        instances = [instance_to_json(spec, i) for i in it]
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        return {"world": world, "instances": instances,
                "timing_ms": round(elapsed_ms, 3)}

    return app
