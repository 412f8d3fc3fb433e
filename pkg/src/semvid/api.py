"""HTTP JSON gateway consumed by the companion UI and external clients.

Successful responses carry the resource directly (query results,
suggestion lists, stats, documents); feedback acknowledges with
{"ok": {"tau": ...}}. Every error body is {"error": code, "message":
text}, where code is the domain error's class name, so HTTP clients and
the CLI share one error vocabulary.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .engine import Engine
from .errors import SemvidError
from .ingestion import record_to_dict, summarize
from .pipeline import result_payload

_STATUS = {
    "UnknownUser": 404,
    "UnknownDomain": 404,
    "UnknownDocument": 404,
    "InvalidRating": 422,
    "MalformedRequest": 400,
}


def _error(code: str, message: str) -> JSONResponse:
    return JSONResponse({"error": code, "message": message},
                        status_code=_STATUS.get(code, 400))


def _domain_error(exc: SemvidError) -> JSONResponse:
    return _error(exc.code, str(exc))


async def _json_body(request: Request) -> dict | JSONResponse:
    try:
        body = await request.json()
    except Exception:
        return _error("MalformedRequest", "body is not valid JSON")
    if not isinstance(body, dict):
        return _error("MalformedRequest", "body must be a JSON object")
    return body


def _field(body: dict, name: str, types) -> tuple:
    """(value, None) or (None, error response)."""
    if name not in body:
        return None, _error("MalformedRequest", f"missing field {name!r}")
    value = body[name]
    if not isinstance(value, types) or isinstance(value, bool):
        return None, _error("MalformedRequest", f"field {name!r} has wrong type")
    return value, None


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="semvid", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.post("/api/query")
    async def query(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        values = []
        for name, types in (("user", str), ("domain", str), ("text", str),
                            ("k", int)):
            value, err = _field(body, name, types)
            if err:
                return err
            values.append(value)
        user, domain, text, k = values
        try:
            results, report = engine.query(user, domain, text, k)
        except SemvidError as exc:
            return _domain_error(exc)
        except ValueError as exc:
            return _error("MalformedRequest", str(exc))
        return result_payload(results, report)

    @app.post("/api/feedback")
    async def feedback(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        user, err = _field(body, "user", str)
        if err:
            return err
        doc, err = _field(body, "doc", str)
        if err:
            return err
        if "rating" not in body:
            return _error("MalformedRequest", "missing field 'rating'")
        try:
            tau = engine.feedback(user, doc, body["rating"])
        except SemvidError as exc:
            return _domain_error(exc)
        return {"ok": {"tau": tau}}

    @app.get("/api/suggestions")
    async def suggestions(request: Request):
        params = request.query_params
        user = params.get("user")
        domain = params.get("domain")
        if not user or not domain:
            return _error("MalformedRequest", "user and domain are required")
        try:
            k = int(params.get("k", "5"))
            if k < 0:
                raise ValueError
        except ValueError:
            return _error("MalformedRequest", "k must be a non-negative integer")
        try:
            items = engine.suggest(user, domain, k)
        except SemvidError as exc:
            return _domain_error(exc)
        return [{"text": s.text, "source": s.source} for s in items]

    @app.get("/api/stats")
    async def stats():
        s = engine.stats()
        report = engine.last_report
        performance = None
        if report is not None:
            performance = {
                "stages": [{"name": name, "p": p} for name, p in report.stages],
                "p_global": report.p_global,
            }
        return {"counts": s.counts, "total": s.total,
                "mean_tau": s.mean_tau, "performance": performance}

    @app.get("/api/doc/{doc_id}")
    async def doc(doc_id: str):
        try:
            kb_doc = engine.kb.get(doc_id)
        except SemvidError as exc:
            return _domain_error(exc)
        record = kb_doc.record
        board = summarize(record, max(1, len(record.shots)))
        return {
            "record": record_to_dict(record),
            "tier": kb_doc.tier.value,
            "tau": kb_doc.tau,
            "storyboard": [{"shot": s, "frame": f, "hist": list(h)}
                           for s, f, h in board.keyframes],
        }

    return app
