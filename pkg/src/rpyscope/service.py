"""Local HTTP interface for interactive analysis sessions.

Sessions are in-memory. Every mutation takes the caller's expected_version
and is serialized through a per-session lock: a stale version yields 409 and
no change (optimistic concurrency). Reads serve immutable workspace
snapshots, so a reader never observes a half-applied mutation.
"""

import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import dedupe, exports, spectra, workspace as store
from .errors import ConsistencyError, MergeError, RpyscopeError
from .ingest import ImportConfig, YearWindow, parse_export
from .workspace import Workspace

DEFAULT_MAX_UPLOAD = 50_000_000


@dataclass
class Session:
    session_id: str
    workspace: Workspace
    version: int = 1
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionRegistry:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, ws: Workspace) -> Session:
        session = Session(session_id=secrets.token_hex(8), workspace=ws)
        with self._lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session


class WindowBody(BaseModel):
    lo: int
    hi: int
    keep_missing: bool = False


class ConfigBody(BaseModel):
    rpy: WindowBody = WindowBody(lo=1000, hi=2999, keep_missing=True)
    py: WindowBody = WindowBody(lo=1000, hi=2999, keep_missing=True)
    max_cr: int = 0


class CreateSessionBody(BaseModel):
    export_text: str | None = None
    workspace: dict | None = None
    config: ConfigBody | None = None


class ClusterBody(BaseModel):
    threshold: float
    use_volume: bool = False
    use_page: bool = False
    use_doi: bool = False
    merge: bool = True
    expected_version: int


class MergeBody(BaseModel):
    variant_ids: list[str]
    expected_version: int


class SplitBody(BaseModel):
    variant_id: str
    expected_version: int


class MarkerBody(BaseModel):
    rpy: int
    author: str | None = None
    volume: str | None = None
    page: str | None = None
    doi: str | None = None

    def to_spec(self) -> spectra.MarkerSpec:
        return spectra.MarkerSpec(
            rpy=self.rpy,
            first_author_prefix=self.author,
            volume=self.volume,
            start_page=self.page,
            doi=self.doi,
        )


class FilterBody(BaseModel):
    markers: list[MarkerBody]
    mode: str = "any"
    expected_version: int


class RemoveNcrBody(BaseModel):
    lo: int
    hi: int
    expected_version: int


class AnnotateBody(BaseModel):
    variant_id: str
    text: str
    expected_version: int


def _invalid(field_name: str, message: str) -> HTTPException:
    return HTTPException(status_code=422, detail=[{"field": field_name, "message": message}])


def _session_payload(session: Session) -> dict:
    return {
        "session_id": session.session_id,
        "version": session.version,
        "info": store.info(session.workspace).to_dict(),
    }


def _config_from_body(body: ConfigBody | None) -> ImportConfig:
    if body is None:
        body = ConfigBody()
    try:
        return ImportConfig(
            rpy_window=YearWindow(body.rpy.lo, body.rpy.hi, body.rpy.keep_missing),
            py_window=YearWindow(body.py.lo, body.py.hi, body.py.keep_missing),
            max_cr_per_record=body.max_cr,
        )
    except ValueError as exc:
        raise _invalid("config", str(exc)) from exc


def create_app(
    *, max_upload_bytes: int = DEFAULT_MAX_UPLOAD, static_dir: Path | str | None = None
) -> FastAPI:
    app = FastAPI(title="rpyscope analysis service")
    registry = SessionRegistry()
    app.state.registry = registry

    @app.middleware("http")
    async def upload_cap(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and length.isdigit() and int(length) > max_upload_bytes:
            return JSONResponse(
                status_code=413,
                content={"detail": f"upload exceeds the {max_upload_bytes}-byte cap"},
            )
        return await call_next(request)

    def mutate(session: Session, expected_version: int, fn) -> dict:
        """Apply fn under the session lock; enforce the optimistic version check."""
        with session.lock:
            if expected_version != session.version:
                raise HTTPException(
                    status_code=409,
                    detail={
                        "error": "stale expected_version",
                        "expected_version": expected_version,
                        "current_version": session.version,
                    },
                )
            try:
                session.workspace = fn(session.workspace)
            except (MergeError, ConsistencyError, ValueError, KeyError) as exc:
                raise _invalid("request", str(exc)) from exc
            session.version += 1
            return _session_payload(session)

    @app.get("/api")
    def api_root():
        return {
            "service": "rpyscope",
            "endpoints": [
                "POST /sessions",
                "GET /sessions/{id}",
                "GET /sessions/{id}/spectrum",
                "GET /sessions/{id}/years/{rpy}/refs",
                "GET /sessions/{id}/peaks",
                "GET /sessions/{id}/history",
                "GET /sessions/{id}/export",
                "POST /sessions/{id}/cluster",
                "POST /sessions/{id}/merge",
                "POST /sessions/{id}/split",
                "POST /sessions/{id}/filter",
                "POST /sessions/{id}/remove-ncr",
                "POST /sessions/{id}/annotate",
            ],
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if (body.export_text is None) == (body.workspace is None):
            raise _invalid("body", "provide exactly one of export_text or workspace")
        if body.export_text is not None:
            cfg = _config_from_body(body.config)
            try:
                records, _report = parse_export(body.export_text, cfg)
            except RpyscopeError as exc:
                raise _invalid("export_text", str(exc)) from exc
            ws = store.aggregate(records, cfg)
        else:
            try:
                ws = store.workspace_from_dict(body.workspace)
            except RpyscopeError as exc:
                raise _invalid("workspace", str(exc)) from exc
        session = registry.create(ws)
        return _session_payload(session)

    @app.get("/sessions/{session_id}")
    def session_info(session_id: str):
        return _session_payload(registry.get(session_id))

    @app.get("/sessions/{session_id}/spectrum")
    def session_spectrum(session_id: str, lo: int | None = None, hi: int | None = None):
        session = registry.get(session_id)
        ws = session.workspace
        lo = ws.config.rpy_window.lo if lo is None else lo
        hi = ws.config.rpy_window.hi if hi is None else hi
        if lo > hi:
            raise _invalid("lo", f"inverted year range {lo}..{hi}")
        return [p.to_dict() for p in spectra.spectrum(ws, lo, hi)]

    @app.get("/sessions/{session_id}/years/{rpy}/refs")
    def year_refs(
        session_id: str,
        rpy: int,
        sort: str = Query("ncr"),
        share_threshold: float = Query(0.1),
    ):
        session = registry.get(session_id)
        if sort not in ("ncr", "raw"):
            raise _invalid("sort", f"sort must be 'ncr' or 'raw', got {sort!r}")
        if not 0.0 <= share_threshold < 1.0:
            raise _invalid("share_threshold", "must be in [0, 1)")
        ws = session.workspace
        year_variants = [v for v in ws.variants if v.fields.rpy == rpy]
        total = sum(v.ncr for v in year_variants)
        if sort == "ncr":
            year_variants.sort(key=lambda v: (-v.ncr, v.raw))
        else:
            year_variants.sort(key=lambda v: v.raw)
        merged = ws.merged_variant_ids()
        notes = ws.annotation_map()
        refs = []
        for v in year_variants:
            share = v.ncr / total if total else 0.0
            d = v.to_dict()
            d.pop("citing_ids")
            d.update(
                {
                    "ncr": v.ncr,
                    "share": share,
                    "top": share > share_threshold,
                    "merged": v.variant_id in merged,
                    "annotation": notes.get(v.variant_id),
                }
            )
            refs.append(d)
        return {"rpy": rpy, "total_ncr": total, "version": session.version, "refs": refs}

    @app.get("/sessions/{session_id}/peaks")
    def session_peaks(
        session_id: str,
        min_dev: float = Query(1.0),
        share_threshold: float = Query(0.1),
    ):
        session = registry.get(session_id)
        ws = session.workspace
        window = ws.config.rpy_window
        points = spectra.spectrum(ws, window.lo, window.hi)
        try:
            reports = spectra.peak_reports(ws, points, min_dev, share_threshold)
        except ValueError as exc:
            raise _invalid("share_threshold", str(exc)) from exc
        return [r.to_dict() for r in reports]

    @app.get("/sessions/{session_id}/history")
    def session_history(session_id: str):
        session = registry.get(session_id)
        return {
            "version": session.version,
            "history": [h.to_dict() for h in session.workspace.history],
        }

    @app.get("/sessions/{session_id}/export")
    def session_export(session_id: str, type: str = Query(...)):
        session = registry.get(session_id)
        ws = session.workspace
        if type == "CSV_CR":
            return PlainTextResponse(exports.cr_table_csv(ws), media_type="text/csv; charset=utf-8")
        if type == "CSV_GRAPH":
            try:
                return PlainTextResponse(exports.graph_csv(ws), media_type="text/csv; charset=utf-8")
            except ValueError as exc:
                raise _invalid("type", str(exc)) from exc
        if type == "workspace":
            return JSONResponse(store.workspace_to_dict(ws))
        raise _invalid("type", f"type must be CSV_CR, CSV_GRAPH, or workspace, got {type!r}")

    @app.post("/sessions/{session_id}/cluster")
    def session_cluster(session_id: str, body: ClusterBody):
        session = registry.get(session_id)

        def apply(ws: Workspace) -> Workspace:
            params = dedupe.ClusterParams(
                threshold=body.threshold,
                use_volume=body.use_volume,
                use_page=body.use_page,
                use_doi=body.use_doi,
            )
            new_ws, assignment = dedupe.cluster(ws, params)
            if body.merge:
                new_ws = dedupe.merge(new_ws, assignment)
            return new_ws

        return mutate(session, body.expected_version, apply)

    @app.post("/sessions/{session_id}/merge")
    def session_merge(session_id: str, body: MergeBody):
        session = registry.get(session_id)
        return mutate(
            session, body.expected_version, lambda ws: dedupe.manual_merge(ws, body.variant_ids)
        )

    @app.post("/sessions/{session_id}/split")
    def session_split(session_id: str, body: SplitBody):
        session = registry.get(session_id)
        return mutate(
            session, body.expected_version, lambda ws: dedupe.manual_split(ws, body.variant_id)
        )

    @app.post("/sessions/{session_id}/filter")
    def session_filter(session_id: str, body: FilterBody):
        session = registry.get(session_id)
        try:
            markers = [m.to_spec() for m in body.markers]
        except ValueError as exc:
            raise _invalid("markers", str(exc)) from exc
        return mutate(
            session,
            body.expected_version,
            lambda ws: spectra.cocitation_filter(ws, markers, body.mode),
        )

    @app.post("/sessions/{session_id}/remove-ncr")
    def session_remove_ncr(session_id: str, body: RemoveNcrBody):
        session = registry.get(session_id)
        return mutate(
            session, body.expected_version, lambda ws: store.remove_by_ncr(ws, body.lo, body.hi)
        )

    @app.post("/sessions/{session_id}/annotate")
    def session_annotate(session_id: str, body: AnnotateBody):
        session = registry.get(session_id)
        return mutate(
            session,
            body.expected_version,
            lambda ws: store.annotate(ws, body.variant_id, body.text),
        )

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    else:

        @app.get("/")
        def root():
            return api_root()

    return app
