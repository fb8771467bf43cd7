"""HTTP facade for verbalization, prediction, template editing, and
authoring-session timers.

Every endpoint is a thin loop back onto the library: /v1/verbalize equals
templates.verbalize_role_set over the constraint-allowed roles (or an
explicit roles override), /v1/predict equals inference.predict_role with
the full per-template score breakdown for UI display. PUT /v1/templates/
{role} validates the payload through parse_template and persists the
library atomically — a failed PUT leaves the previous library intact.

Sessions exist to reproduce the template-authoring methodology: the client
reports heartbeats while a role's editor is focused and the server
accumulates per-role elapsed seconds against a 15-minute budget. The
budget is advisory; the server never blocks edits.

Configuration comes from a JSON file with environment overrides
(ROLECAST_HOST, ROLECAST_PORT, ROLECAST_LIBRARY, ROLECAST_CONSTRAINTS,
ROLECAST_BACKEND, ROLECAST_CORPUS, ROLECAST_THRESHOLD).
"""

from __future__ import annotations

import json
import os
import re
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import unquote

from ._http import BadRequest, JsonRequestHandler, make_server
from .constraints import ConstraintError, ConstraintTable, load_constraints
from .corpus import Candidate, Document, EntityMention, EventMention
from .entailment import BackendConfig, EntailmentError, Scorer, build_scorer, load_backend_config
from .errors import RolecastError
from .inference import InferenceConfig, _candidate_plan, predict_role, prediction_to_record
from .templates import (
    LibraryMetadata,
    TemplateError,
    TemplateLibrary,
    library_to_record,
    load_library,
    parse_template,
    save_library,
)

ROLE_BUDGET_SECONDS = 900  # 15 minutes per role

_TEMPLATES_ROUTE = re.compile(r"^/v1/templates/([^/]+)$")
_TIMERS_ROUTE = re.compile(r"^/v1/sessions/([^/]+)/timers$")
_HEARTBEAT_ROUTE = re.compile(r"^/v1/sessions/([^/]+)/heartbeat$")


class ServiceError(RolecastError):
    pass


class UnknownRoleError(ServiceError):
    def __init__(self, role: str):
        super().__init__(f"unknown role {role!r}")
        self.role = role


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8710
    library_path: str = ""
    constraints_path: str = ""
    backend: BackendConfig | None = None
    corpus_path: str | None = None
    threshold: float = 0.5


def load_service_config(path=None, env=None) -> ServiceConfig:
    env = os.environ if env is None else env
    record = {}
    if path is not None:
        base = Path(path).parent
        try:
            record = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ServiceError(f"{path}: {exc}") from exc
        if not isinstance(record, dict):
            raise ServiceError(f"{path}: service config must be a JSON object")
    else:
        base = Path(".")

    def resolve(p):
        return str((base / p).resolve()) if p else p

    config = ServiceConfig(
        host=env.get("ROLECAST_HOST", record.get("host", "127.0.0.1")),
        port=int(env.get("ROLECAST_PORT", record.get("port", 8710))),
        library_path=env.get("ROLECAST_LIBRARY", resolve(record.get("library", ""))),
        constraints_path=env.get("ROLECAST_CONSTRAINTS", resolve(record.get("constraints", ""))),
        corpus_path=env.get("ROLECAST_CORPUS", resolve(record.get("corpus")) or None),
        threshold=float(env.get("ROLECAST_THRESHOLD", record.get("threshold", 0.5))),
    )
    backend_path = env.get("ROLECAST_BACKEND", resolve(record.get("backend", "")))
    if backend_path:
        config.backend = load_backend_config(backend_path)
    return config


class Session:
    def __init__(self, session_id: str):
        self.id = session_id
        self.timers: dict[str, float] = {}
        self._lock = threading.Lock()

    def heartbeat(self, role: str, seconds: float) -> dict[str, float]:
        with self._lock:
            self.timers[role] = self.timers.get(role, 0.0) + seconds
            return dict(self.timers)

    def snapshot(self) -> dict[str, float]:
        with self._lock:
            return dict(self.timers)


class WorkbenchService:
    """Server-side state: one mutable library working copy plus sessions.

    Concurrent PUTs serialize on the library lock; scoring requests run
    freely in parallel (the library is swapped wholesale, never edited in
    place).
    """

    def __init__(self, library: TemplateLibrary, table: ConstraintTable, scorer: Scorer,
                 library_path=None, threshold: float = 0.5):
        library.validate()
        self.library = library
        self.table = table
        self.scorer = scorer
        self.library_path = str(library_path) if library_path else None
        self.inference_config = InferenceConfig(threshold=threshold)
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_config(cls, config: ServiceConfig) -> "WorkbenchService":
        if not config.library_path:
            raise ServiceError("service config needs a library path")
        if not config.constraints_path:
            raise ServiceError("service config needs a constraints path")
        if config.backend is None:
            raise ServiceError("service config needs a backend")
        return cls(
            library=load_library(config.library_path),
            table=load_constraints(config.constraints_path),
            scorer=build_scorer(config.backend),
            library_path=config.library_path,
            threshold=config.threshold,
        )

    # -- template editing ---------------------------------------------------

    def get_role_templates(self, role: str) -> list[dict]:
        with self._lock:
            library = self.library
        if role not in library.templates:
            raise KeyError(role)
        return [
            {"id": t.id, "pattern": t.pattern, "category": t.category,
             **({"scope": sorted(t.scope)} if t.scope is not None else {})}
            for t in library.templates_for(role)
        ]

    def put_role_templates(self, role: str, rows: list[dict]) -> list[dict]:
        """Validate, swap, persist. Raises TemplateError without side effects."""
        if not rows:
            raise TemplateError(f"role {role!r} needs at least one template")
        parsed = []
        for i, row in enumerate(rows):
            if not isinstance(row, dict) or "pattern" not in row:
                raise TemplateError(f"templates[{i}]: expected an object with a 'pattern'")
            parsed.append(parse_template(
                row["pattern"], role, row.get("category", "implicit-arg"),
                scope=row.get("scope"), template_id=row.get("id"),
            ))
        with self._lock:
            updated = self.library.with_role_templates(role, parsed)
            updated.metadata = self._stamp_authoring_time(updated.metadata)
            if self.library_path:
                save_library(updated, self.library_path)
            self.library = updated
        return self.get_role_templates(role)

    def _stamp_authoring_time(self, metadata) -> LibraryMetadata:
        """Record per-role elapsed authoring seconds from session timers."""
        merged = dict(metadata.elapsed_seconds_per_role)
        for session in self.sessions.values():
            for role, seconds in session.snapshot().items():
                merged[role] = max(merged.get(role, 0.0), seconds)
        return LibraryMetadata(metadata.developer, metadata.created, merged)

    def library_record(self) -> dict:
        with self._lock:
            return library_to_record(self.library)

    # -- scoring ------------------------------------------------------------

    def _build_instance(self, payload: dict) -> tuple[Candidate, Document, list | None, float]:
        try:
            context = payload["context"]
            trigger = payload["trigger"]
            candidate_spec = payload["candidate"]
        except (KeyError, TypeError) as exc:
            raise BadRequest(f"missing field: {exc}") from exc
        if not isinstance(context, str) or not context:
            raise BadRequest("context must be a non-empty string")

        def span(spec, what):
            try:
                start, end = int(spec["start"]), int(spec["end"])
            except (KeyError, TypeError, ValueError) as exc:
                raise BadRequest(f"{what} span malformed: {exc}") from exc
            if not 0 <= start < end <= len(context):
                raise BadRequest(f"{what} span ({start}, {end}) outside context")
            return start, end

        t_start, t_end = span(trigger, "trigger")
        c_start, c_end = span(candidate_spec, "candidate")
        for field_name in ("type", "subtype"):
            if not trigger.get(field_name):
                raise BadRequest(f"trigger.{field_name} missing")
        if not candidate_spec.get("entity_type"):
            raise BadRequest("candidate.entity_type missing")

        doc = Document(
            id="adhoc",
            text=context,
            sentences=((0, len(context)),),
            entities=(EntityMention("candidate", c_start, c_end,
                                    context[c_start:c_end], candidate_spec["entity_type"]),),
            events=(EventMention("event", t_start, t_end, context[t_start:t_end],
                                 trigger["type"], trigger["subtype"]),),
        )
        roles = payload.get("roles")
        if roles is not None and (not isinstance(roles, list)
                                  or any(not isinstance(r, str) for r in roles)):
            raise BadRequest("roles override must be a list of strings")
        threshold = payload.get("threshold", self.inference_config.threshold)
        try:
            InferenceConfig(threshold=float(threshold))
        except (TypeError, ValueError, RolecastError) as exc:
            raise BadRequest(f"bad threshold: {exc}") from exc
        return Candidate("adhoc", "event", "candidate"), doc, roles, float(threshold)

    def verbalize(self, payload: dict) -> dict:
        candidate, doc, roles, _ = self._build_instance(payload)
        with self._lock:
            library = self.library
        if roles is not None:
            unknown = sorted(set(roles) - set(library.templates))
            if unknown:
                raise UnknownRoleError(unknown[0])
        _, rows = _candidate_plan(candidate, doc, library, self.table, roles_override=roles)
        return {"hypotheses": [
            {"role": role, "template_id": template_id, "hypothesis": hypothesis}
            for role, template_id, hypothesis in rows
        ]}

    def predict(self, payload: dict) -> dict:
        candidate, doc, roles, threshold = self._build_instance(payload)
        with self._lock:
            library = self.library
        if roles is not None:
            unknown = sorted(set(roles) - set(library.templates))
            if unknown:
                raise UnknownRoleError(unknown[0])
        prediction = predict_role(
            candidate, doc, library, self.table, self.scorer,
            InferenceConfig(threshold=threshold), roles_override=roles,
        )
        record = prediction_to_record(prediction)
        record["threshold"] = threshold
        return record

    # -- sessions -----------------------------------------------------------

    def create_session(self) -> Session:
        session = Session(uuid.uuid4().hex)
        with self._lock:
            self.sessions[session.id] = session
        return session

    def session(self, session_id: str) -> Session:
        with self._lock:
            if session_id not in self.sessions:
                raise KeyError(session_id)
            return self.sessions[session_id]


def make_service_server(service: WorkbenchService, host: str = "127.0.0.1", port: int = 0):
    class Handler(JsonRequestHandler):
        def do_GET(self):
            try:
                if self.path == "/v1/health":
                    self.send_json(200, {"status": "ok"})
                    return
                if self.path == "/v1/templates":
                    self.send_json(200, service.library_record())
                    return
                match = _TEMPLATES_ROUTE.match(self.path)
                if match:
                    role = _unquote(match.group(1))
                    try:
                        templates = service.get_role_templates(role)
                    except KeyError:
                        self.send_error_json(404, f"unknown role {role!r}")
                        return
                    self.send_json(200, {"role": role, "templates": templates})
                    return
                match = _TIMERS_ROUTE.match(self.path)
                if match:
                    try:
                        session = service.session(match.group(1))
                    except KeyError:
                        self.send_error_json(404, "unknown session")
                        return
                    self.send_json(200, {
                        "id": session.id,
                        "timers": session.snapshot(),
                        "budget_seconds": ROLE_BUDGET_SECONDS,
                    })
                    return
                self.send_error_json(404, f"unknown path {self.path}")
            except Exception as exc:  # last-resort: keep the server alive
                self.send_error_json(500, f"internal error: {exc}")

        def do_POST(self):
            try:
                if self.path == "/v1/sessions":
                    session = service.create_session()
                    self.send_json(201, {"id": session.id, "budget_seconds": ROLE_BUDGET_SECONDS})
                    return
                match = _HEARTBEAT_ROUTE.match(self.path)
                if match:
                    self._heartbeat(match.group(1))
                    return
                if self.path == "/v1/verbalize":
                    self._call(service.verbalize)
                    return
                if self.path == "/v1/predict":
                    self._call(service.predict)
                    return
                self.send_error_json(404, f"unknown path {self.path}")
            except Exception as exc:
                self.send_error_json(500, f"internal error: {exc}")

        def do_PUT(self):
            try:
                match = _TEMPLATES_ROUTE.match(self.path)
                if not match:
                    self.send_error_json(404, f"unknown path {self.path}")
                    return
                role = _unquote(match.group(1))
                try:
                    payload = self.read_json()
                except BadRequest as exc:
                    self.send_error_json(400, str(exc))
                    return
                rows = payload.get("templates") if isinstance(payload, dict) else None
                if not isinstance(rows, list):
                    self.send_error_json(400, "body must be {'templates': [...]}")
                    return
                try:
                    templates = service.put_role_templates(role, rows)
                except TemplateError as exc:
                    self.send_error_json(422, str(exc))
                    return
                self.send_json(200, {"role": role, "templates": templates})
            except Exception as exc:
                self.send_error_json(500, f"internal error: {exc}")

        def _heartbeat(self, session_id: str):
            try:
                session = service.session(session_id)
            except KeyError:
                self.send_error_json(404, "unknown session")
                return
            try:
                payload = self.read_json()
            except BadRequest as exc:
                self.send_error_json(400, str(exc))
                return
            role = payload.get("role") if isinstance(payload, dict) else None
            seconds = payload.get("seconds") if isinstance(payload, dict) else None
            if not isinstance(role, str) or not role:
                self.send_error_json(400, "heartbeat needs a role")
                return
            if not isinstance(seconds, (int, float)) or seconds < 0:
                self.send_error_json(400, "heartbeat seconds must be >= 0")
                return
            timers = session.heartbeat(role, float(seconds))
            self.send_json(200, {"id": session.id, "timers": timers,
                                 "budget_seconds": ROLE_BUDGET_SECONDS})

        def _call(self, method):
            try:
                payload = self.read_json()
                if not isinstance(payload, dict):
                    raise BadRequest("request body must be a JSON object")
                result = method(payload)
            except BadRequest as exc:
                self.send_error_json(400, str(exc))
                return
            except UnknownRoleError as exc:
                self.send_error_json(404, str(exc))
                return
            except EntailmentError as exc:
                self.send_error_json(502, f"entailment backend failed: {exc}")
                return
            except (ConstraintError, TemplateError, RolecastError) as exc:
                self.send_error_json(400, str(exc))
                return
            self.send_json(200, result)

    server = make_server(Handler, host, port)
    server.service = service
    return server


def _unquote(segment: str) -> str:
    return unquote(segment)


def serve(config: ServiceConfig) -> None:
    """Blocking entry point used by the CLI."""
    service = WorkbenchService.from_config(config)
    server = make_service_server(service, config.host, config.port)
    try:
        server.serve_forever()
    finally:
        server.server_close()
