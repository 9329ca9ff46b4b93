"""HTTP API for the interactive workbench.

Sessions are in-memory only, expire after an idle TTL, and hold a base
dataset plus an ordered history of committed transforms; the current dataset
is always reproducible by replaying that history. Analyses run one at a time
per session (409 on overlap); different sessions are independent.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .analysis import analyze
from .dataset import Dataset, load_dataset, parse_schema_config, ColumnMeta, ColumnClass
from .entropy import AuxModel
from .errors import EntropyLensError
from .linkage import attach_linked_table, link_spec_from_config
from .report import render_report, separation_plan_doc
from .risky import RiskPolicy, find_risky_combinations
from .strategies import (
    apply_generalization,
    apply_hiding,
    apply_minimization,
    plan_hiding,
    plan_minimization,
    plan_separation,
    verify_separation,
)

TRANSFORMS = ("generalize", "minimize", "hide", "separate", "link")


@dataclass
class Session:
    base: Dataset
    current: Dataset
    policy: RiskPolicy = field(default_factory=lambda: RiskPolicy(epsilon0=0.5))
    aux_columns: tuple[str, ...] = ()
    log_base: float = 2.0
    latest_bundle: bytes | None = None
    history: list[dict] = field(default_factory=list)
    last_access: float = field(default_factory=time.monotonic)
    analysis_lock: threading.Lock = field(default_factory=threading.Lock)


def _error(status: int, name: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": name, "detail": detail})


def _apply_transform(dataset: Dataset, transform: dict) -> tuple[Dataset, dict]:
    """Apply one named transform; returns (new dataset, extra response info)."""
    if "generalize" in transform:
        spec = transform["generalize"]
        return apply_generalization(dataset, spec["column"], int(spec["level"])), {}
    if "minimize" in transform:
        plan = plan_minimization(dataset)
        stripped = apply_minimization(dataset, plan.strip_columns)
        if stripped is None:
            raise EntropyLensError("minimization would strip every column")
        return stripped, {"stripped": sorted(plan.strip_columns)}
    if "hide" in transform:
        plan = plan_hiding(dataset)
        seed = int(transform["hide"].get("seed", 0)) if isinstance(
            transform.get("hide"), dict) else 0
        _, working = apply_hiding(dataset, plan, seed=seed)
        return working, {"vault_columns": sorted(plan.vault_columns)}
    if "separate" in transform:
        # separation reshapes storage, not values; the dataset is unchanged
        # and the grouping plan is computed at request time
        return dataset, {}
    if "link" in transform:
        spec_doc = transform["link"]
        schema = spec_doc["schema"]
        linked = load_dataset(spec_doc["csv"].encode("utf-8"), schema,
                              name=spec_doc.get("name", "linked"))
        spec = link_spec_from_config(spec_doc["spec"])
        return attach_linked_table(dataset, linked, spec), {}
    raise EntropyLensError(
        f"transform must be one of {TRANSFORMS}, got {sorted(transform)}")


def create_app(max_rows: int = 1_000_000, max_columns: int = 64,
               session_ttl: float = 3600.0) -> FastAPI:
    app = FastAPI(title="entropylens")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def _purge():
        now = time.monotonic()
        with registry_lock:
            stale = [sid for sid, s in sessions.items()
                     if now - s.last_access > session_ttl]
            for sid in stale:
                del sessions[sid]

    def _get(session_id: str) -> Session | None:
        _purge()
        session = sessions.get(session_id)
        if session is not None:
            session.last_access = time.monotonic()
        return session

    def _policy_doc(session: Session) -> dict:
        p = session.policy
        trigger = p.trigger if p.fraction is None else {
            "fraction_at_least": p.fraction}
        return {
            "epsilon0": p.epsilon0,
            "k_max": p.max_subset_size,
            "aux_columns": sorted(session.aux_columns),
            "log_base": session.log_base,
            "risk_trigger": trigger,
        }

    def _summary(dataset: Dataset, session: Session) -> dict:
        aux = AuxModel.of(dataset, [c for c in session.aux_columns
                                    if c in dataset.column_names])
        report = find_risky_combinations(dataset, aux, session.policy)
        mins = [report.evaluated[s].min_epsilon for s in report.evaluated]
        fractions = [report.evaluated[s].at_risk_fraction
                     for s in report.evaluated]
        return {
            "min_epsilon": min(mins) if mins else 1.0,
            "at_risk_fraction": max(fractions) if fractions else 0.0,
            "minimal_risky": sorted(sorted(s.columns)
                                    for s in report.minimal_risky),
            # per-subset minima let clients show the delta for the subset a
            # transform targets (the global minimum may be pinned at zero by
            # an unrelated combination)
            "subsets": {
                ",".join(sorted(s.columns)): {
                    "min_epsilon": summary.min_epsilon,
                    "at_risk_fraction": summary.at_risk_fraction,
                }
                for s, summary in report.evaluated.items()
            },
        }

    @app.post("/sessions")
    async def create_session(request: Request):
        form = await request.form()
        if "data" not in form or "schema" not in form:
            return _error(400, "MissingUpload",
                          "multipart fields 'data' and 'schema' are required")
        csv_bytes = await form["data"].read() if hasattr(form["data"], "read") \
            else str(form["data"]).encode("utf-8")
        schema_raw = await form["schema"].read() if hasattr(form["schema"], "read") \
            else str(form["schema"]).encode("utf-8")
        try:
            schema = json.loads(schema_raw.decode("utf-8"))
            dataset = load_dataset(csv_bytes, schema, name="session")
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            return _error(400, "MalformedDocument", str(exc))
        except EntropyLensError as exc:
            return _error(400, exc.name, str(exc))
        if dataset.n_records > max_rows or len(dataset.columns) > max_columns:
            return _error(413, "DatasetTooLarge",
                          f"caps: {max_rows} rows, {max_columns} columns")
        session_id = secrets.token_urlsafe(16)
        with registry_lock:
            sessions[session_id] = Session(base=dataset, current=dataset)
        return {"session_id": session_id, "n_records": dataset.n_records,
                "columns": [c.name for c in dataset.columns]}

    @app.put("/sessions/{session_id}/config")
    async def set_config(session_id: str, request: Request):
        session = _get(session_id)
        if session is None:
            return _error(404, "UnknownSession", session_id)
        body = await request.json()
        try:
            trigger = body.get("risk_trigger", "any_record")
            fraction = None
            if isinstance(trigger, dict):
                fraction = float(trigger["fraction_at_least"])
                trigger = "fraction_at_least"
            session.policy = RiskPolicy(
                epsilon0=float(body.get("epsilon0", session.policy.epsilon0)),
                max_subset_size=int(body.get("k_max",
                                             session.policy.max_subset_size)),
                trigger=trigger, fraction=fraction,
            )
            aux = body.get("aux_columns")
            if aux is not None:
                session.aux_columns = AuxModel.of(
                    session.current, aux).known_columns
            session.log_base = float(body.get("log_base", session.log_base))
        except (EntropyLensError, ValueError, KeyError) as exc:
            name = exc.name if isinstance(exc, EntropyLensError) else "InvalidConfig"
            return _error(400, name, str(exc))
        return _policy_doc(session)

    @app.put("/sessions/{session_id}/columns/{name}")
    async def set_column(session_id: str, name: str, request: Request):
        session = _get(session_id)
        if session is None:
            return _error(404, "UnknownSession", session_id)
        body = await request.json()
        try:
            meta = session.current.meta(name)
            new_meta = ColumnMeta(
                name=name,
                column_class=ColumnClass(body.get("class",
                                                  meta.column_class.value)),
                consented=bool(body.get("consented", meta.consented)),
                hierarchy=meta.hierarchy,
            )
            session.current = session.current.with_meta(name, new_meta)
            session.base = session.base.with_meta(name, new_meta) \
                if name in session.base.column_names else session.base
        except (EntropyLensError, ValueError) as exc:
            name_ = exc.name if isinstance(exc, EntropyLensError) else "InvalidConfig"
            return _error(400, name_, str(exc))
        return {"name": name, "class": new_meta.column_class.value,
                "consented": new_meta.consented}

    @app.post("/sessions/{session_id}/analyze")
    def run_analysis(session_id: str):
        session = _get(session_id)
        if session is None:
            return _error(404, "UnknownSession", session_id)
        if not session.analysis_lock.acquire(blocking=False):
            return _error(409, "AnalysisInProgress",
                          "another analysis is running for this session")
        try:
            aux = AuxModel.of(session.current,
                              [c for c in session.aux_columns
                               if c in session.current.column_names])
            bundle = analyze(session.current, aux, session.policy,
                             log_base=session.log_base)
            session.latest_bundle = render_report(bundle, "json")
        except EntropyLensError as exc:
            return _error(400, exc.name, str(exc))
        finally:
            session.analysis_lock.release()
        return Response(content=session.latest_bundle,
                        media_type="application/json")

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str):
        session = _get(session_id)
        if session is None:
            return _error(404, "UnknownSession", session_id)
        if session.latest_bundle is None:
            return _error(404, "NoAnalysisYet",
                          "run POST /sessions/{id}/analyze first")
        return Response(content=session.latest_bundle,
                        media_type="application/json")

    @app.post("/sessions/{session_id}/whatif")
    async def whatif(session_id: str, request: Request):
        session = _get(session_id)
        if session is None:
            return _error(404, "UnknownSession", session_id)
        body = await request.json()
        commit = bool(body.pop("commit", False))
        transform = {k: v for k, v in body.items() if k in TRANSFORMS}
        if len(transform) != 1:
            return _error(400, "InvalidTransform",
                          f"body must carry exactly one of {TRANSFORMS}")
        try:
            before = _summary(session.current, session)
            if "separate" in transform:
                aux = AuxModel.of(session.current,
                                  [c for c in session.aux_columns
                                   if c in session.current.column_names])
                report = find_risky_combinations(session.current, aux,
                                                 session.policy)
                plan = plan_separation(report.minimal_risky,
                                       session.current.quasi_columns)
                extra = {"plan": separation_plan_doc(
                    plan, verify_separation(plan, report.minimal_risky))}
                transformed = session.current
            else:
                transformed, extra = _apply_transform(session.current, transform)
            after = _summary(transformed, session)
        except EntropyLensError as exc:
            return _error(400, exc.name, str(exc))
        except (KeyError, ValueError, TypeError) as exc:
            return _error(400, "InvalidTransform", str(exc))
        if commit:
            session.current = transformed
            session.history.append(transform)
            session.latest_bundle = None
        return {"before": before, "after": after, "committed": commit, **extra}

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = _get(session_id)
        if session is None:
            return _error(404, "UnknownSession", session_id)
        if not session.history:
            return _error(400, "NothingToUndo", "history is empty")
        session.history.pop()
        current = session.base
        for transform in session.history:
            current, _ = _apply_transform(current, transform)
        session.current = current
        session.latest_bundle = None
        return {"history_depth": len(session.history)}

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        with registry_lock:
            if session_id not in sessions:
                return _error(404, "UnknownSession", session_id)
            del sessions[session_id]
        return {"deleted": session_id}

    @app.get("/transforms")
    def transforms():
        return {"transforms": list(TRANSFORMS)}

    return app
