"""Crash-safe session store backed by per-session append-only journals.

Every mutation is one JSON line, flushed and fsynced before the call returns,
so replaying a journal prefix reconstructs exactly the in-memory log at that
point. Mutations are serialized per session id; distinct sessions proceed
independently.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import SchemaViolationError
from .sessions import SessionLog, SessionPlan, new_session, record_response
from .session_io import log_to_dict, plan_from_dict


@dataclass(frozen=True)
class SessionHandle:
    """Opaque claim ticket for one stored session."""

    session_id: str
    participant_id: str
    created_at: str


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


class SessionStore:
    def __init__(self, root) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._logs: dict[str, SessionLog] = {}
        self._handles: dict[str, SessionHandle] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry = threading.Lock()

    def _journal_path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.jsonl"

    def _lock(self, session_id: str) -> threading.Lock:
        with self._registry:
            return self._locks.setdefault(session_id, threading.Lock())

    def _append(self, session_id: str, event: dict) -> None:
        with open(self._journal_path(session_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def create(self, plan: SessionPlan, participant_id: str = "") -> str:
        session_id = uuid.uuid4().hex[:12]
        created_at = _utcnow()
        with self._lock(session_id):
            self._append(
                session_id,
                {
                    "event": "created",
                    "created_at": created_at,
                    "participant_id": participant_id,
                    "condition_label": plan.condition_label,
                    "plan": log_to_dict(new_session(plan))["plan"],
                },
            )
            log = new_session(plan, participant_id)
            log.started_at = created_at
            self._logs[session_id] = log
            self._handles[session_id] = SessionHandle(session_id, participant_id, created_at)
        return session_id

    def ids(self) -> list[str]:
        return sorted(self._logs)

    def get(self, session_id: str) -> SessionLog:
        return self._logs[session_id]

    def handle(self, session_id: str) -> SessionHandle:
        return self._handles[session_id]

    def record(self, session_id: str, trial_index: int, choice: str, rt_ms=None) -> SessionLog:
        with self._lock(session_id):
            log = self._logs[session_id]
            record_response(log, trial_index, choice, rt_ms)
            self._append(
                session_id,
                {
                    "event": "response",
                    "answered_at": _utcnow(),
                    "trial_index": trial_index,
                    "choice": choice,
                    "rt_ms": rt_ms,
                },
            )
            return log

    def load_existing(self) -> int:
        """Replay every journal under the root; returns the number recovered."""
        count = 0
        for path in sorted(self.root.glob("*.jsonl")):
            session_id = path.stem
            log = replay_journal(path)
            self._logs[session_id] = log
            self._handles[session_id] = SessionHandle(
                session_id, log.participant_id, log.started_at or ""
            )
            count += 1
        return count


def replay_journal(path) -> SessionLog:
    """Rebuild a session log by replaying its journal line by line."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaViolationError(f"journal {path} is empty")
    head = json.loads(lines[0])
    if head.get("event") != "created":
        raise SchemaViolationError(f"journal {path} does not start with a created event")
    plan = plan_from_dict(head["plan"], condition_label=head.get("condition_label", ""))
    log = new_session(plan, head.get("participant_id", ""))
    log.started_at = head.get("created_at")
    for line in lines[1:]:
        event = json.loads(line)
        if event.get("event") != "response":
            raise SchemaViolationError(f"unknown journal event {event.get('event')!r}")
        record_response(log, event["trial_index"], event["choice"], event.get("rt_ms"))
    return log
