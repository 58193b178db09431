"""Canonical session serialization.

Exports are canonical JSON (sorted keys, two-space indent, UTF-8, LF, trailing
newline) so identical logs produce byte-identical files. Imports revalidate
every session invariant: the plan is rebuilt from its seed and each recorded
trial must match the planned sequence exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import SchemaViolationError
from .sessions import (
    ORDER_COMPARISON_FIRST,
    ORDER_REFERENCE_FIRST,
    STATUS_COMPLETE,
    STATUS_PENDING,
    STATUS_RUNNING,
    SessionLog,
    SessionPlan,
    TrialRecord,
    build_session_plan,
)
from .textures import grit_from_um

_STATUSES = (STATUS_PENDING, STATUS_RUNNING, STATUS_COMPLETE)
_ORDERS = (ORDER_COMPARISON_FIRST, ORDER_REFERENCE_FIRST)


def canonical_json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode(
        "utf-8"
    )


def log_to_dict(log: SessionLog) -> dict:
    plan = log.plan
    return {
        "participant_id": log.participant_id,
        "condition_label": plan.condition_label,
        "plan": {
            "reference_um": plan.reference.particle_um,
            "comparisons_um": [c.particle_um for c in plan.comparisons],
            "reps": plan.reps_per_level,
            "seed": plan.seed,
            "per_grit": plan.per_grit,
        },
        "trials": [
            {
                "j": t.index,
                "comparison_um": t.comparison_um,
                "order": t.order,
                "replicate_ids": list(t.replicate_ids),
                "Y": t.response,
                "rt_ms": t.response_time_ms,
            }
            for t in log.trials
        ],
        "status": log.status,
    }


def _require(mapping, key, kind, where):
    if not isinstance(mapping, dict) or key not in mapping:
        raise SchemaViolationError("missing field", field=f"{where}.{key}")
    value = mapping[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaViolationError("expected a number", field=f"{where}.{key}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaViolationError("expected an integer", field=f"{where}.{key}")
        return value
    if not isinstance(value, kind):
        raise SchemaViolationError(f"expected {kind.__name__}", field=f"{where}.{key}")
    return value


def plan_from_dict(d: dict, condition_label: str = "") -> SessionPlan:
    reference_um = _require(d, "reference_um", float, "plan")
    comparisons_um = _require(d, "comparisons_um", list, "plan")
    if not comparisons_um:
        raise SchemaViolationError("must be non-empty", field="plan.comparisons_um")
    reps = _require(d, "reps", int, "plan")
    seed = _require(d, "seed", int, "plan")
    per_grit = d.get("per_grit", 2)
    if not isinstance(per_grit, int) or isinstance(per_grit, bool):
        raise SchemaViolationError("expected an integer", field="plan.per_grit")
    comparisons = [grit_from_um(float(um)) for um in comparisons_um]
    return build_session_plan(
        grit_from_um(reference_um),
        comparisons,
        reps,
        seed,
        condition_label=condition_label,
        per_grit=per_grit,
    )


def log_from_dict(d: dict) -> SessionLog:
    participant = _require(d, "participant_id", str, "session")
    condition = _require(d, "condition_label", str, "session")
    plan_dict = _require(d, "plan", dict, "session")
    trials = _require(d, "trials", list, "session")
    status = _require(d, "status", str, "session")
    if status not in _STATUSES:
        raise SchemaViolationError(f"unknown status {status!r}", field="session.status")

    plan = plan_from_dict(plan_dict, condition_label=condition)
    total = plan.total_trials
    if len(trials) > total:
        raise SchemaViolationError(
            f"{len(trials)} trials recorded but the plan holds {total}",
            field="session.trials",
        )
    if status == STATUS_COMPLETE and len(trials) != total:
        raise SchemaViolationError(
            f"status is complete but {len(trials)} of {total} trials are recorded",
            field="session.status",
        )
    if status != STATUS_COMPLETE and len(trials) == total:
        raise SchemaViolationError(
            "all trials are recorded but status is not complete", field="session.status"
        )

    records = []
    for pos, td in enumerate(trials):
        where = f"trials[{pos}]"
        j = _require(td, "j", int, where)
        if j != pos:
            raise SchemaViolationError(f"expected index {pos}, got {j}", field=f"{where}.j")
        planned = plan.trials[pos]
        comparison_um = _require(td, "comparison_um", float, where)
        if abs(comparison_um - planned.comparison.particle_um) > 1e-9:
            raise SchemaViolationError(
                f"comparison {comparison_um} does not match the planned "
                f"{planned.comparison.particle_um}",
                field=f"{where}.comparison_um",
            )
        order = _require(td, "order", str, where)
        if order not in _ORDERS:
            raise SchemaViolationError(f"unknown order {order!r}", field=f"{where}.order")
        if order != planned.order:
            raise SchemaViolationError(
                f"order {order!r} does not match the planned {planned.order!r}",
                field=f"{where}.order",
            )
        replicate_ids = _require(td, "replicate_ids", list, where)
        if list(replicate_ids) != [planned.ref_replicate, planned.comp_replicate]:
            raise SchemaViolationError(
                "replicate ids do not match the plan", field=f"{where}.replicate_ids"
            )
        y = _require(td, "Y", int, where)
        if y not in (0, 1):
            raise SchemaViolationError(f"Y must be 0 or 1, got {y}", field=f"{where}.Y")
        rt = td.get("rt_ms")
        if rt is not None:
            if isinstance(rt, bool) or not isinstance(rt, (int, float)) or rt < 0:
                raise SchemaViolationError(
                    "rt_ms must be a non-negative number or null", field=f"{where}.rt_ms"
                )
            rt = float(rt)
        records.append(
            TrialRecord(
                index=j,
                comparison_um=comparison_um,
                order=order,
                replicate_ids=(planned.ref_replicate, planned.comp_replicate),
                response=y,
                response_time_ms=rt,
            )
        )
    return SessionLog(plan=plan, participant_id=participant, trials=records, status=status)


def export_session(log: SessionLog, path) -> Path:
    path = Path(path)
    path.write_bytes(canonical_json_bytes(log_to_dict(log)))
    return path


def import_session(path) -> SessionLog:
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaViolationError(f"invalid JSON: {exc}") from exc
    return log_from_dict(data)
