"""Command-line driver: texture synthesis, batch simulation, fitting, and
report aggregation, plus the session service. All outputs are canonical JSON
or seeded CSV, so a fixed seed triple makes the whole pipeline deterministic
byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import WorkbenchConfig
from .errors import InvalidSpecError
from .session_io import canonical_json_bytes, export_session, import_session
from .sessions import build_session_plan, run_simulated_session, trials_from_log
from .stats.psychometric import fit_report
from .textures import (
    OBSERVER_ANALYTIC,
    OBSERVER_SIGNAL_CHAIN,
    ObserverModel,
    TextureModel,
    build_stimulus_library,
    canonical_grit,
    save_library,
)


def _parse_grits(spec: str):
    return [canonical_grit(g.strip()) for g in spec.split(",") if g.strip()]


def _load_config(path) -> WorkbenchConfig:
    return WorkbenchConfig.from_file(path) if path else WorkbenchConfig()


def _write_json(payload: dict, out: str | None) -> None:
    data = canonical_json_bytes(payload)
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def cmd_textures(args) -> int:
    model = TextureModel(seed=args.seed, base_rms=args.base_rms)
    library = build_stimulus_library(
        _parse_grits(args.grits), per_grit=args.per_grit, model=model,
        duration_s=args.duration,
    )
    manifest = save_library(library, args.out)
    print(f"wrote {len(library.entries)} traces and {manifest}")
    return 0


def cmd_simulate(args) -> int:
    if args.observer == OBSERVER_ANALYTIC:
        observer = ObserverModel(
            OBSERVER_ANALYTIC, beta0=args.beta0, beta1=args.beta1, seed=args.seed
        )
        library = None
    else:
        observer = ObserverModel(OBSERVER_SIGNAL_CHAIN, sigma=args.sigma, seed=args.seed)
        grits = _parse_grits(args.comparisons)
        reference = canonical_grit(args.reference)
        all_grits = [reference] + [g for g in grits if g.p_grade != reference.p_grade]
        library = build_stimulus_library(
            all_grits,
            per_grit=args.per_grit,
            model=TextureModel(seed=args.texture_seed),
            duration_s=args.duration,
        )
    plan = build_session_plan(
        canonical_grit(args.reference),
        _parse_grits(args.comparisons),
        reps=args.reps,
        seed=args.plan_seed,
        condition_label=args.condition_label,
        per_grit=args.per_grit,
    )
    log = run_simulated_session(plan, observer, library, participant_id=args.participant)
    export_session(log, args.trials_out)
    print(f"wrote {log.answered}-trial session to {args.trials_out}")
    return 0


def cmd_fit(args) -> int:
    log = import_session(args.infile)
    report = fit_report(
        trials_from_log(log), link=args.link, n_resamples=args.bootstrap, seed=args.seed
    )
    _write_json(report, args.out)
    return 0


def cmd_report(args) -> int:
    in_dir = Path(args.indir)
    files = sorted(p for p in in_dir.glob("*.json") if p.name != "manifest.json")
    if not files:
        raise InvalidSpecError(f"no session logs found under {in_dir}")
    sessions = []
    by_condition: dict[str, list] = {}
    for path in files:
        log = import_session(path)
        fit = fit_report(
            trials_from_log(log), link=args.link, n_resamples=args.bootstrap, seed=args.seed
        )
        sessions.append(
            {
                "file": path.name,
                "participant_id": log.participant_id,
                "condition_label": log.plan.condition_label,
                "n_trials": log.answered,
                "fit": fit,
            }
        )
        by_condition.setdefault(log.plan.condition_label, []).append(fit)

    def summarize(fits):
        return {
            "n_sessions": len(fits),
            "median_jnd_um": float(np.median([f["jnd_um"] for f in fits])),
            "median_pse_um": float(np.median([f["pse_um"] for f in fits])),
        }

    report = {
        "link": args.link,
        "bootstrap": args.bootstrap,
        "seed": args.seed,
        "sessions": sessions,
        "summary": summarize([s["fit"] for s in sessions]),
        "by_condition": {label: summarize(fits) for label, fits in by_condition.items()},
    }
    _write_json(report, args.out)
    return 0


def cmd_serve(args) -> int:
    config = _load_config(args.config)
    if args.port:
        config.service_port = args.port
    if args.data_dir:
        config.data_dir = args.data_dir
    config.validate()
    from .service import serve

    serve(config, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hapticbench",
        description="Vibrotactile texture rendering and roughness psychophysics workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("textures", help="synthesize a stimulus library to CSV + manifest")
    p.add_argument("--grits", default="P1000,P220,P120,P80,P60")
    p.add_argument("--per-grit", type=int, default=2)
    p.add_argument("--duration", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=3)
    p.add_argument("--base-rms", type=float, default=0.02)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_textures)

    p = sub.add_parser("simulate", help="run one simulated constant-stimuli session")
    p.add_argument("--observer", choices=[OBSERVER_ANALYTIC, "chain"], default=OBSERVER_ANALYTIC)
    p.add_argument("--beta0", type=float, default=-2.326)
    p.add_argument("--beta1", type=float, default=0.01701)
    p.add_argument("--sigma", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=1, help="observer seed")
    p.add_argument("--plan-seed", type=int, default=0)
    p.add_argument("--texture-seed", type=int, default=3)
    p.add_argument("--reference", default="P120")
    p.add_argument("--comparisons", default="P1000,P220,P120,P80,P60")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--per-grit", type=int, default=2)
    p.add_argument("--duration", type=float, default=2.0)
    p.add_argument("--condition-label", default="A")
    p.add_argument("--participant", default="sim")
    p.add_argument("--trials-out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit one exported session log")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--link", choices=["logit", "probit"], default="logit")
    p.add_argument("--bootstrap", type=int, default=2000)
    p.add_argument("--seed", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="fit every session log in a directory")
    p.add_argument("--in", dest="indir", required=True)
    p.add_argument("--link", choices=["logit", "probit"], default="logit")
    p.add_argument("--bootstrap", type=int, default=0)
    p.add_argument("--seed", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the live session service")
    p.add_argument("--port", type=int)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--config")
    p.add_argument("--data-dir")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "observer", None) == "chain":
        args.observer = OBSERVER_SIGNAL_CHAIN
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
