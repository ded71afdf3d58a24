"""Command line interface.

Every subcommand is a thin wrapper over library calls; outputs are JSON
reports or CSV tables so downstream tooling can consume them directly.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

import numpy as np


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="skytwin",
                                     description="fast-time en route airspace simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario to completion")
    p.add_argument("--scenario", required=True)
    p.add_argument("--speed", type=float, default=None,
                   help="real-time multiple; omit for unbounded")
    p.add_argument("--log", default=None, help="write the event log here")
    p.add_argument("--metrics", default=None, help="write the per-tick metrics table here")

    p = sub.add_parser("serve", help="serve the gateway protocol over TCP")
    p.add_argument("--scenario", default=os.environ.get("SKYTWIN_SCENARIO"),
                   help="scenario path (default: $SKYTWIN_SCENARIO)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--mode", choices=["lockstep", "free-running"], default="lockstep")
    p.add_argument("--speed", type=float, default=None)
    p.add_argument("--zero-latency", action="store_true",
                   help="disable pilot response delay (testing)")

    p = sub.add_parser("fit", help="fit a trajectory correction model from tracks")
    p.add_argument("--tracks", required=True, help="track CSV (callsign,t,lat,lon,fl,gs,hdg)")
    p.add_argument("--type", required=True, dest="actype")
    p.add_argument("--phase", choices=["climb", "descent"], required=True)
    p.add_argument("--k", type=int, default=None, help="components per quantity (default: 95%% variance)")
    p.add_argument("--gmm-components", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coeff-dir", default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sample", help="draw a correction sample from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mean-mode", action="store_true")
    p.add_argument("--out", default="-")

    p = sub.add_parser("predict", help="closed-loop profile prediction")
    p.add_argument("--model", default=None)
    p.add_argument("--type", dest="actype", default="B738")
    p.add_argument("--fl0", type=float, required=True)
    p.add_argument("--target-fl", type=float, required=True)
    p.add_argument("--cas0", type=float, default=None)
    p.add_argument("--mode", choices=["mean", "sampled"], default="mean")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")

    p = sub.add_parser("generate", help="generate a seeded scenario")
    p.add_argument("--density", type=float, default=6.0, help="aircraft per 10 minutes")
    p.add_argument("--duration", type=float, default=1800.0)
    p.add_argument("--geometry", default="crossing",
                   choices=["crossing", "head-on", "overtaking", "vertical", "mixed"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="validate a scenario file")
    p.add_argument("--scenario", required=True)

    p = sub.add_parser("fidelity", help="distribution-fidelity pipeline on synthetic fixtures")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--corpus", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="fidelity_report.json")

    p = sub.add_parser("mae", help="mean-mode MAE pipeline on a planted-bias fixture")
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--bias-kt", type=float, default=15.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="mae_report.json")

    p = sub.add_parser("replicate", help="replication pipeline on synthetic exercises")
    p.add_argument("--exercises", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="replication_report.json")
    p.add_argument("--plot-data", default="replication_plot.json")

    p = sub.add_parser("replay", help="re-run a logged scenario and verify determinism")
    p.add_argument("--scenario", required=True)
    p.add_argument("--log", required=True)

    args = parser.parse_args(argv)
    return _COMMANDS[args.command](args)


def _cmd_run(args) -> int:
    from ..metrics import metrics_table
    from ..scenario.files import load_scenario, world_from_spec
    world = world_from_spec(load_scenario(args.scenario))
    result = world.run(speed_factor=args.speed)
    report = result["report"]
    print(json.dumps({"sim_time": result["sim_time"], "wall_s": round(result["wall_s"], 3),
                      "ticks": len(world.log.snapshots()), "lag_s": round(result["lag_s"], 3),
                      "los_count": report.los_count,
                      "fuel_proxy_kg": round(report.fuel_proxy_kg, 1)}))
    if args.log:
        from ..kernel.events import save_event_log
        save_event_log(world.log, args.log)
    if args.metrics:
        Path(args.metrics).write_text(metrics_table(world.log.records))
    return 0


def _cmd_serve(args) -> int:
    from ..kernel.world import LatencyModel
    from .server import GatewayServer

    if not args.scenario:
        print("serve needs --scenario or $SKYTWIN_SCENARIO", file=sys.stderr)
        return 2

    async def _serve():
        server = GatewayServer(
            args.scenario, mode=args.mode, speed_factor=args.speed,
            host=args.host, port=args.port,
            latency_override=LatencyModel(0.0, 0.0) if args.zero_latency else None,
        )
        port = await server.start()
        print(json.dumps({"listening": {"host": args.host, "port": port}}), flush=True)
        await server.serve_forever()

    try:
        asyncio.run(_serve())
    except KeyboardInterrupt:
        pass
    return 0


def _cmd_fit(args) -> int:
    from ..perf.coefficients import load_coefficients
    from ..perf.model import fit_model, save_model
    from ..perf.profiles import FlightProfile
    from ..scenario.tracks import import_tracks

    from ..atmosphere import tas_to_cas

    tracks, errors = import_tracks(Path(args.tracks))
    for e in errors:
        print(f"row error: {e}", file=sys.stderr)
    corpus = []
    for t in tracks:
        # the track feed carries ground speed; treat it as TAS in calm air
        fl = np.array([r.fl for r in t.rows])
        cas = np.array([tas_to_cas(max(r.gs, 60.0), r.fl) for r in t.rows])
        corpus.append(FlightProfile(
            t=np.array([r.t for r in t.rows]), fl=fl, cas=cas,
        ))
    coeffs = load_coefficients(args.actype, args.coeff_dir)
    model = fit_model(corpus, args.actype, args.phase, args.k,
                      args.gmm_components, args.seed, coeffs)
    save_model(model, args.out)
    print(json.dumps({"fitted": args.out, "corpus": len(corpus),
                      "components": {q: model.bases[q].n_components
                                     for q in ("cas", "thrust", "drag")}}))
    return 0


def _cmd_sample(args) -> int:
    from ..perf.model import load_model, mean_mode_correction, sample_correction
    model = load_model(args.model)
    corr = mean_mode_correction(model) if args.mean_mode else \
        sample_correction(model, args.seed)
    doc = {
        "fl_grid": corr.fl_grid.tolist(),
        "delta_cas": corr.delta_cas.tolist(),
        "thrust_mult": corr.thrust_mult.tolist(),
        "drag_mult": corr.drag_mult.tolist(),
        "seed": corr.seed_tag,
    }
    _write_out(args.out, json.dumps(doc, indent=1))
    return 0


def _cmd_predict(args) -> int:
    from ..atmosphere import WindGrid
    from ..perf.coefficients import load_coefficients
    from ..perf.model import identity_correction, load_model, mean_mode_correction, sample_correction
    from ..perf.tem import Guidance, Kinematics, predict_profile

    coeffs = load_coefficients(args.actype)
    if args.model:
        model = load_model(args.model)
        corr = mean_mode_correction(model) if args.mode == "mean" else \
            sample_correction(model, args.seed)
    else:
        corr = identity_correction()
    cas0 = args.cas0 if args.cas0 is not None else coeffs.base_cas(args.fl0)
    kin = Kinematics(lat=51.0, lon=0.0, fl=args.fl0, heading=90.0, cas=cas0)
    prof = predict_profile(kin, Guidance(target_fl=args.target_fl), corr.curves(),
                           coeffs, WindGrid.calm(), stop_after_level_s=10.0)
    lines = ["t_s,fl,cas_kt,rocd_fpm,dist_nm"]
    for i in range(len(prof)):
        lines.append(f"{prof.t[i]:.1f},{prof.fl[i]:.3f},{prof.cas[i]:.2f},"
                     f"{prof.rocd[i]:.1f},{prof.dist_nm[i]:.3f}")
    _write_out(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_generate(args) -> int:
    from ..scenario.generate import GenerationParams, generate_scenario
    from ..scenario.files import save_scenario
    spec = generate_scenario(GenerationParams(
        density_per_10min=args.density, duration_s=args.duration,
        conflict_geometry=args.geometry), args.seed)
    save_scenario(spec, args.out)
    print(json.dumps({"written": args.out,
                      "flights": len(spec.doc["traffic"]["flights"])}))
    return 0


def _cmd_validate(args) -> int:
    from ..scenario.files import ScenarioError, load_scenario
    try:
        spec = load_scenario(args.scenario)
    except ScenarioError as e:
        print(json.dumps({"valid": False, "code": e.code, "path": e.path,
                          "error": str(e)}))
        return 1
    print(json.dumps({"valid": True, "name": spec.name, "seed": spec.seed}))
    return 0


def _cmd_fidelity(args) -> int:
    from .fixtures import fidelity_fixture
    report = fidelity_fixture(n_corpus=args.corpus, n_samples=args.samples, seed=args.seed)
    Path(args.out).write_text(json.dumps(report, indent=1) + "\n")
    print(json.dumps({k: {"ks": v["ks"], "wasserstein": v["wasserstein"]}
                      for k, v in report["quantities"].items()}))
    return 0


def _cmd_mae(args) -> int:
    from .fixtures import mae_fixture
    report = mae_fixture(n_runs=args.runs, bias_kt=args.bias_kt, seed=args.seed)
    Path(args.out).write_text(json.dumps(report, indent=1) + "\n")
    print(json.dumps({"cas_ratio": report["cas"]["ratio"],
                      "rocd_ratio": report["rocd"]["ratio"]}))
    return 0


def _cmd_replicate(args) -> int:
    from .fixtures import replication_fixture
    report, plot = replication_fixture(n_exercises=args.exercises, seed=args.seed)
    Path(args.out).write_text(json.dumps(report, indent=1) + "\n")
    Path(args.plot_data).write_text(json.dumps(plot, indent=1) + "\n")
    print(json.dumps({"passed": report["passed"],
                      "exercises": len(report["exercises"])}))
    return 0


def _cmd_replay(args) -> int:
    from ..kernel.events import load_event_log
    from ..scenario.files import load_scenario, world_from_spec
    from .replay import rerun_from_log

    logged = load_event_log(args.log)
    world = rerun_from_log(load_scenario(args.scenario), logged)
    identical = world.log.canonical_bytes() == logged.canonical_bytes()
    print(json.dumps({"identical": identical,
                      "snapshots": len(world.log.snapshots())}))
    return 0 if identical else 1


def _write_out(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


_COMMANDS = {
    "run": _cmd_run, "serve": _cmd_serve, "fit": _cmd_fit, "sample": _cmd_sample,
    "predict": _cmd_predict, "generate": _cmd_generate, "validate": _cmd_validate,
    "fidelity": _cmd_fidelity, "mae": _cmd_mae, "replicate": _cmd_replicate,
    "replay": _cmd_replay,
}


if __name__ == "__main__":
    sys.exit(main())
