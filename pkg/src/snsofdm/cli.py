"""Command-line interface.

Exit codes: 0 success, 1 configuration error, 2 runtime error. Errors are
also written to stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from snsofdm.config import ConfigError
from snsofdm.iq import IqFormatError, read_iq
from snsofdm.scenario import ScenarioError, Scenario, bundled, bundled_names, dumps, load_scenario
from snsofdm.waveform import SymbolMatrix, generate_symbols

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("snsofdm")


def _resolve_path(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    if name in bundled_names() or f"{name}.scn" in bundled_names():
        return bundled(name)
    return path


def _scenario(args) -> Scenario:
    scenario = load_scenario(_resolve_path(args.scenario))
    overrides = {
        "radar.sub_sampling_ratio": getattr(args, "L", None),
        "radar.num_symbols": getattr(args, "num_symbols", None),
        "seed": getattr(args, "seed", None),
        "channel_model": getattr(args, "channel", None),
        "trials": getattr(args, "trials", None),
        "noise_dbm": getattr(args, "noise_dbm", None),
        "smnc.enabled": False if getattr(args, "no_smnc", False) else None,
        "smnc.epsilon_db": getattr(args, "epsilon", None),
    }
    if getattr(args, "l_values", None):
        overrides["sweep.l_values"] = args.l_values
    if getattr(args, "doppler", None):
        overrides["sweep.normalized_doppler"] = args.doppler
    return scenario.with_overrides(**overrides)


def _add_overrides(p: argparse.ArgumentParser):
    p.add_argument("--L", type=int, help="sub-sampling ratio")
    p.add_argument("--num-symbols", type=int, help="OFDM symbols per frame")
    p.add_argument("--seed", type=int)
    p.add_argument("--channel", choices=["freq", "time"], help="channel model")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials for sweeps")
    p.add_argument("--noise-dbm", type=float)
    p.add_argument("--epsilon", type=float, help="SMNC convergence threshold in dB")
    p.add_argument("--no-smnc", action="store_true", help="skip symbol-mismatch noise cancellation")
    p.add_argument("-o", "--out", default=None, help="output directory (default: ./<scenario name>_out)")


def _out_dir(args, scenario: Scenario) -> Path:
    return Path(args.out) if args.out else Path(f"{scenario.name or 'run'}_out")


def _emit(bundle, scenario: Scenario, args, outputs=None) -> None:
    if outputs is not None:
        bundle.outputs = outputs
    paths = bundle.write(_out_dir(args, scenario), scenario.name or "run")
    rep = bundle.report
    pre = [d["range_bin"] for d in rep["detections_pre"]]
    post = [d["range_bin"] for d in rep["detections_post"]]
    m = rep["metrics"]
    print(f"detections pre-SMNC: {pre}  post-SMNC: {post}")
    print(f"ISL pre {m['isl_pre_db']:.2f} dB, post {m['isl_post_db']:.2f} dB; floor post {m['floor_post_dbm']:.2f} dBm")
    if rep.get("smnc"):
        s = rep["smnc"]
        print(f"SMNC: {s['iterations']} iterations, status {s['status']}")
    for p in paths:
        print(f"wrote {p}")


def cmd_run(args) -> int:
    from snsofdm.pipeline import run_pipeline

    scenario = _scenario(args)
    outputs = list(scenario.outputs)
    if args.iq and "iq_capture" not in outputs:
        outputs.append("iq_capture")
    scenario = scenario.with_overrides(outputs=outputs)
    _emit(run_pipeline(scenario), scenario, args)
    return EXIT_OK


def _cmd_sweep(args, kind) -> int:
    from snsofdm.pipeline import run_pipeline

    scenario = _scenario(args)
    scenario = scenario.with_overrides(outputs=[kind, "report"])
    bundle = run_pipeline(scenario)
    result = bundle.sweep_l if kind == "sweep_l" else bundle.sweep_doppler
    for row in result.rows:
        print("  ".join(f"{k}={v:.2f}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))
    for item in result.skipped:
        print(f"skipped L={item['L']}: {item['reason']}")
    print(json.dumps(result.checks, default=str))
    for p in bundle.write(_out_dir(args, scenario), scenario.name or "run"):
        print(f"wrote {p}")
    return EXIT_OK


def _load_symbols(source: str, scenario: Scenario) -> SymbolMatrix:
    path = Path(source)
    if path.suffix == ".npy" and path.exists():
        return SymbolMatrix(np.load(path), scenario.constellation)
    try:
        seed = int(source)
    except ValueError:
        raise ScenarioError([("--symbols", None, f"expected a seed or a .npy file, got {source!r}")]) from None
    return generate_symbols(scenario.radar.replace(rng_seed=seed), scenario.constellation)


def cmd_ingest(args) -> int:
    from snsofdm.pipeline import ingest_capture

    scenario = _scenario(args)
    capture = read_iq(args.iq_file)
    symbols = _load_symbols(args.symbols, scenario)
    bundle = ingest_capture(capture, symbols, scenario)
    _emit(bundle, scenario, args, outputs=["profile_csv", "report"])
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = _scenario(args)
    for w in scenario.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.canonical:
        sys.stdout.write(dumps(scenario))
    else:
        print(f"{args.scenario}: ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snsofdm", description="Sub-Nyquist sampling OFDM radar simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write profile CSV / report")
    p.add_argument("scenario", help="scenario file or bundled name (two_targets, ratio_sweep, doppler_sweep)")
    p.add_argument("--iq", action="store_true", help="also write the simulated B/L-rate capture")
    _add_overrides(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-l", help="Monte-Carlo sweep over sub-sampling ratios")
    p.add_argument("scenario", nargs="?", default="ratio_sweep")
    p.add_argument("--l-values", type=int, nargs="+")
    _add_overrides(p)
    p.set_defaults(func=lambda a: _cmd_sweep(a, "sweep_l"))

    p = sub.add_parser("sweep-doppler", help="post-SMNC SNR versus normalized Doppler")
    p.add_argument("scenario", nargs="?", default="doppler_sweep")
    p.add_argument("--l-values", type=int, nargs="+")
    p.add_argument("--doppler", type=float, nargs="+", help="normalized Doppler grid")
    _add_overrides(p)
    p.set_defaults(func=lambda a: _cmd_sweep(a, "sweep_doppler"))

    p = sub.add_parser("ingest", help="process a binary IQ capture with known symbols")
    p.add_argument("iq_file")
    p.add_argument("--symbols", required=True, help="symbol seed or .npy symbol matrix")
    p.add_argument("--scenario", default="two_targets", help="scenario supplying radar/CFAR/SMNC settings")
    _add_overrides(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")
    p.add_argument("--canonical", action="store_true", help="print the defaults-filled canonical form")
    _add_overrides(p)
    p.set_defaults(func=cmd_validate)
    return parser


def _error(kind: str, exc: Exception, code: int) -> int:
    payload = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ScenarioError):
        payload["problems"] = [{"field": f, "line": ln, "message": m} for f, ln, m in exc.problems]
    if isinstance(exc, IqFormatError):
        payload["code"] = exc.code
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, ConfigError) as exc:
        return _error("config", exc, EXIT_CONFIG)
    except FileNotFoundError as exc:
        return _error("config", exc, EXIT_CONFIG)
    except Exception as exc:  # noqa: BLE001 - every failure maps to an exit code
        log.debug("runtime failure", exc_info=True)
        return _error("runtime", exc, EXIT_RUNTIME)


if __name__ == "__main__":
    sys.exit(main())
