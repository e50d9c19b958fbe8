"""End-to-end orchestration and result emission."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from snsofdm import __version__
from snsofdm.analysis import Stage, predict_snr, sweep_doppler, sweep_L
from snsofdm.config import SPEED_OF_LIGHT, RadarConfig, mw_to_dbm
from snsofdm.detect import RangeDopplerProduct, cfar_detect, doppler_process, extract_targets, range_profiles
from snsofdm.iq import IqCapture
from snsofdm.metrics import measure_isl, sidelobe_level_db
from snsofdm.sampler import demodulate_folded, synthesize_folded
from snsofdm.scenario import Scenario
from snsofdm.simulate import simulate_frame
from snsofdm.smnc import run_smnc
from snsofdm.unfold import unfold_full
from snsofdm.waveform import SymbolMatrix

log = logging.getLogger(__name__)

PROFILE_COLUMNS = ("range_bin", "range_m", "power_pre_dbm", "power_post_dbm")


def _finite(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _clean(obj):
    """Make a report JSON-safe: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float):
        return _finite(obj)
    return obj


@dataclass
class ResultBundle:
    report: dict
    product_pre: RangeDopplerProduct
    product_post: RangeDopplerProduct
    range_resolution: float
    sweep_l: object = None
    sweep_doppler: object = None
    iq_capture: IqCapture | None = None
    outputs: list = field(default_factory=list)

    def profile_rows(self):
        pre = self.product_pre.power_dbm()
        post = self.product_post.power_dbm()
        for b in range(pre.size):
            yield b, b * self.range_resolution, pre[b], post[b]

    def write(self, out_dir, stem="result") -> list[Path]:
        from snsofdm.iq import write_iq

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if "profile_csv" in self.outputs:
            path = out / f"{stem}_profile.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(PROFILE_COLUMNS)
                for b, r, pre, post in self.profile_rows():
                    w.writerow([b, f"{r:.6f}", f"{pre:.6f}", f"{post:.6f}"])
            written.append(path)
        for kind, result in (("sweep_l", self.sweep_l), ("sweep_doppler", self.sweep_doppler)):
            if kind in self.outputs and result is not None:
                written.append(write_table(out / f"{stem}_{kind}.csv", result.rows))
        if "iq_capture" in self.outputs and self.iq_capture is not None:
            path = out / f"{stem}_rx.iq"
            write_iq(path, self.iq_capture)
            written.append(path)
        if "report" in self.outputs:
            path = out / f"{stem}_report.json"
            path.write_text(dumps_report(self.report))
            written.append(path)
        return written


def dumps_report(report: dict) -> str:
    return json.dumps(_clean(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_table(path, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if rows:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for row in rows:
                w.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in row.items()})
    return path


def _detection_entries(product, detections, config: RadarConfig) -> list[dict]:
    entries = []
    dmap = doppler_process(product) if product.num_symbols > 1 else None
    for det in extract_targets(product, detections):
        gains = det.complex_gains
        entry = {
            "range_bin": det.range_bin,
            "range_m": det.range_bin * config.range_resolution,
            "power_dbm": float(mw_to_dbm(det.power)),
            "snr_db": det.snr_db,
            "gain_power_dbm": float(mw_to_dbm(np.mean(np.abs(gains) ** 2))),
            "gain_phase_deg": float(np.degrees(np.angle(gains[0]))),
        }
        if dmap is not None:
            ns = product.num_symbols
            m = int(np.argmax(np.abs(dmap[det.range_bin])))
            m_signed = m - ns if m >= ns / 2 else m
            omega = 2 * np.pi * m_signed / (ns * config.symbol_duration)
            entry["doppler_bin"] = m
            entry["velocity_mps"] = omega * SPEED_OF_LIGHT / (4 * np.pi * config.carrier_freq)
        entries.append(entry)
    return entries


def process_folded(z, symbols: SymbolMatrix, scenario: Scenario, config: RadarConfig | None = None):
    """Unfold, cancel mismatch noise and detect. Shared by simulation and ingest."""
    config = config or scenario.radar
    cfar = scenario.cfar
    d0 = unfold_full(z, symbols)
    q0 = range_profiles(d0)
    looks = config.num_symbols
    pre = cfar_detect(q0.integrated, cfar, looks, config.range_resolution)
    smnc = scenario.smnc
    report = None
    if smnc["enabled"]:
        q, report = run_smnc(d0, symbols, config, cfar, smnc["epsilon_db"], smnc["max_iters"])
        post = list(q.detections)
    else:
        q, post = q0, pre
    return q0, pre, q, post, report


def _metrics(q0, pre, q, post, config: RadarConfig, guard: int) -> dict:
    ns = config.num_symbols

    def peaks(product, dets):
        return [d.range_bin for d in dets] or [int(np.argmax(product.integrated))]

    out = {
        "isl_pre_db": measure_isl(q0.integrated, peaks(q0, pre), guard),
        "isl_post_db": measure_isl(q.integrated, peaks(q, post), guard),
        "floor_pre_dbm": sidelobe_level_db(q0.integrated / ns, peaks(q0, pre), guard),
        "floor_post_dbm": sidelobe_level_db(q.integrated / ns, peaks(q, post), guard),
        "folded_noise_dbm": float(mw_to_dbm(config.noise_power * config.sub_sampling_ratio)),
    }
    return out


def _predictions(scenario: Scenario, config: RadarConfig) -> dict:
    if not len(scenario.targets):
        return {}
    pred = {
        "snr_before_smnc_db": predict_snr(scenario.targets, config, Stage.BEFORE_SMNC),
        "snr_after_smnc_db": predict_snr(scenario.targets, config, Stage.AFTER_SMNC),
    }
    if config.sub_sampling_ratio > 1:
        pred["snr_strong_target_db"] = predict_snr(scenario.targets, config, Stage.STRONG_TARGET)
    return pred


def _derived(config: RadarConfig) -> dict:
    return {
        "subcarrier_spacing_hz": config.subcarrier_spacing,
        "symbol_duration_s": config.symbol_duration,
        "cp_samples": config.cp_samples,
        "adc_rate_sps": config.adc_rate,
        "range_resolution_m": config.range_resolution,
        "max_range_m": config.max_range,
        "noise_power_mw": config.noise_power,
    }


def build_report(scenario: Scenario, config: RadarConfig, q0, pre, q, post, smnc_report, extra=None) -> dict:
    report = {
        "tool": {"name": "snsofdm", "version": __version__},
        "scenario": scenario.document,
        "derived": _derived(config),
        "targets": [
            {
                "range_bin": t.delay * config.bandwidth,
                "range_m": t.range_m,
                "power_dbm": float(mw_to_dbm(t.power)),
                "normalized_doppler": t.normalized_doppler(config),
            }
            for t in scenario.targets
        ],
        "detections_pre": _detection_entries(q0, pre, config),
        "detections_post": _detection_entries(q, post, config),
        "smnc": smnc_report.to_dict() if smnc_report is not None else None,
        "metrics": _metrics(q0, pre, q, post, config, scenario.cfar.guard_cells),
        "predictions": _predictions(scenario, config),
        "warnings": list(scenario.warnings),
    }
    if extra:
        report.update(extra)
    return report


def capture_from_frame(frame, config: RadarConfig) -> IqCapture:
    rx = frame.rx_sub if frame.rx_sub is not None else synthesize_folded(frame.folded, config)
    return IqCapture(rx.samples, rx.sample_rate, config.carrier_freq)


def run_pipeline(scenario: Scenario) -> ResultBundle:
    """Simulate the scenario once and, when selected, run the sweeps."""
    config = scenario.radar
    frame = simulate_frame(config, scenario.targets, scenario.channel_model, scenario.constellation)
    q0, pre, q, post, smnc_report = process_folded(frame.folded, frame.symbols, scenario)
    bundle = ResultBundle(
        report=build_report(scenario, config, q0, pre, q, post, smnc_report),
        product_pre=q0,
        product_post=q,
        range_resolution=config.range_resolution,
        outputs=list(scenario.outputs),
    )
    if "iq_capture" in scenario.outputs:
        bundle.iq_capture = capture_from_frame(frame, config)
    smnc = scenario.smnc
    common = dict(cfar=scenario.cfar, epsilon=smnc["epsilon_db"], max_iters=smnc["max_iters"], constellation=scenario.constellation)
    if "sweep_l" in scenario.outputs:
        result = sweep_L(config, scenario.targets, scenario.sweep["l_values"], scenario.trials,
                         channel_model=scenario.channel_model, **common)
        bundle.sweep_l = result
        bundle.report["sweep_l"] = {"rows": result.rows, "skipped": result.skipped, "checks": result.checks}
    if "sweep_doppler" in scenario.outputs:
        if not len(scenario.targets):
            raise ValueError("the Doppler sweep needs a target")
        result = sweep_doppler(config, scenario.targets.targets[0], scenario.sweep["normalized_doppler"],
                               scenario.sweep["l_values"], scenario.trials, **common)
        bundle.sweep_doppler = result
        bundle.report["sweep_doppler"] = {"rows": result.rows, "skipped": result.skipped, "checks": result.checks}
    return bundle


def ingest_capture(capture: IqCapture, symbols: SymbolMatrix, scenario: Scenario) -> ResultBundle:
    """Process a recorded (or simulated) B/L-rate capture with known symbols.

    The sub-sampling ratio is taken from the capture's sample rate.
    """
    base = scenario.radar
    ratio = base.bandwidth / capture.sample_rate
    if abs(ratio - round(ratio)) > 1e-9 * ratio:
        raise ValueError(f"capture rate {capture.sample_rate} Hz is not B/L for B = {base.bandwidth} Hz")
    config = base.replace(sub_sampling_ratio=int(round(ratio)))
    if symbols.shape != (config.num_subcarriers, config.num_symbols):
        raise ValueError(f"symbol matrix {symbols.shape} does not match the scenario frame")
    z = demodulate_folded(capture.samples.astype(complex), config)
    q0, pre, q, post, smnc_report = process_folded(z, symbols, scenario, config)
    extra = {"ingest": {"sample_rate_hz": capture.sample_rate, "sample_count": capture.sample_count,
                        "sub_sampling_ratio": config.sub_sampling_ratio}}
    return ResultBundle(
        report=build_report(scenario, config, q0, pre, q, post, smnc_report, extra),
        product_pre=q0,
        product_post=q,
        range_resolution=config.range_resolution,
        outputs=[o for o in scenario.outputs if o in ("profile_csv", "report")],
    )
