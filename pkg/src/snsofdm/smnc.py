"""Iterative symbol-mismatch noise cancellation (SMNC)."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from snsofdm.channel import Band, FreqFrame
from snsofdm.config import RadarConfig
from snsofdm.detect import CfarParams, Detection, RangeDopplerProduct, cfar_detect, cfar_threshold, extract_targets, range_profiles
from snsofdm.metrics import measure_isl, sidelobe_level_db
from snsofdm.sampler import fold_frame
from snsofdm.unfold import unfold_full
from snsofdm.waveform import SymbolMatrix

RUNNING = "running"
CONVERGED = "converged"
TRIVIAL = "converged-trivially"
MAX_ITERS = "max-iterations"


def reconstruct_smn(estimates, symbols: SymbolMatrix, config: RadarConfig) -> FreqFrame:
    """Mismatch noise produced by the estimated targets.

    Builds X_hat from the per-symbol gains on the range steering vectors of
    the detected bins, then returns Y_hat with block i equal to
    sum_{k != i} X_hat_k * C_k / C_i. This is computed as
    unfold(fold(C * X_hat)) - X_hat.
    """
    nc, ns = symbols.shape
    ell = config.sub_sampling_ratio
    sparse = np.zeros((nc, ns), dtype=complex)
    for est in estimates:
        sparse[est.range_bin] += np.asarray(est.complex_gains) * np.sqrt(nc)
    if ell == 1 or not np.any(sparse):
        return FreqFrame(np.zeros((nc, ns), dtype=complex), Band.FULL)
    # Orthonormal DFT of a sparse profile = sum_m r(tau_m) g_m^T.
    x_hat = np.fft.fft(sparse, axis=0, norm="ortho")
    z_hat = fold_frame(symbols.entries * x_hat, ell)
    return FreqFrame(unfold_full(z_hat, symbols).entries - x_hat, Band.FULL)


@dataclass(frozen=True, eq=False)
class SmncState:
    d0: np.ndarray
    d_current: np.ndarray
    q_current: RangeDopplerProduct
    mu_history: tuple
    iteration: int = 0
    epsilon: float = 0.5
    max_iters: int = 10
    detected: tuple = ()
    detection_history: tuple = ()
    status: str = RUNNING


@dataclass
class SmncReport:
    iterations: int
    converged: bool
    status: str
    mu_history: list
    detections_per_iteration: list
    final_isl_db: float
    epsilon: float
    max_iters: int

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "status": self.status,
            "mu_history_db": [float(m) for m in self.mu_history],
            "detections_per_iteration": [list(map(int, bins)) for bins in self.detections_per_iteration],
            "final_isl_db": float(self.final_isl_db),
            "epsilon_db": self.epsilon,
            "max_iters": self.max_iters,
        }


def _detect(q: RangeDopplerProduct, cfar: CfarParams, config: RadarConfig, previous=()) -> tuple:
    """CFAR peaks of ``q`` merged with previously held bins that still clear the threshold."""
    looks = q.num_symbols
    found = {d.range_bin: d for d in cfar_detect(q.integrated, cfar, looks, config.range_resolution)}
    if previous:
        threshold, noise = cfar_threshold(q.integrated, cfar, looks)
        for det in previous:
            b = det.range_bin
            if b not in found and q.integrated[b] > threshold[b]:
                found[b] = Detection(
                    b,
                    b * config.range_resolution,
                    float(q.integrated[b] / looks),
                    float(10 * np.log10(q.integrated[b] / noise[b])),
                )
    return tuple(found[b] for b in sorted(found))


def _mu(q: RangeDopplerProduct, detected, guard: int) -> float:
    return sidelobe_level_db(q.integrated / q.num_symbols, [d.range_bin for d in detected], guard)


def smnc_init(d0, config: RadarConfig, cfar: CfarParams | None = None, epsilon=0.5, max_iters=10) -> SmncState:
    if epsilon <= 0 or max_iters < 1:
        raise ValueError("SMNC needs epsilon > 0 and max_iters >= 1")
    cfar = cfar or CfarParams()
    d0 = np.array(np.asarray(d0), dtype=complex)
    d0.setflags(write=False)
    q0 = range_profiles(d0)
    detected = _detect(q0, cfar, config)
    q0 = replace(q0, detections=detected)
    return SmncState(
        d0=d0,
        d_current=d0,
        q_current=q0,
        mu_history=(_mu(q0, detected, cfar.guard_cells),),
        epsilon=epsilon,
        max_iters=max_iters,
        detected=detected,
        detection_history=(tuple(d.range_bin for d in detected),),
    )


def smnc_iterate(state: SmncState, symbols: SymbolMatrix, config: RadarConfig, cfar: CfarParams | None = None) -> SmncState:
    """One loop body: estimate, reconstruct, subtract from D0, re-profile."""
    cfar = cfar or CfarParams()
    if not state.detected:
        return replace(state, status=TRIVIAL)
    estimates = extract_targets(state.q_current, state.detected)
    y_hat = reconstruct_smn(estimates, symbols, config).entries
    d_n = state.d0 - y_hat
    q_n = range_profiles(d_n)
    detected = _detect(q_n, cfar, config, previous=state.detected)
    q_n = replace(q_n, detections=detected)
    return replace(
        state,
        d_current=d_n,
        q_current=q_n,
        mu_history=state.mu_history + (_mu(q_n, detected, cfar.guard_cells),),
        iteration=state.iteration + 1,
        detected=detected,
        detection_history=state.detection_history + (tuple(d.range_bin for d in detected),),
    )


def run_smnc(d0, symbols: SymbolMatrix, config: RadarConfig, cfar: CfarParams | None = None, epsilon=0.5, max_iters=10):
    """Iterate SMNC until consecutive sidelobe levels differ by at most ``epsilon`` dB.

    Returns the final range product and a report. Hitting ``max_iters`` is
    reported through ``converged=False``, never raised.
    """
    cfar = cfar or CfarParams()
    state = smnc_init(d0, config, cfar, epsilon, max_iters)
    if config.sub_sampling_ratio == 1:
        state = replace(state, status=CONVERGED)
    while state.status == RUNNING:
        state = smnc_iterate(state, symbols, config, cfar)
        if state.status != RUNNING:
            break
        if abs(state.mu_history[-1] - state.mu_history[-2]) <= epsilon:
            state = replace(state, status=CONVERGED)
        elif state.iteration >= max_iters:
            state = replace(state, status=MAX_ITERS)
    q = state.q_current
    bins = [d.range_bin for d in state.detected]
    report = SmncReport(
        iterations=state.iteration,
        converged=state.status != MAX_ITERS,
        status=state.status,
        mu_history=list(state.mu_history),
        detections_per_iteration=[list(b) for b in state.detection_history],
        final_isl_db=measure_isl(q.integrated, bins, cfar.guard_cells),
        epsilon=epsilon,
        max_iters=max_iters,
    )
    return q, report
