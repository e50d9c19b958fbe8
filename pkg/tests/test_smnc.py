import numpy as np
import pytest

from snsofdm import (
    CfarParams,
    Detection,
    Target,
    TargetSet,
    extract_targets,
    range_profiles,
    reconstruct_smn,
    run_smnc,
    smnc_init,
    smnc_iterate,
)
from snsofdm.channel import complex_noise, target_matrix
from snsofdm.config import dbm_to_mw
from snsofdm.sampler import fold_frame
from snsofdm.simulate import simulate_frame
from snsofdm.smnc import MAX_ITERS, TRIVIAL
from snsofdm.unfold import unfold_full
from snsofdm.waveform import generate_symbols

from conftest import TWO_TARGET_BINS, two_targets, small_config, reference_config
from oracles import mismatch_loops

STRICT = CfarParams(pfa=1e-6)


def oracle_estimates(targets, config):
    q = np.arange(config.num_symbols)
    return [
        Detection(int(round(t.delay * config.bandwidth)),
                  complex_gains=t.amplitude * np.exp(1j * q * t.doppler * config.symbol_duration))
        for t in targets
    ]


def small_scene(seed, noise_power=0.0):
    cfg = small_config(rng_seed=seed, noise_power=noise_power)
    targets = TargetSet([Target.on_bin(1, cfg, doppler=3e5, amplitude=1.0),
                         Target.on_bin(5, cfg, doppler=-1e5, amplitude=0.4j)])
    c = generate_symbols(cfg)
    x = target_matrix(targets, cfg)
    w = complex_noise(cfg.rng("noise"), x.shape, noise_power) if noise_power else np.zeros_like(x)
    z = fold_frame(c.entries * x + w, 2).entries
    return cfg, targets, c, x, w, z


class TestReconstruction:
    def test_empty_estimates(self, small):
        y = reconstruct_smn([], generate_symbols(small), small)
        assert not np.any(y.entries)

    def test_ratio_one_is_zero(self):
        cfg = small_config(sub_sampling_ratio=1)
        est = [Detection(2, complex_gains=np.ones(2))]
        assert not np.any(reconstruct_smn(est, generate_symbols(cfg), cfg).entries)

    @pytest.mark.parametrize("seed", range(5))
    def test_oracle_estimates_reproduce_mismatch(self, seed):
        cfg, targets, c, x, _, _ = small_scene(seed)
        y_hat = reconstruct_smn(oracle_estimates(targets, cfg), c, cfg).entries
        np.testing.assert_allclose(y_hat, mismatch_loops(x, c.entries, 2), atol=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_oracle_cancellation_in_one_step(self, seed):
        cfg, targets, c, x, w, z = small_scene(seed, noise_power=1e-2)
        d0 = unfold_full(z, c).entries
        d1 = d0 - reconstruct_smn(oracle_estimates(targets, cfg), c, cfg).entries
        m = cfg.folded_subcarriers
        w_f = np.concatenate([(w[:m] + w[m:]) / c.entries[:m], (w[:m] + w[m:]) / c.entries[m:]])
        np.testing.assert_allclose(d1, x + w_f, atol=1e-10)


class TestRunSmnc:
    def test_ratio_one_short_circuits(self):
        cfg = reference_config(sub_sampling_ratio=1)
        frame = simulate_frame(cfg, two_targets(cfg))
        q, report = run_smnc(frame.unfolded, frame.symbols, cfg, STRICT)
        assert report.iterations == 0 and report.converged
        np.testing.assert_array_equal(q.integrated, range_profiles(frame.unfolded).integrated)

    def test_noise_only_converges_trivially(self):
        cfg = reference_config(noise_power=float(dbm_to_mw(-50)), num_symbols=64)
        frame = simulate_frame(cfg, TargetSet())
        q, report = run_smnc(frame.unfolded, frame.symbols, cfg, STRICT)
        assert report.status == TRIVIAL and report.converged
        assert np.mean(q.integrated / 64) == pytest.approx(cfg.noise_power * 8, rel=0.05)

    def test_max_iterations_flag(self, reference):
        frame = simulate_frame(reference, two_targets(reference))
        _, report = run_smnc(frame.unfolded, frame.symbols, reference, STRICT, epsilon=1e-9, max_iters=2)
        assert report.status == MAX_ITERS
        assert not report.converged
        assert report.iterations == 2
        assert len(report.mu_history) == 3

    def test_invalid_arguments(self, reference):
        frame = simulate_frame(reference, TargetSet())
        with pytest.raises(ValueError):
            run_smnc(frame.unfolded, frame.symbols, reference, epsilon=0.0)
        with pytest.raises(ValueError):
            run_smnc(frame.unfolded, frame.symbols, reference, max_iters=0)

    def test_initial_frame_is_untouched(self, reference):
        frame = simulate_frame(reference, two_targets(reference))
        before = np.array(frame.unfolded.entries)
        state = smnc_init(frame.unfolded, reference, STRICT)
        state = smnc_iterate(state, frame.symbols, reference, STRICT)
        assert not state.d0.flags.writeable
        np.testing.assert_array_equal(state.d0, before)
        np.testing.assert_array_equal(frame.unfolded.entries, before)

    def test_single_strong_target_floor(self):
        # Each pass shrinks the residual mismatch power by about (L-1)/Nc until the noise floor is hit.
        drops, floors = [], []
        for seed in range(30):
            cfg = reference_config(rng_seed=seed)
            frame = simulate_frame(cfg, TargetSet([two_targets(cfg).targets[0]]))
            state = smnc_iterate(smnc_init(frame.unfolded, cfg, STRICT), frame.symbols, cfg, STRICT)
            drops.append(10 ** ((state.mu_history[1] - state.mu_history[0]) / 10))
            peak_db = 10 * np.log10(cfg.num_subcarriers)
            assert state.mu_history[0] - peak_db == pytest.approx(-24.66, abs=1.0)
            _, report = run_smnc(frame.unfolded, frame.symbols, cfg, STRICT)
            floors.append(report.mu_history[-1])
        assert np.mean(drops) == pytest.approx(7 / 2048, rel=0.3)
        assert np.mean(floors) == pytest.approx(10 * np.log10(cfg.noise_power * 8), abs=1.0)


class TestSmncProperties:
    def test_weak_target_recovered(self):
        late = 0
        for seed in range(20):
            cfg = reference_config(rng_seed=seed)
            frame = simulate_frame(cfg, two_targets(cfg))
            _, report = run_smnc(frame.unfolded, frame.symbols, cfg, STRICT)
            history = report.detections_per_iteration
            assert history[0] == [TWO_TARGET_BINS[0]]
            first = next(n for n, bins in enumerate(history) if TWO_TARGET_BINS[1] in bins)
            late += first > 2
        assert late == 0

    @pytest.mark.slow
    def test_floor_is_monotone(self):
        for seed in range(100):
            cfg = reference_config(rng_seed=1000 + seed)
            frame = simulate_frame(cfg, two_targets(cfg))
            _, report = run_smnc(frame.unfolded, frame.symbols, cfg, STRICT)
            mu = np.array(report.mu_history)
            assert np.all(np.diff(mu) <= report.epsilon), (seed, mu)

    def test_gain_bias_shrinks_per_iteration(self):
        # Noiseless single target: the squared gain error shrinks by (L-1)/Nc per pass on average.
        ratios = []
        for seed in range(300):
            cfg = reference_config(rng_seed=seed, noise_power=0.0)
            c = generate_symbols(cfg)
            x = target_matrix([two_targets(cfg).targets[0]], cfg)
            d0 = unfold_full(fold_frame(c.entries * x, 8), c).entries
            det = [Detection(TWO_TARGET_BINS[0])]
            errors = []
            d = d0
            for _ in range(2):
                (est,) = extract_targets(range_profiles(d), det)
                errors.append(abs(est.complex_gains[0] - 1.0) ** 2)
                d = d0 - reconstruct_smn([est], c, cfg).entries
            ratios.append(errors[1] / errors[0])
        assert np.mean(ratios) == pytest.approx(7 / 2048, rel=0.2)
