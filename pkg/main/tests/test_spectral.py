from pathlib import Path
from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose

from main.classifier import SectorClass, classify_detail
from main.errors import (
    ConfigError,
    EmptyInput,
    InsufficientSupport,
    MemoryBudgetExceeded,
    MismatchedFrequencySets,
)
from main.life_engine import Universe, random_universe
from main.pattern_io import place, read_pattern
from main.spectral import (
    AnalysisConfig,
    CellSeries,
    CellSpectrum,
    SectorSpectrum,
    analyze,
    average_spectrum,
    cell_dft,
    estimate_exact_memory,
    fit_power_law,
    probe_frequencies,
    residual,
    sector_power,
)

FIXTURES = Path(__file__).resolve().parent / "fixtures"
N = 2500


def _spectrum(freqs, S, T=256):
    return SectorSpectrum((0, 0), np.asarray(freqs), np.asarray(S, dtype=np.float64), N, T)


def _power_law(beta, c=1.0, f_max=100):
    f = np.arange(0, f_max + 1)
    S = np.zeros(len(f))
    S[1:] = c * f[1:].astype(np.float64) ** beta
    return _spectrum(f, S)


def _square_wave(period, T, duty=0.5):
    t = np.arange(T)
    return ((t % period) < duty * period).astype(np.uint8)


def _gun_universe(width, height, x, y):
    p = read_pattern(FIXTURES / "gun30.rle")
    return Universe.from_cells(width, height, {(cx + x, cy + y) for cx, cy in p.live_cells})


class CellDftTests(TestCase):

    def test_all_ones(self):
        s = cell_dft(CellSeries.from_values(0, 0, [1] * 8))
        assert_allclose(s.amplitudes, [1, 0, 0, 0, 0], atol=1e-15)
        np.testing.assert_array_equal(s.freqs, np.arange(5))

    def test_alternating(self):
        s = cell_dft(CellSeries.from_values(0, 0, [0, 1] * 4))
        assert_allclose(s.amplitudes, [0.5, 0, 0, 0, -0.5], atol=1e-15)

    def test_all_zero(self):
        s = cell_dft(CellSeries.from_values(0, 0, [0] * 16))
        self.assertFalse(np.any(s.amplitudes))

    def test_fast_path_matches_direct_sum(self):
        rng = np.random.default_rng(0)
        for i in range(1000):
            T = 64 if i % 2 else 256
            series = CellSeries.from_values(0, 0, rng.integers(0, 2, size=T))
            fast = cell_dft(series)
            direct = cell_dft(series, np.arange(T // 2 + 1))
            assert_allclose(fast.amplitudes, direct.amplitudes, rtol=1e-9, atol=1e-12)

    def test_parseval(self):
        rng = np.random.default_rng(1)
        for T in (64, 256, 1024):
            for _ in range(50):
                series = CellSeries.from_values(0, 0, rng.integers(0, 2, size=T))
                a2 = np.abs(cell_dft(series).amplitudes) ** 2
                full = a2[0] + 2 * a2[1:-1].sum() + a2[-1]
                assert_allclose(full, series.ones / T, rtol=1e-9)


class SectorPowerTests(TestCase):

    def test_one_alternating_cell(self):
        s = sector_power([cell_dft(CellSeries.from_values(0, 0, [0, 1] * 4))], N)
        assert_allclose(s.S, [1e-4, 0, 0, 0, 1e-4], atol=1e-18)

    def test_dead_sector(self):
        s = sector_power([], N, freqs=np.arange(5))
        self.assertFalse(np.any(s.S))

    def test_one_live_constant_cell(self):
        s = sector_power([], N, constant_ones=1, freqs=np.arange(5))
        assert_allclose(s.S, [1 / N, 0, 0, 0, 0])

    def test_mismatched_frequencies(self):
        a = CellSpectrum(np.arange(5), np.zeros(5, dtype=complex))
        b = CellSpectrum(np.arange(4), np.zeros(4, dtype=complex))
        with self.assertRaises(MismatchedFrequencySets):
            sector_power([a, b], N)

    def test_period(self):
        self.assertAlmostEqual(_spectrum(np.arange(5), np.zeros(5), T=4096).period(128), 32.0)

    def test_square_waves_peak_at_the_fundamental(self):
        T = 4096
        for period, bins in ((30, {136, 137}), (60, {68, 69})):
            spectra = [cell_dft(CellSeries.from_values(0, 0, _square_wave(period, T)))] * 40
            s = sector_power(spectra, N)
            dominant = int(s.freqs[1:][np.argmax(s.S[1:])])
            self.assertIn(dominant, bins)


class FitTests(TestCase):

    def test_exact_power_laws(self):
        for beta in (-0.2, -1.0, -2.0):
            fit = fit_power_law(_power_law(beta, c=3.7))
            self.assertAlmostEqual(fit.beta, beta, delta=1e-6)
            self.assertAlmostEqual(fit.alpha, np.log(3.7), delta=1e-6)
            self.assertLessEqual(fit.sigma2, 1e-9)
            self.assertEqual(fit.fitted_bins, 100)

    def test_constant_spectrum(self):
        f = np.arange(101)
        fit = fit_power_law(_spectrum(f, np.full(101, 7.0)))
        self.assertAlmostEqual(fit.beta, 0.0, delta=1e-9)

    def test_zero_bins_are_skipped(self):
        s = _power_law(-1.0)
        s.S[[3, 50, 77]] = 0.0
        fit = fit_power_law(s)
        self.assertEqual(fit.fitted_bins, 97)
        self.assertAlmostEqual(fit.beta, -1.0, delta=1e-9)

    def test_band_limits(self):
        fit = fit_power_law(_power_law(-1.5), 10, 20)
        self.assertEqual((fit.f_lo, fit.f_hi, fit.fitted_bins), (10, 20, 11))

    def test_insufficient_support(self):
        S = np.zeros(101)
        S[0] = 1.0
        S[40] = 2.0
        with self.assertRaises(InsufficientSupport):
            fit_power_law(_spectrum(np.arange(101), S))

    def test_residual_matches_direct_least_squares(self):
        rng = np.random.default_rng(3)
        f = np.arange(1, 101, dtype=np.float64)
        for _ in range(20):
            noise = rng.normal(0.0, 0.8, size=100)
            S = np.concatenate([[0.0], np.exp(0.5 - 1.3 * np.log(f) + noise)])
            fit = fit_power_law(_spectrum(np.arange(101), S))
            slope, intercept = np.polyfit(np.log(f), np.log(S[1:]), 1)
            oracle = np.mean((np.log(S[1:]) - intercept - slope * np.log(f)) ** 2)
            self.assertAlmostEqual(fit.beta, slope, delta=1e-9)
            self.assertAlmostEqual(fit.sigma2, oracle, delta=1e-6)
            self.assertLessEqual(fit.sigma2, np.mean(noise ** 2) + 1e-9)
            self.assertAlmostEqual(residual(_spectrum(np.arange(101), S), fit), fit.sigma2, delta=1e-12)

    def test_scaling_shifts_only_alpha(self):
        rng = np.random.default_rng(4)
        S = np.concatenate([[0.0], rng.uniform(0.1, 10.0, size=100)])
        base = fit_power_law(_spectrum(np.arange(101), S))
        scaled = fit_power_law(_spectrum(np.arange(101), 42.0 * S))
        self.assertAlmostEqual(scaled.alpha - base.alpha, np.log(42.0), delta=1e-9)
        self.assertAlmostEqual(scaled.beta, base.beta, delta=1e-9)
        self.assertAlmostEqual(scaled.sigma2, base.sigma2, delta=1e-9)


class AverageSpectrumTests(TestCase):

    def test_identical(self):
        s = _power_law(-1.0)
        assert_allclose(average_spectrum([s, s, s]).S, s.S)

    def test_mean(self):
        f = np.arange(5)
        avg = average_spectrum([_spectrum(f, np.zeros(5)), _spectrum(f, np.full(5, 2.5))])
        assert_allclose(avg.S, np.full(5, 1.25))

    def test_errors(self):
        with self.assertRaises(EmptyInput):
            average_spectrum([])
        with self.assertRaises(MismatchedFrequencySets):
            average_spectrum([_spectrum(np.arange(5), np.zeros(5)), _spectrum(np.arange(6), np.zeros(6))])


class ConfigTests(TestCase):

    def test_defaults(self):
        cfg = AnalysisConfig()
        cfg.validate()
        self.assertEqual((cfg.T, cfg.f_u, cfg.sector_size), (65_536, 100, 50))
        self.assertEqual(cfg.bytes_per_cell, 8192)

    def test_invalid(self):
        bad = [
            dict(T=1000),
            dict(T=1),
            dict(T=8, f_u=4),
            dict(f_u=0),
            dict(roi=(0, 0, 75, 50)),
            dict(mode="fast"),
            dict(class_order=("power_law",)),
        ]
        for kwargs in bad:
            with self.assertRaises(ConfigError, msg=str(kwargs)):
                AnalysisConfig(**kwargs).validate()
        AnalysisConfig(T=1000, mode="probe").validate()

    def test_roi_must_fit(self):
        with self.assertRaises(ConfigError):
            AnalysisConfig(roi=(10, 0, 50, 50)).resolve_roi(Universe.empty(50, 50))
        self.assertEqual(AnalysisConfig().resolve_roi(Universe.empty(120, 160)), (0, 0, 100, 150))

    def test_probe_bins_hit_the_gun_frequencies(self):
        bins = set(probe_frequencies(AnalysisConfig()).tolist())
        self.assertTrue(set(range(101)) <= bins)
        self.assertIn(2185, bins)
        self.assertIn(1092, bins)
        self.assertLessEqual(max(bins), 65_536 // 2)


class AnalyzeTests(TestCase):

    def test_empty_universe(self):
        result = analyze(Universe.empty(100, 50), AnalysisConfig(T=64, f_u=10))
        self.assertEqual((result.sectors_x, result.sectors_y), (2, 1))
        self.assertEqual(result.changed_cells, 0)
        for s in result.spectra:
            self.assertFalse(np.any(s.S))

    def test_still_life_is_dc_only(self):
        u = Universe.from_cells(50, 50, {(20, 20), (21, 20), (20, 21), (21, 21)})
        (s,) = analyze(u, AnalysisConfig(T=64, f_u=10)).spectra
        assert_allclose(s.S[0], 4 / N)
        self.assertFalse(np.any(s.S[1:]))

    def test_blinker(self):
        u = Universe.from_cells(50, 50, {(10, 11), (11, 11), (12, 11)})
        for mode in ("exact", "probe"):
            result = analyze(u, AnalysisConfig(T=8, f_u=3, mode=mode, probe_periods=(2,)))
            (s,) = result.spectra
            self.assertEqual(result.changed_cells, 4)
            np.testing.assert_array_equal(s.freqs, np.arange(5))
            # centre is always live; the four tips alternate
            assert_allclose(s.S, [8e-4, 0, 0, 0, 4e-4], atol=1e-15)

    def test_sector_order_and_window(self):
        u = Universe.from_cells(100, 100, {(60, 11), (61, 11), (62, 11)})
        result = analyze(u, AnalysisConfig(T=16, f_u=3, start_step=5))
        self.assertEqual([s.sector for s in result.spectra], [(0, 0), (1, 0), (0, 1), (1, 1)])
        self.assertTrue(np.any(result.spectra[1].S[1:]))
        self.assertFalse(np.any(result.spectra[0].S))
        self.assertEqual(result.final.generation, 21)

    def test_probe_matches_exact(self):
        u = random_universe(100, 100, 0.3, 8)
        exact = analyze(u, AnalysisConfig(T=256, f_u=20, probe_periods=(30,)))
        probe = analyze(u, AnalysisConfig(T=256, f_u=20, probe_periods=(30,), mode="probe"))
        bins = probe_frequencies(AnalysisConfig(T=256, f_u=20, probe_periods=(30,)))
        for e, p in zip(exact.spectra, probe.spectra):
            np.testing.assert_array_equal(p.freqs, bins)
            assert_allclose(p.S, e.S[bins], rtol=1e-9, atol=1e-9 * e.S.max())

    def test_frame_invariance(self):
        u = random_universe(100, 100, 0.3, 9)
        whole = analyze(u, AnalysisConfig(T=128, f_u=20))
        for s in whole.spectra:
            sx, sy = s.sector
            (part,) = analyze(u, AnalysisConfig(T=128, f_u=20, roi=(50 * sx, 50 * sy, 50, 50))).spectra
            assert_allclose(part.S, s.S, rtol=1e-12, atol=1e-15)

    def test_worker_counts_agree(self):
        u = random_universe(150, 100, 0.3, 10)
        base = analyze(u, AnalysisConfig(T=64, f_u=10))
        other = analyze(u, AnalysisConfig(T=64, f_u=10), workers=4)
        for a, b in zip(base.spectra, other.spectra):
            np.testing.assert_array_equal(a.S, b.S)

    def test_memory_budget(self):
        u = random_universe(100, 100, 0.3, 11)
        cfg = AnalysisConfig(T=256, f_u=20, memory_limit=32 * 10)
        with self.assertRaises(MemoryBudgetExceeded) as ctx:
            analyze(u, cfg)
        self.assertEqual(ctx.exception.bytes_per_cell, 32)
        self.assertGreater(ctx.exception.changed_cells, 10)

    def test_dry_run_counts_changed_cells(self):
        u = random_universe(100, 100, 0.3, 12)
        cfg = AnalysisConfig(T=128, f_u=20)
        cells, nbytes = estimate_exact_memory(u, cfg)
        self.assertEqual(cells, analyze(u, cfg).changed_cells)
        self.assertEqual(nbytes, cells * 16)

    def test_gun_sector_has_sharp_peaks(self):
        u = _gun_universe(1200, 1200, 8, 8)
        cfg = AnalysisConfig(T=4096, start_step=256, roi=(0, 0, 50, 50))
        (s,) = analyze(u, cfg).spectra
        detail = classify_detail(s, cfg)
        self.assertEqual(detail.cls, SectorClass.SHARP_PEAKS)
        self.assertIn(detail.peak_bin, {136, 137})
        positive = s.S[1:][s.S[1:] > 0]
        self.assertGreaterEqual(max(s.S[136], s.S[137]), cfg.peak_ratio * np.median(positive))

    def test_gun_from_generation_zero(self):
        # the glider stream starts inside the window; its onset fits a shallow slope below f_u
        u = place(read_pattern(FIXTURES / "gun30.rle"), 64)
        cfg = AnalysisConfig(T=4096, roi=(64, 64, 50, 50))
        (s,) = analyze(u, cfg).spectra
        detail = classify_detail(s, cfg)
        self.assertEqual(detail.cls, SectorClass.SHARP_PEAKS)
        self.assertIn(detail.peak_bin, {136, 137})
        self.assertLessEqual(detail.fit.beta, cfg.beta_max)
