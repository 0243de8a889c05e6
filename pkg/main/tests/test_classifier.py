from unittest import TestCase

import numpy as np

from main.classifier import (
    ClassMap,
    Classification,
    SectorClass,
    class_map_csv,
    classify,
    classify_detail,
    classify_map,
    read_class_map_csv,
)
from main.errors import IncompleteGrid
from main.life_engine import Universe
from main.spectral import AnalysisConfig, CellSeries, SectorSpectrum, analyze, cell_dft, sector_power

CFG = AnalysisConfig(T=4096)
F = np.arange(0, 2049)


def _sector(S, sector=(0, 0)):
    return SectorSpectrum(sector, F.copy(), np.asarray(S, dtype=np.float64), 2500, 4096)


def null():
    return np.zeros(len(F))


def dc_only():
    S = null()
    S[0] = 1e-4
    return S


def power_law():
    S = null()
    S[0] = 0.3
    S[1:] = 0.01 * F[1:].astype(np.float64) ** -2.0
    return S


def sharp_peaks():
    t = np.arange(4096)
    series = CellSeries.from_values(0, 0, ((t % 30) < 4).astype(np.uint8))
    return sector_power([cell_dft(series)] * 25, 2500).S


def white_noise():
    # independent coin-flip cells; a Life soup is not flat (its sectors fit a power law)
    rng = np.random.default_rng(0)
    cells = [cell_dft(CellSeries.from_values(0, 0, rng.integers(0, 2, size=4096))) for _ in range(400)]
    return sector_power(cells, 2500).S


FIXTURES = {
    SectorClass.NULL: null,
    SectorClass.DC_ONLY: dc_only,
    SectorClass.POWER_LAW: power_law,
    SectorClass.SHARP_PEAKS: sharp_peaks,
    SectorClass.WHITE_NOISE: white_noise,
}


class ClassifyTests(TestCase):

    def test_five_fixtures(self):
        for expected, make in FIXTURES.items():
            self.assertEqual(classify(_sector(make()), CFG), expected, expected.value)

    def test_detail(self):
        d = classify_detail(_sector(power_law()), CFG)
        self.assertAlmostEqual(d.fit.beta, -2.0, delta=1e-9)
        S = sharp_peaks()
        # 4096/30 falls between bins; the second harmonic holds the largest bin
        self.assertGreater(S[273], S[137])
        d = classify_detail(_sector(S), CFG)
        self.assertIn(d.peak_bin, {136, 137})
        self.assertIsNone(classify_detail(_sector(null()), CFG).fit)

    def test_scale_invariance(self):
        for expected, make in FIXTURES.items():
            self.assertEqual(classify(_sector(make() * 123.0), CFG), expected)
            self.assertEqual(classify(_sector(make() * 1e-6), CFG), expected)

    def test_raising_the_maximum_keeps_peaks(self):
        S = sharp_peaks()
        top = int(np.argmax(S[1:])) + 1
        S[top] *= 10
        self.assertEqual(classify(_sector(S), CFG), SectorClass.SHARP_PEAKS)

    def test_clause_order(self):
        # a clean power law also passes the max/median test
        s = _sector(power_law())
        self.assertEqual(classify(s, CFG), SectorClass.POWER_LAW)
        flipped = AnalysisConfig(T=4096, class_order=("sharp_peaks", "power_law"))
        self.assertEqual(classify(s, flipped), SectorClass.SHARP_PEAKS)

    def test_peak_above_trend_vetoes_power_law(self):
        S = power_law()
        S[500] = 1.0
        cfg = AnalysisConfig(T=4096, sigma2_max=1e9)
        d = classify_detail(_sector(S), cfg)
        self.assertEqual(d.cls, SectorClass.SHARP_PEAKS)
        self.assertLessEqual(d.fit.beta, cfg.beta_max)
        self.assertEqual(d.peak_bin, 500)
        lenient = AnalysisConfig(T=4096, sigma2_max=1e9, peak_veto=False)
        self.assertEqual(classify(_sector(S), lenient), SectorClass.POWER_LAW)

    def test_fundamental_is_lowest_strong_peak(self):
        S = white_noise()
        S[300], S[600] = 100 * S[300], 300 * S[600]
        self.assertEqual(classify_detail(_sector(S), CFG).peak_bin, 300)
        S[300] = S[600] / 80
        self.assertEqual(classify_detail(_sector(S), CFG).peak_bin, 600)

    def test_peak_ratio_threshold(self):
        S = white_noise()
        S[700] = 60 * np.median(S[1:])
        self.assertEqual(classify(_sector(S), CFG), SectorClass.SHARP_PEAKS)
        strict = AnalysisConfig(T=4096, peak_ratio=1000)
        self.assertEqual(classify(_sector(S), strict), SectorClass.WHITE_NOISE)

    def test_totality_on_random_spectra(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            S = rng.exponential(size=len(F)) * (rng.random(len(F)) < rng.random())
            self.assertIn(classify(_sector(S), CFG), set(SectorClass))


class ClassifyMapTests(TestCase):

    def _grid(self):
        makers = [dc_only, power_law, sharp_peaks, white_noise]
        return [_sector(make(), (i % 2, i // 2)) for i, make in enumerate(makers)]

    def test_counts(self):
        m = classify_map(self._grid(), CFG)
        self.assertEqual((m.sectors_x, m.sectors_y), (2, 2))
        self.assertEqual(m.counts, {
            SectorClass.NULL: 0,
            SectorClass.DC_ONLY: 1,
            SectorClass.POWER_LAW: 1,
            SectorClass.SHARP_PEAKS: 1,
            SectorClass.WHITE_NOISE: 1,
        })
        self.assertEqual(m.at(1, 0), SectorClass.POWER_LAW)
        self.assertEqual(sum(m.counts.values()), 4)

    def test_empty_universe_is_all_null(self):
        cfg = AnalysisConfig(T=64, f_u=10)
        result = analyze(Universe.empty(150, 100), cfg)
        m = classify_map(result.spectra, cfg, result.sectors_x, result.sectors_y)
        self.assertEqual(m.counts[SectorClass.NULL], 6)

    def test_worker_counts_agree(self):
        grid = self._grid()
        a = classify_map(grid, CFG, workers=1)
        b = classify_map(grid, CFG, workers=4)
        self.assertEqual(class_map_csv(a), class_map_csv(b))

    def test_incomplete(self):
        grid = self._grid()
        with self.assertRaises(IncompleteGrid):
            classify_map(grid[:3], CFG, 2, 2)
        with self.assertRaises(IncompleteGrid):
            classify_map(grid + [grid[0]], CFG)
        with self.assertRaises(IncompleteGrid):
            classify_map([], CFG)


class ClassMapCsvTests(TestCase):

    def test_columns_and_round_trip(self):
        m = classify_map([_sector(null(), (0, 0)), _sector(power_law(), (1, 0))], CFG)
        text = class_map_csv(m)
        lines = text.splitlines()
        self.assertEqual(lines[0], "sector_x,sector_y,class,beta,sigma2,peak_bin")
        self.assertEqual(lines[1], "0,0,Null,,,")
        self.assertTrue(lines[2].startswith("1,0,PowerLaw,-2,"))
        back = read_class_map_csv(text)
        self.assertEqual([back.at(0, 0), back.at(1, 0)], [SectorClass.NULL, SectorClass.POWER_LAW])
        self.assertEqual(back.grid[0][1].peak_bin, 1)

    def test_missing_cells(self):
        with self.assertRaises(IncompleteGrid):
            read_class_map_csv("sector_x,sector_y,class,beta,sigma2,peak_bin\n1,1,Null,,,\n")

    def test_class_map_type(self):
        m = ClassMap(1, 1, [[Classification(SectorClass.DC_ONLY)]])
        self.assertEqual(m.counts[SectorClass.DC_ONLY], 1)
