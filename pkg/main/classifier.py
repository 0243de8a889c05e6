"""
Sector classification
---------------------
Each sector spectrum gets exactly one of five classes:

  1. Null        every S(f) is zero
  2. DcOnly      S(0) > 0 and every S(f>0) is zero
  3. PowerLaw    the log-log fit over [1, f_u] has β ≤ beta_max and σ² ≤ sigma2_max,
                 and (with peak_veto) S(f) divided by the fitted line has no sharp peak
  4. SharpPeaks  max S(f≥1) ≥ peak_ratio × median of the positive S(f≥1)
  5. WhiteNoise  anything else

Clauses 3 and 4 are tried in cfg.class_order. The reported peak bin is the
fundamental: the lowest local maximum within peak_ratio of the largest power.
"""

import csv
import io
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from main.errors import IncompleteGrid, InsufficientSupport
from main.spectral import AnalysisConfig, PowerLawFit, SectorSpectrum, fit_power_law

logger = logging.getLogger("lifescope.classifier")

CSV_FIELDS = ("sector_x", "sector_y", "class", "beta", "sigma2", "peak_bin")


class SectorClass(str, Enum):
    NULL = "Null"
    DC_ONLY = "DcOnly"
    POWER_LAW = "PowerLaw"
    SHARP_PEAKS = "SharpPeaks"
    WHITE_NOISE = "WhiteNoise"


@dataclass(frozen=True)
class Classification:
    cls: SectorClass
    fit: Optional[PowerLawFit] = None
    peak_bin: Optional[int] = None


@dataclass
class ClassMap:
    sectors_x: int
    sectors_y: int
    grid: list                 # grid[sy][sx] -> Classification
    class_order: tuple = ("power_law", "sharp_peaks")

    def at(self, sx: int, sy: int) -> SectorClass:
        return self.grid[sy][sx].cls

    @property
    def counts(self) -> dict:
        tally = Counter(c.cls for row in self.grid for c in row)
        return {cls: tally.get(cls, 0) for cls in SectorClass}


def _try_fit(s: SectorSpectrum, cfg: AnalysisConfig) -> Optional[PowerLawFit]:
    try:
        return fit_power_law(s, 1, cfg.f_u)
    except InsufficientSupport:
        return None


def _is_peaked(values: np.ndarray, ratio: float) -> bool:
    return bool(values.max() >= ratio * np.median(values))


def _fundamental(freqs: np.ndarray, S: np.ndarray, ratio: float) -> int:
    """
    Lowest local maximum of S over the f ≥ 1 bins holding at least 1/ratio of
    the largest power. A periodic sector can put more power in a harmonic than
    in its fundamental; this reports the fundamental.
    """
    left = np.concatenate([[-np.inf], S[:-1]])
    right = np.concatenate([S[1:], [-np.inf]])
    strong = (S > left) & (S >= right) & (S >= S.max() / ratio) & (S > 0)
    return int(freqs[np.flatnonzero(strong)[0]])


def _peak(s: SectorSpectrum, cfg: AnalysisConfig) -> tuple:
    """(fundamental peak bin or None, whether the max/median criterion holds)."""
    band = s.freqs >= 1
    positive = band & (s.S > 0)
    if not positive.any():
        return None, False
    peak_bin = _fundamental(s.freqs[band], s.S[band], cfg.peak_ratio)
    return peak_bin, _is_peaked(s.S[positive], cfg.peak_ratio)


def peaked_over_trend(s: SectorSpectrum, fit: PowerLawFit, ratio: float) -> bool:
    """Max/median criterion applied to S(f) divided by the fitted power law."""
    positive = (s.freqs >= 1) & (s.S > 0)
    f = s.freqs[positive].astype(np.float64)
    trend = np.exp(fit.alpha + fit.beta * np.log(f))
    return _is_peaked(s.S[positive] / trend, ratio)


def _is_power_law(s: SectorSpectrum, fit: Optional[PowerLawFit], cfg: AnalysisConfig) -> bool:
    if fit is None or fit.beta > cfg.beta_max or fit.sigma2 > cfg.sigma2_max:
        return False
    return not (cfg.peak_veto and peaked_over_trend(s, fit, cfg.peak_ratio))


def classify_detail(s: SectorSpectrum, cfg: AnalysisConfig) -> Classification:
    S = s.S
    if not np.any(S > 0):
        return Classification(SectorClass.NULL)
    if not np.any(S[s.freqs > 0] > 0):
        return Classification(SectorClass.DC_ONLY)

    fit = _try_fit(s, cfg)
    peak_bin, peaked = _peak(s, cfg)
    for clause in cfg.class_order:
        if clause == "power_law" and _is_power_law(s, fit, cfg):
            return Classification(SectorClass.POWER_LAW, fit, peak_bin)
        if clause == "sharp_peaks" and peaked:
            return Classification(SectorClass.SHARP_PEAKS, fit, peak_bin)
    return Classification(SectorClass.WHITE_NOISE, fit, peak_bin)


def classify(s: SectorSpectrum, cfg: AnalysisConfig) -> SectorClass:
    return classify_detail(s, cfg).cls


def classify_map(spectra: Sequence[SectorSpectrum], cfg: AnalysisConfig,
                 sectors_x: Optional[int] = None, sectors_y: Optional[int] = None,
                 workers: int = 1) -> ClassMap:
    """
    Classify one spectrum per sector. The grid size defaults to the extent of
    the sector coordinates; every cell of the grid must be covered exactly once.
    """
    if not spectra:
        raise IncompleteGrid("no sector spectra")
    coords = [s.sector for s in spectra]
    if any(c is None for c in coords):
        raise IncompleteGrid("spectrum without sector coordinates")
    if sectors_x is None:
        sectors_x = max(c[0] for c in coords) + 1
    if sectors_y is None:
        sectors_y = max(c[1] for c in coords) + 1
    expected = {(x, y) for y in range(sectors_y) for x in range(sectors_x)}
    if len(coords) != len(expected) or set(coords) != expected:
        raise IncompleteGrid(
            f"{len(coords)} spectra do not tile a {sectors_x}x{sectors_y} sector grid"
        )

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(lambda s: classify_detail(s, cfg), spectra))

    grid = [[None] * sectors_x for _ in range(sectors_y)]
    for (x, y), result in zip(coords, results):
        grid[y][x] = result
    cmap = ClassMap(sectors_x, sectors_y, grid, tuple(cfg.class_order))
    logger.info("classified %d sectors: %s", len(spectra),
                ", ".join(f"{cls.value} {n}" for cls, n in cmap.counts.items()))
    return cmap


# ── CSV ──────────────────────────────────────────────────────────────────────

def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.9g}"


def class_map_csv(m: ClassMap) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for sy in range(m.sectors_y):
        for sx in range(m.sectors_x):
            c = m.grid[sy][sx]
            writer.writerow([
                sx, sy, c.cls.value,
                _fmt(c.fit.beta if c.fit else None),
                _fmt(c.fit.sigma2 if c.fit else None),
                "" if c.peak_bin is None else c.peak_bin,
            ])
    return out.getvalue()


def read_class_map_csv(text: str) -> ClassMap:
    """Rebuild a ClassMap from class_map_csv output; fit rows keep β and σ² only."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise IncompleteGrid("class map CSV has no rows")
    sectors_x = max(int(r["sector_x"]) for r in rows) + 1
    sectors_y = max(int(r["sector_y"]) for r in rows) + 1
    grid = [[None] * sectors_x for _ in range(sectors_y)]
    for r in rows:
        fit = None
        if r["beta"]:
            fit = PowerLawFit(float("nan"), float(r["beta"]), float(r["sigma2"]), 0)
        peak_bin = int(r["peak_bin"]) if r["peak_bin"] else None
        grid[int(r["sector_y"])][int(r["sector_x"])] = \
            Classification(SectorClass(r["class"]), fit, peak_bin)
    if any(c is None for row in grid for c in row):
        raise IncompleteGrid(f"class map CSV does not cover a {sectors_x}x{sectors_y} grid")
    return ClassMap(sectors_x, sectors_y, grid)
