"""
Spectral analysis
-----------------
Per-cell time series over a window of T generations, their discrete Fourier
transforms ŝ(f) = (1/T) Σ_t s(t) exp(-2πi t f / T), per-sector power
S(f) = (1/N) Σ_cells |ŝ(f)|², the log-log power-law fit ln S ≈ α + β ln f
over [1, f_u] and its residual σ².

Two recording modes:
  exact  every cell that changes in the window gets a T-bit toggle series
         (T/8 bytes); spectra come from a batched real FFT over f = 0..T/2.
  probe  every changed cell keeps complex accumulators for a fixed set of
         bins (f in [0, f_u] plus oscillator harmonics); nothing is stored
         per step, so unforeseen periods are invisible.

Cells that never change are constants: they only add |s|² at f = 0.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from lifescope import config
from main.errors import (
    ConfigError,
    EmptyInput,
    InsufficientSupport,
    MemoryBudgetExceeded,
    MismatchedFrequencySets,
)
from main.kernels import recorder as kernels
from main.life_engine import StepView, Universe, run

logger = logging.getLogger("lifescope.spectral")

MODES = ("exact", "probe")


# ── Configuration ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class AnalysisConfig:
    T: int = config.WINDOW_T
    f_u: int = config.FIT_F_UPPER
    sector_size: int = config.SECTOR_SIZE
    roi: Optional[tuple] = None          # (x, y, width, height) in universe cells
    start_step: int = config.START_STEP
    beta_max: float = config.BETA_MAX
    sigma2_max: float = config.SIGMA2_MAX
    peak_ratio: float = config.PEAK_RATIO
    probe_periods: tuple = config.PROBE_PERIODS
    mode: str = config.ANALYSIS_MODE
    class_order: tuple = config.CLASS_ORDER
    peak_veto: bool = config.PEAK_VETO
    memory_limit: int = config.EXACT_MEMORY_LIMIT

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.T < 2:
            raise ConfigError("T must be >= 2")
        if self.mode == "exact" and self.T & (self.T - 1):
            raise ConfigError(f"exact mode needs T to be a power of two, got {self.T}")
        if not 1 <= self.f_u < self.T / 2:
            raise ConfigError(f"f_u must satisfy 1 <= f_u < T/2, got {self.f_u}")
        if self.sector_size < 1:
            raise ConfigError("sector_size must be >= 1")
        if self.start_step < 0:
            raise ConfigError("start_step must be >= 0")
        if self.peak_ratio <= 0:
            raise ConfigError("peak_ratio must be positive")
        if any(p < 1 for p in self.probe_periods):
            raise ConfigError("probe periods must be >= 1")
        if sorted(self.class_order) != ["power_law", "sharp_peaks"]:
            raise ConfigError("class_order must order 'power_law' and 'sharp_peaks'")
        if self.roi is not None:
            _, _, w, h = self.roi
            if w <= 0 or h <= 0 or w % self.sector_size or h % self.sector_size:
                raise ConfigError(
                    f"roi {w}x{h} is not a positive multiple of the {self.sector_size}-cell sector"
                )

    def resolve_roi(self, u: Universe) -> tuple:
        """The configured roi, or the largest sector-aligned one from the origin."""
        if self.roi is None:
            w = u.width - u.width % self.sector_size
            h = u.height - u.height % self.sector_size
            if w == 0 or h == 0:
                raise ConfigError(
                    f"{u.width}x{u.height} universe is smaller than one sector"
                )
            return (0, 0, w, h)
        x, y, w, h = self.roi
        if x < 0 or y < 0 or x + w > u.width or y + h > u.height:
            raise ConfigError(f"roi {self.roi} lies outside the {u.width}x{u.height} universe")
        return tuple(self.roi)

    @property
    def bytes_per_cell(self) -> int:
        return max(1, self.T // 8)


def probe_frequencies(cfg: AnalysisConfig) -> np.ndarray:
    """Bins [0, f_u] plus every harmonic round(k*T/period) up to T/2, per period."""
    bins = set(range(0, cfg.f_u + 1))
    for period in cfg.probe_periods:
        for k in range(1, period // 2 + 1):
            bins.add(int(np.floor(k * cfg.T / period + 0.5)))
    return np.array(sorted(b for b in bins if b <= cfg.T // 2), dtype=np.int64)


# ── Domain types ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class CellSeries:
    x: int
    y: int
    bits: np.ndarray     # packed, least significant bit first
    T: int

    @classmethod
    def from_values(cls, x: int, y: int, values: Sequence[int]) -> "CellSeries":
        values = np.asarray(values, dtype=np.uint8)
        return cls(x, y, np.packbits(values, bitorder="little"), len(values))

    def values(self) -> np.ndarray:
        return np.unpackbits(self.bits, bitorder="little")[:self.T]

    @property
    def ones(self) -> int:
        return int(self.values().sum())


@dataclass(frozen=True)
class CellSpectrum:
    freqs: np.ndarray
    amplitudes: np.ndarray


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    beta: float
    sigma2: float
    fitted_bins: int
    f_lo: int = 1
    f_hi: int = config.FIT_F_UPPER


@dataclass
class SectorSpectrum:
    sector: Optional[tuple]   # (sector_x, sector_y); None for aggregates
    freqs: np.ndarray
    S: np.ndarray
    n_cells: int
    T: int
    fit: Optional[PowerLawFit] = None

    def period(self, f: int) -> float:
        return self.T / f

    def power_at(self, f: int) -> float:
        idx = np.searchsorted(self.freqs, f)
        if idx < len(self.freqs) and self.freqs[idx] == f:
            return float(self.S[idx])
        raise KeyError(f)


@dataclass
class AnalysisResult:
    spectra: list
    sectors_x: int
    sectors_y: int
    roi: tuple
    final: Universe
    changed_cells: int
    freqs: np.ndarray = field(repr=False, default=None)


# ── Transforms and power ─────────────────────────────────────────────────────

def _twiddles(T: int) -> np.ndarray:
    return np.exp(-2j * np.pi * np.arange(T) / T)


def cell_dft(series: CellSeries, freqs: Optional[Sequence[int]] = None) -> CellSpectrum:
    """
    ŝ(f) for one cell. With freqs None the full one-sided range f = 0..T/2
    comes from a real FFT; otherwise each requested bin is summed directly.
    """
    values = series.values().astype(np.float64)
    T = series.T
    if freqs is None:
        return CellSpectrum(np.arange(T // 2 + 1), np.fft.rfft(values) / T)
    freqs = np.asarray(freqs, dtype=np.int64)
    t = np.arange(T, dtype=np.int64)
    tw = _twiddles(T)
    amplitudes = np.array([np.dot(values, tw[(f * t) % T]) for f in freqs]) / T
    return CellSpectrum(freqs, amplitudes)


def _same_freqs(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and np.array_equal(a, b)


def sector_power(cell_spectra: Sequence[CellSpectrum], n_cells: int, constant_ones: int = 0,
                 freqs: Optional[np.ndarray] = None, sector: Optional[tuple] = None,
                 T: Optional[int] = None) -> SectorSpectrum:
    """
    S(f) = (1/N) Σ |ŝ(f)|² over the given cells. Constant cells are passed as
    a count of permanently live cells and add 1 each at f = 0; they are part
    of n_cells either way.
    """
    if freqs is None:
        if not cell_spectra:
            raise EmptyInput("no cell spectra and no frequency set")
        freqs = cell_spectra[0].freqs
    freqs = np.asarray(freqs)
    S = np.zeros(len(freqs), dtype=np.float64)
    for spectrum in cell_spectra:
        if not _same_freqs(spectrum.freqs, freqs):
            raise MismatchedFrequencySets("cell spectra use different frequency sets")
        S += spectrum.amplitudes.real ** 2 + spectrum.amplitudes.imag ** 2
    S[freqs == 0] += constant_ones
    if T is None:
        T = 2 * int(freqs.max()) if len(freqs) else 0
    return SectorSpectrum(sector, freqs, S / n_cells, n_cells, T)


# ── Power-law fit ────────────────────────────────────────────────────────────

def _fit_band(s: SectorSpectrum, f_lo: int, f_hi: int) -> tuple:
    sel = (s.freqs >= f_lo) & (s.freqs <= f_hi) & (s.S > 0)
    return np.log(s.freqs[sel].astype(np.float64)), np.log(s.S[sel])


def fit_power_law(s: SectorSpectrum, f_lo: int = 1,
                  f_hi: int = config.FIT_F_UPPER) -> PowerLawFit:
    """Closed-form least squares of ln S on ln f over the positive bins of [f_lo, f_hi]."""
    x, y = _fit_band(s, f_lo, f_hi)
    if len(x) < 2:
        raise InsufficientSupport(len(x), f_lo, f_hi)
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    beta = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    alpha = float(ym - beta * xm)
    fit = PowerLawFit(alpha, beta, float("nan"), len(x), f_lo, f_hi)
    return replace(fit, sigma2=residual(s, fit, f_lo, f_hi))


def residual(s: SectorSpectrum, fit: PowerLawFit, f_lo: int = 1,
             f_hi: int = config.FIT_F_UPPER) -> float:
    """Mean squared log residual over the bins the fit used."""
    x, y = _fit_band(s, f_lo, f_hi)
    if len(x) == 0:
        return float("nan")
    r = y - fit.alpha - fit.beta * x
    return float(np.dot(r, r) / len(x))


def average_spectrum(spectra: Sequence[SectorSpectrum]) -> SectorSpectrum:
    if not spectra:
        raise EmptyInput("no spectra to average")
    freqs = spectra[0].freqs
    for s in spectra[1:]:
        if not _same_freqs(s.freqs, freqs):
            raise MismatchedFrequencySets("sector spectra use different frequency sets")
    mean = np.mean(np.stack([s.S for s in spectra]), axis=0)
    return SectorSpectrum(None, freqs.copy(), mean, spectra[0].n_cells, spectra[0].T)


# ── Recording ────────────────────────────────────────────────────────────────

class _ChangeRecorder:
    """Observer that allocates per-cell storage on first change inside the roi."""

    def __init__(self, roi: tuple, cfg: AnalysisConfig, base: np.ndarray,
                 first_generation: int, row_bytes: int):
        self.x0, self.y0, self.w, self.h = roi
        self.cfg = cfg
        self.T = cfg.T
        self.base = base
        self.first_generation = first_generation
        self.row_bytes = row_bytes
        self.budget_cells = cfg.memory_limit // max(1, row_bytes)
        self.slot_map = np.full((self.h, self.w), -1, dtype=np.int32)
        self.slot_xy = np.zeros((0, 2), dtype=np.int32)
        self.n_slots = 0

    def _ensure(self, needed: int) -> None:
        if needed <= len(self.slot_xy):
            return
        if needed > self.budget_cells:
            raise MemoryBudgetExceeded(needed, self.row_bytes, self.cfg.memory_limit)
        capacity = min(max(needed, 2 * len(self.slot_xy), 1024), self.budget_cells)
        self._grow(capacity)

    def _grow(self, capacity: int) -> None:
        slot_xy = np.zeros((capacity, 2), dtype=np.int32)
        slot_xy[:self.n_slots] = self.slot_xy[:self.n_slots]
        self.slot_xy = slot_xy

    def __call__(self, generation: int, view: StepView) -> None:
        t = generation - self.first_generation
        need = kernels.count_new_changes(view.previous, view.cells, self.x0, self.y0,
                                         self.w, self.h, self.slot_map)
        if need:
            self._ensure(self.n_slots + need)
        self._record(view, t)

    def _record(self, view: StepView, t: int) -> None:
        self.n_slots = kernels.record_toggles(
            view.previous, view.cells, self.x0, self.y0, self.w, self.h,
            self.slot_map, self.slot_xy, self.n_slots,
            np.zeros((len(self.slot_xy), 0), dtype=np.uint8), t,
        )

    # sector bookkeeping shared by both modes

    def constant_ones(self) -> np.ndarray:
        ss = self.cfg.sector_size
        const = (self.base == 1) & (self.slot_map < 0)
        return const.reshape(self.h // ss, ss, self.w // ss, ss).sum(axis=(1, 3))

    def slots_by_sector(self) -> tuple:
        """Slot indices grouped by sector in allocation order, plus group bounds."""
        ss = self.cfg.sector_size
        sectors_x = self.w // ss
        xy = self.slot_xy[:self.n_slots]
        key = (xy[:, 1] // ss).astype(np.int64) * sectors_x + xy[:, 0] // ss
        order = np.argsort(key, kind="stable")
        bounds = np.searchsorted(key[order], np.arange(sectors_x * (self.h // ss) + 1))
        return order, bounds

    def slot_base(self, slots: np.ndarray) -> np.ndarray:
        xy = self.slot_xy[slots]
        return self.base[xy[:, 1], xy[:, 0]]


class _ExactRecorder(_ChangeRecorder):

    def __init__(self, roi, cfg, base, first_generation):
        super().__init__(roi, cfg, base, first_generation, cfg.bytes_per_cell)
        self.toggles = np.zeros((0, cfg.bytes_per_cell), dtype=np.uint8)

    def _grow(self, capacity: int) -> None:
        toggles = np.zeros((capacity, self.row_bytes), dtype=np.uint8)
        toggles[:self.n_slots] = self.toggles[:self.n_slots]
        self.toggles = toggles
        super()._grow(capacity)

    def _record(self, view: StepView, t: int) -> None:
        self.n_slots = kernels.record_toggles(
            view.previous, view.cells, self.x0, self.y0, self.w, self.h,
            self.slot_map, self.slot_xy, self.n_slots, self.toggles, t,
        )

    def freqs(self) -> np.ndarray:
        return np.arange(self.T // 2 + 1, dtype=np.int64)

    def sector_S(self, slots: np.ndarray, constant_ones: int) -> np.ndarray:
        T = self.T
        S = np.zeros(T // 2 + 1, dtype=np.float64)
        S[0] = constant_ones
        batch = max(1, config.FFT_BATCH_BYTES // (16 * T))
        for start in range(0, len(slots), batch):
            chunk = slots[start:start + batch]
            toggles = np.unpackbits(self.toggles[chunk], axis=1, bitorder="little")[:, :T]
            series = np.bitwise_xor.accumulate(toggles, axis=1) ^ self.slot_base(chunk)[:, None]
            amplitudes = np.fft.rfft(series.astype(np.float64), axis=1) / T
            S += np.sum(amplitudes.real ** 2 + amplitudes.imag ** 2, axis=0)
        return S


class _ProbeRecorder(_ChangeRecorder):

    def __init__(self, roi, cfg, base, first_generation):
        self.probe = probe_frequencies(cfg)
        super().__init__(roi, cfg, base, first_generation, 16 * len(self.probe) + 16)
        self.twiddles = _twiddles(cfg.T)
        self.acc = np.zeros((0, len(self.probe)), dtype=np.complex128)
        self.net = np.zeros(0, dtype=np.int64)
        self.dc = np.zeros(0, dtype=np.int64)

    def _grow(self, capacity: int) -> None:
        n = self.n_slots
        acc = np.zeros((capacity, len(self.probe)), dtype=np.complex128)
        acc[:n] = self.acc[:n]
        net = np.zeros(capacity, dtype=np.int64)
        net[:n] = self.net[:n]
        dc = np.zeros(capacity, dtype=np.int64)
        dc[:n] = self.dc[:n]
        self.acc, self.net, self.dc = acc, net, dc
        super()._grow(capacity)

    def _record(self, view: StepView, t: int) -> None:
        self.n_slots = kernels.accumulate_probe(
            view.previous, view.cells, self.x0, self.y0, self.w, self.h,
            self.slot_map, self.slot_xy, self.n_slots, t, self.T,
            self.probe, self.twiddles, self.acc, self.net, self.dc,
        )

    def freqs(self) -> np.ndarray:
        return self.probe

    def amplitudes(self, slots: np.ndarray) -> np.ndarray:
        """Closed-form ŝ(f) per slot from the change-driven accumulators."""
        T = self.T
        f = self.probe
        out = np.empty((len(slots), len(f)), dtype=np.complex128)
        nonzero = f != 0
        # Σ_{t=a}^{T-1} e^{-iωt} = (e^{-iωa} - 1) / (1 - e^{-iω}) for integer f ≠ 0
        denom = T * (1.0 - self.twiddles[f[nonzero] % T])
        out[:, nonzero] = (self.acc[slots][:, nonzero] - self.net[slots][:, None]) / denom
        out[:, ~nonzero] = ((self.slot_base(slots).astype(np.int64) * T + self.dc[slots])
                            / T)[:, None]
        return out

    def sector_S(self, slots: np.ndarray, constant_ones: int) -> np.ndarray:
        S = np.zeros(len(self.probe), dtype=np.float64)
        S[self.probe == 0] = constant_ones
        if len(slots):
            a = self.amplitudes(slots)
            S += np.sum(a.real ** 2 + a.imag ** 2, axis=0)
        return S


class _CensusRecorder(_ChangeRecorder):
    """Counts changed cells without storing series (dry-run pre-pass)."""

    def __init__(self, roi, cfg, base, first_generation):
        super().__init__(roi, cfg, base, first_generation, 8)
        self.budget_cells = roi[2] * roi[3]


def _progress(observer, total: int, every: int):
    started = time.monotonic()
    state = {"seen": 0}

    def wrapped(generation: int, view: StepView) -> None:
        observer(generation, view)
        state["seen"] += 1
        seen = state["seen"]
        if seen % every == 0 or seen == total:
            elapsed = time.monotonic() - started
            eta = elapsed / seen * (total - seen)
            logger.info("window step %d/%d (%.1f%%), elapsed %.1fs, eta %.1fs",
                        seen, total, 100.0 * seen / total, elapsed, eta)

    return wrapped


def _open_window(u: Universe, cfg: AnalysisConfig, workers: int) -> tuple:
    cfg.validate()
    roi = cfg.resolve_roi(u)
    if cfg.start_step:
        logger.info("advancing %d generations before the window opens", cfg.start_step)
        u = run(u, cfg.start_step, workers=workers)
    x, y, w, h = roi
    base = u.crop(x, y, w, h).copy()
    return u, roi, base


def estimate_exact_memory(u: Universe, cfg: AnalysisConfig, workers: int = 1) -> tuple:
    """Run the window once, counting changed roi cells. Returns (cells, bytes)."""
    u, roi, base = _open_window(u, cfg, workers)
    census = _CensusRecorder(roi, cfg, base, u.generation + 1)
    run(u, cfg.T, _progress(census, cfg.T, config.PROGRESS_EVERY), workers=workers)
    nbytes = census.n_slots * cfg.bytes_per_cell
    logger.info("dry run: %d changed cells x %d bytes = %d bytes",
                census.n_slots, cfg.bytes_per_cell, nbytes)
    return census.n_slots, nbytes


def analyze(u: Universe, cfg: AnalysisConfig, workers: int = 1) -> AnalysisResult:
    """
    Simulate start_step discarded generations, then record T generations and
    return one SectorSpectrum per sector of the roi, in row-major sector order.
    """
    u, roi, base = _open_window(u, cfg, workers)
    recorder_cls = _ExactRecorder if cfg.mode == "exact" else _ProbeRecorder
    recorder = recorder_cls(roi, cfg, base, u.generation + 1)
    logger.info("%s window of %d steps over roi %s, %d-cell sectors",
                cfg.mode, cfg.T, roi, cfg.sector_size)
    final = run(u, cfg.T, _progress(recorder, cfg.T, config.PROGRESS_EVERY), workers=workers)
    logger.info("%d cells changed in the window (%d bytes of series)",
                recorder.n_slots, recorder.n_slots * recorder.row_bytes)

    ss = cfg.sector_size
    sectors_x, sectors_y = roi[2] // ss, roi[3] // ss
    const = recorder.constant_ones()
    order, bounds = recorder.slots_by_sector()
    freqs = recorder.freqs()
    n_cells = ss * ss

    def sector(index: int) -> SectorSpectrum:
        sy, sx = divmod(index, sectors_x)
        slots = order[bounds[index]:bounds[index + 1]]
        S = recorder.sector_S(slots, int(const[sy, sx]))
        return SectorSpectrum((sx, sy), freqs, S / n_cells, n_cells, cfg.T)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        spectra = list(pool.map(sector, range(sectors_x * sectors_y)))
    return AnalysisResult(spectra, sectors_x, sectors_y, roi, final, recorder.n_slots, freqs)
