"""
Static renders: the sector class map as a binary PGM and a sector spectrum
as an SVG plot. Both are pure functions of their inputs, byte for byte.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

from lifescope import config
from main.classifier import ClassMap, SectorClass
from main.errors import ConfigError, EmptySpectrum
from main.spectral import PowerLawFit, SectorSpectrum


@dataclass(frozen=True)
class Palette:
    grays: Mapping

    def __post_init__(self):
        missing = [cls.value for cls in SectorClass if cls not in self.grays]
        if missing:
            raise ConfigError(f"palette has no gray for {', '.join(missing)}")
        if any(not 0 <= int(v) <= 255 for v in self.grays.values()):
            raise ConfigError("palette grays must lie in 0..255")

    @classmethod
    def default(cls, distinct_dc: bool = False) -> "Palette":
        grays = {SectorClass(name): gray for name, gray in config.PALETTE.items()}
        if distinct_dc:
            grays[SectorClass.DC_ONLY] = config.DISTINCT_DC_GRAY
        return cls(grays)

    def __getitem__(self, cls: SectorClass) -> int:
        return int(self.grays[cls])


def render_map(m: ClassMap, palette: Optional[Palette] = None,
               scale: int = config.MAP_SCALE) -> bytes:
    if scale < 1:
        raise ConfigError("scale must be >= 1")
    palette = palette or Palette.default()
    gray = np.array([[palette[m.at(sx, sy)] for sx in range(m.sectors_x)]
                     for sy in range(m.sectors_y)], dtype=np.uint8)
    pixels = np.repeat(np.repeat(gray, scale, axis=0), scale, axis=1)
    header = f"P5\n{m.sectors_x * scale} {m.sectors_y * scale}\n255\n".encode("ascii")
    return header + pixels.tobytes()


# ── SVG spectrum plot ────────────────────────────────────────────────────────

_LEFT, _RIGHT = config.SVG_PLOT_LEFT, config.SVG_PLOT_RIGHT
_TOP, _BOTTOM = config.SVG_PLOT_TOP, config.SVG_PLOT_BOTTOM
_SNAP = 1e-9     # log10 of an exact power of ten may be off by an ulp


def _y_decades(values: np.ndarray) -> tuple:
    if len(values) == 0:
        return -1, 0
    logs = np.log10(values)
    lo, hi = math.floor(logs.min() + _SNAP), math.ceil(logs.max() - _SNAP)
    if lo == hi:
        hi = lo + 1
    return lo, hi


class _Axes:
    def __init__(self, fmax: float, ydec: tuple, linear_x: bool):
        self.linear_x = linear_x
        self.fmax = max(fmax, 1.0)
        self.xdec = max(1, math.ceil(math.log10(self.fmax) - _SNAP))
        self.ymin, self.ymax = ydec

    def px(self, f: float) -> float:
        span = _RIGHT - _LEFT
        if self.linear_x:
            return _LEFT + span * f / self.fmax
        return _LEFT + span * math.log10(f) / self.xdec

    def py(self, s: float) -> float:
        span = _BOTTOM - _TOP
        return _TOP + span * (self.ymax - math.log10(s)) / (self.ymax - self.ymin)

    def x_ticks(self) -> list:
        if self.linear_x:
            return [(self.fmax * i / 4, f"{self.fmax * i / 4:g}") for i in range(5)]
        return [(10.0 ** k, f"1e{k}") for k in range(self.xdec + 1)]

    def y_ticks(self) -> list:
        return [(10.0 ** k, f"1e{k}") for k in range(self.ymin, self.ymax + 1)]


def _points(pairs) -> str:
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in pairs)


def render_spectrum(s: SectorSpectrum, fit: Optional[PowerLawFit] = None,
                    linear_x: bool = False) -> bytes:
    """
    Log-log plot of S(f) for f ≥ 1 with positive power. The fit, when given,
    is drawn dashed over [fit.f_lo, fit.f_hi]; S(0) is printed as a DC label.
    A spectrum with no positive f ≥ 1 bins yields an empty data polyline.
    """
    if len(s.freqs) == 0:
        raise EmptySpectrum("spectrum has no frequency bins")
    plotted = (s.freqs >= 1) & (s.S > 0)
    freqs = s.freqs[plotted].astype(np.float64)
    values = s.S[plotted]
    axes = _Axes(float(s.freqs.max()), _y_decades(values), linear_x)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{config.SVG_WIDTH}" height="{config.SVG_HEIGHT}" '
        f'viewBox="0 0 {config.SVG_WIDTH} {config.SVG_HEIGHT}">',
        f'<rect x="0" y="0" width="{config.SVG_WIDTH}" height="{config.SVG_HEIGHT}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{_RIGHT - _LEFT}" height="{_BOTTOM - _TOP}" '
        f'fill="none" stroke="black"/>',
    ]
    for f, label in axes.x_ticks():
        x = axes.px(f)
        out.append(f'<line x1="{x:.2f}" y1="{_BOTTOM}" x2="{x:.2f}" y2="{_BOTTOM + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{_BOTTOM + 20}" font-size="12" '
                   f'text-anchor="middle">{label}</text>')
    for v, label in axes.y_ticks():
        y = axes.py(v)
        out.append(f'<line x1="{_LEFT - 5}" y1="{y:.2f}" x2="{_LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{_LEFT - 8}" y="{y:.2f}" font-size="12" '
                   f'text-anchor="end">{label}</text>')
    out.append(f'<text x="{(_LEFT + _RIGHT) // 2}" y="{config.SVG_HEIGHT - 10}" '
               f'font-size="14" text-anchor="middle">f</text>')
    out.append(f'<text x="20" y="{(_TOP + _BOTTOM) // 2}" font-size="14" text-anchor="middle" '
               f'transform="rotate(-90 20 {(_TOP + _BOTTOM) // 2})">S(f)</text>')

    out.append('<polyline id="spectrum" fill="none" stroke="black" stroke-width="1" points="'
               + _points((axes.px(f), axes.py(v)) for f, v in zip(freqs, values)) + '"/>')

    if fit is not None:
        if linear_x:
            fs = np.arange(fit.f_lo, fit.f_hi + 1, dtype=np.float64)
        else:
            fs = np.array([fit.f_lo, fit.f_hi], dtype=np.float64)
        line = ((axes.px(f), axes.py(math.exp(fit.alpha + fit.beta * math.log(f)))) for f in fs)
        out.append('<polyline id="fit" fill="none" stroke="gray" stroke-width="1" '
                   'stroke-dasharray="6,4" points="' + _points(line) + '"/>')

    dc = s.S[s.freqs == 0]
    if len(dc):
        out.append(f'<text id="dc" x="{_RIGHT - 10}" y="{_TOP + 20}" font-size="12" '
                   f'text-anchor="end">DC S(0) = {float(dc[0]):.3e}</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def write_bytes(path: Union[str, Path], data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    return path
