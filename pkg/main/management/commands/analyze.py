"""
End-to-end pipeline: load pattern -> simulate -> analyze -> classify -> render.

Outputs in --out-dir:
  spectra.npz          every sector spectrum
  sector_spectra.csv   sector_x,sector_y,f,S for every positive bin
  sector_fits.csv      per-sector power-law fits
  class_map.csv        per-sector class, beta, sigma2, peak bin
  class_map.pgm        the sector activity map
  average_spectrum.csv mean spectrum over all sectors, plus average_fit.csv
  manifest.txt         RunManifest
"""

import logging
import math
from pathlib import Path

from django.core.management.base import BaseCommand

from lifescope import config
from main import classifier, exports, render
from main.cli import exit_codes, int_list, roi_flag
from main.errors import InsufficientSupport
from main.manifest import RunManifest, sha256_file
from main.pattern_io import place, read_pattern
from main.spectral import AnalysisConfig, analyze, average_spectrum, estimate_exact_memory, fit_power_law

logger = logging.getLogger("lifescope.cli")


def _default_roi(pattern, sector: int) -> tuple:
    """The pattern's bounding box, rounded up to whole sectors."""
    w = max(1, math.ceil(pattern.width / sector)) * sector
    h = max(1, math.ceil(pattern.height / sector)) * sector
    return (0, 0, w, h)


def _margin_for(pattern, roi: tuple, margin: int) -> int:
    """Smallest margin ≥ `margin` that keeps a pattern-relative roi inside the universe."""
    x, y, w, h = roi
    return max(margin, -x, -y, x + w - pattern.width, y + h - pattern.height)


def _flag_echo(opts, pattern_path, roi, margin, cfg) -> dict:
    """Every analyze flag that shapes the outputs, with defaults resolved."""
    return {
        "pattern": str(pattern_path),
        "T": cfg.T,
        "f-u": cfg.f_u,
        "sector": cfg.sector_size,
        "roi": roi,
        "start-step": cfg.start_step,
        "beta-max": cfg.beta_max,
        "sigma2-max": cfg.sigma2_max,
        "peak-ratio": cfg.peak_ratio,
        "mode": cfg.mode,
        "probe-periods": cfg.probe_periods,
        "class-order": cfg.class_order,
        "no-peak-veto": not cfg.peak_veto,
        "mem-limit": cfg.memory_limit,
        "margin": margin,
        "workers": opts["workers"],
        "scale": opts["scale"],
        "distinct-dc": opts["distinct_dc"],
        "permissive-rule": opts["permissive_rule"],
        "skip-spectra-csv": opts["skip_spectra_csv"],
    }


class Command(BaseCommand):
    help = "Analyze the spectra of a Life pattern and classify its sectors."

    def add_arguments(self, parser):
        parser.add_argument("--pattern", required=True, help="RLE file")
        parser.add_argument("--T", dest="T", type=int, default=config.WINDOW_T)
        parser.add_argument("--f-u", dest="f_u", type=int, default=None,
                            help=f"Fit upper frequency (default {config.FIT_F_UPPER}, capped below T/2)")
        parser.add_argument("--sector", type=int, default=config.SECTOR_SIZE)
        parser.add_argument("--roi", type=roi_flag, default=None,
                            help="x,y,w,h relative to the pattern's top-left corner")
        parser.add_argument("--start-step", type=int, default=config.START_STEP)
        parser.add_argument("--beta-max", type=float, default=config.BETA_MAX)
        parser.add_argument("--sigma2-max", type=float, default=config.SIGMA2_MAX)
        parser.add_argument("--peak-ratio", type=float, default=config.PEAK_RATIO)
        parser.add_argument("--mode", choices=("exact", "probe"), default=config.ANALYSIS_MODE)
        parser.add_argument("--probe-periods", type=int_list,
                            default=list(config.PROBE_PERIODS))
        parser.add_argument("--class-order", choices=("power_law,sharp_peaks", "sharp_peaks,power_law"),
                            default=",".join(config.CLASS_ORDER))
        parser.add_argument("--no-peak-veto", dest="peak_veto", action="store_false",
                            help="Accept power-law fits even with a sharp peak above the fitted line")
        parser.add_argument("--mem-limit", type=int, default=config.EXACT_MEMORY_LIMIT,
                            help="Bytes of per-cell series allowed in exact mode")
        parser.add_argument("--margin", type=int, default=config.PLACE_MARGIN)
        parser.add_argument("--workers", type=int, default=1)
        parser.add_argument("--out-dir", default="out")
        parser.add_argument("--scale", type=int, default=config.MAP_SCALE)
        parser.add_argument("--distinct-dc", action="store_true")
        parser.add_argument("--permissive-rule", action="store_true")
        parser.add_argument("--skip-spectra-csv", action="store_true")
        parser.add_argument("--dry-run", action="store_true",
                            help="Only count changed cells and report the exact-mode memory need")
        parser.add_argument("--record", action="store_true",
                            help="Store the run manifest in the run registry")

    def handle(self, *args, **opts):
        with exit_codes():
            self._handle(opts)

    def _handle(self, opts):
        pattern_path = Path(opts["pattern"])
        pattern = read_pattern(pattern_path, permissive=opts["permissive_rule"])
        sector = opts["sector"]
        roi = opts["roi"] or _default_roi(pattern, sector)
        margin = _margin_for(pattern, roi, opts["margin"])
        T = opts["T"]
        f_u = opts["f_u"] if opts["f_u"] is not None else min(config.FIT_F_UPPER, max(1, (T - 1) // 2))

        cfg = AnalysisConfig(
            T=T,
            f_u=f_u,
            sector_size=sector,
            roi=(roi[0] + margin, roi[1] + margin, roi[2], roi[3]),
            start_step=opts["start_step"],
            beta_max=opts["beta_max"],
            sigma2_max=opts["sigma2_max"],
            peak_ratio=opts["peak_ratio"],
            probe_periods=tuple(opts["probe_periods"]),
            mode=opts["mode"],
            class_order=tuple(opts["class_order"].split(",")),
            peak_veto=opts["peak_veto"],
            memory_limit=opts["mem_limit"],
        )
        cfg.validate()
        manifest = RunManifest(str(pattern_path), sha256_file(pattern_path), cfg,
                               _flag_echo(opts, pattern_path, roi, margin, cfg))
        workers = opts["workers"]

        with manifest.stage("place"):
            universe = place(pattern, margin)
        logger.info("placed %s in a %dx%d universe (margin %d)",
                    pattern_path.name, universe.width, universe.height, margin)

        if opts["dry_run"]:
            cells, nbytes = estimate_exact_memory(universe, cfg, workers)
            verdict = "fits" if nbytes <= cfg.memory_limit else "exceeds"
            self.stdout.write(f"changed cells: {cells}")
            self.stdout.write(f"exact-mode series: {nbytes} bytes ({cfg.bytes_per_cell} bytes/cell), "
                              f"{verdict} the {cfg.memory_limit}-byte limit")
            return

        with manifest.stage("analyze"):
            result = analyze(universe, cfg, workers)
        manifest.changed_cells = result.changed_cells
        manifest.boundary_contacts = len(result.final.boundary_contacts)

        with manifest.stage("classify"):
            cmap = classifier.classify_map(result.spectra, cfg, result.sectors_x,
                                           result.sectors_y, workers)
        for s in result.spectra:
            s.fit = cmap.grid[s.sector[1]][s.sector[0]].fit
        manifest.class_counts = {cls.value: n for cls, n in cmap.counts.items()}

        out_dir = Path(opts["out_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        with manifest.stage("write"):
            self._write_outputs(out_dir, result, cmap, cfg, opts, manifest)

        manifest_path = manifest.write(out_dir / "manifest.txt")
        if opts["record"]:
            run = manifest.record()
            self.stdout.write(f"recorded as run {run.pk}")

        for cls, n in cmap.counts.items():
            self.stdout.write(f"{cls.value:<11} {n}")
        if manifest.boundary_contacts:
            self.stdout.write(self.style.WARNING(
                f"{manifest.boundary_contacts} generations touched the universe boundary"))
        self.stdout.write(self.style.SUCCESS(f"wrote {manifest_path}"))

    def _write_outputs(self, out_dir, result, cmap, cfg, opts, manifest):
        def emit(name: str, data) -> None:
            path = out_dir / name
            if isinstance(data, str):
                data = data.encode("utf-8")
            render.write_bytes(path, data)
            manifest.add_output(name, path)

        exports.save_spectra(out_dir / "spectra.npz", result.spectra)
        manifest.add_output("spectra.npz", out_dir / "spectra.npz")
        if not opts["skip_spectra_csv"]:
            exports.write_sector_spectra_csv(out_dir / "sector_spectra.csv", result.spectra)
            manifest.add_output("sector_spectra.csv", out_dir / "sector_spectra.csv")
        emit("sector_fits.csv", exports.fit_rows_csv(result.spectra))
        emit("class_map.csv", classifier.class_map_csv(cmap))
        palette = render.Palette.default(distinct_dc=opts["distinct_dc"])
        emit("class_map.pgm", render.render_map(cmap, palette, opts["scale"]))

        mean = average_spectrum(result.spectra)
        emit("average_spectrum.csv", exports.spectrum_csv(mean))
        try:
            mean.fit = fit_power_law(mean, 1, cfg.f_u)
        except InsufficientSupport as exc:
            logger.warning("averaged spectrum has no fit: %s", exc)
        else:
            emit("average_fit.csv", exports.fit_row(mean.fit))
            self.stdout.write(f"averaged spectrum: beta = {mean.fit.beta:.4f}, "
                              f"sigma2 = {mean.fit.sigma2:.4f}")
