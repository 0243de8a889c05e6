from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from lifescope import config
from main import render
from main.classifier import read_class_map_csv
from main.cli import EXIT_USAGE, exit_codes, int_list
from main.errors import InsufficientSupport
from main.exports import load_spectra
from main.spectral import average_spectrum, fit_power_law


class Command(BaseCommand):
    help = "Render a class-map CSV as a PGM, or a stored sector spectrum as an SVG plot."

    def add_arguments(self, parser):
        parser.add_argument("--out", required=True)
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--class-map", help="class_map.csv written by analyze")
        source.add_argument("--spectra", help="spectra.npz written by analyze")
        parser.add_argument("--scale", type=int, default=config.MAP_SCALE)
        parser.add_argument("--distinct-dc", action="store_true")
        parser.add_argument("--sector", type=int_list, default=None,
                            help="sx,sy of the spectrum to plot; omit for the sector average")
        parser.add_argument("--f-u", dest="f_u", type=int, default=config.FIT_F_UPPER)
        parser.add_argument("--no-fit", action="store_true")
        parser.add_argument("--linear-x", action="store_true")

    def handle(self, *args, **opts):
        with exit_codes():
            if opts["class_map"]:
                data = self._map(opts)
            else:
                data = self._spectrum(opts)
            path = render.write_bytes(opts["out"], data)
        self.stdout.write(self.style.SUCCESS(f"wrote {path}"))

    def _map(self, opts) -> bytes:
        cmap = read_class_map_csv(Path(opts["class_map"]).read_text(encoding="utf-8"))
        palette = render.Palette.default(distinct_dc=opts["distinct_dc"])
        return render.render_map(cmap, palette, opts["scale"])

    def _spectrum(self, opts) -> bytes:
        spectra = load_spectra(opts["spectra"])
        if opts["sector"] is None:
            spectrum = average_spectrum(spectra)
        else:
            wanted = tuple(opts["sector"])
            matches = [s for s in spectra if s.sector == wanted]
            if not matches:
                raise CommandError(f"no sector {wanted} in {opts['spectra']}", returncode=EXIT_USAGE)
            spectrum = matches[0]
        fit = None
        if not opts["no_fit"]:
            try:
                fit = fit_power_law(spectrum, 1, opts["f_u"])
            except InsufficientSupport:
                fit = None
        return render.render_spectrum(spectrum, fit, linear_x=opts["linear_x"])
