import shlex
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from main.manifest import parse_manifest, replay_argv
from main.models import AnalysisRun


class Command(BaseCommand):
    help = "List analysis runs stored in the run registry."

    def add_arguments(self, parser):
        parser.add_argument("--limit", type=int, default=20)
        parser.add_argument("--show", type=int, default=None, help="Print one run with its outputs")
        parser.add_argument("--replay", default=None, metavar="MANIFEST",
                            help="Print the analyze command that repeats the run in a manifest.txt")

    def handle(self, *args, **opts):
        if opts["replay"] is not None:
            try:
                entries = parse_manifest(Path(opts["replay"]).read_text(encoding="utf-8"))
            except OSError as exc:
                raise CommandError(str(exc), returncode=2) from exc
            argv = replay_argv(entries)
            if not argv:
                raise CommandError(f"{opts['replay']} has no flag lines", returncode=2)
            self.stdout.write(shlex.join(["python", "manage.py", "analyze", *argv]))
            return

        if opts["show"] is not None:
            try:
                run = AnalysisRun.objects.get(pk=opts["show"])
            except AnalysisRun.DoesNotExist:
                raise CommandError(f"no run {opts['show']}", returncode=2) from None
            self.stdout.write(str(run))
            self.stdout.write(f"pattern sha256: {run.pattern_sha256}")
            self.stdout.write(f"engine {run.engine_version}, changed cells {run.changed_cells}, "
                              f"boundary contacts {run.boundary_contacts}")
            for key, value in sorted(run.config.items()):
                self.stdout.write(f"  config.{key} = {value}")
            for out in run.outputs.all():
                self.stdout.write(f"  {out.name}: {out.path} sha256:{out.sha256}")
            return

        runs = AnalysisRun.objects.all()[:opts["limit"]]
        if not runs:
            self.stdout.write("no recorded runs")
            return
        for run in runs:
            counts = " ".join(f"{k}={v}" for k, v in run.class_counts.items())
            self.stdout.write(f"{run.pk:>4} {run.created_at:%Y-%m-%d %H:%M} {run.pattern_path} "
                              f"{run.mode} T={run.window} {counts}")
