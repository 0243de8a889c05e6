from django.core.management.base import BaseCommand

from lifescope import config
from main.bench import format_report, run_bench, verify_oracle
from main.cli import int_list


class Command(BaseCommand):
    help = "Measure naive and bit-parallel kernel throughput in cell updates per second."

    def add_arguments(self, parser):
        parser.add_argument("--sizes", type=int_list, default=list(config.BENCH_SIZES))
        parser.add_argument("--steps", type=int, default=config.BENCH_STEPS)
        parser.add_argument("--workers", type=int_list, default=list(config.BENCH_WORKERS))
        parser.add_argument("--verify", action="store_true",
                            help="Check the bit-parallel kernel against the reference first")

    def handle(self, *args, **opts):
        if opts["verify"]:
            ok = verify_oracle()
            self.stdout.write(f"oracle check: {'pass' if ok else 'FAIL'}")
        rows = run_bench(opts["sizes"], opts["steps"], opts["workers"])
        self.stdout.write(format_report(rows))
