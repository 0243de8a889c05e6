from pathlib import Path

from django.core.management.base import BaseCommand

from main.cli import exit_codes, int_list
from main.errors import StepLimitExceeded
from main.register_machine import RmState, encode_urm, parse_program, rm_run

DEFAULT_MAX_STEPS = 1_000_000


def _register_line(registers, count: int) -> str:
    return " ".join(f"r{i}={registers.get(i, 0)}" for i in range(count))


class Command(BaseCommand):
    help = "Run a register-machine program or encode it for the universal register machine."

    def add_arguments(self, parser):
        actions = parser.add_subparsers(dest="action", required=True)
        run = actions.add_parser("run", help="Execute a program and print its trace")
        run.add_argument("--program", required=True)
        run.add_argument("--regs", type=int_list, default=[])
        run.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
        encode = actions.add_parser("encode", help="Print R0..R11 of the universal machine")
        encode.add_argument("--program", required=True)
        encode.add_argument("--regs", type=int_list, default=[])
        # subcommand usage errors exit 2 like the top-level parser
        for sub in (run, encode):
            sub.called_from_command_line = parser.called_from_command_line

    def handle(self, *args, **opts):
        with exit_codes():
            prog = parse_program(Path(opts["program"]).read_text(encoding="utf-8"))
            if opts["action"] == "encode":
                for value in encode_urm(prog, opts["regs"]).R:
                    self.stdout.write(str(value))
                return
            self._run(prog, opts)

    def _run(self, prog, opts):
        referenced = [ins.reg for ins in prog.instructions if ins.reg is not None]
        count = max([len(opts["regs"])] + [r + 1 for r in referenced])
        s0 = RmState.initial(opts["regs"])
        try:
            state, trace = rm_run(prog, s0, opts["max_steps"])
        except StepLimitExceeded as exc:
            self.stderr.write(f"step limit reached at pc {exc.state.pc}: "
                              f"{_register_line(exc.state.registers, count)}")
            raise
        self.stdout.write(f"t=0 pc=0 {_register_line(s0.registers, count)}")
        for t, (pc, registers) in enumerate(trace, start=1):
            self.stdout.write(f"t={t} pc={pc} {_register_line(registers, count)}")
        self.stdout.write(self.style.SUCCESS(
            f"halted after {state.steps_executed} steps: {_register_line(state.registers, count)}"))
