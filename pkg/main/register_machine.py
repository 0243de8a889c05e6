"""
Register machine
----------------
Interpreter for INC / DEC / HALT programs and the prime-power (Gödel)
encoding of a program plus its registers into the twelve registers of a
universal register machine.

Program text: one instruction per line, `INC n pass`, `DEC n pass fail`,
`HALT`. Blank lines and lines starting with `#` are skipped; addresses are
the zero-based positions of the instruction lines.
"""

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from math import isqrt, log
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from main.errors import (
    ProgramError,
    ProgramParseError,
    SteppedWhileHalted,
    StepLimitExceeded,
)

logger = logging.getLogger("lifescope.rm")

URM_REGISTERS = 12


class Opcode(IntEnum):
    """Values double as the operator codes of the program encoding."""
    HALT = 0
    INC = 1
    DEC = 2


_ARITY = {Opcode.HALT: 0, Opcode.INC: 2, Opcode.DEC: 3}


@dataclass(frozen=True)
class RmInstruction:
    opcode: Opcode
    reg: Optional[int] = None
    pass_adr: Optional[int] = None
    fail_adr: Optional[int] = None

    def __post_init__(self):
        operands = [v for v in (self.reg, self.pass_adr, self.fail_adr) if v is not None]
        if len(operands) != _ARITY[self.opcode]:
            raise ProgramError(f"{self.opcode.name} takes {_ARITY[self.opcode]} operands")
        if any(v < 0 for v in operands):
            raise ProgramError("operands must be non-negative")

    def operands(self) -> tuple:
        """First, second and third operand, 0 where the opcode has none."""
        return tuple(0 if v is None else v for v in (self.reg, self.pass_adr, self.fail_adr))

    def __str__(self) -> str:
        parts = [self.opcode.name] + [str(v) for v in (self.reg, self.pass_adr, self.fail_adr)
                                      if v is not None]
        return " ".join(parts)


@dataclass(frozen=True)
class RmProgram:
    instructions: tuple

    def __post_init__(self):
        if not self.instructions:
            raise ProgramError("program is empty")
        size = len(self.instructions)
        for adr, ins in enumerate(self.instructions):
            for target in (ins.pass_adr, ins.fail_adr):
                if target is not None and target >= size:
                    raise ProgramError(f"address {adr} jumps to {target}, program has {size}")

    def __len__(self) -> int:
        return len(self.instructions)

    def __getitem__(self, adr: int) -> RmInstruction:
        return self.instructions[adr]


@dataclass(frozen=True)
class RmState:
    registers: Mapping = field(default_factory=dict)
    pc: int = 0
    halted: bool = False
    steps_executed: int = 0

    def reg(self, n: int) -> int:
        return self.registers.get(n, 0)

    def snapshot(self, count: Optional[int] = None) -> tuple:
        count = count if count is not None else max(self.registers, default=-1) + 1
        return tuple(self.reg(i) for i in range(count))

    @classmethod
    def initial(cls, values: Sequence[int]) -> "RmState":
        if any(v < 0 for v in values):
            raise ProgramError("register values must be non-negative")
        return cls(registers={i: int(v) for i, v in enumerate(values)})


@dataclass(frozen=True)
class UrmEncoding:
    R: tuple

    def __str__(self) -> str:
        return " ".join(str(v) for v in self.R)


def parse_program(text: str) -> RmProgram:
    instructions = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, *args = line.split()
        try:
            opcode = Opcode[name.upper()]
        except KeyError:
            raise ProgramParseError(line_no, f"unknown instruction {name!r}") from None
        if len(args) != _ARITY[opcode]:
            raise ProgramParseError(line_no, f"{opcode.name} takes {_ARITY[opcode]} operands")
        try:
            values = [int(a) for a in args]
        except ValueError:
            raise ProgramParseError(line_no, f"non-integer operand in {line!r}") from None
        if any(v < 0 for v in values):
            raise ProgramParseError(line_no, "operands must be non-negative")
        instructions.append(RmInstruction(opcode, *values))
    try:
        return RmProgram(tuple(instructions))
    except ProgramError as exc:
        raise ProgramParseError(0, str(exc)) from None


def format_program(prog: RmProgram) -> str:
    return "\n".join(str(ins) for ins in prog.instructions) + "\n"


def rm_step(prog: RmProgram, s: RmState) -> RmState:
    """
    Execute the instruction at s.pc.

    HALT sets the halted flag without counting as an executed instruction,
    so the addition program with r0 = r1 = 1 reports three executed steps.
    """
    if s.halted:
        raise SteppedWhileHalted(f"stepped at pc {s.pc} after HALT")
    ins = prog[s.pc]
    if ins.opcode == Opcode.HALT:
        return RmState(dict(s.registers), s.pc, True, s.steps_executed)

    registers = dict(s.registers)
    value = registers.get(ins.reg, 0)
    if ins.opcode == Opcode.INC:
        registers[ins.reg] = value + 1
        pc = ins.pass_adr
    elif value > 0:
        registers[ins.reg] = value - 1
        pc = ins.pass_adr
    else:
        pc = ins.fail_adr
    return RmState(registers, pc, False, s.steps_executed + 1)


def rm_run(prog: RmProgram, s0: RmState, max_steps: int) -> tuple:
    """
    Step until HALT. Returns (final state, trace) where the trace holds one
    (pc, registers) snapshot after every step, HALT included.

    Raises StepLimitExceeded carrying the partial state and trace when more
    than max_steps instructions would execute.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    state = s0
    trace = []
    while not state.halted:
        if state.steps_executed >= max_steps and prog[state.pc].opcode != Opcode.HALT:
            raise StepLimitExceeded(max_steps, state, trace)
        state = rm_step(prog, state)
        trace.append((state.pc, dict(state.registers)))
    logger.debug("halted after %d executed instructions", state.steps_executed)
    return state, trace


# ── Primes and encoding ──────────────────────────────────────────────────────

_prime_cache = np.array([2, 3, 5, 7, 11, 13], dtype=np.int64)


def first_primes(n: int) -> np.ndarray:
    """The first n primes, from a sieve sized by the n(ln n + ln ln n) bound."""
    global _prime_cache
    if n <= len(_prime_cache):
        return _prime_cache[:n]
    bound = int(n * (log(n) + log(log(n)))) + 10
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(bound) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    _prime_cache = np.flatnonzero(sieve).astype(np.int64)
    return _prime_cache[:n]


def prime(n: int) -> int:
    """P(n), the n-th prime: prime(1) == 2."""
    if n < 1:
        raise ValueError("prime index starts at 1")
    return int(first_primes(n)[n - 1])


def _prime_power_product(exponents: Sequence[int]) -> int:
    result = 1
    for i, e in enumerate(exponents):
        if e:
            result *= prime(i + 1) ** int(e)
    return result


def encode_registers(values: Union[Sequence[int], Mapping]) -> int:
    """R0 = P(1)^r0 * P(2)^r1 * ... with Python integers."""
    if isinstance(values, Mapping):
        size = max(values, default=-1) + 1
        values = [values.get(i, 0) for i in range(size)]
    if any(v < 0 for v in values):
        raise ProgramError("register values must be non-negative")
    return _prime_power_product(values)


def decode_registers(r0: int, count: Optional[int] = None) -> list:
    """Trial division over primes: inverse of encode_registers."""
    if r0 < 1:
        raise ValueError("encoded registers must be >= 1")
    values = []
    i = 1
    while r0 > 1 or (count is not None and len(values) < count):
        p = prime(i)
        e = 0
        while r0 % p == 0:
            r0 //= p
            e += 1
        values.append(e)
        i += 1
    return values


def _operand_power(operands: Sequence[int]) -> int:
    return _prime_power_product([prime(q + 1) - 2 for q in operands])


def encode_urm(prog: RmProgram, regs: Union[Sequence[int], Mapping]) -> UrmEncoding:
    """
    Registers R0..R11 of the universal machine emulating `prog` on `regs`:
    R0 encodes the registers, R1 the operator codes (HALT 0, INC 1, DEC 2),
    R2..R4 the first, second and third operands via exponents P(q+1) - 2,
    R5 = 2 and R6..R11 = 0.
    """
    operands = [ins.operands() for ins in prog.instructions]
    R = [
        encode_registers(regs),
        _prime_power_product([int(ins.opcode) for ins in prog.instructions]),
        _operand_power([ops[0] for ops in operands]),
        _operand_power([ops[1] for ops in operands]),
        _operand_power([ops[2] for ops in operands]),
        prime(1),
    ]
    R.extend([0] * (URM_REGISTERS - len(R)))
    return UrmEncoding(tuple(R))
