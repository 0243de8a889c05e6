"""
LifeScope error hierarchy.

Every failure the library can raise derives from LifeScopeError, grouped by
the module that raises it. BoundaryContact is the one warning-grade signal:
it is recorded and logged, never raised.
"""


class LifeScopeError(Exception):
    """Base class for all LifeScope errors."""


class ConfigError(LifeScopeError):
    """An AnalysisConfig or command-line value is out of range."""


# ── pattern-io ───────────────────────────────────────────────────────────────

class PatternError(LifeScopeError):
    """An RLE document could not be decoded."""


class MalformedHeader(PatternError):
    pass


class UnsupportedRule(PatternError):
    def __init__(self, rule: str):
        super().__init__(f"unsupported rule {rule!r}; only B3/S23 is analysed")
        self.rule = rule


class RunOverflow(PatternError):
    def __init__(self, x: int, y: int, width: int, height: int):
        super().__init__(
            f"run reaches ({x}, {y}) outside the declared {width}x{height} pattern"
        )
        self.x, self.y = x, y


class UnexpectedSymbol(PatternError):
    def __init__(self, symbol: str, offset: int):
        super().__init__(f"unexpected symbol {symbol!r} at body offset {offset}")
        self.symbol = symbol
        self.offset = offset


# ── life-engine ──────────────────────────────────────────────────────────────

class EngineError(LifeScopeError):
    pass


class AllocationTooLarge(EngineError):
    def __init__(self, width: int, height: int, nbytes: int, budget: int):
        super().__init__(
            f"{width}x{height} universe needs {nbytes} bytes, budget is {budget}"
        )
        self.nbytes = nbytes
        self.budget = budget


class BoundaryContact(UserWarning):
    """A live cell reached the outermost ring; later analysis is suspect."""

    def __init__(self, generation: int):
        super().__init__(f"live cell on the boundary ring at generation {generation}")
        self.generation = generation


# ── register-machine ─────────────────────────────────────────────────────────

class ProgramError(LifeScopeError):
    pass


class ProgramParseError(ProgramError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class SteppedWhileHalted(ProgramError):
    pass


class StepLimitExceeded(ProgramError):
    def __init__(self, max_steps: int, state, trace):
        super().__init__(f"program did not halt within {max_steps} steps")
        self.max_steps = max_steps
        self.state = state
        self.trace = trace


# ── spectral ─────────────────────────────────────────────────────────────────

class SpectralError(LifeScopeError):
    pass


class InsufficientSupport(SpectralError):
    def __init__(self, positive_bins: int, f_lo: int, f_hi: int):
        super().__init__(
            f"only {positive_bins} positive bins in [{f_lo}, {f_hi}], need 2"
        )
        self.positive_bins = positive_bins


class MismatchedFrequencySets(SpectralError):
    pass


class EmptyInput(SpectralError):
    pass


class MemoryBudgetExceeded(SpectralError):
    def __init__(self, changed_cells: int, bytes_per_cell: int, limit: int):
        super().__init__(
            f"{changed_cells} changed cells x {bytes_per_cell} bytes/cell = "
            f"{changed_cells * bytes_per_cell} bytes exceeds the {limit}-byte limit"
        )
        self.changed_cells = changed_cells
        self.bytes_per_cell = bytes_per_cell
        self.limit = limit


# ── classifier / render ──────────────────────────────────────────────────────

class ClassifierError(LifeScopeError):
    pass


class IncompleteGrid(ClassifierError):
    pass


class RenderError(LifeScopeError):
    pass


class EmptySpectrum(RenderError):
    pass
