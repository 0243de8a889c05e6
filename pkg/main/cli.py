"""
Shared plumbing for the management commands: flag value parsers and the
mapping from library errors to process exit codes.
"""

import argparse
import logging
from contextlib import contextmanager

from django.core.management.base import CommandError

from lifescope import config
from main.errors import (
    ConfigError,
    EngineError,
    LifeScopeError,
    MemoryBudgetExceeded,
    PatternError,
    ProgramError,
    StepLimitExceeded,
)

logger = logging.getLogger("lifescope.cli")

EXIT_USAGE = 2
EXIT_MEMORY = 3
EXIT_STEP_LIMIT = 4


def int_list(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}") from None


def roi_flag(text: str) -> tuple:
    """x,y,w,h relative to the pattern, or the name of a stored region."""
    named = config.NAMED_ROIS.get(text.strip().lower())
    if named is not None:
        return tuple(named)
    values = int_list(text)
    if len(values) != 4:
        raise argparse.ArgumentTypeError(
            f"expected x,y,w,h or one of {', '.join(sorted(config.NAMED_ROIS))}, got {text!r}")
    return tuple(values)


@contextmanager
def exit_codes():
    """Translate library errors into CommandError with the documented exit codes."""
    try:
        yield
    except MemoryBudgetExceeded as exc:
        raise CommandError(str(exc), returncode=EXIT_MEMORY) from exc
    except StepLimitExceeded as exc:
        raise CommandError(str(exc), returncode=EXIT_STEP_LIMIT) from exc
    except (PatternError, ProgramError, ConfigError, EngineError) as exc:
        raise CommandError(str(exc), returncode=EXIT_USAGE) from exc
    except OSError as exc:
        raise CommandError(str(exc), returncode=EXIT_USAGE) from exc
    except LifeScopeError as exc:
        logger.error("analysis failed: %s", exc)
        raise CommandError(str(exc), returncode=1) from exc
