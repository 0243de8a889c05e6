"""
Kernel throughput harness: naive reference vs. bit-parallel kernel on random
soups, in cell updates per second.
"""

import logging
import time
from dataclasses import dataclass
from typing import Sequence

from lifescope import config
from main.life_engine import random_universe, run, step, step_reference

logger = logging.getLogger("lifescope.bench")

SOUP_DENSITY = 0.35


@dataclass(frozen=True)
class BenchRow:
    kernel: str
    size: int
    workers: int
    steps: int
    seconds: float

    @property
    def updates_per_second(self) -> float:
        return self.size * self.size * self.steps / self.seconds if self.seconds > 0 else float("inf")


def _time_naive(size: int, steps: int, seed: int) -> float:
    u = random_universe(size, size, SOUP_DENSITY, seed)
    started = time.perf_counter()
    for _ in range(steps):
        u = step_reference(u)
    return time.perf_counter() - started


def _time_bitparallel(size: int, steps: int, workers: int, seed: int) -> float:
    u = random_universe(size, size, SOUP_DENSITY, seed)
    started = time.perf_counter()
    run(u, steps, workers=workers)
    return time.perf_counter() - started


def warm_up(workers: Sequence[int]) -> None:
    """Compile every kernel before timing."""
    u = random_universe(64, 64, SOUP_DENSITY, 0)
    step_reference(u)
    for w in workers:
        step(u, workers=w)


def verify_oracle(trials: int = 8, size: int = 128, steps: int = 64, seed: int = 0) -> bool:
    """Bit-parallel kernel equals the reference at every step on random soups."""
    for trial in range(trials):
        fast = slow = random_universe(size, size, 0.1 + 0.4 * trial / max(1, trials - 1),
                                      seed + trial)
        for _ in range(steps):
            fast, slow = step(fast), step_reference(slow)
            if not fast.same_cells(slow):
                logger.error("kernel mismatch in trial %d at generation %d", trial, fast.generation)
                return False
    return True


def run_bench(sizes: Sequence[int] = config.BENCH_SIZES, steps: int = config.BENCH_STEPS,
              workers: Sequence[int] = config.BENCH_WORKERS, seed: int = 0) -> list:
    warm_up(workers)
    rows = []
    for size in sizes:
        logger.info("benchmarking %dx%d for %d steps", size, size, steps)
        # the reference kernel is serial: one row per size
        rows.append(BenchRow("naive", size, 1, steps, _time_naive(size, steps, seed)))
        for w in workers:
            rows.append(BenchRow("bitparallel", size, w, steps,
                                 _time_bitparallel(size, steps, w, seed)))
    return rows


def speedups(rows: Sequence[BenchRow]) -> dict:
    """size -> naive seconds / single-worker (or fewest-worker) bit-parallel seconds."""
    out = {}
    for size in sorted({r.size for r in rows}):
        naive = next(r for r in rows if r.size == size and r.kernel == "naive")
        fast = min((r for r in rows if r.size == size and r.kernel == "bitparallel"),
                   key=lambda r: r.workers)
        out[size] = naive.seconds / fast.seconds if fast.seconds > 0 else float("inf")
    return out


def format_report(rows: Sequence[BenchRow]) -> str:
    lines = [f"{'kernel':<12} {'size':>6} {'workers':>7} {'steps':>6} {'seconds':>10} {'cells/s':>12}"]
    for r in rows:
        lines.append(f"{r.kernel:<12} {r.size:>6} {r.workers:>7} {r.steps:>6} "
                     f"{r.seconds:>10.4f} {r.updates_per_second:>12.4g}")
    for size, ratio in speedups(rows).items():
        lines.append(f"speedup {size}x{size}: {ratio:.1f}x")
    return "\n".join(lines)
