"""
Life engine
-----------
Bounded Game of Life universe with a dead boundary, advanced by a
bit-parallel kernel (64 cells per word, carry-save neighbour counting,
row-band parallelism) and checked against a naive per-cell reference kernel.

The universe is treated as a value: step() and run() return new Universe
objects and never mutate their input.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from main.errors import BoundaryContact
from main.kernels import life as kernels

logger = logging.getLogger("lifescope.engine")

WORD_BITS = 64


@dataclass(frozen=True)
class TransitionRule:
    birth_counts: frozenset = frozenset({3})
    survival_counts: frozenset = frozenset({2, 3})

    @property
    def name(self) -> str:
        born = "".join(str(n) for n in sorted(self.birth_counts))
        survive = "".join(str(n) for n in sorted(self.survival_counts))
        return f"B{born}/S{survive}"


LIFE = TransitionRule()


def words_per_row(width: int) -> int:
    return max(1, (width + WORD_BITS - 1) // WORD_BITS)


def last_word_mask(width: int) -> np.uint64:
    used = width - (words_per_row(width) - 1) * WORD_BITS
    if used >= WORD_BITS:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << used) - 1)


def pack(cells: np.ndarray) -> np.ndarray:
    """Pack a (height, width) boolean field into (height, words) uint64."""
    height, width = cells.shape
    nwords = words_per_row(width)
    padded = np.zeros((height, nwords * WORD_BITS), dtype=np.uint8)
    padded[:, :width] = cells.astype(np.uint8, copy=False)
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def unpack(words: np.ndarray, width: int) -> np.ndarray:
    """Inverse of pack(): (height, width) uint8 array of 0/1."""
    raw = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :width]


@dataclass(frozen=True, eq=False)
class Universe:
    """
    Bit-packed binary cell field s_{x,y}(t) and its generation counter t.

    boundary_contacts lists the generations at which a live cell touched the
    outermost ring; it is carried forward by every step.
    """
    width: int
    height: int
    words: np.ndarray
    generation: int = 0
    boundary_contacts: tuple = field(default=())

    def __post_init__(self):
        self.words.setflags(write=False)

    @classmethod
    def empty(cls, width: int, height: int) -> "Universe":
        return cls(width, height, np.zeros((height, words_per_row(width)), dtype=np.uint64))

    @classmethod
    def from_array(cls, cells: np.ndarray, generation: int = 0) -> "Universe":
        height, width = cells.shape
        return cls(width, height, pack(cells), generation)

    @classmethod
    def from_cells(cls, width: int, height: int, live: Iterable[tuple]) -> "Universe":
        cells = np.zeros((height, width), dtype=np.uint8)
        for x, y in live:
            cells[y, x] = 1
        return cls.from_array(cells)

    def to_array(self) -> np.ndarray:
        return unpack(self.words, self.width)

    def live_cells(self) -> set:
        ys, xs = np.nonzero(self.to_array())
        return {(int(x), int(y)) for x, y in zip(xs, ys)}

    def crop(self, x: int, y: int, width: int, height: int) -> np.ndarray:
        return self.to_array()[y:y + height, x:x + width]

    @property
    def population(self) -> int:
        return int(kernels.popcount(self.words))

    def same_cells(self, other: "Universe") -> bool:
        return (self.width, self.height) == (other.width, other.height) and \
            np.array_equal(self.words, other.words)


@dataclass
class StepView:
    """What an observer sees after one step: read-only words plus the change mask."""
    generation: int
    previous: np.ndarray
    cells: np.ndarray
    _changed: Optional[np.ndarray] = None

    @property
    def changed(self) -> np.ndarray:
        """Boolean (height, words) mask of words whose bits changed this step."""
        if self._changed is None:
            self._changed = self.previous != self.cells
        return self._changed


Observer = Callable[[int, StepView], None]


def _touches_ring(words: np.ndarray, width: int) -> bool:
    if words.size == 0 or width == 0:
        return False
    if words[0].any() or words[-1].any():
        return True
    if (words[:, 0] & np.uint64(1)).any():
        return True
    edge_bit = np.uint64((width - 1) % WORD_BITS)
    return bool(((words[:, -1] >> edge_bit) & np.uint64(1)).any())


def _advance(u: Universe, words: np.ndarray) -> Universe:
    generation = u.generation + 1
    contacts = u.boundary_contacts
    if _touches_ring(words, u.width):
        if not contacts:
            logger.warning(str(BoundaryContact(generation)))
        contacts = contacts + (generation,)
    return Universe(u.width, u.height, words, generation, contacts)


def _kernel_step(src: np.ndarray, width: int, workers: int) -> np.ndarray:
    dst = np.empty_like(src)
    mask = last_word_mask(width)
    if workers <= 1:
        kernels.step_serial(src, dst, mask)
    else:
        bands = kernels.set_workers(workers)
        kernels.step_banded(src, dst, bands, mask)
    return dst


def step(u: Universe, workers: int = 1) -> Universe:
    """One generation of B3/S23 with the Moore neighbourhood and a dead boundary."""
    return _advance(u, _kernel_step(u.words, u.width, workers))


def step_reference(u: Universe) -> Universe:
    """Same contract as step(), computed cell by cell. Used as the oracle."""
    cells = u.to_array()
    out = np.empty_like(cells)
    kernels.step_naive(cells, out)
    return _advance(u, pack(out))


def run(u: Universe, steps: int, observer: Optional[Observer] = None,
        workers: int = 1) -> Universe:
    """
    Apply step() exactly `steps` times.

    The observer, when given, is called after each step in generation order
    with (generation, StepView). Boundary contacts accumulate on the returned
    universe; they are logged, never raised.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    current = u
    for _ in range(steps):
        nxt = _advance(current, _kernel_step(current.words, current.width, workers))
        if observer is not None:
            observer(nxt.generation, StepView(nxt.generation, current.words, nxt.words))
        current = nxt
    if len(current.boundary_contacts) > len(u.boundary_contacts):
        logger.info(
            "run ended at generation %d with %d boundary contacts",
            current.generation,
            len(current.boundary_contacts) - len(u.boundary_contacts),
        )
    return current


def population(u: Universe) -> int:
    return u.population


def random_universe(width: int, height: int, density: float, seed: int) -> Universe:
    rng = np.random.default_rng(seed)
    return Universe.from_array((rng.random((height, width)) < density).astype(np.uint8))

