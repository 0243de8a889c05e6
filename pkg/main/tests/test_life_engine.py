from pathlib import Path
from unittest import TestCase

import numpy as np

from main.life_engine import (
    LIFE,
    Universe,
    population,
    random_universe,
    run,
    step,
    step_reference,
)
from main.pattern_io import read_pattern

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def _shifted(cells, dx, dy):
    return {(x + dx, y + dy) for x, y in cells}


def _load(name, width, height, dx, dy):
    p = read_pattern(FIXTURES / name)
    return Universe.from_cells(width, height, _shifted(p.live_cells, dx, dy))


class StepTests(TestCase):

    def test_rule_name(self):
        self.assertEqual(LIFE.name, "B3/S23")

    def test_block_is_fixed(self):
        block = {(1, 1), (2, 1), (1, 2), (2, 2)}
        u = step(Universe.from_cells(4, 4, block))
        self.assertEqual(u.live_cells(), block)
        self.assertEqual(u.generation, 1)

    def test_lonely_cell_dies(self):
        self.assertEqual(step(Universe.from_cells(3, 3, {(1, 1)})).population, 0)

    def test_blinker_turns(self):
        u = step(Universe.from_cells(5, 5, {(1, 2), (2, 2), (3, 2)}))
        self.assertEqual(u.live_cells(), {(2, 1), (2, 2), (2, 3)})
        self.assertEqual(step(u).live_cells(), {(1, 2), (2, 2), (3, 2)})

    def test_beehive_is_fixed(self):
        u = _load("beehive.rle", 10, 10, 3, 3)
        self.assertTrue(run(u, 10).same_cells(u))

    def test_input_is_not_mutated(self):
        u = Universe.from_cells(5, 5, {(1, 2), (2, 2), (3, 2)})
        before = u.words.copy()
        step(u)
        np.testing.assert_array_equal(u.words, before)
        self.assertFalse(u.words.flags.writeable)


class RunTests(TestCase):

    def test_zero_steps(self):
        seen = []
        u = random_universe(32, 32, 0.3, 1)
        self.assertIs(run(u, 0, lambda g, v: seen.append(g)), u)
        self.assertEqual(seen, [])

    def test_observer_sees_every_generation(self):
        seen = []
        u = random_universe(40, 30, 0.3, 2)
        final = run(u, 12, lambda g, view: seen.append((g, view.changed.any())))
        self.assertEqual([g for g, _ in seen], list(range(1, 13)))
        self.assertEqual(final.generation, 12)

    def test_step_view_matches_consecutive_states(self):
        u = random_universe(70, 20, 0.4, 3)
        views = []
        run(u, 3, lambda g, view: views.append(view))
        np.testing.assert_array_equal(views[0].previous, u.words)
        np.testing.assert_array_equal(views[1].previous, views[0].cells)
        np.testing.assert_array_equal(views[0].changed, views[0].previous != views[0].cells)

    def test_glider_translates(self):
        u = _load("glider.rle", 16, 16, 1, 1)
        moved = run(u, 4)
        self.assertEqual(moved.live_cells(), _shifted(u.live_cells(), 1, 1))

    def test_gun_emits_one_glider_per_period(self):
        u = _load("gun30.rle", 512, 512, 238, 251)
        pops = [u.population]
        run(u, 600, lambda g, view: pops.append(int(np.unpackbits(
            view.cells.view(np.uint8)).sum())))
        for t in range(60, 571):
            self.assertEqual(pops[t + 30] - pops[t], 5, f"generation {t}")

    def test_gun_body_repeats(self):
        u = _load("gun30.rle", 512, 512, 238, 251)
        a = run(u, 90)
        b = run(a, 30)
        np.testing.assert_array_equal(a.crop(237, 250, 38, 11), b.crop(237, 250, 38, 11))

    def test_boundary_contact_is_logged_not_raised(self):
        u = _load("glider.rle", 12, 12, 4, 4)
        with self.assertLogs("lifescope.engine", "WARNING"):
            final = run(u, 60)
        self.assertTrue(final.boundary_contacts)
        self.assertEqual(final.generation, 60)

    def test_population(self):
        self.assertEqual(population(Universe.empty(20, 20)), 0)
        self.assertEqual(population(Universe.from_cells(4, 4, {(1, 1), (2, 1), (1, 2), (2, 2)})), 4)


class KernelEquivalenceTests(TestCase):

    def test_bit_parallel_matches_reference(self):
        rng = np.random.default_rng(12345)
        for trial in range(200):
            density = rng.uniform(0.1, 0.5)
            fast = slow = random_universe(128, 128, density, trial)
            for _ in range(256):
                fast, slow = step(fast), step_reference(slow)
                self.assertTrue(fast.same_cells(slow), f"trial {trial} generation {fast.generation}")

    def test_ragged_widths(self):
        for trial, (w, h) in enumerate([(1, 1), (63, 5), (65, 17), (100, 70), (129, 3)]):
            fast = slow = random_universe(w, h, 0.4, 100 + trial)
            for _ in range(64):
                fast, slow = step(fast), step_reference(slow)
                self.assertTrue(fast.same_cells(slow), f"{w}x{h} generation {fast.generation}")
            self.assertEqual(fast.boundary_contacts, slow.boundary_contacts)

    def test_worker_counts_are_bit_identical(self):
        u = random_universe(1024, 1024, 0.35, 99)
        baseline = run(u, 1000, workers=1)
        for workers in (2, 4, 8):
            other = run(u, 1000, workers=workers)
            self.assertTrue(other.same_cells(baseline), f"workers={workers}")
            self.assertEqual(other.boundary_contacts, baseline.boundary_contacts)
