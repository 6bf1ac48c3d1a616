import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from src.services.bitcore import BitString, all_strings
from src.services.errors import CountExceedsUniverse, LengthMismatch, PlanViolation
from src.services.gfield import gf2_rank
from src.services.iext import IExtCfg, iext_extract, iext_invert, iext_matrix, sample_distinct, sampler_audit


def words(length: int) -> st.SearchStrategy[BitString]:
    return st.integers(min_value=0, max_value=(1 << length) - 1).map(lambda v: BitString(v, length))


class TestSampler(unittest.TestCase):

    def test_positions_are_sorted_and_distinct(self):
        for seed in all_strings(4):
            positions = sample_distinct(seed, 20, 9)
            self.assertEqual(len(set(positions)), 9)
            self.assertEqual(positions, sorted(positions))
            self.assertTrue(all(0 <= p < 20 for p in positions))

    def test_deterministic_and_seed_dependent(self):
        seeds = list(all_strings(3))
        first = [sample_distinct(seed, 64, 5) for seed in seeds]
        self.assertEqual(first, [sample_distinct(seed, 64, 5) for seed in seeds])
        self.assertGreater(len({tuple(p) for p in first}), 1)

    def test_edge_counts(self):
        self.assertEqual(sample_distinct(BitString(1, 2), 6, 6), list(range(6)))
        with self.assertRaises(CountExceedsUniverse):
            sample_distinct(BitString(1, 2), 6, 7)

    def test_audit_with_loose_theta(self):
        audit = sampler_audit(32, 8, 3, 1.0, 5, np.random.default_rng(0))
        self.assertEqual(audit.seeds, 8)
        self.assertEqual(audit.worst, 0.0)


class TestInvertibleExtractor(unittest.TestCase):

    def setUp(self) -> None:
        self.cfg = IExtCfg.create(20, 10)
        self.rng = np.random.default_rng(12)

    def test_layout(self):
        self.assertEqual((self.cfg.r1, self.cfg.t, self.cfg.out), (1, 10, 3))
        self.assertEqual(self.cfg.n - self.cfg.out, 17)
        with self.assertRaises(PlanViolation):
            IExtCfg.create(5, 10)
        with self.assertRaises(PlanViolation):
            IExtCfg.create(20, 5)

    @given(words(10), words(20), words(20))
    @settings(max_examples=100, deadline=None)
    def test_linear(self, seed, x, y):
        self.assertEqual(iext_extract(self.cfg, x ^ y, seed),
                         iext_extract(self.cfg, x, seed) ^ iext_extract(self.cfg, y, seed))

    def test_full_rank_for_every_seed(self):
        for seed in all_strings(10):
            if seed.value % 37:
                continue
            self.assertEqual(gf2_rank(iext_matrix(self.cfg, seed)), 3)

    @given(words(10), words(3), st.integers(min_value=0, max_value=2 ** 32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_inversion_hits_the_target(self, seed, target, draw_seed):
        x = iext_invert(self.cfg, target, seed, np.random.default_rng(draw_seed))
        self.assertEqual(iext_extract(self.cfg, x, seed), target)

    def test_fibers_are_equal_on_a_small_instance(self):
        cfg = IExtCfg.create(12, 10)
        seed = BitString(0b1011001110, 10)
        counts = [0] * (1 << cfg.out)
        for x in all_strings(cfg.n):
            counts[iext_extract(cfg, x, seed).value] += 1
        self.assertEqual(counts, [1 << (cfg.n - cfg.out)] * (1 << cfg.out))

    def test_lengths_are_checked(self):
        with self.assertRaises(LengthMismatch):
            iext_extract(self.cfg, BitString.zeros(19), BitString.zeros(10))
        with self.assertRaises(LengthMismatch):
            iext_invert(self.cfg, BitString.zeros(4), BitString.zeros(10), self.rng)


if __name__ == '__main__':
    unittest.main()
