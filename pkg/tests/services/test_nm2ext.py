import unittest

import numpy as np

from src.services.bitcore import BitString, random_bits
from src.services.errors import CountExceedsUniverse, InsufficientSeed, PlanViolation, RangeError
from src.services.gfield import field_ctx
from src.services.nm2ext import (
    Nm2Cfg,
    RSCode,
    advice,
    nm2_extract,
    rs_encode,
    rs_evaluate,
    sample_positions,
    sample_symbols,
    split,
    symbols_of,
)
from src.services.planner import plan_params, smallest_plan


class TestReedSolomon(unittest.TestCase):

    def setUp(self) -> None:
        self.ctx = field_ctx(3)

    def test_code_shape(self):
        self.assertEqual(RSCode(self.ctx, 3, 7).distance, 5)
        with self.assertRaises(RangeError):
            RSCode(self.ctx, 4, 9)
        with self.assertRaises(RangeError):
            RSCode(self.ctx, 5, 4)

    def test_evaluation(self):
        code = RSCode(self.ctx, 2, 8)
        self.assertEqual(rs_evaluate(code, [1, 2], [0, 3]), [1, 7])

    def test_constant_message(self):
        code = RSCode(self.ctx, 2, 8)
        word = rs_encode(code, [self.ctx.element(5), self.ctx.zero()])
        self.assertEqual([s.value for s in word], [5] * 8)

    def test_symbols_of(self):
        self.assertEqual(symbols_of(BitString.from_str("10110"), 2), [2, 3, 0])
        self.assertEqual(symbols_of(BitString.zeros(0), 2), [])


class TestSampling(unittest.TestCase):

    def setUp(self) -> None:
        self.z = BitString.from_str("001" "110" "001" "011")

    def test_repeats_are_skipped(self):
        self.assertEqual(sample_positions(self.z, 5, 2, 3), [1, 3])

    def test_probing_after_exhaustion(self):
        self.assertEqual(sample_positions(self.z, 5, 3, 3), [1, 3, 4])
        with self.assertRaises(InsufficientSeed):
            sample_positions(self.z, 5, 3, 3, strict=True)

    def test_limits(self):
        with self.assertRaises(CountExceedsUniverse):
            sample_positions(self.z, 3, 4, 3)
        with self.assertRaises(InsufficientSeed):
            sample_positions(self.z.prefix(5), 5, 2, 3)

    def test_sample_symbols(self):
        ctx = field_ctx(3)
        word = [ctx.element(v) for v in range(5)]
        self.assertEqual(sample_symbols(self.z, word, 2), BitString.from_str("001" "011"))


class TestTwoSourceExtractor(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.plan = smallest_plan("two-source-nm")
        cls.cfg = Nm2Cfg.from_plan(cls.plan)

    def setUp(self) -> None:
        rng = np.random.default_rng(14)
        self.x, self.y = random_bits(rng, self.cfg.n), random_bits(rng, self.cfg.n)

    def test_slices_partition_the_source(self):
        xs = split(self.cfg, self.x)
        self.assertEqual(xs.first.concat(xs.second), self.x)
        self.assertEqual(xs.third.concat(xs.fourth).concat(xs.fifth), xs.second)
        self.assertEqual(self.cfg.n2, self.cfg.n3 + self.cfg.n4 + self.cfg.n5)

    def test_advice_feeds_the_breaker(self):
        alpha = advice(self.cfg, split(self.cfg, self.x), split(self.cfg, self.y))
        self.assertEqual(alpha.length, self.cfg.cb.a)
        self.assertEqual(alpha.prefix(self.cfg.n1), self.x.prefix(self.cfg.n1))

    def test_output_length(self):
        out = nm2_extract(self.cfg, self.x, self.y)
        self.assertEqual(out.length, self.plan.output_length)
        self.assertEqual(out, nm2_extract(self.cfg, self.x, self.y))

    def test_plan_is_checked(self):
        symbols = dict(self.plan.symbols, n1=self.cfg.n1 + 1)
        with self.assertRaises(PlanViolation):
            Nm2Cfg.from_symbols(symbols)
        with self.assertRaises(PlanViolation):
            Nm2Cfg.from_plan(plan_params(16, 16, 0.25, "seeded-nm", "structural"))


if __name__ == '__main__':
    unittest.main()
