import unittest
from fractions import Fraction

import numpy as np

from src.services.bitcore import BitString, random_bits
from src.services.errors import LengthMismatch, PlanViolation
from src.services.planner import plan_params, smallest_plan
from src.services.snmext import AdvGenCfg, SnmCfg, adv_gen, seed_advice, snm_extract


class TestAdviceGenerator(unittest.TestCase):

    def setUp(self) -> None:
        self.cfg = AdvGenCfg.create(16, 12, 4, 4)
        self.rng = np.random.default_rng(16)

    def test_layout(self):
        self.assertEqual((self.cfg.w, self.cfg.count, self.cfg.a), (4, 1, 8))
        self.assertEqual((self.cfg.code.n0, self.cfg.code.n), (3, 16))
        with self.assertRaises(PlanViolation):
            AdvGenCfg.create(16, 12, 13, 4)

    def test_advice_starts_with_the_seed_prefix(self):
        x, y = random_bits(self.rng, 16), random_bits(self.rng, 12)
        alpha, z = adv_gen(self.cfg, x, y)
        self.assertEqual(alpha.length, 8)
        self.assertEqual(z.length, 12)
        self.assertEqual(alpha.prefix(4), y.prefix(4))
        self.assertEqual(alpha, seed_advice(self.cfg, y, z))

    def test_prefix_change_changes_advice(self):
        x, y = random_bits(self.rng, 16), random_bits(self.rng, 12)
        y_t = y ^ BitString(1 << 11, 12)
        self.assertNotEqual(adv_gen(self.cfg, x, y)[0], adv_gen(self.cfg, x, y_t)[0])

    def test_seed_length_is_checked(self):
        with self.assertRaises(LengthMismatch):
            adv_gen(self.cfg, BitString.zeros(16), BitString.zeros(11))


class TestSeededNonMalleable(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.plan = plan_params(16, 16, Fraction(1, 4), "seeded-nm", "structural")
        cls.cfg = SnmCfg.from_plan(cls.plan)

    def test_plan_wiring(self):
        self.assertEqual(self.cfg.d, self.plan["d"])
        self.assertEqual(self.cfg.gen.a, self.cfg.cb.a)
        self.assertEqual(self.cfg.out, 4)

    def test_output(self):
        rng = np.random.default_rng(18)
        x, y = random_bits(rng, self.cfg.n), random_bits(rng, self.cfg.d)
        out = snm_extract(self.cfg, x, y)
        self.assertEqual(out.length, 4)
        self.assertEqual(out, snm_extract(self.cfg, x, y))
        self.assertEqual(snm_extract(self.cfg, x, y, control=True).length, 4)

    def test_wrong_profile(self):
        with self.assertRaises(PlanViolation):
            SnmCfg.from_plan(smallest_plan("two-source-nm"))
        with self.assertRaises(LengthMismatch):
            snm_extract(self.cfg, BitString.zeros(15), BitString.zeros(self.cfg.d))


if __name__ == '__main__':
    unittest.main()
