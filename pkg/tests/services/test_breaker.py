import unittest
from unittest.mock import patch

import numpy as np

from src.services import breaker
from src.services.bitcore import BitString, random_bits
from src.services.breaker import AdvCBCfg, FlipFlopCfg, adv_cb, flip_flop
from src.services.errors import LengthMismatch, PlanViolation


class TestFlipFlop(unittest.TestCase):

    def setUp(self) -> None:
        self.cfg = FlipFlopCfg.create(8, 8, 8)
        rng = np.random.default_rng(8)
        self.x, self.y = random_bits(rng, 8), random_bits(rng, 8)

    def test_layout(self):
        self.assertEqual(self.cfg.y1, 4)
        self.assertEqual(self.cfg.look.s, 2)
        self.assertEqual(self.cfg.out, 3)

    def test_output(self):
        for b in (0, 1):
            out = flip_flop(self.cfg, self.x, self.y, b)
            self.assertEqual(out.length, 3)
            self.assertEqual(out, flip_flop(self.cfg, self.x, self.y, b))

    def test_rejects_bad_shapes(self):
        with self.assertRaises(PlanViolation):
            FlipFlopCfg.create(8, 1, 8)
        with self.assertRaises(LengthMismatch):
            flip_flop(self.cfg, self.x, self.y.prefix(7), 0)


class TestCorrelationBreaker(unittest.TestCase):

    def setUp(self) -> None:
        rng = np.random.default_rng(10)
        self.x, self.y = random_bits(rng, 100), random_bits(rng, 100)

    def test_single_advice_bit(self):
        cfg = AdvCBCfg.create(100, 1, 5)
        self.assertEqual(cfg.out, 10)
        self.assertEqual(cfg.widths.ell, 0)
        self.assertEqual(adv_cb(cfg, self.x, self.y, BitString(1, 1)).length, 10)

    def test_control_ignores_advice(self):
        cfg = AdvCBCfg.create(100, 1, 5)
        control = adv_cb(cfg, self.x, self.y, BitString(1, 1), control=True)
        self.assertEqual(control, adv_cb(cfg, self.x, self.y, BitString(0, 1)))

    def test_merge_rounds_see_only_their_blocks(self):
        cfg = AdvCBCfg.create(100, 3, 5)
        self.assertEqual(cfg.widths.a_pad, 4)
        with patch.object(breaker, "_merge_round", wraps=breaker._merge_round) as merge_round:
            out = adv_cb(cfg, self.x, self.y, BitString(5, 3))
        self.assertEqual(out.length, 10)
        self.assertEqual(merge_round.call_count, 2)
        for call in merge_round.call_args_list:
            _, rows, r_merge, r_refresh, s_restore = call.args
            self.assertEqual(r_merge.length, 15)
            self.assertEqual(r_refresh.length, 15)
            self.assertEqual(s_restore.length, 15)
        self.assertEqual(len(merge_round.call_args_list[0].args[1]), 4)
        self.assertEqual(len(merge_round.call_args_list[1].args[1]), 2)

    def test_rejects_bad_shapes(self):
        with self.assertRaises(PlanViolation):
            AdvCBCfg.create(40, 1, 5)
        cfg = AdvCBCfg.create(100, 2, 5)
        with self.assertRaises(LengthMismatch):
            adv_cb(cfg, self.x, self.y, BitString.zeros(3))
        with self.assertRaises(LengthMismatch):
            adv_cb(cfg, self.x.prefix(99), self.y, BitString.zeros(2))

    def test_from_symbols(self):
        cfg = AdvCBCfg.from_symbols({"cb_d": 100, "cb_a": 4, "cb_s": 5})
        self.assertEqual((cfg.d, cfg.a, cfg.out), (100, 4, 10))


if __name__ == '__main__':
    unittest.main()
