import unittest
from fractions import Fraction

import numpy as np

from src.services.bitcore import BitString, random_bits
from src.services.errors import PlanViolation, RangeError, RowLengthMismatch
from src.services.laext import (
    AltExtCfg,
    concat_merge,
    la_ext,
    la_ext_prefix,
    la_transcript,
    nipm,
    nipm_cfg,
)
from src.services.seeded import SeededExtCfg, lhl_extract


class TestAlternatingExtraction(unittest.TestCase):

    def setUp(self) -> None:
        self.cfg = AltExtCfg.create(3, 8, 8, 2, 2)
        rng = np.random.default_rng(4)
        self.w, self.q = random_bits(rng, 8), random_bits(rng, 8)

    def test_transcript_shape(self):
        ss, rs = la_transcript(self.cfg, self.w, self.q, self.q.prefix(2))
        self.assertEqual(len(ss), 3)
        self.assertEqual(len(rs), 3)
        self.assertTrue(all(s.length == 2 for s in ss))
        self.assertTrue(all(r.length == 2 for r in rs))

    def test_transcript_alternates(self):
        ss, rs = la_transcript(self.cfg, self.w, self.q, self.q.prefix(2))
        self.assertEqual(rs[0], lhl_extract(self.cfg.ext_w, self.w, ss[0]))
        self.assertEqual(ss[1], lhl_extract(self.cfg.ext_q, self.q, rs[0]))
        self.assertEqual(rs[1], lhl_extract(self.cfg.ext_w, self.w, ss[1]))

    def test_prefix_variant(self):
        self.assertEqual(la_ext_prefix(self.cfg, self.w, self.q), la_ext(self.cfg, self.w, self.q, self.q.prefix(2)))

    def test_widths_must_chain(self):
        with self.assertRaises(PlanViolation):
            AltExtCfg(2, SeededExtCfg.create(8, 2, 3), SeededExtCfg.create(8, 2, 2))
        with self.assertRaises(PlanViolation):
            AltExtCfg.create(0, 8, 8, 2, 2)
        with self.assertRaises(RangeError):
            la_ext(self.cfg, self.w, self.q, BitString.zeros(3))


class TestMerger(unittest.TestCase):

    def setUp(self) -> None:
        rng = np.random.default_rng(6)
        self.cfg = nipm_cfg(20, 30, 4)
        self.rows = [random_bits(rng, 20) for _ in range(3)]
        self.y = random_bits(rng, 30)

    def test_output_width(self):
        self.assertEqual(self.cfg.s, 4)
        self.assertEqual(self.cfg.r, 4)
        self.assertEqual(nipm(self.cfg, self.rows, self.y).length, 4)

    def test_single_row_is_its_prefix(self):
        self.assertEqual(nipm(self.cfg, self.rows[:1], self.y), self.rows[0].prefix(4))

    def test_merge_chain(self):
        s = self.rows[0].prefix(4)
        for row in self.rows[1:]:
            s = lhl_extract(self.cfg.ext_q, row, lhl_extract(self.cfg.ext_w, self.y, s))
        self.assertEqual(nipm(self.cfg, self.rows, self.y), s)

    def test_rejects_bad_rows(self):
        with self.assertRaises(RowLengthMismatch):
            nipm(self.cfg, [], self.y)
        with self.assertRaises(RowLengthMismatch):
            nipm(self.cfg, [self.rows[0], self.rows[1].prefix(19)], self.y)
        with self.assertRaises(PlanViolation):
            nipm(self.cfg, [row.prefix(15) for row in self.rows], self.y)
        with self.assertRaises(PlanViolation):
            nipm_cfg(4, 30)

    def test_guarantee_is_checked_when_eps_is_set(self):
        cfg = nipm_cfg(20, 30, 4, eps=Fraction(1, 4))
        with self.assertRaises(PlanViolation):
            nipm(cfg, self.rows, self.y)

    def test_concat_control(self):
        rows = [BitString.from_str("101"), BitString.from_str("011")]
        self.assertEqual(concat_merge(rows, 4), BitString.from_str("1010"))


if __name__ == '__main__':
    unittest.main()
