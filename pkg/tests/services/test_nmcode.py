import unittest
from fractions import Fraction
from unittest.mock import patch

import numpy as np

from src.services import nmcode
from src.services.bitcore import BitString, all_strings
from src.services.distrib import JointDist, tamperer_library
from src.services.errors import LengthMismatch
from src.services.iext import iext_extract
from src.services.nm2ext import sampled_symbols, split
from src.services.nmcode import (
    CodecCfg,
    Codeword,
    complete,
    decode,
    draw_prefix,
    encode,
    encode_traced,
    eps_code,
    identity,
    simulation_distance,
    simulation_distances,
    tamper_experiment,
)
from src.services.planner import smallest_plan


class TestCodec(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.cfg = CodecCfg.from_plan(smallest_plan("two-source-nm"))

    def setUp(self) -> None:
        self.rng = np.random.default_rng(20)

    def test_shape(self):
        self.assertEqual(self.cfg.rate, Fraction(self.cfg.m, 2 * self.cfg.n))
        self.assertEqual(self.cfg.fiber_log2, 2 * self.cfg.n - self.cfg.m)

    def test_roundtrip(self):
        for msg in all_strings(self.cfg.m):
            codeword = encode(self.cfg, msg, self.rng)
            self.assertEqual(codeword.n, self.cfg.n)
            self.assertEqual(decode(self.cfg, codeword), msg)

    def test_control_roundtrip(self):
        msg = BitString(1, self.cfg.m)
        self.assertEqual(decode(self.cfg, encode(self.cfg, msg, self.rng, control=True), control=True), msg)

    def test_encoder_draws_exactly_the_fiber(self):
        _, drawn = encode_traced(self.cfg, BitString.zeros(self.cfg.m), self.rng)
        self.assertEqual(drawn, self.cfg.fiber_log2)

    def test_completions_stay_in_the_constrained_fiber(self):
        nm = self.cfg.nm2
        msg = BitString(5, self.cfg.m)
        prefix = draw_prefix(self.cfg, self.rng)
        fiber = {y4 for y4 in all_strings(nm.n4) if iext_extract(nm.iext, y4, prefix.v) == msg}
        self.assertEqual(len(fiber), 1 << (nm.n4 - self.cfg.m))
        for _ in range(8):
            codeword, free = complete(self.cfg, prefix, msg, self.rng)
            xs, ys = split(nm, codeword.left), split(nm, codeword.right)
            self.assertEqual(free + prefix.bits, self.cfg.fiber_log2)
            self.assertIn(ys.fourth, fiber)
            self.assertEqual((xs.first, ys.first, xs.third, ys.third), (prefix.x1, prefix.y1, prefix.x3, prefix.y3))
            positions = list(prefix.positions)
            self.assertEqual(sampled_symbols(nm, xs.second, positions), prefix.x_tilde)
            self.assertEqual(sampled_symbols(nm, ys.second, positions), prefix.y_tilde)
            self.assertEqual(decode(self.cfg, codeword), msg)

    def test_same_seed_same_codeword(self):
        msg = BitString.ones(self.cfg.m)
        first = encode(self.cfg, msg, np.random.default_rng(3))
        self.assertEqual(first, encode(self.cfg, msg, np.random.default_rng(3)))

    def test_lengths_are_checked(self):
        with self.assertRaises(LengthMismatch):
            encode(self.cfg, BitString.zeros(self.cfg.m + 1), self.rng)
        with self.assertRaises(LengthMismatch):
            decode(self.cfg, Codeword(BitString.zeros(8), BitString.zeros(8)))
        with self.assertRaises(LengthMismatch):
            Codeword(BitString.zeros(8), BitString.zeros(9))

    def test_decode_delegates_to_the_extractor(self):
        c = Codeword(BitString.zeros(self.cfg.n), BitString.ones(self.cfg.n))
        with patch.object(nmcode, "nm2_extract", return_value=BitString.zeros(self.cfg.m)) as extract:
            decode(self.cfg, c, control=True)
        extract.assert_called_once_with(self.cfg.nm2, c.left, c.right, control=True)

    def test_identity_tampering_decodes_the_message(self):
        msg = BitString(2, self.cfg.m)
        dist = tamper_experiment(self.cfg, msg, identity(self.cfg.n), identity(self.cfg.n), 3, self.rng)
        self.assertEqual(dist[(msg,)], 1)


class TestSimulation(unittest.TestCase):

    def setUp(self) -> None:
        self.messages = list(all_strings(2))

    def test_identity_is_simulated_by_same(self):
        histograms = {s: JointDist.point(s) for s in self.messages}
        self.assertEqual(simulation_distance(histograms), 0)

    def test_constant_is_simulated_by_a_constant(self):
        histograms = {s: JointDist.point(self.messages[3]) for s in self.messages}
        self.assertEqual(simulation_distance(histograms), 0)

    def test_message_dependent_tampering_is_not_simulated(self):
        histograms = {s: JointDist.point(s ^ BitString(1, 2)) for s in self.messages}
        self.assertEqual(simulation_distance(histograms), Fraction(3, 4))

    def test_distances_are_reported_per_message(self):
        m0, m1, m2, m3 = self.messages
        histograms = {m0: JointDist.point(m1), m1: JointDist.point(m1), m2: JointDist.point(m2),
                      m3: JointDist.point(m3)}
        distances = simulation_distances(histograms)
        self.assertEqual(distances, {m0: Fraction(1, 2), m1: Fraction(1, 2), m2: Fraction(3, 4),
                                     m3: Fraction(3, 4)})
        self.assertEqual(simulation_distance(histograms), Fraction(3, 4))

    def test_code_error(self):
        self.assertEqual(eps_code(3, Fraction(1, 64)), Fraction(1, 4))


class TestTamperExperiment(unittest.TestCase):

    def test_tampered_halves_reach_the_decoder(self):
        cfg = CodecCfg.from_plan(smallest_plan("two-source-nm"))
        flip = tamperer_library(cfg.n)[0]
        honest = Codeword(BitString.zeros(cfg.n), BitString.ones(cfg.n))
        with patch.object(nmcode, "encode", return_value=honest), \
                patch.object(nmcode, "decode", return_value=BitString.zeros(cfg.m)) as decoder:
            dist = tamper_experiment(cfg, BitString.zeros(cfg.m), flip, identity(cfg.n), 2,
                                     np.random.default_rng(1))
        self.assertEqual(decoder.call_count, 2)
        self.assertEqual(dist[(BitString.zeros(cfg.m),)], 1)
        tampered = decoder.call_args.args[1]
        self.assertEqual(tampered.left, BitString(1 << (cfg.n - 1), cfg.n))
        self.assertEqual(tampered.right, honest.right)


if __name__ == '__main__':
    unittest.main()
