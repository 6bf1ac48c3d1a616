import unittest
from fractions import Fraction

from src.schemas.plans import ParamPlan
from src.services.errors import Infeasible, RangeError
from src.services.planner import AdvCBWidths, Ledger, ceil_log2, parse_eps, plan_params, smallest_plan


class TestHelpers(unittest.TestCase):

    def test_parse_eps(self):
        self.assertEqual(parse_eps("2^-20"), Fraction(1, 1 << 20))
        self.assertEqual(parse_eps("2**-3"), Fraction(1, 8))
        self.assertEqual(parse_eps("1/4"), Fraction(1, 4))
        self.assertEqual(parse_eps("0.5"), Fraction(1, 2))
        with self.assertRaises(RangeError):
            parse_eps("2")
        with self.assertRaises(ValueError):
            parse_eps("tiny")

    def test_ceil_log2(self):
        self.assertEqual([ceil_log2(v) for v in (1, 2, 5, 8, 9)], [0, 1, 3, 3, 4])

    def test_breaker_widths(self):
        w = AdvCBWidths(100, 4, 5)
        self.assertEqual((w.a_pad, w.ell, w.h, w.z, w.r, w.out, w.ff_k), (4, 2, 30, 5, 1, 10, 13))
        self.assertEqual(AdvCBWidths.from_symbols(w.symbols()), w)

    def test_ledger_modes(self):
        ledger = Ledger("structural")
        ledger.require("analytic", 1, 2, analytic=True)
        self.assertTrue(ledger.checks[0].waived)
        self.assertFalse(ledger.checks[0].holds)
        with self.assertRaises(Infeasible) as cm:
            ledger.require("enforced", 1, 2)
        self.assertEqual(cm.exception.inequality, "enforced")
        with self.assertRaises(Infeasible):
            Ledger("strict").require("strict analytic", 1, 2, analytic=True)
        with self.assertRaises(RangeError):
            Ledger("loose")


class TestPlans(unittest.TestCase):

    def test_toy_seeded_plan(self):
        plan = plan_params(16, 16, Fraction(1, 4), "seeded-nm", "structural")
        self.assertEqual((plan["d"], plan["d1"], plan["w"], plan["a"]), (100, 7, 7, 14))
        self.assertEqual(plan.output_length, 4)
        self.assertEqual(plan.eps_prime, "1/40")
        self.assertTrue(plan.waived)

    def test_smallest_two_source_plan(self):
        plan = smallest_plan("two-source-nm")
        self.assertEqual(plan.n, 136)
        self.assertEqual((plan["n1"], plan["n3"], plan["n4"], plan["n5"], plan["r"]), (16, 100, 12, 8, 8))
        self.assertEqual(plan.output_length, 3)
        self.assertEqual(plan.rate, Fraction(3, 272))

    def test_infeasible_names_the_inequality(self):
        with self.assertRaises(Infeasible) as cm:
            plan_params(4, 4, Fraction(1, 4), "two-source-nm", "structural")
        self.assertEqual(cm.exception.inequality, "n4 >= 0")
        self.assertIn("n4 >= 0", str(cm.exception))

    def test_bad_requests(self):
        with self.assertRaises(RangeError):
            plan_params(16, 16, Fraction(1, 4), "three-source")
        with self.assertRaises(RangeError):
            plan_params(16, 16, Fraction(1, 4), "multi", "structural")
        with self.assertRaises(Infeasible):
            plan_params(0, 0, Fraction(1, 4), "seeded-nm")

    def test_json_roundtrip(self):
        plan = plan_params(16, 16, Fraction(1, 4), "seeded-nm", "structural")
        self.assertEqual(ParamPlan.model_validate_json(plan.model_dump_json()), plan)

    def test_deterministic(self):
        first = smallest_plan("two-source-nm").model_dump_json()
        self.assertEqual(first, smallest_plan("two-source-nm").model_dump_json())


if __name__ == '__main__':
    unittest.main()
