import io
import json
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from main import main
from src.commands import EXIT_FAILED, EXIT_FORMAT, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE
from src.schemas.reports import SuiteResult, VerifyReport
from src.services.bitcore import BitString
from src.services.nm2ext import Nm2Cfg
from src.services.planner import smallest_plan
from src.services.twosource import ip_extract


def run(*argv: str) -> tuple[int, str]:
    with patch("sys.stdout", new_callable=io.StringIO) as out, patch("sys.stderr", new_callable=io.StringIO):
        code = main(list(argv))
    return code, out.getvalue()


class TestPlanCommand(unittest.TestCase):

    def test_infeasible_exit_code(self):
        code, _ = run("plan", "--n", "4", "--profile", "two-source-nm", "--ledger", "structural")
        self.assertEqual(code, EXIT_INFEASIBLE)

    def test_output_is_deterministic(self):
        args = ("plan", "--n", "136", "--ledger", "structural")
        first = run(*args)
        self.assertEqual(first[0], EXIT_OK)
        self.assertEqual(first, run(*args))
        self.assertEqual(json.loads(first[1])["symbols"]["out"], 3)

    def test_bad_eps_is_a_usage_error(self):
        code, _ = run("plan", "--n", "136", "--eps", "3/2", "--ledger", "structural")
        self.assertEqual(code, EXIT_USAGE)


class TestCodecCommands(unittest.TestCase):

    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.plan = str(self.dir / "plan.json")
        code, _ = run("plan", "--n", "136", "--ledger", "structural", "--out", self.plan)
        self.assertEqual(code, EXIT_OK)

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def encode(self, message: str, name: str, seed: str = "9") -> int:
        return run("encode", message, "--plan", self.plan, "--seed", seed, "--out", str(self.dir / name))[0]

    def test_decode_prints_the_message(self):
        self.assertEqual(self.encode("5", "c.nmc"), EXIT_OK)
        code, out = run("decode", str(self.dir / "c.nmc"), "--plan", self.plan)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.strip(), "5")

    def test_same_seed_same_file(self):
        self.encode("3", "a.nmc")
        self.encode("3", "b.nmc")
        self.assertEqual((self.dir / "a.nmc").read_bytes(), (self.dir / "b.nmc").read_bytes())

    def test_corrupt_magic(self):
        self.encode("1", "c.nmc")
        path = self.dir / "c.nmc"
        path.write_bytes(b"JUNK" + path.read_bytes()[4:])
        self.assertEqual(run("decode", str(path), "--plan", self.plan)[0], EXIT_FORMAT)

    def test_usage_errors(self):
        self.assertEqual(run("encode", "5", "--plan", self.plan)[0], EXIT_USAGE)
        self.assertEqual(self.encode("12", "c.nmc"), EXIT_USAGE)
        self.assertEqual(self.encode("9", "c.nmc"), EXIT_USAGE)
        self.assertEqual(run("decode", str(self.dir / "missing.nmc"), "--plan", self.plan)[0], EXIT_USAGE)

    def test_malformed_plan(self):
        bad = self.dir / "bad.json"
        bad.write_text('{"profile": "nothing"}', encoding="utf-8")
        self.assertEqual(run("decode", str(self.dir / "c.nmc"), "--plan", str(bad))[0], EXIT_FORMAT)


class TestExtractCommand(unittest.TestCase):

    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.plan = str(Path(self.tmp.name) / "plan.json")
        run("plan", "--n", "136", "--ledger", "structural", "--out", self.plan)

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def test_inner_product_of_a_plan(self):
        cfg = Nm2Cfg.from_plan(smallest_plan("two-source-nm")).ip
        code, out = run("extract", "ip", "beef", "1234", "--plan", self.plan)
        self.assertEqual(code, EXIT_OK)
        expected = ip_extract(cfg, BitString(0xbeef, 16), BitString(0x1234, 16))
        self.assertEqual(out.strip(), expected.to_hex())

    def test_construction_needs_matching_plan(self):
        self.assertEqual(run("extract", "lhl", "00", "00", "--plan", self.plan)[0], EXIT_USAGE)

    def test_unknown_construction(self):
        with self.assertRaises(SystemExit) as cm:
            run("extract", "xor", "00", "00", "--plan", self.plan)
        self.assertEqual(cm.exception.code, EXIT_USAGE)


class TestVerifyCommand(unittest.TestCase):

    def test_unknown_suite_is_a_usage_error(self):
        with self.assertRaises(SystemExit) as cm:
            run("verify", "no-such-suite")
        self.assertEqual(cm.exception.code, EXIT_USAGE)

    def test_zero_budget(self):
        code, out = run("verify", "ip-strongness", "--budget", "0")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)
        self.assertEqual(report["results"], [])
        self.assertEqual(len(report["warnings"]), 1)

    def test_bad_threshold(self):
        self.assertEqual(run("verify", "ip-strongness", "--threshold", "nothing=1")[0], EXIT_USAGE)

    def test_failure_exit_code(self):
        report = VerifyReport(suite="stub", budget=1, results=[SuiteResult(construction="stub", passed=False)])
        with patch("src.commands.verify.run_suite", return_value=report) as runner:
            code, out = run("verify", "ip-strongness", "--budget", "1", "--seed", "4", "--threshold", "tamper=0.5")
        self.assertEqual(code, EXIT_FAILED)
        self.assertEqual(json.loads(out)["suite"], "stub")
        name, budget, seed, thresholds = runner.call_args.args
        self.assertEqual((name, budget, seed, thresholds.tamper), ("ip-strongness", 1, 4, 0.5))


if __name__ == '__main__':
    unittest.main()
