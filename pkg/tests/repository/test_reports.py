import json
import tempfile
import unittest
from pathlib import Path

from src.repository.reports import write_report
from src.schemas.reports import SuiteResult, VerifyReport


class TestReportRepository(unittest.TestCase):

    def setUp(self) -> None:
        self.report = VerifyReport(suite="ip-strongness", budget=1, results=[
            SuiteResult(construction="ip", params={"n": 12, "side": "x"}, sd="1/8", sd_float=0.125,
                        bound="2^(-5/2)", passed=True),
        ])

    def test_schema(self):
        data = json.loads(write_report(self.report))
        row = data["results"][0]
        self.assertEqual(set(row), {"construction", "params", "sources", "tamperers", "sd", "sd_float", "bound",
                                    "passed"})
        self.assertEqual(row["sd"], "1/8")
        self.assertEqual(row["params"], {"n": 12, "side": "x"})

    def test_file_copy(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "report.json"
            text = write_report(self.report, path)
            self.assertEqual(path.read_text(encoding="utf-8"), text + "\n")


if __name__ == '__main__':
    unittest.main()
