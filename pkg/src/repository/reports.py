from pathlib import Path

from src.schemas.reports import VerifyReport


def report_json(report: VerifyReport) -> str:
    return report.model_dump_json(indent=2)


def write_report(report: VerifyReport, path: Path | None = None) -> str:
    """
    The write_report function renders a verification report as JSON.

    :param report: VerifyReport: The report
    :param path: Path | None: Optional destination file
    :return: The JSON text
    """
    text = report_json(report)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
