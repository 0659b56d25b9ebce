"""
ReportViewModel for the HeisenBH subelliptic geometry engine.
Turns a VerificationReport into report files and an exit code.
"""

import logging
import os
from typing import Any, Dict, List

from config.constants import EXIT_FAILURE, EXIT_OK, REPORT_JSON, REPORT_TEXT, REPORT_TIMING
from utils.formatters import FormatterUtils
from utils.helpers import HelperUtils
from verification.report import VerificationReport


class ReportViewModel:
    def __init__(self, report: VerificationReport):
        self.report = report
        self.logger = logging.getLogger(__name__)
        self.state = {
            'report_json': self.report.to_json(),
            'report_text': self.report.to_text(),
            'timing_json': FormatterUtils.to_json(self.report.timing()),
            'failed_checks': self.format_failed_checks(),
        }

    def format_failed_checks(self) -> List[str]:
        return [check.check_id for check in self.report.checks if not check.passed]

    def get_report_json(self) -> str:
        return self.state['report_json']

    def get_report_text(self) -> str:
        return self.state['report_text']

    def get_failed_checks(self) -> List[str]:
        return self.state['failed_checks']

    def get_exit_code(self) -> int:
        return EXIT_OK if self.report.passed else EXIT_FAILURE

    def write_outputs(self, output_dir: str) -> Dict[str, str]:
        """Write report.json, report.txt and the wall-time sidecar."""
        HelperUtils.ensure_directory(output_dir)
        paths = {
            'json': HelperUtils.write_text(os.path.join(output_dir, REPORT_JSON), self.get_report_json()),
            'text': HelperUtils.write_text(os.path.join(output_dir, REPORT_TEXT), self.get_report_text()),
            'timing': HelperUtils.write_text(os.path.join(output_dir, REPORT_TIMING), self.state['timing_json']),
        }
        self.logger.info(f"Report written to {output_dir}")
        return paths

    def to_dict(self) -> Dict[str, Any]:
        return self.report.to_dict()
