'''
Serializes a VerificationReport as json, a plain text table or per-point profile csv.
'''

__version__ = "0.0.1"
__status__ = "Development"

import io
import csv
import json
import math
import logging

import numpy as np

# Init the logger.
log = logging.getLogger(__name__)

FORMATS = ("json", "table", "csv-profiles")

SIGNIFICANT_DIGITS = 12


class ReportProcessor:
    '''
    Renders reports. All output is deterministic for a given report.
    '''

    def __init__(self, significant_digits=SIGNIFICANT_DIGITS):
        self.significant_digits = significant_digits

    ####################################################
    # Number handling

    def normalise(self, value):
        '''
        Converts numpy scalars and arrays to plain python values, rounding floats to
        the configured significant digits. Non-finite floats become strings.
        '''
        if isinstance(value, dict):
            return {str(key): self.normalise(item) for key, item in value.items()}
        if isinstance(value, (list, tuple, np.ndarray)):
            return [self.normalise(item) for item in value]
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, (float, np.floating)):
            value = float(value)
            if not math.isfinite(value):
                return str(value)
            return float(f'{value:.{self.significant_digits}g}')
        return value

    ####################################################
    # Formats

    def to_json(self, report):
        return json.dumps(self.normalise(report.as_dict()), indent=2, sort_keys=True) + "\n"

    def to_table(self, report):
        lines = []
        family = report.family
        params = ", ".join(f'{key}={value}' for key, value in family.get("params", {}).items())
        lines.append(f'family: {family.get("kind", "")} ({params})')
        grid = report.grid
        lines.append(f'grid:   {grid.get("points_per_axis", "")} per axis, {grid.get("points", "")} points, '
                     f'step {grid.get("step", "")}, seed {report.seed}')
        lines.append("")
        width = max([len("check")] + [len(check.name) for check in report.checks])
        lines.append(f'{"check":<{width}}  {"max_residual":>14}  {"tolerance":>10}  result')
        lines.append("-" * (width + 36))
        for check in report.checks:
            lines.append(f'{check.name:<{width}}  {check.max_residual:>14.6e}  {check.tolerance:>10.1e}  '
                         f'{"pass" if check.passed else "FAIL"}')
        lines.append("")
        summary = report.profiles.get("summary", {})
        for name in ("lambda", "mu", "gamma"):
            if name in summary:
                low = ", ".join(f'{v:.6g}' for v in summary[name]["min"])
                high = ", ".join(f'{v:.6g}' for v in summary[name]["max"])
                lines.append(f'{name:<6}  min ({low})  max ({high})')
        if "branches" in summary:
            lines.append(f'branch  {", ".join(summary["branches"])}')
        passed = sum(1 for check in report.checks if check.passed)
        lines.append(f'{passed}/{len(report.checks)} checks passed')
        if report.wall_ms is not None:
            lines.append(f'wall time {report.wall_ms:.1f} ms')
        return "\n".join(lines) + "\n"

    def to_csv_profiles(self, report):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        columns = report.profiles.get("columns", [])
        writer.writerow(columns)
        for row in report.profiles.get("samples", []):
            writer.writerow([self._csv_cell(value) for value in row])
        return buffer.getvalue()

    def _csv_cell(self, value):
        value = self.normalise(value)
        if isinstance(value, float):
            return repr(value)
        return value


def emit_report(report, fmt="json"):
    '''
    ### Parameters:

        **report**: VerificationReport

        **fmt**: str
            json, table or csv-profiles.

    ### Returns:

        **text**: str
    '''
    processor = ReportProcessor()
    if fmt == "json":
        return processor.to_json(report)
    if fmt == "table":
        return processor.to_table(report)
    if fmt == "csv-profiles":
        return processor.to_csv_profiles(report)
    raise ValueError(f'Unknown report format {fmt!r}, expected one of {list(FORMATS)}')
