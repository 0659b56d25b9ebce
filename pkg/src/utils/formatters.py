"""
FormatterUtils for the HeisenBH subelliptic geometry engine.
Number, field-file, CSV and JSON formatting.
"""

import json
from typing import Any, Dict, Iterable, List, Sequence

from config.constants import FIELD_FORMAT_TAG, SIGNIFICANT_DIGITS
from models.errors import FieldFormatError


class FormatterUtils:
    """Text encodings shared by field files, traces and reports."""

    @staticmethod
    def format_number(value: float) -> str:
        """Format a double at full precision (round-trips exactly)."""
        return f"{float(value):.{SIGNIFICANT_DIGITS}g}"

    @staticmethod
    def format_row(values: Iterable[float]) -> str:
        return ' '.join(FormatterUtils.format_number(v) for v in values)

    @staticmethod
    def field_header(n: int, nu: int, dims: Sequence[int], extents: Sequence[float]) -> str:
        dims_text = ','.join(str(int(d)) for d in dims)
        extent_text = ','.join(FormatterUtils.format_number(e) for e in extents)
        return f"{FIELD_FORMAT_TAG} n={n} nu={nu} dims={dims_text} extent={extent_text}"

    @staticmethod
    def parse_field_header(line: str) -> Dict[str, Any]:
        """
        Parse an hfield header line.

        Returns:
            Dict[str, Any]: keys n, nu, dims (list of int), extent (list of float)

        Raises:
            FieldFormatError: on a wrong tag or missing/malformed entries
        """
        line = line.strip()
        if not line.startswith(FIELD_FORMAT_TAG):
            raise FieldFormatError(f"Header must start with '{FIELD_FORMAT_TAG}'")
        entries = {}
        for token in line[len(FIELD_FORMAT_TAG):].split():
            key, sep, value = token.partition('=')
            if not sep:
                raise FieldFormatError(f"Malformed header token '{token}'")
            entries[key] = value
        missing = [key for key in ('n', 'nu', 'dims', 'extent') if key not in entries]
        if missing:
            raise FieldFormatError(f"Header is missing {', '.join(missing)}")
        try:
            return {
                'n': int(entries['n']),
                'nu': int(entries['nu']),
                'dims': [int(d) for d in entries['dims'].split(',')],
                'extent': [float(e) for e in entries['extent'].split(',')],
            }
        except ValueError as exc:
            raise FieldFormatError(f"Malformed header value: {exc}") from exc

    @staticmethod
    def format_csv(header: str, rows: Iterable[Sequence[Any]]) -> str:
        lines = [header]
        for row in rows:
            lines.append(','.join(str(v) if isinstance(v, (int, str)) else FormatterUtils.format_number(v)
                                  for v in row))
        return '\n'.join(lines) + '\n'

    @staticmethod
    def to_json(data: Any) -> str:
        """Deterministic JSON (sorted keys); Python float repr is round-trip exact."""
        return json.dumps(data, indent=2, sort_keys=True) + '\n'

    @staticmethod
    def format_verdict(passed: bool) -> str:
        return 'PASS' if passed else 'FAIL'

    @staticmethod
    def format_columns(cells: List[str], widths: List[int]) -> str:
        return '  '.join(cell.ljust(width) for cell, width in zip(cells, widths)).rstrip()
