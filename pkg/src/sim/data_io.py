"""Reading paired (x, y) observations from delimited text files."""
import io
import logging
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd

from ..core.errors import DataFileError, ParameterError
from ..core.model_gen import BivariateSample, sample_from_arrays

logger = logging.getLogger(__name__)

# Comma, semicolon or tab (with optional padding), else a run of whitespace
SEPARATOR = r"\s*[,;\t]\s*|\s+"
_BAD_ROW = "\x00bad-row:"


def _mark_bad_line(fields: List[str]) -> List[str]:
    # Rows longer than the first one come back tagged with their field count
    return [f"{_BAD_ROW}{len(fields)}"]


def _data_lines(text: str):
    """(1-based line number, stripped line) for every non-blank, non-comment line."""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line


def read_pairs(path) -> BivariateSample:
    """
    Load a two-column (x, y) data file.

    Columns are separated by a comma, tab or semicolon (whitespace as a fallback),
    and the separator may differ between lines. Blank lines and lines starting
    with '#' are skipped. The first data line is taken as a header only when
    both of its fields are non-numeric.

    Args:
        path: File to read (UTF-8)

    Returns:
        BivariateSample of the rows in file order

    Raises:
        DataFileError: If the file cannot be read or a row is malformed (1-based line)
        ParameterError: If fewer than 2 rows remain
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataFileError(f"cannot read data file: {e.strerror}", str(path)) from e
    except UnicodeDecodeError as e:
        raise DataFileError(f"not UTF-8 text ({e.reason})", str(path)) from e

    numbered = list(_data_lines(text))
    if not numbered:
        raise ParameterError(f"{path}: need at least 2 data rows, found 0", "input")
    line_numbers = np.array([number for number, _ in numbered])
    lines = [line for _, line in numbered]

    frame = pd.read_csv(
        io.StringIO("\n".join(lines)),
        sep=SEPARATOR,
        engine="python",
        header=None,
        dtype=str,
        keep_default_na=False,
        skip_blank_lines=False,
        on_bad_lines=_mark_bad_line,
    )
    frame = frame.reindex(columns=range(max(2, frame.shape[1])))
    widths = frame.notna().sum(axis=1).to_numpy()
    tagged = frame[0].str.startswith(_BAD_ROW, na=False).to_numpy()
    widths[tagged] = [int(value[len(_BAD_ROW):]) for value in frame.loc[tagged, 0]]

    x = pd.to_numeric(frame[0], errors="coerce").to_numpy(dtype=float)
    y = pd.to_numeric(frame[1], errors="coerce").to_numpy(dtype=float)

    start = 0
    if widths[0] == 2 and np.isnan(x[0]) and np.isnan(y[0]) and not tagged[0]:
        logger.debug("%s:%d treated as header: %r", path, line_numbers[0], lines[0])
        start = 1

    wrong_width = np.flatnonzero(widths[start:] != 2)
    if wrong_width.size:
        row = start + wrong_width[0]
        raise DataFileError(f"expected 2 columns, found {widths[row]}", str(path),
                            int(line_numbers[row]))
    x, y = x[start:], y[start:]
    non_numeric = np.flatnonzero(np.isnan(x) | np.isnan(y))
    if non_numeric.size:
        row = start + non_numeric[0]
        raise DataFileError(f"non-numeric value in {lines[row]!r}", str(path),
                            int(line_numbers[row]))
    non_finite = np.flatnonzero(~(np.isfinite(x) & np.isfinite(y)))
    if non_finite.size:
        row = start + non_finite[0]
        raise DataFileError(f"non-finite value in {lines[row]!r}", str(path),
                            int(line_numbers[row]))

    if x.size < 2:
        raise ParameterError(f"{path}: need at least 2 data rows, found {x.size}", "input")
    return sample_from_arrays(x, y)
