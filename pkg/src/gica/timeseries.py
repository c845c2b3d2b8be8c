"""Loading, validation, and preprocessing of paired time series.

Input data are two simultaneously sampled scalar series (a driver ``x`` and a
target ``y``). Preprocessing follows common practice for short physiological
recordings: mean removal plus an optional zero-phase high-pass detrend with a
very low cutoff so that slow drifts do not leak into the analysis bands.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal


@dataclass(frozen=True)
class TimeSeriesPair:
    """Two synchronously sampled series with a common sampling rate.

    Parameters
    ----------
    x : ndarray
        Driver series, shape ``(n,)``.
    y : ndarray
        Target series, shape ``(n,)``.
    fs : float
        Sampling frequency in Hz.
    """

    x: np.ndarray
    y: np.ndarray
    fs: float

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1:
            raise ValueError("series must be one-dimensional")
        if x.size != y.size:
            raise ValueError(
                f"series lengths differ: x has {x.size}, y has {y.size}"
            )
        if x.size < 2:
            raise ValueError("series must contain at least 2 samples")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("series contain non-finite values")
        if not (np.isfinite(self.fs) and self.fs > 0):
            raise ValueError(f"sampling rate must be positive, got {self.fs}")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "fs", float(self.fs))

    @property
    def n(self) -> int:
        return int(self.x.size)


def _parse_cell(token: str, line_no: int, col: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ValueError(
            f"non-numeric value {token!r} at row {line_no}, column {col}"
        ) from None
    if not np.isfinite(value):
        raise ValueError(
            f"non-finite value {token!r} at row {line_no}, column {col}"
        )
    return value


def load_pair(
    path: str | Path,
    fs: float,
    columns: tuple[int, int] = (0, 1),
    delimiter: str = ",",
) -> TimeSeriesPair:
    """Read a delimited text file into a :class:`TimeSeriesPair`.

    The two selected columns must be numeric and of equal length. A single
    leading header line is detected automatically (a first row whose selected
    cells do not parse as numbers) and skipped.

    Parameters
    ----------
    path : str or Path
        File to read.
    fs : float
        Sampling frequency in Hz to attach to the data.
    columns : tuple of int
        Zero-based indices of the driver and target columns.
    delimiter : str
        Field separator.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    cx, cy = columns
    xs: list[float] = []
    ys: list[float] = []
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    rows = [r for r in rows if any(tok.strip() for tok in r)]
    if not rows:
        raise ValueError(f"no data rows in {path}")
    start = 0
    first = rows[0]
    if len(first) > max(cx, cy):
        try:
            float(first[cx])
            float(first[cy])
        except ValueError:
            start = 1  # header line
    for i, row in enumerate(rows[start:], start=start + 1):
        if len(row) <= max(cx, cy):
            raise ValueError(
                f"row {i} has {len(row)} columns, need at least {max(cx, cy) + 1}"
            )
        xs.append(_parse_cell(row[cx].strip(), i, cx))
        ys.append(_parse_cell(row[cy].strip(), i, cy))
    return TimeSeriesPair(np.array(xs), np.array(ys), fs)


def write_pair(pair: TimeSeriesPair, path: str | Path) -> None:
    """Write the pair as two-column CSV with a ``x,y`` header.

    Values are printed with 15 significant digits, enough for a lossless
    round trip at the tolerances used downstream.
    """
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write("x,y\n")
        for a, b in zip(pair.x, pair.y):
            fh.write(f"{a:.15g},{b:.15g}\n")


def remove_mean(series: np.ndarray) -> np.ndarray:
    """Subtract the sample mean."""
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise ValueError("empty series")
    return series - series.mean()


def highpass_detrend(series: np.ndarray, fs: float, cutoff: float = 0.0156) -> np.ndarray:
    """Zero-phase first-order high-pass filtering for slow-trend removal.

    A first-order Butterworth high-pass is applied forward and backward
    (zero phase). The signal is reflect-padded by three filter time
    constants, capped by the series length, to suppress end transients.

    Parameters
    ----------
    series : ndarray
        Input samples.
    fs : float
        Sampling frequency in Hz.
    cutoff : float
        High-pass cutoff in Hz; must lie in ``(0, fs/2)``.
    """
    series = np.asarray(series, dtype=float)
    if series.size < 20:
        raise ValueError("need at least 20 samples to detrend")
    if not 0 < cutoff < fs / 2:
        raise ValueError(
            f"cutoff must lie in (0, {fs / 2}), got {cutoff}"
        )
    b, a = signal.butter(1, cutoff, btype="highpass", fs=fs)
    tau = fs / (2 * np.pi * cutoff)  # time constant in samples
    padlen = int(min(3 * tau, series.size - 2))
    return signal.filtfilt(b, a, series, padlen=padlen)


def preprocess(
    pair: TimeSeriesPair, detrend_cutoff: float | None = 0.0156
) -> TimeSeriesPair:
    """Detrend (optional) and demean both channels.

    ``detrend_cutoff=None`` skips the high-pass stage and only removes the
    mean.
    """
    x, y = pair.x, pair.y
    if detrend_cutoff is not None:
        x = highpass_detrend(x, pair.fs, detrend_cutoff)
        y = highpass_detrend(y, pair.fs, detrend_cutoff)
    return TimeSeriesPair(remove_mean(x), remove_mean(y), pair.fs)
