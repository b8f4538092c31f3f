"""Goldbach autoconvolution G(n), its summatory S(x) and error term E(x).

Arrays are indexed directly by n, with ``g[0] = g[1] = 0`` and
``s[0] = e[0] = 0`` kept only as index padding.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, RangeError, ValidationError
from .mangoldt import WeightKind, WeightTable
from .summation import compensated_cumsum, compensated_sum

DEFAULT_MAX_TRANSFORM = 2**25


class Method(str, enum.Enum):
    DIRECT = "direct"
    FAST = "fast"


@dataclass(frozen=True, eq=False)
class GoldbachSeries:
    n_max: int
    g: np.ndarray = field(repr=False)
    source_kind: WeightKind
    method: Method

    def __getitem__(self, n):
        return self.g[n]


@dataclass(frozen=True, eq=False)
class SummatorySeries:
    """S(n) = sum_{m <= n} G(m) and E(n) = S(n) - c n^2 for n = 1..n_max."""

    n_max: int
    s: np.ndarray = field(repr=False)
    e: np.ndarray = field(repr=False)
    c: float
    g: np.ndarray = field(repr=False)


def _readonly(arr):
    arr.flags.writeable = False
    return arr


def _check_range(table: WeightTable, n_max: int):
    if n_max < 2:
        raise RangeError(f"n_max must be >= 2, got {n_max}")
    if n_max - 1 > table.n_max:
        raise RangeError(
            f"n_max = {n_max} needs weights up to {n_max - 1}, table has {table.n_max}"
        )


def goldbach_direct(table: WeightTable, n_max: int) -> GoldbachSeries:
    """G(n) = sum_{k=1}^{n-1} f(k) f(n-k) by the literal double loop.

    Quadratic; this is the oracle for :func:`goldbach_fast`.
    """
    _check_range(table, n_max)
    c = table.coefficients
    g = np.zeros(n_max + 1, dtype=np.float64)
    for n in range(2, n_max + 1):
        g[n] = compensated_sum(c[1:n] * c[n - 1 : 0 : -1])
    return GoldbachSeries(n_max, _readonly(g), table.kind, Method.DIRECT)


def transform_size(n_max: int) -> int:
    """Next power of two >= 2 * n_max."""
    return 1 << max(1, (2 * n_max - 1).bit_length())


def goldbach_fast(
    table: WeightTable, n_max: int, max_transform: int = DEFAULT_MAX_TRANSFORM
) -> GoldbachSeries:
    """G(n) via a zero-padded real FFT autoconvolution."""
    _check_range(table, n_max)
    size = transform_size(n_max)
    if size > max_transform:
        raise CapacityError("convolution transform size", size, max_transform)
    a = table.coefficients[:n_max]
    spec = np.fft.rfft(a, size)
    g = np.fft.irfft(spec * spec, size)[: n_max + 1].copy()
    g[:2] = 0.0
    if table.non_negative:
        # true values are >= 0; only round-off noise around exact zeros is negative
        np.maximum(g, 0.0, out=g)
    return GoldbachSeries(n_max, _readonly(g), table.kind, Method.FAST)


def summatory(series: GoldbachSeries, c: float = 0.5) -> SummatorySeries:
    c = float(c)
    if not np.isfinite(c):
        raise ValidationError("main-term constant c must be finite")
    s = compensated_cumsum(series.g)
    n = np.arange(series.n_max + 1, dtype=np.float64)
    e = s - c * n * n
    e[0] = 0.0
    return SummatorySeries(series.n_max, _readonly(s), _readonly(e), c, series.g)


def write_summatory_csv(path, summ: SummatorySeries) -> None:
    """CSV with header ``n,G,S,E``; floats as 17-significant-digit decimals."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "G", "S", "E"])
        for n in range(1, summ.n_max + 1):
            w.writerow([n, f"{summ.g[n]:.17g}", f"{summ.s[n]:.17g}", f"{summ.e[n]:.17g}"])
