"""The power series F(z) = sum f(n) z^n on the circle |z| = R = 1 - 1/N.

Nodes are z_j = R exp(2 pi i j / M).  Everything that depends on the angle
is computed for j <= M/2 and mirrored by conjugation, so values at angles
t and -t are exact conjugates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, RangeError, ValidationError
from .mangoldt import WeightTable

DEFAULT_DELTA = 0.5


def radius(N: int) -> float:
    return 1.0 - 1.0 / N


def major_threshold(N: int, delta: float) -> float:
    """Arc-split radius N^(delta/3 - 1) around z = 1."""
    return float(N) ** (delta / 3.0 - 1.0)


def radius_powers(N: int, n_max: int) -> np.ndarray:
    """R^n for n = 0..n_max, via exp(n log1p(-1/N))."""
    return np.exp(np.arange(n_max + 1, dtype=np.float64) * math.log1p(-1.0 / N))


def _mirror(half: np.ndarray, M: int, conj: bool) -> np.ndarray:
    """Extend values for j = 0..M//2 to j = 0..M-1 using j -> M - j."""
    tail = half[1 : (M + 1) // 2][::-1]
    if conj:
        tail = np.conj(tail)
    return np.concatenate((half, tail))


@dataclass(frozen=True, eq=False)
class ContourGrid:
    """M equally spaced nodes on |z| = 1 - 1/N with major-arc flags.

    ``one_minus_z`` and ``abs_one_minus_z`` are computed from the half-angle
    form |1 - z|^2 = (1-R)^2 + 4 R sin^2(t/2), which stays accurate near z = 1.
    """

    N: int
    M: int
    delta: float
    nodes: np.ndarray = field(repr=False)
    angles: np.ndarray = field(repr=False)
    one_minus_z: np.ndarray = field(repr=False)
    abs_one_minus_z: np.ndarray = field(repr=False)
    major_flags: np.ndarray = field(repr=False)

    @property
    def R(self) -> float:
        return radius(self.N)

    @property
    def threshold(self) -> float:
        return major_threshold(self.N, self.delta)

    @property
    def major_count(self) -> int:
        return int(self.major_flags.sum())


def make_grid(N: int, M: int, delta: float = DEFAULT_DELTA) -> ContourGrid:
    if N < 2:
        raise ValidationError(f"N must be >= 2, got {N}")
    if M < 2:
        raise ValidationError(f"M must be >= 2, got {M}")
    if not 0.0 < delta < 3.0:
        raise ValidationError(f"delta must lie in (0, 3), got {delta}")
    R = radius(N)
    k = np.arange(M // 2 + 1, dtype=np.float64)
    theta = 2.0 * np.pi * k / M
    half_sin = np.sin(np.pi * k / M)
    unit = np.cos(theta) + 1j * np.sin(theta)
    if M % 2 == 0:
        unit[-1] = -1.0
    nodes = R * _mirror(unit, M, conj=True)
    omz_half = ((1.0 - R) + 2.0 * R * half_sin**2) - 1j * R * np.sin(theta)
    if M % 2 == 0:
        omz_half[-1] = 1.0 + R
    one_minus_z = _mirror(omz_half, M, conj=True)
    abs_half = np.sqrt((1.0 - R) ** 2 + 4.0 * R * half_sin**2)
    abs_omz = _mirror(abs_half, M, conj=False)
    angles = 2.0 * np.pi * np.arange(M) / M
    major = abs_omz < major_threshold(N, delta)
    for arr in (nodes, angles, one_minus_z, abs_omz, major):
        arr.flags.writeable = False
    return ContourGrid(int(N), int(M), float(delta), nodes, angles, one_minus_z, abs_omz, major)


def tail_bound(L: int, N: int) -> float:
    """R^(L+1) N (log L + N/L + 1): dominates sum_{n>L} log(n) R^n (and R^n)."""
    return math.exp((L + 1) * math.log1p(-1.0 / N)) * N * (math.log(L) + N / L + 1.0)


def truncation_length(N: int, epsilon: float) -> int:
    """Smallest L >= 1 with tail_bound(L, N) <= epsilon."""
    if N < 2:
        raise ValidationError(f"N must be >= 2, got {N}")
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon}")
    if tail_bound(1, N) <= epsilon:
        return 1
    # tail_bound is strictly decreasing in L, so bisection finds the first passing L
    lo, hi = 1, 2
    while tail_bound(hi, N) > epsilon:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_bound(mid, N) <= epsilon:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True, eq=False)
class SeriesValues:
    grid: ContourGrid
    f_values: np.ndarray = field(repr=False)
    truncation_length: int
    tail_bound: float


def horner(coefficients, z) -> np.ndarray:
    """sum_{n=0}^{len-1} coefficients[n] z^n evaluated at every point of z."""
    z = np.asarray(z, dtype=np.complex128)
    acc = np.zeros_like(z)
    for a in np.asarray(coefficients, dtype=np.float64)[::-1].tolist():
        acc = acc * z + a
    return acc


def eval_series(table: WeightTable, z, L: int) -> np.ndarray:
    """Truncated F(z) = sum_{n=1}^{L} f(n) z^n at arbitrary points (Horner)."""
    if L > table.n_max:
        raise RangeError(f"L = {L} exceeds table length {table.n_max}")
    return horner(table.coefficients[: L + 1], z)


def _fft_on_grid(scaled: np.ndarray, M: int) -> np.ndarray:
    # sum_n scaled[n] e^{+2 pi i j n / M} = conj(rfft)[j] for real coefficients
    half = np.conj(np.fft.rfft(scaled, M))
    if M % 2 == 0:
        half[-1] = half[-1].real
    half[0] = half[0].real
    return _mirror(half, M, conj=True)


def eval_series_on_grid(
    table: WeightTable, grid: ContourGrid, L: int, method: str = "auto"
) -> SeriesValues:
    """F truncated at degree L, at every grid node.

    ``method`` is ``"fft"`` (requires M >= L + 1), ``"horner"``, or ``"auto"``
    which picks the transform whenever it is allowed.
    """
    if L < 1:
        raise ValidationError("L must be >= 1")
    if L > table.n_max:
        raise RangeError(f"L = {L} exceeds table length {table.n_max}")
    if method == "auto":
        method = "fft" if grid.M >= L + 1 else "horner"
    if method == "fft":
        if grid.M < L + 1:
            raise ValidationError(f"transform path needs M >= L + 1 ({grid.M} < {L + 1})")
        scaled = table.coefficients[: L + 1] * radius_powers(grid.N, L)
        f = _fft_on_grid(scaled, grid.M)
    elif method == "horner":
        M = grid.M
        f = _mirror(eval_series(table, grid.nodes[: M // 2 + 1], L), M, conj=True)
    else:
        raise ValidationError(f"unknown method {method!r}")
    f.flags.writeable = False
    return SeriesValues(grid, f, int(L), tail_bound(L, grid.N))


def evaluate_on_contour(
    table: WeightTable, N: int, M: int, delta: float = DEFAULT_DELTA, epsilon: float = 1e-9
) -> SeriesValues:
    L = truncation_length(N, epsilon)
    return eval_series_on_grid(table, make_grid(N, M, delta), L)


@dataclass(frozen=True, eq=False)
class Residuals:
    """Normalized residuals at ``indices`` (node numbers), with maxima."""

    indices: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    major_max: float
    overall_max: float


def square_residual(sv: SeriesValues, delta: float) -> Residuals:
    """|F^2 - (1-z)^-2| / (|1-z| N^(3-delta)) at every node."""
    g = sv.grid
    main = 1.0 / g.one_minus_z
    r = np.abs(sv.f_values**2 - main**2) / (g.abs_one_minus_z * float(g.N) ** (3.0 - delta))
    major = r[g.major_flags]
    return Residuals(
        np.arange(g.M),
        r,
        float(major.max()) if major.size else float("nan"),
        float(r.max()),
    )


def root_residual(sv: SeriesValues, delta: float) -> Residuals:
    """|F - (1-z)^-1| / (|1-z|^2 N^(3-delta)) on the major arc only.

    F comes from its (single-valued) series, so no square-root branch is chosen.
    """
    g = sv.grid
    idx = np.flatnonzero(g.major_flags)
    if idx.size == 0:
        raise DegenerateInputError(
            f"empty major arc: no node with |1-z| < {g.threshold:.6g} (N={g.N}, M={g.M})"
        )
    diff = np.abs(sv.f_values[idx] - 1.0 / g.one_minus_z[idx])
    q = diff / (g.abs_one_minus_z[idx] ** 2 * float(g.N) ** (3.0 - delta))
    top = float(q.max())
    return Residuals(idx, q, top, top)


def half_square_moment(z):
    """Closed form of sum_{n>=1} (n^2/2) z^n for |z| < 1."""
    w = 1.0 - np.asarray(z, dtype=np.complex128)
    return 1.0 / w**3 - 1.5 / w**2 + 0.5 / w


def write_contour_csv(dest, sv: SeriesValues, delta: float) -> None:
    """Per-node CSV; ``dest`` is a path or an open text file."""
    if not hasattr(dest, "write"):
        with open(dest, "w", newline="") as fh:
            return write_contour_csv(fh, sv, delta)
    g = sv.grid
    sq = square_residual(sv, delta).values
    root = np.full(g.M, np.nan)
    if g.major_count:
        rr = root_residual(sv, delta)
        root[rr.indices] = rr.values
    absf = np.abs(sv.f_values)
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(["j", "angle", "re_z", "im_z", "abs_one_minus_z", "major", "abs_F",
                "square_residual", "root_residual"])
    for j in range(g.M):
        w.writerow([
            j, f"{g.angles[j]:.17g}", f"{g.nodes[j].real:.17g}", f"{g.nodes[j].imag:.17g}",
            f"{g.abs_one_minus_z[j]:.17g}", int(g.major_flags[j]), f"{absf[j]:.17g}",
            f"{sq[j]:.17g}", "" if np.isnan(root[j]) else f"{root[j]:.17g}",
        ])
