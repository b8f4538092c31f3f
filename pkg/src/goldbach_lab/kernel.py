"""Kernel K(z) = z^(-N-1) (1 - z^N) / (1 - z) and contour extraction of psi(N).

K is the Laurent polynomial sum_{j=2}^{N+1} z^(-j).  Pairing it with F on
|z| = R by the M-node trapezoid rule picks out f(1) + ... + f(N) exactly once
M exceeds the bandwidth of the integrand, because the integrand is then a
Laurent polynomial whose exponents do not alias modulo M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import (
    DEFAULT_DELTA,
    ContourGrid,
    eval_series_on_grid,
    major_threshold,
    make_grid,
    radius,
    radius_powers,
    tail_bound,
    truncation_length,
)
from .errors import CapacityError, ConfigurationError, DegenerateInputError, DomainError, \
    RangeError, ValidationError
from .fit import ExponentFit, fit_exponent
from .mangoldt import WeightTable, partial_sum
from .summation import compensated_complex_sum, compensated_sum

DEFAULT_EPSILON = 1e-9
DEFAULT_MAX_NODES = 2**24
LAURENT_SWITCH = 1e-6


def kernel_laurent(z, N: int):
    """K(z) summed term by term as sum_{j=2}^{N+1} z^(-j)."""
    w = 1.0 / np.asarray(z, dtype=np.complex128)
    acc = np.zeros_like(w)
    for _ in range(N):
        acc = (acc + 1.0) * w
    return acc * w


def kernel_closed(z, N: int):
    z = np.asarray(z, dtype=np.complex128)
    return z ** (-N - 1) * (1.0 - z**N) / (1.0 - z)


def kernel_value(z, N: int):
    """K(z); the removable singularity at z = 1 is handled by the Laurent sum."""
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    arr = np.asarray(z, dtype=np.complex128)
    if np.any(arr == 0):
        raise DomainError("kernel is undefined at z = 0")
    near = np.abs(1.0 - arr) < LAURENT_SWITCH
    if not near.any():
        out = kernel_closed(arr, N)
    else:
        out = np.empty_like(arr)
        out[near] = kernel_laurent(arr[near], N)
        far = ~near
        out[far] = kernel_closed(arr[far], N)
    return complex(out) if out.ndim == 0 else out


def _phases(grid: ContourGrid, power: int) -> np.ndarray:
    # exp(i * power * t_j) for j <= M/2 with the angle reduced exactly mod M
    k = np.arange(grid.M // 2 + 1, dtype=np.int64)
    red = (power * k) % grid.M
    return np.exp(2j * np.pi * red / grid.M)


def kernel_times_z_on_grid(grid: ContourGrid) -> np.ndarray:
    """K(z_j) z_j = (z_j^(-N) - 1) / (1 - z_j) at every node."""
    N, M = grid.N, grid.M
    inv_rn = math.exp(-N * math.log1p(-1.0 / N))
    zinvn = inv_rn * np.conj(_phases(grid, N))
    half = (zinvn - 1.0) / grid.one_minus_z[: M // 2 + 1]
    if M % 2 == 0:
        half[-1] = half[-1].real
    half[0] = half[0].real
    return np.concatenate((half, np.conj(half[1 : (M + 1) // 2][::-1])))


def kernel_on_grid(grid: ContourGrid) -> np.ndarray:
    return kernel_times_z_on_grid(grid) / grid.nodes


def major_arc_half_angle(N: int, delta: float) -> tuple[float, bool]:
    """Solve |1 - R e^{i t0}| = N^(delta/3 - 1) for t0 in [0, pi].

    Uses |1 - R e^{it}|^2 = (1-R)^2 + 4 R sin^2(t/2).  Returns ``(t0, empty)``;
    the arc is empty when the threshold does not exceed 1 - R.
    """
    R = radius(N)
    T = major_threshold(N, delta)
    excess = T * T - (1.0 - R) ** 2
    if excess <= 0.0:
        return 0.0, True
    s = math.sqrt(excess / R) / 2.0
    if s >= 1.0:
        return math.pi, False
    return 2.0 * math.asin(s), False


def quadrature_nodes(N: int, L: int, max_nodes: int = DEFAULT_MAX_NODES) -> int:
    """Power of two >= L + N + 2: no exponent of F * K * z aliases onto 0."""
    M = 1 << (L + N + 1).bit_length()
    if M > max_nodes:
        raise CapacityError("quadrature node count", M, max_nodes)
    return M


@dataclass(frozen=True)
class ArcDecomposition:
    """Split of (1/2 pi i) ∮ (F - 1/(1-z)) K dz into major and minor arcs."""

    N: int
    M: int
    L: int
    delta: float
    major: complex
    minor: complex
    total: complex
    psi_reference: float
    psi_extracted: float
    t0: float
    major_empty: bool = False


def _resolve_nodes(N, L, nodes, max_nodes):
    need = L + N + 2
    if nodes is None:
        return quadrature_nodes(N, L, max_nodes)
    if nodes < need:
        raise ConfigurationError(f"M = {nodes} is below the exactness bound L + N + 2 = {need}")
    if nodes > max_nodes:
        raise CapacityError("quadrature node count", nodes, max_nodes)
    return int(nodes)


def _check_table(table, N, L):
    if N < 2:
        raise ValidationError(f"N must be >= 2, got {N}")
    if L > table.n_max:
        raise RangeError(f"truncation length L = {L} exceeds table length {table.n_max}")


def _contour_pieces(table, N, delta, epsilon, nodes, max_nodes):
    L = truncation_length(N, epsilon)
    _check_table(table, N, L)
    M = _resolve_nodes(N, L, nodes, max_nodes)
    grid = make_grid(N, M, delta)
    f = eval_series_on_grid(table, grid, L).f_values
    kz = kernel_times_z_on_grid(grid)
    return grid, L, f, kz


def extract_partial_sum(
    table: WeightTable,
    N: int,
    epsilon: float = DEFAULT_EPSILON,
    nodes: int | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> float:
    """Re (1/2 pi i) ∮ F(z) K(z) dz by the M-node trapezoid rule.

    With z = R e^{it}, dz = i z dt, so the integral is the mean of F K z over
    the nodes.  Equals sum_{n<=N} f(n) up to the truncation tail of F.
    """
    grid, L, f, kz = _contour_pieces(table, N, DEFAULT_DELTA, epsilon, nodes, max_nodes)
    return compensated_sum((f * kz).real) / grid.M


def arc_decomposition(
    table: WeightTable,
    N: int,
    delta: float = DEFAULT_DELTA,
    epsilon: float = DEFAULT_EPSILON,
    nodes: int | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> ArcDecomposition:
    """Major/minor split of the remainder integral; Re(total) = psi(N) - N."""
    if not 0.0 < delta <= 1.0:
        raise ValidationError(f"delta must lie in (0, 1], got {delta}")
    grid, L, f, kz = _contour_pieces(table, N, delta, epsilon, nodes, max_nodes)
    M = grid.M
    h = (f - 1.0 / grid.one_minus_z) * kz / M
    flags = grid.major_flags
    major = compensated_complex_sum(h[flags])
    minor = compensated_complex_sum(h[~flags])
    t0, empty = major_arc_half_angle(N, delta)
    psi_ext = compensated_sum((f * kz).real) / M
    return ArcDecomposition(
        N=int(N), M=M, L=L, delta=float(delta),
        major=major, minor=minor, total=major + minor,
        psi_reference=partial_sum(table, N), psi_extracted=psi_ext,
        t0=t0, major_empty=empty or not flags.any(),
    )


def _growth_fit(decompositions, value) -> ExponentFit:
    if len(decompositions) < 3:
        raise DegenerateInputError("need at least 3 decompositions")
    Ns = [d.N for d in decompositions]
    if len(set(Ns)) != len(Ns):
        raise DegenerateInputError("decompositions must have distinct N")
    if len({d.delta for d in decompositions}) != 1:
        raise ValidationError("decompositions must share one delta")
    return fit_exponent([(d.N, value(d)) for d in decompositions])


def major_arc_bound_check(decompositions) -> ExponentFit:
    """Fit log |Re(major)| against log N (claimed growth N^(1 - delta/3))."""
    return _growth_fit(decompositions, lambda d: abs(d.major.real))


def minor_arc_bound_check(decompositions) -> ExponentFit:
    """Fit log(|Re(minor)| / sqrt(log N)) against log N (claimed N^(1 - delta/6))."""
    return _growth_fit(decompositions, lambda d: abs(d.minor.real) / math.sqrt(math.log(d.N)))


def total_bound_check(decompositions) -> ExponentFit:
    """Fit log(|psi(N) - N| / sqrt(log N)) against log N via Re(total)."""
    return _growth_fit(decompositions, lambda d: abs(d.total.real) / math.sqrt(math.log(d.N)))


@dataclass(frozen=True)
class ParsevalReport:
    """Both sides of the mean-square identity for F - 1/(1-z) on |z| = R.

    The 1/(1-z) term is truncated to sum_{n=0}^{L} z^n.  Its n = 0 term has
    no partner in F (which starts at n = 1), so both sides carry the constant
    contribution ``constant_term`` = 2 pi (0 - 1)^2 R^0 = 2 pi.
    """

    N: int
    M: int
    L: int
    lhs: float
    rhs: float
    tail_bound: float
    constant_term: float = 2.0 * math.pi

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


def parseval_check(
    table: WeightTable,
    N: int,
    M: int | None = None,
    epsilon: float = DEFAULT_EPSILON,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> ParsevalReport:
    """lhs: trapezoid rule for ∫_0^{2 pi} |F - P_L|^2 dt; rhs: 2 pi sum (f(n) - 1)^2 R^(2n)."""
    L = truncation_length(N, epsilon)
    _check_table(table, N, L)
    if M is None:
        M = 1 << (2 * L + 1).bit_length()
    if M < 2 * L + 2:
        raise ConfigurationError(f"M = {M} violates the bandwidth bound 2L + 2 = {2 * L + 2}")
    if M > max_nodes:
        raise CapacityError("quadrature node count", M, max_nodes)
    d = (table.coefficients[: L + 1] - 1.0) * radius_powers(N, L)
    spec = np.abs(np.fft.rfft(d, M)) ** 2
    # rfft keeps j = 0..M/2; the other half mirrors it
    weights = np.full(spec.shape, 2.0)
    weights[0] = 1.0
    if M % 2 == 0:
        weights[-1] = 1.0
    lhs = 2.0 * math.pi * compensated_sum(weights * spec) / M
    rhs = 2.0 * math.pi * compensated_sum(d * d)
    tb = 2.0 * math.pi * tail_bound(L, N) ** 2
    return ParsevalReport(int(N), int(M), L, lhs, rhs, tb)


def minor_kernel_l2(N: int, delta: float = DEFAULT_DELTA, M: int | None = None) -> float:
    """Trapezoid value of ∫ |K(z)|^2 |dz| over the minor arc, |dz| = R dt."""
    if M is None:
        M = quadrature_nodes(N, truncation_length(N, DEFAULT_EPSILON))
    grid = make_grid(N, M, delta)
    k2 = np.abs(kernel_on_grid(grid)) ** 2
    return compensated_sum(k2[~grid.major_flags]) * 2.0 * math.pi * grid.R / M


def run_record(dec: ArcDecomposition, par: ParsevalReport, kernel_l2: float) -> dict:
    """Fields of the per-run JSON report, in schema order."""
    return {
        "N": dec.N,
        "M": dec.M,
        "L": dec.L,
        "delta": dec.delta,
        "psi_sieve": dec.psi_reference,
        "psi_extracted": dec.psi_extracted,
        "major_re": dec.major.real,
        "minor_re": dec.minor.real,
        "total_re": dec.total.real,
        "total_im": dec.total.imag,
        "t0": dec.t0,
        "parseval_lhs": par.lhs,
        "parseval_rhs": par.rhs,
        "kernel_l2_minor": kernel_l2,
    }


def run_report(
    table: WeightTable,
    N: int,
    delta: float = DEFAULT_DELTA,
    epsilon: float = DEFAULT_EPSILON,
    nodes: int | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> dict:
    dec = arc_decomposition(table, N, delta, epsilon, nodes, max_nodes)
    par = parseval_check(table, N, epsilon=epsilon, max_nodes=max_nodes)
    return run_record(dec, par, minor_kernel_l2(N, delta, dec.M))
