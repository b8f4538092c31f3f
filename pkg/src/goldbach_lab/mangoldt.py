"""Weight tables: the von Mangoldt function and the alternative weights.

A :class:`WeightTable` holds f(1), ..., f(n_max), the coefficients of the
power series F(z) = sum f(n) z^n.  The von Mangoldt support set (prime
powers) is decided purely with integer arithmetic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, RangeError, ValidationError
from .summation import compensated_sum

DEFAULT_MAX_ENTRIES = 2**27
SEGMENT_SIZE = 2**20


class WeightKind(enum.IntEnum):
    """Kind of weight sequence; the integer value is the cache-file tag byte."""

    VON_MANGOLDT = 0
    UNIT = 1
    CUSTOM = 2

    @classmethod
    def parse(cls, name: str) -> "WeightKind":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValidationError(f"unknown weight kind {name!r}") from None


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Immutable table of weights f(1..n_max).

    Attributes:
        n_max: Largest index covered.
        kind: Which weight sequence this is.
        coefficients: float64 array of length ``n_max + 1`` with
            ``coefficients[0] == 0`` and ``coefficients[n] == f(n)``.
    """

    n_max: int
    kind: WeightKind
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.coefficients.shape != (self.n_max + 1,):
            raise ValidationError("coefficients must have length n_max + 1")
        if self.coefficients[0] != 0.0:
            raise ValidationError("coefficients[0] must be 0")
        if not np.all(np.isfinite(self.coefficients)):
            raise ValidationError("weights must be finite")

    @property
    def values(self) -> np.ndarray:
        """The n_max weights f(1), ..., f(n_max) (read-only view)."""
        return self.coefficients[1:]

    def __getitem__(self, n):
        """1-based access: ``table[n] == f(n)``."""
        if isinstance(n, (int, np.integer)) and not 1 <= n <= self.n_max:
            raise RangeError(f"index {n} outside 1..{self.n_max}")
        return self.coefficients[n]

    def __len__(self) -> int:
        return self.n_max

    @property
    def non_negative(self) -> bool:
        return bool(np.all(self.coefficients >= 0))


def _check_size(n_max, max_entries):
    if not isinstance(n_max, (int, np.integer)) or isinstance(n_max, bool):
        raise ValidationError(f"n_max must be an integer, got {n_max!r}")
    if n_max < 1:
        raise CapacityError("table size", n_max, "n_max >= 1")
    if n_max > max_entries:
        raise CapacityError("table size", n_max, max_entries)


def small_primes(limit: int) -> np.ndarray:
    """Primes <= limit by a plain Eratosthenes sieve (int64)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def segmented_primes(n_max: int, segment_size: int = SEGMENT_SIZE) -> np.ndarray:
    """All primes <= n_max, sieving in fixed-size segments."""
    root = math.isqrt(n_max)
    base = small_primes(root)
    chunks = [base]
    lo = root + 1
    while lo <= n_max:
        hi = min(lo + segment_size - 1, n_max)
        mark = np.ones(hi - lo + 1, dtype=bool)
        for p in base.tolist():
            if p * p > hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            mark[start - lo :: p] = False
        chunks.append(np.flatnonzero(mark).astype(np.int64) + lo)
        lo = hi + 1
    return np.concatenate(chunks)


def build_mangoldt_table(n_max: int, max_entries: int = DEFAULT_MAX_ENTRIES) -> WeightTable:
    """Von Mangoldt weights: log p at n = p^k, zero elsewhere."""
    _check_size(n_max, max_entries)
    coeffs = np.zeros(n_max + 1, dtype=np.float64)
    primes = segmented_primes(n_max)
    coeffs[primes] = np.log(primes.astype(np.float64))
    root = math.isqrt(n_max)
    for p in primes[primes <= root].tolist():
        logp = coeffs[p]
        q = p * p
        while q <= n_max:
            coeffs[q] = logp
            q *= p
    return WeightTable(int(n_max), WeightKind.VON_MANGOLDT, _frozen(coeffs))


def build_unit_table(n_max: int, max_entries: int = DEFAULT_MAX_ENTRIES) -> WeightTable:
    _check_size(n_max, max_entries)
    coeffs = np.ones(n_max + 1, dtype=np.float64)
    coeffs[0] = 0.0
    return WeightTable(int(n_max), WeightKind.UNIT, _frozen(coeffs))


def build_custom_table(values, max_entries: int = DEFAULT_MAX_ENTRIES) -> WeightTable:
    """Wrap an arbitrary weight sequence f(1), ..., f(n_max)."""
    values = np.asarray(values, dtype=np.float64).ravel()
    _check_size(len(values), max_entries)
    coeffs = np.concatenate(([0.0], values))
    return WeightTable(len(values), WeightKind.CUSTOM, _frozen(coeffs))


def build_table(kind, n_max: int, max_entries: int = DEFAULT_MAX_ENTRIES) -> WeightTable:
    kind = WeightKind.parse(kind) if isinstance(kind, str) else WeightKind(kind)
    if kind is WeightKind.VON_MANGOLDT:
        return build_mangoldt_table(n_max, max_entries)
    if kind is WeightKind.UNIT:
        return build_unit_table(n_max, max_entries)
    raise ValidationError("custom tables need explicit values; use build_custom_table")


def partial_sum(table: WeightTable, N: int) -> float:
    """sum_{n <= N} f(n); for von Mangoldt weights this is psi(N)."""
    if N < 0 or N > table.n_max:
        raise RangeError(f"N = {N} outside 0..{table.n_max}")
    return compensated_sum(table.coefficients[1 : N + 1])


def prime_power_base(n: int) -> int:
    """Return p if n = p^k for a prime p (k >= 1), else 0.  Pure integer arithmetic."""
    if n < 2:
        return 0
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            return p if n == 1 else 0
        p += 1
    return n
