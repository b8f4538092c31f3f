"""Deterministic compensated summation helpers."""

import math

import numpy as np


def compensated_sum(values) -> float:
    """Correctly rounded sum of a real sequence (Shewchuk via ``math.fsum``)."""
    return math.fsum(np.asarray(values, dtype=np.float64).ravel().tolist())


def compensated_complex_sum(values) -> complex:
    values = np.asarray(values, dtype=np.complex128).ravel()
    return complex(math.fsum(values.real.tolist()), math.fsum(values.imag.tolist()))


def compensated_cumsum(values) -> np.ndarray:
    """Running sums in ascending index order with Neumaier compensation.

    ``np.cumsum`` accumulates an O(n * eps) drift over long runs; this keeps
    each prefix within a couple of ulps of the exact prefix sum.
    """
    xs = np.asarray(values, dtype=np.float64).ravel().tolist()
    out = [0.0] * len(xs)
    total = 0.0
    comp = 0.0
    for i, x in enumerate(xs):
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
        out[i] = total + comp
    return np.array(out, dtype=np.float64)
