"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from goldbach_lab.cache import cache_roundtrip
from goldbach_lab.circle import eval_series_on_grid, make_grid, truncation_length
from goldbach_lab.fit import dyadic_samples, fit_exponent
from goldbach_lab.goldbach import goldbach_direct, goldbach_fast, summatory
from goldbach_lab.kernel import (
    arc_decomposition,
    extract_partial_sum,
    kernel_value,
    major_arc_bound_check,
    minor_arc_bound_check,
    minor_kernel_l2,
    parseval_check,
    total_bound_check,
)
from goldbach_lab.mangoldt import build_mangoldt_table, build_unit_table, partial_sum

DELTA = 0.5
ARC_NS = [2**k for k in range(8, 15)]


@pytest.fixture(scope="module")
def decompositions(lam_big):
    return [arc_decomposition(lam_big, N, DELTA) for N in ARC_NS]


def test_01_convolution_oracle(acceptance):
    start = time.perf_counter()
    lam = build_mangoldt_table(4096)
    d = goldbach_direct(lam, 4096).g
    f = goldbach_fast(lam, 4096).g
    elapsed = time.perf_counter() - start
    err = np.max(np.abs(f - d)) / max(1.0, d.max())
    acceptance(1, "fast vs direct convolution", err < 1e-9 and elapsed < 10,
               f"max rel err {err:.2e} < 1e-9, {elapsed:.2f}s < 10s")


def test_02_unit_weight_exactness(acceptance):
    start = time.perf_counter()
    n_max = 4096
    unit = build_unit_table(2**18)
    n = np.arange(n_max + 1, dtype=float)
    errs = {}
    for series in (goldbach_direct(unit, n_max), goldbach_fast(unit, n_max)):
        s = summatory(series, 0.5)
        key = series.method.value
        errs[f"G {key}"] = np.max(np.abs(series.g[2:] - (n[2:] - 1)))
        errs[f"S {key}"] = np.max(np.abs(s.s[1:] - n[1:] * (n[1:] - 1) / 2))
        errs[f"E {key}"] = np.max(np.abs(s.e[1:] + n[1:] / 2))
    errs["extraction"] = max(abs(extract_partial_sum(unit, N) - N) for N in (2, 17, 100, 1000))
    errs["arc total"] = max(abs(arc_decomposition(unit, N, DELTA).total) for N in (64, 256, 1024))
    elapsed = time.perf_counter() - start
    worst = max(errs, key=errs.get)
    ok = all(v <= 1e-8 for v in errs.values()) and elapsed < 5
    acceptance(2, "unit-weight exactness", ok,
               f"worst {worst} = {errs[worst]:.2e} <= 1e-8, {elapsed:.2f}s < 5s")


def test_03_kernel_extraction(acceptance):
    start = time.perf_counter()
    lam = build_mangoldt_table(40_000)
    rel = {N: abs(extract_partial_sum(lam, N) - partial_sum(lam, N)) / partial_sum(lam, N)
           for N in (10, 100, 1000)}
    elapsed = time.perf_counter() - start
    worst = max(rel.values())
    acceptance(3, "kernel extraction of psi(N)", worst <= 1e-6 and elapsed < 30,
               f"max rel err {worst:.2e} <= 1e-6 over N=10,100,1000, {elapsed:.2f}s < 30s")


def test_04_decomposition_identity(acceptance, lam_big):
    d = arc_decomposition(lam_big, 256, DELTA)
    target = partial_sum(lam_big, 256) - 256
    rel = abs((d.major + d.minor).real - target) / abs(target)
    acceptance(4, "Re(major + minor) = psi(N) - N", rel <= 1e-6,
               f"N=256 rel err {rel:.2e} <= 1e-6")


def test_05_parseval_identity(acceptance, lam_big):
    worst, ok = 0.0, True
    for N in (2, 64, 512):
        r = parseval_check(lam_big, N)
        dev = abs(r.ratio - 1)
        ok &= dev <= 1e-6 + r.tail_bound
        worst = max(worst, dev)
    acceptance(5, "Parseval identity", ok, f"max |lhs/rhs - 1| = {worst:.2e} <= 1e-6 + tail")


def test_06_parseval_growth(acceptance, lam_big):
    start = time.perf_counter()
    pts = [(N * math.log(N), parseval_check(lam_big, N).rhs) for N in (2**k for k in range(10, 17))]
    slope = fit_exponent(pts).slope
    elapsed = time.perf_counter() - start
    acceptance(6, "Parseval growth O(N log N)", abs(slope - 1) <= 0.15 and elapsed < 300,
               f"slope {slope:.4f} in 1 +- 0.15, {elapsed:.2f}s < 300s")


def test_07_goldbach_error_exponent(acceptance):
    start = time.perf_counter()
    lam = build_mangoldt_table(2**20)
    s = summatory(goldbach_fast(lam, 2**20))
    fit = fit_exponent(dyadic_samples(s.e, 2**10, 2**20))
    elapsed = time.perf_counter() - start
    acceptance(7, "Goldbach error exponent", fit.slope <= 1.6 and elapsed < 120,
               f"slope {fit.slope:.4f} <= 1.6 (delta {2 - fit.slope:.3f}), {elapsed:.2f}s < 120s")


def test_08_major_arc_growth(acceptance, decompositions):
    slope = major_arc_bound_check(decompositions).slope
    bound = 1 - DELTA / 3 + 0.15
    acceptance(8, "major-arc growth", slope <= bound, f"slope {slope:.4f} <= {bound:.4f}")


def test_09_minor_arc_growth(acceptance, decompositions):
    slope = minor_arc_bound_check(decompositions).slope
    total = total_bound_check(decompositions).slope
    bound = 1 - DELTA / 6 + 0.15
    acceptance(9, "minor-arc growth", slope <= bound and total <= bound,
               f"minor slope {slope:.4f}, psi(N)-N slope {total:.4f} <= {bound:.4f}")


def test_10_kernel_l2(acceptance, decompositions):
    norm = [minor_kernel_l2(d.N, DELTA, d.M) / d.N ** (1 - DELTA / 3) for d in decompositions]
    ratio = max(norm) / min(norm)
    acceptance(10, "minor-arc kernel L2 bound", ratio <= 20, f"max/min {ratio:.3f} <= 20")


def test_11_structural_invariants(acceptance, lam_big, decompositions, tmp_path):
    failures = []

    rng = np.random.default_rng(20240611)
    r = rng.uniform(0.3, 3.0, 100)
    z = r * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
    for zz, N in zip(z, rng.integers(1, 80, 100)):
        ref = sum(zz ** (-j) for j in range(2, int(N) + 2))
        if abs(kernel_value(zz, int(N)) - ref) > 1e-9 * abs(ref):
            failures.append(f"Laurent identity at z={zz:.3f}, N={N}")

    for d in decompositions:
        g = make_grid(d.N, d.M, DELTA)
        half = slice(1, g.M // 2 + 1)
        t, a2 = g.angles[half], g.abs_one_minus_z[half] ** 2
        if not (np.all(t**2 / 3 < a2) and np.all(a2 < t**2 + d.N**-2.0)):
            failures.append(f"sin-form inequality N={d.N}")
        f = eval_series_on_grid(lam_big, g, truncation_length(d.N, 1e-9)).f_values
        if np.max(np.abs(f[1:] - np.conj(f[:0:-1]))) > 1e-12:
            failures.append(f"conjugate symmetry N={d.N}")
        if abs(d.total.imag) > 1e-8 * (1 + abs(d.total)):
            failures.append(f"reality N={d.N}")

    for table in (build_unit_table(1000), build_mangoldt_table(10**5)):
        back = cache_roundtrip(table, tmp_path / "t.gbps")
        if back.values.tobytes() != table.values.tobytes() or back.kind is not table.kind:
            failures.append(f"cache round-trip {table.kind.name}")

    acceptance(11, "structural invariants", not failures,
               "all green" if not failures else "; ".join(failures))
