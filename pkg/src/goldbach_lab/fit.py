"""Log-log least squares for empirical growth exponents."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateInputError, ValidationError

DROP_THRESHOLD = 1e-14


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    residual_rms: float
    sample_count: int
    dropped_count: int = 0

    def predict(self, x):
        """Fitted power law exp(intercept) * x**slope."""
        return np.exp(self.intercept) * np.asarray(x, dtype=np.float64) ** self.slope


class DyadicSamples(NamedTuple):
    pairs: list
    dropped: int


def dyadic_samples(values, x_min: int, x_max: int) -> DyadicSamples:
    """Pairs (x, |values[x]|) at x = x_min, 2 x_min, 4 x_min, ... <= x_max.

    ``values`` is indexed directly by x.  Entries with |value| below 1e-14 are
    left out and tallied in ``dropped``.
    """
    values = np.asarray(values)
    if x_min < 2 or x_min >= x_max:
        raise ValidationError(f"need 2 <= x_min < x_max, got {x_min}, {x_max}")
    if x_max > len(values) - 1:
        raise ValidationError(f"x_max = {x_max} beyond sequence end {len(values) - 1}")
    pairs, dropped = [], 0
    x = x_min
    while x <= x_max:
        y = abs(float(values[x]))
        if y < DROP_THRESHOLD:
            dropped += 1
        else:
            pairs.append((x, y))
        x *= 2
    if not pairs:
        raise DegenerateInputError("every dyadic sample is below the drop threshold")
    return DyadicSamples(pairs, dropped)


def fit_exponent(samples, dropped: int = 0) -> ExponentFit:
    """Ordinary least squares of log y on log x.

    Samples with y <= 0 are dropped; repeated x values are collapsed by
    averaging their log y.
    """
    if isinstance(samples, DyadicSamples):
        samples, dropped = samples.pairs, dropped + samples.dropped
    by_x: dict[float, list[float]] = {}
    for x, y in samples:
        x, y = float(x), float(y)
        if not (x > 0 and np.isfinite(x)):
            raise ValidationError(f"sample abscissa must be positive, got {x}")
        if not (y > 0 and np.isfinite(y)):
            dropped += 1
            continue
        by_x.setdefault(x, []).append(np.log(y))
    if len(by_x) < 2:
        raise DegenerateInputError(f"need >= 2 distinct usable x values, got {len(by_x)}")
    xs = sorted(by_x)
    lx = np.log(np.array(xs))
    ly = np.array([np.mean(by_x[x]) for x in xs])
    mx, my = lx.mean(), ly.mean()
    dx = lx - mx
    slope = float(np.dot(dx, ly - my) / np.dot(dx, dx))
    intercept = float(my - slope * mx)
    resid = ly - (intercept + slope * lx)
    rms = float(np.sqrt(np.mean(resid**2)))
    return ExponentFit(slope, intercept, rms, len(xs), dropped)


def estimate_delta(fit: ExponentFit) -> float:
    """Empirical delta with |E(x)| ~ x^(2 - delta)."""
    return 2.0 - fit.slope


def fit_report(fit: ExponentFit) -> dict:
    report = asdict(fit)
    report["delta"] = estimate_delta(fit)
    return {k: report[k] for k in
            ("slope", "intercept", "residual_rms", "delta", "sample_count", "dropped_count")}


def write_samples_csv(path, samples) -> None:
    pairs = samples.pairs if isinstance(samples, DyadicSamples) else samples
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "absE"])
        for x, y in pairs:
            w.writerow([x, f"{y:.17g}"])


def write_fit_json(path, fit: ExponentFit) -> None:
    with open(path, "w") as fh:
        json.dump(fit_report(fit), fh, indent=2)
        fh.write("\n")
