"""Command-line front end: ``goldbach-lab <command> [options]``.

Exit status: 0 success, 2 validation error, 3 capacity error, 4 when a
``report`` check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from contextlib import contextmanager
from importlib import resources
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import circle, fit, goldbach, kernel
from .cache import Cache
from .errors import CapacityError, GoldbachLabError, ValidationError
from .mangoldt import WeightKind, build_table, partial_sum

log = logging.getLogger("goldbach_lab")

COMMANDS = ("sieve", "goldbach", "summatory", "fit", "contour", "arcs", "parseval", "report")
CONTOUR_COMMANDS = ("contour", "arcs", "parseval", "report")
EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_CHECK_FAILED = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    n_max: int = 2**20
    N_list: list = field(default_factory=list)
    delta: float = 0.5
    epsilon: float = 1e-9
    nodes_override: int | None = None
    weight: str = "von_mangoldt"
    out_path: str = "-"
    cache_dir: str | None = None
    format: str | None = None
    c: float = 0.5
    x_min: int = 1024
    method: str = "fast"

    def validate(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if not 0.0 < self.delta <= 1.0:
            raise ValidationError(f"delta must lie in (0, 1], got {self.delta}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValidationError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.command in CONTOUR_COMMANDS and not self.N_list:
            raise ValidationError(f"{self.command} needs a non-empty --N list")
        if any(N < 2 for N in self.N_list):
            raise ValidationError("every N must be >= 2")
        if self.n_max < 2:
            raise ValidationError("--nmax must be >= 2")
        if self.weight not in ("von_mangoldt", "unit"):
            raise ValidationError(f"unknown weight {self.weight!r}")
        if self.format is None:
            self.format = "csv" if str(self.out_path).endswith(".csv") else "json"
        if self.format not in ("csv", "json"):
            raise ValidationError(f"unknown format {self.format!r}")
        if self.method not in ("fast", "direct"):
            raise ValidationError(f"unknown method {self.method!r}")
        return self


def load_schema(name: str) -> dict:
    """JSON schema shipped with the package, e.g. ``load_schema("run_report")``."""
    text = resources.files("goldbach_lab").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _parse_int(token: str) -> int:
    m = re.fullmatch(r"\s*(\d+)\s*\^\s*(\d+)\s*", token)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    try:
        return int(float(token)) if "e" in token.lower() else int(token)
    except ValueError:
        raise ValidationError(f"not an integer: {token!r}") from None


def parse_n_list(text: str) -> list:
    """Parse ``256,512`` or ``2^8..2^14`` (expanded dyadically) or a mix."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if ".." in part:
            lo, hi = (_parse_int(t) for t in part.split("..", 1))
            if lo < 1 or hi < lo:
                raise ValidationError(f"bad range {part!r}")
            while lo <= hi:
                out.append(lo)
                lo *= 2
        else:
            out.append(_parse_int(part))
    return out


@contextmanager
def _open_out(path):
    if path in ("-", None):
        buf = io.StringIO()
        yield buf
        sys.stdout.write(buf.getvalue())
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit_json(path, obj):
    with _open_out(path) as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _emit_csv(path, header, rows):
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


class _Runner:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.kind = WeightKind.parse(cfg.weight)
        self.cache = Cache.from_env(cfg.cache_dir)

    def table(self, n_max):
        build = lambda: build_table(self.kind, n_max)  # noqa: E731
        return self.cache.table(self.kind, n_max, build) if self.cache else build()

    def series(self, n_max):
        method = goldbach.Method(self.cfg.method)
        compute = goldbach.goldbach_fast if method is goldbach.Method.FAST else goldbach.goldbach_direct
        build = lambda: compute(self.table(n_max - 1), n_max)  # noqa: E731
        if self.cache:
            return self.cache.series(self.kind, method, n_max, build)
        return build()

    def contour_table(self):
        L = max(circle.truncation_length(N, self.cfg.epsilon) for N in self.cfg.N_list)
        return self.table(max(L, max(self.cfg.N_list)))

    # commands ------------------------------------------------------------

    def sieve(self):
        cfg = self.cfg
        t = self.table(cfg.n_max)
        if cfg.format == "csv":
            _emit_csv(cfg.out_path, ["n", "weight"],
                      ((n, float(t.coefficients[n])) for n in range(1, t.n_max + 1)))
        else:
            _emit_json(cfg.out_path, {"kind": self.kind.name.lower(), "n_max": t.n_max,
                                      "psi": partial_sum(t, t.n_max),
                                      "support_size": int(np.count_nonzero(t.values))})
        return EXIT_OK

    def goldbach(self):
        cfg = self.cfg
        summ = goldbach.summatory(self.series(cfg.n_max), cfg.c)
        if cfg.format == "csv":
            if cfg.out_path in ("-", None):
                _emit_csv("-", ["n", "G", "S", "E"],
                          ((n, float(summ.g[n]), float(summ.s[n]), float(summ.e[n]))
                           for n in range(1, summ.n_max + 1)))
            else:
                goldbach.write_summatory_csv(cfg.out_path, summ)
        else:
            _emit_json(cfg.out_path, {
                "weight": self.kind.name.lower(), "method": cfg.method, "n_max": summ.n_max,
                "c": summ.c, "S": float(summ.s[-1]), "E": float(summ.e[-1]),
                "max_abs_E": float(np.max(np.abs(summ.e))),
            })
        return EXIT_OK

    summatory = goldbach

    def fit(self):
        cfg = self.cfg
        summ = goldbach.summatory(self.series(cfg.n_max), cfg.c)
        samples = fit.dyadic_samples(summ.e, cfg.x_min, cfg.n_max)
        if cfg.format == "csv":
            _emit_csv(cfg.out_path, ["x", "absE"], samples.pairs)
        else:
            _emit_json(cfg.out_path, fit.fit_report(fit.fit_exponent(samples)))
        return EXIT_OK

    def contour(self):
        cfg = self.cfg
        table = self.contour_table()
        summaries = []
        for N in cfg.N_list:
            L = circle.truncation_length(N, cfg.epsilon)
            M = cfg.nodes_override or kernel.quadrature_nodes(N, L)
            sv = circle.eval_series_on_grid(table, circle.make_grid(N, M, cfg.delta), L)
            if cfg.format == "csv":
                path = cfg.out_path
                if len(cfg.N_list) > 1 and path not in ("-", None):
                    p = Path(path)
                    path = str(p.with_name(f"{p.stem}_N{N}{p.suffix}"))
                with _open_out(path) as fh:
                    circle.write_contour_csv(fh, sv, cfg.delta)
            else:
                sq = circle.square_residual(sv, cfg.delta)
                root = circle.root_residual(sv, cfg.delta)
                summaries.append({
                    "N": N, "M": M, "L": L, "delta": cfg.delta, "tail_bound": sv.tail_bound,
                    "major_nodes": sv.grid.major_count,
                    "square_residual_major_max": sq.major_max,
                    "square_residual_max": sq.overall_max,
                    "root_residual_max": root.major_max,
                })
        if cfg.format == "json":
            _emit_json(cfg.out_path, summaries[0] if len(summaries) == 1 else summaries)
        return EXIT_OK

    def _batch(self, rows):
        cfg = self.cfg
        if cfg.format == "csv":
            header = list(rows[0])
            _emit_csv(cfg.out_path, header, ([r[k] for k in header] for r in rows))
        else:
            _emit_json(cfg.out_path, rows[0] if len(rows) == 1 else rows)
        return EXIT_OK

    def arcs(self):
        cfg = self.cfg
        table = self.contour_table()
        rows = [kernel.run_report(table, N, cfg.delta, cfg.epsilon, cfg.nodes_override)
                for N in cfg.N_list]
        return self._batch(rows)

    def parseval(self):
        cfg = self.cfg
        table = self.contour_table()
        rows = []
        for N in cfg.N_list:
            r = kernel.parseval_check(table, N, cfg.nodes_override, cfg.epsilon)
            rows.append({"N": r.N, "M": r.M, "L": r.L, "lhs": r.lhs, "rhs": r.rhs,
                         "tail_bound": r.tail_bound, "constant_term": r.constant_term,
                         "ratio": r.ratio})
        return self._batch(rows)

    def report(self):
        cfg = self.cfg
        table = self.contour_table()
        result = build_report(table, cfg.N_list, cfg.delta, cfg.epsilon, cfg.nodes_override,
                              self.kind)
        _emit_json(cfg.out_path, result)
        return EXIT_OK if result["passed"] else EXIT_CHECK_FAILED


def build_report(table, N_list, delta, epsilon, nodes=None, kind=WeightKind.VON_MANGOLDT):
    """Run every per-N identity and cross-N growth check; returns a JSON-ready dict."""
    checks = []

    def check(name, value, bound, passed):
        checks.append({"name": name, "value": float(value), "bound": float(bound),
                       "passed": bool(passed)})

    runs, decs = [], []
    for N in N_list:
        dec = kernel.arc_decomposition(table, N, delta, epsilon, nodes)
        par = kernel.parseval_check(table, N, epsilon=epsilon)
        decs.append(dec)
        runs.append(kernel.run_record(dec, par, kernel.minor_kernel_l2(N, delta, dec.M)))
        err = abs(dec.psi_extracted - dec.psi_reference)
        check(f"extraction N={N}", err, epsilon + 1e-8 * N, err <= epsilon + 1e-8 * N)
        err = abs(dec.total.real - (dec.psi_reference - N))
        check(f"decomposition N={N}", err, epsilon + 1e-7 * N, err <= epsilon + 1e-7 * N)
        bound = 1e-8 * (1 + abs(dec.total))
        check(f"reality N={N}", abs(dec.total.imag), bound, abs(dec.total.imag) <= bound)
        R, T = circle.radius(N), circle.major_threshold(N, delta)
        rel = abs(abs(1 - R * np.exp(1j * dec.t0)) - T) / T
        check(f"t0 root N={N}", rel, 1e-10, rel <= 1e-10)
        dev = abs(par.ratio - 1)
        band = 1e-6 + par.tail_bound
        check(f"parseval N={N}", dev, band, dev <= band)

    if len(N_list) >= 3:
        f = kernel.major_arc_bound_check(decs)
        b = 1 - delta / 3 + 0.15
        check("major arc slope", f.slope, b, f.slope <= b)
        f = kernel.minor_arc_bound_check(decs)
        b = 1 - delta / 6 + 0.15
        check("minor arc slope", f.slope, b, f.slope <= b)
        if kind is WeightKind.VON_MANGOLDT:
            f = kernel.total_bound_check(decs)
            check("psi(N) - N slope", f.slope, b, f.slope <= b)
        norm = [r["kernel_l2_minor"] / r["N"] ** (1 - delta / 3) for r in runs]
        ratio = max(norm) / min(norm)
        check("kernel L2 ratio", ratio, 20.0, ratio <= 20.0)
    return {
        "weight": kind.name.lower(), "delta": delta, "epsilon": epsilon,
        "runs": runs, "checks": checks, "passed": all(c["passed"] for c in checks),
    }


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        config.validate()
        return getattr(_Runner(config), config.command)()
    except CapacityError as exc:
        log.error("%s", exc)
        return EXIT_CAPACITY
    except (GoldbachLabError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="goldbach-lab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--weight", default="von_mangoldt", choices=("von_mangoldt", "unit"))
    p.add_argument("--nmax", type=_parse_int, default=2**20, dest="n_max")
    p.add_argument("--N", type=parse_n_list, default=[], dest="N_list",
                   help="comma list and/or dyadic ranges, e.g. 2^8..2^14")
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--nodes", type=_parse_int, default=None, dest="nodes_override")
    p.add_argument("--out", default="-", dest="out_path")
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--c", type=float, default=0.5, help="main-term constant in E = S - c x^2")
    p.add_argument("--xmin", type=_parse_int, default=1024, dest="x_min")
    p.add_argument("--method", choices=("fast", "direct"), default="fast")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    opts = vars(args)
    opts.pop("verbose")
    return run(RunConfig(**opts))


if __name__ == "__main__":
    sys.exit(main())
