"""Parameter sweeps toward the divergence curve, exponent fits and output.

A sweep samples points at prescribed distances from a target point of the
divergence curve.  Distance is Euclidean in the (lambda, mu) plane.  Each
row carries the thermal observables and the dominant-mode fractions; a
point outside the equilibrium region yields a row with NaN values and an
error message instead of aborting the sweep.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .boundary import RegionCase, classify, divergence_lambda, triple_point
from .errors import InsufficientData, InvalidParameters, TwoWellError
from .model import ModelParams
from .thermo import DEFAULT_CAP, BathParams, dominant_mode, thermal_observables


class PathKind(enum.Enum):
    FIXED_MU_VARY_LAMBDA = "fixed-mu"
    FIXED_LAMBDA_VARY_MU = "fixed-lambda"
    ALONG_CASE_BOUNDARY = "case-boundary"
    RAY_TO_POINT = "ray"


@dataclass(frozen=True)
class SweepSpec:
    """What to sample.

    ``mu_d`` picks the target point (mu_D, lambda_D) of the divergence curve;
    the case-boundary path always targets the triple point and walks down
    the line lambda = lambda_c.  ``angle`` is the direction, in radians, from
    the target to the sampled points for the ray path.
    """

    gamma: float
    beta: float
    path: PathKind
    mu_d: float = -2.0
    start: float = 1e-1
    end: float = 1e-3
    points: int = 10
    log_spacing: bool = True
    angle: float = 5.0 * math.pi / 4.0
    tol: float = 1e-7
    m_cap: int = DEFAULT_CAP

    def __post_init__(self):
        if int(self.points) != self.points or self.points < 2:
            raise InvalidParameters(f"points must be an integer >= 2, got {self.points!r}")
        if not (self.start > 0 and self.end > 0):
            raise InvalidParameters("start and end distances must be positive")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise InvalidParameters(f"beta must be finite and > 0, got {self.beta!r}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise InvalidParameters(f"gamma must be finite and >= 0, got {self.gamma!r}")

    def target(self) -> tuple[float, float]:
        """(lambda_D, mu_D) approached by the sweep."""
        if self.path is PathKind.ALONG_CASE_BOUNDARY:
            return triple_point(self.gamma)
        bp = divergence_lambda(self.mu_d, self.gamma)
        return bp.lambda_d, bp.mu_d

    def distances(self) -> np.ndarray:
        if self.log_spacing:
            return np.geomspace(self.start, self.end, int(self.points))
        return np.linspace(self.start, self.end, int(self.points))

    def point(self, d: float) -> tuple[float, float]:
        lam_d, mu_d = self.target()
        if self.path is PathKind.FIXED_MU_VARY_LAMBDA:
            return lam_d - d, mu_d
        if self.path in (PathKind.FIXED_LAMBDA_VARY_MU, PathKind.ALONG_CASE_BOUNDARY):
            return lam_d, mu_d - d
        return lam_d + d * math.cos(self.angle), mu_d + d * math.sin(self.angle)


@dataclass(frozen=True)
class SweepRow:
    lambda_: float
    mu: float
    distance: float
    m_mean: float
    energy: float
    interaction: float
    current: float
    hop: float
    imbalance: float
    n: float
    n_perp: float
    case: str
    m_ax: int
    error: str = ""


#: CSV / JSON column names, in output order.
COLUMNS = tuple("lambda" if f.name == "lambda_" else f.name for f in fields(SweepRow))
_FLOAT_COLUMNS = ("lambda", "mu", "distance", "m_mean", "energy", "interaction", "current",
                  "hop", "imbalance", "n", "n_perp")


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float


def evaluate_point(gamma: float, beta: float, lam: float, mu: float, distance: float,
                   tol: float = 1e-7, m_cap: int = DEFAULT_CAP) -> SweepRow:
    """One sweep row; library errors become an error marker."""
    nan = math.nan
    try:
        params = ModelParams(gamma, lam)
        case = classify(lam, mu, gamma).label.value
        obs = thermal_observables(params, BathParams(beta, mu), tol=tol, m_cap=m_cap)
        mode = dominant_mode(obs)
    except TwoWellError as exc:
        try:
            case = classify(lam, mu, gamma).label.value
        except TwoWellError:
            case = RegionCase.NON_EQUILIBRIUM.value
        return SweepRow(lam, mu, distance, nan, nan, nan, nan, nan, nan, nan, nan, case, 0,
                        f"{type(exc).__name__}: {exc}")
    return SweepRow(lam, mu, distance, obs.m_mean, obs.energy, obs.interaction, obs.current,
                    obs.hop, obs.imbalance, mode.n, mode.n_perp, case, obs.m_ax)


def _evaluate(args) -> SweepRow:
    return evaluate_point(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """Evaluate every point of the sweep; rows come back in sampling order."""
    tasks = []
    for d in spec.distances():
        lam, mu = spec.point(float(d))
        tasks.append((spec.gamma, spec.beta, lam, mu, float(d), spec.tol, spec.m_cap))
    if jobs <= 1 or len(tasks) <= 1:
        return [_evaluate(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate, tasks))


def fit_exponent(rows: list[SweepRow], field: str, distance: str = "distance") -> FitResult:
    """Least-squares slope of log(field) against log(distance)."""
    xs, ys = [], []
    for row in rows:
        if row.error:
            continue
        x, y = _get(row, distance), _get(row, field)
        if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y):
            xs.append(math.log(x))
            ys.append(math.log(y))
    if len(xs) < 5:
        raise InsufficientData(f"need at least 5 rows with positive {field!r} and "
                               f"{distance!r}, got {len(xs)}")
    x, y = np.array(xs), np.array(ys)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return FitResult(float(slope), float(intercept), r2)


def _get(row: SweepRow, name: str):
    return getattr(row, "lambda_" if name == "lambda" else name)


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def format_rows(rows: list[SweepRow], fmt: str = "csv", comment: str | None = None) -> str:
    """Serialize rows; the CSV form may start with '#' comment lines."""
    if fmt == "csv":
        buf = io.StringIO()
        if comment:
            for line in comment.splitlines():
                buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([_fmt(_get(row, c)) for c in COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        records = []
        for row in rows:
            items = []
            for c in COLUMNS:
                v = _get(row, c)
                if isinstance(v, float):
                    text = _fmt(v) if math.isfinite(v) else "null"
                else:
                    text = json.dumps(v)
                items.append(f"{json.dumps(c)}: {text}")
            records.append("  {" + ", ".join(items) + "}")
        return "[\n" + ",\n".join(records) + ("\n" if records else "") + "]\n"
    raise InvalidParameters(f"unknown output format {fmt!r}")


def emit(rows: list[SweepRow], fmt: str, destination, comment: str | None = None) -> None:
    """Write rows to a path or an open text stream."""
    text = format_rows(rows, fmt, comment)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _parse_value(column: str, text):
    if column in _FLOAT_COLUMNS:
        return math.nan if text is None else float(text)
    if column == "m_ax":
        return int(text)
    return text


def parse_rows(text: str, fmt: str = "csv") -> list[SweepRow]:
    """Inverse of :func:`format_rows`."""
    if fmt == "csv":
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        reader = csv.reader(lines)
        header = next(reader, None)
        if header is None:
            return []
        records = [dict(zip(header, rec)) for rec in reader]
    elif fmt == "json":
        records = json.loads(text)
    else:
        raise InvalidParameters(f"unknown input format {fmt!r}")
    rows = []
    for rec in records:
        values = [_parse_value(c, rec.get(c)) for c in COLUMNS]
        rows.append(SweepRow(*values))
    return rows


def read_rows(path: str, fmt: str | None = None) -> list[SweepRow]:
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "csv"
    with open(path, encoding="utf-8") as fh:
        return parse_rows(fh.read(), fmt)
