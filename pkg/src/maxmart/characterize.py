"""Recovering ``f`` from an observed martingale, and testing whether a tabulated
``H`` on ``D`` has the Azema-Yor form ``F(y) - f(y) (y - x) + c``."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from .core import MartingaleSeries, MaxMartingaleSpec, drivers, evaluate_direct, h_value
from .errors import DomainError, InsufficientDataError
from .functions import RealFunction, tabulated
from .paths import Path, simulate_bm


# -- recovery of f from covariation -------------------------------------------------

@dataclass
class RecoveryAccumulator:
    """Per-bin sums of ``dH dX`` and ``dX**2``; merging is plain addition."""

    lefts: np.ndarray
    width: float
    cross: np.ndarray = None
    quad: np.ndarray = None
    count: np.ndarray = None

    def __post_init__(self):
        self.lefts = np.asarray(self.lefts, dtype=float)
        k = self.lefts.size
        if self.cross is None:
            self.cross, self.quad = np.zeros(k), np.zeros(k)
            self.count = np.zeros(k, dtype=np.int64)

    def add(self, dh: np.ndarray, dx: np.ndarray, level: np.ndarray) -> None:
        for j, left in enumerate(self.lefts):
            sel = (level >= left) & (level < left + self.width) & (dx != 0)
            self.cross[j] += np.dot(dh[sel], dx[sel])
            self.quad[j] += np.dot(dx[sel], dx[sel])
            self.count[j] += np.count_nonzero(sel)

    def merge(self, other: "RecoveryAccumulator") -> "RecoveryAccumulator":
        return RecoveryAccumulator(self.lefts, self.width, self.cross + other.cross,
                                   self.quad + other.quad, self.count + other.count)

    def estimates(self) -> np.ndarray:
        empty = np.flatnonzero(self.count == 0)
        if empty.size:
            j = empty[0]
            raise InsufficientDataError(
                f"no steps with driver level in [{self.lefts[j]}, {self.lefts[j] + self.width})",
                occupancy=int(self.count[j]))
        return self.cross / self.quad


def recovery_increments(variant: str, path: Path, series: MartingaleSeries):
    """``(dH, dX, level)`` per step, the level being the driver's running statistic."""
    spec = MaxMartingaleSpec(variant, _ZERO)
    _, y, dx = drivers(spec, path)
    return np.diff(series.values), dx, y[:-1]


_ZERO = RealFunction("constant", {"value": 0.0})


def recover_f_table(pairs: Iterable[tuple[Path, MartingaleSeries]], lefts, bin_width: float,
                    variant: str = "max") -> RecoveryAccumulator:
    """Accumulate covariation sums over ``(path, series)`` pairs for several bins.

    ``pairs`` may be a generator, so batches larger than memory stream through.
    """
    if not bin_width > 0:
        raise DomainError("bin_width must be positive")
    acc = RecoveryAccumulator(lefts, bin_width)
    for path, series in pairs:
        if series.values.size != path.n_nodes:
            raise DomainError("series does not match its path")
        acc.add(*recovery_increments(variant, path, series))
    return acc


def recover_f(paths: Iterable[Path], series: Iterable[MartingaleSeries], x_probe: float,
              bin_width: float, variant: str = "max") -> float:
    """Estimate ``f(x_probe)`` as ``sum dH dX / sum dX**2`` over steps whose
    running statistic lies in ``[x_probe, x_probe + bin_width)``.

    For ``local_time`` the increment is ``-sgn(B) dB`` and the level is ``L``.
    """
    acc = recover_f_table(zip(paths, series), [x_probe], bin_width, variant)
    return float(acc.estimates()[0])


def recovery_row(index: int, root: int, spec: MaxMartingaleSpec, lefts, bin_width: float,
                 horizon: float, dt: float) -> np.ndarray:
    """Per-bin ``(cross, quad, count)`` sums for path ``index``, concatenated."""
    path = simulate_bm((root, index), horizon, dt)
    acc = RecoveryAccumulator(lefts, bin_width)
    acc.add(*recovery_increments(spec.variant, path, evaluate_direct(spec, path)))
    return np.concatenate([acc.cross, acc.quad, acc.count])


def recover_batch(spec: MaxMartingaleSpec, n: int, seed: int, lefts, bin_width: float,
                  horizon: float = 1.0, dt: float = 1e-4, jobs: int = 1) -> RecoveryAccumulator:
    """Simulate ``n`` paths, evaluate ``spec`` on each and pool the covariation sums."""
    from .sampling import map_paths

    lefts = np.asarray(lefts, dtype=float)
    rows = map_paths(recovery_row, n, jobs, root=seed, spec=spec, lefts=lefts, bin_width=bin_width,
                     horizon=horizon, dt=dt)
    k = lefts.size
    tot = rows.sum(axis=0)
    return RecoveryAccumulator(lefts, bin_width, tot[:k], tot[k:2 * k], tot[2 * k:].astype(np.int64))


# -- tabulated H and the detector -----------------------------------------------------

@dataclass(frozen=True)
class GridFunction:
    """``H`` tabulated at ``(x_grid[j], y_grid[i])``; ``values[i, j]`` is NaN outside D."""

    x_grid: np.ndarray
    y_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xg, yg = np.asarray(self.x_grid, float), np.asarray(self.y_grid, float)
        vals = np.asarray(self.values, float)
        if xg.ndim != 1 or yg.ndim != 1 or vals.shape != (yg.size, xg.size):
            raise DomainError("values must have shape (len(y_grid), len(x_grid))")
        if np.any(np.diff(xg) <= 0) or np.any(np.diff(yg) <= 0) or np.any(yg < 0):
            raise DomainError("grids must be strictly increasing, y_grid nonnegative")
        outside = yg[:, None] < np.maximum(xg[None, :], 0.0)
        vals = np.where(outside, np.nan, vals)
        object.__setattr__(self, "x_grid", xg)
        object.__setattr__(self, "y_grid", yg)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, h, x_grid, y_grid) -> "GridFunction":
        xg, yg = np.asarray(x_grid, float), np.asarray(y_grid, float)
        X, Y = np.meshgrid(xg, yg)
        inside = Y >= np.maximum(X, 0.0)
        vals = np.full(X.shape, np.nan)
        vals[inside] = h(X[inside], Y[inside])
        return cls(xg, yg, vals)

    @classmethod
    def from_spec(cls, spec: MaxMartingaleSpec, x_grid, y_grid) -> "GridFunction":
        """Tabulate ``h_value``; cells where it is undefined stay NaN."""
        def h(x, y):
            out = np.full(x.shape, np.nan)
            ok = ~(spec.f.singular_at_zero & (y == 0) & (x < 0))
            out[ok] = h_value(spec, x[ok], y[ok])
            return out
        return cls.from_callable(h, x_grid, y_grid)

    def to_csv(self, file) -> None:
        """Rows ``y``, columns ``x``; empty cells outside D (or undefined).

        ``file`` is a path or a text handle.
        """
        if not hasattr(file, "write"):
            with open(file, "w", newline="") as fh:
                return self.to_csv(fh)
        w = csv.writer(file, lineterminator="\n")
        w.writerow(["y\\x"] + [repr(float(x)) for x in self.x_grid])
        for y, row in zip(self.y_grid, self.values):
            w.writerow([repr(float(y))] + ["" if np.isnan(v) else repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, file) -> "GridFunction":
        if not hasattr(file, "read"):
            with open(file, newline="") as fh:
                return cls.from_csv(fh)
        rows = [r for r in csv.reader(file) if r]
        if len(rows) < 2:
            raise DomainError("grid CSV needs a header and at least one row")
        x_grid = [float(v) for v in rows[0][1:]]
        y_grid, vals = [], []
        for r in rows[1:]:
            y_grid.append(float(r[0]))
            cells = r[1:] + [""] * (len(x_grid) - len(r) + 1)
            vals.append([float(v) if v.strip() else np.nan for v in cells])
        return cls(np.array(x_grid), np.array(y_grid), np.array(vals))


@dataclass(frozen=True)
class GridSpec:
    """Uniform y-grid on ``[0, y_max]`` and an x-grid covering ``[x_min, y_max]``
    that contains every y node, so each column has its diagonal point."""

    y_max: float = 2.0
    n_y: int = 40
    x_min: float = -2.0
    n_x_negative: int = 20

    def grids(self):
        y = np.linspace(0.0, self.y_max, self.n_y + 1)
        x_neg = np.linspace(self.x_min, 0.0, self.n_x_negative + 1)
        return np.union1d(x_neg, y), y


@dataclass
class DetectionReport:
    is_ay: bool
    f_table: RealFunction
    c_hat: float
    residual_max: float
    bad_column_fraction: float
    diagonal_ok: bool
    bad_columns: list = field(default_factory=list)
    excluded_columns: list = field(default_factory=list)
    f_error_max: float | None = None

    def to_json(self) -> str:
        d = asdict(self)
        d["f_table"] = self.f_table.to_dict()
        return json.dumps(d, indent=2)


def _fit_line(x: np.ndarray, v: np.ndarray):
    """Least-squares ``v ~ a + s x``; returns ``(a, s, max |residual|)``."""
    A = np.column_stack([np.ones_like(x), x])
    (a, s), *_ = np.linalg.lstsq(A, v, rcond=None)
    return a, s, float(np.max(np.abs(v - (a + s * x))))


def detect_ay_form(h: GridFunction, tol: float = 1e-8, max_bad_columns: int = 1) -> DetectionReport:
    """Decide whether ``h`` is ``F(y) - f(y) (y - x) + c`` on its grid.

    Per column ``y``: a least-squares line through the off-diagonal cells gives
    ``f(y)`` as its slope; the column is bad when the fit residual exceeds
    ``tol``.  ``F`` is read off the diagonal, ``H(y, y) - c``, and must agree
    with the trapezoid integral of the fitted slopes between neighbouring good
    columns, up to the trapezoid's own error ``h |delta f| / 2`` (which admits a
    jump of ``f``).  The diagonal must sit on every good column's line.
    ``c`` is the ``(0, 0)`` cell.  At most ``max_bad_columns`` bad columns are
    tolerated, the grid counterpart of a null exceptional set.
    """
    xg, yg, vals = h.x_grid, h.y_grid, h.values
    if yg.size < 2:
        raise DomainError("need at least two y columns")
    j0 = np.flatnonzero(xg == 0.0)
    if yg[0] != 0.0 or j0.size == 0 or np.isnan(vals[0, j0[0]]):
        raise DomainError("grid must contain a defined (0, 0) cell")
    c_hat = float(vals[0, j0[0]])

    slopes, inter, resid, diag = {}, {}, {}, {}
    excluded = []
    for i, y in enumerate(yg):
        jd = np.flatnonzero(xg == y)
        row = vals[i]
        off = np.isfinite(row) & (xg < y)
        if jd.size == 0 or not np.isfinite(row[jd[0]]) or np.count_nonzero(off) < 2:
            excluded.append(float(y))
            continue
        a, s, r = _fit_line(xg[off], row[off])
        slopes[i], inter[i], resid[i] = s, a, r
        diag[i] = float(row[jd[0]])
    fitted = sorted(slopes)
    if len(fitted) < 2:
        raise DomainError("degenerate grid: fewer than two usable columns")

    bad = {i for i in fitted if resid[i] > tol}
    good = [i for i in fitted if i not in bad]
    diag_res = {i: abs(inter[i] + slopes[i] * yg[i] - diag[i]) for i in good}
    diagonal_ok = all(d <= tol for d in diag_res.values())

    # F increments along the diagonal against the integral of the slopes
    for prev, cur in zip(good, good[1:]):
        span = yg[cur] - yg[prev]
        dF = diag[cur] - diag[prev]
        trap = span * (slopes[prev] + slopes[cur]) / 2
        if abs(dF - trap) > tol + span * abs(slopes[cur] - slopes[prev]) / 2:
            bad.add(cur)
    # diagonal cells of affinity-bad columns must still lie on F
    for i in sorted(bad - set(good)):
        left = [g for g in good if g < i]
        right = [g for g in good if g > i]
        if left and right:
            lo, hi = left[-1], right[0]
            span = yg[i] - yg[lo]
            slope_i = np.interp(yg[i], [yg[lo], yg[hi]], [slopes[lo], slopes[hi]])
            trap = span * (slopes[lo] + slope_i) / 2
            if abs(diag[i] - diag[lo] - trap) > tol + span * abs(slopes[hi] - slopes[lo]) / 2:
                diagonal_ok = False

    residual_max = max([resid[i] for i in good] + list(diag_res.values()) + [0.0])
    bad_frac = len(bad) / len(fitted)
    ok_cols = [i for i in fitted if i not in bad]
    ys = np.array([yg[i] for i in ok_cols])
    fs = np.array([slopes[i] for i in ok_cols])
    if ys.size and ys[0] > 0:
        ys, fs = np.concatenate([[0.0], ys]), np.concatenate([[fs[0]], fs])
    if ys.size >= 2:
        f_table = tabulated(ys, fs)
    else:
        fill = float(fs[0]) if fs.size else 0.0
        f_table = tabulated([0.0, 1.0], [fill, fill])
    is_ay = bool(residual_max <= tol and len(bad) <= max_bad_columns and diagonal_ok)
    return DetectionReport(is_ay, f_table, c_hat, float(residual_max), float(bad_frac), bool(diagonal_ok),
                           [float(yg[i]) for i in sorted(bad)], excluded)


def round_trip(f: RealFunction, grid_spec: GridSpec = GridSpec(), c: float = 0.0,
               tol: float = 1e-8) -> DetectionReport:
    """Tabulate ``h_value`` for ``f`` and run the detector on it.

    ``f_error_max`` is the largest ``|f_hat - f|`` over the fitted columns with
    ``y > 0`` (``y = 0`` is skipped for a singular ``f``).
    """
    spec = MaxMartingaleSpec("max", f, c)
    x_grid, y_grid = grid_spec.grids()
    report = detect_ay_form(GridFunction.from_spec(spec, x_grid, y_grid), tol)
    ys = np.array([y for y in y_grid if y not in report.excluded_columns and y not in report.bad_columns])
    if f.singular_at_zero:
        ys = ys[ys > 0]
    err = float(np.max(np.abs(report.f_table(ys) - f(ys)))) if ys.size else math.nan
    report.f_error_max = err
    return report
