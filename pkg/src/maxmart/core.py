"""Azema-Yor martingales of a path and its running maximum, minimum or local time.

All three variants share one evaluator.  Each variant supplies a driver pair
``(x, y)`` living in ``D = {y >= max(x, 0)}`` and the increment ``dX`` that the
stochastic integral runs against:

==========  ======================  ===================
variant     (x, y)                  dX
==========  ======================  ===================
max         (B, max B)              dB
min         (-B, -min B)            -dB
local_time  (L - |B|, L)            -sgn(B) dB
==========  ======================  ===================

so that ``H = F(y) - f(y) (y - x) + c`` covers every case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StateError
from .functions import RealFunction
from .paths import Path

VARIANTS = ("max", "min", "local_time")


@dataclass(frozen=True)
class MaxMartingaleSpec:
    variant: str
    f: RealFunction
    c: float = 0.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}")
        if not math.isfinite(self.c):
            raise DomainError("initial value c must be finite")

    def to_dict(self) -> dict:
        return {"variant": self.variant, "f": self.f.to_dict(), "c": self.c}

    @classmethod
    def from_dict(cls, desc: dict) -> "MaxMartingaleSpec":
        return cls(desc.get("variant", "max"), RealFunction.from_dict(desc["f"]), float(desc.get("c", 0.0)))


@dataclass(frozen=True)
class MartingaleSeries:
    dt: float
    values: np.ndarray
    form: str  # direct | integral
    warning: str | None = None


def positive_form(f: RealFunction) -> MaxMartingaleSpec:
    """``H(x, y) = ||f|| - F(y) + f(y) (y - x)``: nonnegative for ``f >= 0``."""
    norm = f.total_integral()
    if not math.isfinite(norm):
        raise DomainError("positive form needs an integrable f")
    return MaxMartingaleSpec("max", f.scaled(-1.0), norm)


def f_on_driver(f: RealFunction, y: np.ndarray) -> np.ndarray:
    """``f(y)`` where ``y = 0`` entries of a singular ``f`` contribute 0.

    The driver maximum is positive for every ``t > 0`` in continuous time; on a
    grid it can sit at 0, where a singular ``f`` is not evaluated.
    """
    y = np.asarray(y, dtype=float)
    if not f.singular_at_zero:
        return np.asarray(f(y), dtype=float)
    out = np.zeros_like(y)
    pos = y > 0
    out[pos] = f(y[pos])
    return out


def h_of(spec: MaxMartingaleSpec, x, y) -> np.ndarray:
    """Vectorized ``F(y) - f(y) (y - x) + c`` on driver coordinates (no domain check)."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    gap = y - x
    big_f = spec.f.antiderivative(y)
    if spec.f.kind == "constant":
        # F(y) - v (y - x) is v x; computing it that way keeps f = 1 bit-equal to the driver
        v = spec.f.scale * spec.f.params["value"]
        return np.where(gap == 0, big_f, v * x) + spec.c
    fy = f_on_driver(spec.f, y)
    # the diagonal never touches f, so H(y, y) = F(y) + c exactly
    term = np.where(gap == 0, 0.0, fy * gap)
    return big_f - term + spec.c


def h_value(spec: MaxMartingaleSpec, x, y):
    """``H(x, y) = F(y) - f(y) (y - x) + c`` on ``D``."""
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.any(ya < np.maximum(xa, 0.0)):
        raise DomainError("(x, y) must lie in D = {y >= max(x, 0)}")
    if spec.f.singular_at_zero and np.any((ya == 0) & (xa < 0)):
        raise DomainError("H is undefined at y = 0, x < 0 for a singular f")
    out = h_of(spec, xa, ya)
    return float(out) if np.ndim(out) == 0 else out


def drivers(spec: MaxMartingaleSpec, path: Path):
    """Return ``(x, y, dX)`` for the spec's variant along ``path``."""
    b = path.values
    if spec.variant == "max":
        return b, path.running_max, np.diff(b)
    if spec.variant == "min":
        return -b, path.running_min, -np.diff(b)
    if path.local_time is None:
        raise StateError("local_time variant needs a path with local_time populated")
    lt = path.local_time
    return lt - np.abs(b), lt, -np.sign(b[:-1]) * np.diff(b)


def evaluate_direct(spec: MaxMartingaleSpec, path: Path) -> MartingaleSeries:
    x, y, _ = drivers(spec, path)
    values = h_of(spec, x, y)
    values[0] = spec.c
    values.flags.writeable = False
    return MartingaleSeries(path.dt, values, "direct")


def evaluate_integral(spec: MaxMartingaleSpec, path: Path) -> MartingaleSeries:
    """Left-endpoint Ito sums ``c + sum f(y_i) dX_i``."""
    _, y, dx = drivers(spec, path)
    fy = f_on_driver(spec.f, y[:-1])
    warning = None
    if not np.all(np.isfinite(fy)):
        warning = "f is not finite on the realized driver range"
    elif spec.f.singular_at_zero and np.any(y[:-1] == 0):
        warning = "singular f skipped at nodes where the driver maximum is 0"
    values = spec.c + np.concatenate([[0.0], np.cumsum(fy * dx)])
    values.flags.writeable = False
    return MartingaleSeries(path.dt, values, "integral", warning)


def terminal_limit(spec: MaxMartingaleSpec) -> float:
    """Almost-sure limit ``F(inf) + c`` for ``f >= 0`` integrable."""
    total = spec.f.total_integral()
    if not math.isfinite(total):
        raise DomainError("terminal limit needs an integrable f")
    return total + spec.c


def series_table(spec: MaxMartingaleSpec, path: Path) -> np.ndarray:
    """Columns ``t, H_direct, H_integral, driver, running_max_of_H``."""
    direct = evaluate_direct(spec, path).values
    integral = evaluate_integral(spec, path).values
    return np.column_stack([path.times, direct, integral, path.values, np.maximum.accumulate(direct)])


def write_series_csv(spec: MaxMartingaleSpec, path: Path, file) -> None:
    np.savetxt(file, series_table(spec, path), delimiter=",",
               header="t,H_direct,H_integral,driver,running_max_of_H", comments="", fmt="%.17g")
