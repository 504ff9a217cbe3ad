"""Locally integrable functions ``f`` on ``[0, inf)`` and their antiderivatives.

A :class:`RealFunction` is one of a small set of kinds, each with a closed-form
antiderivative ``F(y) = int_0^y f``.  The ``tabulated`` kind is linear
interpolation of data and integrates by adaptive quadrature.  An optional
``scale`` multiplies the whole function; it is how sign-flipped variants such
as the positive supermartingale form are expressed.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericError

KINDS = ("constant", "indicator_below", "exp_decay", "power", "piecewise_linear", "tabulated")

QUAD_ABS_TOL = 1e-10


def _as_table(params, xkey, ykey):
    xs = np.asarray(params[xkey], dtype=float)
    ys = np.asarray(params[ykey], dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
        raise DomainError("table needs matching 1-d x/y arrays with at least two points")
    if xs[0] != 0.0:
        raise DomainError("table grid must start at 0")
    if np.any(np.diff(xs) <= 0):
        raise DomainError("table grid must be strictly increasing")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise DomainError("table entries must be finite")
    return xs, ys


@dataclass(frozen=True)
class RealFunction:
    kind: str
    params: dict = field(default_factory=dict)
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown function kind {self.kind!r}")
        p = self.params
        if not math.isfinite(self.scale):
            raise DomainError("scale must be finite")
        if self.kind == "constant":
            if not math.isfinite(p.get("value", math.nan)):
                raise DomainError("constant needs a finite 'value'")
        elif self.kind == "indicator_below":
            if not p.get("b", -1.0) >= 0:
                raise DomainError("indicator_below needs b >= 0")
        elif self.kind == "exp_decay":
            if not p.get("rate", 0.0) > 0:
                raise DomainError("exp_decay needs rate > 0")
        elif self.kind == "power":
            if not p.get("p", -2.0) > -1:
                raise DomainError("power needs p > -1 for local integrability")
        elif self.kind == "piecewise_linear":
            _as_table(p, "x", "y")
        elif self.kind == "tabulated":
            _as_table(p, "grid", "values")

    # -- construction helpers -------------------------------------------------
    def scaled(self, factor: float) -> "RealFunction":
        return RealFunction(self.kind, dict(self.params), self.scale * factor)

    def to_dict(self) -> dict[str, Any]:
        params = {k: (list(map(float, v)) if isinstance(v, (tuple, list, np.ndarray)) else v)
                  for k, v in self.params.items()}
        out: dict[str, Any] = {"kind": self.kind, "params": params}
        if self.scale != 1.0:
            out["scale"] = self.scale
        return out

    @classmethod
    def from_dict(cls, desc: dict) -> "RealFunction":
        """Build from a JSON descriptor ``{"kind": ..., "params": {...}}``.

        A tabulated descriptor may give ``params.csv`` (path to ``x,f(x)`` rows)
        instead of inline ``grid``/``values``.
        """
        try:
            kind = desc["kind"]
        except (KeyError, TypeError):
            raise DomainError("function descriptor needs a 'kind'") from None
        params = dict(desc.get("params", {}))
        if kind == "tabulated" and "csv" in params:
            return load_tabulated(params["csv"], scale=float(desc.get("scale", 1.0)))
        for key in ("x", "y", "grid", "values"):
            if key in params:
                params[key] = tuple(float(v) for v in params[key])
        return cls(kind, params, float(desc.get("scale", 1.0)))

    # -- properties ------------------------------------------------------------
    @property
    def singular_at_zero(self) -> bool:
        return self.kind == "power" and self.params["p"] < 0 and self.scale != 0.0

    def breakpoints(self) -> np.ndarray:
        if self.kind == "indicator_below":
            return np.array([self.params["b"]])
        if self.kind == "piecewise_linear":
            return np.asarray(self.params["x"], dtype=float)
        if self.kind == "tabulated":
            return np.asarray(self.params["grid"], dtype=float)
        return np.empty(0)

    def is_nonnegative(self) -> bool:
        if self.scale == 0.0:
            return True
        k, p = self.kind, self.params
        if k == "constant":
            return self.scale * p["value"] >= 0
        if k in ("indicator_below", "exp_decay", "power"):
            return self.scale > 0
        vals = np.asarray(p["y"] if k == "piecewise_linear" else p["values"], dtype=float)
        return bool(np.all(self.scale * vals >= 0))

    # -- evaluation ------------------------------------------------------------
    def _raw(self, x: np.ndarray) -> np.ndarray:
        k, p = self.kind, self.params
        if k == "constant":
            return np.full_like(x, p["value"])
        if k == "indicator_below":
            return (x < p["b"]).astype(float)
        if k == "exp_decay":
            return np.exp(-p["rate"] * x)
        if k == "power":
            with np.errstate(divide="ignore"):
                return np.power(x, p["p"])
        if k == "piecewise_linear":
            return np.interp(x, p["x"], p["y"])
        return np.interp(x, p["grid"], p["values"])

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise DomainError("f is defined on [0, inf) only")
        if self.kind == "power" and self.params["p"] < 0 and np.any(arr == 0):
            raise DomainError("power kind with p < 0 has an integrable singularity at 0")
        out = self.scale * self._raw(arr)
        return float(out) if out.ndim == 0 else out

    # -- antiderivative ----------------------------------------------------------
    def _closed_form(self, y: np.ndarray) -> np.ndarray:
        k, p = self.kind, self.params
        if k == "constant":
            return p["value"] * y
        if k == "indicator_below":
            return np.minimum(y, p["b"])
        if k == "exp_decay":
            r = p["rate"]
            return -np.expm1(-r * y) / r
        if k == "power":
            q = p["p"] + 1.0
            return np.power(y, q) / q
        xs, vs = np.asarray(p["x"]), np.asarray(p["y"])
        knots_F = np.concatenate([[0.0], np.cumsum(np.diff(xs) * (vs[1:] + vs[:-1]) / 2)])
        j = np.clip(np.searchsorted(xs, y, side="right") - 1, 0, xs.size - 1)
        v_at = np.interp(y, xs, vs)
        return knots_F[j] + (y - xs[j]) * (vs[j] + v_at) / 2

    def _quadrature(self, y: float) -> float:
        if y == 0.0:
            return 0.0
        bps = self.breakpoints()
        inner = bps[(bps > 0) & (bps < y)]
        func = lambda u: float(self._raw(np.asarray(u, dtype=float)))  # noqa: E731
        kwargs = dict(epsabs=QUAD_ABS_TOL, epsrel=1e-12, limit=max(200, 4 * inner.size + 50))
        if inner.size:
            kwargs["points"] = inner
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(func, 0.0, y, **kwargs)
            except integrate.IntegrationWarning as exc:
                val, err = integrate.quad(func, 0.0, y, **kwargs, full_output=1)[:2]
                raise NumericError(f"quadrature did not converge on [0, {y}]: {exc}", err) from None
        return val

    def antiderivative(self, y, mode: str | None = None):
        """``F(y) = int_0^y f``.  ``mode`` is ``closed_form``, ``quadrature`` or
        ``None`` (closed form where the kind has one)."""
        arr = np.asarray(y, dtype=float)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise DomainError("antiderivative needs y >= 0")
        if mode is None:
            mode = "quadrature" if self.kind == "tabulated" else "closed_form"
        if mode == "closed_form":
            if self.kind == "tabulated":
                raise DomainError("tabulated kind has no closed-form antiderivative")
            out = self._closed_form(arr)
        elif mode == "quadrature":
            # running maxima repeat heavily; integrate each distinct value once
            uniq, inv = np.unique(arr.ravel(), return_inverse=True)
            vals = np.array([self._quadrature(float(v)) for v in uniq])
            out = vals[inv].reshape(arr.shape)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        out = self.scale * out
        return float(out) if np.ndim(out) == 0 else out

    def total_integral(self) -> float:
        """``F(inf)``, or ``math.inf`` when the integral diverges."""
        if not self.is_nonnegative():
            raise DomainError("total integral requires f >= 0")
        if self.scale == 0.0:
            return 0.0
        k, p = self.kind, self.params
        if k == "constant":
            return 0.0 if p["value"] == 0 else math.inf
        if k == "indicator_below":
            return self.scale * p["b"]
        if k == "exp_decay":
            return self.scale / p["rate"]
        if k == "power":
            return math.inf
        xs = np.asarray(p["x"] if k == "piecewise_linear" else p["grid"])
        vs = np.asarray(p["y"] if k == "piecewise_linear" else p["values"])
        if vs[-1] != 0:
            return math.inf
        return self.scale * float(np.sum(np.diff(xs) * (vs[1:] + vs[:-1]) / 2))


# -- constructors ---------------------------------------------------------------

def constant(value: float) -> RealFunction:
    return RealFunction("constant", {"value": float(value)})


def indicator_below(b: float) -> RealFunction:
    """``f(x) = 1`` for ``x < b`` and ``0`` otherwise."""
    return RealFunction("indicator_below", {"b": float(b)})


def exp_decay(rate: float) -> RealFunction:
    return RealFunction("exp_decay", {"rate": float(rate)})


def power(p: float) -> RealFunction:
    return RealFunction("power", {"p": float(p)})


def piecewise_linear(xs, ys) -> RealFunction:
    return RealFunction("piecewise_linear", {"x": tuple(map(float, xs)), "y": tuple(map(float, ys))})


def tabulated(grid, values) -> RealFunction:
    return RealFunction("tabulated", {"grid": tuple(map(float, grid)), "values": tuple(map(float, values))})


def load_tabulated(path, scale: float = 1.0) -> RealFunction:
    """Read ``x,f(x)`` rows (optional header) into a tabulated function."""
    xs, ys = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                x, v = float(row[0]), float(row[1])
            except ValueError:
                continue  # header
            xs.append(x)
            ys.append(v)
    return RealFunction("tabulated", {"grid": tuple(xs), "values": tuple(ys)}, scale)


# -- operation-style entry points -------------------------------------------------

def evaluate(f: RealFunction, x):
    return f(x)


def antiderivative_at(f: RealFunction, y, mode: str | None = None):
    return f.antiderivative(y, mode)


def total_integral(f: RealFunction) -> float:
    return f.total_integral()
