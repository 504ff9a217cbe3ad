"""Monte Carlo verification battery.

Every test returns a :class:`TestReport`.  z-type tests pass when
``|statistic| <= threshold`` (default 4 standard errors); KS-type tests pass
when ``statistic <= threshold`` with the asymptotic ``alpha = 0.01`` critical
value ``1.63``.  Batches are keyed by ``(seed, parameters)`` and cached, so
tests that share a stopping rule and seed reuse one simulation.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, stats

from . import rng, sampling
from .characterize import GridFunction
from .core import MaxMartingaleSpec, h_of
from .errors import DomainError
from .functions import RealFunction

Z_THRESHOLD = 4.0
KS_CRITICAL = 1.63
CENSOR_CAP = 0.01
DT = 1e-4
EXIT_LAW_DT = 1e-5
LEVY_DT = 1e-5


@dataclass
class TestReport:
    __test__ = False  # keep pytest from collecting this class

    name: str
    estimate: float
    reference: float
    std_error: float
    statistic: float
    threshold: float
    n: int
    seed: int
    verdict: str  # pass | fail | inconclusive | skipped
    kind: str = "z"
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def z_stat(samples: np.ndarray, reference: float):
    """``(mean, se, z)`` for the sample mean against ``reference``."""
    n = samples.size
    mean = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    if se > 0:
        z = (mean - reference) / se
    else:
        z = 0.0 if mean == reference else math.copysign(math.inf, mean - reference)
    return mean, se, z


def ks_two_sample_threshold(n: int, m: int) -> float:
    return KS_CRITICAL * math.sqrt((n + m) / (n * m))


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        report = fn(*args, **kwargs)
        report.wall_time = time.perf_counter() - t0
        return report
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- stopping rules and cached batches ---------------------------------------------------

@dataclass(frozen=True)
class ExitInterval:
    lower: float
    upper: float
    horizon: float | None = None

    def __post_init__(self):
        if not (self.lower < 0 < self.upper):
            raise DomainError("exit interval needs lower < 0 < upper")

    @property
    def max_time(self) -> float:
        # P(T > horizon) is of order 1e-5 at 2.5 * width**2
        return self.horizon if self.horizon is not None else max(1.0, 2.5 * (self.upper - self.lower) ** 2)


@dataclass(frozen=True)
class FixedTime:
    t: float


_CACHE: dict = {}
_CACHE_LIMIT = 8


def _cached(key, compute):
    if key not in _CACHE:
        if len(_CACHE) >= _CACHE_LIMIT:
            _CACHE.pop(next(iter(_CACHE)))
        _CACHE[key] = compute()
    return _CACHE[key]


def clear_cache() -> None:
    _CACHE.clear()


def exit_batch(stop: ExitInterval, n: int, seed: int, dt: float = DT, bridge: bool = True,
               jobs: int = 1) -> np.ndarray:
    """Rows ``(kind_code, step, B, max, min, L)`` from :func:`sampling.exit_sample`."""
    key = ("exit", stop.lower, stop.upper, stop.max_time, n, seed, dt, bridge)
    return _cached(key, lambda: sampling.map_paths(
        sampling.exit_sample, n, jobs, root=seed, lower=stop.lower, upper=stop.upper,
        dt=dt, horizon=stop.max_time, bridge=bridge))


def fixed_batch(t: float, n: int, seed: int, dt: float = DT, jobs: int = 1) -> np.ndarray:
    """Rows ``(B, max, min, sup|B|, L)`` at time ``t``."""
    key = ("fixed", t, n, seed, dt)
    return _cached(key, lambda: sampling.map_paths(
        sampling.fixed_time_sample, n, jobs, root=seed, horizon=t, dt=dt))


def _h_at(spec: MaxMartingaleSpec, b, mx, mn, lt) -> np.ndarray:
    if spec.variant == "max":
        return h_of(spec, b, mx)
    if spec.variant == "min":
        return h_of(spec, -b, mn)
    return h_of(spec, lt - np.abs(b), lt)


# -- optional stopping ---------------------------------------------------------------------

@_timed
def drift_test(spec: MaxMartingaleSpec, stop, n: int, seed: int, *, dt: float = DT,
               bridge: bool = True, threshold: float = Z_THRESHOLD, jobs: int = 1,
               name: str = "drift") -> TestReport:
    """z-test of ``E H(stop) = H(0, 0)`` under a bounded stopping rule."""
    censored = 0.0
    if isinstance(stop, ExitInterval):
        rows = exit_batch(stop, n, seed, dt, bridge, jobs)
        censored = float(np.mean(rows[:, 0] == 2))
        hs = _h_at(spec, rows[:, 2], rows[:, 3], rows[:, 4], rows[:, 5])
    elif isinstance(stop, FixedTime):
        rows = fixed_batch(stop.t, n, seed, dt, jobs)
        hs = _h_at(spec, rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 4])
    else:
        raise DomainError("stop must be ExitInterval or FixedTime")
    mean, se, z = z_stat(hs, spec.c)
    verdict = "pass" if abs(z) <= threshold else "fail"
    if censored > CENSOR_CAP:
        verdict = "inconclusive"
    return TestReport(name, mean, spec.c, se, z, threshold, n, seed, verdict, "z",
                      {"spec": spec.to_dict(), "stop": asdict(stop), "censored_fraction": censored,
                       "dt": dt, "bridge": bridge})


# -- exit law of the maximum --------------------------------------------------------------------

@dataclass(frozen=True)
class ExitLawSample:
    side: str  # exit_lower | exit_upper
    max_value: float


def conditional_lower_cdf(s, x: float, y: float):
    """CDF of the maximum given exit at ``-x``: ``s (x + y) / (y (s + x))`` on ``[0, y]``."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, y)
    return s * (x + y) / (y * (s + x))


def exit_law_samples(x: float, y: float, n: int, seed: int, *, dt: float = EXIT_LAW_DT,
                     bridge: bool = True, jobs: int = 1) -> list[ExitLawSample]:
    rows = exit_batch(ExitInterval(-x, y), n, seed, dt, bridge, jobs)
    return [ExitLawSample(sampling.EXIT_KINDS[int(k)], float(m)) for k, m in rows[:, [0, 3]]
            if k != 2]


@_timed
def exit_max_law_test(x: float, y: float, n: int, seed: int, *, dt: float = EXIT_LAW_DT,
                      bridge: bool = True, threshold: float = Z_THRESHOLD, jobs: int = 1,
                      name: str = "exit_max_law") -> TestReport:
    """Law of ``max * 1{exit at -x}`` at the exit time of ``[-x, y]``.

    Two sub-tests: the upper-exit frequency against ``x / (x + y)``, and a KS test
    of the lower-exit maxima against the conditional CDF.
    """
    if not (x > 0 and y > 0):
        raise DomainError("x and y must be positive")
    rows = exit_batch(ExitInterval(-x, y), n, seed, dt, bridge, jobs)
    kinds = rows[:, 0]
    p0 = x / (x + y)
    upper = kinds == 1
    lower = kinds == 0
    p_hat = float(np.mean(upper))
    se = math.sqrt(p0 * (1 - p0) / n)
    z = (p_hat - p0) / se
    lower_max = rows[lower, 3]
    n_lower = lower_max.size
    details = {"x": x, "y": y, "dt": dt, "n_lower": n_lower,
               "lower_mass": float(np.mean(lower)), "lower_mass_reference": y / (x + y),
               "censored_fraction": float(np.mean(kinds == 2))}
    if n_lower < 100:
        return TestReport(name, p_hat, p0, se, z, threshold, n, seed, "inconclusive", "z", details)
    ks = stats.kstest(lower_max, lambda s: conditional_lower_cdf(s, x, y)).statistic
    ks_thr = KS_CRITICAL / math.sqrt(n_lower)
    details.update(ks_statistic=float(ks), ks_threshold=ks_thr,
                   total_mass=float(np.mean(upper) + np.mean(lower)))
    z_ok = abs(z) <= threshold
    ks_ok = ks <= ks_thr
    details.update(frequency_pass=bool(z_ok), ks_pass=bool(ks_ok))
    verdict = "pass" if (z_ok and ks_ok) else "fail"
    if details["censored_fraction"] > CENSOR_CAP:
        verdict = "inconclusive"
    return TestReport(name, p_hat, p0, se, z, threshold, n, seed, verdict, "z", details)


# -- Levy equivalence ----------------------------------------------------------------------------

@_timed
def levy_equivalence_test(t: float, n: int, seed: int, *, dt: float = LEVY_DT,
                          epsilon: float | None = None, jobs: int = 1,
                          name: str = "levy_equivalence") -> TestReport:
    """``(max - B, max)`` against ``(|B|, L)`` at time ``t`` by two-sample KS tests,
    plus the maximum against the half-normal law.  The two sides come from
    independent seeds."""
    thr2 = ks_two_sample_threshold(n, n)
    if t < 10 * dt:
        return TestReport(name, 0.0, 0.0, 0.0, 0.0, thr2, n, seed, "skipped", "ks", {"reason": "t < 10 dt"})
    a = sampling.map_paths(sampling.fixed_time_sample, n, jobs, root=rng.derive(seed, 1),
                           horizon=t, dt=dt, epsilon=epsilon)
    b = sampling.map_paths(sampling.fixed_time_sample, n, jobs, root=rng.derive(seed, 2),
                           horizon=t, dt=dt, epsilon=epsilon)
    ks_max_lt = float(stats.ks_2samp(a[:, 1], b[:, 4]).statistic)
    ks_gap_abs = float(stats.ks_2samp(a[:, 1] - a[:, 0], np.abs(b[:, 0])).statistic)
    ks_half = float(stats.kstest(a[:, 1] / math.sqrt(t), stats.halfnorm.cdf).statistic)
    thr1 = KS_CRITICAL / math.sqrt(n)
    details = {"t": t, "dt": dt, "ks_max_vs_local_time": ks_max_lt, "ks_gap_vs_abs": ks_gap_abs,
               "ks_max_vs_half_normal": ks_half, "two_sample_threshold": thr2,
               "one_sample_threshold": thr1,
               "mean_max": float(a[:, 1].mean()), "mean_local_time": float(b[:, 4].mean())}
    ok = ks_max_lt <= thr2 and ks_gap_abs <= thr2 and ks_half <= thr1
    worst = max(ks_max_lt, ks_gap_abs)
    return TestReport(name, float(b[:, 4].mean()), math.sqrt(2 * t / math.pi), 0.0, worst, thr2, n, seed,
                      "pass" if ok else "fail", "ks", details)


# -- subordinator Laplace identity -----------------------------------------------------------------

def subordinator_sample(index: int, root: int, f_sq: np.ndarray, du: float) -> float:
    """``exp(-1/2 sum f^2(u_k) dT_k)`` with exact increments ``dT_k = du**2 / Z**2``."""
    z = rng.stream(root, index).standard_normal(f_sq.size)
    return math.exp(-0.5 * float(np.sum(f_sq * (du * du) / (z * z))))


def abs_integral(f: RealFunction, x: float) -> float:
    if f.is_nonnegative():
        return float(f.antiderivative(x))
    bps = f.breakpoints()
    inner = bps[(bps > 0) & (bps < x)]
    kw = {"points": inner} if inner.size else {}
    return integrate.quad(lambda u: abs(float(f(u))), 0.0, x, limit=500, **kw)[0]


@_timed
def subordinator_laplace_test(f: RealFunction, x: float, n: int, seed: int, *, m: int = 1000,
                              threshold: float = Z_THRESHOLD, jobs: int = 1,
                              name: str = "subordinator_laplace") -> TestReport:
    """Sample mean of ``exp(-1/2 int_0^x f^2 dT)`` against ``exp(-int_0^x |f|)``,
    with ``T`` the first-passage process sampled on ``m`` midpoint cells."""
    if not x > 0:
        raise DomainError("x must be positive")
    if f.singular_at_zero:
        raise DomainError("f must be bounded on [0, x]")
    du = x / m
    mid = (np.arange(m) + 0.5) * du
    f_sq = np.asarray(f(mid), dtype=float) ** 2
    ref = math.exp(-abs_integral(f, x))
    vals = sampling.map_paths(subordinator_sample, n, jobs, root=rng.derive(seed, 3), f_sq=f_sq, du=du)
    mean, se, z = z_stat(vals, ref)
    return TestReport(name, mean, ref, se, z, threshold, n, seed, "pass" if abs(z) <= threshold else "fail",
                      "z", {"f": f.to_dict(), "x": x, "cells": m})


# -- excursion maxima ----------------------------------------------------------------------------------

def excursion_batch(v0: float, y_max: float, n: int, seed: int, dt: float = DT, jobs: int = 1):
    key = ("excursion", v0, y_max, n, seed, dt)
    return _cached(key, lambda: sampling.map_paths(
        sampling.excursion_count, n, jobs, root=seed, v0=v0, y_max=y_max, dt=dt))


@_timed
def excursion_intensity_test(v0: float, y_max: float, n: int, seed: int, *, dt: float = DT,
                             threshold: float = Z_THRESHOLD, dispersion_band=(0.9, 1.1), jobs: int = 1,
                             name: str = "excursion_intensity") -> TestReport:
    """Counts of excursions deeper than ``v0`` while the max climbs to ``y_max``
    against the Poisson mean ``y_max / v0``, plus a variance/mean check."""
    if not (v0 > 0 and y_max > 0):
        raise DomainError("v0 and y_max must be positive")
    rows = excursion_batch(v0, y_max, n, seed, dt, jobs)
    counts = rows[:, 0]
    ref = y_max / v0
    mean, se, z = z_stat(counts, ref)
    dispersion = float(np.var(counts, ddof=1) / mean) if mean > 0 else math.nan
    unreached = float(np.mean(rows[:, 1] == 0))
    lo, hi = dispersion_band
    ok = abs(z) <= threshold and lo <= dispersion <= hi
    verdict = "inconclusive" if unreached > CENSOR_CAP else ("pass" if ok else "fail")
    return TestReport(name, mean, ref, se, z, threshold, n, seed, verdict, "z",
                      {"v0": v0, "y_max": y_max, "dt": dt, "dispersion": dispersion,
                       "dispersion_band": list(dispersion_band), "unreached_fraction": unreached})


@_timed
def excursion_scaling_test(v0: float, y_max: float, n: int, seed: int, *, dt: float = DT,
                           threshold: float = Z_THRESHOLD, jobs: int = 1,
                           name: str = "excursion_scaling") -> TestReport:
    """Doubling ``v0`` halves the mean count: z-test of ``mean(v0) - 2 mean(2 v0)``."""
    a = excursion_batch(v0, y_max, n, seed, dt, jobs)[:, 0]
    b = excursion_batch(2 * v0, y_max, n, rng.derive(seed, 4), dt, jobs)[:, 0]
    diff = float(a.mean() - 2 * b.mean())
    se = math.sqrt(a.var(ddof=1) / n + 4 * b.var(ddof=1) / n)
    z = diff / se
    return TestReport(name, float(b.mean() / a.mean()), 0.5, se, z, threshold, n, seed,
                      "pass" if abs(z) <= threshold else "fail", "z",
                      {"mean_v0": float(a.mean()), "mean_2v0": float(b.mean()), "difference": diff})


# -- constancy of martingales of (B+, max) and relatives -------------------------------------------

BUILTIN_H: dict[str, Callable] = {
    "x": lambda x, y: x,
    "y": lambda x, y: y,
    "x_plus_y": lambda x, y: x + y,
    "x2": lambda x, y: x * x,
    "const7": lambda x, y: np.full(np.shape(x), 7.0),
}


def _resolve_h(h):
    if isinstance(h, str):
        try:
            return BUILTIN_H[h]
        except KeyError:
            raise DomainError(f"unknown built-in h {h!r}") from None
    if isinstance(h, GridFunction):
        from scipy.interpolate import RegularGridInterpolator

        interp = RegularGridInterpolator((h.y_grid, h.x_grid), h.values, bounds_error=False, fill_value=None)
        return lambda x, y: interp(np.column_stack([np.broadcast_to(y, np.shape(x)).ravel(),
                                                    np.ravel(x)])).reshape(np.shape(x))
    return h


@_timed
def bplus_constancy_test(h, n: int, seed: int, *, t: float = 1.0, stop: ExitInterval = ExitInterval(-1.0, 2.0),
                         dt: float = DT, threshold: float = Z_THRESHOLD, jobs: int = 1,
                         name: str = "bplus_constancy") -> TestReport:
    """Reject the martingale hypothesis for ``h(B+, max)``, ``h(B-, -min)`` and
    ``h(|B|, sup|B|)``.

    Each process is tested for ``E h = h(0, 0)`` at the fixed time ``t`` and at
    the exit time of ``stop``; a process counts as rejected when either test
    has ``|z| > threshold``.  The verdict is ``pass`` when all three processes
    are rejected.  The reported statistic is the fixed-time z for ``(B+, max)``.
    """
    fn = _resolve_h(h)
    probe = np.linspace(0.0, 3.0, 13)
    X, Y = np.meshgrid(probe, probe)
    inside = X <= Y
    hv = np.asarray(fn(X[inside], Y[inside]), dtype=float)
    if np.nanmax(hv) == np.nanmin(hv):
        raise DomainError("h is constant; there is nothing to reject")
    ref = float(np.asarray(fn(np.array([0.0]), np.array([0.0])))[0])

    fixed = fixed_batch(t, n, seed, dt, jobs)
    ex = exit_batch(stop, n, seed, dt, True, jobs)
    triples = {
        "plus": (lambda b, mx, mn: (np.maximum(b, 0), mx)),
        "minus": (lambda b, mx, mn: (np.maximum(-b, 0), mn)),
        "abs": (lambda b, mx, mn: (np.abs(b), np.maximum(mx, mn))),
    }
    details, rejected = {}, {}
    for key, pair in triples.items():
        res = {}
        for when, (b, mx, mn) in (("fixed", (fixed[:, 0], fixed[:, 1], fixed[:, 2])),
                                  ("exit", (ex[:, 2], ex[:, 3], ex[:, 4]))):
            mean, se, z = z_stat(np.asarray(fn(*pair(b, mx, mn)), dtype=float), ref)
            res[when] = {"estimate": mean, "std_error": se, "statistic": z}
        rejected[key] = any(abs(r["statistic"]) > threshold for r in res.values())
        details[key] = res
    details["rejected"] = rejected
    main = details["plus"]["fixed"]
    verdict = "pass" if all(rejected.values()) else "fail"
    return TestReport(name, main["estimate"], ref, main["std_error"], main["statistic"], threshold, n, seed,
                      verdict, "z_reject", details)


# -- convergence to the terminal value ---------------------------------------------------------

@_timed
def convergence_test(spec: MaxMartingaleSpec, horizons, n: int, seed: int, *, dt: float = DT,
                     fraction: float = 0.35, jobs: int = 1, name: str = "convergence") -> TestReport:
    """``E|H_T - F(inf) - c|`` over increasing horizons: pass when strictly
    decreasing with the last value at most ``fraction`` of the first.

    Medians of ``|H_T - F(inf) - c|`` are reported alongside as a pathwise
    convergence diagnostic.
    """
    total = spec.f.total_integral()
    if not math.isfinite(total):
        raise DomainError("convergence test needs an integrable f >= 0")
    limit = total + spec.c
    hz = tuple(float(h) for h in horizons)
    if any(b <= a for a, b in zip(hz, hz[1:])):
        raise DomainError("horizons must be increasing")
    rows = sampling.map_paths(sampling.horizons_sample, n, jobs, root=seed, horizons=hz, dt=dt)
    k = len(hz)
    errs, ses, medians, means = [], [], [], []
    for j in range(k):
        b, mx, mn, lt = rows[:, j], rows[:, k + j], rows[:, 2 * k + j], rows[:, 3 * k + j]
        dev = np.abs(_h_at(spec, b, mx, mn, lt) - limit)
        m, se, _ = z_stat(dev, 0.0)
        errs.append(m)
        ses.append(se)
        medians.append(float(np.median(dev)))
        means.append(float(np.mean(_h_at(spec, b, mx, mn, lt))))
    if errs[0] == 0.0 and all(e == 0.0 for e in errs):
        ok, ratio = True, 0.0
    else:
        ratio = errs[-1] / errs[0] if errs[0] > 0 else math.inf
        ok = all(b < a for a, b in zip(errs, errs[1:])) and ratio <= fraction
    return TestReport(name, errs[-1], 0.0, ses[-1], ratio, fraction, n, seed, "pass" if ok else "fail",
                      "ratio", {"horizons": list(hz), "mean_abs_error": errs, "std_errors": ses,
                                "median_abs_error": medians, "mean_H": means, "limit": limit})


# -- suite ---------------------------------------------------------------------------------------

@dataclass(frozen=True)
class Fixture:
    """One named entry of the verification suite.  ``n`` is the default sample size."""

    name: str
    test: Callable
    args: tuple
    n: int
    kwargs: dict = field(default_factory=dict)

    def run(self, seed: int, n: int | None = None, jobs: int = 1) -> TestReport:
        return self.test(*self.args, n if n is not None else self.n, seed, jobs=jobs, name=self.name,
                         **self.kwargs)


def default_fixtures() -> list[Fixture]:
    from .core import positive_form
    from .functions import constant, exp_decay, indicator_below

    band = ExitInterval(-1.0, 2.0)
    z_n, ks_n = 100_000, 10_000
    fx = [
        Fixture("drift_max_constant_exit", drift_test, (MaxMartingaleSpec("max", constant(1.0)), band), z_n),
        Fixture("drift_max_exp_decay_exit", drift_test, (MaxMartingaleSpec("max", exp_decay(1.0)), band), z_n),
        Fixture("drift_max_indicator_exit", drift_test,
                (MaxMartingaleSpec("max", indicator_below(1.0)), band), z_n),
        Fixture("drift_min_exp_decay_exit", drift_test, (MaxMartingaleSpec("min", exp_decay(1.0)), band), z_n),
        Fixture("drift_local_time_exp_decay_exit", drift_test,
                (MaxMartingaleSpec("local_time", exp_decay(1.0)), band), z_n),
        Fixture("drift_positive_form_fixed", drift_test, (positive_form(exp_decay(1.0)), FixedTime(1.0)), z_n),
        Fixture("drift_max_exp_decay_fixed", drift_test, (MaxMartingaleSpec("max", exp_decay(1.0)), FixedTime(1.0)),
                z_n),
        Fixture("exit_max_law", exit_max_law_test, (1.0, 2.0), ks_n),
        Fixture("levy_equivalence", levy_equivalence_test, (1.0,), ks_n),
        Fixture("subordinator_constant", subordinator_laplace_test, (constant(1.0), 1.0), z_n),
        Fixture("subordinator_indicator", subordinator_laplace_test, (indicator_below(0.5), 1.0), z_n),
        Fixture("subordinator_exp_decay", subordinator_laplace_test, (exp_decay(1.0), 2.0), z_n),
        Fixture("excursion_intensity", excursion_intensity_test, (0.5, 5.0), 1_000),
        Fixture("excursion_scaling", excursion_scaling_test, (0.5, 5.0), 1_000),
        Fixture("bplus_x", bplus_constancy_test, ("x",), z_n),
        Fixture("bplus_y", bplus_constancy_test, ("y",), z_n),
        Fixture("bplus_x_plus_y", bplus_constancy_test, ("x_plus_y",), z_n),
        Fixture("convergence_exp_decay", convergence_test,
                (MaxMartingaleSpec("max", exp_decay(1.0)), (1.0, 4.0, 16.0)), ks_n),
        Fixture("convergence_zero", convergence_test,
                (MaxMartingaleSpec("max", constant(0.0)), (1.0, 4.0, 16.0)), 1_000),
    ]
    return fx


def run_suite(seed: int, only=None, n: int | None = None, jobs: int = 1,
              fixtures: list[Fixture] | None = None) -> list[TestReport]:
    """Run the selected fixtures (all by default) with a common seed.

    ``n`` overrides every fixture's sample size; ``only`` is a list of names.
    """
    fixtures = default_fixtures() if fixtures is None else fixtures
    if only:
        known = {f.name for f in fixtures}
        unknown = set(only) - known
        if unknown:
            raise DomainError(f"unknown tests: {sorted(unknown)}")
        fixtures = [f for f in fixtures if f.name in set(only)]
    return [f.run(seed, n, jobs) for f in fixtures]


SUMMARY_COLUMNS = ("name", "estimate", "reference", "statistic", "threshold", "verdict", "wall_time")


def summary_rows(reports: list[TestReport]) -> list[dict]:
    return [{k: getattr(r, k) for k in SUMMARY_COLUMNS} for r in reports]
