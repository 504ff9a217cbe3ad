"""Discretized Brownian paths and their running statistics.

Paths are built from exact Gaussian increments on a uniform grid.  Running
maximum and minimum use grid values only; hitting and exit detection can add a
Brownian-bridge crossing test between nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import rng
from .errors import DomainError, ResourceLimitError

MAX_STEPS = 20_000_000
DEFAULT_DT = 1e-4

# Steps whose bridge crossing probability is below exp(-BRIDGE_CUTOFF) are
# treated as non-crossing and consume no uniform.
BRIDGE_CUTOFF = 40.0


def default_epsilon(dt: float) -> float:
    """Occupation bandwidth used when none is given: half the step scale."""
    return math.sqrt(dt) / 2


def _readonly(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Path:
    """A sampled path with derived running statistics.

    ``running_min`` is stored in ``-inf`` form (so it is ``>= 0``).  ``clock`` is
    the quadratic-variation clock at the nodes; for Brownian motion it is the
    identity ``i * dt``.
    """

    dt: float
    values: np.ndarray
    running_max: np.ndarray
    running_min: np.ndarray
    clock: np.ndarray
    local_time: np.ndarray | None = None
    epsilon: float | None = None
    seed: tuple[int, int] | None = None

    @classmethod
    def from_values(cls, values, dt: float, *, clock=None, epsilon: float | None = None,
                    seed=None, with_local_time: bool = True) -> "Path":
        values = np.asarray(values, dtype=float)
        if dt <= 0:
            raise DomainError("dt must be positive")
        if values.ndim != 1 or values.size == 0:
            raise DomainError("values must be a non-empty 1-d sequence")
        if clock is None:
            clock = np.arange(values.size) * dt
        clock = np.asarray(clock, dtype=float)
        if clock.shape != values.shape:
            raise DomainError("clock must match values")
        path = cls(
            dt=float(dt),
            values=_readonly(values),
            running_max=_readonly(np.maximum.accumulate(np.maximum(values, 0.0))),
            running_min=_readonly(np.maximum.accumulate(np.maximum(-values, 0.0))),
            clock=_readonly(clock),
            seed=None if seed is None else rng.normalize_seed(seed),
        )
        if with_local_time:
            eps = default_epsilon(dt) if epsilon is None else epsilon
            path = replace(path, local_time=_readonly(local_time_zero(path, eps)), epsilon=eps)
        return path

    @property
    def n_nodes(self) -> int:
        return self.values.size

    @property
    def horizon(self) -> float:
        return (self.n_nodes - 1) * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_nodes) * self.dt

    def to_csv(self, file) -> None:
        """Write columns ``t, B, max, min, L`` with a header row."""
        lt = self.local_time if self.local_time is not None else np.full(self.n_nodes, np.nan)
        table = np.column_stack([self.times, self.values, self.running_max, self.running_min, lt])
        np.savetxt(file, table, delimiter=",", header="t,B,max,min,L", comments="", fmt="%.17g")


@dataclass(frozen=True)
class StoppingOutcome:
    kind: str  # hit | exit_lower | exit_upper | censored
    time: float
    index: int
    value_at_stop: float
    max_at_stop: float


def n_steps_for(horizon: float, dt: float, max_steps: int = MAX_STEPS) -> int:
    if dt <= 0 or horizon <= 0:
        raise DomainError("horizon and dt must be positive")
    n = int(round(horizon / dt))
    if abs(n * dt - horizon) > 1e-9 * max(1.0, horizon):
        n = int(math.ceil(horizon / dt))
    if n > max_steps:
        raise ResourceLimitError(f"{n} steps exceeds the configured limit of {max_steps}")
    return n


def brownian_values(root: int, index: int, n_steps: int, dt: float) -> np.ndarray:
    """Node values ``B_0 = 0, B_dt, ...`` for path ``index`` of seed ``root``."""
    z = rng.stream(root, index).standard_normal(n_steps)
    return np.cumsum(np.concatenate([[0.0], z * math.sqrt(dt)]))


def simulate_bm(seed, horizon: float, dt: float = DEFAULT_DT, *, epsilon: float | None = None,
                max_steps: int = MAX_STEPS) -> Path:
    """Simulate one Brownian path on ``[0, horizon]``.

    ``seed`` is a root seed or a ``(root, index)`` pair; equal arguments give a
    bit-identical path.
    """
    root, index = rng.normalize_seed(seed)
    n = n_steps_for(horizon, dt, max_steps)
    return Path.from_values(brownian_values(root, index, n, dt), dt, epsilon=epsilon, seed=(root, index))


def local_time_zero(path: Path, epsilon: float) -> np.ndarray:
    """Occupation estimate of the local time at 0.

    ``L[i] = (1 / 2 eps) * sum_{s < i} 1{|N_s| <= eps} * (clock[s+1] - clock[s])``,
    so it is nondecreasing, starts at 0 and only grows on steps that start
    within the band.
    """
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    inside = np.abs(path.values[:-1]) <= epsilon
    dclock = np.diff(path.clock)
    return np.concatenate([[0.0], np.cumsum(inside * dclock)]) / (2 * epsilon)


def with_local_time(path: Path, epsilon: float) -> Path:
    return replace(path, local_time=_readonly(local_time_zero(path, epsilon)), epsilon=epsilon)


# -- hitting and exit detection ----------------------------------------------------

def first_event(start: float, block: np.ndarray, lower: float, upper: float, dt: float,
                bridge: np.random.Generator | None):
    """Locate the first barrier crossing on the steps ``start -> block[0] -> ...``.

    Returns ``(offset, side)`` with ``side`` in ``{"lower", "upper"}`` or ``None``.
    With ``bridge`` given, steps with both endpoints strictly inside the barriers
    cross with probability ``exp(-2 d1 d2 / dt)`` (``d1, d2`` the endpoint
    distances to the barrier); one uniform is drawn per candidate step, in
    step order, so block boundaries do not change the outcome.
    """
    g_up = block >= upper
    g_dn = block <= lower
    grid = np.flatnonzero(g_up | g_dn)
    first_grid = grid[0] if grid.size else block.size
    first_bridge, bridge_side = block.size, None
    if bridge is not None:
        # a step can only be a candidate if one endpoint is within w of a barrier
        w = math.sqrt(BRIDGE_CUTOFF * dt / 2)
        near = (block > upper - w) | (block < lower + w)
        near[1:] |= near[:-1]
        near[0] |= (start > upper - w) or (start < lower + w)
        steps = np.flatnonzero(near[:first_grid])
        if steps.size:
            b1 = block[steps]
            b0 = np.where(steps > 0, block[steps - 1], start)
            with np.errstate(invalid="ignore", over="ignore"):
                e_up = 2.0 * (upper - b0) * (upper - b1) / dt
                e_dn = 2.0 * (b0 - lower) * (b1 - lower) / dt
            inside = (b0 > lower) & (b0 < upper) & (b1 > lower) & (b1 < upper)
            keep = inside & (np.minimum(e_up, e_dn) < BRIDGE_CUTOFF)
            cand = steps[keep]
            if cand.size:
                u = bridge.random(cand.size)
                p_up = np.exp(-e_up[keep])
                p_dn = np.exp(-e_dn[keep])
                hit_up = u < p_up
                hit = hit_up | (u < p_up + p_dn)
                k = np.flatnonzero(hit)
                if k.size:
                    first_bridge = cand[k[0]]
                    bridge_side = "upper" if hit_up[k[0]] else "lower"
    if first_grid == block.size and bridge_side is None:
        return None
    if first_bridge < first_grid:
        return int(first_bridge), bridge_side
    return int(first_grid), ("upper" if g_up[first_grid] else "lower")


def _bridge_rng(path: Path, bridge_correction: bool):
    if not bridge_correction:
        return None
    root, index = path.seed if path.seed is not None else (0, 0)
    return rng.stream(root, index, rng.BRIDGE)


def _outcome(path: Path, hit, lower: float, upper: float, kinds: dict) -> StoppingOutcome:
    if hit is None:
        i = path.n_nodes - 1
        return StoppingOutcome("censored", i * path.dt, i, float(path.values[i]), float(path.running_max[i]))
    offset, side = hit
    i = offset + 1
    level = upper if side == "upper" else lower
    mx = upper if side == "upper" else min(float(path.running_max[i]), upper)
    return StoppingOutcome(kinds[side], i * path.dt, i, float(level), mx)


def first_hitting(path: Path, level: float, bridge_correction: bool = False) -> StoppingOutcome:
    """First passage of ``level``; ``level = 0`` is hit at time 0."""
    if level == 0:
        return StoppingOutcome("hit", 0.0, 0, 0.0, 0.0)
    lower, upper = (-math.inf, level) if level > 0 else (level, math.inf)
    hit = first_event(path.values[0], path.values[1:], lower, upper, path.dt,
                      _bridge_rng(path, bridge_correction))
    return _outcome(path, hit, lower, upper, {"upper": "hit", "lower": "hit"})


def exit_interval(path: Path, lower: float, upper: float, bridge_correction: bool = False) -> StoppingOutcome:
    """First exit from ``[lower, upper]`` with ``lower < 0 < upper``."""
    if not (lower < 0 < upper):
        raise DomainError("exit interval needs lower < 0 < upper")
    hit = first_event(path.values[0], path.values[1:], lower, upper, path.dt,
                      _bridge_rng(path, bridge_correction))
    return _outcome(path, hit, lower, upper, {"upper": "exit_upper", "lower": "exit_lower"})


# -- exact hitting times ---------------------------------------------------------------

def sample_hitting_time_exact(level: float, seed) -> float:
    """Exact draw of ``T_level`` as ``level**2 / Z**2``."""
    if level < 0:
        raise DomainError("level must be non-negative")
    if level == 0:
        return 0.0
    root, index = rng.normalize_seed(seed)
    z = rng.stream(root, index, rng.AUX).standard_normal()
    return level * level / (z * z)


def sample_hitting_times(level: float, n: int, seed: int) -> np.ndarray:
    """``n`` exact hitting times, sample ``i`` drawn from stream ``(seed, i)``."""
    return np.array([sample_hitting_time_exact(level, (seed, i)) for i in range(n)])


# -- time change ---------------------------------------------------------------------

def dds_time_change(path: Path, clock: Callable[[np.ndarray], np.ndarray],
                    horizon: float | None = None) -> Path:
    """Time-change ``path`` by a nondecreasing ``clock``: ``N_t = beta_{clock(t)}``.

    Output node ``i`` takes the input value at ``clock(i * dt)`` (nearest node).
    Without ``horizon`` the output runs for as long as the clock stays inside
    the input horizon.  Running extrema are recomputed from the output values
    and the local time uses ``clock`` as the quadratic-variation increment.
    """
    dt = path.dt
    tol = 1e-9 * max(1.0, path.horizon)
    if horizon is None:
        t_max = path.horizon
        while float(clock(np.array(t_max))) <= path.horizon + tol:
            t_max *= 2
            if t_max / dt > MAX_STEPS:
                raise ResourceLimitError("clock grows too slowly to bound the output horizon")
        grid = np.arange(int(math.floor(t_max / dt)) + 1) * dt
        c = np.asarray(clock(grid), dtype=float)
        n_out = int(np.searchsorted(c, path.horizon + tol, side="right"))
        c = c[:n_out]
    else:
        n_out = n_steps_for(horizon, dt) + 1
        c = np.asarray(clock(np.arange(n_out) * dt), dtype=float)
    if c.size == 0 or abs(c[0]) > tol:
        raise DomainError("clock must start at 0")
    if np.any(np.diff(c) < 0):
        raise DomainError("clock must be nondecreasing")
    if c[-1] > path.horizon + tol:
        raise DomainError("clock exceeds the input horizon")
    idx = np.clip(np.rint(c / dt).astype(np.int64), 0, path.n_nodes - 1)
    eps = path.epsilon if path.epsilon is not None else default_epsilon(dt)
    return Path.from_values(path.values[idx], dt, clock=c, epsilon=eps, seed=path.seed)
