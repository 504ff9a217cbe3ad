"""Streaming per-path samplers for the statistical tests.

Each sampler simulates path ``index`` of seed ``root`` block by block and
returns a few numbers, so batches of 10**5 long paths never sit in memory.
Increments come from the same per-path stream as :func:`paths.simulate_bm`, and
node values are accumulated sequentially, so a streamed path is bit-identical
to the stored one.  :func:`map_paths` fans indices out over worker processes
and returns results in index order, which keeps every reduction independent
of scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import rng
from .paths import MAX_STEPS, first_event, simulate_bm

FIRST_BLOCK = 8192
MAX_BLOCK = 65536

EXIT_KINDS = ("exit_lower", "exit_upper", "censored")


def _blocks(n_steps: int):
    size = FIRST_BLOCK
    done = 0
    while done < n_steps:
        m = min(size, n_steps - done)
        yield m
        done += m
        size = min(2 * size, MAX_BLOCK)


def exit_sample(index: int, root: int, lower: float, upper: float, dt: float, horizon: float,
                bridge: bool = True, epsilon: float | None = None):
    """Stop path ``index`` on leaving ``[lower, upper]``.

    Returns ``(kind_code, step, B_stop, max, min, L)`` with ``kind_code`` indexing
    :data:`EXIT_KINDS`.  On exit ``B_stop`` is the barrier; the running max is
    clamped at ``upper``.  ``L`` is the occupation local time with bandwidth
    ``epsilon`` (default ``sqrt(dt)/2``).
    """
    eps = math.sqrt(dt) / 2 if epsilon is None else epsilon
    n_steps = min(int(math.ceil(horizon / dt)), MAX_STEPS)
    g = rng.stream(root, index)
    gb = rng.stream(root, index, rng.BRIDGE) if bridge else None
    sq = math.sqrt(dt)
    b, mx, mn, occ, step = 0.0, 0.0, 0.0, 0, 0
    for m in _blocks(n_steps):
        z = g.standard_normal(m)
        z *= sq
        z[0] += b
        vals = np.cumsum(z)
        prev = np.concatenate([[b], vals[:-1]])
        hit = first_event(b, vals, lower, upper, dt, gb)
        if hit is None:
            occ += np.count_nonzero(np.abs(prev) <= eps)
            mx = max(mx, float(vals.max()))
            mn = max(mn, float(-vals.min()))
            b = float(vals[-1])
            step += m
            continue
        k, side = hit
        occ += np.count_nonzero(np.abs(prev[: k + 1]) <= eps)
        mx = min(max(mx, float(vals[: k + 1].max())), upper)
        mn = max(mn, float(-vals[: k + 1].min()))
        if side == "upper":
            mx = upper
        else:
            mn = max(mn, -lower)
        level = upper if side == "upper" else lower
        return (1 if side == "upper" else 0, step + k + 1, level, mx, mn, occ * dt / (2 * eps))
    return (2, step, b, mx, mn, occ * dt / (2 * eps))


def fixed_time_sample(index: int, root: int, horizon: float, dt: float, epsilon: float | None = None):
    """``(B_T, max, min, sup|B|, L_T)`` at ``T = horizon``."""
    p = simulate_bm((root, index), horizon, dt, epsilon=epsilon)
    return (p.values[-1], p.running_max[-1], p.running_min[-1],
            max(p.running_max[-1], p.running_min[-1]), p.local_time[-1])


def horizons_sample(index: int, root: int, horizons: tuple, dt: float):
    """``B_T``, then ``max_T``, ``min_T`` and ``L_T`` for each ``T`` in ``horizons``
    along one path."""
    p = simulate_bm((root, index), max(horizons), dt)
    idx = [int(round(t / dt)) for t in horizons]
    return tuple(arr[i] for arr in (p.values, p.running_max, p.running_min, p.local_time) for i in idx)


def excursion_count(index: int, root: int, v0: float, y_max: float, dt: float,
                    max_steps: int = MAX_STEPS, bridge: bool = True):
    """Count excursions of ``max - B`` deeper than ``v0`` while the max rises to ``y_max``.

    Once an excursion reaches depth ``v0`` it is counted and the path restarts
    from its maximum: by the strong Markov property the rest of that excursion
    (a hitting time of ``v0``, heavy tailed) cannot change the count or the
    maximum, so it is skipped rather than simulated.  Returns ``(count, reached)``.
    A bridge test between nodes catches depth crossings missed by the grid.
    """
    g = rng.stream(root, index)
    gb = rng.stream(root, index, rng.BRIDGE)
    sq = math.sqrt(dt)
    b = m = 0.0
    count = steps = 0
    for size in _blocks(max_steps):
        z = g.standard_normal(size) * sq
        u = gb.random(size)
        pos = 0
        while pos < size:
            seg = z[pos:].copy()
            seg[0] += b
            vals = np.cumsum(seg)
            prev = np.concatenate([[b], vals[:-1]])
            mprev = np.maximum.accumulate(np.concatenate([[m], vals[:-1]]))
            reach = vals >= y_max
            deep = (mprev - vals) >= v0
            if bridge:
                barrier = mprev - v0
                with np.errstate(over="ignore"):
                    expo = 2.0 * (prev - barrier) * (vals - barrier) / dt
                deep |= (prev > barrier) & (vals > barrier) & (u[pos:] < np.exp(-expo))
            ev = np.flatnonzero(reach | deep)
            if ev.size == 0:
                b = float(vals[-1])
                m = max(float(mprev[-1]), b)
                break
            j = ev[0]
            if reach[j]:
                return count, True
            count += 1
            m = float(mprev[j])
            b = m
            pos += j + 1
        steps += size
    return count, False


def map_paths(func, n: int, jobs: int = 1, **kwargs) -> np.ndarray:
    """Evaluate ``func(i, **kwargs)`` for ``i < n``; rows in index order."""
    call = partial(func, **kwargs)
    if jobs is None or jobs <= 0:
        jobs = os.cpu_count() or 1
    if jobs == 1 or n < 64:
        rows = [call(i) for i in range(n)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(call, range(n), chunksize=max(1, n // (8 * jobs))))
    return np.array(rows, dtype=float)
