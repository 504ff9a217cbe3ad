import io

import numpy as np
import pytest

from maxmart.characterize import (GridFunction, GridSpec, RecoveryAccumulator, detect_ay_form,
                                  recover_batch, recover_f, recover_f_table, round_trip)
from maxmart.core import MaxMartingaleSpec, evaluate_direct, evaluate_integral
from maxmart.errors import DomainError, InsufficientDataError
from maxmart.functions import constant, exp_decay, indicator_below, power
from maxmart.paths import simulate_bm


def test_recover_constant_exactly():
    spec = MaxMartingaleSpec("max", constant(2.0))
    paths = [simulate_bm((1, i), 1.0, 1e-3) for i in range(5)]
    series = [evaluate_direct(spec, p) for p in paths]
    assert recover_f(paths, series, 0.1, 0.2) == pytest.approx(2.0, abs=1e-12)


def test_recover_from_integral_form_is_exact_per_bin():
    # the integral form's increments are f(y_i) dB_i, so the ratio is a weighted mean of f
    spec = MaxMartingaleSpec("max", exp_decay(1.0))
    paths = [simulate_bm((2, i), 1.0, 1e-3) for i in range(20)]
    series = [evaluate_integral(spec, p) for p in paths]
    est = recover_f(paths, series, 0.4, 0.05)
    assert np.exp(-0.45) <= est <= np.exp(-0.4)


def test_recover_local_time_variant():
    spec = MaxMartingaleSpec("local_time", constant(1.5))
    paths = [simulate_bm((3, i), 1.0, 1e-3) for i in range(5)]
    exact = [evaluate_integral(spec, p) for p in paths]
    assert recover_f(paths, exact, 0.0, 0.1, variant="local_time") == pytest.approx(1.5, abs=1e-12)
    # the direct form carries the grid's zero-crossing correction, which fades slowly
    direct = [evaluate_direct(spec, p) for p in paths]
    assert recover_f(paths, direct, 0.0, 0.1, variant="local_time") == pytest.approx(1.5, rel=0.15)


def test_empty_bin_reports_occupancy():
    spec = MaxMartingaleSpec("max", constant(1.0))
    paths = [simulate_bm((4, i), 0.01, 1e-3) for i in range(3)]
    with pytest.raises(InsufficientDataError) as err:
        recover_f(paths, [evaluate_direct(spec, p) for p in paths], 5.0, 0.1)
    assert err.value.occupancy == 0


def test_accumulators_merge_like_one_batch():
    spec = MaxMartingaleSpec("max", exp_decay(1.0))
    paths = [simulate_bm((5, i), 1.0, 1e-3) for i in range(6)]
    pairs = [(p, evaluate_direct(spec, p)) for p in paths]
    lefts = [0.0, 0.2, 0.4]
    whole = recover_f_table(pairs, lefts, 0.2)
    a = recover_f_table(pairs[:3], lefts, 0.2)
    b = recover_f_table(pairs[3:], lefts, 0.2)
    assert np.allclose(a.merge(b).estimates(), whole.estimates())
    assert isinstance(whole, RecoveryAccumulator)


def test_recover_batch_matches_serial_table():
    spec = MaxMartingaleSpec("max", exp_decay(1.0))
    lefts = [0.1, 0.3]
    acc = recover_batch(spec, 4, 6, lefts, 0.1, horizon=0.5, dt=1e-3)
    pairs = ((p, evaluate_direct(spec, p)) for p in (simulate_bm((6, i), 0.5, 1e-3) for i in range(4)))
    ref = recover_f_table(pairs, lefts, 0.1)
    assert np.allclose(acc.cross, ref.cross) and np.array_equal(acc.count, ref.count)


@pytest.mark.parametrize("f", [constant(1.0), exp_decay(1.0), indicator_below(0.75), power(-0.5), power(1.5)],
                         ids=lambda f: f.kind + str(f.params))
def test_round_trip(f):
    rep = round_trip(f, GridSpec(), c=-0.4)
    assert rep.is_ay and rep.residual_max <= 1e-8 and rep.f_error_max <= 1e-8
    assert rep.c_hat == -0.4


def test_non_affine_and_broken_diagonal_rejected():
    xs, ys = GridSpec().grids()
    assert not detect_ay_form(GridFunction.from_callable(lambda x, y: x * x, xs, ys)).is_ay
    # affine columns whose diagonal does not integrate the slopes
    h = GridFunction.from_callable(lambda x, y: np.sin(3 * y) + 0 * x, xs, ys)
    assert not detect_ay_form(h).is_ay


def test_single_bad_column_policy():
    spec = MaxMartingaleSpec("max", exp_decay(1.0))
    xs, ys = GridSpec().grids()
    g = GridFunction.from_spec(spec, xs, ys)
    vals = g.values.copy()
    vals[10, 3] += 1e-3
    bent = GridFunction(xs, ys, vals)
    assert detect_ay_form(bent).is_ay
    assert not detect_ay_form(bent, max_bad_columns=0).is_ay
    vals[20, 5] += 1e-3
    assert not detect_ay_form(GridFunction(xs, ys, vals)).is_ay


def test_grid_csv_round_trip(tmp_path):
    xs, ys = GridSpec(y_max=1.0, n_y=5, n_x_negative=3).grids()
    g = GridFunction.from_spec(MaxMartingaleSpec("max", exp_decay(1.0)), xs, ys)
    buf = io.StringIO()
    g.to_csv(buf)
    back = GridFunction.from_csv(io.StringIO(buf.getvalue()))
    assert np.array_equal(np.isnan(back.values), np.isnan(g.values))
    assert np.array_equal(np.nan_to_num(back.values), np.nan_to_num(g.values))
    g.to_csv(tmp_path / "g.csv")
    assert detect_ay_form(GridFunction.from_csv(tmp_path / "g.csv")).is_ay


def test_detector_needs_origin():
    xs, ys = np.array([0.5, 1.0]), np.array([0.5, 1.0])
    with pytest.raises(DomainError):
        detect_ay_form(GridFunction(xs, ys, np.array([[1.0, np.nan], [1.0, 1.0]])))
