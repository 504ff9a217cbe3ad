import json
import math

import numpy as np
import pytest

from maxmart import rng
from maxmart import stattests as st
from maxmart.core import MaxMartingaleSpec, positive_form
from maxmart.errors import DomainError
from maxmart.functions import constant, exp_decay, indicator_below, piecewise_linear, power


def test_z_stat_and_thresholds():
    mean, se, z = st.z_stat(np.array([1.0, 2.0, 3.0]), 2.0)
    assert (mean, z) == (2.0, 0.0) and se == pytest.approx(1 / math.sqrt(3))
    assert st.ks_two_sample_threshold(100, 100) == pytest.approx(1.63 * math.sqrt(0.02))
    assert st.z_stat(np.zeros(5), 0.0)[2] == 0.0


def test_derived_seeds_are_distinct_and_stable():
    assert rng.derive(1, 1) == rng.derive(1, 1)
    assert len({rng.derive(1, 1), rng.derive(1, 2), rng.derive(2, 1)}) == 3


def test_drift_small_batch_and_report():
    r = st.drift_test(MaxMartingaleSpec("max", exp_decay(1.0)), st.ExitInterval(-0.5, 0.5), 500, 1)
    assert r.verdict == "pass" and r.n == 500 and r.details["censored_fraction"] == 0.0
    d = json.loads(r.to_json())
    assert set(st.SUMMARY_COLUMNS) <= set(d)


def test_drift_reproducible():
    spec = MaxMartingaleSpec("max", indicator_below(0.5))
    st.clear_cache()
    a = st.drift_test(spec, st.ExitInterval(-0.5, 0.5), 300, 9)
    st.clear_cache()
    b = st.drift_test(spec, st.ExitInterval(-0.5, 0.5), 300, 9)
    assert (a.estimate, a.statistic, a.verdict) == (b.estimate, b.statistic, b.verdict)


def test_heavy_censoring_is_inconclusive():
    r = st.drift_test(MaxMartingaleSpec("max", constant(1.0)), st.ExitInterval(-2.0, 2.0, horizon=0.05), 200, 2)
    assert r.verdict == "inconclusive" and r.details["censored_fraction"] > 0.5


def test_positive_form_fixed_time():
    r = st.drift_test(positive_form(exp_decay(1.0)), st.FixedTime(0.5), 2000, 3)
    assert r.reference == 1.0 and r.verdict == "pass"


def test_bad_stop_rule():
    with pytest.raises(DomainError):
        st.ExitInterval(0.5, 1.0)
    with pytest.raises(DomainError):
        st.drift_test(MaxMartingaleSpec("max", constant(1.0)), 3.0, 10, 0)


def test_conditional_lower_cdf():
    assert st.conditional_lower_cdf(0.0, 1.0, 2.0) == 0.0
    assert st.conditional_lower_cdf(2.0, 1.0, 2.0) == pytest.approx(1.0)
    # density (x + y) x / (y (s + x)**2) integrates the CDF
    s = np.linspace(0, 2, 2001)
    dens = 3.0 / (2.0 * (s + 1.0) ** 2)
    assert np.trapezoid(dens, s) == pytest.approx(1.0, abs=1e-6)


def test_exit_law_small_and_total_mass():
    r = st.exit_max_law_test(1.0, 2.0, 1500, 4, dt=1e-4)
    d = r.details
    assert r.verdict == "pass"
    assert abs(d["total_mass"] - 1.0) <= 4 * r.std_error
    with pytest.raises(DomainError):
        st.exit_max_law_test(-1.0, 2.0, 10, 0)


def test_exit_law_samples():
    s = st.exit_law_samples(1.0, 1.0, 200, 5, dt=1e-4)
    assert {x.side for x in s} <= {"exit_lower", "exit_upper"}
    assert all(x.max_value == 1.0 for x in s if x.side == "exit_upper")
    assert all(0.0 <= x.max_value <= 1.0 for x in s)


def test_levy_skips_tiny_horizon():
    assert st.levy_equivalence_test(1e-4, 10, 0, dt=1e-4).verdict == "skipped"


def test_levy_small():
    r = st.levy_equivalence_test(0.5, 400, 6, dt=1e-4)
    assert r.verdict == "pass"


@pytest.mark.parametrize("f", [constant(1.0), indicator_below(0.5), exp_decay(1.0),
                               piecewise_linear([0, 1, 2], [1, -0.5, 0.5])], ids=lambda f: f.kind)
@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_subordinator_laplace(f, x):
    r = st.subordinator_laplace_test(f, x, 4000, 7, m=400)
    assert r.verdict == "pass"


def test_subordinator_reference_and_errors():
    r = st.subordinator_laplace_test(constant(1.0), 1.0, 10, 0)
    assert r.reference == pytest.approx(math.exp(-1))
    with pytest.raises(DomainError):
        st.subordinator_laplace_test(power(-0.5), 1.0, 10, 0)
    with pytest.raises(DomainError):
        st.subordinator_laplace_test(constant(1.0), 0.0, 10, 0)


def test_excursion_counts_small():
    r = st.excursion_intensity_test(0.5, 2.0, 400, 8)
    assert r.reference == 4.0 and abs(r.statistic) <= 4
    clipped = st.excursion_intensity_test(3.0, 2.0, 400, 8)
    assert clipped.reference == pytest.approx(2 / 3) and abs(clipped.statistic) <= 4
    with pytest.raises(DomainError):
        st.excursion_intensity_test(0.0, 1.0, 10, 0)


def test_bplus_rejects_and_refuses_constants():
    r = st.bplus_constancy_test("x", 3000, 10)
    assert r.verdict == "pass" and all(r.details["rejected"].values())
    assert r.estimate == pytest.approx(1 / math.sqrt(2 * math.pi), abs=5 * r.std_error)
    with pytest.raises(DomainError):
        st.bplus_constancy_test("const7", 10, 0)
    with pytest.raises(DomainError):
        st.bplus_constancy_test(lambda x, y: np.full(np.shape(x), 2.0), 10, 0)
    with pytest.raises(DomainError):
        st.bplus_constancy_test("nope", 10, 0)


def test_bplus_accepts_grid_function():
    from maxmart.characterize import GridFunction, GridSpec

    xs, ys = GridSpec(y_max=4.0, n_y=40, x_min=-1.0, n_x_negative=5).grids()
    g = GridFunction.from_callable(lambda x, y: y + 0 * x, xs, ys)
    assert st.bplus_constancy_test(g, 2000, 11).verdict == "pass"


def test_convergence_trivial_and_errors():
    r = st.convergence_test(MaxMartingaleSpec("max", constant(0.0)), (0.1, 0.2), 50, 0, dt=1e-3)
    assert r.verdict == "pass" and r.details["mean_abs_error"] == [0.0, 0.0]
    with pytest.raises(DomainError):
        st.convergence_test(MaxMartingaleSpec("max", constant(1.0)), (1, 2), 5, 0)
    with pytest.raises(DomainError):
        st.convergence_test(MaxMartingaleSpec("max", exp_decay(1.0)), (2, 1), 5, 0)


def test_convergence_pathwise_medians_shrink():
    # H_T converges to its limit almost surely; the medians show it even though the
    # mean absolute error does not shrink
    r = st.convergence_test(MaxMartingaleSpec("max", exp_decay(1.0)), (0.5, 4.0, 16.0), 300, 12, dt=1e-3)
    med = r.details["median_abs_error"]
    assert med[0] > med[1] > med[2]
    assert all(abs(m) <= 0.5 for m in r.details["mean_H"])


def test_run_suite_selection():
    names = [f.name for f in st.default_fixtures()]
    assert len(names) == len(set(names)) and 15 <= len(names) <= 25
    rs = st.run_suite(0, only=["bplus_x", "subordinator_constant"], n=200)
    assert [r.name for r in rs] == ["subordinator_constant", "bplus_x"]
    with pytest.raises(DomainError):
        st.run_suite(0, only=["no_such_test"])
