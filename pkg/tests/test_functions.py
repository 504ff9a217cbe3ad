import math

import numpy as np
import pytest

from maxmart.errors import DomainError
from maxmart.functions import (RealFunction, constant, exp_decay, indicator_below, load_tabulated,
                               piecewise_linear, power, tabulated)

CLOSED = [constant(2.5), indicator_below(1.0), exp_decay(0.7), power(0.5), power(-0.5),
          piecewise_linear([0, 1, 2.5], [1.0, -0.5, 2.0])]


@pytest.mark.parametrize("f", CLOSED, ids=lambda f: f.kind)
def test_closed_form_matches_quadrature(f):
    ys = np.array([0.0, 0.3, 1.0, 1.7, 3.0])
    assert np.allclose(f.antiderivative(ys, "closed_form"), f.antiderivative(ys, "quadrature"), atol=1e-9)


def test_known_antiderivatives():
    assert exp_decay(1.0).antiderivative(1.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    assert indicator_below(1.0).antiderivative(2.0) == 1.0
    assert indicator_below(1.0).antiderivative(0.4) == 0.4
    assert power(-0.5).antiderivative(4.0) == pytest.approx(4.0)
    assert piecewise_linear([0, 2], [0, 2]).antiderivative(2.0) == pytest.approx(2.0)


def test_total_integrals():
    assert exp_decay(2.0).total_integral() == 0.5
    assert indicator_below(1.5).total_integral() == 1.5
    assert constant(1.0).total_integral() == math.inf
    assert constant(0.0).total_integral() == 0.0
    assert power(0.5).total_integral() == math.inf
    assert tabulated([0, 1, 2], [1, 1, 0]).total_integral() == 1.5
    with pytest.raises(DomainError):
        constant(-1.0).total_integral()


def test_indicator_is_left_continuous_at_breakpoint():
    f = indicator_below(1.0)
    assert f(0.999) == 1.0 and f(1.0) == 0.0


def test_domain_errors():
    with pytest.raises(DomainError):
        exp_decay(1.0)(-0.1)
    with pytest.raises(DomainError):
        power(-0.5)(0.0)
    with pytest.raises(DomainError):
        power(-1.0)
    with pytest.raises(DomainError):
        tabulated([0, 1], [1, 2]).antiderivative(1.0, "closed_form")
    with pytest.raises(DomainError):
        tabulated([0.5, 1], [1, 2])
    with pytest.raises(DomainError):
        RealFunction("bogus", {})
    with pytest.raises(DomainError):
        exp_decay(1.0).antiderivative(-1.0)


def test_tabulated_quadrature_matches_trapezoid():
    g = np.linspace(0, 3, 7)
    v = np.cos(g)
    f = tabulated(g, v)
    exact = np.concatenate([[0], np.cumsum(np.diff(g) * (v[1:] + v[:-1]) / 2)])
    assert np.allclose(f.antiderivative(g), exact, atol=1e-10)


def test_scaled_and_sign():
    f = exp_decay(1.0).scaled(-2.0)
    assert f(0.0) == -2.0
    assert f.antiderivative(1.0) == pytest.approx(-2 * (1 - math.exp(-1)))
    assert not f.is_nonnegative()


def test_dict_round_trip_and_csv(tmp_path):
    for f in CLOSED + [tabulated([0, 1], [2, 3]), exp_decay(1.0).scaled(-1)]:
        assert RealFunction.from_dict(f.to_dict()) == f
    fp = tmp_path / "f.csv"
    fp.write_text("x,f\n0,1\n1,0.5\n2,0\n")
    f = load_tabulated(fp)
    assert f(1.5) == 0.25
    assert RealFunction.from_dict({"kind": "tabulated", "params": {"csv": str(fp)}}) == f
