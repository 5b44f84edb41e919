import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from parode.core import (
    ButcherTableau,
    OdeSystem,
    StepOutcome,
    as_state,
    error_norm,
    scaled_error_norm,
    validate_tableau,
)
from parode.tableaus import dop853_tableau, gauss10_tableau, rk4_tableau


def test_error_norm_identical():
    assert error_norm([1, 2], [1, 2]) == 0.0


def test_error_norm_unit_difference():
    assert error_norm([1, 0], [0, 0]) == 1.0


def test_error_norm_is_componentwise_max():
    assert error_norm([0.5, -0.25, 3], [0.5, 0.75, 3]) == 1.0


def test_error_norm_dimension_mismatch():
    with pytest.raises(ValueError):
        error_norm([1, 2], [1, 2, 3])


finite = st.floats(-1e6, 1e6, allow_nan=False)


@st.composite
def triples(draw):
    d = draw(st.integers(1, 8))
    vec = arrays(np.float64, d, elements=finite)
    return draw(vec), draw(vec), draw(vec)


@given(triples())
def test_error_norm_metric_properties(abc):
    a, b, c = abc
    assert error_norm(a, a) == 0.0
    assert error_norm(a, b) == error_norm(b, a)
    # slack for rounding in the subtractions
    assert error_norm(a, c) <= error_norm(a, b) + error_norm(b, c) + 1e-9


def test_scaled_norm_is_opt_in_relative():
    assert scaled_error_norm([100.0], [100.1], atol=0.0, rtol=1e-3) == pytest.approx(0.1 / 0.1001)


def test_as_state_rejects_bad_input():
    with pytest.raises(ValueError):
        as_state([])
    with pytest.raises(ValueError):
        as_state([1.0, math.nan])
    with pytest.raises(ValueError):
        as_state([1.0, 2.0], dimension=3)


def test_system_rhs_dimension_is_checked():
    bad = OdeSystem.from_rhs("bad", lambda t, y: np.zeros(3), [1.0, 2.0])
    with pytest.raises(ValueError):
        bad.rhs(0.0, bad.y0)


def test_system_state_is_immutable():
    sys = OdeSystem.from_rhs("c", lambda t, y: 0 * y, [1.0])
    with pytest.raises(ValueError):
        sys.y0[0] = 2.0


@pytest.mark.parametrize("factory", [rk4_tableau, gauss10_tableau, dop853_tableau])
def test_shipped_tableaus_are_valid(factory):
    report = validate_tableau(factory())
    assert report.valid, report.violations


def test_rk4_tableau_quadrature_to_order_four():
    report = validate_tableau(rk4_tableau(), order=4)
    assert report.valid and report.max_residual < 1e-15


def test_broken_weight_is_reported():
    t = rk4_tableau()
    broken = ButcherTableau(t.A, [1 / 6, 2 / 6, 2 / 6, 1 / 7], t.c, 4)
    report = validate_tableau(broken)
    assert any(v.startswith("Σb ≠ 1") for v in report.violations)


def test_step_outcome_fields():
    out = StepOutcome(np.zeros(2), 0.0, 4)
    assert out.epsilon >= 0 and out.rhs_evals >= 1
