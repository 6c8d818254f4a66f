import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sp_integrate, special, stats

from ecardioid.numerics import (
    BracketError,
    IntegrationError,
    Interval,
    bessel_i0,
    bessel_i1,
    bisect_monotone,
    chi2_sf,
    find_root,
    golden_max,
    integrate,
    minimize,
)

from conftest import load_cases

CASES = load_cases("numerics")


@pytest.mark.parametrize("cid", [c for c in CASES if c.startswith("bessel")])
def test_bessel_fixtures(cid):
    case = CASES[cid]
    fn = bessel_i0 if "i0" in cid else bessel_i1
    got = fn(case["inputs"]["x"])
    assert got == pytest.approx(case["expected"], rel=case["tol"], abs=case["tol"])


@pytest.mark.parametrize("cid", [c for c in CASES if c.startswith("chi2")])
def test_chi2_fixtures(cid):
    case = CASES[cid]
    got = chi2_sf(case["inputs"]["x"], case["inputs"]["df"])
    assert got == pytest.approx(case["expected"], rel=case["tol"], abs=1e-300)


def test_integrate_fixtures():
    assert integrate(math.sin, (0.0, math.pi)) == pytest.approx(2.0, abs=1e-10)
    assert integrate(lambda x: x**-0.7, (0.0, 1.0)) == pytest.approx(CASES["integrate_x_pow_m07"]["expected"], abs=1e-9)
    c = CASES["integrate_exp_cos"]
    assert integrate(lambda x: math.exp(math.cos(x)), (0.0, 2 * math.pi)) == pytest.approx(c["expected"], abs=c["tol"])


def test_integrate_matches_scipy_on_kinked_integrand():
    f = lambda x: abs(math.sin(3 * x)) * math.exp(-x)  # noqa: E731
    ref = sp_integrate.quad(f, 0, 2, points=[math.pi / 3], limit=200, epsabs=1e-13)[0]
    assert integrate(f, (0.0, 2.0), tol=1e-12) == pytest.approx(ref, abs=1e-10)


def test_integrate_budget_exhaustion_reports_estimate():
    with pytest.raises(IntegrationError) as info:
        integrate(lambda x: math.sin(1.0 / x), (1e-6, 1.0), tol=1e-14, max_intervals=64)
    assert math.isfinite(info.value.estimate)


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)
    with pytest.raises(ValueError):
        Interval(math.inf, 2.0)
    assert Interval(0.0, math.inf).contains(1e300)


def test_find_root_and_bracket_error():
    assert find_root(lambda x: x * x - 2.0, (0.0, 2.0)) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert find_root(math.cos, (0.0, 3.0)) == pytest.approx(math.pi / 2, abs=1e-12)
    with pytest.raises(BracketError):
        find_root(lambda x: x * x + 1.0, (-1.0, 1.0))


def test_bisect_monotone_vectorised():
    targets = np.array([0.1, 0.5, 0.9])
    x = bisect_monotone(lambda t: t**3, targets, 0.0, 1.0)
    assert np.allclose(x**3, targets, atol=1e-12)


def test_golden_max():
    assert golden_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0) == pytest.approx(0.3, abs=1e-8)


def test_minimize_bounded_and_free():
    r = minimize(lambda v: (v[0] - 0.45) ** 2 + (v[1] - 7.0) ** 2 + (math.log(v[2]) - 1) ** 2,
                 [0.1, 0.0, 1.0], [Interval(0.0, 0.5), None, Interval(0.0, math.inf)])
    assert r.converged
    assert np.allclose(r.argmin, [0.45, 7.0, math.e], atol=1e-6)


def test_minimize_rejects_infeasible_values():
    r = minimize(lambda v: math.inf if v[0] < 0.2 else (v[0] - 0.2) ** 2, [0.5], [None])
    assert r.argmin[0] >= 0.2 and r.value < 1e-12


def test_minimize_start_outside_bounds():
    with pytest.raises(ValueError):
        minimize(lambda v: 0.0, [2.0], [Interval(0.0, 1.0)])


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 30.0))
def test_bessel_against_scipy(x):
    assert bessel_i0(x) == pytest.approx(special.i0(x), rel=1e-13)
    assert bessel_i1(x) == pytest.approx(special.i1(x), rel=1e-13, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 80.0), st.integers(1, 12))
def test_chi2_against_scipy(x, df):
    ref = stats.chi2.sf(x, df)
    assert chi2_sf(x, df) == pytest.approx(ref, rel=1e-9, abs=1e-15)
