import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sp_integrate

from ecardioid.ec_core import ECParams, cdf, pdf, sample
from ecardioid.moments import (
    SKEW_KURT_HEADER,
    A_integral,
    SeriesConvergenceError,
    SeriesTruncation,
    T_coeff,
    TrigMoment,
    Undefined,
    cdf_series,
    circular_measures,
    first_trig_moment,
    gen_binom,
    measure_to_json,
    measures_from_moments,
    second_trig_moment,
    skew_kurt_grid,
    trig_moment,
    trig_moment_series,
)

from conftest import TWO_PI, load_cases

CASES = load_cases("moments")


def _density_moment(p, order):
    f = lambda t, g: g(order * (t - p.mu)) * float(pdf(t, p))  # noqa: E731
    pts = [p.mu, (p.mu + math.pi) % TWO_PI]
    c = sp_integrate.quad(f, 0, TWO_PI, args=(math.cos,), points=pts, limit=400, epsabs=1e-13)[0]
    s = sp_integrate.quad(f, 0, TWO_PI, args=(math.sin,), points=pts, limit=400, epsabs=1e-13)[0]
    return c, s


@pytest.mark.parametrize("cid", [c for c in CASES if c.startswith("A_")])
def test_A_integral_fixtures(cid):
    case = CASES[cid]
    i = case["inputs"]
    got = A_integral(i["a"], i["b"], i["c"], i["mu"], region=i.get("region"))
    assert got == pytest.approx(case["expected"], abs=case["tol"])


def test_A_integral_regions_partition_the_full_integral():
    for a, b, c, mu in [(0.5, 1, 2, 2.0), (2.0, 0, 3, 1.0), (1.3, 2, 2, 5.2)]:
        whole = A_integral(a, b, c, mu)
        assert A_integral(a, b, c, mu, "M0") + A_integral(a, b, c, mu, "M1") == pytest.approx(whole, abs=1e-9)


def test_A_integral_rejects_bad_arguments():
    with pytest.raises(ValueError):
        A_integral(-1.0, 0, 0, 1.0)
    with pytest.raises(ValueError):
        A_integral(0.0, -1, 0, 1.0)
    with pytest.raises(ValueError):
        A_integral(0.0, 0, 0, 1.0, region="M2")


@pytest.mark.parametrize("cid", [c for c in CASES if c.startswith("T_")])
def test_T_coeff_fixtures(cid):
    case = CASES[cid]
    i = case["inputs"]
    got = T_coeff(i["k"], i["s"], ECParams(i["beta"], i["rho"], i["mu"]))
    assert got == pytest.approx(case["expected"], rel=case["tol"], abs=case["tol"])


def test_T_coeff_range_and_gen_binom():
    with pytest.raises(ValueError):
        T_coeff(2, 3, ECParams(1.0, 0.1, 1.0))
    assert gen_binom(2.0, 3) == 0.0
    assert gen_binom(0.5, 2) == pytest.approx(-0.125)
    assert gen_binom(7.0, 3) == math.comb(7, 3)


def test_cdf_series_examples():
    p = ECParams(2.5, 0.2, 2.0)
    assert abs(cdf_series(math.pi, p) - float(cdf(math.pi, p))) < 1e-6
    for t in (0.3, 2.0, 5.0):
        q = ECParams(3.1, 0.0, 1.0)
        assert cdf_series(t, q) == pytest.approx((t / TWO_PI) ** 3.1, rel=1e-15)
        r = ECParams(2.0, 0.35, 4.0)
        assert cdf_series(t, r, SeriesTruncation(max_k=2)) == pytest.approx(float(cdf(t, r)), abs=1e-14)


def test_cdf_series_refuses_rho_half():
    with pytest.raises(SeriesConvergenceError):
        cdf_series(1.0, ECParams(2.0, 0.5, 1.0))


def test_cdf_series_expanded_sum_agrees_away_from_zero():
    p = ECParams(2.5, 0.2, 2.0)
    for t in (1.5, 3.0, 6.0):
        assert cdf_series(t, p, expanded=True) == pytest.approx(cdf_series(t, p), abs=1e-9)


def test_truncation_validation():
    with pytest.raises(ValueError):
        SeriesTruncation(max_k=0)
    with pytest.raises(ValueError):
        SeriesTruncation(tail_tol=0.0)


@settings(max_examples=60, deadline=None)
@given(beta=st.floats(0.2, 8.0), rho=st.floats(0.0, 0.4), mu=st.floats(0.01, TWO_PI),
       t=st.floats(1e-3, TWO_PI))
def test_cdf_series_matches_closed_form(beta, rho, mu, t):
    p = ECParams(beta, rho, mu)
    assert abs(cdf_series(t, p) - float(cdf(t, p))) <= 1e-6


@pytest.mark.parametrize("cid", [c for c in CASES if c.startswith("moment")])
def test_moment_fixtures(cid):
    case = CASES[cid]
    i = case["inputs"]
    m = trig_moment(ECParams(i["beta"], i["rho"], i["mu"]), i["order"])
    assert (m.alpha, m.beta) == pytest.approx(tuple(case["expected"]), abs=case["tol"])


@pytest.mark.parametrize("rho", [0.0, 0.1, 0.25, 0.5])
@pytest.mark.parametrize("mu", [math.pi / 6, 2.0, 5.0])
def test_cardioid_moments(rho, mu):
    p = ECParams(1.0, rho, mu)
    m1, m2 = first_trig_moment(p), second_trig_moment(p)
    assert (m1.alpha, m1.beta) == pytest.approx((rho, 0.0), abs=1e-10)
    assert (m2.alpha, m2.beta) == pytest.approx((0.0, 0.0), abs=1e-10)


@pytest.mark.parametrize("p", [ECParams(2.0, 0.2, 2.0), ECParams(0.7, 0.45, 3.5), ECParams(6.0, 0.5, 0.4)])
def test_moment_identity_vs_density_quadrature(p):
    for order in (1, 2):
        m = trig_moment(p, order)
        assert (m.alpha, m.beta) == pytest.approx(_density_moment(p, order), abs=1e-8)


@pytest.mark.parametrize("p", [ECParams(2.5, 0.2, 2.0), ECParams(0.5, 0.3, 4.0), ECParams(3.7, 0.4, 5.9)])
def test_series_moments_agree_with_quadrature(p):
    for order in (1, 2):
        a, b = trig_moment_series(p, order), trig_moment(p, order)
        assert (a.alpha, a.beta) == pytest.approx((b.alpha, b.beta), abs=1e-8)


def test_series_moments_reject_unsupported_order():
    with pytest.raises(ValueError):
        trig_moment_series(ECParams(2.0, 0.2, 1.0), 3)


def test_moment_matches_monte_carlo():
    p = ECParams(3.0, 0.35, 2.5)
    x = sample(100_000, p, seed=11)
    emp = float(np.mean(np.cos(x - p.mu)))
    assert abs(emp - first_trig_moment(p).alpha) < 4 / math.sqrt(100_000)


def test_measures_uniform_and_cardioid():
    u = circular_measures(ECParams(1.0, 0.0, 1.0))
    assert u.mean_resultant_length == 0.0 and u.variance == 1.0
    assert isinstance(u.std_dev, Undefined) and isinstance(u.dispersion, Undefined)
    c = circular_measures(ECParams(1.0, 0.25, 1.0))
    assert c.mean_resultant_length == pytest.approx(0.25, abs=1e-10)
    assert c.skewness == pytest.approx(0.0, abs=1e-9)


def test_undefined_sentinels_at_unit_resultant():
    m = measures_from_moments(TrigMoment(1, 1.0, 0.0), TrigMoment(2, 1.0, 0.0))
    assert isinstance(m.skewness, Undefined) and isinstance(m.kurtosis, Undefined)
    assert not m.skewness
    assert measure_to_json(m.kurtosis) == {"undefined": "mean resultant length is one"}
    assert measure_to_json(0.5) == 0.5


LATTICE = [ECParams(b, r, m) for b in (0.3, 1.0, 2.5, 7.0) for r in (0.0, 0.2, 0.5) for m in (0.5, 3.0, 5.5)]


@pytest.mark.parametrize("p", LATTICE)
def test_measures_within_ranges(p):
    m1, m2 = first_trig_moment(p), second_trig_moment(p)
    assert m1.resultant <= 1.0 + 1e-12 and m2.resultant <= 1.0 + 1e-12
    cm = measures_from_moments(m1, m2)
    assert 0.0 <= cm.mean_resultant_length <= 1.0
    assert 0.0 <= cm.variance <= 1.0
    for v in (cm.std_dev, cm.dispersion):
        assert isinstance(v, Undefined) or v >= 0.0
    for v in (cm.skewness, cm.kurtosis):
        assert isinstance(v, Undefined) or math.isfinite(v)


def test_skew_kurt_grid_rows():
    rows = skew_kurt_grid([1.0], [0.1, 0.3], [1.0, 4.0])
    assert len(rows) == 4
    assert all(abs(r.skewness) < 1e-6 for r in rows)
    one = skew_kurt_grid([2.0], [0.2], [2.0])
    assert len(one) == 1 and one[0].defined
    with pytest.raises(ValueError):
        skew_kurt_grid([], [0.1], [1.0])
    assert SKEW_KURT_HEADER == ("beta", "rho", "mu", "skewness", "kurtosis")


def test_skew_kurt_grid_flags_uniform_rows():
    rows = skew_kurt_grid([1.0], [0.0], [1.0])
    assert rows[0].defined  # skewness/kurtosis exist at rho1 = 0
    assert rows[0].skewness == pytest.approx(0.0, abs=1e-12)


def test_ec_reaches_beyond_cardioid_curve():
    # the cardioid sits on skewness 0; exponentiation produces skewed laws
    rows = skew_kurt_grid([0.5, 3.0], [0.3], [1.0, 4.0])
    assert max(abs(r.skewness) for r in rows) > 0.05
