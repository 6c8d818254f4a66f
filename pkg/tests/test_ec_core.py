import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecardioid.ec_core import (
    QUANTILE_BRANCH_EDGES,
    ECParams,
    cardioid_base,
    cdf,
    log_pdf,
    make_rng,
    normalize_angle,
    pdf,
    quantile_approx,
    quantile_approx_constants,
    quantile_approx_details,
    quantile_exact,
    sample,
    sample_with_rng,
)

from conftest import TWO_PI, load_cases

CASES = load_cases("ec_core")

params_st = st.builds(
    ECParams,
    st.floats(0.1, 12.0),
    st.floats(0.0, 0.5),
    st.floats(1e-3, TWO_PI),
)


def _p(inp):
    return ECParams(inp["beta"], inp["rho"], inp["mu"])


def test_params_validation():
    for bad in ((0.0, 0.2, 1.0), (1.0, 0.6, 1.0), (1.0, -0.1, 1.0), (1.0, 0.2, 0.0), (1.0, 0.2, 7.0)):
        with pytest.raises(ValueError):
            ECParams(*bad)
    assert ECParams.normalized(1.0, 0.2, 0.0).mu == TWO_PI
    assert ECParams.normalized(1.0, 0.2, -1.0).mu == pytest.approx(TWO_PI - 1.0)


def test_normalize_angle_support_convention():
    assert normalize_angle(0.0) == TWO_PI
    assert normalize_angle(TWO_PI) == TWO_PI
    assert normalize_angle(-math.pi) == pytest.approx(math.pi)
    assert np.allclose(normalize_angle([0.0, 7.0]), [TWO_PI, 7.0 - TWO_PI])


def test_published_cdf_point():
    c = CASES["cdf_pi_2_02_2"]
    assert cdf(math.pi, ECParams(2, 0.2, 2)) == pytest.approx(c["expected"], abs=c["tol"])
    assert cdf(math.pi, ECParams(2, 0.2, 2)) == pytest.approx(0.379179, abs=1e-6)
    assert cardioid_base(math.pi, 0.2, 2.0) == pytest.approx(CASES["cardioid_base_pi_02_2"]["expected"], abs=1e-14)


@pytest.mark.parametrize("cid", [c for c in CASES if c.startswith(("cdf_", "pdf_")) and c.count("_") > 3])
def test_cdf_pdf_fixtures(cid):
    case = CASES[cid]
    p = _p(case["inputs"])
    fn = cdf if cid.startswith("cdf") else pdf
    got = float(fn(case["inputs"]["theta"], p))
    assert got == pytest.approx(case["expected"], rel=case["tol"], abs=case["tol"])


@pytest.mark.parametrize("cid", [c for c in CASES if c.startswith("quantile_") and c.count("_") > 3])
def test_quantile_exact_fixtures(cid):
    case = CASES[cid]
    got = quantile_exact(case["inputs"]["alpha"], _p(case["inputs"]))
    assert got == pytest.approx(case["expected"], abs=case["tol"])


def test_trivial_cases():
    assert cdf(TWO_PI, ECParams(3, 0.3, 1)) == pytest.approx(1.0, abs=1e-14)
    assert cdf(0.0, ECParams(3, 0.3, 1)) == pytest.approx(1.0, abs=1e-14)  # 0 is 2 pi
    assert quantile_exact(0.5, ECParams(1, 0.0, TWO_PI)) == pytest.approx(math.pi, abs=1e-12)
    assert quantile_exact(1.0, ECParams(2, 0.2, 2)) == TWO_PI
    # beta = 1 is the cardioid
    t = np.linspace(0.1, TWO_PI, 50)
    assert np.allclose(pdf(t, ECParams(1, 0.3, 2)), (1 + 0.6 * np.cos(t - 2)) / TWO_PI)


def test_quantile_domain():
    with pytest.raises(ValueError):
        quantile_exact(0.0, ECParams(1, 0.2, 1))
    with pytest.raises(ValueError):
        quantile_approx(1.5, ECParams(1, 0.2, 1))


def test_log_pdf_matches_pdf_and_zero_density():
    p = ECParams(2.5, 0.3, 4.0)
    t = np.linspace(0.05, TWO_PI, 200)
    assert np.allclose(log_pdf(t, p), np.log(pdf(t, p)), atol=1e-12)
    # rho = 1/2 puts a zero of the density at mu + pi
    assert log_pdf(1.0 + math.pi, ECParams(1.0, 0.5, 1.0)) == -math.inf


def test_quantile_approx_uniform_and_cardioid_linear_branch():
    # rho = 0 reduces every linear branch to 2 pi alpha**(1/beta)
    p = ECParams(2.0, 0.0, 3.0)
    for a in (0.1, 0.5, 0.9):
        assert quantile_approx(a, p) == pytest.approx(TWO_PI * math.sqrt(a), abs=1e-12)


def test_quantile_approx_second_branch_root_solves_its_quadratic():
    p = ECParams(1.5, 0.3, 2.0)
    a = 0.4
    k = quantile_approx_constants(a, p)
    q = (math.pi / p.rho) * (k.D - math.sqrt(k.E))
    # (rho/(2 pi)) q^2 - D q + (pi/(2 rho)) (D^2 - E) = 0
    resid = (p.rho / (2 * math.pi)) * q * q - k.D * q + (math.pi / (2 * p.rho)) * (k.D**2 - k.E)
    assert abs(resid) < 1e-12


def test_quantile_approx_branch_details():
    p = ECParams(2.0, 0.2, 2.0)
    det = quantile_approx_details(0.5, p)
    assert det.self_consistent
    lo, hi = QUANTILE_BRANCH_EDGES[det.branch - 1], QUANTILE_BRANCH_EDGES[det.branch]
    assert any(c.self_consistent and c.branch == det.branch for c in det.candidates)
    m = next(c.mu_rep for c in det.candidates if c.self_consistent and c.value == det.value)
    assert lo <= det.value - m <= hi
    assert abs(det.value - quantile_exact(0.5, p)) < 0.08


def test_sampling_deterministic_and_in_support():
    p = ECParams(2.0, 0.3, 1.0)
    a, b = sample(500, p, seed=11), sample(500, p, seed=11)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample(500, p, seed=12))
    assert np.all((a > 0) & (a <= TWO_PI))
    rng = make_rng([3, 4])
    assert sample_with_rng(5, p, rng).shape == (5,)
    with pytest.raises(ValueError):
        sample(0, p)


def test_sampling_matches_cdf_kolmogorov():
    p = ECParams(4.0, 0.5, math.pi / 3)
    x = np.sort(sample(20000, p, seed=1))
    u = cdf(x, p)
    ecdf = np.arange(1, x.size + 1) / x.size
    assert np.max(np.abs(ecdf - u)) < 1.63 / math.sqrt(x.size)  # 1% KS critical value


@settings(max_examples=40, deadline=None)
@given(params_st)
def test_cdf_monotone_on_fine_grid(p):
    t = np.linspace(1e-9, TWO_PI, 10_000)
    F = cdf(t, p)
    assert np.all(np.diff(F) >= -1e-15)
    assert F[-1] == pytest.approx(1.0, abs=1e-14)
    assert np.all((F >= 0) & (F <= 1))


@settings(max_examples=40, deadline=None)
@given(params_st, st.floats(1e-6, 1.0))
def test_quantile_roundtrip(p, a):
    q = quantile_exact(a, p)
    assert 0 < q <= TWO_PI
    assert abs(float(cdf(q, p)) - a) <= 1e-8
