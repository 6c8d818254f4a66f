"""Trigonometric moments and shape measures of the EC law.

Two routes are provided. The primary one integrates the exact cdf against
``p sin(p(theta-mu))`` / ``p cos(p(theta-mu))`` (the integration by parts
identity). The series route expands the cdf in the binomial series and
integrates term by term; it is kept as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .ec_core import ECParams, normalize_angle
from .numerics import TWO_PI, NumericsError, integrate

MOMENT_TOL = 1e-12


class SeriesConvergenceError(NumericsError):
    """The binomial series is not used when it converges only marginally."""


@dataclass(frozen=True)
class Undefined:
    """Tagged placeholder for a measure that does not exist at this parameter point."""

    reason: str

    def __bool__(self) -> bool:
        return False


MeasureValue = Union[float, Undefined]


@dataclass(frozen=True)
class TrigMoment:
    order: int
    alpha: float  # E cos(p(theta - mu))
    beta: float   # E sin(p(theta - mu))

    @property
    def resultant(self) -> float:
        return math.hypot(self.alpha, self.beta)


@dataclass(frozen=True)
class CircularMeasures:
    mean_resultant_length: float
    variance: float
    std_dev: MeasureValue
    dispersion: MeasureValue
    skewness: MeasureValue
    kurtosis: MeasureValue


@dataclass(frozen=True)
class SeriesTruncation:
    max_k: int = 40
    tail_tol: float = 1e-12

    def __post_init__(self):
        if self.max_k < 1:
            raise ValueError("max_k must be at least 1")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")


DEFAULT_TRUNCATION = SeriesTruncation()


def gen_binom(r: float, k: int) -> float:
    """Generalized binomial coefficient r (r-1) ... (r-k+1) / k!."""
    out = 1.0
    for j in range(k):
        out *= (r - j) / (j + 1)
    return out


def T_coeff(k: int, s: int, p: ECParams) -> float:
    """Coefficient T_{k,s} of the double series for the cdf."""
    if not 0 <= s <= k:
        raise ValueError("require 0 <= s <= k")
    return (
        gen_binom(p.beta, k)
        * math.comb(k, s)
        * (1.0 / TWO_PI) ** (p.beta - k)
        * (p.rho / math.pi) ** k
        * math.sin(p.mu) ** s
    )


def _check_series_domain(p: ECParams) -> None:
    if p.rho >= 0.5:
        raise SeriesConvergenceError(
            "series expansion converges only marginally at rho = 0.5; use the closed-form cdf"
        )


def cdf_series(theta: float, p: ECParams, trunc: SeriesTruncation = DEFAULT_TRUNCATION,
               expanded: bool = False) -> float:
    """Partial sum of the binomial double series for the cdf.

    The indicator ``M0 = 1{|sin(theta-mu)| >= |sin mu|}`` picks which of the
    two expansions is used; ``M1`` is its complement. In either branch the
    s-sum of a k-block equals ``(sin(theta-mu) + sin mu)**k`` times the
    s-free part of ``T_{k,s}``, and that collapsed form is evaluated by
    default. ``expanded=True`` sums the s-terms one by one instead; those
    terms alternate and grow like ``theta**-k`` near 0, so the literal sum
    loses all precision for small theta.
    """
    _check_series_domain(p)
    t = normalize_angle(theta)
    x = math.sin(t - p.mu)
    y = math.sin(p.mu)
    m0 = abs(x) >= abs(y)
    # |x + y| = |2 sin(t/2) cos(t/2 - mu)| <= t, so |ratio| <= 2 rho < 1
    ratio = 2.0 * p.rho * (x + y) / t
    lead = (t / TWO_PI) ** p.beta
    total = 0.0
    for k in range(trunc.max_k + 1):
        if expanded:
            block = 0.0
            for s in range(k + 1):
                tks = T_coeff(k, s, p)
                if tks == 0.0:
                    continue
                if m0:
                    block += tks * x ** (k - s)
                else:
                    block += tks * x**s * y ** (k - 2 * s)
            block *= t ** (p.beta - k)
        else:
            block = gen_binom(p.beta, k) * lead * ratio**k
        total += block
        if k >= 1 and abs(block) < trunc.tail_tol:
            bound = abs(gen_binom(p.beta, k + 1)) * lead * (2.0 * p.rho) ** (k + 1) / (1.0 - 2.0 * p.rho)
            if bound < trunc.tail_tol:
                break
    return total


# ---------------------------------------------------------------------------
# A(a, b, c) integrals
# ---------------------------------------------------------------------------

def _region_pieces(mu: float) -> list[tuple[float, float]]:
    # |sin(theta-mu)| = |sin mu| exactly when theta = 0 or theta = 2 mu (mod pi)
    c = math.fmod(2.0 * mu, math.pi)
    cuts = sorted({0.0, math.pi, TWO_PI, c, c + math.pi})
    cuts = [x for x in cuts if 0.0 <= x <= TWO_PI]
    return [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b - a > 1e-15]


def _in_region(theta: float, mu: float, region: str) -> bool:
    m0 = abs(math.sin(theta - mu)) >= abs(math.sin(mu))
    return m0 if region == "M0" else not m0


def _integrate_region(g, mu: float, region: Optional[str], tol: float) -> float:
    if region is None:
        return integrate(g, (0.0, TWO_PI), tol)
    if region not in ("M0", "M1"):
        raise ValueError("region must be None, 'M0' or 'M1'")
    total = 0.0
    pieces = _region_pieces(mu)
    for a, b in pieces:
        if _in_region(0.5 * (a + b), mu, region):
            total += integrate(g, (a, b), tol / len(pieces))
    return total


def A_integral(a: float, b: int, c: int, mu: float, region: Optional[str] = None,
               tol: float = MOMENT_TOL) -> float:
    """A(a, b, c) = integral over (0, 2 pi] of theta^a cos^b(theta-mu) sin^c(theta-mu).

    ``region`` restricts the integral to where ``M0 = 1`` ("M0") or ``M1 = 1``
    ("M1").
    """
    if not a > -1.0:
        raise ValueError("A(a, b, c) diverges for a <= -1")
    if b < 0 or c < 0:
        raise ValueError("b and c must be nonnegative")

    def g(t):
        return t**a * math.cos(t - mu) ** b * math.sin(t - mu) ** c

    return _integrate_region(g, mu, region, tol)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def _cdf_scalar(p: ECParams):
    beta, rho, mu = p.beta, p.rho, p.mu
    smu = math.sin(mu)
    k = rho / math.pi

    def F(t):
        b = t / TWO_PI + k * (math.sin(t - mu) + smu)
        if b <= 0.0:
            return 0.0
        if b >= 1.0:
            return 1.0
        return b**beta

    return F


def trig_moment(p: ECParams, order: int, tol: float = MOMENT_TOL) -> TrigMoment:
    """Central trigonometric moment of the given order via the cdf identity.

    E cos(p(T-mu)) = cos(p mu) + p * int sin(p(t-mu)) F(t) dt
    E sin(p(T-mu)) = -sin(p mu) - p * int cos(p(t-mu)) F(t) dt
    """
    F = _cdf_scalar(p)
    mu = p.mu
    q = order
    ic = integrate(lambda t: math.sin(q * (t - mu)) * F(t), (0.0, TWO_PI), tol)
    is_ = integrate(lambda t: math.cos(q * (t - mu)) * F(t), (0.0, TWO_PI), tol)
    a = math.cos(q * mu) + q * ic
    b = -math.sin(q * mu) - q * is_
    return TrigMoment(order, a, b)


def first_trig_moment(p: ECParams) -> TrigMoment:
    return trig_moment(p, 1)


def second_trig_moment(p: ECParams) -> TrigMoment:
    return trig_moment(p, 2)


def _series_block(k: int, p: ECParams, weight, spec, tol: float) -> float:
    """Contribution of the k-th binomial block to int weight(t) F(t) dt.

    ``spec`` lists ``(coef, cos_power, extra_sin_power)`` triples describing
    the weight as a combination of cos^b sin^c terms. When every
    A(beta-k, ...) converges, the corollary form is applied literally with
    A-integrals restricted to the M0 / M1 regions. For beta - k <= -1 each
    A-integral diverges at 0 and only their sum over s is finite, so the
    block is integrated after summing over s.
    """
    beta, rho, mu = p.beta, p.rho, p.mu
    y = math.sin(mu)
    if beta - k > -1.0:
        total = 0.0
        for s in range(k + 1):
            tks = T_coeff(k, s, p)
            if tks == 0.0:
                continue
            for coef, b, dc in spec:
                total += tks * coef * A_integral(beta - k, b, k - s + dc, mu, "M0", tol)
                if y != 0.0:
                    total += tks * coef * y ** (k - 2 * s) * A_integral(beta - k, b, s + dc, mu, "M1", tol)
        return total
    lead = gen_binom(beta, k) * (1.0 / TWO_PI) ** (beta - k) * (rho / math.pi) ** k
    if lead == 0.0:
        return 0.0

    def g(t):
        # t^(beta-k) (sin(t-mu) + sin mu)^k, arranged to avoid overflow near 0
        return lead * t**beta * ((math.sin(t - mu) + y) / t) ** k * weight(t)

    return integrate(g, (0.0, TWO_PI), tol)


def trig_moment_series(p: ECParams, order: int, trunc: SeriesTruncation = DEFAULT_TRUNCATION,
                       tol: float = 1e-11) -> TrigMoment:
    """Series route for the first or second central trigonometric moment."""
    _check_series_domain(p)
    mu = p.mu
    if order == 1:
        cos_spec, cos_w, cos_scale = [(1.0, 0, 1)], (lambda t: math.sin(t - mu)), 1.0
        sin_spec, sin_w, sin_scale = [(1.0, 1, 0)], (lambda t: math.cos(t - mu)), 1.0
    elif order == 2:
        cos_spec, cos_scale = [(1.0, 1, 1)], 4.0
        cos_w = lambda t: math.sin(t - mu) * math.cos(t - mu)
        sin_spec, sin_scale = [(2.0, 2, 0), (-1.0, 0, 0)], 2.0
        sin_w = lambda t: math.cos(2.0 * (t - mu))
    else:
        raise ValueError("series moments are available for orders 1 and 2")

    def run(spec, weight):
        total = 0.0
        for k in range(trunc.max_k + 1):
            blk = _series_block(k, p, weight, spec, tol)
            total += blk
            gb = gen_binom(p.beta, k)
            if k >= 1 and abs(blk) < trunc.tail_tol:
                if gb == 0.0 or abs(gb) * TWO_PI * (2.0 * p.rho / math.pi) ** k < trunc.tail_tol:
                    break
        return total

    a = math.cos(order * mu) + cos_scale * run(cos_spec, cos_w)
    b = -math.sin(order * mu) - sin_scale * run(sin_spec, sin_w)
    return TrigMoment(order, a, b)


# ---------------------------------------------------------------------------
# Shape measures
# ---------------------------------------------------------------------------

_ZERO_RESULTANT = 1e-12


def measures_from_moments(m1: TrigMoment, m2: TrigMoment) -> CircularMeasures:
    r1 = m1.resultant
    if r1 < _ZERO_RESULTANT:
        r1 = 0.0
    r1 = min(r1, 1.0)
    a2, b2 = m2.alpha, m2.beta
    if r1 > 0.0:
        std_dev: MeasureValue = math.sqrt(-2.0 * math.log(r1))
        dispersion: MeasureValue = (1.0 - a2) / (2.0 * r1 * r1)
    else:
        std_dev = Undefined("mean resultant length is zero")
        dispersion = Undefined("mean resultant length is zero")
    if r1 < 1.0:
        skew: MeasureValue = b2 / (1.0 - r1) ** 1.5
        kurt: MeasureValue = (a2 - r1**4) / (1.0 - r1) ** 2
    else:
        skew = Undefined("mean resultant length is one")
        kurt = Undefined("mean resultant length is one")
    return CircularMeasures(r1, 1.0 - r1, std_dev, dispersion, skew, kurt)


def circular_measures(p: ECParams) -> CircularMeasures:
    """Mean resultant length, circular variance, std dev, dispersion, skewness, kurtosis."""
    return measures_from_moments(first_trig_moment(p), second_trig_moment(p))


@dataclass(frozen=True)
class SkewKurtRow:
    beta: float
    rho: float
    mu: float
    skewness: MeasureValue
    kurtosis: MeasureValue

    @property
    def defined(self) -> bool:
        return not isinstance(self.skewness, Undefined) and not isinstance(self.kurtosis, Undefined)


def skew_kurt_grid(beta_grid: Iterable[float], rho_grid: Iterable[float],
                   mu_grid: Iterable[float]) -> list[SkewKurtRow]:
    """Skewness and kurtosis over a parameter lattice, ordered beta, rho, mu."""
    betas, rhos, mus = list(beta_grid), list(rho_grid), list(mu_grid)
    if not (betas and rhos and mus):
        raise ValueError("grids must be non-empty")
    rows = []
    for b in betas:
        for r in rhos:
            for m in mus:
                p = ECParams.normalized(b, r, m)
                cm = circular_measures(p)
                rows.append(SkewKurtRow(b, r, m, cm.skewness, cm.kurtosis))
    return rows


SKEW_KURT_HEADER = ("beta", "rho", "mu", "skewness", "kurtosis")


def measure_to_json(v: MeasureValue):
    if isinstance(v, Undefined):
        return {"undefined": v.reason}
    return v
