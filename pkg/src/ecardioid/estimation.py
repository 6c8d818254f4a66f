"""Fitting the EC law and its two baselines (cardioid, von Mises).

EC fits come in two flavours: maximum likelihood with ``beta`` profiled out
in closed form, and quadratic least squares (QLSE) on the empirical cdf.
Both search ``(rho, mu)`` or ``(beta, rho, mu)`` with a bounded Nelder-Mead
from a fixed lattice of starting points. ``mu`` is treated as a free
coordinate during the search and folded onto (0, 2*pi] afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .ec_core import ECParams, normalize_angle
from .numerics import TWO_PI, Interval, NumericsError, bessel_i0, bessel_i1, find_root, minimize

RHO_BOUND = Interval(0.0, 0.5)
POSITIVE = Interval(0.0, math.inf)
START_RHOS = (0.1, 0.25, 0.4)
START_MUS = (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4)
LOG_TWO_PI = math.log(TWO_PI)

# screening pass from every start, then one tight polish of the best
SCREEN_TOL = 1e-4
POLISH_TOL = 1e-10


class Model(str, Enum):
    EC = "EC"
    CARDIOID = "Cardioid"
    VONMISES = "VonMises"


class Method(str, Enum):
    MLE = "MLE"
    QLSE = "QLSE"


PARAM_NAMES = {
    Model.EC: ("beta", "rho", "mu"),
    Model.CARDIOID: ("rho", "mu"),
    Model.VONMISES: ("kappa", "mu"),
}


class ProfileUndefined(NumericsError, ValueError):
    """The closed-form beta does not exist at this (rho, mu)."""


@dataclass(frozen=True)
class Sample:
    """Angles on (0, 2*pi]; construct with :meth:`from_angles` to fold raw input."""

    angles: np.ndarray
    sorted_angles: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = np.array(self.angles, dtype=float).ravel()
        if a.size < 2:
            raise ValueError("a sample needs at least two angles")
        if not np.all(np.isfinite(a)) or np.any(a <= 0.0) or np.any(a > TWO_PI):
            raise ValueError("angles must lie in (0, 2pi]")
        a.setflags(write=False)
        srt = np.sort(a, kind="stable")
        srt.setflags(write=False)
        object.__setattr__(self, "angles", a)
        object.__setattr__(self, "sorted_angles", srt)

    @classmethod
    def from_angles(cls, values: Sequence[float]) -> "Sample":
        return cls(np.atleast_1d(normalize_angle(np.asarray(values, dtype=float))))

    @property
    def n(self) -> int:
        return int(self.angles.size)


@dataclass(frozen=True)
class StandardErrors:
    values: Optional[tuple[float, ...]]
    diagnostic: str = ""


@dataclass(frozen=True)
class FitResult:
    model: Model
    method: Method
    params: tuple[float, ...]
    se: Optional[tuple[float, ...]]
    loglik: float
    converged: bool
    iterations: int
    residuals: tuple[float, ...] = ()
    diagnostic: str = ""

    @property
    def names(self) -> tuple[str, ...]:
        return PARAM_NAMES[self.model]

    def param_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.params))

    def ec_params(self) -> ECParams:
        if self.model is Model.EC:
            return ECParams(*self.params)
        if self.model is Model.CARDIOID:
            return ECParams(1.0, *self.params)
        raise TypeError("von Mises fits have no EC parameterisation")

    def to_json(self) -> dict:
        return {
            "model": self.model.value,
            "method": self.method.value,
            "params": self.param_dict(),
            "se": None if self.se is None else dict(zip(self.names, self.se)),
            "loglik": self.loglik,
            "converged": self.converged,
            "iterations": self.iterations,
        }


# ---------------------------------------------------------------------------
# Likelihood pieces
# ---------------------------------------------------------------------------

def _terms(theta: np.ndarray, rho: float, mu: float):
    d = theta - mu
    sin_d = np.sin(d)
    cos_d = np.cos(d)
    base = theta / TWO_PI + (rho / math.pi) * (sin_d + math.sin(mu))
    c = 1.0 + 2.0 * rho * cos_d
    return base, c, sin_d, cos_d


def _ec_loglik(theta: np.ndarray, beta: float, rho: float, mu: float) -> float:
    # no domain validation: also used by finite differences at the boundary
    base, c, _, _ = _terms(theta, rho, mu)
    if beta <= 0 or np.any(base <= 0.0) or np.any(c <= 0.0):
        return -math.inf
    n = theta.size
    sum_log_base = float(np.sum(np.log(base))) if beta != 1.0 else 0.0
    return n * math.log(beta) + (beta - 1.0) * sum_log_base - n * LOG_TWO_PI + float(np.sum(np.log(c)))


def ec_loglik(s: Sample, p: ECParams) -> float:
    """EC log-likelihood; ``-inf`` when some observation has zero density."""
    return _ec_loglik(s.angles, p.beta, p.rho, p.mu)


def _profile(theta: np.ndarray, rho: float, mu: float) -> tuple[float, float]:
    """(beta_hat, profiled log-likelihood) or raise ProfileUndefined."""
    base, c, _, _ = _terms(theta, rho, mu)
    if np.any(base <= 0.0) or np.any(base > 1.0):
        raise ProfileUndefined(f"cardioid base leaves (0, 1] at rho={rho}, mu={mu}")
    sum_log_base = float(np.sum(np.log(base)))
    if not sum_log_base < 0.0:
        raise ProfileUndefined("sum of log base is not negative")
    n = theta.size
    beta = -n / sum_log_base
    if np.any(c <= 0.0):
        return beta, -math.inf
    ll = n * math.log(beta) - n - sum_log_base - n * LOG_TWO_PI + float(np.sum(np.log(c)))
    return beta, ll


def profile_beta(s: Sample, rho: float, mu: float) -> float:
    """Closed-form maximiser of the likelihood in ``beta`` at fixed ``(rho, mu)``."""
    return _profile(s.angles, rho, mu)[0]


def ec_score(s: Sample, p: ECParams) -> tuple[float, float, float]:
    """Gradient of the EC log-likelihood in (beta, rho, mu)."""
    beta, rho, mu = p.as_tuple()
    base, c, sin_d, cos_d = _terms(s.angles, rho, mu)
    d_base_rho = (sin_d + math.sin(mu)) / math.pi
    d_base_mu = (rho / math.pi) * (math.cos(mu) - cos_d)
    g_beta = s.n / beta + float(np.sum(np.log(base)))
    g_rho = (beta - 1.0) * float(np.sum(d_base_rho / base)) + float(np.sum(2.0 * cos_d / c))
    g_mu = (beta - 1.0) * float(np.sum(d_base_mu / base)) + float(np.sum(2.0 * rho * sin_d / c))
    return g_beta, g_rho, g_mu


# ---------------------------------------------------------------------------
# Standard errors
# ---------------------------------------------------------------------------

def numerical_hessian(fun: Callable[[np.ndarray], float], x: Sequence[float],
                      bounds: Sequence[Optional[Interval]] = ()) -> np.ndarray:
    """Central-difference Hessian with per-coordinate step max(1e-5, 1e-5|x|).

    A coordinate closer than one step to a finite bound is nudged inward so
    every stencil point stays in the domain.
    """
    x = np.array(x, dtype=float)
    dim = x.size
    h = np.maximum(1e-5, 1e-5 * np.abs(x))
    for i, bd in enumerate(list(bounds) + [None] * (dim - len(bounds))):
        if bd is None:
            continue
        x[i] = min(max(x[i], bd.lo + h[i]), bd.hi - h[i])
    f0 = fun(x)
    H = np.empty((dim, dim))
    for i in range(dim):
        ei = np.zeros(dim)
        ei[i] = h[i]
        H[i, i] = (fun(x + ei) - 2.0 * f0 + fun(x - ei)) / (h[i] * h[i])
        for j in range(i):
            ej = np.zeros(dim)
            ej[j] = h[j]
            H[i, j] = H[j, i] = (
                fun(x + ei + ej) - fun(x + ei - ej) - fun(x - ei + ej) + fun(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return H


def _se_from_loglik(fun, x, bounds) -> StandardErrors:
    H = numerical_hessian(fun, x, bounds)
    if not np.all(np.isfinite(H)):
        return StandardErrors(None, "log-likelihood not finite around the estimate")
    info = -H
    try:
        np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        return StandardErrors(None, "observed information is not positive definite")
    cov = np.linalg.inv(info)
    return StandardErrors(tuple(float(math.sqrt(v)) for v in np.diag(cov)))


def standard_errors(s: Sample, p: ECParams) -> StandardErrors:
    """Standard errors from the inverse observed information of ``ec_loglik``."""
    theta = s.angles
    return _se_from_loglik(lambda v: _ec_loglik(theta, *v), p.as_tuple(), (POSITIVE, RHO_BOUND, None))


# ---------------------------------------------------------------------------
# Multi-start driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Search:
    x: np.ndarray
    value: float
    converged: bool
    iterations: int


def _multistart(objective, starts, bounds, screen_iter: int, polish_iter: int = 4000) -> _Search:
    """Loose search from every start, then a tight polish of the best one.

    Ties between starts go to the earlier start.
    """
    screened = []
    iterations = 0
    for x0 in starts:
        r = minimize(objective, x0, bounds, tol=SCREEN_TOL, max_iter=screen_iter)
        iterations += r.iterations
        screened.append(r)
    best = min(range(len(screened)), key=lambda i: (screened[i].value, i))
    r0 = screened[best]
    if not math.isfinite(r0.value):
        return _Search(r0.argmin, r0.value, False, iterations)
    x0 = list(r0.argmin)
    for i, bd in enumerate(bounds):
        if bd is not None and not bd.contains(x0[i]):
            x0[i] = min(max(x0[i], bd.lo + 1e-12), bd.hi - 1e-12)
    r = minimize(objective, x0, bounds, tol=POLISH_TOL, max_iter=polish_iter, initial_step=0.05)
    iterations += r.iterations
    if r.value > r0.value:
        return _Search(r0.argmin, r0.value, False, iterations)
    return _Search(r.argmin, r.value, r.converged, iterations)


def _start_lattice(starts: int) -> list[tuple[float, float]]:
    lattice = [(r, m) for r in START_RHOS for m in START_MUS]
    if not 1 <= starts <= len(lattice):
        raise ValueError(f"starts must be between 1 and {len(lattice)}")
    return lattice[:starts]


def _check_n(s: Sample, minimum: int) -> None:
    if s.n < minimum:
        raise ValueError(f"need at least {minimum} observations, got {s.n}")


# ---------------------------------------------------------------------------
# EC fits
# ---------------------------------------------------------------------------

def fit_ec_mle(s: Sample, starts: int = 12, seed: int = 0, with_se: bool = True,
               screen_iter: int = 150) -> FitResult:
    """Profile-likelihood MLE.

    ``seed`` is accepted for interface symmetry; the start lattice is fixed,
    so the fit is deterministic.
    """
    del seed
    _check_n(s, 3)
    theta = s.angles

    def objective(v):
        try:
            return -_profile(theta, v[0], v[1])[1]
        except ProfileUndefined:
            return math.inf

    search = _multistart(objective, _start_lattice(starts), [RHO_BOUND, None], screen_iter)
    rho, mu = float(search.x[0]), normalize_angle(float(search.x[1]))
    if not math.isfinite(search.value):
        return FitResult(Model.EC, Method.MLE, (1.0, rho, mu), None, -math.inf, False,
                         search.iterations, diagnostic="no start produced a finite likelihood")
    beta = profile_beta(s, rho, mu)
    p = ECParams(beta, rho, mu)
    se = standard_errors(s, p) if with_se else StandardErrors(None, "not requested")
    return FitResult(Model.EC, Method.MLE, p.as_tuple(), se.values, ec_loglik(s, p),
                     search.converged, search.iterations, ec_score(s, p), se.diagnostic)


def fit_ec_full_mle(s: Sample, starts: int = 12, with_se: bool = False,
                    screen_iter: int = 250) -> FitResult:
    """MLE over all three parameters jointly, without profiling ``beta``.

    Every start uses ``beta = 1``.
    """
    _check_n(s, 3)
    theta = s.angles

    def objective(v):
        return -_ec_loglik(theta, v[0], v[1], v[2])

    lattice = [(1.0, r, m) for r, m in _start_lattice(starts)]
    search = _multistart(objective, lattice, [POSITIVE, RHO_BOUND, None], screen_iter)
    beta, rho, mu = float(search.x[0]), float(search.x[1]), normalize_angle(float(search.x[2]))
    p = ECParams(beta, rho, mu)
    se = standard_errors(s, p) if with_se else StandardErrors(None, "not requested")
    return FitResult(Model.EC, Method.MLE, p.as_tuple(), se.values, ec_loglik(s, p),
                     search.converged and math.isfinite(search.value), search.iterations,
                     ec_score(s, p), se.diagnostic)


def _qlse_parts(sorted_theta: np.ndarray, beta: float, rho: float, mu: float):
    base, _, sin_d, cos_d = _terms(sorted_theta, rho, mu)
    base = np.clip(base, 0.0, 1.0)
    F = base**beta
    target = np.arange(1, sorted_theta.size + 1) / sorted_theta.size
    return target - F, F, base, sin_d, cos_d


def qlse_goal(s: Sample, p: ECParams) -> float:
    """Sum of squared gaps between ``i/n`` and the cdf at the i-th order statistic."""
    resid = _qlse_parts(s.sorted_angles, *p.as_tuple())[0]
    return float(np.dot(resid, resid))


def qlse_gradient(s: Sample, p: ECParams) -> tuple[float, float, float]:
    """Analytic gradient of :func:`qlse_goal` in (beta, rho, mu)."""
    beta, rho, mu = p.as_tuple()
    resid, F, base, sin_d, cos_d = _qlse_parts(s.sorted_angles, beta, rho, mu)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_base = np.where(base > 0.0, np.log(base), 0.0)
        dF_dbase = np.where(base > 0.0, beta * F / base, 0.0)
    d_beta = F * log_base
    d_rho = dF_dbase * (sin_d + math.sin(mu)) / math.pi
    d_mu = dF_dbase * (rho / math.pi) * (math.cos(mu) - cos_d)
    return tuple(float(-2.0 * np.dot(resid, d)) for d in (d_beta, d_rho, d_mu))


def fit_ec_qlse(s: Sample, starts: int = 12, with_se: bool = True,
                screen_iter: int = 200) -> FitResult:
    """Least-squares fit of the cdf to the plotting positions ``i/n``.

    Each start takes ``beta`` from the closed-form profile at its
    ``(rho, mu)``. Reported standard errors come from the observed
    information of the likelihood at the QLSE point.
    """
    _check_n(s, 3)
    srt = s.sorted_angles
    target = np.arange(1, s.n + 1) / s.n

    def objective(v):
        beta, rho, mu = v
        base = srt / TWO_PI + (rho / math.pi) * (np.sin(srt - mu) + math.sin(mu))
        r = target - np.clip(base, 0.0, 1.0) ** beta
        return float(np.dot(r, r))

    lattice = []
    for rho0, mu0 in _start_lattice(starts):
        try:
            beta0 = profile_beta(s, rho0, mu0)
        except ProfileUndefined:
            beta0 = 1.0
        lattice.append((min(max(beta0, 1e-3), 1e3), rho0, mu0))
    search = _multistart(objective, lattice, [POSITIVE, RHO_BOUND, None], screen_iter)
    p = ECParams(float(search.x[0]), float(search.x[1]), normalize_angle(float(search.x[2])))
    se = standard_errors(s, p) if with_se else StandardErrors(None, "not requested")
    return FitResult(Model.EC, Method.QLSE, p.as_tuple(), se.values, ec_loglik(s, p),
                     search.converged, search.iterations, qlse_gradient(s, p), se.diagnostic)


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------

def _cardioid_loglik(theta: np.ndarray, rho: float, mu: float) -> float:
    c = 1.0 + 2.0 * rho * np.cos(theta - mu)
    if np.any(c <= 0.0):
        return -math.inf
    return float(np.sum(np.log(c))) - theta.size * LOG_TWO_PI


def cardioid_loglik(s: Sample, rho: float, mu: float) -> float:
    return _cardioid_loglik(s.angles, rho, mu)


def fit_cardioid_mle(s: Sample, starts: int = 12, with_se: bool = True) -> FitResult:
    _check_n(s, 2)
    theta = s.angles
    search = _multistart(lambda v: -_cardioid_loglik(theta, v[0], v[1]),
                         _start_lattice(starts), [RHO_BOUND, None], screen_iter=150)
    rho, mu = float(search.x[0]), normalize_angle(float(search.x[1]))
    se = (_se_from_loglik(lambda v: _cardioid_loglik(theta, *v), (rho, mu), (RHO_BOUND, None))
          if with_se else StandardErrors(None, "not requested"))
    return FitResult(Model.CARDIOID, Method.MLE, (rho, mu), se.values, _cardioid_loglik(theta, rho, mu),
                     search.converged and math.isfinite(search.value), search.iterations,
                     diagnostic=se.diagnostic)


def vonmises_pdf(theta, kappa: float, mu: float):
    return np.exp(kappa * np.cos(np.asarray(theta, dtype=float) - mu)) / (TWO_PI * bessel_i0(kappa))


def _vonmises_loglik(theta: np.ndarray, kappa: float, mu: float) -> float:
    if kappa < 0:
        return -math.inf
    return kappa * float(np.sum(np.cos(theta - mu))) - theta.size * math.log(TWO_PI * bessel_i0(kappa))


def vonmises_loglik(s: Sample, kappa: float, mu: float) -> float:
    return _vonmises_loglik(s.angles, kappa, mu)


def bessel_ratio(kappa: float) -> float:
    """I1(kappa) / I0(kappa)."""
    return bessel_i1(kappa) / bessel_i0(kappa)


def fit_vonmises_mle(s: Sample, with_se: bool = True) -> FitResult:
    """Closed-form direction and Bessel-ratio concentration."""
    _check_n(s, 2)
    theta = s.angles
    C, S = float(np.sum(np.cos(theta))), float(np.sum(np.sin(theta)))
    r_bar = math.hypot(C, S) / s.n
    if r_bar < 1e-14:
        kappa, mu = 0.0, TWO_PI
    else:
        mu = normalize_angle(math.atan2(S, C))
        kappa = find_root(lambda k: bessel_ratio(k) - r_bar, (0.0, 500.0), tol=1e-14)
    se = StandardErrors(None, "not requested")
    if with_se:
        se = (_se_from_loglik(lambda v: _vonmises_loglik(theta, *v), (kappa, mu), (POSITIVE, None))
              if kappa > 0 else StandardErrors(None, "concentration at its lower bound"))
    return FitResult(Model.VONMISES, Method.MLE, (kappa, mu), se.values, _vonmises_loglik(theta, kappa, mu),
                     True, 0, (bessel_ratio(kappa) - r_bar,), se.diagnostic)


def fit_model(s: Sample, model: Model | str, method: Method | str = Method.MLE, **kw) -> FitResult:
    model, method = Model(model), Method(method)
    if model is Model.EC:
        return fit_ec_mle(s, **kw) if method is Method.MLE else fit_ec_qlse(s, **kw)
    if method is not Method.MLE:
        raise ValueError(f"{model.value} is fitted by MLE only")
    return fit_cardioid_mle(s, **kw) if model is Model.CARDIOID else fit_vonmises_mle(s, **kw)

