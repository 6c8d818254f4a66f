"""Kuiper and Watson statistics, and the cardioid-vs-EC likelihood-ratio test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .ec_core import _cdf
from .estimation import (
    FitResult,
    Model,
    Sample,
    fit_cardioid_mle,
    fit_ec_mle,
    fit_vonmises_mle,
    vonmises_pdf,
)
from .numerics import NumericsError, chi2_sf, integrate

CdfFn = Callable[[np.ndarray], np.ndarray]


class GofContractError(NumericsError, ValueError):
    """A cdf returned values outside [0, 1]."""


@dataclass(frozen=True)
class GofReport:
    model: Model
    n: int
    kuiper: Optional[float]
    watson: Optional[float]
    fit: Optional[FitResult] = None
    error: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "model": self.model.value,
            "params": None if self.fit is None else self.fit.param_dict(),
            "se": None if self.fit is None or self.fit.se is None else dict(zip(self.fit.names, self.fit.se)),
            "loglik": None if self.fit is None else self.fit.loglik,
            "kuiper": self.kuiper,
            "watson": self.watson,
            "n": self.n,
            "error": self.error,
        }


@dataclass(frozen=True)
class LrtReport:
    statistic: float
    p_value: float
    df: int = 1
    loglik_ec: float = math.nan
    loglik_cardioid: float = math.nan

    def to_json(self) -> dict:
        return {"statistic": self.statistic, "df": self.df, "p_value": self.p_value,
                "loglik_ec": self.loglik_ec, "loglik_cardioid": self.loglik_cardioid}


def _u_values(s: Sample | np.ndarray, F: CdfFn) -> np.ndarray:
    theta = s.sorted_angles if isinstance(s, Sample) else np.sort(np.asarray(s, dtype=float), kind="stable")
    u = np.asarray(F(theta), dtype=float)
    if u.shape != theta.shape or not np.all((u >= 0.0) & (u <= 1.0)):
        raise GofContractError("cdf values must lie in [0, 1]")
    # a cdf is non-decreasing, so sorting the U-values only absorbs rounding
    return np.sort(u, kind="stable")


def kuiper_from_u(u: np.ndarray) -> float:
    u = np.sort(np.asarray(u, dtype=float), kind="stable")
    n = u.size
    if n < 1:
        raise ValueError("need at least one value")
    i = np.arange(1, n + 1)
    d_plus = float(np.max(i / n - u))
    d_minus = float(np.max(u - (i - 1) / n))
    return math.sqrt(n) * (d_plus + d_minus)


def watson_from_u(u: np.ndarray) -> float:
    u = np.sort(np.asarray(u, dtype=float), kind="stable")
    n = u.size
    if n < 1:
        raise ValueError("need at least one value")
    i = np.arange(1, n + 1)
    dev = (u - (i - 0.5) / n) - (float(np.mean(u)) - 0.5)
    return float(np.dot(dev, dev)) + 1.0 / (12.0 * n)


def kuiper_statistic(s: Sample | np.ndarray, F: CdfFn) -> float:
    """Kuiper's V scaled by sqrt(n), from the probability-integral transform."""
    return kuiper_from_u(_u_values(s, F))


def watson_statistic(s: Sample | np.ndarray, F: CdfFn) -> float:
    """Watson's U^2."""
    return watson_from_u(_u_values(s, F))


def vonmises_cdf(theta, kappa: float, mu: float, tol: float = 1e-12) -> np.ndarray:
    """von Mises cdf accumulated from 0+ by adaptive quadrature between sorted points."""
    t = np.atleast_1d(np.asarray(theta, dtype=float))
    order = np.argsort(t, kind="stable")
    out = np.empty_like(t)
    f = lambda x: float(vonmises_pdf(x, kappa, mu))  # noqa: E731
    acc, prev = 0.0, 0.0
    for idx in order:
        x = float(t[idx])
        if x > prev:
            acc += integrate(f, (prev, x), tol=tol)
            prev = x
        out[idx] = min(max(acc, 0.0), 1.0)
    return out if np.ndim(theta) else out[0]


def fitted_cdf(fit: FitResult) -> CdfFn:
    if fit.model is Model.VONMISES:
        kappa, mu = fit.params
        return lambda t: vonmises_cdf(t, kappa, mu)
    p = fit.ec_params()
    return lambda t: _cdf(np.asarray(t, dtype=float), p)


def lrt_from_fits(ec: FitResult, cardioid: FitResult) -> LrtReport:
    if not (ec.converged and cardioid.converged):
        raise NumericsError("likelihood-ratio test needs two converged fits")
    stat = 2.0 * (ec.loglik - cardioid.loglik)
    if stat < -1e-8:
        raise NumericsError(f"nested fit has a larger likelihood than the full model ({stat})")
    stat = max(stat, 0.0)
    return LrtReport(stat, chi2_sf(stat, 1) if stat > 0 else 1.0, 1, ec.loglik, cardioid.loglik)


def lrt_c_vs_ec(s: Sample) -> LrtReport:
    """Likelihood-ratio test of the cardioid (beta = 1) inside the EC family."""
    if s.n < 3:
        raise ValueError("need at least 3 observations")
    return lrt_from_fits(fit_ec_mle(s, with_se=False), fit_cardioid_mle(s, with_se=False))


def gof_compare(s: Sample) -> list[GofReport]:
    """Fit cardioid, EC and von Mises by MLE and score each fit."""
    if s.n < 3:
        raise ValueError("need at least 3 observations")
    reports = []
    for model, fitter in ((Model.CARDIOID, fit_cardioid_mle), (Model.EC, fit_ec_mle),
                          (Model.VONMISES, fit_vonmises_mle)):
        try:
            fit = fitter(s)
            F = fitted_cdf(fit)
            reports.append(GofReport(model, s.n, kuiper_statistic(s, F), watson_statistic(s, F), fit))
        except (NumericsError, ValueError) as exc:
            reports.append(GofReport(model, s.n, None, None, None, str(exc)))
    return reports
