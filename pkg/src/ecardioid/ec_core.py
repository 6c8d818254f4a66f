"""The exponentiated cardioid (EC) law on the support (0, 2*pi].

The cdf is the cardioid cdf raised to a power ``beta > 0``::

    F(theta) = {theta/(2 pi) + (rho/pi) [sin(theta - mu) + sin(mu)]} ** beta

``beta = 1`` recovers the cardioid and ``beta = 1, rho = 0`` the circular
uniform. Evaluation functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import TWO_PI, bisect_monotone, find_root

# branch intervals for (Q - mu) used by the quantile approximation
QUANTILE_BRANCH_EDGES = (0.0, 0.60, 2.62, 3.64, 5.76, 6.28)


def normalize_angle(theta):
    """Reduce angles modulo 2*pi onto (0, 2*pi]; an exact 0 maps to 2*pi."""
    t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    t = np.where(t == 0.0, TWO_PI, t)
    if np.ndim(t) == 0:
        return float(t)
    return t


@dataclass(frozen=True)
class ECParams:
    """Parameter triple of the EC law: shape ``beta``, concentration ``rho``, location ``mu``."""

    beta: float
    rho: float
    mu: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not (0.0 <= self.rho <= 0.5):
            raise ValueError(f"rho must lie in [0, 0.5], got {self.rho}")
        if not (0.0 < self.mu <= TWO_PI):
            raise ValueError(f"mu must lie in (0, 2pi], got {self.mu}")

    @classmethod
    def normalized(cls, beta: float, rho: float, mu: float) -> "ECParams":
        """Build parameters after folding ``mu`` onto (0, 2*pi]."""
        return cls(float(beta), float(rho), normalize_angle(mu))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.beta, self.rho, self.mu)


def _base(theta, rho, mu):
    return theta / TWO_PI + (rho / math.pi) * (np.sin(theta - mu) + math.sin(mu))


def cardioid_base(theta, rho: float, mu: float):
    """Cardioid cdf ``theta/(2 pi) + (rho/pi)[sin(theta-mu) + sin mu]`` on (0, 2*pi]."""
    return _base(normalize_angle(theta), rho, mu)


def cardioid_pdf(theta, rho: float, mu: float):
    return (1.0 + 2.0 * rho * np.cos(np.asarray(theta, dtype=float) - mu)) / TWO_PI


def _cdf(theta, p: ECParams):
    b = np.clip(_base(theta, p.rho, p.mu), 0.0, 1.0)
    return b**p.beta


def cdf(theta, p: ECParams):
    """EC cumulative distribution function."""
    return _cdf(normalize_angle(theta), p)


def _pdf(theta, p: ECParams):
    b = np.clip(_base(theta, p.rho, p.mu), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return b ** (p.beta - 1.0) * (p.beta / TWO_PI) * (1.0 + 2.0 * p.rho * np.cos(theta - p.mu))


def pdf(theta, p: ECParams):
    """EC density.

    For ``beta < 1`` the density diverges as theta -> 0+; the formula value is
    returned for every theta > 0 (it is ``inf`` only where the base is 0).
    """
    return _pdf(normalize_angle(theta), p)


def log_pdf(theta, p: ECParams):
    """Log density; ``-inf`` wherever the density vanishes."""
    t = normalize_angle(theta)
    b = np.clip(_base(t, p.rho, p.mu), 0.0, 1.0)
    c = 1.0 + 2.0 * p.rho * np.cos(t - p.mu)
    with np.errstate(divide="ignore", invalid="ignore"):
        shape_term = 0.0 if p.beta == 1.0 else (p.beta - 1.0) * np.log(b)
        out = math.log(p.beta) - math.log(TWO_PI) + shape_term + np.log(np.clip(c, 0.0, None))
    out = np.where(c <= 0.0, -np.inf, out)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Quantiles
# ---------------------------------------------------------------------------

def quantile_exact(alpha: float, p: ECParams, tol: float = 1e-14) -> float:
    """Invert the cdf by bracketed root finding on (0, 2*pi].

    The equation ``base(theta) = alpha**(1/beta)`` is solved in ``log theta``
    so the root keeps full relative precision when it sits very close to 0
    (small ``beta``).
    """
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1.0:
        return TWO_PI
    target = alpha ** (1.0 / p.beta)
    if target == 0.0:
        raise ValueError(f"quantile at alpha={alpha} underflows for beta={p.beta}")

    def g(u):
        return float(_base(math.exp(u), p.rho, p.mu)) - target

    lo = math.log(target) - 10.0  # base(theta) <= theta for rho <= 1/2 only up to a factor (1 + 2 rho)
    while g(lo) > 0.0 and lo > -745.0:
        lo -= 10.0
    return math.exp(find_root(g, (max(lo, -745.0), math.log(TWO_PI)), tol=tol))


@dataclass(frozen=True)
class QuantileApproxConstants:
    """Auxiliary constants of the two quadratic (Taylor) branches."""

    C: float
    D: float
    E: float
    F: float
    G: float
    H: float


def quantile_approx_constants(alpha: float, p: ECParams, mu: Optional[float] = None) -> QuantileApproxConstants:
    """Constants for the quadratic branches at location representative ``mu``.

    ``F`` carries a ``5*pi/4`` term: expanding the second order Taylor
    polynomial of sine about 3*pi/2 gives ``(rho/pi)(16 - 10 pi^2)/8``, i.e.
    ``-rho * 5*pi/4``.
    """
    rho = p.rho
    m = p.mu if mu is None else mu
    s = alpha ** (1.0 / p.beta)
    pi = math.pi
    C = s - (rho / pi) * (math.sin(m) - 0.5 * m * (pi + m) + (8.0 - pi * pi) / 8.0)
    D = (1.0 + pi * rho + 2.0 * rho * m) / (2.0 * pi)
    E = D * D - 2.0 * rho * C / pi
    G = D - 2.0 * rho * (1.0 + m / pi)
    F = C - rho * ((m * m - 2.0) / pi + (8.0 * m + 5.0 * pi) / 4.0)
    H = G * G + 2.0 * rho * F / pi
    return QuantileApproxConstants(C, D, E, F, G, H)


@dataclass(frozen=True)
class QuantileCandidate:
    branch: int          # 1..5
    mu_rep: float        # location representative used (mu or mu - 2 pi)
    value: float
    self_consistent: bool


@dataclass(frozen=True)
class QuantileApprox:
    value: float
    branch: int
    self_consistent: bool
    candidates: tuple[QuantileCandidate, ...] = field(default=())


def _branch_candidates(alpha: float, p: ECParams) -> list[QuantileCandidate]:
    rho = p.rho
    s = alpha ** (1.0 / p.beta)
    pi = math.pi
    out = []
    # Q - mu is only meaningful modulo 2 pi; the formulas are applied with the
    # representative of mu that puts Q - mu in [0, 2 pi).
    for m in (p.mu, p.mu - TWO_PI):
        vals: dict[int, float] = {}
        vals[1] = TWO_PI / (1.0 + 2.0 * rho) * (s - (rho / pi) * (math.sin(m) - m))
        if rho < 0.5:
            vals[3] = TWO_PI / (1.0 - 2.0 * rho) * (s - (rho / pi) * (math.sin(m) + m + pi))
        vals[5] = TWO_PI / (1.0 + 2.0 * rho) * (s - (rho / pi) * (math.sin(m) - m - TWO_PI))
        if rho != 0.0:
            k = quantile_approx_constants(alpha, p, m)
            if k.E >= 0.0:
                vals[2] = (pi / rho) * (k.D - math.sqrt(k.E))
            if k.H >= 0.0:
                vals[4] = -(pi / rho) * (k.G - math.sqrt(k.H))
        for branch in sorted(vals):
            q = vals[branch]
            if not math.isfinite(q):
                continue
            lo, hi = QUANTILE_BRANCH_EDGES[branch - 1], QUANTILE_BRANCH_EDGES[branch]
            x = q - m
            in_branch = (lo <= x <= hi) if branch == 1 else (lo < x <= hi)
            ok = in_branch and 0.0 < q <= TWO_PI
            out.append(QuantileCandidate(branch, m, q, ok))
    return out


def quantile_approx_details(alpha: float, p: ECParams) -> QuantileApprox:
    """Closed-form approximate quantile with branch diagnostics.

    All five branch formulas are evaluated; the candidate whose ``Q - mu``
    lands in its own branch interval is returned. With zero or several such
    candidates, the one with the smallest cdf residual wins.
    """
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    cands = _branch_candidates(alpha, p)
    good = [c for c in cands if c.self_consistent]
    if len(good) == 1:
        c = good[0]
        return QuantileApprox(c.value, c.branch, True, tuple(cands))
    pool = good or [c for c in cands if 0.0 < c.value <= TWO_PI]
    if not pool:
        # every formula left the support: fall back to the closest clipped value
        pool = [QuantileCandidate(c.branch, c.mu_rep, min(max(c.value, 1e-12), TWO_PI), False) for c in cands]
    best = min(pool, key=lambda c: (abs(float(_cdf(c.value, p)) - alpha), c.branch))
    return QuantileApprox(best.value, best.branch, False, tuple(cands))


def quantile_approx(alpha: float, p: ECParams) -> float:
    return quantile_approx_details(alpha, p).value


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def make_rng(seed) -> np.random.Generator:
    """Seeded PCG64 generator; ``seed`` may be an int or a sequence of ints."""
    return np.random.Generator(np.random.PCG64(seed))


def sample_with_rng(n: int, p: ECParams, rng: np.random.Generator, tol: float = 1e-13) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be at least 1")
    u = 1.0 - rng.random(n)  # uniform on (0, 1]
    return bisect_monotone(lambda t: _cdf(t, p), u, 0.0, TWO_PI, tol=tol)


def sample(n: int, p: ECParams, seed: int = 0) -> np.ndarray:
    """Draw ``n`` EC variates by inversion of the exact cdf."""
    return sample_with_rng(n, p, make_rng(seed))
