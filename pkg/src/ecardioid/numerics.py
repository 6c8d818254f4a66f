"""Numerical kernel: quadrature, root finding, bounded Nelder-Mead, special functions.

Everything here is a pure function of its arguments. The statistical modules
only rely on this file (plus numpy) for their numerical work.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


class NumericsError(ArithmeticError):
    """Base class for numerical failures raised by this module."""


class IntegrationError(NumericsError):
    """Adaptive quadrature ran out of budget before reaching the tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error!r})")
        self.estimate = estimate
        self.error = error


class BracketError(NumericsError, ValueError):
    """The supplied interval does not bracket a sign change."""


@dataclass(frozen=True)
class Interval:
    """Closed box constraint ``lo <= x <= hi``.

    ``hi`` may be ``math.inf`` for a half-bounded coordinate; :func:`minimize`
    then uses a log transform instead of a scaled logit.
    """

    lo: float
    hi: float

    def __post_init__(self):
        if not math.isfinite(self.lo) or math.isnan(self.hi):
            raise ValueError(f"invalid interval bounds ({self.lo}, {self.hi})")
        if not self.hi > self.lo:
            raise ValueError(f"interval must satisfy lo < hi, got ({self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class OptimResult:
    argmin: np.ndarray
    value: float
    iterations: int
    converged: bool
    evaluations: int = 0


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _finite(v: float) -> bool:
    return math.isfinite(v)


class _Panel:
    """One subinterval of the adaptive Simpson scheme.

    Regular panels cache f at the five equally spaced nodes. Panels touching a
    singular endpoint never evaluate f there and use an open rule instead.
    """

    __slots__ = ("a", "b", "fx", "value", "error", "open_left", "open_right")

    def __init__(self, a, b, fx, value, error, open_left, open_right):
        self.a = a
        self.b = b
        self.fx = fx
        self.value = value
        self.error = error
        self.open_left = open_left
        self.open_right = open_right

    def __lt__(self, other: "_Panel") -> bool:
        # heapq is a min-heap; the largest error must pop first
        return self.error > other.error


def _endpoint_value(f, x: float) -> float:
    try:
        return float(f(x))
    except (ZeroDivisionError, OverflowError, ValueError):
        return math.nan


def _simpson(h: float, f0: float, f1: float, f2: float) -> float:
    return h / 6.0 * (f0 + 4.0 * f1 + f2)


def _milne(h: float, f1: float, f2: float, f3: float) -> float:
    # open Newton-Cotes on [a, a+h] with nodes a+h/4, a+h/2, a+3h/4
    return h / 3.0 * (2.0 * f1 - f2 + 2.0 * f3)


def _make_panel(f, a, b, fa, fb, open_left, open_right, cache=None) -> _Panel:
    h = b - a
    if cache is None:
        f1 = f(a + 0.25 * h)
        f2 = f(a + 0.5 * h)
        f3 = f(a + 0.75 * h)
    else:
        f1, f2, f3 = cache
    if not open_left and not open_right:
        coarse = _simpson(h, fa, f2, fb)
        fine = _simpson(0.5 * h, fa, f1, f2) + _simpson(0.5 * h, f2, f3, fb)
        value = fine + (fine - coarse) / 15.0
        error = abs(fine - coarse) / 15.0
    else:
        # open (Milne) halves next to the singular end, Simpson elsewhere
        coarse = _milne(h, f1, f2, f3)
        e1 = f(a + 0.125 * h)
        e3 = f(a + 0.375 * h)
        e5 = f(a + 0.625 * h)
        e7 = f(a + 0.875 * h)
        if open_left:
            left = _milne(0.5 * h, e1, f1, e3)
        else:
            left = _simpson(0.5 * h, fa, f1, f2)
        if open_right:
            right = _milne(0.5 * h, e5, f3, e7)
        else:
            right = _simpson(0.5 * h, f2, f3, fb)
        value = left + right
        error = abs(value - coarse)
    if not (_finite(value) and _finite(error)):
        raise IntegrationError("integrand produced a non-finite panel value", float("nan"), float("inf"))
    return _Panel(a, b, (fa, f1, f2, f3, fb), value, error, open_left, open_right)


def integrate(
    f: Callable[[float], float],
    iv: Interval | tuple[float, float],
    tol: float = 1e-10,
    max_intervals: int = 2**20,
) -> float:
    """Integrate a scalar function over ``iv`` by globally adaptive Simpson.

    The panel with the largest error estimate is bisected until the summed
    error estimate drops below ``tol``. An endpoint where ``f`` is not finite
    is treated as an integrable singularity: panels touching it are evaluated
    with an open rule and keep shrinking toward the endpoint.

    Raises
    ------
    IntegrationError
        If ``max_intervals`` panels are reached first. The exception carries
        the best estimate and its error bound.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = (iv.lo, iv.hi) if isinstance(iv, Interval) else (float(iv[0]), float(iv[1]))
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if a == b:
        return 0.0
    if a > b:
        return -integrate(f, (b, a), tol, max_intervals)

    fa = _endpoint_value(f, a)
    fb = _endpoint_value(f, b)
    open_left = not _finite(fa)
    open_right = not _finite(fb)

    # seed with a handful of panels so that narrow features are not missed
    n0 = 8
    edges = [a + (b - a) * k / n0 for k in range(n0)] + [b]
    fe = [fa] + [f(x) for x in edges[1:-1]] + [fb]
    heap: list[_Panel] = []
    for k in range(n0):
        p = _make_panel(f, edges[k], edges[k + 1], fe[k], fe[k + 1],
                        open_left and k == 0, open_right and k == n0 - 1)
        heap.append(p)
    heapq.heapify(heap)
    total_err = sum(p.error for p in heap)
    n_panels = n0
    frozen_err = 0.0
    frozen_val = 0.0

    while total_err + frozen_err > tol:
        if not heap:
            break
        if n_panels % 512 == 0:
            # cancel drift of the running sum
            total_err = math.fsum(p.error for p in heap)
            if total_err + frozen_err <= tol:
                break
        if n_panels >= max_intervals:
            est = frozen_val + sum(p.value for p in heap)
            raise IntegrationError("quadrature budget exhausted", est, total_err + frozen_err)
        p = heapq.heappop(heap)
        total_err -= p.error
        m = 0.5 * (p.a + p.b)
        if not (p.a < m < p.b) or (p.b - p.a) <= 4.0 * math.ulp(max(abs(p.a), abs(p.b), 1e-300)):
            # cannot be split further in floating point
            frozen_err += p.error
            frozen_val += p.value
            continue
        fa_, f1, f2, f3, fb_ = p.fx
        h = p.b - p.a
        left_cache = (f(p.a + 0.125 * h), f1, f(p.a + 0.375 * h))
        right_cache = (f(m + 0.125 * h), f3, f(m + 0.375 * h))
        left = _make_panel(f, p.a, m, fa_, f2, p.open_left, False, left_cache)
        right = _make_panel(f, m, p.b, f2, fb_, False, p.open_right, right_cache)
        heapq.heappush(heap, left)
        heapq.heappush(heap, right)
        total_err += left.error + right.error
        n_panels += 1

    if total_err + frozen_err > tol:
        est = frozen_val + sum(p.value for p in heap)
        raise IntegrationError("quadrature could not reach tolerance", est, total_err + frozen_err)
    # sum small contributions first
    return math.fsum([frozen_val] + [p.value for p in heap])


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def find_root(
    f: Callable[[float], float],
    iv: Interval | tuple[float, float],
    tol: float = 1e-12,
    max_iter: int = 400,
) -> float:
    """Locate a sign change of ``f`` inside ``iv``.

    Alternates an Illinois false-position step with a plain bisection step,
    so the bracket at least halves every two iterations and the secant
    step gives fast convergence on smooth functions. Stops once the bracket
    is no wider than ``tol``.
    """
    lo, hi = (iv.lo, iv.hi) if isinstance(iv, Interval) else (float(iv[0]), float(iv[1]))
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.isnan(flo) or math.isnan(fhi) or (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")

    side = 0
    for it in range(max_iter):
        if hi - lo <= tol:
            break
        if it % 2 == 0 and math.isfinite(flo) and math.isfinite(fhi):
            x = (lo * fhi - hi * flo) / (fhi - flo)
            if not (lo < x < hi):
                x = 0.5 * (lo + hi)
        else:
            x = 0.5 * (lo + hi)
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0) == (fhi > 0):
            hi, fhi = x, fx
            if side == -1:
                flo *= 0.5
            side = -1
        else:
            lo, flo = x, fx
            if side == 1:
                fhi *= 0.5
            side = 1
    return 0.5 * (lo + hi)


def bisect_monotone(
    g: Callable[[np.ndarray], np.ndarray],
    target: np.ndarray,
    lo: float,
    hi: float,
    tol: float = 1e-13,
) -> np.ndarray:
    """Vectorized bisection for ``g(x) = target`` with ``g`` nondecreasing.

    Returns the right end of each final bracket, i.e. the smallest grid
    point found with ``g(x) >= target``.
    """
    target = np.asarray(target, dtype=float)
    a = np.full(target.shape, float(lo))
    b = np.full(target.shape, float(hi))
    n_steps = max(1, int(math.ceil(math.log2((hi - lo) / tol))))
    for _ in range(n_steps):
        mid = 0.5 * (a + b)
        below = g(mid) < target
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return b


def golden_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
) -> float:
    """Golden-section search for a maximizer of a unimodal ``f`` on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# Bounded Nelder-Mead
# ---------------------------------------------------------------------------

def _to_internal(x: float, bound: Optional[Interval]) -> float:
    if bound is None:
        return x
    if math.isinf(bound.hi):
        return math.log(max(x - bound.lo, 1e-300))
    u = (x - bound.lo) / bound.width
    u = min(max(u, 1e-12), 1.0 - 1e-12)
    return math.log(u / (1.0 - u))


def _to_external(z: float, bound: Optional[Interval]) -> float:
    if bound is None:
        return z
    if math.isinf(bound.hi):
        return bound.lo + math.exp(min(z, 700.0))
    if z >= 0:
        s = 1.0 / (1.0 + math.exp(-z))
    else:
        e = math.exp(z)
        s = e / (1.0 + e)
    return bound.lo + bound.width * s


def minimize(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    bounds: Sequence[Optional[Interval]],
    tol: float = 1e-8,
    max_iter: int = 2000,
    initial_step: float = 0.5,
) -> OptimResult:
    """Derivative-free minimization with Nelder-Mead on transformed coordinates.

    Bounded coordinates are mapped to the real line by a scaled logit (finite
    box) or a log (``hi = inf``); a ``None`` bound leaves the coordinate free,
    which is how periodic parameters are handled. Non-finite objective values
    are treated as ``+inf``, so infeasible points are simply rejected.

    Convergence is declared when the simplex diameter, measured in the
    original coordinates, falls below ``tol``. One restart from the best
    vertex guards against premature collapse.
    """
    x0 = [float(v) for v in np.asarray(x0, dtype=float).ravel()]
    dim = len(x0)
    bounds = list(bounds)
    if len(bounds) != dim:
        raise ValueError("x0 and bounds must have the same length")
    for xi, bd in zip(x0, bounds):
        if bd is not None and not bd.contains(xi):
            raise ValueError(f"starting point {xi} lies outside {bd}")

    n_eval = 0

    def vertex(z):
        # (internal point, external point, value)
        nonlocal n_eval
        n_eval += 1
        x = [_to_external(zi, bd) for zi, bd in zip(z, bounds)]
        v = float(f(np.array(x)))
        return (z, x, v if math.isfinite(v) else math.inf)

    def diameter(simplex):
        x_best = simplex[0][1]
        return max(abs(a - b) for vx in simplex[1:] for a, b in zip(vx[1], x_best))

    def affine(a, b, t):
        # a + t * (b - a)
        return [ai + t * (bi - ai) for ai, bi in zip(a, b)]

    best = vertex([_to_internal(xi, bd) for xi, bd in zip(x0, bounds)])
    iterations = 0
    converged = False

    for _attempt in range(2):
        simplex = [best]
        for i in range(dim):
            z = list(best[0])
            z[i] += initial_step
            simplex.append(vertex(z))
        converged = False
        while iterations < max_iter:
            simplex.sort(key=lambda vx: vx[2])
            if dim == 0 or (math.isfinite(simplex[0][2]) and diameter(simplex) < tol):
                converged = True
                break
            iterations += 1
            centroid = [sum(vx[0][j] for vx in simplex[:-1]) / dim for j in range(dim)]
            worst = simplex[-1]
            refl = vertex(affine(centroid, worst[0], -1.0))
            if simplex[0][2] <= refl[2] < simplex[-2][2]:
                simplex[-1] = refl
                continue
            if refl[2] < simplex[0][2]:
                expd = vertex(affine(centroid, worst[0], -2.0))
                simplex[-1] = expd if expd[2] < refl[2] else refl
                continue
            if refl[2] < worst[2]:
                con = vertex(affine(centroid, refl[0], 0.5))
                if con[2] <= refl[2]:
                    simplex[-1] = con
                    continue
            else:
                con = vertex(affine(centroid, worst[0], 0.5))
                if con[2] < worst[2]:
                    simplex[-1] = con
                    continue
            # shrink toward the best vertex
            simplex = [simplex[0]] + [vertex(affine(simplex[0][0], vx[0], 0.5)) for vx in simplex[1:]]
        cand = min(simplex, key=lambda vx: vx[2])
        if cand[2] <= best[2]:
            best = cand
        if not converged:
            break

    return OptimResult(argmin=np.array(best[1]), value=best[2], iterations=iterations,
                       converged=converged and math.isfinite(best[2]), evaluations=n_eval)


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def _bessel_series(x: float, order: int) -> float:
    half = 0.5 * x
    term = half**order / math.factorial(order)
    total = term
    q = half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + order))
        total += term
        if term <= 1e-16 * total:  # <= so an underflowed term also stops
            return total


def bessel_i0(x: float) -> float:
    """Modified Bessel function of the first kind, order 0, by power series."""
    x = abs(float(x))
    if x == 0.0:
        return 1.0
    return _bessel_series(x, 0)


def bessel_i1(x: float) -> float:
    """Modified Bessel function of the first kind, order 1, by power series."""
    x = float(x)
    if x == 0.0:
        return 0.0
    return math.copysign(_bessel_series(abs(x), 1), x)


def _gamma_p_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi2_sf(x: float, df: int) -> float:
    """Upper tail probability of the chi-square law with ``df`` degrees of freedom."""
    if df < 1:
        raise ValueError("df must be at least 1")
    if x <= 0:
        return 1.0
    a = 0.5 * df
    y = 0.5 * x
    if y == 0.0:  # x subnormal
        return 1.0
    if y < a + 1.0:
        return min(1.0, max(0.0, 1.0 - _gamma_p_series(a, y)))
    return min(1.0, max(0.0, _gamma_q_contfrac(a, y)))
