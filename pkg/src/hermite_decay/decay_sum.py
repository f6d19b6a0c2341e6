"""Exponentially weighted sums of Hermite functions and their sharp envelope.

The central object is

    S(x; kappa, beta, y) = sum_{n >= 1} |h_n(x)|^kappa e^(-kappa n y) / n^beta

which obeys the two-sided Gaussian envelope x^(1/2 - 2 beta)
e^(-kappa x^2 tanh(y) / 2) for |x| > 1.  This module computes S by
certified log-domain truncation, the analysis machinery behind the
envelope (the argument function A(n), its derivatives, the interior
maximum n_max), and a sharpness certificate comparing S against the
envelope across an x-grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hermite_decay.hermite_core import (
    EPSILON_MONOTONIC,
    SignedLog,
    hermite_orders,
    phi_coordinate,
)

_LN_PI = math.log(math.pi)

# direct_sum extends its truncation until the certified tail is this far
# below the accumulated total.
TAIL_RELATIVE_TOLERANCE = 1e-12

# Bisection control for the interior-maximum solve.
_BISECT_TOL = 1e-12
_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class SumParams:
    """Parameters (kappa, beta, y) of the weighted sum; kappa, y > 0."""

    kappa: float
    beta: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa > 0.0):
            raise ValueError(f"kappa must be finite and positive, got {self.kappa!r}")
        if not (math.isfinite(self.y) and self.y > 0.0):
            raise ValueError(f"y must be finite and positive, got {self.y!r}")
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta!r}")


@dataclass(frozen=True)
class ArgumentProfile:
    """A(n) landscape at one (x, y): interior maximum and samples.

    lam is n_max / x^2; samples holds (n, A, A', A'') rows on a grid
    spanning [1, truncation_n - 1].
    """

    n_max: float
    a_max: float
    lam: float
    truncation_n: int
    samples: tuple[tuple[float, float, float, float], ...]


@dataclass(frozen=True)
class SharpnessCertificate:
    """Two-sided comparison of S against its envelope on an x-grid.

    ratios holds R(x) = S(x) x^(2 beta - 1/2) e^(kappa x^2 tanh(y)/2);
    slope is the least-squares slope of ln R against ln x (near zero
    when the envelope captures the true power of x).
    restricted_fractions gives, per grid point, the share of S carried
    by the window 2(n+1)/x^2 in (lam/2, tanh(y)/y) alone, and
    restricted_ratio_min the smallest envelope fraction that window
    certifies by itself.
    """

    x_grid: tuple[float, ...]
    ratios: tuple[float, ...]
    ratio_min: float
    ratio_max: float
    slope: float
    restricted_fractions: tuple[float, ...]
    restricted_ratio_min: float
    params: SumParams


def monotonic_margin(y: float) -> float:
    """y-dependent monotonic-region margin eps = (1 - tanh(y)/y) / 2.

    Chosen so the truncation window 2(n+1) <= x^2 tanh(y)/y sits halfway
    inside the (1 - eps) x^2 / 2 regime; never below EPSILON_MONOTONIC.
    """
    if y <= 0.0:
        raise ValueError(f"y must be positive, got {y}")
    return max(0.5 * (1.0 - math.tanh(y) / y), EPSILON_MONOTONIC)


def truncation_index(x: float, y: float) -> int:
    """N = max(floor(x^2 tanh(y) / (2y)) - 1, 1), the analysis cutoff.

    Orders n >= N contribute only a geometrically certified tail; orders
    n < N lie inside the monotonic region with margin monotonic_margin(y).
    """
    return max(int(x * x * math.tanh(y) / (2.0 * y)) - 1, 1)


def argument_function(n: float, x: float, y: float) -> float:
    """A(n) = n phi_n - n y - (x/2) sqrt(x^2 - 2(n+1)), n real in [1, N-1].

    The log of the dominant factor of the n-th summand of S.  Domain
    error past the turning point x^2 - 2(n+1) < 0 or for n < 1.
    """
    if n < 1.0:
        raise ValueError(f"argument function needs n >= 1, got n={n}")
    disc = x * x - 2.0 * (n + 1.0)
    if disc < 0.0:
        raise ValueError(f"n={n} lies past the turning point (x^2 - 2(n+1) < 0)")
    phi = phi_coordinate(n, x).phi
    return n * phi - n * y - 0.5 * x * math.sqrt(disc)


def argument_derivatives(n: float, x: float, y: float) -> tuple[float, float]:
    """Closed-form (A'(n), A''(n)) strictly inside the domain.

    A'  = phi_n + x / (2(n+1) sqrt(x^2 - 2n - 2)) - y
    A'' = x ((2n+5)(n+1) - x^2 (n+2)) / (2 (n+1)^2 (x^2 - 2n - 2)^(3/2))
    """
    if n < 1.0:
        raise ValueError(f"argument derivatives need n >= 1, got n={n}")
    disc = x * x - 2.0 * (n + 1.0)
    if disc <= 0.0:
        raise ValueError(f"n={n} is at or past the turning point for x={x}")
    phi = phi_coordinate(n, x).phi
    root = math.sqrt(disc)
    a1 = phi + x / (2.0 * (n + 1.0) * root) - y
    a2 = (
        x
        * ((2.0 * n + 5.0) * (n + 1.0) - x * x * (n + 2.0))
        / (2.0 * (n + 1.0) ** 2 * disc * root)
    )
    return a1, a2


def check_second_derivative_inequality(n: int, x: float, c: float) -> bool:
    """Whether (1 + 1/(n+1)) t - (1 + 3/(2n+2)) >= c (1 - 1/t)^(3/2).

    Here t = x^2 / (2(n+1)); the inequality holding for a given c > 0 is
    equivalent to A''(n) < -c / x^2, so sweeping it calibrates the
    concavity constant.  Domain: 1 < n < (x^2 - 4) / 2.
    """
    if not (1.0 < n < (x * x - 4.0) / 2.0):
        raise ValueError(f"n={n} outside the concavity window (1, (x^2-4)/2) for x={x}")
    t = x * x / (2.0 * (n + 1.0))
    lhs = (1.0 + 1.0 / (n + 1.0)) * t - (1.0 + 3.0 / (2.0 * n + 2.0))
    rhs = c * (1.0 - 1.0 / t) ** 1.5
    return lhs >= rhs


def find_nmax(x: float, y: float, n_samples: int = 33) -> ArgumentProfile:
    """Locate the interior maximum of A by bracketed bisection.

    A'(n) = 0 transforms to G(phi) = phi + cosh(phi)^3 / (x^2 sinh(phi))
    - y = 0 with n = x^2 / (2 cosh(phi)^2) - 1; the valid root lies in
    (0, y).  G(y) > 0 always, and G also blows up at 0+, so a second,
    spurious root sits near the turning point: scanning phi downward for
    a negative value lands strictly between the two roots and brackets
    only the wanted one.

    Raises ValueError when x is too small for the given y (truncation
    window shorter than 3 orders, or no sign change in the bracket);
    failure is reported, never clamped.
    """
    n_trunc = truncation_index(x, y)
    if n_trunc < 3:
        raise ValueError(
            f"x={x} is below the largeness threshold for y={y}: "
            f"truncation window N={n_trunc} < 3"
        )

    def g(phi: float) -> float:
        ch = math.cosh(phi)
        return phi + ch**3 / (x * x * math.sinh(phi)) - y

    lo = None
    probe = 0.5 * y
    while probe > y * 2.0**-60:
        if g(probe) < 0.0:
            lo = probe
            break
        probe *= 0.5
    if lo is None:
        raise ValueError(
            f"x={x} is below the largeness threshold for y={y}: "
            f"A' has no sign change on the bracket (0, y)"
        )
    hi = y
    for _ in range(_BISECT_MAX_ITER):
        if hi - lo <= _BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    phi_star = 0.5 * (lo + hi)

    n_max = x * x / (2.0 * math.cosh(phi_star) ** 2) - 1.0
    a_max = argument_function(n_max, x, y)
    lam = n_max / (x * x)
    grid = np.linspace(1.0, float(n_trunc - 1), n_samples)
    samples = []
    for n in grid:
        a1, a2 = argument_derivatives(float(n), x, y)
        samples.append((float(n), argument_function(float(n), x, y), a1, a2))
    return ArgumentProfile(
        n_max=n_max,
        a_max=a_max,
        lam=lam,
        truncation_n=n_trunc,
        samples=tuple(samples),
    )


def tail_bound(start_n: int, x: float, params: SumParams) -> SignedLog:
    """Certified upper bound on the sum of terms n >= start_n.

    Uses only |h_n| <= pi^(-1/4), so the bound is uniform in x.  For
    beta >= 0 the power factor is monotone and the geometric closed form
    pi^(-kappa/4) start_n^(-beta) e^(-kappa start_n y) / (1 - e^(-kappa y))
    is already sound.  For beta < 0 the growing power n^|beta| is
    majorized block by block on dyadic ranges [m 2^j, m 2^(j+1)).
    """
    if start_n < 1:
        raise ValueError(f"start_n must be >= 1, got {start_n}")
    kappa, beta, y = params.kappa, params.beta, params.y
    log_geo = -math.log1p(-math.exp(-kappa * y))
    base = -0.25 * kappa * _LN_PI + log_geo
    if beta >= 0.0:
        return SignedLog(1, base - beta * math.log(start_n) - kappa * start_n * y)
    block_logs = []
    j = 0
    while True:
        lead = start_n * 2.0**j
        t = base - beta * (math.log(start_n) + (j + 1) * math.log(2.0)) - kappa * lead * y
        block_logs.append(t)
        if j > 0 and t < max(block_logs) - 80.0:
            break
        j += 1
    m = max(block_logs)
    return SignedLog(
        1, m + math.log(math.fsum(math.exp(t - m) for t in block_logs))
    )


def _term_logs(x: float, params: SumParams, n_stop: int) -> np.ndarray:
    """Log of the summand for n = 1..n_stop (log-domain, -inf at zeros)."""
    _, logs = hermite_orders(n_stop, x)
    n = np.arange(1, n_stop + 1, dtype=float)
    with np.errstate(invalid="ignore"):
        return params.kappa * (logs[1:] - n * params.y) - params.beta * np.log(n)


def _log_sum(term_logs: np.ndarray) -> float:
    m = float(term_logs.max())
    with np.errstate(under="ignore"):
        return m + math.log(float(np.exp(term_logs - m).sum()))


def _sum_internals(x: float, params: SumParams) -> tuple[float, np.ndarray, int]:
    """(log S, term logs, n_stop) with the tail certified negligible."""
    x = abs(x)
    n_stop = max(truncation_index(x, params.y), 64)
    while True:
        terms = _term_logs(x, params, n_stop)
        log_s = _log_sum(terms)
        tail = tail_bound(n_stop + 1, x, params).logmag
        if tail <= log_s + math.log(TAIL_RELATIVE_TOLERANCE):
            return log_s, terms, n_stop
        if n_stop > 4_000_000:
            raise RuntimeError(
                f"tail certification failed to converge by n={n_stop} at x={x}"
            )
        n_stop *= 2


def direct_sum(x: float, params: SumParams) -> SignedLog:
    """S(x; kappa, beta, y) summed in the log domain, tail certified.

    Ascending-n streaming against the running maximum; the truncation
    starts at the analysis cutoff N (at least 64) and doubles until
    tail_bound certifies a relative tail below TAIL_RELATIVE_TOLERANCE.
    S is even in x, so negative arguments are folded; every term is
    nonnegative and the result sign is +1.
    """
    log_s, _, _ = _sum_internals(x, params)
    return SignedLog(1, log_s)


def envelope(x: float, params: SumParams) -> SignedLog:
    """Log envelope (1/2 - 2 beta) ln x - kappa x^2 tanh(y) / 2, x > 0.

    No multiplicative constant is included: constants are calibration
    outputs (see SharpnessCertificate), not ground truth.
    """
    if x <= 0.0:
        raise ValueError(f"envelope needs x > 0, got {x}")
    logmag = (0.5 - 2.0 * params.beta) * math.log(x) - 0.5 * params.kappa * x * x * math.tanh(params.y)
    return SignedLog(1, logmag)


def sharpness_certificate(x_grid, params: SumParams) -> SharpnessCertificate:
    """Compare S against the envelope across a sorted grid, |x| > 1.

    Per point: R(x) = S(x) / envelope(x), plus the share of S carried by
    the window 2(n+1)/x^2 in (lam/2, tanh(y)/y) around the maximizer;
    the window alone certifying a positive envelope fraction is the
    lower-bound mechanism behind sharpness.  find_nmax failures at
    individual points propagate.
    """
    xs = [float(v) for v in x_grid]
    if len(xs) < 2:
        raise ValueError("sharpness needs a grid of at least 2 points")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("x_grid must be strictly increasing")
    if xs[0] <= 1.0:
        raise ValueError(
            f"sharpness is only claimed outside [-1, 1], got grid start {xs[0]}"
        )
    y_ratio = math.tanh(params.y) / params.y
    ratios = []
    fractions = []
    restricted_ratios = []
    for x in xs:
        profile = find_nmax(x, params.y)
        log_s, terms, n_stop = _sum_internals(x, params)
        log_env = envelope(x, params).logmag
        ratios.append(math.exp(log_s - log_env))
        u = 2.0 * (np.arange(1, n_stop + 1, dtype=float) + 1.0) / (x * x)
        window = (u > 0.5 * profile.lam) & (u < y_ratio)
        if not window.any():
            raise ValueError(f"restricted window is empty at x={x}")
        log_restricted = _log_sum(terms[window])
        fractions.append(math.exp(log_restricted - log_s))
        restricted_ratios.append(math.exp(log_restricted - log_env))
    ln_x = np.log(np.array(xs))
    ln_r = np.log(np.array(ratios))
    slope = float(np.polyfit(ln_x, ln_r, 1)[0])
    return SharpnessCertificate(
        x_grid=tuple(xs),
        ratios=tuple(ratios),
        ratio_min=min(ratios),
        ratio_max=max(ratios),
        slope=slope,
        restricted_fractions=tuple(fractions),
        restricted_ratio_min=min(restricted_ratios),
        params=params,
    )


def default_sweep_start(y: float) -> float:
    """Conservative default first x for sweeps at a given y."""
    return max(10.0, 3.0 / math.sqrt(math.tanh(y)))


def largeness_threshold(y: float) -> float:
    """Smallest x (to ~1e-6) at which find_nmax operates for this y.

    Operational definition: the truncation window holds at least 3
    orders and the A' bracket on (0, y) has a sign change.  Found by
    bisection on that predicate.
    """

    def usable(x: float) -> bool:
        try:
            find_nmax(x, y, n_samples=3)
        except ValueError:
            return False
        return True

    hi = default_sweep_start(y)
    while not usable(hi):
        hi *= 2.0
        if hi > 1e6:
            raise RuntimeError(f"no usable x found for y={y}")
    lo = 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if usable(mid):
            hi = mid
        else:
            lo = mid
    return hi


def theta_sum(scale: float) -> float:
    """sum over all integers n of e^(-scale n^2), scale > 0; exact fsum."""
    if scale <= 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    terms = [1.0]
    n = 1
    while True:
        t = math.exp(-scale * n * n)
        if t < 1e-22:
            break
        terms.append(2.0 * t)  # n and -n contribute equally
        n += 1
    return math.fsum(terms)


def gaussian_theta(x: float, delta: float) -> float:
    """g_delta(x) = sum over n of e^(-delta pi n^2 / x^2)."""
    return theta_sum(delta * math.pi / (x * x))


def gaussian_theta_dual(x: float, delta: float) -> float:
    """The modular-transform side: (x / sqrt(delta)) sum e^(-pi n^2 x^2 / delta).

    Equals gaussian_theta(x, delta) identically; the pair exists so the
    identity can be verified numerically rather than assumed.
    """
    return x / math.sqrt(delta) * theta_sum(math.pi * x * x / delta)
