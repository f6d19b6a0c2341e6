"""Numerically stable evaluation of orthonormal Hermite functions.

The orthonormal Hermite functions

    h_n(x) = e^(-x^2/2) H_n(x) / sqrt(2^n pi^(1/2) n!)

are bounded by pi^(-1/4) on the whole real line, yet the Gaussian
factor alone underflows double precision at |x| ~ 38.  Everything here
therefore flows through a (sign, log magnitude) representation, and the
three-term recurrence runs on rescaled values with an explicit exponent
accumulator, so orders up to 10^6 and arguments up to 10^3 never
materialize an over- or underflowing double.

For large orders inside the monotonic (zero-free) region
2(n+1) < x^2, the Plancherel-Rotach asymptotic in the hyperbolic
coordinate phi = arccosh(x / sqrt(2(n+1))) gives a cheap and slightly
high estimate of |h_n(x)|; both the raw asymptotic and the reduced
per-term bound used by the weighted-sum machinery are exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_LN_PI = math.log(math.pi)
_LN_2 = math.log(2.0)

# Rescaling walls for the running recurrence values.  One multiply by
# 2^(+-512) per crossing is enough: a single recurrence step changes the
# magnitude by a factor far below 2^512 for |x| <= 1e3.
_WALL_LOG = 512.0 * _LN_2
_WALL_HI = 2.0**512
_WALL_LO = 2.0**-512

# 512*ln2 split so that (wall count)*_WALL_LOG_HI is exact: the high part
# carries 30 significant bits, leaving 23 bits of headroom for the count.
# Plain repeated addition of fl(512*ln2) would drift by ~6e-11 over the
# ~2000 crossings that |x| = 1e3 induces.
_WALL_LOG_HI = float.fromhex("0x1.62e42ff000000p+8")
_WALL_LOG_LO = float.fromhex("-0x1.718432a1b0e26p-26")

# Hard floor on the monotonic-region margin epsilon: callers may pass a
# larger (e.g. y-dependent) epsilon but never a smaller one.
EPSILON_MONOTONIC = 1e-3

# Above this order the forward recurrence drifts past the 1e-10 contract
# in doubles (and even in 80-bit floats), so hermite_exact switches to an
# arbitrary-precision pass.
EXTENDED_PRECISION_ORDER = 20000

# Largest order for which the monomial form of H_n is exposed as a test
# oracle; beyond this the alternating coefficients cancel catastrophically.
POLYNOMIAL_ORACLE_MAX = 30


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as (sign, natural log of absolute value).

    sign is -1, 0 or +1; logmag is ln|value|, conventionally -inf when
    sign is 0.  The representation resolves relative differences of
    about |logmag| * 2^-53, so round-tripping through a double is exact
    to ~1e-15 for |logmag| < 50 and degrades to ~1e-13 near the extremes
    of double range.
    """

    sign: int
    logmag: float

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0 and self.logmag != -math.inf:
            object.__setattr__(self, "logmag", -math.inf)

    @classmethod
    def from_float(cls, value: float) -> "SignedLog":
        """Represent a finite double exactly by sign and log magnitude."""
        if not math.isfinite(value):
            raise ValueError(f"value must be finite, got {value!r}")
        if value == 0.0:
            return cls(0, -math.inf)
        return cls(1 if value > 0.0 else -1, math.log(abs(value)))

    def to_float(self) -> float:
        """Convert back to a double; overflows to +-inf, underflows to 0."""
        if self.sign == 0:
            return 0.0
        if self.logmag > 710.0:
            return math.inf * self.sign
        if self.logmag < -746.0:
            return 0.0
        return self.sign * math.exp(self.logmag)


@dataclass(frozen=True)
class PhiCoordinate:
    """Hyperbolic coordinate of a point in the monotonic region.

    phi >= 0 satisfies x = sqrt(2(n+1)) * cosh(phi); phi = 0 exactly on
    the boundary x = sqrt(2(n+1)).
    """

    phi: float
    n: float
    x: float


def phi_coordinate(n: float, x: float) -> PhiCoordinate:
    """Hyperbolic coordinate phi = arccosh(x / sqrt(2(n+1))).

    Parameters
    ----------
    n : float
        Order, n >= 0.  Real values are accepted; the weighted-sum
        analysis treats the order as a continuous variable.
    x : float
        Evaluation point, x >= sqrt(2(n+1)).

    Returns
    -------
    PhiCoordinate

    Raises
    ------
    ValueError
        If x < sqrt(2(n+1)), i.e. the point lies outside the monotonic
        region.

    Notes
    -----
    Computed in the log form arccosh(r) = ln(r + sqrt(r^2 - 1)), which
    is stable for the large ratios r that arise at big x.
    """
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    edge = math.sqrt(2.0 * (n + 1.0))
    r = x / edge
    if r < 1.0:
        raise ValueError(
            f"x={x} is below the monotonic-region edge sqrt(2(n+1))={edge} for order n={n}"
        )
    phi = math.log(r + math.sqrt(r * r - 1.0))
    return PhiCoordinate(phi=phi, n=n, x=x)


def _square_with_residual(x: float) -> tuple[float, float]:
    """x*x as rounded product plus exact residual (Dekker splitting)."""
    p = x * x
    c = 134217729.0 * x  # 2^27 + 1; no overflow for |x| <= 1e3
    hi = c - (c - x)
    lo = x - hi
    return p, ((hi * hi - p) + 2.0 * hi * lo) + lo * lo


def _hermite_exact_extended(n: int, x: float) -> SignedLog:
    """Arbitrary-precision recurrence pass for very large orders.

    30 significant digits keep the accumulated drift orders of magnitude
    below the final double rounding even at n = 1e6.
    """
    import mpmath as mp

    with mp.workdps(30):
        xm = mp.mpf(x)
        prev = mp.mpf(0)
        cur = mp.pi ** mp.mpf("-0.25") * mp.exp(-xm * xm / 2)
        for k in range(n):
            prev, cur = cur, xm * mp.sqrt(mp.mpf(2) / (k + 1)) * cur - mp.sqrt(
                mp.mpf(k) / (k + 1)
            ) * prev
        if cur == 0:
            return SignedLog(0, -math.inf)
        return SignedLog(1 if cur > 0 else -1, float(mp.log(abs(cur))))


def hermite_exact(n: int, x: float) -> SignedLog:
    """Orthonormal Hermite function h_n(x) by the rescaled recurrence.

    Parameters
    ----------
    n : int
        Order, n >= 0.
    x : float
        Evaluation point, any finite real.

    Returns
    -------
    SignedLog
        h_n(x) with exact sign (0 for the exact zeros at x = 0, odd n)
        and log magnitude accurate to relative error <= 1e-10 for
        n <= 1e6 and |x| <= 1e3.

    Notes
    -----
    Runs h_{k+1} = x sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1} from
    h_0 = pi^(-1/4) e^(-x^2/2), keeping the running pair inside
    [2^-512, 2^512] and counting discarded exponents separately.
    Forward recurrence is stable here: h_n is the dominant solution in
    the classically allowed region.  At |x| near 1e3 the log magnitude
    reaches ~5e5, so the Gaussian constant and the rescaling ledger are
    assembled with compensated products and an exact sum; plain
    accumulation would already spend the whole error budget on them.
    Orders beyond EXTENDED_PRECISION_ORDER take a slower
    arbitrary-precision pass because the double-precision drift alone
    would exceed the contract.
    """
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    if n > EXTENDED_PRECISION_ORDER:
        return _hermite_exact_extended(n, x)
    m_prev, m_cur = 0.0, 1.0
    walls = 0
    for k in range(n):
        m_prev, m_cur = m_cur, x * math.sqrt(2.0 / (k + 1)) * m_cur - math.sqrt(
            k / (k + 1)
        ) * m_prev
        a = abs(m_cur)
        b = abs(m_prev)
        if b > a:
            a = b
        if a > _WALL_HI:
            m_cur *= _WALL_LO
            m_prev *= _WALL_LO
            walls += 1
        elif 0.0 < a < _WALL_LO:
            m_cur *= _WALL_HI
            m_prev *= _WALL_HI
            walls -= 1
    if m_cur == 0.0:
        return SignedLog(0, -math.inf)
    sq, sq_res = _square_with_residual(x)
    wall_main, wall_res = _WALL_LOG_HI * walls, _WALL_LOG_LO * walls
    logmag = math.fsum(
        [
            -0.5 * sq,
            -0.5 * sq_res,
            -0.25 * _LN_PI,
            wall_main,
            wall_res,
            math.log(abs(m_cur)),
        ]
    )
    return SignedLog(1 if m_cur > 0.0 else -1, logmag)


def hermite_orders(n_top: int, x: float) -> tuple[np.ndarray, np.ndarray]:
    """All of h_0(x) .. h_{n_top}(x) in one recurrence sweep.

    Returns
    -------
    (signs, logmags) : (int8 array, float array)
        Arrays of length n_top + 1; signs[k] is 0 exactly at the exact
        zeros, in which case logmags[k] is -inf.

    Notes
    -----
    Same rescaled recurrence as hermite_exact; one pass costs O(n_top)
    regardless of how far below double range the values sit.
    """
    if n_top < 0:
        raise ValueError(f"n_top must be nonnegative, got {n_top}")
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    signs = np.zeros(n_top + 1, dtype=np.int8)
    logmags = np.full(n_top + 1, -math.inf)
    acc = -0.5 * x * x - 0.25 * _LN_PI
    m_prev, m_cur = 0.0, 1.0
    signs[0] = 1
    logmags[0] = acc
    log = math.log
    sqrt = math.sqrt
    for k in range(n_top):
        m_prev, m_cur = m_cur, x * sqrt(2.0 / (k + 1)) * m_cur - sqrt(
            k / (k + 1)
        ) * m_prev
        a = abs(m_cur)
        b = abs(m_prev)
        if b > a:
            a = b
        if a > _WALL_HI:
            m_cur *= _WALL_LO
            m_prev *= _WALL_LO
            acc += _WALL_LOG
        elif 0.0 < a < _WALL_LO:
            m_cur *= _WALL_HI
            m_prev *= _WALL_HI
            acc -= _WALL_LOG
        if m_cur != 0.0:
            signs[k + 1] = 1 if m_cur > 0.0 else -1
            logmags[k + 1] = acc + log(abs(m_cur))
    return signs, logmags


def hermite_batch(orders, xs) -> tuple[np.ndarray, np.ndarray]:
    """h_{n_i}(x_i) for many (order, point) pairs in one synchronized sweep.

    Parameters
    ----------
    orders : array of int
    xs : array of float
        Same length as orders.

    Returns
    -------
    (signs, logmags) : (int8 array, float array)

    Notes
    -----
    All pairs advance through the recurrence together, each harvested at
    its own order.  Points are processed in sorted-order prefixes so the
    working set shrinks as low orders retire; total work is
    O(sum of orders) vectorized across the batch.
    """
    orders = np.asarray(orders, dtype=np.int64)
    xs = np.asarray(xs, dtype=float)
    if orders.shape != xs.shape or orders.ndim != 1:
        raise ValueError("orders and xs must be 1-D arrays of equal length")
    if orders.size and orders.min() < 0:
        raise ValueError("orders must be nonnegative")
    out_signs = np.zeros(orders.size, dtype=np.int8)
    out_logs = np.full(orders.size, -math.inf)
    if orders.size == 0:
        return out_signs, out_logs

    sort = np.argsort(orders, kind="stable")
    sorted_n = orders[sort]
    work_x = xs[sort]
    m_prev = np.zeros(work_x.size)
    m_cur = np.ones(work_x.size)
    acc = -0.5 * work_x * work_x - 0.25 * _LN_PI

    def harvest(pos: int, base: int) -> None:
        j = pos - base
        m = m_cur[j]
        if m != 0.0:
            out_signs[sort[pos]] = 1 if m > 0.0 else -1
            out_logs[sort[pos]] = acc[j] + math.log(abs(m))

    p = 0
    base = 0
    while p < sorted_n.size and sorted_n[p] == 0:
        harvest(p, base)
        p += 1
    n_top = int(sorted_n[-1])
    for k in range(n_top):
        # retire pairs whose order has been reached; compact occasionally
        if p - base >= 256 and p - base >= (sorted_n.size - base) // 4:
            cut = p - base
            work_x = work_x[cut:]
            m_prev = m_prev[cut:]
            m_cur = m_cur[cut:]
            acc = acc[cut:]
            base = p
        m_prev, m_cur = m_cur, work_x * math.sqrt(2.0 / (k + 1)) * m_cur - math.sqrt(
            k / (k + 1)
        ) * m_prev
        a = np.maximum(np.abs(m_cur), np.abs(m_prev))
        hi = a > _WALL_HI
        if hi.any():
            m_cur[hi] *= _WALL_LO
            m_prev[hi] *= _WALL_LO
            acc[hi] += _WALL_LOG
        lo = (a > 0.0) & (a < _WALL_LO)
        if lo.any():
            m_cur[lo] *= _WALL_HI
            m_prev[lo] *= _WALL_HI
            acc[lo] -= _WALL_LOG
        while p < sorted_n.size and sorted_n[p] == k + 1:
            harvest(p, base)
            p += 1
    return out_signs, out_logs


def _value_scan(xs: np.ndarray, n_top: int):
    """Yield (k, h_k(xs) as doubles) for k = 0..n_top.

    Values below double range flush to exactly 0.0.  The exponent
    accumulator never exceeds ~355 (each upward rescale lands the
    running pair at magnitude > 1 while |h_k| <= pi^(-1/4)), so the
    cached exp(acc) cannot overflow.
    """
    m_prev = np.zeros(xs.size)
    m_cur = np.ones(xs.size)
    acc = -0.5 * xs * xs - 0.25 * _LN_PI
    with np.errstate(under="ignore"):
        e_acc = np.exp(acc)
        yield 0, m_cur * e_acc
        for k in range(n_top):
            m_prev, m_cur = m_cur, xs * math.sqrt(
                2.0 / (k + 1)
            ) * m_cur - math.sqrt(k / (k + 1)) * m_prev
            a = np.maximum(np.abs(m_cur), np.abs(m_prev))
            hi = a > _WALL_HI
            lo = (a > 0.0) & (a < _WALL_LO)
            if hi.any():
                m_cur[hi] *= _WALL_LO
                m_prev[hi] *= _WALL_LO
                acc[hi] += _WALL_LOG
            if lo.any():
                m_cur[lo] *= _WALL_HI
                m_prev[lo] *= _WALL_HI
                acc[lo] -= _WALL_LOG
            if hi.any() or lo.any():
                e_acc = np.exp(acc)
            yield k + 1, m_cur * e_acc


def hermite_values(n_top: int, xs) -> np.ndarray:
    """Matrix of h_k(xs[j]) doubles, shape (n_top + 1, len(xs)).

    Magnitudes below double range flush to 0.0; safe whenever consumers
    only need values down to the underflow threshold (reconstruction,
    quadrature, plotting).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.empty((n_top + 1, xs.size))
    for k, row in _value_scan(xs, n_top):
        out[k] = row
    return out


def hermite_moment_sweep(xs, weights, n_top: int) -> np.ndarray:
    """Dot products sum_j weights[j] * h_k(xs[j]) for k = 0..n_top.

    Streams the order sweep so only O(len(xs)) memory is used; this is
    the quadrature workhorse for coefficient expansion.
    """
    xs = np.asarray(xs, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if xs.shape != weights.shape or xs.ndim != 1:
        raise ValueError("xs and weights must be 1-D arrays of equal length")
    out = np.empty(n_top + 1)
    for k, row in _value_scan(xs, n_top):
        out[k] = row @ weights
    return out


def _require_monotonic(n: float, x: float, eps: float | None) -> float:
    """Validate 2 <= n+1 <= (1-eps) x^2 / 2 and return the effective eps."""
    eff = EPSILON_MONOTONIC if eps is None else max(eps, EPSILON_MONOTONIC)
    if n + 1.0 < 2.0:
        raise ValueError(f"asymptotic forms need order n >= 1, got n={n}")
    if 2.0 * (n + 1.0) > (1.0 - eff) * x * x:
        raise ValueError(
            f"(n={n}, x={x}) is outside the monotonic regime 2(n+1) <= (1-eps) x^2 "
            f"with eps={eff}"
        )
    return eff


def plancherel_rotach_estimate(n: float, x: float, eps: float | None = None) -> SignedLog:
    """Monotonic-region Plancherel-Rotach estimate of h_n(x).

    Parameters
    ----------
    n, x : float
        Point with 2 <= n+1 <= (1-eps) x^2 / 2; x > 0.
    eps : float, optional
        Monotonic-region margin; floored at EPSILON_MONOTONIC.

    Returns
    -------
    SignedLog
        exp((n + 1/2) phi - (n+1) sinh(phi) cosh(phi))
        / (2^(3/4) pi^(1/2) n^(1/4) sinh(phi)^(1/2)), always positive
        (h_n has no zeros beyond its largest root).

    Notes
    -----
    Slightly overestimates |h_n(x)| throughout the region, which is the
    useful direction for upper bounds; relative accuracy improves as n
    grows and degrades toward the turning point 2(n+1) = x^2.
    """
    _require_monotonic(n, x, eps)
    phi = phi_coordinate(n, x).phi
    sh = math.sinh(phi)
    ch = math.cosh(phi)
    logmag = (
        (n + 0.5) * phi
        - (n + 1.0) * sh * ch
        - 0.75 * _LN_2
        - 0.5 * _LN_PI
        - 0.25 * math.log(n)
        - 0.5 * math.log(sh)
    )
    return SignedLog(1, logmag)


def hermite_pr_bound(
    n: float, x: float, kappa: float, beta: float, y: float, eps: float | None = None
) -> SignedLog:
    """Reduced per-term bound for the weighted sum, in log form.

    Returns the log of n^(-1/4 - beta) exp(kappa A(n)) with
    A(n) = n phi_n - n y - (x/2) sqrt(x^2 - 2(n+1)), dropping the
    bounded factors of the full Plancherel-Rotach form.  The sqrt term
    equals (n+1) sinh(phi) cosh(phi); keeping it in x-form avoids one
    transcendental round trip.

    Same domain as plancherel_rotach_estimate; no implicit constant is
    included (constants are calibration outputs, not ground truth).
    """
    _require_monotonic(n, x, eps)
    phi = phi_coordinate(n, x).phi
    disc = x * x - 2.0 * (n + 1.0)
    logmag = (-0.25 - beta) * math.log(n) + kappa * (
        n * phi - n * y - 0.5 * x * math.sqrt(disc)
    )
    return SignedLog(1, logmag)


def _build_polynomial_tables(n_top: int) -> list[list[int]]:
    """Exact integer coefficients of H_0..H_{n_top}, ascending powers."""
    tables = [[1], [0, 2]]
    for n in range(1, n_top):
        prev, cur = tables[n - 1], tables[n]
        nxt = [0] * (n + 2)
        for j, c in enumerate(cur):
            nxt[j + 1] += 2 * c
        for j, c in enumerate(prev):
            nxt[j] -= 2 * n * c
        tables.append(nxt)
    return tables


_POLY_TABLES = _build_polynomial_tables(POLYNOMIAL_ORACLE_MAX)


def hermite_polynomial_coefficients(n: int) -> list[int]:
    """Integer coefficients of the physicists' polynomial H_n, ascending.

    Only exposed for n <= POLYNOMIAL_ORACLE_MAX; the monomial form is a
    cross-check oracle, unusable at large order due to cancellation.
    """
    if not 0 <= n <= POLYNOMIAL_ORACLE_MAX:
        raise ValueError(
            f"polynomial tables stop at n={POLYNOMIAL_ORACLE_MAX}, got {n}"
        )
    return list(_POLY_TABLES[n])


def hermite_via_polynomial(n: int, x: float) -> float:
    """h_n(x) from the exact monomial form of H_n; test oracle only.

    H_n(x) is accumulated in exact rational arithmetic, so the only
    roundoff is the final normalization and Gaussian factor; |x| must
    stay modest (<= ~30) to keep e^(-x^2/2) in double range.
    """
    coeffs = hermite_polynomial_coefficients(n)
    xf = Fraction(x)
    h = Fraction(0)
    for c in reversed(coeffs):
        h = h * xf + c
    norm = math.sqrt(2.0**n * math.sqrt(math.pi) * math.factorial(n))
    return math.exp(-0.5 * x * x) * float(h) / norm
