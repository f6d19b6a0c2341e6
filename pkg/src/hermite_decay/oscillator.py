"""Hermite expansion and harmonic-oscillator evolution.

Functions are expanded in the orthonormal basis

    e_n(x) = (2 pi)^(1/4) h_n(sqrt(2 pi) x),

whose L^2 norm is exactly 1 (the bare h_n(sqrt(2 pi) x) has norm
(2 pi)^(-1/4), so Parseval would fail without the prefactor; the
prefactor only rescales certified constants).  Time evolution applies
the explicit phase e^(2(2n+1) pi i t) to the n-th coefficient, and
Gaussian-decay certificates bound sup |Phi(x, t)| e^(tanh(alpha) pi x^2)
over an (x, t) grid with the truncation tail folded in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .decay_sum import SumParams, direct_sum
from .hermite_core import hermite_moment_sweep, hermite_values

BASIS_SCALE = math.sqrt(2.0 * math.pi)
BASIS_NORMALIZER = (2.0 * math.pi) ** 0.25
# sup over n and x of |e_n(x)| = (2 pi)^(1/4) pi^(-1/4) = 2^(1/4)
UNIFORM_BASIS_BOUND = 2.0**0.25


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite-trapezoid refinement plan for coefficient integrals.

    half_width None means the window is sized automatically: the
    integrand envelope |f| * UNIFORM_BASIS_BOUND must fall below 1e-16
    of its peak at the endpoints.  Node count doubles until successive
    coefficient vectors agree to `tolerance` or `max_doublings` is
    exhausted; disagreement is recorded per coefficient, not raised.
    """

    half_width: float | None = None
    initial_nodes: int = 2048
    tolerance: float = 1e-10
    max_doublings: int = 6

    def __post_init__(self):
        if self.half_width is not None and not self.half_width > 0.0:
            raise ValueError("half_width must be positive")
        if self.initial_nodes < 16:
            raise ValueError("initial_nodes must be at least 16")
        if not self.tolerance > 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_doublings < 0:
            raise ValueError("max_doublings must be nonnegative")


@dataclass(frozen=True)
class HermiteCoefficients:
    """Expansion coefficients c_0..c_N against e_n, with error estimates.

    quad_error[n] is an absolute estimate of the error in coeffs[n]
    (grid-refinement disagreement for quadrature, exactly zero for
    closed-form constructions).
    """

    coeffs: tuple[float, ...]
    basis_scale: float = BASIS_SCALE
    quad_error: tuple[float, ...] = field(default=())

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("at least one coefficient is required")
        if any(not math.isfinite(c) for c in coeffs):
            raise ValueError("coefficients must be finite")
        if self.basis_scale != BASIS_SCALE:
            raise ValueError("basis_scale is fixed at sqrt(2 pi)")
        errors = tuple(float(e) for e in self.quad_error)
        if not errors:
            errors = (0.0,) * len(coeffs)
        if len(errors) != len(coeffs):
            raise ValueError("quad_error length must match coeffs")
        if any(e < 0.0 or not math.isfinite(e) for e in errors):
            raise ValueError("quad_error entries must be finite and >= 0")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "quad_error", errors)

    @property
    def truncation_n(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class EvolvedValue:
    """Truncated series value with a rigorous radius for the dropped tail."""

    value: complex
    tail_radius: float


@dataclass(frozen=True)
class DecayCertificate:
    """Grid-certified Gaussian decay of the evolved expansion.

    sup_weighted is the grid supremum of |Phi(x, t)| e^(tanh(alpha) pi
    x^2) with the per-point truncation tail already folded in;
    tail_contribution isolates how much of that could come from the
    tail alone.  majorant_slack_min and triangle_slack_min record the
    two cross-check margins (both nonnegative up to rounding): the
    coefficient majorant against the weighted-sum bound, and the
    evolved values against the majorant.
    """

    alpha: float
    sup_weighted: float
    envelope_constant: float
    truncation_n: int
    tail_contribution: float
    x_grid: tuple[float, ...]
    t_grid: tuple[float, ...]
    majorant_slack_min: float
    triangle_slack_min: float


def vemuri_envelope(n: int, alpha: float) -> float:
    """Coefficient decay envelope e^(-alpha n) n^(-1/4), clamped at n = 1.

    The clamp gives the n = 0 coefficient the same budget as n = 1, so
    a pure e_0 certifies with constant e^alpha rather than an undefined
    0^(-1/4).
    """
    if not alpha > 0.0 or not math.isfinite(alpha):
        raise ValueError("alpha must be positive and finite")
    m = max(int(n), 1)
    return math.exp(-alpha * m) * m**-0.25


def _log_envelope(n: int, alpha: float) -> float:
    m = max(int(n), 1)
    return -alpha * m - 0.25 * math.log(m)


def envelope_tail_log(alpha: float, c_bound: float, n_top: int) -> float:
    """log of a bound on sum_{n > n_top} c_bound e^(-alpha n) n^(-1/4) * sup|e_n|."""
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    if not c_bound > 0.0 or not math.isfinite(c_bound):
        raise ValueError("c_bound must be positive and finite")
    start = n_top + 1
    return (
        math.log(c_bound)
        + 0.25 * math.log(2.0)
        - alpha * start
        - 0.25 * math.log(start)
        - math.log1p(-math.exp(-alpha))
    )


def basis_values(xs, n_top: int) -> np.ndarray:
    """Matrix of e_k(xs[j]), shape (n_top + 1, len(xs))."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    return BASIS_NORMALIZER * hermite_values(n_top, BASIS_SCALE * xs)


def _evaluate_handle(f, xs: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(f(xs), dtype=float)
        if values.shape == xs.shape:
            return values
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(v))) for v in xs])


def _auto_half_width(f) -> float:
    probe = np.linspace(-4.0, 4.0, 321)
    peak = float(np.max(np.abs(_evaluate_handle(f, probe))))
    if not peak > 0.0 or not math.isfinite(peak):
        raise ValueError("function handle has no finite peak on [-4, 4]")
    width = 4.0
    while width <= 40.0:
        edge = np.abs(_evaluate_handle(f, np.array([-width, width]))).max()
        if edge <= 1e-16 * peak:
            return width
        width += 0.5
    raise ValueError("function does not decay below 1e-16 of peak by |x| = 40")


def expand(f, n_terms: int, quad: QuadratureSpec | None = None) -> HermiteCoefficients:
    """Coefficients c_n = <f, e_n> for n = 0..n_terms by refined quadrature.

    The per-coefficient quad_error is the disagreement between the two
    finest grids; coefficients that fail to reach quad.tolerance keep
    their larger disagreement on record rather than raising.
    """
    if n_terms < 0:
        raise ValueError("n_terms must be nonnegative")
    quad = quad or QuadratureSpec()
    width = quad.half_width if quad.half_width is not None else _auto_half_width(f)

    def pass_at(n_nodes: int) -> tuple[np.ndarray, float]:
        xs = np.linspace(-width, width, n_nodes + 1)
        weights = np.full(xs.size, xs[1] - xs[0])
        weights[0] *= 0.5
        weights[-1] *= 0.5
        weights *= _evaluate_handle(f, xs)
        coeffs = BASIS_NORMALIZER * hermite_moment_sweep(
            BASIS_SCALE * xs, weights, n_terms
        )
        # summation roundoff floor: no refinement agreement can certify
        # tighter than this
        floor = 4.0 * np.finfo(float).eps * UNIFORM_BASIS_BOUND * float(
            np.sum(np.abs(weights))
        )
        return coeffs, floor

    nodes = quad.initial_nodes
    current, floor = pass_at(nodes)
    diff = np.full(n_terms + 1, np.inf)
    for _ in range(quad.max_doublings):
        nodes *= 2
        refined, floor = pass_at(nodes)
        diff = np.abs(refined - current)
        current = refined
        if diff.max() <= quad.tolerance:
            break
    diff = np.maximum(diff, floor)
    return HermiteCoefficients(tuple(current), BASIS_SCALE, tuple(diff))


def gaussian_coefficients(alpha: float, n_terms: int) -> HermiteCoefficients:
    """Exact expansion of e^(-a pi x^2) with a = tanh(2 alpha).

    c_{2m} = 2^(1/4) (1 + a)^(-1/2) rho^m sqrt((2m)!)/(2^m m!) with
    rho = (1 - a)/(1 + a) = e^(-4 alpha); odd coefficients vanish by
    parity.  Assembled in log space, so there is no factorial overflow.
    """
    if not alpha > 0.0 or not math.isfinite(alpha):
        raise ValueError("alpha must be positive and finite")
    if n_terms < 0:
        raise ValueError("n_terms must be nonnegative")
    a = math.tanh(2.0 * alpha)
    log_rho = math.log1p(-a) - math.log1p(a)
    base = 0.25 * math.log(2.0) - 0.5 * math.log1p(a)
    coeffs = [0.0] * (n_terms + 1)
    for m in range(0, n_terms // 2 + 1):
        log_c = (
            base
            + m * log_rho
            + 0.5 * math.lgamma(2 * m + 1)
            - m * math.log(2.0)
            - math.lgamma(m + 1)
        )
        coeffs[2 * m] = math.exp(log_c)
    return HermiteCoefficients(tuple(coeffs), BASIS_SCALE)


def synthetic_envelope_coefficients(
    alpha: float, n_terms: int, seed: int | None = None
) -> HermiteCoefficients:
    """Coefficient vector sitting exactly on the decay envelope.

    c_n = s_n e^(-alpha n) n^(-1/4) for n >= 1 with signs s_n = +1, or
    random +-1 when a seed is given; c_0 = 0.  By construction the
    certified decay constant is exactly 1.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    signs = np.ones(n_terms + 1)
    if seed is not None:
        signs = np.random.default_rng(seed).choice([-1.0, 1.0], size=n_terms + 1)
    coeffs = [0.0] * (n_terms + 1)
    for n in range(1, n_terms + 1):
        coeffs[n] = signs[n] * vemuri_envelope(n, alpha)
    return HermiteCoefficients(tuple(coeffs), BASIS_SCALE)


def vemuri_decay_check(coeffs: HermiteCoefficients, alpha: float) -> float:
    """Smallest C with |c_n| <= C e^(-alpha n) n^(-1/4) over testable n.

    Indices whose quad_error exceeds the envelope cannot distinguish a
    genuine coefficient from quadrature noise at the scale being
    tested, so they are excluded.  Returns +inf when the largest ratio
    sits at the truncation edge on a rising trend: the data then shows
    no attained supremum and certifies nothing.
    """
    if not alpha > 0.0 or not math.isfinite(alpha):
        raise ValueError("alpha must be positive and finite")
    kept: list[int] = []
    log_ratios: list[float] = []
    for n, (c, err) in enumerate(zip(coeffs.coeffs, coeffs.quad_error)):
        log_env = _log_envelope(n, alpha)
        if err > math.exp(log_env):
            continue
        kept.append(n)
        log_ratios.append(-math.inf if c == 0.0 else math.log(abs(c)) - log_env)
    if not kept:
        raise ValueError("quadrature error exceeds the tested envelope everywhere")
    best = max(range(len(kept)), key=lambda i: log_ratios[i])
    if best == len(kept) - 1 and len(kept) >= 3:
        window = log_ratios[-min(10, len(kept)) :]
        rising = all(b - a > 1e-9 for a, b in zip(window, window[1:]))
        if rising:
            return math.inf
    return math.exp(log_ratios[best])


def _phase_factors(n_top: int, t: float) -> np.ndarray:
    # phase angle 2(2n+1) pi t, reduced mod 2 pi before exp so that
    # dyadic-rational t (k/64, (2k+1)/16, 1/2) hits +-1 and +-i exactly
    n = np.arange(n_top + 1, dtype=float)
    reduced = np.mod(2.0 * (2.0 * n + 1.0) * t, 2.0)
    return np.exp(1j * np.pi * reduced)


def evolve_grid(
    coeffs: HermiteCoefficients,
    xs,
    t: float,
    envelope: tuple[float, float] | None = None,
) -> tuple[np.ndarray, float]:
    """Evolved values Phi(xs, t) and a shared tail radius.

    The tail radius bounds the dropped n > truncation_n part using a
    coefficient envelope (alpha, C) and the uniform basis bound; it is
    +inf when no envelope is supplied.
    """
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    weights = _phase_factors(coeffs.truncation_n, t) * np.asarray(coeffs.coeffs)
    values = weights @ basis_values(xs, coeffs.truncation_n)
    if envelope is None:
        return values, math.inf
    alpha, c_bound = envelope
    tail = math.exp(envelope_tail_log(alpha, c_bound, coeffs.truncation_n))
    # a bound must round up, never underflow to an exact zero
    return values, max(tail, 5e-324)


def evolve(
    coeffs: HermiteCoefficients,
    x: float,
    t: float,
    envelope: tuple[float, float] | None = None,
) -> EvolvedValue:
    """Phi_f(x, t) = sum_n e^(2(2n+1) pi i t) c_n e_n(x), truncated."""
    values, tail = evolve_grid(coeffs, [x], t, envelope)
    return EvolvedValue(complex(values[0]), tail)


def reconstructed_norm(
    coeffs: HermiteCoefficients, t: float, n_nodes: int = 4001, padding: float = 5.0
) -> float:
    """L^2 norm of the truncated Phi(., t) on a trapezoid grid.

    The window covers the largest basis turning point plus padding, so
    the integrand has decayed to roundoff at the endpoints and the
    trapezoid rule converges superalgebraically.
    """
    turning = math.sqrt((2.0 * coeffs.truncation_n + 1.0) / (2.0 * math.pi))
    width = turning + padding
    xs = np.linspace(-width, width, n_nodes)
    values, _ = evolve_grid(coeffs, xs, t)
    step = xs[1] - xs[0]
    total = step * float(np.sum(np.abs(values) ** 2))
    total -= 0.5 * step * float(np.abs(values[0]) ** 2 + np.abs(values[-1]) ** 2)
    return math.sqrt(total)


def weighted_sup(
    coeffs: HermiteCoefficients,
    weight_alpha: float,
    x_grid,
    t_grid,
    envelope: tuple[float, float] | None = None,
) -> float:
    """Grid sup of |Phi(x, t)| e^(tanh(weight_alpha) pi x^2).

    Accumulates in log space: the weight alone reaches e^(tanh(alpha)
    pi x^2), far past double range for wide grids.  The tail radius, if
    an envelope is given, is folded into every point.
    """
    if not weight_alpha > 0.0 or not math.isfinite(weight_alpha):
        raise ValueError("weight_alpha must be positive and finite")
    xs = np.atleast_1d(np.asarray(x_grid, dtype=float))
    ts = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if xs.size == 0 or ts.size == 0:
        raise ValueError("grids must be nonempty")
    log_weight = math.tanh(weight_alpha) * math.pi * xs * xs
    log_tail = -math.inf
    if envelope is not None:
        alpha, c_bound = envelope
        log_tail = envelope_tail_log(alpha, c_bound, coeffs.truncation_n)
    best = -math.inf
    for t in ts:
        values, _ = evolve_grid(coeffs, xs, float(t))
        with np.errstate(divide="ignore"):
            log_mag = np.log(np.abs(values))
        log_point = np.logaddexp(log_mag, log_tail) + log_weight
        best = max(best, float(np.max(log_point)))
    return math.exp(best)


def decay_certificate(
    coeffs: HermiteCoefficients, alpha: float, x_grid, t_grid
) -> DecayCertificate:
    """Certify sup |Phi| e^(tanh(alpha) pi x^2) over the grid.

    Refuses coefficients whose decay constant is not finite.  Two
    independent cross-checks ride along: the coefficient majorant
    sum |c_n| |e_n(x)| over envelope-certified indices must stay below
    the weighted-sum chain bound C (2 pi)^(1/4) S(sqrt(2 pi) x) at
    kappa = 1, beta = 1/4, y = alpha (plus the n = 0 term), and every
    evolved value must stay below the all-index majorant.
    """
    c_bound = vemuri_decay_check(coeffs, alpha)
    if not math.isfinite(c_bound):
        raise ValueError("coefficients violate the claimed decay envelope")
    xs = np.atleast_1d(np.asarray(x_grid, dtype=float))
    ts = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if xs.size == 0 or ts.size == 0:
        raise ValueError("grids must be nonempty")

    n_top = coeffs.truncation_n
    basis = basis_values(xs, n_top)
    magnitudes = np.abs(np.asarray(coeffs.coeffs))
    log_weight = math.tanh(alpha) * math.pi * xs * xs
    log_tail = envelope_tail_log(alpha, c_bound, n_top)

    certified = np.array(
        [
            err <= math.exp(_log_envelope(n, alpha))
            for n, err in enumerate(coeffs.quad_error)
        ]
    )
    majorant_all = magnitudes @ np.abs(basis)
    majorant_kept = np.where(certified, magnitudes, 0.0) @ np.abs(basis)

    params = SumParams(kappa=1.0, beta=0.25, y=alpha)
    majorant_slack = math.inf
    for j, x in enumerate(xs):
        chain = c_bound * BASIS_NORMALIZER * math.exp(
            direct_sum(BASIS_SCALE * float(x), params).logmag
        )
        if certified[0]:
            chain += magnitudes[0] * abs(basis[0, j])
        lhs = majorant_kept[j]
        slack = math.inf if lhs == 0.0 else (chain - lhs) / lhs
        majorant_slack = min(majorant_slack, slack)

    phases = [_phase_factors(n_top, float(t)) for t in ts]
    sup_log = -math.inf
    triangle_slack = math.inf
    for phase in phases:
        values = (phase * np.asarray(coeffs.coeffs)) @ basis
        mags = np.abs(values)
        with np.errstate(divide="ignore"):
            log_mag = np.log(mags)
        sup_log = max(sup_log, float(np.max(np.logaddexp(log_mag, log_tail) + log_weight)))
        with np.errstate(divide="ignore", invalid="ignore"):
            slacks = (majorant_all - mags) / np.where(mags > 0.0, mags, 1.0)
        triangle_slack = min(triangle_slack, float(np.min(slacks)))

    return DecayCertificate(
        alpha=float(alpha),
        sup_weighted=math.exp(sup_log),
        envelope_constant=c_bound,
        truncation_n=n_top,
        tail_contribution=math.exp(log_tail + float(np.max(log_weight))),
        x_grid=tuple(float(v) for v in xs),
        t_grid=tuple(float(v) for v in ts),
        majorant_slack_min=majorant_slack,
        triangle_slack_min=triangle_slack,
    )
