"""Special functions, exponentially weighted quadrature and the range cubic."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special

from .errors import ConvergenceError, ParameterError

EULER_GAMMA = 0.57721566490153286061

# g = s**_NEAR_ZERO_POWER on [0, 1]: turns g^(-1/2), g^(1/3) and log-type
# endpoint behaviour into polynomials in s.
_NEAR_ZERO_POWER = 6
_MAX_LAGUERRE_NODES = 128


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for :func:`integrate_expweighted`.

    The rule starts at ``node_count`` nodes per sub-range and doubles up to
    ``max_refinements`` times until two successive estimates differ by at most
    ``max(abs_tol, rel_tol * |estimate|)``.
    """

    node_count: int = 16
    abs_tol: float = 1e-10
    max_refinements: int = 3
    rel_tol: float = 0.0

    def __post_init__(self) -> None:
        if self.node_count < 8:
            raise ParameterError(f"node_count must be >= 8, got {self.node_count}")
        if not self.abs_tol > 0:
            raise ParameterError(f"abs_tol must be > 0, got {self.abs_tol}")
        if self.rel_tol < 0 or self.max_refinements < 0:
            raise ParameterError("rel_tol and max_refinements must be >= 0")
        if self.node_count * 2**self.max_refinements > _MAX_LAGUERRE_NODES:
            raise ParameterError(
                f"node_count * 2**max_refinements must not exceed {_MAX_LAGUERRE_NODES}"
            )


def _require_positive(name: str, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ParameterError(f"{name} requires x > 0")
    return x


def bessel_k1(x):
    """Modified Bessel function of the second kind, order one."""
    x = _require_positive("bessel_k1", x)
    return special.k1(x)[()]


def bessel_k1_scaled(x):
    """exp(x) * K1(x), finite where K1 itself underflows."""
    x = _require_positive("bessel_k1_scaled", x)
    return special.k1e(x)[()]


def _e1_series(x: np.ndarray) -> np.ndarray:
    # -gamma - ln x - sum_{k>=1} (-x)^k / (k k!), used for 0 < x <= 1
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 40):
        term = term * (-x) / k
        total += term / k
    return -EULER_GAMMA - np.log(x) - total


def _e1_scaled_cf(x: np.ndarray) -> np.ndarray:
    # exp(x) E1(x) by modified Lentz on the even continued fraction, x > 1
    tiny = 1e-300
    b = np.asarray(x, dtype=float) + 1.0
    c = np.full_like(b, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    active = np.arange(b.size)
    for i in range(1, 1000):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h[active] *= delta
        keep = np.abs(delta - 1.0) > 4e-16
        if not keep.any():
            return h
        active, b, c, d = active[keep], b[keep], c[keep], d[keep]
    raise ConvergenceError("E1 continued fraction did not converge")


def exp_e1_scaled(x):
    """exp(x) * E1(x) without overflow; tends to 1/x as x grows and to 0 at x = inf."""
    x = _require_positive("exp_e1_scaled", x)
    flat = np.atleast_1d(x).astype(float).ravel()
    out = np.empty_like(flat)
    small = flat <= 1.0
    big = ~small & np.isfinite(flat)
    out[small] = np.exp(flat[small]) * _e1_series(flat[small])
    if np.any(big):
        out[big] = _e1_scaled_cf(flat[big])
    out[np.isinf(flat)] = 0.0
    return out.reshape(np.shape(x))[()]


def expint_e1(x):
    """Exponential integral E1(x) = int_x^inf e^-t / t dt."""
    x = _require_positive("expint_e1", x)
    flat = np.atleast_1d(x).astype(float).ravel()
    out = np.empty_like(flat)
    small = flat <= 1.0
    out[small] = _e1_series(flat[small])
    big = ~small
    if np.any(big):
        with np.errstate(under="ignore"):
            out[big] = _e1_scaled_cf(flat[big]) * np.exp(-flat[big])
    return out.reshape(np.shape(x))[()]


@lru_cache(maxsize=None)
def _expweighted_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes g_i and weights w_i with sum w_i f(g_i) ~ int_0^inf f(g) e^-g dg.

    [0, 1] uses Gauss-Legendre in s with g = s^6; [1, inf) uses
    Gauss-Laguerre on g - 1.
    """
    s, ws = np.polynomial.legendre.leggauss(n)
    s = 0.5 * (s + 1.0)
    ws = 0.5 * ws
    p = _NEAR_ZERO_POWER
    g_near = s**p
    w_near = ws * p * s ** (p - 1) * np.exp(-g_near)
    y, wy = np.polynomial.laguerre.laggauss(n)
    g_far = 1.0 + y
    w_far = wy * np.exp(-1.0)
    nodes = np.concatenate([g_near, g_far])
    weights = np.concatenate([w_near, w_far])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


DEFAULT_QUADRATURE = QuadratureSpec()


def integrate_expweighted(f: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Compute int_0^inf f(g) e^-g dg.

    ``f`` receives a 1-D array of nodes and must return an array whose last
    axis matches it; leading axes are integrated independently (batching) and
    all of them must meet the tolerance. Returns a float or an array over the
    leading axes.
    """
    n = spec.node_count
    previous = None
    worst = float("nan")
    for _ in range(spec.max_refinements + 1):
        nodes, weights = _expweighted_rule(n)
        values = np.asarray(f(nodes), dtype=float)
        estimate = values @ weights
        if previous is not None:
            diff = np.abs(estimate - previous)
            tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(estimate))
            if np.all(diff <= tol):
                return estimate[()] if np.ndim(estimate) == 0 else estimate
            worst = float(np.max(diff))
        previous = estimate
        n *= 2
    raise ConvergenceError(
        f"exp-weighted quadrature did not reach tolerance after {spec.max_refinements} "
        f"refinements (last change {worst:.3g})"
    )


def integrate_pdfweighted(f: Callable[[np.ndarray], np.ndarray], d, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Compute E[f(H)] = int_0^inf f(h) f_H(h) dh for a HarvestDistribution ``d``.

    Since H = theta1 u + theta2 u^2 with u ~ Exp(1), this is the
    exp-weighted integral of f(theta1 u + theta2 u^2).
    """
    return integrate_expweighted(lambda u: f(d.transform(u)), spec)


def _cubic_value(coeffs, y):
    a, b, c, d = coeffs
    return ((a * y + b) * y + c) * y + d


def _sign_changes(coeffs) -> int:
    signs = [np.sign(v) for v in coeffs if v != 0]
    return sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)


def _del_ferro(a: float, b: float, c: float, d: float) -> float:
    # substitution y = rho + u reduces to the depressed cubic; real root from
    # Cardano's radicals, or the trigonometric form when all three roots are real
    u = -b / (3 * a)
    v = u**3 + (b * c - 3 * a * d) / (6 * a**2)
    w = c / (3 * a)
    q = w - u**2
    disc = v**2 + q**3
    if disc >= 0:
        root = np.sqrt(disc)
        return float(u + np.cbrt(v - root) + np.cbrt(v + root))
    # q < 0 here; largest of the three real roots
    m = np.sqrt(-q)
    phi = np.arccos(np.clip(v / m**3, -1.0, 1.0))
    return float(u + 2 * m * np.cos(phi / 3))


def solve_depressed_cubic_real(coeffs) -> float:
    """Unique positive root of a y^3 + b y^2 + c y + d.

    Coefficients must have a single sign change with a leading positive term
    and ``d < 0`` (e.g. a > 0, b >= 0, c <= 0, d < 0), which guarantees exactly
    one positive root. ``a = 0`` falls back to the quadratic (or linear)
    formula. The closed-form estimate is polished by safeguarded Newton steps.
    """
    a, b, c, d = (float(v) for v in coeffs)
    if not all(np.isfinite([a, b, c, d])):
        raise ParameterError(f"cubic coefficients must be finite, got {coeffs}")
    if a < 0 or b < 0 or d >= 0 or _sign_changes((a, b, c, d)) != 1:
        raise ParameterError(
            f"cubic coefficients {coeffs} must have a >= 0, b >= 0, d < 0 and exactly one sign change"
        )
    if a > 0:
        guess = _del_ferro(a, b, c, d)
    elif b > 0:
        root = np.sqrt(c * c - 4 * b * d)
        # pick the cancellation-free form of the positive root
        guess = (-c + root) / (2 * b) if c <= 0 else -2 * d / (c + root)
    else:
        return -d / c
    return _polish_root((a, b, c, d), guess)


def _polish_root(coeffs, guess: float) -> float:
    a, b, c, d = coeffs
    lo, hi = 0.0, guess if np.isfinite(guess) and guess > 0 else 1.0
    while _cubic_value(coeffs, hi) <= 0:
        lo, hi = hi, hi * 2.0
    y = min(max(guess, lo), hi) if np.isfinite(guess) else 0.5 * (lo + hi)
    for _ in range(200):
        fy = _cubic_value(coeffs, y)
        if fy == 0:
            return y
        if fy < 0:
            lo = y
        else:
            hi = y
        dfy = (3 * a * y + 2 * b) * y + c
        step_ok = dfy != 0
        if step_ok:
            y_new = y - fy / dfy
            step_ok = lo < y_new < hi
        if not step_ok:
            y_new = 0.5 * (lo + hi)
        if abs(y_new - y) <= 4 * np.finfo(float).eps * abs(y_new):
            return y_new
        y = y_new
    return y


def cubic_residual(coeffs, y: float) -> float:
    """|p(y)| relative to the largest term magnitude."""
    a, b, c, d = coeffs
    terms = [abs(a * y**3), abs(b * y**2), abs(c * y), abs(d)]
    return abs(_cubic_value(coeffs, y)) / max(terms)
