"""Completed L-values of self-dual L-functions by a smoothed approximate functional equation.

An L-function is described by its Dirichlet coefficients lambda(n), a list
of gamma factors Gamma_R(s + mu) or Gamma_C(s + mu), the conductor N and the
root number.  ``Lambda(s) = N^(s/2) gamma(s) L(s)`` satisfies
``Lambda(s) = eps Lambda(1 - s)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import loggamma


class InsufficientCoefficients(ValueError):
    """The coefficient list is too short for the requested accuracy."""


@dataclass(frozen=True)
class GammaFactor:
    kind: str  # "R" for pi^(-s/2) Gamma(s/2), "C" for 2 (2 pi)^(-s) Gamma(s)
    shift: float

    def log(self, s):
        s = s + self.shift
        if self.kind == "R":
            return -s / 2 * math.log(math.pi) + loggamma(s / 2)
        if self.kind == "C":
            return math.log(2) - s * math.log(2 * math.pi) + loggamma(s)
        raise ValueError(f"unknown gamma factor kind {self.kind!r}")


def log_gamma_product(factors, s):
    s = np.asarray(s, dtype=complex)
    return sum(f.log(s) for f in factors)


def _weight_matrix(factors, N: float, s: float, ns: np.ndarray, rho: float, c: float, T: float, h: float):
    """W_s(n) = (1/2 pi i) int_(c) N^((s+w)/2) gamma(s+w) e^(w^2/rho) n^-(s+w) dw / w."""
    t = np.arange(-T, T + h / 2, h)
    w = c + 1j * t
    logg = log_gamma_product(factors, s + w) + (s + w) / 2 * math.log(N) + w * w / rho
    base = np.exp(logg) / w  # shape (len(t),)
    logn = np.log(ns.astype(float))
    # trapezoid on a vertical line: dw = i dt, so (1/2 pi i) dw = dt / (2 pi)
    phase = np.exp(-np.outer(logn, s + w))
    return (phase @ base).real * h / (2 * math.pi)


def _combined_weights(factors, N, s, eps, ns, rho, c, T, h):
    W = _weight_matrix(factors, N, s, ns, rho, c, T, h)
    if s == 0.5:
        return (1 + eps) * W
    return W + eps * _weight_matrix(factors, N, 1 - s, ns, rho, c, T, h)


def tail_bound(factors, N: float, s: float, rho: float, n_max: int, coeff_bound=(2.0, 0.5), h: float = 0.05) -> float:
    """Bound for sum_{n > n_max} |lambda(n) W_s(n)| given |lambda(n)| <= C n^theta.

    Moving the contour to Re w = c gives |W_s(n)| <= n^(-s-c) I(c) with
    I(c) = (1/2 pi) int |N^((s+w)/2) gamma(s+w) e^(w^2/rho) / w| dt, and the
    sum over n is bounded by an integral; c is optimized over a grid.
    """
    C, theta = coeff_bound
    best = math.inf
    for c in np.geomspace(1.0, 400.0, 60):
        expo = s + c - theta
        if expo <= 1.0:
            continue
        T = min(math.sqrt(rho * 80.0 + c * c), 120.0 + c) + 2.0
        t = np.arange(-T, T + h / 2, h)
        w = c + 1j * t
        logi = (log_gamma_product(factors, s + w).real + (s + c) / 2 * math.log(N)
                + (c * c - t * t) / rho - np.log(np.abs(w)))
        top = float(np.max(logi))
        logI = top + math.log(float(np.sum(np.exp(logi - top))) * h / (2 * math.pi))
        val = math.log(C) + logI + (1 - expo) * math.log(n_max) - math.log(expo - 1)
        best = min(best, val)
    return math.exp(best) if best < 700 else math.inf


def afe(coeffs, factors, N: float, eps: int, s: float = 0.5, rho: float = 16.0,
        target_error: float = 1e-12, c: float = 1.5, T: float | None = None, h: float = 0.02,
        coeff_bound=(2.0, 0.5), chunk: int = 2048) -> tuple[float, float]:
    """Lambda(s) for real s from lambda(1..) in ``coeffs`` (index 0 ignored).

    The smoothing is G(w) = exp(w^2 / rho).  Returns the value and a bound
    for the omitted terms n > len(coeffs) - 1 (see tail_bound);
    InsufficientCoefficients is raised when that bound exceeds target_error.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    n_max = len(coeffs) - 1
    if n_max < 1:
        raise InsufficientCoefficients("no coefficients")
    if eps not in (1, -1):
        raise ValueError("root number of a self-dual L-function is +1 or -1")
    if not rho > 0:
        raise ValueError("smoothing parameter must be positive")
    if T is None:
        # the gamma factors decay like exp(-pi |t| / 2) per Gamma_C
        T = min(math.sqrt(rho * 80.0), 120.0) + 2.0
    tail = tail_bound(factors, N, s, rho, n_max, coeff_bound)
    if s != 0.5:
        tail += tail_bound(factors, N, 1 - s, rho, n_max, coeff_bound)
    elif eps == 1:
        tail *= 2
    if tail > target_error:
        raise InsufficientCoefficients(f"tail bound {tail:.3g} exceeds {target_error:.3g}; supply more coefficients")
    ns = np.arange(1, n_max + 1)
    terms = []
    for lo in range(0, n_max, chunk):
        part = ns[lo:lo + chunk]
        W = _combined_weights(factors, N, s, eps, part, rho, c, T, h)
        terms.extend((coeffs[1 + lo:1 + lo + len(part)] * W).tolist())
    return math.fsum(terms), tail


def central_value_incomplete_gamma(coeffs, k: int, N: int, eps: int, dps: int = 30) -> float:
    """Lambda(1/2) for a weight k form through Gamma(a, x), with no smoothing.

    For the single factor Gamma_C(s + (k-1)/2) and X = 2 pi n / sqrt(N),
    (1/2 pi i) int Gamma(a + w) X^-w dw/w = Gamma(a, X) gives
    Lambda(1/2) = (1 + eps) sum lambda(n) 2 (2 pi)^(-(k-1)/2) X^(-1/2) Gamma(k/2, X).
    """
    if eps == -1:
        return 0.0
    with mpmath.workdps(dps):
        x0 = 2 * mpmath.pi / mpmath.sqrt(N)
        pref = 2 * (2 * mpmath.pi) ** (-mpmath.mpf(k - 1) / 2)
        total = mpmath.mpf(0)
        for n in range(1, len(coeffs)):
            if coeffs[n] == 0:
                continue
            x = x0 * n
            total += mpmath.mpf(coeffs[n]) * mpmath.gammainc(mpmath.mpf(k) / 2, x) / mpmath.sqrt(x)
        return float(2 * pref * total)
