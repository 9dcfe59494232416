"""Geometric side of the relative trace formula: hyperbolic and unipotent terms.

The hyperbolic term is a sum over b in Q - {0, -1} of products of local
orbital integrals.  Only b in a lattice (n/M)Z can contribute, and the sum is
cut at |b| <= B with a certified bound on what is left out.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from numpy import euler_gamma
from sympy import factorint, primerange

from . import arch, padic
from .field import (
    IdealQ,
    QuadraticCharacter,
    _normalize_S,
    check_configuration,
    dirichlet_L1,
    enumerate_b,
    eta_tilde,
    gauss_sum,
    laurent_zeta_constants,
    lattice_denominator,
)
from .hecke import TestFunction


class TruncationError(RuntimeError):
    """The requested truncation error cannot be certified."""


@dataclass(frozen=True)
class GeometricConfig:
    weight: int
    level: IdealQ
    eta: QuadraticCharacter
    S: dict = field(default_factory=dict)
    eps_trunc: float = 1e-10
    bound: float | None = None
    threads: int | None = None

    def __post_init__(self):
        level = self.level if isinstance(self.level, IdealQ) else IdealQ(int(self.level))
        object.__setattr__(self, "level", level)
        eta = self.eta if isinstance(self.eta, QuadraticCharacter) else QuadraticCharacter(int(self.eta))
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "S", _normalize_S(self.S.items() if isinstance(self.S, dict) else self.S))
        if self.weight < 6 or self.weight % 2:
            raise ValueError("the trace formula needs an even weight l >= 6")
        if not self.eps_trunc > 0:
            raise ValueError("truncation target must be positive")
        check_configuration(level, eta, self.S.items())


@dataclass
class GeometricReport:
    hyperbolic: complex
    truncation_error: float
    unipotent: complex
    bound: float
    n_terms: int
    n_nonzero: int
    per_b: list = field(default_factory=list)

    @property
    def total(self) -> complex:
        return self.hyperbolic + self.unipotent


def _threads(threads) -> int:
    if threads is None:
        threads = int(os.environ.get("RTF_THREADS", "1") or 1)
    return max(1, int(threads))


def _fsum_complex(values) -> complex:
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _special_primes(cfg: GeometricConfig, primes) -> set[int]:
    return set(primes) | set(cfg.level.primes) | set(cfg.eta.ramified_primes)


def nonarch_factors(cfg: GeometricConfig, b, alpha: TestFunction | None = None) -> dict:
    """Local factors at the primes where they can differ from 1.

    Keys are primes.  For primes of the test function the value is a tuple of
    the spherical integrals for m = 0..deg; everywhere else a float.
    """
    b = Fraction(b)
    degrees = _prepare(cfg, alpha).degrees()
    out = {}
    num = abs((b * (b + 1)).numerator)
    candidates = _special_primes(cfg, degrees) | set(factorint(num)) if num > 1 else _special_primes(cfg, degrees)
    for p in sorted(candidates):
        chi = cfg.eta.local(p)
        if p in degrees:
            out[p] = tuple(float(padic.j_local_spherical(p, chi, m, b)) for m in range(degrees[p] + 1))
        elif p in cfg.eta.ramified_primes:
            out[p] = float(padic.j_local_ramified(chi, b))
        elif cfg.level.ord(p):
            out[p] = float(padic.j_local_level(p, chi, cfg.level.ord(p), b))
        else:
            out[p] = float(padic.j_local_unramified(p, chi, b))
    return out


def _b_term(cfg: GeometricConfig, alpha: TestFunction, b: Fraction) -> complex:
    parity = cfg.eta.sign
    if parity == 1 and b * (b + 1) > 0:
        return 0j
    J = arch.j_arch(cfg.weight, parity, b)
    if J == 0:
        return 0j
    local = nonarch_factors(cfg, b, alpha)
    common = 1.0
    for p, v in local.items():
        if p not in alpha.primes:
            common *= v
    if common == 0:
        return 0j
    s_part = []
    for key, c in alpha.terms.items():
        t = float(c)
        for p, m in zip(alpha.primes, key):
            t *= local[p][m]
        s_part.append(t)
    return J * common * math.fsum(s_part)


def divisor_constant(eps: float) -> float:
    """C with d(N) <= C N^eps for every N >= 1."""
    out = 1.0
    for p in primerange(2, int(2 ** (1 / eps)) + 1):
        # (k+1) p^(-k eps) is log-concave in k with its peak below 1/(eps log p)
        kmax = math.ceil(1 / (eps * math.log(p))) + 1
        out *= max((k + 1) / p ** (k * eps) for k in range(kmax + 1))
    return out


def _spherical_constant(q: int, m: int) -> float:
    # sum of |coefficients| of the kernel shells in the spherical integral
    if m == 0:
        return 2.0
    acc = q ** (-m / 2)
    for ell in range(m):
        acc += abs((m - ell - 1) * q ** ((2 - m) / 2) - (m - ell + 1) * q ** (-m / 2))
    return acc


def nonarch_majorant(cfg: GeometricConfig, alpha: TestFunction) -> float:
    """A with |prod_p J_p(b)| <= A d(|a(a+M)|) for b = a/M in the lattice."""
    A = 1.0
    for p in cfg.eta.ramified_primes:
        A *= 2.0 * p ** (-cfg.eta.conductor_exponent(p)) / (1 - 1 / p)
    s_part = 0.0
    for key, c in alpha.terms.items():
        t = abs(float(c))
        for p, m in zip(alpha.primes, key):
            t *= 2.0 * _spherical_constant(p, m)
        s_part += t
    return A * s_part


def tail_certificate(cfg: GeometricConfig, alpha: TestFunction, B: float) -> float:
    """Certified bound for the part of the hyperbolic sum with |b| > B."""
    if cfg.eta.sign == 1:
        return 0.0  # the odd archimedean integral vanishes for |b| > 1
    M = lattice_denominator(cfg.eta, alpha.degrees().items())
    h = cfg.level.n / M
    A = nonarch_majorant(cfg, alpha)
    best = math.inf
    for eps in (1 / 3, 1 / 4, 1 / 5, 1 / 6):
        growth = 2 * eps
        if cfg.weight / 2 - growth <= 1:
            continue
        # d(|a(a+M)|) <= C (2 M^2 b^2)^eps once |b| >= 1
        c = divisor_constant(eps) * (2 * M * M) ** eps
        best = min(best, A * c * arch.arch_tail_bound(cfg.weight, B, h, growth))
    return best


def _prepare(cfg: GeometricConfig, alpha: TestFunction | None) -> TestFunction:
    """The test function on all of S; places it omits carry the constant 1."""
    alpha = (alpha or TestFunction.unit()).extend(cfg.S)
    if set(alpha.primes) != set(cfg.S):
        raise ValueError("test function lives on primes outside S")
    for p, m in alpha.degrees().items():
        if m > cfg.S[p]:
            raise ValueError(f"degree {m} at {p} exceeds the configured maximum {cfg.S[p]}")
    return alpha


def choose_bound(cfg: GeometricConfig, alpha: TestFunction, max_bound: float = 1e6) -> float:
    if cfg.eta.sign == 1:
        return 1.0
    B = 4.0
    while tail_certificate(cfg, alpha, B) > cfg.eps_trunc:
        B *= 2
        if B > max_bound:
            raise TruncationError(f"truncation target {cfg.eps_trunc:g} needs |b| > {max_bound:g}")
    return B


def hyperbolic_term(cfg: GeometricConfig, alpha: TestFunction | None = None, keep_terms: bool = False):
    """(value, certified error, number of b, per-b list)."""
    alpha = _prepare(cfg, alpha)
    if cfg.bound is None:
        B = choose_bound(cfg, alpha)
    else:
        B = float(cfg.bound)
        if cfg.eta.sign == 0 and B < 2:
            raise ValueError("the truncation bound must be at least 2")
    err = tail_certificate(cfg, alpha, B)
    if err > cfg.eps_trunc:
        raise TruncationError(f"certificate {err:.3g} at B={B:g} exceeds target {cfg.eps_trunc:g}")
    bs = [c.b for c in enumerate_b(cfg.level, cfg.eta, alpha.degrees().items(), B)]
    if cfg.eta.sign == 1:
        bs = [b for b in bs if -1 < b < 0]
    n = _threads(cfg.threads)
    if n > 1 and len(bs) > 64:
        chunk = -(-len(bs) // n)
        pieces = [bs[i:i + chunk] for i in range(0, len(bs), chunk)]
        with ThreadPoolExecutor(n) as ex:
            parts = list(ex.map(lambda part: [_b_term(cfg, alpha, b) for b in part], pieces))
        values = [v for part in parts for v in part]
    else:
        values = [_b_term(cfg, alpha, b) for b in bs]
    per_b = list(zip(bs, values)) if keep_terms else []
    return _fsum_complex(values), err, B, len(bs), sum(1 for v in values if v != 0), per_b


def c_F_eta_constant(l: int, n, eta: QuadraticCharacter) -> float:
    """The constant multiplying the unipotent term."""
    if not eta.trivial:
        return dirichlet_L1(eta)
    n = n if isinstance(n, IdealQ) else IdealQ(int(n))
    R, C0 = laurent_zeta_constants()
    harmonic = math.fsum(1 / k for k in range(1, l // 2))
    bracket = -0.5 * (euler_gamma + math.log(math.pi)) + 0.5 * math.log(n.norm) + harmonic
    return C0 + R * bracket


def unipotent_term(cfg: GeometricConfig, alpha: TestFunction | None = None, printed: bool = False) -> complex:
    """Unipotent contribution to the geometric side.

    The term collects an upper and a lower unipotent piece whose prefactors
    are (1 + sigma i^l [n=1]) and (sigma + i^l [n=1]) with
    sigma = (-1)^eps(eta) eta~(n).  When sigma = 1 they add up to the
    single factor 2(1 + i^l [n=1]) with the constant c_F_eta_constant;
    ``printed=True`` uses that combined form regardless of sigma.
    """
    alpha = _prepare(cfg, alpha)
    eta = cfg.eta
    R = 1.0 if eta.trivial else 0.0
    C_u = c_F_eta_constant(cfg.weight, 1, eta)
    log_n = math.log(cfg.level.norm)
    signs = {p: cfg.eta.local(p).unramified_value for p in alpha.primes}
    base, extra = [], []
    for key, c in alpha.terms.items():
        U = [float(padic.u_local(p, signs[p], m)) for p, m in zip(alpha.primes, key)]
        Up = [float(padic.u_prime_local(p, m)) * math.log(p) for p, m in zip(alpha.primes, key)]
        prod = math.prod(U)
        cross = math.fsum(Up[i] * math.prod(U[:i] + U[i + 1:]) for i in range(len(U)))
        base.append(float(c) * (C_u * prod + R * cross))
        extra.append(float(c) * R * log_n * prod)
    base, extra = math.fsum(base), math.fsum(extra)
    front = (-1) ** eta.sign * gauss_sum(eta)
    at_one = 1j ** cfg.weight if cfg.level.n == 1 else 0
    if printed:
        return 2 * front * (1 + at_one) * (base + 0.5 * extra)
    sigma = (-1) ** eta.sign * eta_tilde(eta, cfg.level)
    upper = 1 + sigma * at_one
    lower = sigma + at_one
    return front * ((upper + lower) * base + lower * extra)


def geometric_side(cfg: GeometricConfig, alpha: TestFunction | None = None, keep_terms: bool = False) -> GeometricReport:
    hyp, err, B, count, nonzero, per_b = hyperbolic_term(cfg, alpha, keep_terms)
    return GeometricReport(hyp, err, unipotent_term(cfg, alpha), B, count, nonzero, per_b)
