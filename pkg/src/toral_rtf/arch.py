"""Archimedean special functions and orbital integrals.

Shintani functions on GL(2, R), the integral C_l(z), Legendre functions of
integer degree, and the real-place hyperbolic orbital integrals J^1 and
J^sgn, each with a quadrature counterpart used as an oracle.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
from scipy import integrate
from scipy.special import gamma as cgamma, gammaln

__all__ = [
    "principal_log", "cpow", "shintani_cartan", "shintani_unipotent",
    "shintani_lower_unipotent", "shintani", "cartan_coordinates",
    "shintani_bound", "c_l", "c_l_zero", "legendre_P", "legendre_Q",
    "gauss_2F1", "j_arch_even", "j_arch_odd", "j_arch", "j_plus_hypergeometric",
    "j_arch_oracle", "j_arch_majorant", "arch_tail_bound", "shintani_orbital",
    "shintani_orbital_quadrature", "shintani_inner_product",
]


class QuadratureError(RuntimeError):
    pass


def _check_weight(l, minimum=2):
    if int(l) != l or l % 2:
        raise ValueError(f"weight must be an even integer, got {l}")
    if l < minimum:
        raise ValueError(f"weight must be at least {minimum}, got {l}")
    return int(l)


def principal_log(z: complex) -> complex:
    """log with imaginary part in (-pi, pi]."""
    z = complex(z)
    if z == 0:
        raise ZeroDivisionError("log of zero")
    arg = math.atan2(z.imag, z.real)
    if arg == -math.pi:
        arg = math.pi
    return complex(math.log(abs(z)), arg)


def cpow(base: complex, expo: complex) -> complex:
    """Principal power base**expo = exp(expo * log base)."""
    expo = complex(expo)
    if expo.imag == 0 and float(expo.real).is_integer():
        return complex(base) ** int(expo.real)
    return cmath.exp(expo * principal_log(base))


# -- Shintani functions ------------------------------------------------------

def _y(r: float) -> complex:
    e = math.exp(2.0 * r)
    w = (e - 1j) / (e + 1j)
    return w * w


def shintani_cartan(l: int, z: complex, r: float) -> complex:
    l = _check_weight(l)
    y = _y(r)
    return 2.0 ** (-l / 2) * cpow(-y, (2 * complex(z) - l) / 4) * (1 - y) ** (l // 2)


def shintani_unipotent(l: int, z: complex, x: float) -> complex:
    l = _check_weight(l)
    return cpow(1 + 1j * x, complex(z) - l / 2)


def shintani_lower_unipotent(l: int, z: complex, t: float) -> complex:
    l = _check_weight(l)
    return cpow(1 - 1j * t, -complex(z) - l / 2)


def shintani(l: int, z: complex, t1: float, t2: float, r: float, theta: float) -> complex:
    """Value at diag(t1, t2) a_r k_theta."""
    scale = cpow(abs(t1 / t2), z)
    return scale * shintani_cartan(l, z, r) * cmath.exp(1j * l * theta)


def cartan_coordinates(g) -> tuple[float, float, float, float]:
    """Write g (positive determinant) as diag(t1, t2) a_r k_theta with t1, t2 > 0."""
    g = np.asarray(g, dtype=float)
    if np.linalg.det(g) <= 0:
        raise ValueError("needs positive determinant")
    n1, n2 = np.linalg.norm(g[0]), np.linalg.norm(g[1])
    th2r = float(g[0] @ g[1]) / (n1 * n2)
    r = 0.5 * math.atanh(th2r)
    c = math.sqrt(math.cosh(2 * r))
    t1, t2 = n1 / c, n2 / c
    ar = np.array([[math.cosh(r), math.sinh(r)], [math.sinh(r), math.cosh(r)]])
    k = np.linalg.solve(ar, np.diag([1 / t1, 1 / t2]) @ g)
    theta = math.atan2(k[1, 0], k[0, 0])
    return t1, t2, r, theta


def shintani_bound(l: int, z: complex, t1: float, t2: float, r: float) -> float:
    """Majorant of |Psi| at diag(t1, t2) a_r, attained for real z.

    |1 - y| = 2 / cosh 2r cancels the prefactor 2^(-l/2), and since |y| = 1
    the power of -y contributes at most e^(pi |Im z| / 2).
    """
    z = complex(z)
    return abs(t1 / t2) ** z.real * math.exp(math.pi * abs(z.imag) / 2) * math.cosh(2 * r) ** (-l / 2)


def shintani_inner_product(l: int, z: float, rmax: float = 40.0) -> float:
    """2 * integral over R of Psi^(z)(a_r) conj(Psi^(-z)(a_r)) cosh(2r) dr."""
    l = _check_weight(l, 4)

    def f(r):
        v = shintani_cartan(l, z, r) * np.conj(shintani_cartan(l, -np.conj(z), r))
        return (v * math.cosh(2 * r)).real

    val, err = integrate.quad(f, -rmax, rmax, points=[0.0], limit=400, epsabs=1e-14, epsrel=1e-12)
    return 2.0 * val


# -- C_l(z) ------------------------------------------------------------------

def c_l(z: complex, l: int, tol: float = 1e-12) -> complex:
    l = _check_weight(l, 4)
    z = complex(z)

    def integrand(u):
        w = (u - 1j) / (u + 1j)
        a = cpow(-(w * w), z)
        b = cpow(-(1 / (w * w)), z)
        return (a + b) * (1 + u * u) ** (1 - l) * u ** (l - 2)

    parts = []
    for comp in (lambda u: integrand(u).real, lambda u: integrand(u).imag):
        val = 0.0
        errs = 0.0
        for lo, hi in ((1.0, 4.0), (4.0, 64.0), (64.0, np.inf)):
            v, e = integrate.quad(comp, lo, hi, limit=400, epsabs=tol * 1e-2, epsrel=1e-13)
            val += v
            errs += e
        if errs > tol:
            raise QuadratureError(f"C_l quadrature error estimate {errs:.3g} exceeds {tol:.3g}")
        parts.append(val)
    return complex(parts[0], parts[1])


def c_l_zero(l: int, form: int = 1) -> float:
    l = _check_weight(l, 4)
    if form == 1:
        return 0.5 * math.exp(2 * gammaln((l - 1) / 2) - gammaln(l - 1))
    if form == 2:
        return 2.0 ** (3 - 2 * l) * math.pi * math.exp(gammaln(l - 1) - 2 * gammaln(l / 2))
    raise ValueError("form is 1 or 2")


# -- Legendre and hypergeometric functions ----------------------------------

def legendre_P(n: int, x: float) -> float:
    if n < 0 or int(n) != n:
        raise ValueError("degree must be a non-negative integer")
    p0, p1 = 1.0, float(x)
    if n == 0:
        return p0
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    return p1


def legendre_Q(n: int, x: float) -> float:
    """Second-kind Legendre function for x > 1.

    Q_n is the minimal solution of the three-term recurrence there, so it is
    obtained by running the recurrence downwards and normalising with
    Q_0 = artanh(1/x).
    """
    if n < 0 or int(n) != n:
        raise ValueError("degree must be a non-negative integer")
    x = float(x)
    if not x > 1:
        raise ValueError("legendre_Q is implemented for x > 1")
    lam = x + math.sqrt((x - 1) * (x + 1))
    extra = int(math.ceil(20 * math.log(10) / (2 * math.log(lam)))) + 10
    N = n + min(extra, 10 ** 7)
    # (k+1) Q_{k+1} = (2k+1) x Q_k - k Q_{k-1}, run from the top.
    q_hi, q = 0.0, 1e-300
    vals = {}
    for k in range(N, 0, -1):
        q_lo = ((2 * k + 1) * x * q - (k + 1) * q_hi) / k
        q_hi, q = q, q_lo
        if k - 1 <= n:
            vals[k - 1] = q
        if abs(q) > 1e250:
            q_hi /= 1e250
            q /= 1e250
            vals = {i: v / 1e250 for i, v in vals.items()}
    vals[N] = 0.0
    return vals[n] * (math.atanh(1.0 / x) / vals[0])


def gauss_2F1(a: float, b: float, c: float, x: float, rtol: float = 1e-16, max_terms: int = 10 ** 6) -> float:
    if not 0 <= x < 1:
        raise ValueError("series evaluation needs 0 <= x < 1")
    term = 1.0
    acc = [1.0]
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * x
        acc.append(term)
        if abs(term) <= rtol * abs(acc[0] + term) and k > 2:
            # the terms decay at least geometrically from here; bound the rest
            ratio = abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2)) * x)
            if ratio < 1 and abs(term) * ratio / (1 - ratio) <= rtol:
                return math.fsum(acc)
    raise ArithmeticError("hypergeometric series did not converge")


# -- archimedean hyperbolic orbital integrals -------------------------------

def _as_float(b) -> float:
    return float(Fraction(b)) if isinstance(b, (int, Fraction)) else float(b)


def _arc_interior(l: int, b: float) -> float:
    # b in (-1, 0)
    x = 2 * b + 1
    out = [2.0 * math.log(abs((b + 1) / b)) * legendre_P(l // 2 - 1, x)]
    for m in range(1, l // 4 + 1):
        out.append(-8.0 * (l - 4 * m + 1) / ((2 * m - 1) * (l - 2 * m)) * legendre_P(l // 2 - 2 * m, x))
    return math.fsum(out)


def j_arch_even(l: int, b) -> float:
    """J^1(l; b), the even-character archimedean orbital integral."""
    l = _check_weight(l, 4)
    bf = _as_float(b)
    if bf == 0 or bf == -1:
        raise ValueError("b must avoid 0 and -1")
    n = l // 2 - 1
    if bf > 0:
        return 4.0 * legendre_Q(n, 2 * bf + 1)
    if bf < -1:
        return (-1) ** (l // 2) * 4.0 * legendre_Q(n, -2 * bf - 1)
    return _arc_interior(l, bf)


def j_arch_odd(l: int, b) -> complex:
    """J^sgn(l; b); purely imaginary."""
    l = _check_weight(l, 4)
    bf = _as_float(b)
    if bf == 0 or bf == -1:
        raise ValueError("b must avoid 0 and -1")
    if bf > 0 or bf < -1:
        return 0j
    return 2j * math.pi * legendre_P(l // 2 - 1, 2 * bf + 1)


def j_arch(l: int, parity: int, b) -> complex:
    return complex(j_arch_even(l, b)) if parity == 0 else j_arch_odd(l, b)


def j_plus_hypergeometric(l: int, b) -> float:
    """Half-line integral for b > 0 through the Gauss hypergeometric series."""
    l = _check_weight(l, 4)
    bf = _as_float(b)
    if bf <= 0:
        raise ValueError("needs b > 0")
    beta = math.exp(2 * gammaln(l / 2) - gammaln(l))
    return (1 + bf) ** (-l / 2) * beta * gauss_2F1(l / 2, l / 2, l, 1 / (1 + bf))


def _half_line(l: int, b: float, sign: int, epsabs: float):
    # t = sign * e^u, so d^x t = du
    h = l // 2

    def f(u):
        t = sign * math.exp(u)
        return (1 - 1j * t) ** (-h) * (1 + b + 1j * b / t) ** (-h)

    span = 2.0 * 40.0 / h + abs(math.log(abs(b))) + abs(math.log(abs(1 + b))) + 10.0
    pts = sorted({0.0, math.log(abs(b)), math.log(abs(1 + b)), math.log(abs(b / (1 + b)))})
    lo, hi = -span, span
    edges = [lo] + [p for p in pts if lo < p < hi] + [hi]
    re, im, err = [], [], 0.0
    for a, c in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(lambda u: f(u).real, a, c, limit=400, epsabs=epsabs, epsrel=1e-13)
        re.append(v)
        err += e
        v, e = integrate.quad(lambda u: f(u).imag, a, c, limit=400, epsabs=epsabs, epsrel=1e-13)
        im.append(v)
        err += e
    return complex(math.fsum(re), math.fsum(im)), err


def j_arch_oracle(l: int, parity: int, b, tol: float = 1e-8, halves: bool = False):
    """Quadrature of the defining integral over R^x, split at t = 0."""
    l = _check_weight(l, 4)
    bf = _as_float(b)
    if bf == 0 or bf == -1:
        raise ValueError("b must avoid 0 and -1")
    jp, e1 = _half_line(l, bf, +1, tol * 1e-4)
    jm, e2 = _half_line(l, bf, -1, tol * 1e-4)
    if e1 + e2 > tol:
        raise QuadratureError(f"orbital integral quadrature error {e1 + e2:.3g} exceeds {tol:.3g}")
    if halves:
        return jp, jm
    return jp + (-1) ** parity * jm


def j_arch_majorant(l: int, B: float) -> float:
    """K with |J^1(l; b)| <= K |b|^(-l/2) for every lattice point with |b| > B > 1."""
    l = _check_weight(l, 4)
    if not B > 1:
        raise ValueError("the majorant needs B > 1")
    beta = math.exp(2 * gammaln(l / 2) - gammaln(l))
    return 2.0 * beta * gauss_2F1(l / 2, l / 2, l, 1.0 / B)


def arch_tail_bound(l: int, B, spacing=1, growth: float = 0.0) -> float:
    """Certified bound for the sum of |J^1(l;b)| |b|^growth over b in spacing*Z, |b| > B.

    The majorant |J^1(l;b)| <= K |b|^(-l/2) follows from the hypergeometric
    form (for b > 0) and the reflection b -> -1-b (for b < -1); the lattice
    sum is bounded by its first term plus an integral.
    """
    l = _check_weight(l, 4)
    B = float(B)
    h = float(spacing)
    s = l / 2 - growth
    if s <= 1:
        raise ValueError("tail does not converge for this growth")
    K = j_arch_majorant(l, B)
    k0 = math.floor(B / h) + 1
    one_side = (h * k0) ** (-s) + h ** (-s) * k0 ** (1 - s) / (s - 1)
    return 2.0 * K * one_side


# -- orbital integrals of Shintani functions over the torus -----------------

def shintani_orbital(l: int, z: complex, eps: int, eps_prime: int, lower: bool = False) -> complex:
    """Torus integral of Psi^(0)(n(x) w0^eps') |x|^z sgn(x)^eps d^x x.

    ``lower`` uses the lower unipotent subgroup instead of the upper one.
    """
    l = _check_weight(l, 4)
    z = complex(z)
    if not 0 < z.real < l / 2:
        raise ValueError("z must lie in the strip 0 < Re z < l/2")
    beta = complex(cgamma(z)) * complex(cgamma(l / 2 - z)) / math.gamma(l / 2)
    unit = (-1j if lower else 1j) ** eps
    return 2.0 * (1j ** (l * eps_prime)) * beta * unit * cmath.cos(math.pi * (z + eps) / 2)


def shintani_orbital_quadrature(l: int, z: complex, eps: int, eps_prime: int, lower: bool = False) -> complex:
    l = _check_weight(l, 4)
    z = complex(z)
    s = -1 if lower else 1
    # x = sign e^u on each half line; the integrand decays like e^(Re z u)
    # at -inf and e^((Re z - l/2) u) at +inf.
    lo = -60.0 / max(z.real, 1e-3)
    hi = 60.0 / max(l / 2 - z.real, 1e-3)
    re, im = [], []
    for sign in (1, -1):
        def f(u):
            x = sign * math.exp(u)
            return shintani_unipotent(l, 0, s * x) * cmath.exp(z * u) * sign ** eps

        for a, c in ((lo, 0.0), (0.0, hi)):
            re.append(integrate.quad(lambda u: f(u).real, a, c, limit=400, epsabs=1e-13)[0])
            im.append(integrate.quad(lambda u: f(u).imag, a, c, limit=400, epsabs=1e-13)[0])
    return (1j ** (l * eps_prime)) * complex(math.fsum(re), math.fsum(im))
