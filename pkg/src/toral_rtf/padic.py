"""Non-archimedean local objects at a prime p of Q.

Values of the spherical kernels live in Z[q^(1/2), q^(-1/2)], so they are
kept exact as a + b*sqrt(q) with rational a, b.  Each closed form has a
brute-force counterpart that integrates over the shells |t| = q^-j
directly, locating the double coset of the group element from its matrix
entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .field import LocalCharacter, ordp

VOL_UNITS = Fraction(1)  # vol(O_p^x, d^x t) for Q


@dataclass(frozen=True)
class LocalValue:
    """a + b*sqrt(q)."""

    q: int
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def qpow(cls, q: int, half: int) -> "LocalValue":
        """q^(half/2)."""
        j, r = divmod(half, 2)
        c = Fraction(q) ** j
        return cls(q, 0, c) if r else cls(q, c, 0)

    def _coerce(self, other) -> "LocalValue":
        if isinstance(other, LocalValue):
            if other.q != self.q:
                raise ValueError("LocalValues at different places do not mix")
            return other
        if isinstance(other, (int, Fraction)):
            return LocalValue(self.q, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return LocalValue(self.q, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return LocalValue(self.q, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return LocalValue(self.q, self.a * o.a + self.q * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._coerce(other) if isinstance(other, (int, Fraction, LocalValue)) else NotImplemented
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.q, self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.q)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __repr__(self):
        return f"LocalValue(q={self.q}, {self.a} + {self.b}*sqrt(q))"


@dataclass(frozen=True)
class LocalBSpec:
    """Valuations of b and b+1 at one prime (plus b itself when known)."""

    ord_b: int
    ord_b1: int
    value: Fraction | None = None

    def __post_init__(self):
        lo = min(self.ord_b, self.ord_b1)
        if lo < 0 and self.ord_b != self.ord_b1:
            raise ValueError("ultrametric: ord(b) = ord(b+1) when either is negative")
        if self.ord_b > 0 and self.ord_b1 != 0 or self.ord_b1 > 0 and self.ord_b != 0:
            raise ValueError("ultrametric: b and b+1 cannot both lie in the maximal ideal")

    @classmethod
    def of(cls, b, p: int) -> "LocalBSpec":
        if isinstance(b, LocalBSpec):
            return b
        b = Fraction(b)
        if b in (0, -1):
            raise ValueError("b must avoid 0 and -1")
        return cls(ordp(b, p), ordp(b + 1, p), b)


def _unramified_sign(chi) -> int:
    if isinstance(chi, LocalCharacter):
        if chi.ramified:
            raise ValueError("expected an unramified character")
        return chi.unramified_value
    if chi not in (1, -1):
        raise ValueError("unramified sign must be +1 or -1")
    return int(chi)


# -- Green function and inverse spherical transform ------------------------

def green_unipotent(q: int, z: complex, s: complex, ell: int) -> complex:
    z, s = complex(z), complex(s)
    if not s.real > abs(2 * z.real - 1):
        raise ValueError("need Re s > |2 Re z - 1|")
    if ell < 0:
        raise ValueError("ell is a non-negative integer")
    a = q ** (-(s - 2 * z + 1) / 2)
    c = q ** (-(s + 2 * z + 1) / 2)
    return -q ** (-(s + 1) / 2) / ((1 - a) * (1 - c)) * a ** ell


def phi_hat(q: int, m: int, ell: int) -> LocalValue:
    """Value of the Hecke kernel attached to alpha^(m) at n(x), sup(1,|x|) = q^ell."""
    if m < 0 or ell < 0:
        raise ValueError("m and ell are non-negative")
    if m == 0:
        return LocalValue(q, -2 if ell == 0 else 0)
    if ell >= m + 1:
        return LocalValue(q)
    if ell == m:
        return -LocalValue.qpow(q, -m)
    return (m - ell - 1) * LocalValue.qpow(q, 2 - m) - (m - ell + 1) * LocalValue.qpow(q, -m)


def phi_hat_contour(q: int, m: int, ell: int, npts: int = 256) -> float:
    """Trapezoidal rule for the defining contour integral on |w| = 1.

    With w = q^(s/2) the integrand is
    q^((1-ell)/2) w^-ell / ((1 - q^-1/2 w^-1)(1 - q^1/2 w)) (w^m + w^-m)(w - 1/w) dw/w
    and all its poles lie inside the unit circle.
    """
    w = np.exp(2j * np.pi * (np.arange(npts) + 0.5) / npts)
    sq = math.sqrt(q)
    f = (q ** ((1 - ell) / 2) * w ** (-ell) / ((1 - 1 / (sq * w)) * (1 - sq * w))
         * (w ** m + w ** (-m)) * (w - 1 / w))
    return float(np.mean(f).real)


# -- spherical orbital integrals --------------------------------------------

def _delta(e: int, n: int, k: int) -> Fraction:
    if k < -n:
        return Fraction(0)
    if n > 0:
        # a single shell, ord t = n + ord b
        return Fraction(e ** ((n + k) % 2))
    if e == 1:
        return Fraction(k + 1)
    return Fraction(1 + (-1) ** k, 2)


def delta_n_eta(q: int, chi, n: int, b) -> LocalValue:
    """Integral of eta(t) over the t with |t| <= 1 and sup(1, |b|/|t|) = q^n."""
    e = _unramified_sign(chi)
    spec = b if isinstance(b, LocalBSpec) else LocalBSpec.of(b, q)
    return LocalValue(q, _delta(e, n, spec.ord_b))


def _i_plus(q: int, e: int, m: int, ord_b: int) -> LocalValue:
    acc = -LocalValue.qpow(q, -m) * _delta(e, m, ord_b)
    for ell in range(max(0, -ord_b), m):
        coef = (m - ell - 1) * LocalValue.qpow(q, 2 - m) - (m - ell + 1) * LocalValue.qpow(q, -m)
        acc = acc + coef * _delta(e, ell, ord_b)
    return VOL_UNITS * (2 if m == 0 else 1) * acc


def j_local_spherical(q: int, chi, m: int, b) -> LocalValue:
    e = _unramified_sign(chi)
    spec = LocalBSpec.of(b, q)
    return _i_plus(q, e, m, spec.ord_b) + e * _i_plus(q, e, m, spec.ord_b1 - 1)


def lambda_exact(q: int, chi, b) -> LocalValue:
    e = _unramified_sign(chi)
    spec = LocalBSpec.of(b, q)
    if spec.ord_b < 0:
        return LocalValue(q)
    if spec.ord_b > 0:
        return LocalValue(q, _delta(e, 0, spec.ord_b))
    if spec.ord_b1 > 0:
        return LocalValue(q, _delta(e, 0, spec.ord_b1))
    return LocalValue(q, 1)


def lambda_majorant(q: int, b) -> int:
    spec = LocalBSpec.of(b, q)
    if spec.ord_b < 0:
        return 0
    return spec.ord_b + spec.ord_b1 + 1


def j_local_unramified(q: int, chi, b) -> LocalValue:
    return VOL_UNITS * lambda_exact(q, chi, b)


def j_local_level(q: int, chi, k: int, b) -> LocalValue:
    """Orbital integral at a prime dividing the level exactly k >= 1 times."""
    e = _unramified_sign(chi)
    if k < 1:
        raise ValueError("level exponent must be positive")
    spec = LocalBSpec.of(b, q)
    if spec.ord_b < k:
        return LocalValue(q)
    if e == 1:
        return LocalValue(q, spec.ord_b - k + 1)
    return LocalValue(q, Fraction((-1) ** spec.ord_b + (-1) ** k, 2))


def j_local_ramified(chi: LocalCharacter, b, literal: bool = False) -> Fraction:
    """Orbital integral at a prime where eta is ramified with exponent f.

    The second term is carried by the shell |t| = q^-f and survives exactly
    when ord(b) > -f.  ``literal=True`` instead weights it by q^ord(b) for
    non-integral b, the form that disagrees with the shell-sum oracle.
    """
    if not chi.ramified:
        raise ValueError("expected a ramified character")
    if any(v not in (0, 1, -1) for v in chi.unit_values) or chi.uniformizer_value not in (1, -1):
        raise ValueError("character is not quadratic")
    q, f = chi.q, chi.f
    b = Fraction(b)
    if b == -1 or b == 0:
        raise ValueError("b must lie outside {0, -1}")
    kb = ordp(b, q)
    if kb < -f:
        return Fraction(0)
    if literal:
        scale = Fraction(1) if kb >= 0 else Fraction(q) ** kb
    else:
        scale = Fraction(1) if kb > -f else Fraction(0)
    val = chi(-1) + scale * chi(-b * (b + 1))
    return val * Fraction(1, q ** f) / (1 - Fraction(1, q))


# -- unipotent local factors --------------------------------------------------

def u_local(q: int, chi, m: int) -> LocalValue:
    e = _unramified_sign(chi)
    out = LocalValue(q, -2 if m == 0 else 0)
    if m == 0:
        return out
    if e == 1:
        return out + LocalValue.qpow(q, 2 - m) * ((m - 1) - (m + 1) * Fraction(1, q))
    if m % 2 == 0:
        return out + LocalValue.qpow(q, 2 - m) * (1 - Fraction(1, q))
    return out


def u_prime_local(q: int, m: int) -> LocalValue:
    """U' without its factor log q: the true value is float(result) * log(q)."""
    if m == 0:
        return LocalValue(q)
    return Fraction(-1, 2) * LocalValue.qpow(q, 2 - m) * ((m - 1) * (m - 2) - m * (m + 1) * Fraction(1, q))


def u_local_contour(q: int, eta_sign: int, m: int, npts: int = 512) -> float:
    """Numerical contour integral defining the unipotent factor, on |w| = 1."""
    w = np.exp(2j * np.pi * (np.arange(npts) + 0.5) / npts)
    sq = math.sqrt(q)
    f = (sq * (w - 1 / w) * (w ** m + w ** (-m))
         / ((1 - eta_sign / (sq * w)) * (1 - sq * w)))
    return float(np.mean(f).real)


def u_prime_contour(q: int, m: int, npts: int = 512) -> float:
    """Same for U', returned without the factor log q."""
    w = np.exp(2j * np.pi * (np.arange(npts) + 0.5) / npts)
    sq = math.sqrt(q)
    f = (sq * (w - 1 / w) * (w ** m + w ** (-m))
         / ((1 - sq * w) ** 2 * (1 - 1 / (sq * w))))
    return float(np.mean(f).real)


# -- brute-force shell sums ---------------------------------------------------

def _v(x: Fraction, p: int) -> float:
    return math.inf if x == 0 else ordp(x, p)


def _coset_data(g, p: int) -> tuple[int, float]:
    """(ell, v(g21) - v(row2)) for g in H n(x) K with sup(1,|x|) = q^ell."""
    (a, b), (c, d) = g
    v1 = min(_v(a, p), _v(b, p))
    v2 = min(_v(c, p), _v(d, p))
    det = a * d - b * c
    return int(ordp(det, p) - v1 - v2), _v(c, p) - v2


def _g(b: Fraction, t: Fraction, shift: Fraction = Fraction(0)):
    # delta_b diag(t, 1) n(shift)
    c = (b + 1) / b
    return ((c * t, c * t * shift + 1), (t, t * shift + 1))


def j_local_oracle(q: int, chi, m: int | None, b, level: int = 0, shell_bound: int | None = None) -> float:
    """Sum over shells t in p^j O^x of the kernel at delta_b diag(t,1) n(p^-f).

    ``m`` selects the Hecke kernel attached to alpha^(m); ``m=None`` uses the
    characteristic function of H K_0(p^level) instead.  For ramified ``chi``
    each shell is split into unit classes mod p^f.
    """
    b = Fraction(b)
    p = q
    if isinstance(chi, LocalCharacter) and chi.ramified:
        f = chi.f
        classes = [u for u in range(1, p ** f) if u % p]
    else:
        f = 0
        classes = [1]
    e = chi if isinstance(chi, LocalCharacter) else LocalCharacter.unramified(q, int(chi))
    if shell_bound is None:
        shell_bound = abs(ordp(b, p)) + abs(ordp(b + 1, p)) + f + (m or 0) + level + 4
    shift = Fraction(1, p ** f) if f else Fraction(0)
    total = []
    edge = 0.0
    for j in range(-shell_bound, shell_bound + 1):
        shell = []
        for u in classes:
            vals = []
            for rep in (u, u + p ** max(f, 1)):
                t = Fraction(p) ** j * rep
                ell, low = _coset_data(_g(b, t, shift), p)
                if m is None:
                    k = 1.0 if ell == 0 and low >= level else 0.0
                else:
                    k = float(phi_hat(q, m, ell))
                vals.append(k)
            if vals[0] != vals[1]:
                raise ArithmeticError("kernel not constant on the unit class; refine the classes")
            weight = e(t * shift) if f else e(t)
            shell.append(vals[0] * weight)
        s = math.fsum(shell) / len(classes)
        if abs(j) == shell_bound:
            edge += abs(s)
        total.append(s)
    if edge:
        raise ArithmeticError("shell bound too small: boundary shell contributes")
    return math.fsum(total) * float(VOL_UNITS)
