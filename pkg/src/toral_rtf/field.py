"""Arithmetic of the rational field: places, quadratic characters, ideals.

Everything that only depends on Q and on the quadratic character lives here:
Kronecker symbols, local components of the idele class character, Gauss
sums, L(1, eta), and the lattice of candidates b for the hyperbolic sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.special import digamma
from sympy import factorint, isprime
from sympy.functions.combinatorial.numbers import kronecker_symbol

# Q has discriminant 1 and every local different is trivial.
D_F = 1
D_V = 0
DEGREE = 1


def ordp(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of 0")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def prime_support(x) -> set[int]:
    x = Fraction(x)
    out = set(factorint(abs(x.numerator)))
    out.update(factorint(x.denominator))
    out.discard(1)
    return out


@dataclass(frozen=True)
class Place:
    kind: str  # "archimedean" or "finite"
    prime: int | None = None

    def __post_init__(self):
        if self.kind == "finite":
            if self.prime is None or not isprime(self.prime):
                raise ValueError(f"finite place needs a prime, got {self.prime}")
        elif self.kind == "archimedean":
            if self.prime is not None:
                raise ValueError("archimedean place carries no prime")
        else:
            raise ValueError(f"unknown place kind {self.kind!r}")

    @property
    def q(self) -> int:
        if self.prime is None:
            raise ValueError("residue size of the archimedean place")
        return self.prime

    @classmethod
    def infinite(cls) -> "Place":
        return cls("archimedean")

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls("finite", p)


@dataclass(frozen=True)
class IdealQ:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"ideal generator must be a positive integer, got {self.n}")

    @cached_property
    def factorization(self) -> dict[int, int]:
        return {int(p): int(e) for p, e in factorint(self.n).items()}

    def ord(self, p: int) -> int:
        return self.factorization.get(p, 0)

    @property
    def primes(self) -> list[int]:
        return sorted(self.factorization)

    @property
    def norm(self) -> int:
        return self.n


def _as_ideal(n) -> IdealQ:
    return n if isinstance(n, IdealQ) else IdealQ(int(n))


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1:
        return True
    if D in (0,):
        return False

    def squarefree(m):
        return all(e == 1 for e in factorint(abs(m)).values())

    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


@dataclass(frozen=True)
class LocalCharacter:
    """Component of a quadratic idele class character at one prime.

    ``uniformizer_value`` is the value at p itself.  For unramified
    components it coincides with ``unramified_value``; for ramified ones the
    latter is 0, matching the Kronecker symbol convention.
    """

    q: int
    unramified_value: int
    uniformizer_value: int
    f: int = 0
    unit_values: tuple = ()  # value at u for u = 0..q^f-1 (0 on non-units)

    @property
    def ramified(self) -> bool:
        return self.f > 0

    def unit(self, u) -> int:
        u = Fraction(u)
        if ordp(u, self.q) != 0:
            raise ValueError("not a unit")
        if not self.ramified:
            return 1
        mod = self.q ** self.f
        r = (u.numerator * pow(u.denominator, -1, mod)) % mod
        return self.unit_values[r]

    def __call__(self, x) -> int:
        x = Fraction(x)
        k = ordp(x, self.q)
        u = x / Fraction(self.q) ** k
        return self.uniformizer_value ** (k % 2) * self.unit(u)

    @classmethod
    def unramified(cls, q: int, value: int) -> "LocalCharacter":
        if value not in (1, -1):
            raise ValueError("unramified quadratic character takes values +-1 at the uniformizer")
        return cls(q, value, value)


class QuadraticCharacter:
    """Quadratic character of the ideles of Q given by a fundamental discriminant."""

    def __init__(self, D: int):
        D = int(D)
        if not is_fundamental_discriminant(D):
            raise ValueError(f"{D} is not 1 or a fundamental discriminant")
        self.D = D

    def __repr__(self):
        return f"QuadraticCharacter({self.D})"

    def __eq__(self, other):
        return isinstance(other, QuadraticCharacter) and other.D == self.D

    def __hash__(self):
        return hash(("eta", self.D))

    @property
    def trivial(self) -> bool:
        return self.D == 1

    @property
    def conductor(self) -> int:
        return abs(self.D)

    @property
    def sign(self) -> int:
        """0 for even characters, 1 for odd ones."""
        return 0 if self.D > 0 else 1

    @cached_property
    def ramified_primes(self) -> list[int]:
        return sorted(int(p) for p in factorint(self.conductor)) if self.D != 1 else []

    @cached_property
    def _components(self) -> dict[int, tuple[int, int]]:
        # p -> (conductor exponent, discriminant of the p-primary factor)
        out = {}
        rest = self.D
        for p in self.ramified_primes:
            if p == 2:
                continue
            pstar = p if p % 4 == 1 else -p
            out[p] = (1, pstar)
            rest //= pstar
        if 2 in self.ramified_primes:
            out[2] = (2 if rest == -4 else 3, rest)
        return out

    def conductor_exponent(self, p: int) -> int:
        return self._components.get(p, (0, 1))[0]

    def component(self, p: int, a: int) -> int:
        """The p-primary factor of the Dirichlet character, evaluated at a."""
        if p not in self._components:
            return 1
        return int(kronecker_symbol(self._components[p][1], a))

    def __call__(self, a: int) -> int:
        return int(kronecker_symbol(self.D, a))

    def local(self, p: int) -> LocalCharacter:
        if p not in self._components:
            v = int(kronecker_symbol(self.D, p))
            return LocalCharacter.unramified(p, v)
        f = self._components[p][0]
        mod = p ** f
        units = tuple(self.component(p, u) if u % p else 0 for u in range(mod))
        at_p = 1
        for r in self.ramified_primes:
            if r != p:
                at_p *= self.component(r, p)
        return LocalCharacter(p, 0, at_p, f, units)


def eta_local(eta: QuadraticCharacter, p: int) -> int:
    return int(kronecker_symbol(eta.D, p))


def eta_tilde(eta: QuadraticCharacter, n) -> int:
    n = _as_ideal(n)
    if math.gcd(n.n, eta.conductor) != 1:
        raise ValueError("eta_tilde needs n coprime to the conductor")
    out = 1
    for p, e in n.factorization.items():
        out *= eta_local(eta, p) ** e
    return out


def local_gauss_sum(eta: QuadraticCharacter, p: int) -> complex:
    """Integral of eta(u p^-f) psi(u p^-f) over the units of Z_p, total mass 1.

    The additive character at p is x -> exp(-2 pi i {x}_p), the one that
    makes the global character exp(2 pi i x) on R trivial on Q.
    """
    chi = eta.local(p)
    mod = p ** chi.f
    re, im = [], []
    for u in range(1, mod):
        if u % p == 0:
            continue
        c = chi.unit_values[u]
        ang = -2.0 * math.pi * u / mod
        re.append(c * math.cos(ang))
        im.append(c * math.sin(ang))
    s = complex(math.fsum(re), math.fsum(im))
    phase = chi.uniformizer_value ** (chi.f % 2)
    return phase * s / (mod * (1.0 - 1.0 / p))


def gauss_sum(eta: QuadraticCharacter) -> complex:
    out = complex(1.0)
    for p in eta.ramified_primes:
        out *= local_gauss_sum(eta, p)
    return out


def gauss_sum_modulus(eta: QuadraticCharacter) -> float:
    out = eta.conductor ** -0.5
    for p in eta.ramified_primes:
        out /= 1.0 - 1.0 / p
    return out


def dirichlet_L1(eta: QuadraticCharacter, method: str = "closed") -> float:
    """L_fin(1, eta) for a nontrivial quadratic character.

    ``closed`` uses the finite class-number-type expressions, ``digamma`` the
    Hurwitz decomposition -1/f sum chi(a) psi(a/f).
    """
    if eta.trivial:
        raise ValueError("L(s, 1) has a pole at s=1; use laurent_zeta_constants")
    f = eta.conductor
    if method == "digamma":
        terms = [eta(a) * float(digamma(a / f)) for a in range(1, f) if eta(a)]
        return -math.fsum(terms) / f
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    if eta.D < 0:
        return -math.pi * math.fsum(eta(a) * a for a in range(1, f)) / f ** 1.5
    return -math.fsum(eta(a) * math.log(math.sin(math.pi * a / f)) for a in range(1, f)) / math.sqrt(f)


def laurent_zeta_constants() -> tuple[float, float]:
    """(R, C0) with pi^(-s/2) Gamma(s/2) zeta(s) = R/(s-1) + C0 + O(s-1)."""
    # zeta(s) = 1/(s-1) + gamma + ..., and the gamma factor is 1 at s=1 with
    # logarithmic derivative (digamma(1/2) - log pi)/2.
    R = 1.0
    C0 = float(np.euler_gamma) + 0.5 * (float(digamma(0.5)) - math.log(math.pi))
    return R, C0


def index_K0(n) -> int:
    n = _as_ideal(n)
    out = Fraction(n.n)
    for p in n.factorization:
        out *= Fraction(p + 1, p)
    assert out.denominator == 1
    return int(out)


def nu_factor(n) -> Fraction:
    n = _as_ideal(n)
    out = Fraction(1)
    for p, e in n.factorization.items():
        if e >= 3:
            out *= 1 - Fraction(1, p * p)
        elif e == 2:
            out *= 1 - Fraction(1, p * p - p)
    return out


@dataclass(frozen=True)
class BCandidate:
    b: Fraction
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "b", Fraction(self.b))
        if self.b in (0, -1):
            raise ValueError("b must avoid 0 and -1")

    def ord(self, p: int) -> int:
        return ordp(self.b, p)

    def ord1(self, p: int) -> int:
        return ordp(self.b + 1, p)

    @property
    def primes(self) -> list[int]:
        """Primes where b or b+1 is not a unit."""
        if "primes" not in self._cache:
            s = prime_support(self.b) | prime_support(self.b + 1)
            self._cache["primes"] = sorted(s)
        return self._cache["primes"]


def _normalize_S(S) -> dict[int, int]:
    out = {}
    for item in S or ():
        p, m = item
        p = p.prime if isinstance(p, Place) else int(p)
        if not isprime(p) or int(m) < 0:
            raise ValueError(f"bad S entry {item!r}")
        if p in out:
            raise ValueError(f"place {p} listed twice in S")
        out[p] = int(m)
    return out


def lattice_denominator(eta: QuadraticCharacter, S) -> int:
    M = 1
    for p in eta.ramified_primes:
        M *= p ** eta.conductor_exponent(p)
    for p, m in _normalize_S(S).items():
        M *= p ** m
    return M


def check_configuration(n, eta: QuadraticCharacter, S) -> None:
    n = _as_ideal(n)
    if math.gcd(n.n, eta.conductor) != 1:
        raise ValueError("level and conductor must be coprime")
    bad = set(_normalize_S(S)) & (set(n.primes) | set(eta.ramified_primes))
    if bad:
        raise ValueError(f"S meets the level or the conductor at {sorted(bad)}")


def enumerate_b(n, eta: QuadraticCharacter, S, B) -> list[BCandidate]:
    """All b in the hyperbolic support with |b| <= B.

    The local supports say ord_p(b) >= ord_p(n) at p | n, ord_p(b) >= -f_p at
    p | f, ord_p(b) >= -m_p on S and b integral elsewhere; together that is
    the lattice (n/M)Z with M = f * prod p^m_p.
    """
    B = Fraction(B)
    if B <= 0:
        raise ValueError("bound must be positive")
    n = _as_ideal(n)
    check_configuration(n, eta, S)
    h = Fraction(n.n, lattice_denominator(eta, S))
    kmax = math.floor(B / h)
    out = []
    for k in range(1, kmax + 1):
        for b in (-k * h, k * h):
            if b != -1:
                out.append(BCandidate(b))
    return out
