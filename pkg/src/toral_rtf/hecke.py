"""Test functions in the basis q^(ms/2) + q^(-ms/2) of the spherical Hecke algebra.

A test function on a finite set of primes is a finite linear combination of
tensor products of basis functions alpha^(m).  In the Satake variable
z = q^(s/2) the basis function is z^m + z^-m, a polynomial in x = z + 1/z.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number

from sympy import isprime


def _clean(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if v != 0}


@dataclass(frozen=True)
class TestFunction:
    """sum_k terms[k] * prod_i alpha^(k[i]) at primes[i]."""

    __test__ = False  # keep pytest from collecting this class

    primes: tuple[int, ...] = ()
    terms: dict = field(default_factory=lambda: {(): Fraction(1)})

    def __post_init__(self):
        primes = tuple(int(p) for p in self.primes)
        if len(set(primes)) != len(primes) or any(not isprime(p) for p in primes):
            raise ValueError(f"bad prime list {self.primes!r}")
        if list(primes) != sorted(primes):
            raise ValueError("primes must be sorted")
        for key, c in self.terms.items():
            if len(key) != len(primes) or any(int(m) != m or m < 0 for m in key):
                raise ValueError(f"bad multi-degree {key!r}")
            if not isinstance(c, Number):
                raise TypeError("coefficients must be numbers")
        object.__setattr__(self, "primes", primes)
        object.__setattr__(self, "terms", _clean(dict(self.terms)))

    @classmethod
    def basis(cls, degrees) -> "TestFunction":
        """The pure tensor prod alpha^(m_p); ``degrees`` maps prime -> m."""
        items = sorted(dict(degrees).items())
        return cls(tuple(p for p, _ in items), {tuple(m for _, m in items): Fraction(1)})

    @classmethod
    def unit(cls) -> "TestFunction":
        return cls((), {(): Fraction(1)})

    @classmethod
    def single(cls, p: int, coeffs) -> "TestFunction":
        """sum_m coeffs[m] alpha^(m) at one prime."""
        return cls((p,), {(m,): c for m, c in enumerate(coeffs)})

    def degrees(self) -> dict[int, int]:
        """Largest m occurring at each prime."""
        out = {p: 0 for p in self.primes}
        for key in self.terms:
            for p, m in zip(self.primes, key):
                out[p] = max(out[p], m)
        return out

    def extend(self, primes) -> "TestFunction":
        """Same function viewed on a larger prime set (constant 1/2 * alpha^(0) = 1 there)."""
        primes = tuple(sorted(set(primes) | set(self.primes)))
        idx = [primes.index(p) for p in self.primes]
        new_places = len(primes) - len(self.primes)
        scale = Fraction(1, 2 ** new_places)
        terms = {}
        for key, c in self.terms.items():
            full = [0] * len(primes)
            for i, m in zip(idx, key):
                full[i] = m
            terms[tuple(full)] = terms.get(tuple(full), 0) + c * scale
        return TestFunction(primes, terms)

    def __add__(self, other: "TestFunction") -> "TestFunction":
        a, b = self.extend(other.primes), other.extend(self.primes)
        terms = dict(a.terms)
        for k, c in b.terms.items():
            terms[k] = terms.get(k, 0) + c
        return TestFunction(a.primes, terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TestFunction":
        return TestFunction(self.primes, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.scale(other)
        a, b = self.extend(other.primes), other.extend(self.primes)
        terms = {}
        for k1, c1 in a.terms.items():
            for k2, c2 in b.terms.items():
                # (z^a + z^-a)(z^b + z^-b) = alpha^(a+b) + alpha^(|a-b|),
                # which is 2 alpha^(a+b) when a or b is 0
                keys = [()]
                c = c1 * c2
                for m1, m2 in zip(k1, k2):
                    if m1 == 0 or m2 == 0:
                        keys = [k + (m1 + m2,) for k in keys]
                        c *= 2
                    else:
                        keys = [k + (m1 + m2,) for k in keys] + [k + (abs(m1 - m2),) for k in keys]
                for k in keys:
                    terms[k] = terms.get(k, 0) + c
        return TestFunction(a.primes, terms)

    __rmul__ = __mul__

    def __call__(self, x: dict):
        """Evaluate at Satake traces x[p] = z_p + 1/z_p."""
        total = 0
        for key, c in self.terms.items():
            term = c
            for p, m in zip(self.primes, key):
                term = term * chebyshev_alpha(m, x[p])
            total = total + term
        return total


def chebyshev_alpha(m: int, x):
    """z^m + z^-m as a polynomial in x = z + 1/z (exact for Fractions)."""
    if m < 0:
        raise ValueError("degree must be non-negative")
    t0, t1 = 2, x
    if m == 0:
        return t0
    for _ in range(m - 1):
        t0, t1 = t1, x * t1 - t0
    return t1
