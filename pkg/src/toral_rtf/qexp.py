"""Exact q-expansions of level one eigenforms and Dirichlet coefficient sieves."""
from __future__ import annotations

import math


def _mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def delta_coefficients(n: int) -> list[int]:
    """tau(0..n-1) from Delta = q prod (1 - q^k)^24 = q (eta^3 / q^(1/8))^8.

    Jacobi: prod (1 - q^k)^3 = sum_k (-1)^k (2k+1) q^(k(k+1)/2).
    """
    if n < 1:
        return []
    cube = [0] * n
    k = 0
    while k * (k + 1) // 2 < n:
        cube[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    sq = _mul(cube, cube, n)
    p4 = _mul(sq, sq, n)
    p8 = _mul(p4, p4, n)
    return [0] + p8[: n - 1]


def _sigma_table(n: int, k: int) -> list[int]:
    out = [0] * n
    for d in range(1, n):
        dk = d ** k
        for m in range(d, n, d):
            out[m] += dk
    return out


_BERNOULLI_FACTOR = {4: 240, 6: -504, 8: 480, 10: -264, 14: -24}


def eisenstein_coefficients(k: int, n: int) -> list[int]:
    """Normalized E_k = 1 - (2k/B_k) sum sigma_{k-1}(m) q^m, k in {4,6,8,10,14}."""
    if k not in _BERNOULLI_FACTOR:
        raise ValueError(f"no integral normalization stored for weight {k}")
    sig = _sigma_table(n, k - 1)
    return [1] + [_BERNOULLI_FACTOR[k] * s for s in sig[1:n]]


LEVEL_ONE_WEIGHTS = (12, 16, 18, 20, 22, 26)


def level_one_eigenform(k: int, n: int) -> list[int]:
    """Coefficients a(0..n-1) of the unique normalized cusp form of weight k, level 1.

    Only weights where the cusp space is one-dimensional are supported; there
    the form is Delta * E_{k-12}.
    """
    if k not in LEVEL_ONE_WEIGHTS:
        raise ValueError(f"S_{k}(SL2(Z)) is not one-dimensional")
    d = delta_coefficients(n)
    if k == 12:
        return d
    return _mul(d, eisenstein_coefficients(k - 12, n), n)


def smallest_prime_factors(n: int) -> list[int]:
    spf = list(range(n))
    for p in range(2, math.isqrt(max(n - 1, 0)) + 1):
        if spf[p] == p:
            for m in range(p * p, n, p):
                if spf[m] == m:
                    spf[m] = p
    return spf


def multiplicative_from_prime_powers(n: int, local) -> list[float]:
    """c(0..n-1) for the multiplicative function with c(p^e) = local(p, e)."""
    spf = smallest_prime_factors(n)
    out = [0.0] * n
    if n > 1:
        out[1] = 1.0
    for m in range(2, n):
        p = spf[m]
        e, r = 0, m
        while r % p == 0:
            r //= p
            e += 1
        out[m] = out[r] * local(p, e)
    return out


def normalized_hecke(coeffs: list[int], k: int) -> list[float]:
    """lambda(n) = a(n) / n^((k-1)/2), index 0 unused."""
    return [0.0] + [a / m ** ((k - 1) / 2) for m, a in enumerate(coeffs[1:], start=1)]


def symmetric_square_coefficients(coeffs: list[int], k: int, n: int, level: int = 1) -> list[float]:
    """Dirichlet coefficients of L(s, sym^2) in the unitary normalization.

    At p not dividing the level the Euler factor is
    1/((1 - a^2 X)(1 - X)(1 - a^-2 X)) with a + 1/a = lambda(p), so the
    prime-power coefficients satisfy b_e = (lambda^2 - 1)(b_{e-1} - b_{e-2}) + b_{e-3}.
    At a prime exactly dividing the level the factor is 1/(1 - X/p).
    """
    if len(coeffs) < n:
        raise ValueError("not enough Hecke coefficients")
    for p in range(2, math.isqrt(level) + 1):
        if level % (p * p) == 0:
            raise NotImplementedError("only squarefree levels are handled")
    lam = normalized_hecke(coeffs[:n], k)
    cache: dict[int, list[float]] = {}

    def local(p, e):
        if level % p == 0:
            return float(p) ** -e
        if p not in cache:
            e1 = lam[p] ** 2 - 1
            b = [1.0, e1, e1 * e1 - e1]
            cache[p] = b
        b = cache[p]
        e1 = lam[p] ** 2 - 1
        while len(b) <= e:
            b.append(e1 * (b[-1] - b[-2]) + b[-3])
        return b[e]

    return multiplicative_from_prime_powers(n, local)


def eta_product(exponents: dict, n: int) -> list[int]:
    """Coefficients of q^0..q^(n-1) of prod_d eta(d z)^e_d, for sum d e_d divisible by 24."""
    shift = sum(d * e for d, e in exponents.items())
    if shift % 24:
        raise ValueError("the eta quotient is not a power series in q")
    series = [1] + [0] * (n - 1)
    for d, e in exponents.items():
        if e < 0:
            raise ValueError("only eta products are supported")
        factor = [1] + [0] * (n - 1)
        # prod (1 - q^(dk)), then raised to the power e
        for k in range(1, (n - 1) // d + 1):
            step = d * k
            for i in range(n - 1, step - 1, -1):
                factor[i] -= factor[i - step]
        for _ in range(e):
            series = _mul(series, factor, n)
    lead = shift // 24
    return [0] * lead + series[: n - lead]


def hecke_operator(coeffs: list[int], p: int, k: int, level: int = 1) -> list[int]:
    """T_p (or U_p when p divides the level) on a q-expansion; returns n // p terms."""
    m = (len(coeffs) - 1) // p + 1
    out = []
    for i in range(m):
        v = coeffs[i * p]
        if level % p and i % p == 0:
            v += p ** (k - 1) * coeffs[i // p]
        out.append(v)
    return out
