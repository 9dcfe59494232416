import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from toral_rtf import arch

B_GRID = [Fraction(s * k, 8) for k in range(1, 33) for s in (1, -1) if Fraction(s * k, 8) not in (0, -1)]


def test_shintani_identity():
    for l in (4, 6, 12):
        assert arch.shintani_cartan(l, 0, 0.0) == pytest.approx(1, abs=1e-15)
        assert arch.shintani_cartan(l, 0.3 + 0.2j, 0.0) == pytest.approx(1, abs=1e-14)


def test_shintani_bound():
    rng = random.Random(1)
    for _ in range(300):
        l = rng.choice((4, 6, 8, 12))
        z = complex(rng.uniform(-2, 2), rng.uniform(-5, 5))
        r = rng.uniform(-3, 3)
        t1, t2 = rng.uniform(0.1, 5), rng.uniform(0.1, 5)
        v = arch.shintani(l, z, t1, t2, r, rng.uniform(0, 2 * math.pi))
        assert abs(v) <= arch.shintani_bound(l, z, t1, t2, r) * (1 + 1e-12)


def test_shintani_bound_sharp_for_real_z():
    for l in (4, 6, 8, 12):
        for r in (-2.0, -0.3, 0.0, 0.7, 2.5):
            for z in (0.0, 0.8, -1.5):
                v = arch.shintani(l, z, 2.0, 0.5, r, 0.3)
                assert abs(v) == pytest.approx(arch.shintani_bound(l, z, 2.0, 0.5, r), rel=1e-12)
    assert arch.shintani_bound(6, 0, 1, 1, 0) == 1


def test_shintani_cartan_second_path():
    # direct evaluation with explicit arguments instead of the shared power helper
    l, r = 4, 1.0
    y = ((math.exp(2 * r) - 1j) / (math.exp(2 * r) + 1j)) ** 2
    direct = 2 ** (-l / 2) * cmath.exp((-l / 4) * cmath.log(-y)) * (1 - y) ** (l / 2)
    assert arch.shintani_cartan(l, 0, r) == pytest.approx(direct, abs=1e-14)


def test_shintani_unipotent():
    assert arch.shintani_unipotent(6, 0, 0.0) == 1
    expect = 2 ** -1.5 * cmath.exp(-3j * math.pi / 4)
    assert arch.shintani_unipotent(6, 0, 1.0) == pytest.approx(expect, abs=1e-15)
    for x in (0.3, 1.7, 5.0):
        a = arch.shintani_unipotent(8, 0.4, x)
        b = arch.shintani_unipotent(8, 0.4, -x)
        assert a == pytest.approx(b.conjugate(), abs=1e-15)


def test_c_l_zero():
    assert arch.c_l_zero(6) == pytest.approx(3 * math.pi / 256, rel=1e-14)
    for l in (4, 6, 8, 10, 12):
        assert abs(arch.c_l_zero(l, 1) - arch.c_l_zero(l, 2)) <= 1e-12
        assert abs(arch.c_l(0, l).real - arch.c_l_zero(l)) <= 1e-9


def test_c_l_even_and_bounded():
    rng = random.Random(3)
    for _ in range(20):
        l = rng.choice((4, 6, 8))
        z = complex(rng.uniform(-1, 1), rng.uniform(-2, 2))
        a = arch.c_l(z, l)
        assert abs(a - arch.c_l(-z, l)) <= 1e-10
        assert abs(a) <= arch.c_l_zero(l) * math.exp(math.pi * abs(z.imag)) * (1 + 1e-9)


@pytest.mark.parametrize("l", [4, 6, 8])
def test_inner_product_matches_c_l(l):
    for z in (0.0, 0.25, 0.6):
        ip = arch.shintani_inner_product(l, z)
        assert ip == pytest.approx(2 ** (l - 1) * arch.c_l(z, l).real, rel=1e-6)


def test_legendre():
    assert arch.legendre_P(2, 0) == -0.5
    assert arch.legendre_Q(1, 2) == pytest.approx(math.log(3) - 1, rel=1e-14)
    assert arch.gauss_2F1(1.5, 2.5, 3.0, 0.0) == 1.0
    # Q_1 from its integral representation Q_n(x) = 1/2 int_{-1}^{1} P_n(t) / (x - t) dt
    for n in range(5):
        for x in (1.2, 2.0, 7.0):
            val = integrate.quad(lambda t: arch.legendre_P(n, t) / (x - t), -1, 1, epsabs=1e-14)[0] / 2
            assert arch.legendre_Q(n, x) == pytest.approx(val, rel=1e-11)
    with pytest.raises(ValueError):
        arch.legendre_Q(2, 0.5)


def test_j_arch_examples():
    assert arch.j_arch_even(4, Fraction(1, 2)) == pytest.approx(4 * (math.log(3) - 1), rel=1e-13)
    assert arch.j_arch_odd(6, Fraction(-1, 2)) == pytest.approx(-math.pi * 1j, abs=1e-14)
    assert arch.j_arch_odd(4, Fraction(-1, 4)) == pytest.approx(math.pi * 1j, abs=1e-14)
    for l in (4, 8, 12):
        assert arch.j_arch_odd(l, 3) == 0
    assert abs(arch.j_arch_oracle(8, 1, 2)) <= 1e-8
    with pytest.raises(ValueError):
        arch.j_arch_even(6, -1)


@pytest.mark.parametrize("l", [4, 6, 8, 12])
def test_j_arch_against_quadrature(l):
    for b in B_GRID:
        assert abs(arch.j_arch_even(l, b) - arch.j_arch_oracle(l, 0, b)) <= 1e-8
        assert abs(arch.j_arch_odd(l, b) - arch.j_arch_oracle(l, 1, b)) <= 1e-8


def test_j_plus_two_forms():
    # 2 Q_{l/2-1}(2b+1) against the hypergeometric form and the half-line quadrature
    for l in (4, 6, 10):
        for b in (Fraction(1, 3), Fraction(2), Fraction(9)):
            q = 2 * arch.legendre_Q(l // 2 - 1, float(2 * b + 1))
            assert arch.j_plus_hypergeometric(l, b) == pytest.approx(q, rel=1e-11)
            jp, jm = arch.j_arch_oracle(l, 0, b, halves=True)
            assert jp == pytest.approx(jm.conjugate(), abs=1e-9)
            assert jp.real == pytest.approx(q, abs=1e-8)


def test_j_arch_monotone_and_reflection():
    for l in (6, 12):
        vals = [arch.j_arch_even(l, Fraction(k, 4)) for k in range(1, 40)]
        assert all(a > c > 0 for a, c in zip(vals, vals[1:]))
        for b in (Fraction(1, 3), Fraction(5), Fraction(7, 2)):
            assert arch.j_arch_even(l, b) == pytest.approx((-1) ** (l // 2) * arch.j_arch_even(l, -b - 1), rel=1e-12)


def test_arch_tail_bound():
    l = 6
    prev = math.inf
    for B in (2, 4, 8, 16, 32):
        t = arch.arch_tail_bound(l, B)
        assert t < prev
        prev = t
        assert arch.arch_tail_bound(8, B) < t
    B = 5
    actual = math.fsum(abs(arch.j_arch_even(l, b)) for k in range(B + 1, 10 * B + 1) for b in (k, -k))
    assert actual <= arch.arch_tail_bound(l, B)


def test_shintani_orbital():
    assert abs(arch.shintani_orbital(6, 1, 0, 0)) < 1e-15
    for l, z, e, ep in ((6, 0.7 + 0.3j, 0, 0), (8, 1.5, 1, 0), (6, 1.2, 1, 1), (10, 2.2 - 0.5j, 0, 1)):
        for lower in (False, True):
            a = arch.shintani_orbital(l, z, e, ep, lower)
            b = arch.shintani_orbital_quadrature(l, z, e, ep, lower)
            assert a == pytest.approx(b, abs=1e-8)
        up = arch.shintani_orbital(l, z, e, ep)
        assert arch.shintani_orbital(l, z, e, 1 - ep) == pytest.approx(up * 1j ** (l * (1 - 2 * ep)) if ep == 0
                                                                        else up / 1j ** l, abs=1e-14)
    with pytest.raises(ValueError):
        arch.shintani_orbital(6, 3.5, 0, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6).map(lambda k: 2 * k), st.fractions(min_value=Fraction(1, 50), max_value=30))
def test_j_arch_even_positive(l, b):
    assert arch.j_arch_even(l, b) > 0
