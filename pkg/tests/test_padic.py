import math
from fractions import Fraction

import pytest

from toral_rtf import geometric, padic
from toral_rtf.field import LocalCharacter, QuadraticCharacter
from toral_rtf.padic import LocalBSpec, LocalValue
from toral_rtf.suites import padic_b_sample


def lv(q, a, b=0):
    return LocalValue(q, Fraction(a), Fraction(b))


# -- LocalValue -------------------------------------------------------------------

def test_local_value_ring():
    s = LocalValue.qpow(2, 1)
    assert s * s == 2
    assert LocalValue.qpow(3, -2) == Fraction(1, 3)
    assert float(LocalValue.qpow(5, -3)) == pytest.approx(5 ** -1.5, rel=1e-15)
    assert (s + 1) - s == 1
    with pytest.raises(ValueError):
        LocalValue(2, 1) + LocalValue(3, 1)


def test_local_b_spec_ultrametric():
    assert LocalBSpec.of(Fraction(1, 4), 2) == LocalBSpec(-2, -2, Fraction(1, 4))
    assert LocalBSpec.of(1, 2).ord_b1 == 1
    with pytest.raises(ValueError):
        LocalBSpec(-1, 0)
    with pytest.raises(ValueError):
        LocalBSpec(1, 1)
    with pytest.raises(ValueError):
        LocalBSpec.of(-1, 3)


# -- Green function and kernel ----------------------------------------------------

def test_green_unipotent_at_zero():
    q, s = 3, 1.7
    direct = -q ** (-(s + 1) / 2) / (1 - q ** (-(s + 1) / 2)) ** 2
    assert padic.green_unipotent(q, 0, s, 0) == pytest.approx(direct, rel=1e-14)


def test_green_unipotent_decay():
    q, s, z = 5, 2.3, 0.4 + 0.3j
    vals = [padic.green_unipotent(q, z, s, ell) for ell in range(6)]
    rate = q ** (-(s + 1) / 2 + z.real)
    for a, b in zip(vals, vals[1:]):
        assert abs(b) / abs(a) == pytest.approx(rate, rel=1e-12)
    v0, v1 = padic.green_unipotent(2, 0, 1.5, 0), padic.green_unipotent(2, 0, 1.5, 1)
    assert v1 == pytest.approx(v0 * 2 ** (-2.5 / 2), rel=1e-14)


def test_green_unipotent_strip():
    with pytest.raises(ValueError):
        padic.green_unipotent(2, 1.0, 0.5, 0)


def test_phi_hat_examples():
    assert padic.phi_hat(2, 0, 0) == -2
    assert padic.phi_hat(2, 2, 0) == Fraction(-1, 2)
    assert padic.phi_hat(7, 3, 4).is_zero()
    assert padic.phi_hat(3, 2, 2) == -LocalValue.qpow(3, -2)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_phi_hat_contour(q):
    for m in range(6):
        for ell in range(m + 3):
            assert float(padic.phi_hat(q, m, ell)) == pytest.approx(
                padic.phi_hat_contour(q, m, ell), abs=1e-12)


# -- spherical orbital integrals ---------------------------------------------------

def test_delta_examples():
    assert padic.delta_n_eta(2, 1, 0, LocalBSpec(2, 0)) == 3
    assert padic.delta_n_eta(3, -1, 0, LocalBSpec(1, 0)) == 0
    for e in (1, -1):
        assert padic.delta_n_eta(5, e, 2, LocalBSpec(-3, -3)) == 0


def test_spherical_examples():
    assert padic.j_local_spherical(2, 1, 0, 1) == -4
    assert padic.j_local_spherical(2, 1, 1, 1) == lv(2, 0, -3)
    assert float(padic.j_local_spherical(2, 1, 1, 1)) == pytest.approx(-6 / math.sqrt(2), rel=1e-15)
    for e in (1, -1):
        assert padic.j_local_spherical(3, e, 2, Fraction(1, 27)).is_zero()


@pytest.mark.parametrize("q", [2, 3, 5])
@pytest.mark.parametrize("e", [1, -1])
def test_spherical_matches_shell_sum(q, e):
    for m in range(5):
        for b in padic_b_sample(q):
            assert float(padic.j_local_spherical(q, e, m, b)) == pytest.approx(
                padic.j_local_oracle(q, e, m, b), abs=1e-12)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_spherical_m0_is_minus_two_lambda(q):
    for e in (1, -1):
        for b in padic_b_sample(q):
            assert padic.j_local_spherical(q, e, 0, b) == -2 * padic.lambda_exact(q, e, b)


def _envelope(q, m, b):
    size = -padic.ordp(Fraction(b), q)  # |b| = q^size
    return (m + 1) ** 2 * ((q ** (1 - m / 2) if size <= m - 1 else 0) + (q ** (-m / 2) if size == m else 0))


def test_spherical_support():
    for q in (2, 3, 5):
        for e in (1, -1):
            for m in range(5):
                for b in padic_b_sample(q):
                    if -padic.ordp(Fraction(b), q) > m:
                        assert padic.j_local_spherical(q, e, m, b).is_zero()


def test_spherical_bound_on_grid():
    worst = 0.0
    for q in (2, 3, 5):
        for e in (1, -1):
            for m in range(1, 5):
                for b in padic_b_sample(q):
                    if -padic.ordp(Fraction(b), q) <= m:
                        worst = max(worst, abs(float(padic.j_local_spherical(q, e, m, b))) / _envelope(q, m, b))
    assert worst <= 4


def test_spherical_bound_grows_with_ord_b():
    # for eta(p) = 1 the shells below |b| contribute ord(b) + 1 times, so a
    # uniform constant needs the majorant Lambda as an extra factor
    vals = [abs(float(padic.j_local_spherical(2, 1, 1, 2 ** k))) for k in (0, 10, 20, 30)]
    assert vals == sorted(vals) and vals[-1] > 8 * vals[0]
    worst = 0.0
    for q in (2, 3, 5, 7):
        for e in (1, -1):
            for m in range(1, 7):
                for b in padic_b_sample(q, depth=12):
                    if -padic.ordp(Fraction(b), q) <= m:
                        env = _envelope(q, m, b) * max(1, padic.lambda_majorant(q, b))
                        worst = max(worst, abs(float(padic.j_local_spherical(q, e, m, b))) / env)
    assert worst <= 1


def test_spherical_certificate_majorant():
    # the bound used by the truncation certificate of the hyperbolic sum
    for q in (2, 3, 5, 7):
        for e in (1, -1):
            for m in range(7):
                for b in padic_b_sample(q, depth=12):
                    s = LocalBSpec.of(b, q)
                    d = max(1, (max(s.ord_b, 0) + 1) * (max(s.ord_b1, 0) + 1))
                    bound = 2 * geometric._spherical_constant(q, m) * d
                    assert abs(float(padic.j_local_spherical(q, e, m, b))) <= bound * (1 + 1e-12)


def test_lambda_examples():
    assert padic.lambda_exact(5, 1, 2) == 1
    assert padic.lambda_exact(3, -1, 3) == 0
    assert padic.lambda_majorant(3, 3) == 2
    assert padic.lambda_majorant(3, Fraction(1, 3)) == 0


def test_lambda_majorant_dominates():
    for q in (2, 3, 5):
        for e in (1, -1):
            for b in padic_b_sample(q):
                assert abs(float(padic.lambda_exact(q, e, b))) <= padic.lambda_majorant(q, b)


def test_unramified_examples():
    for e in (1, -1):
        assert padic.j_local_unramified(3, e, 1) == 1
        assert padic.j_local_unramified(3, e, Fraction(1, 3)) == 0
    assert padic.j_local_unramified(3, 1, 3) == 2


def test_level_examples():
    assert padic.j_local_level(3, 1, 1, 3) == 1
    assert padic.j_local_level(3, -1, 1, 3) == -1
    for e in (1, -1):
        assert padic.j_local_level(3, e, 2, 3) == 0
    with pytest.raises(ValueError):
        padic.j_local_level(3, 1, 0, 3)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_level_matches_shell_sum(q):
    for e in (1, -1):
        for k in (1, 2, 3):
            for b in padic_b_sample(q):
                assert float(padic.j_local_level(q, e, k, b)) == pytest.approx(
                    padic.j_local_oracle(q, e, None, b, level=k), abs=1e-12)


# -- ramified places --------------------------------------------------------------

def test_ramified_example():
    chi = QuadraticCharacter(-3).local(3)
    assert chi.f == 1
    assert padic.j_local_ramified(chi, 1) == 0


@pytest.mark.parametrize("D,p", [(-3, 3), (5, 5), (-20, 5), (12, 3), (-4, 2), (8, 2), (-8, 2), (12, 2)])
def test_ramified_matches_shell_sum_and_bound(D, p):
    chi = QuadraticCharacter(D).local(p)
    for b in padic_b_sample(p):
        v = padic.j_local_ramified(chi, b)
        assert float(v) == pytest.approx(padic.j_local_oracle(p, chi, None, b), abs=1e-12)
        if padic.ordp(Fraction(b), p) < -chi.f:
            assert v == 0
        assert abs(v) <= 4 * Fraction(1, p ** chi.f)


@pytest.mark.parametrize("D,p", [(-3, 3), (5, 5)])
def test_ramified_all_unit_classes(D, p):
    chi = QuadraticCharacter(D).local(p)
    for k in (-1, 0, 1, 2):
        for u in range(1, p ** 2):
            if u % p == 0:
                continue
            b = Fraction(p) ** k * u
            if b == -1:
                continue
            assert float(padic.j_local_ramified(chi, b)) == pytest.approx(
                padic.j_local_oracle(p, chi, None, b), abs=1e-12)


def test_ramified_literal_form_differs_from_shell_sum():
    chi = QuadraticCharacter(-3).local(3)
    mismatches = 0
    for b in padic_b_sample(3):
        lit = float(padic.j_local_ramified(chi, b, literal=True))
        if abs(lit - padic.j_local_oracle(3, chi, None, b)) > 1e-12:
            mismatches += 1
    assert mismatches > 0


def test_ramified_rejects_unramified():
    with pytest.raises(ValueError):
        padic.j_local_ramified(LocalCharacter.unramified(3, 1), 1)


def test_oracle_detects_small_shell_bound():
    with pytest.raises(ArithmeticError):
        padic.j_local_oracle(2, 1, 0, 2 ** 6, shell_bound=3)
    assert padic.j_local_oracle(2, 1, 0, 2 ** 6, shell_bound=7) == -14


# -- unipotent factors -------------------------------------------------------------

def test_u_local_examples():
    for q in (2, 3, 7):
        for e in (1, -1):
            assert padic.u_local(q, e, 0) == -2
        assert padic.u_local(q, -1, 1) == 0
    assert padic.u_local(3, 1, 2) == 0
    assert padic.u_prime_local(5, 0) == 0


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_u_local_contour(q):
    for m in range(8):
        for e in (1, -1):
            assert float(padic.u_local(q, e, m)) == pytest.approx(padic.u_local_contour(q, e, m), abs=1e-10)
        assert float(padic.u_prime_local(q, m)) == pytest.approx(padic.u_prime_contour(q, m), abs=1e-10)


def test_u_local_odd_parity():
    for q in (2, 3, 5, 7, 11):
        for m in (1, 3, 5, 7):
            assert padic.u_local(q, -1, m) == 0
