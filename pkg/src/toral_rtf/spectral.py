"""Spectral side of the relative trace formula.

Eigenform data (Hecke eigenvalues, central and adjoint L-values) are read
from a small line-oriented text format.  The side itself is
C(l, n, S) * sum_pi I(pi) * alpha(nu_S(pi)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from sympy import isprime

from . import lfunc, qexp
from .field import IdealQ, QuadraticCharacter, eta_local, eta_tilde, gauss_sum, index_K0
from .hecke import TestFunction


class DataError(ValueError):
    """Malformed or inconsistent spectral data."""


class MissingData(KeyError):
    """A quantity needed for the evaluation is absent from the data."""


class CoverageError(RuntimeError):
    """The data set is not asserted to exhaust the cusp forms of the level."""


@dataclass
class SpectralDatum:
    label: str
    weight: int
    conductor: int
    hecke: dict = field(default_factory=dict)  # p -> a_p (arithmetic normalization)
    L_half: float | None = None
    L_half_twist: dict = field(default_factory=dict)  # D -> completed L(1/2, pi x chi_D)
    L_adjoint: float | None = None
    complete_for_level: dict = field(default_factory=dict)  # N -> bool
    provenance: list = field(default_factory=list)

    def satake(self, p: int) -> float:
        """x_p = a_p / p^((k-1)/2), the trace of the unitary Satake matrix."""
        if self.conductor % p == 0:
            raise ValueError(f"{self.label} is ramified at {p}")
        if p not in self.hecke:
            raise MissingData(f"{self.label}: no a_{p}")
        return self.hecke[p] / p ** ((self.weight - 1) / 2)

    def satake_params(self, p: int) -> tuple[complex, complex]:
        """The root pair of X^2 - x_p X + 1."""
        x = self.satake(p)
        disc = complex(x * x - 4) ** 0.5
        return (x + disc) / 2, (x - disc) / 2


def _check_ramanujan(d: SpectralDatum, lineno: int):
    for p, a in d.hecke.items():
        if d.conductor % p == 0:
            continue
        if abs(a) > 2 * p ** ((d.weight - 1) / 2) * (1 + 1e-12):
            raise DataError(f"line {lineno}: a_{p} = {a} violates the Ramanujan bound for {d.label}")


def _parse_bool(tok: str, lineno: int) -> bool:
    low = tok.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise DataError(f"line {lineno}: expected a boolean, got {tok!r}")


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise DataError(f"line {lineno}: expected an integer, got {tok!r}") from None


def _parse_float(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise DataError(f"line {lineno}: expected a number, got {tok!r}") from None
    if not math.isfinite(v):
        raise DataError(f"line {lineno}: non-finite value {tok!r}")
    return v


def parse_spectral_data(text: str) -> list[SpectralDatum]:
    out: list[SpectralDatum] = []
    cur: SpectralDatum | None = None
    start = 0

    def finish():
        if cur is None:
            return
        if cur.weight <= 0 or cur.conductor <= 0:
            raise DataError(f"line {start}: record {cur.label!r} lacks weight or conductor")
        _check_ramanujan(cur, start)
        out.append(cur)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "form":
            if len(rest) != 1:
                raise DataError(f"line {lineno}: 'form' takes one label")
            finish()
            cur, start = SpectralDatum(rest[0], 0, 0), lineno
            continue
        if cur is None:
            raise DataError(f"line {lineno}: {key!r} before any 'form' line")
        arity = {"weight": 1, "conductor": 1, "ap": 2, "Lhalf": 1, "Lhalf_twist": 2,
                 "Ladj": 1, "complete_for_level": 2, "provenance": None}
        if key not in arity:
            raise DataError(f"line {lineno}: unknown key {key!r}")
        if arity[key] is not None and len(rest) != arity[key]:
            raise DataError(f"line {lineno}: {key!r} takes {arity[key]} value(s)")
        if key == "weight":
            cur.weight = _parse_int(rest[0], lineno)
        elif key == "conductor":
            cur.conductor = _parse_int(rest[0], lineno)
        elif key == "ap":
            p = _parse_int(rest[0], lineno)
            if not isprime(p):
                raise DataError(f"line {lineno}: {p} is not prime")
            cur.hecke[p] = _parse_int(rest[1], lineno)
        elif key == "Lhalf":
            cur.L_half = _parse_float(rest[0], lineno)
        elif key == "Lhalf_twist":
            cur.L_half_twist[_parse_int(rest[0], lineno)] = _parse_float(rest[1], lineno)
        elif key == "Ladj":
            cur.L_adjoint = _parse_float(rest[0], lineno)
        elif key == "complete_for_level":
            cur.complete_for_level[_parse_int(rest[0], lineno)] = _parse_bool(rest[1], lineno)
        else:
            cur.provenance.append(" ".join(rest))
    finish()
    return out


def load_spectral_data(path) -> list[SpectralDatum]:
    return parse_spectral_data(Path(path).read_text(encoding="utf-8"))


def format_spectral_data(data) -> str:
    lines = []
    for d in data:
        lines.append(f"form {d.label}")
        lines.append(f"weight {d.weight}")
        lines.append(f"conductor {d.conductor}")
        for note in d.provenance:
            lines.append(f"provenance {note}")
        for p in sorted(d.hecke):
            lines.append(f"ap {p} {d.hecke[p]}")
        if d.L_half is not None:
            lines.append(f"Lhalf {d.L_half:.17g}")
        for D in sorted(d.L_half_twist):
            lines.append(f"Lhalf_twist {D} {d.L_half_twist[D]:.17g}")
        if d.L_adjoint is not None:
            lines.append(f"Ladj {d.L_adjoint:.17g}")
        for N in sorted(d.complete_for_level):
            lines.append(f"complete_for_level {N} {'true' if d.complete_for_level[N] else 'false'}")
        lines.append("")
    return "\n".join(lines)


def is_complete(data, l: int, n: int) -> bool:
    flags = [d.complete_for_level[n] for d in data if d.weight == l and n in d.complete_for_level]
    return bool(flags) and all(flags)


# -- test functions on the spectral side --------------------------------------

def alpha_eval(alpha: TestFunction, pi: SpectralDatum) -> float:
    x = {p: pi.satake(p) for p in alpha.primes}
    return float(alpha(x))


def amplifier(x: dict) -> TestFunction:
    """(sum_p {x_p alpha^(1) - alpha^(2) - 1})^2 for the traces x_p of a fixed form.

    ``x`` maps primes to Satake traces (Fractions give an exact expansion).
    At the form's own parameters every summand equals 1.
    """
    total = None
    for p in sorted(x):
        Z = TestFunction.single(p, [Fraction(-1, 2), x[p], -1])
        total = Z if total is None else total + Z
    if total is None:
        return TestFunction((), {})
    return total * total


def amplifier_for(pi: SpectralDatum, S) -> TestFunction:
    return amplifier({p: pi.satake(p) for p in S})


# -- weights, signs and normalizing constants --------------------------------

def _r_unramified(q: int, k: int, x: float, e: int) -> float:
    if e == -1:
        return (1 + (-1) ** k) / 2 * (q + 1) / (q - 1)
    # (1 + a sqrt q)(1 + sqrt q / a) and (1 - a sqrt q)(1 - sqrt q / a) for a + 1/a = x
    den = 1 + x * math.sqrt(q) + q
    inner = 1 - x * math.sqrt(q) + q
    return (q + 1) / den * (2 + (k - 1) / (q - 1) * inner)


def local_weight(pi: SpectralDatum, p: int, k: int, e: int) -> float:
    """Contribution of one prime p with k = ord_p(n / f_pi) >= 1 to w_n."""
    c = IdealQ(pi.conductor).ord(p)
    if e == -1:
        if c == 0:
            return _r_unramified(p, k, 0.0, -1)
        return (1 + (-1) ** k) / 2
    if c == 0:
        return _r_unramified(p, k, pi.satake(p), 1)
    if c == 1:
        if p not in pi.hecke:
            raise MissingData(f"{pi.label}: no a_{p}")
        chi = pi.hecke[p] / p ** ((pi.weight - 2) / 2)
        if abs(abs(chi) - 1) > 1e-9:
            raise DataError(f"{pi.label}: a_{p} is not +-p^((k-2)/2) at a prime of conductor exponent 1")
        chi = round(chi)
        return 1 + k * (1 - chi / p) / (1 + chi / p)
    return k + 1.0


def w_weight(pi: SpectralDatum, n, eta: QuadraticCharacter) -> float:
    n = IdealQ(n) if not isinstance(n, IdealQ) else n
    if n.n % pi.conductor:
        raise ValueError("the conductor of the form must divide the level")
    if math.gcd(n.n, eta.conductor) != 1:
        raise ValueError("level and character conductor must be coprime")
    m = IdealQ(n.n // pi.conductor)
    out = 1.0
    for p, k in m.factorization.items():
        out *= local_weight(pi, p, k, eta_local(eta, p))
    return out


def sign_of_fe(pi: SpectralDatum, eta: QuadraticCharacter) -> int:
    """Product of the root numbers of L(s, pi) and L(s, pi x eta)."""
    return (-1) ** eta.sign * eta_tilde(eta, pi.conductor)


def rtf_constant(l: int, n, S) -> float:
    n = IdealQ(n) if not isinstance(n, IdealQ) else n
    arch = 2 * math.pi * math.exp(math.lgamma(l - 1) - 2 * math.lgamma(l / 2))
    return (-1) ** len(S) * arch * 0.5 / index_K0(n)


def _twist_value(pi: SpectralDatum, eta: QuadraticCharacter) -> float:
    if eta.trivial:
        if pi.L_half is None:
            raise MissingData(f"{pi.label}: no central value")
        return pi.L_half
    if eta.D not in pi.L_half_twist:
        raise MissingData(f"{pi.label}: no twisted central value for D={eta.D}")
    return pi.L_half_twist[eta.D]


def i_cus(pi: SpectralDatum, n, eta: QuadraticCharacter) -> complex:
    front = (-1) ** eta.sign * gauss_sum(eta)
    if sign_of_fe(pi, eta) == -1:
        return 0j
    w = w_weight(pi, n, eta)
    if w == 0:
        return 0j
    if pi.L_half is None or pi.L_adjoint is None:
        raise MissingData(f"{pi.label}: central or adjoint value missing")
    norm = pi.conductor / index_K0(pi.conductor) * pi.L_adjoint
    return front * w * pi.L_half * _twist_value(pi, eta) / norm


@dataclass
class SpectralReport:
    value: complex
    terms: list
    complete: bool
    provenance: list


def spectral_side(data, l: int, n, eta: QuadraticCharacter, alpha: TestFunction | None = None,
                  allow_partial: bool = False) -> SpectralReport:
    n = IdealQ(n) if not isinstance(n, IdealQ) else n
    alpha = alpha or TestFunction.unit()
    complete = is_complete(data, l, n.n)
    if not complete and not allow_partial:
        raise CoverageError(f"data not asserted complete for weight {l}, level {n.n}")
    C = rtf_constant(l, n, alpha.primes)
    terms, prov = [], []
    for pi in data:
        if pi.weight != l or n.n % pi.conductor:
            continue
        I = i_cus(pi, n, eta)
        a = alpha_eval(alpha, pi) if I != 0 else 0.0
        terms.append((pi.label, C * I * a))
        prov.extend(f"{pi.label}: {note}" for note in pi.provenance)
    value = complex(math.fsum(t.real for _, t in terms), math.fsum(t.imag for _, t in terms))
    return SpectralReport(value, terms, complete, prov)


# -- L-values of level one eigenforms ---------------------------------------

def newform_root_number(coeffs, k: int, level: int = 1) -> int:
    """Root number (-1)^(k/2) prod_{p | N} (-a_p / p^(k/2 - 1)) of a newform of squarefree level."""
    eps = (-1) ** (k // 2)
    for p, e in IdealQ(level).factorization.items():
        if e > 1:
            raise NotImplementedError("only squarefree levels are handled")
        w = -coeffs[p] / p ** (k // 2 - 1)
        if w not in (1, -1):
            raise DataError(f"a_{p} = {coeffs[p]} is not +-p^(k/2-1)")
        eps *= int(w)
    return eps


def completed_central_value(coeffs, k: int, eta: QuadraticCharacter | None = None,
                            rho: float = 16.0, target_error: float = 1e-13,
                            level: int = 1) -> tuple[float, float]:
    """L(1/2, pi x eta) with the factor Gamma_C(s + (k-1)/2) and no conductor power.

    ``coeffs`` are the arithmetic a(n) of a newform of squarefree level.  For
    eta coprime to the level the twist has conductor level * D^2 and root
    number eps(pi) eta(-level).
    """
    lam = qexp.normalized_hecke(coeffs, k)
    N, eps = level, newform_root_number(coeffs, k, level)
    if eta is not None and not eta.trivial:
        if math.gcd(level, eta.conductor) != 1:
            raise ValueError("twist conductor must be coprime to the level")
        lam = [0.0] + [lam[m] * eta(m) for m in range(1, len(lam))]
        N *= eta.conductor ** 2
        eps *= eta(-1) * eta(level)
    if eps == -1:
        return 0.0, 0.0
    val, err = lfunc.afe(lam, [lfunc.GammaFactor("C", (k - 1) / 2)], N, eps, 0.5, rho, target_error)
    return val / N ** 0.25, err / N ** 0.25


def central_L_afe(coeffs, k: int, N: int = 1, eta: QuadraticCharacter | None = None,
                  target_error: float = 1e-13) -> float:
    return completed_central_value(coeffs, k, eta, target_error=target_error, level=N)[0]


def completed_adjoint_value(coeffs, k: int, rho: float = 16.0, target_error: float = 1e-12,
                            level: int = 1) -> tuple[float, float]:
    """L(1, pi, Ad) = Gamma_R(s+1) Gamma_C(s+k-1) L(s, sym^2) at s = 1, squarefree level.

    The adjoint conductor is level^2; its power is divided out again.
    """
    n = len(coeffs)
    b = qexp.symmetric_square_coefficients(coeffs, k, n, level)
    factors = [lfunc.GammaFactor("R", 1.0), lfunc.GammaFactor("C", k - 1.0)]
    val, err = lfunc.afe(b, factors, level * level, 1, 1.0, rho, target_error, coeff_bound=(4.0, 1.0))
    return val / level, err / level


def newform_datum(label: str, coeffs, k: int, level: int = 1, discriminants=(),
                  primes_up_to: int = 100) -> SpectralDatum:
    """A SpectralDatum with L-values computed from a q-expansion of a newform."""
    d = SpectralDatum(label, k, level)
    d.hecke = {p: coeffs[p] for p in range(2, primes_up_to + 1) if isprime(p)}
    d.L_half = completed_central_value(coeffs, k, level=level)[0]
    for D in discriminants:
        d.L_half_twist[D] = completed_central_value(coeffs, k, QuadraticCharacter(D), level=level)[0]
    d.L_adjoint = completed_adjoint_value(coeffs, k, level=level)[0]
    d.provenance.append(f"coefficients from exact q-expansion ({len(coeffs)} terms)")
    d.provenance.append("L-values computed by smoothed approximate functional equation, G(w)=exp(w^2/16)")
    return d


def level_one_datum(k: int, discriminants=(), n_coeffs: int = 1200, primes_up_to: int = 100) -> SpectralDatum:
    """A SpectralDatum for the unique eigenform of weight k and level one."""
    coeffs = qexp.level_one_eigenform(k, n_coeffs)
    d = newform_datum(f"level1_k{k}", coeffs, k, 1, discriminants, primes_up_to)
    d.complete_for_level[1] = True
    return d
