"""Closed forms checked against independent numerical oracles.

Each suite yields rows (suite, case, closed_form, oracle, abs_err) and a row
passes when abs_err <= tol.  The command line and the acceptance tests both
run these.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from . import arch, equidist, geometric, padic
from .field import QuadraticCharacter, dirichlet_L1, gauss_sum, gauss_sum_modulus
from .spectral import amplifier


@dataclass(frozen=True)
class Row:
    suite: str
    case: str
    closed_form: float
    oracle: float
    abs_err: float


@dataclass(frozen=True)
class Suite:
    name: str
    tol: float
    run: Callable[[], Iterator[Row]]
    description: str = ""


def _row(suite, case, closed, oracle) -> Row:
    return Row(suite, case, closed, oracle, abs(closed - oracle))


# -- archimedean ---------------------------------------------------------------

ARCH_WEIGHTS = (6, 8, 10, 12, 14, 16, 20, 24)


def arch_b_grid() -> list[Fraction]:
    """Rationals avoiding 0 and -1, on both sides of b(b+1) = 0."""
    out = [Fraction(k) for k in (1, 2, 3, 5, 10, 40, -2, -3, -6, -25)]
    out += [Fraction(a, c) for a, c in ((1, 2), (1, 3), (3, 7), (7, 3), (9, 4), (1, 100),
                                         (-1, 2), (-1, 3), (-2, 3), (-1, 50), (-49, 50),
                                         (-5, 3), (-7, 2), (-11, 10), (-21, 20), (13, 5))]
    return out


def suite_arch() -> Iterator[Row]:
    for l in ARCH_WEIGHTS:
        for b in arch_b_grid():
            even = arch.j_arch_even(l, b)
            yield _row("arch", f"l={l} b={b} even", even, arch.j_arch_oracle(l, 0, b))
            odd = arch.j_arch_odd(l, b)
            orc = arch.j_arch_oracle(l, 1, b)
            yield _row("arch", f"l={l} b={b} odd", odd.imag, complex(orc).imag)
            yield _row("arch", f"l={l} b={b} odd real part", odd.real, complex(orc).real)


def suite_c_l(seed: int = 7) -> Iterator[Row]:
    rng = random.Random(seed)
    for i in range(50):
        l = rng.choice((4, 6, 8, 10, 12))
        z = complex(rng.uniform(-1.2, 1.2), rng.uniform(-3, 3))
        a, b = arch.c_l(z, l), arch.c_l(-z, l)
        yield _row("c_l", f"even l={l} z={z:.6f} re", a.real, b.real)
        yield _row("c_l", f"even l={l} z={z:.6f} im", a.imag, b.imag)


def suite_c_l_zero() -> Iterator[Row]:
    for l in (4, 6, 8, 10, 12):
        yield _row("c_l_zero", f"l={l} closed forms", arch.c_l_zero(l, 1), arch.c_l_zero(l, 2))


def suite_c_l_quadrature() -> Iterator[Row]:
    for l in (4, 6, 8, 10, 12):
        yield _row("c_l_quadrature", f"l={l}", arch.c_l_zero(l, 1), arch.c_l(0, l).real)


# -- p-adic ----------------------------------------------------------------------

PADIC_PRIMES = (2, 3, 5)


def padic_b_sample(q: int, depth: int = 5) -> list[Fraction]:
    """b with ord(b) in [-depth, depth], plus b near -1 with ord(b+1) up to depth."""
    u0 = 3 if q == 2 else 2
    units = (Fraction(1), Fraction(-1), Fraction(u0), Fraction(-1, u0))
    out = []
    for k in range(-depth, depth + 1):
        for u in units:
            b = Fraction(q) ** k * u
            if b != -1:
                out.append(b)
    for k in range(1, depth + 1):
        for u in units:
            out.append(-1 + Fraction(q) ** k * u)
    return sorted(set(out))


def suite_spherical() -> Iterator[Row]:
    for q in PADIC_PRIMES:
        for e in (1, -1):
            for m in range(5):
                for b in padic_b_sample(q):
                    yield _row("spherical", f"q={q} eta={e:+d} m={m} b={b}",
                               float(padic.j_local_spherical(q, e, m, b)), padic.j_local_oracle(q, e, m, b))


def suite_unramified() -> Iterator[Row]:
    for q in PADIC_PRIMES:
        for e in (1, -1):
            for b in padic_b_sample(q):
                yield _row("unramified", f"q={q} eta={e:+d} b={b}",
                           float(padic.j_local_unramified(q, e, b)), padic.j_local_oracle(q, e, None, b))


def suite_level() -> Iterator[Row]:
    for q in PADIC_PRIMES:
        for e in (1, -1):
            for k in (1, 2, 3):
                for b in padic_b_sample(q):
                    yield _row("level", f"q={q} eta={e:+d} k={k} b={b}",
                               float(padic.j_local_level(q, e, k, b)), padic.j_local_oracle(q, e, None, b, level=k))


# local components with conductor exponent f <= 2 at 2, 3 and 5, in both
# classes of the uniformizer value
RAMIFIED_COMPONENTS = ((2, -4), (2, 12), (3, -3), (3, 12), (5, 5), (5, -20))


def suite_ramified() -> Iterator[Row]:
    for p, D in RAMIFIED_COMPONENTS:
        chi = QuadraticCharacter(D).local(p)
        for b in padic_b_sample(p):
            yield _row("ramified", f"D={D} p={p} f={chi.f} b={b}",
                       float(padic.j_local_ramified(chi, b)), padic.j_local_oracle(p, chi, None, b))


# -- unipotent factors and measures ----------------------------------------------

MEASURE_PRIMES = (2, 3, 5, 7)


def suite_unipotent() -> Iterator[Row]:
    for q in MEASURE_PRIMES:
        for e in (1, -1):
            for m in range(7):
                yield _row("unipotent", f"q={q} eta={e:+d} m={m} contour",
                           float(padic.u_local(q, e, m)), padic.u_local_contour(q, e, m))
        for m in range(7):
            yield _row("unipotent", f"q={q} m={m} derivative contour",
                       float(padic.u_prime_local(q, m)), padic.u_prime_contour(q, m))


def suite_duality() -> Iterator[Row]:
    for q in MEASURE_PRIMES:
        for e in (1, -1):
            spec = equidist.MeasureSpec(q, e)
            for m in range(7):
                yield _row("duality", f"q={q} eta={e:+d} m={m}",
                           float(padic.u_local(q, e, m)), -equidist.mu_moment(spec, m))


def suite_measure() -> Iterator[Row]:
    for q in MEASURE_PRIMES:
        for e in (1, -1):
            spec = equidist.MeasureSpec(q, e)
            yield _row("measure", f"q={q} eta={e:+d} mass", 1.0, equidist.mu_mass(spec))
            period = 4 * math.pi / math.log(q)
            for i in range(40):
                y = (i + 0.5) / 40 * period / 2
                x = equidist.x_of_y(q, y)
                # two-to-one map from one y-period onto [-2, 2]
                via_x = 0.5 * equidist.mu_density(spec, x) * equidist.y_jacobian(q, y)
                yield _row("measure", f"q={q} eta={e:+d} y={y:.6f}", via_x, equidist.mu_density_via_L(spec, y))


def suite_amplifier(seed: int = 11, trials: int = 40) -> Iterator[Row]:
    rng = random.Random(seed)
    primes = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)
    for t in range(trials):
        size = 1 + t % 10
        S = sorted(rng.sample(primes, size))
        x = {p: Fraction(rng.randint(-2000, 2000), 1000) for p in S}
        val = amplifier(x)(x)
        yield Row("amplifier", f"S={S}", float(len(S) ** 2), float(val), float(abs(val - len(S) ** 2)))


# -- characters ------------------------------------------------------------------

CHARACTER_SAMPLE = (5, 8, 12, 13, 17, -3, -4, -7, -8, -15, -20, 21, 24, -24, 40)


def suite_characters() -> Iterator[Row]:
    for D in CHARACTER_SAMPLE:
        eta = QuadraticCharacter(D)
        yield _row("characters", f"D={D} |G|", abs(gauss_sum(eta)), gauss_sum_modulus(eta))
        yield _row("characters", f"D={D} L(1)", dirichlet_L1(eta), dirichlet_L1(eta, "digamma"))


def suite_stability() -> Iterator[Row]:
    """Odd eta and large level: no hyperbolic term at all."""
    for n in (11, 13, 17):
        cfg = geometric.GeometricConfig(12, n, -4)
        hyp, _, _, count, nonzero, _ = geometric.hyperbolic_term(cfg)
        yield Row("stability", f"D=-4 n={n} hyperbolic", 0.0, abs(hyp), abs(hyp))


SUITES = (
    Suite("arch", 1e-8, suite_arch, "archimedean orbital integrals against quadrature"),
    Suite("c_l", 1e-10, suite_c_l, "evenness of C_l"),
    Suite("c_l_zero", 1e-12, suite_c_l_zero, "the two closed forms of C_l(0)"),
    Suite("c_l_quadrature", 1e-9, suite_c_l_quadrature, "C_l(0) against quadrature"),
    Suite("spherical", 1e-12, suite_spherical, "spherical Hecke kernels against shell sums"),
    Suite("unramified", 1e-12, suite_unramified, "unramified places against shell sums"),
    Suite("level", 1e-12, suite_level, "places dividing the level against shell sums"),
    Suite("ramified", 1e-12, suite_ramified, "places where eta ramifies against shell sums"),
    Suite("unipotent", 1e-10, suite_unipotent, "unipotent factors against contour integrals"),
    Suite("duality", 1e-10, suite_duality, "unipotent factors against moments of mu"),
    Suite("measure", 1e-10, suite_measure, "mass of mu and its two density formulas"),
    Suite("amplifier", 0.0, suite_amplifier, "amplifier at its own form"),
    Suite("characters", 1e-10, suite_characters, "Gauss sums and L(1, eta)"),
    Suite("stability", 0.0, suite_stability, "vanishing hyperbolic term"),
)


def select(filter_text: str | None = None) -> list[Suite]:
    if not filter_text:
        return list(SUITES)
    keys = [k.strip().lower() for k in filter_text.split(",") if k.strip()]
    return [s for s in SUITES if any(k in s.name.lower() for k in keys)]


@dataclass
class SuiteResult:
    suite: Suite
    tol: float
    rows: list
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0 and bool(self.rows)

    @property
    def max_err(self) -> float:
        return max((r.abs_err for r in self.rows), default=0.0)


def run_suite(suite: Suite, tol: float | None = None) -> SuiteResult:
    tol = suite.tol if tol is None else tol
    rows = list(suite.run())
    failures = sum(1 for r in rows if not r.abs_err <= tol)
    return SuiteResult(suite, tol, rows, failures)
