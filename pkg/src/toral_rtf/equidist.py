"""Limit measures of Satake parameters and weighted empirical distributions.

The measures live on the Satake trace x = z + 1/z in [-2, 2].  Next to the
Sato-Tate law there is, for each prime power q and sign e = eta(p), a measure
mu_q^e whose density against Sato-Tate is a rational function of x.
"""
from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass

from scipy.integrate import quad

from .field import IdealQ, QuadraticCharacter, eta_local, gauss_sum
from .hecke import chebyshev_alpha
from .spectral import CoverageError, i_cus, is_complete


@dataclass(frozen=True)
class MeasureSpec:
    q: int
    eta_p: int

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise ValueError("q must be an integer >= 2")
        if self.eta_p not in (1, -1):
            raise ValueError("eta_p must be +1 or -1")


def _check_x(x: float):
    if not -2 - 1e-15 <= x <= 2 + 1e-15:
        raise ValueError(f"x = {x} lies outside [-2, 2]")


def sato_tate_density(x: float) -> float:
    _check_x(x)
    return math.sqrt(max(4.0 - x * x, 0.0)) / (2 * math.pi)


def mu_density(spec: MeasureSpec, x: float) -> float:
    """Density of mu_q^e with respect to dx."""
    q = spec.q
    a = math.sqrt(q) + 1 / math.sqrt(q)
    if spec.eta_p == -1:
        ratio = (q + 1) / (a * a - x * x)
    else:
        ratio = (q - 1) / (a - x) ** 2
    return ratio * sato_tate_density(x)


def mu_density_via_L(spec: MeasureSpec, y: float) -> float:
    """The same measure in the variable y with x = q^(iy/2) + q^(-iy/2).

    Built from the local L-factors of the unramified principal series with
    Satake parameters q^(+-iy/2).  The density has mass 1 on one period
    (-2 pi / log q, 2 pi / log q], which covers [-2, 2] twice.
    """
    q, e = spec.q, spec.eta_p
    z = complex(q) ** (-0.5j * y)
    lq = math.log(q)

    def L(s, c):
        return 1 / ((1 - c * z * q ** -s) * (1 - c / z * q ** -s))

    ad = 1 / ((1 - z * z / q) * (1 - 1 / q) * (1 - 1 / (z * z * q)))
    zeta2 = 1 / (1 - q ** -2.0)
    L1eta = 1 / (1 - e / q)
    ratio = abs((1 - complex(q) ** (-1j * y)) / (1 - complex(q) ** (-1 - 1j * y))) ** 2
    val = L(0.5, 1) * L(0.5, e) / (2 * ad) * zeta2 / L1eta * (1 + 1 / q) * lq / (4 * math.pi) * ratio
    return val.real


def x_of_y(q: int, y: float) -> float:
    return 2 * math.cos(y * math.log(q) / 2)


def y_jacobian(q: int, y: float) -> float:
    """|dx/dy| for x = 2 cos(y log q / 2)."""
    lq = math.log(q)
    return abs(math.sin(y * lq / 2)) * lq


def _integrate(f, tol=1e-13) -> float:
    # the densities are smooth on (-2, 2) with square-root endpoints
    val, err = quad(f, -2, 2, epsabs=tol, epsrel=tol, limit=200)
    return val


def mu_mass(spec: MeasureSpec) -> float:
    return _integrate(lambda x: mu_density(spec, x))


def mu_moment(spec: MeasureSpec, m: int) -> float:
    """Integral of alpha^(m)(x) = z^m + z^-m against mu_q^e."""
    if m < 0:
        raise ValueError("degree must be non-negative")
    return _integrate(lambda x: chebyshev_alpha(m, x) * mu_density(spec, x))


def mu_cdf(spec: MeasureSpec, x: float) -> float:
    if x <= -2:
        return 0.0
    if x >= 2:
        return 1.0
    val, _ = quad(lambda t: mu_density(spec, t), -2, x, epsabs=1e-13, epsrel=1e-13, limit=200)
    return min(max(val, 0.0), 1.0)


@dataclass
class EmpiricalResult:
    p: int
    atoms: list  # (x_p, normalized weight, label), sorted by x
    bins: list  # (lo, hi, weight, model_mass)
    discrepancy: float
    complete: bool

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "weight", "model_mass"])
        for lo, hi, wt, mm in self.bins:
            w.writerow([f"{lo:.17g}", f"{hi:.17g}", f"{wt:.17g}", f"{mm:.17g}"])
        return buf.getvalue()


def bin_edges(bins: int) -> list[float]:
    if bins < 1:
        raise ValueError("need at least one bin")
    return [-2 + 4 * i / bins for i in range(bins + 1)]


def model_histogram(spec: MeasureSpec, bins: int) -> list[tuple]:
    edges = bin_edges(bins)
    cdf = [mu_cdf(spec, e) for e in edges]
    return [(edges[i], edges[i + 1], 0.0, cdf[i + 1] - cdf[i]) for i in range(bins)]


def empirical_from_atoms(atoms, spec: MeasureSpec, bins: int, p: int = 0, complete: bool = True) -> EmpiricalResult:
    """Histogram and Kolmogorov-Smirnov distance of a weighted point set against mu.

    ``atoms`` is a list of (x, weight, label).  A zero total weight gives an
    empty histogram and discrepancy 1.
    """
    total = math.fsum(w for _, w, _ in atoms)
    hist = model_histogram(spec, bins)
    if total <= 0:
        return EmpiricalResult(p, [], hist, 1.0, complete)
    atoms = sorted(((x, w / total, lab) for x, w, lab in atoms), key=lambda a: a[0])
    edges = bin_edges(bins)
    weights = [0.0] * bins
    for x, w, _ in atoms:
        i = min(max(bisect.bisect_right(edges, x) - 1, 0), bins - 1)
        weights[i] += w
    hist = [(lo, hi, weights[i], mm) for i, (lo, hi, _, mm) in enumerate(hist)]
    # the sup of |F_emp - F_mu| is attained at an atom, on one side or the other
    d, acc = 0.0, 0.0
    for x, w, _ in atoms:
        F = mu_cdf(spec, x)
        d = max(d, abs(acc - F))
        acc += w
        d = max(d, abs(min(acc, 1.0) - F))
    return EmpiricalResult(p, atoms, hist, d, complete)


def form_weight(pi, n, eta: QuadraticCharacter) -> float:
    """|I(pi)| without the Gauss sum phase; nonnegative up to L-value noise."""
    val = i_cus(pi, n, eta)
    if val == 0:
        return 0.0
    front = (-1) ** eta.sign * gauss_sum(eta)
    return (val / front).real


def weighted_empirical(data, l: int, n, eta: QuadraticCharacter, p: int, bins: int = 20,
                       allow_partial: bool = False) -> EmpiricalResult:
    """Weighted empirical distribution of x_p(pi) over the forms of weight l and level n."""
    n = n if isinstance(n, IdealQ) else IdealQ(int(n))
    complete = is_complete(data, l, n.n)
    if not complete and not allow_partial:
        raise CoverageError(f"data not asserted complete for weight {l}, level {n.n}")
    e = eta_local(eta, p)
    if e == 0 or n.ord(p):
        raise ValueError(f"p = {p} must be unramified for eta and prime to the level")
    spec = MeasureSpec(p, e)
    atoms = []
    for pi in data:
        if pi.weight != l or n.n % pi.conductor:
            continue
        atoms.append((pi.satake(p), form_weight(pi, n, eta), pi.label))
    return empirical_from_atoms(atoms, spec, bins, p, complete)
