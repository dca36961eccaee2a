"""Angular-momentum algebra, Laguerre polynomials and quadrature rules.

Half-integer quantum numbers are carried as doubled integers (``2j``) so that
selection rules are exact.  Anything that accepts a quantum number also accepts
a :class:`HalfInteger`, a plain ``int`` or a :class:`fractions.Fraction` with
denominator 1 or 2; floats are refused.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

# 3j / d-matrix evaluation works with log-factorials of arguments up to 2j+1 ~ 65.
MAX_TWICE_J = 64
_LOG_FACT = np.array([math.lgamma(k + 1) for k in range(4 * MAX_TWICE_J + 2)])


@dataclass(frozen=True, order=True)
class HalfInteger:
    """An integer or half-odd-integer, stored as ``twice_value``."""

    twice_value: int

    def __post_init__(self):
        if not isinstance(self.twice_value, (int, np.integer)) or isinstance(self.twice_value, bool):
            raise TypeError("twice_value must be an integer")

    @classmethod
    def of(cls, value: "HalfLike") -> "HalfInteger":
        return cls(twice(value))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def __float__(self) -> float:
        return self.twice_value / 2

    def __neg__(self) -> "HalfInteger":
        return HalfInteger(-self.twice_value)

    def __str__(self) -> str:
        return str(self.value)


HalfLike = Union[HalfInteger, int, Fraction, str]


def twice(value: HalfLike) -> int:
    """Return ``2*value`` as an exact integer, rejecting floats and non-halves."""
    if isinstance(value, HalfInteger):
        return int(value.twice_value)
    if isinstance(value, bool):
        raise TypeError("booleans are not quantum numbers")
    if isinstance(value, (int, np.integer)):
        return 2 * int(value)
    if isinstance(value, str):
        value = Fraction(value)
    if isinstance(value, Fraction):
        doubled = 2 * value
        if doubled.denominator != 1:
            raise ValueError(f"{value} is not a multiple of 1/2")
        return int(doubled)
    raise TypeError(
        f"quantum numbers must be int, Fraction, str or HalfInteger, got {type(value).__name__}"
    )


def projections(j: HalfLike) -> list[HalfInteger]:
    """Projections m = j, j-1, ..., -j (descending; the basis order used everywhere)."""
    tj = twice(j)
    if tj < 0:
        raise ValueError("angular momentum must be non-negative")
    return [HalfInteger(tm) for tm in range(tj, -tj - 1, -2)]


def _lf(twice_arg: int) -> float:
    # log((twice_arg/2)!) for an even doubled argument
    return _LOG_FACT[twice_arg // 2]


def wigner_3j(j1: HalfLike, j2: HalfLike, j3: HalfLike,
              m1: HalfLike, m2: HalfLike, m3: HalfLike) -> float:
    """Wigner 3j symbol by the Racah formula.

    Returns 0 when the triangle rule, the projection ranges or m1+m2+m3 = 0
    are violated.
    """
    a, b, c = twice(j1), twice(j2), twice(j3)
    x, y, z = twice(m1), twice(m2), twice(m3)
    if max(a, b, c) > 2 * MAX_TWICE_J:
        raise ValueError(f"2j above {2 * MAX_TWICE_J} is not supported")
    if x + y + z != 0:
        return 0.0
    if abs(x) > a or abs(y) > b or abs(z) > c:
        return 0.0
    if (a - x) % 2 or (b - y) % 2 or (c - z) % 2:
        return 0.0
    if c < abs(a - b) or c > a + b or (a + b + c) % 2:
        return 0.0

    # Triangle coefficient and the prefactor square roots, all in log form.
    log_delta = _lf(a + b - c) + _lf(a - b + c) + _lf(-a + b + c) - _lf(a + b + c + 2)
    log_pref = (_lf(a + x) + _lf(a - x) + _lf(b + y) + _lf(b - y)
                + _lf(c + z) + _lf(c - z))
    half_log = 0.5 * (log_delta + log_pref)

    kmin = max(0, (b - c - x) // 2, (a - c + y) // 2)
    kmax = min((a + b - c) // 2, (a - x) // 2, (b + y) // 2)
    total = 0.0
    for k in range(kmin, kmax + 1):
        tk = 2 * k
        log_den = (_lf(tk) + _lf(c - b + x + tk) + _lf(c - a - y + tk)
                   + _lf(a + b - c - tk) + _lf(a - x - tk) + _lf(b + y - tk))
        term = math.exp(half_log - log_den)
        total += -term if k % 2 else term
    phase = (a - b - z) // 2
    return -total if phase % 2 else total


def wigner_small_d(j: HalfLike, mp: HalfLike, m: HalfLike, theta: float) -> float:
    """Wigner small-d element d^j_{m'm}(theta) = <j m'| exp(-i theta J_y) |j m>."""
    tj, tmp, tm = twice(j), twice(mp), twice(m)
    if abs(tmp) > tj or abs(tm) > tj or (tj - tmp) % 2 or (tj - tm) % 2:
        raise ValueError(f"projection out of range for j={Fraction(tj, 2)}")
    jpm, jmm = (tj + tm) // 2, (tj - tm) // 2
    jpmp, jmmp = (tj + tmp) // 2, (tj - tmp) // 2
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    log_pref = 0.5 * (_LOG_FACT[jpmp] + _LOG_FACT[jmmp] + _LOG_FACT[jpm] + _LOG_FACT[jmm])
    diff = (tmp - tm) // 2
    kmin, kmax = max(0, -diff), min(jpm, jmmp)
    total = 0.0
    for k in range(kmin, kmax + 1):
        pc = jpm + jmmp - 2 * k
        ps = 2 * k + diff
        log_den = (_LOG_FACT[jpm - k] + _LOG_FACT[k] + _LOG_FACT[jmmp - k]
                   + _LOG_FACT[k + diff])
        term = math.exp(log_pref - log_den) * c ** pc * s ** ps
        total += -term if (k + diff) % 2 else term
    return total


# Euler-angle convention for wigner_D.  "active" is the z-y-z form
# exp(-i m' phi) d(theta) exp(-i m gamma); "passive" evaluates the same
# symbol on the inverse rotation, i.e. conj(D_active[m, m']).
ACTIVE = "active"
PASSIVE = "passive"


def wigner_D(j: HalfLike, mp: HalfLike, m: HalfLike, phi: float, theta: float,
             gamma: float, convention: str = ACTIVE) -> complex:
    """Wigner rotation function D^j_{m'm}(phi, theta, gamma)."""
    tmp, tm = twice(mp), twice(m)
    if convention == ACTIVE:
        d = wigner_small_d(j, mp, m, theta)
        return complex(np.exp(-0.5j * (tmp * phi + tm * gamma)) * d)
    if convention == PASSIVE:
        return complex(np.conj(wigner_D(j, m, mp, phi, theta, gamma, ACTIVE)))
    raise ValueError(f"unknown Euler convention {convention!r}")


def wigner_D_matrix(j: HalfLike, phi: float, theta: float, gamma: float,
                    convention: str = ACTIVE) -> np.ndarray:
    """Full (2j+1)x(2j+1) rotation matrix, rows/columns ordered m = j..-j."""
    ms = projections(j)
    return np.array([[wigner_D(j, a, b, phi, theta, gamma, convention) for b in ms] for a in ms])


def laguerre_assoc(n: int, k: float, x):
    """Associated Laguerre polynomial L_n^k(x) by the three-term recurrence.

    ``x`` may be a scalar or an array.
    """
    if n < 0:
        raise ValueError("Laguerre degree must be non-negative")
    x = np.asarray(x, dtype=float) if not np.iscomplexobj(x) else np.asarray(x)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + k - x
    for i in range(1, n):
        prev, cur = cur, ((2 * i + 1 + k - x) * cur - (i + k) * prev) / (i + 1)
    return cur if np.ndim(cur) else float(cur)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for a one-dimensional integral over ``domain``."""

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ValueError("nodes and weights differ in length")

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> complex:
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


def gauss_legendre(npoints: int, a: float = -1.0, b: float = 1.0) -> QuadratureRule:
    """Gauss-Legendre rule on [a, b], exact through degree 2*npoints - 1."""
    if npoints < 1:
        raise ValueError("npoints must be >= 1")
    if not b > a:
        raise ValueError(f"degenerate interval [{a}, {b}]")
    x, w = np.polynomial.legendre.leggauss(npoints)
    half = 0.5 * (b - a)
    return QuadratureRule(half * x + 0.5 * (a + b), half * w, (float(a), float(b)))


def uniform_periodic(npoints: int, period: float = 2 * np.pi) -> QuadratureRule:
    """Equally spaced rule on [0, period), exact for trig degree < npoints."""
    if npoints < 1:
        raise ValueError("npoints must be >= 1")
    nodes = period * np.arange(npoints) / npoints
    return QuadratureRule(nodes, np.full(npoints, period / npoints), (0.0, float(period)))
