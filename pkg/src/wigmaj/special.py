"""Exact-coefficient orthogonal polynomials and Fock-state evaluators.

Coefficients are kept as :class:`fractions.Fraction` so that identities such
as normalization sums hold exactly; numerical evaluation goes through a
cached float copy with Horner's scheme.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError

__all__ = [
    "DEGREE_CAP",
    "Polynomial",
    "factorial",
    "hermite",
    "laguerre",
    "fock_wavefunction",
    "fock_wigner",
]

DEGREE_CAP = 64


def _check_cap(n: int) -> None:
    if n < 0:
        raise ValueError(f"index must be non-negative, got {n}")
    if n > DEGREE_CAP:
        raise CapacityError(f"degree {n} exceeds cap {DEGREE_CAP}")


def factorial(n: int) -> int:
    """Exact n! for 0 <= n <= DEGREE_CAP."""
    _check_cap(n)
    return math.factorial(n)


class Polynomial:
    """Univariate polynomial with exact rational coefficients.

    ``coeffs[k]`` multiplies ``x**k``. Trailing zeros are stripped, so the
    zero polynomial has an empty coefficient tuple and degree 0.
    """

    __slots__ = ("coeffs", "_float")

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._float = np.array([float(c) for c in cs], dtype=float)

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        """Evaluate in double precision (scalar or array) via Horner."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in self._float[::-1]:
            out = out * x + c
        return out if out.ndim else float(out)

    def exact(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def as_floats(self) -> np.ndarray:
        return self._float.copy()

    def derivative(self) -> "Polynomial":
        return Polynomial(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def __add__(self, other):
        other = other if isinstance(other, Polynomial) else Polynomial([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -Fraction(other))

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            other = Fraction(other)
            return Polynomial(c * other for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]})"


_X = Polynomial([0, 1])


@lru_cache(maxsize=None)
def hermite(n: int) -> Polynomial:
    """Physicists' Hermite polynomial H_n from the three-term recurrence."""
    _check_cap(n)
    if n == 0:
        return Polynomial([1])
    if n == 1:
        return Polynomial([0, 2])
    return 2 * _X * hermite(n - 1) - 2 * (n - 1) * hermite(n - 2)


@lru_cache(maxsize=None)
def laguerre(n: int) -> Polynomial:
    """Laguerre polynomial L_n, normalized by L_n(0) = 1."""
    _check_cap(n)
    if n == 0:
        return Polynomial([1])
    if n == 1:
        return Polynomial([1, -1])
    k = n - 1
    # (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}
    num = Polynomial([2 * k + 1, -1]) * laguerre(k) - k * laguerre(k - 1)
    return num * Fraction(1, k + 1)


@lru_cache(maxsize=None)
def _wave_norm(n: int) -> float:
    return math.pi ** -0.25 / math.sqrt(2.0**n * math.factorial(n))


def fock_wavefunction(n: int, x):
    """Position-space wave function psi_n(x) of the Fock state |n>."""
    _check_cap(n)
    x = np.asarray(x, dtype=float)
    val = _wave_norm(n) * hermite(n)(x) * np.exp(-0.5 * x * x)
    return val if np.ndim(val) else float(val)


def fock_wigner(n: int, r2):
    """Wigner function of |n> at squared phase-space radius ``r2 = x**2 + p**2``."""
    _check_cap(n)
    r2 = np.asarray(r2, dtype=float)
    if np.any(r2 < 0):
        raise ValueError("r2 must be non-negative")
    sign = -1.0 if n % 2 else 1.0
    val = sign / math.pi * laguerre(n)(2.0 * r2) * np.exp(-r2)
    return val if np.ndim(val) else float(val)


def poly_from_floats(coeffs: Sequence[float]) -> Polynomial:
    """Exact polynomial whose coefficients equal the given binary floats."""
    return Polynomial(Fraction(float(c)) for c in coeffs)


# -- exact polynomial algebra over Q -----------------------------------------


def poly_divmod(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a.coeffs)
    db = len(b.coeffs) - 1
    lead = b.coeffs[-1]
    quot = [Fraction(0)] * max(len(rem) - db, 1)
    while len(rem) - 1 >= db and rem:
        shift = len(rem) - 1 - db
        q = rem[-1] / lead
        quot[shift] = q
        for i, c in enumerate(b.coeffs):
            rem[shift + i] -= q * c
        rem.pop()
        while rem and rem[-1] == 0:
            rem.pop()
    return Polynomial(quot), Polynomial(rem)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor."""
    while not b.is_zero():
        a, b = b, poly_divmod(a, b)[1]
    if a.is_zero():
        return a
    return a * (1 / a.coeffs[-1])


def odd_multiplicity_part(p: Polynomial) -> Polynomial:
    """Product of the square-free factors of ``p`` with odd multiplicity (Yun)."""
    if p.degree == 0:
        return Polynomial([1])
    dp = p.derivative()
    a0 = poly_gcd(p, dp)
    b = poly_divmod(p, a0)[0]
    c = poly_divmod(dp, a0)[0]
    d = c - b.derivative()
    out = Polynomial([1])
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if i % 2 == 1:
            out = out * a
        b = poly_divmod(b, a)[0]
        c = poly_divmod(d, a)[0]
        d = c - b.derivative()
        i += 1
    return out


def sturm_sequence(p: Polynomial) -> list[Polynomial]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-poly_divmod(seq[-2], seq[-1])[1])
    return seq[:-1]


def _variations(signs: Sequence[int]) -> int:
    s = [v for v in signs if v != 0]
    return sum(1 for x, y in zip(s, s[1:]) if x != y)


def count_positive_roots(p: Polynomial) -> int:
    """Number of distinct real roots of ``p`` in the open half-line (0, inf)."""
    if p.degree == 0:
        return 0
    # strip roots at the origin so the Sturm count at 0 is well defined
    cs = list(p.coeffs)
    while cs and cs[0] == 0:
        cs.pop(0)
    p = Polynomial(cs)
    if p.degree == 0:
        return 0
    seq = sturm_sequence(p)
    at_zero = [(s.coeffs[0] > 0) - (s.coeffs[0] < 0) if s.coeffs else 0 for s in seq]
    at_inf = [(s.coeffs[-1] > 0) - (s.coeffs[-1] < 0) for s in seq]
    return _variations(at_zero) - _variations(at_inf)
