"""Single-mode states in phase space.

Phase-invariant states are carried as :class:`RadialWigner` objects,
``W(r) = exp(-r**2) / pi * sum_k c_k r**(2k)``, with exact rational
coefficients whenever they come from a Fock mixture. Everything else
(Gaussian mixtures, sampled grids) lives on a :class:`GridWigner`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .errors import DomainError, RepresentationError, SamplingBudgetError
from .special import (
    Polynomial,
    count_positive_roots,
    fock_wavefunction,
    odd_multiplicity_part,
)

__all__ = [
    "FockMixture",
    "RadialWigner",
    "GaussianComponent",
    "GridWigner",
    "ExtremalState",
    "wigner_of_mixture",
    "vacuum_wigner",
    "extremal_wigner",
    "ellipse_mixture",
    "is_wigner_positive",
    "boundary_distance",
    "restricted_region_membership",
    "gaussian_mixture_wigner",
    "radial_wigner_grid",
    "marginal_x",
    "marginal_p",
    "overlap",
    "sample_positive_fock_mixture",
    "sample_gaussian_mixture",
    "grid_tail_bound",
]

PROB_TOL = 1e-12


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    # shortest decimal repr, so 0.4 means 2/5 rather than its binary neighbour
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class FockMixture:
    """Diagonal state sum_n p_n |n><n|.

    Probabilities are stored as exact fractions. Inputs summing to one
    within ``PROB_TOL`` are renormalized exactly.
    """

    probs: tuple

    def __post_init__(self):
        ps = tuple(_to_fraction(p) for p in self.probs)
        if not ps:
            raise DomainError("empty probability vector")
        if any(p < 0 for p in ps):
            raise DomainError(f"negative probability in {[float(p) for p in ps]}")
        total = sum(ps)
        if abs(float(total) - 1.0) > PROB_TOL:
            raise DomainError(f"probabilities sum to {float(total)!r}, not 1")
        if total != 1:
            ps = tuple(p / total for p in ps)
        object.__setattr__(self, "probs", ps)

    @property
    def nmax(self) -> int:
        return len(self.probs) - 1

    def as_floats(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def mix(self, other: "FockMixture", lam) -> "FockMixture":
        lam = _to_fraction(lam)
        n = max(len(self.probs), len(other.probs))
        a = self.probs + (Fraction(0),) * (n - len(self.probs))
        b = other.probs + (Fraction(0),) * (n - len(other.probs))
        return FockMixture(tuple(lam * x + (1 - lam) * y for x, y in zip(a, b)))


@dataclass(frozen=True)
class RadialWigner:
    """``W(r) = exp(-r**2)/pi * sum_k coeffs[k] * r**(2k)``.

    ``coeffs`` may hold exact fractions or floats; :attr:`exact` tells which.
    """

    coeffs: tuple
    label: str = field(default="", compare=False)

    def __post_init__(self):
        cs = tuple(self.coeffs)
        if not cs:
            raise DomainError("RadialWigner needs at least one coefficient")
        object.__setattr__(self, "coeffs", cs)
        norm = self.normalization()
        if abs(float(norm) - 1.0) > PROB_TOL:
            raise DomainError(f"coefficients not normalized: sum c_k k! = {float(norm)!r}")

    @property
    def exact(self) -> bool:
        return all(isinstance(c, (Fraction, int)) for c in self.coeffs)

    def normalization(self):
        """``sum_k c_k k!``, which equals the phase-space integral of W."""
        return sum(c * math.factorial(k) for k, c in enumerate(self.coeffs))

    def u_polynomial(self) -> Polynomial:
        """Exact polynomial ``sum_k c_k u**k`` (floats converted bit-exactly)."""
        return Polynomial(Fraction(c) for c in self.coeffs)

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def __call__(self, r2):
        """Evaluate at squared radius ``r2``."""
        r2 = np.asarray(r2, dtype=float)
        acc = np.zeros_like(r2)
        for c in self.float_coeffs()[::-1]:
            acc = acc * r2 + c
        val = acc * np.exp(-r2) / math.pi
        return val if val.ndim else float(val)


def _laguerre_coeffs(n: int) -> list[Fraction]:
    # (-1)^n L_n(2u) expanded in u
    return [
        Fraction((-1) ** (n + k) * comb(n, k) * 2**k, math.factorial(k))
        for k in range(n + 1)
    ]


def wigner_of_mixture(m: FockMixture) -> RadialWigner:
    """Radial Wigner function of a Fock mixture, exact coefficients."""
    coeffs = [Fraction(0)] * len(m.probs)
    for n, p in enumerate(m.probs):
        if p == 0:
            continue
        for k, c in enumerate(_laguerre_coeffs(n)):
            coeffs[k] += p * c
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return RadialWigner(tuple(coeffs))


def vacuum_wigner() -> RadialWigner:
    return RadialWigner((Fraction(1),), label="vacuum")


@dataclass(frozen=True)
class ExtremalState:
    """One of the extremal points A-D of the two-photon positive set, or a
    point ``Ellipse(t)`` on the elliptic arc joining C (t=1) and D (t=0)."""

    tag: str
    t: float | None = None

    def __post_init__(self):
        tag = self.tag.upper() if self.tag.lower() != "ellipse" else "Ellipse"
        object.__setattr__(self, "tag", tag)
        if tag not in ("A", "B", "C", "D", "Ellipse"):
            raise DomainError(f"unknown extremal state {self.tag!r}")
        if tag == "Ellipse":
            if self.t is None or not 0.0 <= float(self.t) <= 1.0:
                raise DomainError(f"ellipse parameter must lie in [0, 1], got {self.t}")

    @classmethod
    def ellipse(cls, t: float) -> "ExtremalState":
        return cls("Ellipse", t)


_EXTREMAL = {
    "A": (Fraction(1),),
    "B": (Fraction(0), Fraction(1)),
    "C": (Fraction(1), Fraction(-2), Fraction(1)),
    "D": (Fraction(0), Fraction(0), Fraction(1, 2)),
}


def _ellipse_coeffs(t: float) -> tuple:
    t = float(t)
    if t == 0.0:
        return _EXTREMAL["D"]
    if t == 1.0:
        return _EXTREMAL["C"]
    k = (t + 1.0) / 2.0
    a = 1.0 - math.sqrt((1.0 - t) / (1.0 + t))
    c2, c1, c0 = k, -2.0 * k * a, k * a * a
    # keep the rounded quadratic's discriminant <= 0 so it stays exactly non-negative
    while Fraction(c1) ** 2 > 4 * Fraction(c0) * Fraction(c2):
        c0 = math.nextafter(c0, math.inf)
    return (c0, c1, c2)


def extremal_wigner(e: ExtremalState) -> RadialWigner:
    if e.tag == "Ellipse":
        return RadialWigner(_ellipse_coeffs(e.t), label=f"V_{float(e.t):g}")
    return RadialWigner(_EXTREMAL[e.tag], label=f"W_{e.tag.lower()}")


def ellipse_mixture(t: float) -> tuple[float, float]:
    """Photon probabilities ``(p1, p2)`` of the ellipse state with parameter t."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"ellipse parameter must lie in [0, 1], got {t}")
    return math.sqrt(1.0 - t * t) / 2.0, (1.0 + t) / 4.0


def _is_nonnegative_on_halfline(p: Polynomial) -> bool:
    if p.is_zero():
        return True
    if p.degree == 0:
        return p.coeffs[0] > 0
    if p.coeffs[-1] < 0:
        return False
    return count_positive_roots(odd_multiplicity_part(p)) == 0


def is_wigner_positive(w: RadialWigner) -> bool:
    """Exact decision of ``W >= 0`` everywhere.

    Equivalent to the u-polynomial having a positive leading coefficient and
    no root of odd multiplicity on (0, inf); decided with Sturm sequences in
    rational arithmetic.
    """
    return _is_nonnegative_on_halfline(w.u_polynomial())


def boundary_distance(w: RadialWigner) -> float:
    """Signed minimum of the u-polynomial over u >= 0 (float)."""
    c = w.float_coeffs()
    poly = np.polynomial.Polynomial(c)
    cands = [0.0]
    if len(c) > 2:
        for r in poly.deriv().roots():
            if abs(r.imag) < 1e-12 and r.real > 0:
                cands.append(float(r.real))
    if c[-1] < 0 and len(c) > 1:
        return -math.inf
    return float(min(poly(np.array(cands))))


def restricted_region_membership(p1, p2) -> bool:
    """Whether ``(1-p1-p2)|0><0| + p1|1><1| + p2|2><2|`` is Wigner-positive."""
    p1, p2 = _to_fraction(p1), _to_fraction(p2)
    if p1 < 0 or p2 < 0 or p1 + p2 > 1:
        raise DomainError(f"(p1, p2) = ({float(p1)}, {float(p2)}) outside the simplex")
    return is_wigner_positive(wigner_of_mixture(FockMixture((1 - p1 - p2, p1, p2))))


# -- Gaussian states and grids ----------------------------------------------


@dataclass(frozen=True, eq=False)
class GaussianComponent:
    """Weighted Gaussian pure state: normal density with det(cov) = 1/4."""

    weight: float
    mean: tuple
    cov: tuple

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        if self.weight < 0:
            raise DomainError("component weight must be non-negative")
        if not np.allclose(cov, cov.T, atol=1e-14):
            raise DomainError("covariance must be symmetric")
        if cov[0, 0] <= 0 or np.linalg.det(cov) <= 0:
            raise DomainError("covariance must be positive definite")
        det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
        if abs(det - 0.25) > 1e-10:
            raise DomainError(f"det(cov) = {det!r}; a pure Gaussian state needs 1/4")
        object.__setattr__(self, "mean", tuple(mean))
        object.__setattr__(self, "cov", tuple(map(tuple, cov)))

    @property
    def mean_array(self) -> np.ndarray:
        return np.array(self.mean)

    @property
    def cov_array(self) -> np.ndarray:
        return np.array(self.cov)

    def density(self, x, p):
        cov = self.cov_array
        inv = np.linalg.inv(cov)
        dx = np.asarray(x) - self.mean[0]
        dp = np.asarray(p) - self.mean[1]
        q = inv[0, 0] * dx * dx + 2 * inv[0, 1] * dx * dp + inv[1, 1] * dp * dp
        return np.exp(-0.5 * q) / (2 * math.pi * math.sqrt(np.linalg.det(cov)))


@dataclass(frozen=True, eq=False)
class GridWigner:
    """Non-negative Wigner function sampled at the centres of an M x M grid
    covering ``[-extent, extent]**2``. ``values[i, j]`` sits at
    ``(x_i, p_j)``."""

    extent: float
    resolution: int
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.resolution, self.resolution):
            raise RepresentationError(
                f"values shape {v.shape} does not match resolution {self.resolution}"
            )
        if np.any(v < 0):
            raise DomainError("grid Wigner function takes negative values")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        mass = self.mass()
        if abs(mass - 1.0) > 1e-6:
            raise DomainError(f"grid mass {mass!r} differs from 1 by more than 1e-6")

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.resolution

    @property
    def cell_area(self) -> float:
        return self.spacing**2

    @property
    def axis(self) -> np.ndarray:
        h = self.spacing
        return -self.extent + h * (np.arange(self.resolution) + 0.5)

    def mass(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def marginal_x(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.spacing

    def marginal_p(self) -> np.ndarray:
        return self.values.sum(axis=0) * self.spacing


def _mesh(extent: float, M: int):
    h = 2.0 * extent / M
    ax = -extent + h * (np.arange(M) + 0.5)
    return np.meshgrid(ax, ax, indexing="ij")


def gaussian_mixture_wigner(
    components: Sequence[GaussianComponent], L: float = 8.0, M: int = 512, label: str = ""
) -> GridWigner:
    """Sample a mixture of Gaussian pure states on the default grid."""
    if not components:
        raise DomainError("need at least one component")
    total = sum(c.weight for c in components)
    if abs(total - 1.0) > PROB_TOL:
        raise DomainError(f"component weights sum to {total!r}")
    X, P = _mesh(L, M)
    vals = np.zeros_like(X)
    for c in components:
        vals += c.weight * c.density(X, P)
    return GridWigner(L, M, vals, label=label)


def radial_wigner_grid(w: RadialWigner, L: float = 8.0, M: int = 512) -> GridWigner:
    """Sample a phase-invariant Wigner function on a square grid."""
    if not is_wigner_positive(w):
        raise DomainError("grid sampling requires a Wigner-positive state")
    X, P = _mesh(L, M)
    vals = np.maximum(w(X * X + P * P), 0.0)
    return GridWigner(L, M, vals, label=w.label)


def grid_tail_bound(components: Sequence[GaussianComponent], L: float) -> float:
    """Upper bound on the mixture mass falling outside ``[-L, L]**2``."""
    bound = 0.0
    for c in components:
        cov = c.cov_array
        for axis in range(2):
            sd = math.sqrt(cov[axis, axis])
            mu = c.mean[axis]
            tail = 0.5 * (erfc((L - mu) / (sd * math.sqrt(2))) + erfc((L + mu) / (sd * math.sqrt(2))))
            bound += c.weight * tail
    return bound


# -- marginals and overlaps -------------------------------------------------


def _is_components(state) -> bool:
    return isinstance(state, (list, tuple)) and state and isinstance(state[0], GaussianComponent)


def _gauss_marginal(components, x, axis: int):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for c in components:
        var = c.cov[axis][axis]
        out += c.weight * np.exp(-((x - c.mean[axis]) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
    return out


def marginal_x(state, x):
    """Position distribution ``rho_x(x)`` of a Fock mixture or Gaussian mixture."""
    if _is_components(state):
        val = _gauss_marginal(state, x, 0)
    else:
        x = np.asarray(x, dtype=float)
        val = np.zeros_like(x)
        for n, p in enumerate(state.probs):
            if p:
                val = val + float(p) * fock_wavefunction(n, x) ** 2
    return val if np.ndim(val) else float(val)


def marginal_p(state, p):
    """Momentum distribution; identical in form to :func:`marginal_x` for
    phase-invariant states."""
    if _is_components(state):
        val = _gauss_marginal(state, p, 1)
        return val if np.ndim(val) else float(val)
    return marginal_x(state, p)


def overlap(w1, w2) -> float:
    """Phase-space integral of ``W1 * W2``.

    Radial inputs use the closed form ``(1/pi) sum_k d_k k! / 2**(k+1)`` with
    ``d`` the product of the u-polynomials. Grid inputs must share extent and
    resolution.
    """
    if isinstance(w1, RadialWigner) and isinstance(w2, RadialWigner):
        d = w1.u_polynomial() * w2.u_polynomial()
        total = sum(c * math.factorial(k) / Fraction(2) ** (k + 1) for k, c in enumerate(d.coeffs))
        return float(total) / math.pi
    if isinstance(w1, GridWigner) and isinstance(w2, GridWigner):
        if w1.resolution != w2.resolution or w1.extent != w2.extent:
            raise RepresentationError("grids differ in extent or resolution")
        return float(np.sum(w1.values * w2.values) * w1.cell_area)
    raise RepresentationError(
        f"cannot overlap {type(w1).__name__} with {type(w2).__name__}"
    )


# -- seeded samplers --------------------------------------------------------


def _fast_reject(probs: np.ndarray) -> bool:
    """Cheap float screen: True when the mixture is clearly Wigner-negative."""
    coeffs = np.zeros(len(probs))
    for n, p in enumerate(probs):
        if p:
            coeffs[: n + 1] += p * np.array([float(c) for c in _laguerre_coeffs(n)])
    u = _SCREEN_U
    vals = np.polynomial.polynomial.polyval(u, coeffs)
    return bool(vals.min() < -1e-9)


_SCREEN_U = np.linspace(0.0, 12.0, 241)


def sample_positive_fock_mixture(nmax: int, seed: int, budget: int = 10**6) -> FockMixture:
    """Flat-simplex draw over |0>..|nmax>, rejected until Wigner-positive.

    Deterministic for a fixed seed. Raises :class:`SamplingBudgetError` after
    ``budget`` rejections.
    """
    if nmax < 1:
        raise DomainError("nmax must be at least 1")
    rng = np.random.default_rng(seed)
    alpha = np.ones(nmax + 1)
    for _ in range(budget):
        x = rng.dirichlet(alpha)
        if _fast_reject(x):
            continue
        fr = [Fraction(float(v)) for v in x]
        total = sum(fr)
        m = FockMixture(tuple(v / total for v in fr))
        if is_wigner_positive(wigner_of_mixture(m)):
            return m
    raise SamplingBudgetError(f"no Wigner-positive mixture after {budget} draws (nmax={nmax})")


def sample_gaussian_mixture(
    k: int,
    seed: int,
    bounds: tuple[float, float] = (-1.0, 1.0),
    squeeze_range: tuple[float, float] = (0.5, 2.0),
    grid_extent: float = 8.0,
) -> list[GaussianComponent]:
    """Random mixture of ``k`` Gaussian pure states.

    Means are uniform in ``bounds`` on both axes, squeezing factors
    log-uniform in ``squeeze_range`` (variance ratio along the principal
    axes), rotation angles uniform and weights flat-Dirichlet.
    """
    if k < 1:
        raise DomainError("need at least one component")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(k)) if k > 1 else np.ones(1)
    comps = []
    lo, hi = math.log(squeeze_range[0]), math.log(squeeze_range[1])
    for j in range(k):
        mean = rng.uniform(bounds[0], bounds[1], size=2)
        s = math.exp(rng.uniform(lo, hi))
        theta = rng.uniform(0.0, math.pi)
        rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
        cov = rot @ np.diag([s / 2.0, 1.0 / (2.0 * s)]) @ rot.T
        cov = 0.5 * (cov + cov.T)
        comps.append(GaussianComponent(float(weights[j]), tuple(mean), tuple(map(tuple, cov))))
    # exact weight renormalization guards the 1e-12 sum check
    wsum = math.fsum(c.weight for c in comps)
    comps = [GaussianComponent(c.weight / wsum, c.mean, c.cov) for c in comps]
    tail = grid_tail_bound(comps, grid_extent)
    if tail > 1e-10:
        raise DomainError(f"sampled mixture leaks {tail:.2e} mass outside the default grid")
    return comps
