"""Continuous majorization comparators.

``f`` majorizes ``g`` when both carry the same mass and the cumulative
integral of ``f`` dominates that of ``g`` everywhere. :func:`compare` checks
this directly, :func:`compare_plus` through the equivalent plus-functional
criterion ``int [f - t]_+ >= int [g - t]_+`` for all levels ``t``, and
:func:`discrete_oracle` through ordinary vector majorization of binned
samples, which gives an independent cross-check.

Profiles are compared in the reduced half-line variable. Two-dimensional
inputs (radial Wigner functions and grids) are reduced first, and their
witnesses are reported back as phase-space areas.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad, quad_vec

from .errors import CertificationError, ContractError, NormalizationError, RepresentationError
from .rearrangement import ClosedForm, ReducedProfile, Sampled, as_profile, default_levels, shift_profile
from .states import GridWigner, RadialWigner

__all__ = [
    "Outcome",
    "MajorizationVerdict",
    "Certificate",
    "ShiftFamily",
    "CLOSED_FORM_TOL",
    "GRID_TOL",
    "compare",
    "compare_plus",
    "convex_mixture_check",
    "certify_kernel_mixture",
    "certify_split_compare",
    "discrete_oracle",
    "default_tolerance",
    "mix_profiles",
]

CLOSED_FORM_TOL = 1e-7
GRID_TOL = 5e-4  # relative to total mass
ORACLE_TOL = 1e-4


class Outcome(str, enum.Enum):
    MAJORIZES = "Majorizes"
    MAJORIZED_BY = "MajorizedBy"
    EQUIVALENT = "Equivalent"
    INCOMPARABLE = "Incomparable"

    def swapped(self) -> "Outcome":
        return {
            Outcome.MAJORIZES: Outcome.MAJORIZED_BY,
            Outcome.MAJORIZED_BY: Outcome.MAJORIZES,
        }.get(self, self)


@dataclass(frozen=True)
class MajorizationVerdict:
    """Result of comparing ``f`` against ``g``.

    Attributes
    ----------
    outcome : Outcome
    witnesses : tuple of float
        Abscissas certifying the outcome: where ``f`` is strictly ahead for
        Majorizes, strictly behind for MajorizedBy, one of each (behind
        first) for Incomparable. Empty for Equivalent.
    margin : float
        Smallest signed gap ``F - G`` over the test grid.
    max_gap : float
        Largest signed gap.
    tol : float
        Gaps within ``[-tol, tol]`` count as equality.
    criterion : str
        ``"cumulative"`` (abscissa is a size), ``"plus"`` (abscissa is a
        level) or ``"discrete"``.
    units : str
        ``"length"`` for half-line profiles, ``"area"`` for phase space.
    """

    outcome: Outcome
    witnesses: tuple
    margin: float
    max_gap: float
    tol: float
    criterion: str = "cumulative"
    units: str = "length"

    @property
    def holds(self) -> bool:
        """True when ``f`` majorizes ``g`` (strictly or by equivalence)."""
        return self.outcome in (Outcome.MAJORIZES, Outcome.EQUIVALENT)

    def swapped(self) -> "MajorizationVerdict":
        w = self.witnesses
        if self.outcome is Outcome.INCOMPARABLE:
            w = (w[1], w[0])
        return MajorizationVerdict(
            self.outcome.swapped(), w, -self.max_gap, -self.margin, self.tol, self.criterion, self.units
        )

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "witnesses": [float(v) for v in self.witnesses],
            "margin": float(self.margin),
            "max_gap": float(self.max_gap),
            "tol": float(self.tol),
            "criterion": self.criterion,
            "units": self.units,
        }


@dataclass(frozen=True)
class Certificate:
    """Outcome of a certification routine; truthy when it succeeded."""

    ok: bool
    residual: float
    verdict: MajorizationVerdict | None = None
    detail: str = ""
    parts: tuple = field(default=())

    def __bool__(self):
        return bool(self.ok)


def _is_2d(x) -> bool:
    return isinstance(x, (RadialWigner, GridWigner))


def default_tolerance(*profiles) -> float:
    """1e-7 when every operand is closed form, otherwise 5e-4 of the mass."""
    ps = [as_profile(p) for p in profiles]
    if all(p.closed_form for p in ps):
        return CLOSED_FORM_TOL
    mass = max(p.total_mass() for p in ps)
    return GRID_TOL * max(mass, 1e-300)


def _check_mass(pf: ReducedProfile, pg: ReducedProfile, tol: float):
    mf, mg = pf.total_mass(), pg.total_mass()
    if abs(mf - mg) > tol:
        raise NormalizationError(f"total masses differ: {mf!r} vs {mg!r} (tol {tol:g})")
    return mf, mg


def _verdict(x, gap, tol, criterion, units) -> MajorizationVerdict:
    gap = np.asarray(gap, dtype=float)
    x = np.asarray(x, dtype=float)
    if not len(gap):
        return MajorizationVerdict(Outcome.EQUIVALENT, (), 0.0, 0.0, tol, criterion, units)
    i_lo, i_hi = int(np.argmin(gap)), int(np.argmax(gap))
    lo, hi = float(gap[i_lo]), float(gap[i_hi])
    behind, ahead = lo < -tol, hi > tol
    if behind and ahead:
        out, wit = Outcome.INCOMPARABLE, (float(x[i_lo]), float(x[i_hi]))
    elif behind:
        out, wit = Outcome.MAJORIZED_BY, (float(x[i_lo]),)
    elif ahead:
        out, wit = Outcome.MAJORIZES, (float(x[i_hi]),)
    else:
        out, wit = Outcome.EQUIVALENT, ()
    return MajorizationVerdict(out, wit, lo, hi, tol, criterion, units)


def _sgrid(pf: ReducedProfile, pg: ReducedProfile, n: int = 400) -> np.ndarray:
    ext = max(pf.effective_extent(1e-17), pg.effective_extent(1e-17))
    if not math.isfinite(ext) or ext <= 0:
        ext = max(min(pf.support_measure(), 1e3), min(pg.support_measure(), 1e3), 1.0)
    parts = [np.geomspace(ext * 1e-7, ext, n), np.linspace(0.0, ext, n)]
    for p in (pf, pg):
        cm = p.critical_measures()
        parts.append(cm[(cm >= 0) & (cm <= ext)])
    s = np.unique(np.concatenate(parts))
    return s


def compare(f, g, tol: float | None = None, sgrid=None) -> MajorizationVerdict:
    """Decide whether ``f`` majorizes ``g`` from their cumulative integrals.

    Parameters
    ----------
    f, g : ReducedProfile, RadialWigner or GridWigner
    tol : float, optional
        Equality threshold for gaps and for the mass check. Defaults to
        :func:`default_tolerance`.
    sgrid : array_like, optional
        Sizes to test, in the reduced variable. The default merges a
        geometric and a linear grid with both profiles' critical measures.

    Raises
    ------
    NormalizationError
        If the total masses differ by more than ``tol``.
    """
    pf, pg = as_profile(f), as_profile(g)
    if tol is None:
        tol = default_tolerance(pf, pg)
    units = "area" if (_is_2d(f) or _is_2d(g)) else "length"
    mf, mg = _check_mass(pf, pg, tol)
    if mf == 0 and mg == 0:
        return MajorizationVerdict(Outcome.EQUIVALENT, (), 0.0, 0.0, tol, "cumulative", units)
    s = _sgrid(pf, pg) if sgrid is None else np.unique(np.asarray(sgrid, dtype=float))
    gap = pf.cumulative(s) - pg.cumulative(s)
    xs = s * math.pi if units == "area" else s
    return _verdict(xs, gap, tol, "cumulative", units)


def _tgrid(pf: ReducedProfile, pg: ReducedProfile) -> np.ndarray:
    lv = [np.array([0.0])]
    for p in (pf, pg):
        if p.max_value() > 0:
            lv.append(default_levels(p, depth=1e-12))
    return np.unique(np.concatenate(lv))


def compare_plus(f, g, tgrid=None, tol: float | None = None) -> MajorizationVerdict:
    """Decide majorization from ``int [f - t]_+`` over a grid of levels.

    ``tgrid`` is in the units of the inputs: Wigner-function values for
    two-dimensional inputs, profile values otherwise. Witnesses are levels
    in those same units.
    """
    pf, pg = as_profile(f), as_profile(g)
    if tol is None:
        tol = default_tolerance(pf, pg)
    two_d = _is_2d(f) or _is_2d(g)
    units = "area" if two_d else "length"
    mf, mg = _check_mass(pf, pg, tol)
    if mf == 0 and mg == 0:
        return MajorizationVerdict(Outcome.EQUIVALENT, (), 0.0, 0.0, tol, "plus", units)
    if tgrid is None:
        t = _tgrid(pf, pg)
    else:
        t = np.unique(np.asarray(tgrid, dtype=float))
        if two_d:
            t = t * math.pi
    gap = pf.plus_integral(t) - pg.plus_integral(t)
    ts = t / math.pi if two_d else t
    return _verdict(ts, gap, tol, "plus", units)


def mix_profiles(g1, g2, lam: float):
    """``lam * g1 + (1 - lam) * g2`` for like-typed operands."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ContractError(f"mixing weight must lie in [0, 1], got {lam}")
    if isinstance(g1, RadialWigner) and isinstance(g2, RadialWigner):
        n = max(len(g1.coeffs), len(g2.coeffs))
        a = list(g1.coeffs) + [0] * (n - len(g1.coeffs))
        b = list(g2.coeffs) + [0] * (n - len(g2.coeffs))
        if g1.exact and g2.exact:
            from fractions import Fraction

            fl = Fraction(repr(lam))
            return RadialWigner(tuple(fl * x + (1 - fl) * y for x, y in zip(a, b)))
        return RadialWigner(tuple(lam * float(x) + (1 - lam) * float(y) for x, y in zip(a, b)))
    if isinstance(g1, GridWigner) and isinstance(g2, GridWigner):
        if g1.values.shape != g2.values.shape or g1.extent != g2.extent:
            raise RepresentationError("grids must share extent and resolution")
        return GridWigner(g1.extent, g1.resolution, lam * g1.values + (1 - lam) * g2.values)
    if isinstance(g1, ClosedForm) and isinstance(g2, ClosedForm):
        if lam == 1.0:
            return g1
        if lam == 0.0:
            return g2
        return g1.scale(lam) + g2.scale(1.0 - lam)
    raise RepresentationError(f"cannot mix {type(g1).__name__} with {type(g2).__name__}")


def convex_mixture_check(f, g1, g2, lam: float, tol: float | None = None) -> bool:
    """Check that ``f`` majorizes ``lam * g1 + (1 - lam) * g2``.

    Raises
    ------
    ContractError
        If ``f`` does not majorize both ``g1`` and ``g2`` to begin with.
    """
    for name, g in (("g1", g1), ("g2", g2)):
        if not compare(f, g, tol).holds:
            raise ContractError(f"precondition: f must majorize {name}")
    return compare(f, mix_profiles(g1, g2, lam), tol).holds


class ShiftFamily:
    """Translates ``f^(alpha)(x) = f(x - alpha)`` of a closed-form profile."""

    def __init__(self, base: ClosedForm):
        self.base = base

    def __call__(self, alpha: float) -> ClosedForm:
        return shift_profile(self.base, alpha)

    def value(self, alpha, x):
        y = np.asarray(x, dtype=float) - alpha
        return np.where(y >= 0, self.base(np.maximum(y, 0.0)), 0.0)

    def breakpoints(self, x: float) -> list[float]:
        """Values of alpha where ``alpha -> f^(alpha)(x)`` may kink."""
        return [x - p.lo for p in self.base.pieces if x - p.lo > 0] + [
            x - p.hi for p in self.base.pieces if math.isfinite(p.hi) and x - p.hi > 0
        ]


def _kernel_integral(k: Callable, lo: float, hi: float, points=()) -> float:
    pts = sorted({lo, hi, *[p for p in points if lo < p < hi]})
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        total += quad(k, a, b, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    return total


def _kernel_mixture(kern, value, xs, pts) -> np.ndarray:
    """``int_0^inf k(a) value(a, xs) da`` for all ``xs`` at once."""
    inner = [p for p in pts if p > 0]
    fn = lambda al: kern(al) * value(al, xs)
    kw = dict(epsabs=1e-15, epsrel=1e-13, limit=20000)
    total = np.zeros_like(xs)
    if inner:
        total += quad_vec(fn, 0.0, inner[-1], points=inner[:-1], **kw)[0]
    total += quad_vec(fn, inner[-1] if inner else 0.0, math.inf, **kw)[0]
    return total


def certify_kernel_mixture(
    kernel: Callable,
    family,
    target,
    xgrid=None,
    alpha_grid=(0.0, 0.5, 1.0, 2.0, 5.0),
    kernel_breaks: Sequence[float] = (),
    recon_tol: float = 1e-8,
    tol: float | None = None,
) -> Certificate:
    """Certify ``f ≻ g`` when ``g`` is a kernel mixture of profiles
    level-equivalent to ``f = family(0)``.

    Checks that ``kernel`` is a probability density on ``[0, inf)``, that the
    family members are level-equivalent to ``f`` on ``alpha_grid``, and that
    ``g(x) = int k(alpha) f^(alpha)(x) dalpha`` on ``xgrid``. The verdict is
    then ``compare(f, g)``.

    Raises
    ------
    ContractError
        If the kernel is not normalized or a family member is not
        level-equivalent to ``f``.
    CertificationError
        If the reconstruction misses ``target`` by more than ``recon_tol``.
    """
    kern = lambda a: float(kernel(a))
    norm = _kernel_integral(kern, 0.0, math.inf, [1.0, 10.0, *kernel_breaks])
    if abs(norm - 1.0) > 1e-9:
        raise ContractError(f"kernel integrates to {norm!r}, not 1")

    f = family(0.0)
    levels = default_levels(f, n=60, depth=1e-6)
    m0 = f.level_measure(levels)
    for a in alpha_grid:
        ma = family(a).level_measure(levels)
        if np.max(np.abs(ma - m0)) > 1e-9 * (1.0 + np.max(m0)):
            raise ContractError(f"family member at alpha={a} is not level-equivalent")

    if xgrid is None:
        xgrid = np.linspace(0.0, 20.0, 201)
    xgrid = np.asarray(xgrid, dtype=float)
    value = getattr(family, "value", None)
    if value is None:
        value = lambda a, x: family(a)(x)
    breaks = getattr(family, "breakpoints", lambda x: [x])
    pts = {1.0, 10.0, *kernel_breaks}
    for x in xgrid:
        pts.update(b for b in breaks(float(x)) if b > 0)
    recon = _kernel_mixture(kern, value, xgrid, sorted(pts))
    g = as_profile(target)
    err = float(np.max(np.abs(recon - g(xgrid))))
    if err > recon_tol:
        raise CertificationError(f"kernel mixture misses target by {err:.3e}", residual=err)
    v = compare(f, g, tol)
    return Certificate(v.holds, err, v, detail=f"reconstruction error {err:.3e}")


def _overlap(a: ClosedForm, b: ClosedForm) -> float:
    total = 0.0
    for lo1, hi1 in a.support_intervals():
        for lo2, hi2 in b.support_intervals():
            total += max(0.0, min(hi1, hi2) - max(lo1, lo2))
    return total


def certify_split_compare(f1, f2, g1, g2, tol: float | None = None) -> Certificate:
    """Combine ``f1 ≻ g1`` and ``f2 ≻ g2`` into ``f1 + f2 ≻ g1 + g2``.

    Requires ``f1, f2`` to have (essentially) disjoint supports, and
    likewise ``g1, g2``.

    Raises
    ------
    ContractError
        On overlapping supports, or if a part does not majorize its partner.
    NormalizationError
        If paired parts carry different masses.
    """
    for name, (a, b) in (("f", (f1, f2)), ("g", (g1, g2))):
        if not (isinstance(a, ClosedForm) and isinstance(b, ClosedForm)):
            raise RepresentationError("split comparison needs closed-form parts")
        ov = _overlap(a, b)
        if ov > 0:
            raise ContractError(f"{name}-parts overlap on a set of measure {ov:g}")
    t = CLOSED_FORM_TOL if tol is None else tol
    parts = []
    for i, (a, b) in enumerate(((f1, g1), (f2, g2)), start=1):
        ma, mb = a.total_mass(), b.total_mass()
        if abs(ma - mb) > t:
            raise NormalizationError(f"part {i} masses differ: {ma!r} vs {mb!r}")
        v = compare(a, b, t)
        if not v.holds:
            raise ContractError(f"part {i}: f{i} does not majorize g{i} ({v.outcome.value})")
        parts.append(v)
    v = compare(f1 + f2, g1 + g2, t)
    residual = max(0.0, -v.margin)
    return Certificate(v.holds, residual, v, parts=tuple(parts))


def _binned(p: ReducedProfile, X: float, bins: int) -> np.ndarray:
    h = X / bins
    x = (np.arange(bins) + 0.5) * h
    return np.sort(np.asarray(p(x), dtype=float))[::-1] * h


def discrete_oracle(f, g, bins: int = 10_000, tol: float | None = None, extent: float | None = None) -> MajorizationVerdict:
    """Vector majorization of equal-width midpoint samples.

    Both profiles are sampled at the midpoints of ``bins`` cells on
    ``[0, extent]`` (reduced variable), sorted decreasingly, and their
    partial sums compared. Discretization limits the resolution to about
    ``1e-4`` of the mass, which is the default tolerance.
    """
    pf, pg = as_profile(f), as_profile(g)
    if tol is None:
        tol = max(ORACLE_TOL, default_tolerance(pf, pg))
    units = "area" if (_is_2d(f) or _is_2d(g)) else "length"
    if extent is None:
        ends = []
        for p in (pf, pg):
            e = p.effective_extent(1e-17)
            if isinstance(p, Sampled):
                e = max(e, float(p.breaks[-1]))
            ends.append(e)
        extent = max(ends)
    X = float(extent)
    a = np.cumsum(_binned(pf, X, bins))
    b = np.cumsum(_binned(pg, X, bins))
    k = np.arange(1, bins + 1) * (X / bins)
    xs = k * math.pi if units == "area" else k
    return _verdict(xs, a - b, tol, "discrete", units)
