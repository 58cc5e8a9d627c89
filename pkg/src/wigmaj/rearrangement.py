"""Level functions, decreasing rearrangements and cumulative integrals.

Everything here works on one-dimensional profiles on the half-line. A
phase-invariant Wigner function ``W(r)`` is carried over by the substitution
``x = r**2`` and the rescaling ``f(x) = pi * W(sqrt(x))``; this keeps total
mass at one and maps disk area ``A`` to length ``A / pi``, so majorization
between the 2-D functions and between their reduced profiles are the same
statement.

Two concrete profile kinds exist:

* :class:`ClosedForm` -- a sum of pieces ``exp(-(x-lo)) * P(x-lo)`` on
  disjoint intervals ``[lo, hi)``. Level sets are found by root finding on
  monotone segments and masses by exact antiderivatives.
* :class:`Sampled` -- a step function. Grid-sampled Wigner functions become
  one of these after sorting their cell values.

:class:`Rearranged` is the decreasing rearrangement of a closed form; it
shares its source's level structure and evaluates by inverting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, RepresentationError
from .states import GridWigner, RadialWigner, is_wigner_positive

__all__ = [
    "ReducedProfile",
    "ClosedForm",
    "Sampled",
    "Rearranged",
    "LevelFunction",
    "CumulativeIntegral",
    "as_profile",
    "radial_reduce",
    "level_function",
    "decreasing_rearrangement",
    "cumulative_integral",
    "shift_profile",
    "default_levels",
]

LN_FLOOR = -700.0  # ln of the smallest level resolved by closed forms
_TABLE_NODES = 257


def _taylor_shift(c: np.ndarray, d: float) -> np.ndarray:
    """Coefficients of ``P(y + d)`` given those of ``P(y)``."""
    n = len(c)
    out = np.zeros(n)
    for k in range(n):
        if c[k] == 0.0:
            continue
        for j in range(k + 1):
            out[j] += c[k] * comb(k, j) * d ** (k - j)
    return out


def _horner(c, y):
    """``sum c[k] y**k``; cheaper than ``polyval`` for the short arrays used here."""
    y = np.asarray(y, dtype=float)
    if not len(c):
        return np.zeros_like(y)
    out = np.full_like(y, c[-1])
    for a in c[-2::-1]:
        out = out * y + a
    return out


def _antideriv_poly(c: np.ndarray) -> np.ndarray:
    """Q with d/dy[-exp(-y) Q(y)] = exp(-y) P(y), i.e. Q = P + P' + P'' + ..."""
    q = np.zeros(len(c))
    d = np.array(c, dtype=float)
    while len(d):
        q[: len(d)] += d
        d = npoly.polyder(d) if len(d) > 1 else np.array([])
    return q


class _Segment:
    """A maximal interval of one piece on which ``h(y) = exp(-y) P(y)`` is
    monotone. ``y`` is measured from the piece origin ``lo``."""

    def __init__(self, lo, a, b, c, dc, q, increasing):
        self.lo = lo
        self.a = a
        self.b = b
        self.c = c
        self.dc = dc
        self.q = q
        self.cabs = np.abs(c)
        self.inc = increasing
        self.lnh_a = self.lnh(np.array([a]))[0]
        self.lnh_b = -np.inf if math.isinf(b) else self.lnh(np.array([b]))[0]
        if math.isinf(b):
            end = a + 50.0
            while self.lnh(np.array([end]))[0] > LN_FLOOR - 5:
                end = a + 2.0 * (end - a)
            self.b_eff = end
        else:
            self.b_eff = b
        u = np.linspace(0.0, 1.0, _TABLE_NODES)
        ys = a + (self.b_eff - a) * (u**2 if math.isinf(b) else u)
        ls = self.lnh(ys)
        if not self.inc:
            ys, ls = ys[::-1], ls[::-1]
        # enforce monotone table against rounding at flat ends
        self.tab_y = ys
        self.tab_l = np.maximum.accumulate(np.where(np.isfinite(ls), ls, -np.inf))

    @property
    def width(self):
        return self.b - self.a

    def h(self, y):
        return np.exp(-y) * _horner(self.c, y)

    def lnh(self, y):
        p = _horner(self.c, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(p > 0, np.log(np.where(p > 0, p, 1.0)) - y, -np.inf)

    def dlnh(self, y):
        p = _horner(self.c, y)
        dp = _horner(self.dc, y) if len(self.dc) else np.zeros_like(y)
        with np.errstate(divide="ignore", invalid="ignore"):
            return dp / p - 1.0

    def F(self, y):
        """Antiderivative ``-exp(-y) Q(y)`` (zero at infinity)."""
        y = np.asarray(y, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            val = -np.exp(-y) * _horner(self.q, y)
        return np.where(np.isinf(y), 0.0, val)

    def crossing(self, lnt):
        """Solve ``ln h(y) = lnt`` inside the segment (lnt within range)."""
        tab_l, tab_y = self.tab_l, self.tab_y
        idx = np.clip(np.searchsorted(tab_l, lnt), 1, len(tab_l) - 1)
        y0, y1 = tab_y[idx - 1], tab_y[idx]
        l0, l1 = tab_l[idx - 1], tab_l[idx]
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.where(np.isfinite(l0) & (l1 > l0), (lnt - l0) / (l1 - l0), 0.5)
        w = np.clip(np.nan_to_num(w, nan=0.5), 0.0, 1.0)
        y = y0 + w * (y1 - y0)
        # near a root r of P at an endpoint, ln h ~ k ln|y - r|: iterate in
        # v = ln|y - r| where the equation is close to linear
        if self.inc and math.isinf(self.lnh_a):
            r, sv = self.a, 1.0
        elif not self.inc and not math.isinf(self.b) and math.isinf(self.lnh_b):
            r, sv = self.b, -1.0
        else:
            r = None
        if r is None:
            to_y = lambda v: v
            dy_dv = lambda v, y: np.ones_like(v)
            v = y
            lo, hi = np.minimum(y0, y1), np.maximum(y0, y1)
            sgn = 1.0 if self.inc else -1.0
        else:
            to_y = lambda v: r + sv * np.exp(v)
            dy_dv = lambda v, y: y - r
            with np.errstate(divide="ignore"):
                v = np.log(np.abs(y - r))
                v0, v1 = np.log(np.abs(y0 - r)), np.log(np.abs(y1 - r))
            lo, hi = np.minimum(v0, v1), np.maximum(v0, v1)
            lo = np.where(np.isfinite(lo), lo, np.minimum(hi, v) - 800.0)
            v = np.clip(v, lo, hi)
            # h grows with v in both orientations
            sgn = 1.0
        gtol = 1e-15 * np.maximum(1.0, np.abs(lnt))
        act = np.arange(len(v))
        for _ in range(100):
            va, la = v[act], lnt[act]
            ya = to_y(va)
            g = self.lnh(ya) - la
            # rounding noise of ln P is about eps * sum|c_k y^k| / |P|
            with np.errstate(divide="ignore", invalid="ignore"):
                noise = 8e-16 * _horner(self.cabs, np.abs(ya)) / np.abs(_horner(self.c, ya))
            keep = (np.abs(g) > np.maximum(gtol[act], noise)) & (hi[act] - lo[act] > 1e-15 * (1.0 + np.abs(va)))
            act, va, ya, g = act[keep], va[keep], ya[keep], g[keep]
            if not len(act):
                break
            below = sgn * g < 0
            lo[act] = np.where(below, va, lo[act])
            hi[act] = np.where(below, hi[act], va)
            with np.errstate(invalid="ignore", divide="ignore"):
                vn = va - g / (self.dlnh(ya) * dy_dv(va, ya))
            bad = ~np.isfinite(vn) | (vn < lo[act]) | (vn > hi[act]) | (vn == va)
            v[act] = np.where(bad, 0.5 * (lo[act] + hi[act]), vn)
        y = to_y(v)
        return y

    def level(self, lnt):
        """Measure, mass and d(measure)/d(ln t) of ``{h >= t}`` on the segment."""
        lnt = np.asarray(lnt, dtype=float)
        m = np.zeros_like(lnt)
        mass = np.zeros_like(lnt)
        dm = np.zeros_like(lnt)
        hi_l, lo_l = (self.lnh_b, self.lnh_a) if self.inc else (self.lnh_a, self.lnh_b)
        full = lnt <= lo_l
        part = (lnt > lo_l) & (lnt <= hi_l)
        if np.any(full):
            m[full] = self.b - self.a
            mass[full] = self.F(self.b) - self.F(self.a)
        if np.any(part):
            y = self.crossing(lnt[part])
            if self.inc:
                m[part] = self.b - y
                mass[part] = self.F(self.b) - self.F(y)
            else:
                m[part] = y - self.a
                mass[part] = self.F(y) - self.F(self.a)
            with np.errstate(divide="ignore"):
                dm[part] = -1.0 / np.abs(self.dlnh(y))
        return m, mass, dm


class ReducedProfile:
    """Non-negative integrable function on ``[0, inf)``.

    Subclasses provide the level structure; the cumulative integral,
    plus-functional and rearranged values are derived from it.
    """

    closed_form = False
    label = ""

    # -- level structure (subclass hooks) --
    def total_mass(self) -> float:
        raise NotImplementedError

    def max_value(self) -> float:
        raise NotImplementedError

    def support_measure(self) -> float:
        raise NotImplementedError

    def level_measure(self, t) -> np.ndarray:
        raise NotImplementedError

    def level_mass(self, t) -> np.ndarray:
        raise NotImplementedError

    def cumulative(self, s) -> np.ndarray:
        raise NotImplementedError

    def rearranged(self, s) -> np.ndarray:
        raise NotImplementedError

    def critical_levels(self) -> np.ndarray:
        return np.array([self.max_value()])

    def integrate(self, phi: Callable, kinks: Sequence[float] = ()) -> float:
        raise NotImplementedError

    def __call__(self, x):
        raise NotImplementedError

    # -- derived --
    def plus_integral(self, t) -> np.ndarray:
        """``int [f - t]_+ dx`` for each level ``t``."""
        t = np.asarray(t, dtype=float)
        m = self.level_measure(t)
        mass = self.level_mass(t)
        with np.errstate(invalid="ignore"):
            out = mass - np.where(t > 0, t * m, 0.0)
        return out

    def critical_measures(self) -> np.ndarray:
        """Abscissas where the cumulative integral may bend sharply."""
        lv = self.critical_levels()
        lv = lv[lv > 0]
        if not len(lv):
            return np.array([])
        m = self.level_measure(lv)
        return m[np.isfinite(m)]

    def effective_extent(self, rel: float = 1e-17) -> float:
        """Measure beyond which the rearrangement is below ``rel * max``."""
        sm = self.support_measure()
        top = self.max_value()
        if top <= 0:
            return 0.0
        m = float(self.level_measure(np.array([top * rel]))[0])
        return min(m, sm)


@dataclass(frozen=True)
class _Piece:
    lo: float
    hi: float
    coeffs: tuple  # P in the local variable y = x - lo


class ClosedForm(ReducedProfile):
    """Sum of ``exp(-(x-lo)) * P(x-lo)`` pieces on disjoint ``[lo, hi)``.

    Construct with :meth:`from_pieces`, which accepts pieces written about
    arbitrary origins and possibly overlapping, and merges them.
    """

    closed_form = True

    def __init__(self, pieces: Sequence[_Piece], label: str = ""):
        self.pieces = tuple(p for p in pieces if p.hi > p.lo and any(c != 0 for c in p.coeffs))
        self.label = label
        self._segments = None
        self._table = None
        self._validate()

    # -- construction --
    @classmethod
    def from_pieces(cls, pieces: Iterable, label: str = "") -> "ClosedForm":
        """``pieces`` are ``(lo, hi, origin, coeffs)`` tuples, each meaning
        ``exp(-(x-origin)) * sum_k coeffs[k] (x-origin)**k`` on ``[lo, hi)``."""
        raw = [(float(lo), float(hi), float(o), np.asarray(c, dtype=float)) for lo, hi, o, c in pieces]
        cuts = sorted({v for lo, hi, _, _ in raw for v in (lo, hi)})
        out = []
        for left, right in zip(cuts, cuts[1:]):
            acc = None
            for lo, hi, o, c in raw:
                if lo <= left and right <= hi:
                    d = left - o
                    term = _taylor_shift(c, d) * math.exp(-d)
                    if acc is None:
                        acc = term
                    else:
                        n = max(len(acc), len(term))
                        acc = np.pad(acc, (0, n - len(acc))) + np.pad(term, (0, n - len(term)))
            if acc is not None:
                acc = np.trim_zeros(acc, "b")
                if len(acc):
                    out.append(_Piece(left, right, tuple(float(v) for v in acc)))
        return cls(out, label=label)

    @classmethod
    def from_coeffs(cls, coeffs, label: str = "") -> "ClosedForm":
        """``exp(-x) * sum_k coeffs[k] x**k`` on the whole half-line."""
        return cls.from_pieces([(0.0, math.inf, 0.0, coeffs)], label=label)

    def _validate(self):
        for p in self.pieces:
            if p.lo < 0:
                raise DomainError(f"piece starts at {p.lo} < 0")
        for a, b in zip(self.pieces, self.pieces[1:]):
            if b.lo < a.hi:
                raise DomainError("closed-form pieces overlap")
        scale = max((abs(v) for p in self.pieces for v in p.coeffs), default=1.0)
        for seg in self.segments:
            for y in (seg.a, seg.b):
                if math.isfinite(y) and seg.h(np.array([y]))[0] < -1e-12 * scale:
                    raise DomainError("closed-form profile takes negative values")

    # -- structure --
    @property
    def segments(self) -> list[_Segment]:
        if self._segments is None:
            segs = []
            for p in self.pieces:
                c = np.array(p.coeffs)
                dc = npoly.polyder(c) if len(c) > 1 else np.array([0.0])
                q = _antideriv_poly(c)
                # h' = exp(-y) (P' - P)
                D = npoly.polysub(dc, c)
                w = p.hi - p.lo
                cuts = [0.0]
                if len(np.trim_zeros(D, "b")) > 1:
                    for r in npoly.polyroots(np.trim_zeros(D, "b")):
                        if abs(r.imag) <= 1e-9 * (1 + abs(r)) and 0 < r.real < w:
                            cuts.append(float(r.real))
                cuts = sorted(set(cuts)) + [w]
                for a, b in zip(cuts, cuts[1:]):
                    if b - a <= 0:
                        continue
                    mid = a + 1.0 if math.isinf(b) else 0.5 * (a + b)
                    if math.isinf(b):
                        inc = False
                    else:
                        inc = npoly.polyval(mid, D) > 0
                    segs.append(_Segment(p.lo, a, b, c, dc, q, bool(inc)))
            self._segments = segs
        return self._segments

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for p in self.pieces:
            mask = (x >= p.lo) & (x < p.hi)
            if np.any(mask):
                y = x[mask] - p.lo
                out[mask] = np.exp(-y) * _horner(p.coeffs, y)
        return out if out.ndim else float(out)

    def total_mass(self) -> float:
        total = 0.0
        for s in self.segments:
            total += float(s.F(s.b) - s.F(s.a))
        return total

    def max_value(self) -> float:
        lv = self.critical_levels()
        return float(lv.max()) if len(lv) else 0.0

    def critical_levels(self) -> np.ndarray:
        vals = []
        for s in self.segments:
            vals.append(math.exp(s.lnh_a) if np.isfinite(s.lnh_a) else 0.0)
            if np.isfinite(s.lnh_b):
                vals.append(math.exp(s.lnh_b))
        return np.unique(np.array(vals)) if vals else np.array([])

    def support_measure(self) -> float:
        return float(sum(p.hi - p.lo for p in self.pieces))

    def support_intervals(self) -> list[tuple[float, float]]:
        return [(p.lo, p.hi) for p in self.pieces]

    def _level(self, t):
        t = np.asarray(t, dtype=float)
        m = np.zeros_like(t)
        mass = np.zeros_like(t)
        dm = np.zeros_like(t)
        pos = t > 0
        if np.any(~pos):
            m[~pos] = self.support_measure()
            mass[~pos] = self.total_mass()
        if np.any(pos):
            lnt = np.log(t[pos])
            for seg in self.segments:
                a, b, c = seg.level(lnt)
                m[pos] += a
                mass[pos] += b
                dm[pos] += c
        return m, mass, dm

    def level_measure(self, t):
        return self._level(t)[0]

    def level_mass(self, t):
        return self._level(t)[1]

    def _tau_table(self):
        if self._table is None:
            top = self.max_value()
            if top <= 0:
                self._table = (np.array([]), np.array([]))
                return self._table
            ln_top = math.log(top)
            crit = self.critical_levels()
            crit = np.log(crit[crit > 0])
            # m ~ sqrt(distance) next to quadratic extrema: refine geometrically there
            near = np.geomspace(1e-14, 1.0, 40)
            taus = np.concatenate(
                [np.linspace(ln_top, LN_FLOOR, 600), crit, *(c - near for c in crit), *(c + near for c in crit)]
            )
            taus = np.minimum(taus, ln_top)
            taus = np.unique(taus[taus >= LN_FLOOR])[::-1]  # descending
            m, _, _ = self._level(np.exp(taus))
            m = np.maximum.accumulate(m)
            keep = np.concatenate([[True], np.diff(m) > 0])
            self._table = (taus, m)
            self._guess = PchipInterpolator(m[keep], taus[keep], extrapolate=True)
        return self._table

    def _solve_level(self, s):
        """ln t with ``m(t) = s`` for 0 < s < m(floor) (vectorized)."""
        taus, ms = self._tau_table()
        idx = np.clip(np.searchsorted(ms, s), 1, len(ms) - 1)
        t_hi, t_lo = taus[idx - 1], taus[idx]  # m(t_hi) <= s <= m(t_lo)
        tau = np.clip(self._guess(s), t_lo, t_hi)
        lo, hi = t_lo.copy(), t_hi.copy()
        act = np.arange(len(tau))
        for _ in range(100):
            ta = tau[act]
            m, _, dm = self._level(np.exp(ta))
            g = m - s[act]
            # S is first-order insensitive to t, so a 1e-11 step in ln t suffices
            with np.errstate(invalid="ignore", divide="ignore"):
                step = np.abs(g / dm)
            keep = (
                (np.abs(g) > 1e-14 * (1.0 + s[act]))
                & (hi[act] - lo[act] > 1e-13)
                & ~(step <= 1e-11 * (1.0 + np.abs(ta)))
            )
            act, ta, g, dm = act[keep], ta[keep], g[keep], dm[keep]
            if not len(act):
                break
            # g decreases in tau
            lo[act] = np.where(g > 0, ta, lo[act])
            hi[act] = np.where(g > 0, hi[act], ta)
            with np.errstate(invalid="ignore", divide="ignore"):
                tn = ta - g / dm
            bad = ~np.isfinite(tn) | (tn < lo[act]) | (tn > hi[act]) | (tn == ta)
            tau[act] = np.where(bad, 0.5 * (lo[act] + hi[act]), tn)
        return tau

    def _invert(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = np.zeros_like(s)
        taus, ms = self._tau_table()
        if not len(taus):
            return s, t
        inner = (s > 0) & (s < ms[-1])
        t[s <= 0] = math.exp(taus[0])
        if np.any(inner):
            t[inner] = np.exp(self._solve_level(s[inner]))
        beyond = s >= ms[-1]
        t[beyond] = math.exp(taus[-1]) if self.support_measure() == math.inf else 0.0
        return s, t

    def cumulative(self, s):
        s, t = self._invert(s)
        out = self.plus_integral(t) + t * s
        out[s <= 0] = 0.0
        return np.minimum(out, self.total_mass())

    def rearranged(self, s):
        s, t = self._invert(s)
        sm = self.support_measure()
        t[s >= sm] = 0.0
        return t

    def integrate(self, phi, kinks=()):
        """``int phi(f(x)) dx`` by adaptive quadrature on monotone segments.

        ``phi`` must accept numpy arrays. ``kinks`` lists levels where ``phi``
        is not smooth; the quadrature splits at their crossings.
        """
        total = 0.0
        for seg in self.segments:
            a, b = seg.a, seg.b_eff
            pts = [a, b]
            for k in kinks:
                if k > 0:
                    lk = math.log(k)
                    lo_l, hi_l = sorted((seg.lnh_a, seg.lnh_b if math.isfinite(seg.b) else LN_FLOOR))
                    if lo_l < lk < hi_l:
                        pts.append(float(seg.crossing(np.array([lk]))[0]))
            if math.isinf(seg.b):
                pts += [x for x in (a + 1, a + 5, a + 20, a + 60, a + 200) if x < b]
            pts = sorted(set(pts))

            def g(y):
                return float(phi(np.maximum(seg.h(np.array([y])), 0.0))[0])

            for lo, hi in zip(pts, pts[1:]):
                val, _ = quad(g, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200)
                total += val
        return total

    # -- algebra --
    def scale(self, factor: float, label: str = "") -> "ClosedForm":
        return ClosedForm(
            [_Piece(p.lo, p.hi, tuple(factor * c for c in p.coeffs)) for p in self.pieces],
            label=label or self.label,
        )

    def raw_pieces(self):
        return [(p.lo, p.hi, p.lo, p.coeffs) for p in self.pieces]

    def __add__(self, other):
        if not isinstance(other, ClosedForm):
            return NotImplemented
        return ClosedForm.from_pieces(self.raw_pieces() + other.raw_pieces())

    def restrict(self, lo: float, hi: float, label: str = "") -> "ClosedForm":
        """Copy that vanishes outside ``[lo, hi)``."""
        out = []
        for p in self.pieces:
            a, b = max(p.lo, lo), min(p.hi, hi)
            if b > a:
                out.append((a, b, p.lo, p.coeffs))
        return ClosedForm.from_pieces(out, label=label)

    def translate(self, delta: float, label: str = "") -> "ClosedForm":
        """Move the graph by ``delta`` (either sign; support must stay in x >= 0)."""
        return ClosedForm.from_pieces(
            [(p.lo + delta, p.hi + delta, p.lo + delta, p.coeffs) for p in self.pieces],
            label=label or self.label,
        )

    def is_nonincreasing(self) -> bool:
        segs = self.segments
        if not segs:
            return True
        if any(s.inc for s in segs):
            return False
        # contiguous from the origin, no upward jump at piece joins
        if self.pieces[0].lo != 0.0:
            return False
        for p, q in zip(self.pieces, self.pieces[1:]):
            if q.lo != p.hi:
                return False
            left = float(self(np.array([np.nextafter(p.hi, -np.inf)]))[0])
            if float(self(np.array([q.lo]))[0]) > left * (1 + 1e-12):
                return False
        return True

    def __repr__(self):
        return f"ClosedForm({self.label or 'anon'}, pieces={len(self.pieces)})"


class Sampled(ReducedProfile):
    """Step function: ``values[i]`` on ``[breaks[i], breaks[i+1])``."""

    def __init__(self, breaks, values, label: str = ""):
        breaks = np.asarray(breaks, dtype=float)
        values = np.asarray(values, dtype=float)
        if breaks.ndim != 1 or len(breaks) != len(values) + 1:
            raise RepresentationError("need len(breaks) == len(values) + 1")
        if np.any(np.diff(breaks) < 0) or breaks[0] < 0:
            raise DomainError("breakpoints must be ascending and non-negative")
        if np.any(values < 0):
            raise DomainError("sampled profile takes negative values")
        self.breaks = breaks
        self.values = values
        self.label = label
        widths = np.diff(breaks)
        order = np.argsort(-values, kind="stable")
        self._v = values[order]
        self._w = widths[order]
        self._cm = np.concatenate([[0.0], np.cumsum(self._w)])
        self._cs = np.concatenate([[0.0], np.cumsum(self._v * self._w)])

    @classmethod
    def from_grid(cls, grid: GridWigner) -> "Sampled":
        """Reduced, already-sorted profile of a grid Wigner function."""
        v = np.sort(grid.values.ravel())[::-1] * math.pi
        w = grid.cell_area / math.pi
        breaks = w * np.arange(len(v) + 1)
        return cls(breaks, v, label=grid.label)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breaks, x, side="right") - 1
        ok = (idx >= 0) & (idx < len(self.values))
        out = np.where(ok, self.values[np.clip(idx, 0, len(self.values) - 1)], 0.0)
        return out if out.ndim else float(out)

    def total_mass(self):
        return float(self._cs[-1])

    def max_value(self):
        return float(self._v[0]) if len(self._v) else 0.0

    def support_measure(self):
        return float(self._w[self._v > 0].sum())

    def _count(self, t):
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(-self._v, -t, side="right")
        # t <= 0 should not count zero-valued cells as support
        kpos = np.searchsorted(-self._v, 0.0, side="left")
        return np.where(t > 0, k, kpos)

    def level_measure(self, t):
        return self._cm[self._count(t)]

    def level_mass(self, t):
        return self._cs[self._count(t)]

    def cumulative(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.interp(s, self._cm, self._cs)

    def rearranged(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        idx = np.searchsorted(self._cm, s, side="right") - 1
        ok = (idx >= 0) & (idx < len(self._v))
        return np.where(ok, self._v[np.clip(idx, 0, len(self._v) - 1)], 0.0)

    def critical_levels(self):
        if not len(self._v):
            return np.array([])
        q = np.unique(np.quantile(self._v[self._v > 0], np.linspace(0, 1, 65)))
        return q

    def critical_measures(self):
        n = len(self._cm)
        if n <= 2000:
            return self._cm.copy()
        idx = np.unique(np.linspace(0, n - 1, 2000).astype(int))
        return self._cm[idx]

    def integrate(self, phi, kinks=()):
        return float(np.sum(phi(self._v) * self._w))

    def is_nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0))

    def __repr__(self):
        return f"Sampled({self.label or 'anon'}, steps={len(self.values)})"


class Rearranged(ReducedProfile):
    """Decreasing rearrangement of a closed-form profile.

    Level structure is that of the source; values are obtained by inverting
    the level function.
    """

    closed_form = True

    def __init__(self, source: ClosedForm):
        self.source = source
        self.label = f"{source.label}↓" if source.label else ""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.source.rearranged(np.atleast_1d(x))
        return out if x.ndim else float(out[0])

    def total_mass(self):
        return self.source.total_mass()

    def max_value(self):
        return self.source.max_value()

    def support_measure(self):
        return self.source.support_measure()

    def level_measure(self, t):
        return self.source.level_measure(t)

    def level_mass(self, t):
        return self.source.level_mass(t)

    def cumulative(self, s):
        return self.source.cumulative(s)

    def rearranged(self, s):
        return self.source.rearranged(s)

    def critical_levels(self):
        return self.source.critical_levels()

    def integrate(self, phi, kinks=(), nodes: int = 24, panel: float = 0.5):
        """``int phi(f_down(s)) ds`` with composite Gauss-Legendre in ``s``."""
        end = self.effective_extent(1e-20)
        cuts = [0.0, end]
        lv = list(self.critical_levels()) + [k for k in kinks if k > 0]
        lv = np.array([v for v in lv if v > 0])
        if len(lv):
            cuts += [float(m) for m in self.level_measure(lv) if 0 < m < end]
        cuts = np.unique(np.array(cuts))
        edges = [cuts[0]]
        for a, b in zip(cuts, cuts[1:]):
            k = max(1, int(math.ceil((b - a) / panel)))
            edges.extend(np.linspace(a, b, k + 1)[1:])
        edges = np.array(edges)
        xg, wg = np.polynomial.legendre.leggauss(nodes)
        a, b = edges[:-1, None], edges[1:, None]
        s = 0.5 * (b - a) * xg[None, :] + 0.5 * (a + b)
        w = 0.5 * (b - a) * wg[None, :]
        vals = self.source.rearranged(s.ravel())
        return float(np.sum(phi(vals) * w.ravel()))


# -- value types ------------------------------------------------------------


@dataclass(frozen=True)
class LevelFunction:
    """``m(t)`` sampled at strictly decreasing levels ``t``."""

    t: np.ndarray
    m: np.ndarray

    def pairs(self):
        return list(zip(self.t.tolist(), self.m.tolist()))


@dataclass(frozen=True)
class CumulativeIntegral:
    """``S(s)`` sampled at ascending ``s``."""

    s: np.ndarray
    S: np.ndarray

    def pairs(self):
        return list(zip(self.s.tolist(), self.S.tolist()))


# -- operations -------------------------------------------------------------


def radial_reduce(w: RadialWigner) -> ClosedForm:
    """Profile ``f(x) = pi * W(sqrt(x)) = exp(-x) sum_k c_k x**k``.

    Disk area ``A`` maps to length ``A / pi``, so majorization is preserved
    in both directions.
    """
    if not is_wigner_positive(w):
        raise DomainError("radial reduction needs a Wigner-positive state")
    return ClosedForm.from_coeffs([float(c) for c in w.coeffs], label=w.label)


def as_profile(f) -> ReducedProfile:
    """Coerce a RadialWigner, GridWigner or profile to a reduced profile."""
    if isinstance(f, ReducedProfile):
        return f
    if isinstance(f, RadialWigner):
        return radial_reduce(f)
    if isinstance(f, GridWigner):
        return Sampled.from_grid(f)
    raise RepresentationError(f"cannot treat {type(f).__name__} as a profile")


def default_levels(f, n: int = 400, depth: float = 1e-8) -> np.ndarray:
    """Geometric levels from ``max f`` down to ``max f * depth`` plus the
    profile's critical values, sorted decreasingly."""
    p = as_profile(f)
    top = p.max_value()
    if top <= 0:
        return np.array([])
    lv = np.concatenate([np.geomspace(top, top * depth, n), p.critical_levels()])
    lv = np.unique(lv[(lv > 0) & (lv <= top)])
    return lv[::-1]


def level_function(f, tgrid=None) -> LevelFunction:
    """Lebesgue measure of ``{f >= t}``.

    Grid inputs are measured in phase-space area; all other inputs in the
    reduced (half-line) variable.
    """
    if isinstance(f, GridWigner):
        t = np.asarray(tgrid, dtype=float) if tgrid is not None else None
        red = Sampled.from_grid(f)
        if t is None:
            t = default_levels(red) / math.pi
        return LevelFunction(t, math.pi * red.level_measure(math.pi * t))
    p = as_profile(f)
    t = np.asarray(tgrid, dtype=float) if tgrid is not None else default_levels(p)
    return LevelFunction(t, p.level_measure(t))


def decreasing_rearrangement(f) -> ReducedProfile:
    """Non-increasing profile on the half-line level-equivalent to ``f``.

    Grids come back as a sorted step function in the reduced variable
    (abscissa = cumulative cell area / pi, value = pi * W).
    """
    if isinstance(f, GridWigner):
        return Sampled.from_grid(f)
    p = as_profile(f)
    if isinstance(p, Sampled):
        if p.is_nonincreasing():
            return p
        return Sampled(p._cm, p._v, label=p.label)
    if isinstance(p, Rearranged):
        return p
    if p.is_nonincreasing():
        return p
    return Rearranged(p)


def cumulative_integral(f, sgrid) -> CumulativeIntegral:
    """``S_f(s)``: the largest mass of ``f`` carried by a set of measure ``s``.

    For grids ``s`` is a phase-space area; otherwise a half-line length.
    """
    s = np.asarray(sgrid, dtype=float)
    if np.any(np.diff(s) < 0):
        raise DomainError("sgrid must be ascending")
    if isinstance(f, GridWigner):
        return CumulativeIntegral(s, Sampled.from_grid(f).cumulative(s / math.pi))
    return CumulativeIntegral(s, as_profile(f).cumulative(s))


def shift_profile(f: ClosedForm, alpha: float) -> ClosedForm:
    """Translate right by ``alpha >= 0``; zero on ``[0, alpha)``."""
    if alpha < 0:
        raise DomainError("shift must be non-negative")
    if not isinstance(f, ClosedForm):
        raise RepresentationError("shift_profile works on closed-form profiles")
    return f.translate(alpha)
