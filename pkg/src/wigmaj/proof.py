"""Executable check of the two-photon majorization proof.

Every Wigner-positive mixture of |0>, |1>, |2> is a convex combination of
the vacuum, the states B, C, D and the elliptic family V_t. After radial
reduction their profiles are

    f0 = e^-x,  fb = x e^-x,  fc = (x-1)^2 e^-x,  fd = x^2 e^-x / 2,
    g_t = (t+1)/2 (x - a_t)^2 e^-x,   a_t = 1 - sqrt((1-t)/(1+t)).

fb and fd are kernel mixtures of translates of f0. fc and g_t are split
at their zero ``a_t`` and f0 at ``b_t = a_t - ln(1+t)``. The left pieces
are compared pointwise and the right pieces are rescaled copies of (f0, fd).
:func:`run_restricted_proof` runs every one of these checks and records a
numeric residual for each.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError, WigmajError
from .majorization import (
    Certificate,
    MajorizationVerdict,
    ShiftFamily,
    compare,
    certify_kernel_mixture,
    certify_split_compare,
)
from .rearrangement import ClosedForm, _antideriv_poly

__all__ = [
    "X_STAR",
    "DEFAULT_TGRID",
    "REPORT_SCHEMA",
    "ProofStep",
    "ProofReport",
    "proof_profiles",
    "split_points",
    "shift_factor",
    "kernel_b",
    "kernel_d",
    "check_split_normalizations",
    "check_ratio_bounds",
    "certify_shift_rescale_steps",
    "run_restricted_proof",
]

X_STAR = 1.0 - math.log(2.0)
DEFAULT_TGRID = tuple(round(0.1 * i, 10) for i in range(11))
CLOSED_FORM_RESIDUAL = 1e-10
KERNEL_RESIDUAL = 1e-12
FAULTS = ("scale-fc",)

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "wigmaj proof report",
    "type": "object",
    "required": ["schema_version", "overall", "tgrid", "steps"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": 1},
        "overall": {"type": "boolean"},
        "tgrid": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
        "fault": {"type": ["string", "null"]},
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "status", "residual", "citations"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "status": {"enum": ["pass", "fail"]},
                    "residual": {"type": "number", "minimum": 0},
                    "detail": {"type": "string"},
                    "citations": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
    },
}


def kernel_b(alpha):
    """Mixing density ``e^-alpha`` turning translates of f0 into fb."""
    return math.exp(-alpha)


def kernel_d(alpha):
    """Mixing density ``alpha e^-alpha`` turning translates of f0 into fd."""
    return alpha * math.exp(-alpha)


def _check_t(t):
    if t is None:
        return None
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"ellipse parameter must lie in [0, 1], got {t}")
    return t


def _root_ratio(t: float) -> float:
    return math.sqrt((1.0 - t) / (1.0 + t))


def split_points(t: float) -> tuple[float, float, float]:
    """``(x*, a_t, b_t)``: the f_c split ``x* = 1 - ln 2``, the zero ``a_t``
    of g_t, and the matching f0 split ``b_t = a_t - ln(1 + t)``."""
    t = _check_t(t)
    a = 1.0 - _root_ratio(t)
    b = a - math.log1p(t)
    return X_STAR, a, b


def shift_factor(t: float) -> float:
    """Common factor ``(t+1) exp(sqrt((1-t)/(1+t)) - 1)`` of the shifted
    right-hand pieces; ``2/e`` at ``t = 1``."""
    t = _check_t(t)
    return (t + 1.0) * math.exp(_root_ratio(t) - 1.0)


def _g_coeffs(t: float) -> tuple:
    k = 0.5 * (t + 1.0)
    a = 1.0 - _root_ratio(t)
    return (k * a * a, -2.0 * k * a, k)


def proof_profiles(t=None) -> dict[str, ClosedForm]:
    """Closed-form profiles ``f0, fb, fc, fd`` and, when ``t`` is given, ``g_t``."""
    t = _check_t(t)
    out = {
        "f0": ClosedForm.from_coeffs([1.0], label="f0"),
        "fb": ClosedForm.from_coeffs([0.0, 1.0], label="fb"),
        "fc": ClosedForm.from_coeffs([1.0, -2.0, 1.0], label="fc"),
        "fd": ClosedForm.from_coeffs([0.0, 0.0, 0.5], label="fd"),
    }
    if t is not None:
        out["g_t"] = ClosedForm.from_coeffs(_g_coeffs(t), label=f"g_{t:g}")
    return out


# -- report ------------------------------------------------------------------


@dataclass(frozen=True)
class ProofStep:
    name: str
    passed: bool
    residual: float
    detail: str = ""
    citations: tuple = ()

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "residual": float(self.residual),
            "detail": self.detail,
            "citations": list(self.citations),
        }


@dataclass
class ProofReport:
    steps: list = field(default_factory=list)
    tgrid: tuple = ()
    fault: str | None = None

    @property
    def overall(self) -> bool:
        return all(s.passed for s in self.steps)

    def failed(self) -> list[ProofStep]:
        return [s for s in self.steps if not s.passed]

    def add(self, step: ProofStep) -> ProofStep:
        self.steps.append(step)
        return step

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "overall": self.overall,
            "tgrid": [float(t) for t in self.tgrid],
            "fault": self.fault,
            "steps": [s.to_dict() for s in self.steps],
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)


def _guard(name, citations, fn) -> ProofStep:
    """Run a step; library errors become a failing step with their message."""
    try:
        return fn()
    except WigmajError as exc:
        res = getattr(exc, "residual", None)
        return ProofStep(name, False, float(res) if res is not None else math.inf, f"{type(exc).__name__}: {exc}", citations)


# -- individual checks -------------------------------------------------------


def _head_tail(c, lo: float, hi: float) -> tuple[float, float]:
    """``int_lo^hi`` and ``int_hi^inf`` of ``e^-x P(x)`` from ``-e^-x Q(x)``."""
    q = _antideriv_poly(np.asarray(c, dtype=float))
    F = lambda x: -math.exp(-x) * float(npoly.polyval(x, q))
    return F(hi) - F(lo), -F(hi)


def check_split_normalizations(t=None, profiles=None) -> ProofStep:
    """Equal masses of the paired pieces.

    With ``t = None`` checks ``fc`` on ``[0, 1] | [1, inf)`` against ``f0`` on
    ``[0, x*] | [x*, inf)``; both left masses are ``1 - 2/e``. Otherwise the
    same for ``g_t`` split at ``a_t`` and ``f0`` at ``b_t``.
    """
    t = _check_t(t)
    cites = ("left and right pieces carry equal mass",)
    name = "split-normalization[fc]" if t is None else f"split-normalization[t={t:g}]"
    p = profiles or proof_profiles(t)
    if t is None:
        g, a, b = p["fc"], 1.0, X_STAR
    else:
        g = p.get("g_t") or proof_profiles(t)["g_t"]
        _, a, b = split_points(t)
    (piece,) = g.pieces
    g_left, g_right = _head_tail(piece.coeffs, 0.0, a)
    f_left, f_right = _head_tail((1.0,), 0.0, b)
    res = max(abs(g_left - f_left), abs(g_right - f_right))
    detail = f"left {g_left:.15g} vs {f_left:.15g}; right {g_right:.15g} vs {f_right:.15g}"
    if t is None:
        ref = 1.0 - 2.0 / math.e
        res = max(res, abs(f_left - ref))
        detail += f"; reference 1-2/e = {ref:.15g}"
    return ProofStep(name, res < CLOSED_FORM_RESIDUAL, res, detail, cites)


def _poly_max(c, lo: float, hi: float) -> tuple[float, float]:
    """Maximum of a polynomial on ``[lo, hi]`` from endpoints and stationary points."""
    c = np.asarray(c, dtype=float)
    xs = [lo, hi]
    if len(c) > 2:
        for r in npoly.polyroots(npoly.polyder(c)):
            if abs(r.imag) < 1e-12 and lo <= r.real <= hi:
                xs.append(float(r.real))
    vals = [float(npoly.polyval(x, c)) for x in xs]
    i = int(np.argmax(vals))
    return vals[i], xs[i]


def check_ratio_bounds(t=None, profiles=None) -> ProofStep:
    """The left piece of ``fc`` (or ``g_t``) lies under ``f0`` on ``[0, x*]``
    (or ``[0, b_t]``); the ratio to ``e^-x`` is a polynomial, maximized
    exactly."""
    t = _check_t(t)
    name = "ratio-bound[fc]" if t is None else f"ratio-bound[t={t:g}]"
    cites = ("both left pieces are decreasing and f0 dominates pointwise",)
    p = profiles or proof_profiles(t)
    if t is None:
        g, b = p["fc"], X_STAR
    else:
        g = p.get("g_t") or proof_profiles(t)["g_t"]
        b = split_points(t)[2]
    (piece,) = g.pieces
    (f0_piece,) = p["f0"].pieces
    ratio = np.asarray(piece.coeffs) / f0_piece.coeffs[0]
    top, where = _poly_max(ratio, 0.0, b)
    res = max(0.0, top - 1.0)
    return ProofStep(name, top <= 1.0 + 1e-12, res, f"max ratio {top:.15g} at x={where:.6g}", cites)


def certify_shift_rescale_steps(t: float, xgrid=None, profiles=None) -> ProofStep:
    """Right pieces moved to the origin are ``K e^-x`` and ``K x^2 e^-x / 2``
    with ``K = shift_factor(t)``; a kernel-mixture certificate then gives the
    majorization between them."""
    t = _check_t(t)
    name = f"shift-rescale[t={t:g}]"
    cites = (
        "shifted right pieces are proportional to f0 and fd with one factor",
        "kernel alpha e^-alpha mixes translates of f0 into fd",
    )

    def run():
        p = profiles or proof_profiles(t)
        g = p.get("g_t") or proof_profiles(t)["g_t"]
        _, a, b = split_points(t)
        K = shift_factor(t)
        g_sh = g.restrict(a, math.inf).translate(-a)
        f_sh = p["f0"].restrict(b, math.inf).translate(-b)
        xs = np.linspace(0.0, 20.0, 201) if xgrid is None else np.asarray(xgrid, dtype=float)
        res_shape = max(
            float(np.max(np.abs(g_sh(xs) - K * 0.5 * xs**2 * np.exp(-xs)))),
            float(np.max(np.abs(f_sh(xs) - K * np.exp(-xs)))),
        )
        cert = certify_kernel_mixture(kernel_d, ShiftFamily(f_sh), g_sh, xgrid=np.linspace(0.0, 20.0, 41))
        res = max(res_shape, cert.residual)
        ok = res_shape < KERNEL_RESIDUAL and cert.ok
        return ProofStep(name, ok, res, f"factor {K:.15g}; shape residual {res_shape:.2e}; {cert.detail}", cites)

    return _guard(name, cites, run)


def _kernel_step(name, kernel, target_key, profiles) -> ProofStep:
    cites = (f"translates of f0 mixed by a probability density reproduce {target_key}",)

    def run():
        cert = certify_kernel_mixture(kernel, ShiftFamily(profiles["f0"]), profiles[target_key])
        ok = cert.ok and cert.residual < KERNEL_RESIDUAL
        return ProofStep(name, ok, cert.residual, f"{cert.detail}; verdict {cert.verdict.outcome.value}", cites)

    return _guard(name, cites, run)


def _split_pieces(f0: ClosedForm, g: ClosedForm, a: float, b: float):
    return (
        f0.restrict(0.0, b),
        f0.restrict(b, math.inf),
        g.restrict(0.0, a),
        g.restrict(a, math.inf),
    )


def _verdict_step(name, v: MajorizationVerdict, cites) -> ProofStep:
    return ProofStep(name, v.holds, max(0.0, -v.margin), f"{v.outcome.value}, margin {v.margin:.3e}", cites)


def _inject(profiles: dict, fault: str | None) -> dict:
    if fault is None:
        return profiles
    if fault == "scale-fc":
        profiles = dict(profiles)
        profiles["fc"] = profiles["fc"].scale(1.01, label="fc*1.01")
        return profiles
    raise DomainError(f"unknown fault {fault!r}; known: {', '.join(FAULTS)}")


def run_restricted_proof(tgrid=DEFAULT_TGRID, inject_fault: str | None = None, mixtures: int = 100, seed: int = 0) -> ProofReport:
    """Run the whole certification and collect a :class:`ProofReport`.

    Order: kernel certificates for fb and fd, the fc split (normalization,
    ratio bound, shift-rescale, assembly), the same for every ``g_t``, the
    ordering ``b_t <= a_t <= 1``, direct comparisons of f0 against every
    extremal profile, and ``mixtures`` random convex combinations.
    """
    tgrid = tuple(_check_t(t) for t in tgrid)
    base = _inject(proof_profiles(), inject_fault)
    report = ProofReport(tgrid=tgrid, fault=inject_fault)
    f0 = base["f0"]

    report.add(_kernel_step("kernel-mixture[fb]", kernel_b, "fb", base))
    report.add(_kernel_step("kernel-mixture[fd]", kernel_d, "fd", base))

    # fc first, then the elliptic family
    report.add(check_split_normalizations(None, base))
    report.add(check_ratio_bounds(None, base))
    cases = [("fc", base["fc"], 1.0, X_STAR)]
    g_of = {}
    for t in tgrid:
        prof = dict(base)
        prof["g_t"] = proof_profiles(t)["g_t"]
        g_of[t] = prof["g_t"]
        report.add(check_split_normalizations(t, prof))
        report.add(check_ratio_bounds(t, prof))
        report.add(certify_shift_rescale_steps(t, profiles=prof))
        _, a, b = split_points(t)
        cases.append((f"t={t:g}", prof["g_t"], a, b))

    direct = {}
    for key, g, a, b in cases:
        name = f"split-assembly[{key}]"
        cites = ("majorization of disjointly supported pieces adds up",)

        def assemble(g=g, a=a, b=b, key=key, name=name, cites=cites):
            cert: Certificate = certify_split_compare(*_split_pieces(f0, g, a, b))
            d = compare(f0, g)
            direct[key] = d
            agree = d.outcome == cert.verdict.outcome
            res = max(cert.residual, abs(d.margin - cert.verdict.margin))
            detail = f"assembled {cert.verdict.outcome.value}, direct {d.outcome.value}"
            return ProofStep(name, cert.ok and agree and d.holds, res, detail, cites)

        report.add(_guard(name, cites, assemble))

    ts = np.linspace(0.0, 1.0, 101)
    pts = np.array([split_points(t)[1:] for t in ts])
    gap = max(float(np.max(pts[:, 1] - pts[:, 0])), float(np.max(pts[:, 0] - 1.0)), 0.0)
    report.add(ProofStep("split-point-order", gap <= 0.0, gap, "b_t <= a_t <= 1 on 101 points", ("split points are ordered",)))

    cites = ("f0 majorizes the profile",)
    for key in ("fb", "fd"):
        name = f"compare[f0,{key}]"
        report.add(_guard(name, cites, lambda key=key, name=name: _verdict_step(name, compare(f0, base[key]), cites)))
    for key, g, _, _ in cases:
        name = f"compare[f0,{'fc' if key == 'fc' else 'g_' + key[2:]}]"
        if key in direct:
            report.add(_verdict_step(name, direct[key], cites))
        else:
            report.add(_guard(name, cites, lambda g=g, name=name: _verdict_step(name, compare(f0, g), cites)))

    if mixtures:
        report.add(_mixture_step(base, mixtures, seed))
    return report


def _mixture_step(base: dict, n: int, seed: int) -> ProofStep:
    name = f"convex-mixtures[n={n}]"
    cites = ("majorization by f0 survives convex mixing of the majorized profiles",)

    def run():
        rng = np.random.default_rng(seed)
        f0 = base["f0"]
        worst, failures = 0.0, 0
        for _ in range(n):
            t = float(rng.uniform(0.0, 1.0))
            members = [base["f0"], base["fb"], base["fc"], base["fd"], proof_profiles(t)["g_t"]]
            w = rng.dirichlet(np.ones(len(members)))
            coeffs = np.zeros(3)
            for wi, m in zip(w, members):
                (piece,) = m.pieces
                c = np.asarray(piece.coeffs)
                coeffs[: len(c)] += wi * c
            v = compare(f0, ClosedForm.from_coeffs(coeffs))
            worst = max(worst, -v.margin)
            failures += not v.holds
        return ProofStep(name, failures == 0, max(worst, 0.0), f"{failures} of {n} mixtures not majorized", cites)

    return _guard(name, cites, run)
