"""``wigmaj`` command-line interface.

Exit codes: 0 decided / pass, 1 proof or conjecture violation, 2 invalid
domain input (Wigner-negative state, exhausted sampling budget), 64 usage.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .entropics import marginal_entropies, renyi_entropy, shannon_entropy, wigner_entropy
from .errors import CapacityError, DomainError, WigmajError
from .majorization import GRID_TOL, compare
from .proof import DEFAULT_TGRID, FAULTS, run_restricted_proof
from .rearrangement import Sampled, radial_reduce
from .states import (
    FockMixture,
    boundary_distance,
    gaussian_mixture_wigner,
    is_wigner_positive,
    radial_wigner_grid,
    sample_gaussian_mixture,
    sample_positive_fock_mixture,
    vacuum_wigner,
    wigner_of_mixture,
)

EXIT_OK, EXIT_VIOLATION, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2, 64
DEFAULT_ALPHAS = (0.4, 0.6, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0)
DEFAULT_SAMPLES = 20
SCHEMA_VERSION = 1
ENTROPY_TOL = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument types ----------------------------------------------------------


def _probs(text: str) -> FockMixture:
    try:
        vals = [v.strip() for v in text.split(",")]
        if not vals or any(not v for v in vals):
            raise ValueError
        return FockMixture(tuple(vals))
    except (ValueError, ZeroDivisionError, DomainError) as exc:
        raise argparse.ArgumentTypeError(f"malformed probability vector {text!r}: {exc}") from None


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _grid_size(text: str) -> int:
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid size must be an integer, got {text!r}") from None
    if m < 128 or m > 4096 or m & (m - 1):
        raise argparse.ArgumentTypeError("grid size must be a power of two in [128, 4096]")
    return m


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("value must be at least 1")
    return v


# -- configuration and output -----------------------------------------------


@dataclass
class RunConfig:
    seed: int = 0
    ensemble: str = "fock"
    nmax: int = 4
    components: int = 3
    grid_extent: float = 8.0
    grid_size: int = 512
    tol: float | None = None
    alphas: tuple = DEFAULT_ALPHAS
    samples: int = DEFAULT_SAMPLES
    budget: int = 10**6
    fmt: str = "csv"
    out: str | None = None

    @classmethod
    def from_args(cls, a) -> "RunConfig":
        return cls(
            seed=a.seed,
            ensemble=a.ensemble,
            nmax=a.nmax,
            components=a.components,
            grid_extent=a.grid_extent,
            grid_size=a.grid_size,
            tol=a.tol,
            alphas=tuple(a.alpha) if a.alpha else DEFAULT_ALPHAS,
            samples=a.samples,
            budget=a.budget,
            fmt=a.format,
            out=a.out,
        )

    def grid_tol(self) -> float:
        return self.tol if self.tol is not None else GRID_TOL

    def metadata(self) -> dict:
        meta = {
            "tool": "wigmaj",
            "version": __version__,
            "schema": SCHEMA_VERSION,
            "seed": self.seed,
            "ensemble": self.ensemble,
        }
        if self.ensemble == "fock":
            meta["nmax"] = self.nmax
        else:
            meta["components"] = self.components
            meta["grid_extent"] = float(self.grid_extent)
            meta["grid_size"] = self.grid_size
        meta["samples"] = self.samples
        return meta


@dataclass
class SeriesOutput:
    metadata: dict
    rows: list = field(default_factory=list)

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r[0], r[1]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}={v}\n")
        buf.write("label,abscissa,value\n")
        for label, x, y in self.sorted_rows():
            buf.write(f"{label},{_fmt(x)},{_fmt(y)}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "metadata": self.metadata,
            "columns": ["label", "abscissa", "value"],
            "rows": [[l, float(x), float(y)] for l, x, y in self.sorted_rows()],
        }
        return json.dumps(doc, indent=1) + "\n"


def _fmt(x) -> str:
    return repr(float(x))


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc: dict, out: str | None):
    _emit(json.dumps(doc, indent=2) + "\n", out)


def _threads() -> int:
    raw = os.environ.get("WIGMAJ_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise UsageError(f"WIGMAJ_THREADS must be an integer, got {raw!r}")
    return min(4, os.cpu_count() or 1)


def _pmap(fn, items):
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _probs_text(m: FockMixture) -> str:
    return ";".join(_fmt(p) for p in m.as_floats())


def _sample_seeds(seed: int, n: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n, dtype=np.uint32)]


# -- sampling ----------------------------------------------------------------


@dataclass
class _Sample:
    label: str
    kind: str
    state: object
    describe: str


def _draw(cfg: RunConfig) -> tuple[list[_Sample], str | None]:
    """Seeded samples; on budget exhaustion returns what was drawn and a warning."""
    seeds = _sample_seeds(cfg.seed, cfg.samples)
    out = []
    width = max(2, len(str(cfg.samples - 1)))
    for i, s in enumerate(seeds):
        label = f"state{i:0{width}d}"
        try:
            if cfg.ensemble == "fock":
                m = sample_positive_fock_mixture(cfg.nmax, s, budget=cfg.budget)
                out.append(_Sample(label, "fock", m, f"fock:{_probs_text(m)}"))
            else:
                k = 1 + s % cfg.components
                comps = sample_gaussian_mixture(k, s, grid_extent=cfg.grid_extent)
                desc = "gaussian:" + "|".join(
                    f"{_fmt(c.weight)}@{_fmt(c.mean[0])};{_fmt(c.mean[1])}" for c in comps
                )
                out.append(_Sample(label, "gaussian", comps, desc))
        except CapacityError as exc:
            return out, f"sampling stopped after {len(out)} states: {exc}"
    return out, None


# -- commands ----------------------------------------------------------------


def cmd_positivity(a) -> int:
    m = a.probs[0] if a.probs else FockMixture((1,))
    w = wigner_of_mixture(m)
    doc = {
        "probs": [float(p) for p in m.as_floats()],
        "positive": is_wigner_positive(w),
        "boundary_distance": boundary_distance(w),
    }
    _emit_json(doc, a.out)
    return EXIT_OK


def _state_pair(a):
    """States A and B for ``majorize``: explicit ``--probs`` (A defaults to
    the vacuum) or, with ``--seed``, a sampled B."""
    probs = a.probs or []
    if len(probs) > 2:
        raise UsageError("majorize takes at most two --probs")
    cfg = RunConfig.from_args(a)
    if len(probs) == 2:
        return probs[0], probs[1], cfg
    A = FockMixture((1,))
    if len(probs) == 1:
        return A, probs[0], cfg
    cfg.samples = 1
    samples, warn = _draw(cfg)
    if warn:
        raise CapacityError(warn)
    return A, samples[0].state, cfg


def _to_comparable(state, cfg: RunConfig, as_grid: bool):
    if isinstance(state, FockMixture):
        w = wigner_of_mixture(state)
        if not is_wigner_positive(w):
            raise DomainError(f"state {_probs_text(state)} has a negative Wigner function")
        return radial_wigner_grid(w, cfg.grid_extent, cfg.grid_size) if as_grid else w
    return gaussian_mixture_wigner(state, cfg.grid_extent, cfg.grid_size)


def _describe(state) -> str:
    if isinstance(state, FockMixture):
        return f"fock:{_probs_text(state)}"
    return f"gaussian:{len(state)} components"


def cmd_majorize(a) -> int:
    A, B, cfg = _state_pair(a)
    as_grid = not (isinstance(A, FockMixture) and isinstance(B, FockMixture))
    fa, fb = _to_comparable(A, cfg, as_grid), _to_comparable(B, cfg, as_grid)
    v = compare(fa, fb, cfg.tol)
    _emit_json({"a": _describe(A), "b": _describe(B), "verdict": v.to_dict()}, a.out)
    return EXIT_OK


def cmd_entropy(a) -> int:
    m = a.probs[0] if a.probs else FockMixture((1,))
    w = wigner_of_mixture(m)
    if not is_wigner_positive(w):
        raise DomainError(f"state {_probs_text(m)} has a negative Wigner function")
    alphas = tuple(a.alpha) if a.alpha else DEFAULT_ALPHAS
    h = wigner_entropy(m)
    hx, hp = marginal_entropies(m)
    renyi = {}
    for al in alphas:
        renyi[repr(float(al))] = h if al == 1.0 else renyi_entropy(w, al)
    doc = {
        "probs": [float(p) for p in m.as_floats()],
        "wigner_entropy": h,
        "marginal_entropies": {"hx": hx, "hp": hp},
        "mutual_information": hx + hp - h,
        "renyi": renyi,
    }
    _emit_json(doc, a.out)
    return EXIT_OK


def _finish_series(series: SeriesOutput, cfg: RunConfig, warn: str | None, violations: list[str]) -> int:
    if warn:
        series.metadata["warning"] = warn
    series.metadata["violations"] = len(violations)
    text = series.to_json() if cfg.fmt == "json" else series.to_csv()
    _emit(text, cfg.out)
    if warn:
        print(f"warning: {warn}", file=sys.stderr)
        return EXIT_DOMAIN
    if violations:
        print("conjecture violated by: " + ", ".join(violations), file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_cumulative(a) -> int:
    cfg = RunConfig.from_args(a)
    samples, warn = _draw(cfg)
    s_area = np.linspace(0.0, 60.0, 241)
    s_red = s_area / math.pi
    ref = radial_reduce(vacuum_wigner()).cumulative(s_red)

    def curve(smp: _Sample):
        if smp.kind == "fock":
            return radial_reduce(wigner_of_mixture(smp.state)).cumulative(s_red)
        grid = gaussian_mixture_wigner(smp.state, cfg.grid_extent, cfg.grid_size)
        return Sampled.from_grid(grid).cumulative(s_red)

    curves = _pmap(curve, samples)
    tol = cfg.tol if cfg.tol is not None else (1e-7 if cfg.ensemble == "fock" else cfg.grid_tol())
    meta = cfg.metadata()
    meta.update({"figure": "cumulative", "abscissa": "area", "tol": float(tol)})
    series = SeriesOutput(meta)
    series.rows += [("W0", x, y) for x, y in zip(s_area, ref)]
    violations = []
    for smp, S in zip(samples, curves):
        meta[smp.label] = smp.describe
        series.rows += [(smp.label, x, y) for x, y in zip(s_area, S)]
        if np.any(S > ref + tol):
            violations.append(smp.label)
    return _finish_series(series, cfg, warn, violations)


def _entropy_curve(state, alphas):
    vals = []
    for al in alphas:
        vals.append(shannon_entropy(state) if al == 1.0 else renyi_entropy(state, al))
    return np.array(vals)


def cmd_renyi(a) -> int:
    cfg = RunConfig.from_args(a)
    alphas = tuple(sorted(cfg.alphas))
    if any(al <= 0 for al in alphas):
        raise UsageError("alpha values must be positive")
    samples, warn = _draw(cfg)
    ref = _entropy_curve(vacuum_wigner(), alphas)

    def curve(smp: _Sample):
        st = wigner_of_mixture(smp.state) if smp.kind == "fock" else smp.state
        return _entropy_curve(st, alphas)

    curves = _pmap(curve, samples)
    meta = cfg.metadata()
    meta.update({"figure": "renyi", "abscissa": "alpha", "alphas": ";".join(_fmt(x) for x in alphas)})
    series = SeriesOutput(meta)
    series.rows += [("W0", al, h) for al, h in zip(alphas, ref)]
    violations = []
    for smp, h in zip(samples, curves):
        meta[smp.label] = smp.describe
        series.rows += [(smp.label, al, v) for al, v in zip(alphas, h)]
        if np.any(h < ref - ENTROPY_TOL):
            violations.append(smp.label)
    return _finish_series(series, cfg, warn, violations)


def cmd_verify_proof(a) -> int:
    tgrid = tuple(a.tgrid) if a.tgrid else DEFAULT_TGRID
    if any(not 0.0 <= t <= 1.0 for t in tgrid):
        raise UsageError("--tgrid values must lie in [0, 1]")
    report = run_restricted_proof(tgrid, inject_fault=a.inject_fault, seed=a.seed)
    _emit(report.to_json() + "\n", a.out)
    if not report.overall:
        names = ", ".join(s.name for s in report.failed())
        print(f"proof failed at: {names}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_sample(a) -> int:
    cfg = RunConfig.from_args(a)
    samples, warn = _draw(cfg)
    doc = {"metadata": cfg.metadata(), "states": []}
    for smp in samples:
        if smp.kind == "fock":
            entry = {"label": smp.label, "probs": [str(p) for p in smp.state.probs]}
        else:
            entry = {
                "label": smp.label,
                "components": [
                    {"weight": c.weight, "mean": list(c.mean), "cov": [list(r) for r in c.cov]} for c in smp.state
                ],
            }
        doc["states"].append(entry)
    if warn:
        doc["metadata"]["warning"] = warn
    _emit_json(doc, a.out)
    if warn:
        print(f"warning: {warn}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--probs", type=_probs, action="append", help="comma-separated Fock probabilities p0,p1,...")
    common.add_argument("--ensemble", choices=("fock", "gaussian"), default="fock")
    common.add_argument("--nmax", type=int, default=4, choices=range(0, 65), metavar="N")
    common.add_argument("--components", type=_positive_int, default=3)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    common.add_argument("--budget", type=_positive_int, default=10**6, help="rejection-sampling draws per state")
    common.add_argument("--grid-size", type=_grid_size, default=512)
    common.add_argument("--grid-extent", type=_positive, default=8.0)
    common.add_argument("--alpha", type=_floats, default=None, help="comma-separated Rényi orders")
    common.add_argument("--tol", type=_positive, default=None)
    common.add_argument("--tgrid", type=_floats, default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--inject-fault", choices=FAULTS, default=None, help=argparse.SUPPRESS)

    p = _Parser(prog="wigmaj", description="Continuous majorization of Wigner functions.")
    p.add_argument("--version", action="version", version=f"wigmaj {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, fn, help_ in (
        ("positivity", cmd_positivity, "Wigner positivity of a Fock mixture"),
        ("majorize", cmd_majorize, "compare two states"),
        ("entropy", cmd_entropy, "Wigner, marginal and Rényi entropies"),
        ("cumulative", cmd_cumulative, "cumulative integrals of W0 and sampled states"),
        ("renyi", cmd_renyi, "Rényi entropies of W0 and sampled states"),
        ("verify-proof", cmd_verify_proof, "run the two-photon proof checks"),
        ("sample", cmd_sample, "draw seeded random states"),
    ):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # alpha arrives as one tuple per flag
    if args.alpha is not None:
        args.alpha = tuple(args.alpha)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"wigmaj: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, CapacityError) as exc:
        print(f"wigmaj: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except WigmajError as exc:
        print(f"wigmaj: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
