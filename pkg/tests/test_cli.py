import json
import math
import os
import subprocess
import sys

import jsonschema
import pytest

from wigmaj import __version__
from wigmaj.cli import main
from wigmaj.entropics import marginal_entropies, mutual_information, wigner_entropy
from wigmaj.majorization import compare
from wigmaj.proof import REPORT_SCHEMA
from wigmaj.rearrangement import radial_reduce
from wigmaj.states import FockMixture, boundary_distance, is_wigner_positive, wigner_of_mixture

H0 = math.log(math.pi) + 1

CUMULATIVE_KEYS = ["tool", "version", "schema", "seed", "ensemble", "nmax", "samples",
             "figure", "abscissa", "tol", "state00", "state01", "violations"]
RENYI_GAUSS_KEYS = ["tool", "version", "schema", "seed", "ensemble", "components", "grid_extent",
                   "grid_size", "samples", "figure", "abscissa", "alphas", "state00", "state01", "violations"]
GOLDEN_CUMULATIVE_HEAD = f"""# tool=wigmaj
# version={__version__}
# schema=1
# seed=0
# ensemble=fock
# nmax=4
# samples=2
# figure=cumulative
# abscissa=area
# tol=1e-07
"""


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _cli(*argv, env=None):
    full = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "wigmaj", *argv], capture_output=True, env=full)


def test_positivity(capsys):
    code, out, _ = _run(capsys, "positivity", "--probs", "1,0,0")
    assert code == 0 and json.loads(out)["positive"] is True
    code, out, _ = _run(capsys, "positivity", "--probs", "0,1,0")
    assert code == 0 and json.loads(out)["positive"] is False


def test_positivity_round_trip(capsys):
    _, out, _ = _run(capsys, "positivity", "--probs", "0.4,0.3,0.3")
    doc = json.loads(out)
    w = wigner_of_mixture(FockMixture((0.4, 0.3, 0.3)))
    assert doc["positive"] == is_wigner_positive(w)
    assert doc["boundary_distance"] == boundary_distance(w)


@pytest.mark.parametrize("probs", ["abc", "0.5,0.6", "-1,2", ""])
def test_positivity_usage_errors(probs):
    assert _cli("positivity", "--probs", probs).returncode == 64


def test_usage_errors():
    assert _cli("cumulative", "--grid-size", "100").returncode == 64
    assert _cli("cumulative", "--grid-size", "8192").returncode == 64
    assert _cli("nonsense").returncode == 64


def test_majorize(capsys):
    code, out, _ = _run(capsys, "majorize", "--probs", "0.5,0.5,0")
    assert code == 0 and json.loads(out)["verdict"]["outcome"] == "Majorizes"
    code, out, _ = _run(capsys, "majorize", "--probs", "0.3,0.3,0.4", "--probs", "0.3,0.3,0.4")
    assert json.loads(out)["verdict"]["outcome"] == "Equivalent"
    code, out, _ = _run(capsys, "majorize", "--seed", "3")
    assert code == 0 and json.loads(out)["verdict"]["outcome"] == "Majorizes"


def test_majorize_round_trip(capsys):
    _, out, _ = _run(capsys, "majorize", "--probs", "0.6,0.3,0.1", "--probs", "0.5,0.3,0.2")
    lib = compare(radial_reduce(wigner_of_mixture(FockMixture((0.6, 0.3, 0.1)))),
                  radial_reduce(wigner_of_mixture(FockMixture((0.5, 0.3, 0.2)))))
    v = json.loads(out)["verdict"]
    assert v["outcome"] == lib.outcome.value
    assert v["margin"] == pytest.approx(lib.margin, abs=1e-15)


def test_majorize_negative_state(capsys):
    code, _, err = _run(capsys, "majorize", "--probs", "0,1")
    assert code == 2
    assert "negative" in err


def test_entropy(capsys):
    code, out, _ = _run(capsys, "entropy", "--probs", "1")
    doc = json.loads(out)
    assert code == 0
    assert doc["wigner_entropy"] == pytest.approx(H0, abs=1e-12)
    assert doc["mutual_information"] == pytest.approx(0.0, abs=1e-10)
    assert set(doc) == {"probs", "wigner_entropy", "marginal_entropies", "mutual_information", "renyi"}
    assert set(doc["marginal_entropies"]) == {"hx", "hp"}
    assert _run(capsys, "entropy", "--probs", "0,1")[0] == 2


def test_entropy_identity_and_round_trip(capsys):
    _, out, _ = _run(capsys, "entropy", "--probs", "0.5,0.2,0.3", "--alpha", "0.5,2")
    doc = json.loads(out)
    m = FockMixture((0.5, 0.2, 0.3))
    hx, hp = doc["marginal_entropies"]["hx"], doc["marginal_entropies"]["hp"]
    assert hx + hp - doc["mutual_information"] == pytest.approx(doc["wigner_entropy"], abs=1e-6)
    assert doc["wigner_entropy"] == wigner_entropy(m)
    assert doc["mutual_information"] == mutual_information(m)
    assert (hx, hp) == marginal_entropies(m)
    assert set(doc["renyi"]) == {"0.5", "2.0"}


def test_cumulative_golden_header(capsys):
    code, out, _ = _run(capsys, "cumulative", "--samples", "2")
    assert code == 0
    assert out.startswith(GOLDEN_CUMULATIVE_HEAD)
    lines = out.splitlines()
    keys = [ln[2:].split("=", 1)[0] for ln in lines if ln.startswith("# ")]
    assert keys == CUMULATIVE_KEYS
    assert lines[len(keys)] == "label,abscissa,value"


def test_cumulative_series(capsys):
    _, out, _ = _run(capsys, "cumulative", "--samples", "3", "--format", "json")
    doc = json.loads(out)
    assert doc["columns"] == ["label", "abscissa", "value"]
    rows = doc["rows"]
    assert rows == sorted(rows, key=lambda r: (r[0], r[1]))
    series = {}
    for label, s, v in rows:
        series.setdefault(label, []).append(v)
    assert set(series) == {"W0", "state00", "state01", "state02"}
    ref = series["W0"]
    for label, vals in series.items():
        assert vals[0] == 0.0
        # mass beyond the last area is below the grid tolerance
        assert vals[-1] == pytest.approx(1.0, abs=5e-4)
        assert all(v <= r + 1e-7 for v, r in zip(vals, ref))


def test_renyi_series(capsys):
    code, out, _ = _run(capsys, "renyi", "--samples", "2", "--ensemble", "gaussian", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert list(doc["metadata"]) == RENYI_GAUSS_KEYS
    w0 = {a: v for label, a, v in doc["rows"] if label == "W0"}
    assert w0[1.0] == pytest.approx(H0, abs=1e-6)
    assert w0[2.0] == pytest.approx(math.log(math.pi) + math.log(2), abs=1e-12)
    for label, a, v in doc["rows"]:
        assert v >= w0[a] - 1e-6


def test_verify_proof(capsys):
    code, out, _ = _run(capsys, "verify-proof", "--tgrid", "0,0.5,1")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["overall"] is True


def test_verify_proof_fault(capsys):
    code, out, err = _run(capsys, "verify-proof", "--tgrid", "0.5", "--inject-fault", "scale-fc")
    assert code == 1
    assert "split-normalization[fc]" in err
    assert json.loads(out)["overall"] is False


def test_sample(capsys):
    code, out, _ = _run(capsys, "sample", "--samples", "2", "--nmax", "2")
    doc = json.loads(out)
    assert code == 0 and len(doc["states"]) == 2


def test_budget_exhaustion_exits_nonzero(capsys):
    code, out, err = _run(capsys, "cumulative", "--samples", "2", "--budget", "1", "--seed", "0")
    assert code == 2
    assert "warning" in err
    assert out.startswith("# tool=wigmaj")


def test_out_file(tmp_path, capsys):
    p = tmp_path / "s.csv"
    assert _run(capsys, "renyi", "--samples", "1", "--out", str(p))[0] == 0
    assert p.read_text().startswith("# tool=wigmaj")


@pytest.mark.parametrize("argv", [
    ("cumulative", "--seed", "5", "--samples", "4"),
    ("renyi", "--seed", "5", "--samples", "3", "--ensemble", "gaussian", "--format", "json"),
    ("sample", "--seed", "9", "--samples", "3"),
])
def test_determinism_across_thread_counts(argv):
    a = _cli(*argv, env={"WIGMAJ_THREADS": "1"})
    b = _cli(*argv, env={"WIGMAJ_THREADS": "4"})
    c = _cli(*argv, env={"WIGMAJ_THREADS": "4"})
    assert a.returncode == 0
    assert a.stdout == b.stdout == c.stdout


def test_version():
    r = _cli("--version")
    assert r.returncode == 0
    assert __version__ in r.stdout.decode()
