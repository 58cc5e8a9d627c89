import json
import math

import jsonschema
import numpy as np
import pytest
from scipy.integrate import quad

from wigmaj.errors import DomainError
from wigmaj.proof import (
    DEFAULT_TGRID,
    REPORT_SCHEMA,
    X_STAR,
    certify_shift_rescale_steps,
    check_ratio_bounds,
    check_split_normalizations,
    kernel_b,
    kernel_d,
    proof_profiles,
    run_restricted_proof,
    shift_factor,
    split_points,
)
from wigmaj.rearrangement import radial_reduce
from wigmaj.states import ExtremalState, extremal_wigner

# 1 - 2/e by hand: int_0^1 e^-x (x-1)^2 dx and int_0^(1 - ln 2) e^-x dx
LEFT_MASS = 1 - 2 / math.e


@pytest.fixture(scope="module")
def report():
    return run_restricted_proof()


def test_profiles():
    P = proof_profiles()
    assert set(P) == {"f0", "fb", "fc", "fd"}
    assert P["fc"](np.array([0.0]))[0] == 1.0
    x = np.linspace(0, 20, 100)
    assert np.allclose(proof_profiles(1.0)["g_t"](x), P["fc"](x), atol=1e-15)
    assert np.allclose(proof_profiles(0.0)["g_t"](x), P["fd"](x), atol=1e-15)
    with pytest.raises(DomainError):
        proof_profiles(1.5)


@pytest.mark.parametrize("t", [0.2, 0.5, 0.8])
def test_g_t_is_reduced_ellipse_state(t):
    x = np.linspace(0, 20, 50)
    w = radial_reduce(extremal_wigner(ExtremalState.ellipse(t)))
    assert np.allclose(proof_profiles(t)["g_t"](x), w(x), atol=1e-14)


def test_split_points():
    xs, a1, b1 = split_points(1.0)
    assert xs == pytest.approx(0.3068528194400547, abs=1e-15)
    assert a1 == pytest.approx(1.0, abs=1e-15)
    assert b1 == pytest.approx(X_STAR, abs=1e-15)
    _, a0, b0 = split_points(0.0)
    assert a0 == 0.0 and b0 == 0.0


def test_split_point_order():
    for t in np.linspace(0, 1, 101):
        _, a, b = split_points(t)
        assert b <= a <= 1


def test_a_t_is_zero_of_g_t():
    for t in (0.1, 0.5, 0.9):
        _, a, _ = split_points(t)
        assert proof_profiles(t)["g_t"](np.array([a]))[0] == pytest.approx(0.0, abs=1e-15)


def test_left_mass_oracle():
    fc = quad(lambda x: math.exp(-x) * (x - 1) ** 2, 0, 1, epsabs=1e-15)[0]
    f0 = quad(lambda x: math.exp(-x), 0, X_STAR, epsabs=1e-15)[0]
    assert fc == pytest.approx(LEFT_MASS, abs=1e-14)
    assert f0 == pytest.approx(LEFT_MASS, abs=1e-14)


def test_split_normalizations():
    step = check_split_normalizations()
    assert step.passed and step.residual < 1e-12
    for t in (0.0, 0.5, 1.0):
        assert check_split_normalizations(t).residual < 1e-12


def test_split_normalization_t_half_against_quad():
    t = 0.5
    _, a, b = split_points(t)
    g = proof_profiles(t)["g_t"]
    left_g = quad(lambda x: g(np.array([x]))[0], 0, a, epsabs=1e-15)[0]
    assert left_g == pytest.approx(1 - math.exp(-b), abs=1e-13)


def test_ratio_bounds():
    step = check_ratio_bounds()
    assert step.passed
    assert (X_STAR - 1) ** 2 == pytest.approx(math.log(2) ** 2, abs=1e-15)
    assert check_ratio_bounds(0.5).passed
    # brute-force max of the t=0.5 ratio on [0, b_t]
    t = 0.5
    _, a, b = split_points(t)
    x = np.linspace(0, b, 10001)
    assert np.max((t + 1) / 2 * (x - a) ** 2) <= 1.0


def test_shift_factor():
    assert shift_factor(1.0) == pytest.approx(2 / math.e, abs=1e-15)
    assert shift_factor(0.0) == pytest.approx(1.0, abs=1e-15)
    t = 0.3
    assert shift_factor(t) == pytest.approx((t + 1) * math.exp(math.sqrt((1 - t) / (1 + t)) - 1), abs=1e-15)


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0])
def test_shift_rescale(t):
    step = certify_shift_rescale_steps(t)
    assert step.passed and step.residual < 1e-12


def test_kernels_normalized():
    assert quad(kernel_b, 0, math.inf)[0] == pytest.approx(1.0, abs=1e-12)
    assert quad(kernel_d, 0, math.inf)[0] == pytest.approx(1.0, abs=1e-12)


def test_full_proof_passes(report):
    assert report.overall
    assert tuple(report.tgrid) == tuple(DEFAULT_TGRID)
    assert all(s.residual < 1e-10 for s in report.steps)
    names = [s.name for s in report.steps]
    assert names[:2] == ["kernel-mixture[fb]", "kernel-mixture[fd]"]
    for t in DEFAULT_TGRID:
        assert f"compare[f0,g_{t:g}]" in names
    assert "convex-mixtures[n=100]" in names


def test_report_schema(report):
    doc = json.loads(report.to_json())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert set(doc) == {"schema_version", "overall", "tgrid", "fault", "steps"}
    assert set(doc["steps"][0]) == {"name", "status", "residual", "detail", "citations"}


def test_injected_fault_is_caught():
    rep = run_restricted_proof(tgrid=(0.5,), inject_fault="scale-fc", mixtures=10)
    assert not rep.overall
    failed = {s.name for s in rep.failed()}
    assert "split-normalization[fc]" in failed
    assert not any("t=0.5" in n for n in failed)
    jsonschema.validate(json.loads(rep.to_json()), REPORT_SCHEMA)


def test_unknown_fault_rejected():
    with pytest.raises(DomainError):
        run_restricted_proof(inject_fault="nope")
