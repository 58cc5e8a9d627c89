import math

import numpy as np
import pytest

from wigmaj.entropics import renyi_entropy, schur_battery, shannon_entropy
from wigmaj.errors import CertificationError, ContractError, NormalizationError
from wigmaj.majorization import (
    Outcome,
    ShiftFamily,
    compare,
    compare_plus,
    convex_mixture_check,
    discrete_oracle,
    certify_kernel_mixture,
    certify_split_compare,
    mix_profiles,
)
from wigmaj.proof import X_STAR, proof_profiles, split_points
from wigmaj.rearrangement import ClosedForm, radial_reduce, shift_profile
from wigmaj.states import (
    radial_wigner_grid,
    sample_positive_fock_mixture,
    vacuum_wigner,
    wigner_of_mixture,
)

P = proof_profiles()
F0, FB, FC, FD = P["f0"], P["fb"], P["fc"], P["fd"]

# f_b against f_c, pinned from a run checked against discrete_oracle at 1e5 bins
FB_FC_MARGIN = -0.08255643247487694
FB_FC_MAX_GAP = 0.129451024323038


def _random(seed, nmax=4):
    return radial_reduce(wigner_of_mixture(sample_positive_fock_mixture(nmax, seed)))


def _named():
    out = {"f0": F0, "fb": FB, "fc": FC, "fd": FD}
    for t in (0.1, 0.25, 0.5, 0.75, 0.9):
        out[f"g{t}"] = proof_profiles(t)["g_t"]
    return out


def test_compare_examples():
    assert compare(F0, FB).outcome is Outcome.MAJORIZES
    assert compare(F0, shift_profile(F0, 3.0)).outcome is Outcome.EQUIVALENT


def test_compare_fb_fc_regression():
    v = compare(FB, FC)
    assert v.outcome is Outcome.INCOMPARABLE
    assert v.margin == pytest.approx(FB_FC_MARGIN, abs=1e-9)
    assert v.max_gap == pytest.approx(FB_FC_MAX_GAP, abs=1e-9)
    behind, ahead = v.witnesses
    assert FB.cumulative(np.array([behind]))[0] < FC.cumulative(np.array([behind]))[0]
    assert FB.cumulative(np.array([ahead]))[0] > FC.cumulative(np.array([ahead]))[0]
    dense = discrete_oracle(FB, FC, bins=100_000)
    assert dense.outcome is Outcome.INCOMPARABLE
    assert dense.margin == pytest.approx(FB_FC_MARGIN, abs=1e-4)
    assert dense.max_gap == pytest.approx(FB_FC_MAX_GAP, abs=1e-4)


def test_compare_swaps():
    for f, g in ((F0, FB), (FB, FC), (FD, F0)):
        v, w = compare(f, g), compare(g, f)
        assert w.outcome is v.outcome.swapped()
        assert w.margin == pytest.approx(-v.max_gap, abs=1e-12)


def test_compare_mass_mismatch():
    with pytest.raises(NormalizationError):
        compare(F0, FB.scale(1.01))


def test_compare_plus_examples():
    assert compare_plus(F0, FD).outcome is Outcome.MAJORIZES
    v = compare_plus(FB, FC, tgrid=[0.0])
    assert v.outcome is Outcome.EQUIVALENT
    for seed in range(5):
        assert compare_plus(F0, _random(seed)).outcome is Outcome.MAJORIZES


def test_criteria_agree_on_named_and_random():
    profs = list(_named().values()) + [_random(s) for s in range(50)]
    for i, f in enumerate(profs):
        for g in profs[i + 1::17]:
            assert compare(f, g).outcome is compare_plus(f, g).outcome


def test_equivalent_iff_mutual():
    for f, g in ((F0, shift_profile(F0, 2.0)), (F0, FB), (FB, FC)):
        v = compare(f, g)
        mutual = v.holds and compare(g, f).holds
        assert (v.outcome is Outcome.EQUIVALENT) == mutual


def test_transitivity():
    profs = list(_named().values()) + [_random(s) for s in range(8)]
    n = len(profs)
    verdicts = {}
    for i in range(n):
        verdicts[i, i] = Outcome.EQUIVALENT
        for j in range(i + 1, n):
            o = compare(profs[i], profs[j]).outcome
            verdicts[i, j], verdicts[j, i] = o, o.swapped()
    for i in range(n):
        for j in range(n):
            if verdicts[i, j] is not Outcome.MAJORIZES:
                continue
            for k in range(n):
                if verdicts[j, k] is Outcome.MAJORIZES:
                    assert verdicts[i, k] is Outcome.MAJORIZES


def test_schur_consistency():
    alphas = (0.5, 0.8, 1.2, 2.0, 3.0, 5.0)
    profs = list(_named().values()) + [_random(s) for s in range(4)]
    for f in profs:
        for g in profs:
            if compare(f, g).outcome is not Outcome.MAJORIZES:
                continue
            assert schur_battery(f, g).ok
            assert shannon_entropy(f) <= shannon_entropy(g) + 1e-6
            for a in alphas:
                if a != 1.0:
                    assert renyi_entropy(f, a) <= renyi_entropy(g, a) + 1e-6


def test_radial_reduction_preserves_verdict():
    for i in range(20):
        a = wigner_of_mixture(sample_positive_fock_mixture(4, 100 + i))
        b = wigner_of_mixture(sample_positive_fock_mixture(4, 200 + i))
        reduced = compare(radial_reduce(a), radial_reduce(b)).outcome
        assert compare(radial_wigner_grid(a), radial_wigner_grid(b)).outcome is reduced


def test_grid_compare_units_are_area():
    g0 = radial_wigner_grid(vacuum_wigner())
    gb = radial_wigner_grid(wigner_of_mixture(sample_positive_fock_mixture(2, 1)))
    v = compare(g0, gb)
    assert v.units == "area"
    assert v.outcome is Outcome.MAJORIZES


def test_convex_mixture_check():
    assert convex_mixture_check(F0, FB, FD, 0.5)
    assert convex_mixture_check(F0, FB, FD, 0.0) == compare(F0, FD).holds
    assert convex_mixture_check(F0, FB, FD, 1.0) == compare(F0, FB).holds
    with pytest.raises(ContractError):
        convex_mixture_check(FB, FC, FD, 0.5)


def test_mix_profiles_linear():
    m = mix_profiles(FB, FD, 0.3)
    x = np.linspace(0, 15, 31)
    assert np.allclose(m(x), 0.3 * FB(x) + 0.7 * FD(x), atol=1e-16)


def test_kernel_mixture_certificates():
    kb = lambda a: math.exp(-a)
    kd = lambda a: a * math.exp(-a)
    cb = certify_kernel_mixture(kb, ShiftFamily(F0), FB)
    cd = certify_kernel_mixture(kd, ShiftFamily(F0), FD)
    assert cb and cd
    assert cb.residual < 1e-12 and cd.residual < 1e-12
    assert cb.verdict.outcome is Outcome.MAJORIZES


def test_kernel_narrow_box_is_identity():
    eps = 1e-9
    box = lambda a: 1.0 / eps if a < eps else 0.0
    c = certify_kernel_mixture(box, ShiftFamily(F0), F0, xgrid=np.linspace(0.01, 20, 100), kernel_breaks=(eps,))
    assert c.verdict.outcome is Outcome.EQUIVALENT


def test_kernel_certificate_failures():
    with pytest.raises(ContractError):
        certify_kernel_mixture(lambda a: 2 * math.exp(-a), ShiftFamily(F0), FB)
    with pytest.raises(CertificationError) as info:
        certify_kernel_mixture(lambda a: math.exp(-a), ShiftFamily(F0), FD)
    assert info.value.residual > 1e-3


def test_split_compare_fc():
    f1, f2 = F0.restrict(0, X_STAR), F0.restrict(X_STAR, math.inf)
    g1, g2 = FC.restrict(0, 1.0), FC.restrict(1.0, math.inf)
    cert = certify_split_compare(f1, f2, g1, g2)
    assert cert and cert.verdict.outcome is Outcome.MAJORIZES
    assert certify_split_compare(f1, f2, f1, f2).verdict.outcome is Outcome.EQUIVALENT


@pytest.mark.parametrize("t", [0.25, 0.5, 0.75])
def test_split_compare_gt(t):
    _, a, b = split_points(t)
    g = proof_profiles(t)["g_t"]
    cert = certify_split_compare(F0.restrict(0, b), F0.restrict(b, math.inf), g.restrict(0, a), g.restrict(a, math.inf))
    assert cert
    assert cert.verdict.outcome is compare(F0, g).outcome


def test_split_compare_contracts():
    with pytest.raises(ContractError):
        certify_split_compare(F0.restrict(0, 1), F0.restrict(0.5, math.inf), FC.restrict(0, 1), FC.restrict(1, math.inf))
    with pytest.raises(NormalizationError):
        certify_split_compare(F0.restrict(0, 0.5), F0.restrict(0.5, math.inf), FC.restrict(0, 1), FC.restrict(1, math.inf))


def test_discrete_oracle_examples():
    g0 = radial_wigner_grid(vacuum_wigner())
    gb = radial_wigner_grid(wigner_of_mixture(sample_positive_fock_mixture(1, 0)))
    assert discrete_oracle(F0, FB).outcome is Outcome.MAJORIZES
    assert discrete_oracle(g0, gb).outcome is Outcome.MAJORIZES
    assert discrete_oracle(FC, FC).outcome is Outcome.EQUIVALENT


def test_discrete_oracle_agrees_on_random_pairs():
    for i in range(100):
        f, g = _random(300 + i), _random(400 + i)
        v = discrete_oracle(f, g)
        assert compare(f, g, tol=v.tol).outcome is v.outcome


def test_verdict_dict_keys():
    d = compare(F0, FB).to_dict()
    assert set(d) == {"outcome", "witnesses", "margin", "max_gap", "tol", "criterion", "units"}


def test_closed_form_sum():
    s = F0.restrict(0, 1) + F0.restrict(1, math.inf)
    assert isinstance(s, ClosedForm)
    assert compare(s, F0).outcome is Outcome.EQUIVALENT
