"""Polarization protocol: crystal algebra, inversion round-trips, path parsing."""

import math

import numpy as np
import pytest

from weaktraj import (PolarizationState, apply_crystal, invert_single_slit,
                      invert_two_slit, load_scenario, parse_paths,
                      protocol_report, run_step)
from weaktraj.errors import BranchGuardError, ContrastRangeError
from weaktraj.protocol import (DIAGONAL_PLUS, accumulated_rotation_signs,
                               ratios_from_measurements)

GAMMAS = {"A": 1.0, "B": 1.0, "C": 1.0, "D": 1.0}


def forward_contrasts(thetas):
    """Contrasts of the four two-slit steps for given real rotations."""
    sums = (thetas["A"],
            thetas["A"] + thetas["C"],
            thetas["A"] + thetas["C"] + thetas["B"] + thetas["D"],
            thetas["A"] + thetas["C"] - thetas["B"] + thetas["D"])
    out = []
    for s in sums:
        pol = apply_crystal(DIAGONAL_PLUS, s)
        out.append(pol.contrast())
    return out


def forward_single_slit_contrasts(kappa_thetas):
    sums = (kappa_thetas["B1"] + kappa_thetas["D1"],
            kappa_thetas["B1"] - kappa_thetas["D1"],
            kappa_thetas["B2"] + kappa_thetas["D2"],
            kappa_thetas["B2"] - kappa_thetas["D2"])
    return [apply_crystal(DIAGONAL_PLUS, s).contrast() for s in sums]


# --- crystal algebra ---------------------------------------------------------

def test_apply_crystal_identity():
    out = apply_crystal(DIAGONAL_PLUS, 0.0)
    assert out.amp_h == DIAGONAL_PLUS.amp_h
    assert out.amp_v == DIAGONAL_PLUS.amp_v


def test_quarter_rotation_balances_intensities():
    out = apply_crystal(DIAGONAL_PLUS, math.pi / 4)
    plus, minus = out.intensities()
    assert plus == pytest.approx(minus, abs=1e-15)
    assert out.contrast() == pytest.approx(0.0, abs=1e-15)


def test_rotations_compose_additively():
    a, b = 0.31, -0.14
    once = apply_crystal(apply_crystal(DIAGONAL_PLUS, a), b)
    direct = apply_crystal(DIAGONAL_PLUS, a + b)
    assert once.amp_h == pytest.approx(direct.amp_h, rel=1e-15)
    assert once.amp_v == pytest.approx(direct.amp_v, rel=1e-15)


def test_contrast_identity_on_random_rotation_sets():
    rng = np.random.default_rng(77)
    for _ in range(1000):
        total = rng.uniform(-0.7, 0.7)
        pol = apply_crystal(PolarizationState(0.3 + 0.2j, 0.3 + 0.2j), total)
        assert pol.contrast() == pytest.approx(math.cos(2 * total), abs=1e-12)


def test_contrast_independent_of_zeta():
    rng = np.random.default_rng(78)
    for _ in range(20):
        zeta = complex(rng.normal(), rng.normal())
        if abs(zeta) < 1e-3:
            continue
        theta = rng.uniform(-0.5, 0.5)
        ref = apply_crystal(PolarizationState(1.0, 1.0), theta).contrast()
        scaled = apply_crystal(PolarizationState(zeta, zeta), theta).contrast()
        assert scaled == pytest.approx(ref, abs=1e-14)


# --- inversion ---------------------------------------------------------------

def test_round_trip_spec_example():
    thetas = {"A": 0.05, "C": -0.03, "B": 0.08, "D": 0.02}
    contrasts = forward_contrasts(thetas)
    hints = accumulated_rotation_signs(thetas, "two_slit")
    got = invert_two_slit(contrasts, GAMMAS, hints)
    for cid in "ACBD":
        assert got[cid] == pytest.approx(thetas[cid], abs=1e-10)


def test_round_trip_random_sets():
    rng = np.random.default_rng(99)
    for _ in range(200):
        thetas = {cid: rng.uniform(-0.1, 0.1) for cid in "ACBD"}
        contrasts = forward_contrasts(thetas)
        hints = accumulated_rotation_signs(thetas, "two_slit")
        got = invert_two_slit(contrasts, GAMMAS, hints)
        for cid in "ACBD":
            assert abs(got[cid] - thetas[cid]) < 1e-10


def test_all_unit_contrasts_recover_zero():
    got = invert_two_slit([1.0, 1.0, 1.0, 1.0], GAMMAS)
    assert all(v == 0.0 for v in got.values())
    got = invert_single_slit([1.0, 1.0, 1.0, 1.0], GAMMAS)
    assert all(v == 0.0 for v in got.values())


def test_single_crystal_contrast_algebra():
    theta = 0.1
    contrasts = forward_contrasts({"A": theta, "C": 0.0, "B": 0.0, "D": 0.0})
    assert contrasts[0] == pytest.approx(math.cos(2 * theta), abs=1e-14)
    got = invert_two_slit(contrasts, GAMMAS)
    assert got["A"] == pytest.approx(theta, abs=1e-12)


def test_contrast_range_validation():
    with pytest.raises(ContrastRangeError):
        invert_two_slit([1.2, 1.0, 1.0, 1.0], GAMMAS)


def test_branch_guard():
    # step contrasts consistent with a rotation beyond pi/4 on one crystal
    thetas = {"A": 0.9, "C": 0.0, "B": 0.0, "D": 0.0}
    contrasts = forward_contrasts(thetas)
    with pytest.raises(BranchGuardError):
        invert_two_slit(contrasts, GAMMAS)


def test_single_slit_round_trip_and_consistency():
    rng = np.random.default_rng(101)
    for _ in range(200):
        kt = {k: rng.uniform(-0.1, 0.1) for k in ("B1", "D1", "B2", "D2")}
        contrasts = forward_single_slit_contrasts(kt)
        hints = (accumulated_rotation_signs(kt, "single_slit_1")
                 + accumulated_rotation_signs(kt, "single_slit_2"))
        got = invert_single_slit(contrasts, GAMMAS, hints)
        for key in kt:
            assert abs(got[key] - kt[key]) < 1e-10


def test_single_slit_sum_difference_structure():
    # C'1 and C'2 encode kappa_B + kappa_D and kappa_B - kappa_D
    kt = {"B1": 0.07, "D1": 0.02, "B2": 0.0, "D2": 0.0}
    c = forward_single_slit_contrasts(kt)
    assert math.acos(c[0]) == pytest.approx(2 * (0.07 + 0.02), abs=1e-12)
    assert math.acos(c[1]) == pytest.approx(2 * (0.07 - 0.02), abs=1e-12)


def test_sign_ambiguity_is_observational():
    # two different rotation sets giving identical contrasts on every scheme:
    # no contrast-only inversion can separate them, hence the sign hints
    t1 = {"A": 0.05, "C": -0.03, "B": 0.08, "D": 0.02}
    t2 = {"A": 0.05, "C": -0.03, "B": 0.04, "D": 0.06}
    c1 = forward_contrasts(t1)
    c2 = forward_contrasts(t2)
    np.testing.assert_allclose(c1, c2, atol=1e-15)


def test_complex_mode_small_imaginary_consistency():
    # complex rotations with |Im| <= 0.01 |Re|: inverting the exact-mode
    # contrasts with the real-mode formulas recovers Re within 1e-3
    rng = np.random.default_rng(55)
    for _ in range(50):
        re = {cid: rng.uniform(-0.1, 0.1) for cid in "ACBD"}
        z = {cid: complex(re[cid], 0.01 * re[cid] * rng.uniform(-1, 1))
             for cid in "ACBD"}
        sums = (z["A"], z["A"] + z["C"], z["A"] + z["C"] + z["B"] + z["D"],
                z["A"] + z["C"] - z["B"] + z["D"])
        contrasts = [apply_crystal(DIAGONAL_PLUS, s).contrast() for s in sums]
        hints = accumulated_rotation_signs(re, "two_slit")
        got = invert_two_slit(contrasts, GAMMAS, hints)
        for cid in "ACBD":
            assert abs(got[cid] - re[cid]) <= 1e-3


# --- path parsing ------------------------------------------------------------

def test_parse_paths_degenerate_ratio():
    out = parse_paths(0.5, 0.2, 0.5, 0.9, 0.1, 0.2, (1.0, 0.0))
    assert out["k_B12"] == 0.0
    assert out["k_B11"] == pytest.approx(0.5)


def test_parse_paths_closure():
    r1, r2 = 0.6 + 0.1j, 0.4 - 0.1j
    kb1, kb2, kd1, kd2 = 0.3, -0.2, 0.15, 0.45
    k_b = kb1 * r1 + kb2 * r2
    k_d = kd1 * r1 + kd2 * r2
    out = parse_paths(k_b, k_d, kb1, kb2, kd1, kd2, (r1, r2))
    assert out["k_B11"] + out["k_B12"] == pytest.approx(k_b, abs=1e-12)
    assert out["k_D21"] + out["k_D22"] == pytest.approx(k_d, abs=1e-12)


def test_ratios_from_measurements_inverts_linear_system():
    r1, r2 = 0.55, 0.45
    kb1, kb2, kd1, kd2 = 0.3, -0.2, 0.15, 0.45
    got = ratios_from_measurements(kb1 * r1 + kb2 * r2, kd1 * r1 + kd2 * r2,
                                   kb1, kb2, kd1, kd2)
    assert got[0] == pytest.approx(r1, abs=1e-12)
    assert got[1] == pytest.approx(r2, abs=1e-12)


# --- scenario-driven protocol ------------------------------------------------

@pytest.fixture(scope="module")
def default_report():
    setup = load_scenario("protocol_default").protocol_setup()
    return setup, protocol_report(setup)


def test_step_contrast_matches_cos_of_rotation(default_report):
    setup, report = default_report
    ks = setup.weak_values("both")
    _, cset = run_step(1, setup, "both", k_values=ks)
    theta = setup.crystals["A"].gamma * ks["A"].real
    assert cset.contrast == pytest.approx(math.cos(2 * theta), abs=1e-14)


def test_step4_is_step3_with_negated_b(default_report):
    setup, report = default_report
    ks = setup.weak_values("both")
    _, c3 = run_step(3, setup, "both", k_values=ks)
    _, c4 = run_step(4, setup, "both", k_values=ks)
    th = {cid: setup.crystals[cid].gamma * ks[cid].real for cid in "ACBD"}
    assert c3.contrast == pytest.approx(
        math.cos(2 * (th["A"] + th["C"] + th["B"] + th["D"])), abs=1e-14)
    assert c4.contrast == pytest.approx(
        math.cos(2 * (th["A"] + th["C"] - th["B"] + th["D"])), abs=1e-14)


def test_zero_couplings_give_unit_contrasts():
    setup = load_scenario("protocol_default").protocol_setup()
    zeroed = {cid: ks * 0.0 for cid, ks in setup.weak_values("both").items()}
    for step in (1, 2, 3, 4):
        _, cset = run_step(step, setup, "both", k_values=zeroed)
        assert cset.contrast == pytest.approx(1.0, abs=1e-15)


def test_report_round_trip_recovers_true_values(default_report):
    setup, report = default_report
    for cfg in ("both", "slit1", "slit2"):
        true = setup.weak_values(cfg)
        for cid in "ACBD":
            assert report.recovered[cfg][cid] == pytest.approx(
                true[cid].real, abs=1e-10)


def test_report_slit_closure_signature(default_report):
    setup, report = default_report
    # closing slit 1 (only slit 2 open)
    assert abs(report.recovered["slit2"]["A"]) < 1e-8
    assert report.recovered["slit2"]["B"] == pytest.approx(
        report.single_slit_recovered["B2"], abs=1e-8)
    assert report.recovered["slit2"]["D"] == pytest.approx(
        report.single_slit_recovered["D2"], abs=1e-8)
    assert report.contributions["slit2"]["C"] == pytest.approx(
        report.contributions["both"]["C"], abs=1e-8)
    # mirror: closing slit 2
    assert abs(report.recovered["slit1"]["C"]) < 1e-8
    assert report.recovered["slit1"]["B"] == pytest.approx(
        report.single_slit_recovered["B1"], abs=1e-8)
    assert report.recovered["slit1"]["D"] == pytest.approx(
        report.single_slit_recovered["D1"], abs=1e-8)
    assert report.contributions["slit1"]["A"] == pytest.approx(
        report.contributions["both"]["A"], abs=1e-8)


def test_report_parsed_paths_match_direct_evaluation(default_report):
    from weaktraj import per_slit_component, overlap_ratio
    setup, report = default_report
    pre = setup.pre_states["both"]
    units = setup.units
    bc, dc = setup.crystals["B"], setup.crystals["D"]
    for key, crystal, l in (("k_B11", bc, 0), ("k_B12", bc, 1),
                            ("k_D21", dc, 0), ("k_D22", dc, 1)):
        kappa = per_slit_component(pre, setup.post, l, crystal.x, crystal.t,
                                   units, mode="single")
        ratio = overlap_ratio(setup.post, pre, l, 0.0, units)
        direct = kappa * ratio
        assert report.parsed_paths[key].real == pytest.approx(
            direct.real, abs=1e-10)


def test_report_mirror_symmetry_of_paths(default_report):
    setup, report = default_report
    assert report.parsed_paths["k_B11"].real == pytest.approx(
        -report.parsed_paths["k_D22"].real, abs=1e-8)
    assert report.parsed_paths["k_B12"].real == pytest.approx(
        -report.parsed_paths["k_D21"].real, abs=1e-8)


def test_measured_ratios_match_exact(default_report):
    setup, report = default_report
    r1, r2 = report.ratios_exact
    m1, m2 = report.ratios_measured
    assert m1 == pytest.approx(r1.real, abs=1e-9)
    assert m2 == pytest.approx(r2.real, abs=1e-9)


def test_configured_phase_shifter_recovers_effective_rotation():
    # a crystal installed with its own pi shifter contributes -gamma k
    # everywhere; the report recovers that effective value consistently
    from weaktraj.protocol import Crystal, ProtocolSetup
    cfg = load_scenario("protocol_default")
    setup = cfg.protocol_setup()
    flipped = dict(setup.crystals)
    d = flipped["D"]
    flipped["D"] = Crystal(d.id, d.x, d.t, d.gamma, phase_shifted=True)
    setup2 = ProtocolSetup(setup.pre_states, setup.post, flipped, setup.units)
    base = protocol_report(setup)
    shifted = protocol_report(setup2)
    for cfg_name in ("both", "slit1", "slit2"):
        assert shifted.recovered[cfg_name]["D"] == pytest.approx(
            -base.recovered[cfg_name]["D"], abs=1e-10)
        for cid in "ACB":
            assert shifted.recovered[cfg_name][cid] == pytest.approx(
                base.recovered[cfg_name][cid], abs=1e-10)


def test_exact_mode_contrast_includes_imaginary_damping(default_report):
    setup, _ = default_report
    ks = setup.weak_values("both")
    exact_setup = load_scenario("protocol_default").protocol_setup(mode="exact")
    _, c_ideal = run_step(1, setup, "both", k_values=ks)
    _, c_exact = run_step(1, exact_setup, "both", k_values=ks)
    z = exact_setup.crystals["A"].gamma * ks["A"]
    predicted = math.cos(2 * z.real) / math.cosh(2 * z.imag)
    assert c_exact.contrast == pytest.approx(predicted, abs=1e-12)
    assert c_exact.contrast != pytest.approx(c_ideal.contrast, abs=1e-15)
