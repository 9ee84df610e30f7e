"""Four-crystal photonic protocol: forward polarization simulation, contrast
inversion, and per-path decomposition.

Each birefringent crystal rotates the H/V phases by ``theta = gamma * k^w``
where ``k^w`` is the transverse-momentum weak value at the crystal.  In
idealized mode the rotations are the real parts (the regime the inversion
formulas assume); exact mode applies the full complex value, making the
H/V amplitudes non-unitary, and quantifies the approximation.

The published inversion formulas for the B and D crystals recover twice the
rotation when checked against the published step states; the versions here
are re-derived from those step states so that forward-then-invert is an
identity (see the round-trip tests).  ``arccos`` only determines rotation
magnitudes, so signed recovery needs the signs of the accumulated rotations
(``sign_hints``); observationally, contrast data alone cannot distinguish
the sign-flipped solutions.
"""

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from . import weakval
from .errors import BranchGuardError, ContrastRangeError
from .qcore import StateSpec
from .units import UnitSystem
from .weakval import POINT, InteractionProfile

BRANCH_GUARD = math.pi / 4.0

Mode = Literal["idealized", "exact"]
CrystalId = Literal["A", "B", "C", "D"]


@dataclass(frozen=True)
class Crystal:
    """A birefringent crystal coupling transverse momentum to polarization."""

    id: CrystalId
    x: float
    t: float
    gamma: float
    phase_shifted: bool = False
    profile: InteractionProfile = POINT


@dataclass(frozen=True)
class PolarizationState:
    amp_h: complex
    amp_v: complex

    def intensities(self) -> Tuple[float, float]:
        """(I_diag_plus, I_diag_minus) in the diagonal basis."""
        plus = abs((self.amp_h + self.amp_v) / math.sqrt(2.0)) ** 2
        minus = abs((self.amp_h - self.amp_v) / math.sqrt(2.0)) ** 2
        return plus, minus

    def contrast(self) -> float:
        plus, minus = self.intensities()
        total = plus + minus
        if total == 0.0:
            raise ZeroDivisionError("polarization state has zero intensity")
        return (plus - minus) / total


DIAGONAL_PLUS = PolarizationState(1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))


@dataclass(frozen=True)
class ContrastSet:
    step: int
    scheme: Literal["two_slit", "single_slit_1", "single_slit_2"]
    contrast: float
    intensity_plus: float
    intensity_minus: float


def apply_crystal(pol: PolarizationState, theta: complex) -> PolarizationState:
    """Phase-rotate H and V by ``exp(-+ i theta)``; additive over applications."""
    return PolarizationState(cmath.exp(-1j * theta) * pol.amp_h,
                             cmath.exp(+1j * theta) * pol.amp_v)


def crystal_rotation(crystal: Crystal, k_value: complex, mode: Mode) -> complex:
    """``gamma * k^w`` with the phase-shifter sign and the mode's Re-projection."""
    theta = crystal.gamma * (k_value.real if mode == "idealized" else k_value)
    return -theta if crystal.phase_shifted else theta


# ---------------------------------------------------------------------------
# protocol setup and forward simulation
# ---------------------------------------------------------------------------

TWO_SLIT_STEPS = {1: ("A",), 2: ("A", "C"), 3: ("A", "C", "B", "D"),
                  4: ("A", "C", "B", "D")}
STEP4_SHIFTED = "B"  # step 4 repeats step 3 with a pi phase-shifter on B

# appendix schemes: (open slit config, crystal with phase shifter)
SINGLE_SLIT_SCHEMES = {1: ("slit1", None), 2: ("slit1", "D"),
                       3: ("slit2", None), 4: ("slit2", "D")}


@dataclass
class ProtocolSetup:
    """Everything the eight schemes need: states per slit configuration,
    the four crystals, and the unit system."""

    pre_states: Dict[str, StateSpec]  # keys: both, slit1, slit2
    post: StateSpec
    crystals: Dict[str, Crystal]
    units: UnitSystem
    mode: Mode = "idealized"

    def weak_values(self, config: str) -> Dict[str, complex]:
        """Momentum weak value at each crystal for the given open slits."""
        pre = self.pre_states[config]
        out = {}
        for cid, crystal in self.crystals.items():
            rec = weakval.momentum_weak_value(
                pre, self.post, crystal.x, crystal.t, crystal.profile,
                self.units, slit_config=config)
            out[cid] = rec.value
        return out

    def zeta(self, config: str) -> complex:
        """Post-selection amplitude per photon, ``<chi|psi> / sqrt(2)``."""
        pre = self.pre_states[config]
        t = weakval.common_time(self.post, pre)
        return weakval.overlap(self.post, pre, t, self.units) / math.sqrt(2.0)


def run_step(step: int, setup: ProtocolSetup, config: str = "both",
             k_values: Optional[Dict[str, complex]] = None
             ) -> Tuple[PolarizationState, ContrastSet]:
    """Simulate two-slit protocol step 1..4 under the given slit configuration."""
    if step not in TWO_SLIT_STEPS:
        raise ValueError(f"step must be 1..4, got {step}")
    if k_values is None:
        k_values = setup.weak_values(config)
    zeta = setup.zeta(config)
    pol = PolarizationState(zeta, zeta)  # zeta * (|H> + |V>), diagonal input
    for cid in TWO_SLIT_STEPS[step]:
        crystal = setup.crystals[cid]
        if step == 4 and cid == STEP4_SHIFTED:
            # step 4 adds a pi shifter on top of the configured crystal
            crystal = Crystal(crystal.id, crystal.x, crystal.t, crystal.gamma,
                              phase_shifted=not crystal.phase_shifted,
                              profile=crystal.profile)
        pol = apply_crystal(pol, crystal_rotation(crystal, k_values[cid],
                                                  setup.mode))
    plus, minus = pol.intensities()
    scheme = {"both": "two_slit", "slit1": "single_slit_1",
              "slit2": "single_slit_2"}[config]
    return pol, ContrastSet(step, scheme, pol.contrast(), plus, minus)


def run_single_slit_scheme(scheme: int, setup: ProtocolSetup,
                           k_values: Optional[Dict[str, complex]] = None
                           ) -> Tuple[PolarizationState, ContrastSet]:
    """Simulate appendix scheme 1..4 (B and D crystals, one slit open)."""
    if scheme not in SINGLE_SLIT_SCHEMES:
        raise ValueError(f"scheme must be 1..4, got {scheme}")
    config, shifted = SINGLE_SLIT_SCHEMES[scheme]
    if k_values is None:
        k_values = setup.weak_values(config)
    pre = setup.pre_states[config]
    t0 = weakval.common_time(setup.post, pre)
    zeta = weakval.overlap(setup.post, pre, t0, setup.units)
    pol = PolarizationState(zeta / math.sqrt(2.0), zeta / math.sqrt(2.0))
    for cid in ("B", "D"):
        crystal = setup.crystals[cid]
        if cid == shifted:
            crystal = Crystal(crystal.id, crystal.x, crystal.t, crystal.gamma,
                              phase_shifted=not crystal.phase_shifted,
                              profile=crystal.profile)
        pol = apply_crystal(pol, crystal_rotation(crystal, k_values[cid],
                                                  setup.mode))
    plus, minus = pol.intensities()
    label = "single_slit_1" if config == "slit1" else "single_slit_2"
    return pol, ContrastSet(scheme, label, pol.contrast(), plus, minus)


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------

def _branch_angle(contrast: float, sign: float, label: str) -> float:
    if not -1.0 <= contrast <= 1.0:
        raise ContrastRangeError(f"{label}: contrast {contrast} outside [-1, 1]")
    return math.copysign(0.5 * math.acos(contrast), sign if sign != 0 else 1.0)


def _check_branch(rotations: Dict[str, float]):
    for key, theta in rotations.items():
        if abs(theta) >= BRANCH_GUARD:
            raise BranchGuardError(
                f"recovered |gamma k| = {abs(theta):.4f} rad for {key} exceeds "
                f"the pi/4 branch guard")


def invert_two_slit(contrasts: Sequence[float], gammas: Dict[str, float],
                    sign_hints: Sequence[float] = (1, 1, 1, 1)
                    ) -> Dict[str, float]:
    """Recover the four weak values from the step-1..4 contrasts.

    With ``S_n = sign_n * arccos(C_n) / 2`` (the signed accumulated rotation
    of step n), the step states give exactly

    ``theta_A = S_1``, ``theta_C = S_2 - S_1``,
    ``theta_B = (S_3 - S_4) / 2``, ``theta_D = (S_3 + S_4) / 2 - S_2``,

    and each weak value is ``theta / gamma``.  ``sign_hints`` carries the
    signs of the accumulated rotations (all positive by default); they are
    not observable in the diagonal-basis intensities.  Recovery further
    assumes every accumulated rotation S_n lies within (-pi/2, pi/2): beyond
    that the arccos aliases and no inversion of the contrasts is possible.
    """
    if len(contrasts) != 4:
        raise ValueError("need the four step contrasts C1..C4")
    s = [_branch_angle(c, sg, f"C{i+1}")
         for i, (c, sg) in enumerate(zip(contrasts, sign_hints))]
    theta = {"A": s[0], "C": s[1] - s[0],
             "B": 0.5 * (s[2] - s[3]), "D": 0.5 * (s[2] + s[3]) - s[1]}
    _check_branch(theta)
    return {cid: theta[cid] / gammas[cid] for cid in "ACBD"}


def invert_single_slit(contrasts: Sequence[float], gammas: Dict[str, float],
                       sign_hints: Sequence[float] = (1, 1, 1, 1)
                       ) -> Dict[str, float]:
    """Recover the single-slit values kappa_B^l, kappa_D^l from the appendix
    scheme contrasts C'_1..C'_4 (schemes 1,2: slit 1; schemes 3,4: slit 2;
    even schemes carry the phase shifter on D)."""
    if len(contrasts) != 4:
        raise ValueError("need the four scheme contrasts C'1..C'4")
    s = [_branch_angle(c, sg, f"C'{i+1}")
         for i, (c, sg) in enumerate(zip(contrasts, sign_hints))]
    theta = {"B1": 0.5 * (s[0] + s[1]), "D1": 0.5 * (s[0] - s[1]),
             "B2": 0.5 * (s[2] + s[3]), "D2": 0.5 * (s[2] - s[3])}
    _check_branch(theta)
    return {"B1": theta["B1"] / gammas["B"], "D1": theta["D1"] / gammas["D"],
            "B2": theta["B2"] / gammas["B"], "D2": theta["D2"] / gammas["D"]}


def accumulated_rotation_signs(thetas: Dict[str, complex],
                               which: str) -> Tuple[float, ...]:
    """Signs of the accumulated real rotations, for use as inversion hints
    when the forward model is known (simulation or calibration data)."""
    t = {k: v.real if isinstance(v, complex) else v for k, v in thetas.items()}
    if which == "two_slit":
        sums = (t["A"], t["A"] + t["C"],
                t["A"] + t["C"] + t["B"] + t["D"],
                t["A"] + t["C"] - t["B"] + t["D"])
    elif which == "single_slit_1":
        sums = (t["B1"] + t["D1"], t["B1"] - t["D1"])
    elif which == "single_slit_2":
        sums = (t["B2"] + t["D2"], t["B2"] - t["D2"])
    else:
        raise ValueError(f"unknown scheme family {which!r}")
    return tuple(1.0 if v >= 0 else -1.0 for v in sums)


# ---------------------------------------------------------------------------
# path decomposition
# ---------------------------------------------------------------------------

def parse_paths(k_b: complex, k_d: complex, kappa_b1: complex, kappa_b2: complex,
                kappa_d1: complex, kappa_d2: complex,
                ratios: Tuple[complex, complex]) -> Dict[str, complex]:
    """Per-path contributions ``k_a^{jl} = kappa_a^l R_l``.

    ``ratios = (R_1, R_2)`` are the weighted overlap ratios from
    :func:`weaktraj.weakval.overlap_ratio`; by construction
    ``k_B = k_B^{11} + k_B^{12}`` and ``k_D = k_D^{21} + k_D^{22}``.
    """
    r1, r2 = ratios
    return {"k_B11": kappa_b1 * r1, "k_B12": kappa_b2 * r2,
            "k_D21": kappa_d1 * r1, "k_D22": kappa_d2 * r2}


def ratios_from_measurements(k_b: float, k_d: float, kappa_b1: float,
                             kappa_b2: float, kappa_d1: float,
                             kappa_d2: float) -> Tuple[float, float]:
    """Solve ``k_B = kappa_B^1 R1 + kappa_B^2 R2`` and the D analogue for
    (R1, R2) -- the all-measured route to the path decomposition."""
    mat = np.array([[kappa_b1, kappa_b2], [kappa_d1, kappa_d2]])
    rhs = np.array([k_b, k_d])
    r1, r2 = np.linalg.solve(mat, rhs)
    return r1, r2


# ---------------------------------------------------------------------------
# full report
# ---------------------------------------------------------------------------

@dataclass
class SchemeRecord:
    name: str
    slit_config: str
    step: int
    crystals: Tuple[str, ...]
    phase_shifted: Tuple[str, ...]
    intensity_plus: float
    intensity_minus: float
    contrast: float


@dataclass
class ProtocolReport:
    """Everything the eight schemes produce, plus recovered weak values,
    path decomposition, and the slit-open/closed signature table."""

    mode: Mode
    schemes: List[SchemeRecord] = field(default_factory=list)
    true_values: Dict[str, Dict[str, complex]] = field(default_factory=dict)
    recovered: Dict[str, Dict[str, float]] = field(default_factory=dict)
    single_slit_recovered: Dict[str, float] = field(default_factory=dict)
    ratios_exact: Tuple[complex, complex] = (0j, 0j)
    ratios_measured: Tuple[float, float] = (0.0, 0.0)
    parsed_paths: Dict[str, complex] = field(default_factory=dict)
    contributions: Dict[str, Dict[str, float]] = field(default_factory=dict)


def protocol_report(setup: ProtocolSetup) -> ProtocolReport:
    """Run every scheme, invert the contrasts, and decompose the paths.

    ``recovered[config]`` holds the inversion output of the two-slit
    protocol executed with that slit configuration physically enforced
    ("both" plus the two closed-slit controls of the signature discussion).
    ``contributions[config]`` rescales the closed-slit values by the
    measured overlap ratio into the two-slit normalization, the common
    denominator in which per-path contributions are comparable across
    configurations.
    """
    report = ProtocolReport(mode=setup.mode)

    k_by_config = {cfg: setup.weak_values(cfg) for cfg in ("both", "slit1", "slit2")}
    report.true_values = k_by_config

    # two-slit protocol (steps 1-4) under each closure state
    for cfg in ("both", "slit1", "slit2"):
        ks = k_by_config[cfg]
        contrasts = []
        for step in (1, 2, 3, 4):
            pol, cset = run_step(step, setup, cfg, k_values=ks)
            shifted = ("B",) if step == 4 else ()
            report.schemes.append(SchemeRecord(
                f"{cset.scheme}_step{step}", cfg, step, TWO_SLIT_STEPS[step],
                shifted, cset.intensity_plus, cset.intensity_minus,
                cset.contrast))
            contrasts.append(cset.contrast)
        # effective rotations include any configured phase shifter
        thetas = {cid: crystal_rotation(setup.crystals[cid], ks[cid],
                                        "idealized") for cid in "ABCD"}
        hints = accumulated_rotation_signs(thetas, "two_slit")
        gammas = {cid: setup.crystals[cid].gamma for cid in "ABCD"}
        report.recovered[cfg] = invert_two_slit(contrasts, gammas, hints)

    # appendix single-slit schemes
    prime_contrasts = []
    for scheme in (1, 2, 3, 4):
        cfg, shifted = SINGLE_SLIT_SCHEMES[scheme]
        pol, cset = run_single_slit_scheme(scheme, setup,
                                           k_values=k_by_config[cfg])
        report.schemes.append(SchemeRecord(
            f"appendix_scheme{scheme}", cfg, scheme, ("B", "D"),
            (shifted,) if shifted else (), cset.intensity_plus,
            cset.intensity_minus, cset.contrast))
        prime_contrasts.append(cset.contrast)
    kappa_thetas = {
        "B1": crystal_rotation(setup.crystals["B"], k_by_config["slit1"]["B"],
                               "idealized"),
        "D1": crystal_rotation(setup.crystals["D"], k_by_config["slit1"]["D"],
                               "idealized"),
        "B2": crystal_rotation(setup.crystals["B"], k_by_config["slit2"]["B"],
                               "idealized"),
        "D2": crystal_rotation(setup.crystals["D"], k_by_config["slit2"]["D"],
                               "idealized"),
    }
    hints = (accumulated_rotation_signs(kappa_thetas, "single_slit_1")
             + accumulated_rotation_signs(kappa_thetas, "single_slit_2"))
    gammas = {cid: setup.crystals[cid].gamma for cid in "ABCD"}
    report.single_slit_recovered = invert_single_slit(prime_contrasts, gammas,
                                                      hints)

    # path decomposition: exact ratios from the state overlaps, measured
    # ratios from the recovered weak values alone
    pre_both = setup.pre_states["both"]
    t0 = weakval.common_time(setup.post, pre_both)
    r1 = weakval.overlap_ratio(setup.post, pre_both, 0, t0, setup.units)
    r2 = weakval.overlap_ratio(setup.post, pre_both, 1, t0, setup.units)
    r1, r2 = complex(r1), complex(r2)
    report.ratios_exact = (r1, r2)
    rec = report.single_slit_recovered
    both = report.recovered["both"]
    try:
        r1m, r2m = ratios_from_measurements(
            both["B"], both["D"], rec["B1"], rec["B2"], rec["D1"], rec["D2"])
        report.ratios_measured = (float(r1m), float(r2m))
    except np.linalg.LinAlgError:
        report.ratios_measured = (math.nan, math.nan)
    report.parsed_paths = parse_paths(both["B"], both["D"], rec["B1"],
                                      rec["B2"], rec["D1"], rec["D2"],
                                      (r1, r2))

    # signature table in the common (two-slit) normalization
    scale = {"both": 1.0 + 0.0j, "slit1": r1, "slit2": r2}
    for cfg in ("both", "slit1", "slit2"):
        report.contributions[cfg] = {
            cid: float((report.recovered[cfg][cid] * scale[cfg]).real)
            for cid in "ACBD"}
    return report
