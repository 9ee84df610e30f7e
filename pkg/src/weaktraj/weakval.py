"""Complex weak values of the spatial projector and transverse momentum.

All weak values are ratios ``<chi| O |psi> / <chi|psi>`` evaluated with the
closed-form Gaussian machinery of :mod:`weaktraj.qcore`; a quadrature route
is kept alongside as an independent oracle.  Values are always complex --
readouts that only see the real part take it at the reporting layer.
"""

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from . import qcore
from .errors import ProfileError, VanishingOverlapError
from .qcore import QuadraticForm, StateSpec, gauss_integral, gauss_integral_x
from .quadrature import complex_quad
from .units import UnitSystem

DEFAULT_EPS_DEN = 1e-12

SlitConfig = Literal["both", "slit1", "slit2"]


@dataclass(frozen=True)
class InteractionProfile:
    """Spatial profile of the probe coupling.

    ``point`` evaluates fields at the probe position (the delta-profile
    default).  ``gaussian`` integrates the weak-value numerator against a
    Gaussian window of the given width; with ``normalized`` the window has
    unit area (the delta limit), otherwise unit peak height, which makes
    projector weak values dimensionless.  ``center`` pins the window to a
    fixed position instead of the probe's own.
    """

    kind: Literal["point", "gaussian"] = "point"
    width: Optional[float] = None
    center: Optional[float] = None
    normalized: bool = True

    def __post_init__(self):
        if self.kind not in ("point", "gaussian"):
            raise ProfileError(f"unknown profile kind {self.kind!r}")
        if self.kind == "gaussian":
            if self.width is None or self.width <= 0:
                raise ProfileError("gaussian profile needs a positive width")


POINT = InteractionProfile("point")


@dataclass(frozen=True)
class WeakValueRecord:
    value: complex
    operator: Literal["projector", "momentum"]
    probe_position: float
    probe_time: float
    slit_config: SlitConfig = "both"

    @property
    def pointer_observable(self) -> float:
        """The part a weakly coupled pointer actually displays."""
        return self.value.real


# ---------------------------------------------------------------------------
# overlaps
# ---------------------------------------------------------------------------

def overlap(post: StateSpec, pre: StateSpec, t: float, units: UnitSystem,
            method: str = "closed") -> complex:
    """Post-selection amplitude ``int conj(chi)(x, t) psi(x, t) dx``.

    Closed form sums the pairwise Gaussian overlaps; ``method="quadrature"``
    integrates the product on a truncated grid instead and exists as the
    independent cross-check.
    """
    if method == "closed":
        total = 0.0 + 0.0j
        for wq, fq in qcore.state_forms(post, t, units):
            for wp, fp in qcore.state_forms(pre, t, units):
                total += np.conj(wq) * wp * qcore.pair_overlap(fq, fp)
        return total
    if method == "quadrature":
        lo, hi = _support_window(post, pre, t, units)
        panels = _oscillation_panels(post, pre, t, units, lo, hi)
        return complex_quad(
            lambda x: np.conj(qcore.state_value(post, x, t, units))
            * qcore.state_value(pre, x, t, units), lo, hi, panels=panels)
    raise ValueError(f"unknown overlap method {method!r}")


def _oscillation_panels(post, pre, t, units, lo, hi, max_panels=512):
    """Panel count resolving the fastest phase winding of any bra-ket pair."""
    cycles = 0.0
    for _, fq in qcore.state_forms(post, t, units):
        for _, fp in qcore.state_forms(pre, t, units):
            comb = fq.conjugate() * fp
            for x in (lo, hi):
                grad = abs((2.0 * comb.q2 * x + comb.q1).imag)
                cycles = max(cycles, grad * (hi - lo) / (2.0 * math.pi))
    panels = max(8, int(cycles / 40.0) + 1)  # GL-800 resolves >> 40 cycles/panel
    if panels > max_panels:
        raise ValueError(
            f"overlap quadrature would need {panels} panels; integrand too "
            f"oscillatory for the fallback, use the closed form")
    return panels


def state_norm(state: StateSpec, t: float, units: UnitSystem) -> float:
    return math.sqrt(abs(overlap(state, state, t, units)))


def common_time(post: StateSpec, pre: StateSpec) -> float:
    """Earliest time at which both states are evaluable."""
    t_lo = max(p.reference_time for _, p in pre.components)
    t_hi = min(p.reference_time for _, p in post.components)
    if t_lo > t_hi:
        raise ValueError("pre-state starts after the post-state detection time")
    return t_lo


def _support_window(post, pre, t, units, n_widths: float = 8.0):
    centers, spreads = [], []
    for st in (post, pre):
        for _, p in st.components:
            centers.append(p.classical_position(t, units))
            spreads.append(p.spread(t, units))
    w = max(spreads)
    return min(centers) - n_widths * w, max(centers) + n_widths * w


def _checked_overlap(post, pre, t, units, eps_den) -> complex:
    den = overlap(post, pre, t, units)
    scale = state_norm(post, t, units) * state_norm(pre, t, units)
    if abs(den) < eps_den * scale:
        raise VanishingOverlapError(
            f"|<chi|psi>| = {abs(den):.3e} below {eps_den:.1e} x norm product "
            f"{scale:.3e}; post-selection nearly impossible")
    return den


# ---------------------------------------------------------------------------
# profile-weighted numerators
# ---------------------------------------------------------------------------

def _window_form(profile: InteractionProfile, x_a: float) -> QuadraticForm:
    w = profile.width
    xc = profile.center if profile.center is not None else x_a
    q0 = -xc * xc / (2.0 * w * w)
    if profile.normalized:
        q0 -= 0.5 * math.log(2.0 * math.pi * w * w)
    return QuadraticForm(-1.0 / (2.0 * w * w), xc / (w * w), q0)


def _numerator(pre, post, x_a, t, units, profile, derivative: bool) -> complex:
    """``int conj(chi) D[psi] Gamma dx`` with D = identity or d/dx.

    For the point profile this is the plain product at ``x_a``; for the
    gaussian profile each bra-ket pair contributes a closed-form first or
    zeroth moment of a combined Gaussian.
    """
    if profile.kind == "point":
        x = profile.center if profile.center is not None else x_a
        chi = qcore.state_value(post, x, t, units)
        psi = (qcore.state_derivative(pre, x, t, units) if derivative
               else qcore.state_value(pre, x, t, units))
        return complex(np.conj(chi) * psi)
    win = _window_form(profile, x_a)
    total = 0.0 + 0.0j
    for wq, fq in qcore.state_forms(post, t, units):
        for wp, fp in qcore.state_forms(pre, t, units):
            combined = fq.conjugate() * fp * win
            base = gauss_integral(combined.q2, combined.q1, combined.q0)
            if derivative:
                # d/dx psi contributes (2 q2 x + q1) under the integral
                first = gauss_integral_x(combined.q2, combined.q1, combined.q0)
                total += np.conj(wq) * wp * (2.0 * fp.q2 * first + fp.q1 * base)
            else:
                total += np.conj(wq) * wp * base
    return total


# ---------------------------------------------------------------------------
# weak values
# ---------------------------------------------------------------------------

def projector_weak_value(pre: StateSpec, post: StateSpec, probe_position: float,
                         probe_time: float, profile: InteractionProfile = POINT,
                         units: UnitSystem = None, *,
                         slit_config: SlitConfig = "both",
                         eps_den: float = DEFAULT_EPS_DEN) -> WeakValueRecord:
    """Weak value of the position projector at the probe's space-time point."""
    if units is None:
        raise TypeError("units must be provided")
    den = _checked_overlap(post, pre, probe_time, units, eps_den)
    num = _numerator(pre, post, probe_position, probe_time, units, profile,
                     derivative=False)
    return WeakValueRecord(num / den, "projector", probe_position, probe_time,
                           slit_config)


def momentum_weak_value(pre: StateSpec, post: StateSpec, probe_position: float,
                        probe_time: float, profile: InteractionProfile = POINT,
                        units: UnitSystem = None, *,
                        slit_config: SlitConfig = "both",
                        eps_den: float = DEFAULT_EPS_DEN) -> WeakValueRecord:
    """Weak value of the transverse momentum ``-i hbar d/dx`` at the probe."""
    if units is None:
        raise TypeError("units must be provided")
    den = _checked_overlap(post, pre, probe_time, units, eps_den)
    num = -1j * units.hbar * _numerator(pre, post, probe_position, probe_time,
                                        units, profile, derivative=True)
    return WeakValueRecord(num / den, "momentum", probe_position, probe_time,
                           slit_config)


def projector_weak_value_sum_rule(pre: StateSpec, post: StateSpec, t: float,
                                  units: UnitSystem, *,
                                  eps_den: float = DEFAULT_EPS_DEN,
                                  n_points: int = 20001) -> complex:
    """Numerical ``int (Pi_x)^w dx`` over the joint support; must equal 1.

    Integrates the pointwise weak value on a trapezoid grid spanning +-8
    widths of every component, as an end-to-end consistency check of the
    numerator/denominator conventions.
    """
    den = _checked_overlap(post, pre, t, units, eps_den)
    lo, hi = _support_window(post, pre, t, units)
    x = np.linspace(lo, hi, n_points)
    wv = np.conj(qcore.state_value(post, x, t, units)) \
        * qcore.state_value(pre, x, t, units) / den
    return np.trapezoid(wv, x)


def overlap_ratio(post: StateSpec, pre: StateSpec, component: int, t: float,
                  units: UnitSystem, *, eps_den: float = DEFAULT_EPS_DEN) -> complex:
    """Weighted component overlap ratio ``R_l = <chi| w_l psi^l> / <chi|psi>``.

    The weights are included so that the ratios of a pre-state sum to one
    exactly and the per-slit reconstruction identities hold to rounding.
    """
    den = _checked_overlap(post, pre, t, units, eps_den)
    part = pre.component_state(component)
    return overlap(post, part, t, units) / den


def per_slit_component(pre: StateSpec, post: StateSpec, pre_index: int,
                       probe_position: float, probe_time: float,
                       units: UnitSystem, *, post_index: Optional[int] = None,
                       profile: InteractionProfile = POINT,
                       mode: Literal["full", "single"] = "full",
                       eps_den: float = DEFAULT_EPS_DEN) -> complex:
    """Per-slit momentum contribution ``(k^{jl})^w`` or single-slit value ``kappa^l``.

    ``mode="full"`` keeps the full two-slit denominator and restricts the
    numerator to pre component ``pre_index`` (and, when ``post_index`` is
    given, to that post component), weights included:
    ``k^{jl} = <b_j Xi_j| k | a_l psi^l>(x_a) / <chi|psi>``.
    Summed over all index pairs these reproduce the full weak value exactly.

    ``mode="single"`` is the value actually measured with only that slit
    open: the full post state against the bare component,
    ``kappa^l = <chi| k |psi^l>(x_a) / <chi|psi^l>``.
    """
    if mode == "single":
        part = StateSpec(((1.0, pre.components[pre_index][1]),), role="pre")
        try:
            rec = momentum_weak_value(part, post, probe_position, probe_time,
                                      profile, units, eps_den=eps_den)
        except VanishingOverlapError as exc:
            raise VanishingOverlapError(
                f"single-slit denominator <chi|psi^{pre_index}> vanishes: {exc}")
        return rec.value
    if mode != "full":
        raise ValueError(f"unknown mode {mode!r}")
    try:
        den = _checked_overlap(post, pre, probe_time, units, eps_den)
    except VanishingOverlapError as exc:
        raise VanishingOverlapError(f"full two-slit denominator vanishes: {exc}")
    pre_part = pre.component_state(pre_index)
    post_part = post if post_index is None else post.component_state(post_index)
    num = -1j * units.hbar * _numerator(pre_part, post_part, probe_position,
                                        probe_time, units, profile,
                                        derivative=True)
    return num / den
