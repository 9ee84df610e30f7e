"""Analytic wavepacket states and propagators for the double-slit simulator.

Everything in this module reduces to complex Gaussians of the form
``exp(q2 x^2 + q1 x + q0)`` with ``Re(q2) < 0``.  Free propagation, slit
transmission and pair overlaps are then single applications of the closed
complex-Gaussian integral, so all state evaluations stay exact (no grids)
and remain cheap to evaluate over arrays of positions.
"""

from dataclasses import dataclass
from typing import Literal, Sequence, Tuple

import numpy as np

from .errors import DegenerateTimeError, EmptyStateError
from .units import UnitSystem

Role = Literal["forward", "backward"]


# ---------------------------------------------------------------------------
# complex Gaussian machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticForm:
    """A complex Gaussian ``exp(q2 x^2 + q1 x + q0)``."""

    q2: complex
    q1: complex
    q0: complex

    def value(self, x):
        x = np.asarray(x)
        return np.exp(self.q2 * x * x + self.q1 * x + self.q0)

    def derivative(self, x):
        """d/dx of the Gaussian, evaluated analytically."""
        x = np.asarray(x)
        return (2.0 * self.q2 * x + self.q1) * self.value(x)

    def conjugate(self) -> "QuadraticForm":
        return QuadraticForm(np.conj(self.q2), np.conj(self.q1), np.conj(self.q0))

    def __mul__(self, other: "QuadraticForm") -> "QuadraticForm":
        return QuadraticForm(self.q2 + other.q2, self.q1 + other.q1, self.q0 + other.q0)


def gauss_integral(a: complex, b: complex, c: complex) -> complex:
    """Closed form of the full-line integral of ``exp(a x^2 + b x + c)``.

    Requires ``Re(a) < 0`` (decaying Gaussian) or ``Re(a) = 0`` with
    ``Im(a) != 0`` (Fresnel case, conditionally convergent).  The square
    root is taken on the principal branch.
    """
    a = complex(a)
    if a.real > 0 or (a.real == 0 and a.imag == 0):
        raise ValueError(f"divergent Gaussian integral: a = {a}")
    return np.sqrt(np.pi / (-a)) * np.exp(c - b * b / (4.0 * a))


def gauss_integral_x(a: complex, b: complex, c: complex) -> complex:
    """Closed form of the first moment ``int x exp(a x^2 + b x + c) dx``."""
    return (-b / (2.0 * a)) * gauss_integral(a, b, c)


def form_integral(form: QuadraticForm) -> complex:
    return gauss_integral(form.q2, form.q1, form.q0)


def pair_overlap(bra: QuadraticForm, ket: QuadraticForm) -> complex:
    """``int conj(bra)(x) ket(x) dx`` for two complex Gaussians."""
    return form_integral(bra.conjugate() * ket)


# ---------------------------------------------------------------------------
# free propagator
# ---------------------------------------------------------------------------

def free_propagator(x_to, t_to: float, x_from, t_from: float,
                    units: UnitSystem) -> complex:
    """Free-particle kernel ``<x_to| exp(-i p^2 (t_to - t_from) / 2m hbar) |x_from>``.

    Returns ``sqrt(m / (2 i pi hbar dt)) exp(i m (x_to - x_from)^2 / (2 hbar dt))``
    on the principal square-root branch.

    Raises
    ------
    DegenerateTimeError
        If ``t_to <= t_from``.
    """
    dt = t_to - t_from
    if dt <= 0:
        raise DegenerateTimeError(f"free_propagator needs t_to > t_from, got dt = {dt}")
    m, hbar = units.mass, units.hbar
    pref = np.sqrt(m / (2j * np.pi * hbar * dt))
    dx = np.asarray(x_to) - np.asarray(x_from)
    return pref * np.exp(1j * m * dx * dx / (2.0 * hbar * dt))


# ---------------------------------------------------------------------------
# Gaussian packets and states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianPacket:
    """One normalized complex Gaussian component.

    At its reference time the packet reads
    ``(2 pi width^2)^(-1/4) exp(-(x - center)^2 / (4 width^2)
    + i momentum (x - center) / hbar)``,
    i.e. unit L2 norm with position spread ``width``.

    ``role`` selects the direction of evaluation: ``forward`` packets are
    defined at ``reference_time`` and evolved to later times, ``backward``
    packets (post-selection components) are defined at the detection time
    and evaluated at earlier times via conjugate evolution, so that the
    density maximum follows ``center + (momentum / m)(t - reference_time)``
    in both cases.
    """

    center: float
    width: float
    momentum: float
    reference_time: float = 0.0
    role: Role = "forward"

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("packet width must be positive")
        if self.role not in ("forward", "backward"):
            raise ValueError(f"unknown role {self.role!r}")

    def classical_position(self, t: float, units: UnitSystem) -> float:
        return self.center + (self.momentum / units.mass) * (t - self.reference_time)

    def spread(self, t: float, units: UnitSystem) -> float:
        """|psi|^2 standard deviation at time t (grows symmetrically in |t - t0|)."""
        dt = abs(t - self.reference_time)
        tau = units.hbar * dt / (2.0 * units.mass * self.width ** 2)
        return self.width * np.sqrt(1.0 + tau * tau)


def _reference_form(packet: GaussianPacket, units: UnitSystem) -> QuadraticForm:
    d, xc, p = packet.width, packet.center, packet.momentum
    hbar = units.hbar
    q2 = -1.0 / (4.0 * d * d)
    q1 = xc / (2.0 * d * d) + 1j * p / hbar
    q0 = (-0.25 * np.log(2.0 * np.pi * d * d)
          - xc * xc / (4.0 * d * d) - 1j * p * xc / hbar)
    return QuadraticForm(q2, q1, q0)


def _propagate_form(form: QuadraticForm, dt: float, units: UnitSystem) -> QuadraticForm:
    """Apply the free kernel over dt > 0 to a Gaussian form, in closed form."""
    m, hbar = units.mass, units.hbar
    mu = m / (2.0 * hbar * dt)
    if not np.isfinite(mu):
        return form  # dt below float resolution: identity evolution
    # completing the square in the integration variable and simplifying the
    # mu^2 terms analytically (they overflow long before mu does):
    #   q2' = i mu q2 / a,  q1' = i mu q1 / a,  a = q2 + i mu
    a = form.q2 + 1j * mu
    pref = 0.5 * np.log(m / (2j * np.pi * hbar * dt)) + 0.5 * np.log(np.pi / (-a))
    q2 = 1j * mu * form.q2 / a
    q1 = 1j * mu * form.q1 / a
    q0 = form.q0 - form.q1 * form.q1 / (4.0 * a) + pref
    return QuadraticForm(q2, q1, q0)


def packet_form(packet: GaussianPacket, t: float, units: UnitSystem) -> QuadraticForm:
    """Quadratic form of the packet amplitude at time ``t``.

    Forward packets require ``t >= reference_time``; backward packets
    require ``t <= reference_time``.
    """
    dt = t - packet.reference_time
    if packet.role == "forward":
        if dt < 0:
            raise DegenerateTimeError(
                f"forward packet evaluated before its reference time (dt = {dt})")
        if dt == 0:
            return _reference_form(packet, units)
        return _propagate_form(_reference_form(packet, units), dt, units)
    if dt > 0:
        raise DegenerateTimeError(
            f"backward packet evaluated after its reference time (dt = {dt})")
    if dt == 0:
        return _reference_form(packet, units)
    # chi(x, t) = conj( int K(x', t0 | x, t) conj(chi(x', t0)) dx' ):
    # propagate the conjugate packet forward over -dt, then conjugate back.
    conj_ref = _reference_form(packet, units).conjugate()
    return _propagate_form(conj_ref, -dt, units).conjugate()


def packet_value(packet: GaussianPacket, x, t: float, units: UnitSystem):
    """Amplitude of the freely evolved packet at ``(x, t)``."""
    return packet_form(packet, t, units).value(x)


@dataclass(frozen=True)
class StateSpec:
    """Weighted superposition of Gaussian packets.

    ``role`` is "pre" for forward-evolving pre-selected states and "post"
    for backward-evaluated post-selected states; every component packet
    must carry the matching packet role.
    """

    components: Tuple[Tuple[complex, GaussianPacket], ...]
    role: Literal["pre", "post"] = "pre"

    def __post_init__(self):
        if len(self.components) == 0:
            raise EmptyStateError("state needs at least one component")
        if all(abs(w) == 0 for w, _ in self.components):
            raise EmptyStateError("state weights are all zero")
        want = "forward" if self.role == "pre" else "backward"
        for _, pk in self.components:
            if pk.role != want:
                raise ValueError(
                    f"{self.role}-state component has packet role {pk.role!r}")

    @classmethod
    def pre(cls, components: Sequence[Tuple[complex, GaussianPacket]]) -> "StateSpec":
        return cls(tuple((complex(w), p) for w, p in components), role="pre")

    @classmethod
    def post(cls, components: Sequence[Tuple[complex, GaussianPacket]]) -> "StateSpec":
        return cls(tuple((complex(w), p) for w, p in components), role="post")

    def component_state(self, index: int) -> "StateSpec":
        """Single-component state keeping the original weight."""
        return StateSpec((self.components[index],), role=self.role)


def state_forms(state: StateSpec, t: float, units: UnitSystem):
    """List of ``(weight, QuadraticForm)`` for the state at time ``t``."""
    return [(w, packet_form(p, t, units)) for w, p in state.components]


def state_value(state: StateSpec, x, t: float, units: UnitSystem):
    """Amplitude of the superposition at ``(x, t)``."""
    forms = state_forms(state, t, units)
    total = forms[0][0] * forms[0][1].value(x)
    for w, f in forms[1:]:
        total = total + w * f.value(x)
    return total


def state_derivative(state: StateSpec, x, t: float, units: UnitSystem):
    """Analytic d/dx of the superposition at ``(x, t)``."""
    forms = state_forms(state, t, units)
    total = forms[0][0] * forms[0][1].derivative(x)
    for w, f in forms[1:]:
        total = total + w * f.derivative(x)
    return total


def state_spread(state: StateSpec, t: float, units: UnitSystem) -> float:
    """Largest component spread; the natural truncation scale for quadrature."""
    return max(p.spread(t, units) for _, p in state.components)


# ---------------------------------------------------------------------------
# slit geometry and propagators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlitGeometry:
    """Gaussian-slit interferometer geometry.

    Slits are Gaussian windows ``exp(-(x -+ x0)^2 / (2 c^2))`` centered on
    ``+x0`` (slit 1) and ``-x0`` (slit 2), crossed at time ``tau`` by a wave
    from a point source at the origin; the screen sits a distance
    ``screen_distance`` downstream, reached at longitudinal speed
    ``pz_over_m``.
    """

    x0: float
    slit_width: float
    slit_time: float
    screen_distance: float
    pz_over_m: float

    def __post_init__(self):
        if self.x0 <= 0 or self.slit_width <= 0 or self.screen_distance <= 0:
            raise ValueError("x0, slit_width and screen_distance must be positive")
        if self.slit_time < 0:
            raise ValueError("slit_time must be non-negative")
        if self.pz_over_m <= 0:
            raise ValueError("pz_over_m must be positive")

    @property
    def flight_time(self) -> float:
        """Time of flight from the slits to the screen."""
        return self.screen_distance / self.pz_over_m

    @property
    def fraunhofer(self) -> bool:
        return self.screen_distance > 100.0 * self.slit_width

    def envelope_width(self, t_f: float, units: UnitSystem) -> float:
        """Delta-x of the far-field envelope at screen time ``t_f``.

        Uses the geometric-plus-diffractive combination
        ``(c t_f / tau)^2 + (hbar (t_f - tau) / (m c))^2``; requires
        ``slit_time > 0``.
        """
        tau, c = self.slit_time, self.slit_width
        if tau <= 0:
            raise DegenerateTimeError("envelope width needs slit_time > 0")
        geometric = c * t_f / tau
        diffractive = units.hbar * (t_f - tau) / (units.mass * c)
        return float(np.hypot(geometric, diffractive))


def slit_propagator(j: int, x_f, t_f: float, geometry: SlitGeometry,
                    units: UnitSystem) -> complex:
    """Source-to-screen amplitude through Gaussian slit ``j`` (1 or 2).

    Closed form of
    ``int K(x_f, t_f | x, tau) exp(-(x - delta_j x0)^2 / 2 c^2) K(x, tau | 0, 0) dx``
    with the source at the origin at t = 0, obtained by completing the
    square rather than transcribing the published expression.
    """
    if j not in (1, 2):
        raise ValueError("slit index must be 1 or 2")
    tau = geometry.slit_time
    if not t_f > tau > 0:
        raise DegenerateTimeError(f"slit_propagator needs t_f > tau > 0, got ({t_f}, {tau})")
    m, hbar = units.mass, units.hbar
    delta = 1.0 if j == 1 else -1.0
    x0, c = geometry.x0, geometry.slit_width
    x_f = np.asarray(x_f)

    mu1 = m / (2.0 * hbar * (t_f - tau))
    mu2 = m / (2.0 * hbar * tau)
    a = 1j * (mu1 + mu2) - 1.0 / (2.0 * c * c)
    b = -2j * mu1 * x_f + delta * x0 / (c * c)
    cc = 1j * mu1 * x_f * x_f - x0 * x0 / (2.0 * c * c)
    pref = (np.sqrt(m / (2j * np.pi * hbar * (t_f - tau)))
            * np.sqrt(m / (2j * np.pi * hbar * tau)))
    return pref * np.sqrt(np.pi / (-a)) * np.exp(cc - b * b / (4.0 * a))


def fraunhofer_pattern(x_f, geometry: SlitGeometry, units: UnitSystem,
                       envelope_width: float | None = None):
    """Compact far-field screen density ``cos^2(2 p_z x0 x_f / (hbar D)) exp(-x_f^2 / dx^2)``.

    Kept exactly as published.  Note the cos^2 argument implies half the
    fringe spacing of the exact two-slit evolution; the exact pattern is
    the authoritative one, this form is provided for comparison only.
    """
    x_f = np.asarray(x_f, dtype=float)
    p_z = units.mass * geometry.pz_over_m
    arg = 2.0 * p_z * geometry.x0 * x_f / (units.hbar * geometry.screen_distance)
    if envelope_width is None:
        envelope_width = geometry.envelope_width(geometry.flight_time + geometry.slit_time, units)
    return np.cos(arg) ** 2 * np.exp(-(x_f * x_f) / (envelope_width ** 2))


def two_slit_pre_state(x0: float, width: float, p1: float, p2: float,
                       weights: Tuple[complex, complex] = None) -> StateSpec:
    """Standard two-slit pre-selected state: packets at +-x0 with momenta p1, p2."""
    if weights is None:
        w = 1.0 / np.sqrt(2.0)
        weights = (w, w)
    return StateSpec.pre([
        (weights[0], GaussianPacket(x0, width, p1, 0.0, "forward")),
        (weights[1], GaussianPacket(-x0, width, p2, 0.0, "forward")),
    ])


def collimated_post_state(x_f: float, width: float, momenta: Sequence[float],
                          t_f: float, weights: Sequence[complex] = None) -> StateSpec:
    """Post-selected state: narrow Gaussians at x_f with collimated momenta."""
    momenta = list(momenta)
    if weights is None:
        w = 1.0 / np.sqrt(len(momenta))
        weights = [w] * len(momenta)
    comps = [(wt, GaussianPacket(x_f, width, p, t_f, "backward"))
             for wt, p in zip(weights, momenta)]
    return StateSpec.post(comps)
