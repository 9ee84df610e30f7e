"""Space-time grids of weakly coupled pointers and weak-trajectory extraction.

Pointers are ideal first-order probes: each one ends up displaced by
``gamma * Re (Pi_x)^w`` and nothing back-reacts on the system state, so a
grid evaluation is one weak value per probe.  Trajectories are chains of
above-threshold probes linked across adjacent time slices.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import weakval
from .errors import FirstOrderGuardError
from .qcore import StateSpec
from .units import UnitSystem
from .weakval import POINT, InteractionProfile, WeakValueRecord

FIRST_ORDER_GUARD = 0.3
DEFAULT_THRESHOLD_REL = 0.05


@dataclass(frozen=True)
class Probe:
    """A weakly coupled pointer at ``(x, z)`` firing at time ``t``.

    ``z`` is display-only (derived from the longitudinal drift); the
    dynamics is purely transverse.
    """

    id: str
    x: float
    t: float
    gamma: float
    z: float = 0.0
    profile: InteractionProfile = POINT


@dataclass(frozen=True)
class PointerReadout:
    probe: Probe
    weak_value: WeakValueRecord

    @property
    def shift(self) -> float:
        """First-order pointer displacement ``gamma * Re (Pi)^w``."""
        return self.probe.gamma * self.weak_value.value.real


@dataclass
class WeakTrajectory:
    """Time-ordered chain of shifted probes; ``label`` names the slit of
    origin when the starting point identifies one."""

    probe_ids: List[str]
    label: Optional[str] = None
    positions: List[Tuple[float, float]] = field(default_factory=list)


def probe_grid(x_values: Sequence[float], t_values: Sequence[float], gamma: float,
               pz_over_m: float = 0.0, profile: InteractionProfile = POINT) -> List[Probe]:
    """Rectangular grid of identical probes; z follows the longitudinal drift."""
    probes = []
    for i, t in enumerate(sorted(t_values)):
        for j, x in enumerate(x_values):
            probes.append(Probe(id=f"t{i}x{j}", x=float(x), t=float(t),
                                gamma=gamma, z=pz_over_m * float(t), profile=profile))
    return probes


def evaluate_grid(pre: StateSpec, post: StateSpec, probes: Sequence[Probe],
                  units: UnitSystem, *, slit_config: str = "both",
                  guard: float = FIRST_ORDER_GUARD,
                  eps_den: float = weakval.DEFAULT_EPS_DEN) -> List[PointerReadout]:
    """One first-order readout per probe.

    Cross terms between probes are ``O(gamma^2)`` and dropped, so probes are
    independent.  Raises :class:`FirstOrderGuardError` naming the first probe
    whose ``gamma * |weak value|`` exceeds ``guard``, and propagates the
    vanishing-overlap error of an (almost) orthogonal post-selection before
    producing any readout.
    """
    readouts = []
    for probe in probes:
        rec = weakval.projector_weak_value(
            pre, post, probe.x, probe.t, probe.profile, units,
            slit_config=slit_config, eps_den=eps_den)
        if probe.gamma != 0.0 and abs(probe.gamma * rec.value) >= guard:
            raise FirstOrderGuardError(
                f"probe {probe.id}: gamma |weak value| = "
                f"{abs(probe.gamma * rec.value):.3g} >= guard {guard}")
        readouts.append(PointerReadout(probe, rec))
    return readouts


def admissible_postselections(pre: StateSpec, t_f: float,
                              units: UnitSystem) -> List[Tuple[float, float]]:
    """Successful post-selection settings for a narrow pre-state.

    One ``(x_f, p')`` pair per component: the classical landing point at
    ``t_f`` with the collimation momentum matching that component.
    """
    return [(p.classical_position(t_f, units), p.momentum)
            for _, p in pre.components]


def extract_trajectories(readouts: Sequence[PointerReadout],
                         threshold_rel: float = DEFAULT_THRESHOLD_REL,
                         linking_radius: float = None, *,
                         units: UnitSystem = None,
                         pre: StateSpec = None) -> List[WeakTrajectory]:
    """Group above-threshold probes into time-monotone chains.

    A probe is selected when ``|shift| >= threshold_rel * max |shift|``.
    Selected probes are linked when they sit in the same or adjacent
    occupied time slices with positions within ``linking_radius`` (default:
    twice the local packet spread when ``pre``/``units`` are given, else
    twice the median grid spacing in x).  A trajectory is a connected group,
    listed time-ordered with possibly several probes per slice (superposed
    branches stay one trajectory only if they stay linked).  An empty result
    is a valid outcome.
    """
    if not readouts:
        return []
    max_shift = max(abs(r.shift) for r in readouts)
    if max_shift == 0.0:
        return []
    selected = [r for r in readouts if abs(r.shift) >= threshold_rel * max_shift]
    if not selected:
        return []

    slices = sorted({r.probe.t for r in selected})
    slice_index = {t: i for i, t in enumerate(slices)}
    selected.sort(key=lambda r: (r.probe.t, r.probe.x))

    # union-find over selected probes
    parent = list(range(len(selected)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    for i, a in enumerate(selected):
        radius_a = _radius(linking_radius, a.probe.t, pre, units, readouts)
        for j in range(i + 1, len(selected)):
            b = selected[j]
            gap = slice_index[b.probe.t] - slice_index[a.probe.t]
            if gap > 1:
                break  # selected is slice-ordered
            if abs(b.probe.x - a.probe.x) <= radius_a:
                union(i, j)

    groups = {}
    for i in range(len(selected)):
        groups.setdefault(find(i), []).append(selected[i])

    trajectories = []
    for members in groups.values():
        members.sort(key=lambda r: (r.probe.t, r.probe.x))
        ids = [r.probe.id for r in members]
        positions = [(r.probe.x, r.probe.t) for r in members]
        trajectories.append(WeakTrajectory(ids, _origin_label(members, pre, units),
                                           positions))
    trajectories.sort(key=lambda tr: (tr.positions[0][1], tr.positions[0][0]))
    return trajectories


def _radius(linking_radius, t, pre, units, readouts) -> float:
    if linking_radius is not None:
        return linking_radius
    if pre is not None and units is not None:
        return 2.0 * max(p.spread(t, units) for _, p in pre.components)
    xs = sorted({r.probe.x for r in readouts})
    gaps = np.diff(xs)
    return 2.0 * float(np.median(gaps)) if len(gaps) else np.inf


def _origin_label(members, pre, units) -> Optional[str]:
    if pre is None or units is None or len(pre.components) < 2:
        return None
    x, t = members[0].probe.x, members[0].probe.t
    dists = [abs(x - p.classical_position(t, units)) for _, p in pre.components]
    best = int(np.argmin(dists))
    # only label when the start is unambiguously nearer one classical line
    others = [d for i, d in enumerate(dists) if i != best]
    if others and min(others) < 2.0 * dists[best]:
        return None
    return f"slit{best + 1}"
