"""Scenario files, experiment orchestration, and table emission.

A scenario is a YAML key-value tree (see ``scenarios/`` for the bundled,
commented examples).  Loading validates every physical invariant and applies
documented defaults; the resulting :class:`ScenarioConfig` builds the states,
probes and crystals that the command functions consume.  Commands emit
:class:`EmittedTable` records that serialize deterministically to CSV or
JSON, each carrying a units row and the echo hash of the fully resolved
configuration.
"""

import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Sequence

import numpy as np
import yaml

from . import probegrid, protocol
from .errors import ScenarioError
from .probegrid import Probe
from .protocol import Crystal, ProtocolSetup
from .qcore import GaussianPacket, SlitGeometry, StateSpec, fraunhofer_pattern, state_value
from .units import HBAR_SI, UnitSystem
from .weakval import InteractionProfile

BUNDLED = ("table1", "fig2_ideal", "fig3_single_slit", "fig4_two_slit",
           "protocol_default")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbePoint:
    id: str
    x: float
    t: float


@dataclass
class ScenarioConfig:
    """Validated scenario: raw tree plus the resolved physical objects."""

    raw: dict
    units: UnitSystem
    dimensionless: bool
    geometry: SlitGeometry
    t_f: float
    pre_slits: List[int]
    pre_width: float
    pre_momenta: List[float]
    pre_weights: List[complex]
    x0: float
    post_x_f: float
    post_delta: float
    post_momenta: List[float]
    post_weights: List[complex]
    probe_gamma: float
    probe_profile: InteractionProfile
    probe_grid_x: List[float]
    probe_grid_t: List[float]
    probe_points: List[ProbePoint]
    crystals: Dict[str, Crystal]
    screen_points: int
    screen_span: Optional[float]
    density_times: List[float]
    threshold_rel: float
    linking_radius: Optional[float]

    def sha256(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    # -- builders ----------------------------------------------------------

    def pre_state(self, slit_config: str = "both") -> StateSpec:
        comps = []
        for slit, p, w in zip(self.pre_slits, self.pre_momenta, self.pre_weights):
            if slit_config == "slit1" and slit != 1:
                continue
            if slit_config == "slit2" and slit != 2:
                continue
            center = self.x0 if slit == 1 else -self.x0
            comps.append((w, GaussianPacket(center, self.pre_width, p, 0.0,
                                            "forward")))
        if not comps:
            raise ScenarioError(
                f"pre_state: no component on open slit(s) {slit_config!r}")
        if slit_config != "both" and len(comps) >= 1:
            # a physically closed slit leaves a renormalized single-slit state
            norm = math.sqrt(sum(abs(w) ** 2 for w, _ in comps))
            comps = [(w / norm, p) for w, p in comps]
        return StateSpec.pre(comps)

    def post_state(self) -> StateSpec:
        comps = [(w, GaussianPacket(self.post_x_f, self.post_delta, p, self.t_f,
                                    "backward"))
                 for p, w in zip(self.post_momenta, self.post_weights)]
        return StateSpec.post(comps)

    def probes(self, profile_override: Optional[InteractionProfile] = None
               ) -> List[Probe]:
        profile = profile_override or self.probe_profile
        pz = self.geometry.pz_over_m
        out = probegrid.probe_grid(self.probe_grid_x, self.probe_grid_t,
                                   self.probe_gamma, pz, profile)
        for point in self.probe_points:
            out.append(Probe(point.id, point.x, point.t, self.probe_gamma,
                             z=pz * point.t, profile=profile))
        return out

    def protocol_setup(self, mode: str = "idealized") -> ProtocolSetup:
        if not self.crystals:
            raise ScenarioError("crystals: section required for the protocol")
        return ProtocolSetup(
            pre_states={cfg: self.pre_state(cfg)
                        for cfg in ("both", "slit1", "slit2")},
            post=self.post_state(),
            crystals=self.crystals,
            units=self.units,
            mode=mode)


# ---------------------------------------------------------------------------
# loading / validation
# ---------------------------------------------------------------------------

def _need(tree: dict, path: str, typ=None):
    node = tree
    walked = []
    for key in path.split("."):
        walked.append(key)
        if not isinstance(node, dict) or key not in node:
            raise ScenarioError(f"{'.'.join(walked)}: missing required field")
        node = node[key]
    if typ is not None and not isinstance(node, typ):
        raise ScenarioError(f"{path}: expected {typ}, got {type(node).__name__}")
    return node


def _get(tree: dict, path: str, default=None):
    node = tree
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            return default
        node = node[key]
    return node


def _positive(value, path: str) -> float:
    value = float(value)
    if value <= 0:
        raise ScenarioError(f"{path}: must be positive, got {value}")
    return value


def _weights(node, n: int, path: str) -> List[complex]:
    if node is None:
        return [1.0 / math.sqrt(n)] * n
    if len(node) != n:
        raise ScenarioError(f"{path}: expected {n} weights, got {len(node)}")
    out = []
    for w in node:
        if isinstance(w, (list, tuple)):
            out.append(complex(w[0], w[1]))
        else:
            out.append(complex(float(w), 0.0))
    if all(abs(w) == 0 for w in out):
        raise ScenarioError(f"{path}: weights are all zero")
    return out


def _axis(node, path: str) -> List[float]:
    if isinstance(node, list):
        return [float(v) for v in node]
    if isinstance(node, dict):
        lo = float(_need(node, "min"))
        hi = float(_need(node, "max"))
        count = int(_need(node, "count"))
        if count < 1:
            raise ScenarioError(f"{path}.count: must be >= 1")
        return list(np.linspace(lo, hi, count))
    raise ScenarioError(f"{path}: expected a list or a min/max/count mapping")


def _resolve_path(source: str):
    if "/" not in source and not source.endswith((".yaml", ".yml")):
        if source not in BUNDLED:
            raise ScenarioError(
                f"unknown bundled scenario {source!r}; choices: {', '.join(BUNDLED)}")
        return resources.files("weaktraj").joinpath(f"scenarios/{source}.yaml")
    return source


def load_scenario(source: str) -> ScenarioConfig:
    """Load a scenario from a path or a bundled name.

    Raises :class:`ScenarioError` with the offending line for parse errors
    and with the field path for validation errors.
    """
    handle = _resolve_path(source)
    try:
        if hasattr(handle, "read_text"):
            text = handle.read_text()
        else:
            with open(handle, "r") as fh:
                text = fh.read()
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {source}")
    try:
        tree = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark else ""
        raise ScenarioError(f"scenario parse error{where}: {exc}")
    if not isinstance(tree, dict):
        raise ScenarioError("scenario root must be a mapping")
    return _validate(tree)


def _validate(tree: dict) -> ScenarioConfig:
    mode = _get(tree, "units.mode", "si")
    if mode not in ("si", "dimensionless"):
        raise ScenarioError(f"units.mode: expected 'si' or 'dimensionless', got {mode!r}")
    dimensionless = mode == "dimensionless"
    if dimensionless:
        units = UnitSystem(hbar=float(_get(tree, "units.hbar", 1.0)),
                           mass=float(_get(tree, "units.mass", 1.0)))
    else:
        mass = _positive(_need(tree, "units.mass"), "units.mass")
        units = UnitSystem(hbar=float(_get(tree, "units.hbar", HBAR_SI)), mass=mass)

    x0 = _positive(_need(tree, "geometry.x0"), "geometry.x0")
    pz_over_m = _positive(_need(tree, "geometry.pz_over_m"), "geometry.pz_over_m")
    screen_distance = _positive(_need(tree, "geometry.screen_distance"),
                                "geometry.screen_distance")
    slit_time = float(_get(tree, "geometry.slit_time", 0.0))
    if slit_time < 0:
        raise ScenarioError("geometry.slit_time: must be >= 0")
    # slit_width defaults to the pre-state packet width; the slit-propagator
    # route additionally needs an explicit positive slit_time
    slit_width_raw = _get(tree, "geometry.slit_width")
    pre_width_raw = _positive(_need(tree, "pre_state.width"), "pre_state.width")
    slit_width = (_positive(slit_width_raw, "geometry.slit_width")
                  if slit_width_raw is not None else pre_width_raw)
    geometry = SlitGeometry(x0, slit_width, slit_time, screen_distance, pz_over_m)
    t_f = screen_distance / pz_over_m

    pre = _need(tree, "pre_state", dict)
    pre_width = _positive(_need(tree, "pre_state.width"), "pre_state.width")
    pre_pm = _need(tree, "pre_state.p_over_m", list)
    pre_momenta = [units.mass * float(v) for v in pre_pm]
    pre_slits = _get(tree, "pre_state.slits") or list(range(1, len(pre_momenta) + 1))
    pre_slits = [int(s) for s in pre_slits]
    if len(pre_slits) != len(pre_momenta):
        raise ScenarioError("pre_state.slits: length must match p_over_m")
    if any(s not in (1, 2) for s in pre_slits):
        raise ScenarioError("pre_state.slits: entries must be 1 or 2")
    pre_weights = _weights(_get(tree, "pre_state.weights"), len(pre_momenta),
                           "pre_state.weights")

    post = _need(tree, "post_state", dict)
    post_x_f = float(_need(tree, "post_state.x_f"))
    post_delta = _positive(_need(tree, "post_state.delta"), "post_state.delta")
    post_pm = _need(tree, "post_state.p_over_m", list)
    post_momenta = [units.mass * float(v) for v in post_pm]
    post_weights = _weights(_get(tree, "post_state.weights"), len(post_momenta),
                            "post_state.weights")

    gamma = float(_get(tree, "probes.gamma", 0.0))
    kind = _get(tree, "probes.profile", "point")
    if kind == "point":
        profile = InteractionProfile("point")
    elif kind == "gaussian":
        width = _positive(_need(tree, "probes.profile_width"),
                          "probes.profile_width")
        normalized = bool(_get(tree, "probes.profile_normalized", True))
        profile = InteractionProfile("gaussian", width, normalized=normalized)
    else:
        raise ScenarioError(f"probes.profile: expected point|gaussian, got {kind!r}")
    grid_x = _axis(_get(tree, "probes.grid.x", []), "probes.grid.x")
    grid_t = _axis(_get(tree, "probes.grid.t", []), "probes.grid.t")
    for i, t in enumerate(grid_t):
        if not 0 <= t <= t_f:
            raise ScenarioError(f"probes.grid.t[{i}]: {t} outside [0, t_f={t_f:g}]")
    points = []
    for i, entry in enumerate(_get(tree, "probes.points", []) or []):
        pid = str(_need(entry, "id"))
        x = float(_need(entry, "x"))
        if "t_over_tf" in entry:
            t = float(entry["t_over_tf"]) * t_f
        else:
            t = float(_need(entry, "t"))
        if not 0 <= t <= t_f:
            raise ScenarioError(f"probes.points[{i}].t: {t} outside [0, t_f]")
        points.append(ProbePoint(pid, x, t))

    crystals = {}
    for cid, entry in (_get(tree, "crystals") or {}).items():
        if cid not in ("A", "B", "C", "D"):
            raise ScenarioError(f"crystals.{cid}: id must be one of A,B,C,D")
        crystals[cid] = Crystal(
            id=cid,
            x=float(_need(entry, "x")),
            t=float(_need(entry, "t")),
            gamma=float(_need(entry, "gamma")),
            phase_shifted=bool(entry.get("phase_shifted", False)))
    if crystals and sorted(crystals) != ["A", "B", "C", "D"]:
        raise ScenarioError("crystals: need all four of A, B, C, D")

    screen_points = int(_get(tree, "output.screen_points", 4096))
    if screen_points < 16:
        raise ScenarioError("output.screen_points: must be >= 16")
    span = _get(tree, "output.screen_span")
    density_times = [float(v) for v in _get(tree, "output.times", []) or []]
    threshold_rel = float(_get(tree, "output.threshold_rel",
                               probegrid.DEFAULT_THRESHOLD_REL))
    linking = _get(tree, "output.linking_radius")

    return ScenarioConfig(
        raw=tree, units=units, dimensionless=dimensionless, geometry=geometry,
        t_f=t_f, pre_slits=pre_slits, pre_width=pre_width,
        pre_momenta=pre_momenta, pre_weights=pre_weights, x0=x0,
        post_x_f=post_x_f, post_delta=post_delta, post_momenta=post_momenta,
        post_weights=post_weights, probe_gamma=gamma, probe_profile=profile,
        probe_grid_x=grid_x, probe_grid_t=grid_t, probe_points=points,
        crystals=crystals, screen_points=screen_points,
        screen_span=None if span is None else float(span),
        density_times=density_times, threshold_rel=threshold_rel,
        linking_radius=None if linking is None else float(linking))


# ---------------------------------------------------------------------------
# emitted tables
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


@dataclass
class EmittedTable:
    """Rectangular output record with a units row and reproducibility metadata."""

    title: str
    columns: List[str]
    units_row: List[str]
    rows: List[list]
    meta: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.columns) != len(self.units_row):
            raise ValueError("units row length must match columns")
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError("ragged table row")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {self.title}\n")
        for key in sorted(self.meta):
            buf.write(f"# {key}={self.meta[key]}\n")
        buf.write(",".join(self.columns) + "\n")
        buf.write(",".join(self.units_row) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"title": self.title, "meta": self.meta, "columns": self.columns,
               "units": self.units_row, "rows": self.rows}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def render(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def _length_unit(config: ScenarioConfig) -> str:
    return "1" if config.dimensionless else "m"


def _time_unit(config: ScenarioConfig) -> str:
    return "1" if config.dimensionless else "s"


def _screen_grid(config: ScenarioConfig) -> np.ndarray:
    if config.screen_span is not None:
        span = config.screen_span
    else:
        pre = config.pre_state("both")
        spread = max(p.spread(config.t_f, config.units) for _, p in pre.components)
        span = 4.0 * math.sqrt(2.0) * spread  # +-4 envelope widths
    return np.linspace(-span, span, config.screen_points)


def _local_maxima(x: np.ndarray, y: np.ndarray) -> List[float]:
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])
    return [float(v) for v in x[1:-1][inner]]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_pattern(config: ScenarioConfig) -> EmittedTable:
    """Screen density at t_f plus the compact far-field approximation."""
    units = config.units
    x = _screen_grid(config)
    pre = config.pre_state("both")
    density = np.abs(state_value(pre, x, config.t_f, units)) ** 2

    spread = max(p.spread(config.t_f, units) for _, p in pre.components)
    envelope = math.sqrt(2.0) * spread
    approx = fraunhofer_pattern(x, config.geometry, units,
                                envelope_width=envelope)

    maxima = _local_maxima(x, density)
    right = [m for m in maxima if m > 0.25 * (x[1] - x[0])]
    meta = {
        "scenario_sha256": config.sha256(),
        "t_f": _fmt(config.t_f),
        "maxima_right_of_center": ";".join(_fmt(m) for m in right[:6]),
    }
    if len(right) >= 2:
        meta["mean_spacing"] = _fmt(float(np.mean(np.diff(right[:4]))))
    rows = [[float(xi), float(di), float(ai)]
            for xi, di, ai in zip(x, density, approx)]
    L = _length_unit(config)
    return EmittedTable("pattern", ["x_f", "density", "fraunhofer_approx"],
                        [L, f"1/{L}", "1"], rows, meta)


def cmd_density(config: ScenarioConfig, times: Optional[Sequence[float]] = None
                ) -> EmittedTable:
    """Snapshots of |psi(x, t)|^2 at the requested times."""
    units = config.units
    times = list(times) if times is not None else list(config.density_times)
    if not times:
        times = [config.t_f * f for f in (0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0)]
    for t in times:
        if not 0 <= t <= config.t_f:
            raise ScenarioError(f"density time {t} outside [0, t_f]")
    x = _screen_grid(config)
    pre = config.pre_state("both")
    columns = ["x"] + [f"density_t{i}" for i in range(len(times))]
    units_row = [_length_unit(config)] + [f"1/{_length_unit(config)}"] * len(times)
    data = [np.abs(state_value(pre, x, t, units)) ** 2 for t in times]
    meta = {"scenario_sha256": config.sha256()}
    for i, (t, dens) in enumerate(zip(times, data)):
        norm = float(np.trapezoid(dens, x))
        meta[f"t{i}"] = _fmt(float(t))
        meta[f"norm_t{i}"] = _fmt(norm)
        meta[f"argmax_t{i}"] = _fmt(float(x[int(np.argmax(dens))]))
    rows = [[float(xi)] + [float(col[k]) for col in data]
            for k, xi in enumerate(x)]
    return EmittedTable("density", columns, units_row, rows, meta)


def cmd_weak_grid(config: ScenarioConfig,
                  profile_override: Optional[InteractionProfile] = None,
                  slit_configs: Sequence[str] = ("both", "slit1", "slit2")
                  ) -> EmittedTable:
    """Pointer readouts and extracted weak trajectories per slit configuration."""
    units = config.units
    post = config.post_state()
    probes = config.probes(profile_override)
    if not probes:
        raise ScenarioError("probes: scenario defines no probes")
    L, T = _length_unit(config), _time_unit(config)
    rows = []
    meta = {"scenario_sha256": config.sha256(),
            "threshold_rel": _fmt(config.threshold_rel)}
    available = {s for s in config.pre_slits}
    for cfg in slit_configs:
        if cfg == "slit1" and 1 not in available:
            continue
        if cfg == "slit2" and 2 not in available:
            continue
        pre = config.pre_state(cfg)
        readouts = probegrid.evaluate_grid(pre, post, probes, units,
                                           slit_config=cfg)
        for r in readouts:
            rows.append([cfg, r.probe.id, float(r.probe.x), float(r.probe.z),
                         float(r.probe.t), float(r.weak_value.value.real),
                         float(r.weak_value.value.imag), float(r.shift)])
        trajectories = probegrid.extract_trajectories(
            readouts, config.threshold_rel, config.linking_radius,
            units=units, pre=pre)
        meta[f"trajectories_{cfg}"] = _fmt(len(trajectories))
        for i, tr in enumerate(trajectories):
            label = tr.label or "unlabeled"
            meta[f"trajectory_{cfg}_{i}"] = f"{label}:" + "|".join(tr.probe_ids)
    columns = ["slit_config", "probe_id", "x", "z", "t", "re_weak_value",
               "im_weak_value", "shift"]
    wv_unit = "1" if (profile_override or config.probe_profile).kind == "gaussian" \
        and not (profile_override or config.probe_profile).normalized else f"1/{L}"
    units_row = ["-", "-", L, L, T, wv_unit, wv_unit, "pointer"]
    return EmittedTable("weak-grid", columns, units_row, rows, meta)


def cmd_protocol(config: ScenarioConfig, mode: str = "idealized") -> EmittedTable:
    """All eight schemes, recovered weak values, and parsed path terms."""
    setup = config.protocol_setup(mode)
    report = protocol.protocol_report(setup)
    rows = []
    for s in report.schemes:
        total = s.intensity_plus + s.intensity_minus
        rows.append([s.name, s.slit_config, ",".join(s.crystals),
                     ",".join(s.phase_shifted) or "-", s.intensity_plus,
                     s.intensity_minus, s.intensity_plus / total,
                     s.intensity_minus / total, s.contrast])
    meta = {"scenario_sha256": config.sha256(), "mode": mode}
    for cfg, values in sorted(report.recovered.items()):
        for cid in "ACBD":
            meta[f"recovered_{cfg}_{cid}"] = _fmt(values[cid])
    for key in sorted(report.single_slit_recovered):
        meta[f"kappa_{key}"] = _fmt(report.single_slit_recovered[key])
    for key in sorted(report.parsed_paths):
        v = report.parsed_paths[key]
        meta[f"parsed_{key}"] = f"{_fmt(v.real)}{v.imag:+}j" \
            if isinstance(v, complex) else _fmt(v)
    r1, r2 = report.ratios_exact
    meta["ratio_R1"] = f"{_fmt(r1.real)}{r1.imag:+}j"
    meta["ratio_R2"] = f"{_fmt(r2.real)}{r2.imag:+}j"
    meta["ratio_R1_measured"] = _fmt(float(report.ratios_measured[0]))
    meta["ratio_R2_measured"] = _fmt(float(report.ratios_measured[1]))
    for cfg, values in sorted(report.contributions.items()):
        for cid in "ACBD":
            meta[f"contribution_{cfg}_{cid}"] = _fmt(values[cid])
    columns = ["scheme", "slit_config", "crystals", "phase_shifted",
               "intensity_plus", "intensity_minus", "intensity_plus_norm",
               "intensity_minus_norm", "contrast"]
    units_row = ["-", "-", "-", "-", "1", "1", "1", "1", "1"]
    return EmittedTable("protocol", columns, units_row, rows, meta)


def cmd_invert(contrasts_path: str) -> EmittedTable:
    """Offline inversion of a contrasts file (two-slit and/or appendix data)."""
    try:
        with open(contrasts_path, "r") as fh:
            tree = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ScenarioError(f"contrasts file not found: {contrasts_path}")
    except yaml.YAMLError as exc:
        raise ScenarioError(f"contrasts parse error: {exc}")
    if not isinstance(tree, dict):
        raise ScenarioError("contrasts root must be a mapping")
    rows = []
    digest = hashlib.sha256(
        json.dumps(tree, sort_keys=True).encode()).hexdigest()[:16]
    if "two_slit" in tree:
        sect = tree["two_slit"]
        contrasts = [float(v) for v in _need(sect, "contrasts", list)]
        gammas = {k: float(v) for k, v in _need(sect, "gammas", dict).items()}
        hints = tuple(float(v) for v in sect.get("sign_hints", (1, 1, 1, 1)))
        values = protocol.invert_two_slit(contrasts, gammas, hints)
        for cid in "ACBD":
            rows.append(["two_slit", f"k_{cid}", values[cid]])
    if "single_slit" in tree:
        sect = tree["single_slit"]
        contrasts = [float(v) for v in _need(sect, "contrasts", list)]
        gammas = {k: float(v) for k, v in _need(sect, "gammas", dict).items()}
        hints = tuple(float(v) for v in sect.get("sign_hints", (1, 1, 1, 1)))
        values = protocol.invert_single_slit(contrasts, gammas, hints)
        for key in ("B1", "D1", "B2", "D2"):
            rows.append(["single_slit", f"kappa_{key}", values[key]])
    if not rows:
        raise ScenarioError(
            "contrasts file needs a 'two_slit' and/or 'single_slit' section")
    return EmittedTable("invert", ["family", "quantity", "value"],
                        ["-", "-", "momentum"], rows,
                        {"contrasts_sha256": digest})
