"""Declarative experiment configs, runs, sweeps and file output."""

from __future__ import annotations

import bisect
import copy
import json
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from json.decoder import scanstring
from pathlib import Path

import numpy as np

from .continuous import (
    IntegrationError,
    boundary_generator_simple,
    boundary_generator_split,
    bulk_generator_simple,
    bulk_generator_split,
    evolve_continuous,
)
from .discrete import evolve_discrete
from .lattice import (
    DomainError,
    LatticeSpec,
    SimpleAngleProfile,
    SplitAngleProfile,
    Trajectory,
    WalkerState,
    make_packet,
    random_state,
)

WALK_KINDS = ("discrete_simple", "discrete_split", "continuous_simple", "continuous_split")
OUT_ENV = "TOPOWALK_OUT"
DEFAULT_OUT = "topowalk_out"
CSV_HEADER = "t,x,p0,p1"
PEAK_FRACTION = 0.5

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None, source: str | None = None):
        self.message, self.field, self.line, self.source = message, field, line, source
        parts = [p for p in (source, f"line {line}" if line else None, f"field '{field}'" if field else None) if p]
        super().__init__(": ".join(parts + [message]))


class NumericalError(RuntimeError):
    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t={time:.6g}")
        self.time = time


# -- locating keys in the raw text -------------------------------------------

_WS = re.compile(r"[ \t\n\r]*")


def key_lines(text: str) -> dict:
    """Map each key path (tuple of str/int) to the 1-based line where it appears."""
    breaks = [m.start() for m in re.finditer("\n", text)]
    decoder = json.JSONDecoder()
    lines = {}

    def line_of(i):
        return bisect.bisect_left(breaks, i) + 1

    def skip(i):
        return _WS.match(text, i).end()

    def value(i, path):
        i = skip(i)
        if text[i] == "{":
            i = skip(i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                i = skip(i)
                key, j = scanstring(text, i + 1)
                lines[path + (key,)] = line_of(i)
                j = value(skip(j) + 1, path + (key,))
                j = skip(j)
                if text[j] == ",":
                    i = j + 1
                    continue
                return j + 1
        if text[i] == "[":
            i = skip(i + 1)
            if text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = skip(i)
                lines[path + (k,)] = line_of(i)
                i = skip(value(i, path + (k,)))
                if text[i] == ",":
                    i += 1
                    k += 1
                    continue
                return i + 1
        _, end = decoder.raw_decode(text, i)
        return end

    value(0, ())
    return lines


# -- config dataclasses -------------------------------------------------------


@dataclass(frozen=True)
class InitialStateConfig:
    kind: str  # packet | amplitudes | random
    center: int = 0
    spread: float = 0.0
    weights: tuple = (1.0, 0.0)
    amplitudes: tuple = ()  # ((x, comp, complex), ...)
    window: tuple | None = None


@dataclass(frozen=True)
class TimingConfig:
    n_steps: int | None = None
    t_final: float | None = None
    dt: float | None = None
    snapshot_every: float = 1
    frame_phase: complex = 1.0


@dataclass(frozen=True)
class ProfileConfig:
    right: object = None  # angle(s) on x >= 0
    left: object = None
    phase: str | None = None  # continuous bulk
    boundary: str | None = None  # continuous boundary pair


@dataclass(frozen=True)
class MetricsConfig:
    boundary_sites: tuple = (-1, 0)
    regions: dict = field(default_factory=dict)
    peak_window: tuple = (-4, 3)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    walk_kind: str
    lattice: LatticeSpec
    profile: ProfileConfig
    rates: tuple
    initial_state: InitialStateConfig
    timing: TimingConfig
    metrics: MetricsConfig
    output_dir: str
    seed: int
    raw: dict

    @property
    def discrete(self) -> bool:
        return self.walk_kind.startswith("discrete")

    @property
    def split(self) -> bool:
        return self.walk_kind.endswith("split")


# -- parsing -----------------------------------------------------------------


class _Reader:
    def __init__(self, lines: dict, source: str | None):
        self.lines = lines
        self.source = source

    def error(self, path: tuple, message: str) -> ConfigError:
        probe = tuple(path)
        while probe and probe not in self.lines:
            probe = probe[:-1]
        field_name = ".".join(str(p) for p in path) or None
        return ConfigError(message, field_name, self.lines.get(probe), self.source)

    def obj(self, value, path, required=(), optional=()) -> dict:
        if not isinstance(value, dict):
            raise self.error(path, "expected an object")
        for key in value:
            if key not in required and key not in optional:
                allowed = ", ".join(sorted(set(required) | set(optional)))
                raise self.error(path + (key,), f"unknown key (allowed: {allowed})")
        for key in required:
            if key not in value:
                raise self.error(path, f"missing required key '{key}'")
        return value

    def number(self, value, path, minimum=None, strict=False) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
            raise self.error(path, "expected a finite number")
        if minimum is not None and (value < minimum or (strict and value == minimum)):
            raise self.error(path, f"must be {'>' if strict else '>='} {minimum}")
        return float(value)

    def integer(self, value, path, minimum=None) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.error(path, "expected an integer")
        if minimum is not None and value < minimum:
            raise self.error(path, f"must be >= {minimum}")
        return value

    def complex_(self, value, path) -> complex:
        if isinstance(value, list):
            if len(value) != 2:
                raise self.error(path, "complex values are [re, im]")
            return complex(self.number(value[0], path + (0,)), self.number(value[1], path + (1,)))
        return complex(self.number(value, path))

    def choice(self, value, path, options) -> str:
        if value not in options:
            raise self.error(path, f"expected one of {', '.join(options)}")
        return value

    def int_pair(self, value, path) -> tuple[int, int]:
        if not isinstance(value, list) or len(value) != 2:
            raise self.error(path, "expected [lo, hi]")
        lo, hi = (self.integer(v, path + (i,)) for i, v in enumerate(value))
        if lo > hi:
            raise self.error(path, "inverted range")
        return lo, hi


def _angles(reader, value, path, split):
    if split:
        if not isinstance(value, list) or len(value) != 2:
            raise reader.error(path, "expected [theta1, theta2]")
        return tuple(reader.number(v, path + (i,)) for i, v in enumerate(value))
    return reader.number(value, path)


def _parse_profile(reader, raw, kind) -> ProfileConfig:
    path = ("profile",)
    if kind.startswith("discrete"):
        obj = reader.obj(raw, path, optional=("uniform", "right", "left"))
        split = kind == "discrete_split"
        if "uniform" in obj:
            if "right" in obj or "left" in obj:
                raise reader.error(path, "use either 'uniform' or 'right'/'left'")
            a = _angles(reader, obj["uniform"], path + ("uniform",), split)
            return ProfileConfig(right=a, left=a)
        if "right" not in obj or "left" not in obj:
            raise reader.error(path, "need 'uniform' or both 'right' and 'left'")
        return ProfileConfig(
            right=_angles(reader, obj["right"], path + ("right",), split),
            left=_angles(reader, obj["left"], path + ("left",), split),
        )
    obj = reader.obj(raw, path, optional=("phase", "boundary"))
    if ("phase" in obj) == ("boundary" in obj):
        raise reader.error(path, "need exactly one of 'phase' or 'boundary'")
    if kind == "continuous_simple":
        if "phase" in obj:
            return ProfileConfig(phase=reader.choice(obj["phase"], path + ("phase",), ("theta_positive", "theta_negative")))
        return ProfileConfig(boundary=reader.choice(obj["boundary"], path + ("boundary",), ("simple",)))
    if "phase" in obj:
        return ProfileConfig(phase=reader.choice(obj["phase"], path + ("phase",), ("I", "II", "III", "IV")))
    return ProfileConfig(boundary=reader.choice(obj["boundary"], path + ("boundary",), ("III_IV", "I_III")))


def _parse_rates(reader, data, kind) -> tuple:
    path = ("rates",)
    if kind.startswith("discrete"):
        if "rates" in data:
            raise reader.error(path, "discrete walks take no rates")
        return ()
    if "rates" not in data:
        raise reader.error((), "missing required key 'rates'")
    raw = data["rates"]
    if kind == "continuous_simple":
        obj = reader.obj(raw, path, required=("gamma",))
        rates = (reader.number(obj["gamma"], path + ("gamma",)),)
    else:
        obj = reader.obj(raw, path, required=("gamma2",), optional=("gamma1", "R"))
        if ("gamma1" in obj) == ("R" in obj):
            raise reader.error(path, "give exactly one of 'gamma1' or 'R' (gamma1 = R * gamma2)")
        g2 = reader.number(obj["gamma2"], path + ("gamma2",))
        if "R" in obj:
            g1 = reader.number(obj["R"], path + ("R",)) * g2
        else:
            g1 = reader.number(obj["gamma1"], path + ("gamma1",))
        rates = (g1, g2)
    if not any(rates):
        raise reader.error(path, "at least one rate must be nonzero")
    return rates


def _parse_initial(reader, raw, lattice) -> InitialStateConfig:
    path = ("initial_state",)
    obj = reader.obj(raw, path, optional=("center", "spread", "weights", "amplitudes", "random"))
    kinds = [k for k in ("amplitudes", "random") if k in obj]
    packet_keys = [k for k in ("center", "spread", "weights") if k in obj]
    if len(kinds) + bool(packet_keys) != 1:
        raise reader.error(path, "choose one of a packet (center/spread/weights), 'amplitudes' or 'random'")
    if "amplitudes" in obj:
        entries = obj["amplitudes"]
        if not isinstance(entries, list) or not entries:
            raise reader.error(path + ("amplitudes",), "expected a non-empty list of [x, component, amplitude]")
        amps = []
        for i, entry in enumerate(entries):
            p = path + ("amplitudes", i)
            if not isinstance(entry, list) or len(entry) != 3:
                raise reader.error(p, "expected [x, component, amplitude]")
            x = reader.integer(entry[0], p + (0,))
            comp = reader.choice(entry[1], p + (1,), (0, 1))
            if not lattice.contains(x):
                raise reader.error(p + (0,), f"site {x} outside the lattice")
            amps.append((x, comp, reader.complex_(entry[2], p + (2,))))
        if all(a == 0 for _, _, a in amps):
            raise reader.error(path + ("amplitudes",), "all amplitudes are zero")
        return InitialStateConfig("amplitudes", amplitudes=tuple(amps))
    if "random" in obj:
        r = reader.obj(obj["random"], path + ("random",), optional=("window",))
        window = reader.int_pair(r["window"], path + ("random", "window")) if "window" in r else None
        return InitialStateConfig("random", window=window)
    center = reader.integer(obj.get("center", 0), path + ("center",))
    if not lattice.contains(center):
        raise reader.error(path + ("center",), "center outside the lattice")
    spread = reader.number(obj.get("spread", 0.0), path + ("spread",), minimum=0)
    weights = obj.get("weights", [1, 0])
    if not isinstance(weights, list) or len(weights) != 2:
        raise reader.error(path + ("weights",), "expected [w0, w1]")
    w = tuple(reader.complex_(v, path + ("weights", i)) for i, v in enumerate(weights))
    if w == (0, 0):
        raise reader.error(path + ("weights",), "weights are both zero")
    return InitialStateConfig("packet", center=center, spread=spread, weights=w)


def _parse_timing(reader, raw, kind) -> TimingConfig:
    path = ("timing",)
    if kind.startswith("discrete"):
        obj = reader.obj(raw, path, required=("n_steps",), optional=("snapshot_every", "frame_phase"))
        return TimingConfig(
            n_steps=reader.integer(obj["n_steps"], path + ("n_steps",), minimum=0),
            snapshot_every=reader.integer(obj.get("snapshot_every", 1), path + ("snapshot_every",), minimum=1),
            frame_phase=reader.complex_(obj.get("frame_phase", 1), path + ("frame_phase",)),
        )
    obj = reader.obj(raw, path, required=("t_final",), optional=("dt", "snapshot_every"))
    dt = obj.get("dt")
    return TimingConfig(
        t_final=reader.number(obj["t_final"], path + ("t_final",), minimum=0),
        dt=None if dt is None else reader.number(dt, path + ("dt",), minimum=0, strict=True),
        snapshot_every=reader.number(obj.get("snapshot_every", 1.0), path + ("snapshot_every",), minimum=0, strict=True),
    )


def _parse_metrics(reader, raw, lattice) -> MetricsConfig:
    path = ("metrics",)
    obj = reader.obj(raw, path, optional=("boundary_sites", "regions", "peak_window"))
    sites = obj.get("boundary_sites", [-1, 0])
    if not isinstance(sites, list) or not sites:
        raise reader.error(path + ("boundary_sites",), "expected a non-empty list of sites")
    sites = tuple(reader.integer(s, path + ("boundary_sites", i)) for i, s in enumerate(sites))
    for i, s in enumerate(sites):
        if not lattice.contains(s):
            raise reader.error(path + ("boundary_sites", i), f"site {s} outside the lattice")
    regions = {"left": (lattice.x_min, -1), "right": (0, lattice.x_max), "boundary": (-2, 1)}
    if "regions" in obj:
        if not isinstance(obj["regions"], dict):
            raise reader.error(path + ("regions",), "expected an object of name: [lo, hi]")
        regions = {}
        for name, rng in obj["regions"].items():
            lo, hi = reader.int_pair(rng, path + ("regions", name))
            if not lattice.spans(lo, hi):
                raise reader.error(path + ("regions", name), "range not inside the lattice")
            regions[name] = (lo, hi)
    window = reader.int_pair(obj["peak_window"], path + ("peak_window",)) if "peak_window" in obj else (-4, 3)
    return MetricsConfig(sites, regions, window)


TOP_REQUIRED = ("name", "walk_kind", "lattice", "profile", "initial_state", "timing")
TOP_OPTIONAL = ("rates", "metrics", "output", "seed", "description")
_NAME = re.compile(r"^[A-Za-z0-9_.-]+$")


def parse_config(data: dict, lines: dict | None = None, source: str | None = None) -> ExperimentConfig:
    reader = _Reader(lines or {}, source)
    reader.obj(data, (), TOP_REQUIRED, TOP_OPTIONAL)
    name = data["name"]
    if not isinstance(name, str) or not _NAME.match(name):
        raise reader.error(("name",), "expected a file-name-safe string")
    if "description" in data and not isinstance(data["description"], str):
        raise reader.error(("description",), "expected a string")
    kind = reader.choice(data["walk_kind"], ("walk_kind",), WALK_KINDS)

    lat_raw = reader.obj(data["lattice"], ("lattice",), ("x_min", "x_max"), ("boundary_condition",))
    bc = reader.choice(lat_raw.get("boundary_condition", "open"), ("lattice", "boundary_condition"), ("open", "periodic"))
    try:
        lattice = LatticeSpec(
            reader.integer(lat_raw["x_min"], ("lattice", "x_min")),
            reader.integer(lat_raw["x_max"], ("lattice", "x_max")),
            bc,
        )
    except DomainError as exc:
        raise reader.error(("lattice",), str(exc)) from None

    profile = _parse_profile(reader, data["profile"], kind)
    if profile.boundary is not None and not lattice.spans(-8, 8):
        raise reader.error(("lattice",), "boundary runs need a lattice spanning [-8, 8]")
    for side in ("right", "left"):
        value = getattr(profile, side)
        if value is not None and np.any(np.abs(value) > np.pi):
            raise reader.error(("profile", side), "angles must satisfy |angle| <= pi")
    rates = _parse_rates(reader, data, kind)
    initial = _parse_initial(reader, data["initial_state"], lattice)
    timing = _parse_timing(reader, data["timing"], kind)
    metrics = _parse_metrics(reader, data.get("metrics", {}), lattice)
    out = reader.obj(data.get("output", {}), ("output",), optional=("dir",))
    out_dir = out.get("dir", DEFAULT_OUT)
    if not isinstance(out_dir, str) or not out_dir:
        raise reader.error(("output", "dir"), "expected a non-empty path")
    seed = reader.integer(data.get("seed", 0), ("seed",), minimum=0)
    return ExperimentConfig(name, kind, lattice, profile, rates, initial, timing, metrics, out_dir, seed, data)


def load_config_text(text: str, source: str | None = None) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno, source=source) from None
    return parse_config(data, key_lines(text), source)


def bundled_names() -> list[str]:
    folder = resources.files("topowalk") / "configs"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def bundled_text(name: str) -> str:
    path = resources.files("topowalk") / "configs" / f"{name}.json"
    if not path.is_file():
        raise ConfigError(f"no bundled config named {name!r}")
    return path.read_text(encoding="utf-8")


def read_config_source(source: str) -> tuple[str, str]:
    """Text of a config file, falling back to a bundled config of that name."""
    path = Path(source)
    if path.is_file():
        return path.read_text(encoding="utf-8"), str(path)
    if source in bundled_names():
        return bundled_text(source), f"<bundled:{source}>"
    raise ConfigError(f"no such config file or bundled config: {source}")


def load_config(source: str) -> ExperimentConfig:
    text, label = read_config_source(source)
    return load_config_text(text, label)


# -- building and running ---------------------------------------------------


def build_initial_state(config: ExperimentConfig) -> WalkerState:
    init, lat = config.initial_state, config.lattice
    if init.kind == "packet":
        return make_packet(lat, init.center, init.spread, init.weights)
    if init.kind == "amplitudes":
        state = WalkerState.from_amplitudes(lat, {(x, c): a for x, c, a in init.amplitudes})
    else:
        state = random_state(lat, np.random.default_rng(config.seed), init.window)
    return state.scaled(1.0 / np.sqrt(np.sum(state.site_probability())))


def build_profile(config: ExperimentConfig):
    p = config.profile
    if config.walk_kind == "discrete_simple":
        return SimpleAngleProfile.two_phase(config.lattice, p.right, p.left)
    return SplitAngleProfile.two_phase(config.lattice, p.right, p.left)


def build_generator(config: ExperimentConfig):
    p, lat, rates = config.profile, config.lattice, config.rates
    if config.walk_kind == "continuous_simple":
        if p.boundary:
            return boundary_generator_simple(rates[0], lat)
        return bulk_generator_simple(p.phase, rates[0], lat)
    if p.boundary:
        return boundary_generator_split(p.boundary, *rates, lat)
    return bulk_generator_split(p.phase, *rates, lat)


def simulate(config: ExperimentConfig) -> Trajectory:
    state = build_initial_state(config)
    t = config.timing
    if config.discrete:
        traj = evolve_discrete(state, build_profile(config), t.n_steps, t.frame_phase, int(t.snapshot_every))
        bad = ~np.isfinite(traj.psi0).all(axis=1) | ~np.isfinite(traj.psi1).all(axis=1)
        if bad.any():
            raise NumericalError("non-finite amplitude", float(traj.times[np.argmax(bad)]))
        return traj
    try:
        return evolve_continuous(state, build_generator(config), t.t_final, t.dt, t.snapshot_every)
    except IntegrationError as exc:
        raise NumericalError("integration failed", exc.time) from exc


def _linear_fit(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope and coefficient of determination of a least-squares line."""
    if len(t) < 3:
        return float("nan"), float("nan")
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / total if total > 0 else float("nan")
    return float(slope), float(r2)


def peak_sites(probabilities: np.ndarray, lattice: LatticeSpec, window: tuple[int, int]) -> list[int]:
    """Sites inside ``window`` holding at least PEAK_FRACTION of the window maximum.

    Near-equal neighbours both count, so a symmetric pair reports two sites.
    """
    lo, hi = max(window[0], lattice.x_min), min(window[1], lattice.x_max)
    i0, i1 = lattice.index(lo), lattice.index(hi)
    p = probabilities[i0 : i1 + 1]
    top = p.max()
    if top <= 0:
        return []
    return [lo + int(i) for i in np.flatnonzero(p >= PEAK_FRACTION * top)]


def compute_metrics(config: ExperimentConfig, traj: Trajectory) -> dict:
    lat, m = config.lattice, config.metrics
    x = lat.positions.astype(float)
    probs = traj.site_probabilities()
    norms = probs.sum(axis=1)
    mean = probs @ x / norms
    var = probs @ (x**2) / norms - mean**2
    std = np.sqrt(np.clip(var, 0.0, None))
    b_idx = [lat.index(s) for s in m.boundary_sites]
    boundary = probs[:, b_idx].sum(axis=1)
    regions = {name: probs[:, lat.index(lo) : lat.index(hi) + 1].sum(axis=1) for name, (lo, hi) in m.regions.items()}
    times = traj.times.astype(float)

    snapshots = []
    for k, t in enumerate(times):
        snapshots.append(
            {
                "t": float(t),
                "norm": float(norms[k]),
                "boundary_probability": float(boundary[k]),
                "regions": {name: float(v[k]) for name, v in regions.items()},
                "mean_position": float(mean[k]),
                "position_std": float(std[k]),
            }
        )
    half = len(times) // 2
    sigma_slope, sigma_r2 = _linear_fit(times[half:], std[half:])
    mean_velocity, _ = _linear_fit(times[half:], mean[half:])
    summary = {
        "norm_drift": float(np.max(np.abs(norms - norms[0]))),
        "edge_probability": float(np.max(probs[:, [0, -1]])),
        "boundary_probability_final": float(boundary[-1]),
        "boundary_probability_min": float(boundary.min()),
        "boundary_probability_max": float(boundary.max()),
        "region_probability_max": {name: float(v.max()) for name, v in regions.items()},
        "region_probability_final": {name: float(v[-1]) for name, v in regions.items()},
        "sigma_slope": sigma_slope,
        "sigma_r2": sigma_r2,
        "mean_velocity": mean_velocity,
        "peak_sites": peak_sites(probs[-1], lat, m.peak_window),
    }
    return {"snapshots": snapshots, "summary": summary}


def format_csv(traj: Trajectory) -> str:
    x = traj.lattice.positions
    lines = [CSV_HEADER]
    p0s, p1s = np.abs(traj.psi0) ** 2, np.abs(traj.psi1) ** 2
    for t, p0, p1 in zip(traj.times, p0s, p1s):
        ts = f"{t:.17g}"
        lines.extend(f"{ts},{xi},{a:.17g},{b:.17g}" for xi, a, b in zip(x, p0, p1))
    return "\n".join(lines) + "\n"


def output_dir(config: ExperimentConfig, override: str | None = None) -> Path:
    return Path(override or os.environ.get(OUT_ENV) or config.output_dir)


@dataclass(eq=False)
class RunResult:
    config: ExperimentConfig
    trajectory: Trajectory
    metrics: dict
    csv_path: Path
    manifest_path: Path

    @property
    def summary(self) -> dict:
        return self.metrics["summary"]


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(config: ExperimentConfig, out_dir: str | Path | None = None) -> RunResult:
    """Simulate ``config`` and write ``<name>.csv`` and ``<name>.json`` under the output directory."""
    traj = simulate(config)
    metrics = compute_metrics(config, traj)
    folder = Path(out_dir) if out_dir is not None else output_dir(config)
    csv_path = folder / f"{config.name}.csv"
    manifest_path = folder / f"{config.name}.json"
    manifest = {
        "name": config.name,
        "walk_kind": config.walk_kind,
        "time_unit": "steps" if config.discrete else "time",
        "config": config.raw,
        "csv": csv_path.name,
        "norm_trace": [s["norm"] for s in metrics["snapshots"]],
        "summary": metrics["summary"],
        "snapshots": metrics["snapshots"],
    }
    _write_text(csv_path, format_csv(traj))
    _write_text(manifest_path, json.dumps(manifest, indent=2) + "\n")
    return RunResult(config, traj, metrics, csv_path, manifest_path)


# -- sweeps ----------------------------------------------------------------


def resolve_param(data: dict, param: str) -> tuple:
    """Key path for ``param``: a dotted path, or a bare key that occurs exactly once."""
    if "." in param:
        path, node = [], data
        for part in param.split("."):
            key = int(part) if isinstance(node, list) and part.lstrip("-").isdigit() else part
            try:
                node = node[key]
            except (KeyError, IndexError, TypeError):
                raise ConfigError(f"parameter path {param!r} not found in config") from None
            path.append(key)
        return tuple(path)
    hits = []

    def walk(node, path):
        if isinstance(node, dict):
            for k, v in node.items():
                if k == param:
                    hits.append(path + (k,))
                walk(v, path + (k,))
        elif isinstance(node, list):
            for i, v in enumerate(node):
                walk(v, path + (i,))

    walk(data, ())
    if len(hits) != 1:
        found = "not found" if not hits else "ambiguous"
        raise ConfigError(f"parameter {param!r} {found} in config; use a dotted path")
    return hits[0]


def with_override(data: dict, path: tuple, value) -> dict:
    out = copy.deepcopy(data)
    node = out
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = value
    return out


def parse_value(text: str):
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        raise ConfigError(f"sweep value {text!r} is not a JSON number") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"sweep value {text!r} is not a number")
    return value


@dataclass
class SweepOutcome:
    label: str
    code: int
    message: str
    csv_path: str | None = None
    manifest_path: str | None = None


def _sweep_child(data: dict, folder: str, label: str) -> SweepOutcome:
    try:
        result = run(parse_config(data), folder)
    except (ConfigError, DomainError) as exc:
        return SweepOutcome(label, EXIT_CONFIG, str(exc))
    except NumericalError as exc:
        return SweepOutcome(label, EXIT_NUMERICAL, str(exc))
    return SweepOutcome(label, EXIT_OK, "ok", str(result.csv_path), str(result.manifest_path))


def sweep(source: str, param: str, values: list[str], jobs: int = 1, out_dir: str | None = None) -> list[SweepOutcome]:
    """Run the config once per value of ``param``; outputs go to ``<out>/<name>/<param>=<value>/``."""
    text, label = read_config_source(source)
    base = load_config_text(text, label)
    path = resolve_param(base.raw, param)
    root = output_dir(base, out_dir) / base.name
    tasks = []
    for raw_value in values:
        value = parse_value(raw_value)
        tasks.append((with_override(base.raw, path, value), str(root / f"{param}={raw_value}"), raw_value))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_sweep_child, *task) for task in tasks]
            return [f.result() for f in futures]
    return [_sweep_child(*task) for task in tasks]
