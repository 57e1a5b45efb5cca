"""Lattice wavefunctions, coin-angle profiles and phase labels."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

MIN_SITES = 8


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class BoundaryCondition(str, enum.Enum):
    PERIODIC = "periodic"
    OPEN = "open"


@dataclass(frozen=True)
class LatticeSpec:
    """Finite window [x_min, x_max] of the integer line."""

    x_min: int
    x_max: int
    boundary_condition: BoundaryCondition = BoundaryCondition.PERIODIC

    def __post_init__(self):
        if self.x_min >= self.x_max:
            raise DomainError(f"x_min={self.x_min} must be < x_max={self.x_max}")
        if self.x_max - self.x_min + 1 < MIN_SITES:
            raise DomainError(f"lattice needs at least {MIN_SITES} sites")
        object.__setattr__(self, "boundary_condition", BoundaryCondition(self.boundary_condition))

    @property
    def size(self) -> int:
        return self.x_max - self.x_min + 1

    @property
    def periodic(self) -> bool:
        return self.boundary_condition is BoundaryCondition.PERIODIC

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.x_min, self.x_max + 1)

    def contains(self, x: int) -> bool:
        return self.x_min <= x <= self.x_max

    def index(self, x: int) -> int:
        if not self.contains(x):
            raise DomainError(f"site {x} outside [{self.x_min}, {self.x_max}]")
        return x - self.x_min

    def spans(self, lo: int, hi: int) -> bool:
        return self.x_min <= lo and hi <= self.x_max


@dataclass(eq=False)
class WalkerState:
    """Two-component amplitude field (psi0, psi1) over a lattice."""

    lattice: LatticeSpec
    psi0: np.ndarray
    psi1: np.ndarray

    def __post_init__(self):
        self.psi0 = np.array(self.psi0, dtype=np.complex128)
        self.psi1 = np.array(self.psi1, dtype=np.complex128)
        n = self.lattice.size
        if self.psi0.shape != (n,) or self.psi1.shape != (n,):
            raise DomainError(f"amplitude arrays must have shape ({n},)")

    @classmethod
    def zeros(cls, lattice: LatticeSpec) -> WalkerState:
        return cls(lattice, np.zeros(lattice.size), np.zeros(lattice.size))

    @classmethod
    def from_amplitudes(cls, lattice: LatticeSpec, amplitudes: dict) -> WalkerState:
        """Build a state from ``{(x, component): amplitude}``, unnormalized."""
        state = cls.zeros(lattice)
        for (x, comp), amp in amplitudes.items():
            state.component(comp)[lattice.index(x)] += amp
        return state

    def component(self, comp: int) -> np.ndarray:
        if comp == 0:
            return self.psi0
        if comp == 1:
            return self.psi1
        raise DomainError(f"component must be 0 or 1, got {comp}")

    def amplitude(self, x: int, comp: int) -> complex:
        return complex(self.component(comp)[self.lattice.index(x)])

    def copy(self) -> WalkerState:
        return WalkerState(self.lattice, self.psi0.copy(), self.psi1.copy())

    def scaled(self, factor: complex) -> WalkerState:
        return WalkerState(self.lattice, self.psi0 * factor, self.psi1 * factor)

    def probabilities(self) -> tuple[np.ndarray, np.ndarray]:
        return np.abs(self.psi0) ** 2, np.abs(self.psi1) ** 2

    def site_probability(self) -> np.ndarray:
        p0, p1 = self.probabilities()
        return p0 + p1

    def stacked(self) -> np.ndarray:
        return np.stack([self.psi0, self.psi1])


def norm_squared(state: WalkerState) -> float:
    return float(np.sum(state.site_probability()))


def make_packet(
    lattice: LatticeSpec,
    center: int,
    spread: float,
    component_weights: tuple[complex, complex] = (1.0, 0.0),
) -> WalkerState:
    """Gaussian packet around ``center``; ``spread == 0`` gives a single-site state.

    The result is normalized to one whatever the scale of ``component_weights``.
    """
    if not lattice.contains(center):
        raise DomainError(f"center {center} outside lattice")
    if spread < 0:
        raise DomainError("spread must be non-negative")
    w0, w1 = (complex(w) for w in component_weights)
    if w0 == 0 and w1 == 0:
        raise DomainError("component weights are both zero")
    x = lattice.positions
    if spread == 0:
        envelope = (x == center).astype(float)
    else:
        with np.errstate(over="ignore"):  # tiny spreads collapse to a delta
            envelope = np.exp(-(((x - center) / (2.0 * spread)) ** 2))
    state = WalkerState(lattice, w0 * envelope, w1 * envelope)
    return state.scaled(1.0 / np.sqrt(norm_squared(state)))


def random_state(lattice: LatticeSpec, rng: np.random.Generator, window=None) -> WalkerState:
    """Normalized state with complex Gaussian amplitudes, optionally confined to ``window``."""
    n = lattice.size
    psi = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    if window is not None:
        lo, hi = window
        x = lattice.positions
        psi[:, (x < lo) | (x > hi)] = 0.0
    state = WalkerState(lattice, psi[0], psi[1])
    return state.scaled(1.0 / np.sqrt(norm_squared(state)))


def region_probability(state: WalkerState, x_lo: int, x_hi: int) -> float:
    if x_lo > x_hi:
        raise DomainError(f"inverted range [{x_lo}, {x_hi}]")
    lat = state.lattice
    if not (lat.contains(x_lo) and lat.contains(x_hi)):
        raise DomainError(f"range [{x_lo}, {x_hi}] not inside lattice")
    i, j = lat.index(x_lo), lat.index(x_hi)
    return float(np.sum(state.site_probability()[i : j + 1]))


def _piecewise(lattice: LatticeSpec, right: float, left: float, boundary: int) -> np.ndarray:
    return np.where(lattice.positions >= boundary, float(right), float(left))


def _check_angles(name: str, values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{name} must be finite")
    if np.any(np.abs(values) > np.pi + 1e-12):
        raise DomainError(f"{name} must satisfy |angle| <= pi")
    if np.count_nonzero(np.diff(values)) > 1:
        raise DomainError(f"{name} may change value at most once")


@dataclass(eq=False)
class SimpleAngleProfile:
    """Per-site coin angle for the simple-step walk."""

    lattice: LatticeSpec
    theta: np.ndarray

    def __post_init__(self):
        self.theta = np.broadcast_to(np.asarray(self.theta, dtype=float), (self.lattice.size,)).copy()
        _check_angles("theta", self.theta)

    @classmethod
    def uniform(cls, lattice: LatticeSpec, theta: float) -> SimpleAngleProfile:
        return cls(lattice, np.full(lattice.size, float(theta)))

    @classmethod
    def two_phase(cls, lattice: LatticeSpec, right: float, left: float, boundary: int = 0):
        """``right`` on x >= boundary, ``left`` on x < boundary."""
        return cls(lattice, _piecewise(lattice, right, left, boundary))


@dataclass(eq=False)
class SplitAngleProfile:
    """Per-site coin angles (theta1, theta2) for the split-step walk."""

    lattice: LatticeSpec
    theta1: np.ndarray
    theta2: np.ndarray

    def __post_init__(self):
        n = self.lattice.size
        self.theta1 = np.broadcast_to(np.asarray(self.theta1, dtype=float), (n,)).copy()
        self.theta2 = np.broadcast_to(np.asarray(self.theta2, dtype=float), (n,)).copy()
        _check_angles("theta1", self.theta1)
        _check_angles("theta2", self.theta2)
        seams = np.flatnonzero((np.diff(self.theta1) != 0) | (np.diff(self.theta2) != 0))
        if len(seams) > 1:
            raise DomainError("split profile may have at most one boundary")

    @classmethod
    def uniform(cls, lattice: LatticeSpec, theta1: float, theta2: float) -> SplitAngleProfile:
        return cls(lattice, np.full(lattice.size, float(theta1)), np.full(lattice.size, float(theta2)))

    @classmethod
    def two_phase(cls, lattice: LatticeSpec, right, left, boundary: int = 0):
        """``right``/``left`` are (theta1, theta2) pairs on x >= boundary / x < boundary."""
        return cls(
            lattice,
            _piecewise(lattice, right[0], left[0], boundary),
            _piecewise(lattice, right[1], left[1], boundary),
        )


class PhaseName(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    SIMPLE_POSITIVE = "SimplePositive"
    SIMPLE_NEGATIVE = "SimpleNegative"


SPLIT_WINDINGS = {
    PhaseName.I: (1, 1),
    PhaseName.II: (0, 0),
    PhaseName.III: (0, 1),
    PhaseName.IV: (1, 0),
}


@dataclass(frozen=True)
class PhaseLabel:
    nu0: int
    nu1: int
    name: PhaseName = field(default=None)

    def __post_init__(self):
        if self.nu0 not in (0, 1) or self.nu1 not in (0, 1):
            raise DomainError(f"winding numbers must be 0 or 1, got ({self.nu0}, {self.nu1})")
        if self.name is None:
            object.__setattr__(self, "name", split_phase_from_windings(self.nu0, self.nu1))
        else:
            name = PhaseName(self.name)
            object.__setattr__(self, "name", name)
            if name in SPLIT_WINDINGS and SPLIT_WINDINGS[name] != (self.nu0, self.nu1):
                raise DomainError(f"phase {name.value} requires windings {SPLIT_WINDINGS[name]}")

    @property
    def windings(self) -> tuple[int, int]:
        return self.nu0, self.nu1

    def __str__(self) -> str:
        return self.name.value


def split_phase_from_windings(nu0: int, nu1: int) -> PhaseName:
    for name, pair in SPLIT_WINDINGS.items():
        if pair == (nu0, nu1):
            return name
    raise DomainError(f"no split-step phase with windings ({nu0}, {nu1})")


@dataclass(eq=False)
class Trajectory:
    """Snapshots of a walk: ``times[i]`` with amplitudes ``psi0[i]``, ``psi1[i]``.

    Times are step counts for discrete walks and physical times for continuous ones.
    """

    lattice: LatticeSpec
    times: np.ndarray
    psi0: np.ndarray
    psi1: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, i: int) -> WalkerState:
        return WalkerState(self.lattice, self.psi0[i], self.psi1[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def final(self) -> WalkerState:
        return self[len(self) - 1]

    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.psi0) ** 2 + np.abs(self.psi1) ** 2, axis=1)

    def site_probabilities(self) -> np.ndarray:
        return np.abs(self.psi0) ** 2 + np.abs(self.psi1) ** 2
