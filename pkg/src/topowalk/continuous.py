"""Continuous-time limits of the simple-step and split-step walks.

Generators are banded operators G with dPsi/dt = G Psi.  Each one is stored
as coefficient arrays keyed by ``(target, source, dx)``: row ``(x, target)``
receives ``coef[x] * psi_source(x + dx)``.

Corner scalings (epsilon = gamma * dt, one two-step block spans dt):

    simple +      theta = pi/2 - eps
    simple -      theta = -pi/2 - eps
    split I       (eps1, pi/2 - eps2)
    split II      (eps1, -pi/2 - eps2)
    split III     (pi/2 - eps1, eps2)
    split IV      (-pi/2 - eps1, eps2)

Split-step blocks tend to -I at every corner, so the discrete comparison
multiplies by -1 after each two-step block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discrete import build_dense_operator, evolve_discrete
from .lattice import (
    DomainError,
    LatticeSpec,
    PhaseName,
    SimpleAngleProfile,
    SplitAngleProfile,
    Trajectory,
    WalkerState,
)

BOUNDARY_SPAN = (-8, 8)
MAX_OFFSET = 4


class IntegrationError(RuntimeError):
    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t={time:.6g}")
        self.time = time


# -- generator container -----------------------------------------------------


def _source(arr: np.ndarray, dx: int, periodic: bool) -> np.ndarray:
    """out[x] = arr[x + dx], wrapping or zero-filling at the window edge."""
    if periodic:
        return np.roll(arr, -dx)
    out = np.zeros_like(arr)
    if dx > 0:
        out[:-dx] = arr[dx:]
    elif dx < 0:
        out[-dx:] = arr[:dx]
    else:
        out[:] = arr
    return out


@dataclass(eq=False)
class Generator:
    """Banded linear generator on a lattice.

    ``rate_scale`` is the largest rate the generator was built from and sets
    the default integration step.
    """

    lattice: LatticeSpec
    terms: dict = field(default_factory=dict)
    rate_scale: float = 0.0
    notes: tuple = ()

    def set_row(self, x: int, target: int, entries) -> None:
        """Replace row ``(x, target)`` by ``entries = [(source, dx, coef), ...]``."""
        i = self.lattice.index(x)
        for (tgt, _, _), coef in self.terms.items():
            if tgt == target:
                coef[i] = 0.0
        for src, dx, coef in entries:
            if abs(dx) > MAX_OFFSET:
                raise DomainError(f"offset {dx} exceeds band limit {MAX_OFFSET}")
            key = (target, src, dx)
            if key not in self.terms:
                self.terms[key] = np.zeros(self.lattice.size, dtype=np.complex128)
            self.terms[key][i] += coef

    def row(self, x: int, target: int) -> list[tuple[int, int, complex]]:
        i = self.lattice.index(x)
        out = [(src, dx, complex(c[i])) for (tgt, src, dx), c in self.terms.items() if tgt == target and c[i] != 0]
        return sorted(out, key=lambda e: (e[0], e[1]))

    def apply(self, psi0: np.ndarray, psi1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        periodic = self.lattice.periodic
        out = [np.zeros(self.lattice.size, np.complex128), np.zeros(self.lattice.size, np.complex128)]
        psi = (psi0, psi1)
        for (tgt, src, dx), coef in self.terms.items():
            out[tgt] += coef * _source(psi[src], dx, periodic)
        return out[0], out[1]

    def to_dense(self) -> np.ndarray:
        """2N x 2N matrix, site-major and component-minor like the discrete oracle."""
        n = self.lattice.size
        mat = np.zeros((2 * n, 2 * n), dtype=np.complex128)
        for (tgt, src, dx), coef in self.terms.items():
            for i in np.flatnonzero(coef):
                j = i + dx
                if self.lattice.periodic:
                    j %= n
                elif not 0 <= j < n:
                    continue
                mat[2 * i + tgt, 2 * j + src] += coef[i]
        return mat

    def zero_rows(self) -> list[tuple[int, int]]:
        rows = []
        for x in self.lattice.positions:
            for comp in (0, 1):
                if not self.row(int(x), comp):
                    rows.append((int(x), comp))
        return rows

    def anti_hermitian_defect(self) -> float:
        g = self.to_dense()
        return float(np.max(np.abs(g + g.conj().T)))

    def scaled(self, factor: float) -> Generator:
        return Generator(
            self.lattice,
            {k: v * factor for k, v in self.terms.items()},
            self.rate_scale * abs(factor),
            self.notes,
        )


# -- row tables ---------------------------------------------------------------


def _simple_rows(phase: str, g: float) -> dict:
    if phase == "theta_positive":
        return {0: [(1, 0, g), (1, -2, -g)], 1: [(0, 0, -g), (0, 2, g)]}
    if phase == "theta_negative":
        return {0: [(1, 0, g), (1, 2, -g)], 1: [(0, 0, -g), (0, -2, g)]}
    raise DomainError(f"unknown simple phase {phase!r}")


def _split_rows(phase, g1: float, g2: float) -> dict:
    try:
        phase = PhaseName(phase)
    except ValueError:
        raise DomainError(f"unknown split phase {phase!r}") from None
    if phase in (PhaseName.I, PhaseName.II):
        return {
            0: [(1, 0, -2 * g1), (1, -1, -g2), (1, 1, -g2)],
            1: [(0, 0, 2 * g1), (0, -1, g2), (0, 1, g2)],
        }
    if phase is PhaseName.III:
        return {
            0: [(1, 0, g1), (1, -2, g1), (1, -1, 2 * g2)],
            1: [(0, 0, -g1), (0, 2, -g1), (0, 1, -2 * g2)],
        }
    if phase is PhaseName.IV:
        return {
            0: [(1, 0, g1), (1, 2, g1), (1, 1, 2 * g2)],
            1: [(0, 0, -g1), (0, -2, -g1), (0, -1, -2 * g2)],
        }
    raise DomainError(f"no continuous limit for phase {phase.value}")


def _fill(gen: Generator, rows: dict, xs) -> None:
    for x in xs:
        for target, entries in rows.items():
            gen.set_row(int(x), target, entries)


def _check_rates(*rates) -> None:
    if not all(np.isfinite(r) for r in rates):
        raise DomainError("rates must be finite")


def bulk_generator_simple(phase: str, gamma: float, lattice: LatticeSpec) -> Generator:
    _check_rates(gamma)
    gen = Generator(lattice, rate_scale=abs(gamma))
    _fill(gen, _simple_rows(phase, gamma), lattice.positions)
    return gen


def bulk_generator_split(phase, gamma1: float, gamma2: float, lattice: LatticeSpec) -> Generator:
    _check_rates(gamma1, gamma2)
    name = getattr(phase, "name", phase)
    gen = Generator(lattice, rate_scale=max(abs(gamma1), abs(gamma2)))
    _fill(gen, _split_rows(name, gamma1, gamma2), lattice.positions)
    return gen


def _require_span(lattice: LatticeSpec) -> None:
    if not lattice.spans(*BOUNDARY_SPAN):
        raise DomainError(f"boundary generators need a lattice spanning {list(BOUNDARY_SPAN)}")


def _stitch(gen, lattice, right_rows, right_from, left_rows, left_to, seam_rows):
    x = lattice.positions
    _fill(gen, right_rows, x[x >= right_from])
    _fill(gen, left_rows, x[x <= left_to])
    for site, rows in seam_rows.items():
        for target, entries in rows.items():
            gen.set_row(site, target, entries)
    return gen


def boundary_generator_simple(gamma: float, lattice: LatticeSpec) -> Generator:
    """theta > 0 on x >= 0 and theta < 0 on x < 0, stitched at the seam.

    Psi0(0) and Psi0(-1) have identically zero rows.
    """
    _check_rates(gamma)
    _require_span(lattice)
    g = gamma
    seam = {
        1: {0: [(1, 0, g)], 1: [(0, 0, -g), (0, 2, g)]},
        0: {0: [], 1: [(0, 2, g)]},
        -1: {0: [], 1: [(0, -2, g)]},
        -2: {0: [(1, 0, g)], 1: [(0, 0, -g), (0, -2, g)]},
    }
    gen = Generator(lattice, rate_scale=abs(g))
    return _stitch(
        gen, lattice, _simple_rows("theta_positive", g), 2, _simple_rows("theta_negative", g), -3, seam
    )


def boundary_generator_split(pair: str, gamma1: float, gamma2: float, lattice: LatticeSpec) -> Generator:
    """Two split-step phases joined at x = 0 (first named phase on x >= 0).

    ``III_IV`` decouples Psi0(0) and Psi0(-1); ``I_III`` decouples Psi1(-1).
    """
    _check_rates(gamma1, gamma2)
    _require_span(lattice)
    g1, g2 = gamma1, gamma2
    gen = Generator(lattice, rate_scale=max(abs(g1), abs(g2)))
    if pair == "III_IV":
        seam = {
            -2: {0: [(1, 0, g1), (1, 1, 2 * g2)], 1: [(0, 0, -g1), (0, -2, -g1), (0, -1, -2 * g2)]},
            -1: {0: [], 1: [(0, -2, -g1), (0, -1, -2 * g2)]},
            0: {0: [], 1: [(0, 2, -g1), (0, 1, -2 * g2)]},
            1: {0: [(1, 0, g1), (1, -1, 2 * g2)], 1: [(0, 0, -g1), (0, 2, -g1), (0, 1, -2 * g2)]},
        }
        return _stitch(gen, lattice, _split_rows("III", g1, g2), 2, _split_rows("IV", g1, g2), -3, seam)
    if pair == "I_III":
        seam = {
            -2: {0: [(1, -2, g1), (1, 0, g1), (1, -1, 2 * g2)], 1: [(0, 0, -g1), (0, 1, -2 * g2)]},
            -1: {0: [(1, -2, g1), (1, -1, 2 * g2)], 1: []},
            0: {0: [(1, 1, -g2)], 1: [(0, 1, g2)]},
        }
        # the x = 0 rows omit the on-site -+2*gamma1 couplings that the
        # discrete limit produces; extract_generator_oracle reports them
        gen.notes = ("x=0 rows lack on-site 2*gamma1 terms",)
        return _stitch(gen, lattice, _split_rows("I", g1, g2), 1, _split_rows("III", g1, g2), -3, seam)
    raise DomainError(f"unknown boundary pair {pair!r}")


# -- time integration ---------------------------------------------------------


def default_dt(generator: Generator) -> float:
    return 0.01 / generator.rate_scale if generator.rate_scale > 0 else 0.01


def evolve_continuous(
    state: WalkerState,
    generator: Generator,
    t_final: float,
    dt: float | None = None,
    snapshot_every: float | None = None,
) -> Trajectory:
    """Classic fixed-step RK4.

    Snapshot times are multiples of ``snapshot_every`` rounded to whole steps;
    t = 0 and the final time are always recorded.
    """
    if state.lattice != generator.lattice:
        raise DomainError("state and generator live on different lattices")
    dt = default_dt(generator) if dt is None else float(dt)
    if not dt > 0:
        raise DomainError("dt must be positive")
    if t_final < 0:
        raise DomainError("t_final must be non-negative")
    n_steps = int(round(t_final / dt))
    if snapshot_every is None:
        every = max(n_steps, 1)
    else:
        if snapshot_every <= 0:
            raise DomainError("snapshot_every must be positive")
        every = max(int(round(snapshot_every / dt)), 1)

    a, b = state.psi0.copy(), state.psi1.copy()
    times, psi0, psi1 = [0.0], [a.copy()], [b.copy()]
    apply = generator.apply
    half = dt / 2
    for n in range(1, n_steps + 1):
        k1a, k1b = apply(a, b)
        k2a, k2b = apply(a + half * k1a, b + half * k1b)
        k3a, k3b = apply(a + half * k2a, b + half * k2b)
        k4a, k4b = apply(a + dt * k3a, b + dt * k3b)
        a = a + (dt / 6) * (k1a + 2 * k2a + 2 * k3a + k4a)
        b = b + (dt / 6) * (k1b + 2 * k2b + 2 * k3b + k4b)
        if n % every == 0 or n == n_steps:
            if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
                raise IntegrationError("non-finite amplitude", n * dt)
            times.append(n * dt)
            psi0.append(a)
            psi1.append(b)
    return Trajectory(state.lattice, np.array(times), np.array(psi0), np.array(psi1))


# -- decoupled fields --------------------------------------------------------

# variant -> (coefficient on Psi0, offset of the Psi1 partner)
PHI_VARIANTS = {
    "simple": (1.0, -1),
    "simple_other": (-1.0, 1),
    "split_III": (1j, -1),
    "split_IV": (1j, 1),
    "split_I": (1j, 0),
}


@dataclass(eq=False)
class DecoupledField:
    lattice: LatticeSpec
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    variant: str


def _variant(variant: str):
    try:
        return PHI_VARIANTS[variant]
    except KeyError:
        raise DomainError(f"unknown decoupling variant {variant!r}") from None


def _cyclic(arr, dx):
    """out[..., x] = arr[..., x + dx] with cyclic indexing along the last axis."""
    return np.roll(arr, -dx, axis=-1)


def phi_transform(state: WalkerState, variant: str) -> DecoupledField:
    """Phi_+-(x) = +-c Psi0(x) + Psi1(x + d) for the variant's (c, d).

    Shifts wrap cyclically so the map is invertible on any window.
    """
    c, d = _variant(variant)
    partner = _cyclic(state.psi1, d)
    return DecoupledField(state.lattice, c * state.psi0 + partner, -c * state.psi0 + partner, variant)


def phi_inverse(phi: DecoupledField, variant: str | None = None) -> WalkerState:
    c, d = _variant(variant or phi.variant)
    psi0 = (phi.phi_plus - phi.phi_minus) / (2 * c)
    psi1 = _cyclic((phi.phi_plus + phi.phi_minus) / 2, -d)
    return WalkerState(phi.lattice, psi0, psi1)


def decoupled_rhs(phi: np.ndarray, sign: int, rates, variant: str) -> np.ndarray:
    """Right-hand side of the decoupled equation for Phi_+ (sign=+1) or Phi_- (sign=-1).

    Acts on the last axis with cyclic neighbours.
    """
    left, right = _cyclic(phi, -1), _cyclic(phi, 1)
    if variant in ("simple", "simple_other"):
        (g,) = np.atleast_1d(rates)
        return sign * g * (right - left)
    g1, g2 = rates
    if variant in ("split_III", "split_IV"):
        return sign * 1j * (2 * g2 * phi + g1 * (left + right))
    if variant == "split_I":
        return -sign * 1j * (2 * g1 * phi + g2 * (left + right))
    raise DomainError(f"unknown decoupling variant {variant!r}")


def decoupled_bandwidth(rates, variant: str) -> float:
    """Bound on |omega(k)| for the decoupled equation."""
    if variant in ("simple", "simple_other"):
        return 2 * abs(np.atleast_1d(rates)[0])
    g1, g2 = rates
    return 2 * abs(g1) + 2 * abs(g2)


def decoupled_residual_budget(rates, variant: str, spacing: float, slack: float = 1e-9) -> float:
    """Error budget for ``decoupled_residual`` at snapshot spacing ``spacing``.

    Central differences err by h^2/6 |Phi'''| and |Phi'''| <= Lambda^3 ||Phi||_2
    with ||Phi||_2 <= sqrt(2) for a normalized state.  ``slack`` covers RK4 error.
    """
    lam = decoupled_bandwidth(rates, variant)
    return np.sqrt(2) * lam**3 * spacing**2 / 6 + slack


def transform_trajectory(traj: Trajectory, variant: str) -> tuple[np.ndarray, np.ndarray]:
    """Phi_+ and Phi_- for every snapshot, shape (T, N)."""
    c, d = _variant(variant)
    partner = _cyclic(traj.psi1, d)
    return c * traj.psi0 + partner, -c * traj.psi0 + partner


def decoupled_residual(traj: Trajectory, rates, variant: str) -> float:
    """Max |dPhi/dt - RHS| over interior snapshots, dPhi/dt by central differences.

    Snapshots must be equally spaced in time.
    """
    if len(traj) < 3:
        raise DomainError("need at least three snapshots")
    steps = np.diff(traj.times)
    h = steps[0]
    if not np.allclose(steps, h, rtol=1e-9, atol=0):
        raise DomainError("snapshots must be equally spaced")
    worst = 0.0
    for sign, phi in zip((1, -1), transform_trajectory(traj, variant)):
        deriv = (phi[2:] - phi[:-2]) / (2 * h)
        rhs = decoupled_rhs(phi[1:-1], sign, rates, variant)
        worst = max(worst, float(np.max(np.abs(deriv - rhs))))
    return worst


# -- discrete-limit oracle ---------------------------------------------------

BULK_CASES = ("theta_positive", "theta_negative", "I", "II", "III", "IV")
BOUNDARY_CASES = ("simple_boundary", "III_IV", "I_III")
SIMPLE_CASES = ("theta_positive", "theta_negative", "simple_boundary")


def corner_angles(phase: str, rates, dt: float):
    """Coin angle(s) at a phase corner for time step ``dt``."""
    if phase == "theta_positive":
        return np.pi / 2 - rates[0] * dt
    if phase == "theta_negative":
        return -np.pi / 2 - rates[0] * dt
    e1, e2 = rates[0] * dt, rates[1] * dt
    table = {
        "I": (e1, np.pi / 2 - e2),
        "II": (e1, -np.pi / 2 - e2),
        "III": (np.pi / 2 - e1, e2),
        "IV": (-np.pi / 2 - e1, e2),
    }
    if phase not in table:
        raise DomainError(f"unknown corner {phase!r}")
    return table[phase]


_BOUNDARY_SIDES = {
    "simple_boundary": ("theta_positive", "theta_negative"),
    "III_IV": ("III", "IV"),
    "I_III": ("I", "III"),
}


def _as_rates(case: str, rates) -> tuple:
    rates = tuple(float(r) for r in np.atleast_1d(rates))
    simple = case in SIMPLE_CASES
    if len(rates) != (1 if simple else 2):
        raise DomainError(f"case {case!r} takes {'one rate' if simple else 'two rates'}")
    return rates


def scaling_profile(lattice: LatticeSpec, case: str, rates, dt: float):
    """Discrete angle profile approaching the continuous limit ``case`` at step ``dt``."""
    rates = _as_rates(case, rates)
    if case in _BOUNDARY_SIDES:
        right, left = (corner_angles(p, rates, dt) for p in _BOUNDARY_SIDES[case])
    elif case in BULK_CASES:
        right = left = corner_angles(case, rates, dt)
    else:
        raise DomainError(f"unknown case {case!r}")
    if case in SIMPLE_CASES:
        return SimpleAngleProfile.two_phase(lattice, right, left)
    return SplitAngleProfile.two_phase(lattice, right, left)


def block_spec(case: str) -> tuple[int, float]:
    """(steps per block, phase applied per block) used to approach the limit."""
    if case in BOUNDARY_CASES:
        return 4, 1.0
    if case in ("theta_positive", "theta_negative"):
        return 2, 1.0
    return 2, -1.0


def analytic_generator(case: str, rates, lattice: LatticeSpec) -> Generator:
    rates = _as_rates(case, rates)
    if case in ("theta_positive", "theta_negative"):
        return bulk_generator_simple(case, rates[0], lattice)
    if case == "simple_boundary":
        return boundary_generator_simple(rates[0], lattice)
    if case in BOUNDARY_CASES:
        return boundary_generator_split(case, *rates, lattice)
    return bulk_generator_split(case, *rates, lattice)


def block_estimate(case: str, rates, dt: float, lattice: LatticeSpec) -> np.ndarray:
    """(phase * W^m - I) / ((m/2) dt) from the dense discrete walk."""
    m, phase = block_spec(case)
    w = build_dense_operator(lattice, scaling_profile(lattice, case, rates, dt), rotated=True)
    block = phase * np.linalg.matrix_power(w, m)
    return (block - np.eye(len(block))) / ((m / 2) * dt)


def neville_zero(xs, ys):
    """Polynomial extrapolation of samples ``ys`` at ``xs`` to x = 0."""
    table = [np.asarray(y) for y in ys]
    n = len(xs)
    for level in range(1, n):
        table = [
            (xs[i + level] * table[i] - xs[i] * table[i + 1]) / (xs[i + level] - xs[i])
            for i in range(n - level)
        ]
    return table[0]


@dataclass(eq=False)
class OracleReport:
    case: str
    lattice: LatticeSpec
    rows: list  # (x, comp) pairs compared
    estimate: np.ndarray  # extrapolated generator, full dense
    reference: np.ndarray
    row_deviation: dict  # (x, comp) -> max abs difference
    observed_order: float
    tolerance: float
    flagged_rows: list = field(default_factory=list)
    notes: tuple = ()

    @property
    def max_deviation(self) -> float:
        return max(self.row_deviation.values())

    @property
    def converged(self) -> bool:
        return self.observed_order >= 0.5

    @property
    def ok(self) -> bool:
        return self.converged and not self.flagged_rows

    def estimated_row(self, x: int, comp: int) -> np.ndarray:
        return self.estimate[2 * self.lattice.index(x) + comp]

    def summary(self) -> str:
        state = "ok" if self.ok else "FLAGGED"
        return (
            f"{self.case}: {state} max_dev={self.max_deviation:.3e} order={self.observed_order:.3f} "
            f"flagged={self.flagged_rows}"
        )


def _window_rows(case: str, lattice: LatticeSpec) -> list[tuple[int, int]]:
    """Rows far enough from the periodic wrap seam to see only one boundary."""
    if case not in BOUNDARY_CASES:
        xs = lattice.positions
    else:
        m, _ = block_spec(case)
        margin = 2 * m + 1
        xs = [x for x in lattice.positions if lattice.x_min + margin <= x <= lattice.x_max - margin]
    return [(int(x), c) for x in xs for c in (0, 1)]


def extract_generator_oracle(
    case: str,
    rates,
    dt_schedule=(4e-3, 2e-3, 1e-3),
    lattice: LatticeSpec | None = None,
    tolerance: float = 1e-6,
) -> OracleReport:
    """Estimate the continuous generator from the discrete walk and compare.

    ``case`` names a bulk corner (theta_positive, theta_negative, I-IV) or a
    boundary (simple_boundary, III_IV, I_III).  The block estimate at each dt
    is extrapolated to dt -> 0; the observed order comes from the first three
    estimates.
    """
    dts = [float(d) for d in dt_schedule]
    if len(dts) < 3:
        raise DomainError("dt_schedule needs at least three entries")
    if any(b >= a for a, b in zip(dts, dts[1:])) or dts[-1] <= 0:
        raise DomainError("dt_schedule must be positive and strictly decreasing")
    lattice = lattice or LatticeSpec(-16, 15)
    reference = analytic_generator(case, rates, lattice)
    rows = _window_rows(case, lattice)
    idx = np.array([2 * lattice.index(x) + c for x, c in rows])

    estimates = [block_estimate(case, rates, d, lattice) for d in dts]
    limit = neville_zero(dts, estimates)
    d01 = np.max(np.abs(estimates[0] - estimates[1])[idx])
    d12 = np.max(np.abs(estimates[1] - estimates[2])[idx])
    if d12 == 0:
        order = np.inf
    else:
        order = float(np.log(d01 / d12) / np.log(dts[0] / dts[1]))

    ref = reference.to_dense()
    row_dev = {}
    flagged = []
    for (x, c), i in zip(rows, idx):
        dev = float(np.max(np.abs(limit[i] - ref[i])))
        row_dev[(x, c)] = dev
        if dev > tolerance:
            flagged.append((x, c))
    return OracleReport(case, lattice, rows, limit, ref, row_dev, order, tolerance, flagged, reference.notes)


# -- discrete versus continuous --------------------------------------------


def discrete_continuous_distance(
    case: str,
    rates,
    state: WalkerState,
    t_final: float,
    dt: float,
    reference: Trajectory | None = None,
) -> float:
    """Sup-norm gap at ``t_final`` between the scaled discrete walk and the continuous one.

    The discrete walk takes 2 * t_final / dt steps; ``reference`` may carry a
    precomputed continuous final state.
    """
    n_blocks = int(round(t_final / dt))
    if not np.isclose(n_blocks * dt, t_final, rtol=1e-9, atol=1e-12):
        raise DomainError("t_final must be a whole number of dt blocks")
    lattice = state.lattice
    phase = 1.0 if case in SIMPLE_CASES else -1.0
    profile = scaling_profile(lattice, case, rates, dt)
    disc = evolve_discrete(state, profile, 2 * n_blocks, frame_phase=phase, snapshot_every=2 * n_blocks).final
    if reference is None:
        gen = analytic_generator(case, rates, lattice)
        reference = evolve_continuous(state, gen, t_final, dt=min(default_dt(gen), dt / 4))
    cont = reference.final
    return float(max(np.max(np.abs(disc.psi0 - cont.psi0)), np.max(np.abs(disc.psi1 - cont.psi1))))
