"""Discrete-time simple-step and split-step walks in the chiral frame.

A step is the chiral-frame block ``W = R U' R^dagger`` with ``R = exp(i pi/4 Y)``
and

    simple:  U' = A(theta/2) Z S A(theta/2)
    split:   U' = A(theta1/2) Z S_- A(theta2) Z S_+ A(theta1/2)

where ``A(a) = exp(-i a Y)`` acts on every site with that site's angle.
``step_simple``/``step_split`` apply the factors as local O(N) updates;
``build_dense_operator`` assembles the same products (and the chiral
factorisation ``+-F X F^-1 X``) as explicit matrices for identity checks.
"""

from __future__ import annotations

import numpy as np

from .lattice import (
    DomainError,
    LatticeSpec,
    SimpleAngleProfile,
    SplitAngleProfile,
    Trajectory,
    WalkerState,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

DENSE_MAX_SITES = 64


def y_rotation(angle: float) -> np.ndarray:
    """exp(-i angle Y), a real rotation matrix."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def z_rotation(angle: float) -> np.ndarray:
    """exp(-i angle Z)."""
    return np.diag([np.exp(-1j * angle), np.exp(1j * angle)])


def coin_matrix(theta: float) -> np.ndarray:
    """Coin flip T(theta) = exp(-i theta Y) Z."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [s, -c]], dtype=np.complex128)


# -- local updates ---------------------------------------------------------


def _rotate(angle, psi0, psi1):
    c, s = np.cos(angle), np.sin(angle)
    return c * psi0 - s * psi1, s * psi0 + c * psi1


def _shift(arr: np.ndarray, d: int, periodic: bool) -> np.ndarray:
    """Move amplitude by ``d`` sites: out[x] = arr[x - d]."""
    if periodic:
        return np.roll(arr, d)
    out = np.zeros_like(arr)
    if d > 0:
        out[d:] = arr[:-d]
    elif d < 0:
        out[:d] = arr[-d:]
    else:
        out[:] = arr
    return out


def step_simple(state: WalkerState, profile: SimpleAngleProfile) -> WalkerState:
    """One application of the chiral-frame simple-step block W."""
    _check_profile(state, profile)
    periodic = state.lattice.periodic
    half = profile.theta / 2
    a, b = _rotate(np.pi / 4, state.psi0, state.psi1)
    a, b = _rotate(half, a, b)
    a, b = _shift(a, 1, periodic), -_shift(b, -1, periodic)
    a, b = _rotate(half, a, b)
    a, b = _rotate(-np.pi / 4, a, b)
    return WalkerState(state.lattice, a, b)


def step_split(state: WalkerState, profile: SplitAngleProfile) -> WalkerState:
    """One application of the chiral-frame split-step block W."""
    _check_profile(state, profile)
    periodic = state.lattice.periodic
    half1 = profile.theta1 / 2
    a, b = _rotate(np.pi / 4, state.psi0, state.psi1)
    a, b = _rotate(half1, a, b)
    a = _shift(a, 1, periodic)
    a, b = _rotate(profile.theta2, a, -b)
    b = -_shift(b, -1, periodic)
    a, b = _rotate(half1, a, b)
    a, b = _rotate(-np.pi / 4, a, b)
    return WalkerState(state.lattice, a, b)


def _check_profile(state, profile):
    if profile.lattice != state.lattice:
        raise DomainError("profile and state live on different lattices")


def step(state: WalkerState, profile) -> WalkerState:
    if isinstance(profile, SplitAngleProfile):
        return step_split(state, profile)
    return step_simple(state, profile)


def evolve_discrete(
    state: WalkerState,
    profile,
    n_steps: int,
    frame_phase: complex = 1.0,
    snapshot_every: int = 1,
) -> Trajectory:
    """Apply ``n_steps`` steps, recording every ``snapshot_every``-th state.

    ``frame_phase`` multiplies the wavefunction after each completed two-step
    block; -1 turns the split-step corner limit W^2 -> -I into W^2 -> I.
    The initial and final states are always recorded.
    """
    if n_steps < 0:
        raise DomainError("n_steps must be non-negative")
    if snapshot_every < 1:
        raise DomainError("snapshot_every must be >= 1")
    times, psi0, psi1 = [0], [state.psi0.copy()], [state.psi1.copy()]
    current = state
    for n in range(1, n_steps + 1):
        current = step(current, profile)
        if n % 2 == 0 and frame_phase != 1:
            current = current.scaled(frame_phase)
        if n % snapshot_every == 0 or n == n_steps:
            times.append(n)
            psi0.append(current.psi0)
            psi1.append(current.psi1)
    return Trajectory(state.lattice, np.array(times), np.array(psi0), np.array(psi1))


# -- dense oracle -----------------------------------------------------------


def _site_diagonal(lattice: LatticeSpec, blocks: np.ndarray) -> np.ndarray:
    """Block-diagonal 2N x 2N matrix from per-site 2x2 blocks (site-major)."""
    n = lattice.size
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    for i in range(n):
        out[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = blocks[i]
    return out


def _translation(n: int, d: int) -> np.ndarray:
    """Periodic L^d on position space: |x> -> |x + d>."""
    return np.roll(np.eye(n), d, axis=0)


def _dense_pieces(lattice: LatticeSpec):
    n = lattice.size
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    ident = np.eye(n)
    shifts = {
        "S": np.kron(_translation(n, 1), p0) + np.kron(_translation(n, -1), p1),
        "S+": np.kron(_translation(n, 1), p0) + np.kron(ident, p1),
        "S-": np.kron(ident, p0) + np.kron(_translation(n, -1), p1),
    }
    uniform = lambda m: np.kron(ident, m)  # noqa: E731
    return shifts, uniform


def _rotations(lattice, angles):
    return _site_diagonal(lattice, [y_rotation(a) for a in angles])


def build_dense_operator(lattice: LatticeSpec, profile, form: str = "composed", rotated: bool = False):
    """Explicit block U' as a 2N x 2N matrix, or W = R U' R^dagger if ``rotated``.

    ``form='composed'`` multiplies the factors of U' directly; ``form='chiral'``
    builds the factorisation i F X F^-1 X (simple) or -F X F^-1 X (split).
    Ordering is site-major, component-minor.
    """
    if not lattice.periodic:
        raise DomainError("dense oracle is defined for periodic lattices only")
    if lattice.size > DENSE_MAX_SITES:
        raise DomainError(f"dense oracle limited to {DENSE_MAX_SITES} sites")
    if profile.lattice != lattice:
        raise DomainError("profile lattice mismatch")
    shifts, uniform = _dense_pieces(lattice)
    z = uniform(PAULI_Z)
    x = uniform(PAULI_X)

    if isinstance(profile, SplitAngleProfile):
        half1 = _rotations(lattice, profile.theta1 / 2)
        if form == "composed":
            full2 = _rotations(lattice, profile.theta2)
            u = half1 @ z @ shifts["S-"] @ full2 @ z @ shifts["S+"] @ half1
        elif form == "chiral":
            f = half1 @ z @ shifts["S-"] @ _rotations(lattice, profile.theta2 / 2)
            u = -f @ x @ np.linalg.inv(f) @ x
        else:
            raise DomainError(f"unknown form {form!r}")
    else:
        half = _rotations(lattice, profile.theta / 2)
        if form == "composed":
            u = half @ z @ shifts["S"] @ half
        elif form == "chiral":
            f = half @ uniform(z_rotation(np.pi / 4)) @ shifts["S-"]
            u = 1j * f @ x @ np.linalg.inv(f) @ x
        else:
            raise DomainError(f"unknown form {form!r}")

    if not rotated:
        return u
    r = uniform(y_rotation(-np.pi / 4))
    return r @ u @ r.conj().T


def dense_to_state(lattice: LatticeSpec, vector: np.ndarray) -> WalkerState:
    return WalkerState(lattice, vector[0::2], vector[1::2])


def state_to_dense(state: WalkerState) -> np.ndarray:
    out = np.empty(2 * state.lattice.size, dtype=np.complex128)
    out[0::2] = state.psi0
    out[1::2] = state.psi1
    return out
