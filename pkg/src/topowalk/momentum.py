"""Momentum-space coin matrices, dispersion and winding-number invariants.

Angle parameters are a float ``theta`` for the simple-step walk or a pair
``(theta1, theta2)`` for the split-step walk.  All matrix functions accept a
scalar or an array of momenta and return ``(..., 2, 2)`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import DomainError, PhaseLabel, PhaseName, split_phase_from_windings

DEFAULT_NK = 1024
MIN_NK = 256
INTEGRAND_FLOOR = 1e-9
BOUNDARY_TOL = 1e-9


class PhaseBoundaryError(ValueError):
    """Parameters sit on a topological phase boundary."""


def _is_split(params) -> bool:
    return np.ndim(params) == 1 and len(params) == 2


def _mat(a, b, c, d):
    a, b, c, d = np.broadcast_arrays(a, b, c, d)
    return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2).astype(np.complex128)


def split_betas(theta1: float, theta2: float, k):
    k = np.asarray(k, dtype=float)
    c1, s1, c2, s2 = np.cos(theta1), np.sin(theta1), np.cos(theta2), np.sin(theta2)
    beta0 = np.cos(k) * c1 * c2 + s1 * s2
    beta1 = -(1j * np.sin(k) + np.cos(k) * s1) * c2 + c1 * s2
    return beta0, beta1


def split_gammas(theta1: float, theta2: float, k):
    """Entries g0, g1 of ``G_c = exp(-ik/2) [[g0, g1], [g1*, -g0*]]``."""
    k = np.asarray(k, dtype=float)
    tp, tm = theta1 + theta2, theta1 - theta2
    ch, sh = np.cos(k / 2), np.sin(k / 2)
    g0 = ch * np.sin(tm / 2) + 1j * sh * np.cos(tp / 2)
    g1 = -ch * np.cos(tm / 2) - 1j * sh * np.sin(tp / 2)
    return g0, g1


def wc_matrix(params, k) -> np.ndarray:
    """Chiral-frame step W acting on the coin at momentum ``k``."""
    k = np.asarray(k, dtype=float)
    if _is_split(params):
        beta0, beta1 = split_betas(*params, k)
        return _mat(beta0, beta1, -np.conj(beta1), beta0)
    theta = float(params)
    sk, ck = np.sin(k), np.cos(k)
    diag = 1j * sk * np.cos(theta)
    return _mat(diag, -ck - 1j * sk * np.sin(theta), -ck + 1j * sk * np.sin(theta), diag)


_R = np.array([[1, 1], [-1, 1]], dtype=np.complex128) / np.sqrt(2)  # exp(i pi/4 Y)


def gc_matrix(params, k) -> np.ndarray:
    """Chiral-frame F at momentum ``k``; its column 0 carries the winding integrands."""
    k = np.asarray(k, dtype=float)
    if _is_split(params):
        g0, g1 = split_gammas(*params, k)
        phase = np.exp(-0.5j * k)
        return phase[..., None, None] * _mat(g0, g1, np.conj(g1), -np.conj(g0))
    theta = float(params)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    em, ep = np.exp(-0.25j * np.pi), np.exp(0.25j * np.pi)
    ek = np.exp(-1j * k)
    inner = _mat(em * c, -ep * ek * s, em * s, ep * ek * c)
    return _R @ inner @ _R.conj().T


@dataclass(frozen=True)
class DispersionPoint:
    k: float
    omega_plus: float
    omega_minus: float


def _principal(omega):
    omega = np.asarray(omega, dtype=float)
    return np.where(omega <= -np.pi, omega + 2 * np.pi, omega) + 0.0  # drops -0.0


def dispersion_branches(params, k):
    """Eigenphase branches omega_+-(k) in (-pi, pi], vectorized over ``k``."""
    k = np.asarray(k, dtype=float)
    if _is_split(params):
        beta0, _ = split_betas(*params, k)
        root = np.sqrt(np.clip(1 - beta0**2, 0.0, None))
        lam_plus, lam_minus = beta0 - 1j * root, beta0 + 1j * root
    else:
        a = np.cos(float(params)) * np.sin(k)
        root = np.sqrt(np.clip(1 - a**2, 0.0, None))
        lam_plus, lam_minus = 1j * a - root, 1j * a + root
    return _principal(-np.angle(lam_plus)), _principal(-np.angle(lam_minus))


def dispersion(params, k: float) -> DispersionPoint:
    plus, minus = dispersion_branches(params, k)
    return DispersionPoint(float(k), float(plus), float(minus))


def accumulated_winding(alpha: int, params, n_k: int = DEFAULT_NK) -> float:
    """Unrounded winding of <alpha|G_c(k)|0> around the Brillouin zone.

    Phase increments between neighbouring samples are summed with k running
    from pi down to -pi, i.e. minus the winding counted along increasing k.
    """
    if alpha not in (0, 1):
        raise DomainError("alpha must be 0 or 1")
    if n_k < MIN_NK:
        raise DomainError(f"n_k must be >= {MIN_NK}")
    k = np.linspace(np.pi, -np.pi, n_k + 1)
    values = gc_matrix(params, k)[:, alpha, 0]
    if np.min(np.abs(values)) <= INTEGRAND_FLOOR:
        raise PhaseBoundaryError(f"integrand <{alpha}|G_c|0> vanishes: on a phase boundary")
    return float(np.sum(np.angle(values[1:] / values[:-1])) / (2 * np.pi))


def winding_number(alpha: int, params, n_k: int = DEFAULT_NK) -> int:
    return int(round(accumulated_winding(alpha, params, n_k)))


def split_z_values(theta1: float, theta2: float) -> tuple[complex, complex]:
    """Closed-form z0, z1 (inf where the denominator vanishes)."""
    (n0, d0), (n1, d1) = _z_parts(theta1, theta2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (n0 / d0 if d0 != 0 else np.inf), (n1 / d1 if d1 != 0 else np.inf)


def _z_parts(theta1, theta2):
    cp, sp = np.cos((theta1 + theta2) / 2), np.sin((theta1 + theta2) / 2)
    cm, sm = np.cos((theta1 - theta2) / 2), np.sin((theta1 - theta2) / 2)
    return (cp + sm, cp - sm), (cm - sp, cm + sp)


def classify_split(theta1: float, theta2: float) -> PhaseLabel:
    """Phase from |z_alpha| < 1 (nu_alpha = 1) or > 1 (nu_alpha = 0)."""
    nus = []
    for alpha, (num, den) in enumerate(_z_parts(theta1, theta2)):
        if abs(abs(num) - abs(den)) <= BOUNDARY_TOL * abs(den):
            raise PhaseBoundaryError(f"|z{alpha}| = 1 at ({theta1}, {theta2})")
        nus.append(1 if abs(num) < abs(den) else 0)
    return PhaseLabel(nus[0], nus[1], split_phase_from_windings(*nus))


def classify_split_numeric(theta1: float, theta2: float, n_k: int = DEFAULT_NK) -> PhaseLabel:
    nu0 = winding_number(0, (theta1, theta2), n_k)
    nu1 = winding_number(1, (theta1, theta2), n_k)
    return PhaseLabel(nu0, nu1)


def simple_invariants(theta: float, n_k: int = DEFAULT_NK) -> tuple[int, int]:
    return winding_number(0, theta, n_k), winding_number(1, theta, n_k)


def classify_simple(theta: float, n_k: int = DEFAULT_NK) -> PhaseLabel:
    nu0, nu1 = simple_invariants(theta, n_k)
    name = PhaseName.SIMPLE_POSITIVE if np.sin(theta) > 0 else PhaseName.SIMPLE_NEGATIVE
    return PhaseLabel(nu0, nu1, name)


BOUNDARY_LABEL = "boundary"


@dataclass(eq=False)
class PhaseDiagram:
    theta1: np.ndarray
    theta2: np.ndarray
    labels: np.ndarray  # (len(theta1), len(theta2)) of str
    nu0: np.ndarray  # -1 at boundary points
    nu1: np.ndarray

    def rows(self):
        for i, t1 in enumerate(self.theta1):
            for j, t2 in enumerate(self.theta2):
                yield float(t1), float(t2), int(self.nu0[i, j]), int(self.nu1[i, j]), str(self.labels[i, j])


def phase_diagram(theta1_range, theta2_range, resolution, method: str = "closed_form") -> PhaseDiagram:
    """Label a (theta1, theta2) grid; ``resolution`` is an int or a (n1, n2) pair.

    Points where classification fails are marked ``"boundary"`` with nu = -1.
    """
    n1, n2 = (resolution, resolution) if np.ndim(resolution) == 0 else resolution
    if n1 < 2 or n2 < 2:
        raise DomainError("resolution must be >= 2 per axis")
    t1 = np.linspace(*theta1_range, int(n1))
    t2 = np.linspace(*theta2_range, int(n2))
    classify = {"closed_form": classify_split, "winding": classify_split_numeric}[method]
    labels = np.empty((len(t1), len(t2)), dtype=object)
    nu0 = np.full(labels.shape, -1)
    nu1 = np.full(labels.shape, -1)
    for i, a in enumerate(t1):
        for j, b in enumerate(t2):
            try:
                label = classify(float(a), float(b))
            except (PhaseBoundaryError, DomainError):
                labels[i, j] = BOUNDARY_LABEL
                continue
            labels[i, j] = label.name.value
            nu0[i, j], nu1[i, j] = label.windings
    return PhaseDiagram(t1, t2, labels, nu0, nu1)
