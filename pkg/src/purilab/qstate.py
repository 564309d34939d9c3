"""Qubit and two-qubit states, Bloch vectors and figures of merit."""
from dataclasses import dataclass

import numpy as np

from .errors import BlochLengthExceedsOne, InvalidState, NegativeEigenvalue
from .linalg import dagger, eigvalsh

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SX, SY, SZ])

BLOCH_TOL = 1e-12
STATE_TOL = 1e-10
CLAMP_TOL = 1e-8


@dataclass(frozen=True)
class InputEnsembleSpec:
    """Ensemble of white-noise inputs: noise weight, ancilla purity, size, seed."""

    p_w: float
    ancilla_purity: float = 1.0
    count: int = 50_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_w <= 1.0:
            raise ValueError(f"p_w must lie in [0, 1], got {self.p_w}")
        if not 0.5 <= self.ancilla_purity <= 1.0:
            raise ValueError(f"ancilla purity must lie in [1/2, 1], got {self.ancilla_purity}")
        if self.count < 1:
            raise ValueError("ensemble count must be positive")

    @property
    def input_purity(self):
        return input_purity(self.p_w)

    @property
    def input_fidelity(self):
        return input_fidelity(self.p_w)


def input_purity(p_w):
    return (1.0 + p_w * p_w) / 2.0


def input_fidelity(p_w):
    return (1.0 + p_w) / 2.0


def state_from_bloch(l):
    """Density matrix ``(I + l . sigma) / 2``; ``l`` may be a stack ``(..., 3)``."""
    l = np.asarray(l, dtype=float)
    length = np.linalg.norm(l, axis=-1)
    if np.any(length > 1.0 + BLOCH_TOL):
        raise BlochLengthExceedsOne(f"Bloch vector length {np.max(length):.15g} exceeds 1")
    return 0.5 * (I2 + np.einsum("...i,ijk->...jk", l, PAULIS))


def bloch_from_state(rho):
    """Bloch vector ``Tr[rho sigma_i]`` of a (stack of) 2x2 matrices."""
    rho = np.asarray(rho, dtype=complex)
    return np.real(np.einsum("...jk,ikj->...i", rho, PAULIS))


def make_input_state(p_w, direction):
    """White-noise state ``p_w |n><n| + (1 - p_w) I/2`` with Bloch vector ``p_w n``."""
    if not 0.0 <= p_w <= 1.0:
        raise ValueError(f"p_w must lie in [0, 1], got {p_w}")
    n = np.asarray(direction, dtype=float)
    if np.any(np.abs(np.linalg.norm(n, axis=-1) - 1.0) > 1e-10):
        raise ValueError("reference direction must be a unit vector")
    return state_from_bloch(p_w * n)


def ancilla_state(purity=1.0):
    """Ancilla ``diag((1+q)/2, (1-q)/2)`` with ``q = sqrt(2 P - 1)``; pure gives ``|0><0|``."""
    if not 0.5 <= purity <= 1.0 + 1e-15:
        raise ValueError(f"ancilla purity must lie in [1/2, 1], got {purity}")
    q = np.sqrt(max(2.0 * purity - 1.0, 0.0))
    return np.diag([(1.0 + q) / 2.0, (1.0 - q) / 2.0]).astype(complex)


def check_density_matrix(rho, tol=STATE_TOL):
    """Raise :class:`InvalidState` unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] not in ((2, 2), (4, 4)):
        raise InvalidState(f"unsupported density matrix shape {rho.shape}")
    if np.max(np.abs(rho - dagger(rho))) > tol:
        raise InvalidState("density matrix is not Hermitian")
    tr = np.trace(rho, axis1=-2, axis2=-1)
    if np.max(np.abs(tr - 1.0)) > tol:
        raise InvalidState("density matrix does not have unit trace")
    if np.min(eigvalsh(rho)) < -tol:
        raise InvalidState("density matrix has negative eigenvalues")
    return rho


def purity(rho):
    """``Tr[rho^2]`` for a (stack of) density matrices."""
    rho = np.asarray(rho, dtype=complex)
    return np.real(np.einsum("...ij,...ji->...", rho, rho))


def fidelity_to_reference(rho, direction):
    """Overlap ``<n|rho|n>`` with the pure state of Bloch direction ``n``."""
    m = bloch_from_state(rho)
    return 0.5 * (1.0 + np.sum(m * np.asarray(direction, dtype=float), axis=-1))


def entropy_from_eigenvalues(w):
    """Shannon entropy in bits of eigenvalue spectra along the last axis.

    Values in ``[-1e-8, 0)`` are treated as rounding and clamped; anything more
    negative raises :class:`NegativeEigenvalue`.
    """
    w = np.asarray(w, dtype=float)
    if np.any(w < -CLAMP_TOL):
        raise NegativeEigenvalue(f"eigenvalue {np.min(w):.3e} below -{CLAMP_TOL}")
    w = np.clip(w, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0.0, -w * np.log2(np.where(w > 0.0, w, 1.0)), 0.0)
    return np.sum(terms, axis=-1)


def von_neumann_entropy(rho):
    """von Neumann entropy in bits; accepts stacks of 2x2 or 4x4 matrices."""
    return entropy_from_eigenvalues(eigvalsh(rho))


def binary_entropy_of_length(length):
    """Entropy of a qubit with Bloch length ``length`` (eigenvalues ``(1 +- l)/2``)."""
    length = np.clip(np.asarray(length, dtype=float), 0.0, 1.0)
    w = np.stack([(1.0 + length) / 2.0, (1.0 - length) / 2.0], axis=-1)
    return entropy_from_eigenvalues(w)


def random_direction(rng, size=None):
    """Uniform unit vector(s) on the sphere: ``z ~ U[-1, 1]``, azimuth ``~ U[0, 2 pi)``."""
    z = rng.uniform(-1.0, 1.0, size=size)
    phi = rng.uniform(0.0, 2.0 * np.pi, size=size)
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)
