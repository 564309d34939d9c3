"""Haar-random 4x4 unitaries from the Hurwitz (Euler-angle) parameterization.

``U = exp(i alpha) E1 E2 E3`` with

    E1 = R(1,2)
    E2 = R(2,3) R(1,3)
    E3 = R(3,4) R(2,4) R(1,4)

Each ``R(i,j)(phi, psi, chi)`` is a two-level rotation acting on basis states
``i`` and ``j`` (1-based). Only the ``R(1,j)`` factors carry a free ``chi``.
A Ginibre-QR sampler is provided as an independent oracle.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import RankDeficient

DIM = 4
# Right-to-left order of the factors after the global phase.
PAIRS = ((1, 2), (2, 3), (1, 3), (3, 4), (2, 4), (1, 4))
CHI_PAIRS = tuple(p for p in PAIRS if p[0] == 1)
N_ANGLES = 2 * len(PAIRS) + len(CHI_PAIRS)  # 15
N_PARAMS = N_ANGLES + 1  # plus the global phase
UNITARITY_TOL = 1e-10

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class HurwitzAngles:
    """Global phase plus the 15 Euler angles of a 4x4 unitary.

    ``phi`` and ``psi`` follow the order of :data:`PAIRS`; ``chi`` follows
    :data:`CHI_PAIRS`.
    """

    alpha: float
    phi: tuple = field(default=(0.0,) * 6)
    psi: tuple = field(default=(0.0,) * 6)
    chi: tuple = field(default=(0.0,) * 3)

    def __post_init__(self):
        if len(self.phi) != 6 or len(self.psi) != 6 or len(self.chi) != 3:
            raise ValueError("expected 6 phi, 6 psi and 3 chi angles")
        _check_range("alpha", self.alpha, 0.0, _TWO_PI)
        for v in self.phi:
            _check_range("phi", v, 0.0, np.pi / 2)
        for v in self.psi:
            _check_range("psi", v, 0.0, _TWO_PI)
        for v in self.chi:
            _check_range("chi", v, 0.0, _TWO_PI)

    def as_vector(self):
        return np.concatenate([[self.alpha], self.phi, self.psi, self.chi]).astype(float)

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (N_PARAMS,):
            raise ValueError(f"expected {N_PARAMS} parameters, got shape {v.shape}")
        return cls(float(v[0]), tuple(v[1:7]), tuple(v[7:13]), tuple(v[13:16]))


def _check_range(name, value, lo, hi):
    if not lo - 1e-12 <= value <= hi + 1e-12:
        raise ValueError(f"{name}={value} outside [{lo}, {hi}]")


def rotation_block(i, j, phi, psi, chi=0.0):
    """Two-level rotation ``R(i,j)`` embedded in the 4x4 identity (1-based indices)."""
    if not (1 <= i < j <= DIM):
        raise ValueError(f"need 1 <= i < j <= {DIM}, got ({i}, {j})")
    _check_range("phi", phi, 0.0, np.pi / 2)
    _check_range("psi", psi, 0.0, _TWO_PI)
    _check_range("chi", chi, 0.0, _TWO_PI)
    r = np.eye(DIM, dtype=complex)
    a, b = i - 1, j - 1
    r[a, a] = np.exp(1j * psi) * np.cos(phi)
    r[a, b] = np.exp(1j * chi) * np.sin(phi)
    r[b, a] = -np.exp(-1j * chi) * np.sin(phi)
    r[b, b] = np.exp(-1j * psi) * np.cos(phi)
    return r


def assemble_batch(params):
    """Unitaries for a stack of raw parameter vectors, shape ``(..., 16)``.

    No range checks: any real angles give a unitary, which is what the
    boundary optimizer relies on.
    """
    params = np.asarray(params, dtype=float)
    batch = params.shape[:-1]
    alpha = params[..., 0]
    phi = params[..., 1:7]
    psi = params[..., 7:13]
    chi = np.zeros(batch + (6,))
    chi[..., [PAIRS.index(p) for p in CHI_PAIRS]] = params[..., 13:16]

    c, s = np.cos(phi), np.sin(phi)
    rii = np.exp(1j * psi) * c
    rij = np.exp(1j * chi) * s
    rji = -np.exp(-1j * chi) * s
    rjj = np.exp(-1j * psi) * c

    u = np.broadcast_to(np.eye(DIM, dtype=complex), batch + (DIM, DIM)).copy()
    u *= np.exp(1j * alpha)[..., None, None]
    for k, (i, j) in enumerate(PAIRS):
        a, b = i - 1, j - 1
        col_a = u[..., :, a].copy()
        col_b = u[..., :, b]
        u[..., :, a] = col_a * rii[..., k, None] + col_b * rji[..., k, None]
        u[..., :, b] = col_a * rij[..., k, None] + col_b * rjj[..., k, None]
    return u


def assemble_unitary(angles):
    """``exp(i alpha) E1 E2 E3`` for a validated :class:`HurwitzAngles`."""
    if not isinstance(angles, HurwitzAngles):
        angles = HurwitzAngles.from_vector(angles)
    return assemble_batch(angles.as_vector())


def phi_from_uniform(xi, pair):
    """Map ``xi ~ U[0,1]`` to the Haar-distributed ``phi`` of rotation ``pair``.

    ``phi = arccos(xi ** (1 / (2 i)))`` with ``i`` the smaller index of the pair,
    i.e. ``sin(phi)**2 ~ Beta(1, i)``. With ``R_ii = exp(i psi) cos(phi)`` and the
    factor order above, this makes the last row of each ``E_k`` a uniformly
    distributed unit vector, which is what the Haar measure needs.
    """
    i = pair[0]
    return np.arccos(np.asarray(xi) ** (1.0 / (2.0 * i)))


def sample_angles(rng, size=None):
    """Draw Haar-distributed raw parameter vectors, shape ``size + (16,)``."""
    shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
    out = np.empty(shape + (N_PARAMS,))
    out[..., 0] = rng.uniform(0.0, _TWO_PI, size=shape)
    xi = rng.uniform(0.0, 1.0, size=shape + (6,))
    for k, pair in enumerate(PAIRS):
        out[..., 1 + k] = phi_from_uniform(xi[..., k], pair)
    out[..., 7:13] = rng.uniform(0.0, _TWO_PI, size=shape + (6,))
    out[..., 13:16] = rng.uniform(0.0, _TWO_PI, size=shape + (3,))
    return out


def sample_haar(rng, size=None):
    """Haar-random 4x4 unitary (or a stack of ``size``) via Hurwitz angles."""
    return assemble_batch(sample_angles(rng, size))


def sample_haar_qr_oracle(rng, size=None):
    """Haar-random unitary from QR of a complex Ginibre matrix.

    The phases of R's diagonal are moved into Q so the triangular factor has a
    real positive diagonal, which makes Q exactly Haar distributed.
    """
    shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
    for attempt in range(2):
        z = (rng.standard_normal(shape + (DIM, DIM)) + 1j * rng.standard_normal(shape + (DIM, DIM))) / np.sqrt(2.0)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r, axis1=-2, axis2=-1)
        if np.all(np.abs(d) > 1e-14):
            return q * (d / np.abs(d))[..., None, :]
    raise RankDeficient("Ginibre matrix was rank deficient twice in a row")


def unitarity_error(u):
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return np.max(np.abs(np.conj(np.swapaxes(u, -1, -2)) @ u - eye), axis=(-2, -1))
