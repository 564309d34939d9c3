"""Small fixed-size complex linear algebra for one and two qubits.

Two-qubit operators use the ancilla-first basis ``{|00>, |01>, |10>, |11>}_as``:
the left Kronecker factor is the ancilla ``a``, the right factor the system ``s``.
"""
from typing import NamedTuple

import numpy as np

from .errors import NotHermitian

ANCILLA = "a"
SYSTEM = "s"

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 200


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _side(subsystem):
    if subsystem in ("a", "ancilla"):
        return ANCILLA
    if subsystem in ("s", "system"):
        return SYSTEM
    raise ValueError(f"unknown subsystem {subsystem!r}; expected 'a' or 's'")


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def kron(a, b):
    """Kronecker product ``a (x) b`` with ``a`` the ancilla factor."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError("kron expects two 2x2 matrices")
    return np.kron(a, b)


def _as_tensor(m):
    m = np.asarray(m, dtype=complex)
    if m.shape[-2:] != (4, 4):
        raise ValueError(f"expected 4x4 operator(s), got shape {m.shape}")
    return m.reshape(m.shape[:-2] + (2, 2, 2, 2))


def partial_trace(m, subsystem):
    """Trace out ``subsystem`` ('a' or 's') of a 4x4 operator.

    Accepts a stack of operators with shape ``(..., 4, 4)``.
    """
    t = _as_tensor(m)
    # index layout: a, s, a', s'
    if _side(subsystem) == ANCILLA:
        return np.einsum("...kikj->...ij", t)
    return np.einsum("...ikjk->...ij", t)


def partial_transpose(m, subsystem):
    """Transpose the indices of ``subsystem`` only."""
    t = _as_tensor(m)
    if _side(subsystem) == ANCILLA:
        t = np.swapaxes(t, -4, -2)
    else:
        t = np.swapaxes(t, -3, -1)
    return t.reshape(t.shape[:-4] + (4, 4))


def _jacobi(h):
    a = h.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off < JACOBI_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r < 1e-300:
                    continue
                phase = a[p, q] / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # J = diag-phase(q) followed by a real Givens rotation in (p, q)
                jpp, jpq = c, s
                jqp, jqq = -s * np.conj(phase), c * np.conj(phase)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = col_p * jpp + col_q * jqp
                a[:, q] = col_p * jpq + col_q * jqq
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = np.conj(jpp) * row_p + np.conj(jqp) * row_q
                a[q, :] = np.conj(jpq) * row_p + np.conj(jqq) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp * jpp + vq * jqp
                v[:, q] = vp * jpq + vq * jqq
    else:
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off >= JACOBI_TOL:
            raise RuntimeError(f"Jacobi did not converge (off-diagonal norm {off:.3e})")
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eig_hermitian(m):
    """Eigendecomposition of a 2x2 or 4x4 Hermitian matrix by cyclic Jacobi.

    Returns eigenvalues in ascending order with orthonormal eigenvector columns.
    Raises :class:`NotHermitian` if ``max|m - m^dagger| > 1e-10``.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape not in ((2, 2), (4, 4)):
        raise ValueError(f"eig_hermitian supports 2x2 and 4x4 matrices, got {m.shape}")
    dev = np.max(np.abs(m - dagger(m)))
    if dev > HERMITIAN_TOL:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}")
    h = 0.5 * (m + dagger(m))
    w, v = _jacobi(h)
    return EigenDecomposition(w, v)


def eigvalsh(m):
    """Ascending eigenvalues of a stack of Hermitian matrices (LAPACK path)."""
    m = np.asarray(m, dtype=complex)
    return np.linalg.eigvalsh(0.5 * (m + dagger(m)))
