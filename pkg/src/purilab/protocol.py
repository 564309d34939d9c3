"""The mixedness-trashing protocol and its ensemble figures of merit.

A system qubit in the white-noise state ``p_w |n><n| + (1 - p_w) I/2`` meets an
ancilla, both undergo a joint unitary, and the ancilla is discarded. The
resulting qubit channel is affine on Bloch vectors, ``m = T l + t``, which
gives the sphere-averaged fidelity and purity in closed form:

    <F> = 1/2 + p_w tr(T) / 6
    <P> = (1 + p_w^2 ||T||_F^2 / 3 + ||t||^2) / 2
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import streams
from .haar import sample_angles, assemble_batch
from .linalg import dagger, partial_trace
from .qstate import (
    PAULIS,
    I2,
    ancilla_state,
    bloch_from_state,
    make_input_state,
    purity,
    random_direction,
)

EXACT = "exact"
MONTE_CARLO = "monte_carlo"

_SIGMA4 = np.stack([I2, *PAULIS])  # I, X, Y, Z


@dataclass(frozen=True)
class AffineChannel:
    T: np.ndarray
    t: np.ndarray

    def apply(self, l):
        return np.asarray(l) @ self.T.T + self.t


@dataclass(frozen=True)
class SweepRecord:
    avg_fidelity: float
    avg_purity: float
    std_err_f: float
    std_err_p: float
    unitary_id: int
    method: str


def joint_state(rho_s, rho_a, u):
    """``U (rho_a (x) rho_s) U^dagger``; broadcasts over stacks of states or unitaries."""
    rho_as = np.einsum("...ij,...kl->...ikjl", rho_a, rho_s).reshape(
        np.broadcast_shapes(np.shape(rho_a)[:-2], np.shape(rho_s)[:-2]) + (4, 4))
    return u @ rho_as @ dagger(u)


def apply_protocol(rho_s, rho_a, u):
    """Reduced system state ``Tr_a[U (rho_a (x) rho_s) U^dagger]``."""
    return partial_trace(joint_state(rho_s, rho_a, u), "a")


def channel_of(u, rho_a):
    """Affine Bloch map ``(T, t)`` induced on the system by ``u`` with ancilla ``rho_a``.

    Propagates ``I, X, Y, Z`` of the system through the channel. ``u`` may be a
    stack ``(..., 4, 4)``, in which case ``T`` and ``t`` carry the same leading
    shape.
    """
    T, t = _channel_arrays(u, rho_a)
    return AffineChannel(T, t)


def _channel_arrays(u, rho_a):
    u = np.asarray(u, dtype=complex)
    rho_a = np.asarray(rho_a, dtype=complex)
    # inputs rho_a (x) sigma_j for j = 0..3
    inputs = np.einsum("ab,jcd->jacbd", rho_a, _SIGMA4).reshape(4, 4, 4)
    outs = u[..., None, :, :] @ inputs @ dagger(u)[..., None, :, :]
    reduced = partial_trace(outs, "a")  # (..., 4, 2, 2)
    coeffs = 0.5 * np.real(np.einsum("...jkl,ilk->...ij", reduced, PAULIS))  # (..., 3, 4)
    return coeffs[..., :, 1:], coeffs[..., :, 0]


def exact_ensemble_averages(ch, p_w):
    """Closed-form ``(<F>, <P>)`` over uniformly distributed reference directions."""
    T, t = ch.T, ch.t
    f = 0.5 + p_w * np.trace(T, axis1=-2, axis2=-1) / 6.0
    p = 0.5 * (1.0 + p_w * p_w * np.sum(T * T, axis=(-2, -1)) / 3.0 + np.sum(t * t, axis=-1))
    return f, p


def ensemble_directions(spec, *key):
    return random_direction(streams.stream(spec.seed, streams.DIRECTIONS, *key), size=spec.count)


def monte_carlo_sweep(spec, u, unitary_id=0, directions=None):
    """Sample-mean fidelity and purity over ``spec.count`` random references."""
    n = ensemble_directions(spec, unitary_id) if directions is None else np.asarray(directions)
    rho_s = make_input_state(spec.p_w, n)
    rho_a = ancilla_state(spec.ancilla_purity)
    out = apply_protocol(rho_s, rho_a, np.asarray(u, dtype=complex))
    m = bloch_from_state(out)
    f = 0.5 * (1.0 + np.sum(m * n, axis=-1))
    p = purity(out)
    count = len(f)
    if count > 1:
        se_f = np.std(f, ddof=1) / np.sqrt(count)
        se_p = np.std(p, ddof=1) / np.sqrt(count)
    else:
        se_f = se_p = 0.0
    return SweepRecord(float(np.mean(f)), float(np.mean(p)), float(se_f), float(se_p),
                       int(unitary_id), MONTE_CARLO)


def haar_unitaries(master_seed, ids):
    """Haar unitaries for the given ids, each drawn from its own derived stream."""
    ids = list(ids)
    angles = np.array([sample_angles(streams.stream(master_seed, streams.HAAR, k)) for k in ids])
    return assemble_batch(angles.reshape(len(ids), -1))


def _scan_chunk(args):
    spec, master_seed, ids, method, unitaries = args
    us = haar_unitaries(master_seed, ids) if unitaries is None else np.asarray(unitaries)
    rho_a = ancilla_state(spec.ancilla_purity)
    if method == EXACT:
        f, p = exact_ensemble_averages(channel_of(us, rho_a), spec.p_w)
        return [SweepRecord(float(fi), float(pi), 0.0, 0.0, int(k), EXACT)
                for k, fi, pi in zip(ids, f, p)]
    if method == MONTE_CARLO:
        return [monte_carlo_sweep(spec, u, unitary_id=k) for k, u in zip(ids, us)]
    raise ValueError(f"unknown averaging method {method!r}")


def distribution_scan(spec, n_unitaries, master_seed, method=EXACT, unitaries=None,
                      jobs=1, chunk=2048):
    """One :class:`SweepRecord` per Haar unitary, ordered by ``unitary_id``.

    ``unitaries`` overrides the Haar draws (ids then count from 0). Results do
    not depend on ``jobs`` or ``chunk``.
    """
    if n_unitaries < 1:
        raise ValueError("n_unitaries must be >= 1")
    if unitaries is not None and len(unitaries) != n_unitaries:
        raise ValueError("len(unitaries) must equal n_unitaries")
    tasks = []
    for start in range(0, n_unitaries, chunk):
        ids = list(range(start, min(start + chunk, n_unitaries)))
        given = None if unitaries is None else np.asarray(unitaries)[ids]
        tasks.append((spec, master_seed, ids, method, given))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_scan_chunk, tasks))
    else:
        parts = [_scan_chunk(t) for t in tasks]
    return [r for part in parts for r in part]
