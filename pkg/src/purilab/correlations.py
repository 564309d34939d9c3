"""Correlation measures of the joint ancilla-system state.

All functions take 4x4 density matrices in the ancilla-first ordering and
broadcast over leading stack dimensions unless noted otherwise. Entropies are
in bits.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import ConvergenceFailure
from .linalg import dagger, eigvalsh, partial_trace, partial_transpose
from .protocol import ensemble_directions, exact_ensemble_averages, channel_of, joint_state
from .qstate import (
    I2,
    PAULIS,
    ancilla_state,
    binary_entropy_of_length,
    make_input_state,
    von_neumann_entropy,
)

GRID = 32
SIMPLEX_FATOL = 1e-7
RESTARTS = 3


@dataclass(frozen=True)
class BlochDecomposition:
    """``rho = (I + x.sigma (x) I + I (x) y.sigma + sum T_ij sigma_i (x) sigma_j) / 4``."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    def reconstruct(self):
        out = np.einsum("ij,kl->ikjl", I2, I2).reshape(4, 4).astype(complex)
        out = out + np.einsum("...i,ijk,lm->...jlkm", self.x, PAULIS, I2).reshape(self.x.shape[:-1] + (4, 4))
        out = out + np.einsum("...i,jk,ilm->...jlkm", self.y, I2, PAULIS).reshape(self.y.shape[:-1] + (4, 4))
        out = out + np.einsum("...ij,iab,jcd->...acbd", self.T, PAULIS, PAULIS).reshape(self.T.shape[:-2] + (4, 4))
        return out / 4.0


@dataclass(frozen=True)
class CorrelationRecord:
    cond_entropy: float
    geo_discord: float
    entropic_discord: float
    negativity: float
    measured_side: str
    avg_F: float = float("nan")
    avg_P: float = float("nan")


def _side(measured):
    if measured in ("a", "ancilla"):
        return "a"
    if measured in ("s", "system"):
        return "s"
    raise ValueError(f"unknown measured side {measured!r}; expected 'a' or 's'")


def conditional_entropy(rho_as):
    """``S(rho_as) - S(rho_s)``: the state-merging cost of the ancilla given the system."""
    return von_neumann_entropy(rho_as) - von_neumann_entropy(partial_trace(rho_as, "a"))


def bloch_decompose(rho_as):
    rho = np.asarray(rho_as, dtype=complex).reshape(np.shape(rho_as)[:-2] + (2, 2, 2, 2))
    # Tr[rho (A (x) B)] with rho indices (a, s, a', s')
    x = np.real(np.einsum("...asbs,iba->...i", rho, PAULIS))
    y = np.real(np.einsum("...asat,its->...i", rho, PAULIS))
    T = np.real(np.einsum("...asbt,iba,jts->...ij", rho, PAULIS, PAULIS))
    return BlochDecomposition(x, y, T)


def _measured_view(rho_as, measured):
    """Local vectors and correlation matrix oriented so row index = measured qubit."""
    d = bloch_decompose(rho_as)
    if _side(measured) == "a":
        return d.x, d.y, d.T
    return d.y, d.x, np.swapaxes(d.T, -1, -2)


def geometric_discord(rho_as, measured="a"):
    """Two-qubit geometric discord, normalized so a Bell state gives 1.

    ``(||x||^2 + ||T||_F^2 - lambda_max(x x^T + T T^T)) / 2`` with ``x`` the
    Bloch vector of the measured qubit.
    """
    x, _, T = _measured_view(rho_as, measured)
    k = np.einsum("...i,...j->...ij", x, x) + T @ np.swapaxes(T, -1, -2)
    lam = np.linalg.eigvalsh(k)[..., -1]
    val = 0.5 * (np.sum(x * x, axis=-1) + np.sum(T * T, axis=(-2, -1)) - lam)
    return np.clip(val, 0.0, None)


def _dephased(rho_as, n, measured):
    """Non-selective projective measurement along Bloch direction ``n`` on one side."""
    n = np.asarray(n, dtype=float)
    sig = np.einsum("i,ijk->jk", n, PAULIS)
    out = np.zeros((4, 4), dtype=complex)
    for sgn in (1.0, -1.0):
        proj = 0.5 * (I2 + sgn * sig)
        p4 = np.kron(proj, I2) if measured == "a" else np.kron(I2, proj)
        out = out + p4 @ rho_as @ p4
    return out


def geometric_discord_bruteforce(rho_as, measured="a", grid=48):
    """Oracle: minimize ``2 ||rho - Pi_n(rho)||^2`` over measurement directions.

    ``Pi_n`` is the dephasing induced by a projective measurement along ``n``;
    for a fixed basis it is the closest classical-quantum state in
    Hilbert-Schmidt norm. Grid search on the sphere, then Nelder-Mead.
    """
    side = _side(measured)
    rho_as = np.asarray(rho_as, dtype=complex)

    def cost(angles):
        th, ph = angles
        n = (np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th))
        diff = rho_as - _dephased(rho_as, n, side)
        return 2.0 * np.real(np.sum(np.abs(diff) ** 2))

    ths = (np.arange(grid) + 0.5) * np.pi / grid
    phs = np.arange(2 * grid) * np.pi / grid
    vals = np.array([[cost((t, p)) for p in phs] for t in ths])
    best = np.inf
    for idx in np.argsort(vals, axis=None)[:RESTARTS]:
        i, j = np.unravel_index(idx, vals.shape)
        res = minimize(cost, (ths[i], phs[j]), method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": 4000})
        best = min(best, res.fun, vals[i, j])
    return float(best)


def _conditional_entropy_after_measurement(x, y, T, n):
    """``sum_k p_k S(rho_{unmeasured|k})`` for measurement direction(s) ``n``.

    ``x``/``y``/``T`` describe the measured / unmeasured qubit (rows of ``T``
    belong to the measured side). Broadcasts ``n`` against the state arrays.
    """
    nx = np.sum(n * x, axis=-1)
    tn = np.einsum("...ij,...i->...j", T, n)
    total = 0.0
    for sgn in (1.0, -1.0):
        p = 0.5 * (1.0 + sgn * nx)
        v = y + sgn * tn
        safe = np.where(p > 1e-14, 2.0 * p, 1.0)
        length = np.where(p > 1e-14, np.linalg.norm(v, axis=-1) / safe, 0.0)
        total = total + np.where(p > 1e-14, p * binary_entropy_of_length(length), 0.0)
    return total


def _sphere(theta, phi):
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi),
                     np.cos(theta)], axis=-1)


def _grid_directions():
    th = (np.arange(GRID) + 0.5) * np.pi / GRID
    ph = np.arange(GRID) * 2.0 * np.pi / GRID
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    return tt.ravel(), pp.ravel()


def _mutual_information(rho_as):
    return (von_neumann_entropy(partial_trace(rho_as, "s"))
            + von_neumann_entropy(partial_trace(rho_as, "a"))
            - von_neumann_entropy(rho_as))


def _unmeasured_entropy(rho_as, side):
    return von_neumann_entropy(partial_trace(rho_as, side))


def entropic_discord(rho_as, measured="a"):
    """Quantum discord ``I - J`` with projective measurements on ``measured``.

    The measurement direction is found by a 32x32 grid over the sphere and
    Nelder-Mead refinement from the three best cells. Raises
    :class:`ConvergenceFailure` if a refinement does not converge.
    """
    side = _side(measured)
    rho_as = np.asarray(rho_as, dtype=complex)
    x, y, T = _measured_view(rho_as, side)
    tt, pp = _grid_directions()
    vals = _conditional_entropy_after_measurement(x, y, T, _sphere(tt, pp))

    def cost(a):
        return float(_conditional_entropy_after_measurement(x, y, T, _sphere(a[0], a[1])))

    best = float(np.min(vals))
    for idx in np.argsort(vals)[:RESTARTS]:
        res = minimize(cost, (tt[idx], pp[idx]), method="Nelder-Mead",
                       options={"fatol": SIMPLEX_FATOL, "xatol": 1e-6, "maxiter": 2000})
        if not res.success:
            raise ConvergenceFailure(f"discord refinement failed: {res.message}")
        best = min(best, res.fun)
    classical = _unmeasured_entropy(rho_as, side) - best
    return float(_mutual_information(rho_as) - classical)


def _entropic_discord_batch(rho_as, measured="a", zoom_steps=30):
    """Vectorized discord for a stack of states.

    Same 32x32 starting grid as :func:`entropic_discord`, followed by a
    shrinking 3x3 pattern search around the best cell instead of a simplex, so
    the whole stack refines in lock step.
    """
    side = _side(measured)
    x, y, T = _measured_view(rho_as, side)
    tt, pp = _grid_directions()
    vals = _conditional_entropy_after_measurement(
        x[..., None, :], y[..., None, :], T[..., None, :, :], _sphere(tt, pp))
    k = np.argmin(vals, axis=-1)
    th, ph, best = tt[k], pp[k], np.min(vals, axis=-1)
    step = np.pi / GRID
    offs = np.array([(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)], dtype=float)
    for _ in range(zoom_steps):
        cand_t = th[..., None] + step * offs[:, 0]
        cand_p = ph[..., None] + 2.0 * step * offs[:, 1]
        cv = _conditional_entropy_after_measurement(
            x[..., None, :], y[..., None, :], T[..., None, :, :], _sphere(cand_t, cand_p))
        j = np.argmin(cv, axis=-1)
        pick = np.take_along_axis(cv, j[..., None], -1)[..., 0]
        better = pick < best
        th = np.where(better, np.take_along_axis(cand_t, j[..., None], -1)[..., 0], th)
        ph = np.where(better, np.take_along_axis(cand_p, j[..., None], -1)[..., 0], ph)
        best = np.where(better, pick, best)
        step *= 0.6
    classical = _unmeasured_entropy(rho_as, side) - best
    return _mutual_information(rho_as) - classical


def negativity(rho_as):
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose."""
    w = eigvalsh(partial_transpose(rho_as, "a"))
    return np.sum(np.where(w < 0.0, -w, 0.0), axis=-1)


def correlation_scan(spec, u, measured="a", entropic=True, directions=None, unitary_id=0,
                     chunk=1024):
    """Ensemble averages of every measure on the pre-discard joint state.

    Each of ``spec.count`` reference directions (or the supplied
    ``directions``) gives an input ``rho_s``; the joint state
    ``U (rho_a (x) rho_s) U^dagger`` is evaluated before the ancilla is
    discarded. ``avg_F``/``avg_P`` come from the closed-form averages.
    """
    side = _side(measured)
    n = ensemble_directions(spec, unitary_id) if directions is None else np.asarray(directions)
    u = np.asarray(u, dtype=complex)
    rho_a = ancilla_state(spec.ancilla_purity)
    sums = np.zeros(4)
    for start in range(0, len(n), chunk):
        rho = joint_state(make_input_state(spec.p_w, n[start:start + chunk]), rho_a, u)
        sums[0] += np.sum(conditional_entropy(rho))
        sums[1] += np.sum(geometric_discord(rho, side))
        if entropic:
            sums[2] += np.sum(_entropic_discord_batch(rho, side))
        sums[3] += np.sum(negativity(rho))
    avg = sums / len(n)
    f, p = exact_ensemble_averages(channel_of(u, rho_a), spec.p_w)
    return CorrelationRecord(
        cond_entropy=float(avg[0]),
        geo_discord=float(avg[1]),
        entropic_discord=float(avg[2]) if entropic else float("nan"),
        negativity=float(avg[3]),
        measured_side=side,
        avg_F=float(f),
        avg_P=float(p),
    )
