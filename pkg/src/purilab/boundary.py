"""Optimal fidelity-purity frontiers and the no-go gap.

Two routes to the frontier:

* ``penalty_boundary`` searches all of U(4) through Hurwitz angles, pushing
  the average purity onto the target with an escalating quadratic penalty
  followed by a few augmented-Lagrangian multiplier updates.
* ``lagrange_stationary_points`` solves the stationarity conditions of
  ``F - lambda (P - P_target)`` for a circuit template with a handful of angles.

The full-U(4) optimum is the reference; templates are checked against it.
"""
import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares, minimize

from . import streams
from .correlations import geometric_discord
from .errors import InfeasibleTarget, NoSolution
from .gates import DEFAULT_TEMPLATES, named_gate, rotation, CNOT_AS, CNOT_SA
from .haar import N_PARAMS, assemble_batch, sample_angles
from .linalg import dagger
from .protocol import _channel_arrays, joint_state
from .qstate import ancilla_state, input_fidelity, input_purity, make_input_state, random_direction

log = logging.getLogger(__name__)

UPPER = "upper"
LOWER = "lower"
PURITY_TOL = 1e-4
DOMINANCE_SLACK = 2e-3
TRAIT_TOL = 1e-3
PENALTY_WEIGHTS = (1e2, 1e3, 1e4)
N_STARTS = 32
N_REFINE = 8
FD_STEP = 1e-6


@dataclass
class BoundaryPoint:
    target_purity: float
    optimal_avg_F: float
    direction: str
    params: np.ndarray
    source: str
    trait_label: str = "unassigned"
    achieved_purity: float = float("nan")
    unitary: np.ndarray = field(default=None, repr=False)
    converged: bool = True
    kind: str = ""


@dataclass
class NoGoReport:
    p_w: float
    F_in: float
    P_in: float
    sup_F_above: float
    gap: float
    epsilon: float
    points: list = field(default_factory=list, repr=False)

    @property
    def certified(self):
        return self.gap > 0.0


@dataclass
class DiscordBoundaryPoint:
    target_purity: float
    min_avg_geo_discord: float
    achieved_purity: float
    fidelity_boundary_geo_discord: float = float("nan")
    fidelity_boundary_F: float = float("nan")
    unitary: np.ndarray = field(default=None, repr=False)


def _sign(direction):
    if direction == UPPER:
        return -1.0
    if direction == LOWER:
        return 1.0
    raise ValueError(f"direction must be {UPPER!r} or {LOWER!r}, got {direction!r}")


def averages_of_unitaries(us, p_w, rho_a):
    """Closed-form ``(<F>, <P>)`` for a stack of unitaries."""
    T, t = _channel_arrays(us, rho_a)
    f = 0.5 + p_w * np.trace(T, axis1=-2, axis2=-1) / 6.0
    p = 0.5 * (1.0 + p_w * p_w * np.sum(T * T, axis=(-2, -1)) / 3.0 + np.sum(t * t, axis=-1))
    return f, p


# --------------------------------------------------------------------------
# full-U(4) penalty search


class _Chart:
    """``U(theta) = H(theta) H(theta0)^dagger U0``, regular at ``theta0``.

    Hurwitz coordinates are singular where any ``phi`` vanishes (identity,
    CNOTs, ...). Anchoring each start at a generic ``theta0`` keeps the chart
    regular at the start point while the variables stay Hurwitz angles.
    """

    def __init__(self, u0, theta0):
        self.theta0 = np.asarray(theta0, dtype=float)
        self.offset = dagger(assemble_batch(self.theta0)) @ np.asarray(u0, dtype=complex)

    def unitaries(self, thetas):
        return assemble_batch(thetas) @ self.offset


class _Objective:
    def __init__(self, chart, value_fn, target, sign, mu, lam=0.0):
        self.chart, self.value_fn = chart, value_fn
        self.target, self.sign, self.mu, self.lam = target, sign, mu, lam
        self._eye = np.eye(N_PARAMS)

    def penalized(self, v, p):
        c = p - self.target
        return self.sign * v + self.lam * c + self.mu * c * c

    def __call__(self, theta):
        pts = np.concatenate([theta[None], theta + FD_STEP * self._eye, theta - FD_STEP * self._eye])
        v, p = self.value_fn(self.chart.unitaries(pts))
        f = self.penalized(v, p)
        grad = (f[1:1 + N_PARAMS] - f[1 + N_PARAMS:]) / (2.0 * FD_STEP)
        return float(f[0]), grad


def _local(obj, theta, maxiter):
    res = minimize(obj, theta, jac=True, method="L-BFGS-B",
                   options={"maxiter": maxiter, "ftol": 1e-15, "gtol": 1e-10})
    return res.x


def _penalty_run(chart, value_fn, target, sign, theta, weights=PENALTY_WEIGHTS, al_rounds=12,
                 tol=PURITY_TOL):
    for mu in weights:
        theta = _local(_Objective(chart, value_fn, target, sign, mu), theta, 400)
    # Augmented-Lagrangian polish. Where grad P vanishes on the constraint
    # (P at its reachable maximum) the multiplier alone stalls, so mu grows
    # whenever the violation fails to shrink fourfold.
    mu, lam = weights[-1], 0.0
    v, p = value_fn(chart.unitaries(theta[None]))
    c_prev = np.inf
    for _ in range(al_rounds):
        c = float(p[0] - target)
        if abs(c) <= 0.01 * tol:
            break
        if abs(c) > 0.25 * c_prev:
            mu = min(mu * 10.0, 1e9)
        c_prev = abs(c)
        lam += 2.0 * mu * c
        theta = _local(_Objective(chart, value_fn, target, sign, mu, lam), theta, 400)
        v, p = value_fn(chart.unitaries(theta[None]))
    return theta, float(v[0]), float(p[0])


def _template_seed_unitaries(p_w, rho_a, target, sign, per_template=2):
    out = []
    for tpl in DEFAULT_TEMPLATES.values():
        grid = _param_grid(tpl.n_params, 12)
        us = template_unitaries(tpl, grid)
        f, p = averages_of_unitaries(us, p_w, rho_a)
        score = np.abs(p - target) * 50.0 + sign * f
        for k in np.argsort(score)[:per_template]:
            out.append(us[k])
    return out


def _optimize(value_fn, p_w, rho_a, target, sign, n_starts, seed, extra_starts, n_refine,
              tol=PURITY_TOL):
    rng = streams.stream(seed, streams.OPTIMIZER, int(round(target * 1e6)))
    seeds = [np.asarray(u, dtype=complex) for u in extra_starts]
    seeds += [named_gate("IDENTITY"), named_gate("SWAP")]
    seeds += _template_seed_unitaries(p_w, rho_a, target, sign)
    n_haar = max(n_starts - len(seeds), 0)
    seeds += list(assemble_batch(sample_angles(rng, n_haar))) if n_haar else []
    anchors = sample_angles(rng, len(seeds))

    first = []
    for u0, th0 in zip(seeds, anchors):
        chart = _Chart(u0, th0)
        theta = _local(_Objective(chart, value_fn, target, sign, PENALTY_WEIGHTS[0]), th0, 300)
        v, p = value_fn(chart.unitaries(theta[None]))
        first.append((float(sign * v[0] + PENALTY_WEIGHTS[-1] * (p[0] - target) ** 2), chart, theta))
    first.sort(key=lambda item: item[0])

    best = None
    # unoptimized seeds compete too: identity and SWAP are exact at P_in and 1
    v0, p0 = value_fn(np.stack(seeds))
    for k in np.flatnonzero(np.abs(p0 - target) <= 0.01 * tol):
        chart = _Chart(seeds[k], anchors[k])
        key = (False, sign * float(v0[k]))
        if best is None or key < best[0]:
            best = (key, chart, anchors[k], float(v0[k]), float(p0[k]))
    for _, chart, theta in first[:n_refine]:
        theta, v, p = _penalty_run(chart, value_fn, target, sign, theta, tol=tol)
        feasible = abs(p - target) <= tol
        key = (not feasible, sign * v if feasible else abs(p - target))
        if best is None or key < best[0]:
            best = (key, chart, theta, v, p)
    _, chart, theta, v, p = best
    return chart, theta, v, p


def penalty_boundary(p_w, ancilla_purity, target, direction=UPPER, n_starts=N_STARTS, seed=0,
                     extra_starts=(), n_refine=N_REFINE):
    """Best average fidelity at average purity ``target`` over all of U(4).

    Returns a :class:`BoundaryPoint` whose ``converged`` flag is False when the
    purity constraint could not be met to ``PURITY_TOL`` for a target that is
    nonetheless reachable. Raises :class:`InfeasibleTarget` for targets
    outside the reachable purity range.
    """
    if not 0.5 <= target <= 1.0:
        raise InfeasibleTarget(f"target purity {target} outside [1/2, 1]")
    sign = _sign(direction)
    rho_a = ancilla_state(ancilla_purity)

    def value_fn(us):
        return averages_of_unitaries(us, p_w, rho_a)

    chart, theta, f, p = _optimize(value_fn, p_w, rho_a, target, sign, n_starts, seed,
                                   extra_starts, n_refine)
    converged = abs(p - target) <= PURITY_TOL
    if not converged:
        lo, hi = reachable_purity_range(p_w, ancilla_purity, seed=seed)
        if target > hi + PURITY_TOL or target < lo - PURITY_TOL:
            raise InfeasibleTarget(
                f"target purity {target} outside reachable range [{lo:.6f}, {hi:.6f}]")
        log.warning("penalty search missed target %.6f (got %.6f)", target, p)
    u = chart.unitaries(theta[None])[0]
    return BoundaryPoint(target_purity=float(target), optimal_avg_F=f, direction=direction,
                         params=theta, source="full-unitary", achieved_purity=p, unitary=u,
                         converged=converged)


def reachable_purity_range(p_w, ancilla_purity, seed=0, n_starts=8):
    """Smallest and largest average output purity over U(4)."""
    rho_a = ancilla_state(ancilla_purity)
    rng = streams.stream(seed, streams.OPTIMIZER, 999_999_999)
    out = []
    for sgn in (1.0, -1.0):
        best = np.inf
        for th0 in sample_angles(rng, n_starts):
            chart = _Chart(assemble_batch(th0), th0)

            def fun(theta, chart=chart):
                pts = np.concatenate([theta[None], theta + FD_STEP * np.eye(N_PARAMS),
                                      theta - FD_STEP * np.eye(N_PARAMS)])
                _, p = averages_of_unitaries(chart.unitaries(pts), p_w, rho_a)
                v = sgn * p
                return float(v[0]), (v[1:1 + N_PARAMS] - v[1 + N_PARAMS:]) / (2 * FD_STEP)

            res = minimize(fun, th0, jac=True, method="L-BFGS-B")
            best = min(best, res.fun)
        out.append(sgn * best)
    return out[0], out[1]


def boundary_curve(p_w, ancilla_purity, targets, direction=UPPER, n_starts=N_STARTS, seed=0):
    """``penalty_boundary`` over a grid, warm-starting each target from its neighbour."""
    points = []
    prev = None
    for tgt in targets:
        extra = [] if prev is None else [prev.unitary]
        try:
            prev = penalty_boundary(p_w, ancilla_purity, tgt, direction, n_starts=n_starts,
                                    seed=seed, extra_starts=extra)
        except InfeasibleTarget as exc:
            log.warning("%s", exc)
            prev = None
            points.append(None)
            continue
        points.append(prev)
    return points


# --------------------------------------------------------------------------
# circuit templates


def _param_grid(k, per_dim):
    if k == 0:
        return np.zeros((1, 0))
    axes = [np.arange(per_dim) * np.pi / per_dim] * k
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)


def template_unitaries(template, params):
    """Compile ``template`` for a stack of parameter rows, shape ``(B, k)``."""
    params = np.asarray(params, dtype=float).reshape(-1, template.n_params)
    b = params.shape[0]
    u = np.broadcast_to(np.eye(4, dtype=complex), (b, 4, 4)).copy()
    slot = 0
    for e in template.elements:
        if e in ("RotS", "RotA"):
            r = np.stack([rotation(a) for a in params[:, slot]]) if b else np.zeros((0, 2, 2))
            slot += 1
            g = (np.einsum("ij,bkl->bikjl", np.eye(2), r) if e == "RotS"
                 else np.einsum("bij,kl->bikjl", r, np.eye(2))).reshape(b, 4, 4)
        else:
            g = CNOT_AS if e == "CNOT_as" else CNOT_SA
        u = g @ u
    return u


def _template_fp(template, p_w, rho_a):
    def fp(v):
        v = np.atleast_2d(v)
        return averages_of_unitaries(template_unitaries(template, v), p_w, rho_a)
    return fp


def _gradients(fp, v, h=1e-5):
    k = len(v)
    pts = np.concatenate([v[None], v + h * np.eye(k), v - h * np.eye(k)])
    f, p = fp(pts)
    gf = (f[1:1 + k] - f[1 + k:]) / (2 * h)
    gp = (p[1:1 + k] - p[1 + k:]) / (2 * h)
    return f[0], p[0], gf, gp


def _multiplier(gf, gp):
    nn = float(gp @ gp)
    return float(gf @ gp) / nn if nn > 1e-18 else 0.0


def template_purity_range(template, p_w, ancilla_purity=1.0, per_dim=24):
    rho_a = ancilla_state(ancilla_purity)
    fp = _template_fp(template, p_w, rho_a)
    if template.n_params == 0:
        _, p = fp(np.zeros((1, 0)))
        return float(p[0]), float(p[0])
    grid = _param_grid(template.n_params, per_dim if template.n_params < 3 else 12)
    _, p = fp(grid)
    out = []
    for sgn in (1.0, -1.0):
        v0 = grid[np.argmin(sgn * p)]
        res = minimize(lambda v: sgn * float(fp(v)[1][0]), v0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        out.append(sgn * min(res.fun, np.min(sgn * p)))
    return out[0], out[1]


def _classify(fp, v, lam, h=1e-4):
    k = len(v)
    if k == 0:
        return "isolated"

    def grad_l(x):
        _, _, gf, gp = _gradients(fp, x)
        return gf - lam * gp

    hess = np.empty((k, k))
    for i in range(k):
        e = np.zeros(k)
        e[i] = h
        hess[:, i] = (grad_l(v + e) - grad_l(v - e)) / (2 * h)
    hess = 0.5 * (hess + hess.T)
    _, _, _, gp = _gradients(fp, v)
    if np.linalg.norm(gp) > 1e-9:
        q, _ = np.linalg.qr(np.concatenate([gp[:, None], np.eye(k)], axis=1))
        basis = q[:, 1:k]
    else:
        basis = np.eye(k)
    if basis.shape[1] == 0:
        return "isolated"
    ev = np.linalg.eigvalsh(basis.T @ hess @ basis)
    active = ev[np.abs(ev) > 1e-6]
    if active.size == 0:
        return "flat"
    if np.all(active < 0):
        return "max"
    if np.all(active > 0):
        return "min"
    return "saddle"


def lagrange_stationary_points(template, p_w, target, ancilla_purity=1.0, per_dim=None,
                               max_starts=48):
    """Stationary points of ``F - lambda (P - target)`` on ``P = target``.

    Dense multi-start least-squares root finding over the angle torus; the
    multiplier is eliminated as the projection of grad F onto grad P. Each
    returned point carries ``kind`` in {max, min, saddle, isolated, flat}.
    Raises :class:`NoSolution` if ``target`` is outside the template's range.
    """
    if template.n_params > 3:
        raise ValueError("Lagrange solver supports templates with at most 3 angles")
    rho_a = ancilla_state(ancilla_purity)
    fp = _template_fp(template, p_w, rho_a)
    lo, hi = template_purity_range(template, p_w, ancilla_purity)
    if target < lo - 1e-9 or target > hi + 1e-9:
        raise NoSolution(
            f"template {template.name} reaches purities [{lo:.6f}, {hi:.6f}], not {target}",
            purity_range=(lo, hi))
    k = template.n_params
    if k == 0:
        f, p = fp(np.zeros((1, 0)))
        return [BoundaryPoint(target, float(f[0]), "stationary", np.zeros(0), f"template:{template.name}",
                              achieved_purity=float(p[0]), unitary=template_unitaries(template, np.zeros((1, 0)))[0],
                              kind="isolated")]

    def residual(v):
        _, p, gf, gp = _gradients(fp, v)
        lam = _multiplier(gf, gp)
        return np.concatenate([gf - lam * gp, [p - target]])

    grid = _param_grid(k, per_dim or {1: 64, 2: 24, 3: 10}[k])
    r0 = np.array([np.linalg.norm(residual(v)) for v in grid])
    starts = grid[np.argsort(r0)[:max_starts]]

    found = []
    for v0 in starts:
        sol = least_squares(residual, v0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.linalg.norm(sol.fun) > 1e-7:
            continue
        v = np.mod(sol.x, np.pi)
        if any(np.all(np.abs(np.angle(np.exp(2j * (v - w)))) < 1e-5) for w in found):
            continue
        found.append(v)
    if not found:
        raise NoSolution(f"no stationary point of template {template.name} at purity {target}",
                         purity_range=(lo, hi))
    points = []
    for v in found:
        f, p, gf, gp = _gradients(fp, v)
        kind = _classify(fp, v, _multiplier(gf, gp))
        direction = {"max": UPPER, "min": LOWER}.get(kind, "stationary")
        points.append(BoundaryPoint(float(target), float(f), direction, v, f"template:{template.name}",
                                    achieved_purity=float(p),
                                    unitary=template_unitaries(template, v[None])[0], kind=kind))
    points.sort(key=lambda b: -b.optimal_avg_F)
    return points


def assign_trait(point, p_w, ancilla_purity=1.0, templates=None, tol=TRAIT_TOL):
    """Label ``point`` with the first template reproducing its (F, P) within ``tol``."""
    templates = DEFAULT_TEMPLATES if templates is None else templates
    target = point.achieved_purity if np.isfinite(point.achieved_purity) else point.target_purity
    for name, tpl in templates.items():
        if tpl.role not in ("any", point.direction):
            continue
        try:
            sols = lagrange_stationary_points(tpl, p_w, target, ancilla_purity)
        except NoSolution:
            continue
        fs = [s.optimal_avg_F for s in sols]
        best = max(fs) if point.direction == UPPER else min(fs)
        if abs(best - point.optimal_avg_F) <= tol:
            return name
    return "unassigned"


# --------------------------------------------------------------------------
# envelopes, the no-go gap and discord frontiers


def empirical_envelope(records, bins):
    """Per-purity-bin max and min average fidelity of a scatter of sweep records.

    Each envelope point sits at the purity of the record that realizes it.
    Empty bins are skipped with a log notice.
    """
    if not records:
        return []
    p = np.array([r.avg_purity for r in records])
    f = np.array([r.avg_fidelity for r in records])
    lo, hi = p.min(), p.max()
    edges = np.linspace(lo, hi, bins + 1) if hi > lo else np.array([lo, hi])
    idx = np.clip(np.searchsorted(edges, p, side="right") - 1, 0, len(edges) - 2)
    out = []
    for b in range(len(edges) - 1):
        members = np.flatnonzero(idx == b)
        if members.size == 0:
            log.info("empty purity bin [%g, %g) skipped", edges[b], edges[b + 1])
            continue
        for direction, k in ((UPPER, members[np.argmax(f[members])]),
                             (LOWER, members[np.argmin(f[members])])):
            out.append(BoundaryPoint(float(p[k]), float(f[k]), direction,
                                     np.array([records[k].unitary_id]), "empirical",
                                     achieved_purity=float(p[k])))
    return out


def no_go_gap(p_w, epsilon, ancilla_purity=1.0, n_grid=6, n_starts=N_STARTS, seed=0):
    """``F_in`` minus the best fidelity reachable with purity at least ``P_in + epsilon``."""
    p_in, f_in = input_purity(p_w), input_fidelity(p_w)
    if not 0.0 < epsilon < 1.0 - p_in:
        raise ValueError(f"epsilon must lie in (0, {1.0 - p_in}), got {epsilon}")
    targets = np.linspace(p_in + epsilon, 1.0, n_grid)
    points = [pt for pt in boundary_curve(p_w, ancilla_purity, targets, UPPER, n_starts, seed)
              if pt is not None]
    sup_f = max(pt.optimal_avg_F for pt in points)
    return NoGoReport(p_w, f_in, p_in, sup_f, f_in - sup_f, epsilon, points)


def _discord_value_fn(p_w, rho_a, directions, measured="a"):
    rho_s = make_input_state(p_w, directions)
    prod = np.einsum("ij,nkl->nikjl", rho_a, rho_s).reshape(-1, 4, 4)

    def value_fn(us):
        rho = us[:, None] @ prod[None] @ dagger(us)[:, None]
        d = geometric_discord(rho, measured).mean(axis=-1)
        _, p = averages_of_unitaries(us, p_w, rho_a)
        return d, p
    return value_fn


def average_geometric_discord(u, p_w, directions, ancilla_purity=1.0, measured="a"):
    rho = joint_state(make_input_state(p_w, directions), ancilla_state(ancilla_purity), u)
    return float(np.mean(geometric_discord(rho, measured)))


def discord_boundary(p_w, targets, ancilla_purity=1.0, n_states=128, seed=0, n_starts=16,
                     compare_fidelity=True):
    """Minimal ensemble-averaged geometric discord at each target purity.

    The ensemble is a fixed set of ``n_states`` reference directions drawn
    from ``seed``, so every target sees the same sample. With
    ``compare_fidelity`` the discord of the fidelity-optimal unitary at the
    same purity is reported alongside.
    """
    rho_a = ancilla_state(ancilla_purity)
    directions = random_direction(streams.stream(seed, streams.DIRECTIONS, 0), size=n_states)
    value_fn = _discord_value_fn(p_w, rho_a, directions)
    out = []
    prev = None
    for tgt in targets:
        extra = [] if prev is None else [prev]
        chart, theta, d, p = _optimize(value_fn, p_w, rho_a, tgt, 1.0, n_starts, seed, extra,
                                       n_refine=4)
        u = chart.unitaries(theta[None])[0]
        prev = u
        rec = DiscordBoundaryPoint(float(tgt), d, p, unitary=u)
        if compare_fidelity:
            fb = penalty_boundary(p_w, ancilla_purity, tgt, UPPER, n_starts=n_starts, seed=seed)
            rec = replace(rec, fidelity_boundary_F=fb.optimal_avg_F,
                          fidelity_boundary_geo_discord=average_geometric_discord(
                              fb.unitary, p_w, directions, ancilla_purity))
        out.append(rec)
    return out
