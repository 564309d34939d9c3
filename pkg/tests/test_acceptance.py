"""Acceptance gate: one PASS/FAIL line per criterion."""
import time

import numpy as np
import pytest
from scipy import stats

from purilab import streams
from purilab.boundary import UPPER, boundary_curve, lagrange_stationary_points, no_go_gap, penalty_boundary
from purilab.correlations import (
    conditional_entropy,
    correlation_scan,
    entropic_discord,
    geometric_discord,
    geometric_discord_bruteforce,
    negativity,
)
from purilab.gates import DEFAULT_TEMPLATES
from purilab.haar import sample_haar, sample_haar_qr_oracle
from purilab.linalg import dagger, kron
from purilab.protocol import (
    apply_protocol,
    channel_of,
    distribution_scan,
    exact_ensemble_averages,
    haar_unitaries,
    joint_state,
    monte_carlo_sweep,
)
from purilab.qstate import (
    InputEnsembleSpec,
    ancilla_state,
    bloch_from_state,
    input_fidelity,
    input_purity,
    make_input_state,
    purity,
    random_direction,
    state_from_bloch,
)


@pytest.fixture
def report(capsys):
    def _report(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, f"{label}: {detail}"
    return _report


def test_criterion_1_anchor_point(report):
    t0 = time.perf_counter()
    ch = channel_of(np.eye(4), ancilla_state(1.0))
    f, p = map(float, exact_ensemble_averages(ch, 0.75))
    spec = InputEnsembleSpec(0.75, 1.0, 5000, seed=0)
    mc = monte_carlo_sweep(spec, np.eye(4))
    elapsed = time.perf_counter() - t0
    ok = (f == 0.875 and p == 0.78125
          and abs(mc.avg_fidelity - f) <= 4 * mc.std_err_f
          and abs(mc.avg_purity - p) <= 4 * mc.std_err_p + 1e-12
          and elapsed < 1.0)
    report("1 anchor point", ok,
           f"exact=({f!r}, {p!r}) mc=({mc.avg_fidelity:.5f}+-{mc.std_err_f:.1e}, "
           f"{mc.avg_purity:.5f}) t={elapsed:.3f}s")


def test_criterion_2_input_purity_table(report):
    table = {0.3: 0.545, 0.6: 0.68, 0.9: 0.905}
    errs = [abs(input_purity(k) - v) for k, v in table.items()]
    errs += [abs(purity(make_input_state(k, [0, 0, 1])) - v) for k, v in table.items()]
    report("2 input purity table", max(errs) <= 1e-12, f"max error {max(errs):.1e}")


def test_criterion_3_no_go(report):
    t0 = time.perf_counter()
    lines, ok = [], True
    for p_w in (0.3, 0.6, 0.75, 0.9):
        p_in, f_in = input_purity(p_w), input_fidelity(p_w)
        recs = distribution_scan(InputEnsembleSpec(p_w), 10_000, 0)
        violators = [r for r in recs if r.avg_purity > p_in + 1e-3 and r.avg_fidelity > f_in]
        rep = no_go_gap(p_w, 0.01)
        ok &= not violators and rep.gap > 0
        lines.append(f"p_w={p_w}: violators={len(violators)} gap={rep.gap:.4f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 600
    report("3 no-go certification", ok, "; ".join(lines) + f" t={elapsed:.0f}s")


def test_criterion_4_boundary_endpoints(report):
    p_w = 0.75
    top = penalty_boundary(p_w, 1.0, 1.0, UPPER).optimal_avg_F
    mid = penalty_boundary(p_w, 1.0, input_purity(p_w), UPPER).optimal_avg_F
    fs = [pt.optimal_avg_F for pt in
          lagrange_stationary_points(DEFAULT_TEMPLATES["A"], p_w, input_purity(p_w))]
    span_err = max(abs(max(fs) - (0.5 + p_w / 2)), abs(min(fs) - (0.5 - p_w / 6)))
    ok = abs(top - 0.5) <= 1e-3 and abs(mid - input_fidelity(p_w)) <= 1e-3 and span_err <= 1e-6
    report("4 boundary endpoints", ok,
           f"F(P=1)={top:.6f} F(P_in)={mid:.6f} trait A span [{min(fs):.8f}, {max(fs):.8f}]")


def test_criterion_5_haar_sampler(report):
    t0 = time.perf_counter()
    n = 20_000
    h = sample_haar(streams.stream(0, streams.HAAR, 10**9), size=n)
    q = sample_haar_qr_oracle(streams.stream(0, streams.ORACLE, 0), size=n)
    mh, mq = np.abs(h) ** 2, np.abs(q) ** 2
    se_h = mh.std(axis=0, ddof=1) / np.sqrt(n)
    se_q = mq.std(axis=0, ddof=1) / np.sqrt(n)
    comb = np.sqrt(se_h**2 + se_q**2)
    z = np.abs(mh.mean(axis=0) - 0.25) / se_h
    z_pair = np.abs(mh.mean(axis=0) - mq.mean(axis=0)) / comb
    ks = stats.ks_2samp(np.trace(h, axis1=1, axis2=2).real, np.trace(q, axis1=1, axis2=2).real)
    elapsed = time.perf_counter() - t0
    ok = np.all(z <= 3) and np.all(z_pair <= 3) and ks.pvalue > 0.01 and elapsed < 30
    report("5 Haar sampler", ok,
           f"max |m-1/4|/se={z.max():.2f} max pair z={z_pair.max():.2f} "
           f"KS p={ks.pvalue:.3f} t={elapsed:.1f}s")


def test_criterion_6_correlation_oracles(report):
    rng = streams.stream(0, streams.ORACLE, 6)
    worst = 0.0
    for _ in range(50):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ dagger(a)
        rho /= np.trace(rho)
        worst = max(worst, abs(geometric_discord(rho) - geometric_discord_bruteforce(rho)))
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    bell = np.outer(psi, psi).astype(complex)
    vals = (float(conditional_entropy(bell)), float(geometric_discord(bell)),
            entropic_discord(bell), float(negativity(bell)))
    bell_err = max(abs(v - e) for v, e in zip(vals, (-1, 1, 1, 0.5)))
    prod_err = 0.0
    for _ in range(10):
        la, ls = random_direction(rng, 2) * rng.uniform(0, 1, (2, 1))
        rho = kron(state_from_bloch(la), state_from_bloch(ls))
        prod_err = max(prod_err, float(geometric_discord(rho)), abs(entropic_discord(rho)),
                       float(negativity(rho)), float(geometric_discord(rho, "s")),
                       abs(entropic_discord(rho, "s")))
    ok = worst <= 1e-4 and bell_err <= 1e-6 and prod_err <= 1e-6
    report("6 correlation oracles", ok,
           f"closed vs brute {worst:.1e}; Bell (E,DG,D,N)={tuple(round(v, 9) for v in vals)}; "
           f"product max {prod_err:.1e}")


def test_criterion_7_sign_flip(report):
    p_w = 0.75
    p_in = input_purity(p_w)
    grid = np.linspace(p_in - 0.1, p_in + 0.1, 21)
    spec = InputEnsembleSpec(p_w, 1.0, 2000, seed=11)
    dirs = random_direction(streams.stream(11, streams.DIRECTIONS, 0), size=2000)
    pts = boundary_curve(p_w, 1.0, grid, UPPER)
    e = np.array([correlation_scan(spec, pt.unitary, entropic=False, directions=dirs).cond_entropy
                  for pt in pts])
    below, at, above = e[:10], e[10], e[11:]
    ok = (np.all(below <= 0) and abs(at) <= 5e-3 and np.all(above >= 0)
          and np.all(np.diff(e[:11]) >= 0) and np.all(np.diff(e[10:]) >= 0))
    report("7 sign flip", ok,
           f"E(P_in-0.1)={e[0]:.4f} E(P_in)={at:.1e} E(P_in+0.1)={e[-1]:.4f}")


def test_criterion_8_mixed_ancilla(report):
    pure = distribution_scan(InputEnsembleSpec(0.75, 1.0), 10_000, 0)
    mixed = distribution_scan(InputEnsembleSpec(0.75, 0.82), 10_000, 0)
    mp = max(r.avg_purity for r in pure)
    mm = max(r.avg_purity for r in mixed)
    report("8 mixed ancilla", mm < mp, f"max avg_P pure={mp:.4f} ancilla 0.82={mm:.4f}")


def test_criterion_9_conservation(report):
    rng = streams.stream(0, streams.ORACLE, 9)
    us = haar_unitaries(9, range(1000))
    q = rng.uniform(0.5, 1.0, 1000)
    rho_a = np.array([ancilla_state(x) for x in q])
    ls = random_direction(rng, 1000) * rng.uniform(0, 1, (1000, 1))
    rho_s = state_from_bloch(ls)
    joint = joint_state(rho_s, rho_a, us)
    purity_err = np.max(np.abs(purity(joint) - purity(rho_s) * purity(rho_a)))
    direct = bloch_from_state(apply_protocol(rho_s, rho_a, us))
    aff = np.array([channel_of(u, ra).apply(l) for u, ra, l in zip(us, rho_a, ls)])
    affine_err = np.max(np.abs(direct - aff))
    ok = purity_err <= 1e-10 and affine_err <= 1e-9
    report("9 conservation", ok, f"joint purity {purity_err:.1e} affine {affine_err:.1e}")
