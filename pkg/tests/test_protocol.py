import numpy as np
import pytest
from numpy.testing import assert_allclose

from purilab import streams
from purilab.gates import CNOT_AS, SWAP, local_rotation
from purilab.haar import sample_haar
from purilab.linalg import partial_trace
from purilab.protocol import (
    EXACT,
    MONTE_CARLO,
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
    make_input_state,
    purity,
    random_direction,
    state_from_bloch,
)


def test_identity_channel():
    ch = channel_of(np.eye(4), ancilla_state(1.0))
    assert_allclose(ch.T, np.eye(3), atol=1e-15)
    assert_allclose(ch.t, 0.0, atol=1e-15)
    f, p = exact_ensemble_averages(ch, 0.75)
    assert f == 0.875
    assert p == 0.78125


def test_swap_is_constant_map():
    ch = channel_of(SWAP, ancilla_state(1.0))
    assert_allclose(ch.T, 0.0, atol=1e-15)
    assert_allclose(ch.t, [0.0, 0.0, 1.0], atol=1e-15)
    f, p = exact_ensemble_averages(ch, 0.75)
    assert_allclose([f, p], [0.5, 1.0])


def test_controlled_flip_is_dephasing_in_x():
    # ancilla |0> controls nothing; the channel is the identity
    ch = channel_of(CNOT_AS, ancilla_state(1.0))
    assert_allclose(ch.T, np.eye(3), atol=1e-15)
    # ancilla rotated to |+> first: full bit-flip dephasing keeps only the x axis
    u = CNOT_AS @ local_rotation("a", np.pi / 4)
    ch = channel_of(u, ancilla_state(1.0))
    assert_allclose(ch.T, np.diag([1.0, 0.0, 0.0]), atol=1e-15)
    assert_allclose(ch.t, 0.0, atol=1e-15)


def test_system_rotation_channel():
    ch = channel_of(local_rotation("s", np.pi / 4), ancilla_state(1.0))
    # rotation by -pi/2 about y
    assert_allclose(ch.apply([0.0, 0.0, 1.0]), [-1.0, 0.0, 0.0], atol=1e-15)
    f, p = exact_ensemble_averages(ch, 0.75)
    assert_allclose(f, 0.5 + 0.75 / 6)
    assert_allclose(p, 0.78125)


def test_affine_map_matches_direct_simulation():
    rng = np.random.default_rng(0)
    us = sample_haar(rng, size=50)
    rho_a = ancilla_state(0.9)
    ls = random_direction(rng, size=50) * rng.uniform(0, 1, size=(50, 1))
    ch = channel_of(us, rho_a)
    direct = bloch_from_state(apply_protocol(state_from_bloch(ls), rho_a, us))
    assert_allclose(np.einsum("nij,nj->ni", ch.T, ls) + ch.t, direct, atol=1e-12)


def test_joint_purity_preserved():
    rng = np.random.default_rng(1)
    us = sample_haar(rng, size=100)
    rho_s = make_input_state(0.6, random_direction(rng, size=100))
    rho_a = ancilla_state(0.82)
    out = joint_state(rho_s, rho_a, us)
    assert_allclose(purity(out), purity(rho_s) * purity(rho_a), atol=1e-12)
    assert_allclose(np.trace(partial_trace(out, "a"), axis1=1, axis2=2), 1.0, atol=1e-14)


def test_monte_carlo_agrees_with_exact():
    spec = InputEnsembleSpec(0.75, 1.0, 5000, seed=3)
    for uid, u in enumerate(haar_unitaries(3, range(6))):
        mc = monte_carlo_sweep(spec, u, unitary_id=uid)
        f, p = exact_ensemble_averages(channel_of(u, ancilla_state(1.0)), 0.75)
        assert abs(mc.avg_fidelity - f) <= 4 * mc.std_err_f
        assert abs(mc.avg_purity - p) <= 4 * mc.std_err_p + 1e-12
        assert mc.method == MONTE_CARLO


def test_scan_is_deterministic_and_chunk_independent():
    spec = InputEnsembleSpec(0.6, 1.0, 10, seed=0)
    a = distribution_scan(spec, 300, 42)
    b = distribution_scan(spec, 300, 42, chunk=64)
    assert a == b
    assert [r.unitary_id for r in a] == list(range(300))
    assert all(r.method == EXACT for r in a)
    c = distribution_scan(spec, 300, 43)
    assert a != c


def test_scan_ids_are_prefix_stable():
    spec = InputEnsembleSpec(0.6)
    assert distribution_scan(spec, 50, 5) == distribution_scan(spec, 120, 5)[:50]


def test_scan_parallel_matches_serial():
    spec = InputEnsembleSpec(0.75)
    assert distribution_scan(spec, 200, 1, chunk=100, jobs=2) == distribution_scan(spec, 200, 1)


def test_scan_ranges():
    spec = InputEnsembleSpec(0.3)
    recs = distribution_scan(spec, 2000, 0)
    p = np.array([r.avg_purity for r in recs])
    f = np.array([r.avg_fidelity for r in recs])
    assert np.all((p >= 0.5) & (p <= 1.0))
    assert np.all((f >= 0.0) & (f <= 1.0))


def test_scan_rejects_bad_input():
    spec = InputEnsembleSpec(0.3)
    with pytest.raises(ValueError):
        distribution_scan(spec, 0, 0)
    with pytest.raises(ValueError):
        distribution_scan(spec, 2, 0, unitaries=[np.eye(4)])
    with pytest.raises(ValueError):
        distribution_scan(spec, 1, 0, method="guess")


def test_mixed_ancilla_limits_purity():
    pure = distribution_scan(InputEnsembleSpec(0.75, 1.0), 3000, 0)
    mixed = distribution_scan(InputEnsembleSpec(0.75, 0.82), 3000, 0)
    assert max(r.avg_purity for r in mixed) < max(r.avg_purity for r in pure)
