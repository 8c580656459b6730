import numpy as np
import pytest

from infosub.mi import (
    EstimationError,
    OracleConfig,
    critic_train_step,
    dv_value,
    gaussian_mi_nats,
    ksg_mi,
    make_critic,
    make_marginal_blocks,
    plugin_entropy,
    shuffle_marginal,
    smile_estimate,
    smile_score_grads,
    smile_value,
)
from infosub.numerics import OptimizerState, make_rng


def correlated_pair(rho, n, seed):
    rng = make_rng(seed)
    x = rng.normal(size=(n, 1))
    y = rho * x + np.sqrt(1.0 - rho * rho) * rng.normal(size=(n, 1))
    return x, y


def test_dv_value_hand_case():
    # mean([1, 3]) - log(mean([e^0, e^2]))
    expected = 2.0 - np.log((1.0 + np.e**2) / 2.0)
    assert dv_value([1.0, 3.0], [0.0, 2.0]) == pytest.approx(expected, abs=1e-12)


def test_dv_value_constant_shift_invariant():
    rng = make_rng(3)
    t_j, t_m = rng.normal(size=50), rng.normal(size=70)
    base = dv_value(t_j, t_m)
    for c in (-5.0, 0.1, 12.0):
        assert dv_value(t_j + c, t_m + c) == pytest.approx(base, abs=1e-9)


def test_dv_value_rejects_bad_input():
    with pytest.raises(EstimationError):
        dv_value([], [1.0])
    with pytest.raises(EstimationError):
        dv_value([1.0, np.nan], [1.0])


def test_smile_equals_dv_when_clamp_inactive():
    rng = make_rng(4)
    t_j, t_m = rng.normal(size=40), rng.normal(size=40)
    assert smile_value(t_j, t_m, tau=50.0) == pytest.approx(dv_value(t_j, t_m), abs=1e-12)


def test_smile_clamps_partition_scores():
    t_j = np.zeros(4)
    t_m = np.array([0.0, 100.0, -100.0, 1.0])
    clipped = np.clip(t_m, -5.0, 5.0)
    assert smile_value(t_j, t_m, 5.0) == pytest.approx(dv_value(t_j, clipped), abs=1e-12)


def test_enumeration_weights_recover_exact_kl():
    """With log-ratio scores and distribution weights the bound is tight.

    Scores over every cell of a discrete joint, weighted by the joint and
    the product of marginals, collapse the bound to the exact divergence.
    """
    rng = make_rng(11)
    joint = rng.uniform(0.05, 1.0, size=(4, 3))
    joint /= joint.sum()
    p_a = joint.sum(axis=1)
    p_b = joint.sum(axis=0)
    prod = np.outer(p_a, p_b)

    kl_direct = float(np.sum(joint * np.log(joint / prod)))
    scores = np.log(joint / prod).ravel()
    value = dv_value(scores, scores,
                     joint_weights=joint.ravel(),
                     marginal_weights=prod.ravel())
    assert value == pytest.approx(kl_direct, abs=1e-12)


def test_smile_score_grads_match_finite_differences():
    rng = make_rng(8)
    t_j, t_m = rng.normal(size=6), rng.normal(scale=3.0, size=6)
    tau = 2.0
    g_j, g_m = smile_score_grads(t_j, t_m, tau)
    h = 1e-7
    for i in range(6):
        up, down = t_j.copy(), t_j.copy()
        up[i] += h
        down[i] -= h
        num = (smile_value(up, t_m, tau) - smile_value(down, t_m, tau)) / (2 * h)
        assert num == pytest.approx(g_j[i], abs=1e-6)
    for i in range(6):
        up, down = t_m.copy(), t_m.copy()
        up[i] += h
        down[i] -= h
        num = (smile_value(t_j, up, tau) - smile_value(t_j, down, tau)) / (2 * h)
        assert num == pytest.approx(g_m[i], abs=1e-6)


def test_shuffle_marginal_permutes_rows():
    b = np.arange(20.0).reshape(10, 2)
    shuffled = shuffle_marginal(np.zeros((10, 1)), b, seed=5)
    assert not np.array_equal(shuffled, b)
    assert sorted(shuffled[:, 0].tolist()) == sorted(b[:, 0].tolist())
    np.testing.assert_array_equal(shuffled, shuffle_marginal(np.zeros((10, 1)), b, seed=5))


def test_marginal_blocks_share_one_permutation():
    rng = make_rng(9)
    a = np.arange(8.0).reshape(8, 1)
    b = np.arange(8.0, 16.0).reshape(8, 1)
    c = np.arange(16.0, 24.0).reshape(8, 1)
    (a2, b2, c2), perm = make_marginal_blocks([a, b, c], rng)
    np.testing.assert_array_equal(a2, a)  # first block anchors the joint side
    np.testing.assert_array_equal(b2, b[perm])
    np.testing.assert_array_equal(c2, c[perm])


def test_critic_training_tightens_bound():
    x, y = correlated_pair(0.8, 4000, seed=21)
    critic = make_critic([("y", 1), ("x", 1)], hidden=(64, 64), seed=2)
    opt = OptimizerState(kind="adam", learning_rate=5e-4)
    rng = make_rng(33)
    start = None
    value = 0.0
    for _ in range(300):
        idx = rng.choice(4000, size=256, replace=False)
        joint = [y[idx], x[idx]]
        marginal, _ = make_marginal_blocks(joint, rng)
        value = critic_train_step(critic, joint, marginal, opt, tau=5.0)
        if start is None:
            start = value
    exact = gaussian_mi_nats(0.8)
    assert value > start
    assert value > 0.5 * exact


def test_ksg_independent_near_zero():
    x, y = correlated_pair(0.0, 1500, seed=1)
    assert abs(ksg_mi(x, y).value_nats) < 0.05


def test_ksg_correlated_matches_closed_form():
    x, y = correlated_pair(0.6, 2000, seed=2)
    assert ksg_mi(x, y).value_nats == pytest.approx(gaussian_mi_nats(0.6), abs=0.08)


def test_ksg_handles_duplicate_rows():
    # heavy ties would break neighbour counts without the jitter
    rng = make_rng(6)
    x = rng.integers(0, 3, size=(400, 1)).astype(float)
    y = x + rng.integers(0, 2, size=(400, 1))
    est = ksg_mi(x, y)
    assert np.isfinite(est.value_nats)
    assert est.value_nats > 0.3


def test_ksg_deterministic():
    x, y = correlated_pair(0.5, 500, seed=7)
    assert ksg_mi(x, y).value_nats == ksg_mi(x, y).value_nats


def test_ksg_rejects_bad_k():
    x, y = correlated_pair(0.5, 10, seed=0)
    with pytest.raises(EstimationError):
        ksg_mi(x, y, OracleConfig(ksg_neighbors=10))


def test_plugin_entropy_fair_coin():
    v = np.array([0.0, 1.0] * 500)
    est = plugin_entropy(v, OracleConfig(plugin_bins=2))
    assert est.value_bits == pytest.approx(1.0, abs=1e-12)


def test_plugin_entropy_uniform_four_levels():
    v = np.repeat([0.0, 1.0, 2.0, 3.0], 25)
    est = plugin_entropy(v, OracleConfig(plugin_bins=4))
    assert est.value_bits == pytest.approx(2.0, abs=1e-12)


def test_plugin_entropy_matches_brute_force():
    rng = make_rng(13)
    v = rng.normal(size=2000)
    bins = 32
    counts, _ = np.histogram(v, bins=bins, range=(v.min(), v.max()))
    p = counts[counts > 0] / v.size
    expected = -np.sum(p * np.log2(p))
    est = plugin_entropy(v, OracleConfig(plugin_bins=bins))
    assert est.value_bits == pytest.approx(expected, abs=1e-12)


def test_plugin_entropy_constant_is_zero():
    assert plugin_entropy(np.full(100, 3.5)).value_bits == 0.0


def test_gaussian_mi_reference_values():
    assert gaussian_mi_nats(0.0) == 0.0
    assert gaussian_mi_nats(0.9) == pytest.approx(-0.5 * np.log(1 - 0.81), abs=1e-15)
    with pytest.raises(EstimationError):
        gaussian_mi_nats(1.0)


def test_estimate_units():
    x, y = correlated_pair(0.6, 300, seed=4)
    est = ksg_mi(x, y)
    assert est.value_bits == pytest.approx(est.value_nats / np.log(2), abs=1e-15)
    assert est.estimator == "ksg"
    assert est.batch_size == 300
