import numpy as np
import pytest

from fusionlab import fusion, matrices, optimize as opt
from fusionlab.optimize import (
    BASELINE,
    ExpectationEntropy,
    OptimizerConfig,
    ThresholdProbability,
    cost_expectation,
    cost_threshold,
    expectation_entropy,
    random_scatter,
    sweep,
    threshold_probability,
)


TINY = OptimizerConfig(restarts=2, init_samples=4, iterations=30, master_seed=7)
SMALL = OptimizerConfig(restarts=3, init_samples=16, iterations=60, master_seed=1)


# ---------------------------------------------------------------------------
# objective functions


def test_expectation_entropy_landmarks():
    assert expectation_entropy(matrices.builtin("pbs2")) == pytest.approx(0.5, abs=1e-12)
    assert expectation_entropy(matrices.builtin("theorem7")) == pytest.approx(0.5, abs=1e-12)
    assert expectation_entropy(matrices.builtin("identity")) == pytest.approx(0.0, abs=1e-12)
    assert expectation_entropy(matrices.builtin("blockpair")) == pytest.approx(0.0, abs=1e-9)


def test_threshold_probability_landmarks():
    pbs2 = matrices.builtin("pbs2")
    # four maximally entangled outcomes at 1/8 each
    assert threshold_probability(pbs2, 1.0) == 0.5
    assert threshold_probability(pbs2, 0.3) == 0.5
    # at s = 0 every outcome counts, including the same-channel ones
    assert threshold_probability(pbs2, 0.0) == 1.0
    ident = matrices.builtin("identity")
    assert threshold_probability(ident, 0.5) == 0.0
    assert threshold_probability(ident, 0.0) == 1.0
    assert threshold_probability(matrices.builtin("blockpair"), 1e-6) == pytest.approx(
        0.0, abs=1e-12
    )


def test_threshold_probability_batch():
    mats = np.stack([matrices.builtin("pbs2"), matrices.builtin("identity")])
    out = threshold_probability(mats, 0.9)
    assert out.shape == (2,)
    assert out == pytest.approx([0.5, 0.0], abs=1e-12)


def test_cost_expectation_value():
    pbs2 = matrices.builtin("pbs2")
    # on-target: cost = baseline - <S>
    assert cost_expectation(pbs2, 0.5) == pytest.approx(BASELINE - 0.5, abs=1e-12)
    # off-target: quadratic penalty alpha (p - p_target)^2
    assert cost_expectation(pbs2, 0.6, alpha=3.0) == pytest.approx(
        3.0 * 0.01 + BASELINE - 0.5, abs=1e-12
    )


def test_cost_threshold_value():
    # at tau -> 0 the logistic sits at 1/2 exactly on the knife edge
    assert cost_threshold(matrices.builtin("pbs2"), 1.0, 1e-6) == pytest.approx(
        -0.25, abs=1e-15
    )
    with pytest.raises(ValueError):
        cost_threshold(matrices.builtin("pbs2"), 1.0, 0.0)


def test_objective_validation():
    with pytest.raises(ValueError):
        ExpectationEntropy(p_target=0.4)
    with pytest.raises(ValueError):
        ExpectationEntropy(p_target=1.2)
    with pytest.raises(ValueError):
        ThresholdProbability(s_target_bits=-0.1)
    with pytest.raises(ValueError):
        ThresholdProbability(s_target_bits=1.5)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(iterations=0)
    with pytest.raises(ValueError):
        OptimizerConfig(step=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(fd_epsilon=-1e-5)
    with pytest.raises(ValueError):
        OptimizerConfig(anneal_schedule=())


def test_optimize_rejects_unknown_objective():
    with pytest.raises(TypeError):
        opt.optimize(object(), TINY)


# ---------------------------------------------------------------------------
# descent runs (tiny configurations keep these fast)


def test_determinism():
    obj = ThresholdProbability(s_target_bits=0.7)
    a = opt.optimize(obj, TINY)
    b = opt.optimize(obj, TINY)
    assert np.array_equal(a.best_matrix, b.best_matrix)
    assert a.trace == b.trace
    assert a.restart_values == b.restart_values
    assert a.hard_value == b.hard_value


def test_result_bookkeeping():
    res = opt.optimize(ThresholdProbability(s_target_bits=0.4), TINY)
    assert res.kind == "threshold"
    assert res.target == 0.4
    assert res.seed == TINY.master_seed
    assert len(res.trace) == TINY.iterations
    assert len(res.restart_values) == TINY.restarts
    assert res.hard_value == pytest.approx(
        threshold_probability(res.best_matrix, 0.4), abs=1e-12
    )
    # the merged builtin pool bounds the result from below
    assert res.hard_value >= 0.5 - 1e-12


def test_threshold_knife_edge_prefers_exact_builtin():
    """At s = 1 descent lands epsilon below the dyadic edge; the exact
    builtin must win the final ranking."""
    res = opt.optimize(ThresholdProbability(s_target_bits=1.0), SMALL)
    assert res.from_builtin in ("pbs2", "theorem7")
    assert res.hard_value == 0.5
    assert res.states_used == 4
    assert res.p_total == pytest.approx(0.5, abs=1e-12)


def test_threshold_at_zero_is_certain():
    res = opt.optimize(ThresholdProbability(s_target_bits=0.0), TINY)
    assert res.hard_value == 1.0


def test_expectation_knife_edge_prefers_exact_builtin():
    res = opt.optimize(ExpectationEntropy(p_target=0.5), SMALL)
    assert res.from_builtin in ("pbs2", "theorem7")
    assert res.hard_value == pytest.approx(0.5, abs=1e-12)
    assert res.feasible
    assert res.p_total == pytest.approx(0.5, abs=1e-12)


def test_expectation_feasibility_band():
    res = opt.optimize(ExpectationEntropy(p_target=0.75), SMALL)
    assert res.kind == "expectation"
    if res.feasible:
        assert abs(res.p_total - 0.75) <= opt.FEASIBLE_BAND + 1e-12
    assert res.hard_value == pytest.approx(
        expectation_entropy(res.best_matrix), abs=1e-12
    )


def test_warm_start_accepted_and_deterministic():
    warm = np.stack([matrices.params_from_matrix(matrices.builtin("pbs2"))])
    obj = ThresholdProbability(s_target_bits=0.9)
    a = opt.optimize(obj, TINY, warm_start=warm)
    b = opt.optimize(obj, TINY, warm_start=warm)
    assert np.array_equal(a.best_matrix, b.best_matrix)
    assert a.hard_value >= 0.5 - 1e-12


# ---------------------------------------------------------------------------
# sweeps and the random landscape


def test_sweep_validates_kind():
    with pytest.raises(ValueError):
        sweep("entropy", [0.5], TINY)


def test_threshold_sweep_monotone_and_ordered():
    targets = [0.5, 1.0, 0.0]  # deliberately unsorted
    rows = sweep("threshold", targets, TINY)
    assert [r["target"] for r in rows] == targets
    by_target = {r["target"]: r for r in rows}
    assert by_target[0.0]["hard_value"] == 1.0
    assert (
        by_target[0.0]["hard_value"]
        >= by_target[0.5]["hard_value"]
        >= by_target[1.0]["hard_value"]
    )
    # targets are processed strictest first; seeds step with processing order
    assert by_target[1.0]["seed"] == TINY.master_seed
    assert by_target[0.5]["seed"] == TINY.master_seed + 7919
    assert by_target[0.0]["seed"] == TINY.master_seed + 2 * 7919


def test_sweep_row_schema():
    rows = sweep("expectation", [0.5], TINY)
    row = rows[0]
    assert set(row) == {
        "target",
        "hard_value",
        "mean_value",
        "states_used",
        "seed",
        "iterations",
        "p_total",
        "feasible",
        "result",
    }
    assert row["iterations"] == TINY.iterations
    assert row["mean_value"] == pytest.approx(
        np.mean(row["result"].restart_values), abs=1e-12
    )


def test_random_scatter_expectation():
    rows, summary = random_scatter(64, seed=3)
    assert len(rows) == 64
    p = np.array([r[0] for r in rows])
    s = np.array([r[1] for r in rows])
    assert np.all(p >= 0.5 - 1e-12) and np.all(p <= 1.0 + 1e-12)
    assert np.all(s >= -1e-12) and np.all(s <= 1.0 + 1e-12)
    assert summary["n"] == 64
    assert summary["S_exp_mean"] == pytest.approx(np.mean(s), abs=1e-12)
    assert summary["p_total_std"] == pytest.approx(np.std(p), abs=1e-12)


def test_random_scatter_threshold():
    rows, summary = random_scatter(16, seed=5, mode="threshold", s_targets=[0.2, 0.8])
    assert len(rows) == 32
    stats = summary["targets"]
    assert set(stats) == {0.2, 0.8}
    p02 = [v for (s, v) in rows if s == 0.2]
    assert stats[0.2]["P_max"] == pytest.approx(max(p02), abs=1e-12)
    # tighter thresholds admit at most the looser ones' probability
    assert stats[0.8]["P_mean"] <= stats[0.2]["P_mean"] + 1e-12


def test_random_scatter_validation():
    with pytest.raises(ValueError):
        random_scatter(0, seed=1)
    with pytest.raises(ValueError):
        random_scatter(4, seed=1, mode="scan")


def test_random_scatter_matches_direct_evaluation():
    rows, _ = random_scatter(8, seed=11)
    u = matrices.haar_sample(np.random.default_rng(11), size=8)
    assert rows[0][1] == pytest.approx(expectation_entropy(u[0]), abs=1e-12)
    assert rows[0][0] == pytest.approx(fusion.total_relevant_probability(u[0]), abs=1e-12)
