"""Optimization of fusion matrices for the two entanglement objectives.

Expectation mode maximizes the probability-weighted entanglement entropy
<S> = sum p_ij S_ij at a pinned total success probability; threshold mode
maximizes P(s) = sum of probabilities of outcomes whose entropy reaches a
target s.  Both run momentum gradient descent with central finite differences
in the 16-dimensional exp(iH) parameterization, restarted from the best of a
Haar-scored candidate pool; all restarts advance together as one numpy batch.

P(s) is a sum of indicator terms, so its descent runs on a logistic-smoothed
surrogate with the temperature annealed downward; reported values are always
the hard objective, recomputed from the winning matrix.  The probability
constraint in expectation mode starts as the quadratic penalty
alpha (p - p_target)^2 and, for the final two thirds of the iterations,
switches to an exact L1 penalty beta |p - p_target| with beta = 2: the
frontier's slope is about -1, so the quadratic equilibrium undershoots the
target by ~ alpha^-1 step sizes while the L1 penalty pins it.

Known exact optima (the builtin matrices) join the candidate pool of every
run.  They matter at the boundaries: descent approaches the s = 1 optimum
through matrices with determinant 1/4 - O(1e-10) whose entropy rounds below
1, while the builtins sit on the dyadic knife edge exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import entanglement, fusion, matrices

__all__ = [
    "BASELINE",
    "ExpectationEntropy",
    "ThresholdProbability",
    "OptimizerConfig",
    "OptResult",
    "expectation_entropy",
    "threshold_probability",
    "cost_expectation",
    "cost_threshold",
    "optimize",
    "sweep",
    "random_scatter",
]

BASELINE = 2.0          # additive constant keeping the expectation cost positive
FEASIBLE_BAND = 0.005   # |p_total - p_target| accepted as on-target
L1_BETA = 2.0           # exact-penalty weight, > the frontier slope
MOMENTUM = 0.9
STATES_P_FLOOR = 1e-6


@dataclass(frozen=True)
class ExpectationEntropy:
    """Maximize <S> subject to total relevant probability ~ p_target."""

    p_target: float
    alpha: float = 1.0

    def __post_init__(self):
        if not 0.5 - 1e-12 <= self.p_target <= 1.0 + 1e-12:
            raise ValueError(f"p_target must lie in [0.5, 1], got {self.p_target}")


@dataclass(frozen=True)
class ThresholdProbability:
    """Maximize the total probability of outcomes with S >= s_target."""

    s_target_bits: float
    smoothing_tau: float | None = None  # None: use the config anneal schedule

    def __post_init__(self):
        if not 0.0 <= self.s_target_bits <= 1.0:
            raise ValueError(
                f"s_target must lie in [0, 1] bits, got {self.s_target_bits}"
            )


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 20
    init_samples: int = 100
    iterations: int = 1000
    step: float = 1e-3
    fd_epsilon: float = 1e-5
    master_seed: int = 0
    anneal_schedule: tuple[float, ...] = (0.1, 0.01, 0.001)

    def __post_init__(self):
        if min(self.restarts, self.init_samples, self.iterations) < 1:
            raise ValueError("restarts, init_samples and iterations must be >= 1")
        if self.step <= 0 or self.fd_epsilon <= 0:
            raise ValueError("step and fd_epsilon must be positive")
        if not self.anneal_schedule:
            raise ValueError("anneal schedule must not be empty")


@dataclass(frozen=True)
class OptResult:
    """Outcome of one optimization run.

    `hard_value` is the unsmoothed objective (<S> or P) recomputed from
    `best_matrix`; `objective_value` is the optimizer-internal cost at the same
    point.  `restart_values` holds each restart's final hard value (builtin
    candidates excluded), `trace` the per-iteration hard value of the winning
    restart.
    """

    best_matrix: np.ndarray
    objective_value: float
    hard_value: float
    trace: tuple[float, ...]
    states_used: int
    restart_values: tuple[float, ...]
    p_total: float
    feasible: bool
    target: float
    kind: str
    seed: int
    from_builtin: str | None = None


# ---------------------------------------------------------------------------
# objectives


def expectation_entropy(matrix):
    """<S> in bits: probability-weighted entropy over the six relevant outcomes."""
    u = np.asarray(matrix, dtype=complex)
    s = entanglement.entropies_from_matrix(u)
    p = fusion.relevant_probabilities(u)
    out = np.sum(p * s, axis=-1)
    return float(out) if u.ndim == 2 else out


def threshold_probability(matrix, s_target_bits: float):
    """Total probability of outcomes whose entropy reaches the target.

    All ten outcomes count; the four same-channel product outcomes carry
    S = 0 and therefore enter only at s_target <= 0 (where P = 1).
    """
    u = np.asarray(matrix, dtype=complex)
    s = entanglement.entropies_from_matrix(u)
    p_rel = fusion.relevant_probabilities(u)
    total = np.sum(np.where(s >= s_target_bits, p_rel, 0.0), axis=-1)
    if s_target_bits <= 0.0:
        total = total + np.sum(fusion.diag_probabilities(u), axis=-1)
    total = np.clip(total, 0.0, 1.0)
    return float(total) if u.ndim == 2 else total


def cost_expectation(matrix, p_target: float, alpha: float = 1.0):
    u = np.asarray(matrix, dtype=complex)
    gap = fusion.total_relevant_probability(u) - p_target
    out = alpha * gap**2 - expectation_entropy(u) + BASELINE
    return float(out) if u.ndim == 2 else out


def cost_threshold(matrix, s_target_bits: float, tau: float):
    """Logistic-smoothed negative of threshold_probability."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    u = np.asarray(matrix, dtype=complex)
    s = entanglement.entropies_from_matrix(u)
    p_rel = fusion.relevant_probabilities(u)
    p_diag = fusion.diag_probabilities(u)
    sig_rel = _logistic((s - s_target_bits) / tau)
    sig_diag = _logistic((0.0 - s_target_bits) / tau)
    out = -(np.sum(p_rel * sig_rel, axis=-1) + sig_diag * np.sum(p_diag, axis=-1))
    return float(out) if u.ndim == 2 else out


def _logistic(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -500.0, 500.0)))


def _states_used(matrix, s_ref: float) -> int:
    s = entanglement.entropies_from_matrix(matrix)
    p = fusion.relevant_probabilities(matrix)
    return int(np.sum((p > STATES_P_FLOOR) & (s >= s_ref - 1e-9)))


# ---------------------------------------------------------------------------
# descent engine


def _fd_points(theta: np.ndarray, eps: float) -> np.ndarray:
    """(R, 16) -> (R, 33, 16): +eps/-eps along each coordinate plus the center."""
    eye = np.eye(16)
    offsets = np.concatenate([eye * eps, -eye * eps, np.zeros((1, 16))])
    return theta[:, None, :] + offsets[None, :, :]


def _eval_S_p(theta_pts: np.ndarray):
    u = matrices.from_params(theta_pts)
    s = entanglement.entropies_from_matrix(u)
    p_rel = fusion.relevant_probabilities(u)
    return np.sum(p_rel * s, axis=-1), np.sum(p_rel, axis=-1)


def _init_pool(rng, cfg: OptimizerConfig, warm_start) -> np.ndarray:
    """(R, n_candidates, 16) parameter draws, warm starts joined to every restart."""
    cand = matrices.random_params(rng, size=(cfg.restarts, cfg.init_samples))
    if warm_start is not None and len(warm_start):
        warm = np.broadcast_to(
            np.asarray(warm_start, dtype=float)[None, :, :],
            (cfg.restarts, len(warm_start), 16),
        )
        cand = np.concatenate([cand, warm], axis=1)
    return cand


def _builtin_candidates():
    names = list(matrices.BUILTIN_NAMES)
    return names, np.stack([matrices.builtin(nm) for nm in names])


def _optimize_expectation(
    obj: ExpectationEntropy, cfg: OptimizerConfig, warm_start=None
) -> OptResult:
    rng = np.random.default_rng(cfg.master_seed)
    R = cfg.restarts
    cand = _init_pool(rng, cfg, warm_start)
    S0, p0 = _eval_S_p(cand.reshape(-1, 16))
    score0 = (S0 - L1_BETA * np.abs(p0 - obj.p_target)).reshape(R, -1)
    theta = cand[np.arange(R), np.argmax(score0, axis=1)]
    vel = np.zeros_like(theta)

    best_feas_S = np.full(R, -np.inf)
    best_feas_theta = theta.copy()
    best_gap = np.full(R, np.inf)
    best_gap_theta = theta.copy()
    trace = np.zeros((cfg.iterations, R))

    phase_a = cfg.iterations // 3
    for it in range(cfg.iterations):
        S, p = _eval_S_p(_fd_points(theta, cfg.fd_epsilon).reshape(-1, 16))
        S = S.reshape(R, 33)
        p = p.reshape(R, 33)
        gS = (S[:, :16] - S[:, 16:32]) / (2 * cfg.fd_epsilon)
        gp = (p[:, :16] - p[:, 16:32]) / (2 * cfg.fd_epsilon)
        S_c, p_c = S[:, 32], p[:, 32]
        trace[it] = S_c

        feas = np.abs(p_c - obj.p_target) <= FEASIBLE_BAND
        upd = feas & (S_c > best_feas_S)
        best_feas_S = np.where(upd, S_c, best_feas_S)
        best_feas_theta[upd] = theta[upd]
        gap = np.abs(p_c - obj.p_target)
        updg = gap < best_gap
        best_gap = np.where(updg, gap, best_gap)
        best_gap_theta[updg] = theta[updg]

        if it == phase_a:
            vel[:] = 0.0  # fresh momentum for the exact-penalty phase
        if it < phase_a:
            grad = 2.0 * obj.alpha * (p_c - obj.p_target)[:, None] * gp - gS
        else:
            grad = L1_BETA * np.sign(p_c - obj.p_target)[:, None] * gp - gS
        vel = MOMENTUM * vel - cfg.step * grad
        theta = theta + vel

    have = best_feas_S > -np.inf
    finals = np.where(have[:, None], best_feas_theta, best_gap_theta)
    S_f, p_f = _eval_S_p(finals)
    restart_values = tuple(float(v) for v in S_f)

    # merge the exact builtin candidates
    names, mats = _builtin_candidates()
    S_b, p_b = _eval_S_p_from_matrices(mats)
    feas_b = np.abs(p_b - obj.p_target) <= FEASIBLE_BAND

    cand_S = np.concatenate([S_b, S_f])
    cand_p = np.concatenate([p_b, p_f])
    cand_feas = np.concatenate([feas_b, have])
    if cand_feas.any():
        masked = np.where(cand_feas, cand_S, -np.inf)
        pick = int(np.argmax(masked))
        # prefer an exact builtin over a descent point ahead by only float noise
        if pick >= len(names) and feas_b.any():
            best_b = int(np.argmax(np.where(feas_b, S_b, -np.inf)))
            if masked[pick] - S_b[best_b] <= 1e-9:
                pick = best_b
    else:
        pick = int(np.argmin(np.abs(cand_p - obj.p_target)))
    if pick < len(names):
        best_matrix = mats[pick]
        builtin_name = names[pick]
        winner_restart = int(np.argmax(np.where(have, S_f, -np.inf))) if have.any() else 0
    else:
        r = pick - len(names)
        best_matrix = matrices.from_params(finals[r])
        builtin_name = None
        winner_restart = r

    hard = float(cand_S[pick])
    return OptResult(
        best_matrix=best_matrix,
        objective_value=float(cost_expectation(best_matrix, obj.p_target, obj.alpha)),
        hard_value=hard,
        trace=tuple(float(v) for v in trace[:, winner_restart]),
        states_used=_states_used(best_matrix, 2e-9),
        restart_values=restart_values,
        p_total=float(cand_p[pick]),
        feasible=bool(cand_feas[pick]),
        target=obj.p_target,
        kind="expectation",
        seed=cfg.master_seed,
        from_builtin=builtin_name,
    )


def _eval_S_p_from_matrices(mats: np.ndarray):
    s = entanglement.entropies_from_matrix(mats)
    p_rel = fusion.relevant_probabilities(mats)
    return np.sum(p_rel * s, axis=-1), np.sum(p_rel, axis=-1)


def _threshold_eval(u: np.ndarray, s_target: float, tau: float):
    """Smoothed and hard threshold sums from one shared matrix batch."""
    s = entanglement.entropies_from_matrix(u)
    p_rel = fusion.relevant_probabilities(u)
    smooth = np.sum(p_rel * _logistic((s - s_target) / tau), axis=-1)
    hard = np.sum(np.where(s >= s_target, p_rel, 0.0), axis=-1)
    if s_target <= 0.0:
        p_diag = np.sum(fusion.diag_probabilities(u), axis=-1)
        smooth = smooth + _logistic(-s_target / tau) * p_diag
        hard = np.clip(hard + p_diag, 0.0, 1.0)
    return smooth, hard


def _optimize_threshold(
    obj: ThresholdProbability, cfg: OptimizerConfig, warm_start=None
) -> OptResult:
    rng = np.random.default_rng(cfg.master_seed)
    R = cfg.restarts
    s_target = obj.s_target_bits
    taus = (
        (obj.smoothing_tau,) if obj.smoothing_tau is not None else cfg.anneal_schedule
    )

    cand = _init_pool(rng, cfg, warm_start)
    _, P0 = _threshold_eval(matrices.from_params(cand.reshape(-1, 16)), s_target, taus[0])
    P0 = P0.reshape(R, -1)
    theta = cand[np.arange(R), np.argmax(P0, axis=1)]
    vel = np.zeros_like(theta)
    best_hard = P0.max(axis=1)
    best_theta = theta.copy()
    trace = np.zeros((cfg.iterations, R))

    seg = max(cfg.iterations // len(taus), 1)
    for it in range(cfg.iterations):
        tau = taus[min(it // seg, len(taus) - 1)]
        u = matrices.from_params(_fd_points(theta, cfg.fd_epsilon).reshape(-1, 16))
        smooth, hard = _threshold_eval(u, s_target, tau)
        smooth = smooth.reshape(R, 33)
        hard = hard.reshape(R, 33)
        grad = -(smooth[:, :16] - smooth[:, 16:32]) / (2 * cfg.fd_epsilon)
        hard_c = hard[:, 32]
        trace[it] = hard_c
        upd = hard_c > best_hard
        best_hard = np.where(upd, hard_c, best_hard)
        best_theta[upd] = theta[upd]
        vel = MOMENTUM * vel - cfg.step * grad
        theta = theta + vel
    # the post-step endpoints were never scored inside the loop
    _, hard_end = _threshold_eval(matrices.from_params(theta), s_target, taus[-1])
    upd = hard_end > best_hard
    best_hard = np.where(upd, hard_end, best_hard)
    best_theta[upd] = theta[upd]

    restart_values = tuple(float(v) for v in best_hard)

    names, mats = _builtin_candidates()
    _, P_b = _threshold_eval(mats, s_target, taus[-1])
    cand_P = np.concatenate([P_b, best_hard])
    pick = int(np.argmax(cand_P))
    # prefer an exact builtin over a descent point it beats only by float noise
    if pick >= len(names) and cand_P[pick] - P_b.max() <= 1e-9:
        pick = int(np.argmax(P_b))
    if pick < len(names):
        best_matrix = mats[pick]
        builtin_name = names[pick]
        winner_restart = int(np.argmax(best_hard))
    else:
        r = pick - len(names)
        best_matrix = matrices.from_params(best_theta[r])
        builtin_name = None
        winner_restart = r

    return OptResult(
        best_matrix=best_matrix,
        objective_value=float(cost_threshold(best_matrix, s_target, taus[-1])),
        hard_value=float(cand_P[pick]),
        trace=tuple(float(v) for v in trace[:, winner_restart]),
        states_used=_states_used(best_matrix, s_target),
        restart_values=restart_values,
        p_total=float(fusion.total_relevant_probability(best_matrix)),
        feasible=True,
        target=s_target,
        kind="threshold",
        seed=cfg.master_seed,
        from_builtin=builtin_name,
    )


def optimize(objective, config: OptimizerConfig | None = None, warm_start=None) -> OptResult:
    """Run the full restart descent for one objective.

    Deterministic for a given config: every random draw derives from
    `master_seed`, restarts advance in one batch, and ties in the final
    ranking resolve to the earliest candidate.  `warm_start` optionally adds
    parameter vectors (k, 16) to every restart's scored candidate pool.
    """
    cfg = config if config is not None else OptimizerConfig()
    warm = None if warm_start is None else np.asarray(warm_start, float)
    if isinstance(objective, ExpectationEntropy):
        return _optimize_expectation(objective, cfg, warm)
    if isinstance(objective, ThresholdProbability):
        return _optimize_threshold(objective, cfg, warm)
    raise TypeError(f"unknown objective {objective!r}")


def sweep(
    kind: str, targets, config: OptimizerConfig | None = None, alpha: float = 1.0
) -> list[dict]:
    """One optimization per target with warm starts chained between targets.

    Targets are processed strictest first (largest s or largest p): any matrix
    found at a stricter target stays in the candidate pool of the looser ones.
    For thresholds this makes the reported P(s) weakly decreasing by
    construction; for expectations the chain hands each run a frontier point
    just above its target, from which descent gains entropy while relaxing the
    probability, so the reported <S>(p) curve stays tight against the frontier
    instead of scattering into local optima.  Rows come back in the order the
    targets were given.
    """
    if kind not in ("expectation", "threshold"):
        raise ValueError(f"sweep kind must be expectation or threshold, got {kind!r}")
    cfg = config if config is not None else OptimizerConfig()
    targets = [float(t) for t in targets]
    order = sorted(range(len(targets)), key=lambda k: -targets[k])
    rows: list[dict | None] = [None] * len(targets)
    warm: list[np.ndarray] = []
    for step_idx, k in enumerate(order):
        tgt = targets[k]
        seed_k = cfg.master_seed + 7919 * step_idx
        cfg_k = OptimizerConfig(
            restarts=cfg.restarts,
            init_samples=cfg.init_samples,
            iterations=cfg.iterations,
            step=cfg.step,
            fd_epsilon=cfg.fd_epsilon,
            master_seed=seed_k,
            anneal_schedule=cfg.anneal_schedule,
        )
        obj = (
            ExpectationEntropy(p_target=tgt, alpha=alpha)
            if kind == "expectation"
            else ThresholdProbability(s_target_bits=tgt)
        )
        res = optimize(obj, cfg_k, warm_start=np.stack(warm) if warm else None)
        warm.append(matrices.params_from_matrix(res.best_matrix))
        mean_val = float(np.mean(res.restart_values))
        rows[k] = {
            "target": tgt,
            "hard_value": res.hard_value,
            "mean_value": mean_val,
            "states_used": res.states_used,
            "seed": seed_k,
            "iterations": cfg.iterations,
            "p_total": res.p_total,
            "feasible": res.feasible,
            "result": res,
        }
    return [r for r in rows if r is not None]


def random_scatter(n: int, seed: int, mode: str = "expectation", s_targets=None):
    """Haar-sample n matrices and tabulate the objective landscape.

    Returns (rows, summary): expectation rows are (p_total, S_exp); threshold
    rows are (s_target, P) for every sample and target.  The summary carries
    means and standard deviations for plotting reference bands.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    u = matrices.haar_sample(rng, size=n)
    if mode == "expectation":
        s_exp, p_tot = _eval_S_p_from_matrices(u)
        rows = [(float(p), float(s)) for p, s in zip(p_tot, s_exp)]
        summary = {
            "n": n,
            "S_exp_mean": float(np.mean(s_exp)),
            "S_exp_std": float(np.std(s_exp)),
            "p_total_mean": float(np.mean(p_tot)),
            "p_total_std": float(np.std(p_tot)),
        }
        return rows, summary
    if mode == "threshold":
        if s_targets is None:
            s_targets = [k / 10 for k in range(11)]
        rows = []
        summary = {"n": n, "targets": {}}
        for s in s_targets:
            P = threshold_probability(u, float(s))
            rows.extend((float(s), float(v)) for v in P)
            summary["targets"][float(s)] = {
                "P_mean": float(np.mean(P)),
                "P_std": float(np.std(P)),
                "P_max": float(np.max(P)),
            }
        return rows, summary
    raise ValueError(f"mode must be expectation or threshold, got {mode!r}")
