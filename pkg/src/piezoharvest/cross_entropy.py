"""Cross-entropy optimizer over a box-bounded design space.

Each level draws samples from a truncated Gaussian, keeps an elite subset of
the best-scoring designs, refits the Gaussian by maximum likelihood and
blends the new hyper-parameters with the previous ones (dynamic smoothing on
the standard deviation to avoid premature collapse). The search stops when
the largest component of the smoothed standard deviation falls below a
tolerance, or at the level cap.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

from piezoharvest.objective import DesignSpace, Evaluation
from piezoharvest.parallel import evaluate_many

__all__ = [
    "default_elite",
    "CEConfig",
    "LevelRecord",
    "OptimizationResult",
    "sample_truncated_gaussian",
    "select_elite",
    "mle_update",
    "smooth_update",
    "optimize",
    "write_trace_csv",
]

#: Below this truncated-probability mass, rejection sampling is considered
#: stalled and the sampler falls back to inverse-CDF truncation.
REJECTION_STALL_MASS = 1e-6


def default_elite(n_samples: int) -> int:
    """Default elite count: one tenth of the samples, half rounded up.

    Half-away-from-zero rounding, so n_samples = 25 gives 3 (Python's
    built-in round would give 2 and make the elite fit degenerate).
    """
    return max(1, int(n_samples / 10 + 0.5))


@dataclass(frozen=True)
class CEConfig:
    """Control parameters of the cross-entropy search."""

    n_samples: int = 50
    n_elite: int = 5
    max_levels: int = 100
    tol: float = 1e-3
    smooth_alpha: float = 0.7
    smooth_beta: float = 0.8
    smooth_q: float = 5.0
    seed: int | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.n_elite < self.n_samples:
            raise ValueError("need 1 <= n_elite < n_samples")
        if self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if not 0 < self.smooth_alpha <= 1:
            raise ValueError("smooth_alpha must be in (0, 1]")
        if not 0.8 <= self.smooth_beta <= 0.99:
            raise ValueError("smooth_beta must be in [0.8, 0.99]")
        if not 5 <= self.smooth_q <= 10:
            raise ValueError("smooth_q must be in [5, 10]")


@dataclass(frozen=True)
class LevelRecord:
    """Per-level snapshot: best sample of the level and the smoothed moments."""

    level: int
    power: float
    k: float
    penalized: float
    gamma_hat: float
    mu: np.ndarray
    sigma: np.ndarray


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a search: optimum, bookkeeping and the level trace."""

    x_star: np.ndarray
    s_star: float
    power_star: float
    k_star: float
    feasible: bool
    levels_used: int
    evaluations_used: int
    converged: bool
    trace: tuple[LevelRecord, ...] = field(default_factory=tuple)


def sample_truncated_gaussian(
    mu: np.ndarray,
    sigma: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw n design vectors from a componentwise truncated Gaussian.

    Components with zero spread collapse to the bound-clamped mean. Sampling
    is by rejection; when the in-box probability mass is vanishingly small
    the sampler switches to inverse-CDF truncation.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(sigma < 0):
        raise ValueError("sigma must be non-negative")
    if np.any(lower >= upper):
        raise ValueError("need lower < upper")
    dim = len(mu)
    out = np.empty((n, dim))
    for i in range(dim):
        if sigma[i] == 0.0:
            out[:, i] = np.clip(mu[i], lower[i], upper[i])
            continue
        fa = ndtr((lower[i] - mu[i]) / sigma[i])
        fb = ndtr((upper[i] - mu[i]) / sigma[i])
        if fb - fa < REJECTION_STALL_MASS:
            u = rng.uniform(fa, fb, size=n)
            out[:, i] = np.clip(mu[i] + sigma[i] * ndtri(u), lower[i], upper[i])
            continue
        filled = 0
        vals = np.empty(n)
        while filled < n:
            draw = rng.normal(mu[i], sigma[i], size=max(n - filled, 16))
            ok = draw[(draw >= lower[i]) & (draw <= upper[i])]
            take = min(len(ok), n - filled)
            vals[filled : filled + take] = ok[:take]
            filled += take
        out[:, i] = vals
    return out


def select_elite(scores: np.ndarray, n_elite: int) -> tuple[np.ndarray, float]:
    """Indices of the n_elite largest scores and the worst elite score.

    Ties are broken toward the lowest index so runs are reproducible.
    """
    scores = np.asarray(scores, dtype=float)
    if not 1 <= n_elite <= len(scores):
        raise ValueError("need 1 <= n_elite <= len(scores)")
    order = np.argsort(-scores, kind="stable")
    elite = order[:n_elite]
    gamma_hat = float(scores[elite].min())
    return elite, gamma_hat


def mle_update(elite_designs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise Gaussian fit of the elite set (biased variance)."""
    elite_designs = np.atleast_2d(np.asarray(elite_designs, dtype=float))
    mu = elite_designs.mean(axis=0)
    sigma = elite_designs.std(axis=0, ddof=0)
    return mu, sigma


def smooth_update(
    new: tuple[np.ndarray, np.ndarray],
    prev: tuple[np.ndarray, np.ndarray],
    t: int,
    cfg: CEConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Blend new and previous hyper-parameters.

    The mean uses a constant weight; the standard deviation uses the
    level-dependent weight beta_t = beta - beta * (1 - 1/t)^q, which starts
    at beta and decays so the spread cannot collapse too fast.
    """
    if t < 1:
        raise ValueError("level index t must be >= 1")
    mu_new, sigma_new = new
    mu_prev, sigma_prev = prev
    a = cfg.smooth_alpha
    beta_t = cfg.smooth_beta - cfg.smooth_beta * (1.0 - 1.0 / t) ** cfg.smooth_q
    mu = a * np.asarray(mu_new) + (1.0 - a) * np.asarray(mu_prev)
    sigma = beta_t * np.asarray(sigma_new) + (1.0 - beta_t) * np.asarray(sigma_prev)
    return mu, sigma


def optimize(
    objective,
    space: DesignSpace,
    cfg: CEConfig,
    workers: int = 1,
) -> OptimizationResult:
    """Run the cross-entropy search and return the best design found.

    ``objective(design, rng) -> Evaluation`` must be safe to call many times
    (and concurrently when workers > 1). The returned optimum is the best
    feasible evaluation ever seen; if no sample was ever feasible, the best
    penalized one is returned with ``feasible=False``.
    """
    root = np.random.SeedSequence(cfg.seed)
    rng = np.random.default_rng(root.spawn(1)[0])
    mu = space.midpoint.copy()
    # Deliberately over-dispersed start: truncation makes the first levels
    # near-uniform over the box, and the sigma-smoothing memory then keeps
    # the spread wide for several levels instead of collapsing on the first
    # elite set.
    sigma = 10.0 * (space.upper - space.lower).astype(float)

    best_feasible: Evaluation | None = None
    best_overall: Evaluation | None = None
    trace: list[LevelRecord] = []
    converged = False
    level = 0

    for level in range(1, cfg.max_levels + 1):
        designs = sample_truncated_gaussian(
            mu, sigma, space.lower, space.upper, cfg.n_samples, rng
        )
        seed_seqs = root.spawn(cfg.n_samples)
        evals = evaluate_many(objective, designs, seed_seqs, workers=workers)
        scores = np.array([e.penalized for e in evals])

        elite_idx, gamma_hat = select_elite(scores, cfg.n_elite)
        mu_new, sigma_new = mle_update(designs[elite_idx])
        mu, sigma = smooth_update((mu_new, sigma_new), (mu, sigma), level, cfg)

        level_best = evals[int(elite_idx[0])]
        trace.append(
            LevelRecord(
                level=level,
                power=level_best.power,
                k=level_best.k,
                penalized=level_best.penalized,
                gamma_hat=gamma_hat,
                mu=mu.copy(),
                sigma=sigma.copy(),
            )
        )
        for e in evals:
            if best_overall is None or e.penalized > best_overall.penalized:
                best_overall = e
            if e.feasible and (
                best_feasible is None or e.penalized > best_feasible.penalized
            ):
                best_feasible = e

        if np.max(sigma) < cfg.tol:
            converged = True
            break

    best = best_feasible if best_feasible is not None else best_overall
    return OptimizationResult(
        x_star=best.design,
        s_star=best.penalized,
        power_star=best.power,
        k_star=best.k,
        feasible=best.feasible,
        levels_used=level,
        evaluations_used=level * cfg.n_samples,
        converged=converged,
        trace=tuple(trace),
    )


def write_trace_csv(trace, dim, path) -> None:
    """Dump per-level records as level,P,K,mu_1..mu_d,sigma_1..sigma_d columns."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = (
            ["level", "P", "K"]
            + [f"mu_{i + 1}" for i in range(dim)]
            + [f"sigma_{i + 1}" for i in range(dim)]
        )
        writer.writerow(header)
        for rec in trace:
            writer.writerow(
                [rec.level, repr(rec.power), repr(rec.k)]
                + [repr(x) for x in rec.mu.tolist()]
                + [repr(x) for x in rec.sigma.tolist()]
            )
