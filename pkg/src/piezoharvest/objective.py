"""Design-space binding and the penalized power objective.

A design point maps onto the harvester coefficients, the model is simulated,
and the pair (P, K) = (mean power, chaos classifier) is folded into the
scalar S = P - alpha * max(0, K - epsilon). Designs whose integration blows
up receive a large negative sentinel so the optimizer can rank them.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from piezoharvest.chaos01 import Test01Config, classify
from piezoharvest.dynamics import (
    HarvesterParams,
    InitialState,
    NonFiniteState,
    SimConfig,
    add_noise,
    integrate_rk4,
    mean_power,
)

__all__ = [
    "DesignSpace",
    "PenaltyConfig",
    "Evaluation",
    "HarvesterObjective",
    "BLOWUP_POWER",
    "evaluate_raw",
    "penalize",
    "evaluate",
]

#: Sentinel power assigned to designs whose integration diverges.
BLOWUP_POWER = -1.0e6


@dataclass(frozen=True)
class DesignSpace:
    """Box-bounded design variables and their binding onto the model.

    ``names`` lists the harvester fields treated as free variables (in
    design-vector order); every remaining field must appear in ``fixed``.
    """

    names: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray
    fixed: Mapping[str, float]

    def __post_init__(self) -> None:
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "fixed", dict(self.fixed))
        if len(self.names) != len(lower) or len(self.names) != len(upper):
            raise ValueError("names, lower and upper must have equal length")
        if not np.all(lower < upper):
            raise ValueError("need lower < upper componentwise")
        all_fields = set(HarvesterParams.FIELD_NAMES)
        free = set(self.names)
        if len(free) != len(self.names):
            raise ValueError("duplicate design variable names")
        unknown = (free | set(self.fixed)) - all_fields
        if unknown:
            raise ValueError(f"unknown parameter names: {sorted(unknown)}")
        if free & set(self.fixed):
            raise ValueError("a field cannot be both free and fixed")
        missing = all_fields - free - set(self.fixed)
        if missing:
            raise ValueError(f"unbound parameter fields: {sorted(missing)}")

    @property
    def dim(self) -> int:
        return len(self.names)

    def bind(self, design: np.ndarray) -> HarvesterParams:
        """Assemble the full parameter set for one design vector."""
        design = np.asarray(design, dtype=float)
        if design.shape != (self.dim,):
            raise ValueError(f"design must have shape ({self.dim},)")
        kwargs = dict(self.fixed)
        kwargs.update(zip(self.names, design.tolist()))
        return HarvesterParams(**kwargs)

    def contains(self, design: np.ndarray) -> bool:
        design = np.asarray(design, dtype=float)
        return bool(np.all(design >= self.lower) and np.all(design <= self.upper))

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)


@dataclass(frozen=True)
class PenaltyConfig:
    """Weight and slack of the chaos-constraint penalty."""

    alpha_pen: float = 10.0
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if self.alpha_pen <= 0:
            raise ValueError("alpha_pen must be positive")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")


@dataclass(frozen=True)
class Evaluation:
    """One scored design: raw power, constraint value and penalized score."""

    design: np.ndarray
    power: float
    k: float
    penalized: float
    feasible: bool
    eval_index: int = 0


def penalize(power: float, k: float, cfg: PenaltyConfig) -> float:
    """Penalized score P - alpha * max(0, K - epsilon)."""
    return power - cfg.alpha_pen * max(0.0, k - cfg.epsilon)


def evaluate_raw(
    design: np.ndarray,
    space: DesignSpace,
    sim: SimConfig,
    t01: Test01Config,
    noise_ratio: float,
    rng: np.random.Generator,
    ic: InitialState = InitialState(),
) -> tuple[float, float]:
    """Simulate one design and return (mean power P, chaos classifier K).

    Both quantities are computed on the steady-state window of the
    simulation; the voltage observable for the chaos test is downsampled by
    the configured stride. A diverging integration yields the sentinel pair
    (BLOWUP_POWER, 1.0).
    """
    params = space.bind(design)
    try:
        series = integrate_rk4(params, ic, sim)
    except NonFiniteState:
        return BLOWUP_POWER, 1.0
    if noise_ratio > 0:
        series = add_noise(series, noise_ratio, rng)
    t_lo, t_hi = sim.power_window
    power = mean_power(series, t_lo, t_hi, params.lam)
    phi = series.observable(t_lo, t_hi, sim.observable_stride)
    k = classify(phi, t01, rng).k
    return power, k


def evaluate(
    design: np.ndarray,
    space: DesignSpace,
    sim: SimConfig,
    t01: Test01Config,
    penalty: PenaltyConfig,
    noise_ratio: float,
    rng: np.random.Generator,
    ic: InitialState = InitialState(),
    eval_index: int = 0,
) -> Evaluation:
    """Score one design against the penalized objective."""
    power, k = evaluate_raw(design, space, sim, t01, noise_ratio, rng, ic=ic)
    score = penalize(power, k, penalty)
    return Evaluation(
        design=np.asarray(design, dtype=float).copy(),
        power=power,
        k=k,
        penalized=score,
        feasible=k <= penalty.epsilon,
        eval_index=eval_index,
    )


@dataclass
class HarvesterObjective:
    """Callable objective with a thread-safe evaluation counter."""

    space: DesignSpace
    sim: SimConfig = SimConfig()
    t01: Test01Config = Test01Config()
    penalty: PenaltyConfig = PenaltyConfig()
    noise_ratio: float = 0.0
    ic: InitialState = InitialState()
    _count: int = field(default=0, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __call__(self, design: np.ndarray, rng: np.random.Generator) -> Evaluation:
        with self._lock:
            self._count += 1
            idx = self._count
        return evaluate(
            design,
            self.space,
            self.sim,
            self.t01,
            self.penalty,
            self.noise_ratio,
            rng,
            ic=self.ic,
            eval_index=idx,
        )

    @property
    def evaluations(self) -> int:
        return self._count

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()
