"""Exhaustive reference search on a uniform grid over the design box."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from piezoharvest.cross_entropy import OptimizationResult
from piezoharvest.objective import DesignSpace
from piezoharvest.parallel import evaluate_many

__all__ = ["GridSpec", "NoFeasiblePoint", "exhaustive_search", "write_field_csv"]


class NoFeasiblePoint(RuntimeError):
    """Every grid node violates the non-chaos constraint."""


@dataclass(frozen=True)
class GridSpec:
    """Endpoints-inclusive uniform resolution per design dimension."""

    resolution: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "resolution", tuple(int(r) for r in self.resolution))
        if any(r < 2 for r in self.resolution):
            raise ValueError("resolution must be >= 2 per dimension")

    @property
    def n_points(self) -> int:
        return int(np.prod(self.resolution))

    def nodes(self, space: DesignSpace) -> np.ndarray:
        """All grid nodes in row-major order, shape (n_points, dim)."""
        if len(self.resolution) != space.dim:
            raise ValueError("resolution rank must match design dimension")
        axes = [
            np.linspace(space.lower[i], space.upper[i], self.resolution[i])
            for i in range(space.dim)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def exhaustive_search(
    objective,
    space: DesignSpace,
    grid: GridSpec,
    seed: int | None = None,
    workers: int = 1,
) -> tuple[OptimizationResult, np.ndarray]:
    """Evaluate every grid node and return the best feasible one.

    Also returns the full field as an array of rows (x_1..x_d, P, K) in
    row-major node order, infeasible nodes included, so constraint and
    power contour maps can be drawn. Ties go to the lowest linear index.
    """
    designs = grid.nodes(space)
    seed_seqs = np.random.SeedSequence(seed).spawn(len(designs))
    evals = evaluate_many(objective, designs, seed_seqs, workers=workers)

    power = np.array([e.power for e in evals])
    k = np.array([e.k for e in evals])
    field = np.column_stack([designs, power, k])

    feasible = np.array([e.feasible for e in evals])
    if not feasible.any():
        raise NoFeasiblePoint("no grid node satisfies the chaos constraint")
    scores = np.where(feasible, power, -np.inf)
    best_idx = int(np.argmax(scores))
    best = evals[best_idx]

    result = OptimizationResult(
        x_star=best.design,
        s_star=best.penalized,
        power_star=best.power,
        k_star=best.k,
        feasible=True,
        levels_used=1,
        evaluations_used=len(designs),
        converged=True,
        trace=(),
    )
    return result, field


def write_field_csv(field: np.ndarray, path) -> None:
    """Dump the (design, P, K) field as x_1..x_d,P,K rows."""
    dim = field.shape[1] - 2
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x_{i + 1}" for i in range(dim)] + ["P", "K"])
        for row in field:
            writer.writerow([repr(x) for x in row.tolist()])
