"""Batch evaluation of designs, optionally across worker processes."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

__all__ = ["evaluate_many"]


def _eval_one(args):
    objective, design, seed_seq = args
    return objective(design, np.random.default_rng(seed_seq))


def evaluate_many(objective, designs, seed_seqs, workers: int = 1) -> list:
    """Evaluate each design with its own child random stream.

    ``seed_seqs`` are numpy SeedSequence objects, one per design, so results
    are reproducible regardless of execution order or worker count.
    """
    jobs = [(objective, d, ss) for d, ss in zip(designs, seed_seqs)]
    if workers <= 1:
        return [_eval_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_eval_one, jobs, chunksize=max(1, len(jobs) // workers)))
