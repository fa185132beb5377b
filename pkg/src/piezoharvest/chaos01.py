"""0-1 test for chaos on a sampled observable.

The observable is projected onto rotating translation variables (p, q); the
growth of their mean square displacement with lag separates regular dynamics
(bounded, K near 0) from chaotic dynamics (diffusive, K near 1). K is the
median over many random projection frequencies c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

__all__ = [
    "Test01Config",
    "Test01Result",
    "SeriesTooShort",
    "InsufficientLength",
    "translation_vars",
    "msd",
    "correlation_k",
    "classify",
]


class SeriesTooShort(ValueError):
    """Observable has fewer than the minimum number of samples."""


class InsufficientLength(ValueError):
    """Requested maximum lag is not compatible with the series length."""


#: Minimum observable length accepted by :func:`classify`.
MIN_SERIES_LENGTH = 100


@dataclass(frozen=True)
class Test01Config:
    """Settings of the classifier.

    c values are drawn from (c_min, c_max); the default interval (pi/5,
    4 pi/5) avoids the resonance artifacts near 0, pi and 2 pi. The maximum
    lag is ``floor(N * n_cut_fraction)`` so that lags stay far below the
    series length.
    """

    n_c: int = 100
    c_min: float = np.pi / 5
    c_max: float = 4 * np.pi / 5
    n_cut_fraction: float = 0.1

    def __post_init__(self) -> None:
        if self.n_c < 1:
            raise ValueError("n_c must be >= 1")
        if not 0 < self.c_min < self.c_max < 2 * np.pi:
            raise ValueError("need 0 < c_min < c_max < 2*pi")
        if not 0 < self.n_cut_fraction <= 0.5:
            raise ValueError("n_cut_fraction must be in (0, 0.5]")


@dataclass(frozen=True)
class Test01Result:
    """Median classifier K plus the per-frequency diagnostics."""

    k: float
    k_c_values: np.ndarray
    c_values: np.ndarray
    degenerate: np.ndarray  # True where k_c = 0 came from the zero-variance rule


def translation_vars(phi: np.ndarray, c: float) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative cos/sin-weighted sums of the observable at frequency c.

    p_n = sum_{j=1..n} phi_j cos(j c), q_n likewise with sin, n = 1..N.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 1 or len(phi) < 2:
        raise ValueError("phi must be a 1-D array of length >= 2")
    j = np.arange(1, len(phi) + 1)
    p = np.cumsum(phi * np.cos(j * c))
    q = np.cumsum(phi * np.sin(j * c))
    return p, q


def _msd_batch(p: np.ndarray, q: np.ndarray, n_max: int) -> np.ndarray:
    """Lag-averaged mean square displacement for rows of (p, q).

    M[., n-1] = (1/(N-n)) sum_{j=1..N-n} (p_{j+n}-p_j)^2 + (q_{j+n}-q_j)^2
    for n = 1..n_max. The cross terms are evaluated for all lags at once
    through an FFT autocorrelation of z = p + i q; the result is exact up to
    round-off.
    """
    n_pts = p.shape[1]
    z = p + 1j * q
    nfft = scipy.fft.next_fast_len(2 * n_pts)
    zf = scipy.fft.fft(z, nfft, axis=1)
    # cross[., n] = sum_j (p_j p_{j+n} + q_j q_{j+n})
    cross = scipy.fft.ifft(zf * np.conj(zf), axis=1).real[:, 1 : n_max + 1]
    s = p * p + q * q
    cs = np.cumsum(s, axis=1)
    total = cs[:, -1:]
    lags = np.arange(1, n_max + 1)
    head = cs[:, n_pts - 1 - lags]          # sum of the first N-n squares
    tail = total - cs[:, lags - 1]          # sum of the last N-n squares
    return (head + tail - 2.0 * cross) / (n_pts - lags)


def msd(p: np.ndarray, q: np.ndarray, n_max: int) -> np.ndarray:
    """Mean square displacement M_n for n = 1..n_max."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("p and q must be 1-D arrays of equal length")
    if n_max < 1 or n_max >= len(p):
        raise InsufficientLength("need 1 <= n_max <= len(p) - 1")
    return _msd_batch(p[None, :], q[None, :], n_max)[0]


def correlation_k(t_mesh: np.ndarray, m: np.ndarray) -> float:
    """Pearson correlation of (t_mesh, M); 0 by convention when degenerate."""
    t_mesh = np.asarray(t_mesh, dtype=float)
    m = np.asarray(m, dtype=float)
    if t_mesh.shape != m.shape or len(m) < 2:
        raise ValueError("t_mesh and M must have equal length >= 2")
    tc = t_mesh - t_mesh.mean()
    mc = m - m.mean()
    den = np.sqrt((tc * tc).sum() * (mc * mc).sum())
    if den == 0.0:
        return 0.0
    return float(np.clip((tc * mc).sum() / den, -1.0, 1.0))


def classify(
    phi: np.ndarray, cfg: Test01Config, rng: np.random.Generator
) -> Test01Result:
    """Run the full 0-1 test and return K = median over random c draws."""
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 1 or len(phi) < MIN_SERIES_LENGTH:
        raise SeriesTooShort(
            f"observable needs at least {MIN_SERIES_LENGTH} samples, got {len(phi)}"
        )
    n_pts = len(phi)
    n_max = int(np.floor(n_pts * cfg.n_cut_fraction))
    if n_max < 2:
        raise InsufficientLength("n_cut_fraction too small for this series")
    cs = rng.uniform(cfg.c_min, cfg.c_max, size=cfg.n_c)

    # A constant observable carries no dynamics; classify as regular.
    if np.max(phi) == np.min(phi):
        zeros = np.zeros(cfg.n_c)
        return Test01Result(
            k=0.0, k_c_values=zeros, c_values=cs, degenerate=np.ones(cfg.n_c, bool)
        )

    j = np.arange(1, n_pts + 1)
    angles = np.outer(cs, j)
    p = np.cumsum(phi * np.cos(angles), axis=1)
    q = np.cumsum(phi * np.sin(angles), axis=1)
    m = _msd_batch(p, q, n_max)

    lags = np.arange(1, n_max + 1, dtype=float)
    tc = lags - lags.mean()
    mc = m - m.mean(axis=1, keepdims=True)
    den = np.sqrt((mc * mc).sum(axis=1) * (tc * tc).sum())
    degenerate = den == 0.0
    k_c = np.zeros(cfg.n_c)
    ok = ~degenerate
    k_c[ok] = np.clip((mc[ok] @ tc) / den[ok], -1.0, 1.0)
    return Test01Result(
        k=float(np.median(k_c)), k_c_values=k_c, c_values=cs, degenerate=degenerate
    )
