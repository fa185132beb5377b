"""Bistable harvester model, fixed-step RK4 integration and power output.

The electromechanical system is a dimensionless bistable (double-well)
oscillator driven by a harmonic force and coupled to a resistive
piezoelectric circuit:

    x'' + 2 xi x' - x (1 - x^2) / 2 - chi v = f cos(omega t)
    v' + lam v + kappa x' = 0

State is (x, x', v): beam tip displacement, velocity and resistor voltage.
"""

from __future__ import annotations

import dataclasses
import io
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "HarvesterParams",
    "InitialState",
    "SimConfig",
    "TimeSeries",
    "NonFiniteState",
    "WindowOutOfRange",
    "rhs",
    "integrate_rk4",
    "mean_power",
    "add_noise",
]


class NonFiniteState(RuntimeError):
    """The integrated state became non-finite (blow-up or bad parameters)."""


class WindowOutOfRange(ValueError):
    """The requested averaging window is not covered by the time series."""


@dataclass(frozen=True)
class HarvesterParams:
    """Dimensionless coefficients of the harvester plus the excitation pair."""

    xi: float = 0.01       # damping ratio
    chi: float = 0.05      # piezoelectric coupling, mechanical equation
    lam: float = 0.05      # reciprocal time constant of the circuit
    kappa: float = 0.5     # piezoelectric coupling, electrical equation
    f: float = 0.083       # excitation amplitude
    omega: float = 0.8     # excitation frequency

    def __post_init__(self) -> None:
        vals = (self.xi, self.chi, self.lam, self.kappa, self.f, self.omega)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("all harvester parameters must be finite")
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    FIELD_NAMES = ("xi", "chi", "lam", "kappa", "f", "omega")


@dataclass(frozen=True)
class InitialState:
    """Initial displacement, velocity and voltage."""

    x0: float = 1.0
    xdot0: float = 0.0
    v0: float = 0.0

    def __post_init__(self) -> None:
        if not all(np.isfinite(v) for v in (self.x0, self.xdot0, self.v0)):
            raise ValueError("initial state must be finite")


@dataclass(frozen=True)
class SimConfig:
    """Integration window, step size and observation settings.

    ``power_window`` is the (T0, Tf) interval used both for the power
    average and for the steady-state observable fed to the chaos test;
    ``observable_stride`` downsamples that observable.
    """

    t_start: float = 0.0
    t_end: float = 2500.0
    dt: float = 0.01
    power_window: tuple[float, float] = (1250.0, 2500.0)
    observable_stride: int = 100

    def __post_init__(self) -> None:
        t0w, tfw = self.power_window
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not self.t_start < t0w < tfw <= self.t_end:
            raise ValueError("need t_start < T0 < Tf <= t_end")
        span = self.t_end - self.t_start
        n = span / self.dt
        if abs(n - round(n)) > 1e-8 * max(1.0, abs(n)):
            raise ValueError("(t_end - t_start) / dt must be an integer")
        if self.observable_stride < 1:
            raise ValueError("observable_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.dt))


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled trajectory of (x, xdot, v)."""

    t0: float
    dt: float
    x: np.ndarray
    xdot: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        n = len(self.x)
        if n < 2 or len(self.xdot) != n or len(self.v) != n:
            raise ValueError("channels must have equal length >= 2")

    def __len__(self) -> int:
        return len(self.x)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.x))

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (len(self.x) - 1)

    def index_of(self, time: float) -> int:
        """Index of the sample nearest to ``time`` (must lie on the grid)."""
        i = int(round((time - self.t0) / self.dt))
        if i < 0 or i >= len(self.x):
            raise WindowOutOfRange(
                f"time {time} outside series span [{self.t0}, {self.t_end}]"
            )
        return i

    def window(self, t_lo: float, t_hi: float, stride: int = 1) -> np.ndarray:
        """Voltage samples on [t_lo, t_hi], downsampled by ``stride``."""
        i0, i1 = self.index_of(t_lo), self.index_of(t_hi)
        return self.v[i0 : i1 + 1 : stride]

    def observable(self, t_lo: float, t_hi: float, stride: int = 1) -> np.ndarray:
        """Block-averaged voltage on [t_lo, t_hi] at sampling step stride*dt.

        Each output sample is the mean of ``stride`` consecutive voltage
        samples. Averaging (rather than point decimation) suppresses
        measurement noise by a factor sqrt(stride) while leaving the
        dynamics at the decimated scale intact, which keeps the chaos
        classifier usable on noisy signals.
        """
        i0, i1 = self.index_of(t_lo), self.index_of(t_hi)
        v = self.v[i0 : i1 + 1]
        if stride == 1:
            return v.copy()
        n = (len(v) // stride) * stride
        return v[:n].reshape(-1, stride).mean(axis=1)

    def to_csv(self, path) -> None:
        header = "t,x,xdot,v"
        data = np.column_stack([self.t, self.x, self.xdot, self.v])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header=header, comments="")

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        t = data[:, 0]
        return cls(t0=t[0], dt=t[1] - t[0], x=data[:, 1], xdot=data[:, 2], v=data[:, 3])


def rhs(
    state: tuple[float, float, float], params: HarvesterParams, t: float
) -> tuple[float, float, float]:
    """Time derivative of (x, xdot, v)."""
    x, xdot, v = state
    xddot = (
        -2.0 * params.xi * xdot
        + 0.5 * x * (1.0 - x * x)
        + params.chi * v
        + params.f * np.cos(params.omega * t)
    )
    vdot = -params.lam * v - params.kappa * xdot
    return (xdot, xddot, vdot)


@njit(cache=True)
def _rk4_core(xi, chi, lam, kappa, f, omega, x0, xd0, v0, t0, dt, n_steps):
    n = n_steps + 1
    xs = np.empty(n)
    xds = np.empty(n)
    vs = np.empty(n)
    xs[0], xds[0], vs[0] = x0, xd0, v0
    x, xd, v = x0, xd0, v0
    for i in range(n_steps):
        t = t0 + i * dt

        k1x = xd
        k1xd = -2.0 * xi * xd + 0.5 * x * (1.0 - x * x) + chi * v + f * np.cos(omega * t)
        k1v = -lam * v - kappa * xd

        x2, xd2, v2 = x + 0.5 * dt * k1x, xd + 0.5 * dt * k1xd, v + 0.5 * dt * k1v
        th = t + 0.5 * dt
        k2x = xd2
        k2xd = -2.0 * xi * xd2 + 0.5 * x2 * (1.0 - x2 * x2) + chi * v2 + f * np.cos(omega * th)
        k2v = -lam * v2 - kappa * xd2

        x3, xd3, v3 = x + 0.5 * dt * k2x, xd + 0.5 * dt * k2xd, v + 0.5 * dt * k2v
        k3x = xd3
        k3xd = -2.0 * xi * xd3 + 0.5 * x3 * (1.0 - x3 * x3) + chi * v3 + f * np.cos(omega * th)
        k3v = -lam * v3 - kappa * xd3

        x4, xd4, v4 = x + dt * k3x, xd + dt * k3xd, v + dt * k3v
        tf = t + dt
        k4x = xd4
        k4xd = -2.0 * xi * xd4 + 0.5 * x4 * (1.0 - x4 * x4) + chi * v4 + f * np.cos(omega * tf)
        k4v = -lam * v4 - kappa * xd4

        x = x + dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        xd = xd + dt * (k1xd + 2.0 * k2xd + 2.0 * k3xd + k4xd) / 6.0
        v = v + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0

        if not (np.isfinite(x) and np.isfinite(xd) and np.isfinite(v)):
            return xs, xds, vs, i + 1
        xs[i + 1], xds[i + 1], vs[i + 1] = x, xd, v
    return xs, xds, vs, n


def integrate_rk4(
    params: HarvesterParams, ic: InitialState, cfg: SimConfig
) -> TimeSeries:
    """Integrate the harvester with the classic fixed-step RK4 scheme."""
    xs, xds, vs, n_ok = _rk4_core(
        params.xi,
        params.chi,
        params.lam,
        params.kappa,
        params.f,
        params.omega,
        ic.x0,
        ic.xdot0,
        ic.v0,
        cfg.t_start,
        cfg.dt,
        cfg.n_steps,
    )
    if n_ok < cfg.n_steps + 1:
        t_fail = cfg.t_start + n_ok * cfg.dt
        raise NonFiniteState(f"state became non-finite near t = {t_fail:.6g}")
    return TimeSeries(t0=cfg.t_start, dt=cfg.dt, x=xs, xdot=xds, v=vs)


def mean_power(series: TimeSeries, t_lo: float, t_hi: float, lam: float) -> float:
    """Mean electrical power lam * <v^2> over [t_lo, t_hi] (trapezoidal)."""
    if not t_lo < t_hi:
        raise ValueError("need t_lo < t_hi")
    i0, i1 = series.index_of(t_lo), series.index_of(t_hi)
    if i1 - i0 < 1:
        raise WindowOutOfRange("window spans fewer than two samples")
    v2 = series.v[i0 : i1 + 1] ** 2
    span = series.dt * (i1 - i0)
    return float(lam * np.trapezoid(v2, dx=series.dt) / span)


def add_noise(
    series: TimeSeries, ratio: float, rng: np.random.Generator
) -> TimeSeries:
    """Corrupt the voltage channel with zero-mean Gaussian measurement noise.

    The noise standard deviation is ``ratio`` times the maximum voltage
    amplitude; displacement and velocity are untouched.
    """
    if ratio < 0:
        raise ValueError("ratio must be non-negative")
    if ratio == 0:
        return dataclasses.replace(series, v=series.v.copy())
    sd = ratio * float(np.max(np.abs(series.v)))
    noisy = series.v + rng.normal(0.0, sd, size=len(series.v)) if sd > 0 else series.v.copy()
    return dataclasses.replace(series, v=noisy)
