"""Step-disturbance trajectories and modal energy time series.

The scenario: the system rests at the origin until t_dist, the state jumps
to x0, and xdot = A x takes over.  Propagation uses one matrix exponential
per grid step; modal trajectories use the closed form
z_i(t) = exp(lambda_i (t - t_dist)) v_i (u_i^T x0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import InvalidModel, NonFinite
from .model import StateSpaceModel
from .energy import (
    EnergyKind,
    MethodKind,
    moving_frame,
    weight_for,
    NEAR_ZERO_TOL,
)
from .spectral import EigenBasis


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling grid t0, t0+dt, ..., covering t_end.

    Requires dt > 0 and t0 <= t_dist < t_end, with at least two samples.
    """

    t0: float
    t_dist: float
    t_end: float
    dt: float

    def __post_init__(self):
        for name in ("t0", "t_dist", "t_end", "dt"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise NonFinite(f"{name} = {v!r} is not finite")
            object.__setattr__(self, name, v)
        if self.dt <= 0:
            raise InvalidModel(f"dt = {self.dt} must be positive")
        if not (self.t0 <= self.t_dist < self.t_end):
            raise InvalidModel(
                f"need t0 <= t_dist < t_end, got {self.t0}, {self.t_dist}, {self.t_end}"
            )
        if self.num_samples < 2:
            raise InvalidModel("grid has fewer than two samples")

    @property
    def num_samples(self) -> int:
        return int(np.floor((self.t_end - self.t0) / self.dt + 1e-9)) + 1

    @property
    def times(self) -> np.ndarray:
        t = self.t0 + self.dt * np.arange(self.num_samples)
        t.setflags(write=False)
        return t


@dataclass(frozen=True)
class Trajectory:
    """Sampled state history; states[k] is the state at times[k]."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.shape[0] != times.size:
            raise InvalidModel(
                f"{states.shape[0]} states for {times.size} sample times"
            )
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)


def _first_active(times: np.ndarray, grid: TimeGrid) -> int:
    # tolerate one-ulp drift in t0 + k*dt around the disturbance instant
    return int(np.searchsorted(times, grid.t_dist - 1e-9 * grid.dt))


def propagate(model: StateSpaceModel, x0: np.ndarray, grid: TimeGrid) -> Trajectory:
    """Sample the step-disturbance response on the grid.

    Zero before t_dist, exactly x0 at the first sample >= t_dist, then
    exp(A dt) stepping.  Raises NonFinite if the state overflows, naming the
    first offending sample time.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (model.n,):
        raise InvalidModel(f"x0 has shape {x0.shape}, expected ({model.n},)")
    if not np.all(np.isfinite(x0)):
        raise NonFinite("x0 has non-finite entries")
    times = grid.times
    states = np.zeros((times.size, model.n))
    k0 = _first_active(times, grid)
    if k0 < times.size:
        offset = times[k0] - grid.t_dist
        if abs(offset) <= 1e-9 * grid.dt:
            states[k0] = x0
        else:
            states[k0] = la.expm(model.A * offset) @ x0
        step = la.expm(model.A * grid.dt)
        with np.errstate(over="ignore"):  # overflow is detected and raised below
            for k in range(k0 + 1, times.size):
                states[k] = step @ states[k - 1]
                if not np.all(np.isfinite(states[k])):
                    raise NonFinite(f"trajectory overflowed at t = {times[k]:g}")
    return Trajectory(times=times, states=states)


def modal_trajectory(basis: EigenBasis, x0: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Closed-form modal components, shape (num_samples, n_modes, n_states).

    out[k, i, :] = exp(lambda_i (t_k - t_dist)) v_i (u_i^T x0), zero before
    the disturbance.  Summing over the mode axis reconstructs the state.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (basis.n,):
        raise InvalidModel(f"x0 has shape {x0.shape}, expected ({basis.n},)")
    times = grid.times
    c0 = basis.U.T @ x0
    coef = np.zeros((times.size, basis.n), dtype=complex)
    k0 = _first_active(times, grid)
    if k0 < times.size:
        dt_rel = times[k0:] - grid.t_dist
        coef[k0:] = np.exp(np.outer(dt_rel, basis.lambdas)) * c0[None, :]
    return coef[:, :, None] * basis.V.T[None, :, :]


@dataclass(frozen=True)
class EnergyTable:
    """Energy/power series per method on a shared grid.

    energies[m] and powers[m] have shape (num_samples, n); energy_sums and
    power_sums hold the per-sample mode sums (for the moving frame these are
    the totals themselves).
    """

    times: np.ndarray
    kind: EnergyKind
    methods: tuple[MethodKind, ...]
    energies: dict
    powers: dict
    energy_sums: dict
    power_sums: dict
    total_energy: np.ndarray
    total_power: np.ndarray


def energy_timeseries(
    model: StateSpaceModel,
    basis: EigenBasis,
    x0: np.ndarray,
    grid: TimeGrid,
    methods: tuple[MethodKind, ...] = tuple(MethodKind),
    kind: EnergyKind = EnergyKind.NORMALIZED,
) -> EnergyTable:
    """Evaluate the requested energy definitions along the sampled response."""
    W = weight_for(model, kind)
    traj = propagate(model, x0, grid)
    X = traj.states
    Xdot = X @ model.A.T
    XP = X if W is None else X @ W
    XdotP = Xdot if W is None else Xdot @ W
    tot_e = 0.5 * np.sum(X * XP, axis=1)
    tot_p = np.sum(X * XdotP, axis=1)

    V, U = basis.V, basis.U
    WV = V if W is None else W @ V
    C = X @ U  # C[k, i] = u_i^T x(t_k)
    Cdot = Xdot @ U
    XPV = XP @ V

    energies: dict = {}
    powers: dict = {}
    e_sums: dict = {}
    p_sums: dict = {}
    for method in methods:
        if method is MethodKind.MOVING_FRAME:
            E = np.repeat(tot_e[:, None], basis.n, axis=1).astype(complex)
            S = np.zeros((X.shape[0], basis.n), dtype=complex)
            for k in range(X.shape[0]):
                nx = np.sqrt(max(float(X[k] @ XP[k]), 0.0))
                if nx <= NEAR_ZERO_TOL:
                    continue
                frame = moving_frame(X[k], model.A, W)
                S[k] = frame.T @ XdotP[k]
            e_sums[method] = tot_e.astype(complex)
            p_sums[method] = tot_p.astype(complex)
        elif method is MethodKind.EIGENVECTOR:
            E = 0.5 * XPV * C
            S = XPV * Cdot
        elif method is MethodKind.HERMITIAN_PF:
            g = np.einsum("si,si->i", V.conj(), WV)
            E = 0.5 * (C.conj() * C) * g[None, :]
            S = (C.conj() * Cdot) * g[None, :]
        elif method is MethodKind.TRANSPOSE_PF:
            g = np.einsum("si,si->i", V, WV)
            E = 0.5 * (C * C) * g[None, :]
            S = (C * Cdot) * g[None, :]
        else:
            raise ValueError(f"unknown method {method!r}")
        energies[method] = E
        powers[method] = S
        if method is not MethodKind.MOVING_FRAME:
            e_sums[method] = E.sum(axis=1)
            p_sums[method] = S.sum(axis=1)

    return EnergyTable(
        times=traj.times,
        kind=kind,
        methods=tuple(methods),
        energies=energies,
        powers=powers,
        energy_sums=e_sums,
        power_sums=p_sums,
        total_energy=tot_e,
        total_power=tot_p,
    )
