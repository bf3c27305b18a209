"""The four modal energy/power definitions and the quantities derived from them.

Per-mode energies use the modal projections z_i = v_i (u_i^T x):

* moving-frame:   one shared scalar e = 0.5 x^T P x, power via a P-orthonormal
                  frame anchored at the state.
* eigenvector:    e_i = 0.5 x^T P v_i u_i^T x (complex in general).
* Hermitian PF:   e_i = 0.5 z_i^H P z_i (real, nonnegative).
* transpose PF:   e_i = 0.5 z_i^T P z_i (complex in general).

Passing P=None anywhere means the identity weight (normalized energy); a
StateSpaceModel may be passed instead of a matrix, in which case the weight
for the requested kind is resolved from it, refusing flagged indefinite
weights for physical energies.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg as la

from .errors import (
    DimensionMismatch,
    NearZeroState,
    RefusedIndefiniteP,
    SingularP,
    ZeroMatrix,
)
from .model import StateSpaceModel
from .spectral import EigenBasis, projection_matrix

DEFAULT_IDENTITY_TOL = 1e-9
NEAR_ZERO_TOL = 1e-12


class MethodKind(Enum):
    """The four modal energy definitions."""

    MOVING_FRAME = "moving"
    EIGENVECTOR = "eigvec"
    HERMITIAN_PF = "hermitian"
    TRANSPOSE_PF = "transpose"


class EnergyKind(Enum):
    """Physical uses the model weight P; normalized substitutes P = I."""

    NORMALIZED = "normalized"
    PHYSICAL = "physical"


def weight_for(model: StateSpaceModel, kind: EnergyKind) -> np.ndarray | None:
    """Quadratic-form weight the model supplies for the requested kind.

    Returns None for the identity weight.  A model without P falls back to
    the normalized weight; a flagged indefinite weight is refused for
    physical energies.
    """
    if kind is EnergyKind.NORMALIZED or model.P is None:
        return None
    if model.p_indefinite:
        raise RefusedIndefiniteP(
            "model weight is flagged (asymmetric or not positive definite); "
            "physical energies are refused, use the normalized kind"
        )
    return model.P


def _resolve(P, kind: EnergyKind | None, n: int) -> np.ndarray | None:
    if isinstance(P, StateSpaceModel):
        P = weight_for(P, kind if kind is not None else EnergyKind.PHYSICAL)
    elif kind is EnergyKind.NORMALIZED:
        P = None
    if P is None:
        return None
    P = np.asarray(P, dtype=float)
    if P.shape != (n, n):
        raise DimensionMismatch(f"weight has shape {P.shape}, expected ({n}, {n})")
    return P


def _state(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DimensionMismatch(f"state has shape {x.shape}, expected ({n},)")
    return x


def _apply(P: np.ndarray | None, v: np.ndarray) -> np.ndarray:
    return v if P is None else P @ v


def total_energy(x: np.ndarray, P: np.ndarray | None = None) -> float:
    """Stored energy 0.5 x^T P x (P = I when None)."""
    x = np.asarray(x, dtype=float)
    P = _resolve(P, None, x.size)
    return float(0.5 * x @ _apply(P, x))


def total_power(x: np.ndarray, A: np.ndarray, P: np.ndarray | None = None) -> float:
    """Dissipated power x^T P A x, i.e. x^T P xdot along the flow."""
    x = np.asarray(x, dtype=float)
    A = np.asarray(A, dtype=float)
    if A.shape != (x.size, x.size):
        raise DimensionMismatch(f"A has shape {A.shape}, expected ({x.size}, {x.size})")
    P = _resolve(P, None, x.size)
    return float(x @ _apply(P, A @ x))


def pnorm(x: np.ndarray, P: np.ndarray | None = None) -> float:
    """Norm induced by the energy weight, sqrt(x^T P x)."""
    x = np.asarray(x, dtype=float)
    return float(np.sqrt(max(x @ _apply(P, x), 0.0)))


def moving_frame(
    x: np.ndarray,
    A: np.ndarray,
    P: np.ndarray | None = None,
    tol: float = NEAR_ZERO_TOL,
) -> np.ndarray:
    """P-orthonormal frame anchored at the state, columns psi_1..psi_n.

    psi_1 = x / ||x||_P; the rest come from Gram-Schmidt (in the P inner
    product) over the Krylov sequence A x, A^2 x, ..., with coordinate axes
    filling any deficient directions.  By construction
    ||x||_P * (psi_1^T P xdot) = x^T P xdot.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    A = np.asarray(A, dtype=float)
    P = _resolve(P, None, n)
    nx = pnorm(x, P)
    if nx <= tol:
        raise NearZeroState(f"||x||_P = {nx:.3e} <= {tol:.3e}; no frame at the origin")

    frame = np.empty((n, n))
    frame[:, 0] = x / nx
    count = 1

    candidates = []
    w = x
    for _ in range(n - 1):
        w = A @ w
        candidates.append(w)
    candidates.extend(np.eye(n).T)

    for cand in candidates:
        if count == n:
            break
        scale = pnorm(cand, P)
        if scale <= tol:
            continue
        w = cand.astype(float, copy=True)
        for _ in range(2):  # reorthogonalize once for stable orthonormality
            coeffs = frame[:, :count].T @ _apply(P, w)
            w = w - frame[:, :count] @ coeffs
        nw = pnorm(w, P)
        if nw <= 1e-8 * scale:
            continue  # linearly dependent on the accepted directions
        w = w / nw
        k = int(np.argmax(np.abs(w)))
        if w[k] < 0:
            w = -w
        frame[:, count] = w
        count += 1
    if count != n:
        raise NearZeroState("could not complete a P-orthonormal frame")
    return frame


def modal_energy(
    method: MethodKind,
    kind: EnergyKind,
    basis: EigenBasis,
    x: np.ndarray,
    P=None,
) -> np.ndarray:
    """Per-mode complex energies for the chosen definition (see module doc)."""
    n = basis.n
    x = _state(x, n)
    W = _resolve(P, kind, n)
    if method is MethodKind.MOVING_FRAME:
        return np.full(n, total_energy(x, W), dtype=complex)
    if method is MethodKind.EIGENVECTOR:
        return 0.5 * (basis.V.T @ _apply(W, x)) * (basis.U.T @ x)
    Z = projection_matrix(basis, x)
    PZ = _apply(W, Z)
    if method is MethodKind.HERMITIAN_PF:
        return 0.5 * np.einsum("si,si->i", Z.conj(), PZ)
    if method is MethodKind.TRANSPOSE_PF:
        return 0.5 * np.einsum("si,si->i", Z, PZ)
    raise ValueError(f"unknown method {method!r}")


def modal_power(
    method: MethodKind,
    kind: EnergyKind,
    basis: EigenBasis,
    x: np.ndarray,
    A: np.ndarray,
    P=None,
) -> np.ndarray:
    """Per-mode complex powers along xdot = A x.

    The modal derivative is evaluated through A (zdot_i = v_i u_i^T A x), so
    the identity s_i = 2 lambda_i e_i is a genuine numerical consequence of
    the eigendecomposition, not an algebraic shortcut.
    """
    n = basis.n
    x = _state(x, n)
    A = np.asarray(A, dtype=float)
    if A.shape != (n, n):
        raise DimensionMismatch(f"A has shape {A.shape}, expected ({n}, {n})")
    W = _resolve(P, kind, n)
    xdot = A @ x
    if method is MethodKind.MOVING_FRAME:
        frame = moving_frame(x, A, W)
        return (frame.T @ _apply(W, xdot)).astype(complex)
    if method is MethodKind.EIGENVECTOR:
        return (basis.V.T @ _apply(W, x)) * (basis.U.T @ xdot)
    Z = projection_matrix(basis, x)
    Zdot = basis.V * (basis.U.T @ xdot)[None, :]
    PZdot = _apply(W, Zdot)
    if method is MethodKind.HERMITIAN_PF:
        return np.einsum("si,si->i", Z.conj(), PZdot)
    if method is MethodKind.TRANSPOSE_PF:
        return np.einsum("si,si->i", Z, PZdot)
    raise ValueError(f"unknown method {method!r}")


def cross_energy(basis: EigenBasis, x: np.ndarray, P=None, kind: EnergyKind | None = None) -> np.ndarray:
    """Cross-energy matrix with entries 0.5 z_i^H P z_j.

    The trace collects the Hermitian PF modal energies; the off-diagonal sum
    is the missing energy that separates their sum from the true total.
    """
    x = _state(x, basis.n)
    W = _resolve(P, kind, basis.n)
    Z = projection_matrix(basis, x)
    return 0.5 * Z.conj().T @ _apply(W, Z)


def sharp_adjoint(A: np.ndarray, P: np.ndarray | None = None) -> np.ndarray:
    """Weighted adjoint P^-1 A^T P; the plain transpose when P is None."""
    A = np.asarray(A, dtype=float)
    if P is None:
        return A.T.copy()
    P = np.asarray(P, dtype=float)
    if P.shape != A.shape:
        raise DimensionMismatch(f"P has shape {P.shape}, expected {A.shape}")
    defect = np.linalg.norm(P - P.T, "fro")
    if defect > DEFAULT_IDENTITY_TOL * max(np.linalg.norm(P, "fro"), 1e-300):
        raise SingularP("weight is not symmetric; the sharp adjoint needs an SPD P")
    try:
        factor = la.cho_factor(P)
    except la.LinAlgError as exc:
        raise SingularP("weight is not positive definite") from exc
    return la.cho_solve(factor, A.T @ P)


def sharp_commutator(A: np.ndarray, P: np.ndarray | None = None) -> np.ndarray:
    """Commutator A# A - A A# whose vanishing characterizes P-normality."""
    A = np.asarray(A, dtype=float)
    Ash = sharp_adjoint(A, P)
    return Ash @ A - A @ Ash


def normality_index(A: np.ndarray, P: np.ndarray | None = None) -> float:
    """Departure-from-normality index in (0, 1]; 1 means perfectly normal.

    index = 1 / (1 + ||A# A - A A#||_F / ||A||_F^2), A# = P^-1 A^T P.
    """
    A = np.asarray(A, dtype=float)
    norm_A = np.linalg.norm(A, "fro")
    if norm_A == 0.0:
        raise ZeroMatrix("normality index is undefined for the zero matrix")
    comm = sharp_commutator(A, P)
    return float(1.0 / (1.0 + np.linalg.norm(comm, "fro") / norm_A**2))


def sum_error_pct(
    method: MethodKind,
    kind: EnergyKind,
    basis: EigenBasis,
    x: np.ndarray,
    P=None,
    tol: float = NEAR_ZERO_TOL,
) -> float:
    """Percent mismatch between the summed modal energy and the total energy.

    Uses the real part of the modal sum; the imaginary residue is available
    from the complex energy_sum of an EnergyReport.
    """
    x = _state(x, basis.n)
    W = _resolve(P, kind, basis.n)
    v_total = total_energy(x, W)
    if v_total <= tol:
        raise NearZeroState(f"total energy {v_total:.3e} <= {tol:.3e}")
    if method is MethodKind.MOVING_FRAME:
        return 0.0  # the shared scalar is the total energy by definition
    energies = modal_energy(method, kind, basis, x, W)
    return float(100.0 * abs(np.sum(energies).real - v_total) / v_total)


@dataclass(frozen=True)
class EnergyReport:
    """Per-mode energies/powers for one (method, kind) plus consistency data.

    ``mapping_residuals`` holds |s_i - 2 lambda_i e_i| per mode; for the
    moving-frame method, which has no per-mode eigenvalue mapping, it holds
    |total_power/total_energy - 2 lambda_i| instead.  ``missing_energy`` is
    the off-diagonal cross-energy sum for the Hermitian PF method and
    total_energy - energy_sum otherwise.  ``sum_error_pct`` is 0 for a state
    with no energy.
    """

    method: MethodKind
    kind: EnergyKind
    per_mode_energy: np.ndarray
    per_mode_power: np.ndarray
    energy_sum: complex
    total_energy: float
    total_power: float
    missing_energy: complex
    mapping_residuals: np.ndarray
    sum_error_pct: float


def energy_report(
    model: StateSpaceModel,
    basis: EigenBasis,
    x: np.ndarray,
    method: MethodKind,
    kind: EnergyKind = EnergyKind.NORMALIZED,
    tol: float = NEAR_ZERO_TOL,
) -> EnergyReport:
    """Evaluate one modal energy definition at a state and package the result."""
    n = basis.n
    x = _state(x, n)
    W = weight_for(model, kind)
    v_total = total_energy(x, W)
    p_total = total_power(x, model.A, W)
    energies = modal_energy(method, kind, basis, x, W)

    if method is MethodKind.MOVING_FRAME:
        if v_total <= tol:
            powers = np.zeros(n, dtype=complex)
            residuals = np.zeros(n)
        else:
            powers = modal_power(method, kind, basis, x, model.A, W)
            ratio = p_total / v_total
            residuals = np.abs(ratio - 2.0 * basis.lambdas)
        energy_sum = complex(v_total)
    else:
        powers = modal_power(method, kind, basis, x, model.A, W)
        residuals = np.abs(powers - 2.0 * basis.lambdas * energies)
        energy_sum = complex(np.sum(energies))

    if method is MethodKind.HERMITIAN_PF:
        cross = cross_energy(basis, x, W)
        missing = complex(np.sum(cross) - np.trace(cross))
    else:
        missing = complex(v_total - energy_sum)

    pct = 0.0
    if v_total > tol:
        pct = float(100.0 * abs(energy_sum.real - v_total) / v_total)

    return EnergyReport(
        method=method,
        kind=kind,
        per_mode_energy=energies,
        per_mode_power=powers,
        energy_sum=energy_sum,
        total_energy=v_total,
        total_power=p_total,
        missing_energy=missing,
        mapping_residuals=residuals,
        sum_error_pct=pct,
    )
