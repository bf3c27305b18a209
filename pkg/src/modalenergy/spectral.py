"""Nonsymmetric eigendecomposition with deterministic biorthonormal scaling.

``decompose`` returns eigenvalues with right/left eigenvector matrices scaled
so that V U^T = I (plain transpose, not conjugate transpose).  Conjugate pairs
of a real state matrix are enforced exactly: the negative-imaginary member of
a pair is the elementwise conjugate of the positive one, bit for bit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import DefectiveMatrix, DimensionMismatch, ModalEnergyError, NonFinite

DEFAULT_DECOMPOSE_TOL = 1e-8


@dataclass(frozen=True)
class EigenBasis:
    """Eigenvalues plus biorthonormal right (V) and left (U) eigenvectors.

    ``pairs`` lists conjugate pairs as (i, j) with i the positive-imaginary
    member, and real modes as 1-tuples.  ``degenerate_clusters`` lists groups
    of numerically repeated eigenvalues; modal energies within such a cluster
    depend on the (valid but arbitrary) basis choice.
    """

    lambdas: np.ndarray
    V: np.ndarray
    U: np.ndarray
    pairs: tuple[tuple[int, ...], ...]
    degenerate_clusters: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        for name in ("lambdas", "V", "U"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.lambdas.size


def _canonical_column(v: np.ndarray) -> np.ndarray:
    """Unit norm with the largest-magnitude entry rotated to be real positive."""
    k = int(np.argmax(np.abs(v)))
    pivot = v[k]
    if pivot != 0:
        v = v * (pivot.conjugate() / abs(pivot))
    nrm = np.linalg.norm(v)
    if nrm > 0:
        v = v / nrm
    return v


def _match_conjugate_pairs(lam: np.ndarray, tol: float) -> list[tuple[int, ...]]:
    """Group mode indices into conjugate pairs and real singletons."""
    n = lam.size
    unassigned = set(range(n))
    groups: list[tuple[int, ...]] = []
    for i in range(n):
        if i not in unassigned:
            continue
        unassigned.remove(i)
        scale = tol * (1.0 + abs(lam[i]))
        if abs(lam[i].imag) <= scale:
            groups.append((i,))
            continue
        best_j, best_d = -1, np.inf
        for j in unassigned:
            if lam[i].imag * lam[j].imag >= 0:
                continue
            d = abs(lam[i] - lam[j].conjugate())
            if d < best_d:
                best_j, best_d = j, d
        if best_j < 0 or best_d > scale:
            raise ModalEnergyError(
                f"eigenvalue {lam[i]} has no conjugate partner; "
                "decompose expects a real state matrix"
            )
        unassigned.remove(best_j)
        if lam[i].imag > 0:
            groups.append((i, best_j))
        else:
            groups.append((best_j, i))
    return groups


def decompose(A: np.ndarray, tol: float = DEFAULT_DECOMPOSE_TOL) -> EigenBasis:
    """Eigendecompose a real matrix with the scaling convention of this package.

    Right eigenvectors get unit Euclidean norm and a real-positive
    largest-magnitude entry; left eigenvectors are the rows of V^-1, so
    V U^T = I holds to machine precision even for repeated-but-diagonalizable
    eigenvalues.  Modes are sorted by descending real part, ties broken by
    descending imaginary part.

    Raises DefectiveMatrix when for some mode the raw alignment |u^T v| of
    unit-norm left/right eigenvectors falls below ``tol``: the modal expansion
    does not exist (Jordan block or a numerically inseparable cluster).
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise NonFinite("state matrix contains NaN or Inf entries")
    n = A.shape[0]

    lam, V = la.eig(A)
    V = V.astype(complex, copy=True)
    order = np.lexsort((-lam.imag, -lam.real))
    lam, V = lam[order], V[:, order]

    groups = _match_conjugate_pairs(lam, tol)
    for group in groups:
        if len(group) == 1:
            i = group[0]
            lam[i] = complex(lam[i].real, 0.0)
            v = _canonical_column(V[:, i])
            if np.abs(v.imag).max() <= tol:
                v = v.real.astype(complex)
            V[:, i] = v
        else:
            i, j = group
            lam[i] = 0.5 * (lam[i] + lam[j].conjugate())
            lam[j] = lam[i].conjugate()
            V[:, i] = _canonical_column(V[:, i])
            V[:, j] = V[:, i].conjugate()

    # Symmetrization may nudge values, so fix the final order afterwards.
    order = np.lexsort((-lam.imag, -lam.real))
    pos = np.empty(n, dtype=int)
    pos[order] = np.arange(n)
    lam, V = lam[order], V[:, order]
    pairs = tuple(
        sorted(tuple(int(pos[k]) for k in group) for group in groups)
    )

    try:
        Vinv = la.inv(V)
    except la.LinAlgError as exc:
        raise DefectiveMatrix(0, 0.0) from exc
    if not np.isfinite(Vinv).all():
        raise DefectiveMatrix(0, 0.0)

    # With unit-norm v_i, the raw alignment |u^T v| of unit-norm vectors is
    # exactly the reciprocal norm of row i of V^-1.
    alignment = 1.0 / np.linalg.norm(Vinv, axis=1)
    worst = int(np.argmin(alignment))
    if alignment[worst] < tol:
        raise DefectiveMatrix(worst, float(alignment[worst]))

    for group in pairs:
        if len(group) == 2:
            i, j = group
            Vinv[j, :] = Vinv[i, :].conjugate()
        else:
            i = group[0]
            Vinv[i, :] = Vinv[i, :].real

    clusters = []
    start = 0
    for k in range(1, n + 1):
        if k == n or abs(lam[k] - lam[start]) > tol * (1.0 + abs(lam[start])):
            if k - start > 1:
                clusters.append(tuple(range(start, k)))
            start = k
    if clusters:
        warnings.warn(
            f"repeated eigenvalues detected (clusters {clusters}); modal "
            "energies within a cluster are basis-dependent",
            stacklevel=2,
        )

    return EigenBasis(
        lambdas=lam,
        V=V,
        U=Vinv.T.copy(),
        pairs=pairs,
        degenerate_clusters=tuple(clusters),
    )


def modal_projection(basis: EigenBasis, x: np.ndarray, i: int) -> np.ndarray:
    """Component of the state living in mode i: z_i = v_i (u_i^T x)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (basis.n,):
        raise DimensionMismatch(f"state has shape {x.shape}, expected ({basis.n},)")
    return basis.V[:, i] * (basis.U[:, i] @ x)


def projection_matrix(basis: EigenBasis, x: np.ndarray) -> np.ndarray:
    """All modal projections at once; column i is z_i = v_i (u_i^T x)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (basis.n,):
        raise DimensionMismatch(f"state has shape {x.shape}, expected ({basis.n},)")
    return basis.V * (basis.U.T @ x)[None, :]


def participation_matrix(basis: EigenBasis) -> np.ndarray:
    """Participation factors p_ki = u_ki * v_ki; every column sums to one."""
    return basis.U * basis.V


def residual_norms(basis: EigenBasis, A: np.ndarray) -> dict[str, float]:
    """Spectral residuals of a basis against its matrix, for reporting."""
    A = np.asarray(A, dtype=float)
    norm_A = np.linalg.norm(A, "fro")
    scale = max(norm_A, 1e-300)
    right = np.linalg.norm(A @ basis.V - basis.V * basis.lambdas[None, :], "fro")
    left = np.linalg.norm(basis.U.T @ A - basis.lambdas[:, None] * basis.U.T, "fro")
    biorth = np.linalg.norm(basis.V @ basis.U.T - np.eye(basis.n), "fro")
    return {
        "right_relative": float(right / scale),
        "left_relative": float(left / scale),
        "biorthogonality": float(biorth),
    }
