"""Linear state-space models, their energy weights, and the swing-equation builder.

A model is a real state matrix A (x' = A x) plus an optional symmetric
positive-definite weight P defining the stored energy 0.5 * x^T P x.  When P is
absent, every "physical" computation falls back to the normalized weight P = I.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidModel, NonFinite, SingularM

# Relative tolerance used when the constructor classifies P (symmetry and
# definiteness); validate_model re-checks with a caller-supplied tolerance.
DEFAULT_WEIGHT_TOL = 1e-9


def _as_square_matrix(value, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidModel(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise NonFinite(f"{name} contains NaN or Inf entries")
    arr.setflags(write=False)
    return arr


def _as_vector(value, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidModel(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise NonFinite(f"{name} contains NaN or Inf entries")
    arr.setflags(write=False)
    return arr


def _weight_is_suspect(P: np.ndarray, tol: float) -> bool:
    """True when P is asymmetric beyond tol or its symmetric part is not PD."""
    defect = np.linalg.norm(P - P.T, "fro")
    if defect > tol * max(np.linalg.norm(P, "fro"), 1e-300):
        return True
    min_eig = float(np.linalg.eigvalsh(0.5 * (P + P.T)).min())
    return min_eig <= 0.0


@dataclass(frozen=True)
class StateSpaceModel:
    """Real LTI system x' = A x with an optional quadratic energy weight P.

    ``p_indefinite`` marks a weight that failed the positive-definiteness or
    symmetry check; such a model still works for normalized energies, but
    physical-energy computations refuse it.
    """

    A: np.ndarray
    P: np.ndarray | None = None
    labels: tuple[str, ...] | None = None
    p_indefinite: bool = False

    def __post_init__(self):
        A = _as_square_matrix(self.A, "A")
        object.__setattr__(self, "A", A)
        if self.P is not None:
            P = _as_square_matrix(self.P, "P")
            if P.shape != A.shape:
                raise InvalidModel(
                    f"P shape {P.shape} does not match A shape {A.shape}"
                )
            object.__setattr__(self, "P", P)
            if _weight_is_suspect(P, DEFAULT_WEIGHT_TOL):
                object.__setattr__(self, "p_indefinite", True)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != A.shape[0]:
                raise InvalidModel(
                    f"{len(labels)} labels given for a {A.shape[0]}-state model"
                )
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class SwingParams:
    """Second-order multi-machine parameters: inertias M, dampings D, stiffness K.

    K does not have to be symmetric (lossy networks give asymmetric K); only
    its symmetric part enters the energy weight.
    """

    M: np.ndarray
    D: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        M = _as_vector(self.M, "M")
        D = _as_vector(self.D, "D")
        K = _as_square_matrix(self.K, "K")
        if np.any(M <= 0.0):
            raise SingularM(f"inertias must be strictly positive, got {M.tolist()}")
        if np.any(D < 0.0):
            raise InvalidModel(f"dampings must be nonnegative, got {D.tolist()}")
        m = M.size
        if D.size != m or K.shape != (m, m):
            raise InvalidModel(
                f"inconsistent sizes: M has {m} machines, D has {D.size}, "
                f"K is {K.shape}"
            )
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "K", K)

    @property
    def m(self) -> int:
        return self.M.size


@dataclass(frozen=True)
class Disturbance:
    """Post-step state deviation x0 applied at the disturbance instant."""

    x0: np.ndarray

    def __post_init__(self):
        x0 = _as_vector(self.x0, "x0")
        object.__setattr__(self, "x0", x0)
        if not np.any(x0 != 0.0):
            warnings.warn(
                "disturbance x0 is identically zero; energy traces will be trivial",
                stacklevel=2,
            )


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking an energy weight for symmetry and definiteness."""

    symmetry_defect: float
    min_eigenvalue: float
    passed: bool


def validate_model(model: StateSpaceModel, tol: float = DEFAULT_WEIGHT_TOL) -> ValidationReport:
    """Check the model's weight P: symmetric within tol and positive definite.

    Passes iff ||P - P^T||_F <= tol * ||P||_F and the smallest eigenvalue of
    the symmetrized weight is strictly positive.  A model without P uses the
    identity weight and passes trivially.
    """
    if not np.isfinite(model.A).all():
        raise NonFinite("A contains NaN or Inf entries")
    if model.P is None:
        return ValidationReport(symmetry_defect=0.0, min_eigenvalue=1.0, passed=True)
    P = model.P
    if not np.isfinite(P).all():
        raise NonFinite("P contains NaN or Inf entries")
    defect = float(np.linalg.norm(P - P.T, "fro"))
    min_eig = float(np.linalg.eigvalsh(0.5 * (P + P.T)).min())
    symmetric = defect <= tol * max(np.linalg.norm(P, "fro"), 1e-300)
    return ValidationReport(
        symmetry_defect=defect,
        min_eigenvalue=min_eig,
        passed=bool(symmetric and min_eig > 0.0),
    )


def build_swing_system(p: SwingParams) -> StateSpaceModel:
    """Linearized swing equations as a first-order model with its energy weight.

    For m machines the state is [delta_1..delta_m, omega_1..omega_m] and

        A = [[0,        I      ],          P = blockdiag(K_sym, M),
             [-M^-1 K,  -M^-1 D]]

    with K_sym = (K + K^T)/2.  Quadratic forms only see the symmetric part of
    K, so the weight uses it; if K_sym is not positive definite the model is
    returned with ``p_indefinite`` set and physical energies will refuse it.
    """
    m = p.m
    Minv = 1.0 / p.M
    A = np.zeros((2 * m, 2 * m))
    A[:m, m:] = np.eye(m)
    A[m:, :m] = -Minv[:, None] * p.K
    A[m:, m:] = -np.diag(Minv * p.D)

    K_sym = 0.5 * (p.K + p.K.T)
    P = np.zeros((2 * m, 2 * m))
    P[:m, :m] = K_sym
    P[m:, m:] = np.diag(p.M)

    indefinite = bool(np.linalg.eigvalsh(K_sym).min() <= 0.0)
    if indefinite:
        warnings.warn(
            "symmetric part of K is not positive definite; the energy weight "
            "is flagged and physical-energy computations will refuse it",
            stacklevel=2,
        )
    labels = tuple(f"delta_{i + 1}" for i in range(m)) + tuple(
        f"omega_{i + 1}" for i in range(m)
    )
    return StateSpaceModel(A=A, P=P, labels=labels, p_indefinite=indefinite)


# ---------------------------------------------------------------------------
# JSON ingestion.  Model file: {"n": int, "A": [[...]], "P": [[...]] | null,
# "labels": [...] | null}.  Swing file: {"M": [...], "D": [...], "K": [[...]]}.
# Matrices are row-major arrays of rows.
# ---------------------------------------------------------------------------

_MODEL_KEYS = {"n", "A", "P", "labels"}
_SWING_KEYS = {"M", "D", "K"}


def model_from_dict(doc: dict) -> StateSpaceModel:
    if not isinstance(doc, dict):
        raise InvalidModel("model document must be a JSON object")
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise InvalidModel(f"unknown model keys: {sorted(unknown)}")
    if "A" not in doc:
        raise InvalidModel('model document is missing "A"')
    model = StateSpaceModel(
        A=doc["A"], P=doc.get("P"), labels=doc.get("labels")
    )
    if "n" in doc and int(doc["n"]) != model.n:
        raise InvalidModel(
            f'declared "n" = {doc["n"]} but A is {model.n}x{model.n}'
        )
    return model


def model_to_dict(model: StateSpaceModel) -> dict:
    return {
        "n": model.n,
        "A": model.A.tolist(),
        "P": None if model.P is None else model.P.tolist(),
        "labels": None if model.labels is None else list(model.labels),
    }


def swing_from_dict(doc: dict) -> SwingParams:
    if not isinstance(doc, dict):
        raise InvalidModel("swing document must be a JSON object")
    missing = _SWING_KEYS - set(doc)
    if missing:
        raise InvalidModel(f"swing document is missing keys: {sorted(missing)}")
    unknown = set(doc) - _SWING_KEYS
    if unknown:
        raise InvalidModel(f"unknown swing keys: {sorted(unknown)}")
    return SwingParams(M=doc["M"], D=doc["D"], K=doc["K"])


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidModel(f"{path}: not valid JSON ({exc})") from exc


def load_model(path) -> StateSpaceModel:
    """Read a model JSON file."""
    return model_from_dict(_load_json(path))


def load_swing(path) -> SwingParams:
    """Read a swing-parameter JSON file."""
    return swing_from_dict(_load_json(path))
