"""Dense Hermitian/symmetric matrix numerics.

Finite-dimensional versions of the operator facts the rest of the package
leans on: spectral decomposition, PSD square roots, the Douglas
factorization criterion (range inclusion <=> majorization <=> factor),
partial-isometry factors, and the Schatten norm chain
operator_norm <= hs_norm <= trace_norm.

Eigen and singular value problems are delegated to LAPACK through numpy;
this module owns the tolerances, ordering conventions, and rank decisions
so that every caller shares the same semantics.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatchError,
    FactorizationError,
    NonHermitianError,
    NotPositiveSemidefiniteError,
    RangeInclusionError,
)

# Shared relative rank cutoff: singular values / eigenvalues below
# RANK_RTOL * s_1 are treated as zero by douglas_factor, pseudo-inverses,
# and spectral truncation alike.
RANK_RTOL = 1e-10
# Relative tolerance for Hermitian symmetry of eigensolver input.
HERMITIAN_RTOL = 1e-10
# Default relative tolerance for factorization preconditions.
FACTOR_RTOL = 1e-8


def _as_matrix(A, what: str = "matrix") -> np.ndarray:
    arr = np.asarray(A)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatchError(f"expected a nonempty 2-D {what}")
    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
    return arr


def _require_hermitian(A: np.ndarray, tol: float) -> np.ndarray:
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatchError("expected a square matrix")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 0.0)
    defect = float(np.max(np.abs(A - A.conj().T)))
    if defect > tol * scale:
        raise NonHermitianError(f"matrix is not Hermitian (defect {defect:.3e})")
    # Symmetrize away roundoff so downstream results do not depend on which
    # triangle carried the noise.
    return (A + A.conj().T) / 2.0


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float)
        vec = np.array(self.eigenvectors)
        lam.setflags(write=False)
        vec.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", vec)


def eigh(A, tol: float = HERMITIAN_RTOL) -> EigenDecomposition:
    """Full spectral decomposition of a Hermitian matrix.

    Eigenvalues come back descending; ties keep the solver's output order,
    which is deterministic for identical input.  Input that is Hermitian
    only up to `tol` (relative) is symmetrized first; anything worse is
    rejected.
    """
    M = _require_hermitian(_as_matrix(A), tol)
    w, V = np.linalg.eigh(M)
    # LAPACK returns ascending order; reverse to descending.
    return EigenDecomposition(np.ascontiguousarray(w[::-1]), np.ascontiguousarray(V[:, ::-1]))


def psd_sqrt(A, tol: float = RANK_RTOL) -> np.ndarray:
    """Square root of a PSD matrix via its spectral decomposition.

    Eigenvalues in [-tol * max(1, lambda_max), 0) are clipped to zero;
    anything more negative raises NotPositiveSemidefiniteError.
    """
    dec = eigh(A)
    lam = dec.eigenvalues
    scale = max(1.0, float(lam[0]) if lam.size else 0.0)
    if float(lam[-1]) < -tol * scale:
        raise NotPositiveSemidefiniteError(
            f"matrix has a materially negative eigenvalue {lam[-1]:.3e}",
            min_eigenvalue=float(lam[-1]),
        )
    root = np.sqrt(np.clip(lam, 0.0, None))
    S = (dec.eigenvectors * root) @ dec.eigenvectors.conj().T
    return (S + S.conj().T) / 2.0


def singular_values(A) -> np.ndarray:
    """Singular values in descending order (eigenvalues of |A|)."""
    return np.linalg.svd(_as_matrix(A), compute_uv=False)


class SchattenNorms(NamedTuple):
    trace_norm: float
    hs_norm: float
    operator_norm: float


def schatten_norms(A) -> SchattenNorms:
    """(trace, Hilbert-Schmidt, operator) norms from the singular values.

    trace = sum s_n, hs^2 = sum s_n^2 (the Frobenius norm), operator = s_1;
    the chain operator <= hs <= trace holds on every input.
    """
    s = singular_values(A)
    return SchattenNorms(float(np.sum(s)), float(np.sqrt(np.sum(s**2))), float(s[0]))


def schmidt_decomposition(A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular triples (s, U, V) with A = U diag(s) V^* = sum_n s_n u_n v_n^*."""
    U, s, Vh = np.linalg.svd(_as_matrix(A), full_matrices=False)
    return s, U, Vh.conj().T


def _thin_svd(S: np.ndarray, rtol: float = RANK_RTOL):
    """SVD of S restricted to singular values above the shared rank cutoff."""
    U, s, Vh = np.linalg.svd(S, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > rtol * s[0]))
    return U[:, :rank], s[:rank], Vh[:rank, :]


def pinv(A, rtol: float = RANK_RTOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with the shared relative rank cutoff."""
    M = _as_matrix(A)
    U, s, Vh = _thin_svd(M, rtol)
    if s.size == 0:
        return np.zeros((M.shape[1], M.shape[0]), dtype=M.dtype)
    return (Vh.conj().T / s) @ U.conj().T


def douglas_factor(T, S, tol: float = FACTOR_RTOL) -> np.ndarray:
    """Solve T = S F with range(F) orthogonal to kernel(S).

    Precondition is the range inclusion range(T) subset of range(S),
    checked through the projection residual |(I - P_S) T|_F; failure
    raises RangeInclusionError carrying that residual.  The returned F is
    the minimal-norm factor S^+ T, and |F|^2 certifies T T* <= |F|^2 S S*.
    """
    Tm = _as_matrix(T, "matrix T")
    Sm = _as_matrix(S, "matrix S")
    if Tm.shape[0] != Sm.shape[0]:
        raise DimensionMismatchError(
            f"T and S must map into the same space, got {Tm.shape[0]} and {Sm.shape[0]} rows"
        )
    U, s, Vh = _thin_svd(Sm)
    residual = float(np.linalg.norm(Tm - U @ (U.conj().T @ Tm)))
    if residual > tol * max(1.0, float(np.linalg.norm(Tm))):
        raise RangeInclusionError(
            f"range(T) is not contained in range(S); projection residual {residual:.3e}",
            residual=residual,
        )
    # F = S^+ T lands in range(S*) = kernel(S)^perp by construction.
    return (Vh.conj().T / s) @ (U.conj().T @ Tm) if s.size else np.zeros(
        (Sm.shape[1], Tm.shape[1]), dtype=Tm.dtype
    )


def isometric_factor(T, S, tol: float = FACTOR_RTOL) -> np.ndarray:
    """Partial isometry V with T = S V, given T T* = S S*.

    V acts as S^+ T snapped to its nearest partial isometry, so V* V and
    V V* are exact orthogonal projections; the factored residual |S V - T|
    is verified against `tol` before returning.
    """
    Tm = _as_matrix(T, "matrix T")
    Sm = _as_matrix(S, "matrix S")
    if Tm.shape[0] != Sm.shape[0]:
        raise DimensionMismatchError("T and S must have the same number of rows")
    TT = Tm @ Tm.conj().T
    SS = Sm @ Sm.conj().T
    gap = float(np.linalg.norm(TT - SS))
    if gap > tol * max(1.0, float(np.linalg.norm(SS))):
        raise FactorizationError(f"T T* and S S* differ by {gap:.3e}; no isometric factor")
    raw = pinv(Sm) @ Tm
    # Snap singular values to {0, 1}: the exact partial isometry nearest to raw.
    U, s, Vh = np.linalg.svd(raw, full_matrices=False)
    keep = s > 0.5
    V = U[:, keep] @ Vh[keep, :]
    residual = float(np.linalg.norm(Sm @ V - Tm))
    if residual > tol * max(1.0, float(np.linalg.norm(Tm))):
        raise FactorizationError(
            f"isometric factor residual {residual:.3e} exceeds tolerance"
        )
    return V
