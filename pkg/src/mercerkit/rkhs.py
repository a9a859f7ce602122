"""The reproducing kernel Hilbert space of a kernel over a finite point set.

With m points the space is span{K_{x_1}, ..., K_{x_m}} and everything is
governed by the Gram matrix G: inner products are quadratic forms in G,
membership of a value vector phi means phi lies in range(G), the squared
norm of a member is phi* G^+ phi, and feature maps are square roots of G.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatchError,
    FactorizationError,
    HostMismatchError,
    NotPositiveSemidefiniteError,
)
from .kernels import GramMatrix, Kernel, as_points, gram

# A value vector is declared a member of range(G) when its projection
# residual is below MEMBERSHIP_RTOL * max(1, |phi|).
MEMBERSHIP_RTOL = 1e-8


@dataclass(frozen=True)
class FiniteRkhs:
    """Immutable host: points, Gram matrix, spectral cache, numerical rank."""

    spec: Kernel
    points: np.ndarray
    gram: GramMatrix
    eig: linalg.EigenDecomposition
    rank: int

    @property
    def m(self) -> int:
        return self.points.shape[0]

    def element(self, coefficients) -> "RkhsElement":
        """The function sum_j c_j K_{x_j}, carried as coefficients + values."""
        c = np.asarray(coefficients).reshape(-1)
        if c.size != self.m:
            raise DimensionMismatchError(f"need {self.m} coefficients, got {c.size}")
        return RkhsElement(self, c, self.gram.entries @ c)

    def unit(self, j: int) -> "RkhsElement":
        """The kernel section K_{x_j} itself."""
        if not 0 <= j < self.m:
            raise IndexError(f"point index {j} out of range for {self.m} points")
        c = np.zeros(self.m)
        c[j] = 1.0
        return RkhsElement(self, c, self.gram.entries[:, j].copy())

    def _retained(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenpairs above the shared rank cutoff."""
        lam = self.eig.eigenvalues[: self.rank]
        vec = self.eig.eigenvectors[:, : self.rank]
        return lam, vec


@dataclass(frozen=True)
class RkhsElement:
    host: FiniteRkhs
    coefficients: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class FeatureMap:
    """Linearisation Phi with K(x_i, x_j) = <Phi(x_j), Phi(x_i)>.

    Column j is the feature vector of x_j; Phi* Phi recovers the Gram
    matrix, and for a minimal map the rows span the whole feature space.
    """

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix)
        if mat.ndim != 2:
            raise DimensionMismatchError("feature map must be a 2-D matrix")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def gram_entries(self) -> np.ndarray:
        return self.matrix.conj().T @ self.matrix


def build(spec: Kernel, points, tol: float = 1e-10) -> FiniteRkhs:
    """Construct the RKHS of `spec` over `points`.

    The Gram matrix must be PSD within the relative tolerance; its
    eigendecomposition is cached and the numerical rank is the number of
    eigenvalues above the shared relative cutoff.
    """
    pts = as_points(points)
    G = gram(spec, pts)
    dec = linalg.eigh(G.entries, tol)
    lam = dec.eigenvalues
    scale = max(1.0, float(np.linalg.norm(G.entries, np.inf)))
    if float(lam[-1]) < -tol * scale:
        raise NotPositiveSemidefiniteError(
            f"Gram matrix is not PSD (lambda_min = {lam[-1]:.3e})",
            min_eigenvalue=float(lam[-1]),
        )
    if lam.size == 0 or lam[0] <= 0.0:
        rank = 0
    else:
        rank = int(np.sum(lam > linalg.RANK_RTOL * lam[0]))
    return FiniteRkhs(spec, G.points, G, dec, rank)


def inner(f: RkhsElement, g: RkhsElement):
    """RKHS inner product <f, g> = sum_ij f_i conj(g_j) K(x_j, x_i)."""
    if f.host is not g.host:
        raise HostMismatchError("elements live in different spaces")
    out = np.vdot(g.coefficients, f.values)
    return complex(out) if np.iscomplexobj(out) else float(out)


def reproduce(f: RkhsElement, x_index: int):
    """Evaluate f at a node through the reproducing property <f, K_x>."""
    host = f.host
    if not 0 <= x_index < host.m:
        raise IndexError(f"point index {x_index} out of range for {host.m} points")
    return inner(f, host.unit(x_index))


def minimal_linearisation(h: FiniteRkhs) -> FeatureMap:
    """Spectral feature map Phi = Lambda^{1/2} V* on the retained eigenpairs.

    Minimal by construction: the row count equals the numerical rank, so
    the feature vectors span the whole feature space.
    """
    lam, vec = h._retained()
    return FeatureMap(np.sqrt(lam)[:, None] * vec.conj().T)


def connect_linearisations(phi1: FeatureMap, phi2: FeatureMap,
                           tol: float = 1e-8) -> np.ndarray:
    """Matrix U with U Phi1 = Phi2, unitary between the two feature spaces.

    Both maps must linearise the same kernel (equal Grams within `tol`).
    For minimal maps U* U is the identity on the support of Phi1.
    """
    g1 = phi1.gram_entries
    g2 = phi2.gram_entries
    gap = float(np.linalg.norm(g1 - g2))
    if gap > tol * max(1.0, float(np.linalg.norm(g1))):
        raise FactorizationError(
            f"feature maps disagree on the kernel (Gram gap {gap:.3e})"
        )
    return phi2.matrix @ linalg.pinv(phi1.matrix)


class MembershipResult(NamedTuple):
    member: bool
    norm: float
    certificate: float


def membership(h: FiniteRkhs, phi_values, tol: float = MEMBERSHIP_RTOL) -> MembershipResult:
    """Decide whether a value vector is a function in the space.

    phi belongs to H_K iff phi lies in range(G); then its squared norm is
    phi* G^+ phi, which is also the smallest c with phi phi* <= c G, so it
    doubles as the domination certificate.  Non-members get norm = inf.
    """
    phi = np.asarray(phi_values).reshape(-1)
    if phi.size != h.m:
        raise DimensionMismatchError(f"need {h.m} values, got {phi.size}")
    lam, vec = h._retained()
    coef = vec.conj().T @ phi
    residual = float(np.linalg.norm(phi - vec @ coef))
    if residual > tol * max(1.0, float(np.linalg.norm(phi))):
        return MembershipResult(False, float("inf"), float("inf"))
    norm_sq = float(np.real(np.sum(np.abs(coef) ** 2 / lam))) if lam.size else 0.0
    return MembershipResult(True, float(np.sqrt(max(norm_sq, 0.0))), norm_sq)


class InclusionResult(NamedTuple):
    included: bool
    c: float


def aronszajn_inclusion(hK: FiniteRkhs, hL: FiniteRkhs,
                        tol: float = MEMBERSHIP_RTOL) -> InclusionResult:
    """Test H_K subset of H_L and return the minimal c with K <= c L.

    Decided over the shared point list: every column of G_K must be a
    member of H_L (range inclusion), and then c is the largest eigenvalue
    of G_K whitened by the pseudo-inverse square root of G_L.
    """
    if not np.array_equal(hK.points, hL.points):
        raise HostMismatchError("spaces are built over different point lists")
    GK = hK.gram.entries
    lamL, vecL = hL._retained()
    # Range inclusion: membership of each kernel section of K in H_L.
    for j in range(hK.m):
        col = GK[:, j]
        resid = float(np.linalg.norm(col - vecL @ (vecL.conj().T @ col)))
        if resid > tol * max(1.0, float(np.linalg.norm(col))):
            return InclusionResult(False, float("inf"))
    if lamL.size == 0:
        # L is the zero kernel; inclusion forces K to be zero as well.
        return InclusionResult(True, 0.0)
    white = vecL / np.sqrt(lamL)
    M = white.conj().T @ GK @ white
    M = (M + M.conj().T) / 2.0
    c = float(np.linalg.eigvalsh(M)[-1])
    return InclusionResult(True, max(c, 0.0))


def recover_from_onb(points, basis_values) -> GramMatrix:
    """Rebuild a kernel from orthonormal basis samples.

    `basis_values` has one row per basis function and one column per
    point; the kernel is K(x_i, x_j) = sum_l e_l(x_i) conj(e_l(x_j)).
    """
    pts = as_points(points)
    E = np.asarray(basis_values)
    if E.ndim != 2 or E.shape[1] != pts.shape[0]:
        raise DimensionMismatchError(
            "basis values must have one column per point"
        )
    K = E.T @ np.conj(E)
    return GramMatrix(pts, (K + K.conj().T) / 2.0)
