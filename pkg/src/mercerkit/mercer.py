"""Discretized integral operator, its spectrum, and the reconstruction identities.

The operator (L_K f)(x) = integral of K(x,t) f(t) dnu(t) is replaced by its
quadrature form on the nodes of a DiscreteMeasure.  The symmetrized matrix
A = D^(1/2) G D^(1/2) (D = diag of weights) is similar to G D, so its
eigenvalues are the Nystrom approximations of the operator spectrum while
staying inside Hermitian eigensolver territory.  Eigenvectors u_n convert to
L2(nu)-orthonormal eigenfunction samples phi_n(x_i) = u_n[i] / sqrt(w_i),
and the Nystrom formula extends them off the nodes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg, rkhs
from .errors import DimensionMismatchError, NotPositiveSemidefiniteError, PreconditionError
from .kernels import (
    PSD_RTOL,
    GramMatrix,
    Kernel,
    Tabulated,
    as_points,
    check_psd,
    cross_gram,
    evaluate,
    gram,
)
from .measures import DiscreteMeasure, l2_norm

# Eigenvalues below CLIP_RTOL * lambda_1 count as zero: they are excluded
# from every division (coefficient ratios, Nystrom extension) to avoid
# amplifying eigensolver noise near the numerical kernel rank.
CLIP_RTOL = 1e-12

# Slack for the dominance certificate c <= s_1(A) * (1 + DOMINANCE_RTOL).
DOMINANCE_RTOL = 1e-8


@dataclass(frozen=True)
class NystromOperator:
    """Quadrature discretization of L_K on the nodes of a measure."""

    measure: DiscreteMeasure
    gram: GramMatrix
    matrix: np.ndarray

    def __post_init__(self):
        A = np.array(self.matrix)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != self.measure.m:
            raise DimensionMismatchError("operator matrix must be square over the nodes")
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @property
    def m(self) -> int:
        return self.measure.m

    def apply(self, values):
        """(L_K f) sampled at the nodes: sum_j w_j K(x_i,x_j) f(x_j)."""
        f = np.asarray(values).reshape(-1)
        if f.size != self.m:
            raise DimensionMismatchError(f"{f.size} values for {self.m} nodes")
        return self.gram.entries @ (self.measure.weights * f)


def assemble(spec: Kernel, mu: DiscreteMeasure, tol: float = PSD_RTOL) -> NystromOperator:
    """Build A = D^(1/2) G D^(1/2) for a Mercer kernel on the given measure.

    The Gram matrix must be Hermitian and PSD within `tol` (relative to
    max(1, its sup-norm)); indefinite input raises NotPositiveSemidefiniteError.
    """
    gm = gram(spec, mu.points)
    psd = check_psd(gm.entries, tol)
    if not psd.ok:
        raise NotPositiveSemidefiniteError(
            f"Gram matrix is not PSD (min eigenvalue {psd.min_eigenvalue:.3e})",
            min_eigenvalue=psd.min_eigenvalue,
        )
    root = np.sqrt(mu.weights)
    A = root[:, None] * gm.entries * root[None, :]
    A = (A + A.conj().T) / 2.0
    return NystromOperator(mu, gm, A)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Clipped eigenvalues of A with L2(nu)-orthonormal eigenfunction samples.

    `eigenvalues` holds the full descending list (negatives clipped at 0);
    `functions` holds one column per retained mode, where retained means
    lambda_n > CLIP_RTOL * lambda_1.  Column n evaluates phi_n at the nodes.
    """

    measure: DiscreteMeasure
    eigenvalues: np.ndarray
    functions: np.ndarray
    rank: int

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float)
        funcs = np.array(self.functions)
        lam.setflags(write=False)
        funcs.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "functions", funcs)


def spectrum(op: NystromOperator) -> SpectralDecomposition:
    dec = linalg.eigh(op.matrix)
    lam = np.clip(dec.eigenvalues, 0.0, None)
    top = float(lam[0]) if lam.size else 0.0
    rank = int(np.count_nonzero(lam > CLIP_RTOL * top)) if top > 0.0 else 0
    root = np.sqrt(op.measure.weights)
    funcs = dec.eigenvectors[:, :rank] / root[:, None]
    return SpectralDecomposition(op.measure, lam, funcs, rank)


def nystrom_extend(dec: SpectralDecomposition, spec: Kernel, n: int, x):
    """phi_n off the nodes: (1/lambda_n) sum_j w_j K(x,x_j) phi_n(x_j).

    At a node the formula collapses to the eigen-relation, so it returns
    the stored sample exactly.  Modes at or beyond the numerical rank have
    no stable extension and raise IndexError.
    """
    if not 0 <= n < dec.rank:
        raise IndexError(f"mode {n} is beyond the numerical rank {dec.rank}")
    row = cross_gram(spec, [x], dec.measure.points)[0]
    out = row @ (dec.measure.weights * dec.functions[:, n]) / dec.eigenvalues[n]
    return complex(out) if np.iscomplexobj(out) else float(out)


def extension_matrix(dec: SpectralDecomposition, spec: Kernel, eval_points) -> np.ndarray:
    """All retained eigenfunctions extended to `eval_points`, one per column."""
    pts = as_points(eval_points)
    B = cross_gram(spec, pts, dec.measure.points)
    lam = dec.eigenvalues[: dec.rank]
    return (B @ (dec.measure.weights[:, None] * dec.functions)) / lam[None, :]


class MercerReport(NamedTuple):
    order: int
    sup_error: float
    remainder_diagonal_trace: float
    trace_gap: float
    hs_gap: float


def mercer_partial_sum(dec: SpectralDecomposition, spec: Kernel, N: int,
                       eval_points) -> MercerReport:
    """Truncated expansion S_N(x,y) = sum_{n<=N} lambda_n phi_n(x) conj(phi_n(y)).

    Reports the sup of |K - S_N| over all pairs from `eval_points`, the trace
    of the remainder on the evaluation diagonal, and the trace / HS identity
    gaps of the decomposition.  Requires N <= rank.
    """
    if not 0 <= N <= dec.rank:
        raise IndexError(f"order {N} is beyond the numerical rank {dec.rank}")
    pts = as_points(eval_points)
    kmat = cross_gram(spec, pts, pts)
    phi = extension_matrix(dec, spec, pts)[:, :N]
    lam = dec.eigenvalues[:N]
    partial = (phi * lam[None, :]) @ phi.conj().T
    resid = kmat - partial
    sup_error = float(np.max(np.abs(resid))) if resid.size else 0.0
    diag_trace = float(np.real(np.trace(resid)))
    return MercerReport(
        order=int(N),
        sup_error=sup_error,
        remainder_diagonal_trace=diag_trace,
        trace_gap=trace_check(dec, spec, dec.measure),
        hs_gap=hs_check(dec, spec, dec.measure),
    )


def reconstruction_errors(dec: SpectralDecomposition, spec: Kernel,
                          eval_points) -> tuple[np.ndarray, np.ndarray]:
    """Sup-errors and diagonal remainders for every truncation order at once.

    Entry N of either array corresponds to S_N; index 0 is the empty sum.
    One pass over a running remainder matrix keeps the cost at one rank-one
    update per mode instead of a fresh expansion per order.
    """
    pts = as_points(eval_points)
    resid = np.array(cross_gram(spec, pts, pts))
    phi = extension_matrix(dec, spec, pts)
    sup = np.empty(dec.rank + 1)
    dini = np.empty(dec.rank + 1)
    sup[0] = np.max(np.abs(resid)) if resid.size else 0.0
    dini[0] = np.max(np.real(np.diagonal(resid))) if resid.size else 0.0
    for n in range(dec.rank):
        col = phi[:, n]
        resid -= dec.eigenvalues[n] * np.outer(col, col.conj())
        sup[n + 1] = np.max(np.abs(resid))
        dini[n + 1] = np.max(np.real(np.diagonal(resid)))
    return sup, dini


def dini_remainders(dec: SpectralDecomposition, spec: Kernel, eval_points) -> np.ndarray:
    """d_N = max_x (K(x,x) - sum_{n<=N} lambda_n |phi_n(x)|^2), N = 0..rank.

    The diagonal remainders of a PSD kernel dominate the off-diagonal ones
    (Schwarz), so this sequence being nonincreasing and ending near zero is
    the discrete footprint of uniform convergence.  The diagonal K(x,x) is
    evaluated pointwise, independently of the block evaluation path.
    """
    pts = as_points(eval_points)
    diag = np.array([float(np.real(evaluate(spec, x, x))) for x in pts])
    phi = extension_matrix(dec, spec, pts)
    out = np.empty(dec.rank + 1)
    out[0] = np.max(diag) if diag.size else 0.0
    for n in range(dec.rank):
        diag = diag - dec.eigenvalues[n] * np.abs(phi[:, n]) ** 2
        out[n + 1] = np.max(diag)
    return out


def trace_check(dec: SpectralDecomposition, spec: Kernel, mu: DiscreteMeasure) -> float:
    """Relative gap |sum lambda_n - sum_i w_i K(x_i,x_i)| / max(1, sum lambda_n).

    The right-hand side is recomputed from the kernel spec one diagonal
    entry at a time, so the two sides share no intermediate results.
    """
    lhs = float(np.sum(dec.eigenvalues))
    rhs = float(np.dot(mu.weights,
                       [float(np.real(evaluate(spec, x, x))) for x in mu.points]))
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def hs_check(dec: SpectralDecomposition, spec: Kernel, mu: DiscreteMeasure) -> float:
    """Relative gap between sum lambda_n^2 and the double quadrature sum of |K|^2."""
    lhs = float(np.sum(dec.eigenvalues**2))
    block = cross_gram(spec, mu.points, mu.points)
    rhs = float(mu.weights @ (np.abs(block) ** 2) @ mu.weights)
    return abs(lhs - rhs) / max(1.0, abs(lhs))


@dataclass(frozen=True)
class IteratedKernelResult:
    """K2(x,y) = sum_t w_t K(x,t) K(t,y) tabulated on the nodes, plus checks.

    matrix_gap is the Frobenius distance between the operator matrix of K2
    and A^2 (they agree in exact arithmetic); matrix_scale is ||A||_F^2, the
    natural yardstick for that gap.  `inclusion` certifies K2 <= c K through
    the range-space ordering, and `dominated` records whether the certified
    constant stays within DOMINANCE_RTOL of the operator norm s_1(A).
    """

    kernel: Tabulated
    matrix_gap: float
    matrix_scale: float
    psd_ok: bool
    min_eigenvalue: float
    operator_norm: float
    inclusion: rkhs.InclusionResult
    dominated: bool


def iterated_kernel(spec: Kernel, mu: DiscreteMeasure,
                    tol: float = PSD_RTOL) -> IteratedKernelResult:
    op = assemble(spec, mu, tol)
    G = op.gram.entries
    G2 = G @ (mu.weights[:, None] * G)
    G2 = (G2 + G2.conj().T) / 2.0
    kernel2 = Tabulated(mu.points, G2)

    root = np.sqrt(mu.weights)
    A = op.matrix
    A2 = root[:, None] * G2 * root[None, :]
    gap = float(np.linalg.norm(A2 - A @ A))
    scale = float(np.linalg.norm(A)) ** 2

    psd = check_psd(G2, tol)
    s1 = max(float(np.linalg.eigvalsh(A)[-1]), 0.0)

    host_k = rkhs.build(spec, mu.points)
    host_k2 = rkhs.build(kernel2, mu.points)
    incl = rkhs.aronszajn_inclusion(host_k2, host_k)
    dominated = bool(incl.included and incl.c <= s1 * (1.0 + DOMINANCE_RTOL))

    return IteratedKernelResult(
        kernel=kernel2,
        matrix_gap=gap,
        matrix_scale=scale,
        psd_ok=psd.ok,
        min_eigenvalue=psd.min_eigenvalue,
        operator_norm=s1,
        inclusion=incl,
        dominated=dominated,
    )


class SpectralMembershipResult(NamedTuple):
    member: bool
    norm: float
    coefficients: np.ndarray


def spectral_membership(dec: SpectralDecomposition, values,
                        tol: float = rkhs.MEMBERSHIP_RTOL) -> SpectralMembershipResult:
    """Range test through the eigenbasis: f in H_K iff f is an L2 combination
    of retained eigenfunctions, with ||f||_K^2 = sum |f_n|^2 / lambda_n.

    f_n = <f, phi_n> in L2(nu).  Membership requires the L2 residual after
    projecting onto the retained modes to be at most tol * max(1, ||f||_L2);
    non-members get norm = inf.
    """
    f = np.asarray(values).reshape(-1)
    if f.size != dec.measure.m:
        raise DimensionMismatchError(f"{f.size} samples for {dec.measure.m} nodes")
    coef = dec.functions.conj().T @ (dec.measure.weights * f)
    resid = l2_norm(dec.measure, f - dec.functions @ coef)
    scale = max(1.0, l2_norm(dec.measure, f))
    if resid > tol * scale:
        return SpectralMembershipResult(False, float("inf"), coef)
    lam = dec.eigenvalues[: dec.rank]
    norm = float(np.sqrt(np.sum(np.abs(coef) ** 2 / lam))) if dec.rank else 0.0
    return SpectralMembershipResult(True, norm, coef)


def converse_psd_check(G, mu: DiscreteMeasure, tol: float = PSD_RTOL) -> bool:
    """Verdict of the equivalence: D^(1/2) G D^(1/2) is PSD iff G is PSD.

    Runs both eigen-tests and demands agreement; with strictly positive
    weights the two matrices are congruent, so a disagreement can only mean
    the input sits on the tolerance boundary, and that is reported as an
    error rather than an arbitrary verdict.
    """
    M = G.entries if isinstance(G, GramMatrix) else np.asarray(G, dtype=None)
    if M.shape[0] != mu.m:
        raise DimensionMismatchError(f"{M.shape[0]}x{M.shape[1]} matrix for {mu.m} nodes")
    direct = check_psd(M, tol)
    root = np.sqrt(mu.weights)
    A = root[:, None] * M * root[None, :]
    weighted = check_psd((A + A.conj().T) / 2.0, tol)
    if direct.ok != weighted.ok:
        raise PreconditionError(
            "weighted and unweighted PSD tests disagree "
            f"(min eigenvalues {direct.min_eigenvalue:.3e} vs {weighted.min_eigenvalue:.3e})"
        )
    return direct.ok
