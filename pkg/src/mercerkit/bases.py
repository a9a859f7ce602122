"""Closed-form orthonormal bases for the polynomial and Gaussian kernels.

For W(x,y) = <x,y>^d the basis is e_a(x) = sqrt(d!/a!) x^a over the
multi-indices of length d; the normalization is the one that makes the
monomial inner product sum (a!/d!) w_a v_a unital and reproduces
sum_a e_a(x) e_a(y) = <x,y>^d through the multinomial theorem.

For the Gaussian kernel exp(-|x-y|^2/sigma^2) the basis is
phi_a(x) = 2^(|a|/2) / (sigma^|a| sqrt(a!)) * exp(-|x|^2/sigma^2) * x^a,
orthonormal under sum_k (sigma^(2k)/2^k) sum_{|a|=k} a! w_a v_a.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .kernels import as_point

# Factorials are exact integers up to this length and go through log-gamma
# beyond it, trading the last bits of precision against overflow.
FACTORIAL_EXACT_LIMIT = 20
DEFAULT_KMAX = 32


def _factorial(k: int) -> float:
    if k <= FACTORIAL_EXACT_LIMIT:
        return float(math.factorial(k))
    return math.exp(math.lgamma(k + 1))


def _multi_factorial(entries: tuple[int, ...]) -> float:
    if sum(entries) <= FACTORIAL_EXACT_LIMIT:
        out = 1
        for a in entries:
            out *= math.factorial(a)
        return float(out)
    return math.exp(sum(math.lgamma(a + 1) for a in entries))


@dataclass(frozen=True)
class MultiIndex:
    """Exponent tuple a = (a_1, ..., a_n) indexing the monomial x^a."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(int(a) for a in self.entries)
        if len(entries) < 1 or any(a < 0 for a in entries):
            raise DimensionMismatchError("multi-index entries must be nonnegative integers")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def length(self) -> int:
        """|a| = sum of the entries (the degree of the monomial)."""
        return sum(self.entries)

    def factorial(self) -> float:
        """a! = product of entry factorials."""
        return _multi_factorial(self.entries)

    def monomial(self, x: np.ndarray) -> float:
        """x^a with the empty-product convention 0^0 = 1."""
        return float(np.prod(np.power(x, self.entries)))


def enumerate_multiindices(n: int, d: int) -> list[MultiIndex]:
    """All multi-indices in n variables with |a| = d, lexicographic.

    The first coordinate decreases from d to 0, so for n=2, d=2 the order
    is (2,0), (1,1), (0,2).  The count is binom(n+d-1, n-1).
    """
    if n < 1:
        raise DimensionMismatchError("need at least one variable")
    if d < 0:
        raise DimensionMismatchError("degree must be nonnegative")

    def rec(vars_left: int, total: int):
        if vars_left == 1:
            yield (total,)
            return
        for head in range(total, -1, -1):
            for tail in rec(vars_left - 1, total - head):
                yield (head,) + tail

    return [MultiIndex(entries) for entries in rec(n, d)]


class WeylBasis:
    """Orthonormal basis of the degree-d polynomial kernel space on R^n."""

    def __init__(self, n: int, d: int):
        self.n = int(n)
        self.d = int(d)
        self.multiindices = tuple(enumerate_multiindices(self.n, self.d))
        fact_d = _factorial(self.d)
        # Per-index data used by evaluation and the inner product.
        self._exponents = np.array([mi.entries for mi in self.multiindices], dtype=int)
        self._factorials = np.array([mi.factorial() for mi in self.multiindices])
        self._inner_weights = self._factorials / fact_d
        self._norms = np.sqrt(fact_d / self._factorials)

    @property
    def dimension(self) -> int:
        """binom(n+d-1, n-1), the number of degree-d monomials."""
        return math.comb(self.n + self.d - 1, self.n - 1)

    def __len__(self) -> int:
        return len(self.multiindices)

    def index_of(self, alpha: MultiIndex) -> int:
        try:
            return self.multiindices.index(alpha)
        except ValueError:
            raise DimensionMismatchError(f"{alpha} is not a degree-{self.d} index in {self.n} variables") from None

    def section_coefficients(self, y) -> np.ndarray:
        """Monomial coefficients of the kernel section W_y: (d!/a!) y^a."""
        yp = self._check_point(y)
        mon = np.prod(np.power(yp[None, :], self._exponents), axis=1)
        return mon / self._inner_weights

    def _check_point(self, x) -> np.ndarray:
        xp = as_point(x)
        if xp.size != self.n:
            raise DimensionMismatchError(f"expected a point in R^{self.n}, got R^{xp.size}")
        return xp

    def evaluate_all(self, x) -> np.ndarray:
        """Vector of e_a(x) over the whole enumeration."""
        xp = self._check_point(x)
        mon = np.prod(np.power(xp[None, :], self._exponents), axis=1)
        return self._norms * mon


def weyl_basis_eval(basis: WeylBasis, alpha: MultiIndex, x) -> float:
    """e_a(x) = sqrt(d!/a!) x^a for |a| = d."""
    if alpha.length != basis.d:
        raise DimensionMismatchError(
            f"multi-index has length {alpha.length}, basis degree is {basis.d}"
        )
    xp = basis._check_point(x)
    return math.sqrt(_factorial(basis.d) / alpha.factorial()) * alpha.monomial(xp)


def weyl_inner(basis: WeylBasis, w_coefficients, v_coefficients) -> float:
    """Inner product sum_a (a!/d!) w_a v_a on monomial coefficients."""
    w = np.asarray(w_coefficients, dtype=float).reshape(-1)
    v = np.asarray(v_coefficients, dtype=float).reshape(-1)
    if w.size != len(basis) or v.size != len(basis):
        raise DimensionMismatchError(
            f"coefficient lists must have length {len(basis)}"
        )
    return float(np.sum(basis._inner_weights * w * v))


class GaussBasis:
    """Truncated Gaussian-kernel basis: all phi_a with |a| <= k_max."""

    def __init__(self, n: int, sigma: float, k_max: int = DEFAULT_KMAX):
        if not sigma > 0:
            raise DimensionMismatchError("bandwidth must be positive")
        if k_max < 0:
            raise DimensionMismatchError("truncation order must be nonnegative")
        self.n = int(n)
        self.sigma = float(sigma)
        self.k_max = int(k_max)
        index_list: list[MultiIndex] = []
        for k in range(self.k_max + 1):
            index_list.extend(enumerate_multiindices(self.n, k))
        self.multiindices = tuple(index_list)
        self._exponents = np.array([mi.entries for mi in self.multiindices], dtype=int)
        self._degrees = np.array([mi.length for mi in self.multiindices], dtype=int)
        self._factorials = np.array([mi.factorial() for mi in self.multiindices])
        s2 = self.sigma**2
        # Normalizations c_a = 2^(k/2) / (sigma^k sqrt(a!)) and the inner
        # product weights sigma^(2k)/2^k * a!; their squares are inverse.
        self._norms = np.power(2.0 / s2, self._degrees / 2.0) / np.sqrt(self._factorials)
        self._inner_weights = np.power(s2 / 2.0, self._degrees.astype(float)) * self._factorials

    def __len__(self) -> int:
        return len(self.multiindices)

    def index_of(self, alpha: MultiIndex) -> int:
        try:
            return self.multiindices.index(alpha)
        except ValueError:
            raise DimensionMismatchError(
                f"{alpha} is not enumerated up to k_max={self.k_max} in {self.n} variables"
            ) from None

    def phi_coefficients(self, alpha: MultiIndex) -> np.ndarray:
        """Monomial coefficients of phi_a (a single scaled monomial)."""
        out = np.zeros(len(self))
        i = self.index_of(alpha)
        out[i] = self._norms[i]
        return out

    def _check_point(self, x) -> np.ndarray:
        xp = as_point(x)
        if xp.size != self.n:
            raise DimensionMismatchError(f"expected a point in R^{self.n}, got R^{xp.size}")
        return xp

    def evaluate_all(self, x) -> np.ndarray:
        """Vector of phi_a(x) over the whole enumeration."""
        xp = self._check_point(x)
        mon = np.prod(np.power(xp[None, :], self._exponents), axis=1)
        damp = math.exp(-float(np.dot(xp, xp)) / self.sigma**2)
        return self._norms * damp * mon


def gauss_basis_eval(basis: GaussBasis, alpha: MultiIndex, x) -> float:
    """phi_a(x) = 2^(|a|/2)/(sigma^|a| sqrt(a!)) exp(-|x|^2/sigma^2) x^a."""
    if alpha.length > basis.k_max:
        raise DimensionMismatchError(
            f"|alpha| = {alpha.length} exceeds the truncation order {basis.k_max}"
        )
    xp = basis._check_point(x)
    k = alpha.length
    norm = 2.0 ** (k / 2.0) / (basis.sigma**k * math.sqrt(alpha.factorial()))
    damp = math.exp(-float(np.dot(xp, xp)) / basis.sigma**2)
    return norm * damp * alpha.monomial(xp)


def gauss_inner(basis: GaussBasis, w_coefficients, v_coefficients) -> float:
    """Inner product sum_k (sigma^(2k)/2^k) sum_{|a|=k} a! w_a v_a."""
    w = np.asarray(w_coefficients, dtype=float).reshape(-1)
    v = np.asarray(v_coefficients, dtype=float).reshape(-1)
    if w.size != len(basis) or v.size != len(basis):
        raise DimensionMismatchError(
            f"coefficient lists must have length {len(basis)}"
        )
    return float(np.sum(basis._inner_weights * w * v))


def _exp_tail(t: float, k_max: int) -> float:
    """sum_{k > k_max} t^k / k!, summed forward from the first tail term."""
    if t == 0.0:
        return 0.0
    term = 1.0
    for k in range(1, k_max + 2):
        term *= t / k
    total = term
    k = k_max + 2
    while k < k_max + 2 + 1000:
        term *= t / k
        total += term
        if term <= 1e-17 * total:
            break
        k += 1
    return total


def gauss_partial_reconstruction(basis: GaussBasis, x, y) -> tuple[float, float]:
    """Truncated expansion sum_{|a| <= k_max} phi_a(x) phi_a(y) with a tail bound.

    Returns (value, bound) where the true kernel satisfies
    |exp(-|x-y|^2/sigma^2) - value| <= bound in exact arithmetic, with
    bound = exp(-(|x|^2+|y|^2)/sigma^2) * sum_{k > k_max} (2|x||y|/sigma^2)^k / k!.
    """
    xp = basis._check_point(x)
    yp = basis._check_point(y)
    s2 = basis.sigma**2
    # phi_a(x) phi_a(y) = (2/sigma^2)^k / a! * damp * (x*y)^a with k = |a|.
    xy = xp * yp
    mon = np.prod(np.power(xy[None, :], basis._exponents), axis=1)
    weights = np.power(2.0 / s2, basis._degrees.astype(float)) / basis._factorials
    damp = math.exp(-(float(np.dot(xp, xp)) + float(np.dot(yp, yp))) / s2)
    value = damp * float(np.sum(weights * mon))
    t = 2.0 * float(np.linalg.norm(xp)) * float(np.linalg.norm(yp)) / s2
    bound = damp * _exp_tail(t, basis.k_max)
    return value, bound
