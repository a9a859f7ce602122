"""Kernel definitions, Gram assembly, and pointwise structural checks.

A kernel here is a positive semidefinite function K on pairs of points in
R^n (or on a fixed finite point set for tabulated data).  Built-ins cover
the homogeneous polynomial kernel <x,y>^d, the Gaussian kernel
exp(-|x-y|^2/sigma^2), the identity kernel on a discrete set, rank-one
kernels phi(x)*conj(phi(y)), and the closure operations sum, nonnegative
scaling, and conjugation by a scalar function.

Everything is immutable after construction and evaluation is pure, so
kernel objects can be shared freely across threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import csvio
from .config import thread_count
from .errors import (
    DimensionMismatchError,
    DuplicatePointError,
    KernelParseError,
    NonHermitianError,
    UnknownPointError,
)

# Relative tolerance for the default PSD test: lambda_min >= -tol * max(1, |G|_inf).
PSD_RTOL = 1e-10
# Relative tolerance for Hermitian symmetry checks.
HERMITIAN_RTOL = 1e-10
# Entrywise work threshold above which generic Gram assembly uses threads.
_PARALLEL_CUTOFF = 4096


def as_point(x) -> np.ndarray:
    """Coerce to a finite 1-D float coordinate vector."""
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1 or p.size < 1:
        raise DimensionMismatchError("a point must be a 1-D coordinate vector")
    if not np.all(np.isfinite(p)):
        raise DimensionMismatchError("point has non-finite coordinates")
    return p


def as_points(points) -> np.ndarray:
    """Coerce to an (m, n) array of m points; 1-D input is read as m scalars."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatchError("expected a nonempty (m, n) point array")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatchError("point list has non-finite coordinates")
    return arr


class _PointTable:
    """Exact-coordinate index of a point list.

    Lookup is by coordinate identity (bitwise), never by tolerance, so
    tabulated kernels effectively address points by index.
    """

    def __init__(self, points: np.ndarray):
        self.points = points
        self._index: dict[bytes, int] = {}
        for i, row in enumerate(points):
            key = row.tobytes()
            if key in self._index:
                raise DuplicatePointError(f"point {row.tolist()} appears twice in the table")
            self._index[key] = i

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def lookup(self, x: np.ndarray) -> int:
        if x.size != self.dim:
            raise DimensionMismatchError(
                f"point has dimension {x.size}, table holds dimension {self.dim}"
            )
        try:
            return self._index[x.tobytes()]
        except KeyError:
            raise UnknownPointError(f"point {x.tolist()} is not in the table") from None

    def lookup_many(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self.lookup(x) for x in xs], dtype=int)


class Kernel:
    """Base class of all kernel specs."""

    def _eval(self, x: np.ndarray, y: np.ndarray):
        raise NotImplementedError

    def _cross(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Dense block K(xs_i, ys_j); subclasses override with closed forms."""
        m, k = xs.shape[0], ys.shape[0]
        rows: list = [None] * m

        def fill(i):
            rows[i] = np.asarray([self._eval(xs[i], y) for y in ys])

        threads = thread_count()
        if m * k >= _PARALLEL_CUTOFF and threads > 1 and m > 1:
            with ThreadPoolExecutor(max_workers=min(threads, m)) as pool:
                list(pool.map(fill, range(m)))
        else:
            for i in range(m):
                fill(i)
        return np.vstack(rows)

    def __call__(self, x, y):
        return evaluate(self, x, y)


@dataclass(frozen=True)
class Weyl(Kernel):
    """Homogeneous polynomial kernel W(x, y) = <x, y>^d.

    Degree 0 is the constant kernel 1 (empty product convention).
    """

    degree: int

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 0:
            raise KernelParseError(f"weyl degree must be a nonnegative integer, got {self.degree}")
        object.__setattr__(self, "degree", int(self.degree))

    def _eval(self, x, y):
        return float(np.dot(x, y)) ** self.degree

    def _cross(self, xs, ys):
        return (xs @ ys.T) ** self.degree


@dataclass(frozen=True)
class Gaussian(Kernel):
    """Gaussian kernel exp(-|x - y|^2 / sigma^2)."""

    sigma: float

    def __post_init__(self):
        sigma = float(self.sigma)
        if not (sigma > 0 and math.isfinite(sigma)):
            raise KernelParseError(f"gaussian bandwidth must be positive, got {self.sigma}")
        object.__setattr__(self, "sigma", sigma)

    def _eval(self, x, y):
        diff = x - y
        return math.exp(-float(np.dot(diff, diff)) / self.sigma**2)

    def _cross(self, xs, ys):
        # Explicit differences keep the diagonal exactly zero before exp.
        diff = xs[:, None, :] - ys[None, :, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        return np.exp(-sq / self.sigma**2)


@dataclass(frozen=True)
class Identity(Kernel):
    """Kernel of the counting structure: 1 on identical points, else 0.

    Point identity is exact coordinate equality; on a pairwise distinct
    point list the Gram matrix is the identity.
    """

    def _eval(self, x, y):
        return 1.0 if x.size == y.size and np.array_equal(x, y) else 0.0

    def _cross(self, xs, ys):
        keys = {}
        for j, row in enumerate(ys):
            keys.setdefault(row.tobytes(), []).append(j)
        out = np.zeros((xs.shape[0], ys.shape[0]))
        for i, row in enumerate(xs):
            for j in keys.get(row.tobytes(), ()):
                out[i, j] = 1.0
        return out


class Tabulated(Kernel):
    """Kernel given by an explicit Hermitian matrix over a fixed point list.

    Points are addressed by index; evaluation at coordinates performs an
    exact lookup and rejects anything outside the table.
    """

    def __init__(self, points, matrix, tol: float = HERMITIAN_RTOL):
        pts = as_points(points).copy()
        mat = np.array(matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError("tabulated kernel needs a square matrix")
        if mat.shape[0] != pts.shape[0]:
            raise DimensionMismatchError(
                f"matrix is {mat.shape[0]}x{mat.shape[0]} but there are {pts.shape[0]} points"
            )
        scale = max(1.0, float(np.max(np.abs(mat))) if mat.size else 0.0)
        defect = float(np.max(np.abs(mat - mat.conj().T)))
        if defect > tol * scale:
            raise NonHermitianError(
                f"tabulated matrix is not Hermitian (defect {defect:.3e})"
            )
        if not np.iscomplexobj(mat):
            mat = mat.astype(float)
        mat.setflags(write=False)
        pts.setflags(write=False)
        self.table = _PointTable(pts)
        self.matrix = mat

    @property
    def points(self) -> np.ndarray:
        return self.table.points

    def _eval(self, x, y):
        return self.matrix[self.table.lookup(x), self.table.lookup(y)]

    def _cross(self, xs, ys):
        rows = self.table.lookup_many(xs)
        cols = self.table.lookup_many(ys)
        return self.matrix[np.ix_(rows, cols)]


class RankOne(Kernel):
    """Rank-one kernel K(x, y) = phi(x) * conj(phi(y)).

    phi is either a callable rule or a list of values bound to a fixed
    point list (addressed exactly, as in Tabulated).
    """

    def __init__(self, phi: Callable | None = None, *, points=None, values=None):
        if phi is not None:
            if points is not None or values is not None:
                raise KernelParseError("pass either a callable or points+values, not both")
            self.phi = phi
            self.table = None
            self.values = None
        else:
            if points is None or values is None:
                raise KernelParseError("rank-one kernel needs a callable or points+values")
            pts = as_points(points)
            vals = np.array(values)
            if vals.ndim != 1 or vals.size != pts.shape[0]:
                raise DimensionMismatchError("need one phi value per point")
            vals.setflags(write=False)
            self.phi = None
            self.table = _PointTable(pts)
            self.values = vals

    @classmethod
    def from_samples(cls, points, values) -> "RankOne":
        return cls(points=points, values=values)

    def _value(self, x):
        if self.phi is not None:
            return self.phi(x)
        return self.values[self.table.lookup(x)]

    def _values(self, xs):
        if self.phi is not None:
            return np.asarray([self.phi(x) for x in xs])
        return self.values[self.table.lookup_many(xs)]

    def _eval(self, x, y):
        return self._value(x) * np.conj(self._value(y))

    def _cross(self, xs, ys):
        vx = self._values(xs)
        vy = self._values(ys)
        return np.multiply.outer(vx, np.conj(vy))


class Conjugated(Kernel):
    """Kernel conj(f(x)) * K(x, y) * f(y) for a scalar function f.

    On a point list this produces the Gram D* G D with D = diag(f(x_i)),
    so positive semidefiniteness of K is preserved.
    """

    def __init__(self, inner: Kernel, f: Callable | None = None, *, points=None, values=None):
        if not isinstance(inner, Kernel):
            raise KernelParseError("conjugated kernel needs an inner kernel")
        self.inner = inner
        if f is not None:
            if points is not None or values is not None:
                raise KernelParseError("pass either a callable or points+values, not both")
            self.f = f
            self.table = None
            self.values = None
        else:
            if points is None or values is None:
                raise KernelParseError("conjugated kernel needs a callable or points+values")
            pts = as_points(points)
            vals = np.array(values)
            if vals.ndim != 1 or vals.size != pts.shape[0]:
                raise DimensionMismatchError("need one f value per point")
            vals.setflags(write=False)
            self.f = None
            self.table = _PointTable(pts)
            self.values = vals

    def _value(self, x):
        if self.f is not None:
            return self.f(x)
        return self.values[self.table.lookup(x)]

    def _values(self, xs):
        if self.f is not None:
            return np.asarray([self.f(x) for x in xs])
        return self.values[self.table.lookup_many(xs)]

    def _eval(self, x, y):
        return np.conj(self._value(x)) * self.inner._eval(x, y) * self._value(y)

    def _cross(self, xs, ys):
        block = self.inner._cross(xs, ys)
        return np.conj(self._values(xs))[:, None] * block * self._values(ys)[None, :]


@dataclass(frozen=True)
class Sum(Kernel):
    """Pointwise sum of two kernels (PSD kernels form a convex cone)."""

    left: Kernel
    right: Kernel

    def _eval(self, x, y):
        return self.left._eval(x, y) + self.right._eval(x, y)

    def _cross(self, xs, ys):
        return self.left._cross(xs, ys) + self.right._cross(xs, ys)


@dataclass(frozen=True)
class Scaled(Kernel):
    """Nonnegative multiple c * K of a kernel."""

    factor: float
    inner: Kernel

    def __post_init__(self):
        factor = float(self.factor)
        if not (factor >= 0 and math.isfinite(factor)):
            raise KernelParseError(f"scale factor must be nonnegative, got {self.factor}")
        object.__setattr__(self, "factor", factor)

    def _eval(self, x, y):
        return self.factor * self.inner._eval(x, y)

    def _cross(self, xs, ys):
        return self.factor * self.inner._cross(xs, ys)


@dataclass(frozen=True)
class GramMatrix:
    """Pairwise kernel evaluations G[i, j] = K(x_i, x_j) over a point list."""

    points: np.ndarray
    entries: np.ndarray

    def __post_init__(self):
        pts = as_points(self.points).copy()
        entries = np.array(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError("Gram matrix must be square")
        if entries.shape[0] != pts.shape[0]:
            raise DimensionMismatchError("Gram size does not match the point list")
        if not np.iscomplexobj(entries):
            entries = entries.astype(float)
        pts.setflags(write=False)
        entries.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "entries", entries)

    @property
    def m(self) -> int:
        return self.entries.shape[0]


def _scalar(value):
    """Collapse a 0-d result to a plain Python scalar."""
    v = np.asarray(value).item()
    if isinstance(v, complex) and v.imag == 0:
        return v.real
    return v


def evaluate(spec: Kernel, x, y):
    """Evaluate K(x, y) for two points of matching dimension."""
    xp = as_point(x)
    yp = as_point(y)
    if xp.size != yp.size:
        raise DimensionMismatchError(
            f"points have dimensions {xp.size} and {yp.size}"
        )
    return _scalar(spec._eval(xp, yp))


def gram(spec: Kernel, points) -> GramMatrix:
    """Assemble the Gram matrix of a kernel over a point list."""
    pts = as_points(points)
    return GramMatrix(pts, spec._cross(pts, pts))


def cross_gram(spec: Kernel, xs, ys) -> np.ndarray:
    """Rectangular block K(xs_i, ys_j) as a plain array."""
    return spec._cross(as_points(xs), as_points(ys))


def _matrix_of(G) -> np.ndarray:
    if isinstance(G, GramMatrix):
        return G.entries
    arr = np.asarray(G)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError("expected a square matrix")
    return arr


def check_hermitian(G, tol: float = 1e-10) -> bool:
    """True iff max |G[i][j] - conj(G[j][i])| <= tol."""
    M = _matrix_of(G)
    return float(np.max(np.abs(M - M.conj().T))) <= tol


class PsdResult(NamedTuple):
    ok: bool
    min_eigenvalue: float


def check_psd(G, tol: float = PSD_RTOL) -> PsdResult:
    """PSD test via eigendecomposition with a relative floor.

    Accepts iff lambda_min >= -tol * max(1, |G|_inf).  Raises
    NonHermitianError when the input is not Hermitian within the same
    relative tolerance, since eigenvalues of a non-Hermitian matrix would
    not mean anything here.
    """
    M = _matrix_of(G)
    scale = max(1.0, float(np.linalg.norm(M, np.inf)))
    if float(np.max(np.abs(M - M.conj().T))) > tol * scale:
        raise NonHermitianError("PSD check requires a Hermitian matrix")
    lam_min = float(np.linalg.eigvalsh((M + M.conj().T) / 2.0)[0])
    return PsdResult(lam_min >= -tol * scale, lam_min)


def check_schwarz(spec: Kernel, x, y, tol: float = 1e-12) -> bool:
    """Pointwise Schwarz inequality |K(x,y)|^2 <= K(x,x) K(y,y).

    The comparison allows a slack of tol * max(1, K(x,x) K(y,y)) so that
    rounding on large kernel values (high-degree polynomial kernels) does
    not produce false negatives.
    """
    kxy = evaluate(spec, x, y)
    kxx = evaluate(spec, x, x)
    kyy = evaluate(spec, y, y)
    rhs = float(np.real(kxx) * np.real(kyy))
    return abs(kxy) ** 2 <= rhs + tol * max(1.0, abs(rhs))


def _split_top_level(text: str) -> list[str]:
    """Split on commas that are not nested inside parentheses."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise KernelParseError(f"unbalanced parentheses in {text!r}")
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise KernelParseError(f"unbalanced parentheses in {text!r}")
    parts.append(text[start:])
    return parts


def _parse_number(text: str, kind, what: str):
    try:
        return kind(text)
    except ValueError:
        raise KernelParseError(f"invalid {what}: {text!r}") from None


def _inner_of(text: str, spec: str) -> str:
    if not text.endswith(")"):
        raise KernelParseError(f"expected '(inner)' in {spec!r}")
    return text[:-1]


def parse_kernel(text: str, points=None) -> Kernel:
    """Parse the compact kernel grammar.

    Forms: ``identity``, ``weyl:d=3``, ``gauss:sigma=1.5``,
    ``scale:0.5(gauss:sigma=1)``, ``sum(weyl:d=1,gauss:sigma=1)``,
    ``tab:gram.csv``, ``rankone:phi.csv``, ``conj:f.csv(weyl:d=2)``.

    File-backed forms read a CSV and bind its rows to `points` (one value
    or matrix row per point, in order), so those require the point list of
    the surrounding command.
    """
    s = text.strip()
    if not s:
        raise KernelParseError("empty kernel spec")
    if s == "identity":
        return Identity()
    if s.startswith("weyl:"):
        body = s[len("weyl:"):]
        if not body.startswith("d="):
            raise KernelParseError(f"expected weyl:d=<degree>, got {text!r}")
        degree = _parse_number(body[2:], int, "weyl degree")
        if degree < 0:
            raise KernelParseError(f"weyl degree must be nonnegative, got {degree}")
        return Weyl(degree)
    if s.startswith("gauss:"):
        body = s[len("gauss:"):]
        if not body.startswith("sigma="):
            raise KernelParseError(f"expected gauss:sigma=<bandwidth>, got {text!r}")
        sigma = _parse_number(body[6:], float, "gaussian bandwidth")
        if not sigma > 0:
            raise KernelParseError(f"gaussian bandwidth must be positive, got {sigma}")
        return Gaussian(sigma)
    if s.startswith("scale:"):
        body = s[len("scale:"):]
        open_at = body.find("(")
        if open_at < 0:
            raise KernelParseError(f"expected scale:<factor>(<inner>), got {text!r}")
        factor = _parse_number(body[:open_at], float, "scale factor")
        if factor < 0:
            raise KernelParseError(f"scale factor must be nonnegative, got {factor}")
        inner = _inner_of(body[open_at + 1:], s)
        return Scaled(factor, parse_kernel(inner, points))
    if s.startswith("sum(") and s.endswith(")"):
        args = _split_top_level(s[len("sum("):-1])
        if len(args) != 2:
            raise KernelParseError(f"sum takes exactly two kernels, got {len(args)}")
        return Sum(parse_kernel(args[0], points), parse_kernel(args[1], points))
    if s.startswith("tab:"):
        path = s[len("tab:"):]
        if points is None:
            raise KernelParseError("tab: kernel needs a point list to bind to")
        matrix = csvio.load_matrix(path)
        return Tabulated(points, matrix)
    if s.startswith("rankone:"):
        path = s[len("rankone:"):]
        if points is None:
            raise KernelParseError("rankone: kernel needs a point list to bind to")
        values = csvio.load_column(path)
        return RankOne(points=points, values=values)
    if s.startswith("conj:"):
        body = s[len("conj:"):]
        open_at = body.find("(")
        if open_at < 0:
            raise KernelParseError(f"expected conj:<file>(<inner>), got {text!r}")
        path = body[:open_at]
        inner = parse_kernel(_inner_of(body[open_at + 1:], s), points)
        if points is None:
            raise KernelParseError("conj: kernel needs a point list to bind to")
        values = csvio.load_column(path)
        return Conjugated(inner, points=points, values=values)
    raise KernelParseError(f"unrecognized kernel spec {text!r}")
