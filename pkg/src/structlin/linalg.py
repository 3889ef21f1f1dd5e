"""Dense real linear algebra with a single tolerance knob.

Every rank decision goes through singular values, and every eigenvalue
decision goes through :func:`eigen_cluster`.  Matrices are plain
``numpy.ndarray`` objects of dtype float64.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.sparse.csgraph import connected_components

from .errors import MalformedInputError, NumericFailureError

DEFAULT_TOL = 1e-9

Mat = np.ndarray


def as_mat(M, name="matrix"):
    """Return `M` as a finite 2-D float array or raise MalformedInputError."""
    try:
        A = np.array(M, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedInputError(f"{name}: not a real array ({exc})") from None
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise MalformedInputError(f"{name}: expected a 2-D array, got ndim={A.ndim}")
    if not np.all(np.isfinite(A)):
        raise MalformedInputError(f"{name}: non-finite entries")
    return A


def as_square(M, name="matrix"):
    A = as_mat(M, name)
    if A.shape[0] != A.shape[1]:
        raise MalformedInputError(f"{name}: not square, shape {A.shape}")
    return A


def norm(A):
    """Spectral norm (0 for empty matrices)."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


@dataclass(frozen=True)
class Subspace:
    """A subspace of R^ambient_dim given by the columns of `basis`."""

    ambient_dim: int
    basis: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float).reshape(self.ambient_dim, -1)
        object.__setattr__(self, "basis", B)

    @property
    def dim(self):
        return self.basis.shape[1]

    def contains(self, v, tol=None):
        tol = self.tol if tol is None else tol
        v = np.asarray(v, dtype=float).reshape(self.ambient_dim, -1)
        if self.dim == 0:
            return bool(norm(v) <= tol)
        x = np.linalg.lstsq(self.basis, v, rcond=None)[0]
        return bool(norm(self.basis @ x - v) <= tol * (1 + norm(v)))


@dataclass(frozen=True)
class EigenvalueClass:
    """Real eigenvalue ``alpha`` (beta == 0) or conjugate pair alpha +- i beta.

    ``mult`` counts all eigenvalues of the class, so a simple conjugate
    pair has ``mult == 2``.
    """

    alpha: float
    beta: float
    mult: int

    @property
    def is_real(self):
        return self.beta == 0.0

    @property
    def size(self):
        """Real dimension of one irreducible S-piece: 1 or 2."""
        return 1 if self.is_real else 2

    def as_complex(self):
        return complex(self.alpha, self.beta)

    def key(self):
        return (self.alpha, self.beta)


def rank_kernel(M, tol=DEFAULT_TOL):
    """Numerical rank and an orthonormal kernel basis.

    Singular values above ``tol * max(1, ||M||)`` count towards the rank.

    Parameters
    ----------
    M : array_like, shape (m, n)
    tol : float
        Relative threshold, must be positive.

    Returns
    -------
    rank : int
    kernel : Subspace
        Orthonormal basis of the numerical null space, ``n - rank`` columns.
    """
    if not tol > 0:
        raise MalformedInputError("tol must be positive")
    A = as_mat(M)
    m, n = A.shape
    if n == 0:
        return 0, Subspace(0, np.zeros((0, 0)), tol)
    if m == 0:
        return 0, Subspace(n, np.eye(n), tol)
    _, sv, vt = np.linalg.svd(A)
    thresh = tol * max(1.0, sv[0] if sv.size else 0.0)
    rank = int(np.sum(sv > thresh))
    kernel = vt[rank:].T.copy()
    return rank, Subspace(n, kernel, tol)


def rank(M, tol=DEFAULT_TOL):
    return rank_kernel(M, tol)[0]


def null_space(M, tol=DEFAULT_TOL):
    return rank_kernel(M, tol)[1].basis


def orth(M, tol=DEFAULT_TOL):
    """Orthonormal basis of the column space of `M`."""
    A = as_mat(M)
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], 0))
    u, sv, _ = np.linalg.svd(A, full_matrices=False)
    thresh = tol * max(1.0, sv[0] if sv.size else 0.0)
    return u[:, : int(np.sum(sv > thresh))].copy()


def complement(sub, space, gram=None, tol=DEFAULT_TOL):
    """Complement of span(`sub`) inside span(`space`).

    The complement is orthogonal with respect to the inner product with
    Gram matrix `gram` (identity by default).  Any linear map that
    preserves both subspaces and is an isometry of `gram` also preserves
    the returned complement.
    """
    space = orth(space, tol)
    n = space.shape[0]
    if sub.shape[1] == 0 or space.shape[1] == 0:
        return space
    H = np.eye(n) if gram is None else gram
    # vectors z = space @ c with sub^T H z = 0
    c = null_space(sub.T @ H @ space, tol)
    return orth(space @ c, tol)


def intersect(A, B, tol=DEFAULT_TOL):
    """Orthonormal basis of span(A) ∩ span(B)."""
    A = orth(A, tol)
    B = orth(B, tol)
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((A.shape[0], 0))
    k = null_space(np.hstack([A, -B]), tol)
    return orth(A @ k[: A.shape[1]], tol)


def coords(basis, v):
    """Coordinates of the columns of `v` in a full-column-rank `basis`."""
    return np.linalg.lstsq(basis, v, rcond=None)[0]


def solve_least_squares(A, b, tol=DEFAULT_TOL):
    """Minimum-norm least-squares solution of ``A x = b``.

    Returns
    -------
    x : ndarray
    residual : float
        ``||A x - b||``.
    """
    A = as_mat(A, "A")
    b = as_mat(b, "b")
    if A.shape[0] != b.shape[0]:
        raise MalformedInputError(f"incompatible shapes {A.shape} and {b.shape}")
    if A.size == 0 or not np.any(A):
        x = np.zeros((A.shape[1], b.shape[1]))
    else:
        u, sv, vt = np.linalg.svd(A, full_matrices=False)
        keep = sv > tol * sv[0]
        x = vt[keep].T @ ((u[:, keep].T @ b) / sv[keep, None])
    return x, norm(A @ x - b)


def _single_linkage(z, radius):
    """Connected components of the graph |z_i - z_j| <= radius."""
    d = np.abs(z[:, None] - z[None, :])
    _, lab = connected_components(d <= radius, directed=False)
    return lab


def eigen_cluster(M, tol=DEFAULT_TOL):
    """Eigenvalue classes of a real square matrix.

    Eigenvalues closer than ``tol * (1 + ||M||)`` (single linkage) are merged.
    A class whose centre lies within that radius of the real axis is real;
    otherwise the class and its mirror image are reported once with
    ``beta > 0``.  Classes are sorted by ``(alpha, beta)``.
    """
    A = as_square(M)
    n = A.shape[0]
    if n == 0:
        return []
    try:
        z = sla.eigvals(A)
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise NumericFailureError(f"eigenvalue backend failed: {exc}", residual=np.inf) from None
    if not np.all(np.isfinite(z)):
        raise NumericFailureError("eigenvalue backend returned non-finite values", residual=np.inf)
    radius = tol * (1.0 + norm(A))
    lab = _single_linkage(z, radius)
    out = []
    for c in np.unique(lab):
        zc = z[lab == c]
        centre = zc.mean()
        if abs(centre.imag) <= radius:
            out.append(EigenvalueClass(float(centre.real), 0.0, int(zc.size)))
        elif centre.imag > 0:
            out.append(EigenvalueClass(float(centre.real), float(centre.imag), 2 * int(zc.size)))
    out.sort(key=EigenvalueClass.key)
    if sum(c.mult for c in out) != n:
        # asymmetric clustering of a conjugate pair; merge by real parts
        raise NumericFailureError("eigenvalue clustering is not conjugation symmetric",
                                  residual=radius)
    return out


def invariant_subspace(M, select):
    """Orthonormal basis of the M-invariant subspace for selected eigenvalues.

    `select` maps a complex eigenvalue to bool and must be closed under
    complex conjugation.  Uses an ordered real Schur form.
    """
    A = as_square(M)
    if A.shape[0] == 0:
        return np.zeros((0, 0))
    _, Z, sdim = sla.schur(A, output="real", sort=lambda re, im: bool(select(complex(re, im))))
    return Z[:, :sdim].copy()


def commutator(A, B):
    return A @ B - B @ A


def matrix_units(n):
    """The n*n standard basis matrices E_ij, row-major."""
    out = []
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n))
            E[i, j] = 1.0
            out.append(E)
    return out


def vec(A):
    return np.asarray(A, dtype=float).reshape(-1)


def span_basis(mats, tol=DEFAULT_TOL):
    """Orthonormal (Frobenius) basis of the span of a list of n x n matrices."""
    if not mats:
        return []
    n = mats[0].shape[0]
    Q = orth(np.column_stack([vec(A) for A in mats]), tol)
    return [Q[:, k].reshape(n, n) for k in range(Q.shape[1])]


def independent_subset(mats, tol=DEFAULT_TOL):
    """Indices of a maximal linearly independent subset, greedy in order."""
    keep = []
    cols = np.zeros((mats[0].size if mats else 0, 0))
    current = 0
    for k, A in enumerate(mats):
        trial = np.column_stack([cols, vec(A)])
        r = rank(trial, tol)
        if r > current:
            keep.append(k)
            cols = trial
            current = r
    return keep


def sylvester_kernel_dim(L, tol=DEFAULT_TOL):
    """dim {X : XL - LX = 0}, from the full n^2 x n^2 linear system."""
    L = as_square(L)
    n = L.shape[0]
    I = np.eye(n)
    # vec(XL - LX) = (L^T kron I - I kron L) vec_col(X)
    K = np.kron(L.T, I) - np.kron(I, L)
    return n * n - rank(K, tol)
