"""Reduced structure maps on the seed of a block, and the anti-diagonal
standardization of the bilinear form on a chain basis.
"""
from dataclasses import dataclass, field

import numpy as np

from .decomp import IMAG, PAIR, QUAD, InvariantBlock, make_block
from .errors import InvalidBlockError
from .linalg import DEFAULT_TOL, Subspace, complement, coords, intersect, norm, orth
from .structure import averaged_gram


@dataclass(frozen=True)
class ReducedForm:
    """Reduced data of one block.

    Attributes
    ----------
    Y : Subspace
    S_on_Y : ndarray
        Matrix of S on the stored Y basis.
    t : ndarray
        Reduced structure map: restriction of s (automorphisms) or the
        Gram matrix of tau(x, y) = omega(x, N^{n-1} y) (anti-automorphisms).
    t_symmetry : int or None
        +1 if t^T = t, -1 if t^T = -t.
    mu : int
    epsilon : int
        s^2 = eps I (automorphisms) or s^T = eps s (anti-automorphisms).
    T_list : list of ndarray
        Gram matrices of tau_j(x, y) = omega(N^j x, y), j = 0..n-1
        (anti-automorphisms only).
    """

    Y: Subspace
    S_on_Y: np.ndarray
    t: np.ndarray
    t_symmetry: object
    mu: int
    epsilon: int
    T_list: list
    kind: str = ""
    height: int = 1
    lam: object = None
    shape: str = ""
    diagnostics: dict = field(default_factory=dict)

    @property
    def reduced_epsilon(self):
        """Symmetry sign of the reduced problem: eps * mu^(n-1) for forms."""
        if self.kind == "automorphism":
            return self.epsilon
        return self.epsilon * self.mu ** (self.height - 1)


def _block_E_J(block):
    """Spectral involution and complex structure of S on X coordinates."""
    X = block.X.basis
    d = X.shape[1]
    SX = coords(X, block.S @ X)
    lam = block.lam
    parts = [intersect(X, P.basis, 1e-8) for P in block.V_parts]
    parts = [P for P in parts if P.shape[1]]
    C = coords(X, np.hstack(parts))
    Ci = np.linalg.inv(C)
    projs = []
    off = 0
    for P in parts:
        m = P.shape[1]
        D = np.zeros((d, d))
        D[off:off + m, off:off + m] = np.eye(m)
        projs.append(C @ D @ Ci)
        off += m
    E = projs[0] - projs[1] if len(projs) == 2 else np.eye(d)
    J = np.zeros((d, d))
    if not lam.is_real:
        for k, P in enumerate(projs):
            a = lam.alpha if k == 0 else (-lam.alpha if block.shape in (PAIR, QUAD) else lam.alpha)
            J += (SX - a * np.eye(d)) @ P / lam.beta
    return SX, E, J


def _fresh_seed(block):
    """Re-derive an S-invariant complement of N X in X and move W onto it.

    Returns the seed in X coordinates representing the same classes
    modulo N X as the incoming W.
    """
    X = block.X.basis
    d = X.shape[1]
    SX, E, J = _block_E_J(block)
    gens = []
    if block.shape in (PAIR, QUAD):
        gens.append(E)
    if not block.lam.is_real:
        gens.append(J)
    H = averaged_gram(gens) if gens else np.eye(d)
    NXc = orth(coords(X, block.N @ X), 1e-8)
    Wf = complement(NXc, np.eye(d), gram=H, tol=1e-8)
    w = coords(X, block.W.basis)
    a = np.linalg.lstsq(np.hstack([Wf, NXc]), w, rcond=None)[0]
    return Wf @ a[: Wf.shape[1]]


def standardize_bilinear(block, s, mu, info=False):
    """Clear the lower forms tau_j, j < n-1, on the seed of an anti-automorphism block.

    Runs the n-1 corrections W <- W + N^{j-1} W G_j, j = 2..n, with
    G_j = -1/2 mu^{j-1} T_{n-1}^{-1} T_{n-j}.  Afterwards the Gram matrix
    of omega(x, y) = x^T s y on the chain basis built from the new seed has
    nonzero blocks only on the anti-diagonal.

    Parameters
    ----------
    block : InvariantBlock
    s : ndarray
        Structure map of the anti-automorphism.
    mu : {+1, -1}
    info : bool
        Also return the number of corrections applied.

    Returns
    -------
    g : ndarray
        Chain-basis change: new chain basis = old chain basis @ g.
    W_new : Subspace
    steps : int, only if `info`
    """
    n = block.height
    amb = block.X.ambient_dim
    if n == 1:
        out = (np.eye(block.X.dim), block.W)
        return out + (0,) if info else out
    X = block.X.basis
    NX = coords(X, block.N @ X)
    om = X.T @ s @ X
    W = _fresh_seed(block)
    m = W.shape[1]

    def forms(W):
        out = []
        P = W
        for _ in range(n):
            out.append(P.T @ om @ W)
            P = NX @ P
        return out

    steps = 0
    for j in range(2, n + 1):
        T = forms(W)
        Tn = T[n - 1]
        if np.linalg.cond(Tn) > 1e10:
            raise InvalidBlockError("top form T_{n-1} is singular; block is mis-decomposed")
        G = -0.5 * mu ** (j - 1) * np.linalg.solve(Tn, T[n - j])
        W = W + np.linalg.matrix_power(NX, j - 1) @ W @ G
        steps += 1
    Wn = X @ W
    Xn = np.hstack([X @ np.linalg.matrix_power(NX, k) @ W for k in range(n)])
    g = coords(X, Xn)
    out = (g, Subspace(amb, Wn, block.X.tol))
    return out + (steps,) if info else out


def antidiagonal_defect(block, s):
    """Largest off-anti-diagonal block entry of the omega Gram on the chain basis."""
    X = block.X.basis
    m = X.shape[1] // block.height
    G = X.T @ s @ X
    n = block.height
    worst = 0.0
    for i in range(n):
        for j in range(n):
            if i + j != n - 1:
                worst = max(worst, np.abs(G[i * m:(i + 1) * m, j * m:(j + 1) * m]).max())
    return worst


def _symmetry(t, tol=1e-8):
    sc = 1 + norm(t)
    if norm(t - t.T) <= tol * sc:
        return 1
    if norm(t + t.T) <= tol * sc:
        return -1
    return None


def reduce_block(block, sm, mu):
    """Reduced form of a block.

    Automorphisms: Y = W + s W and t is the matrix of s on Y.
    Anti-automorphisms: Y = W and t is the Gram matrix of
    tau(x, y) = omega(x, N^{n-1} y).
    """
    n = block.height
    s = sm.s
    Y = block.Y
    SY = coords(Y, block.S @ Y)
    diag = {}
    if sm.is_aut:
        if norm(block.S @ Y - Y @ SY) > 1e-7 * (1 + norm(block.S)):
            raise InvalidBlockError("reduced space is not S-invariant")
        t = coords(Y, s @ Y)
        if norm(s @ Y - Y @ t) > 1e-7:
            raise InvalidBlockError("reduced space is not invariant under the structure map")
        T_list = []
        eps = sm.square_sign
        sym = _symmetry(t)
    else:
        N = block.N
        T_list = []
        P = Y
        for _ in range(n):
            T_list.append(P.T @ s @ Y)
            P = N @ P
        t = Y.T @ s @ np.linalg.matrix_power(N, n - 1) @ Y
        eps = sm.star_sign
        sym = eps * mu ** (n - 1)
        diag["symmetry_defect"] = norm(t - sym * t.T)
        diag["S_compat_defect"] = norm(SY.T @ t - mu * t @ SY)
        diag["antidiagonal_defect"] = antidiagonal_defect(block, s)
    cond = np.linalg.cond(t) if t.size else np.inf
    diag["t_condition"] = cond
    if not np.isfinite(cond) or cond > 1e10:
        raise InvalidBlockError("reduced structure is degenerate")
    return ReducedForm(Subspace(block.X.ambient_dim, Y, block.X.tol), SY, t, sym, mu, eps,
                       T_list, sm.kind, n, block.lam, block.shape, diag)
