"""Jordan-Chevalley decomposition and structured invariant blocks.

The semi-simple part is assembled from spectral subspaces (ordered real
Schur forms) and a Newton iteration on each subspace, so that S is a
polynomial in L there.  Chains are built from the classical filtration
``ker N^k`` with complements taken orthogonally for a group-averaged
inner product; that makes every chosen subspace invariant under the
structure map, the spectral involution and the complex structure of S.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedSpectrumError, InvalidBlockError, NumericFailureError
from .linalg import (DEFAULT_TOL, EigenvalueClass, Subspace, as_square, complement, coords,
                     intersect, invariant_subspace, norm, null_space, orth)
from .structure import averaged_gram, membership

# shapes of an eigenvalue orbit {lambda, mu*lambda}
REAL, PAIR, CPLX, IMAG, QUAD = "R", "P", "C", "I", "Q"


@dataclass(frozen=True)
class JCDecomposition:
    """L = S + N with the spectral data used to build it.

    Attributes
    ----------
    S, N : ndarray
    height : int
        Least n with N^n = 0.
    residuals : dict
        ``commutator``, ``sum``, ``nilpotency`` and ``semisimple`` defects.
    classes : list of EigenvalueClass
    spaces : list of ndarray
        Orthonormal bases of the generalized eigenspaces, one per class.
    """

    S: np.ndarray
    N: np.ndarray
    height: int
    residuals: dict
    classes: list
    spaces: list
    tol: float = DEFAULT_TOL
    radius: float = 0.0


def cluster_radius(L, tol):
    """Merging radius for spectra of possibly defective matrices.

    A Jordan block of size m perturbed at level eps spreads its eigenvalue
    by about eps^(1/m); the square root of the tolerance covers height-two
    defects at double precision and is far below fixture gaps.
    """
    return np.sqrt(tol) * (1.0 + norm(L))


def spectral_classes(L, tol=DEFAULT_TOL):
    """Eigenvalue classes of L merged at :func:`cluster_radius`.

    Returns (classes, labels, eigenvalues, radius) where ``labels[k]`` is the
    class index of eigenvalue ``k`` (conjugates share the index).
    """
    L = as_square(L)
    z = np.linalg.eigvals(L) if L.size else np.zeros(0, complex)
    if not np.all(np.isfinite(z)):
        raise NumericFailureError("eigenvalue backend returned non-finite values", residual=np.inf)
    rad = cluster_radius(L, tol)
    # cluster on the closed upper half plane so conjugates land together
    w = np.where(z.imag < 0, z.conj(), z)
    d = np.abs(w[:, None] - w[None, :])
    from scipy.sparse.csgraph import connected_components
    _, lab = connected_components(d <= rad, directed=False)
    raw = []
    for c in np.unique(lab):
        wc = w[lab == c]
        centre = wc.mean()
        if abs(centre.imag) <= rad:
            raw.append((float(centre.real), 0.0, int(wc.size), c))
        else:
            raw.append((float(centre.real), float(centre.imag), int(wc.size), c))
    raw.sort()
    remap = {c: k for k, (_, _, _, c) in enumerate(raw)}
    classes = [EigenvalueClass(a, b, m) for a, b, m, _ in raw]
    labels = np.array([remap[c] for c in lab], dtype=int)
    # ambiguity band: distinct clusters whose closest members are nearly merged
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            gap = d[np.ix_(labels == i, labels == j)].min()
            if gap < 1.5 * rad:
                raise IllConditionedSpectrumError(
                    f"eigenvalue classes {classes[i].key()} and {classes[j].key()} are "
                    f"{gap:.3g} apart, inside the ambiguity band", residual=gap)
    return classes, labels, z, rad


def _semisimple_on(A, cls, iters=60):
    """Semi-simple part of A (single eigenvalue class) by Newton's iteration."""
    k = A.shape[0]
    I = np.eye(k)
    if cls.is_real:
        return cls.alpha * I
    a, b = cls.alpha, cls.beta
    S = A.copy()
    best = np.inf
    for _ in range(iters):
        X = S - a * I
        P = X @ X + b * b * I
        r = norm(P)
        if r >= best and r < 1e-10 * (1 + norm(A)) ** 2:
            break
        best = min(best, r)
        try:
            S = S - np.linalg.solve(2 * X, P)
        except np.linalg.LinAlgError:
            raise NumericFailureError("Newton step for the semi-simple part is singular") from None
    return S


def nil_height(N, tol, scale=None):
    """Least k with N^k negligible (relative to scale^k)."""
    n = N.shape[0]
    if n == 0:
        return 0
    scale = 1.0 + norm(N) if scale is None else scale
    P = np.eye(n)
    for k in range(1, n + 1):
        P = P @ N
        if norm(P) <= max(tol, 1e-12) * scale ** k:
            return k
    raise NumericFailureError("nilpotent part is not nilpotent", residual=norm(P))


def jc_decompose(L, tol=DEFAULT_TOL):
    """Jordan-Chevalley decomposition L = S + N.

    Parameters
    ----------
    L : array_like, square
    tol : float

    Returns
    -------
    JCDecomposition
    """
    L = as_square(L)
    n = L.shape[0]
    classes, labels, z, rad = spectral_classes(L, tol)
    centres = np.array([c.as_complex() for c in classes])
    spaces = []
    for k, cls in enumerate(classes):
        def select(x, k=k):
            y = x.conjugate() if x.imag < 0 else x
            return int(np.argmin(np.abs(centres - y))) == k
        V = invariant_subspace(L, select)
        if V.shape[1] != cls.mult:
            raise NumericFailureError(
                f"invariant subspace for {cls.key()} has dimension {V.shape[1]}, "
                f"expected {cls.mult}", residual=abs(V.shape[1] - cls.mult))
        spaces.append(V)
    if n:
        B = np.hstack(spaces)
        Binv = np.linalg.inv(B)
        blocks = []
        for V, cls in zip(spaces, classes):
            A = V.T @ L @ V
            blocks.append(_semisimple_on(A, cls))
        D = np.zeros((n, n))
        off = 0
        for Sk in blocks:
            m = Sk.shape[0]
            D[off:off + m, off:off + m] = Sk
            off += m
        S = B @ D @ Binv
    else:
        S = np.zeros((0, 0))
    N = L - S
    scale = 1.0 + norm(L)
    h = nil_height(N, max(tol, 1e-12) * 10, scale) if n else 0
    semis = 0.0
    for V, cls in zip(spaces, classes):
        X = S @ V - cls.alpha * V
        if not cls.is_real:
            X = S @ X - cls.alpha * X + cls.beta ** 2 * V
        semis = max(semis, norm(X))
    residuals = {
        "commutator": norm(S @ N - N @ S),
        "sum": norm(L - S - N),
        "nilpotency": norm(np.linalg.matrix_power(N, h)) if n else 0.0,
        "semisimple": semis,
    }
    return JCDecomposition(S, N, h, residuals, classes, spaces, tol, rad)


# ---------------------------------------------------------------------------
# eigenvalue orbits and the coordinates of one orbit


@dataclass
class OrbitSpace:
    """Coordinates on U = V_lambda (+ V_{mu lambda}) for one eigenvalue orbit."""

    lam: EigenvalueClass
    shape: str
    U: np.ndarray           # ambient orthonormal basis, n x d
    parts: list             # ambient bases of the constituent V's
    S: np.ndarray           # S in U coordinates
    N: np.ndarray
    E: np.ndarray           # +1 on V_lambda, -1 on V_{-lambda}
    J: np.ndarray           # complex structure of S (zero for real classes)
    part_alpha: list = field(default_factory=list)
    gram: object = None     # invariant inner product on U coordinates


def _orbit_space(jc, idx, lam, shape):
    parts = [jc.spaces[i] for i in idx]
    U = orth(np.hstack(parts))
    d = U.shape[1]
    S = U.T @ jc.S @ U
    N = U.T @ jc.N @ U
    C = coords(U, np.hstack(parts))
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
    alphas = [jc.classes[i].alpha for i in idx]
    if not lam.is_real:
        for P, a in zip(projs, alphas):
            J += (S - a * np.eye(d)) @ P / lam.beta
    return OrbitSpace(lam, shape, U, parts, S, N, E, J, alphas)


def eigen_orbits(jc, mu):
    """Group eigenvalue classes into orbits {lambda, mu*lambda}.

    Returns a list of (representative class, class indices, shape); the
    representative has alpha >= 0 for mu = -1.
    """
    classes = jc.classes
    rad = jc.radius
    used = set()
    out = []
    for i, c in enumerate(classes):
        if i in used:
            continue
        if mu == 1:
            shape = REAL if c.is_real else CPLX
            out.append((c, [i], shape))
            used.add(i)
            continue
        if abs(c.alpha) <= rad:
            lam = EigenvalueClass(0.0, c.beta, c.mult)
            out.append((lam, [i], REAL if c.is_real else IMAG))
            used.add(i)
            continue
        # partner class (-alpha, beta)
        best, bj = np.inf, None
        for j, d in enumerate(classes):
            if j != i and j not in used and d.is_real == c.is_real:
                dist = abs(d.alpha + c.alpha) + abs(d.beta - c.beta)
                if dist < best:
                    best, bj = dist, j
        if bj is None or best > 10 * rad or classes[bj].mult != c.mult:
            raise InvalidBlockError(f"eigenvalue class {c.key()} has no partner {(-c.alpha, c.beta)}")
        pos, neg = (i, bj) if c.alpha > 0 else (bj, i)
        lam = classes[pos]
        lam = EigenvalueClass(lam.alpha, lam.beta, 2 * lam.mult)
        out.append((lam, [pos, neg], PAIR if c.is_real else QUAD))
        used.update((i, bj))
    out.sort(key=lambda t: t[0].key())
    return out


# ---------------------------------------------------------------------------
# filtration complements


def _kernel_power(N, k):
    d = N.shape[0]
    if k <= 0:
        return np.zeros((d, 0))
    return null_space(np.linalg.matrix_power(N, k), 1e-9)


def top_spaces(N, H=None, tol=DEFAULT_TOL):
    """Complements T_k of ker N^{k-1} + N ker N^{k+1} in ker N^k.

    The union over k of ``N^j T_k`` (j < k) is a basis of chains.  With a
    Gram matrix `H` invariant under a group commuting with N up to sign,
    each T_k is invariant under that group.

    Returns
    -------
    dict
        height k -> basis of T_k (only nonzero ones).
    """
    d = N.shape[0]
    h = nil_height(N, 1e-9) if d else 0
    kers = {k: _kernel_power(N, k) for k in range(0, h + 2)}
    out = {}
    for k in range(1, h + 1):
        D = np.hstack([kers[k - 1], N @ kers[k + 1]])
        D = orth(D, 1e-9) if D.shape[1] else D
        T = complement(D, kers[k], gram=H, tol=1e-9)
        if T.shape[1]:
            out[k] = T
    if sum(k * T.shape[1] for k, T in out.items()) != d:
        raise NumericFailureError("chain filtration does not fill the space",
                                  residual=abs(sum(k * T.shape[1] for k, T in out.items()) - d))
    return out


def chain_basis(N, W, k):
    """Columns [W, N W, ..., N^{k-1} W]."""
    cols = [W]
    for _ in range(k - 1):
        cols.append(N @ cols[-1])
    return np.hstack(cols)


# ---------------------------------------------------------------------------
# blocks


@dataclass(frozen=True)
class InvariantBlock:
    """An indecomposable (L, s)-invariant subspace.

    Attributes
    ----------
    lam : EigenvalueClass
        Representative eigenvalue class (alpha >= 0 for paired orbits);
        ``mult`` is the dimension of X.
    X : Subspace
        Chain basis ordered as [Y, N Y, ..., N^{n-1} Y].
    V_parts : list of Subspace
        Generalized eigenspaces the block lives in.
    height : int
    W : Subspace
        S-minimal seed of the block inside V_lambda (automorphisms) or the
        reduced space itself (anti-automorphisms).
    chain : list of Subspace
        W, N W, ..., N^{n-1} W.
    reduced_structure : ndarray or None
        Reduced structure map t on the stored Y basis.
    shape : str
        Orbit shape code: R, P, C, I or Q.
    Y : ndarray
        Basis of the reduced space in ambient coordinates.
    S, N : ndarray
        Full-space semi-simple and nilpotent parts.
    """

    lam: EigenvalueClass
    X: Subspace
    V_parts: list
    height: int
    W: Subspace
    chain: list
    reduced_structure: object
    shape: str
    Y: np.ndarray
    S: np.ndarray
    N: np.ndarray

    @property
    def dim(self):
        return self.X.dim


def make_block(lam, shape, Y, W, height, parts, S, N, t=None, tol=DEFAULT_TOL):
    n = S.shape[0]
    Xb = chain_basis(N, Y, height)
    chain = [Subspace(n, np.linalg.matrix_power(N, j) @ W, tol) for j in range(height)]
    lam = EigenvalueClass(lam.alpha, lam.beta, Xb.shape[1])
    return InvariantBlock(lam, Subspace(n, Xb, tol), [Subspace(n, P, tol) for P in parts],
                          height, Subspace(n, W, tol), chain, t, shape, Y, S, N)


def _first(v):
    return v[:, :1]


def _eig_part(A, rem, sign, tol=1e-8):
    """Basis of {x in span(rem) : A x = sign x} for an involution A."""
    return orth((rem + sign * (A @ rem)) / 2, tol)


def _aut_seeds(T, orb, s, c):
    """Split T into minimal (S, s)-invariant pieces.

    Returns a list of (W, Y) in U coordinates, with W the S-minimal seed
    and Y = W + s W in canonical column order.
    """
    H = orb.gram
    J = orb.J
    out = []
    rem = T
    while rem.shape[1]:
        if orb.shape == REAL:
            if c == 1:
                P = _eig_part(s, rem, 1)
                w = _first(P) if P.shape[1] else _first(_eig_part(s, rem, -1))
                W = Y = w
            else:
                W = _first(rem)
                Y = np.hstack([W, s @ W])
        elif orb.shape == PAIR:
            W = _first(_eig_part(orb.E, rem, 1))
            Y = np.hstack([W, s @ W])
        elif orb.shape == CPLX:
            A = s if c == 1 else s @ J
            P = _eig_part(A, rem, 1)
            w = _first(P) if P.shape[1] else _first(_eig_part(A, rem, -1))
            W = Y = np.hstack([w, J @ w])
        elif orb.shape == IMAG:
            if c == 1:
                P = _eig_part(s, rem, 1)
                w = _first(P) if P.shape[1] else _first(_eig_part(s, rem, -1))
                W = Y = np.hstack([w, J @ w])
            else:
                w = _first(rem)
                W = np.hstack([w, J @ w])
                Y = np.hstack([W, s @ W])
        else:  # QUAD
            w = _first(_eig_part(orb.E, rem, 1))
            W = np.hstack([w, J @ w])
            Y = np.hstack([W, s @ W])
        if W.shape[1] == 0:
            raise NumericFailureError("could not split an invariant piece", residual=rem.shape[1])
        out.append((W, Y))
        left = complement(Y, rem, gram=H, tol=1e-8)
        if left.shape[1] != rem.shape[1] - Y.shape[1]:
            raise NumericFailureError("invariant piece does not split off its complement",
                                      residual=rem.shape[1] - left.shape[1])
        rem = left
    return out


def _anti_seed(T, orb, M, sym):
    """One minimal tau-nondegenerate (S-invariant) piece of T, canonical basis.

    tau(x, y) = x^T M y.  Returns Y in U coordinates.
    """
    J = orb.J
    tau = lambda x, y: (x.T @ M @ y).item()
    shape = orb.shape
    if shape in (REAL, IMAG) or (shape == CPLX and sym == 1):
        if sym == 1 or shape == REAL:
            B = T.T @ M @ T
            if sym == 1:
                w_, V = np.linalg.eigh((B + B.T) / 2)
                k = int(np.argmax(np.abs(w_)))
                w = T @ V[:, k:k + 1]
            else:
                u, sv, vt = np.linalg.svd(B)
                w = T @ u[:, :1]
                v = T @ vt[:1].T
                tv = tau(w, v)
                return np.hstack([w, -v / tv])
            if shape == REAL:
                return w / np.sqrt(abs(tau(w, w)))
            if shape == IMAG:
                return np.hstack([w, J @ w]) / np.sqrt(abs(tau(w, w)))
            # CPLX, symmetric form: rotate inside span{w, Jw}
            a, b = tau(w, w), tau(w, J @ w)
            th = np.arctan2(b, a) / 2
            e = np.cos(th) * w + np.sin(th) * (J @ w)
            e = e / np.sqrt(abs(tau(e, e)))
            return np.hstack([e, J @ e])
        # IMAG with skew form: maximise |tau(w, J w)|
        B = T.T @ M @ J @ T
        w_, V = np.linalg.eigh((B + B.T) / 2)
        k = int(np.argmax(np.abs(w_)))
        e = T @ V[:, k:k + 1]
        e = e / np.sqrt(abs(tau(e, J @ e)))
        return np.hstack([e, J @ e])
    if shape == CPLX:  # skew form, four-dimensional piece
        B = T.T @ M @ T
        u, sv, vt = np.linalg.svd(B)
        e = T @ u[:, :1]
        f = J @ e
        R = np.vstack([e.T @ M @ T, f.T @ M @ T])
        cvec = np.linalg.lstsq(R, np.array([[-1.0], [0.0]]), rcond=None)[0]
        e2 = T @ cvec
        return np.hstack([e, f, e2, -(J @ e2)])
    # PAIR / QUAD
    Tp = orth(T + orb.E @ T, 1e-8)
    Tm = orth(T - orb.E @ T, 1e-8)
    B12 = Tp.T @ M @ Tm
    u, sv, vt = np.linalg.svd(B12)
    e = Tp @ u[:, :1]
    cval = 1.0 if sym == 1 else -1.0
    if shape == PAIR:
        v = Tm @ vt[:1].T
        return np.hstack([e, cval * v / tau(e, v)])
    f = J @ e
    R = np.vstack([e.T @ M @ Tm, f.T @ M @ Tm])
    cvec = np.linalg.lstsq(R, np.array([[cval], [0.0]]), rcond=None)[0]
    e2 = Tm @ cvec
    return np.hstack([e, f, e2, J @ e2])


def _orbit_gram(orb, extra=()):
    gens = [g for g in extra]
    if orb.shape in (PAIR, QUAD):
        gens.append(orb.E)
    if not orb.lam.is_real:
        gens.append(orb.J)
    if not gens:
        return np.eye(orb.S.shape[0])
    return averaged_gram(gens)


def _lift(orb, Yu):
    return orb.U @ Yu


def invariant_blocks(L, jc, spec):
    """Split V into indecomposable (L, s)-invariant blocks.

    Single-generator EigenspaceSpec only; the structure map should be
    normalized (orthogonal).  For anti-automorphisms the seed of every block
    is standardized by :func:`structlin.reduction.standardize_bilinear`.

    Returns
    -------
    list of InvariantBlock
        Ordered by eigenvalue class, then height (descending).
    """
    from .reduction import standardize_bilinear

    if spec.p != 1:
        raise InvalidBlockError("invariant_blocks handles one structure map at a time")
    L = as_square(L)
    ok, res = membership(L, spec)
    if not ok:
        raise InvalidBlockError(f"matrix is not in the eigenspace (residual {res:.3g})")
    sm, mu = spec.generators[0], spec.mus[0]
    s = sm.s
    blocks = []
    for lam, idx, shape in eigen_orbits(jc, mu):
        orb = _orbit_space(jc, idx, lam, shape)
        U = orb.U
        if sm.is_aut:
            sU = U.T @ s @ U
            if norm(U @ sU - s @ U) > 1e-7 * (1 + norm(s)):
                raise InvalidBlockError("orbit space is not invariant under the structure map")
            orb.gram = _orbit_gram(orb, [sU])
            c = sm.square_sign
            tops = top_spaces(orb.N, orb.gram)
            for k in sorted(tops, reverse=True):
                for W, Y in _aut_seeds(tops[k], orb, sU, c):
                    blocks.append(make_block(lam, shape, _lift(orb, Y), _lift(orb, W), k,
                                             orb.parts, jc.S, jc.N, tol=spec.tol))
        else:
            omega = U.T @ s @ U
            orb.gram = _orbit_gram(orb)
            eps = sm.star_sign
            Z = np.eye(U.shape[1])
            while Z.shape[1]:
                NZ = coords(Z, orb.N @ Z)
                k = nil_height(NZ, 1e-9)
                K = Z @ _kernel_power(NZ, k - 1)
                T = complement(K, Z, gram=orb.gram, tol=1e-8)
                M = omega @ np.linalg.matrix_power(orb.N, k - 1)
                sym = eps * mu ** (k - 1)
                Yu = _anti_seed(T, orb, M, sym)
                Xu = chain_basis(orb.N, Yu, k)
                pre = make_block(lam, shape, _lift(orb, Yu), _lift(orb, Yu), k, orb.parts,
                                 jc.S, jc.N, tol=spec.tol)
                g, Wn = standardize_bilinear(pre, s, mu)
                blk = make_block(lam, shape, Wn.basis, Wn.basis, k, orb.parts, jc.S, jc.N,
                                 tol=spec.tol)
                blocks.append(blk)
                # omega-orthogonal complement inside Z
                Zc = null_space(Xu.T @ omega @ Z, 1e-8)
                Z = orth(Z @ Zc, 1e-8) if Zc.shape[1] else np.zeros((U.shape[1], 0))
    _check_blocks(blocks, L)
    return blocks


def _check_blocks(blocks, L):
    n = L.shape[0]
    if not blocks:
        if n:
            raise NumericFailureError("no blocks found")
        return
    X = np.hstack([b.X.basis for b in blocks])
    if X.shape[1] != n or np.linalg.matrix_rank(X, 1e-8 * max(1.0, norm(X))) != n:
        raise NumericFailureError("blocks do not decompose the space", residual=X.shape[1] - n)


def gl_chains(jc, tol=DEFAULT_TOL):
    """Plain Jordan chains of L, grouped per eigenvalue class.

    Returns
    -------
    list of (class, [(height, W)]) with heights descending; for complex
    classes each W is ``[w, J w]`` so S acts by the same 2 x 2 matrix on
    every seed of the class.
    """
    out = []
    for i, cls in enumerate(jc.classes):
        shape = REAL if cls.is_real else CPLX
        orb = _orbit_space(jc, [i], cls, shape)
        H = _orbit_gram(orb)
        tops = top_spaces(orb.N, H)
        seeds = []
        for k in sorted(tops, reverse=True):
            rem = tops[k]
            while rem.shape[1]:
                w = _first(rem)
                W = w if cls.is_real else np.hstack([w, orb.J @ w])
                seeds.append((k, orb.U @ W))
                rem = complement(W, rem, gram=H, tol=1e-8)
        out.append((cls, seeds))
    return out


def heights_by_class(jc):
    """Mapping class key -> sorted (descending) list of Jordan block heights."""
    return {cls.key(): [k for k, _ in seeds] for cls, seeds in gl_chains(jc)}
