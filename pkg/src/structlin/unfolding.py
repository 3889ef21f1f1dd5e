"""Centralizer unfoldings restricted to eigenspaces, and eigenvalue sweeps."""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .decomp import gl_chains, jc_decompose
from .errors import MalformedInputError, NumericFailureError
from .linalg import (DEFAULT_TOL, as_square, commutator, independent_subset, norm, rank,
                     vec)
from .structure import (eigenspace_basis, lie_algebra_basis, membership, orthogonalize_family,
                        project)


@dataclass(frozen=True)
class CentralizerBasis:
    """Basis of the commutant {X : [X, L] = 0}.

    ``per_block_counts[(c, i, j)]`` is the number of elements mapping the
    chain of seed j into the chain of seed i inside eigenvalue class c.
    """

    dim: int
    basis: list
    per_block_counts: dict = field(default_factory=dict)


def _seed_commutant(cls):
    # S acts on a seed [w, Jw] by the rotation block; its commutant is C = R[J]
    if cls.is_real:
        return [np.eye(1)]
    return [np.eye(2), np.array([[0.0, -1.0], [1.0, 0.0]])]


def centralizer_basis(L, jc=None, chains=None, tol=DEFAULT_TOL):
    """Constructive basis of the centralizer of L.

    For seeds W_i, W_j of one eigenvalue class with heights n_i, n_j, each
    0 <= m < min(n_i, n_j) and each C in the commutant of S on a seed
    gives the map

        N^l W_j c  ->  N^(l + m + max(0, n_i - n_j)) W_i C c,

    vanishing on all other chains.  The count per class is
    sum_i (2i - 1) n_i r with r = dim of the seed commutant.

    Parameters
    ----------
    L : ndarray
    jc : JCDecomposition, optional
    chains : output of :func:`gl_chains`, optional
    """
    L = as_square(L)
    n = L.shape[0]
    if jc is None:
        jc = jc_decompose(L, tol)
    if chains is None:
        chains = gl_chains(jc, tol)
    N = jc.N
    cols, index = [], []
    for c, (cls, seeds) in enumerate(chains):
        heights = [h for h, _ in seeds]
        if heights != sorted(heights, reverse=True):
            raise NumericFailureError("chains must be sorted by height")
        for i, (h, W) in enumerate(seeds):
            P = W
            for l in range(h):
                cols.append(P)
                index.append((c, i, l))
                P = N @ P
    if not cols:
        return CentralizerBasis(0, [], {})
    P = np.hstack(cols)
    if P.shape[1] != n:
        raise NumericFailureError("Jordan chains do not span the space", residual=P.shape[1] - n)
    Pinv = np.linalg.inv(P)
    offsets = {}
    k = 0
    for key, Cv in zip(index, cols):
        offsets[key] = k
        k += Cv.shape[1]
    basis, counts = [], {}
    for c, (cls, seeds) in enumerate(chains):
        comm = _seed_commutant(cls)
        size = cls.size
        for i, (ni, _) in enumerate(seeds):
            for j, (nj, _) in enumerate(seeds):
                shift = max(0, ni - nj)
                cnt = 0
                for m in range(min(ni, nj)):
                    for C in comm:
                        M = np.zeros((n, n))
                        for l in range(nj):
                            e = l + m + shift
                            if e >= ni:
                                break
                            r0, c0 = offsets[(c, i, e)], offsets[(c, j, l)]
                            M[r0:r0 + size, c0:c0 + size] = C
                        basis.append(P @ M @ Pinv)
                        cnt += 1
                counts[(c, i, j)] = cnt
    scale = 1.0 + norm(L)
    for B in basis:
        if norm(commutator(B, L)) > 1e-6 * scale * (1.0 + norm(B)):
            raise NumericFailureError("constructed element does not commute with L",
                                      residual=norm(commutator(B, L)))
    return CentralizerBasis(len(basis), basis, counts)


@dataclass(frozen=True)
class UnfoldingFamily:
    """Affine family L(nu) = L0 + sum_i nu_i D_i."""

    L0: np.ndarray
    directions: list
    codim: int
    tangent_dim: object = None
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def explicit(cls, L0, directions):
        """Family with user-supplied directions (codim is their number)."""
        D = [as_square(d, "direction") for d in directions]
        return cls(as_square(L0), D, len(D))

    @property
    def n_params(self):
        return len(self.directions)

    def evaluate(self, nu):
        nu = np.atleast_1d(np.asarray(nu, dtype=float))
        if nu.shape != (self.n_params,):
            raise MalformedInputError(
                f"parameter vector has length {nu.size}, family has {self.n_params} parameters")
        out = self.L0.copy()
        for c, D in zip(nu, self.directions):
            out = out + c * D
        return out


def tangent_space_rank(L, spec, tol=DEFAULT_TOL):
    """dim of T_G = {[U, L] : U in the Lie algebra of the structure group}."""
    U = lie_algebra_basis(spec)
    if not U:
        return 0
    return rank(np.column_stack([vec(commutator(u, L)) for u in U]), tol)


def miniversal_unfolding(L, spec, tol=None):
    """Miniversal unfolding of L inside its eigenspace.

    Directions are a maximal independent subset of the projections of the
    transposed centralizer basis (computed in coordinates where all
    structure maps are orthogonal).  The codimension is cross-checked
    against dim(eigenspace) - dim(T_G); disagreement raises
    NumericFailureError.
    """
    L = as_square(L)
    tol = spec.tol if tol is None else tol
    ok, res = membership(L, spec)
    if not ok:
        raise MalformedInputError(f"matrix is not in the eigenspace (residual {res:.3g})")
    spec_n, g = orthogonalize_family(spec)
    gi = np.linalg.inv(g)
    Ln = g @ L @ gi
    cb = centralizer_basis(Ln, tol=tol)
    cand = [project(B.T, spec_n) for B in cb.basis]
    rtol = max(tol, 1e-10)
    keep = independent_subset(cand, rtol) if cand else []
    dirs_n = [cand[k] for k in keep]
    codim_a = len(dirs_n)
    dim_eig = len(eigenspace_basis(spec_n))
    tdim = tangent_space_rank(Ln, spec_n, rtol)
    codim_b = dim_eig - tdim
    if codim_a != codim_b:
        raise NumericFailureError(
            f"codimension routes disagree: centralizer {codim_a}, tangent count {codim_b}",
            residual=abs(codim_a - codim_b))
    # back to the caller's coordinates; scale so each direction has unit norm
    dirs = []
    for D in dirs_n:
        Do = gi @ D @ g
        dirs.append(Do / norm(Do))
    diag = {"centralizer_dim": cb.dim, "eigenspace_dim": dim_eig,
            "membership_residual": res, "per_block_counts": cb.per_block_counts}
    return UnfoldingFamily(L, dirs, codim_a, tdim, diag)


def transversality_rank(fam, spec, tol=1e-9):
    """Rank of T_G + span(directions) and the eigenspace dimension."""
    U = lie_algebra_basis(spec)
    cols = [vec(commutator(u, fam.L0)) for u in U] + [vec(D) for D in fam.directions]
    r = rank(np.column_stack(cols), tol) if cols else 0
    return r, len(eigenspace_basis(spec))


# -- sweeps -------------------------------------------------------------------

ORIGIN, REAL_AXIS, IMAG_AXIS, OFF_AXIS = "origin", "real", "imaginary", "off-axis"


@dataclass(frozen=True)
class SweepResult:
    """Eigenvalue trajectories along a parameter path.

    ``eigenvalues[k]`` is sorted by (re, im); ``class_ids[k]`` gives the
    eigen_cluster class of each eigenvalue.
    """

    points: list
    eigenvalues: list
    class_ids: list
    events: list
    max_abs_re: float

    def rows(self):
        """(step, nu..., re, im, class id) rows."""
        out = []
        for k, (nu, z, cid) in enumerate(zip(self.points, self.eigenvalues, self.class_ids)):
            for zz, c in zip(z, cid):
                out.append((k, *[float(x) for x in nu], float(zz.real), float(zz.imag), int(c)))
        return out


def _sorted_eigs(M):
    z = np.linalg.eigvals(M)
    order = np.lexsort((np.round(z.imag, 12), np.round(z.real, 12)))
    return z[order]


def _class_ids(z, tol, scale):
    radius = tol * scale
    ids = -np.ones(len(z), dtype=int)
    nxt = 0
    for a in range(len(z)):
        if ids[a] >= 0:
            continue
        stack = [a]
        ids[a] = nxt
        while stack:
            b = stack.pop()
            near = np.where((np.abs(z - z[b]) <= radius) & (ids < 0))[0]
            ids[near] = nxt
            stack.extend(near.tolist())
        nxt += 1
    return ids


def _categories(z, axtol):
    cnt = {ORIGIN: 0, REAL_AXIS: 0, IMAG_AXIS: 0, OFF_AXIS: 0}
    for w in z:
        re0, im0 = abs(w.real) <= axtol, abs(w.imag) <= axtol
        if re0 and im0:
            cnt[ORIGIN] += 1
        elif im0:
            cnt[REAL_AXIS] += 1
        elif re0:
            cnt[IMAG_AXIS] += 1
        else:
            cnt[OFF_AXIS] += 1
    return cnt


def _min_gap(z, axtol):
    up = z[z.imag >= -axtol]
    if len(up) < 2:
        return np.inf, None
    d = np.abs(up[:, None] - up[None, :])
    d[np.diag_indices_from(d)] = np.inf
    a, b = np.unravel_index(np.argmin(d), d.shape)
    return float(d[a, b]), complex(0.5 * (up[a] + up[b]))


def _displacement(z1, z2):
    if len(z1) == 0:
        return 0.0
    d = np.abs(z1[:, None] - z2[None, :])
    r, c = linear_sum_assignment(d)
    return float(d[r, c].max())


def sweep_eigenvalues(fam, path, tol=DEFAULT_TOL):
    """Eigenvalues of L(nu) along a path, with collision events.

    A collision is a step where the smallest distance between eigenvalues
    in the closed upper half-plane has a local minimum below the eigenvalue
    movement over the neighbouring steps (or below the noise level), or
    where the number of eigenvalue classes or of off-axis eigenvalues
    changes.  Each
    collision is labelled by comparing the counts of eigenvalues at the
    origin, on the real axis, on the imaginary axis and off the axes one
    step before and after: equal counts give PASS, any change gives SPLIT.

    Parameters
    ----------
    fam : UnfoldingFamily
    path : sequence of parameter vectors
    tol : float
        Axis tolerance is ``10 * tol * (1 + ||L0||)``.

    Returns
    -------
    SweepResult
    """
    pts = [np.atleast_1d(np.asarray(p, dtype=float)) for p in path]
    if not pts:
        raise MalformedInputError("empty parameter path")
    for p in pts:
        if p.shape != (fam.n_params,):
            raise MalformedInputError(
                f"path point of length {p.size} for a family with {fam.n_params} parameters")
    scale = 1.0 + norm(fam.L0)
    axtol = 10 * tol * scale
    noise = max(10 * tol, 10 * np.sqrt(np.finfo(float).eps)) * scale
    Z, ids, gaps, locs, cats, ncls = [], [], [], [], [], []
    for p in pts:
        z = _sorted_eigs(fam.evaluate(p))
        Z.append(z)
        cid = _class_ids(z, tol, scale)
        ids.append(cid)
        ncls.append(int(cid.max()) + 1 if len(cid) else 0)
        g, loc = _min_gap(z, axtol)
        gaps.append(g)
        locs.append(loc)
        cats.append(_categories(z, axtol))
    K = len(pts)
    cand = []
    for k in range(1, K - 1):
        g = gaps[k]
        if not np.isfinite(g) or g > gaps[k - 1] or g > gaps[k + 1] or \
                (g == gaps[k - 1] and g == gaps[k + 1]):
            continue
        if g <= max(noise, _displacement(Z[k - 1], Z[k + 1])):
            cand.append(k)
    for k in range(K - 1):
        if ncls[k] != ncls[k + 1] or cats[k][OFF_AXIS] != cats[k + 1][OFF_AXIS]:
            if not any(abs(k - c) <= 1 or abs(k + 1 - c) <= 1 for c in cand):
                cand.append(k if gaps[k] <= gaps[k + 1] else k + 1)
    cand = sorted(set(cand))
    events = []
    for k in cand:
        if events and k - events[-1]["step"] <= 1:
            continue
        a, b = max(k - 1, 0), min(k + 1, K - 1)
        kind = "PASS" if cats[a] == cats[b] else "SPLIT"
        loc = locs[k]
        events.append({
            "step": k,
            "nu": [float(x) for x in pts[k]],
            "kind": kind,
            "gap": gaps[k],
            "location": None if loc is None else [loc.real, loc.imag],
            "before": cats[a],
            "after": cats[b],
        })
    mre = float(max(np.abs(z.real).max() for z in Z)) if Z else 0.0
    return SweepResult(pts, Z, ids, events, mre)


def line_path(start, end, steps=201):
    """Straight-line path; points are rounded so an endpoint-symmetric grid hits 0 exactly."""
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    t = np.linspace(0.0, 1.0, steps)
    pts = start[None, :] + t[:, None] * (end - start)[None, :]
    return [np.round(p, 12) for p in pts]
