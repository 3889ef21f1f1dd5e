"""Structure maps of order-two (anti)-automorphisms and their eigenspaces.

An automorphism acts as ``A -> s^{-1} A s`` and an anti-automorphism as
``A -> s^{-1} A^T s``.  Throughout the package a change of coordinates is a
matrix ``g`` acting on maps by ``L -> g L g^{-1}``; structure maps then move
as ``s -> g s g^{-1}`` (automorphism) or ``s -> g^{-T} s g^{-1}``
(anti-automorphism), see :func:`transform_structure`.
"""
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg as sla

from .errors import IncompatibleStructuresError, InvalidStructureError, MalformedInputError
from .linalg import DEFAULT_TOL, as_square, matrix_units, norm, orth, vec

AUT = "automorphism"
ANTI = "anti-automorphism"
KINDS = (AUT, ANTI)
GROUP_CAP = 256


def _sign_of_multiple(A, B, tol):
    """Return c in {+1, -1} with A = c B (within tol), else None."""
    scale = 1.0 + norm(B)
    for c in (1, -1):
        if norm(A - c * B) <= tol * scale:
            return c
    return None


def _square_scalar(s):
    n = s.shape[0]
    return float(np.trace(s @ s)) / n


@dataclass(frozen=True)
class StructureMap:
    """A structure map together with its kind and symmetry flags.

    Attributes
    ----------
    s : ndarray
        Invertible n x n matrix.
    kind : str
        ``"automorphism"`` or ``"anti-automorphism"``.
    sigma : int
        +1 for automorphisms, -1 for anti-automorphisms.
    star_sign : int or None
        epsilon with ``s^T = epsilon s`` when that holds.
    square_sign : int or None
        c with ``s @ s = c I`` when that holds.
    """

    s: np.ndarray
    kind: str
    sigma: int
    star_sign: object = None
    square_sign: object = None

    @classmethod
    def make(cls, s, kind, tol=DEFAULT_TOL):
        if kind not in KINDS:
            raise MalformedInputError(f"unknown structure kind {kind!r}")
        s = as_square(s, "structure map")
        if s.shape[0] == 0 or np.linalg.cond(s) > 1.0 / max(tol, 1e-15):
            raise InvalidStructureError("structure map is singular")
        star = _sign_of_multiple(s.T, s, tol)
        sq = None
        c = _square_scalar(s)
        if abs(c) > 0 and norm(s @ s - c * np.eye(len(s))) <= tol * (1 + abs(c)):
            sq = 1 if c > 0 else -1
        return cls(s, kind, 1 if kind == AUT else -1, star, sq)

    @property
    def n(self):
        return self.s.shape[0]

    @property
    def is_aut(self):
        return self.kind == AUT

    def scaled(self, c):
        return StructureMap.make(c * self.s, self.kind)

    def negated(self):
        """The same (anti)-automorphism realised by -s."""
        return StructureMap(-self.s, self.kind, self.sigma, self.star_sign, self.square_sign)


def apply_gamma(sm, A):
    """Apply the (anti)-automorphism defined by `sm` to the matrix `A`."""
    A = as_square(A)
    if A.shape != sm.s.shape:
        raise MalformedInputError(f"shape mismatch {A.shape} vs {sm.s.shape}")
    try:
        if sm.is_aut:
            return np.linalg.solve(sm.s, A @ sm.s)
        return np.linalg.solve(sm.s, A.T @ sm.s)
    except np.linalg.LinAlgError:
        raise InvalidStructureError("structure map is singular") from None


def transform_structure(sm, g):
    """Structure map in new coordinates under ``L -> g L g^{-1}``."""
    gi = np.linalg.inv(g)
    if sm.is_aut:
        s = g @ sm.s @ gi
    else:
        s = gi.T @ sm.s @ gi
    return StructureMap.make(s, sm.kind)


def check_order_two(sm, tol=DEFAULT_TOL):
    """Raise InvalidStructureError unless gamma_s composed with itself is the identity."""
    for E in matrix_units(sm.n):
        if norm(apply_gamma(sm, apply_gamma(sm, E)) - E) > tol * (1 + np.linalg.cond(sm.s)):
            raise InvalidStructureError("structure map does not define an order-two map")


def _group_closure(gens, cap=GROUP_CAP, tol=1e-8):
    """Finite matrix group generated by `gens` (each of finite order)."""
    n = gens[0].shape[0]
    elems = [np.eye(n)]
    frontier = [np.eye(n)]
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                b = a @ g
                if not any(norm(b - e) <= tol * (1 + norm(e)) for e in elems):
                    elems.append(b)
                    new.append(b)
                    if len(elems) > cap:
                        raise InvalidStructureError(
                            f"group generated by the structure maps exceeds {cap} elements")
        frontier = new
    return elems


def averaged_gram(gens, cap=GROUP_CAP):
    """Group-averaged Gram matrix H; every group element satisfies g^T H g = H."""
    group = _group_closure(gens, cap)
    H = sum(g.T @ g for g in group) / len(group)
    return (H + H.T) / 2


def averaged_metric(gens, cap=GROUP_CAP):
    """Symmetric positive square root of the group-averaged Gram matrix.

    With ``h = averaged_metric(gens)`` every ``h g h^{-1}`` is orthogonal.
    """
    h = sla.sqrtm(averaged_gram(gens, cap))
    return np.real(h + h.T) / 2


def _polar_quarter(s):
    """(s^T s)^{1/4}; congruence by its inverse makes a normal s orthogonal."""
    w, Q = np.linalg.eigh(s.T @ s)
    return (Q * w ** 0.25) @ Q.T


def normalize_structure(sm, tol=DEFAULT_TOL):
    """Bring a structure map to orthogonal form with ``s^2 = +-I``.

    Returns
    -------
    sm_normal : StructureMap
    g : ndarray
        For automorphisms ``sm_normal.s = g s g^{-1}``; for anti-automorphisms
        ``sm_normal.s = g s g^T`` (maps then move by ``L -> g^{-T} L g^T``).
    """
    check_order_two(sm, tol)
    s = sm.s
    n = sm.n
    if sm.is_aut:
        c = _square_scalar(s)
        s = s / np.sqrt(abs(c))
        h = averaged_metric([s])
        sn = h @ s @ np.linalg.inv(h)
        g = h
    else:
        if sm.star_sign is None:
            raise InvalidStructureError("anti-automorphism structure map is neither symmetric nor skew")
        q = _polar_quarter(s)
        qi = np.linalg.inv(q)
        sn = qi @ s @ qi
        g = qi
    sn = _clean(sn)
    out = StructureMap.make(sn, sm.kind, tol)
    if out.square_sign is None or norm(sn.T @ sn - np.eye(n)) > 1e3 * tol:
        raise InvalidStructureError("normalization did not produce an orthogonal structure map")
    return out, g


def _clean(A, eps=1e-13):
    A = np.array(A, dtype=float)
    A[np.abs(A) < eps * max(1.0, np.abs(A).max())] = 0.0
    r = np.round(A)
    close = np.abs(A - r) < eps * max(1.0, np.abs(A).max())
    A[close] = r[close]
    return A


@dataclass(frozen=True)
class EigenspaceSpec:
    """Simultaneous eigenspace gl_{mu_1..mu_p}(V) of commuting generators."""

    generators: tuple
    mus: tuple
    dim: int
    tol: float = DEFAULT_TOL
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "mus", tuple(int(m) for m in self.mus))
        if len(self.generators) != len(self.mus):
            raise MalformedInputError("one eigenvalue per generator is required")
        if not self.generators:
            raise MalformedInputError("at least one structure map is required")
        for m in self.mus:
            if m not in (1, -1):
                raise MalformedInputError(f"eigenvalue must be +1 or -1, got {m}")
        for g in self.generators:
            if g.n != self.dim:
                raise MalformedInputError("structure map dimension mismatch")

    @classmethod
    def single(cls, s, kind, mu, tol=DEFAULT_TOL):
        sm = StructureMap.make(s, kind, tol)
        return cls((sm,), (mu,), sm.n, tol)

    @classmethod
    def build(cls, structures, tol=DEFAULT_TOL):
        """From a list of ``(matrix, kind, mu)`` triples."""
        gens = [StructureMap.make(s, k, tol) for s, k, _ in structures]
        return cls(tuple(gens), tuple(m for _, _, m in structures), gens[0].n, tol)

    @property
    def p(self):
        return len(self.generators)

    @property
    def sigmas(self):
        return tuple(g.sigma for g in self.generators)

    def with_mus(self, mus):
        return EigenspaceSpec(self.generators, tuple(mus), self.dim, self.tol)

    def transformed(self, g):
        """The same eigenspace in coordinates ``L -> g L g^{-1}``."""
        return EigenspaceSpec(tuple(transform_structure(sm, g) for sm in self.generators),
                              self.mus, self.dim, self.tol)

    def negated(self, which=0):
        gens = list(self.generators)
        gens[which] = gens[which].negated()
        return EigenspaceSpec(tuple(gens), self.mus, self.dim, self.tol)

    def component(self, i):
        return EigenspaceSpec((self.generators[i],), (self.mus[i],), self.dim, self.tol)


def check_commuting(spec, tol=None):
    """Raise IncompatibleStructuresError unless all generators commute on gl(V)."""
    tol = spec.tol if tol is None else tol
    for a, b in combinations(spec.generators, 2):
        for E in matrix_units(spec.dim):
            d = apply_gamma(a, apply_gamma(b, E)) - apply_gamma(b, apply_gamma(a, E))
            if norm(d) > tol * (1 + np.linalg.cond(a.s) * np.linalg.cond(b.s)):
                raise IncompatibleStructuresError("structure maps do not commute")


def orthogonalize_family(spec, tol=None):
    """Simultaneous normalization of commuting structure maps.

    The automorphism part of the group generated by the maps (including
    products of pairs of anti-automorphisms) is made orthogonal by
    averaging the inner product; anti-automorphism maps are then made
    orthogonal by congruence with ``(s^T s)^{-1/4}``, which commutes with
    the already orthogonal maps and fixes maps that are orthogonal already.

    Returns
    -------
    spec_normal : EigenspaceSpec
    g : ndarray
        Coordinate change with ``spec_normal == spec.transformed(g)``.
    """
    tol = spec.tol if tol is None else tol
    check_commuting(spec, tol)
    for sm in spec.generators:
        check_order_two(sm, tol)
    n = spec.dim
    # scale every map so that s^2 = +-I (automorphisms) or s is unit-size
    gens = []
    for sm in spec.generators:
        if sm.is_aut:
            c = _square_scalar(sm.s)
            gens.append(StructureMap.make(sm.s / np.sqrt(abs(c)), sm.kind, tol))
        else:
            if sm.star_sign is None:
                raise InvalidStructureError("anti-automorphism structure map is neither symmetric nor skew")
            gens.append(sm)
    auts = [sm.s for sm in gens if sm.is_aut]
    antis = [sm.s for sm in gens if not sm.is_aut]
    for a, b in combinations(antis, 2):
        m = np.linalg.solve(b.T, a)
        c = (abs(np.linalg.det(m))) ** (1.0 / n)
        auts.append(m / c)
    g = np.eye(n)
    if auts:
        g = averaged_metric(auts)
        gens = [transform_structure(sm, g) for sm in gens]
    anti_idx = [k for k, sm in enumerate(gens) if not sm.is_aut]
    if anti_idx:
        q = _polar_quarter(gens[anti_idx[0]].s)
        gens = [transform_structure(sm, q) for sm in gens]
        g = q @ g
    out = []
    for sm in gens:
        s = sm.s
        if not sm.is_aut:
            s = s / np.sqrt(abs(np.linalg.det(s)) ** (2.0 / n))
        out.append(StructureMap.make(_clean(s), sm.kind, tol))
    spec_n = EigenspaceSpec(tuple(out), spec.mus, n, spec.tol)
    _check_normalized(spec_n, max(tol, 1e-10) * 100)
    return spec_n, g


def _check_normalized(spec, tol):
    n = spec.dim
    for sm in spec.generators:
        if norm(sm.s.T @ sm.s - np.eye(n)) > tol or sm.square_sign is None:
            raise InvalidStructureError("normalization failed to reach an orthogonal map")
    for a, b in combinations(spec.generators, 2):
        if _sign_of_multiple(a.s @ b.s, b.s @ a.s, tol) is None:
            raise InvalidStructureError("normalized maps neither commute nor anticommute")


def membership(L, spec):
    """Whether `L` lies in the eigenspace, with the relative residual.

    residual = max_i ||gamma_i(L) - mu_i L|| / (1 + ||L||)
    """
    L = as_square(L)
    if L.shape[0] != spec.dim:
        raise MalformedInputError(f"matrix has size {L.shape[0]}, structures act on {spec.dim}")
    r = 0.0
    for sm, mu in zip(spec.generators, spec.mus):
        r = max(r, norm(apply_gamma(sm, L) - mu * L) / (1.0 + norm(L)))
    return bool(r <= spec.tol), r


def _compose(gens, subset, A):
    for k in subset:
        A = apply_gamma(gens[k], A)
    return A


def project(A, spec, mus=None):
    """Projection onto the simultaneous eigenspace.

    Pi(A) = 2^{-p} sum_T (prod_{i in T} mu_i) gamma_T(A), summed over the
    subsets T of the generators.
    """
    A = as_square(A)
    mus = spec.mus if mus is None else mus
    p = spec.p
    out = np.zeros_like(A)
    for r in range(p + 1):
        for T in combinations(range(p), r):
            c = float(np.prod([mus[i] for i in T])) if T else 1.0
            out += c * _compose(spec.generators, T, A)
    return out / 2 ** p


def eigenspace_basis(spec, mus=None):
    """Frobenius-orthonormal basis of gl_{mus}(V) (default: spec.mus)."""
    n = spec.dim
    cols = [vec(project(E, spec, mus)) for E in matrix_units(n)]
    Q = orth(np.column_stack(cols), 1e-10)
    return [Q[:, k].reshape(n, n) for k in range(Q.shape[1])]


def lie_algebra_basis(spec):
    """Basis of the Lie algebra of the structure-preserving group."""
    return eigenspace_basis(spec, spec.sigmas)


def random_member(spec, rng, scale=1.0):
    """A random element of the eigenspace."""
    n = spec.dim
    return scale * project(rng.uniform(-1, 1, (n, n)), spec)


def random_group_element(spec, rng, max_norm=1.0):
    """exp(U) for random U in the Lie algebra of the structure group, ||U|| <= max_norm."""
    n = spec.dim
    U = project(rng.standard_normal((n, n)), spec, spec.sigmas)
    nu = norm(U)
    if nu > 0:
        U *= max_norm * rng.uniform(0.2, 1.0) / nu
    return sla.expm(U)


def preserves(g, spec, tol=1e-8):
    """Whether g fixes every structure map (g s g^{-1} = s or g^T s g = s)."""
    for sm in spec.generators:
        if sm.is_aut:
            d = g @ sm.s - sm.s @ g
        else:
            d = g.T @ sm.s @ g - sm.s
        if norm(d) > tol * (1 + norm(g)) ** 2:
            return False
    return True


def type_flags(sm, mu):
    """(kind, epsilon, mu) triple; epsilon is s^T = eps s (anti) or s^2 = eps I (aut)."""
    eps = sm.square_sign if sm.is_aut else sm.star_sign
    return sm.kind, eps, mu
