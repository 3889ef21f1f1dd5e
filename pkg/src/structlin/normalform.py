"""Classification of structured blocks, normal forms and orbit equivalence."""
from dataclasses import dataclass, field

import numpy as np

from .decomp import CPLX, IMAG, PAIR, QUAD, REAL, invariant_blocks, jc_decompose
from .errors import ClassificationError
from .linalg import DEFAULT_TOL, EigenvalueClass, as_square, norm
from .reduction import reduce_block
from .structure import ANTI, AUT, membership, orthogonalize_family, transform_structure

I2 = np.eye(2)
Z2 = np.zeros((2, 2))
J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
R2 = np.diag([1.0, -1.0])
T2 = np.array([[0.0, 1.0], [1.0, 0.0]])
SWAP_P = np.block([[Z2, I2], [I2, Z2]])
SWAP_M = np.block([[Z2, -I2], [I2, Z2]])

TYPE_NAMES = {
    1: "equivariant (type R)",
    2: "reversible (type R)",
    3: "equivariant (type C)",
    4: "reversible (type C)",
    5: "symmetric",
    6: "anti-symmetric",
    7: "anti-symplectic",
    8: "symplectic",
}


def _type_number(kind, eps, mu):
    base = 0 if kind == AUT else 4
    return base + (1 if eps == 1 else 3) + (0 if mu == 1 else 1)


def type_of(spec):
    """Row of the eight-type table for a normalized EigenspaceSpec.

    Multiple generators give a list with one entry per generator.
    """
    out = []
    for sm, mu in zip(spec.generators, spec.mus):
        eps = sm.star_sign
        if sm.is_aut and eps is None:
            eps = sm.square_sign
        if eps is None:
            raise ClassificationError("structure map must be normalized to determine its type")
        out.append(_type_number(sm.kind, eps, mu))
    return out[0] if len(out) == 1 else out


def _rot(a, b):
    return np.array([[a, -b], [b, a]])


def _diag(*blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    k = 0
    for b in blocks:
        m = b.shape[0]
        out[k:k + m, k:k + m] = b
        k += m
    return out


def shape_name(shape, mu):
    if mu == 1:
        return {REAL: "real", CPLX: "complex"}[shape]
    return {REAL: "zero", PAIR: "real-pair", IMAG: "imaginary-pair", QUAD: "quadruple"}[shape]


def table_rows(type_id, shape, a, b):
    """Semi-simple normal-form rows (S, t, sign) for a type and orbit shape.

    The sign sits in the structure map t; unsigned rows carry ``None``.
    """
    one = np.ones((1, 1))
    A = a * one
    signed = lambda S, t: [(S, t, 1), (S, -t, -1)]
    quad_minus = lambda: _diag(_rot(a, b), np.array([[-a, b], [-b, -a]]))
    quad_plus = lambda: _diag(_rot(a, b), np.array([[-a, -b], [b, -a]]))
    rows = {
        (1, REAL): signed(A, one),
        (1, CPLX): signed(_rot(a, b), I2),
        (2, REAL): signed(0 * one, one),
        (2, PAIR): [(_diag(A, -A), T2, None)],
        (2, IMAG): [(b * J2, R2, None)],
        (2, QUAD): [(quad_minus(), SWAP_P, None)],
        (3, REAL): [(a * I2, J2, None)],
        (3, CPLX): signed(_rot(a, b), J2),
        (4, REAL): [(Z2, J2, None)],
        (4, PAIR): [(a * R2, J2, None)],
        (4, IMAG): [(_diag(b * J2, -b * J2), SWAP_M, None)],
        (4, QUAD): [(quad_minus(), SWAP_M, None)],
        (5, REAL): signed(A, one),
        (5, CPLX): [(_rot(a, b), R2, None)],
        (6, REAL): signed(0 * one, one),
        (6, PAIR): [(_diag(A, -A), T2, None)],
        (6, IMAG): signed(b * J2, I2),
        (6, QUAD): [(quad_plus(), SWAP_P, None)],
        (7, REAL): [(a * I2, J2, None)],
        (7, CPLX): [(_diag(_rot(a, b), _rot(a, -b)), SWAP_M, None)],
        (8, REAL): [(Z2, J2, None)],
        (8, PAIR): [(a * R2, J2, None)],
        (8, IMAG): signed(b * J2, J2),
        (8, QUAD): [(quad_plus(), SWAP_M, None)],
    }
    return rows.get((type_id, shape), [])


@dataclass(frozen=True)
class BlockLabel:
    """Invariant label of one indecomposable block.

    ``reduced_form_tag`` names the matched semi-simple row as
    ``"<reduced type>:<shape>"``; for anti-automorphisms with height n the
    reduced type is the one of the form tau with symmetry eps*mu^(n-1).
    """

    type_id: int
    lam: EigenvalueClass
    height: int
    sign: object
    reduced_form_tag: str
    nongeneric: bool = False
    shape: str = ""

    def sort_key(self):
        return (self.lam.alpha, self.lam.beta, self.height, 0 if self.sign is None else self.sign)

    def as_dict(self):
        return {
            "type": self.type_id,
            "lambda": {"alpha": self.lam.alpha, "beta": self.lam.beta},
            "dim": self.lam.mult,
            "height": self.height,
            "sign": self.sign,
            "row": self.reduced_form_tag,
            "nongeneric": self.nongeneric,
        }


def classify_block(rf, type_id, tol=1e-6):
    """Match a reduced form against the semi-simple rows of its reduced type."""
    mu = rf.mu
    if rf.kind == AUT:
        rtype = type_id
    else:
        rtype = _type_number(ANTI, rf.reduced_epsilon, mu)
    lam = rf.lam
    a, b = lam.alpha, lam.beta
    rows = table_rows(rtype, rf.shape, a, b)
    scale = 1.0 + norm(rf.S_on_Y) + norm(rf.t)
    best = np.inf
    for S, t, sign in rows:
        if S.shape != rf.S_on_Y.shape:
            continue
        err = max(norm(rf.S_on_Y - S), norm(rf.t - t)) / scale
        best = min(best, err)
        if err <= tol:
            tag = f"{rtype}:{shape_name(rf.shape, mu)}"
            nongen = rtype == 3 and rf.shape == REAL
            return BlockLabel(type_id, lam, rf.height, sign, tag, nongen, rf.shape)
    raise ClassificationError(
        f"no normal-form row of type {rtype} matches block {lam.key()} (height {rf.height})",
        {"best_error": best, "S_on_Y": rf.S_on_Y.tolist(), "t": rf.t.tolist(),
         "shape": rf.shape, "reduced_type": rtype})


def _tile(label):
    """Semi-simple tile of a matched label (first matching row's S)."""
    a, b = label.lam.alpha, label.lam.beta
    rtype = int(label.reduced_form_tag.split(":")[0])
    return table_rows(rtype, label.shape, a, b)[0][0]


def jordan_matrix(tile, n):
    """Lower block Jordan matrix: `tile` on the diagonal, identity below."""
    m = tile.shape[0]
    out = np.zeros((m * n, m * n))
    for k in range(n):
        out[k * m:(k + 1) * m, k * m:(k + 1) * m] = tile
        if k + 1 < n:
            out[(k + 1) * m:(k + 2) * m, k * m:(k + 1) * m] = np.eye(m)
    return out


def reconstruct(labels, blocks, L):
    """Normal form from classified blocks.

    Parameters
    ----------
    labels : list of BlockLabel
    blocks : list of InvariantBlock, aligned with `labels`
    L : ndarray

    Returns
    -------
    normal_form_L : ndarray
        Block diagonal with one lower Jordan matrix per block.
    g : ndarray
        Coordinate change with ``g L g^{-1} = normal_form_L``.
    """
    P = np.hstack([b.X.basis for b in blocks])
    mats = []
    for lab, b in zip(labels, blocks):
        mats.append(jordan_matrix(_tile(lab), b.height))
    L0 = _diag(*mats) if mats else np.zeros((0, 0))
    g = np.linalg.inv(P)
    return L0, g


@dataclass(frozen=True)
class ClassificationReport:
    """Result of :func:`classify`.

    For several structure maps ``labels`` holds one label tuple per
    generator and ``normal_form_L`` / ``basis_change`` refer to the first.
    """

    labels: tuple
    basis_change: np.ndarray
    normal_form_L: np.ndarray
    normal_form_s_list: list
    residual: float
    type_ids: object = None
    diagnostics: dict = field(default_factory=dict)


def _sort_blocks(labels, blocks):
    order = sorted(range(len(labels)), key=lambda k: labels[k].sort_key())
    return [labels[k] for k in order], [blocks[k] for k in order]


def classify(L, spec):
    """Full pipeline: JC decomposition, blocks, reduction, labels, normal form."""
    L = as_square(L)
    ok, res = membership(L, spec)
    if not ok:
        raise ClassificationError(f"matrix is not in the eigenspace (residual {res:.3g})",
                                  {"membership_residual": res})
    if spec.p > 1:
        return _classify_multi(L, spec)
    spec_n, g0 = orthogonalize_family(spec)
    Ln = g0 @ L @ np.linalg.inv(g0)
    tol = spec.tol
    jc = jc_decompose(Ln, tol)
    blocks = invariant_blocks(Ln, jc, spec_n)
    sm, mu = spec_n.generators[0], spec_n.mus[0]
    tid = type_of(spec_n)
    labels = []
    diag_blocks = []
    for b in blocks:
        rf = reduce_block(b, sm, mu)
        labels.append(classify_block(rf, tid))
        diag_blocks.append(rf.diagnostics)
    labels, blocks = _sort_blocks(labels, blocks)
    L0, gb = reconstruct(labels, blocks, Ln)
    g = gb @ g0
    Lg = g @ L @ np.linalg.inv(g)
    residual = norm(Lg - L0) / (1.0 + norm(L))
    s_list = [transform_structure(sm0, g).s for sm0 in spec.generators]
    diagnostics = {
        "membership_residual": res,
        "jc_residuals": jc.residuals,
        "orbit_bound": 2,
        "residual_within_tolerance": bool(residual < 10 * tol),
        "blocks": diag_blocks,
        "nongeneric": any(l.nongeneric for l in labels),
    }
    return ClassificationReport(tuple(labels), g, L0, s_list, residual, tid, diagnostics)


def _classify_multi(L, spec):
    reports = [classify(L, spec.component(i)) for i in range(spec.p)]
    first = reports[0]
    g = first.basis_change
    s_list = [transform_structure(sm, g).s for sm in spec.generators]
    diagnostics = {
        "orbit_bound": 2 ** spec.p,
        "per_generator": [r.diagnostics for r in reports],
        "per_generator_types": [r.type_ids for r in reports],
    }
    labels = tuple(r.labels for r in reports)
    return ClassificationReport(labels, g, first.normal_form_L, s_list,
                                max(r.residual for r in reports), [r.type_ids for r in reports],
                                diagnostics)


def _labels_match(A, B, tol):
    if len(A) != len(B):
        return False
    A = sorted(A, key=BlockLabel.sort_key)
    B = sorted(B, key=BlockLabel.sort_key)
    for x, y in zip(A, B):
        if (x.type_id, x.height, x.sign, x.reduced_form_tag, x.lam.mult) != \
                (y.type_id, y.height, y.sign, y.reduced_form_tag, y.lam.mult):
            return False
        if abs(x.lam.alpha - y.lam.alpha) > tol * (1 + abs(x.lam.alpha)):
            return False
        if abs(x.lam.beta - y.lam.beta) > tol * (1 + abs(x.lam.beta)):
            return False
    return True


def labels_equal(A, B, tol=1e-6):
    """Compare label multisets (or per-generator tuples of them)."""
    if A and isinstance(A[0], tuple):
        return len(A) == len(B) and all(_labels_match(a, b, tol) for a, b in zip(A, B))
    return _labels_match(A, B, tol)


def orbits_equivalent(L, M, spec, tol=1e-6):
    """Whether L and M lie in the same orbit of the structure-preserving group.

    Decided by comparing label multisets (eigenvalue class, height, sign).
    With several generators the per-generator labels are compared, which
    separates up to 2^p orbits per similarity class.
    """
    return labels_equal(classify(L, spec).labels, classify(M, spec).labels, tol)
