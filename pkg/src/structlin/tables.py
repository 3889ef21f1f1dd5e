"""Reference fixtures: low-codimension unfoldings, semi-simple normal forms,
explicit sweep families and the reversible-symplectic double-zero example.

Every fixture is a plain dict with keys ``L``, ``s``, ``kind``, ``mu`` plus
row metadata, so it can be fed to :class:`EigenspaceSpec.single`.
"""
import numpy as np

from .structure import ANTI, AUT, EigenspaceSpec
from .unfolding import UnfoldingFamily

I2 = np.eye(2)
Z2 = np.zeros((2, 2))
J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
R2 = np.diag([1.0, -1.0])
T2 = np.array([[0.0, 1.0], [1.0, 0.0]])

# (kind, mu) of the eight types; the sign of s^2 or s^T is carried by s
TYPE_KIND = {1: (AUT, 1), 2: (AUT, -1), 3: (AUT, 1), 4: (AUT, -1),
             5: (ANTI, 1), 6: (ANTI, -1), 7: (ANTI, 1), 8: (ANTI, -1)}


def rot(a, b):
    return np.array([[a, -b], [b, a]])


def blkdiag(*blocks):
    n = sum(np.atleast_2d(b).shape[0] for b in blocks)
    out = np.zeros((n, n))
    k = 0
    for b in blocks:
        b = np.atleast_2d(b)
        m = b.shape[0]
        out[k:k + m, k:k + m] = b
        k += m
    return out


def _lower(tile, n):
    m = tile.shape[0]
    out = np.kron(np.eye(n), tile)
    out[m:, :-m] += np.eye(m * (n - 1))
    return out


def spec_of(fx, tol=1e-9):
    return EigenspaceSpec.single(fx["s"], fx["kind"], fx["mu"], tol)


def _fx(row, L, s, codim=None, **kw):
    t = int(row[0])
    kind, mu = TYPE_KIND[t]
    d = {"row": row, "type": t, "L": np.array(L, dtype=float), "s": np.array(s, dtype=float),
         "kind": kind, "mu": mu}
    if codim is not None:
        d["codim"] = codim
    d.update(kw)
    return d


def unfolding_rows(beta=1.0):
    """All rows of the automorphism and anti-automorphism unfolding tables at nu = 0."""
    b = beta
    one = np.ones((1, 1))
    zero1 = np.zeros((1, 1))
    nil2 = np.array([[0.0, 0.0], [1.0, 0.0]])
    SJ = np.block([[Z2, J2], [-J2, Z2]])
    Lc = _lower(b * J2, 2)
    Ld = blkdiag(b * J2, b * J2)
    nil4 = _lower(Z2, 2)
    return [
        _fx("1a", zero1, one, 1),
        _fx("1b", nil2, I2, 2),
        _fx("1c", Z2, R2, 2),
        _fx("1d", Z2, I2, 4),
        _fx("2a", zero1, one, 0),
        _fx("2b", [[0, 1], [0, 0]], R2, 1),
        _fx("2c", Z2, R2, 2),
        _fx("2d", [[0, 0, 0], [0, 0, 1], [1, 0, 0]], np.diag([1, 1, -1]), 1),
        _fx("2e", [[0, 0, 0], [0, 0, 1], [0, 0, 0]], np.diag([1, 1, -1]), 2),
        _fx("2f", [[0, 1, 0], [0, 0, 0], [0, 0, 0]], np.diag([1, -1, -1]), 2),
        _fx("3a", Z2, J2, 2),
        _fx("3b", Lc, blkdiag(J2, J2), 4),
        _fx("3c", Ld, blkdiag(J2, -J2), 4),
        _fx("4", Z2, J2, 2),
        _fx("5a", zero1, one, 1),
        _fx("5b", nil2, T2, 2),
        _fx("5c", Z2, R2, 3),
        _fx("5d", Z2, I2, 3),
        _fx("6a", zero1, one, 0),
        _fx("6b", _lower(zero1, 3), np.fliplr(np.diag([1, -1, 1])), 1),
        _fx("6c", nil4, SJ, 4),
        _fx("6d", Lc, SJ, 2),
        _fx("6e", Ld, np.eye(4), 4),
        _fx("7a", Z2, J2, 1),
        _fx("7b", nil4, np.block([[Z2, J2], [J2, Z2]]), 4),
        _fx("8a", Z2, J2, 3),
        _fx("8b", nil2, J2, 1),
        _fx("8c", Lc, np.block([[Z2, I2], [-I2, Z2]]), 2),
        _fx("8d", Ld, blkdiag(J2, J2), 4),
    ]


def normal_form_rows(alpha=1.0, beta=1.0):
    """Representatives of every semi-simple normal-form row.

    ``signed`` rows have two inequivalent forms, (L, s) and (L, -s).
    """
    a, b = alpha, beta
    one = np.ones((1, 1))
    SP = np.block([[Z2, I2], [I2, Z2]])
    SM = np.block([[Z2, -I2], [I2, Z2]])
    qm = blkdiag(rot(a, b), np.array([[-a, b], [-b, -a]]))
    qp = blkdiag(rot(a, b), np.array([[-a, -b], [b, -a]]))
    return [
        _fx("1-real", a * one, one, signed=True, lam=(a, 0.0)),
        _fx("1-complex", rot(a, b), I2, signed=True, lam=(a, b)),
        _fx("2-zero", 0 * one, one, signed=True, lam=(0.0, 0.0)),
        _fx("2-real-pair", np.diag([a, -a]), T2, signed=False, lam=(a, 0.0)),
        _fx("2-imaginary-pair", b * J2, R2, signed=False, lam=(0.0, b)),
        _fx("2-quadruple", qm, SP, signed=False, lam=(a, b)),
        _fx("3-complex", rot(a, b), J2, signed=True, lam=(a, b)),
        _fx("4-real-pair", np.diag([a, -a]), J2, signed=False, lam=(a, 0.0)),
        _fx("4-quadruple", qm, SM, signed=False, lam=(a, b)),
        _fx("5-real", a * one, one, signed=True, lam=(a, 0.0)),
        _fx("5-complex", rot(a, b), R2, signed=False, lam=(a, b)),
        _fx("6-zero", 0 * one, one, signed=True, lam=(0.0, 0.0)),
        _fx("6-real-pair", np.diag([a, -a]), T2, signed=False, lam=(a, 0.0)),
        _fx("6-imaginary-pair", b * J2, I2, signed=True, lam=(0.0, b)),
        _fx("6-quadruple", qp, SP, signed=False, lam=(a, b)),
        _fx("7-real", a * I2, J2, signed=False, lam=(a, 0.0)),
        _fx("7-complex", blkdiag(rot(a, b), rot(a, -b)), SM, signed=False, lam=(a, b)),
        _fx("8-real-pair", np.diag([a, -a]), J2, signed=False, lam=(a, 0.0)),
        _fx("8-imaginary-pair", b * J2, J2, signed=True, lam=(0.0, b)),
        _fx("8-quadruple", qp, SM, signed=False, lam=(a, b)),
    ]


def _units(n, entries):
    M = np.zeros((n, n))
    for (i, j), v in entries.items():
        M[i, j] = v
    return M


def sweep_family(row, beta=1.0):
    """Explicit affine families of the 4 x 4 imaginary-pair rows 6d, 6e, 8c, 8d.

    Returns
    -------
    fixture : dict
    family : UnfoldingFamily
        Directions ordered as the parameters nu_1, nu_2, ... of the table.
    """
    fx = {r["row"]: r for r in unfolding_rows(beta)}[row]
    if row in ("6d", "8c"):
        D1 = _units(4, {(0, 1): -1, (1, 0): 1, (2, 3): -1, (3, 2): 1})
        D2 = _units(4, {(0, 2): 1, (1, 3): 1})
        dirs = [D1, D2]
    elif row in ("6e", "8d"):
        D1 = _units(4, {(0, 1): -1, (1, 0): 1})
        D2 = _units(4, {(2, 3): -1, (3, 2): 1})
        D3 = _units(4, {(0, 2): 1, (1, 3): 1, (2, 0): -1, (3, 1): -1})
        D4 = _units(4, {(0, 3): -1, (1, 2): 1, (2, 1): -1, (3, 0): 1})
        dirs = [D1, D2, D3, D4]
    else:
        raise KeyError(f"no explicit sweep family for row {row!r}")
    return fx, UnfoldingFamily.explicit(fx["L"], dirs)


def symmetric_path(n_params, which, half_width=0.1, steps=201):
    """Path varying parameter `which` over [-h, h] with the others at 0; 0 is hit exactly."""
    t = np.round(np.linspace(-half_width, half_width, steps), 12)
    pts = np.zeros((steps, n_params))
    pts[:, which] = t
    return [p for p in pts]


def double_zero_reversible_symplectic(r_sign, j_sign):
    """Two height-two zero blocks on R^4, reversible (R) and Hamiltonian (J).

    The four sign choices pick the nilpotent block B in L = diag(B, B); both
    blocks then carry reversible sign `r_sign` and Hamiltonian sign `j_sign`.
    """
    N1 = np.array([[0.0, 0.0], [1.0, 0.0]])
    N2 = np.array([[0.0, 1.0], [0.0, 0.0]])
    base = N1 if r_sign > 0 else N2
    B = base if j_sign < 0 else -base
    if r_sign < 0:
        B = -B
    L = blkdiag(B, B)
    structures = [(blkdiag(R2, R2), AUT, -1), (blkdiag(J2, J2), ANTI, -1)]
    return L, structures
