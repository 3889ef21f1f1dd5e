import numpy as np
import pytest

from structlin.errors import MalformedInputError
from structlin.linalg import commutator, norm, sylvester_kernel_dim
from structlin.structure import AUT, EigenspaceSpec, membership, random_member
from structlin.tables import spec_of, sweep_family, symmetric_path, unfolding_rows
from structlin.unfolding import (UnfoldingFamily, centralizer_basis, line_path,
                                 miniversal_unfolding, sweep_eigenvalues, tangent_space_rank,
                                 transversality_rank)

ROWS = {r["row"]: r for r in unfolding_rows()}


def jordan(*heights):
    n = sum(heights)
    L = np.zeros((n, n))
    k = 0
    for h in heights:
        L[k + 1:k + h, k:k + h - 1] += np.eye(h - 1)
        k += h
    return L


def test_centralizer_zero_map():
    cb = centralizer_basis(np.zeros((3, 3)))
    assert cb.dim == 9


def test_centralizer_regular_nilpotent_is_polynomials():
    L = jordan(4)
    cb = centralizer_basis(L)
    assert cb.dim == 4
    powers = np.column_stack([np.linalg.matrix_power(L, k).ravel() for k in range(4)])
    for B in cb.basis:
        c = np.linalg.lstsq(powers, B.ravel(), rcond=None)[0]
        assert np.allclose(powers @ c, B.ravel())


@pytest.mark.parametrize("heights,dim", [((2, 1), 5), ((3, 3, 1), 3 + 9 + 5)])
def test_centralizer_block_count(heights, dim):
    cb = centralizer_basis(jordan(*heights))
    assert cb.dim == dim == sylvester_kernel_dim(jordan(*heights))
    assert sum(cb.per_block_counts.values()) == dim


def test_centralizer_elements_commute(specs, rng):
    for spec in specs.values():
        L = random_member(spec, rng)
        cb = centralizer_basis(L)
        for B in cb.basis:
            assert norm(commutator(B, L)) < 1e-8 * (1 + norm(L))


def test_centralizer_complex_classes():
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    L = np.kron(np.eye(2), J)
    assert centralizer_basis(L).dim == 8 == sylvester_kernel_dim(L)


def test_spec_examples():
    fam = miniversal_unfolding(ROWS["2b"]["L"], spec_of(ROWS["2b"]))
    assert fam.codim == 1
    D = fam.directions[0]
    assert abs(D[1, 0]) > 0.5 and np.allclose(D[[0, 0, 1], [0, 1, 1]], 0)
    fam = miniversal_unfolding(ROWS["8b"]["L"], spec_of(ROWS["8b"]))
    assert fam.codim == 1
    assert np.allclose(np.abs(fam.directions[0]), [[0, 1], [0, 0]])
    assert miniversal_unfolding(ROWS["1a"]["L"], spec_of(ROWS["1a"])).codim == 1


def test_directions_in_eigenspace_and_transverse():
    for fx in unfolding_rows():
        spec = spec_of(fx)
        fam = miniversal_unfolding(fx["L"], spec)
        for D in fam.directions:
            assert membership(D, spec)[0]
        r, dim = transversality_rank(fam, spec)
        assert r == dim
        assert fam.codim == dim - tangent_space_rank(fx["L"], spec)


def test_unfolding_non_orthogonal_structure(rng):
    # same 2b orbit in skewed coordinates: codim is coordinate free
    P = np.eye(2) + 0.4 * rng.standard_normal((2, 2))
    Pi = np.linalg.inv(P)
    spec = EigenspaceSpec.single(P @ ROWS["2b"]["s"] @ Pi, AUT, -1)
    fam = miniversal_unfolding(P @ ROWS["2b"]["L"] @ Pi, spec)
    assert fam.codim == 1
    assert membership(fam.directions[0], spec)[0]


def test_unfolding_rejects_non_member():
    with pytest.raises(MalformedInputError):
        miniversal_unfolding(np.eye(2), spec_of(ROWS["2b"]))


def test_family_evaluate():
    fx, fam = sweep_family("8c")
    M = fam.evaluate([0.0, 0.25])
    assert M[0, 2] == 0.25
    with pytest.raises(MalformedInputError):
        fam.evaluate([1.0])


def test_trivial_sweep_has_no_events():
    fam = UnfoldingFamily.explicit(np.zeros((1, 1)), [np.ones((1, 1))])
    res = sweep_eigenvalues(fam, line_path([-1.0], [1.0], 51))
    assert res.events == []
    assert all(z.size == 1 and z[0].imag == 0 for z in res.eigenvalues)


def test_sweep_rejects_wrong_dimension():
    fx, fam = sweep_family("8c")
    with pytest.raises(MalformedInputError):
        sweep_eigenvalues(fam, [np.zeros(3)])


def test_sweep_detects_real_collision_split():
    # type 5c with distinct signs: the real pair collides and splits
    R = np.diag([1.0, -1.0])
    fam = UnfoldingFamily.explicit(R, [np.array([[0.0, -1.0], [1.0, 0.0]])])
    res = sweep_eigenvalues(fam, line_path([0.0], [2.0], 201))
    assert [e["kind"] for e in res.events] == ["SPLIT"]


def test_sweep_real_pass():
    fam = UnfoldingFamily.explicit(np.zeros((2, 2)), [np.diag([1.0, -1.0])])
    res = sweep_eigenvalues(fam, symmetric_path(1, 0))
    assert [e["kind"] for e in res.events] == ["PASS"]
    assert res.events[0]["step"] == 100


def test_sweep_output_deterministic():
    fx, fam = sweep_family("6d")
    a = sweep_eigenvalues(fam, symmetric_path(2, 1)).rows()
    b = sweep_eigenvalues(fam, symmetric_path(2, 1)).rows()
    assert a == b


@pytest.mark.parametrize("row", ["6d", "6e", "8c", "8d"])
def test_sweep_pairing_symmetry(row):
    fx, fam = sweep_family(row)
    k = fam.n_params
    res = sweep_eigenvalues(fam, line_path(np.full(k, -0.05), np.linspace(0.02, 0.09, k), 41))
    for z in res.eigenvalues:
        for w in (-z, z.conj()):
            d = np.abs(np.sort_complex(w)[:, None] - z[None, :]).min(axis=1)
            assert d.max() < 1e-6


def _brute_codim(L, s):
    # independent oracle: null spaces of vec-linear maps built entrywise
    n = L.shape[0]
    si = np.linalg.inv(s)
    units = [np.eye(n * n)[k].reshape(n, n) for k in range(n * n)]

    def kernel(sign):
        M = np.array([(si @ E.T @ s + sign * E).ravel() for E in units]).T
        u, sv, vt = np.linalg.svd(M)
        return [v.reshape(n, n) for v, x in zip(vt, np.r_[sv, np.zeros(n * n)]) if x < 1e-10]

    space = kernel(-1)
    group = kernel(1)
    tangent = np.array([(U @ L - L @ U).ravel() for U in group])
    return len(space) - np.linalg.matrix_rank(tangent, 1e-9)


def test_row_7b_codimension_is_two():
    # skew-Hamiltonian double zero of height two: both routes and the
    # brute-force oracle give 2 (frozen), not the tabulated 4
    fx = ROWS["7b"]
    fam = miniversal_unfolding(fx["L"], spec_of(fx))
    assert fam.codim == 2
    assert _brute_codim(fx["L"], fx["s"]) == 2
    assert fx["codim"] == 4
