"""q-combinatorics against independent enumeration oracles."""

from __future__ import annotations

import itertools

import pytest

from cdckit.counting import bounded_rank_size, delsarte_rank_count, gauss_binomial, \
    mrd_size
from cdckit.errors import InvalidDistance, OutOfRange
from cdckit.gf import ExtField, gf
from cdckit.matrices import Matrix, mat_rank, mat_rref


def _count_subspaces_brute(n, k, q):
    """Count k-dim subspaces of GF(q)^n by canonical RREF forms."""
    f = gf(q)
    seen = set()
    vectors = list(itertools.product(range(q), repeat=n))
    for rows in itertools.combinations(vectors, k):
        m = Matrix.from_rows(f, rows)
        red, pivots = mat_rref(m)
        if len(pivots) == k:
            seen.add(red.entries)
    return len(seen)


def test_gauss_binomial_brute_force():
    assert _count_subspaces_brute(4, 2, 2) == 35
    assert gauss_binomial(4, 2, 2) == 35
    assert _count_subspaces_brute(3, 2, 2) == 7
    assert gauss_binomial(3, 2, 2) == 7


def test_gauss_edge_cases():
    assert gauss_binomial(5, 0, 3) == 1
    assert gauss_binomial(0, 0, 2) == 1
    assert gauss_binomial(3, 4, 2) == 0


def test_gauss_symmetry():
    for q in (2, 3, 5, 9):
        for n in range(13):
            for k in range(n + 1):
                assert gauss_binomial(n, k, q) == gauss_binomial(n, n - k, q)


def _qpoly_matrices(q, t, degrees):
    """All t x t matrices of the maps sum a_i x^(q^i) on GF(q^t), i in degrees."""
    ext = ExtField(gf(q), t)
    points = [ext.pow(q, j) for j in range(t)]
    mats = []
    for coeffs in itertools.product(ext.elements(), repeat=len(degrees)):
        cols = []
        for p in points:
            acc = 0
            for a, i in zip(coeffs, degrees):
                acc = ext.add(acc, ext.mul(a, ext.pow(p, q**i)))
            cols.append(ext.expand(acc))
        entries = [cols[j][r] for r in range(t) for j in range(t)]
        mats.append(Matrix(gf(q), t, t, entries))
    return mats


def test_mrd_size_against_qpoly_enumeration():
    # distance-2 square MRD code in 3x3: q-degrees {0,1} over GF(8)
    mats = _qpoly_matrices(2, 3, (0, 1))
    assert len(set(m.entries for m in mats)) == 64
    assert mrd_size(2, 3, 3, 2) == 64


def test_mrd_size_values():
    assert mrd_size(2, 6, 6, 2) == 2**30 == 1073741824
    assert mrd_size(3, 4, 2, 2) == 3**4
    for a, b in ((2, 5), (4, 3)):
        assert mrd_size(2, a, b, min(a, b)) == 2 ** max(a, b)


def test_mrd_size_invalid_distance():
    with pytest.raises(InvalidDistance):
        mrd_size(2, 3, 3, 4)
    with pytest.raises(InvalidDistance):
        mrd_size(2, 3, 3, 0)


def test_delsarte_against_enumeration_oracle():
    ranks = {}
    for m in _qpoly_matrices(2, 3, (0, 1)):
        ranks[mat_rank(m)] = ranks.get(mat_rank(m), 0) + 1
    assert ranks == {0: 1, 2: 49, 3: 14}
    assert delsarte_rank_count(2, 3, 3, 2, 2) == 49
    assert delsarte_rank_count(2, 3, 3, 2, 3) == 14


def test_delsarte_single_term():
    # u = d leaves only the s=0 term
    for q, a, b, d in ((2, 3, 5, 2), (3, 4, 4, 3), (5, 2, 6, 1)):
        expect = gauss_binomial(min(a, b), d, q) * (q ** max(a, b) - 1)
        assert delsarte_rank_count(q, a, b, d, d) == expect


def test_delsarte_out_of_range():
    with pytest.raises(OutOfRange):
        delsarte_rank_count(2, 3, 3, 2, 1)
    with pytest.raises(OutOfRange):
        delsarte_rank_count(2, 3, 3, 2, 4)


def test_bounded_rank_size_published_values():
    assert bounded_rank_size(2, 4, 4, 2, 3) == 2776
    assert bounded_rank_size(2, 4, 4, 1, 2) == 7576


def test_bounded_rank_size_edges():
    assert bounded_rank_size(2, 4, 4, 2, 1) == 1  # only the zero matrix
    assert bounded_rank_size(3, 5, 2, 1, 0) == 1
    with pytest.raises(OutOfRange):
        bounded_rank_size(2, 3, 3, 2, 4)


def test_completeness_identity():
    # summing the whole rank distribution recovers the MRD cardinality
    for q in (2, 3, 4, 5, 7, 8, 9):
        for a in range(1, 9):
            for b in range(1, 9):
                for d in range(1, min(a, b) + 1):
                    assert bounded_rank_size(q, a, b, d, min(a, b)) == mrd_size(q, a, b, d)
