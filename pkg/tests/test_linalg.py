import pytest

from lagdist.linalg import (ChainMap, CochainComplex, Matrix, kernel_basis,
                            rank, rref, solve)
from lagdist.scalar import Scalar

i = Scalar.i()


def test_rank_identity():
    assert rank(Matrix.identity(3)) == 3


def test_rank_zero_matrix():
    assert rank(Matrix(2, 3)) == 0


def test_rank_dependent_rows():
    # row2 = i * row1
    m = Matrix(2, 2, [[1, i], [i, Scalar(-1)]])
    assert rank(m) == 1


def test_kernel_identity_empty():
    assert kernel_basis(Matrix.identity(2)) == []


def test_kernel_zero_full():
    basis = kernel_basis(Matrix(2, 2))
    assert len(basis) == 2


def test_kernel_one_relation():
    # 1*a + i*b = 0 has solution line through (-i, 1)
    m = Matrix(1, 2, [[1, i]])
    basis = kernel_basis(m)
    assert len(basis) == 1
    v = basis[0]
    assert all(x.is_zero() for x in m.apply(v))
    # proportional to (-i, 1)
    ratio = v[0] / Scalar(0, -1) if not v[0].is_zero() else v[1]
    assert v[0] == ratio * Scalar(0, -1) and v[1] == ratio


def test_rank_plus_nullity():
    m = Matrix(3, 4, [[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, 0, i]])
    assert rank(m) + len(kernel_basis(m)) == 4


def test_solve_consistent_and_not():
    m = Matrix(2, 2, [[1, 1], [0, 0]])
    assert solve(m, [Scalar(2), Scalar.zero()]) is not None
    assert solve(m, [Scalar(2), Scalar(1)]) is None


def _complex(spaces, diffs):
    return CochainComplex(spaces, {k: Matrix(len(v), len(v[0]) if v else 0, v)
                                   for k, v in diffs.items()})


class TestCochainComplex:
    def test_acyclic_two_term(self):
        c = CochainComplex({0: 1, 1: 1}, {0: Matrix(1, 1, [[1]])})
        assert c.cohomology_dims() == {0: 0, 1: 0}

    def test_zero_differential(self):
        c = CochainComplex({0: 1, 1: 1}, {0: Matrix(1, 1, [[0]])})
        assert c.cohomology_dims() == {0: 1, 1: 1}

    def test_rank_one_elimination(self):
        c = CochainComplex({0: 2, 1: 2}, {0: Matrix(2, 2, [[1, 0], [0, 0]])})
        assert c.cohomology_dims() == {0: 1, 1: 1}

    def test_rejects_nonzero_square(self):
        d0 = Matrix(1, 1, [[1]])
        d1 = Matrix(1, 1, [[1]])
        with pytest.raises(ValueError):
            CochainComplex({0: 1, 1: 1, 2: 1}, {0: d0, 1: d1})

    def test_euler_characteristic(self):
        c = CochainComplex({0: 1, 1: 2, 2: 1}, {})
        assert c.euler_characteristic() == 0


class TestChainMap:
    def test_identity_quasi_iso(self):
        c = CochainComplex({0: 2, 1: 2}, {0: Matrix(2, 2, [[1, 0], [0, 0]])})
        f = ChainMap(c, c, {0: Matrix.identity(2), 1: Matrix.identity(2)})
        assert f.is_chain_map()
        assert f.is_quasi_iso()
        assert f.is_degreewise_iso()

    def test_projection_to_cohomology(self):
        # source: acyclic pair plus a surviving class; target: just the class
        src = CochainComplex({0: 2, 1: 1}, {0: Matrix(1, 2, [[0, 1]])})
        tgt = CochainComplex({0: 1}, {})
        f = ChainMap(src, tgt, {0: Matrix(1, 2, [[1, 0]])})
        assert f.is_chain_map()
        assert f.is_quasi_iso()
        assert not f.is_degreewise_iso()

    def test_zero_map_not_quasi_iso(self):
        c = CochainComplex({0: 1}, {})
        f = ChainMap(c, c, {0: Matrix(1, 1, [[0]])})
        assert f.is_chain_map()
        assert not f.is_quasi_iso()
