"""Exact dense linear algebra over Q(i) and cochain-complex cohomology.

Rank runs through fraction-free Bareiss elimination to keep intermediate
coefficients small; kernels and solving go through reduced row echelon form.
Both are exact, so the split is purely about coefficient growth.
"""

from __future__ import annotations

from typing import Dict, List, Sequence

from .scalar import Scalar


class Matrix:
    """Dense matrix over Q(i)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence[Sequence] | None = None):
        self.rows = rows
        self.cols = cols
        if entries is None:
            self.entries = [[Scalar.zero()] * cols for _ in range(rows)]
        else:
            if len(entries) != rows or any(len(r) != cols for r in entries):
                raise ValueError("inconsistent matrix dimensions")
            self.entries = [[Scalar.of(x) for x in row] for row in entries]

    @staticmethod
    def identity(n: int) -> "Matrix":
        m = Matrix(n, n)
        for j in range(n):
            m.entries[j][j] = Scalar.one()
        return m

    @staticmethod
    def from_columns(cols: Sequence[Sequence], rows: int) -> "Matrix":
        m = Matrix(rows, len(cols))
        for j, col in enumerate(cols):
            for i in range(rows):
                m.entries[i][j] = Scalar.of(col[i])
        return m

    def __getitem__(self, key):
        i, j = key
        return self.entries[i][j]

    def column(self, j: int) -> List[Scalar]:
        return [self.entries[i][j] for i in range(self.rows)]

    def columns(self) -> List[List[Scalar]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      [[self.entries[i][j] for i in range(self.rows)]
                       for j in range(self.cols)])

    def __mul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        out = Matrix(self.rows, other.cols)
        for i in range(self.rows):
            row = self.entries[i]
            for j in range(other.cols):
                acc = Scalar.zero()
                for k in range(self.cols):
                    if not row[k].is_zero():
                        acc = acc + row[k] * other.entries[k][j]
                out.entries[i][j] = acc
        return out

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch in matrix sum")
        return Matrix(self.rows, self.cols,
                      [[self.entries[i][j] + other.entries[i][j]
                        for j in range(self.cols)] for i in range(self.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(Scalar.of(-1))

    def scale(self, c) -> "Matrix":
        c = Scalar.of(c)
        return Matrix(self.rows, self.cols,
                      [[x * c for x in row] for row in self.entries])

    def apply(self, vec: Sequence) -> List[Scalar]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return [
            sum((self.entries[i][j] * Scalar.of(vec[j]) for j in range(self.cols)),
                Scalar.zero())
            for i in range(self.rows)
        ]

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return Matrix(self.rows, self.cols + other.cols,
                      [self.entries[i] + other.entries[i] for i in range(self.rows)])

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and all(
            self.entries[i][j] == other.entries[i][j]
            for i in range(self.rows) for j in range(self.cols))

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self.entries)
        return f"Matrix[{body}]"


def rank(m: Matrix) -> int:
    """Rank via fraction-free Bareiss elimination."""
    a = [row[:] for row in m.entries]
    nrows, ncols = m.rows, m.cols
    prev = Scalar.one()
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if not a[i][c].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        pivot = a[r][c]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                a[i][j] = (pivot * a[i][j] - a[i][c] * a[r][j]) / prev
            a[i][c] = Scalar.zero()
        prev = pivot
        r += 1
        if r == nrows:
            break
    return r


def rref(m: Matrix) -> tuple:
    """Reduced row echelon form; returns (Matrix, pivot column list)."""
    a = [row[:] for row in m.entries]
    nrows, ncols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if not a[i][c].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        inv = a[r][c].inverse()
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and not a[i][c].is_zero():
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return Matrix(nrows, ncols, a), pivots


def kernel_basis(m: Matrix) -> List[List[Scalar]]:
    """Exact basis of the null space; len = cols - rank."""
    red, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Scalar.zero()] * m.cols
        vec[fc] = Scalar.one()
        for r, pc in enumerate(pivots):
            vec[pc] = -red.entries[r][fc]
        basis.append(vec)
    return basis


def solve(m: Matrix, rhs: Sequence) -> List[Scalar] | None:
    """One exact solution of m x = rhs, or None if inconsistent."""
    aug = m.hstack(Matrix(m.rows, 1, [[Scalar.of(v)] for v in rhs]))
    red, pivots = rref(aug)
    if m.cols in pivots:
        return None
    x = [Scalar.zero()] * m.cols
    for r, pc in enumerate(pivots):
        x[pc] = red.entries[r][m.cols]
    return x


def column_span_contains(m: Matrix, vec: Sequence) -> bool:
    return solve(m, vec) is not None


def inverse(m: Matrix) -> Matrix:
    """Exact inverse of a square invertible matrix."""
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    red, pivots = rref(m.hstack(Matrix.identity(m.rows)))
    if len(pivots) != m.rows or pivots != list(range(m.rows)):
        raise ValueError("matrix is singular")
    return Matrix(m.rows, m.rows,
                  [row[m.cols:] for row in red.entries])


def complete_to_basis(m: Matrix) -> Matrix:
    """Append standard basis columns until the matrix becomes invertible."""
    if rank(m) != m.cols:
        raise ValueError("columns are not independent")
    cols = m.columns()
    current = m
    for j in range(m.rows):
        if current.cols == m.rows:
            break
        e = [Scalar.one() if r == j else Scalar.zero() for r in range(m.rows)]
        trial = current.hstack(Matrix(m.rows, 1, [[v] for v in e]))
        if rank(trial) == trial.cols:
            current = trial
    if current.cols != m.rows:
        raise ValueError("could not complete to a basis")
    return current


class CochainComplex:
    """A bounded cochain complex of finite-dimensional Q(i)-spaces.

    ``spaces`` maps degree to dimension, ``differentials`` maps degree k to the
    matrix of d_k : C^k -> C^{k+1} (columns indexed by C^k basis).
    """

    def __init__(self, spaces: Dict[int, int], differentials: Dict[int, Matrix],
                 check: bool = True):
        self.spaces = {k: n for k, n in spaces.items() if n > 0}
        self.differentials = {}
        for k, mat in differentials.items():
            src = self.spaces.get(k, 0)
            tgt = self.spaces.get(k + 1, 0)
            if (mat.rows, mat.cols) != (tgt, src):
                raise ValueError(f"differential at degree {k} has wrong shape")
            if src and tgt:
                self.differentials[k] = mat
        if check:
            bad = self.square_violations()
            if bad:
                raise ValueError(f"d^2 != 0 at degrees {bad}")

    def degrees(self):
        return sorted(self.spaces)

    def dim(self, k: int) -> int:
        return self.spaces.get(k, 0)

    def differential(self, k: int) -> Matrix:
        if k in self.differentials:
            return self.differentials[k]
        return Matrix(self.dim(k + 1), self.dim(k))

    def square_violations(self) -> List[int]:
        bad = []
        for k in self.spaces:
            if self.dim(k) and self.dim(k + 1) and self.dim(k + 2):
                if not (self.differential(k + 1) * self.differential(k)).is_zero():
                    bad.append(k)
        return bad

    def cohomology_dims(self) -> Dict[int, int]:
        """dim H^k = dim ker d_k - rank d_{k-1}, for every degree present."""
        out = {}
        for k in self.degrees():
            dk = self.differential(k)
            kernel_dim = self.dim(k) - rank(dk) if self.dim(k + 1) else self.dim(k)
            prev = self.differential(k - 1)
            image_dim = rank(prev) if self.dim(k - 1) else 0
            out[k] = kernel_dim - image_dim
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in self.spaces.items())

    def is_acyclic(self) -> bool:
        return all(v == 0 for v in self.cohomology_dims().values())


class ChainMap:
    """A degreewise matrix map between two cochain complexes."""

    def __init__(self, source: CochainComplex, target: CochainComplex,
                 blocks: Dict[int, Matrix], target_degree_shift: int = 0):
        self.source = source
        self.target = target
        self.shift = target_degree_shift
        self.blocks = {}
        for k, mat in blocks.items():
            src = source.dim(k)
            tgt = target.dim(k + self.shift)
            if (mat.rows, mat.cols) != (tgt, src):
                raise ValueError(f"block at degree {k} has wrong shape")
            self.blocks[k] = mat

    def block(self, k: int) -> Matrix:
        if k in self.blocks:
            return self.blocks[k]
        return Matrix(self.target.dim(k + self.shift), self.source.dim(k))

    def is_chain_map(self, sign: int = 1) -> bool:
        """Checks d_T B = sign * B d_S in every degree."""
        for k in set(self.source.spaces) | {d - 1 for d in self.source.spaces}:
            left = self.target.differential(k + self.shift) * self.block(k)
            right = (self.block(k + 1) * self.source.differential(k)).scale(sign)
            if (left - right).rows and not (left - right).is_zero():
                return False
        return True

    def _cocycle_basis(self, cx: CochainComplex, k: int) -> Matrix:
        d = cx.differential(k)
        if cx.dim(k) == 0:
            return Matrix(0, 0)
        if cx.dim(k + 1) == 0:
            return Matrix.identity(cx.dim(k))
        basis = kernel_basis(d)
        return Matrix.from_columns(basis, cx.dim(k)) if basis else Matrix(cx.dim(k), 0)

    def _boundary_basis(self, cx: CochainComplex, k: int) -> Matrix:
        if cx.dim(k) == 0 or cx.dim(k - 1) == 0:
            return Matrix(cx.dim(k), 0)
        d = cx.differential(k - 1)
        cols = [d.column(j) for j in range(d.cols)]
        return Matrix.from_columns(cols, cx.dim(k))

    def induced_injective(self, k: int) -> bool:
        """Injectivity of H^k(source) -> H^{k+shift}(target)."""
        z = self._cocycle_basis(self.source, k)
        bs = self._boundary_basis(self.source, k)
        bt = self._boundary_basis(self.target, k + self.shift)
        h_dim = rank(z.hstack(bs)) - rank(bs) if z.cols else 0
        if h_dim == 0:
            return True
        fz = self.block(k) * z
        # classes stay independent iff mapping adds h_dim to the target boundary span
        # after accounting for source boundaries that map into target boundaries
        fb = self.block(k) * bs if bs.cols else Matrix(self.target.dim(k + self.shift), 0)
        big = fz.hstack(fb).hstack(bt)
        small = fb.hstack(bt)
        return rank(big) - rank(small) == h_dim

    def induced_iso(self, k: int) -> bool:
        hs = self._h_dim(self.source, k)
        ht = self._h_dim(self.target, k + self.shift)
        return hs == ht and self.induced_injective(k)

    @staticmethod
    def _h_dim(cx: CochainComplex, k: int) -> int:
        return cx.cohomology_dims().get(k, 0)

    def is_quasi_iso(self) -> bool:
        degrees = set(self.source.spaces) | {k - self.shift for k in self.target.spaces}
        return all(self.induced_iso(k) for k in degrees)

    def is_degreewise_iso(self) -> bool:
        degrees = set(self.source.spaces) | {k - self.shift for k in self.target.spaces}
        for k in degrees:
            b = self.block(k)
            if b.rows != b.cols or rank(b) != b.rows:
                return False
        return True
