import itertools
import random

import pytest

from lagdist.dga import (ClassicalPoint, DgAlgebra, MinimizeError,
                         is_minimal_at, kahler_differentials, minimize_at,
                         pairing, tangent_bracket, tangent_complex,
                         tangent_apply, tangent_pairing_names)
from lagdist.families import one_variable_family, paired, quadratic_pair_algebra
from lagdist.scalar import Poly, Scalar

i = Scalar.i()
x = Poly.variable("x")


@pytest.fixture
def darboux_x2():
    """d(y0) = x^2, d(y1) = i x^2, d(z0) = 4x y0 + 4i x y1."""
    return one_variable_family(x ** 2)


@pytest.fixture
def darboux_cubic():
    return one_variable_family(x ** 3 - x)


def point(A, value):
    return ClassicalPoint(A, {"x": Scalar.of(value)})


class TestMultiply:
    def test_odd_square_is_zero(self, darboux_x2):
        y = darboux_x2.gen("y0")
        assert (y * y).is_zero()

    def test_koszul_swap_sign(self, darboux_x2):
        A = darboux_x2
        y1, y2 = A.gen("y0"), A.gen("y1")
        assert y1 * y2 == -(y2 * y1)

    def test_normal_order_sign_matches_parity_oracle(self, darboux_x2):
        # multiply in scrambled order, compare against transposition parity
        A = darboux_x2
        symbols = ["y0", "z0", "y1"]
        prod = A.var("x")
        for s in symbols:
            prod = prod * A.gen(s)
        # oracle: bubble-sort (degree, name) with Koszul signs by hand
        degs = {s: A.gen_degree[s] for s in symbols}
        seq = list(symbols)
        sign = 1
        changed = True
        while changed:
            changed = False
            for k in range(len(seq) - 1):
                a, b = seq[k], seq[k + 1]
                if (degs[a], a) > (degs[b], b):
                    if (degs[a] * degs[b]) % 2:
                        sign = -sign
                    seq[k], seq[k + 1] = b, a
                    changed = True
        expected_mono = tuple(seq)
        assert list(prod.terms) == [expected_mono]
        coeff = prod.terms[expected_mono]
        assert coeff == Poly.variable("x") * Scalar.of(sign)

    def test_graded_commutativity_fuzz(self, darboux_x2):
        A = darboux_x2
        rng = random.Random(7)
        atoms = [A.var("x"), A.gen("y0"), A.gen("y1"), A.gen("z0")]
        for _ in range(30):
            a = atoms[rng.randrange(len(atoms))] * atoms[rng.randrange(len(atoms))]
            b = atoms[rng.randrange(len(atoms))]
            if a.is_zero() or b.is_zero():
                continue
            sign = Scalar.of((-1) ** (a.degree() * b.degree()))
            assert a * b == (b * a) * sign


class TestDifferentiate:
    def test_leibniz_forced_on_pair(self, darboux_x2):
        A = darboux_x2
        y1, y2 = A.gen("y0"), A.gen("y1")
        f1, f2 = A.differential["y0"], A.differential["y1"]
        assert (y1 * y2).differentiate() == f1 * y2 - f2 * y1

    def test_constant_dies(self, darboux_x2):
        assert darboux_x2.scalar(5).differentiate().is_zero()

    def test_d_squared_zero_on_z(self, darboux_x2):
        ddz = darboux_x2.differential["z0"].differentiate()
        assert ddz.is_zero()

    def test_d_squared_fuzz(self, darboux_cubic):
        A = darboux_cubic
        rng = random.Random(11)
        atoms = [A.var("x"), A.gen("y0"), A.gen("y1"), A.gen("z0")]
        for _ in range(25):
            e = A.one()
            for _ in range(rng.randrange(1, 4)):
                e = e * atoms[rng.randrange(len(atoms))]
            assert e.differentiate().differentiate().is_zero()

    def test_leibniz_fuzz(self, darboux_cubic):
        A = darboux_cubic
        rng = random.Random(13)
        atoms = [A.var("x"), A.gen("y0"), A.gen("y1"), A.gen("z0")]
        for _ in range(25):
            a = atoms[rng.randrange(len(atoms))] * atoms[rng.randrange(len(atoms))]
            b = atoms[rng.randrange(len(atoms))]
            if a.is_zero():
                continue
            sign = Scalar.of((-1) ** a.degree())
            lhs = (a * b).differentiate()
            rhs = a.differentiate() * b + (a * b.differentiate()) * sign
            assert lhs == rhs

    def test_rejects_broken_square(self):
        # single unpaired section: d(d z) = 2 f f' != 0
        shell = DgAlgebra(("x",), [("y", -1), ("z", -2)], check=False)
        diff = {"y": shell.poly(x ** 2), "z": shell.gen("y") * (4 * x)}
        with pytest.raises(ValueError, match="d\\^2"):
            DgAlgebra(("x",), [("y", -1), ("z", -2)], diff)


class TestClassicalPoint:
    def test_accepts_roots(self, darboux_cubic):
        for v in (0, 1, -1):
            point(darboux_cubic, v)

    def test_rejects_nonroot(self, darboux_cubic):
        with pytest.raises(ValueError, match="classical point"):
            point(darboux_cubic, 2)

    def test_chart_membership(self):
        A = quadratic_pair_algebra(("x",), paired(x ** 3 - x),
                                   denominators=[Poly.variable("x") - 1])
        point(A, 0)
        with pytest.raises(ValueError, match="denominator"):
            point(A, 1)


class TestMinimality:
    def test_quadratic_is_minimal_at_origin(self, darboux_x2):
        assert is_minimal_at(darboux_x2, point(darboux_x2, 0))

    def test_linear_not_minimal(self):
        A = DgAlgebra(("x",), [("y", -1)],
                      {"y": DgAlgebra(("x",), [("y", -1)], check=False).poly(x)})
        assert not is_minimal_at(A, ClassicalPoint(A, {"x": Scalar.zero()}))

    def test_cubic_not_minimal_at_one(self, darboux_cubic):
        # linear part of x^3 - x at 1 is 3x^2-1 = 2
        assert not is_minimal_at(darboux_cubic, point(darboux_cubic, 1))
        assert is_minimal_at(darboux_cubic, point(darboux_cubic, 0)) is False
        # at 0 the linear part is -1, also not minimal


class TestMinimize:
    def test_already_minimal_identity(self, darboux_x2):
        A_min, surj, pt = minimize_at(darboux_x2, point(darboux_x2, 0))
        assert surj.is_identity()
        assert is_minimal_at(A_min, pt)

    def test_linear_pair_collapses_to_point_algebra(self):
        shell = DgAlgebra(("x",), [("y", -1)], check=False)
        A = DgAlgebra(("x",), [("y", -1)], {"y": shell.poly(x)})
        A_min, surj, pt = minimize_at(A, ClassicalPoint(A, {"x": Scalar.zero()}))
        assert A_min.base_vars == ()
        assert A_min.generators == ()
        assert surj.var_images["x"].is_zero()

    def test_keeps_quadratic_partner(self):
        shell = DgAlgebra(("x",), [("y1", -1), ("y2", -1)], check=False)
        A = DgAlgebra(("x",), [("y1", -1), ("y2", -1)],
                      {"y1": shell.poly(x), "y2": shell.poly(x ** 2)})
        A_min, surj, pt = minimize_at(A, ClassicalPoint(A, {"x": Scalar.zero()}))
        assert [n for n, _ in A_min.generators] == ["y2"]
        assert A_min.differential["y2"].is_zero()
        assert is_minimal_at(A_min, pt)

    def test_gen_pair_elimination(self):
        # d(w) = u: cancel the (w, u) pair in degrees -3, -2
        shell = DgAlgebra(("x",), [("u", -2), ("w", -3)], check=False)
        A = DgAlgebra(("x",), [("u", -2), ("w", -3)], {"w": shell.gen("u")})
        A_min, surj, pt = minimize_at(A, ClassicalPoint(A, {"x": Scalar.zero()}))
        assert A_min.generators == ()

    def test_fiber_cohomology_preserved(self):
        shell = DgAlgebra(("x",), [("y1", -1), ("y2", -1)], check=False)
        A = DgAlgebra(("x",), [("y1", -1), ("y2", -1)],
                      {"y1": shell.poly(x), "y2": shell.poly(x ** 2)})
        pt0 = ClassicalPoint(A, {"x": Scalar.zero()})
        before = kahler_differentials(A).fiber_complex(pt0).cohomology_dims()
        A_min, surj, pt = minimize_at(A, pt0)
        after = kahler_differentials(A_min).fiber_complex(pt).cohomology_dims()
        for k in set(before) | set(after):
            assert before.get(k, 0) == after.get(k, 0)

    def test_rank_jump_reported(self):
        # f = x^3 - x^2: the linear part vanishes at 0 but not at 1
        A = one_variable_family(x ** 3 - x ** 2)
        with pytest.raises(MinimizeError, match="rank"):
            minimize_at(A, point(A, 1), sample_points=[point(A, 0)])


class TestKahler:
    def test_pure_base_ring(self):
        A = DgAlgebra(("x",), [])
        omega = kahler_differentials(A)
        assert omega.generators == (("dx", 0),)
        assert not omega.differential

    def test_chain_rule(self):
        shell = DgAlgebra(("x",), [("y", -1)], check=False)
        A = DgAlgebra(("x",), [("y", -1)], {"y": shell.poly(x ** 2)})
        omega = kahler_differentials(A)
        ddy = omega.differential["dy"]
        assert ddy == omega.element({"dx": A.poly(2 * x)})

    def test_total_differential_on_z(self, darboux_x2):
        A = darboux_x2
        omega = kahler_differentials(A)
        ddz = omega.differential["dz0"]
        # oracle: d(dz) = sum_j (2 f_j'' y_j dx + 2 f_j' dy_j), f = (x^2, ix^2)
        expected = omega.element({
            "dx": A.gen("y0") * 4 + A.gen("y1") * Scalar(0, 4),
            "dy0": A.poly(4 * x),
            "dy1": A.poly(4 * x) * i,
        })
        assert ddz == expected


class TestTangent:
    def test_generators_and_degrees(self, darboux_x2):
        T = tangent_complex(darboux_x2)
        assert T.basis_by_degree() == {0: ["Dx"], 1: ["Ey0", "Ey1"], 2: ["Ez0"]}

    def test_pure_base_ring_tangent(self):
        A = DgAlgebra(("x",), [])
        T = tangent_complex(A)
        assert T.generators == (("Dx", 0),)

    def test_pairing_is_chain_map(self, darboux_cubic):
        A = darboux_cubic
        T = tangent_complex(A)
        omega = kahler_differentials(A)
        names = tangent_pairing_names(A)
        rng = random.Random(3)
        tgens = [n for n, _ in T.generators]
        ogens = [n for n, _ in omega.generators]
        coeffs = [A.one(), A.var("x"), A.gen("y0"), A.gen("z0")]
        for _ in range(40):
            phi = T.element({tgens[rng.randrange(len(tgens))]:
                             coeffs[rng.randrange(len(coeffs))]})
            w = omega.element({ogens[rng.randrange(len(ogens))]:
                               coeffs[rng.randrange(len(coeffs))]})
            if phi.is_zero() or w.is_zero():
                continue
            lhs = pairing(phi, w, names).differentiate()
            sign = Scalar.of((-1) ** phi.degree())
            rhs = pairing(phi.differentiate(), w, names) \
                + pairing(phi, w.differentiate(), names) * sign
            assert lhs == rhs

    def test_coordinate_frame_brackets_vanish(self, darboux_x2):
        T = tangent_complex(darboux_x2)
        gens = [T.gen(n) for n, _ in T.generators]
        for u, v in itertools.product(gens, gens):
            assert tangent_bracket(u, v).is_zero()

    def test_bracket_leibniz(self, darboux_x2):
        A = darboux_x2
        T = tangent_complex(A)
        u = T.gen("Dx")
        a = A.var("x") * A.var("x")
        v = T.gen("Ey0")
        lhs = tangent_bracket(u, v.scale(a))
        # [u, a v] = u(a) v + (-1)^(|u||a|) a [u, v]
        rhs = v.scale(tangent_apply(u, a))
        assert lhs == rhs

    def test_tangent_action(self, darboux_x2):
        A = darboux_x2
        T = tangent_complex(A)
        assert tangent_apply(T.gen("Dx"), A.poly(x ** 3)) == A.poly(3 * x ** 2)
        assert tangent_apply(T.gen("Ey0"), A.gen("y0")) == A.one()
        assert tangent_apply(T.gen("Ey0"), A.gen("y1") * A.gen("y0")) == -A.gen("y1")

    def test_shift_degrees(self, darboux_x2):
        T = tangent_complex(darboux_x2)
        S = T.shift(-2)
        assert S.basis_by_degree() == {2: ["Dx"], 3: ["Ey0", "Ey1"], 4: ["Ez0"]}
