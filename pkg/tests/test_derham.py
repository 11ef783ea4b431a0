import random

import pytest

from lagdist.dga import ClassicalPoint, DgAlgebra, form_name
from lagdist.derham import (TSeriesForm, check_closed, check_symplectic,
                            darboux_standard, derham_of, interior_product,
                            split_re_im)
from lagdist.families import one_variable_family, paired, quadratic_pair_algebra
from lagdist.scalar import Poly, Scalar

from conftest import random_well_presented

i = Scalar.i()
x = Poly.variable("x")


@pytest.fixture
def family_x2():
    return one_variable_family(x ** 2)


@pytest.fixture
def family_cubic():
    return one_variable_family(x ** 3 - x)


def pt(A, v):
    return ClassicalPoint(A, {"x": Scalar.of(v)}, name=f"x={v}")


def sample_elements(MA, rng, count=12, max_weight=3):
    A = MA.algebra
    atoms = [A.one(), A.var(A.base_vars[0]) if A.base_vars else A.one()]
    atoms += [A.gen(n) for n, _ in A.generators]
    gens = [g.name for g in MA.form_gens]
    out = []
    for _ in range(count):
        e = MA.from_alg(atoms[rng.randrange(len(atoms))])
        for _ in range(rng.randint(0, max_weight)):
            e = e * MA.form_gen(gens[rng.randrange(len(gens))])
        if rng.random() < 0.5:
            e = e * MA.from_alg(atoms[rng.randrange(len(atoms))])
        if not e.is_zero():
            out.append(e)
    return out


class TestMixedStructure:
    def test_delta_on_base_var(self, family_x2):
        MA = derham_of(family_x2)
        A = family_x2
        assert MA.delta(MA.from_alg(A.var("x"))) == MA.form_gen("dx")

    def test_delta_leibniz_square(self, family_x2):
        MA = derham_of(family_x2)
        A = family_x2
        got = MA.delta(MA.from_alg(A.poly(x ** 2)))
        expected = MA.from_poly(2 * x) * MA.form_gen("dx")
        assert got == expected

    def test_delta_kills_forms(self, family_x2):
        MA = derham_of(family_x2)
        assert MA.delta(MA.form_gen("dx")).is_zero()
        assert MA.delta(MA.form_gen("dy0")).is_zero()

    def test_dy_dy_survives(self, family_x2):
        MA = derham_of(family_x2)
        sq = MA.form_gen("dy0") * MA.form_gen("dy0")
        assert not sq.is_zero()
        assert MA.form_gen("dx") * MA.form_gen("dx") == MA.zero()
        assert MA.form_gen("dz0") * MA.form_gen("dz0") == MA.zero()

    def test_anticommutation_on_z(self, family_x2):
        # d(delta z) = -delta(d z), both sides expanded independently
        MA = derham_of(family_x2)
        A = family_x2
        z = MA.from_alg(A.gen("z0"))
        lhs = MA.partial(MA.delta(z))
        rhs = -MA.delta(MA.partial(z))
        assert lhs == rhs
        assert not lhs.is_zero()

    def test_mixed_axioms_on_families(self, family_x2, family_cubic, rng):
        for A in (family_x2, family_cubic):
            MA = derham_of(A)
            assert MA.check_mixed_axioms(sample_elements(MA, rng))

    def test_mixed_axioms_fuzzed_algebras(self):
        rng = random.Random(99)
        for _ in range(12):
            A = random_well_presented(rng)
            MA = derham_of(A)
            assert MA.check_mixed_axioms(sample_elements(MA, rng, count=8))


class TestTSeries:
    def test_zero_series_closed(self, family_x2):
        MA = derham_of(family_x2)
        f = TSeriesForm(MA, 2, -2, [MA.zero()])
        assert check_closed(f).closed_to_truncation

    def test_strict_darboux_closed_full_order(self, family_x2):
        form = darboux_standard(family_x2)
        report = check_closed(form)
        assert report.closed_to_truncation
        assert report.verified_order == form.truncation

    def test_order_one_residual(self):
        # one base var, one closed y: w0 = x dy dy is not d-closed but its
        # defect is pure delta; w1 chosen so that d w1 = -delta w0 fails at
        # order 2 with residual delta w1
        A = quadratic_pair_algebra(("x",), [Poly.zero(("x",))], n_z=0)
        MA = derham_of(A)
        dy = MA.form_gen("dy0")
        w0 = MA.from_alg(A.var("x")) * dy * dy
        d_w0 = MA.partial(w0)
        assert d_w0.is_zero()  # coefficients closed, dy closed
        delta_w0 = MA.delta(w0)
        assert not delta_w0.is_zero()
        f = TSeriesForm(MA, 2, -2, [w0], truncation=3)
        report = check_closed(f)
        assert report.residual_order == 1
        assert report.residual == delta_w0

    def test_mixed_differential_squares_to_zero(self, family_cubic, rng):
        MA = derham_of(family_cubic)
        # random weight-2 degree -4 elements: products of two one-forms
        gens = [g.name for g in MA.form_gens]
        for _ in range(10):
            a, b = rng.choice(gens), rng.choice(gens)
            w = MA.form_gen(a) * MA.form_gen(b)
            if w.is_zero() or w.degree() != -4:
                continue
            f = TSeriesForm(MA, 2, -2, [w], truncation=3)
            df = f.mixed_differential()
            ddf = df.mixed_differential()
            for j in range(f.truncation):
                assert ddf.coefficient(j).is_zero()


class TestDarbouxForm:
    def test_standard_shape(self, family_x2):
        form = darboux_standard(family_x2)
        assert form.weight == 2 and form.shift == -2
        monos = form.free_term.form_monomials()
        assert ("dx", "dz0") in monos or ("dz0", "dx") in monos
        assert ("dy0", "dy0") in monos

    def test_no_y_variant(self):
        A = quadratic_pair_algebra(("x",), [], n_z=1)
        form = darboux_standard(A)
        assert form.free_term.form_monomials() == [("dz0", "dx")]

    def test_profile_violation(self):
        A = DgAlgebra(("x",), [("w", -3)])
        with pytest.raises(ValueError, match="degrees -1 and -2"):
            darboux_standard(A)

    def test_family_closure(self, family_cubic):
        report = check_closed(darboux_standard(family_cubic))
        assert report.closed_to_truncation


class TestSymplecticCheck:
    def test_darboux_family_strict(self, family_cubic):
        A = family_cubic
        form = darboux_standard(A)
        report = check_symplectic(A, form, [pt(A, 0), pt(A, 1), pt(A, -1)])
        assert report.symplectic
        assert report.strict
        assert report.profile_ok
        assert report.base_pairing_ok
        assert report.odd_pairing_ok

    def test_unpaired_direction_fails(self, family_x2):
        # drop the dy dy block: the odd directions pair with nothing
        A = family_x2
        MA = derham_of(A)
        w = MA.form_gen("dx") * MA.form_gen("dz0")
        form = TSeriesForm(MA, 2, -2, [w])
        report = check_symplectic(A, form, [pt(A, 0)])
        assert not report.symplectic
        assert not report.odd_pairing_ok

    def test_scaled_odd_block_still_strict(self):
        # zero differentials: closure is free, so scaling probes only the
        # fiber isomorphism (determinant oracle)
        A = quadratic_pair_algebra(("x",), [Poly.zero(("x",)),
                                            Poly.zero(("x",))])
        MA = derham_of(A)
        w = MA.form_gen("dx") * MA.form_gen("dz0")
        for yname in ("dy0", "dy1"):
            w = w + MA.form_gen(yname) * MA.form_gen(yname) * Scalar.of(2)
        form = TSeriesForm(MA, 2, -2, [w])
        report = check_symplectic(A, form, [pt(A, 0)])
        assert report.strict
        # scaling the even block too keeps the isomorphism
        form2 = TSeriesForm(MA, 2, -2, [w * Scalar.of(3)])
        assert check_symplectic(A, form2, [pt(A, 0)]).strict

    def test_weight_guard(self, family_x2):
        MA = derham_of(family_x2)
        bad = TSeriesForm(MA, 1, -2, [MA.form_gen("dz0")])
        with pytest.raises(ValueError, match="weight 2"):
            check_symplectic(family_x2, bad, [])


class TestReIm:
    def test_real_form_fixed(self, family_x2):
        form = darboux_standard(family_x2)
        re, im = split_re_im(form)
        assert re == form
        assert im.is_zero()

    def test_imaginary_multiple(self, family_x2):
        MA = derham_of(family_x2)
        w = MA.form_gen("dy0") * MA.form_gen("dy0") * i
        form = TSeriesForm(MA, 2, -2, [w])
        re, im = split_re_im(form)
        assert re.is_zero()
        assert im == form.scale(-i)  # = the dy dy block itself

    def test_mixed_coefficient(self, family_x2):
        MA = derham_of(family_x2)
        base = MA.form_gen("dx") * MA.form_gen("dz0")
        form = TSeriesForm(MA, 2, -2, [base * (Scalar.one() + i)])
        re, im = split_re_im(form)
        assert re == TSeriesForm(MA, 2, -2, [base])
        assert im == TSeriesForm(MA, 2, -2, [base])

    def test_reassembly_fuzz(self, family_cubic, rng):
        MA = derham_of(family_cubic)
        gens = [g.name for g in MA.form_gens]
        for _ in range(10):
            c = Scalar(rng.randint(-3, 3), rng.randint(-3, 3))
            w = MA.form_gen(rng.choice(gens)) * MA.form_gen(rng.choice(gens)) * c
            if w.is_zero() or w.degrees() != [-4]:
                continue
            form = TSeriesForm(MA, 2, -2, [w])
            re, im = split_re_im(form)
            assert re + im.scale(i) == form
            assert re.conjugate() == re
            assert im.conjugate() == im


class TestInteriorProduct:
    def test_darboux_pairings(self, family_x2):
        A = family_x2
        MA = derham_of(A)
        form = darboux_standard(A).free_term
        # contraction against the even pair picks the partner one-form
        dx_pair = interior_product(form, "dx", 1)   # degree 0 tangent + 1
        assert dx_pair.form_coefficient(("dz0",)) == A.one()
        dy_pair = interior_product(form, "dy0", 2)  # degree 1 tangent + 1
        assert dy_pair.form_coefficient(("dy0",)) == A.scalar(2)
