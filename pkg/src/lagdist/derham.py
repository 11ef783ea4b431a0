"""Graded mixed algebras: the de Rham algebra and its distribution quotients.

A mixed algebra here is free over a DgAlgebra on weight-1 form generators.
Each form generator gamma carries a shifted degree and a dual derivation w of
the base algebra, and the weight differential acts as

    delta = sum_i (left multiplication by gamma_i) o w_i,

which is automatically a derivation of degree -1 and squares to zero whenever
the w_i (anti)commute. The cohomological differential extends the algebra
differential with prescribed values on form generators; for the de Rham
algebra these are d(dv) = -delta(d v), which forces the anticommutation
relation on the nose.

All Koszul signs are driven by the single total (shifted) degree; the weight
grading never contributes signs. In particular d(y) d(y) is nonzero for |y|
odd, since its shifted degree |y| - 1 is even.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Sequence, Tuple

from .dga import (AlgElement, ClassicalPoint, DgAlgebra, FreeDgModule,
                  apply_derivation, form_name, kahler_differentials,
                  koszul_sort, tangent_complex, tangent_name)
from .linalg import ChainMap, Matrix
from .scalar import Poly, Scalar


class FormGen:
    """A weight-1 generator: name, shifted degree, dual derivation data."""

    __slots__ = ("name", "degree", "values", "derivation_degree")

    def __init__(self, name: str, degree: int,
                 values: Mapping[str, AlgElement], derivation_degree: int):
        self.name = name
        self.degree = degree
        self.values = dict(values)
        self.derivation_degree = derivation_degree


class MixedAlgebra:
    """Free mixed algebra on form generators over a dg algebra."""

    def __init__(self, algebra: DgAlgebra, form_gens: Sequence[FormGen]):
        self.algebra = algebra
        self.form_gens = list(form_gens)
        names = [g.name for g in form_gens]
        if len(set(names)) != len(names):
            raise ValueError("duplicate form generator names")
        self.form_degree = {g.name: g.degree for g in form_gens}
        self.form_key = {g.name: (g.degree, g.name) for g in form_gens}
        self.by_name = {g.name: g for g in form_gens}
        # assigned after construction; name -> weight-1 MixedElement
        self.partial_on_gens: Dict[str, MixedElement] = {}

    # -- element constructors -------------------------------------------------

    def zero(self) -> "MixedElement":
        return MixedElement(self, {})

    def one(self) -> "MixedElement":
        return self.from_alg(self.algebra.one())

    def from_alg(self, a: AlgElement) -> "MixedElement":
        return MixedElement(self, {(m, ()): c for m, c in a.terms.items()})

    def from_poly(self, p: Poly) -> "MixedElement":
        return self.from_alg(self.algebra.poly(p))

    def form_gen(self, name: str) -> "MixedElement":
        if name not in self.form_degree:
            raise KeyError(f"unknown form generator {name!r}")
        return MixedElement(self, {((), (name,)): Poly.constant(1, self.algebra.base_vars)})

    def form_monomial(self, names: Sequence[str]) -> "MixedElement":
        out = self.one()
        for n in names:
            out = out * self.form_gen(n)
        return out

    # -- the two differentials -------------------------------------------------

    def delta(self, elem: "MixedElement") -> "MixedElement":
        """Weight +1, degree -1 differential: sum_i gamma_i . w_i(-)."""
        out = self.zero()
        for g in self.form_gens:
            moved = self._apply_dual_derivation(g, elem)
            if not moved.is_zero():
                out = out + self.form_gen(g.name) * moved
        return out

    def _apply_dual_derivation(self, g: FormGen, elem: "MixedElement") -> "MixedElement":
        A = self.algebra
        terms: Dict[tuple, Poly] = {}
        for (mono, fmono), coeff in elem.terms.items():
            target = AlgElement(A, {mono: coeff})
            image = apply_derivation(g.values, g.derivation_degree, target)
            for m2, c2 in image.terms.items():
                key = (m2, fmono)
                prev = terms.get(key)
                s = c2 if prev is None else prev + c2
                if s.is_zero():
                    terms.pop(key, None)
                else:
                    terms[key] = s
        return MixedElement(self, terms)

    def partial(self, elem: "MixedElement") -> "MixedElement":
        """Degree +1, weight 0 differential extending the algebra one."""
        A = self.algebra
        out = self.zero()
        for (mono, fmono), coeff in elem.terms.items():
            head = AlgElement(A, {mono: coeff})
            dhead = head.differentiate()
            if not dhead.is_zero():
                out = out + MixedElement(self, {(m, fmono): c for m, c in dhead.terms.items()})
            if not fmono:
                continue
            head_deg = A.monomial_degree(mono)
            prefix_deg = 0
            for k, gname in enumerate(fmono):
                dgamma = self.partial_on_gens.get(gname)
                if dgamma is not None and not dgamma.is_zero():
                    sign = -1 if (head_deg + prefix_deg) % 2 else 1
                    piece = MixedElement(self, {(mono, fmono[:k]): coeff * Scalar.of(sign)})
                    piece = piece * dgamma
                    piece = piece * self.form_monomial(fmono[k + 1:])
                    out = out + piece
                prefix_deg += self.form_degree[gname]
        return out

    def check_mixed_axioms(self, samples: Sequence["MixedElement"]) -> bool:
        """d^2 = delta^2 = d delta + delta d = 0 on the given elements."""
        for e in samples:
            if not self.partial(self.partial(e)).is_zero():
                return False
            if not self.delta(self.delta(e)).is_zero():
                return False
            anti = self.partial(self.delta(e)) + self.delta(self.partial(e))
            if not anti.is_zero():
                return False
        return True


class MixedElement:
    """Normal-form element: {(algebra monomial, form monomial) -> Poly}."""

    __slots__ = ("mixed", "terms")

    def __init__(self, mixed: MixedAlgebra, terms: Mapping[tuple, Poly]):
        self.mixed = mixed
        clean = {}
        base = mixed.algebra.base_vars
        for (mono, fmono), coeff in terms.items():
            if coeff.is_zero():
                continue
            if coeff.variables != base:
                coeff = coeff.aligned_to(base)
            clean[(tuple(mono), tuple(fmono))] = coeff
        self.terms = clean

    # -- ring structure ---------------------------------------------------------

    def __add__(self, other: "MixedElement") -> "MixedElement":
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            s = terms.get(key, Poly.zero(self.mixed.algebra.base_vars)) + coeff
            if s.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = s
        return MixedElement(self.mixed, terms)

    def __neg__(self):
        return MixedElement(self.mixed, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "MixedElement":
        MA = self.mixed
        A = MA.algebra
        if isinstance(other, (int, Scalar, Poly)):
            return MixedElement(MA, {k: c * other for k, c in self.terms.items()})
        if isinstance(other, AlgElement):
            other = MA.from_alg(other)
        degree = dict(A.gen_degree)
        degree.update(MA.form_degree)
        key = {n: (0, A.gen_key[n]) for n in A.gen_degree}
        key.update({n: (1, MA.form_key[n]) for n in MA.form_degree})
        terms: Dict[tuple, Poly] = {}
        for (m1, f1), c1 in self.terms.items():
            d1_form = sum(MA.form_degree[g] for g in f1)
            for (m2, f2), c2 in other.terms.items():
                d2_head = A.monomial_degree(m2)
                # move the algebra part of the second factor past the form
                # part of the first: Koszul on shifted degrees
                sign0 = -1 if (d1_form * d2_head) % 2 else 1
                word = m1 + m2 + f1 + f2
                # the f1 block must pass m2 back (already accounted), so sort
                # the concatenation m1 m2 f1 f2 as a single Koszul word
                s, sorted_word = koszul_sort(word, degree, key)
                if s == 0:
                    continue
                mono = tuple(w for w in sorted_word if w in A.gen_degree)
                fmono = tuple(w for w in sorted_word if w in MA.form_degree)
                total = c1 * c2 * Scalar.of(s * sign0)
                k2 = (mono, fmono)
                prev = terms.get(k2)
                snew = total if prev is None else prev + total
                if snew.is_zero():
                    terms.pop(k2, None)
                else:
                    terms[k2] = snew
        return MixedElement(MA, terms)

    def __rmul__(self, other):
        if isinstance(other, (int, Scalar, Poly)):
            return self * other
        if isinstance(other, AlgElement):
            return self.mixed.from_alg(other) * self
        return NotImplemented

    # -- structure ----------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def term_degree(self, key: tuple) -> int:
        mono, fmono = key
        return (self.mixed.algebra.monomial_degree(mono)
                + sum(self.mixed.form_degree[g] for g in fmono))

    def degrees(self) -> List[int]:
        return sorted({self.term_degree(k) for k in self.terms})

    def weights(self) -> List[int]:
        return sorted({len(f) for _, f in self.terms})

    def degree(self) -> int:
        ds = self.degrees()
        if not ds:
            return 0
        if len(ds) > 1:
            raise ValueError(f"mixed element not homogeneous in degree: {ds}")
        return ds[0]

    def weight(self) -> int:
        ws = self.weights()
        if not ws:
            return 0
        if len(ws) > 1:
            raise ValueError(f"mixed element not homogeneous in weight: {ws}")
        return ws[0]

    def form_coefficient(self, fmono: Sequence[str]) -> AlgElement:
        fmono = tuple(fmono)
        out = {}
        for (mono, f), coeff in self.terms.items():
            if f == fmono:
                out[mono] = coeff
        return AlgElement(self.mixed.algebra, out)

    def form_monomials(self) -> List[tuple]:
        return sorted({f for _, f in self.terms})

    def conjugate(self) -> "MixedElement":
        return MixedElement(self.mixed, {k: c.conjugate() for k, c in self.terms.items()})

    def transport(self, target: MixedAlgebra) -> "MixedElement":
        out = target.zero()
        for (mono, fmono), coeff in self.terms.items():
            piece = target.from_alg(
                AlgElement(target.algebra, {mono: coeff.aligned_to(target.algebra.base_vars)}))
            for g in fmono:
                piece = piece * target.form_gen(g)
            out = out + piece
        return out

    def map_coefficients(self, fn) -> "MixedElement":
        """Apply an AlgElement -> AlgElement map to each form coefficient."""
        out = self.mixed.zero()
        for fmono in self.form_monomials():
            c = fn(self.form_coefficient(fmono))
            piece = self.mixed.from_alg(c) * self.mixed.form_monomial(fmono)
            out = out + piece
        return out

    def __eq__(self, other):
        if not isinstance(other, MixedElement):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (mono, fmono) in sorted(self.terms, key=lambda k: (len(k[1]), k[1], k[0])):
            coeff = self.terms[(mono, fmono)]
            body = "*".join(mono + fmono)
            cs = str(coeff)
            if not body:
                parts.append(f"({cs})")
            elif cs == "1":
                parts.append(body)
            else:
                parts.append(f"({cs})*{body}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# The de Rham mixed algebra
# ---------------------------------------------------------------------------

def derham_of(A: DgAlgebra) -> MixedAlgebra:
    """Mixed algebra on d(x_i), d(g) with delta the total differential.

    Shifted degrees: |dx| = -1, |dg| = |g| - 1. The cohomological
    differential on generators is d(dv) = -delta(d v), which makes the
    anticommutation of the two differentials hold identically.
    """
    gens = []
    for v in A.base_vars:
        gens.append(FormGen(form_name(v), -1, {v: A.one()}, 0))
    for n, d in A.generators:
        gens.append(FormGen(form_name(n), d - 1, {n: A.one()}, -d))
    MA = MixedAlgebra(A, gens)
    for n, d in A.generators:
        dn = A.differential[n]
        MA.partial_on_gens[form_name(n)] = -MA.delta(MA.from_alg(dn))
    return MA


def interior_product(elem: MixedElement, gen_name: str, op_degree: int) -> MixedElement:
    """Contract against the form generator dual to a tangent generator.

    Acts from the left as an operator of the given degree: passing a factor
    of degree d costs (-1)^(op_degree * d).
    """
    MA = elem.mixed
    A = MA.algebra
    terms: Dict[tuple, Poly] = {}
    for (mono, fmono), coeff in elem.terms.items():
        head_deg = A.monomial_degree(mono)
        prefix = head_deg
        for k, g in enumerate(fmono):
            if g == gen_name:
                sign = -1 if (op_degree * prefix) % 2 else 1
                key = (mono, fmono[:k] + fmono[k + 1:])
                add = coeff * Scalar.of(sign)
                prev = terms.get(key)
                s = add if prev is None else prev + add
                if s.is_zero():
                    terms.pop(key, None)
                else:
                    terms[key] = s
            prefix += MA.form_degree[g]
    return MixedElement(MA, terms)


# ---------------------------------------------------------------------------
# Truncated negative-cyclic forms
# ---------------------------------------------------------------------------

DEFAULT_TRUNCATION = 4


class TSeriesForm:
    """Truncated series sum_j t^j w_j with w_j of weight k+j, degree n-k-2j.

    ``shift`` is the geometric shift n (e.g. -2 for the symplectic forms in
    scope); the parameter t itself has weight -1 and degree 2.
    """

    def __init__(self, mixed: MixedAlgebra, weight: int, shift: int,
                 coefficients: Sequence[MixedElement], truncation: int | None = None):
        self.mixed = mixed
        self.weight = weight
        self.shift = shift
        T = truncation if truncation is not None else max(len(coefficients) - 1,
                                                          DEFAULT_TRUNCATION)
        coeffs = list(coefficients) + [mixed.zero()] * (T + 1 - len(coefficients))
        self.coefficients = coeffs[:T + 1]
        self.truncation = T
        for j, w in enumerate(self.coefficients):
            if w.is_zero():
                continue
            for wt in w.weights():
                if wt != weight + j:
                    raise ValueError(f"order-{j} coefficient has weight {wt}, "
                                     f"expected {weight + j}")
            for d in w.degrees():
                if d != shift - weight - 2 * j:
                    raise ValueError(f"order-{j} coefficient has degree {d}, "
                                     f"expected {shift - weight - 2 * j}")

    @property
    def free_term(self) -> MixedElement:
        return self.coefficients[0]

    def coefficient(self, j: int) -> MixedElement:
        if j <= self.truncation:
            return self.coefficients[j]
        return self.mixed.zero()

    def mixed_differential(self) -> "TSeriesForm":
        """(d + t delta): order j of the output is d w_j + delta w_{j-1}."""
        out = []
        for j in range(self.truncation + 1):
            term = self.mixed.partial(self.coefficient(j))
            if j:
                term = term + self.mixed.delta(self.coefficient(j - 1))
            out.append(term)
        return TSeriesForm(self.mixed, self.weight, self.shift + 1, out,
                           truncation=self.truncation)

    def __add__(self, other: "TSeriesForm") -> "TSeriesForm":
        if (self.weight, self.shift) != (other.weight, other.shift):
            raise ValueError("cannot add series of different weight or shift")
        T = max(self.truncation, other.truncation)
        return TSeriesForm(self.mixed, self.weight, self.shift,
                           [self.coefficient(j) + other.coefficient(j)
                            for j in range(T + 1)], truncation=T)

    def __neg__(self):
        return TSeriesForm(self.mixed, self.weight, self.shift,
                           [-c for c in self.coefficients], truncation=self.truncation)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TSeriesForm":
        return TSeriesForm(self.mixed, self.weight, self.shift,
                           [w * c for w in self.coefficients], truncation=self.truncation)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def conjugate(self) -> "TSeriesForm":
        return TSeriesForm(self.mixed, self.weight, self.shift,
                           [c.conjugate() for c in self.coefficients],
                           truncation=self.truncation)

    def transport(self, mixed: MixedAlgebra) -> "TSeriesForm":
        return TSeriesForm(mixed, self.weight, self.shift,
                           [c.transport(mixed) for c in self.coefficients],
                           truncation=self.truncation)

    def __eq__(self, other):
        if not isinstance(other, TSeriesForm):
            return NotImplemented
        return (self.weight, self.shift) == (other.weight, other.shift) \
            and (self - other).is_zero()


class ClosureReport:
    """Verified closure order of a series under (d + t delta)."""

    def __init__(self, verified_order: int, truncation: int,
                 residual_order: int | None, residual: MixedElement | None):
        self.verified_order = verified_order
        self.truncation = truncation
        self.residual_order = residual_order
        self.residual = residual

    @property
    def closed_to_truncation(self) -> bool:
        return self.residual_order is None

    def to_dict(self) -> dict:
        return {
            "verified_order": self.verified_order,
            "truncation": self.truncation,
            "closed_to_truncation": self.closed_to_truncation,
            "residual_order": self.residual_order,
            "residual": repr(self.residual) if self.residual is not None else None,
        }


def check_closed(form: TSeriesForm) -> ClosureReport:
    """Largest order m <= T with (d + t delta)(form) = 0 through t^m."""
    image = form.mixed_differential()
    for j in range(form.truncation + 1):
        if not image.coefficient(j).is_zero():
            return ClosureReport(j - 1, form.truncation, j, image.coefficient(j))
    return ClosureReport(form.truncation, form.truncation, None, None)


def split_re_im(form: TSeriesForm) -> Tuple[TSeriesForm, TSeriesForm]:
    """Real and imaginary parts: Re + i Im reassembles the input exactly."""
    conj = form.conjugate()
    half = Scalar(1, 0) / Scalar(2)
    re = (form + conj).scale(half)
    im = (form - conj).scale(Scalar.one() / Scalar(0, 2))
    return re, im


# ---------------------------------------------------------------------------
# The standard strict two-form and the symplectic check
# ---------------------------------------------------------------------------

def darboux_standard(A: DgAlgebra, truncation: int | None = None) -> TSeriesForm:
    """sum_i dx_i dz_i + sum_j dy_j dy_j as a strict series of weight 2.

    Requires generators only in degrees -1 and -2 with exactly one degree -2
    generator per base variable, matched in declaration order.
    """
    ys = A.gens_of_degree(-1)
    zs = A.gens_of_degree(-2)
    if len(ys) + len(zs) != len(A.generators):
        raise ValueError("generators must sit in degrees -1 and -2 only")
    if len(zs) != len(A.base_vars):
        raise ValueError("need exactly one degree -2 generator per base variable")
    MA = derham_of(A)
    w = MA.zero()
    for xv, z in zip(A.base_vars, zs):
        w = w + MA.form_gen(form_name(xv)) * MA.form_gen(form_name(z))
    for y in ys:
        w = w + MA.form_gen(form_name(y)) * MA.form_gen(form_name(y))
    return TSeriesForm(MA, 2, -2, [w], truncation=truncation)


def contraction_map(A: DgAlgebra, free_term: MixedElement):
    """The degree -2 pairing map T_A -> Omega^1[-2] defined by a two-form.

    Returns a dict tangent generator name -> weight-1 MixedElement. The
    (-1)^degree twist on the raw interior product is what makes the map
    commute with the differentials instead of anticommuting.
    """
    T = tangent_complex(A)
    images = {}
    for name, deg in T.generators:
        raw = interior_product(free_term, form_name(name[1:]), deg + 1)
        images[name] = raw * Scalar.of((-1) ** (deg % 2))
    return T, images


class SymplecticPointVerdict:
    def __init__(self, point: ClassicalPoint, chain_map: bool,
                 quasi_iso: bool, strict_iso: bool):
        self.point = point
        self.chain_map = chain_map
        self.quasi_iso = quasi_iso
        self.strict_iso = strict_iso

    def to_dict(self) -> dict:
        return {
            "point": self.point.name,
            "chain_map": self.chain_map,
            "quasi_iso": self.quasi_iso,
            "strict_iso": self.strict_iso,
        }


class SymplecticReport:
    def __init__(self, closure: ClosureReport, verdicts: List[SymplecticPointVerdict],
                 profile_ok: bool, base_pairing_ok: bool, odd_pairing_ok: bool):
        self.closure = closure
        self.verdicts = verdicts
        self.profile_ok = profile_ok
        self.base_pairing_ok = base_pairing_ok
        self.odd_pairing_ok = odd_pairing_ok

    @property
    def symplectic(self) -> bool:
        return (self.closure.closed_to_truncation
                and all(v.chain_map and v.quasi_iso for v in self.verdicts))

    @property
    def strict(self) -> bool:
        return self.symplectic and all(v.strict_iso for v in self.verdicts)

    def to_dict(self) -> dict:
        return {
            "closure": self.closure.to_dict(),
            "points": [v.to_dict() for v in self.verdicts],
            "degree_profile_ok": self.profile_ok,
            "base_pairing_nondegenerate": self.base_pairing_ok,
            "odd_pairing_nondegenerate": self.odd_pairing_ok,
            "symplectic": self.symplectic,
            "strict": self.strict,
        }


def check_symplectic(A: DgAlgebra, form: TSeriesForm,
                     points: Sequence[ClassicalPoint]) -> SymplecticReport:
    """Closure plus fiberwise (quasi-)isomorphism of the contraction map."""
    if form.weight != 2:
        raise ValueError(f"symplectic candidate must have weight 2, got {form.weight}")
    closure = check_closed(form)
    T, images = contraction_map(A, form.free_term)
    omega = kahler_differentials(A)
    target = omega.shift(form.shift)

    tbasis = T.basis_by_degree()
    obasis = target.basis_by_degree()

    from .linalg import rank as _rank

    verdicts = []
    base_ok = True
    odd_ok = True
    for pt in points:
        tf = T.fiber_complex(pt)
        of = target.fiber_complex(pt)
        blocks = {}
        for k, tnames in tbasis.items():
            onames = obasis.get(k, [])
            mat = Matrix(len(onames), len(tnames))
            for j, tn in enumerate(tnames):
                img = images[tn]
                for i, on in enumerate(onames):
                    mat.entries[i][j] = img.form_coefficient((on,)).eval_at(pt)
            blocks[k] = mat
        cm = ChainMap(tf, of, blocks)
        is_chain = cm.is_chain_map()
        verdicts.append(SymplecticPointVerdict(
            pt, is_chain, is_chain and cm.is_quasi_iso(),
            is_chain and cm.is_degreewise_iso()))
        b0 = blocks.get(0)
        if b0 is None or b0.rows != b0.cols or (b0.cols and _rank(b0) != b0.cols):
            base_ok = False
        b1 = blocks.get(1)
        if b1 is not None and b1.cols and (b1.rows != b1.cols or _rank(b1) != b1.cols):
            odd_ok = False

    profile_ok = all(d in (-1, -2) for _, d in A.generators)
    return SymplecticReport(closure, verdicts, profile_ok, base_ok, odd_ok)
