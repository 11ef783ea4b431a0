"""Isotropic structures, the pairing map on homotopy kernels, and rank tests.

An isotropic structure on a distribution is a truncated series lam of weight
2 with (d + t delta)(lam) = anchor-pullback of the symplectic series. The
Lagrangian condition only involves the free term lam_0: it asks the pairing

    kernel of the anchor -> shifted dual of the distribution module

to be a fiberwise quasi-isomorphism. Extensions of lam_0 to a surjective
replacement therefore only need the order-zero equation d(lam~_0) =
pullback(omega_0), which is solved exactly over finite slots.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .derham import MixedElement, TSeriesForm
from .dga import (AlgElement, ClassicalPoint, FreeDgModule, ModuleElement,
                  ModuleMap, dual_module)
from .dist import Distribution, Replacement, homotopy_kernel, gamma_name, \
    surjective_replacement
from .scalar import Poly, Scalar
from .solver import in_differential_span, solve_linear_combination, \
    weight_two_basis


class IsotropyReport:
    """Verified order of (d + t delta)(lam) = pullback(omega)."""

    def __init__(self, verified_order: int, truncation: int,
                 residual_order: int | None, residual: MixedElement | None):
        self.verified_order = verified_order
        self.truncation = truncation
        self.residual_order = residual_order
        self.residual = residual

    @property
    def holds_to_truncation(self) -> bool:
        return self.residual_order is None

    def to_dict(self) -> dict:
        return {
            "verified_order": self.verified_order,
            "truncation": self.truncation,
            "holds_to_truncation": self.holds_to_truncation,
            "residual_order": self.residual_order,
            "residual": repr(self.residual) if self.residual is not None else None,
        }


def check_isotropic(dist: Distribution, lam: TSeriesForm,
                    omega: TSeriesForm) -> IsotropyReport:
    """Order-by-order comparison of the defining identity on a strict
    distribution (whose dual mixed algebra satisfies all axioms)."""
    if lam.weight != 2 or omega.weight != 2:
        raise ValueError("isotropic data must have weight 2")
    if lam.shift != omega.shift - 1:
        raise ValueError(
            f"shift mismatch: lam has {lam.shift}, expected {omega.shift - 1}")
    pulled = dist.pullback_series(omega)
    image = lam.mixed_differential()
    T = min(lam.truncation, omega.truncation)
    for j in range(T + 1):
        residual = image.coefficient(j) - pulled.coefficient(j)
        if not residual.is_zero():
            return IsotropyReport(j - 1, T, j, residual)
    return IsotropyReport(T, T, None, None)


def zero_isotropic(dist: Distribution, shift: int = -3,
                   truncation: int | None = None) -> TSeriesForm:
    MA = dist.forms()
    return TSeriesForm(MA, 2, shift, [MA.zero()], truncation=truncation)


def perturb_by_coboundary(lam: TSeriesForm, eta: TSeriesForm) -> TSeriesForm:
    """lam + (d + t delta)(eta): an equivalent isotropic structure."""
    return lam + eta.mixed_differential()


# ---------------------------------------------------------------------------
# Extension of the free term over a surjective replacement
# ---------------------------------------------------------------------------

def extend_free_term(dist: Distribution, lam0: MixedElement,
                     rep: Replacement, omega0: MixedElement,
                     poly_bound: int = 3) -> MixedElement:
    """lam~_0 on the replacement with d(lam~_0) = pullback(omega_0).

    The lift of lam0 keeps its expression on the surviving duals; the
    correction is solved exactly over weight-2 slots that touch at least one
    added dual generator.
    """
    big = rep.distribution
    MA = big.forms()
    lifted = lam0.transport(MA) if lam0.terms else MA.zero()
    target = big.pullback_form(omega0) - MA.partial(lifted)
    if target.is_zero():
        return lifted
    degree = -5
    new_duals = {gamma_name(p) for _, p, _ in rep.added}
    new_duals |= {gamma_name(q) for _, _, q in rep.added}
    basis = [b for b in weight_two_basis(MA, degree, poly_bound)
             if any(g in new_duals for g in _form_support(b))]
    correction = solve_linear_combination(MA.partial, basis, target)
    if correction is None:
        basis = weight_two_basis(MA, degree, poly_bound)
        correction = solve_linear_combination(MA.partial, basis, target)
    if correction is None:
        raise ValueError("no exact order-zero extension over the replacement "
                         "within the configured polynomial bound")
    return lifted + correction


def _form_support(elem: MixedElement) -> set:
    out = set()
    for _, fmono in elem.terms:
        out.update(fmono)
    return out


# ---------------------------------------------------------------------------
# The pairing map on the homotopy kernel
# ---------------------------------------------------------------------------

class IsoMapData:
    def __init__(self, kernel: FreeDgModule, target: FreeDgModule,
                 pairing_map: ModuleMap, replacement: Replacement,
                 extended_free_term: MixedElement):
        self.kernel = kernel
        self.target = target
        self.pairing_map = pairing_map
        self.replacement = replacement
        self.extended_free_term = extended_free_term

    def is_chain_map(self) -> bool:
        return self.pairing_map.is_chain_map()

    def is_fiber_quasi_iso(self, points: Sequence[ClassicalPoint]) -> bool:
        return self.pairing_map.is_fiber_quasi_iso(points)


def iso_map(dist: Distribution, lam: TSeriesForm, omega: TSeriesForm,
            poly_bound: int = 3) -> IsoMapData:
    """The pairing-by-lam_0 map from the homotopy kernel to the shifted dual.

    Raises when the assembled map fails to be a chain map, which signals an
    inconsistent free term.
    """
    rep = surjective_replacement(dist, style="cone")
    kernel, embedding, rep = homotopy_kernel(dist, rep)
    big = rep.distribution
    lam0 = extend_free_term(dist, lam.free_term, rep, omega.free_term,
                            poly_bound=poly_bound)
    names = {n: f"{n}^" for n, _ in big.module.generators}
    target = dual_module(big.module, names).shift(omega.shift - 1)
    images: Dict[str, ModuleElement] = {}
    for kn, _ in kernel.generators:
        kelem = embedding.images[kn]
        coords: Dict[str, AlgElement] = {}
        for ln, _ in big.module.generators:
            value = big.evaluate_two_form(lam0, kelem, big.module.gen(ln))
            if not value.is_zero():
                coords[names[ln]] = value
        images[kn] = ModuleElement(target, coords)
    pairing = ModuleMap(kernel, target, images, name="iso pairing")
    data = IsoMapData(kernel, target, pairing, rep, lam0)
    if not data.is_chain_map():
        raise ValueError("pairing by the free term is not a chain map; "
                         "the isotropic data is inconsistent")
    return data


def is_lagrangian(dist: Distribution, lam: TSeriesForm, omega: TSeriesForm,
                  points: Sequence[ClassicalPoint], poly_bound: int = 3) -> bool:
    """Fiberwise quasi-isomorphism of the kernel pairing at every point."""
    data = iso_map(dist, lam, omega, poly_bound=poly_bound)
    return data.is_fiber_quasi_iso(points)


# ---------------------------------------------------------------------------
# Ranks and the rank criterion
# ---------------------------------------------------------------------------

def module_rank(module: FreeDgModule, point: ClassicalPoint) -> int:
    """Euler characteristic of the fiber at the point."""
    return module.fiber_complex(point).euler_characteristic()


class PreconditionError(ValueError):
    pass


def lagrangian_by_rank(dist: Distribution, lam: TSeriesForm, omega: TSeriesForm,
                       points: Sequence[ClassicalPoint],
                       poly_bound: int = 3) -> bool:
    """Rank criterion: semi-strict purely derived data of half tangent rank.

    Preconditions are verified and reported, never silently folded into the
    verdict.
    """
    from .derham import check_closed
    closure = check_closed(omega)
    if not closure.closed_to_truncation or any(
            not c.is_zero() for c in omega.coefficients[1:]):
        raise PreconditionError("rank criterion needs a strict closed two-form")
    if not dist.is_purely_derived(points):
        raise PreconditionError("distribution is not purely derived at the points")
    semi = is_semistrict(dist, lam, omega, points, poly_bound=poly_bound)
    if not semi.holds:
        raise PreconditionError(f"distribution is not semi-strict: {semi.failures()}")
    return all(
        module_rank(dist.module, pt) * 2 == module_rank(dist.tangent, pt)
        for pt in points)


# ---------------------------------------------------------------------------
# Semi-strictness
# ---------------------------------------------------------------------------

class SemistrictReport:
    def __init__(self, no_nonpositive: bool, top_iso: Dict[str, bool],
                 degree_one_injective: Dict[str, bool],
                 mod_exact: bool, mod_witness: dict | None):
        self.no_nonpositive = no_nonpositive
        self.top_iso = top_iso
        self.degree_one_injective = degree_one_injective
        self.mod_exact = mod_exact
        self.mod_witness = mod_witness

    @property
    def holds(self) -> bool:
        return (self.no_nonpositive and all(self.top_iso.values())
                and all(self.degree_one_injective.values()) and self.mod_exact)

    def failures(self) -> List[str]:
        out = []
        if not self.no_nonpositive:
            out.append("generators in degree <= 0")
        out += [f"degree >= 2 not isomorphic at {k}"
                for k, v in self.top_iso.items() if not v]
        out += [f"degree 1 not injective at {k}"
                for k, v in self.degree_one_injective.items() if not v]
        if not self.mod_exact:
            out.append("pullback of the two-form is not exact mod degree -1")
        return out

    def to_dict(self) -> dict:
        return {
            "no_nonpositive_generators": self.no_nonpositive,
            "top_degrees_isomorphic": self.top_iso,
            "degree_one_injective": self.degree_one_injective,
            "form_exact_mod_degree_minus_one": self.mod_exact,
            "holds": self.holds,
        }


def is_semistrict(dist: Distribution, lam: TSeriesForm, omega: TSeriesForm,
                  points: Sequence[ClassicalPoint],
                  poly_bound: int = 3) -> SemistrictReport:
    """Fiber conditions plus exactness of the pulled-back free term.

    The membership of each coefficient in d(degree -1 part) is decided by
    exact linear algebra over polynomial slots of bounded degree.
    """
    from .linalg import rank as _rank
    A = dist.algebra
    no_nonpos = all(d >= 1 for _, d in dist.module.generators)
    top_iso: Dict[str, bool] = {}
    deg1_inj: Dict[str, bool] = {}
    for pt in points:
        cm = dist.anchor_map().fiber_chain_map(pt)
        ok = True
        for k in dist.tangent.degrees():
            if k < 2:
                continue
            block = cm.block(k)
            if block.rows != block.cols or (block.cols and _rank(block) != block.cols):
                ok = False
        top_iso[pt.name] = ok
        b1 = cm.block(1)
        deg1_inj[pt.name] = (not b1.cols) or _rank(b1) == b1.cols

    pulled = dist.pullback_series(omega).free_term
    dgens = [A.differential[n].poly_part() for n in A.gens_of_degree(-1)]
    mod_ok = True
    witness = None
    for fmono in pulled.form_monomials():
        coeff = pulled.form_coefficient(fmono)
        poly = coeff.poly_part()
        if not (coeff - A.poly(poly)).is_zero():
            # coefficient has generator content: compare against d of the
            # matching degree -1 multiples is out of reach of the bounded
            # solver; only degree-0 coefficients occur for semi-strict data
            mod_ok = False
            witness = {"form_monomial": fmono, "coefficient": repr(coeff)}
            break
        if poly.is_zero():
            continue
        sol = in_differential_span(poly, dgens, A, bound=poly_bound)
        if sol is None:
            mod_ok = False
            witness = {"form_monomial": fmono, "coefficient": str(poly)}
            break
    return SemistrictReport(no_nonpos, top_iso, deg1_inj, mod_ok, witness)
