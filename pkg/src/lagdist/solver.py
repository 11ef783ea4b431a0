"""Exact linear solving over finite symbolic slots.

Mixed elements and polynomials are flattened onto coordinate dictionaries
keyed by (algebra monomial, form monomial, exponent tuple); any linear
question with finitely many unknowns then becomes an exact matrix solve.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Callable, Dict, List, Sequence, Tuple

from .derham import MixedAlgebra, MixedElement
from .dga import DgAlgebra
from .linalg import Matrix, solve
from .scalar import Poly, Scalar


def mixed_coordinates(elem: MixedElement) -> Dict[tuple, Scalar]:
    out = {}
    for (mono, fmono), coeff in elem.terms.items():
        for expo, c in coeff.terms.items():
            out[(mono, fmono, expo)] = c
    return out


def solve_linear_combination(apply_fn: Callable[[MixedElement], MixedElement],
                             basis: Sequence[MixedElement],
                             target: MixedElement) -> MixedElement | None:
    """Find sum x_i b_i with apply_fn(sum) = target, or None.

    apply_fn must be linear; columns are the images of the basis elements.
    """
    columns = [mixed_coordinates(apply_fn(b)) for b in basis]
    rhs_coords = mixed_coordinates(target)
    keys = sorted(set(rhs_coords) | {k for col in columns for k in col})
    if not basis:
        return target.mixed.zero() if not rhs_coords else None
    mat = Matrix(len(keys), len(basis),
                 [[columns[j].get(k, Scalar.zero()) for j in range(len(basis))]
                  for k in keys])
    rhs = [rhs_coords.get(k, Scalar.zero()) for k in keys]
    sol = solve(mat, rhs)
    if sol is None:
        return None
    out = target.mixed.zero()
    for coeff, b in zip(sol, basis):
        if not coeff.is_zero():
            out = out + b * coeff
    return out


def algebra_monomials(A: DgAlgebra, degree: int, max_factors: int = 3) -> List[tuple]:
    """Generator monomials of the given (non-positive) degree."""
    if degree == 0:
        return [()]
    out = []
    gens = [n for n, _ in A.generators]
    for r in range(1, max_factors + 1):
        for combo in combinations_with_replacement(gens, r):
            if sum(A.gen_degree[g] for g in combo) != degree:
                continue
            if any(combo.count(g) > 1 and A.gen_degree[g] % 2 for g in set(combo)):
                continue
            out.append(tuple(sorted(combo, key=lambda g: A.gen_key[g])))
    return sorted(set(out))


def poly_monomials(A: DgAlgebra, bound: int) -> List[tuple]:
    """Exponent tuples of total degree <= bound over the base variables."""
    vars_ = A.base_vars
    seen = {(0,) * len(vars_)}
    frontier = list(seen)
    for _ in range(bound):
        frontier = [tuple(x + (1 if k == j else 0) for k, x in enumerate(e))
                    for e in frontier for j in range(len(vars_))]
        seen.update(frontier)
    return sorted(seen)


def weight_two_basis(MA: MixedAlgebra, degree: int, poly_bound: int = 2,
                     restrict_form_gens: Sequence[str] | None = None) -> List[MixedElement]:
    """All weight-2 normal-form monomials of the given total degree."""
    A = MA.algebra
    names = [g.name for g in MA.form_gens
             if restrict_form_gens is None or g.name in restrict_form_gens]
    out = []
    for a, b in combinations_with_replacement(sorted(names, key=lambda n: MA.form_key[n]), 2):
        if a == b and MA.form_degree[a] % 2:
            continue
        fdeg = MA.form_degree[a] + MA.form_degree[b]
        adeg = degree - fdeg
        if adeg > 0:
            continue
        from .dga import AlgElement
        for mono in algebra_monomials(A, adeg):
            for expo in poly_monomials(A, poly_bound):
                coeff = Poly(A.base_vars, {expo: Scalar.one()})
                piece = MA.from_alg(AlgElement(A, {mono: coeff}))
                piece = piece * MA.form_gen(a) * MA.form_gen(b)
                if not piece.is_zero():
                    out.append(piece)
    return out


def in_differential_span(target: Poly, generators: Sequence[Poly],
                         A: DgAlgebra, bound: int = 3) -> Dict[int, Poly] | None:
    """Solve target = sum_j f_j g_j with deg f_j <= bound, exactly.

    Returns the witness coefficients indexed by generator position, or None.
    """
    target = target.aligned_to(A.base_vars)
    gens = [g.aligned_to(A.base_vars) for g in generators]
    slots: List[Tuple[int, tuple]] = []
    columns: List[Dict[tuple, Scalar]] = []
    for j, g in enumerate(gens):
        for expo in poly_monomials(A, bound):
            mono = Poly(A.base_vars, {expo: Scalar.one()})
            prod = mono * g
            if prod.is_zero():
                continue
            slots.append((j, expo))
            columns.append(dict(prod.terms))
    keys = sorted(set(target.terms) | {k for col in columns for k in col})
    if not slots:
        return {} if target.is_zero() else None
    mat = Matrix(len(keys), len(slots),
                 [[columns[c].get(k, Scalar.zero()) for c in range(len(slots))]
                  for k in keys])
    rhs = [target.terms.get(k, Scalar.zero()) for k in keys]
    sol = solve(mat, rhs)
    if sol is None:
        return None
    witness: Dict[int, Poly] = {}
    for coeff, (j, expo) in zip(sol, slots):
        if coeff.is_zero():
            continue
        witness[j] = witness.get(j, Poly.zero(A.base_vars)) \
            + Poly(A.base_vars, {expo: coeff})
    return witness
