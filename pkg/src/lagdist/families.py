"""Builders for the quadratic-pair instance family used across tests and demos.

The family has base variables x_i, odd generators y_j with d(y_j) = f_j(x),
and even generators z_i with d(z_i) = sum_j 2 (df_j/dx_i) y_j. The square-zero
condition forces sum_j f_j^2 to be constant, so callers usually pass section
components in pairs (f, i f).
"""

from __future__ import annotations

from typing import Sequence

from .dga import AlgElement, DgAlgebra
from .scalar import Poly, Scalar


def paired(f: Poly) -> list:
    """The standard square-zero completion: components f and i*f."""
    return [f, f * Scalar.i()]


def quadratic_pair_algebra(base_vars: Sequence[str], sections: Sequence[Poly],
                           n_z: int | None = None,
                           denominators: Sequence[Poly] = ()) -> DgAlgebra:
    """Algebra with d(y_j) = f_j and d(z_i) = sum_j 2 (df_j/dx_i) y_j.

    Construction validates d^2 = 0 exactly, so sum f_j^2 must be constant.
    With one z per base variable the standard two-form dx dz + sum dy dy is a
    strict symplectic form on the result.
    """
    base_vars = tuple(base_vars)
    n_z = len(base_vars) if n_z is None else n_z
    gens = [(f"y{j}", -1) for j in range(len(sections))]
    gens += [(f"z{i}", -2) for i in range(n_z)]
    shell = DgAlgebra(base_vars, gens, check=False)
    diff = {}
    for j, f in enumerate(sections):
        diff[f"y{j}"] = shell.poly(f.aligned_to(base_vars))
    for i in range(n_z):
        if i < len(base_vars):
            acc = shell.zero()
            for j, f in enumerate(sections):
                df = f.aligned_to(base_vars).derivative(base_vars[i])
                acc = acc + shell.gen(f"y{j}") * df * 2
            diff[f"z{i}"] = acc
        else:
            diff[f"z{i}"] = shell.zero()
    return DgAlgebra(base_vars, gens, diff, denominators=denominators)


def one_variable_family(f: Poly, extra_y: int = 0) -> DgAlgebra:
    """One x, one z, paired sections (f, i f), optionally extra closed y's."""
    sections = paired(f)
    sections += [Poly.zero(("x",)) for _ in range(extra_y)]
    return quadratic_pair_algebra(("x",), sections)


def zero_section_algebra(n_vars: int, n_y: int, n_z: int | None = None) -> DgAlgebra:
    """All differentials zero: minimal at every point, any generator counts."""
    base = tuple(f"x{i}" for i in range(n_vars))
    sections = [Poly.zero(base) for _ in range(n_y)]
    return quadratic_pair_algebra(base, sections, n_z=n_z)
