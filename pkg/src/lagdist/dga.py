"""Well-presented differential non-positively graded algebras over Q(i).

An algebra here is a polynomial ring in the degree-0 base variables, freely
extended by finitely many generators of negative degree, with a differential
of degree +1 given on generators and extended by the graded Leibniz rule.
Odd-degree generators square to zero, even ones behave polynomially.

Localization is tracked as a denominator list only: a classical point belongs
to the chart iff all denominators are nonzero there. Coefficient arithmetic
stays polynomial throughout.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .linalg import CochainComplex, Matrix, rank
from .scalar import Poly, Scalar


def koszul_sort(names: Sequence[str], degree_of: Mapping[str, int],
                key_of: Mapping[str, tuple]) -> Tuple[int, tuple | None]:
    """Sort symbols into canonical order, accumulating the Koszul sign.

    Returns (sign, sorted tuple); sign 0 when an odd symbol repeats.
    """
    items = list(names)
    sign = 1
    # insertion sort; adjacent swap of symbols a, b costs (-1)^(|a||b|)
    for i in range(1, len(items)):
        j = i
        while j > 0 and key_of[items[j - 1]] > key_of[items[j]]:
            d1 = degree_of[items[j - 1]]
            d2 = degree_of[items[j]]
            if (d1 * d2) % 2:
                sign = -sign
            items[j - 1], items[j] = items[j], items[j - 1]
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b and degree_of[a] % 2:
            return 0, None
    return sign, tuple(items)


class DgAlgebra:
    """A well-presented dg algebra: base variables plus negative generators."""

    def __init__(self, base_vars: Sequence[str],
                 generators: Sequence[Tuple[str, int]],
                 differential: Mapping[str, "AlgElement"] | None = None,
                 denominators: Sequence[Poly] = (),
                 check: bool = True):
        self.base_vars = tuple(base_vars)
        self.generators = tuple((n, int(d)) for n, d in generators)
        names = list(self.base_vars) + [n for n, _ in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names")
        for n, d in self.generators:
            if d >= 0:
                raise ValueError(f"generator {n!r} must have negative degree")
        self.gen_degree = {n: d for n, d in self.generators}
        # canonical monomial order: ascending (degree, name)
        self.gen_key = {n: (d, n) for n, d in self.generators}
        self.differential: Dict[str, AlgElement] = {}
        differential = differential or {}
        stray = set(differential) - set(self.gen_degree)
        if stray:
            raise ValueError(f"differential given for unknown generators {sorted(stray)}")
        for n, _ in self.generators:
            val = differential.get(n)
            # rebind to this algebra so Leibniz extension sees this differential
            self.differential[n] = val.transport(self) if val is not None else self.zero()
        self.denominators = tuple(denominators)
        if check:
            self._validate()

    def _validate(self):
        for n, d in self.generators:
            dg = self.differential[n]
            for deg in dg.degrees():
                if deg != d + 1:
                    raise ValueError(
                        f"d({n}) has a term of degree {deg}, expected {d + 1}")
        for n, _ in self.generators:
            ddg = self.differential[n].differentiate()
            if not ddg.is_zero():
                raise ValueError(f"d^2 != 0 on generator {n!r}: d(d({n})) = {ddg}")

    # -- element constructors ------------------------------------------------

    def zero(self) -> "AlgElement":
        return AlgElement(self, {})

    def one(self) -> "AlgElement":
        return self.scalar(1)

    def scalar(self, c) -> "AlgElement":
        return AlgElement(self, {(): Poly.constant(c, self.base_vars)})

    def poly(self, p: Poly) -> "AlgElement":
        return AlgElement(self, {(): p.aligned_to(self.base_vars)})

    def var(self, name: str) -> "AlgElement":
        if name not in self.base_vars:
            raise KeyError(f"unknown base variable {name!r}")
        return self.poly(Poly.variable(name, self.base_vars))

    def gen(self, name: str) -> "AlgElement":
        if name not in self.gen_degree:
            raise KeyError(f"unknown generator {name!r}")
        return AlgElement(self, {(name,): Poly.constant(1, self.base_vars)})

    def symbol(self, name: str) -> "AlgElement":
        return self.var(name) if name in self.base_vars else self.gen(name)

    def symbol_names(self) -> List[str]:
        return list(self.base_vars) + [n for n, _ in self.generators]

    def gens_of_degree(self, d: int) -> List[str]:
        return [n for n, k in self.generators if k == d]

    def monomial_degree(self, mono: tuple) -> int:
        return sum(self.gen_degree[g] for g in mono)

    def same_presentation(self, other: "DgAlgebra") -> bool:
        return (self.base_vars == other.base_vars
                and self.generators == other.generators)

    def __repr__(self):
        gens = ", ".join(f"{n}:{d}" for n, d in self.generators)
        return f"DgAlgebra[{','.join(self.base_vars)}; {gens}]"


class AlgElement:
    """Normal-form element of a DgAlgebra: {generator monomial -> Poly coeff}."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: DgAlgebra, terms: Mapping[tuple, Poly]):
        self.algebra = algebra
        clean = {}
        for mono, coeff in terms.items():
            if coeff.is_zero():
                continue
            if coeff.variables != algebra.base_vars:
                coeff = coeff.aligned_to(algebra.base_vars)
            clean[tuple(mono)] = coeff
        self.terms = clean

    def _compat(self, other: "AlgElement"):
        if self.algebra is not other.algebra and not self.algebra.same_presentation(other.algebra):
            raise ValueError("elements of different algebras")

    # -- ring operations ------------------------------------------------------

    def __add__(self, other) -> "AlgElement":
        if isinstance(other, (int, Scalar)):
            other = self.algebra.scalar(other)
        self._compat(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            s = terms.get(mono, Poly.zero(self.algebra.base_vars)) + coeff
            if s.is_zero():
                terms.pop(mono, None)
            else:
                terms[mono] = s
        return AlgElement(self.algebra, terms)

    __radd__ = __add__

    def __neg__(self) -> "AlgElement":
        return AlgElement(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "AlgElement":
        if isinstance(other, (int, Scalar)):
            other = self.algebra.scalar(other)
        return self + (-other)

    def __mul__(self, other) -> "AlgElement":
        A = self.algebra
        if isinstance(other, (int, Scalar)):
            return AlgElement(A, {m: c * Scalar.of(other) for m, c in self.terms.items()})
        if isinstance(other, Poly):
            p = other.aligned_to(A.base_vars)
            return AlgElement(A, {m: c * p for m, c in self.terms.items()})
        self._compat(other)
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, mono = koszul_sort(m1 + m2, A.gen_degree, A.gen_key)
                if sign == 0:
                    continue
                add = c1 * c2 * Scalar.of(sign)
                s = terms.get(mono, Poly.zero(A.base_vars)) + add
                if s.is_zero():
                    terms.pop(mono, None)
                else:
                    terms[mono] = s
        return AlgElement(A, terms)

    def __rmul__(self, other) -> "AlgElement":
        # scalars and polynomials have degree 0, so side does not matter
        if isinstance(other, (int, Scalar, Poly)):
            return self * other
        return NotImplemented

    # -- structure ------------------------------------------------------------

    def degrees(self) -> List[int]:
        return sorted({self.algebra.monomial_degree(m) for m in self.terms})

    def degree(self) -> int:
        """Degree of a homogeneous element (0 for the zero element)."""
        ds = self.degrees()
        if not ds:
            return 0
        if len(ds) > 1:
            raise ValueError(f"element not homogeneous: degrees {ds}")
        return ds[0]

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def homogeneous_parts(self) -> Dict[int, "AlgElement"]:
        parts: Dict[int, dict] = {}
        for mono, coeff in self.terms.items():
            parts.setdefault(self.algebra.monomial_degree(mono), {})[mono] = coeff
        return {d: AlgElement(self.algebra, t) for d, t in parts.items()}

    def is_zero(self) -> bool:
        return not self.terms

    def poly_part(self) -> Poly:
        return self.terms.get((), Poly.zero(self.algebra.base_vars))

    def coefficient(self, mono: tuple) -> Poly:
        return self.terms.get(tuple(mono), Poly.zero(self.algebra.base_vars))

    def max_poly_degree(self) -> int:
        return max((c.total_degree() for c in self.terms.values()), default=0)

    # -- differential -----------------------------------------------------------

    def differentiate(self) -> "AlgElement":
        """Leibniz extension of the generator differential; degree +1."""
        A = self.algebra
        out = A.zero()
        for mono, coeff in self.terms.items():
            prefix_degree = 0
            for i, g in enumerate(mono):
                sign = -1 if prefix_degree % 2 else 1
                piece = AlgElement(A, {mono[:i]: coeff * Scalar.of(sign)})
                piece = piece * A.differential[g]
                piece = piece * AlgElement(A, {mono[i + 1:]: Poly.constant(1, A.base_vars)})
                out = out + piece
                prefix_degree += A.gen_degree[g]
        return out

    # -- substitution and evaluation ---------------------------------------------

    def substitute_generator(self, name: str, replacement: "AlgElement",
                             target: DgAlgebra | None = None) -> "AlgElement":
        """Algebra-map substitution g -> replacement (g must not occur in it)."""
        A = target or self.algebra
        out = A.zero()
        for mono, coeff in self.terms.items():
            piece = A.poly(coeff.aligned_to(A.base_vars))
            for g in mono:
                piece = piece * (replacement if g == name else A.gen(g))
            out = out + piece
        return out

    def substitute_var(self, var: str, replacement: Poly,
                       target: DgAlgebra | None = None) -> "AlgElement":
        A = target or self.algebra
        out = A.zero()
        for mono, coeff in self.terms.items():
            newc = coeff.substitute(var, replacement).aligned_to(A.base_vars)
            piece = A.poly(newc)
            for g in mono:
                piece = piece * A.gen(g)
            out = out + piece
        return out

    def transport(self, target: DgAlgebra) -> "AlgElement":
        """Reinterpret in an algebra carrying the same symbols."""
        out = target.zero()
        for mono, coeff in self.terms.items():
            piece = target.poly(coeff.aligned_to(target.base_vars))
            for g in mono:
                piece = piece * target.gen(g)
            out = out + piece
        return out

    def eval_at(self, point: "ClassicalPoint") -> Scalar:
        """Evaluation as an algebra map to Q(i); negative generators die."""
        return self.poly_part().eval(point.assignment)

    def conjugate(self) -> "AlgElement":
        return AlgElement(self.algebra, {m: c.conjugate() for m, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Scalar)):
            other = self.algebra.scalar(other)
        if not isinstance(other, AlgElement):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset((m, hash(c)) for m, c in self.terms.items()))

    def __repr__(self):
        return f"AlgElement({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda m: (len(m), m))
        parts = []
        for mono in keys:
            c = str(self.terms[mono])
            ms = "*".join(mono)
            if not ms:
                parts.append(c if ("+" not in c and "-" not in c[1:]) else f"({c})")
            elif c == "1":
                parts.append(ms)
            elif c == "-1":
                parts.append(f"-{ms}")
            else:
                wrap = c if ("+" not in c and "-" not in c[1:]) else f"({c})"
                parts.append(f"{wrap}*{ms}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


class ClassicalPoint:
    """An algebra map to Q(i): assigns base variables, kills negative degrees.

    Valid only when d(g) vanishes at the assignment for every degree -1
    generator, and all localization denominators are nonzero there.
    """

    def __init__(self, algebra: DgAlgebra, assignment: Mapping[str, Scalar],
                 name: str = "pt"):
        self.algebra = algebra
        self.name = name
        missing = set(algebra.base_vars) - set(assignment)
        if missing:
            raise ValueError(f"point must assign all base variables, missing {sorted(missing)}")
        self.assignment = {v: Scalar.of(assignment[v]) for v in algebra.base_vars}
        for g in algebra.gens_of_degree(-1):
            value = algebra.differential[g].poly_part().eval(self.assignment)
            if not value.is_zero():
                raise ValueError(
                    f"not a classical point: d({g}) evaluates to {value}")
        for den in algebra.denominators:
            if den.eval(self.assignment).is_zero():
                raise ValueError(f"point outside chart: denominator {den} vanishes")

    def __repr__(self):
        vals = ", ".join(f"{v}={self.assignment[v]}" for v in self.algebra.base_vars)
        return f"ClassicalPoint({self.name}: {vals})"


# ---------------------------------------------------------------------------
# Free dg modules
# ---------------------------------------------------------------------------

class ModuleElement:
    """Element of a free dg module: {generator name -> AlgElement coefficient}."""

    __slots__ = ("module", "coords")

    def __init__(self, module: "FreeDgModule", coords: Mapping[str, AlgElement]):
        self.module = module
        clean = {}
        for name, coeff in coords.items():
            if name not in module.gen_degree:
                raise KeyError(f"unknown module generator {name!r}")
            if not coeff.is_zero():
                clean[name] = coeff
        self.coords = clean

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        coords = dict(self.coords)
        for n, c in other.coords.items():
            s = coords.get(n, self.module.algebra.zero()) + c
            if s.is_zero():
                coords.pop(n, None)
            else:
                coords[n] = s
        return ModuleElement(self.module, coords)

    def __neg__(self):
        return ModuleElement(self.module, {n: -c for n, c in self.coords.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a) -> "ModuleElement":
        if isinstance(a, (int, Scalar, Poly)):
            a = self.module.algebra.one() * a
        return ModuleElement(self.module, {n: a * c for n, c in self.coords.items()})

    def is_zero(self) -> bool:
        return not self.coords

    def coefficient(self, name: str) -> AlgElement:
        return self.coords.get(name, self.module.algebra.zero())

    def degrees(self) -> List[int]:
        ds = set()
        for n, c in self.coords.items():
            for d in c.degrees():
                ds.add(d + self.module.gen_degree[n])
        return sorted(ds)

    def degree(self) -> int:
        ds = self.degrees()
        if not ds:
            return 0
        if len(ds) > 1:
            raise ValueError(f"module element not homogeneous: {ds}")
        return ds[0]

    def differentiate(self) -> "ModuleElement":
        """d(c u) = dc u + (-1)^|c| c du, per homogeneous piece of c."""
        M = self.module
        out = M.zero()
        for name, coeff in self.coords.items():
            dc = coeff.differentiate()
            if not dc.is_zero():
                out = out + ModuleElement(M, {name: dc})
            du = M.differential.get(name)
            if du is not None and not du.is_zero():
                for d, part in coeff.homogeneous_parts().items():
                    sign = -1 if d % 2 else 1
                    out = out + du.scale(part * Scalar.of(sign))
        return out

    def constant_vector(self, names: Sequence[str]) -> List[Scalar] | None:
        """Coordinates as Scalars when all coefficients are constant, else None."""
        out = []
        for n in names:
            c = self.coefficient(n)
            if c.is_zero():
                out.append(Scalar.zero())
                continue
            p = c.poly_part()
            if (c - c.algebra.poly(p)).is_zero() and p.is_constant():
                out.append(p.constant_value())
            else:
                return None
        return out

    def __eq__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        if not self.coords:
            return "0"
        parts = [f"({c})*{n}" for n, c in sorted(self.coords.items())]
        return " + ".join(parts)


class FreeDgModule:
    """Free dg module over a DgAlgebra with named generators."""

    def __init__(self, algebra: DgAlgebra, generators: Sequence[Tuple[str, int]],
                 differential: Mapping[str, ModuleElement] | None = None,
                 check: bool = True):
        self.algebra = algebra
        self.generators = tuple((n, int(d)) for n, d in generators)
        names = [n for n, _ in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate module generator names")
        self.gen_degree = {n: d for n, d in self.generators}
        self.differential: Dict[str, ModuleElement] = {}
        if differential:
            for n, val in differential.items():
                if n not in self.gen_degree:
                    raise KeyError(f"unknown module generator {n!r}")
                self.differential[n] = val
        if check:
            self._validate()

    def _validate(self):
        for n, val in self.differential.items():
            for d in val.degrees():
                if d != self.gen_degree[n] + 1:
                    raise ValueError(f"d({n}) has degree {d}, expected {self.gen_degree[n] + 1}")
        for n, _ in self.generators:
            dd = self.gen(n).differentiate().differentiate()
            if not dd.is_zero():
                raise ValueError(f"module d^2 != 0 on {n!r}: {dd}")

    def zero(self) -> ModuleElement:
        return ModuleElement(self, {})

    def gen(self, name: str) -> ModuleElement:
        return ModuleElement(self, {name: self.algebra.one()})

    def element(self, coords: Mapping[str, AlgElement]) -> ModuleElement:
        return ModuleElement(self, coords)

    def from_constant_columns(self, degree: int, columns: Sequence[Sequence]) -> List[ModuleElement]:
        names = self.basis_by_degree().get(degree, [])
        out = []
        for col in columns:
            if len(col) != len(names):
                raise ValueError("column length does not match generator count")
            coords = {n: self.algebra.scalar(c) for n, c in zip(names, col)}
            out.append(ModuleElement(self, coords))
        return out

    def basis_by_degree(self) -> Dict[int, List[str]]:
        out: Dict[int, List[str]] = {}
        for n, d in self.generators:
            out.setdefault(d, []).append(n)
        return out

    def degrees(self) -> List[int]:
        return sorted({d for _, d in self.generators})

    def fiber_complex(self, point: ClassicalPoint) -> CochainComplex:
        """Evaluate all differential coefficients at a classical point."""
        basis = self.basis_by_degree()
        spaces = {d: len(names) for d, names in basis.items()}
        diffs = {}
        for k in sorted(basis):
            src = basis[k]
            tgt = basis.get(k + 1, [])
            if not tgt:
                continue
            mat = Matrix(len(tgt), len(src))
            for j, n in enumerate(src):
                dn = self.differential.get(n)
                if dn is None:
                    continue
                for i, m in enumerate(tgt):
                    mat.entries[i][j] = dn.coefficient(m).eval_at(point)
            diffs[k] = mat
        return CochainComplex(spaces, diffs)

    def shift(self, s: int) -> "FreeDgModule":
        """M[s]^k = M^(k+s); the differential picks up the sign (-1)^s."""
        gens = [(n, d - s) for n, d in self.generators]
        shifted = FreeDgModule(self.algebra, gens, check=False)
        sign = Scalar.of((-1) ** (s % 2))
        for n, val in self.differential.items():
            shifted.differential[n] = ModuleElement(
                shifted, {m: c * sign for m, c in val.coords.items()})
        return shifted


class ModuleMap:
    """Degree-0 map of free dg modules given on generators."""

    def __init__(self, source: FreeDgModule, target: FreeDgModule,
                 images: Mapping[str, ModuleElement], name: str = "map"):
        self.source = source
        self.target = target
        self.name = name
        self.images = {n: images.get(n, target.zero()) for n, _ in source.generators}

    def apply(self, elem: ModuleElement) -> ModuleElement:
        out = self.target.zero()
        for n, c in elem.coords.items():
            coeff = c if self.target.algebra is self.source.algebra else c.transport(self.target.algebra)
            out = out + self.images[n].scale(coeff)
        return out

    def is_chain_map(self) -> bool:
        return not self.chain_defect()

    def chain_defect(self) -> Dict[str, ModuleElement]:
        out = {}
        for n, _ in self.source.generators:
            diff = self.apply(self.source.gen(n).differentiate()) - self.images[n].differentiate()
            if not diff.is_zero():
                out[n] = diff
        return out

    def fiber_chain_map(self, point: ClassicalPoint):
        from .linalg import ChainMap
        src = self.source.fiber_complex(point)
        tgt = self.target.fiber_complex(point)
        sbasis = self.source.basis_by_degree()
        tbasis = self.target.basis_by_degree()
        blocks = {}
        for k, snames in sbasis.items():
            tnames = tbasis.get(k, [])
            mat = Matrix(len(tnames), len(snames))
            for j, n in enumerate(snames):
                img = self.images[n]
                for i, m in enumerate(tnames):
                    mat.entries[i][j] = img.coefficient(m).eval_at(point)
            blocks[k] = mat
        return ChainMap(src, tgt, blocks)

    def is_fiber_quasi_iso(self, points: Iterable[ClassicalPoint]) -> bool:
        return all(self.fiber_chain_map(pt).is_quasi_iso() for pt in points)


# ---------------------------------------------------------------------------
# Kahler differentials and the tangent complex
# ---------------------------------------------------------------------------

def form_name(symbol: str) -> str:
    return f"d{symbol}"


def tangent_name(symbol: str, algebra: DgAlgebra) -> str:
    return f"D{symbol}" if symbol in algebra.base_vars else f"E{symbol}"


def total_differential(a: AlgElement, omega: FreeDgModule) -> ModuleElement:
    """Universal degree-0 derivation A -> Omega^1, d(uv) = du v + u dv.

    Coefficients sit left of the module generators: the term
    g_1..dg_i..g_r is rewritten as +- (g_1..g_r without g_i) dg_i by moving
    dg_i right past the factors after it.
    """
    A = a.algebra
    out = omega.zero()
    for mono, coeff in a.terms.items():
        for v in A.base_vars:
            dc = coeff.derivative(v)
            if dc.is_zero():
                continue
            out = out + ModuleElement(omega, {form_name(v): AlgElement(A, {mono: dc})})
        for i, g in enumerate(mono):
            post_deg = sum(A.gen_degree[x] for x in mono[i + 1:])
            sign = -1 if (post_deg * A.gen_degree[g]) % 2 else 1
            rest = mono[:i] + mono[i + 1:]
            rest_sign, rest_mono = koszul_sort(rest, A.gen_degree, A.gen_key)
            if rest_sign == 0:
                continue
            c = coeff * Scalar.of(sign * rest_sign)
            out = out + ModuleElement(omega, {form_name(g): AlgElement(A, {rest_mono: c})})
    return out


def kahler_differentials(A: DgAlgebra) -> FreeDgModule:
    """Free module on d(x_i) and d(g), with d(dg) = total differential of d(g)."""
    gens = [(form_name(v), 0) for v in A.base_vars]
    gens += [(form_name(n), d) for n, d in A.generators]
    omega = FreeDgModule(A, gens, check=False)
    for n, _ in A.generators:
        image = total_differential(A.differential[n], omega)
        if not image.is_zero():
            omega.differential[form_name(n)] = image
    omega._validate()
    return omega


def dual_module(M: FreeDgModule, names: Mapping[str, str]) -> FreeDgModule:
    """Graded dual with the convention (d phi)(v) = -(-1)^{|phi|} phi(dv).

    If d(v) = sum c_uv u then d(u*) carries -(-1)^(|u| + (|u|+|v|)|c_uv|) c_uv
    along v*; this is the unique choice making pairing() a chain map.
    """
    A = M.algebra
    gens = [(names[n], -d) for n, d in M.generators]
    dual = FreeDgModule(A, gens, check=False)
    transposed: Dict[str, dict] = {names[n]: {} for n, _ in M.generators}
    for v, dv in M.differential.items():
        for u, c in dv.coords.items():
            for cdeg, part in c.homogeneous_parts().items():
                du = M.gen_degree[u]
                dvd = M.gen_degree[v]
                expo = (du + (du + dvd) * cdeg) % 2
                coeff = part * Scalar.of(-1 if expo == 0 else 1)
                prev = transposed[names[u]].get(names[v])
                transposed[names[u]][names[v]] = coeff if prev is None else prev + coeff
    for un, coords in transposed.items():
        coords = {vn: c for vn, c in coords.items() if not c.is_zero()}
        if coords:
            dual.differential[un] = ModuleElement(dual, coords)
    dual._validate()
    return dual


def pairing(phi: ModuleElement, omega: ModuleElement,
            names: Mapping[str, str]) -> AlgElement:
    """Evaluation pairing <a u*, c v> = a (-1)^(|u*||c|) c delta_uv."""
    A = omega.module.algebra
    out = A.zero()
    for u, a in phi.coords.items():
        udeg = phi.module.gen_degree[u]
        for v, c in omega.coords.items():
            if names[v] != u:
                continue
            for cdeg, part in c.homogeneous_parts().items():
                sign = -1 if (udeg * cdeg) % 2 else 1
                out = out + a * part * Scalar.of(sign)
    return out


def tangent_complex(A: DgAlgebra) -> FreeDgModule:
    """Dual of the Kahler module: Dx_i in degree 0, Eg in degree -|g| > 0."""
    return dual_module(kahler_differentials(A), tangent_pairing_names(A))


def tangent_pairing_names(A: DgAlgebra) -> Dict[str, str]:
    """Omega^1 generator name -> tangent dual name."""
    names = {form_name(v): tangent_name(v, A) for v in A.base_vars}
    names.update({form_name(n): tangent_name(n, A) for n, _ in A.generators})
    return names


# ---------------------------------------------------------------------------
# Derivations: tangent elements acting on the algebra
# ---------------------------------------------------------------------------

def apply_derivation(values: Mapping[str, AlgElement], deg: int,
                     target: AlgElement) -> AlgElement:
    """Apply the graded derivation with the given values on symbols."""
    A = target.algebra
    out = A.zero()
    for mono, coeff in target.terms.items():
        for v in A.base_vars:
            val = values.get(v)
            if val is None or val.is_zero():
                continue
            dc = coeff.derivative(v)
            if dc.is_zero():
                continue
            piece = val * dc
            piece = piece * AlgElement(A, {mono: Poly.constant(1, A.base_vars)})
            out = out + piece
        prefix_deg = 0
        for i, g in enumerate(mono):
            val = values.get(g)
            if val is not None and not val.is_zero():
                sign = -1 if (deg * prefix_deg) % 2 else 1
                piece = AlgElement(A, {mono[:i]: coeff * Scalar.of(sign)})
                piece = piece * val
                piece = piece * AlgElement(A, {mono[i + 1:]: Poly.constant(1, A.base_vars)})
                out = out + piece
            prefix_deg += A.gen_degree[g]
    return out


def coordinate_derivation(symbol: str, A: DgAlgebra) -> tuple:
    """(values, degree) of the coordinate derivation dual to a symbol."""
    deg = 0 if symbol in A.base_vars else -A.gen_degree[symbol]
    return {symbol: A.one()}, deg


def tangent_apply(vec: ModuleElement, target: AlgElement) -> AlgElement:
    """Apply a (left-coefficient) tangent element as a derivation of A."""
    A = target.algebra
    T = vec.module
    out = A.zero()
    for name, coeff in vec.coords.items():
        symbol = name[1:]
        values, deg = coordinate_derivation(symbol, A)
        applied = apply_derivation(values, deg, target)
        if not applied.is_zero():
            out = out + coeff * applied
    return out


def tangent_bracket(u: ModuleElement, v: ModuleElement) -> ModuleElement:
    """Lie bracket of tangent elements via the commutator of derivations.

    Values on the algebra symbols are read back off as coordinates in the
    coordinate frame, whose own brackets vanish.
    """
    T = u.module
    A = T.algebra
    du = u.degree() if not u.is_zero() else 0
    dv = v.degree() if not v.is_zero() else 0
    sign = -1 if (du * dv) % 2 else 1
    coords = {}
    for symbol in A.symbol_names():
        target = A.symbol(symbol)
        value = tangent_apply(u, tangent_apply(v, target)) \
            - tangent_apply(v, tangent_apply(u, target)) * Scalar.of(sign)
        if not value.is_zero():
            coords[tangent_name(symbol, A)] = value
    return ModuleElement(T, coords)


# ---------------------------------------------------------------------------
# Minimality and minimization at a point
# ---------------------------------------------------------------------------

def kahler_fiber(A: DgAlgebra, point: ClassicalPoint) -> CochainComplex:
    return kahler_differentials(A).fiber_complex(point)


def is_minimal_at(A: DgAlgebra, point: ClassicalPoint) -> bool:
    """True iff the induced differential on Omega^1|_pt vanishes."""
    fiber = kahler_fiber(A, point)
    return all(m.is_zero() for m in fiber.differentials.values())


class MinimizeError(ValueError):
    pass


class SurjectionData:
    """A quotient presentation A -> A_min from splitting acyclic pairs."""

    def __init__(self, source: DgAlgebra, target: DgAlgebra,
                 var_images: Dict[str, Poly], gen_images: Dict[str, AlgElement]):
        self.source = source
        self.target = target
        self.var_images = var_images
        self.gen_images = gen_images

    def apply_poly(self, p: Poly) -> Poly:
        out = Poly.zero(self.target.base_vars)
        for expo, coeff in p.terms.items():
            part = Poly.constant(coeff, self.target.base_vars)
            for v, e in zip(p.variables, expo):
                if e:
                    part = part * self.var_images[v] ** e
            out = out + part
        return out

    def apply_element(self, a: AlgElement) -> AlgElement:
        B = self.target
        out = B.zero()
        for mono, coeff in a.terms.items():
            piece = B.poly(self.apply_poly(coeff))
            for g in mono:
                piece = piece * self.gen_images[g]
            out = out + piece
        return out

    def is_identity(self) -> bool:
        return (self.source.same_presentation(self.target)
                and all(self.var_images[v] == Poly.variable(v, self.target.base_vars)
                        for v in self.source.base_vars)
                and all(self.gen_images[n] == self.target.gen(n)
                        for n, _ in self.source.generators))


def _linearization_rank(A: DgAlgebra, pt: ClassicalPoint) -> int:
    fiber = kahler_fiber(A, pt)
    return sum(rank(m) for m in fiber.differentials.values())


def _transport_with(elem: AlgElement, target: DgAlgebra,
                    gen_map: Mapping[str, AlgElement | None],
                    var_map: Mapping[str, Poly] | None = None) -> AlgElement:
    """Algebra map given by images of generators (None = killed) and variables."""
    out = target.zero()
    for mono, coeff in elem.terms.items():
        if var_map:
            for v, image in var_map.items():
                if v in coeff.variables:
                    coeff = coeff.substitute(v, image)
        try:
            piece = target.poly(coeff.aligned_to(target.base_vars))
        except ValueError as exc:
            raise MinimizeError(f"coefficient {coeff} does not survive quotient") from exc
        dead = False
        for g in mono:
            if g not in gen_map:
                piece = piece * target.gen(g)
                continue
            image = gen_map[g]
            if image is None:
                dead = True
                break
            piece = piece * image
        if not dead:
            out = out + piece
    return out


def minimize_at(A: DgAlgebra, point: ClassicalPoint,
                sample_points: Sequence[ClassicalPoint] = ()) -> tuple:
    """Split off acyclic pairs until the algebra is minimal at the point.

    Returns (minimal algebra, SurjectionData, point transported).

    Every elimination divides by a pivot, so pivots must be unit constants:
    either d(g) = c h + rest for generators g, h, or d(y) = c x + rest with
    rest free of x. A non-constant pivot would require genuine ring
    localization, which this engine does not perform; tracked denominators
    only gate chart membership.
    """
    if sample_points:
        base = _linearization_rank(A, point)
        offending = [pt.name for pt in sample_points
                     if _linearization_rank(A, pt) != base]
        if offending:
            raise MinimizeError(
                f"linear part of d has non-constant rank on samples: {offending}")

    current = A
    var_images: Dict[str, Poly] = {v: Poly.variable(v, A.base_vars) for v in A.base_vars}
    gen_images: Dict[str, AlgElement] = {n: A.gen(n) for n, _ in A.generators}
    pt_assign = dict(point.assignment)

    while True:
        pt = ClassicalPoint(current, {v: pt_assign[v] for v in current.base_vars},
                            name=point.name)
        if is_minimal_at(current, pt):
            break

        step = _find_gen_pair(current) or _find_var_pair(current)
        if step is None:
            raise MinimizeError(
                "no unit-constant pivot available; this instance would need ring "
                "localization beyond tracked denominators")

        kind = step[0]
        if kind == "gen":
            _, g, h, replacement = step
            new_gens = [(n, d) for n, d in current.generators if n not in (g, h)]
            stage = DgAlgebra(current.base_vars, new_gens, check=False)
            gen_map = {g: None, h: _transport_with(replacement, stage, {g: None, h: None})}
            new_diff = {n: _transport_with(current.differential[n], stage, gen_map)
                        for n, _ in new_gens}
            candidate = DgAlgebra(current.base_vars, new_gens, new_diff,
                                  denominators=current.denominators)
            gen_map = {g: None, h: gen_map[h].transport(candidate)}
            var_map = None
        else:
            _, y, x, replacement = step
            new_vars = tuple(v for v in current.base_vars if v != x)
            replacement = replacement.aligned_to(new_vars)
            new_gens = [(n, d) for n, d in current.generators if n != y]
            stage = DgAlgebra(new_vars, new_gens, check=False)
            gen_map = {y: None}
            var_map = {x: replacement}
            new_diff = {n: _transport_with(current.differential[n], stage, gen_map, var_map)
                        for n, _ in new_gens}
            new_dens = tuple(d.substitute(x, replacement).aligned_to(new_vars)
                             for d in current.denominators)
            candidate = DgAlgebra(new_vars, new_gens, new_diff, denominators=new_dens)
            pt_assign = {v: pt_assign[v] for v in new_vars}

        for k in var_images:
            p = var_images[k]
            if var_map:
                for v, image in var_map.items():
                    if v in p.variables:
                        p = p.substitute(v, image)
            var_images[k] = p.aligned_to(candidate.base_vars)
        for k in gen_images:
            gen_images[k] = _transport_with(gen_images[k], candidate, gen_map, var_map)
        current = candidate

    surj = SurjectionData(A, current, var_images, gen_images)
    final_pt = ClassicalPoint(current, {v: pt_assign[v] for v in current.base_vars},
                              name=point.name)
    return current, surj, final_pt


def _find_gen_pair(A: DgAlgebra):
    """A pair (g, h) with d(g) = c h + rest, c a nonzero constant."""
    for g, dg in A.gen_degree.items():
        image = A.differential[g]
        for h, dh in A.gen_degree.items():
            if dh != dg + 1:
                continue
            c = image.coefficient((h,))
            if c.is_zero() or not c.is_constant():
                continue
            cval = c.constant_value()
            rest = image - AlgElement(A, {(h,): c})
            replacement = rest * (Scalar.of(-1) / cval)
            return ("gen", g, h, replacement)
    return None


def _find_var_pair(A: DgAlgebra):
    """A pair (y, x) with d(y) = c x + rest, c constant, rest free of x."""
    for y in A.gens_of_degree(-1):
        f = A.differential[y].poly_part()
        if f.is_zero():
            continue
        for x in A.base_vars:
            coeff = f.derivative(x)
            if coeff.is_zero() or not coeff.is_constant():
                continue
            cval = coeff.constant_value()
            rest = f - Poly.variable(x, f.variables) * cval
            if x in rest.variables:
                idx = rest.variables.index(x)
                if any(e[idx] for e in rest.terms):
                    continue
            replacement = rest * (Scalar.of(-1) / cval)
            if x in replacement.variables:
                replacement = replacement.drop_variable(x)
            return ("var", y, x, replacement)
    return None
