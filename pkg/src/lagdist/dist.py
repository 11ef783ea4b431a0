"""Integrable distributions in Lie-Rinehart form.

A distribution is a free dg module L with an anchor into the tangent complex
and a bracket. All constructors in scope declare a flat frame (the module
generators), i.e. the bracket structure constants on generators vanish; this
holds automatically for constant-coefficient sub-bundles of the coordinate
frame, whose derivation brackets are zero.

The weight side of a distribution is a mixed algebra on generators dual to
the L-generators:

    delta(a)   = sum_i gamma_i . (anchor of l_i applied to a)
    d(gamma_j) = (-1)^(|l_j| + 1) sum_i B(i -> j) gamma_i,

where B(i -> j) is the coefficient of l_j in d(l_i). The sign reproduces the
de Rham differential exactly when L is the whole tangent complex. For strict
sub-bundles this is the quotient of the de Rham algebra by the mixed ideal on
the complementary one-forms, and all mixed axioms hold; on surjective
replacements the zero-twist bracket need not be compatible with the module
differential, so there only the cohomological differential is contractual.
That suffices: the Lagrangian conditions factor through free terms, which
never see the weight differential.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Sequence, Tuple

from .derham import FormGen, MixedAlgebra, MixedElement, TSeriesForm, derham_of, \
    interior_product
from .dga import (AlgElement, ClassicalPoint, DgAlgebra, FreeDgModule,
                  ModuleElement, ModuleMap, form_name, tangent_apply,
                  tangent_bracket, tangent_complex)
from .linalg import Matrix, complete_to_basis, inverse, rank
from .scalar import Poly, Scalar


class ClosureViolation(ValueError):
    """A selected sub-bundle fails d- or bracket-closure; carries witnesses."""

    def __init__(self, message: str, witnesses):
        super().__init__(message)
        self.witnesses = witnesses


def gamma_name(gen: str) -> str:
    return f"d{gen}"


class Distribution:
    """A Lie-Rinehart algebra over A: module, anchor, flat-frame bracket."""

    def __init__(self, algebra: DgAlgebra, tangent: FreeDgModule,
                 module: FreeDgModule, anchor: Mapping[str, ModuleElement],
                 strict: bool = False, name: str = "L"):
        self.algebra = algebra
        self.tangent = tangent
        self.module = module
        self.anchor = {n: anchor.get(n, tangent.zero()) for n, _ in module.generators}
        self.strict = strict
        self.name = name
        self._forms = None

    # -- basic structure ---------------------------------------------------------

    def anchor_map(self) -> ModuleMap:
        return ModuleMap(self.module, self.tangent, self.anchor, name=f"anchor({self.name})")

    def check_chain_anchor(self) -> Dict[str, ModuleElement]:
        return self.anchor_map().chain_defect()

    def generator_names(self) -> List[str]:
        return [n for n, _ in self.module.generators]

    def frame_brackets_vanish(self) -> bool:
        gens = [self.anchor[n] for n, _ in self.module.generators]
        for u in gens:
            for v in gens:
                if not tangent_bracket(u, v).is_zero():
                    return False
        return True

    # -- the dual mixed algebra ----------------------------------------------------

    def forms(self) -> MixedAlgebra:
        """The weight side: free mixed algebra on duals of the L-generators."""
        if self._forms is not None:
            return self._forms
        A = self.algebra
        gens = []
        for n, d in self.module.generators:
            values = {s: tangent_apply(self.anchor[n], A.symbol(s))
                      for s in A.symbol_names()}
            values = {s: v for s, v in values.items() if not v.is_zero()}
            gens.append(FormGen(gamma_name(n), -d - 1, values, d))
        MA = MixedAlgebra(A, gens)
        for j, dj in self.module.generators:
            image = MA.zero()
            for i, _ in self.module.generators:
                di = self.module.differential.get(i)
                if di is None:
                    continue
                b = di.coefficient(j)
                if b.is_zero():
                    continue
                sign = Scalar.of((-1) ** ((dj + 1) % 2))
                image = image + MA.from_alg(b * sign) * MA.form_gen(gamma_name(i))
            if not image.is_zero():
                MA.partial_on_gens[gamma_name(j)] = image
        self._forms = MA
        return MA

    def pullback_form(self, elem: MixedElement) -> MixedElement:
        """The induced map of mixed algebras DR(A) -> forms(); substitutes
        each one-form generator dv by sum_i gamma_i r_vi where
        anchor(l_i) = sum_v r_vi v."""
        MA = self.forms()
        A = self.algebra
        images: Dict[str, MixedElement] = {}
        for vname, _ in self.tangent.generators:
            img = MA.zero()
            for n, _ in self.module.generators:
                r = self.anchor[n].coefficient(vname)
                if not r.is_zero():
                    img = img + MA.form_gen(gamma_name(n)) * MA.from_alg(r)
            images[form_name(vname[1:])] = img
        out = MA.zero()
        for (mono, fmono), coeff in elem.terms.items():
            piece = MA.from_alg(AlgElement(A, {mono: coeff}))
            for g in fmono:
                piece = piece * images[g]
            out = out + piece
        return out

    def pullback_series(self, series: TSeriesForm) -> TSeriesForm:
        return TSeriesForm(self.forms(), series.weight, series.shift,
                           [self.pullback_form(c) for c in series.coefficients],
                           truncation=series.truncation)

    def contract(self, form: MixedElement, elem: ModuleElement) -> MixedElement:
        """Interior product of a forms() element against an L-element.

        A-linear in the vector slot (coefficients multiply from the left).
        """
        MA = self.forms()
        out = MA.zero()
        for n, coeff in elem.coords.items():
            deg = self.module.gen_degree[n]
            piece = interior_product(form, gamma_name(n), deg + 1)
            if not piece.is_zero():
                out = out + MA.from_alg(coeff) * piece
        return out

    def evaluate_two_form(self, form: MixedElement, u: ModuleElement,
                          v: ModuleElement) -> AlgElement:
        """Weight-2 evaluation: contract v first, then u, take the weight-0 part."""
        inner = self.contract(self.contract(form, v), u)
        return inner.form_coefficient(())

    # -- fiber conditions -----------------------------------------------------------

    def is_purely_derived(self, points: Sequence[ClassicalPoint]) -> bool:
        """Fiber cohomology of L vanishes in all degrees <= 0 at each point."""
        for pt in points:
            dims = self.module.fiber_complex(pt).cohomology_dims()
            if any(k <= 0 and v for k, v in dims.items()):
                return False
        return True

    def localize(self, denominators: Sequence[Poly]) -> "Distribution":
        A = self.algebra
        new = DgAlgebra(A.base_vars, A.generators,
                        dict(A.differential),
                        denominators=tuple(A.denominators) + tuple(denominators))
        T = tangent_complex(new)
        module = FreeDgModule(new, self.module.generators, check=False)
        for n, val in self.module.differential.items():
            module.differential[n] = ModuleElement(
                module, {m: c.transport(new) for m, c in val.coords.items()})
        module._validate()
        anchor = {n: ModuleElement(T, {m: c.transport(new)
                                       for m, c in val.coords.items()})
                  for n, val in self.anchor.items()}
        return Distribution(new, T, module, anchor, strict=self.strict,
                            name=self.name)


# ---------------------------------------------------------------------------
# Strict distributions from sub-bundles
# ---------------------------------------------------------------------------

def _rotations(tangent: FreeDgModule, columns: Dict[int, List[List[Scalar]]]):
    """Per degree: (selected matrix, completed basis, inverse of completion)."""
    basis = tangent.basis_by_degree()
    out = {}
    for deg, cols in columns.items():
        names = basis.get(deg, [])
        if not cols:
            continue
        S = Matrix.from_columns(cols, len(names))
        if rank(S) != S.cols:
            raise ClosureViolation(f"selected columns in degree {deg} are dependent", [])
        full = complete_to_basis(S)
        out[deg] = (S, full, inverse(full))
    return out


def _express_in_selection(elem: ModuleElement, rotations, tangent: FreeDgModule):
    """Coordinates of a tangent element in the rotated frame.

    Returns (selected coordinates by (degree, index), complement witness) --
    the witness is a nonzero dict when the element leaves the selected span.
    """
    A = tangent.algebra
    basis = tangent.basis_by_degree()
    selected: Dict[tuple, AlgElement] = {}
    witness: Dict[str, AlgElement] = {}
    by_degree: Dict[int, Dict[str, AlgElement]] = {}
    for n, c in elem.coords.items():
        by_degree.setdefault(tangent.gen_degree[n], {})[n] = c
    for deg, coords in by_degree.items():
        names = basis[deg]
        vec = [coords.get(n, A.zero()) for n in names]
        rot = rotations.get(deg)
        if rot is None:
            for n, c in coords.items():
                if not c.is_zero():
                    witness[n] = c
            continue
        S, full, inv = rot
        m = S.cols
        for r in range(full.cols):
            acc = A.zero()
            for c_idx in range(len(names)):
                entry = inv.entries[r][c_idx]
                if not entry.is_zero():
                    acc = acc + vec[c_idx] * entry
            if acc.is_zero():
                continue
            if r < m:
                selected[(deg, r)] = acc
            else:
                witness[f"degree {deg} complement {r - m}"] = acc
    return selected, witness


def from_subbundle(A: DgAlgebra, tangent: FreeDgModule,
                   selection: Mapping[int, Sequence[Tuple[str, Sequence]]],
                   name: str = "L") -> Distribution:
    """A strict distribution from constant sub-bundles of the tangent frame.

    ``selection`` maps degree -> list of (generator name, column of Scalars
    over that degree's tangent basis). Both d-closure and bracket-closure of
    the generated submodule are verified; violations raise with witnesses.
    """
    columns = {deg: [ [Scalar.of(x) for x in col] for _, col in items]
               for deg, items in selection.items()}
    names_by_degree = {deg: [n for n, _ in items] for deg, items in selection.items()}
    rotations = _rotations(tangent, columns)

    gens = []
    anchor: Dict[str, ModuleElement] = {}
    tangent_basis = tangent.basis_by_degree()
    index_to_name: Dict[tuple, str] = {}
    for deg in sorted(selection):
        for idx, (gname, col) in enumerate(selection[deg]):
            gens.append((gname, deg))
            index_to_name[(deg, idx)] = gname
            coords = {tn: A.scalar(c) for tn, c in zip(tangent_basis[deg], col)}
            anchor[gname] = ModuleElement(tangent, coords)

    module = FreeDgModule(A, gens, check=False)
    # d-closure: d_T(anchor(g)) must lie in the selected span
    for gname, deg in gens:
        image = anchor[gname].differentiate()
        selected, witness = _express_in_selection(image, rotations, tangent)
        if witness:
            raise ClosureViolation(
                f"d-closure fails for {gname}: d(anchor) leaves the selection",
                witness)
        coords = {index_to_name[key]: c for key, c in selected.items()}
        if coords:
            module.differential[gname] = ModuleElement(module, coords)
    module._validate()

    # bracket-closure: constant frames have vanishing pairwise brackets, but
    # verify rather than assume
    for g1, _ in gens:
        for g2, _ in gens:
            br = tangent_bracket(anchor[g1], anchor[g2])
            if br.is_zero():
                continue
            selected, witness = _express_in_selection(br, rotations, tangent)
            if witness:
                raise ClosureViolation(
                    f"bracket-closure fails for [{g1}, {g2}]", witness)

    dist = Distribution(A, tangent, module, anchor, strict=True, name=name)
    defect = dist.check_chain_anchor()
    if defect:
        raise ClosureViolation("anchor fails to be a chain map", defect)
    return dist


def full_distribution(A: DgAlgebra, name: str = "T") -> Distribution:
    """The distribution given by the whole tangent complex."""
    T = tangent_complex(A)
    selection = {}
    for deg, names in T.basis_by_degree().items():
        cols = []
        for k, n in enumerate(names):
            col = [Scalar.one() if j == k else Scalar.zero()
                   for j in range(len(names))]
            cols.append((f"t_{n}", col))
        selection[deg] = cols
    return from_subbundle(A, T, selection, name=name)


# ---------------------------------------------------------------------------
# Surjective replacements and the homotopy kernel
# ---------------------------------------------------------------------------

class Replacement:
    """A surjective replacement: enlarged distribution, inclusion, section."""

    def __init__(self, distribution: Distribution, inclusion: ModuleMap,
                 section: Dict[str, ModuleElement], added: List[Tuple[str, str, str]]):
        self.distribution = distribution
        self.inclusion = inclusion
        self.section = section
        self.added = added  # (covered tangent gen, pair source, pair partner)


def _constant_anchor_matrix(dist: Distribution, degree: int) -> Tuple[Matrix, List[str]]:
    names = dist.tangent.basis_by_degree().get(degree, [])
    lgens = [n for n, d in dist.module.generators if d == degree]
    mat = Matrix(len(names), len(lgens))
    for j, ln in enumerate(lgens):
        for i, tn in enumerate(names):
            c = dist.anchor[ln].coefficient(tn)
            p = c.poly_part()
            mat.entries[i][j] = p.constant_term()
    return mat, lgens


def surjective_replacement(dist: Distribution, style: str = "plain") -> Replacement:
    """Adjoin contractible pairs covering the tangent generators.

    style="plain": d(p) = p', anchor(p') = d_T(anchor p). Matches the
    hands-on replacement used for rank bookkeeping.

    style="cone": d(p) = p' + section-lift of d_T(anchor p), anchor(p') = 0.
    The anchors of the enlarged frame are then coordinate generators and
    zeros, so the frame stays flat and the weight side exists; Lagrangian
    verification routes through this style.
    """
    if style not in ("plain", "cone"):
        raise ValueError(f"unknown replacement style {style!r}")
    A = dist.algebra
    T = dist.tangent
    old_gens = list(dist.module.generators)

    # pad a complement of the constant column span of the anchor, one
    # contractible pair per missing direction
    from .linalg import solve as _solve
    added: List[Tuple[str, str, str]] = []
    solves: Dict[str, List[Tuple[List[str], Matrix]]] = {}
    section_plan: Dict[str, List[Tuple[str, Scalar]]] = {}
    for deg in T.degrees():
        names = T.basis_by_degree()[deg]
        mat, lgens = _constant_anchor_matrix(dist, deg)
        if lgens and rank(mat) != len(lgens):
            raise ClosureViolation(
                f"constant anchor columns in degree {deg} are dependent", {})
        full = complete_to_basis(mat) if lgens else Matrix.identity(len(names))
        pad_cols = [full.column(j) for j in range(len(lgens), full.cols)]
        pad_names = []
        for col in pad_cols:
            idx = next(i for i, v in enumerate(col) if not v.is_zero())
            tn = names[idx]
            pad_names.append((tn, f"p_{tn}", f"q_{tn}"))
        added.extend(pad_names)
        # every tangent generator resolves through (anchor columns | pads)
        inv = inverse(full)
        for i, tn in enumerate(names):
            plan = []
            for r in range(full.cols):
                c = inv.entries[r][i]
                if c.is_zero():
                    continue
                owner = lgens[r] if r < len(lgens) else pad_names[r - len(lgens)][1]
                plan.append((owner, c))
            section_plan[tn] = plan

    new_gens = old_gens + [(p, T.gen_degree[tn]) for tn, p, _ in added]
    new_gens += [(q, T.gen_degree[tn] + 1) for tn, _, q in added]
    module = FreeDgModule(A, new_gens, check=False)
    anchor: Dict[str, ModuleElement] = {n: dist.anchor[n] for n, _ in old_gens}
    for tn, p, q in added:
        anchor[p] = T.gen(tn)
        anchor[q] = T.gen(tn).differentiate() if style == "plain" else T.zero()

    section: Dict[str, ModuleElement] = {}
    for tn, _ in T.generators:
        section[tn] = ModuleElement(
            module, {owner: A.scalar(c) for owner, c in section_plan[tn]})

    def lift(vec: ModuleElement) -> ModuleElement:
        out = module.zero()
        for tn, c in vec.coords.items():
            out = out + section[tn].scale(c)
        return out

    for n, _ in old_gens:
        val = dist.module.differential.get(n)
        if val is not None:
            module.differential[n] = ModuleElement(module, dict(val.coords))
    # the pair partners' differentials reference the pair sources' ones, so
    # fill all sources first
    for tn, p, q in added:
        dv = T.gen(tn).differentiate()
        if style == "plain":
            module.differential[p] = module.gen(q)
        else:
            module.differential[p] = module.gen(q) + lift(dv)
    if style == "cone":
        for tn, p, q in added:
            dv = T.gen(tn).differentiate()
            ddq = -(lift(dv).differentiate())
            if not ddq.is_zero():
                module.differential[q] = ddq
    module._validate()

    enlarged = Distribution(A, T, module, anchor, strict=False,
                            name=f"{dist.name}~")
    defect = enlarged.check_chain_anchor()
    if defect:
        raise ClosureViolation("replacement anchor is not a chain map", defect)
    inclusion = ModuleMap(dist.module, module,
                          {n: module.gen(n) for n, _ in old_gens},
                          name="inclusion")
    return Replacement(enlarged, inclusion, section, added)


def homotopy_kernel(dist: Distribution, replacement: Replacement | None = None):
    """Strict kernel of the cone replacement's anchor, with its embedding.

    The replacement splits as kernel + section image: the kernel is spanned by
    the nonzero elements l - section(anchor(l)) over the enlarged generators.
    Their differentials are re-expressed through the constant rotation onto
    (kernel frame | section frame); any section component would mean the
    anchor is not a chain map.
    """
    rep = replacement or surjective_replacement(dist, style="cone")
    big = rep.distribution
    A = big.algebra

    def project(elem: ModuleElement) -> ModuleElement:
        out = elem
        for tn, c in rep.distribution.anchor_map().apply(elem).coords.items():
            out = out - rep.section[tn].scale(c)
        return out

    candidates: List[Tuple[str, ModuleElement]] = []
    for n, _ in big.module.generators:
        k = project(big.module.gen(n))
        if not k.is_zero():
            candidates.append((f"k_{n}", k))

    kgens = [(kn, vec.degree()) for kn, vec in candidates]
    kernel = FreeDgModule(A, kgens, check=False)
    embedding_images = {kn: vec for kn, vec in candidates}

    # adapted constant basis per degree: kernel frame then section frame
    basis = big.module.basis_by_degree()
    adapted: Dict[int, Tuple[List[str], Matrix, List[Tuple[str, str]]]] = {}
    for deg, names in basis.items():
        cols: List[List[Scalar]] = []
        labels: List[Tuple[str, str]] = []
        for kn, vec in candidates:
            if vec.degree() != deg:
                continue
            cvec = vec.constant_vector(names)
            if cvec is None:
                raise ClosureViolation(
                    f"kernel frame vector {kn} is not constant", {})
            cols.append(cvec)
            labels.append(("k", kn))
        for tn, _ in big.tangent.generators:
            if big.tangent.gen_degree[tn] != deg:
                continue
            svec = rep.section[tn].constant_vector(names)
            if svec is None:
                raise ClosureViolation("section frame is not constant", {})
            cols.append(svec)
            labels.append(("s", tn))
        if not cols:
            continue
        mat = Matrix.from_columns(cols, len(names))
        if mat.cols != len(names) or rank(mat) != mat.cols:
            raise ClosureViolation(
                f"adapted frame in degree {deg} is not a basis", {})
        adapted[deg] = (names, inverse(mat), labels)

    for kn, vec in candidates:
        image = vec.differentiate()
        if image.is_zero():
            continue
        deg = image.degree()
        names, inv, labels = adapted[deg]
        coords_vec = [image.coefficient(n) for n in names]
        coords: Dict[str, AlgElement] = {}
        for r, (kind, label) in enumerate(labels):
            acc = A.zero()
            for c_idx in range(len(names)):
                entry = inv.entries[r][c_idx]
                if not entry.is_zero():
                    acc = acc + coords_vec[c_idx] * entry
            if acc.is_zero():
                continue
            if kind == "s":
                raise ClosureViolation(
                    f"kernel differential of {kn} leaves the kernel",
                    {label: acc})
            coords[label] = acc
        if coords:
            kernel.differential[kn] = ModuleElement(kernel, coords)
    kernel._validate()
    embedding = ModuleMap(kernel, big.module, embedding_images,
                          name="kernel embedding")
    return kernel, embedding, rep


# ---------------------------------------------------------------------------
# Fiber-cohomology conditions
# ---------------------------------------------------------------------------

class FoliationReport:
    """Necessary fiberwise condition for a locally-split presentation.

    PASS means the anchor is injective on fiber cohomology in every degree at
    the point; this is necessary but certifies sufficiency only when the
    distribution is declared as a weight-1 quotient over a model minimal at
    the point.
    """

    def __init__(self, point: ClassicalPoint, injective_by_degree: Dict[int, bool],
                 witness_degree: int | None, certified: bool):
        self.point = point
        self.injective_by_degree = injective_by_degree
        self.witness_degree = witness_degree
        self.certified = certified

    @property
    def passed(self) -> bool:
        return all(self.injective_by_degree.values())

    @property
    def level(self) -> str:
        if not self.passed:
            return "FAIL"
        return "PASS-certified" if self.certified else "PASS-necessary"

    def to_dict(self) -> dict:
        return {
            "point": self.point.name,
            "verdict": self.level,
            "injective_by_degree": {str(k): v for k, v in
                                    sorted(self.injective_by_degree.items())},
            "witness_degree": self.witness_degree,
        }


def foliation_obstruction(dist: Distribution, point: ClassicalPoint,
                          declared_quotient: bool = False) -> FoliationReport:
    """Injectivity of the anchor on fiber cohomology at a point."""
    from .dga import is_minimal_at
    cm = dist.anchor_map().fiber_chain_map(point)
    degrees = set(cm.source.spaces) | set(cm.target.spaces)
    verdicts = {}
    witness = None
    for k in sorted(degrees):
        ok = cm.induced_injective(k)
        verdicts[k] = ok
        if not ok and witness is None:
            witness = k
    certified = (declared_quotient and dist.strict
                 and is_minimal_at(dist.algebra, point))
    return FoliationReport(point, verdicts, witness, certified)


def pullback(dist: Distribution, surjection=None,
             denominators: Sequence[Poly] = ()) -> Distribution:
    """Base change along a localization and/or a minimization surjection.

    Along a surjection the distribution must not touch eliminated symbols:
    anchors may not have components on eliminated tangent generators, and all
    coefficients must survive the quotient. Interacting eliminations would
    need honest ring localization, which is out of scope here.
    """
    if surjection is None:
        return dist.localize(denominators) if denominators else dist
    B = surjection.target
    if denominators:
        B = DgAlgebra(B.base_vars, B.generators, dict(B.differential),
                      denominators=tuple(B.denominators) + tuple(denominators))
    T_new = tangent_complex(B)
    kept = {n for n, _ in T_new.generators}
    module = FreeDgModule(B, dist.module.generators, check=False)
    anchor: Dict[str, ModuleElement] = {}
    for n, _ in dist.module.generators:
        coords = {}
        for tn, c in dist.anchor[n].coords.items():
            image = surjection.apply_element(c)
            if tn not in kept:
                if not image.is_zero():
                    raise ClosureViolation(
                        f"anchor of {n} touches the eliminated generator {tn}", {tn: c})
                continue
            if not image.is_zero():
                coords[tn] = image
        anchor[n] = ModuleElement(T_new, coords)
    for n, val in dist.module.differential.items():
        coords = {m: surjection.apply_element(c) for m, c in val.coords.items()}
        module.differential[n] = ModuleElement(module, coords)
    module._validate()
    out = Distribution(B, T_new, module, anchor, strict=dist.strict, name=dist.name)
    defect = out.check_chain_anchor()
    if defect:
        raise ClosureViolation("pulled-back anchor is not a chain map", defect)
    return out


# ---------------------------------------------------------------------------
# Brackets from mixed data
# ---------------------------------------------------------------------------

class LieBracket:
    """Bracket on a distribution from anchor, twist, and a flat frame.

    [u, v] = nabla_{rho(u)} v - (-1)^(|u||v|) nabla_{rho(v)} u + twist(u, v),
    where nabla kills the declared frame and the twist is the structure-
    constant table on it.
    """

    def __init__(self, dist: Distribution,
                 twist: Mapping[Tuple[str, str], ModuleElement] | None = None,
                 frame: Mapping[str, ModuleElement] | None = None):
        self.dist = dist
        self.twist = dict(twist or {})
        if frame is None:
            frame = {n: dist.module.gen(n) for n, _ in dist.module.generators}
        self.frame = dict(frame)
        self._frame_inverse = self._invert_frame()

    def _invert_frame(self):
        module = self.dist.module
        basis = module.basis_by_degree()
        out = {}
        for deg, names in basis.items():
            cols = []
            fnames = [n for n in self.frame if self.frame[n].degree() == deg]
            for fn in fnames:
                vec = self.frame[fn].constant_vector(names)
                if vec is None:
                    raise ValueError("flat frame must have constant coordinates")
                cols.append(vec)
            if len(cols) != len(names):
                raise ValueError(f"frame does not span degree {deg}")
            mat = Matrix.from_columns(cols, len(names))
            out[deg] = (names, fnames, inverse(mat))
        return out

    def _frame_coordinates(self, elem: ModuleElement) -> Dict[str, AlgElement]:
        """Coordinates of an element in the declared frame."""
        A = self.dist.algebra
        out: Dict[str, AlgElement] = {}
        by_degree: Dict[int, Dict[str, AlgElement]] = {}
        for n, c in elem.coords.items():
            by_degree.setdefault(self.dist.module.gen_degree[n], {})[n] = c
        for deg, coords in by_degree.items():
            names, fnames, inv = self._frame_inverse[deg]
            vec = [coords.get(n, A.zero()) for n in names]
            for r, fn in enumerate(fnames):
                acc = A.zero()
                for c_idx in range(len(names)):
                    entry = inv.entries[r][c_idx]
                    if not entry.is_zero():
                        acc = acc + vec[c_idx] * entry
                if not acc.is_zero():
                    out[fn] = out.get(fn, A.zero()) + acc
        return out

    def _nabla(self, direction: ModuleElement, target: ModuleElement) -> ModuleElement:
        """Flat connection: derivative of frame coordinates along the anchor."""
        module = self.dist.module
        out = module.zero()
        coords = self._frame_coordinates(target)
        for fn, a in coords.items():
            da = tangent_apply(direction, a)
            if not da.is_zero():
                out = out + self.frame[fn].scale(da)
        return out

    def of(self, u: ModuleElement, v: ModuleElement) -> ModuleElement:
        rho = self.dist.anchor_map()
        du = u.degree() if not u.is_zero() else 0
        dv = v.degree() if not v.is_zero() else 0
        sign = Scalar.of((-1) ** ((du * dv) % 2))
        out = self._nabla(rho.apply(u), v) - self._nabla(rho.apply(v), u).scale(sign)
        cu = self._frame_coordinates(u)
        cv = self._frame_coordinates(v)
        for fu, a in cu.items():
            for fv, b in cv.items():
                t = self.twist.get((fu, fv))
                if t is None or t.is_zero():
                    continue
                # A-bilinear extension over the frame; coefficients are
                # degree 0 in every instance in scope
                out = out + t.scale(a * b)
        return out

    def verify(self) -> Dict[str, bool]:
        """Anchor is a Lie map, graded antisymmetry, Jacobi on the frame."""
        rho = self.dist.anchor_map()
        frame = list(self.frame.values())
        lie_map = True
        antisym = True
        jacobi = True
        for u in frame:
            for v in frame:
                br = self.of(u, v)
                if not (tangent_bracket(rho.apply(u), rho.apply(v))
                        - rho.apply(br)).is_zero():
                    lie_map = False
                sgn = Scalar.of((-1) ** ((u.degree() * v.degree()) % 2))
                if not (br + self.of(v, u).scale(sgn)).is_zero():
                    antisym = False
        for a in frame:
            for b in frame:
                for c in frame:
                    da, db, dc = a.degree(), b.degree(), c.degree()
                    total = self.of(self.of(a, b), c).scale(
                        Scalar.of((-1) ** ((da * dc) % 2)))
                    total = total + self.of(self.of(b, c), a).scale(
                        Scalar.of((-1) ** ((db * da) % 2)))
                    total = total + self.of(self.of(c, a), b).scale(
                        Scalar.of((-1) ** ((dc * db) % 2)))
                    if not total.is_zero():
                        jacobi = False
        return {"anchor_lie_map": lie_map, "antisymmetric": antisym,
                "jacobi": jacobi}


def bracket_from_mixed(dist: Distribution,
                       twist: Mapping[Tuple[str, str], ModuleElement] | None = None,
                       frame: Mapping[str, ModuleElement] | None = None) -> LieBracket:
    """Assemble and validate the bracket from anchor, twist, and connection."""
    bracket = LieBracket(dist, twist, frame)
    report = bracket.verify()
    if not all(report.values()):
        failing = [k for k, v in report.items() if not v]
        raise ClosureViolation(f"bracket axioms fail: {failing}", report)
    return bracket
