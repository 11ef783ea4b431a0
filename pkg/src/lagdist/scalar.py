"""Exact arithmetic over the Gaussian rationals Q(i), and multivariate polynomials.

Every symbolic check in the engine runs over this field with zero tolerance;
floating point is confined to the numeric fiber module.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class Scalar:
    """An element a + b*i of Q(i), with exact rational components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def of(value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        return Scalar(Fraction(value))

    @staticmethod
    def zero() -> "Scalar":
        return _ZERO

    @staticmethod
    def one() -> "Scalar":
        return _ONE

    @staticmethod
    def i() -> "Scalar":
        return _I

    # -- field operations --------------------------------------------------

    def __add__(self, other) -> "Scalar":
        other = Scalar.of(other)
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __sub__(self, other) -> "Scalar":
        other = Scalar.of(other)
        return Scalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "Scalar":
        return Scalar.of(other) - self

    def __mul__(self, other) -> "Scalar":
        other = Scalar.of(other)
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        other = Scalar.of(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Scalar")
        return Scalar(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other) -> "Scalar":
        return Scalar.of(other) / self

    def __pow__(self, exponent: int) -> "Scalar":
        if exponent < 0:
            return _ONE / (self ** (-exponent))
        result = _ONE
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def inverse(self) -> "Scalar":
        return _ONE / self

    # -- predicates and hashing --------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if self.im == 0:
            return _frac_str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{_frac_str(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        imag = abs(self.im)
        istr = "i" if imag == 1 else f"{_frac_str(imag)}*i"
        return f"{_frac_str(self.re)}{sign}{istr}"


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


_ZERO = Scalar(0)
_ONE = Scalar(1)
_I = Scalar(0, 1)


class Poly:
    """A multivariate polynomial over Q(i).

    Terms map exponent tuples (aligned with ``variables``) to nonzero Scalars.
    The printed form orders terms graded-lexicographically, which keeps every
    serialized artifact deterministic.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Iterable[str], terms: Mapping[tuple, Scalar]):
        vs = tuple(variables)
        acc: dict = {}
        for expo, coeff in terms.items():
            coeff = Scalar.of(coeff)
            expo = tuple(expo)
            if len(expo) != len(vs):
                raise ValueError("exponent length does not match variable count")
            acc[expo] = acc.get(expo, _ZERO) + coeff
        clean = {e: c for e, c in acc.items() if not c.is_zero()}
        object.__setattr__(self, "variables", vs)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value, variables: Iterable[str] = ()) -> "Poly":
        vs = tuple(variables)
        c = Scalar.of(value)
        if c.is_zero():
            return Poly(vs, {})
        return Poly(vs, {(0,) * len(vs): c})

    @staticmethod
    def variable(name: str, variables: Iterable[str] | None = None) -> "Poly":
        vs = tuple(variables) if variables is not None else (name,)
        if name not in vs:
            raise ValueError(f"variable {name!r} not among {vs}")
        expo = tuple(1 if v == name else 0 for v in vs)
        return Poly(vs, {expo: _ONE})

    @staticmethod
    def zero(variables: Iterable[str] = ()) -> "Poly":
        return Poly(variables, {})

    # -- alignment ---------------------------------------------------------

    def aligned_to(self, variables: tuple) -> "Poly":
        """Re-express over a variable tuple that must contain self's variables."""
        if variables == self.variables:
            return self
        index = {v: variables.index(v) for v in self.variables}
        terms = {}
        for expo, coeff in self.terms.items():
            new = [0] * len(variables)
            for v, e in zip(self.variables, expo):
                new[index[v]] = e
            terms[tuple(new)] = coeff
        return Poly(variables, terms)

    def _common(self, other: "Poly") -> tuple:
        if self.variables == other.variables:
            return self.variables
        merged = list(self.variables)
        for v in other.variables:
            if v not in merged:
                merged.append(v)
        return tuple(merged)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction, Scalar)):
            other = Poly.constant(other, self.variables)
        vs = self._common(other)
        a, b = self.aligned_to(vs), other.aligned_to(vs)
        terms = dict(a.terms)
        for expo, coeff in b.terms.items():
            s = terms.get(expo, _ZERO) + coeff
            if s.is_zero():
                terms.pop(expo, None)
            else:
                terms[expo] = s
        return Poly(vs, terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction, Scalar)):
            other = Poly.constant(other, self.variables)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return Poly.constant(other, self.variables) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction, Scalar)):
            c = Scalar.of(other)
            return Poly(self.variables, {e: k * c for e, k in self.terms.items()})
        vs = self._common(other)
        a, b = self.aligned_to(vs), other.aligned_to(vs)
        terms: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                expo = tuple(x + y for x, y in zip(e1, e2))
                s = terms.get(expo, _ZERO) + c1 * c2
                if s.is_zero():
                    terms.pop(expo, None)
                else:
                    terms[expo] = s
        return Poly(vs, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("negative polynomial power")
        result = Poly.constant(1, self.variables)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- calculus and evaluation --------------------------------------------

    def derivative(self, var: str) -> "Poly":
        if var not in self.variables:
            return Poly.zero(self.variables)
        idx = self.variables.index(var)
        terms = {}
        for expo, coeff in self.terms.items():
            e = expo[idx]
            if e == 0:
                continue
            new = list(expo)
            new[idx] = e - 1
            terms[tuple(new)] = coeff * e
        return Poly(self.variables, terms)

    def eval(self, assignment: Mapping[str, Scalar]) -> Scalar:
        for v in self.variables:
            if v not in assignment and any(
                e[self.variables.index(v)] for e in self.terms
            ):
                raise KeyError(f"no assignment for variable {v!r}")
        total = _ZERO
        for expo, coeff in self.terms.items():
            value = coeff
            for v, e in zip(self.variables, expo):
                if e:
                    value = value * (Scalar.of(assignment[v]) ** e)
            total = total + value
        return total

    def substitute(self, var: str, replacement: "Poly") -> "Poly":
        """Substitute a polynomial for one variable (exact)."""
        if var not in self.variables:
            return self
        idx = self.variables.index(var)
        rest = tuple(v for v in self.variables if v != var)
        result = Poly.zero(rest)
        for expo, coeff in self.terms.items():
            part = Poly.constant(coeff, rest)
            for v, e in zip(self.variables, expo):
                if v == var:
                    continue
                if e:
                    part = part * Poly.variable(v, rest) ** e
            if expo[idx]:
                part = part * replacement ** expo[idx]
            result = result + part
        return result

    def drop_variable(self, var: str) -> "Poly":
        """Remove an unused variable from the tuple; error if it occurs."""
        if var not in self.variables:
            return self
        idx = self.variables.index(var)
        if any(e[idx] for e in self.terms):
            raise ValueError(f"variable {var!r} still occurs")
        rest = tuple(v for v in self.variables if v != var)
        return Poly(rest, {tuple(e for j, e in enumerate(expo) if j != idx): c
                           for expo, c in self.terms.items()})

    def conjugate(self) -> "Poly":
        return Poly(self.variables, {e: c.conjugate() for e, c in self.terms.items()})

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in expo) for expo in self.terms)

    def constant_value(self) -> Scalar:
        zero_expo = (0,) * len(self.variables)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(zero_expo, _ZERO)

    def constant_term(self) -> Scalar:
        return self.terms.get((0,) * len(self.variables), _ZERO)

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def monomials(self):
        """Exponent tuples in descending grlex order."""
        return sorted(self.terms, key=lambda e: (sum(e), e), reverse=True)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Scalar)):
            other = Poly.constant(other, self.variables)
        if not isinstance(other, Poly):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        vs = self.variables
        key = []
        for expo in sorted(self.terms):
            reduced = tuple((vs[j], e) for j, e in enumerate(expo) if e)
            key.append((reduced, self.terms[expo]))
        return hash(tuple(key))

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for expo in self.monomials():
            coeff = self.terms[expo]
            factors = [
                v if e == 1 else f"{v}^{e}"
                for v, e in zip(self.variables, expo)
                if e
            ]
            mono = "*".join(factors)
            cs = str(coeff)
            if mono:
                if cs == "1":
                    term = mono
                elif cs == "-1":
                    term = f"-{mono}"
                elif coeff.im != 0 and coeff.re != 0:
                    term = f"({cs})*{mono}"
                else:
                    term = f"{cs}*{mono}"
            else:
                term = cs if (coeff.im == 0 or coeff.re == 0) else f"({cs})"
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += term if term.startswith("-") else "+" + term
        return out
