"""Shared instance generators for the test suite."""

import random

import pytest

from lagdist.dga import AlgElement, DgAlgebra
from lagdist.scalar import Poly, Scalar


def random_poly(rng, base_vars, max_degree=2, max_terms=3):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        expo = [0] * len(base_vars)
        for _ in range(rng.randint(0, max_degree)):
            if base_vars:
                expo[rng.randrange(len(base_vars))] += 1
        coeff = Scalar(rng.randint(-3, 3), rng.choice([0, 0, 1, -1]))
        terms[tuple(expo)] = terms.get(tuple(expo), Scalar.zero()) + coeff
    return Poly(base_vars, terms)


def _candidates_of_degree(shell, rng, degree, available):
    """A few random elements of the given degree in the partial algebra."""
    out = []
    base = shell.base_vars
    for _ in range(6):
        if degree == 0:
            out.append(shell.poly(random_poly(rng, base)))
            continue
        piece = shell.zero()
        for _ in range(rng.randint(1, 2)):
            mono_degree = 0
            factors = []
            attempts = 0
            while mono_degree > degree and attempts < 10 or not factors:
                attempts += 1
                pool = [g for g, d in available if d >= degree - mono_degree]
                if not pool:
                    break
                g = rng.choice(pool)
                factors.append(g)
                mono_degree += shell.gen_degree[g]
                if mono_degree == degree:
                    break
            if mono_degree != degree:
                continue
            term = shell.poly(random_poly(rng, base, max_degree=1))
            for g in factors:
                term = term * shell.gen(g)
            piece = piece + term
        out.append(piece)
    return [e for e in out if not e.is_zero()] + [shell.zero()]


def random_well_presented(rng: random.Random, max_vars=3, max_gens=4,
                          min_degree=-3) -> DgAlgebra:
    """A random valid dg algebra: differentials tried until d^2 = 0 holds."""
    n_vars = rng.randint(0, max_vars)
    base = tuple(f"x{i}" for i in range(n_vars))
    n_gens = rng.randint(1, max_gens)
    degrees = sorted((rng.randint(min_degree, -1) for _ in range(n_gens)),
                     reverse=True)
    gens = [(f"g{i}", d) for i, d in enumerate(degrees)]
    shell = DgAlgebra(base, gens, check=False)
    assigned = []
    for name, d in gens:
        ok = shell.zero()
        for candidate in _candidates_of_degree(shell, rng, d + 1, assigned):
            if candidate.differentiate().is_zero():
                ok = candidate
                break
        shell.differential[name] = ok
        assigned.append((name, d))
    return DgAlgebra(base, gens, dict(shell.differential))


@pytest.fixture
def rng():
    return random.Random(20240817)
