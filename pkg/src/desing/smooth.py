"""Jacobian matrices, minor ideals, the smoothing ideal, and the search for
the data (f, M, N, d') that seeds the desingularization pipeline.

The base ring is k[x] localized at (x); localization only shows up through
unit tests on constant terms, so all ideal computations happen in k[x, Y].
"""

import itertools
from dataclasses import dataclass

from .errors import (DomainError, PrecisionError, ResourceError,
                     StructuralError)
from .groebner import (DEGREVLEX, IdealPresentation, buchberger, ideal_member,
                       ideal_quotient)
from .poly import Polynomial
from .series import TruncatedSeries

DEFAULT_SUBSET_BUDGET = 500
MAX_SUBSET_SIZE = 4


# ---------------------------------------------------------------------------
# polynomial matrices

def matrix_mul(A, B):
    rows, inner, cols = len(A), len(B), len(B[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = A[i][0] * B[0][j]
            for k in range(1, inner):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def matrix_det(A):
    """Determinant by Laplace expansion along the first row."""
    n = len(A)
    if n == 0:
        raise StructuralError("determinant of an empty matrix")
    if any(len(row) != n for row in A):
        raise StructuralError("determinant of a non-square matrix")
    if n == 1:
        return A[0][0]
    sample = A[0][0]
    det = Polynomial.zero(sample.variables, sample.field)
    for j in range(n):
        if A[0][j].is_zero():
            continue
        sub = [[row[k] for k in range(n) if k != j] for row in A[1:]]
        term = A[0][j] * matrix_det(sub)
        det = det + term if j % 2 == 0 else det - term
    return det


def matrix_adjugate(A):
    """adj(A) with A·adj(A) = det(A)·Id; cofactor transpose."""
    n = len(A)
    if n == 1:
        one = Polynomial.one(A[0][0].variables, A[0][0].field)
        return [[one]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [[A[r][c] for c in range(n) if c != j]
                   for r in range(n) if r != i]
            cof = matrix_det(sub)
            adj[j][i] = cof if (i + j) % 2 == 0 else -cof
    return adj


def identity_matrix(n, variables, fld):
    one = Polynomial.one(variables, fld)
    zero = Polynomial.zero(variables, fld)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matrix_scale(A, p):
    return [[entry * p for entry in row] for row in A]


def matrix_equal(A, B):
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


# ---------------------------------------------------------------------------
# presentations

@dataclass
class AlgebraPresentation:
    """B = A[Y]/I with A = k[x]_(x), presented by generators of I."""

    base_var: str
    variables: tuple          # the algebra variables Y
    field: object
    relations: list

    def __post_init__(self):
        self.variables = tuple(self.variables)
        if self.base_var in self.variables:
            raise StructuralError("base variable clashes with algebra variables")
        ring = self.ring_variables()
        rels = []
        for f in self.relations:
            if set(f.variables) - set(ring):
                raise StructuralError(
                    f"relation uses undeclared variables: {f.variables}")
            if f.field != self.field:
                raise StructuralError("relation over the wrong field")
            g = f.embed(ring)
            if not g.is_zero():
                rels.append(g)
        self.relations = rels

    def ring_variables(self):
        return (self.base_var,) + self.variables

    def ideal(self):
        return IdealPresentation(self.ring_variables(), self.field,
                                 list(self.relations))


@dataclass
class DesingData:
    """One witness (f, M, N) with d' = x^c and the unit z, d' = v(M·N)·z."""

    subset: tuple             # indices into the relation list
    columns: tuple            # algebra-variable indices of the minor columns
    minor: Polynomial         # M
    witness: Polynomial       # N in ((f):I)
    c: int
    dprime: Polynomial        # x^c in the ambient ring
    z: TruncatedSeries
    pprime: Polynomial = None     # M·N

    def __post_init__(self):
        if self.pprime is None:
            self.pprime = self.minor * self.witness


# ---------------------------------------------------------------------------
# Jacobian data

def jacobian(relations, variables):
    """Rows indexed by relations, columns by the given variables only."""
    return [[f.derivative(v) for v in variables] for f in relations]


def minor_ideal(relations, variables, ring_variables=None, fld=None):
    """Ideal generated by all r x r minors of the Jacobian in Y."""
    r, n = len(relations), len(variables)
    if r > n:
        raise StructuralError(f"{r} rows but only {n} minor columns")
    if relations:
        ring_variables = relations[0].variables
        fld = relations[0].field
    elif ring_variables is None:
        raise StructuralError("empty system needs an explicit ring")
    jac = jacobian(relations, variables)
    gens = []
    for cols in itertools.combinations(range(n), r):
        sub = [[row[j] for j in cols] for row in jac]
        m = matrix_det(sub) if r else Polynomial.one(ring_variables, fld)
        if not m.is_zero():
            gens.append(m)
    return IdealPresentation(ring_variables, fld, gens)


def _subset_stream(count, n_vars):
    """Generator subsets in lexicographic index order, smallest size first."""
    top = min(count, n_vars, MAX_SUBSET_SIZE)
    for r in range(1, top + 1):
        for subset in itertools.combinations(range(count), r):
            yield subset


def smoothing_ideal(B, subset_budget=DEFAULT_SUBSET_BUDGET):
    """Sum over generator subsets f of ((f):I)·Δ_f, plus I itself.

    The zero ideal presents a polynomial algebra and yields the unit ideal.
    """
    ring = B.ring_variables()
    ideal = B.ideal()
    if not ideal.generators:
        return IdealPresentation(ring, B.field, [Polynomial.one(ring, B.field)])
    gens = list(ideal.generators)
    processed = 0
    for subset in _subset_stream(len(ideal.generators), len(B.variables)):
        if processed >= subset_budget:
            raise ResourceError(
                f"subset budget exhausted after {processed} subsets")
        processed += 1
        fs = [ideal.generators[i] for i in subset]
        minors = minor_ideal(fs, B.variables)
        if not minors.generators:
            continue
        quot = ideal_quotient(IdealPresentation(ring, B.field, fs), ideal)
        for q in quot.generators:
            for m in minors.generators:
                prod = q * m
                if not prod.is_zero():
                    gens.append(prod)
    return IdealPresentation(ring, B.field, gens)


def is_smooth_at_point(B, point, subset_budget=DEFAULT_SUBSET_BUDGET):
    """Jacobian criterion at a rational point given as {var: field value}."""
    ring = B.ring_variables()
    vals = [point[v] for v in ring]
    for f in B.relations:
        if not B.field.is_zero(f.evaluate(dict(zip(ring, vals)))):
            raise DomainError("point does not satisfy the relations")
    H = smoothing_ideal(B, subset_budget)
    assignment = dict(zip(ring, vals))
    return any(not B.field.is_zero(g.evaluate(assignment))
               for g in H.generators)


# ---------------------------------------------------------------------------
# the search for desingularization data

def check_morphism(B, v):
    """Every relation must vanish on the series images to precision."""
    for f in B.relations:
        img = v.eval(f)
        if not img.is_zero():
            raise DomainError(
                f"images do not satisfy relation {f} to precision "
                f"{v.precision}")


def find_desing_data(B, v, subset_budget=DEFAULT_SUBSET_BUDGET):
    """Deterministic search for the witness with minimal vanishing order c.

    Candidates are P' = M·N with M a minor of the Jacobian of a generator
    subset and N a reduced-GB element of ((f):I); P' must lie outside I and
    v(P') must not vanish to precision.  Smallest c = order(v(P')) wins,
    ties broken by search order.
    """
    check_morphism(B, v)
    ring = B.ring_variables()
    ideal = B.ideal()
    if not ideal.generators:
        # polynomial algebra: the empty system has unit minor
        return _trivial_data(B, v)
    ideal_gb = buchberger(ideal, DEGREVLEX)
    best = None
    processed = 0
    for subset in _subset_stream(len(ideal.generators), len(B.variables)):
        if processed >= subset_budget:
            break
        processed += 1
        fs = [ideal.generators[i] for i in subset]
        r = len(fs)
        jac = jacobian(fs, B.variables)
        quot = ideal_quotient(IdealPresentation(ring, B.field, fs), ideal)
        for cols in itertools.combinations(range(len(B.variables)), r):
            sub = [[row[j] for j in cols] for row in jac]
            minor = matrix_det(sub)
            if minor.is_zero():
                continue
            for witness in quot.generators:
                pprime = minor * witness
                if ideal_member(pprime, ideal_gb):
                    continue
                img = v.eval(pprime)
                c = img.order()
                if c is None:
                    continue
                if best is None or c < best[0]:
                    best = (c, subset, cols, minor, witness, pprime, img)
        if best is not None and best[0] == 0:
            break
    if best is None:
        raise DomainError(
            "smoothing ideal vanishes on the images to precision; "
            "try reduce_until_nonvanishing first")
    c, subset, cols, minor, witness, pprime, img = best
    if v.precision < 10 * c:
        raise PrecisionError(
            f"need precision >= {10 * c} for c = {c}, have {v.precision}")
    dprime = Polynomial.variable(ring, B.field, B.base_var, c) if c else \
        Polynomial.one(ring, B.field)
    xc = TruncatedSeries(
        (v.base_var,), v.field,
        {(c,): v.field.one()}, v.precision)
    z = xc.divide_exact(img)
    return DesingData(subset=tuple(subset), columns=tuple(cols), minor=minor,
                      witness=witness, c=c, dprime=dprime, z=z)


def _trivial_data(B, v):
    ring = B.ring_variables()
    one = Polynomial.one(ring, B.field)
    z = TruncatedSeries.one((v.base_var,), v.field, v.precision)
    return DesingData(subset=(), columns=(), minor=one, witness=one, c=0,
                      dprime=one, z=z)


def reduce_until_nonvanishing(B, v, cap=5,
                              subset_budget=DEFAULT_SUBSET_BUDGET):
    """Replace B by B/(smoothing ideal) while its image under v vanishes."""
    current = B
    iterations = 0
    while True:
        H = smoothing_ideal(current, subset_budget)
        if any(not v.eval(g).is_zero() for g in H.generators):
            return current
        if ideal_member(Polynomial.one(current.ring_variables(), current.field), H):
            raise DomainError("smoothing ideal is the unit ideal: "
                              "morphism image not approximable")
        if iterations >= cap:
            raise ResourceError(f"reduction cap {cap} reached")
        iterations += 1
        current = AlgebraPresentation(
            base_var=current.base_var, variables=current.variables,
            field=current.field, relations=list(H.generators))
