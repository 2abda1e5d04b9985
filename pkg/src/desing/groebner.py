"""Groebner bases and the ideal operations the pipeline needs.

Buchberger with the coprime and chain criteria, normal-strategy pair
selection, and deterministic tie-breaking; reduced bases are the canonical
form for ideal equality.  Module Groebner bases (position-over-term) supply
kernels of polynomial matrices via the syzygy construction.
"""

from dataclasses import dataclass, field as dc_field

from .errors import DomainError, ResourceError, StructuralError
from .poly import (DEGREVLEX, MonomialOrder, Polynomial, block_order,
                   monomial_div, monomial_divides, monomial_lcm, monomial_mul)

DEFAULT_SPAIR_BUDGET = 100000


@dataclass
class IdealPresentation:
    """Finitely generated ideal in an explicit polynomial ring."""

    variables: tuple
    field: object
    generators: list

    def __post_init__(self):
        self.variables = tuple(self.variables)
        gens = []
        for g in self.generators:
            if g.variables != self.variables or g.field != self.field:
                raise StructuralError("generator in wrong ring")
            if not g.is_zero():
                gens.append(g)
        self.generators = gens

    def ring_zero(self):
        return Polynomial.zero(self.variables, self.field)

    def ring_one(self):
        return Polynomial.one(self.variables, self.field)


@dataclass
class GroebnerBasis:
    order: MonomialOrder
    elements: list
    reduced: bool = True

    @property
    def variables(self):
        return self.elements[0].variables if self.elements else ()


# ---------------------------------------------------------------------------
# division and normal forms

def division(f, basis, order, with_quotients=False):
    """Multivariate division of f by an ordered list of polynomials.

    Returns (quotients, remainder) if requested, else the remainder.  No
    term of the remainder is divisible by any divisor's leading term.
    """
    F = f.field
    quotients = [Polynomial.zero(f.variables, F) for _ in basis] \
        if with_quotients else None
    leads = [g.leading(order) for g in basis]
    rem_terms = {}
    p = f
    while not p.is_zero():
        mono, coeff = p.leading(order)
        for i, (lm, lc) in enumerate(leads):
            if monomial_divides(lm, mono):
                factor = p.term_poly(monomial_div(mono, lm), F.div(coeff, lc))
                p = p - factor * basis[i]
                if with_quotients:
                    quotients[i] = quotients[i] + factor
                break
        else:
            rem_terms[mono] = coeff
            p = p - p.term_poly(mono, coeff)
    rem = Polynomial(f.variables, F, rem_terms)
    if with_quotients:
        return quotients, rem
    return rem


def normal_form(f, gb, order=None):
    """Remainder of f modulo a Groebner basis."""
    if isinstance(gb, GroebnerBasis):
        if order is not None and order != gb.order:
            raise StructuralError("normal form under a different order than the basis")
        order = gb.order
        basis = gb.elements
    else:
        basis = list(gb)
        order = order or DEGREVLEX
    if not basis:
        return f
    if basis[0].variables != f.variables:
        raise StructuralError("polynomial and basis live in different rings")
    return division(f, basis, order)


def s_polynomial(f, g, order):
    (mf, cf), (mg, cg) = f.leading(order), g.leading(order)
    lcm = monomial_lcm(mf, mg)
    F = f.field
    tf = f.term_poly(monomial_div(lcm, mf), F.invert(cf))
    tg = g.term_poly(monomial_div(lcm, mg), F.invert(cg))
    return tf * f - tg * g


def buchberger(ideal, order=DEGREVLEX, budget=DEFAULT_SPAIR_BUDGET):
    """Reduced Groebner basis; deterministic for fixed input."""
    if isinstance(ideal, IdealPresentation):
        gens = ideal.generators
        if not ideal.variables:
            raise StructuralError("empty ambient ring")
    else:
        gens = [g for g in ideal if not g.is_zero()]
    if not gens:
        return GroebnerBasis(order, [])
    G = [g.monic(order) for g in gens]
    leads = [g.leading(order)[0] for g in G]

    def pair_key(pair):
        i, j = pair
        return (order.key(monomial_lcm(leads[i], leads[j])), i, j)

    pairs = {(i, j) for i in range(len(G)) for j in range(i + 1, len(G))}
    done = set()
    reductions = 0
    while pairs:
        pair = min(pairs, key=pair_key)
        pairs.discard(pair)
        done.add(pair)
        i, j = pair
        lcm = monomial_lcm(leads[i], leads[j])
        if lcm == monomial_mul(leads[i], leads[j]):
            continue  # coprime leading terms
        if _chain_criterion(i, j, lcm, leads, done):
            continue
        reductions += 1
        if reductions > budget:
            raise ResourceError(f"S-pair budget {budget} exceeded")
        r = division(s_polynomial(G[i], G[j], order), G, order)
        if r.is_zero():
            continue
        r = r.monic(order)
        G.append(r)
        leads.append(r.leading(order)[0])
        k = len(G) - 1
        pairs.update((m, k) for m in range(k))
    return GroebnerBasis(order, _reduce_basis(G, order))


def _chain_criterion(i, j, lcm, leads, done):
    for k in range(len(leads)):
        if k in (i, j) or not monomial_divides(leads[k], lcm):
            continue
        p1 = (min(i, k), max(i, k))
        p2 = (min(j, k), max(j, k))
        if p1 in done and p2 in done:
            return True
    return False


def _reduce_basis(G, order):
    # minimize: drop elements whose lead is divisible by another kept lead
    leads = [g.leading(order)[0] for g in G]
    minimal = []
    for i, g in enumerate(G):
        redundant = any(
            j != i and monomial_divides(leads[j], leads[i])
            and (leads[j] != leads[i] or j < i)
            for j in range(len(G)))
        if not redundant:
            minimal.append(g)
    # tail-reduce each against the others
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        r = division(g, others, order) if others else g
        if not r.is_zero():
            reduced.append(r.monic(order))
    reduced.sort(key=lambda g: order.key(g.leading(order)[0]), reverse=True)
    return reduced


def ideal_member(f, ideal, order=DEGREVLEX):
    gb = ideal if isinstance(ideal, GroebnerBasis) else buchberger(ideal, order)
    return normal_form(f, gb).is_zero()


def ideal_equal(I, J, order=DEGREVLEX):
    a = buchberger(I, order).elements
    b = buchberger(J, order).elements
    return a == b


# ---------------------------------------------------------------------------
# elimination-based ideal operations

def _fresh_name(base, taken):
    name = base
    k = 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def eliminate(ideal, drop, order=DEGREVLEX, budget=DEFAULT_SPAIR_BUDGET):
    """Generators of I intersected with the subring without the ``drop`` vars."""
    drop = [v for v in ideal.variables if v in set(drop)]
    keep = tuple(v for v in ideal.variables if v not in set(drop))
    if not drop:
        return IdealPresentation(ideal.variables, ideal.field,
                                 buchberger(ideal, order, budget).elements)
    work_vars = tuple(drop) + keep
    work_order = block_order(len(drop), DEGREVLEX, order)
    gens = [g.embed(work_vars) for g in ideal.generators]
    gb = buchberger(gens, work_order, budget)
    out = []
    for g in gb.elements:
        if all(all(m[i] == 0 for i in range(len(drop))) for m in g.terms):
            out.append(g.restrict(keep))
    return IdealPresentation(keep, ideal.field, out)


def ideal_intersection(I, J, order=DEGREVLEX, budget=DEFAULT_SPAIR_BUDGET):
    """I ∩ J via elimination of t from t·I + (1−t)·J."""
    if I.variables != J.variables or I.field != J.field:
        raise StructuralError("ideals live in different rings")
    t = _fresh_name("t_", I.variables)
    work_vars = (t,) + I.variables
    F = I.field
    tp = Polynomial.variable(work_vars, F, t)
    onem = Polynomial.one(work_vars, F) - tp
    gens = [tp * g.embed(work_vars) for g in I.generators]
    gens += [onem * g.embed(work_vars) for g in J.generators]
    inner = IdealPresentation(work_vars, F, gens)
    elim = eliminate(inner, {t}, order, budget)
    # result already lives in the original ring variables
    return IdealPresentation(I.variables, F,
                             [g.embed(I.variables) for g in elim.generators])


def divide_exact_poly(f, g, order=DEGREVLEX):
    """Exact quotient f/g; raises if g does not divide f."""
    if g.is_zero():
        raise DomainError("division by the zero polynomial")
    quotients, rem = division(f, [g], order, with_quotients=True)
    if not rem.is_zero():
        raise DomainError("polynomial division is not exact")
    return quotients[0]


def ideal_quotient(I, J, order=DEGREVLEX, budget=DEFAULT_SPAIR_BUDGET):
    """(I : J) as the intersection of the one-generator quotients (I : h)."""
    if not J.generators:
        raise DomainError("quotient by zero ideal is the unit ideal")
    result = None
    for h in J.generators:
        inter = ideal_intersection(
            I, IdealPresentation(I.variables, I.field, [h]), order, budget)
        gens = [divide_exact_poly(g, h, order) for g in inter.generators]
        part = IdealPresentation(I.variables, I.field, gens)
        if result is None:
            result = part
        else:
            result = ideal_intersection(result, part, order, budget)
    gb = buchberger(result, order, budget)
    return IdealPresentation(I.variables, I.field, gb.elements)


def saturate(I, f, order=DEGREVLEX, budget=DEFAULT_SPAIR_BUDGET):
    """(I : f^∞) by eliminating the Rabinowitsch variable from I + (1 − w·f)."""
    if f.is_zero():
        raise DomainError("saturation by zero")
    w = _fresh_name("w_", I.variables)
    work_vars = (w,) + I.variables
    F = I.field
    wp = Polynomial.variable(work_vars, F, w)
    gens = [g.embed(work_vars) for g in I.generators]
    gens.append(Polynomial.one(work_vars, F) - wp * f.embed(work_vars))
    inner = IdealPresentation(work_vars, F, gens)
    elim = eliminate(inner, {w}, order, budget)
    return IdealPresentation(I.variables, F,
                             [g.embed(I.variables) for g in elim.generators])


def radical_member(f, I, order=DEGREVLEX, budget=DEFAULT_SPAIR_BUDGET):
    """f ∈ √I iff 1 ∈ I + (1 − w·f) in the extended ring (Rabinowitsch)."""
    w = _fresh_name("w_", I.variables)
    work_vars = (w,) + I.variables
    F = I.field
    wp = Polynomial.variable(work_vars, F, w)
    gens = [g.embed(work_vars) for g in I.generators]
    gens.append(Polynomial.one(work_vars, F) - wp * f.embed(work_vars))
    gb = buchberger(gens, block_order(1, DEGREVLEX, order), budget)
    return ideal_member(Polynomial.one(work_vars, F), gb)


# ---------------------------------------------------------------------------
# module Groebner bases (position over term) and kernels of matrices

def _vec_zero(n, variables, field):
    return tuple(Polynomial.zero(variables, field) for _ in range(n))


def vec_is_zero(v):
    return all(c.is_zero() for c in v)


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _vec_mul_term(v, variables, field, mono, coeff):
    t = Polynomial(variables, field, {mono: coeff})
    return tuple(c * t for c in v)


def vec_leading(v, order):
    """(position, monomial, coefficient) under position-over-term, position 0 largest."""
    for pos, c in enumerate(v):
        if not c.is_zero():
            mono, coeff = c.leading(order)
            return pos, mono, coeff
    raise DomainError("zero vector has no leading term")


def module_normal_form(v, basis, order):
    """Full reduction of a module element against a list of vectors."""
    if vec_is_zero(v):
        return v
    variables = v[0].variables
    field = v[0].field
    leads = [vec_leading(b, order) for b in basis]
    rem = _vec_zero(len(v), variables, field)
    p = v
    while not vec_is_zero(p):
        pos, mono, coeff = vec_leading(p, order)
        for i, (bp, bm, bc) in enumerate(leads):
            if bp == pos and monomial_divides(bm, mono):
                factor = _vec_mul_term(basis[i], variables, field,
                                       monomial_div(mono, bm), field.div(coeff, bc))
                p = vec_sub(p, factor)
                break
        else:
            term = [Polynomial.zero(variables, field)] * len(v)
            term[pos] = Polynomial(variables, field, {mono: coeff})
            rem = tuple(r + t for r, t in zip(rem, term))
            p = vec_sub(p, tuple(term))
    return rem


def _vec_monic(v, order):
    _, _, c = vec_leading(v, order)
    inv = v[0].field.invert(c)
    return tuple(comp.scale(inv) for comp in v)


def module_groebner(vectors, order=DEGREVLEX, budget=DEFAULT_SPAIR_BUDGET):
    """Groebner basis of the submodule generated by ``vectors`` (POT order)."""
    G = [_vec_monic(v, order) for v in vectors if not vec_is_zero(v)]
    if not G:
        return []
    variables = G[0][0].variables
    field = G[0][0].field
    leads = [vec_leading(g, order) for g in G]

    def pair_key(pair):
        i, j = pair
        return (leads[i][0], order.key(monomial_lcm(leads[i][1], leads[j][1])), i, j)

    pairs = {(i, j) for i in range(len(G)) for j in range(i + 1, len(G))
             if leads[i][0] == leads[j][0]}
    reductions = 0
    while pairs:
        pair = min(pairs, key=pair_key)
        pairs.discard(pair)
        i, j = pair
        _, mi, _ = leads[i]
        _, mj, _ = leads[j]
        lcm = monomial_lcm(mi, mj)
        reductions += 1
        if reductions > budget:
            raise ResourceError(f"module S-pair budget {budget} exceeded")
        si = _vec_mul_term(G[i], variables, field, monomial_div(lcm, mi), field.one())
        sj = _vec_mul_term(G[j], variables, field, monomial_div(lcm, mj), field.one())
        r = module_normal_form(vec_sub(si, sj), G, order)
        if vec_is_zero(r):
            continue
        r = _vec_monic(r, order)
        G.append(r)
        leads.append(vec_leading(r, order))
        k = len(G) - 1
        pairs.update((m, k) for m in range(k) if leads[m][0] == leads[k][0])
    return _reduce_module_basis(G, order)


def _reduce_module_basis(G, order):
    leads = [vec_leading(g, order) for g in G]
    keep = []
    for i in range(len(G)):
        pi, mi, _ = leads[i]
        redundant = False
        for j in range(len(G)):
            if j == i:
                continue
            pj, mj, _ = leads[j]
            if pj == pi and monomial_divides(mj, mi) and (mj != mi or j < i):
                redundant = True
                break
        if not redundant:
            keep.append(i)
    minimal = [G[i] for i in keep]
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        r = module_normal_form(g, others, order) if others else g
        if not vec_is_zero(r):
            reduced.append(_vec_monic(r, order))
    reduced.sort(key=lambda v: (vec_leading(v, order)[0],
                                tuple(order.key(vec_leading(v, order)[1]))))
    return reduced


@dataclass
class KernelBasis:
    """Generating set of the kernel of a polynomial matrix acting on ring^n."""

    matrix: list
    basis: list = dc_field(default_factory=list)


def kernel_basis(matrix, order=DEGREVLEX, budget=DEFAULT_SPAIR_BUDGET):
    """Generators of {v : M v = 0} via syzygies of the columns of M.

    Augment each column with a unit tag and compute a module Groebner basis
    under position-over-term with the column block dominant; basis elements
    supported entirely on the tag block project to kernel generators.
    """
    rows = [list(r) for r in matrix]
    if not rows or not rows[0]:
        raise StructuralError("empty matrix")
    r, n = len(rows), len(rows[0])
    variables = rows[0][0].variables
    field = rows[0][0].field
    for row in rows:
        if len(row) != n:
            raise StructuralError("ragged matrix")
        for entry in row:
            if entry.variables != variables or entry.field != field:
                raise StructuralError("matrix entries in different rings")
    zero = Polynomial.zero(variables, field)
    one = Polynomial.one(variables, field)
    augmented = []
    for j in range(n):
        col = [rows[i][j] for i in range(r)]
        tag = [one if k == j else zero for k in range(n)]
        augmented.append(tuple(col + tag))
    gb = module_groebner(augmented, order, budget)
    basis = []
    for v in gb:
        if all(c.is_zero() for c in v[:r]):
            basis.append(tuple(v[r:]))
    return KernelBasis(matrix=rows, basis=basis)
