"""Truncated formal power series with explicit precision tracking.

A series carries its own precision (all stored monomials have total degree
below it); binary operations take the worst case of the operand precisions,
and exact division lowers precision by the valuation of the divisor.
"""

import re
from dataclasses import dataclass

from .errors import (ConsistencyError, DivisibilityError, DomainError,
                     NonUnitError, ParseError, StructuralError)
from .poly import Polynomial, monomial_degree, parse_polynomial


class TruncatedSeries:
    __slots__ = ("variables", "field", "terms", "precision")

    def __init__(self, variables, field, terms, precision):
        if precision < 1:
            raise DomainError("precision must be positive")
        self.variables = tuple(variables)
        self.field = field
        self.precision = precision
        clean = {}
        n = len(self.variables)
        for mono, coeff in terms.items():
            if len(mono) != n:
                raise StructuralError("exponent tuple has wrong length")
            if monomial_degree(mono) < precision and not field.is_zero(coeff):
                clean[tuple(mono)] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, variables, field, precision):
        return cls(variables, field, {}, precision)

    @classmethod
    def constant(cls, variables, field, c, precision):
        return cls(variables, field, {(0,) * len(variables): c}, precision)

    @classmethod
    def one(cls, variables, field, precision):
        return cls.constant(variables, field, field.one(), precision)

    @classmethod
    def variable(cls, variables, field, name, precision):
        variables = tuple(variables)
        mono = tuple(int(v == name) for v in variables)
        if sum(mono) != 1:
            raise StructuralError(f"unknown variable {name!r}")
        return cls(variables, field, {mono: field.one()}, precision)

    @classmethod
    def from_polynomial(cls, poly, precision):
        return cls(poly.variables, poly.field, dict(poly.terms), precision)

    def to_polynomial(self):
        return Polynomial(self.variables, self.field, dict(self.terms))

    # -- structure ----------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            raise StructuralError("expected a TruncatedSeries")
        if other.variables != self.variables or other.field != self.field:
            raise StructuralError("series live in different rings")

    def is_zero(self):
        """True when every stored coefficient vanishes (i.e. zero to precision)."""
        return not self.terms

    def order(self):
        """Least total degree of a nonzero term; None means >= precision."""
        if not self.terms:
            return None
        return min(monomial_degree(m) for m in self.terms)

    def constant_coefficient(self):
        return self.terms.get((0,) * len(self.variables), self.field.zero())

    def coefficient(self, mono):
        return self.terms.get(tuple(mono), self.field.zero())

    def truncate(self, precision):
        if precision > self.precision:
            raise DomainError("cannot raise precision by truncation")
        return TruncatedSeries(self.variables, self.field, self.terms, precision)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        F = self.field
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = F.add(terms.get(m, F.zero()), c)
        return TruncatedSeries(self.variables, F, terms,
                               min(self.precision, other.precision))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        F = self.field
        return TruncatedSeries(self.variables, F,
                               {m: F.neg(c) for m, c in self.terms.items()},
                               self.precision)

    def __mul__(self, other):
        self._check(other)
        F = self.field
        prec = min(self.precision, other.precision)
        terms = {}
        for m1, c1 in self.terms.items():
            d1 = monomial_degree(m1)
            for m2, c2 in other.terms.items():
                if d1 + monomial_degree(m2) >= prec:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                prod = F.mul(c1, c2)
                if m in terms:
                    terms[m] = F.add(terms[m], prod)
                else:
                    terms[m] = prod
        return TruncatedSeries(self.variables, F, terms, prec)

    def scale(self, c):
        F = self.field
        return TruncatedSeries(self.variables, F,
                               {m: F.mul(v, c) for m, v in self.terms.items()},
                               self.precision)

    def __pow__(self, e):
        if e < 0:
            raise DomainError("negative series power")
        result = TruncatedSeries.one(self.variables, self.field, self.precision)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other):
        return (isinstance(other, TruncatedSeries)
                and self.variables == other.variables and self.field == other.field
                and self.precision == other.precision and self.terms == other.terms)

    def __hash__(self):
        return hash((self.variables, self.field, self.precision,
                     tuple(sorted(self.terms.items()))))

    # -- graded helpers -----------------------------------------------------

    def graded_parts(self):
        parts = {}
        for m, c in self.terms.items():
            parts.setdefault(monomial_degree(m), {})[m] = c
        return parts

    # -- inversion and division --------------------------------------------

    def invert(self):
        """Multiplicative inverse of a unit series, to the same precision."""
        F = self.field
        a0 = self.constant_coefficient()
        if F.is_zero(a0):
            raise NonUnitError("series has zero constant term")
        inv0 = F.invert(a0)
        zero_mono = (0,) * len(self.variables)
        parts_a = self.graded_parts()
        parts_b = {0: {zero_mono: inv0}}
        for d in range(1, self.precision):
            acc = {}
            for j in range(1, d + 1):
                aj = parts_a.get(j)
                bdj = parts_b.get(d - j)
                if not aj or not bdj:
                    continue
                for m1, c1 in aj.items():
                    for m2, c2 in bdj.items():
                        m = tuple(x + y for x, y in zip(m1, m2))
                        prod = F.mul(c1, c2)
                        acc[m] = F.add(acc.get(m, F.zero()), prod)
            level = {m: F.neg(F.mul(inv0, c)) for m, c in acc.items()
                     if not F.is_zero(c)}
            if level:
                parts_b[d] = level
        terms = {}
        for level in parts_b.values():
            terms.update(level)
        return TruncatedSeries(self.variables, F, terms, self.precision)

    def divide_exact(self, other):
        """Exact quotient q with self = other * q; precision drops by ord(other)."""
        self._check(other)
        k = other.order()
        if k is None:
            raise DivisibilityError("division by a series that is zero to precision")
        if k == 0:
            return self * other.invert()
        # factor out the valuation monomial; only a monomial times a unit is
        # supported for multivariate divisors (all the pipeline needs)
        low = [m for m in other.terms if monomial_degree(m) == k]
        if len(low) != 1:
            raise DivisibilityError("divisor valuation part is not a monomial")
        mono = low[0]
        for m in other.terms:
            if not all(a <= b for a, b in zip(mono, m)):
                raise DivisibilityError("divisor is not a monomial times a unit")
        so = self.order()
        if so is not None and so < k:
            raise DivisibilityError(
                f"dividend has order {so} < divisor order {k}")
        num = {}
        for m, c in self.terms.items():
            if not all(a <= b for a, b in zip(mono, m)):
                raise DivisibilityError("dividend not divisible by divisor valuation")
            num[tuple(a - b for a, b in zip(m, mono))] = c
        den = {tuple(a - b for a, b in zip(m, mono)): c
               for m, c in other.terms.items()}
        a = TruncatedSeries(self.variables, self.field, num, self.precision - k)
        b = TruncatedSeries(self.variables, self.field, den, other.precision - k)
        return a * b.invert()

    # -- formatting ---------------------------------------------------------

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"<series {format_series(self)}>"


def order_of(series):
    """Valuation of a truncated series; None encodes \">= precision\"."""
    return series.order()


def series_eval(poly, assignment, precision=None):
    """Evaluate a polynomial on truncated series given for each variable.

    Every variable of ``poly`` must be assigned; coefficients are coerced
    into the series field (identity, or the embedding of Q into a simple
    extension).
    """
    images = []
    for v in poly.variables:
        if v not in assignment:
            raise StructuralError(f"no series assigned to variable {v!r}")
        images.append(assignment[v])
    first = images[0] if images else None
    if first is None:
        raise StructuralError("polynomial has no variables")
    variables, field = first.variables, first.field
    prec = min(s.precision for s in images)
    if precision is not None:
        prec = min(prec, precision)
    for s in images:
        if s.variables != variables or s.field != field:
            raise StructuralError("assigned series live in different rings")
    result = TruncatedSeries.zero(variables, field, prec)
    cache = [dict() for _ in images]
    for mono, coeff in poly.terms.items():
        c = field.coerce(poly.field, coeff)
        part = TruncatedSeries.constant(variables, field, c, prec)
        for i, e in enumerate(mono):
            if e == 0:
                continue
            if e not in cache[i]:
                cache[i][e] = images[i].truncate(prec) ** e
            part = part * cache[i][e]
        result = result + part
    return result


@dataclass
class CompletionMorphism:
    """Morphism into the truncated completion, given by series images of the
    algebra variables over the base variable."""

    base_var: str
    field: object
    images: dict
    precision: int = 0

    def __post_init__(self):
        precs = []
        for name, s in self.images.items():
            if s.variables != (self.base_var,):
                raise StructuralError(
                    f"image of {name!r} must be a series in {self.base_var!r}")
            if s.field != self.field:
                raise StructuralError("image series over the wrong field")
            precs.append(s.precision)
        if not self.precision:
            if not precs:
                raise StructuralError("morphism needs at least one image")
            self.precision = min(precs)

    def base_series(self):
        return TruncatedSeries.variable((self.base_var,), self.field,
                                        self.base_var, self.precision)

    def assignment(self):
        out = {self.base_var: self.base_series()}
        for name, s in self.images.items():
            out[name] = s.truncate(min(s.precision, self.precision))
        return out

    def eval(self, poly):
        return series_eval(poly, self.assignment())


# ---------------------------------------------------------------------------
# Weierstrass preparation

@dataclass
class WeierstrassData:
    """f = unit * (x_m^p + sum z_i x_m^i) with z_i(0) = 0, to ``precision``."""

    variables: tuple
    p: int
    unit: TruncatedSeries
    zs: tuple          # z_0 .. z_{p-1}, series in the first m-1 variables
    precision: int

    def wpoly(self):
        """The monic distinguished polynomial as an m-variable series."""
        m = len(self.variables)
        terms = {(0,) * (m - 1) + (self.p,): self.unit.field.one()}
        F = self.unit.field
        for i, z in enumerate(self.zs):
            for mono, c in z.terms.items():
                full = tuple(mono) + (i,)
                if monomial_degree(full) < self.precision:
                    terms[full] = F.add(terms.get(full, F.zero()), c)
        return TruncatedSeries(self.variables, F, terms, self.precision)


def _dict_mul(d1, d2, field, cut):
    out = {}
    for m1, c1 in d1.items():
        deg1 = monomial_degree(m1)
        for m2, c2 in d2.items():
            if deg1 + monomial_degree(m2) >= cut:
                continue
            m = tuple(a + b for a, b in zip(m1, m2))
            prod = field.mul(c1, c2)
            out[m] = field.add(out.get(m, field.zero()), prod)
    return {m: c for m, c in out.items() if not field.is_zero(c)}


def weierstrass_prepare(f):
    """Weierstrass preparation of an x_m-regular truncated series.

    Solves unit and distinguished-polynomial coefficients level by level in
    the degree grading of the first m-1 variables; the product identity is
    re-checked before returning.
    """
    F = f.field
    m = len(f.variables)
    N = f.precision
    levels = {}
    for mono, c in f.terms.items():
        levels.setdefault(monomial_degree(mono[:m - 1]), {})[mono] = c
    f0 = levels.get(0, {})
    if not f0:
        raise DomainError("series is not regular in the last variable")
    p = min(mono[-1] for mono in f0)
    # unit part of f(0,..,0,x_m) and its inverse as a level-0 series in x_m
    e = {}
    for mono, c in f0.items():
        e[mono[:-1] + (mono[-1] - p,)] = c
    inv0 = F.invert(e[(0,) * m])
    e_inv = {(0,) * m: inv0}
    zero_m = (0,) * m
    for d in range(1, N):
        acc = F.zero()
        for j in range(1, d + 1):
            aj = e.get(zero_m[:-1] + (j,))
            bj = e_inv.get(zero_m[:-1] + (d - j,))
            if aj is None or bj is None:
                continue
            acc = F.add(acc, F.mul(aj, bj))
        if not F.is_zero(acc):
            e_inv[zero_m[:-1] + (d,)] = F.neg(F.mul(inv0, acc))

    u_parts = {0: e}
    z_parts = {}
    for k in range(1, N):
        R = dict(levels.get(k, {}))
        for j in range(1, k):
            prod = _dict_mul(u_parts.get(k - j, {}), z_parts.get(j, {}), F, N)
            for mono, c in prod.items():
                R[mono] = F.add(R.get(mono, F.zero()), F.neg(c))
        w = _dict_mul(R, e_inv, F, N)
        zk = {mono: c for mono, c in w.items() if mono[-1] < p}
        wplus = {mono[:-1] + (mono[-1] - p,): c for mono, c in w.items()
                 if mono[-1] >= p}
        uk = _dict_mul(u_parts[0], wplus, F, N)
        if zk:
            z_parts[k] = zk
        if uk:
            u_parts[k] = uk

    unit_terms = {}
    for part in u_parts.values():
        unit_terms.update(part)
    unit = TruncatedSeries(f.variables, F, unit_terms, N)
    zs = []
    for i in range(p):
        zi = {}
        for part in z_parts.values():
            for mono, c in part.items():
                if mono[-1] == i:
                    zi[mono[:-1]] = c
        zs.append(TruncatedSeries(f.variables[:-1], F, zi, N))
    data = WeierstrassData(variables=f.variables, p=p, unit=unit,
                           zs=tuple(zs), precision=N)
    check = unit * data.wpoly()
    if check.terms != f.terms:
        raise ConsistencyError("Weierstrass recurrence failed to reproduce input")
    return data


# ---------------------------------------------------------------------------
# text syntax: polynomial part plus a mandatory O(x^N) marker

_O_MARKER = re.compile(
    r"^(?P<body>.*?)(?:\+\s*)?O\(\s*(?P<var>[A-Za-z_]\w*)\s*(?:\^\s*(?P<exp>\d+))?\s*\)\s*$",
    re.S)


def parse_series(text, variables, field, line=1):
    m = _O_MARKER.match(text.strip())
    if not m:
        raise ParseError("series needs a trailing O(var^N) precision marker", line, 1)
    variables = tuple(variables)
    if m.group("var") not in variables:
        raise ParseError(f"precision marker uses undeclared variable "
                         f"{m.group('var')!r}", line, 1)
    precision = int(m.group("exp") or 1)
    body = m.group("body").strip().rstrip("+").strip()
    if not body:
        body = "0"
    poly = parse_polynomial(body, variables, field, line)
    return TruncatedSeries.from_polynomial(poly, precision)


def format_series(s):
    from .poly import format_polynomial

    marker = f"O({s.variables[0]}^{s.precision})"
    if not s.terms:
        return f"0 + {marker}"
    body = format_polynomial(s.to_polynomial(), ascending=True)
    return f"{body} + {marker}"
