"""Exact multivariate polynomials with explicit variable lists.

Terms are a dict mapping exponent tuples to nonzero field elements.  The
variable list is ordered and explicit; moving a polynomial to a larger ring
is an explicit ``embed``, never implicit.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ParseError, StructuralError
from .fields import QQ, Field, SimpleExtension


# ---------------------------------------------------------------------------
# monomial orders

@dataclass(frozen=True)
class MonomialOrder:
    """Total multiplicative well-order on monomials.

    kind is "lex", "degrevlex" or "block"; a block order compares the first
    ``split`` exponents under ``inner[0]``, then the rest under ``inner[1]``.
    """

    kind: str
    split: int = 0
    inner: tuple = ()

    def key(self, exps):
        if self.kind == "lex":
            return exps
        if self.kind == "degrevlex":
            return (sum(exps), tuple(-e for e in reversed(exps)))
        if self.kind == "block":
            return (self.inner[0].key(exps[:self.split]),
                    self.inner[1].key(exps[self.split:]))
        raise StructuralError(f"unknown order kind {self.kind}")

    def __str__(self):
        if self.kind == "block":
            return f"block({self.split};{self.inner[0]},{self.inner[1]})"
        return self.kind


LEX = MonomialOrder("lex")
DEGREVLEX = MonomialOrder("degrevlex")


def block_order(split, first=DEGREVLEX, second=DEGREVLEX):
    return MonomialOrder("block", split, (first, second))


def order_from_name(name):
    if name == "lex":
        return LEX
    if name == "degrevlex":
        return DEGREVLEX
    raise ParseError(f"unknown monomial order {name!r}")


def compare(m1, m2, order):
    """Three-way comparison of two exponent tuples under ``order``."""
    if len(m1) != len(m2):
        raise StructuralError("monomials live in different rings")
    k1, k2 = order.key(tuple(m1)), order.key(tuple(m2))
    return (k1 > k2) - (k1 < k2)


def monomial_mul(m1, m2):
    return tuple(a + b for a, b in zip(m1, m2))


def monomial_divides(m1, m2):
    return all(a <= b for a, b in zip(m1, m2))


def monomial_div(m1, m2):
    return tuple(a - b for a, b in zip(m1, m2))


def monomial_lcm(m1, m2):
    return tuple(max(a, b) for a, b in zip(m1, m2))


def monomial_degree(m):
    return sum(m)


# ---------------------------------------------------------------------------
# polynomials

class Polynomial:
    __slots__ = ("variables", "field", "terms")

    def __init__(self, variables, field, terms):
        self.variables = tuple(variables)
        self.field = field
        n = len(self.variables)
        clean = {}
        for mono, coeff in terms.items():
            if len(mono) != n:
                raise StructuralError("exponent tuple has wrong length")
            if not field.is_zero(coeff):
                clean[tuple(mono)] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, variables, field):
        return cls(variables, field, {})

    @classmethod
    def constant(cls, variables, field, c):
        return cls(variables, field, {(0,) * len(variables): c})

    @classmethod
    def one(cls, variables, field):
        return cls.constant(variables, field, field.one())

    @classmethod
    def variable(cls, variables, field, name, power=1):
        variables = tuple(variables)
        if name not in variables:
            raise StructuralError(f"unknown variable {name!r}")
        mono = tuple(power if v == name else 0 for v in variables)
        return cls(variables, field, {mono: field.one()})

    # -- predicates and views ----------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(monomial_degree(m) == 0 for m in self.terms)

    def constant_coefficient(self):
        return self.terms.get((0,) * len(self.variables), self.field.zero())

    def total_degree(self):
        if not self.terms:
            return -1
        return max(monomial_degree(m) for m in self.terms)

    def degree_in(self, name):
        i = self._index(name)
        if not self.terms:
            return -1
        return max(m[i] for m in self.terms)

    def leading(self, order):
        """(monomial, coefficient) of the order-largest term."""
        if not self.terms:
            raise DomainError("zero polynomial has no leading term")
        mono = max(self.terms, key=order.key)
        return mono, self.terms[mono]

    def sorted_terms(self, order=DEGREVLEX, reverse=True):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]),
                      reverse=reverse)

    def _index(self, name):
        try:
            return self.variables.index(name)
        except ValueError:
            raise StructuralError(f"unknown variable {name!r}") from None

    def _check(self, other):
        if not isinstance(other, Polynomial):
            raise StructuralError("expected a Polynomial")
        if other.variables != self.variables:
            raise StructuralError(
                f"variable lists differ: {self.variables} vs {other.variables}")
        if other.field != self.field:
            raise StructuralError("coefficient fields differ")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        F = self.field
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = F.add(terms.get(m, F.zero()), c)
        return Polynomial(self.variables, F, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        F = self.field
        return Polynomial(self.variables, F,
                          {m: F.neg(c) for m, c in self.terms.items()})

    def __mul__(self, other):
        self._check(other)
        F = self.field
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = monomial_mul(m1, m2)
                prod = F.mul(c1, c2)
                if m in terms:
                    terms[m] = F.add(terms[m], prod)
                else:
                    terms[m] = prod
        return Polynomial(self.variables, F, terms)

    def __pow__(self, e):
        if e < 0:
            raise DomainError("negative polynomial power")
        result = Polynomial.one(self.variables, self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def scale(self, c):
        F = self.field
        return Polynomial(self.variables, F,
                          {m: F.mul(coeff, c) for m, coeff in self.terms.items()})

    def monic(self, order):
        _, lc = self.leading(order)
        return self.scale(self.field.invert(lc))

    def term_poly(self, mono, coeff):
        return Polynomial(self.variables, self.field, {mono: coeff})

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.variables == other.variables
                and self.field == other.field and self.terms == other.terms)

    def __hash__(self):
        return hash((self.variables, self.field,
                     tuple(sorted(self.terms.items()))))

    # -- calculus and substitution -----------------------------------------

    def derivative(self, name):
        i = self._index(name)
        F = self.field
        terms = {}
        for m, c in self.terms.items():
            if m[i] == 0:
                continue
            new = list(m)
            new[i] -= 1
            terms[tuple(new)] = F.mul(c, F.from_int(m[i]))
        return Polynomial(self.variables, F, terms)

    def substitute(self, assignment):
        """Substitute polynomials (same ring) for variables; others pass through."""
        for name, val in assignment.items():
            self._index(name)
            self._check(val)
        images = []
        for i, v in enumerate(self.variables):
            if v in assignment:
                images.append(assignment[v])
            else:
                images.append(Polynomial.variable(self.variables, self.field, v))
        return self._compose(images)

    def _compose(self, images):
        F = self.field
        result = Polynomial.zero(self.variables, F)
        power_cache = [dict() for _ in images]
        for m, c in self.sorted_terms():
            part = Polynomial.constant(self.variables, F, c)
            for i, e in enumerate(m):
                if e == 0:
                    continue
                cache = power_cache[i]
                if e not in cache:
                    cache[e] = images[i] ** e
                part = part * cache[e]
            result = result + part
        return result

    def evaluate(self, point):
        """Evaluate at field values given for every variable."""
        F = self.field
        vals = []
        for v in self.variables:
            if v not in point:
                raise StructuralError(f"no value for variable {v!r}")
            vals.append(point[v])
        acc = F.zero()
        for m, c in self.terms.items():
            t = c
            for val, e in zip(vals, m):
                for _ in range(e):
                    t = F.mul(t, val)
            acc = F.add(acc, t)
        return acc

    # -- ring changes -------------------------------------------------------

    def embed(self, new_variables, field=None):
        """Explicit embedding into a ring with more (or reordered) variables."""
        new_variables = tuple(new_variables)
        field = field or self.field
        pos = []
        for v in self.variables:
            if v not in new_variables:
                raise StructuralError(f"target ring lacks variable {v!r}")
            pos.append(new_variables.index(v))
        n = len(new_variables)
        terms = {}
        for m, c in self.terms.items():
            new = [0] * n
            for p, e in zip(pos, m):
                new[p] = e
            if field != self.field:
                c = field.coerce(self.field, c)
            terms[tuple(new)] = c
        return Polynomial(new_variables, field, terms)

    def restrict(self, new_variables):
        """Move to a subring; errors if a dropped variable occurs."""
        new_variables = tuple(new_variables)
        keep = {v: new_variables.index(v) for v in new_variables}
        n = len(new_variables)
        terms = {}
        for m, c in self.terms.items():
            new = [0] * n
            for v, e in zip(self.variables, m):
                if e == 0:
                    continue
                if v not in keep:
                    raise StructuralError(f"polynomial involves dropped variable {v!r}")
                new[keep[v]] = e
            terms[tuple(new)] = c
        return Polynomial(new_variables, self.field, terms)

    # -- formatting ---------------------------------------------------------

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"<poly {format_polynomial(self)}>"


def format_monomial(variables, mono):
    parts = []
    for v, e in zip(variables, mono):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_polynomial(poly, order=DEGREVLEX, ascending=False):
    if poly.is_zero():
        return "0"
    F = poly.field
    chunks = []
    terms = poly.sorted_terms(order)
    if ascending:
        terms = list(reversed(terms))
    for mono, coeff in terms:
        mstr = format_monomial(poly.variables, mono)
        cstr = F.format(coeff)
        negated = cstr.startswith("-")
        if not F.format_atomic(coeff) and mstr:
            body = f"({cstr})*{mstr}"
            negated = False
        elif not mstr:
            body = cstr[1:] if negated else cstr
        elif cstr == "1":
            body = mstr
        elif cstr == "-1":
            body = mstr
        else:
            body = f"{cstr[1:] if negated else cstr}*{mstr}"
        chunks.append(("-" if negated else "+", body))
    sign, body = chunks[0]
    out = body if sign == "+" else f"-{body}"
    for sign, body in chunks[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# parser for the ASCII polynomial syntax

class _Tokens:
    def __init__(self, text, line=1):
        self.text = text
        self.line = line
        self.pos = 0
        self.toks = []
        self._lex()
        self.i = 0

    def _lex(self):
        t, i = self.text, 0
        while i < len(t):
            ch = t[i]
            if ch in " \t":
                i += 1
                continue
            col = i + 1
            if ch.isdigit():
                j = i
                while j < len(t) and t[j].isdigit():
                    j += 1
                self.toks.append(("int", t[i:j], col))
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < len(t) and (t[j].isalnum() or t[j] == "_"):
                    j += 1
                self.toks.append(("name", t[i:j], col))
                i = j
            elif ch in "+-*^()/":
                self.toks.append((ch, ch, col))
                i += 1
            else:
                raise ParseError(f"unexpected character {ch!r}", self.line, col)
        self.toks.append(("end", "", len(t) + 1))

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", self.line, tok[2])
        return tok


def parse_polynomial(text, variables, field, line=1):
    """Parse the ASCII syntax: identifiers, ^, *, +, -, rationals a/b."""
    variables = tuple(variables)
    if isinstance(field, SimpleExtension):
        work_vars = variables + (field.gen,)
        raw = _parse_expr_ring(text, work_vars, QQ, line)
        return _fold_extension(raw, variables, field)
    return _parse_expr_ring(text, variables, field, line)


def _fold_extension(raw, variables, field):
    gi = len(variables)
    terms = {}
    for m, c in raw.terms.items():
        base = m[:gi]
        coeff = field.from_coeffs([Fraction(0)] * m[gi] + [c])
        if base in terms:
            terms[base] = field.add(terms[base], coeff)
        else:
            terms[base] = coeff
    return Polynomial(variables, field, terms)


def _parse_expr_ring(text, variables, field, line):
    toks = _Tokens(text, line)
    poly = _parse_sum(toks, variables, field)
    tok = toks.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected token {tok[1]!r}", line, tok[2])
    return poly


def _parse_sum(toks, variables, field):
    negate = False
    if toks.peek()[0] in "+-":
        negate = toks.next()[0] == "-"
    acc = _parse_product(toks, variables, field)
    if negate:
        acc = -acc
    while toks.peek()[0] in "+-":
        op = toks.next()[0]
        term = _parse_product(toks, variables, field)
        acc = acc - term if op == "-" else acc + term
    return acc


def _parse_product(toks, variables, field):
    acc = _parse_power(toks, variables, field)
    while toks.peek()[0] == "*":
        toks.next()
        acc = acc * _parse_power(toks, variables, field)
    return acc


def _parse_power(toks, variables, field):
    base = _parse_atom(toks, variables, field)
    if toks.peek()[0] == "^":
        toks.next()
        exp = toks.expect("int")
        base = base ** int(exp[1])
    return base


def _parse_atom(toks, variables, field):
    tok = toks.next()
    if tok[0] == "int":
        num = int(tok[1])
        if toks.peek()[0] == "/":
            toks.next()
            den = toks.expect("int")
            if int(den[1]) == 0:
                raise ParseError("zero denominator", toks.line, den[2])
            return Polynomial.constant(variables, field,
                                       field.from_fraction(Fraction(num, int(den[1]))))
        return Polynomial.constant(variables, field, field.from_int(num))
    if tok[0] == "name":
        if tok[1] not in variables:
            raise ParseError(f"undeclared variable {tok[1]!r}", toks.line, tok[2])
        return Polynomial.variable(variables, field, tok[1])
    if tok[0] == "(":
        inner = _parse_sum(toks, variables, field)
        toks.expect(")")
        return inner
    if tok[0] == "-":
        return -_parse_atom(toks, variables, field)
    raise ParseError(f"unexpected token {tok[1]!r}", toks.line, tok[2])
