"""Coefficient fields: the rationals, small prime fields, and simple extensions.

Field elements are plain Python values (Fraction, int, or tuple of Fraction)
kept in canonical form, so ``==`` is semantic equality.  The field objects
carry the arithmetic.
"""

from fractions import Fraction
from math import gcd, isqrt

from .errors import DomainError, ResourceError, StructuralError

_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
    67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137,
    139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199,
)


def _is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


class Field:
    """Abstract coefficient field."""

    kind = None

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_int(self, n):
        raise NotImplementedError

    def from_fraction(self, q):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def invert(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.invert(b))

    def is_zero(self, a):
        return a == self.zero()

    def characteristic(self):
        return 0

    def coerce(self, other, a):
        """Map element ``a`` of field ``other`` into this field, if canonical."""
        if other == self:
            return a
        raise StructuralError(f"cannot coerce element of {other} into {self}")

    def format(self, a):
        raise NotImplementedError

    def format_atomic(self, a):
        """True if format(a) needs no parentheses when used as a factor."""
        return True


class RationalField(Field):
    kind = "rationals"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def from_fraction(self, q):
        return Fraction(q)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def invert(self, a):
        if a == 0:
            raise DomainError("division by zero in Q")
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def format(self, a):
        return str(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rationals")

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class PrimeField(Field):
    kind = "prime-field"

    def __init__(self, p):
        if not _is_prime(p):
            raise DomainError(f"{p} is not prime")
        if p >= 1 << 63:
            raise DomainError("prime-field modulus must fit in a machine word")
        self.p = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n % self.p

    def from_fraction(self, q):
        q = Fraction(q)
        if q.denominator % self.p == 0:
            raise DomainError(f"denominator divisible by {self.p}")
        return q.numerator * pow(q.denominator, -1, self.p) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def invert(self, a):
        if a % self.p == 0:
            raise DomainError(f"division by zero in F_{self.p}")
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def characteristic(self):
        return self.p

    def format(self, a):
        return str(a % self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("prime-field", self.p))

    def __repr__(self):
        return f"GF({self.p})"


# ---------------------------------------------------------------------------
# univariate helpers over F_p, used only by the irreducibility certificate

def _fp_trim(f, p):
    while f and f[-1] % p == 0:
        f.pop()
    return f


def _fp_mod(f, g, p):
    f = [c % p for c in f]
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(f) - 1 >= dg and any(f):
        if f[-1] % p == 0:
            f.pop()
            continue
        q = f[-1] * inv % p
        shift = len(f) - 1 - dg
        for i, c in enumerate(g):
            f[shift + i] = (f[shift + i] - q * c) % p
        _fp_trim(f, p)
    return _fp_trim(f, p)


def _fp_mulmod(f, g, mod, p):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _fp_mod(out, mod, p)


def _fp_powmod(f, e, mod, p):
    result = [1]
    base = _fp_mod(list(f), mod, p)
    while e:
        if e & 1:
            result = _fp_mulmod(result, base, mod, p)
        base = _fp_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _fp_sub(f, g, p):
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p
           for i in range(n)]
    return _fp_trim(out, p)


def _fp_gcd(f, g, p):
    f = _fp_trim([c % p for c in f], p)
    g = _fp_trim([c % p for c in g], p)
    while g:
        f, g = g, _fp_mod(f, g, p)
    return f


def _fp_irreducible(f, p):
    """Distinct-degree irreducibility test for monic f over F_p."""
    d = len(f) - 1
    if d <= 0:
        return False
    # squarefree check via gcd with the derivative
    deriv = _fp_trim([i * c % p for i, c in enumerate(f)][1:], p)
    if not deriv or len(_fp_gcd(f, deriv, p)) > 1:
        return False
    x = [0, 1]
    # x^(p^d) == x mod f, and no root of x^(p^(d/l)) - x for prime l | d
    xp = _fp_powmod(x, p ** d, f, p)
    if _fp_sub(xp, x, p):
        return False
    for ell in range(2, d + 1):
        if d % ell == 0 and _is_prime(ell):
            xq = _fp_powmod(x, p ** (d // ell), f, p)
            if len(_fp_gcd(f, _fp_sub(xq, x, p), p)) > 1:
                return False
    return True


# ---------------------------------------------------------------------------
# irreducibility over Q by modular certificate with Kronecker fallback

def _divisors(n):
    n = abs(n)
    out = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
    return sorted(out)


def _int_poly_eval(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _rat_poly_divides(g, f):
    """Exact division test for univariate rational polynomials (low-first)."""
    f = [Fraction(c) for c in f]
    g = [Fraction(c) for c in g]
    while f and f[-1] == 0:
        f.pop()
    dg = len(g) - 1
    while len(f) - 1 >= dg:
        if f[-1] == 0:
            f.pop()
            continue
        q = f[-1] / g[-1]
        shift = len(f) - 1 - dg
        for i, c in enumerate(g):
            f[shift + i] -= q * c
        while f and f[-1] == 0:
            f.pop()
    return not f


def _kronecker_has_factor(coeffs, budget=200000):
    """Search for a nonconstant proper factor of a monic integer polynomial."""
    d = len(coeffs) - 1
    for k in range(1, d // 2 + 1):
        points = list(range(0, k + 1))
        values = [_int_poly_eval(coeffs, x) for x in points]
        if any(v == 0 for v in values):
            return True  # integer root, hence a linear factor
        choices = [[s * t for t in _divisors(v) for s in (1, -1)] for v in values]
        total = 1
        for ch in choices:
            total *= len(ch)
        if total > budget:
            raise ResourceError("irreducibility trial-factorization budget exceeded")
        idx = [0] * len(choices)
        while True:
            vals = [choices[i][idx[i]] for i in range(len(choices))]
            # Lagrange interpolation through (points, vals)
            cand = [Fraction(0)] * (k + 1)
            for i, (xi, yi) in enumerate(zip(points, vals)):
                basis = [Fraction(1)]
                denom = Fraction(1)
                for j, xj in enumerate(points):
                    if j == i:
                        continue
                    basis = [Fraction(0)] + basis[:]
                    low = [-xj * c for c in basis[1:]] + [Fraction(0)]
                    basis = [a + b for a, b in zip(basis, low + [Fraction(0)] * (len(basis) - len(low)))]
                    denom *= xi - xj
                for t in range(len(basis)):
                    cand[t] += yi * basis[t] / denom
            if cand[-1] != 0 and any(c != 0 for c in cand[1:]):
                if _rat_poly_divides(cand, coeffs):
                    return True
            # advance the divisor-choice counter
            pos = 0
            while pos < len(idx):
                idx[pos] += 1
                if idx[pos] < len(choices[pos]):
                    break
                idx[pos] = 0
                pos += 1
            if pos == len(idx):
                break
    return False


def is_irreducible_over_q(coeffs):
    """Irreducibility of a monic rational polynomial (coefficients low-first).

    A modular distinct-degree certificate is tried first; trial factorization
    (Kronecker interpolation) decides the remaining cases at desk scale.
    """
    coeffs = [Fraction(c) for c in coeffs]
    if not coeffs or coeffs[-1] != 1:
        raise DomainError("minimal polynomial must be monic")
    d = len(coeffs) - 1
    if d == 0:
        return False
    if d == 1:
        return True
    # scale x -> x/l to obtain a monic integer polynomial
    from math import lcm

    ell = lcm(*[c.denominator for c in coeffs])
    iv = [int(c * ell ** (d - i)) for i, c in enumerate(coeffs)]
    if iv[0] == 0:
        return False
    for p in _SMALL_PRIMES:
        if iv[0] % p == 0:
            continue
        if _fp_irreducible([c % p for c in iv], p):
            return True
    return not _kronecker_has_factor(iv)


class SimpleExtension(Field):
    """k(alpha) with alpha a root of a monic irreducible polynomial over k.

    Only extensions of Q are needed by the pipeline.  Elements are tuples of
    Fractions of length deg(mu), low power first.
    """

    kind = "simple-extension"

    def __init__(self, base, mu, gen="alpha"):
        if not isinstance(base, RationalField):
            raise DomainError("simple extensions are supported over Q only")
        mu = tuple(Fraction(c) for c in mu)
        if len(mu) < 3:
            raise DomainError("extension degree must be at least 2")
        if mu[-1] != 1:
            raise DomainError("minimal polynomial must be monic")
        if not is_irreducible_over_q(list(mu)):
            raise DomainError("minimal polynomial is reducible")
        self.base = base
        self.mu = mu
        self.gen = gen
        self.degree = len(mu) - 1

    def zero(self):
        return (Fraction(0),) * self.degree

    def one(self):
        return (Fraction(1),) + (Fraction(0),) * (self.degree - 1)

    def generator(self):
        if self.degree == 1:
            return (-self.mu[0],)
        return tuple(Fraction(int(i == 1)) for i in range(self.degree))

    def from_int(self, n):
        return (Fraction(n),) + (Fraction(0),) * (self.degree - 1)

    def from_fraction(self, q):
        return (Fraction(q),) + (Fraction(0),) * (self.degree - 1)

    def from_coeffs(self, coeffs):
        coeffs = [Fraction(c) for c in coeffs]
        return self._reduce(coeffs)

    def _reduce(self, coeffs):
        coeffs = list(coeffs)
        d = self.degree
        while len(coeffs) > d:
            top = coeffs.pop()
            if top:
                for i in range(d):
                    coeffs[len(coeffs) - d + i] -= top * self.mu[i]
        coeffs += [Fraction(0)] * (d - len(coeffs))
        return tuple(coeffs)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def mul(self, a, b):
        out = [Fraction(0)] * (2 * self.degree - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._reduce(out)

    def neg(self, a):
        return tuple(-x for x in a)

    def invert(self, a):
        if self.is_zero(a):
            raise DomainError("division by zero in extension field")
        # extended Euclid in Q[alpha] against mu
        r0, r1 = list(self.mu), list(a)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while True:
            while r1 and r1[-1] == 0:
                r1.pop()
            if len(r1) == 1:
                inv = 1 / r1[0]
                return self._reduce([c * inv for c in s1])
            q, rem = _rat_poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _rat_poly_sub(s0, _rat_poly_mul(q, s1))

    def is_zero(self, a):
        return all(x == 0 for x in a)

    def coerce(self, other, a):
        if other == self:
            return a
        if isinstance(other, RationalField):
            return self.from_fraction(a)
        raise StructuralError(f"cannot coerce element of {other} into {self}")

    def format(self, a):
        parts = []
        for i, c in enumerate(a):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = self.gen if i == 1 else f"{self.gen}^{i}"
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{c}*{mono}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def format_atomic(self, a):
        return sum(1 for c in a if c != 0) <= 1 and all(c >= 0 for c in a)

    def __eq__(self, other):
        return (isinstance(other, SimpleExtension) and other.mu == self.mu
                and other.gen == self.gen)

    def __hash__(self):
        return hash(("simple-extension", self.mu, self.gen))

    def __repr__(self):
        return f"QQ({self.gen})"


def _rat_poly_divmod(f, g):
    f = [Fraction(c) for c in f]
    g = list(g)
    while g and g[-1] == 0:
        g.pop()
    q = [Fraction(0)] * max(1, len(f) - len(g) + 1)
    while True:
        while f and f[-1] == 0:
            f.pop()
        if len(f) < len(g):
            return q, f
        c = f[-1] / g[-1]
        shift = len(f) - len(g)
        q[shift] += c
        for i, gc in enumerate(g):
            f[shift + i] -= c * gc


def _rat_poly_mul(f, g):
    out = [Fraction(0)] * (len(f) + len(g) - 1 or 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return out


def _rat_poly_sub(f, g):
    n = max(len(f), len(g))
    f = list(f) + [Fraction(0)] * (n - len(f))
    for i, c in enumerate(g):
        f[i] -= c
    return f
