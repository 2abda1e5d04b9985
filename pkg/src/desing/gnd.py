"""Construction of verified standard-smooth factorizations for a morphism
from a finitely presented algebra over a one-dimensional local base into a
truncated power-series ring.

Pipeline: border the presentation so the square of the local parameter lies
in the right ideal, truncate the series solution to an exact polynomial
frame, then build the polynomials h and g whose localized quotient is
standard smooth and factors the morphism.  Every algebraic identity the
construction relies on is re-checked, exactly where possible and to a
recorded precision otherwise.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import (ConsistencyError, DomainError, PrecisionError,
                     StructuralError)
from .fields import SimpleExtension
from .groebner import _fresh_name, ideal_member
from .poly import Polynomial
from .series import CompletionMorphism, TruncatedSeries, series_eval
from .smooth import (AlgebraPresentation, DesingData, check_morphism,
                     find_desing_data, identity_matrix, jacobian,
                     matrix_adjugate, matrix_det, matrix_equal, matrix_mul,
                     matrix_scale, reduce_until_nonvanishing,
                     DEFAULT_SUBSET_BUDGET)


@dataclass
class GndConfig:
    subset_budget: int = DEFAULT_SUBSET_BUDGET
    reduction_cap: int = 5


@dataclass
class DPresentation:
    """The intermediate smooth base: A itself, or A[U]/(mu) localized at
    mu', when the series live over a simple extension of the ground field."""

    base_var: str
    field: object                # coefficient field of all polynomial rings
    series_field: object         # equals field, or a simple extension of it
    ext_var: str = None
    mu: Polynomial = None
    muprime: Polynomial = None

    def ring_prefix(self):
        if self.ext_var is None:
            return (self.base_var,)
        return (self.base_var, self.ext_var)

    def reduce(self, poly):
        """Normal form with the extension-generator degree below deg(mu)."""
        if self.ext_var is None or self.ext_var not in poly.variables:
            return poly
        i = poly.variables.index(self.ext_var)
        deg = self.mu.degree_in(self.ext_var)
        mu = self.mu.embed(poly.variables)
        while True:
            worst = None
            for m, c in poly.terms.items():
                if m[i] >= deg:
                    worst = (m, c)
                    break
            if worst is None:
                return poly
            m, c = worst
            shift = list(m)
            shift[i] -= deg
            poly = poly - mu * poly.term_poly(tuple(shift), c)

    def coeff_to_poly(self, c, variables):
        """Rewrite a series-field coefficient as a polynomial in U."""
        F = self.field
        if self.ext_var is None:
            return Polynomial.constant(variables, F, c)
        i = variables.index(self.ext_var)
        terms = {}
        for e, comp in enumerate(c):
            if comp:
                mono = [0] * len(variables)
                mono[i] = e
                terms[tuple(mono)] = Fraction(comp)
        return Polynomial(variables, F, terms)

    def to_series(self, poly, precision):
        """Map a polynomial in (x, U) to a series in x over the series field."""
        Fs = self.series_field
        xi = poly.variables.index(self.base_var)
        ui = (poly.variables.index(self.ext_var)
              if self.ext_var in (poly.variables if self.ext_var else ())
              else None)
        alpha = Fs.generator() if ui is not None else None
        terms = {}
        for m, c in poly.terms.items():
            for k, e in enumerate(m):
                if e and k not in (xi, ui):
                    raise StructuralError(
                        f"polynomial involves {poly.variables[k]!r}, "
                        "expected only base and extension variables")
            val = Fs.coerce(poly.field, c)
            if ui is not None:
                for _ in range(m[ui]):
                    val = Fs.mul(val, alpha)
            mono = (m[xi],)
            terms[mono] = Fs.add(terms.get(mono, Fs.zero()), val)
        return TruncatedSeries((self.base_var,), Fs, terms, precision)


def make_D(v, taken):
    F = v.field
    if isinstance(F, SimpleExtension):
        U = _fresh_name("U", taken)
        mu = Polynomial((U,), F.base,
                        {(i,): c for i, c in enumerate(F.mu) if c})
        return DPresentation(base_var=v.base_var, field=F.base,
                             series_field=F, ext_var=U, mu=mu,
                             muprime=mu.derivative(U))
    return DPresentation(base_var=v.base_var, field=F, series_field=F)


@dataclass
class CheckResult:
    name: str
    passed: bool
    precision: str               # "exact", "vacuous", or "O(x^k)"
    detail: str = ""

    def line(self):
        status = "pass" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"[{status}] {self.name} @ {self.precision}{extra}"


@dataclass
class BorderStep:
    algebra: AlgebraPresentation
    morphism: CompletionMorphism
    data: DesingData
    zvar: str
    frp1: Polynomial
    d: Polynomial                # the square of d'
    P: Polynomial                # minor * witness of the bordered data


def border_step(B, v, data):
    """Adjoin Z with -d' + P'Z = 0 so that d = d'^2 lands in the new ideal."""
    if data.c < 1:
        raise DomainError("bordering applies only to the non-smooth case")
    Z = _fresh_name("Z", B.ring_variables())
    ring1 = (B.base_var,) + B.variables + (Z,)
    zpoly = Polynomial.variable(ring1, B.field, Z)
    frp1 = -data.dprime.embed(ring1) + data.pprime.embed(ring1) * zpoly
    B1 = AlgebraPresentation(base_var=B.base_var,
                             variables=B.variables + (Z,),
                             field=B.field,
                             relations=list(B.relations) + [frp1])
    z = data.z
    if z.order() is not None and z.order() > 0:
        raise ConsistencyError("z must be a unit series")
    images = dict(v.images)
    images[Z] = z
    v1 = CompletionMorphism(base_var=v.base_var, field=v.field, images=images)
    img = v1.eval(frp1)
    if not img.is_zero():
        raise PrecisionError("bordered relation does not vanish on the images")
    minor1 = data.minor.embed(ring1) * data.pprime.embed(ring1)
    witness1 = data.witness.embed(ring1) * zpoly * zpoly
    d = data.dprime.embed(ring1) * data.dprime.embed(ring1)
    P = minor1 * witness1
    if not ideal_member(d - P, B1.ideal()):
        raise ConsistencyError("d - P is not in the bordered ideal")
    data1 = DesingData(subset=data.subset + (len(B1.relations) - 1,),
                       columns=data.columns + (len(B.variables),),
                       minor=minor1, witness=witness1, c=data.c,
                       dprime=data.dprime.embed(ring1), z=z, pprime=P)
    return BorderStep(algebra=B1, morphism=v1, data=data1, zvar=Z,
                      frp1=frp1, d=d, P=P)


# ---------------------------------------------------------------------------
# the Artinian frame

def truncate_lift(v, c, D, names, ring):
    """Polynomial truncations of the series images below degree 3*ord(d)."""
    cut = 6 * c
    if v.precision < cut:
        raise PrecisionError(
            f"need precision >= {cut} to truncate, have {v.precision}")
    out = {}
    for name in names:
        s = v.images[name]
        acc = Polynomial.zero(ring, D.field)
        xi = ring.index(D.base_var)
        for (e,), coeff in sorted(s.terms.items()):
            if e >= cut:
                continue
            cp = D.coeff_to_poly(coeff, ring)
            mono = [0] * len(ring)
            mono[xi] = e
            acc = acc + cp * Polynomial(ring, D.field,
                                        {tuple(mono): D.field.one()})
        out[name] = acc
    return out


def _x_shift(poly, xvar, k, what="element"):
    """Exact division by xvar^k; fails loudly when not divisible."""
    if k == 0:
        return poly
    i = poly.variables.index(xvar)
    terms = {}
    for m, c in poly.terms.items():
        if m[i] < k:
            raise ConsistencyError(f"{what} is not divisible by "
                                   f"{xvar}^{k}")
        mm = list(m)
        mm[i] -= k
        terms[tuple(mm)] = c
    return Polynomial(poly.variables, poly.field, terms)


def _x_order(poly, xvar):
    if poly.is_zero():
        return None
    i = poly.variables.index(xvar)
    return min(m[i] for m in poly.terms)


def compute_s_b(fs, P, yassign, c, D):
    """s = P(y')/d with s = 1 mod d; b_i = f_i(y')/d^2 with b_i in (d)."""
    x = D.base_var
    Pval = D.reduce(P.substitute(yassign))
    s = _x_shift(Pval, x, 2 * c, "P(y')")
    one = Polynomial.one(s.variables, s.field)
    _x_shift(s - one, x, 2 * c, "s - 1")
    b = []
    for f in fs:
        fval = D.reduce(f.substitute(yassign))
        bi = _x_shift(fval, x, 4 * c, "f_i(y')")
        if not bi.is_zero():
            _x_shift(bi, x, 2 * c, "b_i")
        b.append(bi)
    return s, b


def build_H_G(fs, yvars, witness, minor):
    """H = Jacobian block over (0 | Id); G = N*adj(H); GH = HG = P*Id."""
    r, n = len(fs), len(yvars)
    ring = fs[0].variables
    F = fs[0].field
    H = jacobian(fs, yvars)
    zero = Polynomial.zero(ring, F)
    one = Polynomial.one(ring, F)
    for i in range(r, n):
        H.append([one if j == i else zero for j in range(n)])
    det = matrix_det(H)
    if det != minor:
        raise ConsistencyError("determinant of H differs from the minor")
    adj = matrix_adjugate(H)
    G = [[witness * entry for entry in row] for row in adj]
    P = minor * witness
    target = matrix_scale(identity_matrix(n, ring, F), P)
    if not (matrix_equal(matrix_mul(G, H), target)
            and matrix_equal(matrix_mul(H, G), target)):
        raise ConsistencyError("GH = HG = P*Id failed")
    return H, G


def _taylor_partials(f, yvars):
    """Nonzero iterated partials of f, keyed by the multi-exponent in Y."""
    n = len(yvars)
    zero_alpha = (0,) * n
    out = {zero_alpha: f}
    frontier = [zero_alpha]
    while frontier:
        nxt = []
        for alpha in frontier:
            for j, v in enumerate(yvars):
                beta = alpha[:j] + (alpha[j] + 1,) + alpha[j + 1:]
                if beta in out:
                    continue
                d = out[alpha].derivative(v)
                if d.is_zero():
                    continue
                out[beta] = d
                nxt.append(beta)
        frontier = nxt
    return out


def _alpha_factorial_inverse(alpha, F):
    fact = 1
    for a in alpha:
        for k in range(2, a + 1):
            fact *= k
    return F.from_fraction(Fraction(1, fact))


def build_h_g(fs, yassign, yvars, tvars, d, s, b, G, p, D):
    """h = s(Y - y') - d G(y')T; g_i = s^p b_i + s^p T_i + Q_i.

    Q_i collects the Taylor tail of order >= 2, with powers of s and d
    arranged so that s^p f_i = d^2 g_i holds modulo (h).
    """
    ring = s.variables
    F = s.field
    n = len(yvars)
    Gy = [[D.reduce(entry.substitute(yassign)) for entry in row] for row in G]
    tpolys = [Polynomial.variable(ring, F, t) for t in tvars]
    w = []
    for j in range(n):
        acc = Polynomial.zero(ring, F)
        for k in range(n):
            acc = acc + Gy[j][k] * tpolys[k]
        w.append(acc)
    h = []
    for j, yv in enumerate(yvars):
        ypoly = Polynomial.variable(ring, F, yv)
        h.append(s * (ypoly - yassign[yv]) - d * w[j])
    s_pow = [Polynomial.one(ring, F)]
    for _ in range(p):
        s_pow.append(s_pow[-1] * s)
    d_pow = [Polynomial.one(ring, F), d]
    g, Q = [], []
    for i, f in enumerate(fs):
        partials = _taylor_partials(f, yvars)
        Qi = Polynomial.zero(ring, F)
        for alpha, df in sorted(partials.items()):
            m = sum(alpha)
            if m < 2:
                continue
            if m > p:
                raise ConsistencyError("generator degree exceeds p")
            while len(d_pow) <= m - 2:
                d_pow.append(d_pow[-1] * d)
            term = D.reduce(df.substitute(yassign))
            term = term.scale(_alpha_factorial_inverse(alpha, F))
            term = term * s_pow[p - m] * d_pow[m - 2]
            for j, a in enumerate(alpha):
                for _ in range(a):
                    term = term * w[j]
            Qi = Qi + D.reduce(term)
        Qi = D.reduce(Qi)
        for mono in Qi.terms:
            tdeg = sum(mono[ring.index(t)] for t in tvars)
            if tdeg < 2:
                raise ConsistencyError("Q has a term of T-degree below 2")
        gi = s_pow[p] * b[i] + s_pow[p] * tpolys[i] + Qi
        Q.append(Qi)
        g.append(D.reduce(gi))
    for i, f in enumerate(fs):
        if not congruence_holds(f, i, yassign, yvars, d, s, b, g, h, w, p, D):
            raise ConsistencyError(
                f"s^p f_{i} - d^2 g_{i} is not in (h)")
    return h, g, Q


def congruence_holds(f, i, yassign, yvars, d, s, b, g, h, w, p, D):
    """Check s^p f - d^2 g in (h) by an explicit cofactor identity.

    The Taylor expansion of f around y' telescopes the difference between
    powers of a_j = s(Y_j - y') and b_j = d(G(y')T)_j into multiples of
    h_j = a_j - b_j; equality of both sides is then an exact polynomial
    identity (modulo the extension minimal polynomial when present).
    """
    ring = s.variables
    F = s.field
    n = len(yvars)
    a_vec = [h[j] + d * w[j] for j in range(n)]      # s(Y_j - y'_j)
    b_vec = [d * w[j] for j in range(n)]
    s_pow = [Polynomial.one(ring, F)]
    for _ in range(p):
        s_pow.append(s_pow[-1] * s)
    lhs = s_pow[p] * f.embed(ring) - d * d * g[i]
    C = [Polynomial.zero(ring, F) for _ in range(n)]
    partials = _taylor_partials(f, yvars)
    for alpha, df in sorted(partials.items()):
        m = sum(alpha)
        if m < 1:
            continue
        base = D.reduce(df.substitute(yassign))
        base = base.scale(_alpha_factorial_inverse(alpha, F))
        base = base * s_pow[p - m]
        for j in range(n):
            if alpha[j] == 0:
                continue
            factor = Polynomial.one(ring, F)
            for l in range(j):
                for _ in range(alpha[l]):
                    factor = factor * b_vec[l]
            geom = Polynomial.zero(ring, F)
            for u in range(alpha[j]):
                term = Polynomial.one(ring, F)
                for _ in range(u):
                    term = term * a_vec[j]
                for _ in range(alpha[j] - 1 - u):
                    term = term * b_vec[j]
                geom = geom + term
            factor = factor * geom
            for l in range(j + 1, n):
                for _ in range(alpha[l]):
                    factor = factor * a_vec[l]
            C[j] = C[j] + base * factor
    rhs = Polynomial.zero(ring, F)
    for j in range(n):
        rhs = rhs + C[j] * h[j]
    return D.reduce(lhs - rhs).is_zero()


# ---------------------------------------------------------------------------
# the certificate

@dataclass
class GndCertificate:
    base_var: str
    field: object
    series_field: object
    D: DPresentation
    data: DesingData
    c: int
    p: int
    short_circuit: bool
    ring: tuple                  # working ring (x [, U], Y permuted, T)
    yvars: tuple                 # permuted algebra variables (with Z)
    tvars: tuple
    zvar: str = None
    permutation: tuple = ()      # yvars[i] = original_variables[permutation[i]]
    relations: list = dc_field(default_factory=list)   # bordered ideal in ring
    subset: tuple = ()
    d: Polynomial = None
    s: Polynomial = None
    b: list = dc_field(default_factory=list)
    yprime: dict = dc_field(default_factory=dict)
    H: list = dc_field(default_factory=list)
    G: list = dc_field(default_factory=list)
    h: list = dc_field(default_factory=list)
    g: list = dc_field(default_factory=list)
    Q: list = dc_field(default_factory=list)
    Bprime: AlgebraPresentation = None
    wvar: str = None
    t: dict = dc_field(default_factory=dict)            # tvar -> series
    hat_images: dict = dc_field(default_factory=dict)   # yvar -> series
    precision: int = 0
    report: list = dc_field(default_factory=list)

    def subset_relations(self):
        return [self.relations[i] for i in self.subset]

    def report_lines(self):
        return [r.line() for r in self.report]

    def all_passed(self):
        return all(r.passed for r in self.report)


def assemble_certificate(step, D, permutation, ring, yvars, tvars, yassign,
                         s, b, H, G, h, g, Q, p):
    """Package the pipeline output and compute the series images of T."""
    B1 = step.algebra
    c = step.data.c
    v1 = step.morphism
    N = v1.precision
    hat = {yv: v1.images[yv].truncate(N) for yv in yvars}
    # t = H(y') (yhat - y') / d^2, entrywise exact series division
    Hy = [[D.reduce(entry.substitute(yassign)) for entry in row] for row in H]
    deltas = []
    for yv in yvars:
        yp = D.to_series(yassign[yv], N)
        deltas.append(hat[yv] - yp)
    xF = v1.field
    d2 = TruncatedSeries((v1.base_var,), xF, {(4 * c,): xF.one()}, N)
    t = {}
    for j, tv in enumerate(tvars):
        acc = TruncatedSeries.zero((v1.base_var,), xF, N)
        for k in range(len(yvars)):
            acc = acc + D.to_series(Hy[j][k], N) * deltas[k]
        t[tv] = acc.divide_exact(d2)
    W = _fresh_name("W", ring)
    bring = ring + (W,)
    wpoly = Polynomial.variable(bring, D.field, W)
    bprime_rels = [D.mu.embed(bring)] if D.ext_var else []
    bprime_rels += [r.embed(bring) for r in step.algebra.relations]
    bprime_rels += [q.embed(bring) for q in h]
    bprime_rels += [q.embed(bring) for q in g]
    bprime_rels.append(wpoly * s.embed(bring) - Polynomial.one(bring, D.field))
    Bprime = AlgebraPresentation(base_var=step.algebra.base_var,
                                 variables=bring[1:], field=D.field,
                                 relations=bprime_rels)
    rels = [r.embed(ring) for r in B1.relations]
    data = DesingData(subset=step.data.subset, columns=step.data.columns,
                      minor=step.data.minor.embed(ring),
                      witness=step.data.witness.embed(ring), c=c,
                      dprime=step.data.dprime.embed(ring), z=step.data.z,
                      pprime=step.data.pprime.embed(ring))
    return GndCertificate(
        base_var=B1.base_var, field=D.field, series_field=v1.field, D=D,
        data=data, c=c, p=p, short_circuit=False, ring=ring,
        yvars=yvars, tvars=tvars, zvar=step.zvar, permutation=permutation,
        relations=rels, subset=step.data.subset, d=step.d.embed(ring),
        s=s, b=b, yprime=dict(yassign), H=H, G=G, h=h, g=g, Q=Q,
        Bprime=Bprime, wvar=W, t=t, hat_images=hat, precision=N)


def _series_det(M, variables, F, precision):
    n = len(M)
    if n == 0:
        return TruncatedSeries.one(variables, F, precision)
    if n == 1:
        return M[0][0]
    det = TruncatedSeries.zero(variables, F, precision)
    for j in range(n):
        sub = [[row[k] for k in range(n) if k != j] for row in M[1:]]
        term = M[0][j] * _series_det(sub, variables, F, precision)
        det = det + term if j % 2 == 0 else det - term
    return det


def verify_certificate(cert, B, v):
    """Re-run the six certificate checks; failures become report entries."""
    report = []
    if cert.short_circuit:
        report.append(CheckResult("GH = HG = P*Id", True, "vacuous",
                                  "smooth short-circuit"))
        report.append(CheckResult("s^p f = d^2 g mod (h)", True, "vacuous",
                                  "smooth short-circuit"))
        report.append(CheckResult("I(y') = 0 mod d^3", True, "vacuous",
                                  "smooth short-circuit"))
        report.append(CheckResult("h and g vanish on (yhat, t)", True,
                                  "vacuous", "no h, g"))
        ok = True
        try:
            check_morphism(B, v)
        except DomainError:
            ok = False
        report.append(CheckResult("composite factors v", ok,
                                  f"O({v.base_var}^{v.precision})"))
        img = v.eval(cert.data.pprime)
        report.append(CheckResult("smoothness witness is a unit",
                                  img.order() == 0,
                                  f"O({v.base_var}^{v.precision})"))
        cert.report = report
        return report

    ring, F, D = cert.ring, cert.field, cert.D
    n = len(cert.yvars)
    c = cert.c
    # (1) exact matrix identity
    P = (cert.data.minor * cert.data.witness).embed(ring)
    target = matrix_scale(identity_matrix(n, ring, F), P)
    ok1 = (matrix_equal(matrix_mul(cert.G, cert.H), target)
           and matrix_equal(matrix_mul(cert.H, cert.G), target))
    report.append(CheckResult("GH = HG = P*Id", ok1, "exact"))

    # (2) membership via the cofactor identity
    fs = cert.subset_relations()
    w = []
    tpolys = [Polynomial.variable(ring, F, t) for t in cert.tvars]
    Gy_at = [[D.reduce(entry.substitute(cert.yprime)) for entry in row]
             for row in cert.G]
    for j in range(n):
        acc = Polynomial.zero(ring, F)
        for k in range(n):
            acc = acc + Gy_at[j][k] * tpolys[k]
        w.append(acc)
    ok2 = all(
        congruence_holds(fs[i], i, cert.yprime, cert.yvars, cert.d, cert.s,
                         cert.b, cert.g, cert.h, w, cert.p, D)
        for i in range(len(fs)))
    report.append(CheckResult("s^p f = d^2 g mod (h)", ok2, "exact"))

    # (3) the frame solves the ideal modulo d^3
    ok3 = True
    for rel in cert.relations:
        val = D.reduce(rel.substitute(cert.yprime))
        ordv = _x_order(val, cert.base_var)
        if ordv is not None and ordv < 6 * c:
            ok3 = False
    report.append(CheckResult("I(y') = 0 mod d^3", ok3, "exact"))

    # (4) h and g vanish on the series point
    prec4 = min([cert.precision - 4 * c]
                + [t.precision for t in cert.t.values()])
    assign = _series_assignment(cert, prec4)
    ok4 = all(series_eval(q, assign).is_zero() for q in cert.h) and \
        all(series_eval(q, assign).is_zero() for q in cert.g)
    report.append(CheckResult("h and g vanish on (yhat, t)", ok4,
                              f"O({cert.base_var}^{prec4})"))

    # (5) the composite agrees with v
    ok5 = True
    for rel in B.relations:
        img = series_eval(rel, {name: assign[name] for name in rel.variables})
        if not img.is_zero():
            ok5 = False
    report.append(CheckResult("composite factors v", ok5,
                              f"O({cert.base_var}^{prec4})"))

    # (6) det of the leading T-block of the Jacobian of g is a unit
    r = len(cert.g)
    mat = []
    for i in range(r):
        row = []
        for j in range(r):
            dg = cert.g[i].derivative(cert.tvars[j])
            row.append(series_eval(dg, assign))
        mat.append(row)
    det = _series_det(mat, (cert.base_var,), cert.series_field, prec4)
    ok6 = det.order() == 0
    report.append(CheckResult("smoothness witness is a unit", ok6,
                              f"O({cert.base_var}^{prec4})"))
    cert.report = report
    return report


def _series_assignment(cert, precision):
    """Series values for every working-ring variable at the given precision."""
    Fs = cert.series_field
    base = (cert.base_var,)
    assign = {cert.base_var:
              TruncatedSeries.variable(base, Fs, cert.base_var, precision)}
    if cert.D.ext_var:
        assign[cert.D.ext_var] = TruncatedSeries.constant(
            base, Fs, Fs.generator(), precision)
    for yv in cert.yvars:
        assign[yv] = cert.hat_images[yv].truncate(precision)
    for tv in cert.tvars:
        assign[tv] = cert.t[tv].truncate(precision)
    return assign


def _short_circuit_certificate(B, v, data, D):
    ring = B.ring_variables()
    W = _fresh_name("W", ring)
    bring = ring + (W,)
    wpoly = Polynomial.variable(bring, B.field, W)
    rels = [r.embed(bring) for r in B.relations]
    rels.append(wpoly * data.pprime.embed(bring)
                - Polynomial.one(bring, B.field))
    Bprime = AlgebraPresentation(base_var=B.base_var, variables=bring[1:],
                                 field=B.field, relations=rels)
    cert = GndCertificate(
        base_var=B.base_var, field=B.field, series_field=v.field, D=D,
        data=data, c=0, p=0, short_circuit=True, ring=ring,
        yvars=B.variables, tvars=(), permutation=tuple(range(len(B.variables))),
        relations=[r.embed(ring) for r in B.relations], subset=data.subset,
        d=Polynomial.one(ring, B.field), Bprime=Bprime, wvar=W,
        hat_images={yv: v.images[yv] for yv in B.variables},
        precision=v.precision)
    return cert


def desingularize(B, v, config=None):
    """Full pipeline; returns a certificate carrying its own verification."""
    cfg = config or GndConfig()
    if B.field.characteristic() != 0:
        raise DomainError("pipeline requires characteristic zero")
    check_morphism(B, v)
    B0 = reduce_until_nonvanishing(B, v, cfg.reduction_cap, cfg.subset_budget)
    data = find_desing_data(B0, v, cfg.subset_budget)
    D = make_D(v, B0.ring_variables())
    if data.c == 0:
        cert = _short_circuit_certificate(B0, v, data, D)
        verify_certificate(cert, B0, v)
        return cert
    step = border_step(B0, v, data)
    B1, v1 = step.algebra, step.morphism
    # permute the algebra variables so the minor columns come first
    cols = list(step.data.columns)
    rest = [j for j in range(len(B1.variables)) if j not in cols]
    permutation = tuple(cols + rest)
    yvars = tuple(B1.variables[j] for j in permutation)
    tvars = tuple(_fresh_name(f"T{j + 1}", (B1.base_var,) + yvars)
                  for j in range(len(yvars)))
    ring = (B1.base_var,) + D.ring_prefix()[1:] + yvars + tvars
    rels = [r.embed(ring) for r in B1.relations]
    fs = [rels[i] for i in step.data.subset]
    p = max(r.total_degree() for r in rels)
    yassign = truncate_lift(v1, data.c, D, yvars, ring)
    d = step.d.embed(ring)
    P = step.P.embed(ring)
    s, b = compute_s_b(fs, P, yassign, data.c, D)
    H, G = build_H_G(fs, yvars, step.data.witness.embed(ring),
                     step.data.minor.embed(ring))
    h, g, Q = build_h_g(fs, yassign, yvars, tvars, d, s, b, G, p, D)
    cert = assemble_certificate(step, D, permutation, ring, yvars, tvars,
                                yassign, s, b, H, G, h, g, Q, p)
    verify_certificate(cert, B0, v)
    return cert
