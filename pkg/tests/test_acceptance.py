"""End-to-end acceptance suite.

Each test prints one ``criterion N: PASS/FAIL`` line (run pytest with -s to
see them) and asserts the same condition, including the wall-clock budget.
"""

import itertools
import random
import time
from fractions import Fraction

import numpy as np

from desing.approx import (LiftRequest, check_candidate, linear_factor,
                           module_iso_system, newton_lift)
from desing.fields import QQ, PrimeField
from desing.gnd import desingularize, verify_certificate
from desing.groebner import (IdealPresentation, buchberger, eliminate,
                             ideal_equal, ideal_member, ideal_quotient,
                             radical_member, saturate)
from desing.iofmt import emit_certificate
from desing.poly import Polynomial, parse_polynomial
from desing.series import (CompletionMorphism, TruncatedSeries, parse_series,
                           weierstrass_prepare)
from desing.smooth import AlgebraPresentation, smoothing_ideal


def report(number, ok, elapsed, budget=None):
    status = "PASS" if ok else "FAIL"
    extra = f", budget {budget}s" if budget else ""
    print(f"criterion {number}: {status} ({elapsed:.2f}s{extra})")
    assert ok, f"criterion {number} failed"
    if budget is not None:
        assert elapsed < budget, f"criterion {number} over time budget"


# ---------------------------------------------------------------------------
# criterion 1: Groebner membership vs a Macaulay-matrix oracle over F_101

P101 = 101


def _inv_mod(a, p=P101):
    return pow(int(a), p - 2, p)


def _monomials_upto(n, d):
    out = []
    for total in range(d + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            mono = [0] * n
            for i in combo:
                mono[i] += 1
            out.append(tuple(mono))
    return out


def _rref_mod(M, p=P101):
    """Row echelon form mod p; returns (rows, pivot columns)."""
    M = M % p
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        sel = None
        for i in range(r, rows):
            if M[i, c] % p:
                sel = i
                break
        if sel is None:
            continue
        M[[r, sel]] = M[[sel, r]]
        M[r] = (M[r] * _inv_mod(M[r, c], p)) % p
        nz = np.nonzero(M[:, c] % p)[0]
        for i in nz:
            if i != r:
                M[i] = (M[i] - M[i, c] * M[r]) % p
        pivots.append(c)
        r += 1
    return M[:r], pivots


class MacaulayOracle:
    """Degree-bounded membership over F_101: sound positives by linear
    algebra on the row space of all monomial multiples of the generators."""

    def __init__(self, gens, nvars, degree):
        self.degree = degree
        cols = _monomials_upto(nvars, degree)
        self.col_index = {m: i for i, m in enumerate(cols)}
        rows = []
        for g in gens:
            gdeg = g.total_degree()
            for u in _monomials_upto(nvars, degree - gdeg):
                row = np.zeros(len(cols), dtype=np.int64)
                for m, c in g.terms.items():
                    mm = tuple(a + b for a, b in zip(m, u))
                    row[self.col_index[mm]] = int(c)
                rows.append(row)
        M = np.array(rows, dtype=np.int64)
        self.rref, self.pivots = _rref_mod(M)

    def contains_monomial(self, mono):
        v = np.zeros(self.rref.shape[1], dtype=np.int64)
        v[self.col_index[mono]] = 1
        for r, c in enumerate(self.pivots):
            if v[c]:
                v = (v - v[c] * self.rref[r]) % P101
        return not v.any()


def test_criterion_1_groebner_vs_macaulay_oracle():
    start = time.monotonic()
    F = PrimeField(P101)
    variables = ("x", "y", "z")
    rng = random.Random(20260823)
    probe = _monomials_upto(3, 8)
    ok = True
    for trial in range(20):
        gens = []
        for _ in range(rng.randrange(1, 4)):
            terms = {}
            for _ in range(rng.randrange(1, 5)):
                mono = tuple(rng.randrange(5) for _ in range(3))
                if sum(mono) > 4:
                    continue
                terms[mono] = rng.randrange(1, P101)
            if terms:
                gens.append(Polynomial(variables, F, terms))
        if not gens:
            continue
        gb = buchberger(IdealPresentation(variables, F, gens))
        oracles = {12: MacaulayOracle(gens, 3, 12)}
        for mono in probe:
            m = Polynomial(variables, F, {mono: 1})
            engine = ideal_member(m, gb)
            oracle = oracles[12].contains_monomial(mono)
            if engine and not oracle:
                # degree-truncation artifact: retry with a deeper matrix
                if 14 not in oracles:
                    oracles[14] = MacaulayOracle(gens, 3, 14)
                oracle = oracles[14].contains_monomial(mono)
            if engine != oracle:
                ok = False
    report(1, ok, time.monotonic() - start, budget=60)


# ---------------------------------------------------------------------------
# criterion 2: ideal-operation identities

def test_criterion_2_ideal_identities():
    start = time.monotonic()
    V = ("x", "y", "z")

    def pp(t):
        return parse_polynomial(t, V, QQ)

    I = IdealPresentation(V, QQ, [pp("x^2"), pp("x*y")])
    J = IdealPresentation(V, QQ, [pp("x"), pp("z")])
    Q = ideal_quotient(I, J)
    ok = all(ideal_member(q * j, I)
             for q in Q.generators for j in J.generators)
    ok = ok and all(ideal_member(g, Q) for g in I.generators)
    K = IdealPresentation(V, QQ, [pp("x^2*y"), pp("x*z^2")])
    S1 = saturate(K, pp("x"))
    S2 = saturate(S1, pp("x"))
    ok = ok and ideal_equal(S1, S2)
    E = eliminate(IdealPresentation(V, QQ, [pp("y - x^2"), pp("z - x^3")]),
                  ("x",))
    expected = IdealPresentation(("y", "z"), QQ,
                                 [parse_polynomial("y^3 - z^2", ("y", "z"),
                                                   QQ)])
    ok = ok and ideal_equal(E, expected)
    report(2, ok, time.monotonic() - start, budget=5)


# ---------------------------------------------------------------------------
# criterion 3: smoothing ideal of a binomial-row algebra

def test_criterion_3_smoothing_ideal_radical():
    start = time.monotonic()
    ring = ("x", "Y1", "Y2")

    def pp(t):
        return parse_polynomial(t, ring, QQ)

    # I = (a1*Y1 + a2*Y2) with a1 = x, a2 = x^2
    rel = pp("x*Y1 + x^2*Y2")
    B = AlgebraPresentation(base_var="x", variables=("Y1", "Y2"), field=QQ,
                            relations=[rel])
    H = smoothing_ideal(B)
    ok = radical_member(pp("x"), H) and radical_member(pp("x^2"), H)
    target = IdealPresentation(ring, QQ, [pp("x"), pp("x^2"), rel])
    ok = ok and all(radical_member(g, target) for g in H.generators)
    report(3, ok, time.monotonic() - start)


# ---------------------------------------------------------------------------
# criterion 4: desingularization end to end, all six checks

def _geometric(precision, start=1):
    return {(k,): Fraction((-1) ** (k - start))
            for k in range(start, precision)}


def _node():
    B = AlgebraPresentation(
        base_var="x", variables=("Y1", "Y2"), field=QQ,
        relations=[parse_polynomial("Y1*Y2 - x^2", ("x", "Y1", "Y2"), QQ)])
    v = CompletionMorphism(
        base_var="x", field=QQ,
        images={"Y1": TruncatedSeries(("x",), QQ, {(1,): 1, (2,): 1}, 24),
                "Y2": TruncatedSeries(("x",), QQ, _geometric(24), 24)})
    return B, v


def test_criterion_4_desingularize_instances():
    start = time.monotonic()
    ok = True
    # (i) the quadric cone point with x(1+x), x/(1+x)
    B, v = _node()
    cert = desingularize(B, v)
    ok = ok and cert.all_passed() and len(cert.report) == 6 \
        and not cert.short_circuit
    # (ii) smooth short-circuit
    Bs = AlgebraPresentation(
        base_var="x", variables=("Y1",), field=QQ,
        relations=[parse_polynomial("Y1 - x^2", ("x", "Y1"), QQ)])
    vs = CompletionMorphism(
        base_var="x", field=QQ,
        images={"Y1": parse_series("x^2 + O(x^12)", ("x",), QQ)})
    cs = desingularize(Bs, vs)
    ok = ok and cs.all_passed() and cs.short_circuit and len(cs.report) == 6
    # (iii) three ring variables, parameter order c = 2
    B2 = AlgebraPresentation(
        base_var="x", variables=("Y1", "Y2"), field=QQ,
        relations=[parse_polynomial("Y1*Y2 - x^4", ("x", "Y1", "Y2"), QQ)])
    v2 = CompletionMorphism(
        base_var="x", field=QQ,
        images={"Y1": TruncatedSeries(("x",), QQ, {(2,): 1, (3,): 1}, 30),
                "Y2": TruncatedSeries(("x",), QQ, _geometric(30, start=2),
                                      30)})
    c2 = desingularize(B2, v2)
    ok = ok and c2.all_passed() and c2.c == 2 and len(c2.report) == 6
    report(4, ok, time.monotonic() - start, budget=120)


# ---------------------------------------------------------------------------
# criterion 5: Newton lifting to x^256

def test_criterion_5_newton_lift():
    start = time.monotonic()
    f = parse_polynomial("Y^2 - 1 - x", ("x", "Y"), QQ)
    y0 = TruncatedSeries.one(("x",), QQ, 4)

    def request(target):
        return LiftRequest(system=[f], base_var="x", yvars=("Y",),
                           y0={"Y": y0}, c=0, target=target)

    res = newton_lift(request(256))
    lift_elapsed = time.monotonic() - start
    y = res.values["Y"]
    xs = TruncatedSeries.variable(("x",), QQ, "x", 256)
    one = TruncatedSeries.one(("x",), QQ, 256)
    ok = (y * y - one - xs).is_zero() and res.iterations <= 9
    prev = None
    for o in res.trace:
        if prev is not None and o is not None:
            ok = ok and o >= min(256, 2 * prev)
        prev = o
    # truncation stability: a lower-target run is a truncation of this one
    res64 = newton_lift(request(64))
    ok = ok and y.truncate(64) == res64.values["Y"]
    # the 5 s budget covers the x^256 lift itself
    report(5, ok and lift_elapsed < 5, time.monotonic() - start)


# ---------------------------------------------------------------------------
# criterion 6: Weierstrass preparation invariants and overlap agreement

def _random_regular(rng, p, precision):
    terms = {}
    for _ in range(6):
        mono = (rng.randrange(precision), rng.randrange(precision))
        if sum(mono) >= precision:
            continue
        terms[mono] = Fraction(rng.randrange(-9, 10), rng.randrange(1, 4))
    for mono in list(terms):
        if mono[0] == 0 and mono[1] < p:
            del terms[mono]
    terms[(0, p)] = Fraction(1)
    return TruncatedSeries(("y", "x"), QQ, terms, precision)


def test_criterion_6_weierstrass():
    start = time.monotonic()
    rng = random.Random(606)
    ok = True
    for _ in range(10):
        p = rng.randrange(1, 4)
        f16 = _random_regular(rng, p, 16)
        f12 = TruncatedSeries(f16.variables, QQ, f16.terms, 12)
        d12 = weierstrass_prepare(f12)
        ok = ok and d12.p == p
        ok = ok and (d12.unit * d12.wpoly()).terms == f12.terms
        ok = ok and not QQ.is_zero(d12.unit.constant_coefficient())
        ok = ok and all(QQ.is_zero(z.constant_coefficient()) for z in d12.zs)
        # overlap agreement with the precision-16 run on the region where
        # both factorizations are determined by the shared coefficients
        d16 = weierstrass_prepare(f16)
        cut = 12 - p
        ok = ok and d16.unit.truncate(cut).terms == d12.unit.truncate(cut).terms
        ok = ok and all(
            a.truncate(cut).terms == b.truncate(cut).terms
            for a, b in zip(d16.zs, d12.zs))
    report(6, ok, time.monotonic() - start)


# ---------------------------------------------------------------------------
# criterion 7: linear factorization reconstruction

def _reconstruct(lf, j):
    base = ("x",)
    acc = TruncatedSeries.from_polynomial(lf.particular[j], lf.precision)
    for z, gen in zip(lf.z, lf.kernel):
        gj = gen[j] if gen[j].variables == base else gen[j].restrict(base)
        acc = acc + z * TruncatedSeries.from_polynomial(gj, lf.precision)
    return acc


def test_criterion_7_linear_factorization():
    start = time.monotonic()
    base = ("x",)

    def pp(t):
        return parse_polynomial(t, base, QQ)

    ok = True
    # single row [x  x^2], solution a series multiple of the kernel direction
    mu = TruncatedSeries(base, QQ, _geometric(12, start=0), 12)   # 1/(1+x)
    xs = TruncatedSeries.variable(base, QQ, "x", 12)
    yprime = [-(xs * mu), mu]                                     # mu*(-x, 1)
    lf = linear_factor([[pp("x"), pp("x^2")]], [Polynomial.zero(base, QQ)],
                       yprime, "x")
    ok = ok and len(lf.kernel) == 1
    ok = ok and all(_reconstruct(lf, j) == yprime[j] for j in range(2))
    # 2 x 3 system with a nonzero right-hand side
    a = [[pp("1"), pp("x"), pp("0")], [pp("0"), pp("1"), pp("x")]]
    y3 = TruncatedSeries(base, QQ, _geometric(10, start=0), 10)
    x10 = TruncatedSeries.variable(base, QQ, "x", 10)
    y2 = TruncatedSeries.one(base, QQ, 10) - x10 * y3
    y1 = TruncatedSeries.from_polynomial(pp("1 + x"), 10) - x10 * y2
    lf2 = linear_factor(a, [pp("1 + x"), pp("1")], [y1, y2, y3], "x")
    ok = ok and all(_reconstruct(lf2, j) == [y1, y2, y3][j] for j in range(3))
    report(7, ok, time.monotonic() - start)


# ---------------------------------------------------------------------------
# criterion 8: module-isomorphism candidates

def test_criterion_8_module_iso():
    start = time.monotonic()
    base = ("x",)
    ok = True
    # identity candidate accepted for (u, u)
    u = [[TruncatedSeries.variable(base, QQ, "x", 8)]]
    sys_same = module_iso_system(u, [[TruncatedSeries.variable(base, QQ, "x",
                                                               8)]])
    one = TruncatedSeries.one(base, QQ, 8)
    ok = ok and check_candidate(sys_same,
                                {n: one for n in sys_same.unknowns}, 8)

    # coker(x) vs coker(x^2) over F_5: no candidate with polynomial entries
    # of degree <= 2 can satisfy the equations.  The sweep is factored:
    # equation u*X = Y*v forces X(0) = 0, and det(X)*W = 1 forces X(0) != 0,
    # and no other equation mentions both Y and W, so checking the (X, Y)
    # and (X, W) pairs separately covers every full candidate.
    F5 = PrimeField(5)
    prec = 6
    xs = TruncatedSeries.variable(base, F5, "x", prec)
    x2 = xs * xs
    polys = []
    for c0 in range(5):
        for c1 in range(5):
            for c2 in range(5):
                polys.append(TruncatedSeries(
                    base, F5, {(0,): c0, (1,): c1, (2,): c2}, prec))
    eq1_pass_x = set()
    for i, X in enumerate(polys):
        lhs = xs * X
        for Y in polys:
            if (lhs - Y * x2).is_zero():
                eq1_pass_x.add(i)
                break
    one5 = TruncatedSeries.one(base, F5, prec)
    eq3_pass_x = set()
    for i, X in enumerate(polys):
        # det(X) = X for the 1x1 block
        if any((X * W - one5).is_zero() for W in polys):
            eq3_pass_x.add(i)
    ok = ok and not (eq1_pass_x & eq3_pass_x)

    # spot-check the full candidate interface on random sweep points
    sys_diff = module_iso_system([[xs]], [[x2]])
    rng = random.Random(808)
    for _ in range(200):
        cand = {n: polys[rng.randrange(len(polys))]
                for n in sys_diff.unknowns}
        ok = ok and not check_candidate(sys_diff, cand, prec)
    report(8, ok, time.monotonic() - start)


# ---------------------------------------------------------------------------
# criterion 9: determinism

def test_criterion_9_determinism():
    start = time.monotonic()
    B, v = _node()
    first = emit_certificate(desingularize(B, v))
    B2, v2 = _node()
    second = emit_certificate(desingularize(B2, v2))
    report(9, first == second, time.monotonic() - start)
