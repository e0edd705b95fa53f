"""The acceptance suite: ten end-to-end checks, shared by the tests and ``selftest``.

Each check returns a :class:`CriterionResult`.  The ``quick`` profile trims
the field lists and sample sizes so the whole run stays within a minute;
``full`` runs everything at the stated sizes.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import chainp
from . import fields as fl
from . import fpgroup as fp
from . import quadform as qf
from . import residues as rs
from . import symbolic as sy
from . import wittring as wr
from .errors import IsometryFails
from .fields import FieldDesc, Place
from .quadform import QuadForm
from .symbolic import SymbolExpr

DEFAULT_SEED = 20240601


@dataclass
class CriterionResult:
    number: int
    name: str
    ok: bool
    seconds: float = 0.0
    budget: float = 0.0
    details: list = dc_field(default_factory=list)
    failures: list = dc_field(default_factory=list)

    def line(self):
        mark = "PASS" if self.ok else "FAIL"
        return f"[{mark}] criterion {self.number:2d}: {self.name} ({self.seconds:.1f}s / {self.budget:.0f}s)"

    def to_json(self):
        return {"criterion": self.number, "name": self.name, "ok": self.ok,
                "seconds": round(self.seconds, 3), "budget": self.budget,
                "details": self.details, "failures": self.failures[:20]}


class _Run:
    def __init__(self, number, name, budget):
        self.res = CriterionResult(number, name, True, budget=budget)
        self.t0 = time.perf_counter()

    def check(self, cond, what):
        if not cond:
            self.res.ok = False
            self.res.failures.append(what)
        return cond

    def done(self):
        self.res.seconds = time.perf_counter() - self.t0
        if self.res.seconds > self.res.budget:
            self.res.ok = False
            self.res.failures.append(f"over budget: {self.res.seconds:.1f}s")
        return self.res


def _factors(G):
    free, tors = G.invariant_factors()
    return {"free": free, "torsion": tors}


def _witt_target(p):
    return {"free": 0, "torsion": [4] if p % 4 == 3 else [2, 2]}


# ---------------------------------------------------------------------------
# 1, 2: presentations of W, I and I^2
# ---------------------------------------------------------------------------

def criterion_1(profile="full", seed=DEFAULT_SEED):
    run = _Run(1, "Witt ring presentations match the brute-force oracle", 10.0 * 5)
    primes = [3, 5, 7, 11, 13] if profile == "full" else [3, 5, 7]
    for p in primes:
        t0 = time.perf_counter()
        F = FieldDesc.prime(p)
        rep = sy.presentation_check_I_n(F, 0)
        dt = time.perf_counter() - t0
        lit = sy.presentation_I_n(F, 0, literal=True).invariant_factors()
        run.res.details.append({"p": p, **rep,
                                "literal_sign_variant": {"free": lit[0], "torsion": lit[1]}})
        run.check(rep["ok"], f"p={p}: presented {rep['presented']} vs oracle {rep['oracle']}")
        run.check(rep["presented"] == _witt_target(p), f"p={p}: closed form {_witt_target(p)}")
        run.check(dt <= 10.0, f"p={p}: {dt:.1f}s over the 10s limit")
    return run.done()


def criterion_2(profile="full", seed=DEFAULT_SEED):
    run = _Run(2, "I and I^2 presentations", 30.0)
    primes = [3, 5, 7, 11, 13] if profile == "full" else [3, 5, 7]
    for p in primes:
        F = FieldDesc.prime(p)
        for n, want in ((1, {"free": 0, "torsion": [2]}), (2, {"free": 0, "torsion": []})):
            rep = sy.presentation_check_I_n(F, n)
            run.res.details.append({"p": p, **rep})
            run.check(rep["ok"], f"p={p} n={n}: presented {rep['presented']} vs oracle {rep['oracle']}")
            run.check(rep["presented"] == want, f"p={p} n={n}: expected {want}")
    return run.done()


# ---------------------------------------------------------------------------
# 3, 4, 5: K-theory comparisons
# ---------------------------------------------------------------------------

def _k_primes(profile):
    return [3, 5, 7] if profile == "full" else [3]


def criterion_3(profile="full", seed=DEFAULT_SEED):
    run = _Run(3, "Witt K-theory maps isomorphically onto I^n, stable in eta_max", 300.0)
    for p in _k_primes(profile):
        F = FieldDesc.prime(p)
        for n in range(-1, 4):
            rep = sy.verify_theta(F, n, 2)
            stab = {em: _factors(sy.present_group("WK", F, n, em)) for em in (1, 2, 3)}
            run.res.details.append({"p": p, "n": n, "theta": rep["ok"], "source": rep["source"],
                                    "target": rep["target"], "stabilization": stab})
            run.check(rep["ok"], f"p={p} n={n}: theta not an isomorphism")
            run.check(len({str(v) for v in stab.values()}) == 1, f"p={p} n={n}: unstable {stab}")
    return run.done()


def _mwk_target(p, n):
    if n < 0:
        return _witt_target(p)
    if n == 0:
        return {"free": 1, "torsion": [2]}
    if n == 1:
        return {"free": 0, "torsion": [p - 1] if p > 2 else []}
    return {"free": 0, "torsion": []}


def criterion_4(profile="full", seed=DEFAULT_SEED):
    run = _Run(4, "Milnor-Witt K-theory is the pullback of I^n and K^M_n", 300.0)
    for p in _k_primes(profile):
        F = FieldDesc.prime(p)
        oracle_w = _factors(sy.oracle_ideal_group(F, 0))
        for n in range(-2, 4):
            rep = sy.verify_pullback(F, n, 2)
            want = oracle_w if n < 0 else _mwk_target(p, n)
            got = rep["corners"]["MWK"]
            run.res.details.append({"p": p, "n": n, "ok": rep["ok"], "corners": rep["corners"]})
            run.check(rep["ok"], f"p={p} n={n}: pullback check failed")
            run.check(got == want, f"p={p} n={n}: MWK {got}, expected {want}")
            run.check(rep["corners"]["pullback"] == want, f"p={p} n={n}: pullback corner")
    return run.done()


def criterion_5(profile="full", seed=DEFAULT_SEED):
    run = _Run(5, "0 -> W-theory_(n+1) -> MWK_n -> K^M_n -> 0 is exact", 300.0)
    for p in _k_primes(profile):
        F = FieldDesc.prime(p)
        for n in range(-2, 4):
            rep = sy.verify_exact_sequence(F, n, 2)
            run.res.details.append({"p": p, "n": n, "ok": rep["ok"], "groups": rep["groups"]})
            run.check(rep["ok"], f"p={p} n={n}: sequence not exact")
    return run.done()


# ---------------------------------------------------------------------------
# 6: identities in Witt and Milnor-Witt K-theory
# ---------------------------------------------------------------------------

def identity_suite(F: FieldDesc):
    """(name, expression) pairs that must vanish, quantified over all units."""
    W = lambda *a: sy.sym("WK", F, *a)
    one = sy.one("WK", F)
    eta = sy.eta("WK", F)
    bra = lambda a: sy.bracket_mw(F, a)
    units = list(F.units())
    m1 = F(-1)
    out = [("<1>=1", bra(F.one) - one), ("<-1>=-1", bra(m1) + one), ("[1]=0", W(F.one))]
    for a in units:
        out += [
            (f"[-a][a]=0 a={a}", W(-a) * W(a)),
            (f"[a][-a]=0 a={a}", W(a) * W(-a)),
            (f"[a][a]=[a][-1] a={a}", W(a) * W(a) - W(a) * W(m1)),
            (f"<a><a^-1>=1 a={a}", bra(a) * bra(a.inverse()) - one),
        ]
    for a, b in itertools.product(units, repeat=2):
        out += [
            (f"[ab^2]=[a] a={a} b={b}", W(a * b * b) - W(a)),
            (f"<ab>=<a><b> a={a} b={b}", bra(a * b) - bra(a) * bra(b)),
            (f"eta[a][b]=eta[b][a] a={a} b={b}", eta * (W(a) * W(b) - W(b) * W(a))),
            (f"<a>[b]=[b]<a> a={a} b={b}", bra(a) * W(b) - W(b) * bra(a)),
            (f"[a][b]=[b][a] a={a} b={b}", W(a) * W(b) - W(b) * W(a)),
            (f"[b^-1]=-<b^-1>[b] b={b}", W(b.inverse()) + bra(b.inverse()) * W(b)),
            (f"[ab^-1]=[a]-<ab^-1>[b] a={a} b={b}", W(a / b) - W(a) + bra(a / b) * W(b)),
        ]
        if not (a + b).is_zero():
            s = a + b
            out += [
                (f"<a>+<b>=<a+b>+<ab(a+b)> a={a} b={b}", bra(a) + bra(b) - bra(s) - bra(a * b * s)),
                (f"[a]+[b]=[a+b]+[ab(a+b)] a={a} b={b}", W(a) + W(b) - W(s) - W(a * b * s)),
                (f"[a+b][ab(a+b)]=[a][b] a={a} b={b}", W(s) * W(a * b * s) - W(a) * W(b)),
            ]
    for r, s, t in itertools.product(units, repeat=3):
        out.append((f"[r][st]+[s][t]=[rs][t]+[r][s] r={r} s={s} t={t}",
                    W(r) * W(s * t) + W(s) * W(t) - W(r * s) * W(t) - W(r) * W(s)))
    # Milnor-Witt: eta * h = 0 and its multiples by symbols
    M = lambda *a: sy.sym("MWK", F, *a)
    me = sy.eta("MWK", F)
    h = 2 * sy.one("MWK", F) + me * M(m1)
    out.append(("eta*h=0", me * h))
    for a in units:
        out.append((f"{{a}}*eta*h=0 a={a}", M(a) * me * h))
        out.append((f"eta*h*{{a}}=0 a={a}", me * h * M(a)))
    return out


def criterion_6(profile="full", seed=DEFAULT_SEED):
    run = _Run(6, "identity suite holds in the truncated presentations over F_7", 60.0)
    F = FieldDesc.prime(7)
    suite = identity_suite(F)
    for name, e in suite:
        run.check(sy.normal_form_zero(e, F, 2), f"identity fails: {name}")
    run.res.details.append({"field": F.tag, "identities": len(suite)})
    return run.done()


# ---------------------------------------------------------------------------
# 7: chain p-equivalence
# ---------------------------------------------------------------------------

def criterion_7(profile="full", seed=DEFAULT_SEED):
    run = _Run(7, "isometric Pfister tuples are chain p-equivalent", 60.0)
    primes = [5, 7] if profile == "full" else [5]
    for p in primes:
        F = FieldDesc.prime(p)
        reps = [c.rep for c in fl.square_class_reps(F)]
        for n in (2, 3):
            tuples = [chainp.PfisterTuple(F, t) for t in itertools.product(reps, repeat=n)]
            found = rejected = 0
            for t1, t2 in itertools.product(tuples, repeat=2):
                iso = qf.is_isometric(t1.expand(), t2.expand())
                if iso:
                    cert = chainp.find_chain(t1, t2)
                    ok = chainp.verify_chain(t1, t2, cert).ok
                    run.check(ok, f"p={p}: certificate for {t1} -> {t2} does not verify")
                    found += ok
                else:
                    try:
                        chainp.find_chain(t1, t2)
                        run.check(False, f"p={p}: {t1} -> {t2} passed the isometry gate")
                    except IsometryFails:
                        rejected += 1
            run.res.details.append({"p": p, "n": n, "chains": found, "rejected": rejected})
    Q = FieldDesc.rationals()
    t1 = chainp.PfisterTuple(Q, (2, 3))
    t2 = chainp.PfisterTuple(Q, (2, -3))
    cert = chainp.find_chain(t1, t2, support=[-1, 2, 3])
    run.check(len(cert) == 1, f"QQ: expected a 1-step certificate, got {len(cert)}")
    run.check(chainp.verify_chain(t1, t2, cert).ok, "QQ: certificate does not verify")
    run.res.details.append({"QQ": cert.to_json()})
    # over finite fields every pair above is isometric; Q supplies a rejection
    try:
        chainp.find_chain(chainp.PfisterTuple(Q, (-1, -1)), chainp.PfisterTuple(Q, (1, 1)))
        run.check(False, "QQ: <<-1,-1>> -> <<1,1>> passed the isometry gate")
    except IsometryFails:
        pass
    return run.done()


# ---------------------------------------------------------------------------
# 8: unit-value decompositions
# ---------------------------------------------------------------------------

def criterion_8(profile="full", seed=DEFAULT_SEED):
    run = _Run(8, "unit-value decompositions and the small-field exception", 60.0)
    for p in (7, 11):
        F = FieldDesc.prime(p)
        units = list(F.units())
        count = 0
        for x, y in itertools.product(units, repeat=2):
            phi, psi = QuadForm(F, (x,)), QuadForm(F, (y,))
            for a in units:
                got = qf.decompose_value(phi, psi, a)
                ok = got is not None and phi(got[0]) + psi(got[1]) == a \
                    and not phi(got[0]).is_zero() and not psi(got[1]).is_zero()
                run.check(ok, f"p={p}: no decomposition of {a} in <{x}> + <{y}>")
                count += 1
        run.res.details.append({"p": p, "rank1_cases": count})
    for p in (3, 5):
        F = FieldDesc.prime(p)
        one = QuadForm(F, (1,))
        run.check(qf.decompose_value(one, one, 1) is None, f"p={p}: <1>+<1> should not split 1")
        units = list(F.units())
        count = 0
        forms = [QuadForm(F, e) for e in itertools.combinations_with_replacement(units, 3)]
        for phi, psi in itertools.product(forms, repeat=2):
            for a in units:
                got = qf.decompose_value(phi, psi, a)
                ok = got is not None and phi(got[0]) + psi(got[1]) == a \
                    and not phi(got[0]).is_zero() and not psi(got[1]).is_zero()
                run.check(ok, f"p={p}: rank-3 decomposition of {a} failed for {phi}, {psi}")
                count += 1
        run.res.details.append({"p": p, "rank3_cases": count})
    return run.done()


# ---------------------------------------------------------------------------
# 9: residues
# ---------------------------------------------------------------------------

def _zero_symbol(e: SymbolExpr):
    return sy.symbol_is_zero(e, 2)


def random_rational(rng: random.Random, primes=(2, 3, 5, 7), max_exp=2):
    x = Fraction(rng.choice([1, -1]))
    for p in primes:
        x *= Fraction(p) ** rng.randint(-max_exp, max_exp)
    return x


def random_ratfun(rng: random.Random, F: FieldDesc, max_deg=2):
    def poly():
        d = rng.randint(0, max_deg)
        c = [rng.randrange(F.p) for _ in range(d)] + [rng.randrange(1, F.p)]
        return tuple(c)

    return F.ratfun_elem(poly(), poly())


def _sample_elem(rng, F):
    if F.kind == fl.RATIONALS:
        return F(random_rational(rng))
    return random_ratfun(rng, F)


def _sample_place(rng, F):
    if F.kind == fl.RATIONALS:
        return Place.prime(rng.choice([3, 5, 7]))
    choices = [Place.irreducible(F.p, (0, 1)), Place.irreducible(F.p, (1, 1)),
               Place.infinity(F.p), Place.irreducible(F.p, (1, 0, 1))]
    return rng.choice(choices)


def _sample_unit_at(rng, F, v):
    while True:
        c = _sample_elem(rng, F)
        if fl.valuation(c, v) == 0:
            return c


def residue_examples():
    """The worked residue examples: (label, computed, expected) triples."""
    Q = FieldDesc.rationals()
    v7 = Place.prime(7)
    F7 = FieldDesc.prime(7)
    out = []
    for ents, want in (((7,), (1,)), ((3,), None), ((14,), (2,))):
        got = rs.residue_witt(QuadForm(Q, ents), v7)
        want = wr.zero_class(F7) if want is None else wr.witt_class(QuadForm(F7, want))
        out.append((f"residue_witt <{ents[0]}> at 7", got, want))
    KM = lambda *a: sy.sym("KM", Q, *a)
    MW = lambda *a: sy.sym("MWK", Q, *a)
    out.append(("residue_milnor l(7)l(3) at 7", rs.residue_milnor(KM(7, 3), v7), sy.sym("KM", F7, 3)))
    out.append(("residue_milnor l(3)l(5) at 7", rs.residue_milnor(KM(3, 5), v7), SymbolExpr("KM", F7)))
    out.append(("residue_milnor l(7)l(7) at 7", rs.residue_milnor(KM(7, 7), v7), sy.sym("KM", F7, 6)))
    out.append(("residue_mw {7,3} at 7", rs.residue_mw(MW(7, 3), v7, Q(7)), sy.sym("MWK", F7, 3)))
    out.append(("residue_mw {3,5} at 7", rs.residue_mw(MW(3, 5), v7), SymbolExpr("MWK", F7)))
    out.append(("residue_mw eta{7,3,5} at 7", rs.residue_mw(sy.eta("MWK", Q) * MW(7, 3, 5), v7),
                sy.eta("MWK", F7) * sy.sym("MWK", F7, 3, 5)))
    return out


def _random_form(rng, F):
    return QuadForm(F, tuple(_sample_elem(rng, F) for _ in range(rng.randint(1, 3))))


def _random_symbol(rng, F, theory, k=None, r=None):
    k = rng.randint(1, 2) if k is None else k
    r = (rng.randint(0, 1) if theory == "MWK" else 0) if r is None else r
    return SymbolExpr.word(theory, F, [_sample_elem(rng, F) for _ in range(k)], r)


def criterion_9(profile="full", seed=DEFAULT_SEED):
    run = _Run(9, "residue formulas, uniformizer independence, pair coherence", 120.0)
    for label, got, want in residue_examples():
        run.check(got == want, f"{label}: got {got}, expected {want}")
    rng = random.Random(seed)
    n_indep = 500 if profile == "full" else 100
    n_pair = 200 if profile == "full" else 50
    fields_ = [FieldDesc.rationals(), FieldDesc.ratfun(3)]
    for i in range(n_indep):
        F = fields_[i % 2]
        v = _sample_place(rng, F)
        pi = v.default_uniformizer()
        c = _sample_unit_at(rng, F, v)
        kind = rng.choice(["W", "KM", "MWK"])
        if kind == "W":
            e = _random_form(rng, F)
            z1 = rs.residue_witt(e, v, pi).is_zero()
            z2 = rs.residue_witt(e, v, c * pi).is_zero()
        else:
            e = _random_symbol(rng, F, kind)
            z1 = _zero_symbol(rs.residue(e, v, pi))
            z2 = _zero_symbol(rs.residue(e, v, c * pi))
        run.check(z1 == z2, f"kernel depends on the uniformizer: {kind} {e} at {v}, c={c}")
    for i in range(n_pair):
        F = fields_[i % 2]
        v = _sample_place(rng, F)
        e = _random_symbol(rng, F, "MWK", k=rng.randint(1, 3), r=rng.randint(0, 2))
        d = rs.residue_mw(e, v)
        k = v.residue_field()
        lhs = rs.residue_witt(sy.upsilon_element(e), v)
        rhs = sy.upsilon_element(d) if d.terms else wr.zero_class(k)
        run.check(lhs == rhs, f"Upsilon square fails on {e.tag()} at {v}")
        km = rs.residue_milnor(sy.varpi_element(e), v)
        km2 = sy.varpi_element(d)
        run.check(_zero_symbol(km - km2), f"varpi square fails on {e.tag()} at {v}")
    run.res.details.append({"independence_samples": n_indep, "pair_samples": n_pair, "seed": seed})
    return run.done()


# ---------------------------------------------------------------------------
# 10: Hilbert product formula and SNF invariants
# ---------------------------------------------------------------------------

def criterion_10(profile="full", seed=DEFAULT_SEED):
    run = _Run(10, "Hilbert product formula and Smith normal form invariants", 60.0)
    rng = random.Random(seed)
    n = 1000 if profile == "full" else 200
    Q = FieldDesc.rationals()
    small_primes = [p for p in range(2, 51) if fl.factor_int(p)[1] == {p: 1}]
    for _ in range(n):
        a = Q(random_rational(rng, tuple(rng.sample(small_primes, 3)), 3))
        b = Q(random_rational(rng, tuple(rng.sample(small_primes, 3)), 3))
        ps = {2}
        for x in (a, b):
            ps |= set(fl.factor(x.value)[1])
        prod = fl.hilbert_symbol(a, b, Place.real())
        for p in ps:
            prod *= fl.hilbert_symbol(a, b, Place.prime(p))
        run.check(prod == 1, f"product formula fails for ({a}, {b})")
    for _ in range(n):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        A = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
        U, D, V = fp.smith_normal_form(A)
        run.check(fp.mat_mul(fp.mat_mul(U, A), V) == D, f"UAV != D for {A}")
        run.check(abs(fp.det(U)) == 1 and abs(fp.det(V)) == 1, f"non-unimodular transform for {A}")
        d = fp.diagonal(D)
        nz = [x for x in d if x]
        run.check(all(x > 0 for x in nz) and all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1)),
                  f"divisibility chain broken: {d}")
        run.check(all(D[i][j] == 0 for i in range(rows) for j in range(cols) if i != j),
                  f"D not diagonal for {A}")
    run.res.details.append({"samples": n, "seed": seed})
    return run.done()


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(profile="full", seed=DEFAULT_SEED, only=None, echo=None):
    results = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        res = fn(profile, seed)
        if echo:
            echo(res.line())
        results.append(res)
    return results
