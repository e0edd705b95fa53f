import random

import pytest
from hypothesis import given, settings, strategies as st

from milnorwitt import fpgroup as fp
from milnorwitt import quadform as qf
from milnorwitt import symbolic as sy
from milnorwitt import wittring as wr
from milnorwitt.errors import MixedDegree, UnsupportedField
from milnorwitt.fields import FieldDesc
from milnorwitt.quadform import QuadForm

from oracles import brute_isotropic

F3, F5, F7 = FieldDesc.prime(3), FieldDesc.prime(5), FieldDesc.prime(7)
Q = FieldDesc.rationals()


def factors(P):
    free, tors = P.invariant_factors()
    return free, list(tors)


def witt_group_oracle(F):
    """Invariant factors of W(F_q) from brute isotropy of <1,1>: Z/4 or (Z/2)^2."""
    if brute_isotropic(QuadForm(F, (1, 1))):
        return 0, [2, 2]
    return 0, [4]


# --- expressions --------------------------------------------------------------

def test_degree_bookkeeping():
    x = sy.sym("MWK", F7, 3, 5)
    assert x.degree == 2
    assert sy.eta("MWK", F7, 2).degree == -2
    assert (sy.eta("MWK", F7) * x).degree == 1
    with pytest.raises(MixedDegree):
        sy.sym("MWK", F7, 3) + sy.sym("MWK", F7, 3, 3)
    with pytest.raises(ValueError):
        sy.SymbolExpr("KM", F7, {(1, (3,)): 1})


def test_eta_bound_headroom():
    assert sy.eta_bound(-1, 2) == 5
    assert sy.eta_bound(1, 2) == 3
    assert sy.eta_bound(3, 2) == 2


# --- group presentations ---------------------------------------------------------

@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_km1_is_unit_group(p):
    F = FieldDesc.prime(p)
    # F_p^* is cyclic of order p-1
    assert factors(sy.present_group("KM", F, 1)) == (0, [p - 1])


@pytest.mark.parametrize("p", [3, 5, 7])
def test_km2_vanishes(p):
    assert factors(sy.present_group("KM", FieldDesc.prime(p), 2)) == (0, [])


@pytest.mark.parametrize("p", [3, 5, 7])
def test_mwk_negative_degree_is_witt_group(p):
    F = FieldDesc.prime(p)
    assert factors(sy.present_group("MWK", F, -1)) == witt_group_oracle(F)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_mwk_degree_zero_is_grothendieck_witt(p):
    # GW(F_q) = Z (rank) + Z/2 (discriminant)
    assert factors(sy.present_group("MWK", FieldDesc.prime(p), 0)) == (1, [2])


@pytest.mark.parametrize("p", [3, 5, 7])
def test_mwk1_is_unit_group(p):
    # I -> I/I^2 is an isomorphism over F_p, so the pullback collapses to F_p^*
    assert factors(sy.present_group("MWK", FieldDesc.prime(p), 1)) == (0, [p - 1])


def test_presentation_caching():
    assert sy.present_group("KM", F7, 1) is sy.present_group("KM", F7, 1)


# --- relations ------------------------------------------------------------------

@pytest.mark.parametrize("p", [3, 5, 7])
def test_derived_relations(p):
    F = FieldDesc.prime(p)
    e = lambda k=1: sy.eta("MWK", F, k)
    s = lambda *a: sy.sym("MWK", F, *a)
    for a in range(2, p):
        # {a}{-a} = 0
        assert sy.normal_form_zero(s(a, -a % p))
        for c in range(2, p):
            # product rule: {ac} = {a} + {c} + eta{a}{c}
            assert sy.normal_form_zero(s(a * c % p) - s(a) - s(c) - e() * s(a, c))
    # eta h = 0 with h = 2 + eta{-1}
    h = 2 * sy.one("MWK", F) + e() * s(p - 1)
    assert sy.normal_form_zero(e() * h)
    assert not sy.normal_form_zero(e())


def test_steinberg_in_km():
    F = F7
    for a in range(2, 7):
        assert sy.normal_form_zero(sy.sym("KM", F, a, (1 - a) % 7))
    assert not sy.normal_form_zero(sy.sym("KM", F, 3))
    # {3} generates K^M_1(F_7)
    assert sy.normal_form_zero(6 * sy.sym("KM", F, 3))
    assert not sy.normal_form_zero(3 * sy.sym("KM", F, 3))


def test_eta_commutes_with_symbols():
    F = F3
    x = sy.sym("MWK", F, 2)
    e = sy.eta("MWK", F)
    lhs = sy.SymbolExpr("MWK", F, {(1, (F(2),)): 1})
    assert (e * x) == lhs == (x * e)


@pytest.mark.parametrize("n", [-1, 0, 1, 2])
def test_other_sign_in_the_product_rule_gives_the_same_abstract_groups(n):
    for F in (F3, F5):
        std = sy.present_group("MWK", F, n)
        lit = sy.present_group("MWK", F, n, literal_mw2=True)
        assert std is not lit and lit.literal_mw2 and not std.literal_mw2
        assert factors(std) == factors(lit)


# --- zero tests -------------------------------------------------------------------

def _random_mwk(F, n, rng, length=3):
    units = [F(a) for a in range(1, F.p)]
    terms = {}
    for _ in range(length):
        r = rng.randrange(max(0, -n), max(0, -n) + 2)
        letters = tuple(rng.choice(units) for _ in range(n + r))
        terms[(r, letters)] = terms.get((r, letters), 0) + rng.randrange(-2, 3)
    return sy.SymbolExpr("MWK", F, terms)


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(-1, 2))
def test_invariant_zero_agrees_with_presentation(seed, n):
    rng = random.Random(seed)
    e = _random_mwk(F5, n, rng)
    if e.is_zero_expr():
        return
    assert sy.invariant_zero(e) == sy.normal_form_zero(e)


def test_invariant_zero_handles_long_eta_powers():
    F = FieldDesc.extension(3, (1, 0, 1))
    # h eta^k = 0 for every k
    e = sy.eta("MWK", F, 6) * (2 * sy.one("MWK", F) + sy.eta("MWK", F) * sy.sym("MWK", F, -1))
    assert sy.invariant_zero(e)
    assert not sy.invariant_zero(sy.eta("MWK", F, 7))
    assert sy.symbol_is_zero(e)


def test_invariant_zero_needs_finite_field():
    with pytest.raises(UnsupportedField):
        sy.invariant_zero(sy.sym("KM", Q, 3))


# --- comparison maps -------------------------------------------------------------

def _apply(m, e, target_vec):
    got = m.hom.apply(m.source.vector(e))
    return m.hom.target.element_is_zero({i: got.get(i, 0) - target_vec.get(i, 0)
                                         for i in set(got) | set(target_vec)})


@pytest.mark.parametrize("n", [-1, 0, 1, 2])
def test_theta_is_an_isomorphism(n):
    r = sy.verify_theta(F5, n)
    assert r["well_defined"] and r["isomorphism"] and r["ok"]


def test_theta_on_elements():
    m = sy.theta_map(F7, 1)
    target = sy.ideal_group(F7, 1)
    e = sy.sym("WK", F7, 3)
    want = target.vector(wr.witt_class(qf.pfister(F7, 3).expand()))
    assert _apply(m, e, {i: x for i, x in enumerate(want) if x})


def test_upsilon_sign_and_varpi_kill_eta():
    e = sy.sym("MWK", F7, 3)
    w = sy.upsilon_element(e)
    assert w == -wr.witt_class(qf.pfister(F7, 3).expand())
    assert sy.varpi_element(sy.eta("MWK", F7) * sy.sym("MWK", F7, 3, 5)).is_zero_expr()
    assert sy.varpi_element(e) == sy.sym("KM", F7, 3)


def test_e_map_degree_one():
    m = sy.e_map(F7, 1)
    assert m.well_defined
    # l(3) generates K^M_1(F_7) and maps onto the nonzero class of I/I^2
    assert fp.is_surjective(m.hom)


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("n", [-1, 0, 1, 2])
def test_pullback_square(p, n):
    r = sy.verify_pullback(FieldDesc.prime(p), n)
    assert r["commutes"] and r["injective"] and r["surjective"] and r["ok"]


@pytest.mark.parametrize("n", [-1, 0, 1])
def test_exact_sequence(n):
    r = sy.verify_exact_sequence(F7, n)
    assert r["epsilon_injective"] and r["exact_middle"] and r["varpi_surjective"]


def test_stabilization_in_eta_max():
    a = factors(sy.present_group("MWK", F5, -1, 2))
    b = factors(sy.present_group("MWK", F5, -1, 3))
    assert a == b


# --- presentations of I^n ------------------------------------------------------------

@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_presentation_of_powers_of_I(p, n):
    assert sy.presentation_check_I_n(FieldDesc.prime(p), n)["ok"]


@pytest.mark.parametrize("p", [3, 7, 11])
def test_literal_witt_relator_gives_an_infinite_group(p):
    free, _ = sy.presentation_I_n(FieldDesc.prime(p), 0, literal=True).invariant_factors()
    assert free == 1
    free, _ = sy.presentation_I_n(FieldDesc.prime(p), 0).invariant_factors()
    assert free == 0


def test_literal_relator_is_not_hyperbolic_over_f3():
    # <1> - <-1> corresponds to <1,1>, anisotropic over F_3
    assert not brute_isotropic(QuadForm(F3, (1, 1)))
