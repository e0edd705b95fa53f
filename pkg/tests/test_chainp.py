import itertools
import random

import pytest

from milnorwitt import quadform as qf
from milnorwitt.chainp import (ChainCertificate, ChainStep, PfisterTuple, find_chain,
                               simply_equivalent, support_subgroup, verify_chain)
from milnorwitt.errors import IsometryFails, LengthMismatch, NotFoundWithinSupport, UnsupportedField
from milnorwitt.fields import FieldDesc
from milnorwitt.parsing import parse_element

from oracles import brute_isotropic, brute_values

Q = FieldDesc.rationals()
F3, F5, F7 = FieldDesc.prime(3), FieldDesc.prime(5), FieldDesc.prime(7)


def T(F, *slots):
    return PfisterTuple(F, tuple(slots))


def disc_oracle(q):
    """Finite fields: forms are classified by rank and discriminant (Euler's criterion)."""
    p = q.field.p
    d = 1
    for a in q.entries:
        d = d * a.value % p
    return q.rank, pow(d, (p - 1) // 2, p)


# --- examples -------------------------------------------------------------------

def test_simply_equivalent_examples():
    assert simply_equivalent(T(F7, 3, 5), T(F7, 5, 3))
    assert simply_equivalent(T(Q, 2, 3), T(Q, 2, -3))
    assert not simply_equivalent(T(Q, -1, -1), T(Q, 1, 1))
    with pytest.raises(LengthMismatch):
        simply_equivalent(T(Q, 2, 3), T(Q, 2, 3, 5))


def test_two_fold_forms_over_f7_are_hyperbolic():
    # every rank-4 form over F_7 is isotropic, so all 2-Pfister forms agree
    for a, b in itertools.product(range(1, 7), repeat=2):
        assert brute_isotropic(T(F7, a, b).expand())


def test_find_chain_examples():
    # 3 and 5 are both nonsquares mod 7, so the swap is the identity on square classes
    assert T(F7, 3, 5) == T(F7, 5, 3)
    assert len(find_chain(T(F7, 3, 5), T(F7, 5, 3))) == 0
    cert = find_chain(T(Q, 3, 5), T(Q, 5, 3), support=[-1, 3, 5])
    assert len(cert) == 1 and verify_chain(T(Q, 3, 5), T(Q, 5, 3), cert)
    cert = find_chain(T(F7, 3, 5), T(F7, 1, 1))
    assert verify_chain(T(F7, 3, 5), T(F7, 1, 1), cert)
    cert = find_chain(T(Q, 2, 3), T(Q, 2, -3), support=[-1, 2, 3])
    assert len(cert) == 1 and verify_chain(T(Q, 2, 3), T(Q, 2, -3), cert)


def test_find_chain_rejects_non_isometric():
    with pytest.raises(IsometryFails):
        find_chain(T(Q, -1, -1), T(Q, 1, 1))


def test_support_must_contain_slots():
    with pytest.raises(NotFoundWithinSupport):
        find_chain(T(Q, 2, 3), T(Q, 2, -3), support=[2])


def test_ratfun_needs_explicit_support():
    F = FieldDesc.ratfun(3)
    t = parse_element("t", F)
    with pytest.raises(UnsupportedField):
        find_chain(T(F, t, 1), T(F, t, 1))


def test_support_subgroup_over_q():
    got = support_subgroup(Q, [-1, 2])
    assert [x.value for x in got] == [-1, 1, -2, 2]


def test_find_chain_is_deterministic():
    a = find_chain(T(F5, 2, 1, 2), T(F5, 1, 1, 1)).to_json()
    b = find_chain(T(F5, 2, 1, 2), T(F5, 1, 1, 1)).to_json()
    assert a == b


# --- verification ---------------------------------------------------------------

def test_empty_certificate():
    assert verify_chain(T(Q, 2, 3), T(Q, 2, 3), ChainCertificate())
    v = verify_chain(T(Q, 2, 3), T(Q, 2, -3), ChainCertificate())
    assert not v and v.failed_step == 0


def test_tampered_certificate_reports_the_step():
    t1, t2 = T(Q, 2, 3), T(Q, 2, -3)
    cert = find_chain(t1, t2, support=[-1, 2, 3])
    s = cert.steps[0]
    bad = ChainCertificate((ChainStep(s.i, s.j, s.new_i, Q(-1)),))
    v = verify_chain(t1, t2, bad)
    assert not v.ok and v.failed_step == 0
    assert v.to_json()["valid"] is False


def test_bad_indices_and_lengths():
    t = T(Q, 2, 3)
    v = verify_chain(t, t, ChainCertificate((ChainStep(1, 0, Q(2), Q(3)),)))
    assert not v and v.failed_step == 0
    assert not verify_chain(t, T(Q, 2, 3, 5), ChainCertificate())


def test_certificate_json_round_trip():
    cert = find_chain(T(Q, 2, 3), T(Q, 2, -3), support=[-1, 2, 3])
    data = cert.to_json()
    assert data[0]["i"] == 1 and data[0]["j"] == 2
    assert ChainCertificate.from_json(Q, data) == cert


# --- properties ------------------------------------------------------------------

@pytest.mark.parametrize("p", [5, 7])
@pytest.mark.parametrize("n", [2, 3])
def test_completeness_over_finite_fields(p, n):
    F = FieldDesc.prime(p)
    reps = [1, next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1)]
    tuples = [T(F, *s) for s in itertools.product(reps, repeat=n)]
    for t1, t2 in itertools.product(tuples, repeat=2):
        if disc_oracle(t1.expand()) == disc_oracle(t2.expand()):
            assert verify_chain(t1, t2, find_chain(t1, t2))


def test_soundness_on_random_certificates():
    rng = random.Random(7)
    support = [Q(x) for x in (1, -1, 2, -2, 3, -3, 6, -6)]
    accepted = 0
    attempts = 0
    while accepted < 200:
        attempts += 1
        assert attempts < 20000
        t1 = T(Q, *(rng.choice(support) for _ in range(rng.choice([2, 3]))))
        t = t1
        steps = []
        for _ in range(rng.randrange(1, 4)):
            i, j = sorted(rng.sample(range(t.n), 2))
            c, d = rng.choice(support), rng.choice(support)
            steps.append(ChainStep(i, j, c, d))
            t = t.replace(i, j, c, d)
        cert = ChainCertificate(tuple(steps))
        if verify_chain(t1, t, cert):
            accepted += 1
            assert qf.is_isometric(t1.expand(), t.expand())


def test_soundness_over_finite_fields_against_discriminant():
    rng = random.Random(3)
    for _ in range(200):
        t1 = T(F5, *(rng.randrange(1, 5) for _ in range(3)))
        t2 = T(F5, *(rng.randrange(1, 5) for _ in range(3)))
        try:
            cert = find_chain(t1, t2)
        except IsometryFails:
            assert disc_oracle(t1.expand()) != disc_oracle(t2.expand())
            continue
        assert verify_chain(t1, t2, cert)
        assert disc_oracle(t1.expand()) == disc_oracle(t2.expand())


def test_scaling_a_slot_by_a_represented_value():
    # for c a value of p, p (x) <<d>> and p (x) <<cd>> are chain-connected
    F = F7
    for a in range(1, 7):
        values = brute_values(T(F, a).expand())
        for d, c in itertools.product(range(1, 7), values):
            t1, t2 = T(F, a, d), T(F, a, c * F(d))
            assert verify_chain(t1, t2, find_chain(t1, t2))
    for a, b in [(3, 5), (1, 3)]:
        values = brute_values(T(F, a, b).expand())
        for d, c in itertools.product([1, 3], values):
            t1, t2 = T(F, a, b, d), T(F, a, b, c * F(d))
            assert verify_chain(t1, t2, find_chain(t1, t2))
