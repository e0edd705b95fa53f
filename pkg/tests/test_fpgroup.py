import itertools

import pytest
from hypothesis import given, strategies as st

from milnorwitt import fpgroup as fp
from milnorwitt.fpgroup import FPAbGroup, GroupHom


def brute_order_and_exponents(num_gens, rels, box=12):
    """Finite quotient Z^k / R enumerated inside a box of representatives (for small torsion groups)."""
    # closure: the subgroup spanned by rels contains box * e_i when the quotient is finite of exponent | box
    mod = box
    lattice = {tuple([0] * num_gens)}
    frontier = list(lattice)
    gens = [tuple(r.get(i, 0) % mod for i in range(num_gens)) for r in rels] + \
           [tuple(mod if j == i else 0 for j in range(num_gens)) for i in range(num_gens)]
    while frontier:
        v = frontier.pop()
        for g in gens:
            w = tuple((a + b) % mod for a, b in zip(v, g))
            if w not in lattice:
                lattice.add(w)
                frontier.append(w)
    return mod ** num_gens // len(lattice)


def test_snf_examples():
    U, D, V = fp.smith_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert D == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert fp.diagonal(fp.smith_normal_form([[6, 0], [0, 4]])[1]) == [2, 12]
    assert fp.diagonal(fp.smith_normal_form([[2, 4], [6, 8]])[1]) == [2, 4]


@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=4))
def test_snf_verification(A):
    U, D, V = fp.smith_normal_form(A)
    assert fp.mat_mul(fp.mat_mul(U, A), V) == D
    assert abs(fp.det(U)) == 1 and abs(fp.det(V)) == 1
    d = [x for x in fp.diagonal(D) if x]
    assert all(x > 0 for x in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))


def test_invariant_factor_examples():
    assert FPAbGroup(1).invariant_factors() == (1, [])
    assert FPAbGroup(1, [{0: 4}]).invariant_factors() == (0, [4])
    assert FPAbGroup(2, [{0: 2}, {1: 2}, {0: 1 - 1, 1: 1 - 1}]).invariant_factors() == (0, [2, 2])


@given(st.integers(1, 3), st.data())
def test_invariant_factors_match_enumeration(k, data):
    rows = data.draw(st.lists(st.lists(st.integers(-5, 5), min_size=k, max_size=k), min_size=k, max_size=k + 2))
    rels = [dict(enumerate(r)) for r in rows]
    G = FPAbGroup(k, rels)
    free, tors = G.invariant_factors()
    if free:
        return
    order = 1
    for t in tors:
        order *= t
    exponent = tors[-1] if tors else 1
    # box must be a multiple of the exponent for the enumeration to be exact
    assert brute_order_and_exponents(k, rels, box=exponent) == order


def test_element_is_zero():
    Z4 = FPAbGroup(1, [{0: 4}])
    assert Z4.element_is_zero([0])
    assert not Z4.element_is_zero([2])
    assert Z4.element_is_zero([4])


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=4))
def test_relators_are_zero(rows):
    G = FPAbGroup(3, [dict(enumerate(r)) for r in rows])
    for r in rows:
        assert G.element_is_zero(r)


def test_kernel_image_examples():
    Z, Z2, Z4 = fp.free_group(1), fp.cyclic(2), fp.cyclic(4)
    ident = GroupHom(Z4, Z4, [[1]])
    assert fp.kernel(ident).is_trivial() and fp.is_isomorphism(ident)
    red = GroupHom(Z, Z2, [[1]])
    assert fp.kernel(red).invariant_factors() == (1, []) and not fp.is_isomorphism(red)
    red4 = GroupHom(Z4, Z2, [[1]])
    assert fp.kernel(red4).invariant_factors() == (0, [2])
    assert fp.image(red4).invariant_factors() == (0, [2])


def test_ill_defined_hom_is_flagged():
    h = GroupHom(fp.cyclic(2), fp.free_group(1), [[1]])
    assert not h.well_defined


def test_pullback_examples():
    Z, Z2, Z4 = fp.free_group(1), fp.cyclic(2), fp.cyclic(4)
    pb = fp.pullback(GroupHom(Z, Z2, [[1]]), GroupHom(Z2, Z2, [[1]]))
    assert pb.group.invariant_factors() == (1, [])
    pb = fp.pullback(GroupHom(Z, Z2, [[1]]), GroupHom(Z4, Z2, [[1]]))
    assert pb.group.invariant_factors() == (1, [2])
    pb = fp.pullback(GroupHom(Z, Z2, [[0]]), GroupHom(Z4, Z2, [[0]]))
    assert pb.group.invariant_factors() == (1, [4])


@pytest.mark.parametrize("m,n,c", [(4, 6, 2), (6, 9, 3), (8, 4, 4)])
def test_pullback_projections_commute(m, n, c):
    A, B, C = fp.cyclic(m), fp.cyclic(n), fp.cyclic(c)
    f, g = GroupHom(A, C, [[1]]), GroupHom(B, C, [[1]])
    pb = fp.pullback(f, g)
    assert fp.homs_equal(fp.compose(f, pb.proj_a), fp.compose(g, pb.proj_b))
    # order of the fibre product: |A||B|/|C| for surjective maps
    assert pb.group.order() == m * n // c


def test_direct_sum_and_cokernel():
    S = fp.direct_sum(fp.cyclic(2), fp.cyclic(3))
    assert S.invariant_factors() == (0, [6])
    h = GroupHom(fp.free_group(1), fp.free_group(1), [[5]])
    assert fp.cokernel(h).invariant_factors() == (0, [5])
    assert fp.is_injective(h) and not fp.is_surjective(h)
