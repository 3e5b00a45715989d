import random
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from invphase.errors import CompositionNotZero, IllDefinedHomomorphism, Mismatch, ParseError
from invphase.fgab import (
    TRIVIAL,
    Z,
    FgAbGroup,
    Homomorphism,
    cokernel,
    direct_sum,
    homology,
    homology_at,
    image,
    is_epimorphism,
    is_monomorphism,
    kernel,
)
from invphase.matrix import Matrix

Z2 = FgAbGroup.cyclic(2)
Z8 = FgAbGroup.cyclic(8)


def elements(G):
    """All elements of a finite group in generator coordinates."""
    assert G.free_rank == 0
    return list(product(*(range(d) for d in G.torsion)))


def brute_kernel_order(f):
    return sum(1 for x in elements(f.source) if not any(f.apply(x)))


def brute_image_order(f):
    return len({f.apply(x) for x in elements(f.source)})


def finite_groups():
    return st.lists(st.sampled_from([2, 3, 4, 6, 8, 9]), max_size=3).map(FgAbGroup.from_orders)


@st.composite
def finite_homs(draw):
    G, H = draw(finite_groups()), draw(finite_groups())
    # build a well-defined map column by column: a generator of order d goes to a d-torsion element
    cols = []
    for d in G.orders:
        cands = [v for v in elements(H) if not any(H.reduce([d * x for x in v]))]
        cols.append(draw(st.sampled_from(cands)))
    return Homomorphism(G, H, Matrix.from_columns(cols, H.ngens))


# -- the group type ------------------------------------------------------------

def test_canonical_form():
    assert FgAbGroup.parse("Z/4 + Z/6") == FgAbGroup(0, (2, 12))
    assert FgAbGroup.parse("Z/2 + Z/3") == FgAbGroup.cyclic(6)
    assert FgAbGroup.parse("Z^2 + Z/1") == FgAbGroup(2)
    assert str(FgAbGroup.parse("Z/2 + Z + Z/4")) == "Z + Z/2 + Z/4"
    assert str(TRIVIAL) == "0"


def test_rejects_bad_torsion():
    with pytest.raises(ValueError):
        FgAbGroup(0, (4, 2))
    with pytest.raises(ValueError):
        FgAbGroup(0, (1,))


@pytest.mark.parametrize("text", ["", "Z/", "Q", "Z/0", "Z^-1", "Z + + Z"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        FgAbGroup.parse(text)


@given(finite_groups(), st.integers(0, 3))
def test_string_and_json_round_trip(G, r):
    G = FgAbGroup(r, G.torsion)
    assert FgAbGroup.parse(str(G)) == G
    assert FgAbGroup.from_json(G.to_json()) == G


@given(st.lists(st.integers(0, 12).filter(lambda d: d != 1), max_size=4))
def test_order_is_product(orders):
    G = FgAbGroup.from_orders(orders)
    expected = None if 0 in orders else 1
    if expected is not None:
        for d in orders:
            expected *= d
    assert G.order == expected


# -- homomorphisms ---------------------------------------------------------------

def test_ill_defined_rejected():
    with pytest.raises(IllDefinedHomomorphism):
        Homomorphism.of(Z2, Z, [[1]])
    with pytest.raises(IllDefinedHomomorphism):
        Homomorphism.of(Z2, FgAbGroup.cyclic(3), [[1]])
    Homomorphism.of(Z2, Z8, [[4]])


def test_shape_mismatch():
    with pytest.raises(Mismatch):
        Homomorphism.of(Z, Z, [[1, 2]])


def test_composition_reduces():
    f = Homomorphism.of(Z, Z8, [[5]])
    g = Homomorphism.of(Z8, Z8, [[3]])
    assert (g @ f).matrix == Matrix.of([[7]])


# -- cokernel, kernel, homology ------------------------------------------------------

def test_cokernel_times_two():
    assert cokernel(Homomorphism.of(Z, Z, [[2]])) == Z2


def test_cokernel_zero_map():
    assert cokernel(Homomorphism.zero(Z, FgAbGroup(2))) == FgAbGroup(2)


def eq24(star):
    return Homomorphism.of(FgAbGroup(1, (2,)), FgAbGroup(0, (2, 2)), [[star, 1], [1, 0]])


def test_eq24_is_onto():
    assert cokernel(eq24(0)).is_trivial
    assert all(is_epimorphism(eq24(s)) for s in range(8))


def test_two_star_is_injective():
    for s in range(8):
        assert is_monomorphism(Homomorphism.of(Z, FgAbGroup(1, (8,)), [[2], [s]]))


def test_identity_on_z8():
    f = Homomorphism.identity(Z8)
    assert is_epimorphism(f) and is_monomorphism(f)


def test_homology_both_zero():
    M = FgAbGroup(2)
    assert homology_at(Homomorphism.zero(M, M), Homomorphism.zero(M, M)) == M


def test_homology_times_two_then_zero():
    assert homology_at(Homomorphism.of(Z, Z, [[2]]), Homomorphism.zero(Z, TRIVIAL)) == Z2


def test_kernel_of_eq24():
    f = eq24(0)
    K = homology(Homomorphism.zero(TRIVIAL, f.source), f)
    assert K.group == Z
    # brute force: (a, b) maps to (b, a) mod 2, so the kernel is 2Z + 0
    assert [K.reps.column(0)] in ([(2, 0)], [(-2, 0)])
    for a, b in product(range(-6, 7), range(2)):
        in_kernel = a % 2 == 0 and b == 0
        assert K.contains((a, b)) == in_kernel


def test_homology_errors():
    with pytest.raises(Mismatch):
        homology(Homomorphism.zero(Z, Z), Homomorphism.zero(Z2, Z))
    with pytest.raises(CompositionNotZero):
        homology(Homomorphism.identity(Z), Homomorphism.identity(Z))


@given(finite_homs())
def test_kernel_and_image_orders_match_brute_force(f):
    assert kernel(f).group.order == brute_kernel_order(f)
    assert image(f).group.order == brute_image_order(f)
    assert cokernel(f).order * brute_image_order(f) == f.target.order
    assert is_epimorphism(f) == (brute_image_order(f) == f.target.order)
    assert is_monomorphism(f) == (brute_kernel_order(f) == 1)


@given(finite_homs())
def test_kernel_reps_lie_in_kernel(f):
    K = kernel(f)
    for j in range(K.group.ngens):
        assert not any(f.apply(K.reps.column(j)))


@given(st.integers(1, 4), st.integers(1, 4), st.randoms(use_true_random=False))
def test_rank_nullity_on_free_groups(n, m, rng):
    M = Matrix.of([[rng.randint(-5, 5) for _ in range(n)] for _ in range(m)], n)
    f = Homomorphism(FgAbGroup(n), FgAbGroup(m), M)
    assert kernel(f).group.free_rank + image(f).group.free_rank == n


@given(st.integers(1, 4), st.integers(1, 4), st.randoms(use_true_random=False))
def test_cokernel_invariant_under_source_change(n, m, rng):
    M = Matrix.of([[rng.randint(-6, 6) for _ in range(n)] for _ in range(m)], n)
    # random unimodular matrix from elementary operations
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(6):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            k = rng.randint(-3, 3)
            P = [row[:] for row in P]
            for r in P:
                r[i] += k * r[j]
    f = Homomorphism(FgAbGroup(n), FgAbGroup(m), M)
    g = Homomorphism(FgAbGroup(n), FgAbGroup(m), M @ Matrix.of(P, n))
    assert cokernel(f) == cokernel(g)


# -- direct sums ------------------------------------------------------------------

def test_direct_sum_merges_coprime():
    ds = direct_sum(Z2, FgAbGroup.cyclic(3))
    assert ds.group == FgAbGroup.cyclic(6)


@given(st.lists(finite_groups(), min_size=1, max_size=3))
def test_direct_sum_structure_maps(groups):
    ds = direct_sum(*groups)
    assert ds.group.order == eval("*".join(str(g.order) for g in groups))
    for i, G in enumerate(groups):
        assert ds.projection(i) @ ds.inclusion(i) == Homomorphism.identity(G)
        for j in range(len(groups)):
            if j != i:
                assert (ds.projection(j) @ ds.inclusion(i)).is_zero()


def test_random_three_term_homology_is_consistent():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 4)
        # d2 o d1 = 0 by construction: d1 = K, d2 = any map killing the columns of K
        A = Matrix.of([[rng.randint(-3, 3) for _ in range(n)] for _ in range(2)], n)
        f = Homomorphism(FgAbGroup(n), FgAbGroup(2), A)
        K = kernel(f)
        inc = K.inclusion()
        H = homology_at(inc, f)
        assert H.is_trivial
