import pytest
from hypothesis import given
from hypothesis import strategies as st

from invphase import coeffsys, thomcoh
from invphase.errors import TruncationExceeded, ValidationError
from invphase.fgab import FgAbGroup, Homomorphism, homology_at
from invphase.thomcoh import ModTwoClass, VirtualBundle, sq, sw_total

V = VirtualBundle(-2, 2)
U = ModTwoClass.thom_class


# -- independent oracle: total squares by explicit polynomial arithmetic ----------------

def pmul(x, y, top):
    out = set()
    for i in x:
        for j in y:
            if i + j <= top:
                out ^= {i + j}
    return frozenset(out)


def ppow(x, n, top):
    out = frozenset({0})
    for _ in range(n):
        out = pmul(out, x, top)
    return out


def oracle_w(m, top):
    """(1 + a)^m by repeated multiplication; the inverse is the geometric series."""
    base = frozenset({0, 1}) if m >= 0 else frozenset(range(top + 1))
    return ppow(base, abs(m), top)


def oracle_sq_exact(k, x):
    """Sq^k x: the degree (|x| + k) part of the total square, computed monomial by monomial."""
    out = set()
    for j in x.exponents:
        tot = ppow(frozenset({1, 2}), j, 2 * j)          # Sq(a^j)
        if x.thom is not None:
            tot = pmul(tot, oracle_w(x.thom.m, j + k), 10 ** 6)
        if j + k in tot:
            out ^= {j + k}
    return frozenset(out)


classes = st.builds(
    lambda exps, m, thom: ModTwoClass(frozenset(exps), VirtualBundle(m, 0) if thom else None),
    st.sets(st.integers(0, 6), max_size=4), st.integers(-6, 6), st.booleans())
polys = st.builds(lambda exps: ModTwoClass(frozenset(exps)), st.sets(st.integers(0, 6), max_size=4))


# -- examples -----------------------------------------------------------------------

def test_sq1_of_a():
    assert sq(1, ModTwoClass.a()) == ModTwoClass.a(2)


def test_sq2_thom_class():
    assert sq(2, U(V)) == U(V, 2)
    assert str(sq(2, U(V))) == "Ubar*a^2"


def test_sq2_thom_class_times_a():
    assert sq(2, U(V, 1)) == U(V, 3)


@pytest.mark.parametrize("m, top, expected", [
    (2, 6, {0, 2}),
    (-2, 4, {0, 2, 4}),
    (0, 5, {0}),
    (-1, 3, {0, 1, 2, 3}),
    (3, 4, {0, 1, 2, 3}),
])
def test_sw_total(m, top, expected):
    assert sw_total(m, top) == frozenset(expected)


def test_sw_total_against_oracle():
    for m in range(-12, 13):
        assert sw_total(m, 12) == oracle_w(m, 12)


# -- properties -----------------------------------------------------------------------

@given(classes, st.integers(0, 12))
def test_sq_matches_oracle(x, k):
    assert sq(k, x).exponents == oracle_sq_exact(k, x)


@given(classes, polys, st.integers(0, 12))
def test_cartan(x, y, k):
    lhs = sq(k, x * y)
    rhs = ModTwoClass(frozenset(), x.thom)
    for i in range(k + 1):
        rhs = rhs + sq(i, x) * sq(k - i, y)
    assert lhs.exponents == rhs.exponents


@given(classes)
def test_sq0_is_identity(x):
    assert sq(0, x) == x or (x.is_zero and sq(0, x).is_zero)


@given(st.integers(0, 10), st.integers(1, 6))
def test_instability(j, extra):
    x = ModTwoClass.a(j)
    assert sq(j, x) == ModTwoClass.a(2 * j)
    assert sq(j + extra, x).is_zero


@given(st.integers(-20, 20), st.integers(0, 16))
def test_sw_inverse(m, top):
    prod = pmul(sw_total(m, top), sw_total(-m, top), top)
    assert prod == frozenset({0})


@given(st.integers(-8, 8), st.integers(-4, 4), st.integers(-2, 10), st.sampled_from([0, 1]))
def test_d2_squares_to_zero(m, n, p, t):
    W = VirtualBundle(m, n)
    first = thomcoh.d2(W, p, t)
    second = thomcoh.d2(W, p + 2, t + 1)
    assert (second @ first).is_zero()


# -- integral rows against the cellular cochains of RP^N -----------------------------

def rp_cochain_homology(k, twisted, N=24):
    """H^k(RP^N; Z or Z^w) from the cochain complex Z -> Z -> ... with delta^k = 1 -+ (-1)^(k+1)."""
    Zg = FgAbGroup(1)

    def delta(i):
        if i < 0 or i >= N:
            return None
        c = 1 - (-1) ** (i + 1) if twisted else 1 + (-1) ** (i + 1)
        return Homomorphism.of(Zg, Zg, [[c]])

    inc = delta(k - 1) or Homomorphism.zero(FgAbGroup(), Zg)
    out = delta(k) or Homomorphism.zero(Zg, FgAbGroup())
    return homology_at(inc, out)


@pytest.mark.parametrize("m", range(-5, 6))
@pytest.mark.parametrize("n", [-1, 0, 2])
def test_integral_rows_match_cochain_oracle(m, n):
    W = VirtualBundle(m, n)
    for p in range(W.rank - 2, W.rank + 20):
        j = p - W.rank
        expected = FgAbGroup() if j < 0 else rp_cochain_homology(j, not W.orientable)
        assert thomcoh.integral_group(W, p) == expected, (m, n, p)


# -- windows --------------------------------------------------------------------------

def test_halfturn_window():
    rep = thomcoh.compute_window((-2, 2), 1)
    assert [(p, q, str(g), name) for p, q, g, name in rep.e2] == [
        (2, -1, "Z/2", "Ubar*a^2"), (3, -2, "Z/2", "Ubar*a^3")]
    assert rep.e3 == []
    assert rep.group == FgAbGroup()
    assert rep.settled and not rep.extension_ambiguous


def test_halfturn_window_json_deterministic():
    a = thomcoh.compute_window((-2, 2), 1).dumps()
    assert a == thomcoh.compute_window(VirtualBundle(-2, 2), 1).dumps()
    assert '"method": "cohomology"' in a


@pytest.mark.parametrize("d", range(4))
def test_point_base_recovers_coefficients(d):
    spin = coeffsys.load_builtin("spin")
    rep = thomcoh.compute_window((0, 3 - d), 1, "point")
    assert rep.group == spin.group_at("e", d)


def test_point_base_bottom_class():
    rep = thomcoh.compute_window((0, 0), 0, "point")
    assert [(p, q) for p, q, _, _ in rep.e3] == [(0, 0)]
    assert rep.group == FgAbGroup(1)


def test_truncation_guard():
    with pytest.raises(TruncationExceeded):
        thomcoh.compute_window((-2, 2), 5)
    with pytest.raises(ValidationError):
        thomcoh.compute_window((-2, 2), 1, "torus")


@given(st.integers(-6, 6), st.integers(-3, 3), st.integers(-4, 4))
def test_window_always_reports(m, n, deg):
    rep = thomcoh.compute_window((m, n), deg)
    assert rep.to_json()["total_degree"] == deg
    assert all(not g.is_trivial for _, _, g, _ in rep.e3)
