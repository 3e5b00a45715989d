from dataclasses import replace
from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from invphase import gcw
from invphase.coeffsys import GroupLattice
from invphase.errors import (
    BoundaryNotClosed,
    DimensionGap,
    StabilizerViolation,
    UnknownPreset,
    ValidationError,
)
from invphase.fgab import FgAbGroup
from invphase.gcw import Cell, EquivariantComplex


def sympy_homology(X, relative=True):
    """Homology of a trivial-G complex straight from its boundary dict, via sympy."""
    cells = {p: [c.id for c in X.cells_in_dim(p, relative)] for p in range(X.dimension + 2)}
    cells[-1] = []

    def bd(p):
        rows, cols = cells[p - 1], cells[p]
        return sympy.Matrix(len(rows), len(cols),
                            lambda i, j: sum(X.boundary.get((cols[j], rows[i]), (0,))))

    out = {}
    for p in range(X.dimension + 1):
        n = len(cells[p])
        if not n:
            continue
        rk_out = bd(p).rank() if cells[p - 1] else 0
        dn = bd(p + 1) if cells[p + 1] else sympy.zeros(n, 0)
        rk_in = dn.rank() if dn.cols else 0
        torsion = []
        if dn.cols:
            snf = smith_normal_form(dn, domain=sympy.ZZ)
            torsion = [abs(int(snf[i, i])) for i in range(min(snf.shape)) if abs(int(snf[i, i])) > 1]
        H = FgAbGroup.from_orders([0] * (n - rk_out - rk_in) + torsion)
        if not H.is_trivial:
            out[p] = H
    return out


# -- presets ----------------------------------------------------------------------

def test_halfturn_cells():
    X = gcw.preset("halfturn_e3")
    by_dim = {p: [(c.stabilizer, c.in_subcomplex) for c in X.cells if c.dim == p] for p in range(4)}
    assert by_dim == {0: [("Z2", True)], 1: [("Z2", False)], 2: [("e", False)], 3: [("e", False)]}
    assert gcw.validate(X)["valid"]


def test_halfturn_underlying_is_three_sphere():
    U = gcw.preset("halfturn_e3").expand()
    Z = FgAbGroup(1)
    assert U.cellular_homology(relative=False) == {0: Z, 3: Z}
    assert sympy_homology(U, relative=False) == {0: Z, 3: Z}
    assert U.euler_characteristic(relative=False) == 0


def test_halfturn_quotient_rel_fixed_circle():
    X = gcw.preset("halfturn_e3")
    # collapsing the whole fixed circle: H(S^3, S^1) = Z in degrees 2 and 3
    cells = tuple(replace(c, in_subcomplex=True) if c.id == "x" else c for c in X.cells)
    Y = EquivariantComplex(X.lattice, cells, dict(X.boundary), "quotient rel circle")
    Z = FgAbGroup(1)
    assert Y.cellular_homology() == {2: Z, 3: Z}
    assert X.cellular_homology() == {3: Z}


def test_halfturn_boundary_of_three_orbit_is_a_difference():
    X = gcw.preset("halfturn_e3")
    assert X.boundary[("h3", "h2")] == (-1, 1)
    assert X.degree("h3", "h2") == 0
    assert X.degree("h2", "x") == 1


@pytest.mark.parametrize("d", range(5))
def test_torus_matches_product_structure(d):
    X = gcw.preset("torus", d)
    counts = [len(X.cells_in_dim(p)) for p in range(d + 1)]
    assert counts == [comb(d, p) for p in range(d + 1)]
    assert not X.boundary
    assert X.cellular_homology() == {p: FgAbGroup(comb(d, p)) for p in range(d + 1)}
    assert X.euler_characteristic() == (1 if d == 0 else 0)


def test_torus_one_is_circle():
    X = gcw.from_reference("torus(1)")
    assert [(c.dim, c.stabilizer) for c in X.cells] == [(0, "e"), (1, "e")]


@pytest.mark.parametrize("d", range(6))
def test_euclidean_sphere(d):
    X = gcw.preset("euclidean_sphere", d)
    assert [(c.dim, c.in_subcomplex) for c in X.cells] == [(0, True), (d, False)]
    assert X.cellular_homology() == {d: FgAbGroup(1)}
    assert X.euler_characteristic() == (-1) ** d


def test_wedge():
    X = gcw.from_reference("wedge_of_spheres(1, 2, 2)")
    assert X.cellular_homology(relative=False) == {0: FgAbGroup(1), 1: FgAbGroup(1), 2: FgAbGroup(2)}


@given(st.lists(st.integers(1, 6), max_size=5))
def test_wedge_euler_characteristic(dims):
    X = gcw.wedge_of_spheres(*dims)
    hom = sympy_homology(X, relative=False)
    assert X.euler_characteristic(relative=False) == sum((-1) ** p * g.free_rank for p, g in hom.items())
    assert X.cellular_homology(relative=False) == hom


@pytest.mark.parametrize("ref", ["cube(2)", "torus(", "torus(a)", "torus(-1)", "halfturn_e3(2)"])
def test_bad_presets(ref):
    with pytest.raises(UnknownPreset):
        gcw.from_reference(ref)


def test_presets_deterministic():
    for name in ("halfturn_e3",):
        assert gcw.preset(name).to_json() == gcw.preset(name).to_json()
    assert gcw.parse_preset("torus( 2 )") == ("torus", (2,))


# -- validation errors ---------------------------------------------------------------

Z2 = GroupLattice.cyclic_prime(2)
TRIV = GroupLattice.trivial()


def test_dimension_gap():
    cells = (Cell("pt", 0, "e"), Cell("a", 1, "e"), Cell("b", 2, "e"))
    with pytest.raises(DimensionGap):
        EquivariantComplex(TRIV, cells, {("a", "b"): 1})
    with pytest.raises(DimensionGap):
        EquivariantComplex(TRIV, (Cell("a", -1, "e"),))


def test_stabilizer_violation():
    cells = (Cell("v", 0, "e"), Cell("a", 1, "Z2"))
    with pytest.raises(StabilizerViolation):
        EquivariantComplex(Z2, cells, {("a", "v"): (1, 1)})


def test_boundary_not_closed():
    cells = (Cell("pt", 0, "e"), Cell("a", 1, "e"), Cell("b", 2, "e"))
    with pytest.raises(BoundaryNotClosed):
        EquivariantComplex(TRIV, cells, {("a", "pt"): 1, ("b", "a"): 1})


def test_boundary_needs_one_degree_per_coset():
    cells = (Cell("v", 0, "e"), Cell("a", 1, "e"))
    with pytest.raises(ValidationError):
        EquivariantComplex(Z2, cells, {("a", "v"): (1, 1, 0)})


def test_fixed_cell_attaching_map_must_be_invariant():
    cells = (Cell("v", 1, "e"), Cell("a", 2, "Z2"))
    with pytest.raises((ValidationError, StabilizerViolation)):
        EquivariantComplex(Z2, cells, {("a", "v"): (1, 0)})


def test_subcomplex_must_be_closed():
    cells = (Cell("pt", 0, "e"), Cell("a", 1, "e", True))
    with pytest.raises(ValidationError):
        EquivariantComplex(TRIV, cells, {("a", "pt"): (1,)})


def test_unknown_stabilizer():
    with pytest.raises(Exception):
        EquivariantComplex(TRIV, (Cell("pt", 0, "Z2"),))


# -- a free Z/2 complex: the antipodal circle ------------------------------------------

def test_antipodal_circle_expands_to_circle():
    cells = (Cell("v", 0, "e"), Cell("a", 1, "e"))
    X = EquivariantComplex(Z2, cells, {("a", "v"): (-1, 1)}, "S(2 sigma)")
    U = X.expand()
    assert U.cellular_homology(relative=False) == {0: FgAbGroup(1), 1: FgAbGroup(1)}
    # the orbit space is RP^1 = a circle as well
    assert X.cellular_homology(relative=False) == {0: FgAbGroup(1), 1: FgAbGroup(1)}
    assert X.euler_characteristic(relative=False) == 0


def test_report_lists_cells():
    rep = gcw.validate(gcw.preset("halfturn_e3"))
    assert rep["valid"]
    rep = gcw.preset("halfturn_e3").report()
    assert rep["euler_characteristic"] == -1
    assert {(c["dim"], c["stabilizer"]) for c in rep["cells"]} == {(0, "Z2"), (1, "Z2"), (2, "e"), (3, "e")}
