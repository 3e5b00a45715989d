"""Finite G-CW pairs described by orbit cells.

Each orbit ``G/L x D^p`` is stored once, through a representative cell with
stabilizer ``L``.  The attaching data of a representative ``c`` onto an orbit
``G/L' x D^(p-1)`` is a tuple of integer degrees, one per coset ``g L'``: the
degree with which ``c`` covers the translate ``g c'``.  For cyclic ``G`` the
cosets of ``L'`` are indexed by ``j`` with representative ``g^j``.

Cells flagged ``in_subcomplex`` form ``Y0`` of the pair ``(Y, Y0)``; they
carry no chains.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

from .coeffsys import GroupLattice
from .errors import (
    BoundaryNotClosed,
    DimensionGap,
    StabilizerViolation,
    UnknownPreset,
    ValidationError,
)
from .fgab import FgAbGroup, homology_at, Homomorphism
from .matrix import Matrix


@dataclass(frozen=True)
class Cell:
    id: str
    dim: int
    stabilizer: str
    in_subcomplex: bool = False


@dataclass(frozen=True)
class EquivariantComplex:
    lattice: GroupLattice
    cells: tuple[Cell, ...]
    boundary: dict = field(default_factory=dict)   # (src id, tgt id) -> tuple of degrees per coset
    name: str = "inline"
    __hash__ = None

    def __post_init__(self):
        ids = [c.id for c in self.cells]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate cell id in {self.name}")
        norm = {}
        for key, deg in self.boundary.items():
            if isinstance(deg, int):
                tgt = self.cell(key[1])
                deg = (deg,) + (0,) * (self.lattice.index(tgt.stabilizer, self.lattice.whole) - 1)
            norm[key] = tuple(deg)
        object.__setattr__(self, "boundary", norm)
        # cells ordered by (dimension, declaration order)
        object.__setattr__(self, "cells", tuple(sorted(self.cells, key=lambda c: c.dim)))
        validate(self)

    def cell(self, cid: str) -> Cell:
        for c in self.cells:
            if c.id == cid:
                return c
        raise ValidationError(f"unknown cell {cid!r} in {self.name}")

    @property
    def dimension(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    def cells_in_dim(self, p: int, relative: bool = True) -> list[Cell]:
        return [c for c in self.cells if c.dim == p and not (relative and c.in_subcomplex)]

    def degree(self, src: str, tgt: str) -> int:
        """Degree in the orbit complex: the sum over cosets."""
        return sum(self.boundary.get((src, tgt), ()))

    def orbit_size(self, c: Cell) -> int:
        return self.lattice.index(c.stabilizer, self.lattice.whole)

    def orbit_boundary(self, p: int, relative: bool = True) -> Matrix:
        """Integer boundary of the orbit complex ``X/G`` from dimension p to p-1."""
        src, tgt = self.cells_in_dim(p, relative), self.cells_in_dim(p - 1, relative)
        return Matrix.of([[self.degree(s.id, t.id) for s in src] for t in tgt], len(src))

    def euler_characteristic(self, relative: bool = True) -> int:
        return sum((-1) ** c.dim * self.orbit_size(c) for c in self.cells
                   if not (relative and c.in_subcomplex))

    def expand(self) -> "EquivariantComplex":
        """The underlying complex with the action forgotten (cyclic G only)."""
        n = self.lattice.order
        if n == 1:
            return self
        _require_cyclic(self.lattice)
        cells, bd = [], {}
        for c in self.cells:
            for i in range(self.orbit_size(c)):
                cells.append(Cell(_translate(c.id, i), c.dim, "e", c.in_subcomplex))
        for (s, t), degs in self.boundary.items():
            ks, kt = self.orbit_size(self.cell(s)), len(degs)
            for i in range(ks):
                for j, d in enumerate(degs):
                    if d:
                        key = (_translate(s, i), _translate(t, (i + j) % kt))
                        bd[key] = (bd.get(key, (0,))[0] + d,)
        return EquivariantComplex(GroupLattice.trivial(), tuple(cells), bd, f"{self.name} (underlying)")

    def cellular_homology(self, relative: bool = True) -> dict[int, FgAbGroup]:
        """Integral homology of the orbit complex."""
        out = {}
        for p in range(self.dimension + 1):
            here = len(self.cells_in_dim(p, relative))
            if not here:
                continue
            inc = _int_map(self.orbit_boundary(p + 1, relative), len(self.cells_in_dim(p + 1, relative)), here)
            outg = _int_map(self.orbit_boundary(p, relative), here, len(self.cells_in_dim(p - 1, relative)))
            h = homology_at(inc, outg)
            if not h.is_trivial:
                out[p] = h
        return out

    def report(self) -> dict:
        counts = Counter((c.dim, c.stabilizer, c.in_subcomplex) for c in self.cells)
        return {
            "name": self.name,
            "ambient": self.lattice.name,
            "cells": [{"dim": d, "stabilizer": s, "in_subcomplex": sub, "count": k}
                      for (d, s, sub), k in sorted(counts.items())],
            "euler_characteristic": self.euler_characteristic(),
        }

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ambient": self.lattice.to_json(),
            "cells": [{"id": c.id, "dim": c.dim, "stabilizer": c.stabilizer,
                       "in_subcomplex": c.in_subcomplex} for c in self.cells],
            "boundary": [{"source": s, "target": t, "degrees": list(d)}
                         for (s, t), d in sorted(self.boundary.items())],
        }


def _translate(cid: str, i: int) -> str:
    return cid if i == 0 else f"g{i}.{cid}"


def _int_map(M: Matrix, n: int, m: int) -> Homomorphism:
    return Homomorphism(FgAbGroup(n), FgAbGroup(m), M if M.shape == (m, n) else Matrix.zeros(m, n))


def _require_cyclic(lat: GroupLattice) -> None:
    if not _is_cyclic(lat):
        raise ValidationError(f"{lat.name}: expansion needs one subgroup per divisor of a cyclic group")


def validate(X: EquivariantComplex) -> dict:
    lat = X.lattice
    ids = {c.id: c for c in X.cells}
    for c in X.cells:
        lat.check(c.stabilizer)
        if c.dim < 0:
            raise DimensionGap(f"cell {c.id} has negative dimension")
    for (s, t), degs in X.boundary.items():
        if s not in ids or t not in ids:
            raise ValidationError(f"boundary {s} -> {t} names an unknown cell")
        cs, ct = ids[s], ids[t]
        if ct.dim != cs.dim - 1:
            raise DimensionGap(f"boundary {s} -> {t} goes from dimension {cs.dim} to {ct.dim}")
        if cs.in_subcomplex and not ct.in_subcomplex and any(degs):
            raise ValidationError(f"subcomplex cell {s} attaches to {t} outside the subcomplex")
        index = X.orbit_size(ct)
        if len(degs) != index:
            raise ValidationError(f"boundary {s} -> {t}: {len(degs)} degrees given, "
                                  f"{ct.stabilizer} has {index} cosets")
        if any(degs) and not lat.includes(cs.stabilizer, ct.stabilizer):
            raise StabilizerViolation(f"boundary {s} -> {t}: stabilizer {cs.stabilizer} "
                                      f"is not contained in {ct.stabilizer}")
        if any(degs) and _is_cyclic(lat):
            # invariance of the attaching map under the source stabilizer
            shift = lat.order // lat.order_of(cs.stabilizer)
            if any(degs[(j + shift) % index] != degs[j] for j in range(index)):
                raise ValidationError(f"boundary {s} -> {t} is not invariant under {cs.stabilizer}")
    for p in range(1, X.dimension + 1):
        if not X.cells_in_dim(p + 1, False) or not X.cells_in_dim(p - 1, False):
            continue
        if not (X.orbit_boundary(p, False) @ X.orbit_boundary(p + 1, False)).is_zero():
            raise BoundaryNotClosed(f"{X.name}: boundary squares to a nonzero map at dimension {p + 1}")
    return {"valid": True}


def _is_cyclic(lat: GroupLattice) -> bool:
    orders = sorted(o for _, o in lat.subgroups)
    return orders == [d for d in range(1, lat.order + 1) if lat.order % d == 0]


# presets ---------------------------------------------------------------------

def torus(d: int) -> EquivariantComplex:
    """Product CW structure on T^d: one cell per subset of the coordinates, zero boundary."""
    if d < 0:
        raise UnknownPreset("torus dimension must be non-negative")
    cells = [Cell("pt" if not S else "x" + "".join(map(str, S)), len(S), "e")
             for k in range(d + 1) for S in combinations(range(1, d + 1), k)]
    return EquivariantComplex(GroupLattice.trivial(), tuple(cells), {}, f"torus({d})")


def euclidean_sphere(d: int) -> EquivariantComplex:
    """The pair (S^d, point at infinity); relative homology is Borel-Moore homology of R^d."""
    if d < 0:
        raise UnknownPreset("sphere dimension must be non-negative")
    cells = (Cell("inf", 0, "e", True), Cell("cell", d, "e"))
    return EquivariantComplex(GroupLattice.trivial(), cells, {}, f"euclidean_sphere({d})")


def wedge_of_spheres(*dims: int) -> EquivariantComplex:
    if any(d < 1 for d in dims):
        raise UnknownPreset("wedge summands must have dimension at least 1")
    cells = (Cell("pt", 0, "e"),) + tuple(Cell(f"s{i}", d, "e") for i, d in enumerate(dims, 1))
    name = f"wedge_of_spheres({', '.join(map(str, dims))})"
    return EquivariantComplex(GroupLattice.trivial(), cells, {}, name)


def halfturn_e3() -> EquivariantComplex:
    """S^(1+2 sigma): R^3 with Z/2 rotating by a half turn about an axis, compactified.

    The fixed axis plus infinity is a circle ``inf u x``; the rest is
    ``S^1 * S(2 sigma)`` minus that circle, built from one free 2-orbit and
    one free 3-orbit.  Relative to ``inf`` this is the Borel-Moore input.
    """
    lat = GroupLattice.cyclic_prime(2)
    cells = (
        Cell("inf", 0, "Z2", True),
        Cell("x", 1, "Z2"),
        Cell("h2", 2, "e"),
        Cell("h3", 3, "e"),
    )
    bd = {
        ("x", "inf"): (0,),        # the axis closes up into a loop through infinity
        ("h2", "x"): (1,),         # each half-plane is bounded by the axis
        ("h3", "h2"): (-1, 1),     # each half-space is bounded by the two half-planes
    }
    return EquivariantComplex(lat, cells, bd, "halfturn_e3")


PRESETS = {
    "torus": (torus, "torus(d): T^d with trivial action"),
    "euclidean_sphere": (euclidean_sphere, "euclidean_sphere(d): the pair (S^d, pt) for R^d"),
    "wedge_of_spheres": (wedge_of_spheres, "wedge_of_spheres(d1, ...): pointed wedge, basepoint kept"),
    "halfturn_e3": (halfturn_e3, "halfturn_e3: R^3 with a half-turn rotation, Z/2 acting"),
}

_CALL = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(\s*([-0-9,\s]*)\))?\s*$")


def preset(name: str, *params: int) -> EquivariantComplex:
    if name not in PRESETS:
        raise UnknownPreset(f"unknown preset {name!r} (have: {', '.join(sorted(PRESETS))})")
    try:
        return PRESETS[name][0](*params)
    except TypeError:
        raise UnknownPreset(f"preset {name} does not take parameters {params}") from None


def parse_preset(text: str) -> tuple[str, tuple[int, ...]]:
    m = _CALL.match(text)
    if not m:
        raise UnknownPreset(f"cannot read preset reference {text!r}")
    args = m.group(2)
    try:
        params = tuple(int(a) for a in args.split(",") if a.strip()) if args else ()
    except ValueError:
        raise UnknownPreset(f"preset parameters must be integers: {text!r}") from None
    return m.group(1), params


def from_reference(text: str) -> EquivariantComplex:
    name, params = parse_preset(text)
    return preset(name, *params)
