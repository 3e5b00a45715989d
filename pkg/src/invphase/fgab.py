"""Finitely generated abelian groups and the homomorphisms between them.

Groups are always held in invariant-factor form ``Z^r + Z/d1 + ... + Z/dk``
with ``d1 | d2 | ... | dk``; their generators are ordered free first, then
torsion.  A :class:`Homomorphism` is an integer matrix (target generators by
source generators) checked for well-definedness on construction, so every
downstream operation here is total.

>>> f = Homomorphism.of(FgAbGroup.parse("Z + Z/2"), FgAbGroup.parse("Z/2 + Z/2"),
...                     [[0, 1], [1, 0]])
>>> is_epimorphism(f), str(kernel(f).group)
(True, 'Z')
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import prod
from typing import Sequence

from .errors import CompositionNotZero, IllDefinedHomomorphism, Mismatch, ParseError
from .matrix import (
    LatticeSolver,
    Matrix,
    SnfDecomposition,
    column_hnf,
    column_lattice_basis,
    nullspace_basis,
    smith_normal_form,
)

__all__ = [
    "FgAbGroup", "Homomorphism", "Subquotient", "DirectSum", "SnfDecomposition",
    "smith_normal_form", "cokernel", "kernel", "image", "homology", "homology_at",
    "is_epimorphism", "is_monomorphism", "direct_sum", "TRIVIAL", "Z",
]


@dataclass(frozen=True)
class FgAbGroup:
    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        for i, d in enumerate(self.torsion):
            if d < 2:
                raise ValueError(f"torsion factor {d} < 2")
            if i + 1 < len(self.torsion) and self.torsion[i + 1] % d:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")

    @classmethod
    def cyclic(cls, d: int) -> "FgAbGroup":
        """``Z/d``; ``d = 0`` gives ``Z`` and ``d = 1`` the trivial group."""
        return cls.from_orders([d])

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> "FgAbGroup":
        """Normal form of ``Z/o1 + Z/o2 + ...`` (order 0 meaning ``Z``)."""
        return direct_sum(*(_Cyclic(o) for o in orders)).group

    @classmethod
    def parse(cls, text: str) -> "FgAbGroup":
        """Parse ``"Z^2 + Z/2 + (Z/4)^3"``; ``"0"`` is the trivial group."""
        s = text.strip()
        if s == "0":
            return TRIVIAL
        orders: list[int] = []
        for term in s.split("+"):
            t = term.strip()
            m = _TERM.fullmatch(t)
            if not m:
                raise ParseError(f"bad group term {t!r}", expected=("Z", "Z^r", "Z/d", "(Z/d)^k", "0"))
            if m.group("zero"):
                continue
            mult = int(m.group("pow") or m.group("ppow") or 1)
            d = m.group("d") or m.group("pd")
            if d is not None and int(d) == 0:
                raise ParseError(f"Z/0 is not allowed in {s!r}; write Z")
            orders.extend([int(d) if d else 0] * mult)
        for o in orders:
            if o < 0:
                raise ParseError(f"invalid cyclic order {o} in {s!r}")
        return cls.from_orders(orders)

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def orders(self) -> tuple[int, ...]:
        """Order of each generator, 0 standing for infinite order."""
        return (0,) * self.free_rank + self.torsion

    @property
    def order(self) -> int | None:
        return None if self.free_rank else prod(self.torsion)

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def relation_matrix(self) -> Matrix:
        """Columns ``d * e_i`` for each torsion generator ``i``."""
        n = self.ngens
        cols = []
        for i, d in enumerate(self.orders):
            if d:
                cols.append(tuple(d if j == i else 0 for j in range(n)))
        return Matrix.from_columns(cols, n)

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % d if d else x for x, d in zip(v, self.orders))

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, obj: dict) -> "FgAbGroup":
        return cls(int(obj["free_rank"]), tuple(obj["torsion"]))


_TERM = re.compile(
    r"(?P<zero>0)"
    r"|Z(?:/(?P<d>\d+))?(?:\^(?P<pow>\d+))?"
    r"|\(Z(?:/(?P<pd>\d+))?\)\^(?P<ppow>\d+)"
)

TRIVIAL = FgAbGroup()
Z = FgAbGroup(1)


@dataclass(frozen=True)
class _Cyclic:
    o: int

    @property
    def orders(self):
        return () if self.o == 1 else (self.o,)

    @property
    def ngens(self):
        return len(self.orders)


@dataclass(frozen=True)
class Homomorphism:
    """A homomorphism given by its matrix on generators.

    Column ``j`` is the image of source generator ``j``.  The stored matrix is
    reduced: entries on torsion rows of the target live in ``[0, d)``.
    """

    source: FgAbGroup
    target: FgAbGroup
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.ngens, self.source.ngens):
            raise Mismatch(f"matrix shape {self.matrix.shape} does not fit "
                           f"{self.source} -> {self.target}")
        t_orders = self.target.orders
        for j, d in enumerate(self.source.orders):
            if not d:
                continue
            for i, e in enumerate(t_orders):
                x = d * self.matrix.rows[i][j]
                if (e == 0 and x != 0) or (e and x % e):
                    raise IllDefinedHomomorphism(
                        f"generator {j} of order {d} in {self.source} cannot map to "
                        f"{self.matrix.column(j)} in {self.target}")
        reduced = Matrix(tuple(tuple(x % e if e else x for x in row)
                               for row, e in zip(self.matrix.rows, t_orders)),
                         self.matrix.ncols)
        object.__setattr__(self, "matrix", reduced)

    @classmethod
    def of(cls, source: FgAbGroup, target: FgAbGroup, rows) -> "Homomorphism":
        try:
            m = Matrix.of(rows, source.ngens)
        except ValueError as exc:
            raise Mismatch(f"matrix for {source} -> {target}: {exc}") from None
        return cls(source, target, m)

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> "Homomorphism":
        return cls(source, target, Matrix.zeros(target.ngens, source.ngens))

    @classmethod
    def identity(cls, group: FgAbGroup) -> "Homomorphism":
        return cls(group, group, Matrix.identity(group.ngens))

    def __matmul__(self, other: "Homomorphism") -> "Homomorphism":
        """``self @ other`` is the composite ``self o other``."""
        if other.target != self.source:
            raise Mismatch(f"cannot compose {other.source} -> {other.target} "
                           f"with {self.source} -> {self.target}")
        return Homomorphism(other.source, self.target, self.matrix @ other.matrix)

    def __add__(self, other: "Homomorphism") -> "Homomorphism":
        if (self.source, self.target) != (other.source, other.target):
            raise Mismatch("sum of homomorphisms with different endpoints")
        return Homomorphism(self.source, self.target, self.matrix + other.matrix)

    def scale(self, k: int) -> "Homomorphism":
        return Homomorphism(self.source, self.target, self.matrix.scale(k))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.target.reduce(self.matrix.apply(v))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def to_json(self) -> dict:
        return {"source": str(self.source), "target": str(self.target),
                "matrix": self.matrix.tolist()}


@dataclass(frozen=True, eq=False)
class Subquotient:
    """``L / N`` for lattices ``rel(ambient) <= N <= L`` in ambient coordinates.

    ``reps`` holds one ambient vector per generator of ``group``; ``coords``
    goes the other way for any vector lying in ``L``.
    """

    ambient: FgAbGroup
    group: FgAbGroup
    reps: Matrix
    basis: Matrix
    change: Matrix
    kept: tuple[int, ...]
    _solver: LatticeSolver = field(repr=False)

    def contains(self, v: Sequence[int]) -> bool:
        return self._solver.solve(tuple(v)) is not None

    def coords(self, v: Sequence[int]) -> tuple[int, ...]:
        c = self._solver.solve(tuple(v))
        if c is None:
            raise ValueError(f"{tuple(v)} does not lie in the subgroup")
        y = self.change.apply(c)
        return self.group.reduce([y[j] for j in self.kept])

    def inclusion(self) -> Homomorphism:
        """Inclusion into the ambient group; valid when the subquotient is a subgroup."""
        return Homomorphism(self.group, self.ambient, self.reps)

    def __repr__(self) -> str:
        return f"Subquotient({self.group} in {self.ambient})"


def _subquotient(ambient: FgAbGroup, basis: Matrix, numerator_gens: Matrix) -> Subquotient:
    n = ambient.ngens
    if basis.ncols:
        basis = column_hnf(basis)
    solver = LatticeSolver(basis)
    k = basis.ncols
    cols = []
    for v in numerator_gens.columns():
        c = solver.solve(v)
        if c is None:
            raise ValueError("denominator lattice is not contained in numerator lattice")
        cols.append(c)
    C = Matrix.from_columns(cols, k)
    snf = smith_normal_form(C)
    r = snf.rank
    diag = snf.diagonal
    kept = tuple(range(r, k)) + tuple(j for j in range(r) if diag[j] > 1)
    group = FgAbGroup(k - r, tuple(diag[j] for j in range(r) if diag[j] > 1))
    rep_cols = []
    for j in kept:
        v = basis.apply(snf.U_inv.column(j))
        rep_cols.append(ambient.reduce(v))
    reps = Matrix.from_columns(rep_cols, n)
    return Subquotient(ambient, group, reps, basis, snf.U, kept, solver)


def _preimage_lattice(f: Homomorphism) -> Matrix:
    """Basis of ``{x in Z^n : f(x) = 0 in target}``, n = #source generators."""
    n = f.source.ngens
    ext = f.matrix.hstack(f.target.relation_matrix())
    null = nullspace_basis(ext)
    # the relation block has full column rank, so projection stays independent
    return null.select_rows(range(n))


def homology(incoming: Homomorphism, outgoing: Homomorphism) -> Subquotient:
    """``ker(outgoing) / im(incoming)`` with generator representatives."""
    if incoming.target != outgoing.source:
        raise Mismatch(f"incoming map lands in {incoming.target} but outgoing map "
                       f"starts at {outgoing.source}")
    if not (outgoing @ incoming).is_zero():
        raise CompositionNotZero(f"composite {incoming.source} -> {outgoing.target} is nonzero: "
                                 f"{(outgoing @ incoming).matrix}")
    middle = incoming.target
    K = _preimage_lattice(outgoing)
    N = incoming.matrix.hstack(middle.relation_matrix())
    return _subquotient(middle, K, N)


def homology_at(incoming: Homomorphism, outgoing: Homomorphism) -> FgAbGroup:
    return homology(incoming, outgoing).group


def kernel(f: Homomorphism) -> Subquotient:
    return homology(Homomorphism.zero(TRIVIAL, f.source), f)


def cokernel_quotient(f: Homomorphism) -> Subquotient:
    return homology(f, Homomorphism.zero(f.target, TRIVIAL))


def cokernel(f: Homomorphism) -> FgAbGroup:
    return cokernel_quotient(f).group


def image(f: Homomorphism) -> Subquotient:
    rel = f.target.relation_matrix()
    gens = f.matrix.hstack(rel)
    return _subquotient(f.target, column_lattice_basis(gens), rel)


def is_epimorphism(f: Homomorphism) -> bool:
    return cokernel(f).is_trivial


def is_monomorphism(f: Homomorphism) -> bool:
    return kernel(f).group.is_trivial


@dataclass(frozen=True, eq=False)
class DirectSum:
    """Normal form of a direct sum with its structure maps.

    ``to_sum`` sends concatenated summand coordinates to ``group`` coordinates;
    ``from_sum`` is its inverse up to relations.
    """

    summands: tuple[FgAbGroup, ...]
    group: FgAbGroup
    to_sum: Matrix
    from_sum: Matrix
    offsets: tuple[int, ...]

    def inclusion(self, i: int) -> Homomorphism:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return Homomorphism(self.summands[i], self.group, self.to_sum.select_columns(range(lo, hi)))

    def projection(self, i: int) -> Homomorphism:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return Homomorphism(self.group, self.summands[i], self.from_sum.select_rows(range(lo, hi)))


def direct_sum(*groups) -> DirectSum:
    orders = [o for g in groups for o in g.orders]
    offsets = [0]
    for g in groups:
        offsets.append(offsets[-1] + g.ngens)
    n = len(orders)
    perm = sorted(range(n), key=lambda i: (orders[i] != 0, orders[i]))
    tors = [orders[i] for i in perm if orders[i]]
    if all(b % a == 0 for a, b in zip(tors, tors[1:])):
        group = FgAbGroup(n - len(tors), tuple(tors))
        to_sum = Matrix.of([[int(perm[j] == i) for i in range(n)] for j in range(n)], n)
        from_sum = to_sum.transpose()
    else:
        rel_cols = [tuple(o if j == i else 0 for j in range(n)) for i, o in enumerate(orders) if o]
        snf = smith_normal_form(Matrix.from_columns(rel_cols, n))
        r = snf.rank
        diag = snf.diagonal
        kept = list(range(r, n)) + [j for j in range(r) if diag[j] > 1]
        group = FgAbGroup(n - r, tuple(diag[j] for j in range(r) if diag[j] > 1))
        to_sum = snf.U.select_rows(kept)
        from_sum = snf.U_inv.select_columns(kept)
    to_sum = Matrix(tuple(tuple(x % d if d else x for x in row)
                          for row, d in zip(to_sum.rows, group.orders)), to_sum.ncols)
    if all(isinstance(g, FgAbGroup) for g in groups):
        summands = tuple(groups)
    else:
        # bare cyclic factors from FgAbGroup.from_orders; nobody asks for their maps
        summands = ()
    return DirectSum(summands, group, to_sum, from_sum, tuple(offsets))


def block_homomorphism(source: DirectSum, target: DirectSum,
                       blocks: dict[tuple[int, int], Homomorphism]) -> Homomorphism:
    """Homomorphism between direct sums from blocks ``(target_index, source_index) -> map``."""
    m = target.offsets[-1]
    n = source.offsets[-1]
    rows = [[0] * n for _ in range(m)]
    for (ti, si), h in blocks.items():
        if h.source != source.summands[si] or h.target != target.summands[ti]:
            raise Mismatch(f"block ({ti}, {si}) has endpoints {h.source} -> {h.target}")
        r0, c0 = target.offsets[ti], source.offsets[si]
        for i, row in enumerate(h.matrix.rows):
            for j, x in enumerate(row):
                rows[r0 + i][c0 + j] = x
    M = target.to_sum @ Matrix.of(rows, n) @ source.from_sum
    return Homomorphism(source.group, target.group, M)
