"""Coefficient systems on the orbit category of a finite group.

For a symmetry type and each subgroup ``L`` of the ambient group ``G`` a
coefficient system tabulates, per spatial dimension ``q``, the group of
invertible ``(q+1)``-dimensional phases with internal symmetry ``L``.  Maps
along an inclusion ``L' <= L``:

* ``transfer``  groups(L', q) -> groups(L, q), pushforward along BL' -> BL;
* ``point``     groups(L, q)  -> groups(L', q), restriction along a point inclusion;
* ``inflate``   groups(e, q)  -> groups(L, q), pullback along BL -> pt (only for L' = e);
* ``eta``       groups(L, q)  -> groups(L, q-1), multiplication by the Hopf class.

These are data, read from ``.coeff`` files (see ``docs/specfile.md``).
Inside the degree window an omitted group is trivial; outside it every query
is an error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import product
from pathlib import Path

from .dsl import Line, format_matrix, parse_group, parse_int, parse_matrix, payload_pairs, tokenize
from .errors import (
    MissingTransfer,
    OutOfWindow,
    ParseError,
    UnknownSubgroup,
    ValidationError,
)
from .fgab import TRIVIAL, FgAbGroup, Homomorphism

MAP_KINDS = ("transfer", "point", "inflate")


@dataclass(frozen=True)
class GroupLattice:
    """A finite group known only through its named subgroups and their inclusions."""

    name: str
    order: int
    subgroups: tuple[tuple[str, int], ...]
    inclusions: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        orders = dict(self.subgroups)
        if len(orders) != len(self.subgroups):
            raise ValidationError(f"duplicate subgroup name in {self.name}")
        for s, o in self.subgroups:
            if o < 1 or self.order % o:
                raise ValidationError(f"subgroup {s} of order {o} cannot sit in {self.name} of order {self.order}")
        tops = [s for s, o in self.subgroups if o == self.order]
        bottoms = [s for s, o in self.subgroups if o == 1]
        if len(tops) != 1 or len(bottoms) != 1:
            raise ValidationError(f"{self.name} needs exactly one whole-group and one trivial subgroup")
        rel = set(self.inclusions)
        for a, b in rel:
            if a not in orders or b not in orders:
                raise UnknownSubgroup(f"inclusion {a} <= {b} names an unknown subgroup")
            if orders[b] % orders[a]:
                raise ValidationError(f"inclusion {a} <= {b}: order {orders[a]} does not divide {orders[b]}")
        for s in orders:
            rel |= {(s, s), (bottoms[0], s), (s, tops[0])}
        changed = True
        while changed:
            extra = {(a, d) for (a, b), (c, d) in product(rel, rel) if b == c} - rel
            rel |= extra
            changed = bool(extra)
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise ValidationError(f"inclusions make {a} and {b} equal")
        object.__setattr__(self, "inclusions", frozenset(rel))

    @classmethod
    def trivial(cls) -> "GroupLattice":
        return cls("trivial", 1, (("e", 1),))

    @classmethod
    def cyclic_prime(cls, p: int) -> "GroupLattice":
        return cls(f"Z{p}", p, (("e", 1), (f"Z{p}", p)))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.subgroups)

    @property
    def whole(self) -> str:
        return next(s for s, o in self.subgroups if o == self.order)

    @property
    def trivial_subgroup(self) -> str:
        return next(s for s, o in self.subgroups if o == 1)

    def check(self, name: str) -> None:
        if name not in dict(self.subgroups):
            raise UnknownSubgroup(f"{name!r} is not a subgroup of {self.name} (known: {', '.join(self.names)})")

    def order_of(self, name: str) -> int:
        self.check(name)
        return dict(self.subgroups)[name]

    def includes(self, sub: str, sup: str) -> bool:
        return (sub, sup) in self.inclusions

    def index(self, sub: str, sup: str) -> int:
        return self.order_of(sup) // self.order_of(sub)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "order": self.order,
            "subgroups": [{"name": s, "order": o} for s, o in self.subgroups],
            "inclusions": sorted([a, b] for a, b in self.inclusions if a != b),
        }


@dataclass(frozen=True)
class SymmetryType:
    """Name and degree window of a symmetry type; the table lives in the system."""

    name: str
    description: str
    window: tuple[int, int]


@dataclass(frozen=True)
class CoefficientSystem:
    symmetry: SymmetryType
    lattice: GroupLattice
    groups: dict = field(default_factory=dict)
    transfers: dict = field(default_factory=dict)
    point_inclusions: dict = field(default_factory=dict)
    inflations: dict = field(default_factory=dict)
    eta: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict, compare=False)
    __hash__ = None

    @property
    def window(self) -> tuple[int, int]:
        return self.symmetry.window

    def _check(self, L: str, q: int) -> None:
        self.lattice.check(L)
        lo, hi = self.window
        if not lo <= q <= hi:
            raise OutOfWindow(f"degree {q} outside the window [{lo}, {hi}] of {self.symmetry.name}")

    def group_at(self, L: str, q: int) -> FgAbGroup:
        self._check(L, q)
        return self.groups.get((L, q), TRIVIAL)

    def _map(self, table: dict, kind: str, sub: str, sup: str, q: int, source: FgAbGroup,
             target: FgAbGroup) -> Homomorphism:
        self._check(sub, q)
        self._check(sup, q)
        if not self.lattice.includes(sub, sup):
            raise UnknownSubgroup(f"{sub} is not registered as a subgroup of {sup}")
        if (sub, sup, q) in table:
            return table[(sub, sup, q)]
        if sub == sup:
            return Homomorphism.identity(source)
        if source.is_trivial or target.is_trivial:
            return Homomorphism.zero(source, target)
        raise MissingTransfer(f"no {kind} map tabulated for {sub} <= {sup} in degree {q}")

    def transfer_at(self, sub: str, sup: str, q: int) -> Homomorphism:
        return self._map(self.transfers, "transfer", sub, sup, q,
                         self.group_at(sub, q), self.group_at(sup, q))

    def point_at(self, sub: str, sup: str, q: int) -> Homomorphism:
        return self._map(self.point_inclusions, "point-inclusion", sub, sup, q,
                         self.group_at(sup, q), self.group_at(sub, q))

    def inflate_at(self, sub: str, sup: str, q: int) -> Homomorphism:
        return self._map(self.inflations, "inflation", sub, sup, q,
                         self.group_at(sub, q), self.group_at(sup, q))

    def eta_at(self, L: str, q: int) -> Homomorphism:
        self._check(L, q)
        self._check(L, q - 1)
        if (L, q) in self.eta:
            return self.eta[(L, q)]
        src, tgt = self.group_at(L, q), self.group_at(L, q - 1)
        if src.is_trivial or tgt.is_trivial:
            return Homomorphism.zero(src, tgt)
        raise MissingTransfer(f"no eta action tabulated on {L} in degree {q}")

    def restricted(self, L: str) -> dict[int, FgAbGroup]:
        lo, hi = self.window
        return {q: self.group_at(L, q) for q in range(lo, hi + 1)}

    def to_json(self) -> dict:
        def maps(table):
            return [{"sub": a, "sup": b, "q": q, "matrix": h.matrix.tolist()}
                    for (a, b, q), h in sorted(table.items())]
        return {
            "schema": 1,
            "symmetry": {"name": self.symmetry.name, "description": self.symmetry.description,
                         "window": list(self.window)},
            "ambient": self.lattice.to_json(),
            "groups": [{"subgroup": L, "q": q, "group": str(g), **g.to_json()}
                       for (L, q), g in sorted(self.groups.items())],
            "transfers": maps(self.transfers),
            "point_inclusions": maps(self.point_inclusions),
            "inflations": maps(self.inflations),
            "eta": [{"subgroup": L, "q": q, "matrix": h.matrix.tolist()}
                    for (L, q), h in sorted(self.eta.items())],
        }


def validate(sys: CoefficientSystem) -> None:
    """Check every invariant of a coefficient system; raise ValidationError on the first failure."""
    lat = sys.lattice
    lo, hi = sys.window
    if lo > hi:
        raise ValidationError(f"empty window [{lo}, {hi}]")
    for (L, q), g in sys.groups.items():
        sys._check(L, q)
    for table, kind in ((sys.transfers, "transfer"), (sys.point_inclusions, "point"),
                        (sys.inflations, "inflate")):
        for (a, b, q), h in table.items():
            sys._check(a, q)
            sys._check(b, q)
            if not lat.includes(a, b):
                raise ValidationError(f"{kind} {a} {b} {q}: {a} is not a subgroup of {b}")
            src, tgt = (sys.group_at(b, q), sys.group_at(a, q)) if kind == "point" else \
                (sys.group_at(a, q), sys.group_at(b, q))
            if (h.source, h.target) != (src, tgt):
                raise ValidationError(f"{kind} {a} {b} {q}: endpoints {h.source} -> {h.target} "
                                      f"do not match the groups table {src} -> {tgt}")
            if a == b and h != Homomorphism.identity(src):
                raise ValidationError(f"{kind} {a} {a} {q} must be the identity, got {h.matrix}")
            if kind == "inflate" and a != lat.trivial_subgroup:
                raise ValidationError(f"inflation is only defined out of the trivial subgroup, not {a}")
    for (L, q), h in sys.eta.items():
        sys._check(L, q)
        sys._check(L, q - 1)
        if (h.source, h.target) != (sys.group_at(L, q), sys.group_at(L, q - 1)):
            raise ValidationError(f"eta {L} {q}: endpoints {h.source} -> {h.target} do not match")
    # functoriality along chains a <= b <= c
    for q in range(lo, hi + 1):
        for a, b, c in product(lat.names, repeat=3):
            if len({a, b, c}) < 3 or not (lat.includes(a, b) and lat.includes(b, c)):
                continue
            keys = [(a, b, q), (b, c, q), (a, c, q)]
            if all(k in sys.transfers for k in keys):
                if sys.transfers[keys[1]] @ sys.transfers[keys[0]] != sys.transfers[keys[2]]:
                    raise ValidationError(f"transfers are not functorial along {a} <= {b} <= {c} in degree {q}")
    # restriction after transfer out of the trivial subgroup multiplies by the index
    e = lat.trivial_subgroup
    for (a, b, q), tr in sys.transfers.items():
        if a != e or a == b or (a, b, q) not in sys.point_inclusions:
            continue
        res = sys.point_inclusions[(a, b, q)]
        if res @ tr != Homomorphism.identity(tr.source).scale(lat.index(a, b)):
            raise ValidationError(f"point {a} {b} {q} after transfer {a} {b} {q} is not "
                                  f"multiplication by the index {lat.index(a, b)}")
    for (a, b, q), infl in sys.inflations.items():
        if (a, b, q) in sys.point_inclusions and a != b:
            if sys.point_inclusions[(a, b, q)] @ infl != Homomorphism.identity(infl.source):
                raise ValidationError(f"point {a} {b} {q} after inflate {a} {b} {q} is not the identity")


def loads(text: str, source: str | None = None) -> CoefficientSystem:
    lines = tokenize(text, source)
    header: dict[str, Line] = {}
    subgroups: list[tuple[str, int]] = []
    includes: list[tuple[str, str]] = []
    body: list[Line] = []
    for ln in lines:
        if ln.kind == "assign":
            if ln.key not in ("symmetry", "description", "window", "ambient", "order"):
                raise ln.error(f"unknown key {ln.key!r}", expected=("symmetry", "description", "window",
                                                                      "ambient", "order"), source=source)
            if ln.key in header:
                raise ln.error(f"duplicate key {ln.key!r}", source=source)
            header[ln.key] = ln
        elif ln.key == "subgroup":
            if len(ln.args) != 1:
                raise ln.error("expected [subgroup NAME] order = N", expected=("NAME",), source=source)
            pairs = payload_pairs(ln, source)
            if set(pairs) != {"order"}:
                raise ln.error("expected order = N", ln.value_column, ("order",), source)
            subgroups.append((ln.args[0], parse_int(*pairs["order"][:1], ln, pairs["order"][1], source)))
        elif ln.key == "include":
            if len(ln.args) != 2 or ln.value:
                raise ln.error("expected [include SUB SUP]", expected=("SUB SUP",), source=source)
            includes.append((ln.args[0], ln.args[1]))
        elif ln.key in ("group", "eta") + MAP_KINDS:
            body.append(ln)
        else:
            raise ln.error(f"unknown section [{ln.key}]", expected=(
                "[subgroup]", "[include]", "[group]", "[transfer]", "[point]", "[inflate]", "[eta]"),
                source=source)
    for key in ("symmetry", "window"):
        if key not in header:
            last = lines[-1].lineno + 1 if lines else 1
            raise ParseError(f"missing {key} = ...", last, 1, (key,), source)
    win = header["window"]
    parts = win.value.replace("..", " ").split()
    if len(parts) != 2:
        raise win.error("window must read LO..HI", win.value_column, ("LO..HI",), source)
    window = (parse_int(parts[0], win, win.value_column, source), parse_int(parts[1], win, win.value_column, source))
    symmetry = SymmetryType(header["symmetry"].value,
                            header["description"].value if "description" in header else "", window)
    ambient = header["ambient"].value if "ambient" in header else "trivial"
    if not subgroups:
        subgroups = [("e", 1)]
    order = (parse_int(header["order"].value, header["order"], header["order"].value_column, source)
             if "order" in header else max(o for _, o in subgroups))
    lattice = GroupLattice(ambient, order, tuple(subgroups), frozenset(includes))

    groups: dict = {}
    provenance: dict = {}
    for ln in (l for l in body if l.key == "group"):
        if len(ln.args) != 2:
            raise ln.error("expected [group L q] GROUP", expected=("L q",), source=source)
        L, q = ln.args[0], parse_int(ln.args[1], ln, ln.arg_columns[1], source)
        if (L, q) in groups:
            raise ln.error(f"duplicate group entry {L} {q}", source=source)
        _known(lattice, L, ln, source)
        groups[(L, q)] = parse_group(ln.value, ln, ln.value_column, source)
        if ln.comment:
            provenance[("group", L, q)] = ln.comment

    def grp(L, q, ln, col):
        _known(lattice, L, ln, source, col)
        if not window[0] <= q <= window[1]:
            raise ln.error(f"degree {q} outside window", col, (f"{window[0]}..{window[1]}",), source)
        return groups.get((L, q), TRIVIAL)

    tables = {k: {} for k in MAP_KINDS}
    eta: dict = {}
    for ln in (l for l in body if l.key != "group"):
        pairs = payload_pairs(ln, source)
        if set(pairs) != {"matrix"}:
            raise ln.error("expected matrix = [[...]]", ln.value_column, ("matrix",), source)
        text, col = pairs["matrix"]
        if ln.key == "eta":
            if len(ln.args) != 2:
                raise ln.error("expected [eta L q]", expected=("L q",), source=source)
            L, q = ln.args[0], parse_int(ln.args[1], ln, ln.arg_columns[1], source)
            src, tgt = grp(L, q, ln, ln.arg_columns[1]), grp(L, q - 1, ln, ln.arg_columns[1])
            key, table = (L, q), eta
        else:
            if len(ln.args) != 3:
                raise ln.error(f"expected [{ln.key} SUB SUP q]", expected=("SUB SUP q",), source=source)
            a, b = ln.args[0], ln.args[1]
            q = parse_int(ln.args[2], ln, ln.arg_columns[2], source)
            ga, gb = grp(a, q, ln, ln.arg_columns[0]), grp(b, q, ln, ln.arg_columns[1])
            src, tgt = (gb, ga) if ln.key == "point" else (ga, gb)
            key, table = (a, b, q), tables[ln.key]
        if key in table:
            raise ln.error(f"duplicate [{ln.key} {' '.join(ln.args)}]", source=source)
        M = parse_matrix(text, tgt.ngens, src.ngens, ln, col, source)
        try:
            table[key] = Homomorphism(src, tgt, M)
        except ValidationError as exc:
            raise ValidationError(f"{source or '<text>'}:{ln.lineno}: {exc}") from None
        if ln.comment:
            provenance[(ln.key,) + key] = ln.comment

    sys = CoefficientSystem(symmetry, lattice, groups, tables["transfer"], tables["point"],
                            tables["inflate"], eta, provenance)
    validate(sys)
    return sys


def _known(lattice: GroupLattice, L: str, ln: Line, source, col=None):
    if L not in lattice.names:
        raise ln.error(f"unknown subgroup {L!r}", col or (ln.arg_columns[0] if ln.arg_columns else None),
                       lattice.names, source)


def load(path) -> CoefficientSystem:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), str(path))


def builtin_names() -> list[str]:
    return sorted(p.name[:-6] for p in resources.files("invphase.data").iterdir()
                  if p.name.endswith(".coeff"))


def builtin_path(name: str) -> Path:
    return Path(str(resources.files("invphase.data") / f"{name}.coeff"))


def load_builtin(name: str) -> CoefficientSystem:
    if name not in builtin_names():
        raise ValidationError(f"no builtin coefficient system {name!r} (have: {', '.join(builtin_names())})")
    return load(builtin_path(name))


def resolve(ref: str, base: Path | None = None) -> CoefficientSystem:
    """Load ``ref`` as a path (relative to ``base``) or else as a builtin name."""
    for cand in ([base / ref] if base else []) + [Path(ref)]:
        if cand.suffix == ".coeff" and cand.is_file():
            return load(cand)
    stem = ref[:-6] if ref.endswith(".coeff") else ref
    return load_builtin(Path(stem).name if stem not in builtin_names() else stem)


def dumps(sys: CoefficientSystem) -> str:
    """Serialize back to the ``.coeff`` text format (provenance kept as comments)."""
    out = [f"symmetry = {sys.symmetry.name}"]
    if sys.symmetry.description:
        out.append(f"description = {sys.symmetry.description}")
    lo, hi = sys.window
    out += [f"window = {lo}..{hi}", f"ambient = {sys.lattice.name}", f"order = {sys.lattice.order}", ""]
    out += [f"[subgroup {s}] order = {o}" for s, o in sys.lattice.subgroups]
    out += [f"[include {a} {b}]" for a, b in sorted(sys.lattice.inclusions) if a != b]
    out.append("")

    def note(key):
        c = sys.provenance.get(key)
        return f"  # {c}" if c else ""

    out += [f"[group {L} {q}] {g}{note(('group', L, q))}" for (L, q), g in sorted(sys.groups.items())]
    for kind, table in (("transfer", sys.transfers), ("point", sys.point_inclusions),
                        ("inflate", sys.inflations)):
        out += [f"[{kind} {a} {b} {q}] matrix = {format_matrix(h.matrix)}{note((kind, a, b, q))}"
                for (a, b, q), h in sorted(table.items())]
    out += [f"[eta {L} {q}] matrix = {format_matrix(h.matrix)}{note(('eta', L, q))}"
            for (L, q), h in sorted(sys.eta.items())]
    return "\n".join(out) + "\n"


def dumps_json(sys: CoefficientSystem) -> str:
    return json.dumps(sys.to_json(), sort_keys=True, indent=2) + "\n"
