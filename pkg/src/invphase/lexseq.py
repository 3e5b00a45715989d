"""Solving for one unknown group in an exact sequence.

A problem is a row of slots ``s_0 -> s_1 -> ... -> s_n`` joined by maps
``f_i : s_i -> s_(i+1)``.  With the unknown at ``u`` exactness squeezes it::

    0 -> coker(f_(u-2)) -> s_u -> ker(f_(u+1)) -> 0

so the unknown is pinned down by the two flanking maps, up to the extension.

The half-turn problem comes from the cofiber sequence
``S(2 sigma)_+ -> S^0 -> S^(2 sigma)``.  After the Adams isomorphism the
equivariant groups of ``S(2 sigma)_+`` are the groups of ``RP^1_+ = S^1 v S^0``,
and the map to ``S^0`` is the stable transfer of ``RP^1_+``, whose components
are eta on ``S^1`` and 2 on ``S^0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

from .coeffsys import CoefficientSystem
from .dsl import Line, parse_group, parse_matrix, payload_pairs, tokenize
from .errors import InconsistentExactness, Mismatch, ParseError, Underdetermined, ValidationError
from .fgab import (
    TRIVIAL,
    FgAbGroup,
    Homomorphism,
    cokernel,
    direct_sum,
    homology_at,
    is_epimorphism,
    is_monomorphism,
    kernel,
)
from .matrix import Matrix, smith_normal_form

PROPERTIES = ("epi", "mono", "zero")


@dataclass(frozen=True)
class Slot:
    name: str
    group: FgAbGroup | None = None      # None marks the unknown

    @property
    def known(self) -> bool:
        return self.group is not None


@dataclass(frozen=True)
class MapSpec:
    hom: Homomorphism | None = None
    prop: str | None = None

    def __post_init__(self):
        if self.prop is not None and self.prop not in PROPERTIES:
            raise ValidationError(f"unknown map property {self.prop!r} (have: {', '.join(PROPERTIES)})")

    @property
    def known(self) -> bool:
        return self.hom is not None


@dataclass(frozen=True)
class ExactSequenceProblem:
    slots: tuple[Slot, ...]
    maps: tuple[MapSpec, ...]
    label: str = "problem"

    def __post_init__(self):
        if len(self.maps) != len(self.slots) - 1:
            raise Mismatch(f"{len(self.slots)} slots need {len(self.slots) - 1} maps, got {len(self.maps)}")
        for i, m in enumerate(self.maps):
            if m.hom is None:
                continue
            for slot, end, what in ((self.slots[i], m.hom.source, "source"),
                                    (self.slots[i + 1], m.hom.target, "target")):
                if slot.known and slot.group != end:
                    raise Mismatch(f"map {i} has {what} {end} but slot {slot.name} is {slot.group}")

    @property
    def unknowns(self) -> list[int]:
        return [i for i, s in enumerate(self.slots) if not s.known]


@dataclass(frozen=True)
class Resolution:
    name: str
    sub: FgAbGroup               # image of the previous slot
    quotient: FgAbGroup          # image in the next slot
    group: FgAbGroup | None
    extension_ambiguous: bool
    steps: tuple[str, ...]
    label: str = "problem"

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "method": "les",
            "problem": self.label,
            "unknown": self.name,
            "sub": str(self.sub),
            "quotient": str(self.quotient),
            "graded": [{"piece": k, "group": str(g)} for k, g in (("sub", self.sub), ("quotient", self.quotient))
                       if not g.is_trivial],
            "group": None if self.group is None else str(self.group),
            "extension_ambiguous": self.extension_ambiguous,
            "settled": True,
            "steps": list(self.steps),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def render(self) -> str:
        lines = [f"exact sequence {self.label}: solving for {self.name}"]
        lines += [f"  {s}" for s in self.steps]
        lines.append(f"0 -> {self.sub} -> {self.name} -> {self.quotient} -> 0")
        lines.append(f"{self.name} = {self.group}" if self.group is not None
                     else f"{self.name}: extension of {self.quotient} by {self.sub}, ambiguous")
        return "\n".join(lines) + "\n"


def check_exactness(prob: ExactSequenceProblem) -> None:
    """Raise InconsistentExactness if the known data contradict exactness."""
    for i, m in enumerate(prob.maps):
        if m.hom is not None and m.prop is not None:
            ok = {"epi": is_epimorphism, "mono": is_monomorphism, "zero": Homomorphism.is_zero}[m.prop](m.hom)
            if not ok:
                raise InconsistentExactness(f"map {i} is declared {m.prop} but is not")
    for i in range(len(prob.maps) - 1):
        f, g = prob.maps[i].hom, prob.maps[i + 1].hom
        if f is None or g is None:
            continue
        if not (g @ f).is_zero():
            raise InconsistentExactness(f"maps {i} and {i + 1} do not compose to zero at {prob.slots[i + 1].name}")
        if not homology_at(f, g).is_trivial:
            raise InconsistentExactness(f"image differs from kernel at {prob.slots[i + 1].name}")
    for i, m in enumerate(prob.maps):
        mid = prob.slots[i + 1]
        if m.prop == "epi" and i + 1 < len(prob.maps) and prob.maps[i + 1].prop == "mono" \
                and mid.known and not mid.group.is_trivial:
            raise InconsistentExactness(f"{mid.name} is hit onto and maps injectively, so must vanish")


def _left_piece(prob: ExactSequenceProblem, u: int) -> tuple[FgAbGroup | None, str]:
    if u == 0:
        return None, "nothing precedes the unknown"
    prev = prob.slots[u - 1]
    if prev.known and prev.group.is_trivial:
        return TRIVIAL, f"{prev.name} = 0"
    if u >= 2:
        f = prob.maps[u - 2]
        if f.prop == "epi" or (f.hom is not None and is_epimorphism(f.hom)):
            return TRIVIAL, f"{prob.slots[u - 2].name} -> {prev.name} is onto"
        if f.hom is not None:
            return cokernel(f.hom), f"coker({prob.slots[u - 2].name} -> {prev.name}) = {cokernel(f.hom)}"
        before = prob.slots[u - 2]
        if (f.prop == "zero" or (before.known and before.group.is_trivial)) and prev.known:
            return prev.group, f"{before.name} -> {prev.name} is zero"
    return None, f"the map into {prev.name} is not known"


def _right_piece(prob: ExactSequenceProblem, u: int) -> tuple[FgAbGroup | None, str]:
    if u == len(prob.slots) - 1:
        return None, "nothing follows the unknown"
    nxt = prob.slots[u + 1]
    if nxt.known and nxt.group.is_trivial:
        return TRIVIAL, f"{nxt.name} = 0"
    if u + 1 < len(prob.maps):
        f = prob.maps[u + 1]
        after = prob.slots[u + 2].name
        if f.prop == "mono" or (f.hom is not None and is_monomorphism(f.hom)):
            return TRIVIAL, f"{nxt.name} -> {after} is injective"
        if f.hom is not None:
            k = kernel(f.hom).group
            return k, f"ker({nxt.name} -> {after}) = {k}"
        beyond = prob.slots[u + 2]
        if (f.prop == "zero" or (beyond.known and beyond.group.is_trivial)) and nxt.known:
            return nxt.group, f"{nxt.name} -> {after} is zero"
    return None, f"the map out of {nxt.name} is not known"


def solve(prob: ExactSequenceProblem) -> Resolution:
    unknowns = prob.unknowns
    if len(unknowns) != 1:
        raise ValidationError(f"exactly one unknown slot is supported, found {len(unknowns)}")
    check_exactness(prob)
    u = unknowns[0]
    left, why_left = _left_piece(prob, u)
    right, why_right = _right_piece(prob, u)
    missing = [w for g, w in ((left, why_left), (right, why_right)) if g is None]
    if missing:
        raise Underdetermined(missing)
    if left.is_trivial:
        group, ambiguous = right, False
    elif right.is_trivial or right.is_free:
        group, ambiguous = direct_sum(left, right).group, False
    else:
        group, ambiguous = None, True
    return Resolution(prob.slots[u].name, left, right, group, ambiguous, (why_left, why_right), prob.label)


def check_epi_mono_claims(prob: ExactSequenceProblem) -> list[dict]:
    """Epi and mono verdicts for every known map, with the SNF data behind them."""
    out = []
    for i, m in enumerate(prob.maps):
        if m.hom is None:
            continue
        f = m.hom
        presentation = f.matrix.hstack(f.target.relation_matrix())
        snf = smith_normal_form(presentation)
        out.append({
            "map": f"{prob.slots[i].name} -> {prob.slots[i + 1].name}",
            "matrix": f.matrix.tolist(),
            "epi": is_epimorphism(f),
            "mono": is_monomorphism(f),
            "cokernel": str(cokernel(f)),
            "kernel": str(kernel(f).group),
            "snf_diagonal": list(snf.diagonal),
        })
    return out


# transfer of RP^1_+ ----------------------------------------------------------

STABLE_ELEMENTS = {"eta": 1, "two": 0, "zero": None}


@dataclass(frozen=True)
class TransferComponents:
    """Components of a stable map out of a wedge: ``(degree shift, element tag)``."""

    components: tuple[tuple[int, str], ...] = ((1, "eta"), (0, "two"))

    def __post_init__(self):
        for shift, tag in self.components:
            if tag not in STABLE_ELEMENTS:
                raise ValidationError(f"unknown stable element {tag!r}")
            if STABLE_ELEMENTS[tag] is not None and STABLE_ELEMENTS[tag] != shift:
                raise ValidationError(f"{tag} lives in stem {STABLE_ELEMENTS[tag]}, not {shift}")


RP1_TRANSFER = TransferComponents()


def reduced_generator(coeff: CoefficientSystem, q: int) -> tuple[tuple[int, ...], int]:
    """A generator of the reduced part ``ker(point inclusion)`` at degree q and its order (0 = infinite)."""
    e, G = coeff.lattice.trivial_subgroup, coeff.lattice.whole
    k = kernel(coeff.point_at(e, G, q))
    if k.group.ngens != 1:
        raise ValidationError(f"reduced part in degree {q} is {k.group}, expected cyclic")
    return k.reps.column(0), k.group.orders[0]


def assemble_map(tc: TransferComponents, source_pair: tuple[FgAbGroup, FgAbGroup], target: FgAbGroup,
                 eta_action: Homomorphism, transfer: Homomorphism, inflation: Homomorphism,
                 reduced: tuple[int, ...] | None = None, stars: dict | None = None) -> Homomorphism:
    """Map induced by the transfer on ``S^1 v S^0``-groups into the equivariant group.

    ``source_pair`` is (group seen by the S^1 summand, group seen by the S^0
    summand).  The S^1 column is eta followed by inflation, the S^0 column
    the transfer along ``e <= G``.  ``stars`` adds an undetermined multiple
    of the ``reduced`` generator to either column.
    """
    stars = stars or {}
    ds = direct_sum(*source_pair)
    blocks = []
    for (shift, tag), src in zip(tc.components, source_pair):
        if tag == "eta":
            col = inflation @ eta_action
        elif tag == "two":
            col = transfer
        else:
            col = Homomorphism.zero(src, target)
        if col.source != src or col.target != target:
            raise Mismatch(f"{tag} component runs {col.source} -> {col.target}, expected {src} -> {target}")
        s = stars.get(tag, 0)
        if s and src.ngens:
            if reduced is None:
                raise ValidationError("a reduced generator is needed to place undetermined entries")
            extra = Matrix.of([[s * r * (1 if j == 0 else 0) for j in range(src.ngens)] for r in reduced],
                              src.ngens)
            col = col + Homomorphism(src, target, extra)
        blocks.append(col)
    M = blocks[0].matrix.hstack(blocks[1].matrix) @ ds.from_sum
    return Homomorphism(ds.group, target, M)


def transfer_map(coeff: CoefficientSystem, k: int, stars: dict | None = None) -> Homomorphism:
    """The degree-k map from the ``S(2 sigma)_+`` term to the ``S^0`` term, k = q + 2."""
    e, G = coeff.lattice.trivial_subgroup, coeff.lattice.whole
    q = k - 2
    hi = coeff.window[1]
    A1 = coeff.group_at(e, q + 1) if q + 1 <= hi else TRIVIAL
    A0 = coeff.group_at(e, q)
    target = coeff.group_at(G, q)
    eta = coeff.eta_at(e, q + 1) if q + 1 <= hi else Homomorphism.zero(A1, A0)
    red = reduced_generator(coeff, q)[0] if stars else None
    return assemble_map(RP1_TRANSFER, (A1, A0), target, eta, coeff.transfer_at(e, G, q),
                        coeff.inflate_at(e, G, q), red, stars)


def halfturn_problem(coeff: CoefficientSystem, stars3: dict | None = None,
                     stars4: dict | None = None) -> ExactSequenceProblem:
    f3 = transfer_map(coeff, 3, stars3)
    f4 = transfer_map(coeff, 4, stars4)
    slots = (
        Slot("[S(2sigma)_+, 3]", f3.source),
        Slot("[S^0, 3]", f3.target),
        Slot("[S^(2sigma), 3]"),
        Slot("[S(2sigma)_+, 4]", f4.source),
        Slot("[S^0, 4]", f4.target),
    )
    return ExactSequenceProblem(slots, (MapSpec(f3), MapSpec(), MapSpec(), MapSpec(f4)), "halfturn_cofiber")


def star_ranges(coeff: CoefficientSystem) -> dict:
    """Residues over which each undetermined entry ranges: eta column in degree 3, transfer in degree 4."""
    out = {}
    for k, tag in ((3, "eta"), (4, "two")):
        _, order = reduced_generator(coeff, k - 2)
        if not order:
            raise ValidationError(f"reduced part in degree {k - 2} is infinite; no residues to range over")
        out[(k, tag)] = range(order)
    return out


def solve_over_stars(coeff: CoefficientSystem) -> list[tuple[dict, Resolution]]:
    ranges = star_ranges(coeff)
    results = []
    for s3, s4 in product(ranges[(3, "eta")], ranges[(4, "two")]):
        prob = halfturn_problem(coeff, {"eta": s3}, {"two": s4})
        results.append(({"eta@3": s3, "two@4": s4}, solve(prob)))
    return results


def rp1_transfer_d2(coeff: CoefficientSystem, star: int = 0) -> Matrix:
    """Chain-level d2 of the half-turn AHSS, ``E(3,-2) -> E(1,-1)``: the S^1 column of the degree-3 map."""
    f3 = transfer_map(coeff, 3, {"eta": star} if star else None)
    ds = direct_sum(coeff.group_at(coeff.lattice.trivial_subgroup, 2),
                    coeff.group_at(coeff.lattice.trivial_subgroup, 1))
    return (f3 @ ds.inclusion(0)).matrix


# problem files ----------------------------------------------------------------

def loads_problem(text: str, source: str | None = None) -> ExactSequenceProblem:
    """Read ``[slot NAME] GROUP | unknown`` and ``[map A B] matrix = ... | property = ...`` lines."""
    label, sections = "problem", []
    for ln in tokenize(text, source):
        if ln.kind == "assign":
            if ln.key != "label":
                raise ln.error(f"unknown key {ln.key!r}", expected=("label",), source=source)
            label = ln.value
        else:
            sections.append(ln)
    return problem_from_lines(sections, label, source)


def problem_from_lines(lines: list[Line], label: str = "problem", source: str | None = None) -> ExactSequenceProblem:
    slots, maps = [], {}
    for ln in lines:
        if ln.key == "slot":
            if len(ln.args) != 1:
                raise ln.error("expected [slot NAME]", expected=("NAME",), source=source)
            grp = None if ln.value == "unknown" else parse_group(ln.value, ln, ln.value_column, source)
            slots.append(Slot(ln.args[0], grp))
        elif ln.key == "map":
            if len(ln.args) != 2:
                raise ln.error("expected [map FROM TO]", expected=("FROM TO",), source=source)
            maps[tuple(ln.args)] = ln
        else:
            raise ln.error(f"unknown section [{ln.key}]", expected=("[slot]", "[map]"), source=source)
    if not slots:
        raise ParseError("a problem needs at least one [slot]", 1, 1, ("[slot]",), source)
    names = [s.name for s in slots]
    specs = []
    for a, b in zip(slots, slots[1:]):
        ln = maps.pop((a.name, b.name), None)
        if ln is None or ln.value == "unknown":
            specs.append(MapSpec())
            continue
        pairs = payload_pairs(ln, source)
        hom = prop = None
        if "matrix" in pairs:
            if not (a.known and b.known):
                raise ln.error("a matrix needs both endpoint groups", source=source)
            text_m, col = pairs.pop("matrix")
            hom = Homomorphism(a.group, b.group,
                               parse_matrix(text_m, b.group.ngens, a.group.ngens, ln, col, source))
        if "property" in pairs:
            prop, col = pairs.pop("property")
            if prop not in PROPERTIES:
                raise ln.error(f"unknown property {prop!r}", col, PROPERTIES, source)
        if pairs:
            raise ln.error(f"unexpected {', '.join(pairs)}", expected=("matrix", "property"), source=source)
        specs.append(MapSpec(hom, prop))
    if maps:
        (a, b), ln = next(iter(maps.items()))
        raise ln.error(f"[map {a} {b}] does not join consecutive slots",
                       expected=tuple(f"{x} {y}" for x, y in zip(names, names[1:])), source=source)
    return ExactSequenceProblem(tuple(slots), tuple(specs), label)
