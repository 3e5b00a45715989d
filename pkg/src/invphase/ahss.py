"""Equivariant Atiyah-Hirzebruch homology spectral sequence.

Homological bidegrees: ``E^r(p, q)`` with ``q <= 0`` and
``d_r : (p, q) -> (p - r, q + r - 1)``.  The E1 entry at ``(p, q)`` is the sum
over relative orbit p-cells ``e`` of ``C.group_at(L_e, -q)``; d1 is the orbit
boundary with each block weighted by the transfer ``L_e <= L_e'``.

Differentials of length two and more are not computed.  They are supplied as
:class:`InjectedDifferential` data, either on page coordinates or on E1 chain
coordinates (concatenated per-cell generators), and validated before use.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .coeffsys import CoefficientSystem
from .errors import CompositionNotZero, LatticeMismatch, Mismatch, ValidationError, WindowViolation
from .fgab import (
    TRIVIAL,
    FgAbGroup,
    Homomorphism,
    block_homomorphism,
    direct_sum,
    homology,
    image,
    is_epimorphism,
    is_monomorphism,
)
from .gcw import EquivariantComplex
from .matrix import Matrix

Bidegree = tuple[int, int]


@dataclass(frozen=True)
class InjectedDifferential:
    page: int
    source: Bidegree
    matrix: Matrix
    level: str = "page"      # "page" or "chain"
    note: str = ""

    @property
    def target(self) -> Bidegree:
        p, q = self.source
        return (p - self.page, q + self.page - 1)


@dataclass(frozen=True, eq=False)
class SpectralPage:
    r: int
    entries: dict
    differentials: dict = field(default_factory=dict)
    lifts: dict = field(default_factory=dict)        # entry as subquotient of the previous page's entry
    reps: dict = field(default_factory=dict)         # generator representatives in E1 chain coordinates
    sums: dict = field(default_factory=dict)         # E1 only: per-cell direct sums

    def entry(self, pq: Bidegree) -> FgAbGroup:
        return self.entries.get(pq, TRIVIAL)

    def target(self, pq: Bidegree) -> Bidegree:
        return (pq[0] - self.r, pq[1] + self.r - 1)

    def differential(self, pq: Bidegree) -> Homomorphism:
        if pq in self.differentials:
            return self.differentials[pq]
        return Homomorphism.zero(self.entry(pq), self.entry(self.target(pq)))

    def check_square_zero(self) -> None:
        for pq in self.entries:
            d = self.differential(pq)
            dd = self.differential(self.target(pq)) @ d
            if not dd.is_zero():
                raise CompositionNotZero(f"d{self.r} o d{self.r} is nonzero out of {pq}")

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "entries": [{"p": p, "q": q, "group": str(g)} for (p, q), g in sorted(self.entries.items())
                        if not g.is_trivial],
            "differentials": [{"source": list(pq), "target": list(self.target(pq)),
                               "matrix": d.matrix.tolist()}
                              for pq, d in sorted(self.differentials.items()) if not d.is_zero()],
        }


def _check_inputs(X: EquivariantComplex, C: CoefficientSystem) -> None:
    if X.lattice != C.lattice:
        raise LatticeMismatch(f"complex {X.name} is over {X.lattice.name}, "
                              f"coefficients are over {C.lattice.name}")
    lo, hi = C.window
    if X.dimension >= 0 and not (lo <= 0 and X.dimension <= hi):
        raise WindowViolation(f"complex {X.name} has cells up to dimension {X.dimension}; "
                              f"the coefficient window [{lo}, {hi}] must cover [0, {X.dimension}]")


def e1_page(X: EquivariantComplex, C: CoefficientSystem) -> SpectralPage:
    _check_inputs(X, C)
    lo, hi = C.window
    entries, sums, reps = {}, {}, {}
    for p in range(X.dimension + 1):
        cells = X.cells_in_dim(p)
        if not cells:
            continue
        for t in range(max(lo, 0), hi + 1):
            ds = direct_sum(*(C.group_at(c.stabilizer, t) for c in cells))
            entries[(p, -t)] = ds.group
            sums[(p, -t)] = ds
            reps[(p, -t)] = Matrix.identity(ds.group.ngens)
    page = SpectralPage(1, entries, {}, {}, reps, sums)
    diffs = {}
    for (p, q) in entries:
        if (p - 1, q) in entries:
            diffs[(p, q)] = d1(X, C, p, q, sums)
    page = SpectralPage(1, entries, diffs, {}, reps, sums)
    page.check_square_zero()
    return page


def d1(X: EquivariantComplex, C: CoefficientSystem, p: int, q: int,
       sums: dict | None = None) -> Homomorphism:
    src_cells, tgt_cells = X.cells_in_dim(p), X.cells_in_dim(p - 1)
    if sums is None:
        sums = {}
    src = sums.get((p, q)) or direct_sum(*(C.group_at(c.stabilizer, -q) for c in src_cells))
    tgt = sums.get((p - 1, q)) or direct_sum(*(C.group_at(c.stabilizer, -q) for c in tgt_cells))
    blocks = {}
    for si, s in enumerate(src_cells):
        for ti, t in enumerate(tgt_cells):
            deg = X.degree(s.id, t.id)
            if deg:
                blocks[(ti, si)] = C.transfer_at(s.stabilizer, t.stabilizer, -q).scale(deg)
    return block_homomorphism(src, tgt, blocks)


def turn_page(page: SpectralPage) -> SpectralPage:
    r = page.r
    entries, lifts, reps = {}, {}, {}
    for pq in page.entries:
        incoming_src = (pq[0] + r, pq[1] - r + 1)
        incoming = (page.differentials[incoming_src] if incoming_src in page.differentials
                    else Homomorphism.zero(page.entry(incoming_src), page.entry(pq)))
        sq = homology(incoming, page.differential(pq))
        entries[pq] = sq.group
        lifts[pq] = sq
        reps[pq] = page.reps[pq] @ sq.reps
    return SpectralPage(r + 1, entries, {}, lifts, reps)


def _e1_coords_to_page(pages: list[SpectralPage], pq: Bidegree, v) -> tuple[int, ...]:
    for pg in pages[1:]:
        v = pg.lifts[pq].coords(v)
    return v


def inject(pages: list[SpectralPage], injected: list[InjectedDifferential]) -> SpectralPage:
    """Return the last page of ``pages`` with the given differentials installed."""
    page = pages[-1]
    diffs = dict(page.differentials)
    for inj in injected:
        if inj.page != page.r:
            raise ValidationError(f"differential for page {inj.page} injected on page {page.r}")
        src, tgt = page.entry(inj.source), page.entry(inj.target)
        if inj.source not in page.entries:
            raise ValidationError(f"page {page.r} has no entry at {inj.source}")
        if inj.level == "chain":
            e1 = pages[0]
            s_sum, t_sum = e1.sums[inj.source], e1.sums.get(inj.target)
            if t_sum is None:
                raise ValidationError(f"page {page.r} has no entry at {inj.target}")
            if inj.matrix.shape != (t_sum.offsets[-1], s_sum.offsets[-1]):
                raise Mismatch(f"chain-level d{page.r} at {inj.source} must be "
                               f"{t_sum.offsets[-1]}x{s_sum.offsets[-1]}, got {inj.matrix.shape}")
            M = t_sum.to_sum @ inj.matrix @ s_sum.from_sum
            cols = []
            for j in range(src.ngens):
                v = M.apply(page.reps[inj.source].column(j))
                v = e1.entry(inj.target).reduce(v)
                try:
                    cols.append(_e1_coords_to_page(pages, inj.target, v))
                except ValueError:
                    raise ValidationError(f"chain-level d{page.r} at {inj.source} does not land in "
                                          f"the surviving part of {inj.target}") from None
            matrix = Matrix.from_columns(cols, tgt.ngens)
        else:
            matrix = inj.matrix
        diffs[inj.source] = Homomorphism(src, tgt, matrix)
    new = SpectralPage(page.r, page.entries, diffs, page.lifts, page.reps, page.sums)
    new.check_square_zero()
    return new


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    complex_name: str
    coefficients: str
    pages: list
    log: list
    graded: list            # (p, q, group) in total degree 0, nonzero only
    extension_ambiguous: bool
    group: FgAbGroup | None

    def entry(self, r: int, pq: Bidegree) -> FgAbGroup:
        return self.pages[r - 1].entry(pq)

    def find(self, r: int, source: Bidegree) -> dict | None:
        return next((e for e in self.log if e["page"] == r and tuple(e["source"]) == source), None)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "method": "ahss",
            "complex": self.complex_name,
            "coefficients": self.coefficients,
            "pages": [pg.to_json() for pg in self.pages],
            "log": self.log,
            "graded": [{"p": p, "q": q, "group": str(g)} for p, q, g in self.graded],
            "group": None if self.group is None else str(self.group),
            "extension_ambiguous": self.extension_ambiguous,
            "settled": True,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def render(self) -> str:
        out = [f"AHSS for {self.complex_name} with {self.coefficients} coefficients"]
        for pg in self.pages:
            out.append(render_page(pg))
        if self.log:
            out.append("differentials:")
            for e in self.log:
                flags = [k for k in ("injective", "surjective", "injected") if e[k]]
                out.append(f"  d{e['page']} {tuple(e['source'])} -> {tuple(e['target'])}: "
                           f"{e['source_group']} -> {e['target_group']}, image order "
                           f"{e['image_order']}{' [' + ', '.join(flags) + ']' if flags else ''}")
        out.append("degree-0 graded: " + (", ".join(f"{g} (p={p})" for p, _, g in self.graded) or "0"))
        if self.extension_ambiguous:
            out.append("extension: ambiguous, the group is an iterated extension of the pieces above")
        else:
            out.append(f"group: {self.group}")
        return "\n".join(out) + "\n"


def render_page(pg: SpectralPage) -> str:
    if not pg.entries:
        return f"E{pg.r}: empty"
    ps = sorted({p for p, _ in pg.entries})
    qs = sorted({q for _, q in pg.entries}, reverse=True)
    cells = [[str(pg.entry((p, q))) if (p, q) in pg.entries else "" for p in ps] for q in qs]
    width = max(4, *(len(s) for row in cells for s in row))
    lines = [f"E{pg.r}:", "  q\\p " + " ".join(f"{p:>{width}}" for p in ps)]
    for q, row in zip(qs, cells):
        lines.append(f"  {q:>3} " + " ".join(f"{s:>{width}}" for s in row))
    return "\n".join(lines)


def _log_entry(page: SpectralPage, pq: Bidegree, injected: bool) -> dict:
    d = page.differential(pq)
    im = image(d).group
    return {
        "page": page.r,
        "source": list(pq),
        "target": list(page.target(pq)),
        "source_group": str(d.source),
        "target_group": str(d.target),
        "matrix": d.matrix.tolist(),
        "image": str(im),
        "image_order": "infinite" if im.order is None else im.order,
        "injective": is_monomorphism(d),
        "surjective": is_epimorphism(d),
        "injected": injected,
    }


def split_forced(pieces: list[FgAbGroup]) -> bool:
    """True when every extension in the filtration splits for formal reasons.

    Pieces are ordered by filtration.  An extension ``0 -> F -> F' -> E -> 0``
    splits whenever ``E`` is free, so it is enough that every piece above the
    lowest one is free.
    """
    return all(g.is_free for g in pieces[1:])


def run(X: EquivariantComplex, C: CoefficientSystem,
        injected: list[InjectedDifferential] = ()) -> ConvergenceReport:
    pages = [e1_page(X, C)]
    ps = [p for p, _ in pages[0].entries]
    last = (max(ps) - min(ps) + 1) if ps else 1
    pending = {}
    for inj in injected:
        if inj.page < 2:
            raise ValidationError("d1 is computed, not injected")
        if inj.page >= last:
            raise ValidationError(f"d{inj.page} cannot be nonzero on a complex of length {last - 1}")
        pending.setdefault(inj.page, []).append(inj)
    log = [_log_entry(pages[0], pq, False) for pq in sorted(pages[0].differentials)
           if not pages[0].differential(pq).source.is_trivial
           and not pages[0].differential(pq).target.is_trivial]
    while pages[-1].r < last:
        pages.append(turn_page(pages[-1]))
        if pages[-1].r in pending:
            pages[-1] = inject(pages, pending[pages[-1].r])
            for inj in pending[pages[-1].r]:
                pg = pages[-1]
                if not pg.entry(inj.source).is_trivial and not pg.entry(inj.target).is_trivial:
                    log.append(_log_entry(pg, inj.source, True))
    final = pages[-1]
    graded = [(p, q, g) for (p, q), g in sorted(final.entries.items()) if p + q == 0 and not g.is_trivial]
    pieces = [g for _, _, g in graded]
    ambiguous = len(pieces) > 1 and not split_forced(pieces)
    group = None if ambiguous else direct_sum(*pieces).group if pieces else TRIVIAL
    return ConvergenceReport(X.name, C.symmetry.name if C.lattice.order == 1
                             else f"{C.symmetry.name}/{C.lattice.name}",
                             pages, log, graded, ambiguous, group)
