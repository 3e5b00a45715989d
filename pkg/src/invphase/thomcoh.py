"""Cohomological AHSS for 4-truncated ko on Thom spectra over RP^infinity.

Mod-2 cohomology of ``Thom(RP^inf; V)`` for ``V = m L + n`` is free on the
Thom class ``Ubar`` in degree ``rank V`` over ``Z/2[a]``, and the Steenrod
action is twisted by the Stiefel-Whitney classes ``w(V) = (1 + a)^m``:
``Sq^k(Ubar) = Ubar w_k(V)``.

The spectral sequence has ``E2^{p,q} = H^p(Thom V; pi_t)``, ``t = -q``, with
the rows of ``ko<0..4>`` (Z, Z/2, Z/2, 0, Z).  d2 is ``Sq^2`` on mod-2 rows
and ``Sq^2`` after mod-2 reduction out of the bottom integral row.  Phases in
spatial dimension ``d`` correspond to cohomological total degree 1 (checked
against the point base, where this recovers the coefficient table).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb

from .errors import TruncationExceeded, ValidationError
from .fgab import TRIVIAL, FgAbGroup, Homomorphism, homology_at, Z

KO_TRUNCATED = {0: Z, 1: FgAbGroup.cyclic(2), 2: FgAbGroup.cyclic(2), 3: TRIVIAL, 4: Z}
ROWS = range(0, 5)
MAX_TOTAL_DEGREE = 4


@dataclass(frozen=True)
class VirtualBundle:
    m: int      # copies of the tautological line
    n: int      # trivial rank

    @property
    def rank(self) -> int:
        return self.m + self.n

    @property
    def w1(self) -> int:
        return self.m % 2

    @property
    def orientable(self) -> bool:
        return self.w1 == 0

    def __str__(self) -> str:
        return f"{self.m}L + {self.n}"


def binom_mod2(m: int, k: int) -> int:
    """Coefficient of ``a^k`` in ``(1 + a)^m`` mod 2, for any integer m."""
    if k < 0:
        return 0
    if m >= 0:
        return int((m & k) == k)
    # (1+a)^m = sum (-1)^k C(k-m-1, k) a^k
    n = k - m - 1
    return int((n & k) == k)


def sw_total(V: VirtualBundle | int, degree: int) -> frozenset[int]:
    """Exponents of ``a`` in ``w(V)`` up to ``a^degree``."""
    m = V.m if isinstance(V, VirtualBundle) else V
    return frozenset(k for k in range(degree + 1) if binom_mod2(m, k))


def _poly_mul(x: frozenset[int], y: frozenset[int]) -> frozenset[int]:
    out: set[int] = set()
    for i in x:
        for j in y:
            out ^= {i + j}
    return frozenset(out)


@dataclass(frozen=True)
class ModTwoClass:
    """A mod-2 class ``p(a)`` or ``Ubar p(a)``; ``exponents`` lists the monomials of ``p``."""

    exponents: frozenset[int]
    thom: VirtualBundle | None = None

    def __post_init__(self):
        object.__setattr__(self, "exponents", frozenset(self.exponents))
        if any(e < 0 for e in self.exponents):
            raise ValidationError("negative power of a")

    @classmethod
    def a(cls, j: int = 1) -> "ModTwoClass":
        return cls(frozenset({j}))

    @classmethod
    def thom_class(cls, V: VirtualBundle, j: int = 0) -> "ModTwoClass":
        return cls(frozenset({j}), V)

    @property
    def is_zero(self) -> bool:
        return not self.exponents

    @property
    def degree(self) -> int | None:
        if self.is_zero:
            return None
        return max(self.exponents) + (self.thom.rank if self.thom else 0)

    def __add__(self, other: "ModTwoClass") -> "ModTwoClass":
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if self.thom != other.thom:
            raise ValidationError("cannot add classes with different Thom factors")
        return ModTwoClass(self.exponents ^ other.exponents, self.thom)

    def __mul__(self, other: "ModTwoClass") -> "ModTwoClass":
        if self.thom and other.thom:
            raise ValidationError("products of two Thom classes are not modelled")
        return ModTwoClass(_poly_mul(self.exponents, other.exponents), self.thom or other.thom)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for j in sorted(self.exponents):
            mono = "" if j == 0 else ("a" if j == 1 else f"a^{j}")
            if self.thom:
                terms.append("Ubar" + (f"*{mono}" if mono else ""))
            else:
                terms.append(mono or "1")
        return " + ".join(terms)


ZERO = ModTwoClass(frozenset())


def _sq_poly(k: int, exps: frozenset[int]) -> frozenset[int]:
    out: set[int] = set()
    for j in exps:
        if comb(j, k) % 2:
            out ^= {j + k}
    return frozenset(out)


def sq(k: int, x: ModTwoClass) -> ModTwoClass:
    if k < 0:
        raise ValidationError("Steenrod squares have non-negative index")
    if x.thom is None:
        return ModTwoClass(_sq_poly(k, x.exponents))
    w = sw_total(x.thom, k)
    out = ModTwoClass(frozenset(), x.thom)
    for i in range(k + 1):
        if i in w:
            out = out + ModTwoClass(_poly_mul(frozenset({i}), _sq_poly(k - i, x.exponents)), x.thom)
    return out


# integral cohomology of the Thom spectrum -----------------------------------

def integral_group(V: VirtualBundle, p: int, base: str = "rp_infinity") -> FgAbGroup:
    """``H^p(Thom V; Z)``, twisted by ``w1(V)`` over RP^infinity."""
    j = p - V.rank
    if j < 0:
        return TRIVIAL
    if base == "point":
        return Z if j == 0 else TRIVIAL
    if V.orientable:
        return Z if j == 0 else (FgAbGroup.cyclic(2) if j % 2 == 0 else TRIVIAL)
    return FgAbGroup.cyclic(2) if j % 2 else TRIVIAL


def mod2_group(V: VirtualBundle, p: int, base: str = "rp_infinity") -> FgAbGroup:
    j = p - V.rank
    if j < 0 or (base == "point" and j > 0):
        return TRIVIAL
    return FgAbGroup.cyclic(2)


def e2_group(V: VirtualBundle, p: int, t: int, base: str) -> FgAbGroup:
    coeff = KO_TRUNCATED.get(t, TRIVIAL)
    if coeff.is_trivial or p < 0:
        return TRIVIAL
    if coeff == Z:
        return integral_group(V, p, base)
    return mod2_group(V, p, base)


def generator_name(V: VirtualBundle, p: int, t: int, base: str) -> str | None:
    if e2_group(V, p, t, base).is_trivial:
        return None
    j = p - V.rank
    mono = "" if j == 0 else ("*a" if j == 1 else f"*a^{j}")
    return ("U" if KO_TRUNCATED[t] == Z else "Ubar") + mono


def _reduction(V: VirtualBundle, p: int, t: int, base: str) -> ModTwoClass:
    """Mod-2 image of the generator of ``E2^{p,-t}``."""
    if e2_group(V, p, t, base).is_trivial:
        return ModTwoClass(frozenset(), V)
    return ModTwoClass.thom_class(V, p - V.rank)


def d2(V: VirtualBundle, p: int, t: int, base: str = "rp_infinity") -> Homomorphism:
    """``d2 : E2^{p,-t} -> E2^{p+2,-t-1}``."""
    src, tgt = e2_group(V, p, t, base), e2_group(V, p + 2, t + 1, base)
    if src.is_trivial or tgt.is_trivial or t not in (0, 1):
        return Homomorphism.zero(src, tgt)
    image = sq(2, _reduction(V, p, t, base))
    hit = int(image == _reduction(V, p + 2, t + 1, base))
    return Homomorphism.of(src, tgt, [[hit]])


@dataclass(frozen=True)
class WindowReport:
    bundle: VirtualBundle
    total_degree: int
    base: str
    e2: list        # (p, q, group, generator)
    e3: list
    differentials: list
    unsettled: list

    @property
    def group(self) -> FgAbGroup | None:
        pieces = [g for _, _, g, _ in self.e3]
        if len(pieces) > 1 and not all(g.is_free for g in pieces[1:]):
            return None
        out = TRIVIAL
        for g in pieces:
            out = FgAbGroup.from_orders(out.orders + g.orders)
        return out

    @property
    def extension_ambiguous(self) -> bool:
        return self.group is None

    @property
    def settled(self) -> bool:
        return not self.unsettled

    def to_json(self) -> dict:
        g = self.group
        return {
            "schema": 1,
            "method": "cohomology",
            "bundle": {"m": self.bundle.m, "n": self.bundle.n, "rank": self.bundle.rank},
            "base": self.base,
            "total_degree": self.total_degree,
            "dictionary": "phases in spatial dimension d <-> cohomological total degree 1 "
                          "of ko<0..4> on the Thom spectrum",
            "e2": [{"p": p, "q": q, "group": str(gr), "generator": name} for p, q, gr, name in self.e2],
            "e3": [{"p": p, "q": q, "group": str(gr), "generator": name} for p, q, gr, name in self.e3],
            "differentials": self.differentials,
            "unsettled": self.unsettled,
            "graded": [{"p": p, "q": q, "group": str(gr)} for p, q, gr, _ in self.e3],
            "group": None if g is None else str(g),
            "extension_ambiguous": self.extension_ambiguous,
            "settled": self.settled,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def render(self) -> str:
        out = [f"Cohomological AHSS of ko<0..4> on Thom({self.base}; {self.bundle}), total degree "
               f"{self.total_degree}",
               "E2:"]
        out += [f"  ({p},{q}) {g}  [{name}]" for p, q, g, name in self.e2] or ["  0"]
        out.append("d2:")
        out += [f"  {d['source_generator']} -> {d['target_generator']}: {d['matrix']}"
                for d in self.differentials] or ["  none"]
        out.append("E3:")
        out += [f"  ({p},{q}) {g}  [{name}]" for p, q, g, name in self.e3] or ["  0"]
        if self.unsettled:
            out.append("unsettled: " + "; ".join(self.unsettled))
        out.append(f"group: {self.group}" if self.group is not None else "extension: ambiguous")
        return "\n".join(out) + "\n"


def compute_window(V: VirtualBundle | tuple[int, int], total_degree: int,
                   base: str = "rp_infinity") -> WindowReport:
    if isinstance(V, tuple):
        V = VirtualBundle(*V)
    if base not in ("rp_infinity", "point"):
        raise ValidationError(f"unknown base {base!r} (have: rp_infinity, point)")
    if abs(total_degree) > MAX_TOTAL_DEGREE:
        raise TruncationExceeded(f"total degree {total_degree} is outside the range "
                                 f"[-{MAX_TOTAL_DEGREE}, {MAX_TOTAL_DEGREE}] covered by ko<0..4>")

    def cell(n, t):
        p = n + t
        return p, -t, e2_group(V, p, t, base)

    e2, e3, diffs = [], [], []
    for t in ROWS:
        p, q, g = cell(total_degree, t)
        if g.is_trivial:
            continue
        e2.append((p, q, g, generator_name(V, p, t, base)))
        incoming = d2(V, p - 2, t - 1, base) if t >= 1 else Homomorphism.zero(TRIVIAL, g)
        outgoing = d2(V, p, t, base)
        for d, (sp, st) in ((incoming, (p - 2, t - 1)), (outgoing, (p, t))):
            if not d.source.is_trivial and not d.target.is_trivial:
                entry = {"source": [sp, -st], "target": [sp + 2, -st - 1],
                         "source_generator": generator_name(V, sp, st, base),
                         "target_generator": generator_name(V, sp + 2, st + 1, base),
                         "matrix": d.matrix.tolist()}
                if entry not in diffs:
                    diffs.append(entry)
        h = homology_at(incoming, outgoing)
        if not h.is_trivial:
            e3.append((p, q, h, generator_name(V, p, t, base)))
    unsettled = []
    for p, q, _, _ in e3:
        t = -q
        for r in range(3, 6):
            for (sp, st), (tp, tt) in (((p - r, t - r + 1), (p, t)), ((p, t), (p + r, t + r - 1))):
                if _e3_nonzero(V, sp, st, base) and _e3_nonzero(V, tp, tt, base):
                    unsettled.append(f"d{r}: ({sp},{-st}) -> ({tp},{-tt}) is not determined")
    return WindowReport(V, total_degree, base, e2, e3, diffs, unsettled)


def _e3_nonzero(V: VirtualBundle, p: int, t: int, base: str) -> bool:
    if t not in ROWS:
        return False
    g = e2_group(V, p, t, base)
    if g.is_trivial:
        return False
    incoming = d2(V, p - 2, t - 1, base) if t >= 1 else Homomorphism.zero(TRIVIAL, g)
    return not homology_at(incoming, d2(V, p, t, base)).is_trivial

