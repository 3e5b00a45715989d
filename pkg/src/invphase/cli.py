"""Command line: spec files in, reports out.

    invphase compute --spec halfturn.spec [--method ahss|cohomology|les] [--emit text|json] [--out PATH]
    invphase compare --spec halfturn.spec            # run every method the spec supports
    invphase compare a.json b.json                   # compare saved reports
    invphase presets list
    invphase coeff validate spin_z2.coeff
    invphase coeff export spin_z2
    invphase format --spec halfturn.spec

Exit codes: 0 success, 1 methods disagree, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import ahss, coeffsys, gcw, lexseq, thomcoh
from .dsl import Line, format_matrix, parse_int, parse_matrix, payload_pairs, tokenize
from .errors import InvphaseError, ParseError, ValidationError
from .matrix import Matrix

METHODS = ("ahss", "cohomology", "les")
KEYS = ("symmetry", "coefficients", "method", "complex", "bundle", "degree", "base", "problem", "emit",
        "description")
SECTIONS = ("cell", "boundary", "inject", "slot", "map")


@dataclass(frozen=True)
class InjectSpec:
    page: int
    source: tuple[int, int]
    kind: str                       # "matrix", "chain" or "from"
    matrix: tuple[tuple[int, ...], ...] = ()
    origin: str = ""
    star: int = 0


@dataclass(frozen=True)
class CellSpec:
    id: str
    dim: int
    stabilizer: str
    sub: bool = False


@dataclass(frozen=True)
class ProblemSpec:
    symmetry: str | None = None
    description: str | None = None
    coefficients: str | None = None
    method: str = "ahss"
    complex: str | None = None
    cells: tuple[CellSpec, ...] = ()
    boundary: tuple[tuple[str, str, tuple[int, ...]], ...] = ()
    injections: tuple[InjectSpec, ...] = ()
    bundle: tuple[int, int] | None = None
    degree: int | None = None
    base: str = "rp_infinity"
    problem: str | None = None
    problem_lines: tuple = field(default=(), compare=False)
    problem_text: tuple[str, ...] = ()
    emit: str = "text"


def _matrix_rows(text: str, ln: Line, col: int, source) -> tuple[tuple[int, ...], ...]:
    try:
        rows = json.loads(text)
    except json.JSONDecodeError:
        rows = None
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ln.error("expected a matrix literal", col, ("[[int, ...], ...]",), source)
    width = len(rows[0]) if rows else 0
    return parse_matrix(text, len(rows), width, ln, col, source).rows


def _bool(text: str, ln: Line, col: int, source) -> bool:
    if text not in ("true", "false"):
        raise ln.error(f"expected true or false, got {text!r}", col, ("true", "false"), source)
    return text == "true"


def parse(text: str, source: str | None = None) -> ProblemSpec:
    lines = tokenize(text, source)
    if not lines:
        raise ParseError("empty spec", 1, 1, KEYS[:3], source)
    values: dict = {}
    cells, boundary, injections, problem_lines = [], [], [], []
    for ln in lines:
        if ln.kind == "assign":
            if ln.key not in KEYS:
                raise ln.error(f"unknown key {ln.key!r}", expected=KEYS, source=source)
            if ln.key in values:
                raise ln.error(f"duplicate key {ln.key!r}", source=source)
            values[ln.key] = ln
            continue
        if ln.key not in SECTIONS:
            raise ln.error(f"unknown section [{ln.key}]", expected=tuple(f"[{s}]" for s in SECTIONS),
                           source=source)
        if ln.key in ("slot", "map"):
            problem_lines.append(ln)
            continue
        pairs = payload_pairs(ln, source)
        if ln.key == "cell":
            if len(ln.args) != 1:
                raise ln.error("expected [cell ID]", expected=("ID",), source=source)
            for need in ("dim", "stabilizer"):
                if need not in pairs:
                    raise ln.error(f"missing {need} = ...", ln.value_column, (need,), source)
            extra = set(pairs) - {"dim", "stabilizer", "sub"}
            if extra:
                raise ln.error(f"unexpected {', '.join(sorted(extra))}", ln.value_column,
                               ("dim", "stabilizer", "sub"), source)
            sub = _bool(pairs["sub"][0], ln, pairs["sub"][1], source) if "sub" in pairs else False
            cells.append(CellSpec(ln.args[0], parse_int(pairs["dim"][0], ln, pairs["dim"][1], source),
                                  pairs["stabilizer"][0], sub))
        elif ln.key == "boundary":
            if len(ln.args) != 2 or set(pairs) != {"degree"}:
                raise ln.error("expected [boundary SRC TGT] degree = N | [N, ...]", ln.value_column,
                               ("degree",), source)
            text_d, col = pairs["degree"]
            if text_d.startswith("["):
                try:
                    degs = json.loads(text_d)
                    assert isinstance(degs, list) and all(type(x) is int for x in degs)
                except (json.JSONDecodeError, AssertionError):
                    raise ln.error("expected a list of integers", col, ("[int, ...]",), source) from None
                degs = tuple(degs)
            else:
                degs = (parse_int(text_d, ln, col, source),)
            boundary.append((ln.args[0], ln.args[1], degs))
        elif ln.key == "inject":
            if len(ln.args) != 3:
                raise ln.error("expected [inject PAGE P Q]", expected=("PAGE P Q",), source=source)
            page, p, q = (parse_int(a, ln, c, source) for a, c in zip(ln.args, ln.arg_columns))
            kinds = [k for k in ("matrix", "chain", "from") if k in pairs]
            if len(kinds) != 1:
                raise ln.error("give exactly one of matrix, chain, from", ln.value_column,
                               ("matrix", "chain", "from"), source)
            kind = kinds[0]
            extra = set(pairs) - {kind, "star"}
            if extra or ("star" in pairs and kind != "from"):
                raise ln.error(f"unexpected {', '.join(sorted(extra or {'star'}))}", ln.value_column,
                               (kind,), source)
            if kind == "from":
                origin, col = pairs["from"]
                if origin != "rp1_transfer":
                    raise ln.error(f"unknown differential source {origin!r}", col, ("rp1_transfer",), source)
                star = parse_int(*pairs["star"][:1], ln, pairs["star"][1], source) if "star" in pairs else 0
                injections.append(InjectSpec(page, (p, q), "from", (), origin, star))
            else:
                injections.append(InjectSpec(page, (p, q), kind, _matrix_rows(pairs[kind][0], ln, pairs[kind][1], source)))

    def get(key, default=None):
        return values[key].value if key in values else default

    method = get("method", "ahss")
    if method not in METHODS:
        ln = values["method"]
        raise ln.error(f"unknown method {method!r}", ln.value_column, METHODS, source)
    emit = get("emit", "text")
    if emit not in ("text", "json"):
        ln = values["emit"]
        raise ln.error(f"unknown emit format {emit!r}", ln.value_column, ("text", "json"), source)
    bundle = None
    if "bundle" in values:
        ln = values["bundle"]
        parts = ln.value.split()
        if len(parts) != 2:
            raise ln.error("expected bundle = M N", ln.value_column, ("M N",), source)
        bundle = (parse_int(parts[0], ln, ln.value_column, source), parse_int(parts[1], ln, ln.value_column, source))
    degree = None
    if "degree" in values:
        degree = parse_int(values["degree"].value, values["degree"], values["degree"].value_column, source)
    if "complex" in values and cells:
        raise values["complex"].error("give either complex = PRESET or [cell] sections, not both",
                                      values["complex"].value_column, (), source)
    if "problem" in values and problem_lines:
        raise values["problem"].error("give either problem = NAME or [slot]/[map] sections, not both",
                                      values["problem"].value_column, (), source)
    if "problem" in values and values["problem"].value != "halfturn_cofiber":
        ln = values["problem"]
        raise ln.error(f"unknown problem {ln.value!r}", ln.value_column, ("halfturn_cofiber",), source)
    return ProblemSpec(
        symmetry=get("symmetry"), description=get("description"), coefficients=get("coefficients"),
        method=method, complex=get("complex"), cells=tuple(cells), boundary=tuple(boundary),
        injections=tuple(injections), bundle=bundle, degree=degree, base=get("base", "rp_infinity"),
        problem=get("problem"), problem_lines=tuple(problem_lines),
        problem_text=tuple(_line_text(ln) for ln in problem_lines), emit=emit,
    )


def _line_text(ln: Line) -> str:
    return f"[{' '.join((ln.key,) + ln.args)}] {ln.value}".rstrip()


def print_spec(spec: ProblemSpec) -> str:
    """Canonical text for a spec; ``parse(print_spec(s)) == s``."""
    out = []
    for key in ("symmetry", "description", "coefficients", "method", "complex"):
        v = getattr(spec, key)
        if v is not None:
            out.append(f"{key} = {v}")
    for c in spec.cells:
        out.append(f"[cell {c.id}] dim = {c.dim} stabilizer = {c.stabilizer} sub = {str(c.sub).lower()}")
    for s, t, degs in spec.boundary:
        d = str(degs[0]) if len(degs) == 1 else "[" + ", ".join(map(str, degs)) + "]"
        out.append(f"[boundary {s} {t}] degree = {d}")
    for inj in spec.injections:
        head = f"[inject {inj.page} {inj.source[0]} {inj.source[1]}]"
        if inj.kind == "from":
            out.append(f"{head} from = {inj.origin}" + (f" star = {inj.star}" if inj.star else ""))
        else:
            out.append(f"{head} {inj.kind} = {format_matrix(Matrix.of(inj.matrix, len(inj.matrix[0]) if inj.matrix else 0))}")
    if spec.bundle is not None:
        out.append(f"bundle = {spec.bundle[0]} {spec.bundle[1]}")
    if spec.degree is not None:
        out.append(f"degree = {spec.degree}")
    if spec.base != "rp_infinity":
        out.append(f"base = {spec.base}")
    if spec.problem is not None:
        out.append(f"problem = {spec.problem}")
    out += list(spec.problem_text)
    if spec.emit != "text":
        out.append(f"emit = {spec.emit}")
    return "\n".join(out) + "\n"


# locating inputs --------------------------------------------------------------

def builtin_specs() -> list[str]:
    return sorted(p.name for p in resources.files("invphase.data").iterdir() if p.name.endswith(".spec"))


def locate_spec(ref: str) -> Path:
    path = Path(ref)
    if path.is_file():
        return path
    name = path.name if path.name.endswith(".spec") else path.name + ".spec"
    if name in builtin_specs():
        return Path(str(resources.files("invphase.data") / name))
    raise ValidationError(f"no spec file {ref!r} (builtin specs: {', '.join(builtin_specs())})")


def load_spec(ref: str) -> tuple[ProblemSpec, Path]:
    path = locate_spec(ref)
    return parse(path.read_text(encoding="utf-8"), str(path)), path.parent


def _coefficients(spec: ProblemSpec, base_dir: Path | None) -> coeffsys.CoefficientSystem:
    if spec.coefficients is None:
        raise ValidationError("this method needs coefficients = NAME|PATH")
    C = coeffsys.resolve(spec.coefficients, base_dir)
    if spec.symmetry is not None and spec.symmetry != C.symmetry.name:
        raise ValidationError(f"spec asks for symmetry {spec.symmetry!r}, "
                              f"coefficients are for {C.symmetry.name!r}")
    return C


def build_complex(spec: ProblemSpec, C: coeffsys.CoefficientSystem) -> gcw.EquivariantComplex:
    if spec.complex is not None:
        return gcw.from_reference(spec.complex)
    if not spec.cells:
        raise ValidationError("the ahss method needs complex = PRESET or [cell] sections")
    cells = tuple(gcw.Cell(c.id, c.dim, c.stabilizer, c.sub) for c in spec.cells)
    bd = {(s, t): d for s, t, d in spec.boundary}
    return gcw.EquivariantComplex(C.lattice, cells, bd, "inline")


# running ----------------------------------------------------------------------

def run_ahss(spec: ProblemSpec, base_dir: Path | None = None) -> ahss.ConvergenceReport:
    C = _coefficients(spec, base_dir)
    X = build_complex(spec, C)
    injected = []
    for inj in spec.injections:
        if inj.kind == "from":
            M, level = lexseq.rp1_transfer_d2(C, inj.star), "chain"
        else:
            M, level = Matrix.of(inj.matrix, len(inj.matrix[0]) if inj.matrix else 0), (
                "chain" if inj.kind == "chain" else "page")
        injected.append(ahss.InjectedDifferential(inj.page, inj.source, M, level, inj.origin))
    return ahss.run(X, C, injected)


def run_cohomology(spec: ProblemSpec, base_dir: Path | None = None) -> thomcoh.WindowReport:
    if spec.bundle is None or spec.degree is None:
        raise ValidationError("the cohomology method needs bundle = M N and degree = T")
    return thomcoh.compute_window(spec.bundle, spec.degree, spec.base)


def run_les(spec: ProblemSpec, base_dir: Path | None = None) -> lexseq.Resolution:
    if spec.problem == "halfturn_cofiber":
        C = _coefficients(spec, base_dir)
        verdicts = {str(r.group) for _, r in lexseq.solve_over_stars(C)}
        if len(verdicts) != 1:
            raise ValidationError(f"the answer depends on undetermined entries: {sorted(verdicts)}")
        return lexseq.solve(lexseq.halfturn_problem(C))
    if spec.problem_lines:
        return lexseq.solve(lexseq.problem_from_lines(list(spec.problem_lines)))
    raise ValidationError("the les method needs problem = halfturn_cofiber or [slot]/[map] sections")


RUNNERS = {"ahss": run_ahss, "cohomology": run_cohomology, "les": run_les}


def available_methods(spec: ProblemSpec) -> list[str]:
    out = []
    if spec.complex is not None or spec.cells:
        out.append("ahss")
    if spec.bundle is not None and spec.degree is not None:
        out.append("cohomology")
    if spec.problem is not None or spec.problem_lines:
        out.append("les")
    return out


def compute(spec: ProblemSpec, method: str | None = None, base_dir: Path | None = None):
    return RUNNERS[method or spec.method](spec, base_dir)


def compare_reports(reports: dict[str, dict]) -> tuple[bool, list[str]]:
    """Agreement means every report is settled, unambiguous, and names the same group."""
    lines, groups = [], set()
    for name, rep in reports.items():
        g = rep.get("group")
        ok = rep.get("settled", False) and not rep.get("extension_ambiguous", True) and g is not None
        lines.append(f"{name}: {g if g is not None else 'ambiguous'}"
                     + ("" if rep.get("settled", False) else " (unsettled)"))
        groups.add(g if ok else None)
    agree = len(groups) == 1 and None not in groups
    lines.append("agree" if agree else "disagree")
    return agree, lines


# entry point -------------------------------------------------------------------

def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invphase", description="Groups of invertible phases on (G-)spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="run one method on a spec file")
    c.add_argument("--spec", required=True)
    c.add_argument("--method", choices=METHODS)
    c.add_argument("--emit", choices=("text", "json"))
    c.add_argument("--out")

    cmp_ = sub.add_parser("compare", help="check that several methods agree")
    cmp_.add_argument("reports", nargs="*", help="saved JSON reports")
    cmp_.add_argument("--spec")
    cmp_.add_argument("--methods", help="comma-separated subset of " + ",".join(METHODS))

    pr = sub.add_parser("presets", help="complex presets")
    pr.add_argument("action", choices=("list",))

    co = sub.add_parser("coeff", help="coefficient systems")
    co.add_argument("action", choices=("validate", "export", "list"))
    co.add_argument("path", nargs="?")

    f = sub.add_parser("format", help="print a spec file in canonical form")
    f.add_argument("--spec", required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (InvphaseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "compute":
        spec, base = load_spec(args.spec)
        report = compute(spec, args.method, base)
        emit = args.emit or spec.emit
        _emit(report.dumps() if emit == "json" else report.render(), args.out)
        return 0
    if args.command == "compare":
        reports = {}
        if args.spec:
            spec, base = load_spec(args.spec)
            methods = args.methods.split(",") if args.methods else available_methods(spec)
            for m in methods:
                if m not in METHODS:
                    raise ValidationError(f"unknown method {m!r}")
                reports[m] = compute(spec, m, base).to_json()
        for path in args.reports:
            rep = json.loads(Path(path).read_text(encoding="utf-8"))
            reports[f"{path} ({rep.get('method', '?')})"] = rep
        if len(reports) < 2:
            raise ValidationError("compare needs at least two reports or methods")
        agree, lines = compare_reports(reports)
        print("\n".join(lines))
        return 0 if agree else 1
    if args.command == "presets":
        for name, (_, doc) in sorted(gcw.PRESETS.items()):
            print(doc)
        return 0
    if args.command == "coeff":
        if args.action == "list":
            print("\n".join(coeffsys.builtin_names()))
            return 0
        if not args.path:
            raise ValidationError(f"coeff {args.action} needs a path or builtin name")
        C = coeffsys.resolve(args.path)
        if args.action == "validate":
            print(f"OK {C.symmetry.name} over {C.lattice.name}, window {C.window[0]}..{C.window[1]}")
        else:
            sys.stdout.write(coeffsys.dumps_json(C))
        return 0
    if args.command == "format":
        spec, _ = load_spec(args.spec)
        sys.stdout.write(print_spec(spec))
        return 0
    raise ValidationError(f"unknown command {args.command}")


if __name__ == "__main__":
    raise SystemExit(main())
