import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from invphase import coeffsys
from invphase.errors import (
    MissingTransfer,
    OutOfWindow,
    ParseError,
    UnknownSubgroup,
    ValidationError,
)
from invphase.fgab import TRIVIAL, FgAbGroup, Homomorphism

G = FgAbGroup.parse


def test_builtins_listed():
    assert {"spin", "spin_z2"} <= set(coeffsys.builtin_names())


@pytest.mark.parametrize("L, q, expected", [
    ("e", 0, "Z/2"),
    ("e", 1, "Z/2"),
    ("e", 2, "Z"),
    ("e", 3, "0"),
    ("Z2", 2, "Z + Z/8"),
    ("Z2", 1, "Z/2 + Z/2"),
])
def test_group_at(spin_z2, L, q, expected):
    assert spin_z2.group_at(L, q) == G(expected)


def test_trivial_subgroup_rows_agree_between_files(spin, spin_z2):
    assert spin.restricted("e") == spin_z2.restricted("e")
    assert [str(spin.group_at("e", q)) for q in range(4)] == ["Z/2", "Z/2", "Z", "0"]


def test_transfer_degree_one_hits_reduced_factor(spin_z2):
    tr = spin_z2.transfer_at("e", "Z2", 1)
    assert tr.source == G("Z/2") and tr.target == G("Z/2 + Z/2")
    assert tr.apply((1,)) == (0, 1)


def test_transfer_degree_two(spin_z2):
    tr = spin_z2.transfer_at("e", "Z2", 2)
    assert tr.apply((1,))[0] == 2


def test_transfer_to_self_is_identity(spin_z2):
    for L in ("e", "Z2"):
        for q in range(4):
            assert spin_z2.transfer_at(L, L, q) == Homomorphism.identity(spin_z2.group_at(L, q))


def test_query_errors(spin_z2):
    with pytest.raises(OutOfWindow):
        spin_z2.group_at("e", 4)
    with pytest.raises(OutOfWindow):
        spin_z2.group_at("e", -1)
    with pytest.raises(UnknownSubgroup):
        spin_z2.group_at("Z3", 0)
    # trivial endpoints force the zero map
    assert spin_z2.transfer_at("e", "Z2", 3).is_zero()


def test_missing_transfer_between_nontrivial_groups():
    sys = coeffsys.loads(HEADER + "[group e 0] Z\n[group Z2 0] Z\n")
    with pytest.raises(MissingTransfer):
        sys.transfer_at("e", "Z2", 0)


def test_restriction_after_transfer_is_index(spin_z2):
    for q in range(3):
        comp = spin_z2.point_at("e", "Z2", q) @ spin_z2.transfer_at("e", "Z2", q)
        assert comp == Homomorphism.identity(spin_z2.group_at("e", q)).scale(2)


HEADER = "symmetry = toy\nwindow = 0..1\nambient = Z2\norder = 2\n[subgroup e] order = 1\n" \
         "[subgroup Z2] order = 2\n[include e Z2]\n"


def test_empty_system_is_valid():
    sys = coeffsys.loads("symmetry = toy\nwindow = 0..0\n")
    assert sys.group_at("e", 0) == TRIVIAL
    assert sys.lattice.names == ("e",)


def test_self_transfer_must_be_identity():
    with pytest.raises(ValidationError):
        coeffsys.loads(HEADER + "[group e 0] Z\n[transfer e e 0] matrix = [[2]]\n")


def test_transfer_endpoint_checked_by_shape():
    with pytest.raises(ParseError):
        coeffsys.loads(HEADER + "[group e 0] Z\n[group Z2 0] Z + Z\n[transfer e Z2 0] matrix = [[1]]\n")


def test_ill_defined_transfer():
    with pytest.raises(ValidationError):
        coeffsys.loads(HEADER + "[group e 0] Z/2\n[group Z2 0] Z\n[transfer e Z2 0] matrix = [[1]]\n")


def test_transfer_against_inclusion():
    with pytest.raises(ValidationError):
        coeffsys.loads(HEADER + "[group e 0] Z\n[group Z2 0] Z\n[transfer Z2 e 0] matrix = [[1]]\n")


def test_restriction_mismatch_detected():
    text = HEADER + ("[group e 0] Z\n[group Z2 0] Z\n[transfer e Z2 0] matrix = [[1]]\n"
                     "[point e Z2 0] matrix = [[1]]\n")
    with pytest.raises(ValidationError, match="index"):
        coeffsys.loads(text)


def test_functoriality_along_chain():
    head = ("symmetry = toy\nwindow = 0..0\nambient = Z4\norder = 4\n[subgroup e] order = 1\n"
            "[subgroup H] order = 2\n[subgroup G] order = 4\n[include e H]\n[include H G]\n"
            "[group e 0] Z\n[group H 0] Z\n[group G 0] Z\n"
            "[transfer e H 0] matrix = [[1]]\n[transfer H G 0] matrix = [[3]]\n")
    coeffsys.loads(head + "[transfer e G 0] matrix = [[3]]\n")
    with pytest.raises(ValidationError, match="functorial"):
        coeffsys.loads(head + "[transfer e G 0] matrix = [[2]]\n")


def test_inclusion_is_transitive():
    sys = coeffsys.loads("symmetry = toy\nwindow = 0..0\nambient = Z4\norder = 4\n[subgroup e] order = 1\n"
                         "[subgroup H] order = 2\n[subgroup G] order = 4\n[include H G]\n")
    assert sys.lattice.includes("e", "G") and sys.lattice.index("e", "G") == 4


@pytest.mark.parametrize("text, line, col", [
    (HEADER + "[group e 0] Z/\n", 8, 13),
    (HEADER + "[grop e 0] Z\n", 8, 1),
    ("window = 0..1\n", 2, 1),
    (HEADER + "[group e 7] Z\n", 8, None),
])
def test_parse_error_positions(text, line, col):
    with pytest.raises((ParseError, OutOfWindow)) as info:
        coeffsys.loads(text, "toy.coeff")
    if isinstance(info.value, ParseError):
        assert info.value.line == line
        if col is not None:
            assert info.value.column == col


def test_unknown_subgroup_in_file():
    with pytest.raises((UnknownSubgroup, ParseError)):
        coeffsys.loads(HEADER + "[group Z3 0] Z\n")


@pytest.mark.parametrize("name", ["spin", "spin_z2"])
def test_round_trip(name):
    sys = coeffsys.load_builtin(name)
    text = coeffsys.dumps(sys)
    again = coeffsys.loads(text)
    assert coeffsys.dumps(again) == text
    assert again.groups == sys.groups
    assert again.transfers == sys.transfers
    assert again.point_inclusions == sys.point_inclusions
    assert again.eta == sys.eta


@pytest.mark.parametrize("name", ["spin", "spin_z2"])
def test_json_is_deterministic(name):
    a = coeffsys.dumps_json(coeffsys.load_builtin(name))
    b = coeffsys.dumps_json(coeffsys.load_builtin(name))
    assert a == b
    obj = json.loads(a)
    assert obj["symmetry"]["name"] == "spin"


@st.composite
def toy_systems(draw):
    """Random valid systems over Z2 built from a free transfer table."""
    lines = [HEADER]
    for q in range(2):
        ge = draw(st.sampled_from(["0", "Z", "Z/2", "Z + Z/2"]))
        gz = draw(st.sampled_from(["0", "Z", "Z + Z", "Z/4", "Z + Z/2"]))
        lines.append(f"[group e {q}] {ge}\n[group Z2 {q}] {gz}\n")
        src, tgt = G(ge), G(gz)
        if src.ngens and tgt.ngens:
            cols = []
            for d in src.orders:
                col = []
                for e in tgt.orders:
                    # only values that keep the map well defined
                    ok = [x for x in range(-3, 4) if (e == 0 and d * x == 0) or (e and (d * x) % e == 0)
                          or (d == 0 and (e == 0 or True))]
                    ok = [x for x in ok if not (d and e == 0 and x)]
                    ok = [x for x in ok if not (d and e and (d * x) % e)]
                    col.append(draw(st.sampled_from(ok)))
                cols.append(col)
            rows = [[cols[j][i] for j in range(len(cols))] for i in range(tgt.ngens)]
            lines.append(f"[transfer e Z2 {q}] matrix = {rows}\n")
    return "".join(lines)


@given(toy_systems())
def test_round_trip_property(text):
    sys = coeffsys.loads(text)
    dumped = coeffsys.dumps(sys)
    again = coeffsys.loads(dumped)
    assert coeffsys.dumps(again) == dumped
    assert coeffsys.dumps_json(again) == coeffsys.dumps_json(sys)
