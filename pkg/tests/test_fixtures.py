import numpy as np
import pytest

from biunitary_circuits.fills import FILLS, make_fill, parse_fill, fill_diagram, vertex_q
from biunitary_circuits.fixtures import (
    FIXTURE_TOL,
    cross_from_matrix,
    cross_to_matrix,
    fixture_checks,
    kim_cross,
    kim_du,
    load_shipped,
    parse_matrix,
    read_matrix,
    shipped_checks,
    write_matrix,
)
from biunitary_circuits.dims import solve_dimensions
from biunitary_circuits.lattice import build_diagram, classify_vertex
from biunitary_circuits.structures import check_biunitary, check_cross, check_dual_unitary

SIX = ("brickwork", "clockwork", "diagonal-boundary", "wedge", "reflection", "checkerboard")


def test_matrix_file_round_trip(tmp_path, rng):
    m = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    p = tmp_path / "m.txt"
    write_matrix(p, m, "random")
    assert p.read_text().startswith("# random")
    assert np.array_equal(read_matrix(p), m)


def test_parse_matrix_errors():
    with pytest.raises(ValueError):
        parse_matrix("# nothing\n")
    with pytest.raises(ValueError):
        parse_matrix("1 2\n3\n")
    with pytest.raises(ValueError, match="line 2"):
        parse_matrix("1 2\n3 abc\n")


def test_shipped_files_match_closed_forms():
    for name, dev in shipped_checks():
        assert dev <= FIXTURE_TOL, name
    assert check_dual_unitary(load_shipped("kim_du.txt")).passed
    assert check_cross(cross_from_matrix(load_shipped("kim_cross.txt"))).passed


def test_unphased_closed_forms_match_constructors():
    checks = dict(fixture_checks(phis=()))
    assert checks["kim-du"] <= FIXTURE_TOL
    assert checks["kim-cross"] <= FIXTURE_TOL


def test_cross_matrix_layout():
    f = kim_cross()
    assert np.array_equal(cross_from_matrix(cross_to_matrix(f)), f)
    assert check_dual_unitary(kim_du()).passed


def test_parse_fill():
    assert parse_fill("kim(pi/4)") == ("kim", ["pi/4"])
    assert parse_fill("random-du(3)") == ("random-du", ["3"])
    assert parse_fill("swap") == ("swap", [])
    with pytest.raises(ValueError):
        parse_fill("Bad Spec!")
    with pytest.raises(ValueError):
        make_fill("nonsense")


@pytest.mark.parametrize("name", SIX)
@pytest.mark.parametrize("spec", ["fourier-hadamard", "kim(0.3)", "random-du(1)", "pauli-ueb", "cyclic-qls", "swap"])
def test_every_fill_is_biunitary_on_builtins(name, spec):
    d = build_diagram(6, 3, name)
    a = fill_diagram(d, spec, seed=2)
    for v in d.vertices():
        assert check_biunitary(a[v]).passed, (v, classify_vertex(d, v))


def test_fill_names_listed():
    for key in FILLS:
        make_fill(key.replace("(phi)", "(0.1)").replace("(seed)", "(0)"))


def test_vertex_q_on_brickwork():
    d = build_diagram(4, 2, "brickwork")
    sol = solve_dimensions(d).concretize(3)
    assert {vertex_q(d, v, sol) for v in d.vertices()} == {3}
