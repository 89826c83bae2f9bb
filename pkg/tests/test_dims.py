
import pytest

from biunitary_circuits.dims import CONTRADICTION, SOLVED, TRIVIALIZED, apex_pins, pin_key, solve_dimensions
from biunitary_circuits.lattice import build_diagram, classify_vertex

RECTS = [(0, 2, 0, 2), (3, 5, 1, 3)]


def wedge():
    return build_diagram(8, 4, "wedge", apex=(1, 3))


def test_wedge_faces_are_q_squared():
    d = wedge()
    sol = solve_dimensions(d, apex_pins(d, (1, 3), 2))
    assert sol.status == SOLVED
    shaded = {sol.dim(d.region(f)) for f in d.faces() if d.is_shaded(f)}
    assert shaded == {4}


def test_double_rectangle_trivializes():
    d = build_diagram(8, 9, "rectangles", rects=RECTS)
    sol = solve_dimensions(d)
    assert sol.status == TRIVIALIZED
    assert all(sol.dim(o) == 1 for o in sol.exponents)


def test_single_rectangle_is_not_trivialized():
    d = build_diagram(8, 9, "rectangles", rects=RECTS[:1])
    assert solve_dimensions(d).status == SOLVED


def test_all_unshaded_free_classes():
    d = build_diagram(8, 4, "brickwork")
    sol = solve_dimensions(d)
    assert sol.status == SOLVED
    assert sol.free_generators and len(sol.free_generators) == len(sol.generators)
    assert {e for g, e in sol.exponents.values()} == {1}


def test_pins_conflict():
    d = wedge()
    a, b = apex_pins(d, (1, 3), 2)
    assert solve_dimensions(d, {a: 2, b: 3}).status == CONTRADICTION
    assert solve_dimensions(d, {d.region((2, 3)): 3}).status == CONTRADICTION


def test_pins_order_independent_and_idempotent():
    d = wedge()
    pins = apex_pins(d, (1, 3), 2)
    forward = solve_dimensions(d, dict(pins))
    backward = solve_dimensions(d, dict(reversed(list(pins.items()))))
    assert forward.dims() == backward.dims()
    again = solve_dimensions(d, dict(pins, **{}))
    assert again.dims() == forward.dims()


def test_pin_key_from_scenario_spec():
    d = wedge()
    assert pin_key(d, {"object": "face", "s": 2, "y": 3}) == d.region((2, 3))
    with pytest.raises(ValueError):
        pin_key(d, {"object": "bogus"})


@pytest.mark.parametrize("name", ["brickwork", "clockwork", "diagonal-boundary", "checkerboard", "reflection"])
def test_solution_satisfies_vertex_relations(name):
    d = build_diagram(8, 4, name)
    sol = solve_dimensions(d).concretize(3)
    for v in d.vertices():
        legs = d.vertex_legs(v)
        kind = classify_vertex(d, v)
        dims = {k: (1 if o is None else sol.dim(o)) for k, o in legs.items()}
        if kind.name == "dual-unitary":
            assert dims["nw"] == dims["se"] and dims["ne"] == dims["sw"]
        elif kind.name == "cross":
            assert dims["n"] == dims["s"] and dims["w"] == dims["e"]
        elif kind.name == "hadamard":
            pair = ("n", "s") if kind.detail == "ns" else ("w", "e")
            assert dims[pair[0]] == dims[pair[1]]
