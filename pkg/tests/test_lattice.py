import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biunitary_circuits.dims import apex_pins, solve_dimensions
from biunitary_circuits.lattice import (
    BUILTIN_SHADINGS,
    CROSS,
    DUAL_UNITARY,
    HADAMARD,
    QLS,
    UEB,
    IllegalDiagram,
    build_diagram,
    classify_pattern,
    classify_vertex,
    cut_space,
    faces_from_uv2,
    kind_pattern,
    rotate90,
    rotate_kind,
)

SIX = ("brickwork", "clockwork", "diagonal-boundary", "wedge", "reflection", "checkerboard")


def kinds(d):
    return {classify_vertex(d, v).name for v in d.vertices()}


def test_pattern_census():
    count = Counter()
    for p in itertools.product([False, True], repeat=4):
        try:
            count[classify_pattern(*p).name] += 1
        except IllegalDiagram:
            count["illegal"] += 1
    assert count == {DUAL_UNITARY: 1, UEB: 4, HADAMARD: 2, QLS: 4, CROSS: 1, "illegal": 4}


@pytest.mark.parametrize("p", [p for p in itertools.product([False, True], repeat=4) if sum(p) != 3])
def test_kind_pattern_round_trip(p):
    k = classify_pattern(*p)
    assert kind_pattern(k) == dict(zip("nswe", p))


def test_layers_hold_half_L_vertices():
    d = build_diagram(8, 4, "brickwork")
    for t in range(4):
        assert len(d.layer(t)) == 4
    assert len(d.vertices()) == 16


def test_builtin_classifications():
    assert kinds(build_diagram(8, 4, "all-unshaded")) == {DUAL_UNITARY}
    assert kinds(build_diagram(8, 4, "all-shaded")) == {CROSS}
    assert kinds(build_diagram(8, 4, "checkerboard")) == {HADAMARD}
    assert kinds(build_diagram(8, 4, "diagonal-boundary")) == {QLS, DUAL_UNITARY, CROSS}
    w = build_diagram(8, 4, "wedge", apex=(1, 3))
    assert classify_vertex(w, (1, 3)).name == UEB


def test_every_builtin_is_legal():
    for name in SIX:
        d = build_diagram(8, 4, name)
        assert d.vertices()
    assert set(SIX) <= set(BUILTIN_SHADINGS)


def test_three_shaded_faces_rejected():
    with pytest.raises(IllegalDiagram):
        build_diagram(8, 2, [(1, 0), (1, 2), (0, 1)])


def test_bad_sizes_rejected():
    with pytest.raises(IllegalDiagram):
        build_diagram(7, 2)
    with pytest.raises(IllegalDiagram):
        build_diagram(8, 0)


def test_explicit_faces_from_doubled_coordinates():
    faces = faces_from_uv2([(3, 1, True), (1, 1, False)])
    assert faces == {(2, 1): True, (1, 0): False}
    with pytest.raises(ValueError):
        faces_from_uv2([(2, 1, True)])


def test_rotate90_examples():
    plain = build_diagram(8, 4, "all-unshaded", periodic=False)
    assert not rotate90(plain).shaded
    cb = build_diagram(8, 4, "checkerboard", periodic=False)
    r = rotate90(cb)
    assert kinds(r) == {HADAMARD}
    assert r.shaded == build_diagram(r.L, r.T, "checkerboard", periodic=False, phase=1).shaded
    diag = rotate90(build_diagram(8, 4, "diagonal-boundary", periodic=False, velocity=1))
    assert diag.shaded == build_diagram(diag.L, diag.T, "diagonal-boundary", periodic=False, velocity=-1, offset=3, width=3).shaded
    with pytest.raises(IllegalDiagram):
        rotate90(build_diagram(8, 4, "brickwork"))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_rotate90_commutes_with_classification(seed):
    r = np.random.default_rng(seed)
    probe = build_diagram(6, 4, periodic=False)
    for _ in range(50):
        faces = {f for f in probe.faces() if r.random() < 0.4}
        try:
            d = build_diagram(6, 4, faces, periodic=False)
        except IllegalDiagram:
            continue
        rd = rotate90(d)
        got = Counter(str(classify_vertex(rd, v)) for v in rd.vertices())
        want = Counter(str(rotate_kind(classify_vertex(d, v))) for v in d.vertices())
        assert got == want
        return


def test_cut_space_examples():
    d = build_diagram(8, 4, "all-unshaded")
    sol = solve_dimensions(d).concretize(2)
    cs = cut_space(d, 2, sol)
    assert len(cs) == 8 and np.prod([x for _, x in cs]) == 2**8
    d = build_diagram(8, 4, "all-shaded")
    cs = cut_space(d, 1, solve_dimensions(d).concretize(2))
    assert all(obj[0] == "f" for obj, _ in cs) and np.prod([x for _, x in cs]) == 2**8
    d = build_diagram(8, 4, "wedge", apex=(1, 3))
    sol = solve_dimensions(d, apex_pins(d, (1, 3), 2)).concretize(2)
    cs = cut_space(d, 2, sol)
    assert any(obj[0] == "f" and x == 4 for obj, x in cs)


@pytest.mark.parametrize("name", SIX)
def test_cut_dimension_invariant_in_time(name):
    d = build_diagram(8, 4, name)
    pins = apex_pins(d, (1, 3), 2) if name == "wedge" else None
    sol = solve_dimensions(d, pins).concretize(2)
    totals = {int(np.prod([x for _, x in cut_space(d, t, sol)])) for t in range(d.T + 1)}
    assert len(totals) == 1
