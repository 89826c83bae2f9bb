import numpy as np
import pytest

from biunitary_circuits.compiler import compile_circuit
from biunitary_circuits.dynamics import (
    SiteOperator,
    brute_force_correlation,
    correlation_grid,
    diamond_correlation,
    displacement,
    lightcone_correlation,
    on_edge,
    present_slots,
    separation,
    site_matrix,
)
from biunitary_circuits.fills import fill_diagram
from biunitary_circuits.lattice import build_diagram

SIX = ("brickwork", "clockwork", "diagonal-boundary", "wedge", "reflection", "checkerboard")


def test_site_matrices():
    for q in (2, 3):
        for name in ("x", "y", "z"):
            m = site_matrix(name, q)
            assert np.allclose(m.conj().T @ m, np.eye(q))
            assert abs(np.trace(m)) < 1e-12
    assert np.allclose(site_matrix("1", 3), np.eye(3))
    with pytest.raises(ValueError):
        site_matrix("w", 2)


def test_site_operator_traceless_projection():
    op = SiteOperator(0, np.diag([1.0, 0.0]))
    assert abs(np.trace(op.matrix)) < 1e-15
    assert SiteOperator(0, np.eye(2), False).matrix[0, 0] == 1
    with pytest.raises(ValueError):
        SiteOperator(0, np.ones(3))


def test_displacement_periodic():
    d = build_diagram(8, 2, "brickwork")
    assert displacement(d, 0, 2) == 1
    assert displacement(d, 2, 0) == -1
    assert displacement(d, 0, 14) == -1
    assert displacement(d, 0, 8) == 4


def test_on_edge():
    assert on_edge(1, 1) and on_edge(-0.5, 1) and not on_edge(1.5, 1)


@pytest.mark.parametrize("name", SIX)
def test_diamond_matches_brute_force(name):
    a = fill_diagram(build_diagram(6, 3, name), "random-du(11)")
    c = compile_circuit(a)
    rng = np.random.default_rng(0)
    for t in (1, 2, 3):
        top, bot = present_slots(c, t), present_slots(c, 0)
        for _ in range(3):
            r, s = rng.choice(top), rng.choice(bot)
            rho = SiteOperator(int(r), site_matrix("z", c.cut_dims[t][r]))
            sigma = SiteOperator(int(s), site_matrix("x", c.cut_dims[0][s]))
            want = brute_force_correlation(c, rho, sigma, t)
            assert abs(diamond_correlation(a, rho, sigma, t) - want) < 1e-10


@pytest.mark.parametrize("name", SIX)
def test_correlations_vanish_off_the_cone(name):
    # wedge regions carry q^2, so its cut grows fastest
    L, T = (8, 3) if name == "wedge" else (10, 4)
    a = fill_diagram(build_diagram(L, T, name), "random-du(2)")
    grid = correlation_grid(a, "z", "z")
    assert grid.rows
    assert grid.off_cone_max() < 1e-10


@pytest.mark.parametrize("name", ["brickwork", "clockwork", "checkerboard"])
def test_edge_method_agrees_on_the_edge(name):
    a = fill_diagram(build_diagram(8, 3, name), "random-du(9)")
    grid = correlation_grid(a, "z", "z")
    ref = grid.meta["ref"]
    for x, t, v, s in grid.edge_entries():
        if not grid.asserted(t):
            continue
        rho = SiteOperator(ref, site_matrix("z", a.solution.dim(a.diagram.slots(t)[ref][2])))
        sigma = SiteOperator(s, site_matrix("z", a.solution.dim(a.diagram.slots(0)[s][2])))
        assert abs(lightcone_correlation(a, rho, sigma, t) - v) < 1e-10


def test_lightcone_refuses_off_edge_points():
    a = fill_diagram(build_diagram(8, 3, "brickwork"), "swap")
    rho = SiteOperator(8, site_matrix("z", 2))
    with pytest.raises(ValueError):
        lightcone_correlation(a, rho, SiteOperator(8, site_matrix("z", 2)), 3)


def test_swap_brickwork_transports_operators():
    a = fill_diagram(build_diagram(8, 3, "brickwork"), "swap")
    grid = correlation_grid(a, "z", "z", ref=8)
    nonzero = {(x, t) for x, t, v, _, _ in grid.rows if abs(v) > 1e-9}
    assert all(abs(x) == t for x, t in nonzero)
    assert len(nonzero) == 3


def test_separation_counts_layers():
    d = build_diagram(8, 3, "brickwork")
    assert separation(d, 8, 2, 8) == 2
    assert separation(d, 8, 0, 8) == 0


def test_grid_csv_header():
    a = fill_diagram(build_diagram(6, 2, "clockwork"), "fourier-hadamard")
    text = correlation_grid(a).to_csv()
    assert text.splitlines()[0] == "x,t,re,im,on_edge"
