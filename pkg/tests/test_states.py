import numpy as np
import pytest

from biunitary_circuits.compiler import compile_circuit, global_unitary
from biunitary_circuits.fills import fill_diagram
from biunitary_circuits.lattice import build_diagram
from biunitary_circuits.states import (
    BRICKWORK,
    CLOCKWORK,
    HYBRID,
    NotSolvable,
    SolvableTensor,
    auto_seam,
    brickwork_solvable,
    build_state,
    check_solvable,
    clockwork_solvable,
    contiguous_block,
    entropies,
    evolve,
    flat_padding_residual,
    growth_profile,
    hybrid_edge,
    random_brickwork,
    random_family,
    random_row,
    reduced_density,
    validate_shading,
)
from biunitary_circuits.structures import fourier_matrix
from biunitary_circuits.tensor import haar_unitary

X2 = np.array([[0, 1], [1, 0]])


def shift_family(q):
    X = np.roll(np.eye(q), 1, axis=0)
    return np.stack([np.linalg.matrix_power(X, b) for b in range(q)])


def test_brickwork_conditions(rng):
    assert check_solvable(random_brickwork(2, 2, rng)).passed
    with pytest.raises(ValueError):
        brickwork_solvable(np.ones((4, 4)), 2, 2)
    with pytest.raises(ValueError):
        brickwork_solvable(np.eye(3), 2, 2)


def test_identity_w_is_solvable_and_swap_w_is_not():
    # W = 1 routes each bond into a wire; W = SWAP passes the bond straight through
    rep = check_solvable(brickwork_solvable(np.eye(4), 2, 2))
    assert rep.passed and rep.second < 1e-12
    with pytest.raises(NotSolvable) as exc:
        brickwork_solvable(np.eye(4)[[0, 2, 1, 3]], 2, 2)
    assert exc.value.report.failed == "transfer-degenerate"


def test_identity_family_rejected_and_shift_family_accepted():
    with pytest.raises(NotSolvable) as exc:
        clockwork_solvable(np.stack([np.eye(2)] * 2))
    assert exc.value.report.failed == "transfer-degenerate"
    for q in (2, 3):
        rep = check_solvable(clockwork_solvable(shift_family(q)))
        assert rep.passed and rep.second < 1e-12


def test_fourier_family_accepted():
    F = fourier_matrix(3) / np.sqrt(3)
    assert check_solvable(clockwork_solvable(np.stack([F, F.conj(), F]))).passed


def test_family_must_be_unitary():
    with pytest.raises(ValueError):
        clockwork_solvable(np.ones((2, 2, 2)))


def test_tensor_shapes():
    with pytest.raises(ValueError):
        SolvableTensor(BRICKWORK, np.ones((2, 2, 3, 2)))
    with pytest.raises(ValueError):
        SolvableTensor(CLOCKWORK, np.ones((2, 2, 1)))
    with pytest.raises(ValueError):
        SolvableTensor("other", np.ones((2, 2, 2)))
    assert SolvableTensor(HYBRID, np.ones((2, 2, 1))).edge


def test_hybrid_edge():
    n = hybrid_edge(fourier_matrix(2) / np.sqrt(2))
    assert n.flatness() < 1e-15 and check_solvable(n).passed
    assert hybrid_edge(np.ones(2) / np.sqrt(2)).flatness() < 1e-15
    with pytest.raises(ValueError):
        hybrid_edge(np.ones((2, 2)))


def test_brickwork_chi1_state_is_product_of_pairs(rng):
    d = build_diagram(4, 1, "brickwork")
    W = haar_unitary(2, rng)
    st = build_state(d, brickwork_solvable(W, 2, 1))
    assert st.ancilla_dim == 1
    # cells pair wires (2, 4) and (6, 0)
    want = np.einsum("bc,da->abcd", W, W) / 2
    assert np.abs(st.vector() - want.reshape(-1)).max() < 1e-12


def test_clockwork_state_matches_direct_contraction(rng):
    d = build_diagram(4, 1, "clockwork")
    F1, F3 = random_family(2, rng), random_family(2, rng)
    tens = {1: clockwork_solvable(F1), 3: clockwork_solvable(F3)}
    st = build_state(d, tens)
    # cell 1 owns face slot 3 with sides 1, 5; cell 3 owns slot 7 with sides 5, 1
    psi = np.zeros((2, 2, 2, 2), complex)
    for s1 in range(2):
        for s3 in range(2):
            for s5 in range(2):
                for s7 in range(2):
                    psi[s1, s3, s5, s7] = F1[s3][s1, s5] * F3[s7][s5, s1]
    psi /= np.linalg.norm(psi)
    assert np.abs(st.vector() - psi.reshape(-1)).max() < 1e-12


@pytest.mark.parametrize("name", ["brickwork", "clockwork", "diagonal-boundary", "checkerboard"])
@pytest.mark.parametrize("closure", ["periodic", "open"])
def test_states_are_normalized(name, closure, rng):
    d = build_diagram(6, 1, name)
    st = build_state(d, random_row(d, rng), closure)
    assert abs(st.norm() - 1) < 1e-12


def test_validate_shading():
    d = build_diagram(8, 1, "diagonal-boundary")
    rng = np.random.default_rng(0)
    row = random_row(d, rng)
    assert set(validate_shading(d, row)) == set(range(1, 8, 2))
    assert {n.variant for n in row.values()} >= {HYBRID}
    with pytest.raises(ValueError):
        validate_shading(build_diagram(8, 1, "brickwork"), {x: row[x] for x in row})


def test_edge_hybrid_under_shaded_face_must_be_flat():
    d = build_diagram(8, 1, "diagonal-boundary")
    rng = np.random.default_rng(1)
    row = random_row(d, rng)
    from biunitary_circuits.states import cell_pattern

    x = next(x for x, n in row.items() if n.edge and cell_pattern(d, x)[1] and n.pairing().shape[1] > 1)
    U = np.array([[np.cos(0.3), -np.sin(0.3)], [np.sin(0.3), np.cos(0.3)]])
    row[x] = hybrid_edge(U)
    with pytest.raises(ValueError, match="flat"):
        build_state(d, row, "open")


def test_open_seam_on_shared_face():
    d = build_diagram(8, 1, "clockwork")
    rng = np.random.default_rng(2)
    row = random_row(d, rng)
    assert auto_seam(d, row) == 0
    st = build_state(d, row, "open")
    assert st.seam is not None and st.ancilla_dim == 2


def test_evolve_matches_global_unitary(rng):
    d = build_diagram(6, 3, "brickwork")
    a = fill_diagram(d, "random-du(3)")
    c = compile_circuit(a)
    st = build_state(d, random_row(d, rng, chi=1))
    U = global_unitary(c).data
    assert np.abs(evolve(st, c, 3).vector() - U @ st.vector()).max() < 1e-12
    twice = evolve(evolve(st, c, 1), c, 2)
    assert np.abs(twice.vector() - U @ st.vector()).max() < 1e-12
    with pytest.raises(ValueError):
        evolve(st, c, 4)


def test_entropy_examples():
    r = entropies(np.diag([1.0, 0.0]))
    assert r.S == 0 and not r.saturated
    r = entropies(np.eye(3) / 3)
    assert abs(r.S - np.log(3)) < 1e-14 and r.saturated
    assert abs(r.renyi[2] - np.log(3)) < 1e-14
    p = np.array([0.7, 0.3])
    r = entropies(np.diag(p))
    assert abs(r.renyi[2] + np.log((p ** 2).sum())) < 1e-14
    with pytest.raises(ValueError):
        entropies(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        entropies(np.diag([1.2, -0.2]))


def test_bell_pair_subsystem():
    from biunitary_circuits.states import DenseState

    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    st = DenseState(psi[:, None], (2, 2))
    r = entropies(reduced_density(st, [0]))
    assert abs(r.S - np.log(2)) < 1e-14


def test_contiguous_block():
    dims = (2, 1, 2, 1, 2, 1)
    assert contiguous_block(dims, 1, 2) == [2, 4]
    assert contiguous_block(dims, 4, 2) == [4, 0]
    with pytest.raises(ValueError):
        contiguous_block(dims, 0, 4)


def test_reduced_density_needs_contiguous_objects():
    from biunitary_circuits.states import DenseState

    st = DenseState(np.ones((8, 1)) / np.sqrt(8), (2, 2, 2))
    with pytest.raises(ValueError):
        reduced_density(st, [0, 2, 5])


def test_flat_padding_residual():
    assert flat_padding_residual(np.diag([0.3, 0.3, 0.2, 0.2]), 2) < 1e-15
    assert flat_padding_residual(np.diag([0.4, 0.3, 0.2, 0.1]), 2) > 0.05
    with pytest.raises(ValueError):
        flat_padding_residual(np.eye(3) / 3, 2)


@pytest.mark.parametrize("name,chi", [("brickwork", 1), ("brickwork", 2), ("clockwork", None)])
def test_thermalization_in_regime(name, chi):
    L, ell = 10, 2
    d = build_diagram(L, 3, name)
    rng = np.random.default_rng(5)
    c = compile_circuit(fill_diagram(d, "random-du(5)"))
    st = build_state(d, random_row(d, rng, chi=chi), "open")
    prof = growth_profile(st, c, ell, 3)
    for r in prof.rows:
        if prof.asserted(r) and 2 * r.t >= ell:
            assert r.deviation < 1e-10, (r.t, r.deviation)


@pytest.mark.parametrize("name", ["brickwork", "clockwork"])
def test_pre_saturation_spectrum_is_flat_padded(name):
    d = build_diagram(10, 2, name)
    rng = np.random.default_rng(8)
    c = compile_circuit(fill_diagram(d, "random-du(8)"))
    st = build_state(d, random_row(d, rng, chi=1 if name == "brickwork" else None), "open")
    # one layer in, a 4-object block is not yet saturated
    s = evolve(st, c, 1)
    A = contiguous_block(s.cut_dims, 6, 4)
    assert flat_padding_residual(reduced_density(s, A), 4) < 1e-10


def test_growth_csv_header(rng):
    d = build_diagram(8, 1, "brickwork")
    c = compile_circuit(fill_diagram(d, "swap"))
    prof = growth_profile(build_state(d, random_row(d, rng), "open"), c, 2, 1)
    assert prof.to_csv().splitlines()[0] == "t,ell,S,S2,S3,qA,saturated"
