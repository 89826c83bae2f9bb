import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biunitary_circuits.lattice import CROSS, DUAL_UNITARY, HADAMARD, QLS, UEB, VertexKind
from biunitary_circuits.structures import (
    as_cross,
    as_dual_unitary,
    check_biunitary,
    check_cross,
    check_dual_unitary,
    check_hadamard,
    check_qls,
    check_ueb,
    checkerboard_cell,
    compose_diagonal,
    cross_from_hadamards,
    cyclic_qls,
    delta_tensor,
    du_from_hadamards,
    du_vertex,
    dual,
    expected_lambda,
    fourier_matrix,
    hadamard_vertex,
    make_vertex,
    pauli_ueb,
    perturb_vertex,
    phased_hadamard,
    qls_vertex,
    random_hadamard,
    random_vertex,
    swap_gate,
    weyl_ueb,
)
from biunitary_circuits.tensor import contract

KIM = 0.5 * np.array([[1, 1, 1, -1], [1, -1, 1, 1], [1, 1, -1, 1], [-1, 1, 1, 1]])
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
X = np.array([[0, 1], [1, 0]])

KINDS = [
    VertexKind(DUAL_UNITARY),
    VertexKind(UEB, "w"),
    VertexKind(UEB, "n"),
    VertexKind(HADAMARD, "ew"),
    VertexKind(HADAMARD, "ns"),
    VertexKind(QLS, "ne"),
    VertexKind(QLS, "sw"),
    VertexKind(CROSS),
]


def test_check_biunitary_examples():
    rep = check_biunitary(du_vertex(swap_gate(2, 2)))
    assert rep.passed and abs(rep.lam - 1) < 1e-12
    rep = check_biunitary(du_vertex(np.eye(4)))
    assert not rep.passed and rep.failed_condition == "horizontal-1"
    rep = check_biunitary(hadamard_vertex(fourier_matrix(2), "ew"))
    assert rep.passed and abs(rep.lam - 2) < 1e-12


def test_check_dual_unitary_examples():
    assert check_dual_unitary(KIM).passed
    assert not check_dual_unitary(CNOT).passed
    assert check_dual_unitary(swap_gate(2, 2)).passed
    with pytest.raises(ValueError):
        check_dual_unitary(np.eye(3))


def test_check_ueb_examples():
    assert check_ueb(pauli_ueb()).passed
    assert not check_ueb(np.stack([np.eye(2)] * 4)).passed
    assert check_ueb(weyl_ueb(3)).passed
    with pytest.raises(ValueError):
        check_ueb(pauli_ueb()[:3])


def test_check_hadamard_examples():
    assert check_hadamard([[1, 1], [1, -1]]).passed
    assert not check_hadamard(np.eye(2)).passed
    assert check_hadamard(phased_hadamard(0.3)).passed


def test_check_qls_examples():
    assert check_qls(cyclic_qls(3)).passed
    bad = cyclic_qls(3)
    bad[0, 1] = bad[0, 0]
    assert not check_qls(bad).passed
    th = 0.7
    u, w = np.array([np.cos(th), np.sin(th)]), np.array([-np.sin(th), np.cos(th)])
    assert check_qls(np.array([[u, w], [w, u]])).passed


def test_check_cross_examples():
    I = np.eye(2)
    assert check_cross(np.array([[I, X], [X, I]])).passed
    assert not check_cross(np.array([[I, I], [I, I]])).passed
    F = phased_hadamard(0.3)
    assert check_cross(cross_from_hadamards(F, F, F, F)).passed


def test_du_from_fourier_is_kim_and_self_dual():
    F = fourier_matrix(2)
    U = du_from_hadamards(F, F, F, F)
    assert np.abs(U - KIM).max() < 1e-12
    assert np.abs(dual(U) - U).max() < 1e-12
    Fn = F / np.sqrt(2)
    assert np.abs(du_from_hadamards(Fn, Fn, Fn, Fn) - KIM).max() < 1e-12


def test_du_from_hadamards_rejects_non_hadamard():
    with pytest.raises(ValueError):
        du_from_hadamards(np.eye(2), np.eye(2), np.eye(2), np.eye(2))


def test_cross_from_fourier_pattern():
    F = fourier_matrix(2)
    f = cross_from_hadamards(F, F, F, F)
    assert np.allclose(f[0, 0], np.eye(2)) and np.allclose(f[1, 1], np.eye(2))
    assert np.allclose(f[0, 1], X) and np.allclose(f[1, 0], X)


def test_cross_at_quarter_pi_is_antidiagonal():
    H = phased_hadamard(np.pi / 4)
    f = cross_from_hadamards(H, H, H, H)
    assert np.abs(np.diag(f[0, 0])).max() < 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), q=st.sampled_from([2, 3]))
def test_identical_hadamards_give_self_dual_gates(seed, q):
    H = random_hadamard(q, np.random.default_rng(seed))
    U = du_from_hadamards(H, H, H, H)
    assert check_dual_unitary(U).passed
    assert np.abs(dual(U) - U).max() < 1e-10


@pytest.mark.parametrize("kind", KINDS, ids=str)
@pytest.mark.parametrize("q", [2, 3])
def test_random_instances_pass_and_perturbations_fail(kind, q):
    rng = np.random.default_rng(7)
    for _ in range(20):
        b = random_vertex(kind, q, rng)
        rep = check_biunitary(b)
        assert rep.passed, rep
        want = expected_lambda(kind, q)
        if want is not None:
            assert abs(rep.lam - want) < 1e-10
        assert not check_biunitary(perturb_vertex(b, rng)).passed


@pytest.mark.parametrize("q", [2, 3])
def test_generic_and_specialized_checks_agree(q):
    rng = np.random.default_rng(3)
    for _ in range(10):
        b = random_vertex(VertexKind(DUAL_UNITARY), q, rng)
        assert check_dual_unitary(as_dual_unitary(b)).passed == check_biunitary(b).passed
        c = random_vertex(VertexKind(CROSS), q, rng)
        assert check_cross(as_cross(c)).passed == check_biunitary(c).passed


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_checkerboard_cells_compose(seed):
    rng = np.random.default_rng(seed)
    H = lambda axis: hadamard_vertex(random_hadamard(2, rng), axis)
    du = checkerboard_cell(H("ew"), H("ns"), H("ns"), H("ew"))
    assert du.kind.name == DUAL_UNITARY
    assert check_dual_unitary(as_dual_unitary(du)).passed
    cr = checkerboard_cell(H("ns"), H("ew"), H("ew"), H("ns"))
    assert cr.kind.name == CROSS
    assert check_cross(as_cross(cr)).passed


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), placement=st.sampled_from(["upper-right", "upper-left"]))
def test_composites_of_du_gates_stay_biunitary(seed, placement):
    rng = np.random.default_rng(seed)
    a = random_vertex(VertexKind(DUAL_UNITARY), 2, rng)
    b = random_vertex(VertexKind(DUAL_UNITARY), 2, rng)
    assert check_biunitary(compose_diagonal(a, b, placement)).passed


def test_compose_with_trivial_vertex():
    rng = np.random.default_rng(0)
    a = random_vertex(VertexKind(DUAL_UNITARY), 2, rng)
    # a scalar vertex has no wire to share with a
    triv = make_vertex(VertexKind(DUAL_UNITARY), {"nw": 1, "ne": 1, "sw": 1, "se": 1}, np.ones((1, 1)), ("nw", "ne", "sw", "se"))
    with pytest.raises(ValueError):
        compose_diagonal(a, triv)


def test_compose_rejects_bad_placement():
    rng = np.random.default_rng(0)
    a = random_vertex(VertexKind(DUAL_UNITARY), 2, rng)
    with pytest.raises(ValueError):
        compose_diagonal(a, a, "beside")


def test_delta_tensor():
    assert np.allclose(delta_tensor(3, 2).data, np.eye(3))
    assert np.count_nonzero(delta_tensor(2, 3).data) == 2
    a = delta_tensor(2, 3, ["a", "b", "x"])
    b = delta_tensor(2, 3, ["x", "c", "d"])
    assert np.allclose(contract(a, b, [("x", "x")]).data, delta_tensor(2, 4).data)
    with pytest.raises(ValueError):
        delta_tensor(2, 0)


def test_qls_vertex_corner_legs():
    b = qls_vertex(cyclic_qls(2), "ne")
    assert set(k for k, v in b.dims().items() if v > 1) == {"n", "e", "sw"}
