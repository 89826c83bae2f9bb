"""Solvable initial states, their evolution, and subsystem entropies.

The initial state hangs below cut 0 as a row of cells, one per odd ``x``
(the vertex positions of layer ``-1``). A cell touches the faces
``W = (-1, x-1)``, ``N = (0, x)``, ``E = (-1, x+1)`` and the wires ``x`` and
``x + 1``. Shaded faces are physical objects of cut 0 shared with the
neighbouring cell; unshaded side faces carry an auxiliary bond.

Tensor layouts:

* brickwork ``N[a, b, c, d] = N^{(b,c)}_{ad}``: bonds ``a`` (west) and ``d``
  (east), wires ``b`` and ``c``;
* clockwork and hybrid ``N[b, a, c] = N^{(b)}_{ac}``: ``a`` west leg, ``c``
  east leg, ``b`` the remaining physical leg (the N face, or the one wire of
  a mixed cell).

A mixed cell next to a bond-dimension-1 brickwork region has a trivial bond
on its unshaded side. Such an *edge* hybrid is a pairing ``M[b, s]`` of its
two physical legs (``s`` the shaded side face, or absent). It must be
unitary, and when ``b`` is a shaded face it must also have flat modulus
``|M[b, s]|^2 = 1/q_s``, the shaded counterpart of unitarity (a complex
Hadamard matrix, or a flat vector).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .compiler import DEFAULT_CAP, CapExceeded, GateCircuit, apply_layers, contract_network
from .lattice import ShadedDiagram
from .tensor import BUILD_TOL, VERIFY_TOL, Tensor, haar_unitary

BRICKWORK = "brickwork"
CLOCKWORK = "clockwork"
HYBRID = "hybrid"
VARIANTS = (BRICKWORK, CLOCKWORK, HYBRID)

EIG_CUTOFF = 1e-14
GAP_TOL = 1e-8


@dataclass(frozen=True)
class SolvableTensor:
    variant: str
    body: np.ndarray

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        b = np.asarray(self.body, dtype=np.complex128)
        if self.variant == BRICKWORK:
            if b.ndim != 4 or b.shape[0] != b.shape[3] or b.shape[1] != b.shape[2]:
                raise ValueError(f"brickwork tensor needs shape (chi, q, q, chi), got {b.shape}")
        elif b.ndim != 3 or (b.shape[1] != b.shape[2] and 1 not in b.shape[1:]) or (self.variant == CLOCKWORK and b.shape[1] != b.shape[2]):
            raise ValueError(f"{self.variant} tensor needs shape (q_b, q, q) or, for an edge hybrid, (q_b, q, 1), got {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "body", b)

    @property
    def chi(self) -> int:
        return self.body.shape[0] if self.variant == BRICKWORK else self.body.shape[1]

    @property
    def q(self) -> int:
        return self.body.shape[1] if self.variant == BRICKWORK else self.body.shape[0]

    def w_matrix(self) -> np.ndarray:
        """Brickwork ``W[(a, b), (c, d)] = N^{(b,c)}_{ad}``."""
        chi, q = self.chi, self.q
        return self.body.reshape(chi * q, q * chi)

    def transfer(self) -> np.ndarray:
        """Transfer matrix, before rescaling.

        Brickwork: ``E[(a a'), (d d')] = sum_{bc} N^{(b,c)}_{ad} conj(N^{(b,c)}_{a'd'})``.
        Clockwork/hybrid: ``E[a, c] = sum_b |N^{(b)}_{ac}|^2`` (the side legs are
        shared objects, so ket and bra indices coincide).
        """
        N = self.body
        if self.variant == BRICKWORK:
            chi = self.chi
            return np.einsum("abcd,ebcf->aedf", N, N.conj()).reshape(chi * chi, chi * chi)
        return np.einsum("bac,bac->ac", N, N.conj()).real

    @property
    def edge(self) -> bool:
        return self.variant == HYBRID and 1 in self.body.shape[1:]

    def pairing(self) -> np.ndarray:
        """Edge hybrid as the matrix ``M[b, s]``."""
        return self.body.reshape(self.body.shape[0], -1)

    def flatness(self) -> float:
        M = self.pairing()
        return float(np.abs(np.abs(M) ** 2 - 1 / M.shape[0]).max())

    def fixed_vector(self) -> np.ndarray:
        if self.variant == BRICKWORK:
            return np.eye(self.chi).reshape(-1)
        return np.ones(self.chi)


@dataclass
class SolvableReport:
    passed: bool
    unitarity: float  # worst horizontal-unitarity residual
    leading: complex = 1.0
    second: float = 0.0  # modulus of the next eigenvalue after rescaling
    eigvec_residual: float = 0.0
    failed: str | None = None
    detail: str = ""

    def __str__(self):
        if self.passed:
            return f"solvable (unitarity {self.unitarity:.1e}, |lambda_2| {self.second:.3g})"
        return f"not solvable: {self.failed} ({self.detail})"


def horizontal_residual(n: SolvableTensor) -> float:
    if n.edge:
        M = n.pairing()
        if M.shape[1] == 1:
            return float(abs(np.linalg.norm(M) - 1))
        I = np.eye(M.shape[0])
        if M.shape[0] != M.shape[1]:
            return float("inf")
        return float(max(np.abs(M.conj().T @ M - I).max(), np.abs(M @ M.conj().T - I).max()))
    if n.variant == BRICKWORK:
        W = n.w_matrix()
        I = np.eye(W.shape[0])
        return float(max(np.abs(W.conj().T @ W - I).max(), np.abs(W @ W.conj().T - I).max()))
    I = np.eye(n.chi)
    return float(max(max(np.abs(M.conj().T @ M - I).max(), np.abs(M @ M.conj().T - I).max()) for M in n.body))


def check_solvable(n: SolvableTensor, tol: float = VERIFY_TOL) -> SolvableReport:
    """Horizontal unitarity, then a unique leading transfer eigenvalue 1 with the pairing eigenvectors."""
    res = horizontal_residual(n)
    if res > tol:
        return SolvableReport(False, res, failed="horizontal-unitarity", detail=f"residual {res:.3e}")
    if n.edge:
        # the trivial bond side has a one-dimensional transfer matrix
        return SolvableReport(True, res)
    E = n.transfer() / n.q
    v = n.fixed_vector()
    vec_res = float(max(np.abs(E @ v - v).max(), np.abs(v @ E - v).max()))
    if n.variant != BRICKWORK:
        ds = float(max(np.abs(E.sum(0) - 1).max(), np.abs(E.sum(1) - 1).max()))
        vec_res = max(vec_res, ds)
    ev = np.linalg.eigvals(E)
    ev = ev[np.argsort(-np.abs(ev))]
    lead = complex(ev[0])
    second = float(abs(ev[1])) if len(ev) > 1 else 0.0
    rep = SolvableReport(True, res, lead, second, vec_res)
    if vec_res > tol or abs(lead - 1) > np.sqrt(tol):
        rep.passed, rep.failed = False, "transfer-eigenvectors"
        rep.detail = f"pairing vectors are not fixed (residual {vec_res:.3e}, leading {lead:.6g})"
    elif second > 1 - GAP_TOL:
        rep.passed, rep.failed = False, "transfer-degenerate"
        rep.detail = f"second eigenvalue modulus {second:.12g}; leading eigenvalue is not simple"
    return rep


class NotSolvable(ValueError):
    """A candidate tensor fails a solvability condition; ``report`` says which."""

    def __init__(self, report: SolvableReport):
        super().__init__(f"not solvable: {report.failed} ({report.detail})")
        self.report = report


def _require(rep: SolvableReport):
    if not rep.passed:
        raise NotSolvable(rep)


# constructors ------------------------------------------------------------------


def brickwork_solvable(W, q: int, chi: int = 1, tol: float = BUILD_TOL) -> SolvableTensor:
    """Brickwork tensor from a unitary on ``C^chi (x) C^q`` (rows ``(a, b)``, columns ``(c, d)``)."""
    W = np.asarray(W, dtype=np.complex128)
    if W.shape != (q * chi, q * chi):
        raise ValueError(f"W must be {q * chi}x{q * chi}, got {W.shape}")
    err = np.abs(W.conj().T @ W - np.eye(q * chi)).max()
    if err > tol:
        raise ValueError(f"W is not unitary (residual {err:.3e})")
    n = SolvableTensor(BRICKWORK, W.reshape(chi, q, q, chi))
    _require(check_solvable(n))
    return n


def _family_tensor(variant: str, family, tol: float) -> SolvableTensor:
    F = np.asarray(family, dtype=np.complex128)
    if F.ndim != 3 or F.shape[1] != F.shape[2]:
        raise ValueError("family must be a stack of square matrices")
    for b, M in enumerate(F):
        err = np.abs(M.conj().T @ M - np.eye(M.shape[0])).max()
        if err > tol:
            raise ValueError(f"member {b} is not unitary (residual {err:.3e})")
    n = SolvableTensor(variant, F)
    _require(check_solvable(n))
    return n


def clockwork_solvable(family, tol: float = BUILD_TOL) -> SolvableTensor:
    return _family_tensor(CLOCKWORK, family, tol)


def hybrid_solvable(family, tol: float = BUILD_TOL) -> SolvableTensor:
    return _family_tensor(HYBRID, family, tol)


def hybrid_edge(M, tol: float = BUILD_TOL) -> SolvableTensor:
    """Edge hybrid from a unitary pairing ``M[b, s]`` (or a unit vector ``M[b]``)."""
    M = np.asarray(M, dtype=np.complex128)
    M = M.reshape(M.shape[0], -1)
    n = SolvableTensor(HYBRID, M[:, :, None])
    res = horizontal_residual(n)
    if res > tol:
        raise ValueError(f"edge pairing is not unitary (residual {res:.3e})")
    return n


def random_brickwork(q: int, chi: int, rng) -> SolvableTensor:
    return brickwork_solvable(haar_unitary(q * chi, rng), q, chi)


def random_family(q: int, rng, size: int | None = None) -> np.ndarray:
    return np.stack([haar_unitary(q, rng) for _ in range(q if size is None else size)])


def random_row(d: ShadedDiagram, rng, q: int = 2, chi: int | None = None) -> dict:
    """Random solvable tensor for every cell of the bottom row, keyed by ``x``.

    Brickwork cells get bond dimension ``chi`` (``q`` when the row has no
    mixed cells, else 1 so that they meet the edge hybrids). Edge hybrids get a
    random complex Hadamard pairing under a shaded top face, else a Haar unitary.
    """
    from .structures import random_hadamard

    pats = {x: cell_pattern(d, x) for x in state_cells(d)}
    kinds = {x: pattern_variant(p) for x, p in pats.items()}
    if chi is None:
        chi = 1 if HYBRID in kinds.values() else q
    out = {}
    for x, p in pats.items():
        if kinds[x] == BRICKWORK:
            out[x] = random_brickwork(q, chi, rng)
        elif kinds[x] == CLOCKWORK:
            out[x] = clockwork_solvable(random_family(q, rng))
        elif p == (False, True, False):
            out[x] = hybrid_edge(np.exp(2j * np.pi * rng.random(q)) / np.sqrt(q))
        elif p[1]:
            out[x] = hybrid_edge(random_hadamard(q, rng) / np.sqrt(q))
        else:
            out[x] = hybrid_edge(haar_unitary(q, rng))
    return out


# placement on a diagram ------------------------------------------------------------


def cell_pattern(d: ShadedDiagram, x: int) -> tuple[bool, bool, bool]:
    return d.is_shaded(d.norm_face((-1, x - 1))), d.is_shaded(d.norm_face((0, x))), d.is_shaded(d.norm_face((-1, x + 1)))


def pattern_variant(pattern) -> str:
    if not any(pattern):
        return BRICKWORK
    if all(pattern):
        return CLOCKWORK
    if pattern == (True, False, True):
        raise ValueError("cell with shaded sides and an unshaded top carries no physical leg")
    return HYBRID


def state_cells(d: ShadedDiagram) -> list[int]:
    if not d.periodic:
        raise ValueError("solvable states are built on periodic diagrams")
    return list(range(1, d.L, 2))


@dataclass
class DenseState:
    """State on the slots of one cut, possibly entangled with an ancilla.

    ``psi`` has shape ``(D_cut, D_anc)``; the ancilla holds the open bonds of
    an ``"open"`` closure and is never acted on by the circuit.
    """

    psi: np.ndarray
    cut_dims: tuple
    t: int = 0
    seam: int | None = None  # slot just east of the open cut, if any

    @property
    def ancilla_dim(self) -> int:
        return self.psi.shape[1]

    def norm(self) -> float:
        return float(np.linalg.norm(self.psi))

    def vector(self) -> np.ndarray:
        if self.ancilla_dim != 1:
            raise ValueError("state is entangled with an ancilla")
        return self.psi[:, 0]


def _lookup(tensors, x: int, variant: str) -> SolvableTensor:
    if isinstance(tensors, SolvableTensor):
        n = tensors
    elif isinstance(tensors, dict) and x in tensors:
        n = tensors[x]
    elif isinstance(tensors, dict) and variant in tensors:
        n = tensors[variant]
    else:
        raise ValueError(f"no {variant} tensor given for cell {x}")
    if n.variant != variant:
        raise ValueError(f"cell {x} needs a {variant} tensor (shading of the bottom row), got {n.variant}")
    return n


def validate_shading(d: ShadedDiagram, tensors) -> dict:
    """Match every cell of the bottom row to a tensor of the variant its shading demands."""
    return {x: _lookup(tensors, x, pattern_variant(cell_pattern(d, x))) for x in state_cells(d)}


def _orient(n: SolvableTensor, x: int, W: bool, Nf: bool, E: bool) -> np.ndarray:
    """Hybrid body with its legs matched to the cell; edge pairings are checked for flatness."""
    body = n.body
    if not n.edge:
        return body
    if Nf and n.flatness() > BUILD_TOL:
        raise ValueError(f"edge hybrid at cell {x} has a shaded top face and needs flat modulus (deviation {n.flatness():.3e})")
    side = body.shape[1] * body.shape[2]
    if side > 1:
        # put the physical side leg on the shaded side face (west, else east)
        shape = (body.shape[0], side, 1) if W else (body.shape[0], 1, side)
        if not (W or E):
            raise ValueError(f"cell {x} has no shaded side face for a two-leg edge pairing")
        body = body.reshape(shape)
    return body


def auto_seam(d: ShadedDiagram, tensors) -> int:
    """Cell whose west link is cut by an open closure: a shared shaded face if any, else the widest bond."""
    cells = state_cells(d)
    pats = {x: cell_pattern(d, x) for x in cells}
    for i, x in enumerate(cells):
        if pats[x][0]:
            return i
    widths = []
    for i, x in enumerate(cells):
        n = _lookup(tensors, x, pattern_variant(pats[x]))
        widths.append(n.body.shape[0] if n.variant == BRICKWORK else _orient(n, x, *pats[x]).shape[1])
    return int(np.argmax(widths))


def build_state(d: ShadedDiagram, tensors, closure: str = "periodic", seam: int | None = None, cap: int = DEFAULT_CAP) -> DenseState:
    """Contract the solvable row into a normalized state on cut 0.

    ``tensors`` is one tensor for every cell, a dict keyed by variant name, or
    a dict keyed by cell position ``x``. ``closure="periodic"`` traces the ring;
    ``"open"`` cuts it just west of the ``seam``-th cell (see :func:`auto_seam`
    when omitted) and keeps the severed legs as an ancilla.
    """
    if closure not in ("periodic", "open"):
        raise ValueError(f"unknown closure {closure!r}")
    cells = state_cells(d)
    slots = d.slots(0)
    n_slots = len(slots)
    pats = {x: cell_pattern(d, x) for x in cells}
    placed = validate_shading(d, tensors)
    if seam is None:
        seam = auto_seam(d, tensors) if closure == "open" else 0
    present = [k for k, s in enumerate(slots) if s[3]]
    dims = {}
    tens = []
    west_label, east_label = {}, {}
    for x in cells:
        n, (W, Nf, E) = placed[x], pats[x]
        wl, el = f"w{x}", f"e{x}"
        west_label[x], east_label[x] = wl, el
        gap = lambda y: (2 * y + 1) % n_slots
        wire = lambda y: (2 * y) % n_slots
        if n.variant == BRICKWORK:
            labels = [wl, f"p{wire(x)}", f"p{wire(x + 1)}", el]
            _set_dims(dims, labels, n.body.shape)
            tens.append(Tensor.from_array(n.body, labels))
            continue
        if Nf:
            b = gap(x)
        elif not W:
            b = wire(x)
        else:
            b = wire(x + 1)
        body = _orient(n, x, W, Nf, E)
        labels = [f"p{b}", wl, el]
        _set_dims(dims, labels, body.shape)
        tens.append(Tensor.from_array(body, labels))
    # links between consecutive cells
    for i, x in enumerate(cells):
        y = cells[(i + 1) % len(cells)]
        face_shaded = pats[x][2]
        if face_shaded != pats[y][0]:
            raise ValueError(f"cells {x} and {y} disagree on the shading of their shared face")
        left, right = east_label[x], west_label[y]
        if dims[left] != dims[right]:
            raise ValueError(f"cells {x} and {y} meet with leg dims {dims[left]} and {dims[right]}")
        cut_here = closure == "open" and i == (seam - 1) % len(cells)
        if face_shaded:
            slot = (2 * (x + 1) + 1) % n_slots
            dims[f"p{slot}"] = dims[left]
            legs = [left, f"p{slot}"] + ([] if cut_here else [right])
            tens.append(_delta(dims[left], legs))
            if cut_here:
                tens.append(_link(dims[right], right, "ancW"))
        elif cut_here:
            tens.append(_link(dims[left], left, "ancE"))
            tens.append(_link(dims[right], right, "ancW"))
        else:
            tens.append(_link(dims[left], left, right))
    for k in present:
        if f"p{k}" not in dims:
            raise ValueError(f"slot {k} of cut 0 is not covered by any cell")
    anc = []
    if closure == "open":
        anc = [l for l in ("ancW", "ancE") if any(l in t.labels for t in tens)]
    cut_dims = tuple(dims.get(f"p{k}", 1) for k in range(n_slots))
    D = int(np.prod(cut_dims))
    A = int(np.prod([_anc_dim(tens, l) for l in anc])) if anc else 1
    if D * A > cap:
        raise CapExceeded(f"state dimension {D * A} exceeds cap {cap}")
    out = contract_network(tens, [f"p{k}" for k in present] + anc)
    psi = out.data.reshape(D, A)
    nrm = np.linalg.norm(psi)
    if nrm < 1e-300:
        raise ValueError("the solvable row contracts to the zero state")
    seam_slot = (2 * cells[seam % len(cells)] - 1) % n_slots if closure == "open" else None
    return DenseState(psi / nrm, cut_dims, 0, seam_slot)


def _set_dims(dims: dict, labels, shape):
    for l, s in zip(labels, shape):
        if dims.setdefault(l, s) != s:
            raise ValueError(f"leg {l} has dim {s} but {dims[l]} elsewhere")


def _delta(dim: int, labels) -> Tensor:
    t = np.zeros((dim,) * len(labels), dtype=np.complex128)
    for i in range(dim):
        t[(i,) * len(labels)] = 1
    return Tensor.from_array(t, labels)


def _link(dim: int, a: str, b: str) -> Tensor:
    return Tensor.from_array(np.eye(dim, dtype=np.complex128), [a, b])


def _anc_dim(tens, label: str) -> int:
    for t in tens:
        if label in t.labels:
            return t.dim(label)
    raise KeyError(label)


# evolution and entropies ------------------------------------------------------------


def evolve(state: DenseState, c: GateCircuit, steps: int, backend=None) -> DenseState:
    """Apply ``steps`` layers starting at the state's cut, gate by gate."""
    t0, t1 = state.t, state.t + steps
    if steps < 0 or t1 > c.T:
        raise ValueError(f"cannot evolve from cut {t0} by {steps} layers (circuit has {c.T})")
    if tuple(c.cut_dims[t0]) != tuple(state.cut_dims):
        raise ValueError(f"state dims {state.cut_dims} do not match cut {t0} dims {c.cut_dims[t0]}")
    out = apply_layers(c, state.psi.T, t0, t1, backend).T
    return DenseState(out, tuple(c.cut_dims[t1]), t1, state.seam)


def contiguous_block(cut_dims, start: int, ell: int) -> list[int]:
    """``ell`` consecutive present slots from the first one at or after ``start``, wrapping around the ring."""
    n = len(cut_dims)
    out, k = [], start % n
    while cut_dims[k] == 1:
        k = (k + 1) % n
        if k == start % n:
            raise ValueError("cut carries no objects")
    for _ in range(n):
        if len(out) == ell:
            break
        if cut_dims[k] > 1:
            out.append(k)
        k = (k + 1) % n
    if len(out) < ell:
        raise ValueError(f"cut holds fewer than {ell} objects")
    return out


def seam_clear(state: DenseState, A) -> bool:
    """True when the backward light cone of ``A`` misses the open cut (always for a ring)."""
    if state.seam is None:
        return True
    n = len(state.cut_dims)
    gap = min(min((k - state.seam) % n, (state.seam - k) % n) for k in A) / 2
    return gap > state.t


def _is_contiguous(cut_dims, A) -> bool:
    present = [k for k, dm in enumerate(cut_dims) if dm > 1]
    if not A or any(k not in present for k in A):
        return False
    pos = [present.index(k) for k in A]
    m = len(present)
    return any(sorted((p - s) % m for p in pos) == list(range(len(A))) for s in pos)


def reduced_density(state: DenseState, A) -> np.ndarray:
    """Reduced density matrix on the slots ``A`` (contiguous objects, periodic)."""
    A = list(A)
    if not _is_contiguous(state.cut_dims, A):
        raise ValueError(f"slots {A} are not a contiguous block of objects")
    dims = tuple(state.cut_dims) + (state.ancilla_dim,)
    psi = state.psi.reshape(dims)
    rest = [k for k in range(len(dims)) if k not in A]
    qA = int(np.prod([state.cut_dims[k] for k in A]))
    M = np.transpose(psi, A + rest).reshape(qA, -1)
    return M @ M.conj().T


@dataclass
class EntropyReport:
    ell: int
    t: int
    S: float
    renyi: dict
    qA: int
    saturated: bool
    deviation: float  # max |rho_A - I/q_A|

    def row(self):
        return [self.t, self.ell, self.S, self.renyi.get(2, np.nan), self.renyi.get(3, np.nan), self.qA, int(self.saturated)]


def entropies(rho, orders=(2, 3), tol: float = VERIFY_TOL, ell: int = 0, t: int = 0) -> EntropyReport:
    rho = np.asarray(rho)
    if np.abs(rho - rho.conj().T).max() > tol or abs(np.trace(rho) - 1) > tol:
        raise ValueError("not a density matrix (Hermiticity or trace)")
    p = np.linalg.eigvalsh(rho)
    if p.min() < -tol:
        raise ValueError(f"density matrix has eigenvalue {p.min():.3e}")
    p = p[p > EIG_CUTOFF]
    S = float(-(p * np.log(p)).sum())
    renyi = {n: float(np.log((p ** n).sum()) / (1 - n)) for n in orders}
    qA = rho.shape[0]
    dev = float(np.abs(rho - np.eye(qA) / qA).max())
    return EntropyReport(ell, t, S, renyi, qA, dev < tol, dev)


def flat_padding_residual(rho, m: int) -> float:
    """Distance of the spectrum of ``rho`` from one padded by a flat factor of dimension ``m``.

    Sorted eigenvalues are grouped ``m`` at a time; each group must be constant.
    """
    p = np.sort(np.linalg.eigvalsh(np.asarray(rho)))[::-1]
    if len(p) % m:
        raise ValueError(f"dimension {len(p)} is not a multiple of {m}")
    g = p.reshape(-1, m)
    return float(np.abs(g - g.mean(axis=1, keepdims=True)).max())


@dataclass
class GrowthProfile:
    rows: list = field(default_factory=list)  # EntropyReport per t
    n_objects: int = 0  # objects on the cut (L for a brickwork chain)
    q: int = 2
    clear: dict = field(default_factory=dict)  # t -> A is outside the seam's light cone

    def asserted(self, r: EntropyReport) -> bool:
        """Rows before the light cones of the two ends of A meet around the ring, away from the seam."""
        return 2 * r.t + r.ell < self.n_objects and self.clear.get(r.t, True)

    def expected(self, r: EntropyReport) -> float:
        return min(2 * r.t, r.ell) * np.log(self.q)

    def deviations(self) -> list[float]:
        return [abs(r.S - self.expected(r)) for r in self.rows if self.asserted(r)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "ell", "S", "S2", "S3", "qA", "saturated"])
        for r in self.rows:
            t, ell, S, S2, S3, qA, sat = r.row()
            w.writerow([t, ell, f"{S:.12e}", f"{S2:.12e}", f"{S3:.12e}", qA, sat])
        return buf.getvalue()


def far_start(state: DenseState, ell: int) -> int:
    """First slot of the ``ell``-object block farthest from the seam (the first object on a ring)."""
    present = [k for k, dm in enumerate(state.cut_dims) if dm > 1]
    if state.seam is None:
        return present[0]
    n = len(state.cut_dims)

    def gap(k):
        A = contiguous_block(state.cut_dims, k, ell)
        return min(min((a - state.seam) % n, (state.seam - a) % n) for a in A)

    return max(present, key=gap)


def growth_profile(state: DenseState, c: GateCircuit, ell: int, Tmax: int, start: int | None = None, tol: float = VERIFY_TOL) -> GrowthProfile:
    """``S_A(t)`` for ``t = 0..Tmax`` with ``A`` the ``ell`` objects from slot ``start`` on."""
    if start is None:
        start = far_start(state, ell)
    prof = GrowthProfile(n_objects=sum(1 for dm in state.cut_dims if dm > 1), q=max(state.cut_dims))
    s = state
    for t in range(Tmax + 1):
        if t:
            s = evolve(s, c, 1)
        A = contiguous_block(s.cut_dims, start, ell)
        prof.clear[t] = seam_clear(s, A)
        prof.rows.append(entropies(reduced_density(s, A), tol=tol, ell=ell, t=t))
    return prof
