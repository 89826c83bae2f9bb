"""From shaded diagrams to controlled-gate circuits and dense unitaries.

Each time slice (cut) is a chain of slots alternating wire, gap, wire, ...
A slot holds a bare wire or a shaded region; empty slots have dimension 1.
A vertex at ``(t, x)`` touches five consecutive slots: the gaps to its left
and right are controls, and wire ``x``, the gap between its wires and wire
``x + 1`` are the targets. Shaded side faces therefore act as control
registers while shaded top and bottom faces are carried as target sites.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .dims import DimSolution
from .lattice import IllegalDiagram, ShadedDiagram, VertexKind, classify_vertex
from .structures import LEG_ORDER, BiunitaryTensor, check_biunitary
from .tensor import VERIFY_TOL, Tensor, contract

DEFAULT_CAP = 2 ** 14


class CapExceeded(RuntimeError):
    """A dense object would exceed the configured dimension cap."""


@dataclass(frozen=True)
class BiunitaryAssignment:
    diagram: ShadedDiagram
    solution: DimSolution
    vertices: dict = field(default_factory=dict)

    def __post_init__(self):
        d = self.diagram
        missing = [v for v in d.vertices() if v not in self.vertices]
        if missing:
            raise ValueError(f"vertices without a biunitary: {missing[:4]}")
        for v in d.vertices():
            b = self.vertices[v]
            kind = classify_vertex(d, v)
            if b.kind != kind:
                raise ValueError(f"vertex {v} is {kind} but was given a {b.kind}")
            for leg, obj in d.vertex_legs(v).items():
                want = 1 if obj is None else self.solution.dim(obj)
                if want is None:
                    raise ValueError(f"dimension of {obj} is free; concretize the solution first")
                if b.dim(leg) != want:
                    raise ValueError(f"vertex {v} leg {leg} has dim {b.dim(leg)}, object {obj} needs {want}")

    def __getitem__(self, v) -> BiunitaryTensor:
        return self.vertices[v]


@dataclass(frozen=True)
class Gate:
    vertex: tuple
    kind: VertexKind
    window: tuple  # slot indices (W control, target wire, target gap, target wire, E control)
    matrix: np.ndarray  # (W, E, O, I)
    in_dims: tuple
    out_dims: tuple

    @property
    def targets(self):
        return self.window[1:4]

    @property
    def controls(self):
        return (self.window[0], self.window[4])

    @property
    def n_targets(self) -> int:
        """Targets that are actually present (dimension above 1) on input or output."""
        return sum(1 for a, b in zip(self.in_dims, self.out_dims) if a > 1 or b > 1)

    @property
    def n_controls(self) -> int:
        return sum(1 for k in self.matrix.shape[:2] if k > 1)

    def as_tensor(self) -> Tensor:
        return Tensor.from_array(self.matrix, ("w", "e", "out", "in"))


@dataclass(frozen=True)
class GateCircuit:
    diagram: ShadedDiagram
    layers: tuple  # tuple of tuples of Gate
    cut_dims: tuple  # per cut, per slot

    @property
    def T(self) -> int:
        return len(self.layers)

    def cut_dim(self, t: int) -> int:
        return int(np.prod(self.cut_dims[t], dtype=np.int64))


def compile_vertex(b: BiunitaryTensor, tol: float = VERIFY_TOL, verify: bool = True) -> np.ndarray:
    """Controlled-gate array ``G[w, e, (nw, n, ne), (sw, s, se)]`` of a vertex.

    Normalizations live in the stored tensor (see :mod:`structures`), so the
    gate is unitary on its targets for every control value.
    """
    if verify:
        rep = check_biunitary(b, tol)
        if not rep.passed:
            raise ValueError(f"{b.kind} vertex fails biunitarity ({rep.failed_condition}, {rep.max_residual:.2e})")
    d = b.dims()
    ax = {l: i for i, l in enumerate(LEG_ORDER)}
    order = [ax[l] for l in ("w", "e", "nw", "n", "ne", "sw", "s", "se")]
    g = np.transpose(b.data, order)
    return g.reshape(d["w"], d["e"], d["nw"] * d["n"] * d["ne"], d["sw"] * d["s"] * d["se"])


def slot_dims(d: ShadedDiagram, t: int, solution: DimSolution) -> list[int]:
    out = []
    for _, _, obj, present in d.slots(t):
        if not present:
            out.append(1)
            continue
        dim = solution.dim(obj)
        if dim is None:
            raise ValueError(f"dimension of {obj} is free; concretize the solution first")
        out.append(dim)
    return out


def compile_circuit(a: BiunitaryAssignment, verify: bool = True, tol: float = VERIFY_TOL) -> GateCircuit:
    d = a.diagram
    if d.periodic and d.L < 4:
        raise IllegalDiagram("periodic compilation needs L >= 4 (at L = 2 the side faces coincide)")
    d.check_outer_regions()
    cuts = tuple(tuple(slot_dims(d, t, a.solution)) for t in range(d.T + 1))
    layers = []
    for t in range(d.T):
        gates = []
        for v in d.layer(t):
            window = tuple(d.vertex_window(v))
            g = compile_vertex(a[v], tol, verify)
            ind = tuple(cuts[t][s] for s in window[1:4])
            outd = tuple(cuts[t + 1][s] for s in window[1:4])
            ctrl = (cuts[t][window[0]], cuts[t][window[4]])
            if g.shape != (ctrl[0], ctrl[1], int(np.prod(outd)), int(np.prod(ind))):
                raise ValueError(f"vertex {v}: gate shape {g.shape} does not fit slots {ctrl}, {ind} -> {outd}")
            gates.append(Gate(v, a[v].kind, window, g, ind, outd))
        gates.sort(key=lambda g: g.vertex[1])
        seen = set()
        for g in gates:
            if seen & set(g.targets):
                raise ValueError(f"overlapping targets in layer {t}")
            seen |= set(g.targets)
        layers.append(tuple(gates))
    return GateCircuit(d, tuple(layers), cuts)


# simulation -------------------------------------------------------------


def apply_gate(state: np.ndarray, gate: Gate, backend: str | None = None) -> np.ndarray:
    """Apply a gate to a batch of states shaped ``(B, *slot_dims)``."""
    B = state.shape[0]
    axes = [1 + s for s in gate.window]
    moved = np.moveaxis(state, axes, [1, 2, 3, 4, 5])
    rest = moved.shape[6:]
    W, E = moved.shape[1], moved.shape[5]
    psi = moved.reshape(B, W, int(np.prod(moved.shape[2:5])), E, int(np.prod(rest, dtype=np.int64)))
    out = _accel.apply_window(psi, gate.matrix, backend)
    out = out.reshape((B, W) + gate.out_dims + (E,) + rest)
    return np.moveaxis(out, [1, 2, 3, 4, 5], axes)


def apply_layers(c: GateCircuit, states: np.ndarray, t0: int = 0, t1: int | None = None, backend=None) -> np.ndarray:
    """Evolve column vectors (shape ``(B, D_t0)``) from cut ``t0`` to cut ``t1``."""
    t1 = c.T if t1 is None else t1
    B = states.shape[0]
    psi = np.asarray(states, dtype=np.complex128).reshape((B,) + c.cut_dims[t0])
    for t in range(t0, t1):
        for g in c.layers[t]:
            psi = apply_gate(psi, g, backend)
    return psi.reshape(B, -1)


def global_unitary(c: GateCircuit, t0: int = 0, t1: int | None = None, cap: int = DEFAULT_CAP, backend=None) -> Tensor:
    """Dense matrix of the circuit between cuts ``t0`` and ``t1`` (legs ``out``, ``in``)."""
    t1 = c.T if t1 is None else t1
    if not 0 <= t0 <= t1 <= c.T:
        raise ValueError(f"bad time range {t0}..{t1}")
    din, dout = c.cut_dim(t0), c.cut_dim(t1)
    if max(din, dout) > cap:
        raise CapExceeded(f"cut dimension {max(din, dout)} exceeds cap {cap}")
    cols = apply_layers(c, np.eye(din, dtype=np.complex128), t0, t1, backend)
    return Tensor.from_array(cols.T, ("out", "in"))


def layer_unitarity(c: GateCircuit, t: int, cap: int = DEFAULT_CAP) -> float:
    U = global_unitary(c, t, t + 1, cap).data
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[1]))))


# direct tensor-network contraction -------------------------------------------


def contract_network(tensors: list[Tensor], open_order: list[str]) -> Tensor:
    """Greedy pairwise contraction; every closed label appears on exactly two tensors."""
    ts = list(tensors)
    while len(ts) > 1:
        best = None
        for i in range(len(ts)):
            li = set(ts[i].labels)
            for j in range(i + 1, len(ts)):
                shared = li & set(ts[j].labels)
                if not shared:
                    continue
                size = np.prod(ts[i].dims) * np.prod(ts[j].dims)
                for l in shared:
                    size //= ts[i].dim(l) ** 2
                if best is None or size < best[0]:
                    best = (size, i, j, shared)
        if best is None:
            # disconnected pieces: outer product of the two smallest
            ts.sort(key=lambda x: np.prod(x.dims))
            i, j, shared = 0, 1, set()
        else:
            _, i, j, shared = best
        merged = contract(ts[i], ts[j], [(l, l) for l in sorted(shared)])
        ts = [x for k, x in enumerate(ts) if k not in (i, j)] + [merged]
    return ts[0].transpose(open_order)


def contract_diagram(a: BiunitaryAssignment, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Contract the diagram as a tensor network: vertices, plus one delta per object.

    Returns the matrix from the cut-0 objects to the cut-``T`` objects, in
    slot order. It never forms the slot chain, so it checks the compiler's
    controlled-gate dictionary independently.
    """
    d = a.diagram
    d.check_outer_regions()
    ports: dict = {}
    tensors = []
    for v in d.vertices():
        legs = d.vertex_legs(v)
        b = a[v]
        labels = []
        for leg in LEG_ORDER:
            obj = legs[leg]
            label = f"{v}:{leg}"
            labels.append(label)
            if obj is not None:
                ports.setdefault(obj, []).append(label)
        tensors.append(Tensor.from_array(b.data, labels))
    ins, outs = [], []
    for t, bucket in ((0, ins), (d.T, outs)):
        for k, (_, _, obj, present) in enumerate(d.slots(t)):
            if present:
                label = f"{'in' if t == 0 else 'out'}:{k}"
                ports.setdefault(obj, []).append(label)
                bucket.append((label, a.solution.dim(obj)))
    din = int(np.prod([x for _, x in ins])) if ins else 1
    dout = int(np.prod([x for _, x in outs])) if outs else 1
    if max(din, dout) > cap:
        raise CapExceeded(f"boundary dimension {max(din, dout)} exceeds cap {cap}")
    for obj, labels in ports.items():
        dim = a.solution.dim(obj)
        delta = np.zeros((dim,) * len(labels), dtype=np.complex128)
        for i in range(dim):
            delta[(i,) * len(labels)] = 1
        tensors.append(Tensor.from_array(delta, labels))
    # absent vertex legs are dim-1 and dangle; cap each with a unit vector
    for v in d.vertices():
        legs = d.vertex_legs(v)
        for leg in LEG_ORDER:
            if legs[leg] is None:
                tensors.append(Tensor.from_array(np.ones(1), [f"{v}:{leg}"]))
    order = [l for l, _ in outs] + [l for l, _ in ins]
    if not order:
        return contract_network(tensors, []).data.reshape(1, 1)
    res = contract_network(tensors, order)
    return res.data.reshape(dout, din)


# text export -----------------------------------------------------------


def export_text(c: GateCircuit) -> str:
    from .fixtures import format_entry

    d = c.diagram
    lines = [f"circuit L={d.L} T={d.T} periodic={d.periodic} shading={d.name}"]
    for t, cut in enumerate(c.cut_dims):
        lines.append(f"cut {t} dims {' '.join(map(str, cut))}")
    for t, layer in enumerate(c.layers):
        lines.append(f"layer {t}")
        for g in layer:
            W, E, O, I = g.matrix.shape
            lines.append(
                f"gate vertex={g.vertex} kind={g.kind} targets={list(g.targets)} "
                f"controls={list(g.controls)} shape={W}x{E}x{O}x{I}"
            )
            for w in range(W):
                for e in range(E):
                    lines.append(f"  control {w},{e}")
                    for row in g.matrix[w, e]:
                        lines.append("    " + " ".join(format_entry(z) for z in row))
    return "\n".join(lines) + "\n"


def dictionary_residual(a: BiunitaryAssignment, c: GateCircuit | None = None, cap: int = DEFAULT_CAP) -> float:
    """Entrywise distance between the contracted diagram and the compiled unitary, up to a scalar."""
    c = compile_circuit(a) if c is None else c
    U = global_unitary(c, cap=cap).data
    N = contract_diagram(a, cap)
    if N.shape != U.shape:
        raise ValueError(f"contracted shape {N.shape} differs from circuit shape {U.shape}")
    s = np.vdot(U, N) / np.vdot(U, U)
    if abs(s) < 1e-300:
        return float("inf")
    return float(np.abs(N / s - U).max())
