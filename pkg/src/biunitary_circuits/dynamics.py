"""Infinite-temperature two-point functions ``Tr[U^dag rho U sigma] / D``.

``rho`` sits on a slot of cut ``t`` and ``sigma`` on a slot of cut 0.
Slot ``k`` has spatial coordinate ``k / 2`` on a cylinder (wires at
integers, shaded gaps at half-integers); displacements are the minimal
periodic difference of coordinates.

A shaded face is crossed by two consecutive cuts, so the number of layers
that separate two objects can be smaller than the cut difference. The
light-cone edge is measured in that separation (see :func:`separation`).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .compiler import DEFAULT_CAP, BiunitaryAssignment, CapExceeded, GateCircuit, compile_circuit, contract_network, global_unitary
from .lattice import ShadedDiagram
from .structures import LEG_ORDER
from .tensor import Tensor


def site_matrix(name: str, dim: int) -> np.ndarray:
    """Generalized Paulis: ``z`` clock, ``x`` shift, ``y = i x z``; ``1`` identity."""
    if name in ("1", "i", "identity"):
        return np.eye(dim, dtype=np.complex128)
    X = np.roll(np.eye(dim), 1, axis=0).astype(np.complex128)
    Z = np.diag(np.exp(2j * np.pi * np.arange(dim) / dim))
    if name == "x":
        return X
    if name == "z":
        return Z
    if name == "y":
        return 1j * X @ Z
    raise ValueError(f"unknown site operator {name!r}")


@dataclass(frozen=True)
class SiteOperator:
    slot: int
    matrix: np.ndarray
    traceless: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("site operator must be a square matrix")
        if self.traceless:
            m = m - np.trace(m) / m.shape[0] * np.eye(m.shape[0])
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def slot_coordinate(d: ShadedDiagram, slot: int) -> float:
    return slot / 2 if d.periodic else (slot - 1) / 2


def displacement(d: ShadedDiagram, a: int, b: int) -> float:
    """Signed minimal displacement from slot ``a`` to slot ``b``."""
    x = slot_coordinate(d, b) - slot_coordinate(d, a)
    if d.periodic:
        x = (x + d.L / 2) % d.L - d.L / 2
        if x == -d.L / 2:
            x = d.L / 2
    return x


def on_edge(x: float, t: int) -> bool:
    return t - 1 <= abs(x) <= t


def edge_in(d: ShadedDiagram, x: float, tau: int) -> bool:
    """Edge test that also accepts the other way around a periodic chain."""
    if on_edge(x, tau):
        return True
    return d.periodic and x != 0 and on_edge(abs(x) - d.L, tau)


def object_cuts(d: ShadedDiagram) -> dict:
    """Cuts crossed by every wire segment and shaded region."""
    out: dict = {}
    for t in range(d.T + 1):
        for _, _, obj, present in d.slots(t):
            if present:
                out.setdefault(obj, []).append(t)
    return out


def separation(d: ShadedDiagram, rho_slot: int, t: int, sigma_slot: int, cuts: dict | None = None) -> int:
    """Layers between the ``sigma`` object (cut 0) and the ``rho`` object (cut ``t``).

    Zero when both slots hold the same object.
    """
    cuts = object_cuts(d) if cuts is None else cuts
    R = d.slots(t)[rho_slot][2]
    S = d.slots(0)[sigma_slot][2]
    return max(0, min(cuts[R]) - max(cuts[S]))


def _apply_site(states: np.ndarray, dims, slot: int, m: np.ndarray) -> np.ndarray:
    """Apply ``m`` to one slot of row vectors ``states`` (shape ``(B, D)``)."""
    B = states.shape[0]
    psi = states.reshape((B,) + tuple(dims))
    psi = np.moveaxis(np.tensordot(m, psi, axes=([1], [1 + slot])), 0, 1 + slot)
    return psi.reshape(B, -1)


def _check_site(c: GateCircuit, t: int, op: SiteOperator):
    dim = c.cut_dims[t][op.slot]
    if dim != op.dim:
        raise ValueError(f"operator of dim {op.dim} on slot {op.slot} of cut {t}, which has dim {dim}")


def heisenberg(c: GateCircuit, rho: SiteOperator, t: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Dense ``U_t^dag rho U_t`` on cut 0."""
    _check_site(c, t, rho)
    U = global_unitary(c, 0, t, cap).data
    rU = _apply_site(U.T, c.cut_dims[t], rho.slot, rho.matrix).T
    return U.conj().T @ rU


def brute_force_correlation(c: GateCircuit, rho: SiteOperator, sigma: SiteOperator, t: int, cap: int = DEFAULT_CAP) -> complex:
    _check_site(c, 0, sigma)
    M = heisenberg(c, rho, t, cap)
    D = M.shape[0]
    # Tr[M sigma] = sum_i (sigma M)_{ii}
    sM = _apply_site(M.T, c.cut_dims[0], sigma.slot, sigma.matrix).T
    return complex(np.trace(sM) / D)


# light-cone (causal diamond) method ---------------------------------------------


def _cone(c: GateCircuit, start: int, layers) -> set:
    """Vertices whose gates can see slot ``start`` through the given layers."""
    support = {start}
    found = set()
    for t in layers:
        hit = [g for g in c.layers[t] if support & set(g.window)]
        for g in hit:
            found.add(g.vertex)
        for g in hit:
            support |= set(g.window)
    return found


def causal_diamond(c: GateCircuit, rho_slot: int, sigma_slot: int, t: int) -> list:
    past = _cone(c, rho_slot, range(t - 1, -1, -1))
    future = _cone(c, sigma_slot, range(0, t))
    return sorted(past & future)


def diamond_correlation(a: BiunitaryAssignment, rho: SiteOperator, sigma: SiteOperator, t: int) -> complex:
    """Contract only the gates in the causal diamond, as a folded ket/bra network.

    Gates outside the diamond cancel against their adjoints, so the value is
    exact. Normalization divides by the same network with both operators set
    to the identity.
    """
    c = compile_circuit(a, verify=False)
    _check_site(c, t, rho)
    _check_site(c, 0, sigma)
    verts = causal_diamond(c, rho.slot, sigma.slot, t)
    num = _folded_value(a, verts, t, rho, sigma)
    den = _folded_value(a, verts, t, SiteOperator(rho.slot, np.eye(rho.dim), False), SiteOperator(sigma.slot, np.eye(sigma.dim), False))
    return complex(num / den)


def _folded_value(a: BiunitaryAssignment, verts: list, t: int, rho: SiteOperator, sigma: SiteOperator) -> complex:
    d = a.diagram
    rho_obj = d.slots(t)[rho.slot][2]
    sigma_obj = d.slots(0)[sigma.slot][2]
    vset = set(verts)
    ports: dict = {}
    role: dict = {}
    tensors = []
    for v in verts:
        legs = d.vertex_legs(v)
        for side, data in (("k", a[v].data), ("b", a[v].data.conj())):
            labels = []
            for leg in LEG_ORDER:
                label = f"{side}{v}:{leg}"
                labels.append(label)
                obj = legs[leg]
                if obj is None:
                    tensors.append(Tensor.from_array(np.ones(1), [label]))
                    continue
                ports.setdefault((side, obj), []).append(label)
                if side == "k":
                    r = role.setdefault(obj, set())
                    if leg in ("nw", "ne", "n"):
                        r.add("out")
                    elif leg in ("sw", "se", "s"):
                        r.add("in")
            tensors.append(Tensor.from_array(data, labels))
    objs = {obj for (_, obj) in ports}
    for obj in (rho_obj, sigma_obj):
        objs.add(obj)
    for obj in objs:
        r = role.get(obj, set())
        produced = "out" in r and _producer_in(d, obj, vset)
        consumed = "in" in r and _consumer_in(d, obj, vset)
        dim = a.solution.dim(obj)
        # open at the top unless a diamond vertex consumes it, at the bottom unless one produces it
        top = not consumed
        bottom = not produced
        for side in ("k", "b"):
            labels = list(ports.get((side, obj), []))
            if top:
                labels.append(f"{side}top:{obj}")
            if bottom:
                labels.append(f"{side}bot:{obj}")
            delta = np.zeros((dim,) * len(labels), dtype=np.complex128)
            for i in range(dim):
                delta[(i,) * len(labels)] = 1
            tensors.append(Tensor.from_array(delta, labels))
        if top:
            m = rho.matrix if obj == rho_obj else np.eye(dim)
            # Tr[U^dag rho U sigma]: rho's row meets the bra, its column the ket
            tensors.append(Tensor.from_array(m, [f"btop:{obj}", f"ktop:{obj}"]))
        if bottom:
            m = sigma.matrix if obj == sigma_obj else np.eye(dim)
            tensors.append(Tensor.from_array(m, [f"kbot:{obj}", f"bbot:{obj}"]))
    return complex(contract_network(tensors, []).data.reshape(()))


def _producer_in(d: ShadedDiagram, obj, vset) -> bool:
    return any(d.vertex_legs(v)[leg] == obj for v in vset for leg in ("nw", "ne", "n"))


def _consumer_in(d: ShadedDiagram, obj, vset) -> bool:
    return any(d.vertex_legs(v)[leg] == obj for v in vset for leg in ("sw", "se", "s"))


def lightcone_correlation(a: BiunitaryAssignment, rho: SiteOperator, sigma: SiteOperator, t: int) -> complex:
    """Edge correlator from the causal-diamond staircase; refuses off-edge points."""
    x = displacement(a.diagram, rho.slot, sigma.slot)
    tau = separation(a.diagram, rho.slot, t, sigma.slot)
    if not edge_in(a.diagram, x, tau):
        raise ValueError(f"displacement {x} is not on the light-cone edge (separation {tau})")
    return diamond_correlation(a, rho, sigma, t)


# grids ---------------------------------------------------------------------


@dataclass
class CorrelationGrid:
    rows: list = field(default_factory=list)  # (x, t, value, on_edge, sigma_slot)
    L: int = 0
    meta: dict = field(default_factory=dict)

    def asserted(self, t: int) -> bool:
        """Rows are held to the light-cone theorem only before the cones wrap (2t < L)."""
        return 2 * t < self.L

    def off_cone_max(self) -> float:
        vals = [abs(v) for x, t, v, edge, _ in self.rows if not edge and self.asserted(t)]
        return max(vals, default=0.0)

    def edge_entries(self):
        return [(x, t, v, s) for x, t, v, edge, s in self.rows if edge]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "t", "re", "im", "on_edge"])
        for x, t, v, edge, _ in self.rows:
            w.writerow([f"{x:g}", t, f"{v.real:.12e}", f"{v.imag:.12e}", int(edge)])
        return buf.getvalue()


def present_slots(c: GateCircuit, t: int) -> list[int]:
    return [k for k, dim in enumerate(c.cut_dims[t]) if dim > 1]


def default_reference(c: GateCircuit) -> int:
    """The slot carrying an object on the most cuts, preferring the middle of the chain."""
    n = len(c.cut_dims[0])
    count = lambda k: sum(cut[k] > 1 for cut in c.cut_dims[1:])
    return max(range(n), key=lambda k: (count(k), -abs(k - n // 2)))


def correlation_grid(a: BiunitaryAssignment, rho: str = "z", sigma: str = "z", T: int | None = None, ref: int | None = None, cap: int = DEFAULT_CAP, meta=None) -> CorrelationGrid:
    """``c(x, t)`` for ``t = 1..T`` with ``rho`` on slot ``ref`` and ``sigma`` swept over cut 0."""
    c = compile_circuit(a, verify=False)
    d = a.diagram
    T = d.T if T is None else T
    ref = default_reference(c) if ref is None else ref
    grid = CorrelationGrid(L=d.L, meta=dict(meta or {}, ref=ref))
    sig_slots = present_slots(c, 0)
    cuts = object_cuts(d)
    for t in range(1, T + 1):
        if c.cut_dims[t][ref] == 1:
            continue
        r = SiteOperator(ref, site_matrix(rho, c.cut_dims[t][ref]))
        M = heisenberg(c, r, t, cap)
        D = M.shape[0]
        for s in sig_slots:
            sg = SiteOperator(s, site_matrix(sigma, c.cut_dims[0][s]))
            sM = _apply_site(M.T, c.cut_dims[0], s, sg.matrix).T
            val = complex(np.trace(sM) / D)
            x = displacement(d, ref, s)
            grid.rows.append((x, t, val, edge_in(d, x, separation(d, ref, t, s, cuts)), s))
    return grid
