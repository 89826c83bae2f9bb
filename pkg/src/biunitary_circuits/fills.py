"""Fills: rules that place concrete biunitary data on every vertex of a diagram."""

from __future__ import annotations

import re
from typing import Callable

import numpy as np

from .compiler import BiunitaryAssignment
from .dims import CONTRADICTION, DimSolution, solve_dimensions
from .lattice import CROSS, DUAL_UNITARY, HADAMARD, QLS, UEB, ShadedDiagram, VertexKind, classify_vertex
from .structures import (
    BiunitaryTensor,
    cross_from_hadamards,
    cross_vertex,
    cyclic_qls,
    du_from_hadamards,
    dressed_swap,
    du_vertex,
    fourier_matrix,
    hadamard_vertex,
    phased_hadamard,
    qls_vertex,
    random_vertex,
    swap_gate,
    ueb_vertex,
    weyl_ueb,
)

FILLS = {
    "fourier-hadamard": "Fourier Hadamards; DU and cross gates composed from them",
    "kim(phi)": "phase-dressed q=2 Hadamard H(phi) and its composites (kicked Ising)",
    "random-du(seed)": "seeded random valid instance of every kind",
    "pauli-ueb": "shift-and-clock (Pauli at q=2) unitary error bases",
    "cyclic-qls": "classical cyclic Latin square lifted to basis vectors",
    "swap": "SWAP on every unshaded vertex",
}


def vertex_q(d: ShadedDiagram, v, solution: DimSolution):
    """Local dimension ``q`` of a vertex, or ``(a, b)`` for an unshaded vertex with unequal rays."""
    kind = classify_vertex(d, v)
    legs = d.vertex_legs(v)
    dims = {k: solution.dim(o) for k, o in legs.items() if o is not None}
    if any(x is None for x in dims.values()):
        raise ValueError(f"vertex {v} has free dimensions; concretize first")
    wires = {dims[k] for k in ("nw", "ne", "sw", "se") if k in dims}
    regions = {dims[k] for k in ("n", "s", "w", "e") if k in dims}
    if kind.name == UEB:
        (q,) = wires
        if regions != {q * q}:
            raise ValueError(f"UEB at {v} needs region dim {q * q}, has {regions}")
        return q
    if kind.name == DUAL_UNITARY and len(wires) == 2:
        return (dims["nw"], dims["ne"])
    vals = wires | regions
    if len(vals) != 1:
        raise ValueError(f"vertex {v} ({kind}) mixes dimensions {sorted(vals)}; only equal dims are supported")
    return vals.pop()


def _canonical(kind: VertexKind, q, H=None, rng=None) -> BiunitaryTensor:
    if isinstance(q, tuple):
        return _unequal_du(q, rng)
    H = fourier_matrix(q) if H is None else H
    if kind.name == DUAL_UNITARY:
        return du_vertex(du_from_hadamards(H, H, H, H))
    if kind.name == HADAMARD:
        return hadamard_vertex(H, kind.detail)
    if kind.name == CROSS:
        return cross_vertex(cross_from_hadamards(H, H, H, H))
    if kind.name == UEB:
        return ueb_vertex(weyl_ueb(q), kind.detail)
    if kind.name == QLS:
        return qls_vertex(cyclic_qls(q), kind.detail)
    raise ValueError(f"unknown kind {kind}")


def _unequal_du(dims, rng) -> BiunitaryTensor:
    # rays of different dimension: every fill uses a dressed SWAP here
    rng = np.random.default_rng(0) if rng is None else rng
    return du_vertex(dressed_swap(*dims, rng), dims)


def parse_fill(spec: str) -> tuple[str, list[str]]:
    m = re.fullmatch(r"\s*([a-z\-]+)\s*(?:\((.*)\))?\s*", spec)
    if not m:
        raise ValueError(f"bad fill spec {spec!r}")
    args = [x.strip() for x in m.group(2).split(",")] if m.group(2) else []
    return m.group(1), args


def make_fill(spec: str, seed: int | None = None) -> Callable:
    """Turn a fill spec into ``f(kind, q, vertex, rng) -> BiunitaryTensor``."""
    from .scenario_math import parse_number

    name, args = parse_fill(spec)
    if name == "fourier-hadamard" or name in ("pauli-ueb", "cyclic-qls"):
        return lambda kind, q, v, rng: _canonical(kind, q, rng=rng)
    if name == "kim":
        phi = parse_number(args[0]) if args else 0.0

        def kim(kind, q, v, rng):
            # the phase-dressed Hadamard is 2x2; other dimensions use Fourier data
            H = phased_hadamard(phi) if q == 2 else None
            return _canonical(kind, q, H, rng)

        return kim
    if name == "random-du":
        return lambda kind, q, v, rng: _unequal_du(q, rng) if isinstance(q, tuple) else random_vertex(kind, q, rng)
    if name == "swap":

        def swap(kind, q, v, rng):
            if kind.name != DUAL_UNITARY or isinstance(q, tuple):
                return _canonical(kind, q, rng=rng)
            return du_vertex(swap_gate(q, q))

        return swap
    raise ValueError(f"unknown fill {spec!r}")


def fill_diagram(d: ShadedDiagram, spec="fourier-hadamard", seed: int = 0, solution: DimSolution | None = None, q: int = 2) -> BiunitaryAssignment:
    """Solve dimensions (free generators set to ``q``) and fill every vertex."""
    if solution is None:
        solution = solve_dimensions(d)
    if solution.status == CONTRADICTION:
        raise ValueError(f"dimension constraints are contradictory: {solution.conflicts}")
    if solution.free_generators:
        solution = solution.concretize(q)
    fill = make_fill(spec) if isinstance(spec, str) else spec
    rng = np.random.default_rng(seed)
    verts = {}
    for v in d.vertices():
        kind = classify_vertex(d, v)
        verts[v] = fill(kind, vertex_q(d, v, solution), v, rng)
    return BiunitaryAssignment(d, solution, verts)
