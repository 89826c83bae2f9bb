"""Dimension propagation over a shaded diagram.

Every bare wire and shaded region carries a Hilbert space dimension. Each
vertex kind imposes multiplicative relations ``dim(a) = dim(b) ** k`` with
``k`` in ``{1, 2}``. Taking logarithms turns these into linear relations,
solved with a weighted union-find over exact rational ratios.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

from .lattice import CROSS, DUAL_UNITARY, HADAMARD, QLS, UEB, ShadedDiagram, classify_vertex

SOLVED = "solved"
TRIVIALIZED = "trivialized"
CONTRADICTION = "contradiction"


class _WeightedUF:
    """log dim(x) = ratio[x] * log dim(parent[x])."""

    def __init__(self):
        self.parent: dict = {}
        self.ratio: dict = {}
        self.trivial: set = set()

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.ratio[x] = Fraction(1)

    def find(self, x):
        self.add(x)
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        # compress, accumulating ratios from the top down
        acc = Fraction(1)
        for node in reversed(path):
            acc = acc * self.ratio[node]
            self.ratio[node] = acc
            self.parent[node] = root
        return root

    def rel(self, x) -> Fraction:
        self.find(x)
        return self.ratio[x]

    def union(self, a, b, k: Fraction) -> bool:
        """Impose log a = k log b. Returns False when a cycle forces zero."""
        ra, rb = self.find(a), self.find(b)
        wa, wb = self.ratio[a], self.ratio[b]
        if ra == rb:
            if wa != k * wb:
                self.trivial.add(ra)
                return False
            return True
        # log ra = (k wb / wa) log rb
        self.parent[ra] = rb
        self.ratio[ra] = k * wb / wa
        if ra in self.trivial:
            self.trivial.discard(ra)
            self.trivial.add(rb)
        return True

    def classes(self):
        out: dict = {}
        for x in list(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass(frozen=True)
class DimSolution:
    """Result of :func:`solve_dimensions`.

    ``exponents`` maps each object to ``(generator, exponent)`` so that
    ``dim = generators[generator] ** exponent``. Objects forced to dimension 1
    map to ``(None, 0)``. A generator value of ``None`` is free.
    """

    status: str
    exponents: dict = field(default_factory=dict)
    generators: dict = field(default_factory=dict)
    conflicts: tuple = ()

    def dim(self, obj):
        gen, exp = self.exponents[obj]
        if gen is None:
            return 1
        base = self.generators[gen]
        if base is None:
            return None
        return int(round(base ** exp))

    @property
    def free_generators(self) -> list[str]:
        return [g for g, v in self.generators.items() if v is None]

    def concretize(self, default: int = 2) -> "DimSolution":
        """Assign ``default`` to every free generator."""
        if self.status == CONTRADICTION:
            raise ValueError("cannot concretize a contradictory solution")
        gens = {g: (default if v is None else v) for g, v in self.generators.items()}
        return replace(self, generators=gens)

    def dims(self) -> dict:
        return {obj: self.dim(obj) for obj in self.exponents}

    def __str__(self):
        lines = [f"status: {self.status}"]
        for g, v in self.generators.items():
            lines.append(f"  {g} = {'free' if v is None else v}")
        lines += [f"  conflict: {c}" for c in self.conflicts]
        return "\n".join(lines)


def _int_root(value: int, exp: Fraction):
    """Integer ``g`` with ``g ** exp == value``, or ``None``."""
    if value == 1:
        return 1
    g = round(value ** (1 / float(exp)))
    for cand in (g - 1, g, g + 1):
        if cand >= 2 and abs(cand ** float(exp) - value) < 1e-9 * value:
            return cand
    return None


def vertex_relations(d: ShadedDiagram, v):
    """Relations ``(a, b, k)`` meaning ``dim(a) = dim(b) ** k`` at one vertex."""
    kind = classify_vertex(d, v)
    legs = d.vertex_legs(v)
    rel = []
    if kind.name == DUAL_UNITARY:
        rel += [(legs["nw"], legs["se"], 1), (legs["ne"], legs["sw"], 1)]
    elif kind.name == UEB:
        wires = [legs[k] for k in ("nw", "ne", "sw", "se") if legs[k] is not None]
        rel += [(wires[0], wires[1], 1), (legs[kind.detail], wires[0], 2)]
    elif kind.name == HADAMARD:
        a, b = kind.detail
        rel.append((legs[a], legs[b], 1))
    elif kind.name == QLS:
        (wire,) = [legs[k] for k in ("nw", "ne", "sw", "se") if legs[k] is not None]
        a, b = kind.detail
        rel += [(legs[a], wire, 1), (legs[b], wire, 1)]
    elif kind.name == CROSS:
        rel += [(legs["n"], legs["s"], 1), (legs["w"], legs["e"], 1)]
    return rel


def diagram_objects(d: ShadedDiagram) -> list:
    """Every bare wire segment and shaded region, in first-seen order."""
    seen = {}
    for t in range(d.T + 1):
        for _, _, obj, present in d.slots(t):
            if present:
                seen.setdefault(obj, None)
    return list(seen)


def solve_dimensions(d: ShadedDiagram, pins: Mapping | None = None) -> DimSolution:
    """Propagate dimension relations and pinned values through ``d``."""
    d.check_outer_regions()
    pins = dict(pins or {})
    uf = _WeightedUF()
    objects = diagram_objects(d)
    for obj in objects:
        uf.add(obj)
    conflicts = []
    for v in d.vertices():
        for a, b, k in vertex_relations(d, v):
            if not uf.union(a, b, Fraction(k)):
                conflicts.append(f"cycle through vertex {v} forces dimension 1")
    for obj in pins:
        if obj not in uf.parent:
            raise KeyError(f"pinned object {obj} is not a bare wire or shaded region")

    exponents, generators = {}, {}
    status = SOLVED
    hard = []
    for n, (root, members) in enumerate(sorted(uf.classes().items(), key=lambda kv: objects.index(kv[0]))):
        pinned = {m: pins[m] for m in members if m in pins}
        if root in uf.trivial:
            status = TRIVIALIZED if status == SOLVED else status
            for m in members:
                exponents[m] = (None, Fraction(0))
            for m, p in pinned.items():
                if p != 1:
                    hard.append(f"{m} pinned to {p} but its class is forced to dimension 1")
            continue
        rmin = min(uf.rel(m) for m in members)
        gen = f"g{n}"
        for m in members:
            exponents[m] = (gen, uf.rel(m) / rmin)
        value = None
        for m, p in pinned.items():
            g = _int_root(int(p), exponents[m][1])
            if g is None:
                hard.append(f"{m} pinned to {p} is not a power {exponents[m][1]} of an integer")
            elif value is not None and g != value:
                hard.append(f"pins disagree on {gen}: {value} vs {g} (from {m})")
            else:
                value = g
        generators[gen] = value
    if hard:
        status = CONTRADICTION
    return DimSolution(status, exponents, generators, tuple(conflicts + hard))


def pin_key(d: ShadedDiagram, spec: Mapping):
    """Translate a scenario pin (``wire``/``face``) into a solver object id."""
    if spec.get("object") == "wire":
        return d.wire_segment(int(spec["cut"]), int(spec["x"]))
    if spec.get("object") == "face":
        return d.region((int(spec["s"]), int(spec["y"])))
    raise ValueError(f"bad pin spec {spec}")


def apex_pins(d: ShadedDiagram, v, q: int = 2) -> dict:
    """Pin the incoming bare wires of vertex ``v`` to ``q``."""
    legs = d.vertex_legs(v)
    return {legs[k]: q for k in ("sw", "se") if legs[k] is not None}
