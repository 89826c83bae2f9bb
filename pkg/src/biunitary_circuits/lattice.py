"""Shaded brickwork diagrams on a cylinder (or an open patch).

Coordinates. A vertex ``(t, x)`` sits on time layer ``t`` and acts on the
wires ``x`` and ``x + 1``; it exists when ``x = t (mod 2)``. A face ``(s, y)``
is the region centred between wires ``y`` and ``y + 1`` at height ``s``; it
exists when ``y != s (mod 2)``. Around vertex ``(t, x)`` the faces are

    N = (t + 1, x)    S = (t - 1, x)    W = (t, x - 1)    E = (t, x + 1)

and its four wire legs are ``sw``/``se`` (wires ``x``, ``x + 1`` below) and
``nw``/``ne`` (the same wires above). In light-cone coordinates
``t = u + v``, ``x = u - v``; faces sit at half-integer ``(u, v)``.

A horizontal cut ``t`` (``0 <= t <= T``) runs just below layer ``t``. It
crosses every wire once and, between wires ``y`` and ``y + 1``, the face
``(t - 1, y)`` when ``y = t (mod 2)`` and ``(t, y)`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

FACE_POSITIONS = ("n", "s", "w", "e")


class IllegalDiagram(ValueError):
    """A shading with a three-shaded vertex or an impossible geometry."""


@dataclass(frozen=True)
class VertexKind:
    """Biunitary type fixed by a vertex's shading pattern.

    ``detail`` is the shaded face for a UEB (``"n"``, ``"s"``, ``"w"``,
    ``"e"``), the axis for a Hadamard (``"ns"`` or ``"ew"``), or the shaded
    pair for a quantum Latin square (``"nw"``, ``"ne"``, ``"sw"``, ``"se"``).
    """

    name: str
    detail: str | None = None

    def __str__(self):
        return self.name if self.detail is None else f"{self.name}({self.detail})"


DUAL_UNITARY = "dual-unitary"
UEB = "ueb"
HADAMARD = "hadamard"
QLS = "qls"
CROSS = "cross"
KIND_NAMES = (DUAL_UNITARY, UEB, HADAMARD, QLS, CROSS)


def classify_pattern(n: bool, s: bool, w: bool, e: bool) -> VertexKind:
    """Vertex kind of the face shading pattern around one vertex."""
    count = n + s + w + e
    if count == 0:
        return VertexKind(DUAL_UNITARY)
    if count == 4:
        return VertexKind(CROSS)
    if count == 1:
        return VertexKind(UEB, "n" if n else "s" if s else "w" if w else "e")
    if count == 3:
        raise IllegalDiagram("vertex with exactly three shaded faces")
    if n and s:
        return VertexKind(HADAMARD, "ns")
    if w and e:
        return VertexKind(HADAMARD, "ew")
    return VertexKind(QLS, ("n" if n else "s") + ("w" if w else "e"))


def kind_pattern(kind: VertexKind) -> dict[str, bool]:
    """Inverse of :func:`classify_pattern`."""
    shaded: set[str]
    if kind.name == DUAL_UNITARY:
        shaded = set()
    elif kind.name == CROSS:
        shaded = set(FACE_POSITIONS)
    elif kind.name == UEB:
        shaded = {kind.detail}
    elif kind.name == HADAMARD:
        shaded = set(kind.detail)
    elif kind.name == QLS:
        shaded = set(kind.detail)
    else:
        raise ValueError(f"unknown kind {kind}")
    return {p: p in shaded for p in FACE_POSITIONS}


@dataclass(frozen=True)
class ShadedDiagram:
    L: int
    T: int
    shaded: frozenset = field(default_factory=frozenset)
    periodic: bool = True
    name: str = "explicit"

    def __post_init__(self):
        if self.T < 0:
            raise IllegalDiagram("T must be non-negative")
        if self.periodic and (self.L < 2 or self.L % 2):
            raise IllegalDiagram("periodic diagrams need an even L >= 2")
        if not self.periodic and self.L < 2:
            raise IllegalDiagram("open diagrams need L >= 2")
        faces = set(self.faces())
        stray = [f for f in self.shaded if f not in faces]
        if stray:
            raise IllegalDiagram(f"shaded faces outside the diagram: {sorted(stray)[:5]}")
        for v in self.vertices():
            classify_vertex(self, v)

    # geometry -----------------------------------------------------------

    def vertices(self) -> list[tuple[int, int]]:
        last = self.L - 1 if self.periodic else self.L - 2
        return [(t, x) for t in range(self.T) for x in range(t % 2, last + 1, 2)]

    def layer(self, t: int) -> list[tuple[int, int]]:
        return [v for v in self.vertices() if v[0] == t]

    def has_vertex(self, v) -> bool:
        t, x = v
        if not 0 <= t < self.T or (x - t) % 2:
            return False
        return 0 <= x < self.L if self.periodic else 0 <= x <= self.L - 2

    def norm_face(self, face) -> tuple[int, int]:
        s, y = face
        return (s, y % self.L) if self.periodic else (s, y)

    def faces(self) -> list[tuple[int, int]]:
        ys = range(self.L) if self.periodic else range(-1, self.L)
        out = []
        for s in range(-1, self.T + 1):
            for y in ys:
                if (y - s) % 2 == 0:
                    continue
                around = [(s + 1, y), (s - 1, y), (s, y - 1), (s, y + 1)]
                if self.periodic:
                    around = [(a, b % self.L) for a, b in around]
                if any(self.has_vertex(v) for v in around):
                    out.append((s, y))
        return out

    def vertex_faces(self, v) -> dict[str, tuple[int, int]]:
        t, x = v
        raw = {"n": (t + 1, x), "s": (t - 1, x), "w": (t, x - 1), "e": (t, x + 1)}
        return {k: self.norm_face(f) for k, f in raw.items()}

    def is_shaded(self, face) -> bool:
        return self.norm_face(face) in self.shaded

    def pattern(self, v) -> dict[str, bool]:
        return {k: self.is_shaded(f) for k, f in self.vertex_faces(v).items()}

    def gap_face(self, t: int, y: int) -> tuple[int, int]:
        """Face crossed by cut ``t`` between wires ``y`` and ``y + 1``."""
        return self.norm_face((t - 1, y) if (y - t) % 2 == 0 else (t, y))

    def region(self, face):
        """Canonical region of a face (open diagrams merge each outer side)."""
        s, y = self.norm_face(face)
        if not self.periodic:
            if y == -1:
                return ("left",)
            if y == self.L - 1:
                return ("right",)
        return ("f", s, y)

    def wire_segment(self, t: int, x: int):
        """Canonical id of the wire ``x`` crossing cut ``t``."""
        if self.periodic:
            return ("w", t, x % self.L)
        while t > 0 and not self._touches(t - 1, x):
            t -= 1
        return ("w", t, x)

    def _touches(self, layer: int, x: int) -> bool:
        return self.has_vertex((layer, x)) or self.has_vertex((layer, x - 1))

    def check_outer_regions(self):
        """Open diagrams: every outer face on one side must share a shading."""
        if self.periodic:
            return
        for y, side in ((-1, "left"), (self.L - 1, "right")):
            vals = {self.is_shaded(f) for f in self.faces() if f[1] == y}
            if len(vals) > 1:
                raise IllegalDiagram(f"{side} outer region has mixed shading")

    def outer_shaded(self, side: str) -> bool:
        y = -1 if side == "left" else self.L - 1
        return any(self.is_shaded(f) for f in self.faces() if f[1] == y)

    def region_shaded(self, region) -> bool:
        if region[0] in ("left", "right"):
            return self.outer_shaded(region[0])
        return (region[1], region[2]) in self.shaded

    def wire_present(self, t: int, x: int) -> bool:
        return not (self._gap_shaded(t, x - 1) or self._gap_shaded(t, x))

    def _gap_shaded(self, t: int, y: int) -> bool:
        if not self.periodic and (y == -1 or y == self.L - 1):
            return self.outer_shaded("left" if y == -1 else "right")
        return self.is_shaded(self.gap_face(t, y))

    def slots(self, t: int) -> list[tuple]:
        """Every wire and gap position crossed by cut ``t``, in spatial order.

        Entries are ``("wire", x, segment_id, present)`` or
        ``("gap", y, region_id, present)``.
        """
        out = []
        if not self.periodic:
            out.append(("gap", -1, ("left",), self.outer_shaded("left")))
        last_gap = self.L if self.periodic else self.L - 1
        for x in range(self.L):
            out.append(("wire", x, self.wire_segment(t, x), self.wire_present(t, x)))
            if x < last_gap:
                y = x
                region = self.region(self.gap_face(t, y))
                out.append(("gap", y, region, self._gap_shaded(t, y)))
        if not self.periodic:
            out.append(("gap", self.L - 1, ("right",), self.outer_shaded("right")))
        return out

    def slot_index(self, kind: str, pos: int) -> int:
        if self.periodic:
            return (2 * pos + (kind == "gap")) % (2 * self.L)
        return 2 * pos + 1 + (kind == "gap")

    def vertex_window(self, v) -> list[int]:
        """Slot indices of (W gap, sw wire, S/N gap, se wire, E gap) for a vertex."""
        t, x = v
        return [
            self.slot_index("gap", x - 1),
            self.slot_index("wire", x),
            self.slot_index("gap", x),
            self.slot_index("wire", x + 1),
            self.slot_index("gap", x + 1),
        ]

    def vertex_legs(self, v) -> dict[str, object]:
        """Objects carried by each leg position of a vertex (``None`` if absent)."""
        if not self.has_vertex(v):
            raise KeyError(f"vertex {v} not in diagram")
        t, x = v
        faces = self.vertex_faces(v)
        pat = {k: self.is_shaded(f) for k, f in faces.items()}
        legs: dict[str, object] = {}
        for k in FACE_POSITIONS:
            legs[k] = self.region(faces[k]) if pat[k] else None
        wires = {
            "sw": (t, x, ("w", "s")),
            "se": (t, x + 1, ("s", "e")),
            "nw": (t + 1, x, ("w", "n")),
            "ne": (t + 1, x + 1, ("n", "e")),
        }
        for k, (cut, wx, borders) in wires.items():
            bare = not any(pat[b] for b in borders)
            legs[k] = self.wire_segment(cut, wx) if bare else None
        return legs

    def vertex_uv(self, v) -> tuple[int, int]:
        t, x = v
        return ((t + x) // 2, (t - x) // 2)

    def kinds(self) -> dict[tuple[int, int], VertexKind]:
        return {v: classify_vertex(self, v) for v in self.vertices()}


def classify_vertex(d: ShadedDiagram, v) -> VertexKind:
    if not d.has_vertex(v):
        raise KeyError(f"vertex {v} not in diagram")
    try:
        return classify_pattern(**d.pattern(v))
    except IllegalDiagram as exc:
        raise IllegalDiagram(f"vertex {v}: {exc}") from None


# builtin shadings ---------------------------------------------------------


def _pdist(a: int, b: int, L: int, periodic: bool) -> int:
    d = abs(a - b)
    return min(d % L, (-d) % L) if periodic else d


def _default_apex(L: int, t0: int) -> tuple[int, int]:
    x0 = L // 2
    if (x0 - t0) % 2:
        x0 -= 1
    return t0, x0


def shading_rule(name: str, L: int, T: int, periodic: bool = True, **params) -> Callable[[int, int], bool]:
    if name in ("all-unshaded", "brickwork"):
        return lambda s, y: False
    if name in ("all-shaded", "clockwork"):
        return lambda s, y: True
    if name == "checkerboard":
        phase = int(params.get("phase", 0))
        return lambda s, y: (s + phase) % 2 == 0
    if name == "diagonal-boundary":
        vel = int(params.get("velocity", 1))
        if vel not in (1, -1):
            raise ValueError("velocity must be +1 or -1")
        offset = int(params.get("offset", 1))
        width = int(params.get("width", L // 2))
        if periodic:
            return lambda s, y: ((y - vel * s - offset) % L) < width
        return lambda s, y: 0 <= (y - vel * s - offset) < width
    if name == "wedge":
        t0, x0 = params.get("apex") or _default_apex(L, 1)
        return lambda s, y: s >= t0 + 1 and _pdist(y, x0, L, periodic) <= s - t0 - 1
    if name == "reflection":
        t0, x0 = params.get("apex") or _default_apex(L, max(1, T // 2))
        inside = bool(params.get("inside_shaded", False))
        return lambda s, y: (_pdist(y, x0, L, periodic) < abs(s - t0)) == inside
    if name == "rectangles":
        rects = [tuple(r) for r in params["rects"]]

        def rule(s, y):
            for u0, u1, v0, v1 in rects:
                # face centre (u + 1/2, v + 1/2) with s = u + v + 1, y = u - v
                for shift in ((0,) if not periodic else range(-2, 3)):
                    yy = y + shift * L
                    if (s - 1 + yy) % 2:
                        continue
                    u, v = (s - 1 + yy) // 2, (s - 1 - yy) // 2
                    if u0 <= u < u1 and v0 <= v < v1:
                        return True
            return False

        return rule
    raise ValueError(f"unknown builtin shading {name!r}")


BUILTIN_SHADINGS = {
    "brickwork": "all faces unshaded: dual-unitary brickwork circuit",
    "clockwork": "all faces shaded: quantum-cross (round-a-face) circuit",
    "diagonal-boundary": "clockwork band with quantum-Latin-square edges moving at velocity +-1",
    "wedge": "clockwork wedge opening from a unitary-error-basis apex",
    "reflection": "two boundaries meeting at a Hadamard vertex and reflecting",
    "checkerboard": "alternating shaded layers: Hadamard (kicked Ising) circuit",
    "rectangles": "clockwork rectangles embedded in brickwork (u, v ranges)",
}


def build_diagram(L: int, T: int, shading_spec="all-unshaded", periodic: bool = True, **params) -> ShadedDiagram:
    """Build a legal diagram from a builtin name, a predicate, or explicit faces.

    ``shading_spec`` may be a builtin name, a callable ``(s, y) -> bool``, a
    mapping ``face -> bool``, or an iterable of shaded faces.
    """
    if L < 2 or (periodic and L % 2):
        raise IllegalDiagram("L must be even and >= 2")
    if T < 1:
        raise IllegalDiagram("diagram needs at least one time layer")
    probe = ShadedDiagram(L, T, frozenset(), periodic)
    name = "explicit"
    if isinstance(shading_spec, str):
        name = shading_spec
        rule = shading_rule(shading_spec, L, T, periodic, **params)
        shaded = {f for f in probe.faces() if rule(*f)}
    elif callable(shading_spec):
        shaded = {f for f in probe.faces() if shading_spec(*f)}
    elif isinstance(shading_spec, Mapping):
        shaded = {probe.norm_face(f) for f, on in shading_spec.items() if on}
    else:
        shaded = {probe.norm_face(f) for f in shading_spec}
    return ShadedDiagram(L, T, frozenset(shaded), periodic, name)


def faces_from_uv2(triples: Iterable) -> dict[tuple[int, int], bool]:
    """Explicit faces given as ``(2u, 2v, shaded)`` half-integer-doubled triples."""
    out = {}
    for u2, v2, on in triples:
        if (u2 % 2 != 1) or (v2 % 2 != 1):
            raise ValueError(f"face coordinates must be half-integers: {(u2, v2)}")
        s, y = (u2 + v2) // 2, (u2 - v2) // 2
        out[(s, y)] = bool(on)
    return out


def rotate90(d: ShadedDiagram) -> ShadedDiagram:
    """Rotate an open patch by 90 degrees (N -> E -> S -> W -> N).

    The new patch has ``T + 1`` wires and ``L - 1`` layers.
    """
    if d.periodic:
        raise IllegalDiagram("rotate90 needs a diagram with open spatial boundaries")
    if d.L < 3:
        raise IllegalDiagram("rotate90 needs at least three wires")
    shaded = frozenset((d.L - 2 - y, s) for s, y in d.shaded)
    return ShadedDiagram(d.T + 1, d.L - 1, shaded, periodic=False, name=f"rot90({d.name})")


def rotate_kind(kind: VertexKind) -> VertexKind:
    """Vertex kind after :func:`rotate90` (N -> E -> S -> W -> N)."""
    turn = {"n": "e", "e": "s", "s": "w", "w": "n"}
    pat = kind_pattern(kind)
    new = {turn[k]: v for k, v in pat.items()}
    return classify_pattern(**new)


def cut_space(d: ShadedDiagram, t: int, solution) -> list[tuple[object, int]]:
    """Objects (bare wires, shaded regions) crossed by cut ``t`` with their dims."""
    if not 0 <= t <= d.T:
        raise ValueError(f"cut {t} outside 0..{d.T}")
    out = []
    for kind, pos, obj, present in d.slots(t):
        if not present:
            continue
        dim = solution.dim(obj)
        if dim is None:
            raise ValueError(f"dimension of {obj} is not fixed")
        out.append((obj, dim))
    return out
