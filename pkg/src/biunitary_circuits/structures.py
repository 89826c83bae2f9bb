"""Biunitaries: the five vertex structures, their checks and constructions.

Every vertex is stored as an eight-leg tensor with legs ``LEG_ORDER``. Wire
legs (``nw``, ``ne``, ``sw``, ``se``) and region legs (``n``, ``s``, ``w``,
``e``) that the vertex's shading leaves out have dimension 1.

Read vertically, a vertex is a gate controlled by its ``w``/``e`` regions,
mapping ``(sw, se, s)`` to ``(nw, ne, n)``. Read horizontally it is a map
from the west boundary ``(sw, nw, w)`` to the east boundary ``(se, ne, e)``
for each value of ``(s, n)``. Biunitarity asks the first to be unitary and
the second to be unitary up to a positive scalar ``lam``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import CROSS, DUAL_UNITARY, HADAMARD, QLS, UEB, VertexKind, classify_pattern, kind_pattern
from .tensor import BUILD_TOL, VERIFY_TOL, Tensor, haar_unitary

LEG_ORDER = ("nw", "ne", "n", "sw", "se", "s", "w", "e")
WIRE_LEGS = ("nw", "ne", "sw", "se")
REGION_LEGS = ("n", "s", "w", "e")
# a wire leg is bare when neither adjacent region is shaded
WIRE_BORDERS = {"nw": ("n", "w"), "ne": ("n", "e"), "sw": ("s", "w"), "se": ("s", "e")}
CONDITIONS = ("vertical-1", "vertical-2", "horizontal-1", "horizontal-2")


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    lam: float
    max_residual: float
    failed_condition: str | None = None
    detail: str = ""

    def __bool__(self):
        return self.passed


def present_legs(kind: VertexKind) -> set[str]:
    pat = kind_pattern(kind)
    legs = {r for r in REGION_LEGS if pat[r]}
    legs |= {w for w, (a, b) in WIRE_BORDERS.items() if not (pat[a] or pat[b])}
    return legs


@dataclass(frozen=True, eq=False)
class BiunitaryTensor:
    kind: VertexKind
    body: Tensor

    def __post_init__(self):
        if self.body.labels != LEG_ORDER:
            object.__setattr__(self, "body", self.body.transpose(LEG_ORDER))
        live = present_legs(self.kind)
        extra = [l for l in LEG_ORDER if l not in live and self.body.dim(l) != 1]
        if extra:
            raise ValueError(f"{self.kind} vertex carries legs {extra} its shading forbids")

    @property
    def data(self) -> np.ndarray:
        return self.body.data

    def dim(self, leg: str) -> int:
        return self.body.dim(leg)

    def dims(self) -> dict[str, int]:
        return dict(self.body.legs)

    def vertical(self) -> np.ndarray:
        """Blocks ``M[w, e]`` mapping ``(sw, se, s)`` to ``(nw, ne, n)``."""
        d = self.dims()
        t = np.transpose(self.data, (6, 7, 0, 1, 2, 3, 4, 5))
        dout = d["nw"] * d["ne"] * d["n"]
        din = d["sw"] * d["se"] * d["s"]
        return t.reshape(d["w"] * d["e"], dout, din)

    def horizontal(self) -> np.ndarray:
        """Blocks ``K[s, n]`` mapping ``(sw, nw, w)`` to ``(se, ne, e)``."""
        d = self.dims()
        # axes: nw0 ne1 n2 sw3 se4 s5 w6 e7
        t = np.transpose(self.data, (5, 2, 4, 1, 7, 3, 0, 6))
        deast = d["se"] * d["ne"] * d["e"]
        dwest = d["sw"] * d["nw"] * d["w"]
        return t.reshape(d["s"] * d["n"], deast, dwest)


def make_vertex(kind: VertexKind, legs: dict[str, int], data, order) -> BiunitaryTensor:
    """Place an array with axes ``order`` into the eight-leg layout."""
    arr = np.asarray(data, dtype=np.complex128).reshape([legs[o] for o in order])
    full = [legs.get(l, 1) for l in LEG_ORDER]
    src = list(order) + [l for l in LEG_ORDER if l not in order]
    arr = arr.reshape(arr.shape + (1,) * (8 - len(order)))
    arr = np.transpose(arr, [src.index(l) for l in LEG_ORDER]).reshape(full)
    return BiunitaryTensor(kind, Tensor(tuple(zip(LEG_ORDER, full)), arr))


def _unitarity_residuals(blocks: np.ndarray):
    """Max deviation of ``M^dag M`` and ``M M^dag`` from the identity."""
    r1 = r2 = 0.0
    for m in blocks:
        r1 = max(r1, np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1])), initial=0.0))
        r2 = max(r2, np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])), initial=0.0))
    return r1, r2


def _scaled_residuals(blocks: np.ndarray):
    """Best-fit ``lam`` and deviations of ``K^dag K``, ``K K^dag`` from ``lam I``."""
    grams = [m.conj().T @ m for m in blocks]
    diag = np.concatenate([np.real(np.diag(g)) for g in grams]) if grams else np.ones(1)
    lam = float(np.mean(diag)) if diag.size else 1.0
    r1 = r2 = 0.0
    for m, g in zip(blocks, grams):
        r1 = max(r1, np.max(np.abs(g - lam * np.eye(m.shape[1])), initial=0.0))
        r2 = max(r2, np.max(np.abs(m @ m.conj().T - lam * np.eye(m.shape[0])), initial=0.0))
    return lam, r1, r2


def _report(residuals, lam, tol, detail="") -> VerifyReport:
    worst = max(residuals)
    failed = next((c for c, r in zip(CONDITIONS, residuals) if r > tol), None)
    passed = failed is None and lam > 0
    if failed is None and not passed:
        failed = "horizontal-1"
    return VerifyReport(passed, lam, float(worst), failed, detail)


def check_biunitary(b: BiunitaryTensor, tol: float = VERIFY_TOL) -> VerifyReport:
    v = b.vertical()
    h = b.horizontal()
    if v.shape[1] != v.shape[2]:
        raise ValueError(f"vertical map {v.shape[2]} -> {v.shape[1]} cannot be unitary: inconsistent dims")
    if h.shape[1] != h.shape[2]:
        raise ValueError(f"horizontal map {h.shape[2]} -> {h.shape[1]} cannot be unitary: inconsistent dims")
    v1, v2 = _unitarity_residuals(v)
    lam, h1, h2 = _scaled_residuals(h)
    return _report((v1, v2, h1, h2), lam, tol, str(b.kind))


# specialized checks -------------------------------------------------------


def _qdim(n: int) -> int:
    q = int(round(np.sqrt(n)))
    if q * q != n:
        raise ValueError(f"dimension {n} is not a perfect square")
    return q


def dual(U) -> np.ndarray:
    """Space-time dual ``Ut[ab, cd] = U[bd, ac]`` of a two-site gate."""
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("two-site gate must be a square matrix")
    q = _qdim(U.shape[0])
    t = U.reshape(q, q, q, q)  # [a, b, c, d] = U[ab, cd]
    # Ut[a, b, c, d] = U[b, d, a, c]
    return np.transpose(t, (2, 0, 3, 1)).reshape(q * q, q * q)


def check_dual_unitary(U, tol: float = VERIFY_TOL) -> VerifyReport:
    U = np.asarray(U, dtype=np.complex128)
    Ut = dual(U)
    v1, v2 = _unitarity_residuals(U[None])
    h1, h2 = _unitarity_residuals(Ut[None])
    return _report((v1, v2, h1, h2), 1.0, tol, "dual-unitary")


def check_ueb(family, tol: float = VERIFY_TOL) -> VerifyReport:
    """Unitarity, trace orthogonality and completeness of ``q**2`` matrices."""
    fam = np.asarray(family, dtype=np.complex128)
    if fam.ndim != 3 or fam.shape[1] != fam.shape[2]:
        raise ValueError("UEB family must have shape (q*q, q, q)")
    q = fam.shape[1]
    if fam.shape[0] != q * q:
        raise ValueError(f"a q={q} UEB needs {q * q} members, got {fam.shape[0]}")
    unit1, unit2 = _unitarity_residuals(fam)
    gram = np.einsum("abc,dbc->ad", fam.conj(), fam)  # Tr(U_a^dag U_d)
    orth = float(np.max(np.abs(gram - q * np.eye(q * q))))
    # sum_e conj(U_e)[b, a] (U_e)[d, c] = q delta_ac delta_bd
    comp = np.einsum("eba,edc->abdc", fam.conj(), fam)
    target = q * np.einsum("ac,bd->abdc", np.eye(q), np.eye(q))
    complete = float(np.max(np.abs(comp - target)))
    lam = float(np.real(np.trace(gram))) / (q * q)
    return _report((unit1, unit2, orth, complete), lam, tol, "ueb")


def check_hadamard(H, tol: float = VERIFY_TOL) -> VerifyReport:
    """Unimodular entries and ``H H^dag = q I``."""
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("Hadamard matrix must be square")
    q = H.shape[0]
    modulus = float(np.max(np.abs(np.abs(H) - 1)))
    r1 = float(np.max(np.abs(H.conj().T @ H - q * np.eye(q))))
    r2 = float(np.max(np.abs(H @ H.conj().T - q * np.eye(q))))
    return _report((modulus, modulus, r1, r2), float(q), tol, "hadamard")


def check_qls(grid, tol: float = VERIFY_TOL) -> VerifyReport:
    """Every row and column of a ``q x q`` grid of ``q``-vectors is an orthonormal basis."""
    g = np.asarray(grid, dtype=np.complex128)
    if g.ndim != 3 or not (g.shape[0] == g.shape[1] == g.shape[2]):
        raise ValueError("QLS grid must have shape (q, q, q)")
    # column b: vectors g[a, b] over a; row a: vectors g[a, b] over b
    cols = np.transpose(g, (1, 2, 0))
    rows = np.transpose(g, (0, 2, 1))
    c1, c2 = _unitarity_residuals(cols)
    r1, r2 = _unitarity_residuals(rows)
    return _report((c1, c2, r1, r2), 1.0, tol, "qls")


def cross_dual(family) -> np.ndarray:
    """Reindex ``U[a, c][b, d]`` to ``Ut[b, d][a, c]``."""
    return np.transpose(np.asarray(family), (2, 3, 0, 1))


def check_cross(family, tol: float = VERIFY_TOL) -> VerifyReport:
    f = np.asarray(family, dtype=np.complex128)
    if f.ndim != 4 or f.shape[0] != f.shape[1] or f.shape[2] != f.shape[3]:
        raise ValueError("quantum cross must have shape (m, m, q, q)")
    v1, v2 = _unitarity_residuals(f.reshape(-1, f.shape[2], f.shape[3]))
    d = cross_dual(f)
    h1, h2 = _unitarity_residuals(d.reshape(-1, d.shape[2], d.shape[3]))
    return _report((v1, v2, h1, h2), 1.0, tol, "cross")


# vertex tensors from structure data ---------------------------------------


def du_vertex(U, dims: tuple[int, int] | None = None) -> BiunitaryTensor:
    """Two-site gate ``U[(nw, ne), (sw, se)]``; ``dims = (a, b)`` with ``nw = se = a``, ``ne = sw = b``."""
    U = np.asarray(U)
    a, b = (_qdim(U.shape[0]),) * 2 if dims is None else dims
    legs = {"nw": a, "ne": b, "sw": b, "se": a}
    return make_vertex(VertexKind(DUAL_UNITARY), legs, U, ("nw", "ne", "sw", "se"))


def hadamard_vertex(H, axis: str = "ew") -> BiunitaryTensor:
    """EW: ``T[w, e] = H``. NS: the one-site gate ``T[n, s] = H / sqrt(q)``."""
    H = np.asarray(H)
    q = H.shape[0]
    if axis == "ew":
        return make_vertex(VertexKind(HADAMARD, "ew"), {"w": q, "e": q}, H, ("w", "e"))
    if axis == "ns":
        return make_vertex(VertexKind(HADAMARD, "ns"), {"n": q, "s": q}, H / np.sqrt(q), ("n", "s"))
    raise ValueError(f"axis must be 'ew' or 'ns', not {axis!r}")


def ueb_vertex(family, side: str = "w") -> BiunitaryTensor:
    """Vertex with one shaded region ``side`` indexing the family member.

    Side-shaded vertices act as ``U_a`` on their one wire; top- or
    bottom-shaded vertices store ``U_a / sqrt(q)`` between their two wires.
    """
    fam = np.asarray(family)
    q = fam.shape[1]
    kind = VertexKind(UEB, side)
    if side == "w":
        return make_vertex(kind, {"w": q * q, "ne": q, "se": q}, fam, ("w", "ne", "se"))
    if side == "e":
        return make_vertex(kind, {"e": q * q, "nw": q, "sw": q}, fam, ("e", "nw", "sw"))
    if side == "n":
        return make_vertex(kind, {"n": q * q, "sw": q, "se": q}, fam / np.sqrt(q), ("n", "sw", "se"))
    if side == "s":
        return make_vertex(kind, {"s": q * q, "nw": q, "ne": q}, fam / np.sqrt(q), ("s", "nw", "ne"))
    raise ValueError(f"bad side {side!r}")


def qls_vertex(grid, corner: str = "ne") -> BiunitaryTensor:
    """``T[ns-region a, we-region b, wire c] = Q[a, b]_c``; the wire sits opposite ``corner``."""
    g = np.asarray(grid)
    q = g.shape[0]
    ns, we = corner[0], corner[1]
    wire = ("s" if ns == "n" else "n") + ("w" if we == "e" else "e")
    kind = VertexKind(QLS, corner)
    return make_vertex(kind, {ns: q, we: q, wire: q}, g, (ns, we, wire))


def cross_vertex(family) -> BiunitaryTensor:
    """``T[w=a, e=c, n=b, s=d] = (U_{a,c})_{b,d}``."""
    f = np.asarray(family)
    m, q = f.shape[0], f.shape[2]
    return make_vertex(VertexKind(CROSS), {"w": m, "e": m, "n": q, "s": q}, f, ("w", "e", "n", "s"))


def expected_lambda(kind: VertexKind, q: int) -> float | None:
    """Horizontal scalar of the storage conventions above (``None``: measured only)."""
    if kind.name == DUAL_UNITARY:
        return 1.0
    if kind.name == HADAMARD:
        return float(q) if kind.detail == "ew" else 1.0 / q
    if kind.name == UEB:
        return float(q) if kind.detail in ("w", "e") else 1.0 / q
    return None


def as_dual_unitary(b: BiunitaryTensor) -> np.ndarray:
    """Two-site matrix ``U[(nw, ne), (sw, se)]`` of an unshaded-corner vertex."""
    if b.kind.name != DUAL_UNITARY:
        raise ValueError(f"{b.kind} is not dual-unitary")
    d = b.dims()
    return b.data.reshape(d["nw"] * d["ne"], d["sw"] * d["se"])


def as_cross(b: BiunitaryTensor) -> np.ndarray:
    """Family ``U[w, e][n, s]`` of an all-shaded vertex."""
    if b.kind.name != CROSS:
        raise ValueError(f"{b.kind} is not a quantum cross")
    d = b.dims()
    return np.transpose(b.data.reshape(d["n"], d["s"], d["w"], d["e"]), (2, 3, 0, 1))


# constructors -------------------------------------------------------------


def normalize_hadamard(H, tol: float = VERIFY_TOL) -> np.ndarray:
    """Return the unimodular form, accepting gate-normalized ``H / sqrt(q)`` input."""
    H = np.asarray(H, dtype=np.complex128)
    q = H.shape[0]
    if np.allclose(np.abs(H), 1 / np.sqrt(q), atol=tol) and q > 1:
        H = H * np.sqrt(q)
    rep = check_hadamard(H, tol)
    if not rep.passed:
        raise ValueError(f"not a complex Hadamard matrix ({rep.failed_condition}, residual {rep.max_residual:.2e})")
    return H


def du_from_hadamards(H1, H2, H3, H4) -> np.ndarray:
    """``U[ab, cd] = q h1[a,b] h2[b,d] h3[d,c] h4[c,a]`` with ``h = H / sqrt(q)``."""
    hs = [normalize_hadamard(H) for H in (H1, H2, H3, H4)]
    q = hs[0].shape[0]
    h1, h2, h3, h4 = (H / np.sqrt(q) for H in hs)
    U = q * np.einsum("ab,bd,dc,ca->abcd", h1, h2, h3, h4)
    return U.reshape(q * q, q * q)


def cross_from_hadamards(H1, H2, H3, H4) -> np.ndarray:
    """``U[a, c][b, d] = q sum_e h1[a,e] h2[b,e] h3[c,e] h4[d,e]``."""
    hs = [normalize_hadamard(H) for H in (H1, H2, H3, H4)]
    q = hs[0].shape[0]
    h1, h2, h3, h4 = (H / np.sqrt(q) for H in hs)
    return q * np.einsum("ae,be,ce,de->acbd", h1, h2, h3, h4)


def fourier_matrix(q: int) -> np.ndarray:
    w = np.exp(2j * np.pi / q)
    a = np.arange(q)
    return w ** np.outer(a, a)


def phased_hadamard(phi: float) -> np.ndarray:
    return np.array([[1, np.exp(1j * phi)], [1, -np.exp(1j * phi)]])


def pauli_ueb() -> np.ndarray:
    return np.array([
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ], dtype=np.complex128)


def weyl_ueb(q: int) -> np.ndarray:
    """Shift-and-clock family ``X^i Z^j``."""
    X = np.roll(np.eye(q), 1, axis=0)
    Z = np.diag(np.exp(2j * np.pi * np.arange(q) / q))
    return np.array([np.linalg.matrix_power(X, i) @ np.linalg.matrix_power(Z, j) for i in range(q) for j in range(q)])


def cyclic_qls(q: int) -> np.ndarray:
    """Classical square ``Q[a, b] = e_{(a + b) mod q}``."""
    g = np.zeros((q, q, q), dtype=np.complex128)
    for a in range(q):
        for b in range(q):
            g[a, b, (a + b) % q] = 1
    return g


def delta_tensor(dim: int, arity: int, labels=None) -> Tensor:
    if arity < 1:
        raise ValueError("arity must be at least 1")
    labels = labels or [f"i{k}" for k in range(arity)]
    data = np.zeros((dim,) * arity, dtype=np.complex128)
    for i in range(dim):
        data[(i,) * arity] = 1
    return Tensor.from_array(data, labels)


# diagonal composition -----------------------------------------------------


def compose_diagonal(a: BiunitaryTensor, b: BiunitaryTensor, placement: str = "upper-right") -> BiunitaryTensor:
    """Glue ``b`` onto the upper-right or upper-left of ``a``.

    Upper-right: the wire ``a.ne = b.sw`` is summed, the face above ``a``
    is the face left of ``b`` and the face right of ``a`` is the face below
    ``b``. The composite's side legs are fused south to north.
    """
    pa, pb = kind_pattern(a.kind), kind_pattern(b.kind)
    da, db = a.dims(), b.dims()
    if placement == "upper-right":
        pairs = [("ne", "sw")]
        shared = [("n", "w"), ("e", "s")]
    elif placement == "upper-left":
        pairs = [("nw", "se")]
        shared = [("n", "e"), ("w", "s")]
    else:
        raise ValueError("placement must be 'upper-right' or 'upper-left'")
    for x, y in pairs + shared:
        if da[x] != db[y]:
            raise ValueError(f"cannot glue a.{x} (dim {da[x]}) to b.{y} (dim {db[y]})")
    for x, y in shared:
        if pa[x] != pb[y]:
            raise ValueError(f"a.{x} and b.{y} are the same face but shaded differently")

    # einsum letters: a legs A..H, b legs I..P; identified legs reuse a's letter
    la = dict(zip(LEG_ORDER, "ABCDEFGH"))
    lb = dict(zip(LEG_ORDER, "IJKLMNOP"))
    for x, y in pairs + shared:
        lb[y] = la[x]
    if placement == "upper-right":
        corners = {"s": la["s"], "w": la["w"], "n": lb["n"], "e": lb["e"]}
        sides = {
            "nw": la["nw"] + la["n"] + lb["nw"],
            "se": la["se"] + la["e"] + lb["se"],
            "sw": la["sw"],
            "ne": lb["ne"],
        }
        pattern = {"s": pa["s"], "w": pa["w"], "n": pb["n"], "e": pb["e"]}
    else:
        corners = {"s": la["s"], "e": la["e"], "n": lb["n"], "w": lb["w"]}
        sides = {
            "sw": la["sw"] + la["w"] + lb["sw"],
            "ne": la["ne"] + la["n"] + lb["ne"],
            "nw": lb["nw"],
            "se": la["se"],
        }
        pattern = {"s": pa["s"], "e": pa["e"], "n": pb["n"], "w": pb["w"]}
    out = "".join(sides[l] if l in sides else corners[l] for l in LEG_ORDER)
    spec = "".join(la[l] for l in LEG_ORDER) + "," + "".join(lb[l] for l in LEG_ORDER) + "->" + out
    data = np.einsum(spec, a.data, b.data)
    letter_dim = {la[l]: da[l] for l in LEG_ORDER} | {lb[l]: db[l] for l in LEG_ORDER}
    dims = []
    for l in LEG_ORDER:
        letters = sides.get(l, corners.get(l))
        dims.append(int(np.prod([letter_dim[c] for c in letters])))
    kind = classify_pattern(**pattern)
    return BiunitaryTensor(kind, Tensor(tuple(zip(LEG_ORDER, dims)), data.reshape(dims)))


def checkerboard_cell(B, R, Lf, Tp) -> BiunitaryTensor:
    """Four vertices bottom, right, left, top composed into one diamond."""
    return compose_diagonal(compose_diagonal(B, R, "upper-right"), compose_diagonal(Lf, Tp, "upper-right"), "upper-left")


# seeded valid instances ---------------------------------------------------


def random_hadamard(q: int, rng: np.random.Generator) -> np.ndarray:
    """Fourier matrix dressed by random diagonal phases and permutations."""
    F = fourier_matrix(q)
    d1 = np.exp(2j * np.pi * rng.random(q))
    d2 = np.exp(2j * np.pi * rng.random(q))
    H = (d1[:, None] * F * d2[None, :])[rng.permutation(q)][:, rng.permutation(q)]
    return H


def random_du(q: int, rng: np.random.Generator) -> np.ndarray:
    U = du_from_hadamards(*(random_hadamard(q, rng) for _ in range(4)))
    pre = np.kron(haar_unitary(q, rng), haar_unitary(q, rng))
    post = np.kron(haar_unitary(q, rng), haar_unitary(q, rng))
    return post @ U @ pre


def swap_gate(a: int, b: int) -> np.ndarray:
    """SWAP from ``(sw, se)`` of dims ``(b, a)`` to ``(nw, ne)`` of dims ``(a, b)``."""
    S = np.zeros((a * b, b * a))
    for i in range(b):
        for j in range(a):
            S[j * b + i, i * a + j] = 1
    return S


def dressed_swap(a: int, b: int, rng: np.random.Generator) -> np.ndarray:
    """SWAP between wires of unequal dimension, dressed by random one-site unitaries."""
    post = np.kron(haar_unitary(a, rng), haar_unitary(b, rng))
    pre = np.kron(haar_unitary(b, rng), haar_unitary(a, rng))
    return post @ swap_gate(a, b) @ pre


def random_ueb(q: int, rng: np.random.Generator) -> np.ndarray:
    """Shift-and-multiply: ``U_{i,j} = V P_i D_j W`` with ``D_j = diag(H[j])``."""
    H = random_hadamard(q, rng)
    perm = rng.permutation(q)
    V, W = haar_unitary(q, rng), haar_unitary(q, rng)
    fam = []
    for i in range(q):
        P = np.eye(q)[:, [(perm[k] + i) % q for k in range(q)]]
        for j in range(q):
            phase = np.exp(2j * np.pi * rng.random())
            fam.append(phase * V @ P @ np.diag(H[j]) @ W)
    return np.array(fam)[rng.permutation(q * q)]


def random_qls(q: int, rng: np.random.Generator) -> np.ndarray:
    if q == 2:
        v = haar_unitary(2, rng)
        u, w = v[:, 0], v[:, 1]
        ph = np.exp(2j * np.pi * rng.random((2, 2)))
        g = np.array([[u * ph[0, 0], w * ph[0, 1]], [w * ph[1, 0], u * ph[1, 1]]])
        return g
    V = haar_unitary(q, rng)
    r, c, s = rng.permutation(q), rng.permutation(q), rng.permutation(q)
    g = np.zeros((q, q, q), dtype=np.complex128)
    for a in range(q):
        for b in range(q):
            g[a, b] = np.exp(2j * np.pi * rng.random()) * V[:, s[(r[a] + c[b]) % q]]
    return g


def random_cross(q: int, rng: np.random.Generator) -> np.ndarray:
    f = cross_from_hadamards(*(random_hadamard(q, rng) for _ in range(4)))
    phases = [np.exp(2j * np.pi * rng.random(q)) for _ in range(4)]
    return f * np.einsum("a,c,b,d->acbd", *phases)


def random_vertex(kind: VertexKind, q: int, rng: np.random.Generator) -> BiunitaryTensor:
    if kind.name == DUAL_UNITARY:
        return du_vertex(random_du(q, rng))
    if kind.name == UEB:
        return ueb_vertex(random_ueb(q, rng), kind.detail)
    if kind.name == HADAMARD:
        return hadamard_vertex(random_hadamard(q, rng), kind.detail)
    if kind.name == QLS:
        return qls_vertex(random_qls(q, rng), kind.detail)
    if kind.name == CROSS:
        return cross_vertex(random_cross(q, rng))
    raise ValueError(f"unknown kind {kind}")


def perturb(arr, rng: np.random.Generator, eps: float = 1e-3) -> np.ndarray:
    """Copy with one entry shifted by ``eps`` (a random phase direction)."""
    out = np.array(arr, dtype=np.complex128)
    idx = tuple(rng.integers(0, s) for s in out.shape)
    out[idx] += eps * np.exp(2j * np.pi * rng.random())
    return out


def perturb_vertex(b: BiunitaryTensor, rng: np.random.Generator, eps: float = 1e-3) -> BiunitaryTensor:
    """Perturb one amplitude among the vertex's nonzero-capable entries."""
    return BiunitaryTensor(b.kind, Tensor(b.body.legs, perturb(b.data, rng, eps)))
