"""Dense complex tensors with labelled legs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

VERIFY_TOL = 1e-10
BUILD_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Tensor:
    """Row-major complex array whose axes carry unique string labels."""

    legs: tuple[tuple[str, int], ...]
    data: np.ndarray

    def __post_init__(self):
        legs = tuple((str(name), int(dim)) for name, dim in self.legs)
        names = [name for name, _ in legs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate leg labels: {names}")
        if any(dim < 1 for _, dim in legs):
            raise ValueError(f"leg dimensions must be positive: {legs}")
        data = np.array(self.data, dtype=np.complex128)
        shape = tuple(dim for _, dim in legs)
        if data.size != int(np.prod(shape, dtype=np.int64)):
            raise ValueError(f"{data.size} amplitudes do not fit legs {legs}")
        data = data.reshape(shape)
        data.flags.writeable = False
        object.__setattr__(self, "legs", legs)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, array, labels: Sequence[str]) -> "Tensor":
        array = np.asarray(array)
        if array.ndim != len(labels):
            raise ValueError(f"array has {array.ndim} axes but {len(labels)} labels")
        return cls(tuple(zip(labels, array.shape)), array)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.legs)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.legs)

    def dim(self, label: str) -> int:
        return self.dims[self.axis(label)]

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no leg {label!r} in {self.labels}") from None

    def relabel(self, mapping: dict[str, str]) -> "Tensor":
        legs = tuple((mapping.get(n, n), d) for n, d in self.legs)
        return Tensor(legs, self.data)

    def transpose(self, labels: Sequence[str]) -> "Tensor":
        if sorted(labels) != sorted(self.labels):
            raise ValueError(f"{labels} is not a permutation of {self.labels}")
        axes = [self.axis(n) for n in labels]
        return Tensor(tuple(self.legs[a] for a in axes), np.transpose(self.data, axes))

    def conj(self) -> "Tensor":
        return Tensor(self.legs, np.conj(self.data))

    def matrix(self, rows: Sequence[str], cols: Sequence[str]) -> np.ndarray:
        """Return the tensor as a matrix with the given row and column legs."""
        t = self.transpose(list(rows) + list(cols))
        nrow = int(np.prod([self.dim(n) for n in rows], dtype=np.int64))
        return t.data.reshape(nrow, -1)

    def allclose(self, other: "Tensor", tol: float = VERIFY_TOL) -> bool:
        if sorted(self.legs) != sorted(other.legs):
            return False
        return bool(np.max(np.abs(self.data - other.transpose(self.labels).data), initial=0.0) <= tol)

    def __repr__(self):
        return f"Tensor(legs={self.legs})"


def from_matrix(m, rows: Sequence[tuple[str, int]], cols: Sequence[tuple[str, int]]) -> Tensor:
    legs = tuple(rows) + tuple(cols)
    return Tensor(legs, np.asarray(m).reshape([d for _, d in legs]))


def contract(a: Tensor, b: Tensor, pairs: Iterable[tuple[str, str]]) -> Tensor:
    """Sum over paired legs; result legs are the unpaired legs of ``a`` then ``b``."""
    pairs = list(pairs)
    la = [p[0] for p in pairs]
    lb = [p[1] for p in pairs]
    if len(set(la)) != len(la) or len(set(lb)) != len(lb):
        raise ValueError("a leg may appear in at most one pair")
    ax_a = [a.axis(n) for n in la]
    ax_b = [b.axis(n) for n in lb]
    for (na, nb), ia, ib in zip(pairs, ax_a, ax_b):
        if a.dims[ia] != b.dims[ib]:
            raise ValueError(f"dimension mismatch pairing {na}({a.dims[ia]}) with {nb}({b.dims[ib]})")
    data = np.tensordot(a.data, b.data, axes=(ax_a, ax_b))
    legs = tuple(l for l in a.legs if l[0] not in la) + tuple(l for l in b.legs if l[0] not in lb)
    return Tensor(legs, data)


def dagger(a: Tensor, in_legs: Sequence[str], out_legs: Sequence[str]) -> Tensor:
    """Conjugate transpose of the map ``in_legs -> out_legs``.

    The result keeps the labels but lists the former inputs first, so that it
    reads as the map ``out_legs -> in_legs``.
    """
    if sorted(list(in_legs) + list(out_legs)) != sorted(a.labels):
        raise ValueError("in_legs and out_legs must partition the legs")
    return a.transpose(list(in_legs) + list(out_legs)).conj()


def group_legs(a: Tensor, groups: Sequence[Sequence[str]], names: Sequence[str] | None = None) -> Tensor:
    """Fuse each group of legs into one composite leg (row-major within the group)."""
    flat = [n for g in groups for n in g]
    if sorted(flat) != sorted(a.labels):
        raise ValueError(f"groups {groups} do not partition legs {a.labels}")
    if names is None:
        names = ["*".join(g) for g in groups]
    t = a.transpose(flat)
    dims = [int(np.prod([a.dim(n) for n in g], dtype=np.int64)) for g in groups]
    return Tensor(tuple(zip(names, dims)), t.data.reshape(dims))


def split_leg(a: Tensor, label: str, parts: Sequence[tuple[str, int]]) -> Tensor:
    """Inverse of :func:`group_legs` for one composite leg."""
    ax = a.axis(label)
    if int(np.prod([d for _, d in parts], dtype=np.int64)) != a.dims[ax]:
        raise ValueError(f"parts {parts} do not multiply to {a.dims[ax]}")
    legs = a.legs[:ax] + tuple(parts) + a.legs[ax + 1:]
    return Tensor(legs, a.data.reshape([d for _, d in legs]))


def eig_hermitian(m, tol: float = VERIFY_TOL):
    """Eigenvalues (descending) and matching eigenvector columns of a Hermitian matrix."""
    if isinstance(m, Tensor):
        if len(m.legs) != 2:
            raise ValueError("eig_hermitian expects a two-leg tensor")
        m = m.data
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"not a square matrix: {m.shape}")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
        raise ValueError("matrix is not Hermitian")
    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def random_unitary(dim: int, seed=None, labels: tuple[str, str] = ("out", "in")) -> Tensor:
    """Haar-random unitary: QR of a seeded Gaussian matrix with the diagonal phases fixed."""
    if dim < 1:
        raise ValueError("dim must be positive")
    return Tensor.from_array(haar_unitary(dim, np.random.default_rng(seed)), labels)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    qmat, r = np.linalg.qr(z)
    d = np.diag(r)
    return qmat * (d / np.abs(d))


def identity(dim: int, labels: tuple[str, str] = ("out", "in")) -> Tensor:
    return Tensor.from_array(np.eye(dim), labels)
