"""Closed-form kicked-Ising matrices and plain-text complex-matrix files.

File format: one matrix row per line, entries separated by whitespace and
written as ``re+imj`` (Python complex literal syntax). Lines starting with
``#`` are comments.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .structures import cross_from_hadamards, du_from_hadamards, fourier_matrix, phased_hadamard

FIXTURE_TOL = 1e-12


def format_entry(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}j"


def write_matrix(path, m, comment: str | None = None):
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    lines = [f"# {comment}"] if comment else []
    lines += [" ".join(format_entry(z) for z in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_matrix(text: str) -> np.ndarray:
    rows = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([complex(tok) for tok in line.split()])
        except ValueError as exc:
            raise ValueError(f"line {n}: {exc}") from None
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("matrix rows are empty or ragged")
    return np.array(rows, dtype=np.complex128)


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())


# closed forms ------------------------------------------------------------


def kim_du() -> np.ndarray:
    """Self-dual kicked-Ising gate at the integrable point."""
    return 0.5 * np.array([[1, 1, 1, -1], [1, -1, 1, 1], [1, 1, -1, 1], [-1, 1, 1, 1]], dtype=np.complex128)


def kim_cross() -> np.ndarray:
    """Family ``U[a, c]`` with identities on the diagonal and X off it."""
    I, X = np.eye(2), np.array([[0, 1], [1, 0]])
    return np.array([[I, X], [X, I]], dtype=np.complex128)


def kim_du_phased(phi: float) -> np.ndarray:
    """Printed closed form for the phase-dressed Hadamard input, entry by entry."""
    e = lambda k: np.exp(1j * k * phi)
    return 0.5 * np.array([
        [1, e(2), e(1), -e(1)],
        [e(1), -e(1), e(2), e(4)],
        [1, e(2), -e(1), e(1)],
        [-e(1), e(1), e(2), e(4)],
    ])


def kim_cross_phased(phi: float) -> np.ndarray:
    c, s = np.cos(2 * phi), np.sin(2 * phi)
    diag = np.exp(2j * phi) * np.array([[c, -1j * s], [-1j * s, c]])
    off = np.exp(2j * phi) * np.array([[-1j * s, c], [c, -1j * s]])
    return np.array([[diag, off], [off, diag]])


def cross_to_matrix(family) -> np.ndarray:
    """Flatten ``U[a, c][b, d]`` to rows ``(a, c)`` and columns ``(b, d)``."""
    f = np.asarray(family)
    return f.reshape(f.shape[0] * f.shape[1], -1)


def cross_from_matrix(m, q: int = 2) -> np.ndarray:
    return np.asarray(m).reshape(q, q, q, q)


# comparisons ------------------------------------------------------------


def fixture_checks(phis=(0.3, np.pi / 7)):
    """``(name, max deviation)`` for every closed form against its constructor."""
    F = fourier_matrix(2)
    out = [
        ("kim-du", _dev(du_from_hadamards(F, F, F, F), kim_du())),
        ("kim-cross", _dev(cross_from_hadamards(F, F, F, F), kim_cross())),
    ]
    for phi in phis:
        H = phased_hadamard(phi)
        out.append((f"kim-du-phased(phi={phi:.6g})", _dev(du_from_hadamards(H, H, H, H), kim_du_phased(phi))))
        out.append((f"kim-cross-phased(phi={phi:.6g})", _dev(cross_from_hadamards(H, H, H, H), kim_cross_phased(phi))))
    return out


def _dev(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


SHIPPED = {
    "kim_du.txt": lambda: kim_du(),
    "kim_cross.txt": lambda: cross_to_matrix(kim_cross()),
}


def shipped_dir():
    return resources.files("biunitary_circuits") / "data"


def load_shipped(name: str) -> np.ndarray:
    return parse_matrix((shipped_dir() / name).read_text())


def shipped_checks():
    """Compare each shipped fixture file with its closed form."""
    return [(f"file:{name}", _dev(load_shipped(name), make())) for name, make in SHIPPED.items()]
