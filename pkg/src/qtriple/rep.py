"""Finite truncation of the faithful representation on l2(N) (x) l2(Z).

The generators act through

    a  ->  S sqrt(1 - Q^2) (x) 1        b  ->  Q (x) R

with Q e_k = q^k e_k, S the downward Fock shift (S e_0 = 0) and R the
bilateral shift e_m -> e_{m+1}.  We compress to the window
fock in [0, N_F), z in [-N_Z, N_Z] with *hard* truncation: transitions
leaving the window are zeroed (no cyclic wrap), so operator identities hold
exactly on interior vectors and every edge defect is quantified by the
interior projector rather than hidden.

Basis order is row-major (fock, z): index = fock * (2 N_Z + 1) + (z + N_Z).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .ncpoly import (
    ALPHA, ALPHA_STAR, BETA, BETA_STAR,
    NCPolynomial, QParam, Word, normalize,
)

__all__ = [
    "TruncationSpec", "build_generators", "represent", "interior_projector",
    "interior_indices", "operator_norm", "relation_residuals",
    "normal_form_residual", "apply_word_to_columns", "apply_poly_to_columns",
    "save_matrix", "load_matrix", "RELATION_NAMES",
]


@dataclass(frozen=True)
class TruncationSpec:
    """Window sizes: fock_dim Fock levels, z in [-z_band, z_band], interior margin."""

    fock_dim: int
    z_band: int
    margin: int = 0

    def __post_init__(self):
        if self.fock_dim < 4:
            raise ValueError("fock_dim must be >= 4")
        if self.z_band < 2:
            raise ValueError("z_band must be >= 2")
        if not 0 <= self.margin < min(self.fock_dim, self.z_band):
            raise ValueError("margin must satisfy 0 <= margin < min(fock_dim, z_band)")

    @property
    def z_count(self) -> int:
        return 2 * self.z_band + 1

    @property
    def dim(self) -> int:
        return self.fock_dim * self.z_count

    def index(self, fock: int, z: int) -> int:
        return fock * self.z_count + (z + self.z_band)


@lru_cache(maxsize=64)
def _generator_matrices(t: TruncationSpec, qp: QParam):
    """The four compressed generator matrices, keyed by letter code."""
    q = qp.q
    nf, nz = t.fock_dim, t.z_count
    # Fock factor of alpha: S sqrt(1 - Q^2), entries sqrt(1 - q^(2k)) at (k-1, k)
    a_fock = np.zeros((nf, nf), dtype=complex)
    for k in range(1, nf):
        a_fock[k - 1, k] = np.sqrt(1.0 - q ** (2 * k))
    q_diag = np.diag([q ** k for k in range(nf)]).astype(complex)
    # z factor of beta: R, entries 1 at (m+1, m); hard truncation at the top edge
    r_mat = np.zeros((nz, nz), dtype=complex)
    for m in range(nz - 1):
        r_mat[m + 1, m] = 1.0
    eye_z = np.eye(nz, dtype=complex)
    alpha = np.kron(a_fock, eye_z)
    beta = np.kron(q_diag, r_mat)
    mats = {
        ALPHA: alpha,
        ALPHA_STAR: alpha.conj().T.copy(),
        BETA: beta,
        BETA_STAR: beta.conj().T.copy(),
    }
    for m in mats.values():
        m.setflags(write=False)
    return mats


def build_generators(t: TruncationSpec, qp: QParam):
    """Return (alpha matrix, beta matrix) for the truncation window."""
    mats = _generator_matrices(t, qp)
    return mats[ALPHA], mats[BETA]


def represent(x: NCPolynomial, t: TruncationSpec, qp: QParam | None = None) -> np.ndarray:
    """Dense matrix of an element; monomials map to ordered generator products."""
    qp = qp or x.qp
    mats = _generator_matrices(t, qp)
    out = np.zeros((t.dim, t.dim), dtype=complex)
    for mon, c in x.terms.items():
        acc = np.eye(t.dim, dtype=complex)
        for letter in mon.letters():
            acc = acc @ mats[letter]
        out += c * acc
    return out


def apply_word_to_columns(letters, t: TruncationSpec, qp: QParam, cols: np.ndarray) -> np.ndarray:
    """Image of the column block under the ordered product of generator matrices."""
    mats = _generator_matrices(t, qp)
    acc = cols
    for letter in reversed(tuple(letters)):
        acc = mats[letter] @ acc
    return acc


def apply_poly_to_columns(x: NCPolynomial, t: TruncationSpec, cols: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(cols)
    for mon, c in x.terms.items():
        acc += c * apply_word_to_columns(mon.letters(), t, x.qp, cols)
    return acc


def interior_indices(t: TruncationSpec, margin: int | None = None) -> np.ndarray:
    """Indices of basis vectors at least ``margin`` steps away from every window edge."""
    mu = t.margin if margin is None else margin
    if not 0 <= mu <= min(t.fock_dim - 1, t.z_band):
        raise ValueError(f"margin {mu} leaves no interior window")
    idx = []
    for fock in range(t.fock_dim - mu):
        for z in range(-(t.z_band - mu), t.z_band - mu + 1):
            idx.append(t.index(fock, z))
    return np.array(idx, dtype=int)


def interior_projector(t: TruncationSpec, margin: int | None = None) -> np.ndarray:
    """Orthogonal projector onto the interior window (diagonal 0/1 matrix)."""
    p = np.zeros((t.dim, t.dim), dtype=complex)
    idx = interior_indices(t, margin)
    p[idx, idx] = 1.0
    return p


def operator_norm(a: np.ndarray, max_iter: int = 200, tol: float = 1e-12) -> float:
    """2-norm estimate by power iteration on A*A (no external eigensolver).

    Deterministic start vector; 200-iteration cap, 1e-12 relative
    convergence threshold on the Rayleigh quotient.
    """
    if a.size == 0:
        return 0.0
    fro = np.linalg.norm(a)
    if fro == 0.0:
        return 0.0
    n = a.shape[1]
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = a.conj().T @ (a @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v_new = w / nw
        lam_new = nw  # Rayleigh quotient of A*A at unit v equals |A*Av|
        if abs(lam_new - lam) <= tol * max(1.0, lam_new):
            lam = lam_new
            break
        lam, v = lam_new, v_new
    return float(np.sqrt(lam))


# The defining relations, listed as (name, callable on (alpha, beta, q) -> matrix).
RELATION_NAMES = (
    "a*a + b*b - 1",
    "aa* + q^2 bb* - 1",
    "ab - q ba",
    "ab* - q b*a",
    "b*b - bb*",
)


def _relation_matrices(t: TruncationSpec, qp: QParam):
    a, b = build_generators(t, qp)
    astar, bstar = a.conj().T, b.conj().T
    eye = np.eye(t.dim)
    q = qp.q
    return {
        RELATION_NAMES[0]: astar @ a + bstar @ b - eye,
        RELATION_NAMES[1]: a @ astar + q * q * (b @ bstar) - eye,
        RELATION_NAMES[2]: a @ b - q * (b @ a),
        RELATION_NAMES[3]: a @ bstar - q * (bstar @ a),
        RELATION_NAMES[4]: bstar @ b - b @ bstar,
    }


def relation_residuals(t: TruncationSpec, qp: QParam) -> dict[str, float]:
    """Interior operator-norm residual of each defining relation.

    Every relation has total degree 2, so the projector margin is the stored
    margin plus 2.  On the infinite space all five vanish identically; here
    the interior residuals are float-roundoff small while the unprojected
    edge defect is order one (see `edge_defect`).
    """
    if t.margin < 1:
        raise ValueError("relation residuals need margin >= 1")
    idx = interior_indices(t, t.margin + 2)
    out = {}
    for name, mat in _relation_matrices(t, qp).items():
        sub = mat[np.ix_(idx, idx)]
        out[name] = operator_norm(sub)
    return out


def edge_defect(t: TruncationSpec, qp: QParam) -> float:
    """Unprojected norm of aa* + q^2 bb* - 1: the top-Fock-edge defect.

    Documents why interior projection exists; the value is at least
    1 - q^(2 fock_dim) because the compressed shift loses the outgoing
    component at the last Fock level.
    """
    mat = _relation_matrices(t, qp)[RELATION_NAMES[1]]
    return operator_norm(mat)


def normal_form_residual(word: Word, t: TruncationSpec, qp: QParam) -> float:
    """Interior residual between a word's matrix and its normal form's matrix.

    The margin equals the word length (capped at the window's largest legal
    margin), so all index paths stay inside the window and the residual is
    pure float noise when the rewrite is sound.  Words longer than
    min(fock_dim - 1, z_band) can graze the edges and are not guaranteed a
    tiny residual.
    """
    nf = normalize(word, qp)
    mu = min(len(word.letters), min(t.fock_dim - 1, t.z_band))
    idx = interior_indices(t, mu)
    cols = np.zeros((t.dim, len(idx)), dtype=complex)
    cols[idx, np.arange(len(idx))] = 1.0
    direct = word.coefficient * apply_word_to_columns(word.letters, t, qp, cols)
    reduced = apply_poly_to_columns(nf, t, cols)
    return operator_norm((direct - reduced)[idx, :])


# ---------------------------------------------------------------------------
# Matrix dump formats: JSON, or binary little-endian complex128 with a
# 16-byte header (dim as u32, 12 reserved zero bytes), row-major.
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<I12x")


def save_matrix(mat: np.ndarray, path: str, fmt: str = "json") -> None:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("only square matrices are dumped")
    dim = mat.shape[0]
    if fmt == "json":
        data = {
            "dim": dim,
            "re": np.asarray(mat.real, dtype=float).ravel().tolist(),
            "im": np.asarray(mat.imag, dtype=float).ravel().tolist(),
        }
        with open(path, "w") as fh:
            json.dump(data, fh)
    elif fmt == "bin":
        arr = np.ascontiguousarray(mat, dtype="<c16")
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(dim))
            fh.write(arr.tobytes())
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")


def load_matrix(path: str, fmt: str = "json") -> np.ndarray:
    if fmt == "json":
        with open(path) as fh:
            data = json.load(fh)
        dim = int(data["dim"])
        re = np.array(data["re"], dtype=float).reshape(dim, dim)
        im = np.array(data["im"], dtype=float).reshape(dim, dim)
        return re + 1j * im
    if fmt == "bin":
        with open(path, "rb") as fh:
            header = fh.read(_HEADER.size)
            (dim,) = _HEADER.unpack(header)
            body = fh.read()
        arr = np.frombuffer(body, dtype="<c16", count=dim * dim)
        return arr.reshape(dim, dim).astype(complex)
    raise ValueError(f"unknown matrix format {fmt!r}")
