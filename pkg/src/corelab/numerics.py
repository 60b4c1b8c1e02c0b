"""Dense complex linear algebra with an explicit tolerance policy.

Every decision that depends on floating point (ranks, subspace equality,
positivity) goes through a :class:`Tolerance` so callers can tighten or
loosen the policy in one place.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "Tolerance",
    "Subspace",
    "DEFAULT_TOL",
    "as_matrix",
    "orthonormal_range",
    "range_frame",
    "subspace_intersect",
    "subspace_complement_within",
    "subspace_sum",
    "is_psd",
    "psd_sqrt",
    "operator_norm",
    "kron",
    "null_space",
    "solve_linear_space",
    "linear_map_matrix",
    "fix_phase",
    "projection_distance",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    ``rank_rel_tol`` is relative: a singular value counts when it exceeds
    ``rank_rel_tol * sigma_max * max(rows, cols)``.
    """

    eq_tol: float = 1e-9
    psd_tol: float = 1e-7
    rank_rel_tol: float = 1e-10

    def __post_init__(self):
        for name in ("eq_tol", "psd_tol", "rank_rel_tol"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be strictly positive, got {v!r}")

    @classmethod
    def from_env(cls, eq_tol: float | None = None) -> "Tolerance":
        """Defaults, with ``CORELAB_TOL`` (then ``eq_tol``) overriding eq_tol."""
        value = eq_tol
        if value is None and os.environ.get("CORELAB_TOL"):
            value = float(os.environ["CORELAB_TOL"])
        return cls() if value is None else cls(eq_tol=value)

    def as_dict(self) -> dict:
        return {"eq_tol": self.eq_tol, "psd_tol": self.psd_tol,
                "rank_rel_tol": self.rank_rel_tol}


DEFAULT_TOL = Tolerance()


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def fix_phase(v: np.ndarray, thresh: float = 1e-12) -> np.ndarray:
    """Rotate each column so its first non-negligible entry is real positive."""
    v = np.array(v, dtype=complex, copy=True)
    if v.ndim == 1:
        return fix_phase(v[:, None], thresh)[:, 0]
    for j in range(v.shape[1]):
        col = v[:, j]
        scale = np.max(np.abs(col)) if col.size else 0.0
        if scale == 0:
            continue
        idx = np.flatnonzero(np.abs(col) > thresh * max(scale, 1.0))
        # fall back to the largest entry if every entry is tiny
        i = idx[0] if idx.size else int(np.argmax(np.abs(col)))
        v[:, j] = col * (abs(col[i]) / col[i])
    return v


def _rank(s: np.ndarray, shape: tuple[int, int], tol: Tolerance,
          scale: float | None = None) -> int:
    """Rank rule; ``scale`` is a floor for the reference singular value, so a
    matrix that is zero up to rounding relative to ``scale`` has rank 0."""
    if s.size == 0 or s[0] == 0:
        return 0
    ref = s[0] if scale is None else max(s[0], scale)
    thresh = tol.rank_rel_tol * ref * max(shape)
    return int(np.sum(s > thresh))


def _canonical_frame(u: np.ndarray) -> np.ndarray:
    """Canonical orthonormal frame for range(u), u having orthonormal columns.

    Gram-Schmidt on the columns of the projector ``u u*`` in index order,
    accepting a column when its residual diagonal entry is at least
    ``1/(4n)``.  A trace argument shows one pass always collects a full frame,
    and the result depends only on the subspace.
    """
    n, r = u.shape
    if r == 0:
        return np.zeros((n, 0), dtype=complex)
    if r == n:
        return np.eye(n, dtype=complex)
    q = np.zeros((n, r), dtype=complex)
    k = 0
    # residual projector P' = P - Q Q*, tracked through its factor u
    for i in range(n):
        if k == r:
            break
        col = u @ u[i].conj()  # P e_i
        for _ in range(2):
            col = col - q[:, :k] @ (q[:, :k].conj().T @ col)
        nrm2 = col[i].real  # = <e_i, P' e_i>
        if nrm2 >= 1.0 / (4 * n):
            q[:, k] = col / np.linalg.norm(col)
            k += 1
    if k < r:  # cannot happen in exact arithmetic; keep the SVD frame
        return fix_phase(u)
    # one more orthogonalisation pass against u for stability
    q = u @ (u.conj().T @ q)
    qq, _ = np.linalg.qr(q)
    # QR may flip phases; restore by matching the Gram-Schmidt columns
    ph = np.sum(qq.conj() * q, axis=0)
    ph = np.where(np.abs(ph) > 0, ph / np.abs(ph), 1.0)
    return qq * ph


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of C^n stored by an orthonormal frame (n x d)."""

    ambient_dim: int
    frame: np.ndarray = field(repr=False)

    def __post_init__(self):
        f = np.asarray(self.frame, dtype=complex).reshape(self.ambient_dim, -1)
        object.__setattr__(self, "frame", f)
        f.setflags(write=False)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, np.zeros((n, 0), dtype=complex))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, np.eye(n, dtype=complex))

    @classmethod
    def span(cls, vectors, tol: Tolerance = DEFAULT_TOL) -> "Subspace":
        """Span of the columns of ``vectors``."""
        return orthonormal_range(vectors, tol)

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        idx = sorted(set(indices))
        return cls(n, np.eye(n, dtype=complex)[:, idx])

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    def residual(self, vectors) -> float:
        """Norm of the part of ``vectors`` outside this subspace."""
        v = as_matrix(vectors)
        if v.size == 0:
            return 0.0
        return float(np.linalg.norm(v - self.frame @ (self.frame.conj().T @ v), 2))

    def contains(self, other, tol: Tolerance = DEFAULT_TOL) -> bool:
        v = other.frame if isinstance(other, Subspace) else other
        return self.residual(v) < tol.eq_tol * max(1.0, np.linalg.norm(as_matrix(v), 2))

    def distance(self, other: "Subspace") -> float:
        return projection_distance(self, other)

    def equals(self, other: "Subspace", tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.ambient_dim == other.ambient_dim and self.distance(other) < tol.eq_tol

    def complement(self, tol: Tolerance = DEFAULT_TOL) -> "Subspace":
        return subspace_complement_within(Subspace.full(self.ambient_dim), self, tol)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def projection_distance(a: Subspace, b: Subspace) -> float:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimensions differ")
    return float(np.linalg.norm(a.projector - b.projector, 2)) if a.ambient_dim else 0.0


def range_frame(m, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
    """Orthonormal columns spanning range(m), straight from the SVD (not canonical)."""
    m = as_matrix(m)
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    return u[:, :_rank(s, m.shape, tol, scale)]


def orthonormal_range(m, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> Subspace:
    """Orthonormal basis of the column space of ``m``.

    Pass ``scale`` when the columns have a known natural size (for instance
    images of unit vectors) so that rounding-level columns are discarded.
    """
    m = as_matrix(m)
    n = m.shape[0]
    if m.size == 0:
        return Subspace.zero(n)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = _rank(s, m.shape, tol, scale)
    return Subspace(n, _canonical_frame(u[:, :r]))


def null_space(m, tol: Tolerance = DEFAULT_TOL, scale: float | None = 1.0) -> np.ndarray:
    """Orthonormal basis (as columns) of the kernel of ``m``.

    Constraint matrices in this package are built from O(1) data, hence the
    default unit ``scale``.
    """
    m = as_matrix(m)
    rows, cols = m.shape
    if rows == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    r = _rank(s, m.shape, tol, scale)
    return fix_phase(vh[r:].conj().T)


def subspace_intersect(a: Subspace, b: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")
    n = a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(n)
    if b.dim > a.dim:
        a, b = b, a
    # x = F_b y lies in a iff (I - P_a) F_b y = 0; the singular values of
    # (I - P_a) F_b are the sines of the principal angles, so near-parallel
    # directions are merged only when they agree to working precision
    fa, fb = a.frame, b.frame
    m = fb - fa @ (fa.conj().T @ fb)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    thresh = tol.rank_rel_tol * max(n, b.dim)
    k = int(np.sum(s > thresh))
    return orthonormal_range(fb @ vh[k:].conj().T, tol, scale=1.0)


def subspace_sum(parts: Sequence[Subspace], tol: Tolerance = DEFAULT_TOL) -> Subspace:
    if not parts:
        raise ValueError("need at least one subspace")
    n = parts[0].ambient_dim
    return orthonormal_range(np.hstack([np.zeros((n, 0))] + [p.frame for p in parts]), tol)


def subspace_complement_within(whole: Subspace, part: Subspace,
                               tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Frame of ``whole ⊖ part``."""
    if whole.ambient_dim != part.ambient_dim:
        raise ValueError("dimension mismatch")
    if not whole.contains(part, Tolerance(eq_tol=max(tol.eq_tol, 1e-8))):
        raise ValueError(f"part is not contained in whole (residual {whole.residual(part.frame):.3e})")
    if part.dim == 0:
        return whole
    # whole ⊖ part = whole.frame @ ker(part* whole)
    k = null_space(part.frame.conj().T @ whole.frame, tol)
    return orthonormal_range(whole.frame @ k, tol, scale=1.0)


def _hermitian_check(m: np.ndarray, tol: Tolerance) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    err = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if err > tol.eq_tol * scale:
        raise ValueError(f"matrix is not Hermitian (residual {err:.3e})")
    return (m + m.conj().T) / 2


def is_psd(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    h = _hermitian_check(m, tol)
    if h.size == 0:
        return True
    return bool(np.linalg.eigvalsh(h)[0] >= -tol.psd_tol)


def min_eigenvalue(m, tol: Tolerance = DEFAULT_TOL) -> float:
    h = _hermitian_check(m, tol)
    return float(np.linalg.eigvalsh(h)[0]) if h.size else 0.0


def psd_sqrt(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    h = _hermitian_check(m, tol)
    if h.size == 0:
        return h
    w, v = np.linalg.eigh(h)
    if w[0] < -tol.psd_tol:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    # rounding-level eigenvalues would turn into ~sqrt(eps) ghosts
    floor = tol.rank_rel_tol * max(1.0, float(np.max(np.abs(w)))) * h.shape[0]
    w = np.where(w > floor, w, 0.0)
    r = (v * np.sqrt(w)) @ v.conj().T
    return (r + r.conj().T) / 2


def operator_norm(m) -> float:
    m = as_matrix(m)
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def kron(a, b) -> np.ndarray:
    """Kronecker product; index of a⊗b is ``i_a * dim_b + i_b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def linear_map_matrix(f: Callable[[np.ndarray], np.ndarray], shape: tuple[int, int]) -> np.ndarray:
    """Matrix of a linear map on ``shape``-matrices in row-major vec coordinates."""
    r, c = shape
    cols = []
    for idx in range(r * c):
        e = np.zeros(r * c, dtype=complex)
        e[idx] = 1.0
        cols.append(as_matrix(f(e.reshape(r, c))).ravel())
    return np.array(cols).T if cols else np.zeros((0, 0), complex)


def solve_linear_space(constraints: Sequence[Callable[[np.ndarray], np.ndarray] | np.ndarray],
                       dim: int, cols: int | None = None,
                       tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Hilbert-Schmidt orthonormal basis of ``{X : L(X) = 0 for all L}``.

    Each constraint is either a callable linear map on ``dim x cols`` matrices
    or an already-assembled matrix acting on the row-major vectorisation.
    """
    cols = dim if cols is None else cols
    shape = (dim, cols)
    blocks = []
    for c in constraints:
        mat = c if isinstance(c, np.ndarray) else linear_map_matrix(c, shape)
        blocks.append(as_matrix(mat).reshape(-1, dim * cols))
    if not blocks:
        basis = np.eye(dim * cols, dtype=complex)
    else:
        basis = null_space(np.vstack(blocks), tol)
    return [basis[:, j].reshape(shape) for j in range(basis.shape[1])]
