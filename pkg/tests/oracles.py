"""Independent reference computations used by the tests.

Deliberately naive: plain numpy rank decisions with a fixed absolute cutoff,
no shared code with the library's subspace machinery.
"""
from itertools import combinations

import numpy as np

CUT = 1e-8


def _basis(cols: np.ndarray) -> np.ndarray:
    if cols.size == 0:
        return cols.reshape(cols.shape[0], 0)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    return u[:, : int(np.sum(s > CUT))]


def krylov_span(gens, vectors) -> np.ndarray:
    """Orthonormal basis of the smallest gens-invariant subspace containing vectors."""
    cur = _basis(np.asarray(vectors, dtype=complex))
    while True:
        grown = _basis(np.hstack([cur] + [g @ cur for g in gens]))
        if grown.shape[1] == cur.shape[1]:
            return grown
        cur = grown


def algebra_dim(gens, n: int) -> int:
    """Dimension of the unital algebra generated by gens (closure of products)."""
    flat = [np.eye(n, dtype=complex).ravel()]
    basis = _basis(np.array(flat).T)
    while True:
        mats = [basis[:, j].reshape(n, n) for j in range(basis.shape[1])]
        new = np.array([(g @ m).ravel() for g in gens for m in mats] + [m.ravel() for m in mats]).T
        grown = _basis(new)
        if grown.shape[1] == basis.shape[1]:
            return basis.shape[1]
        basis = grown


def is_invariant(gens, frame) -> bool:
    p = frame @ frame.conj().T
    return all(np.linalg.norm(g @ frame - p @ g @ frame) < CUT for g in gens)


def is_cyclic(gens, frame, n: int) -> bool:
    return krylov_span(gens, frame).shape[1] == n


def minimal_coordinate_cyclic_coinvariant(gens, n: int) -> list[tuple[int, ...]]:
    """All inclusion-minimal coordinate subspaces span{e_i : i in S} that are
    invariant under every g* and cyclic for the algebra of gens."""
    adj = [g.conj().T for g in gens]
    eye = np.eye(n)
    good = []
    for size in range(1, n + 1):
        for s in combinations(range(n), size):
            if any(set(t) <= set(s) for t in good):
                continue
            f = eye[:, list(s)]
            if is_invariant(adj, f) and is_cyclic(gens, f, n):
                good.append(s)
    return good


def projector(frame) -> np.ndarray:
    return frame @ frame.conj().T
