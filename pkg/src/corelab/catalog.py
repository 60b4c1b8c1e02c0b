"""Reference representations used as fixtures.

The shipped JSON files under ``corelab/fixtures`` are serialisations of the
objects built here (see ``tools/build_fixtures.py``).
"""
from __future__ import annotations

import numpy as np

from .graphs import DirectedGraph, cycle_graph, single_vertex_graph
from .kgraphs import ThetaKGraph
from .reps import GraphRep, KGraphRep

__all__ = [
    "atomic_flip",
    "not_partially_iso",
    "not_doubly_commuting",
    "fc_algebra_generators",
    "loops",
    "three_cycle",
    "cycle_theta",
]

R2 = 1 / np.sqrt(2)


def cycle_theta(*cycles) -> dict:
    """Permutation from cycles of 0-based (l, m) pairs."""
    perm = {}
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            perm[tuple(a)] = tuple(b)
    return perm


def _pi(images: dict[int, int], n: int = 4) -> np.ndarray:
    """Partial permutation matrix sending basis vector j to images[j] (0-based)."""
    m = np.zeros((n, n))
    for j, i in images.items():
        m[i, j] = 1.0
    return m


def atomic_flip() -> KGraphRep:
    """Four-dimensional atomic rep with theta the transposition of (1,1) and (2,2)."""
    g = ThetaKGraph(2, (2, 2), {(0, 1): cycle_theta([(0, 0), (1, 1)])})
    a1 = _pi({0: 1, 2: 3})
    a2 = _pi({1: 0, 3: 2})
    b1 = _pi({1: 2, 3: 0})
    b2 = _pi({0: 3, 2: 1})
    return KGraphRep(g, 4, ((a1, a2), (b1, b2)))


def not_partially_iso(order: str = "v_major") -> KGraphRep:
    """Rank-2 rep on V ⊗ W^(2) (V = W = C^2) built from two defect-free rows.

    ``order="v_major"`` indexes ``C^8`` by ``v * 4 + w``; ``"w_major"`` puts
    the W^(2) index first.
    """
    a = [np.array([[1, 0], [0, R2]]), np.array([[0, 0], [0.5, 0.5]])]
    b = [np.array([[0, 1], [1, 0]]), np.zeros((2, 2))]
    return block_rep(a, b, order)


def block_rep(a, b, order: str = "v_major") -> KGraphRep:
    """``A_l = a_l ⊗ J`` and ``B_1 = I ⊗ (b_1 ⊕ b_2)``, ``B_2 = I ⊗ (b_2 ⊕ b_1)``.

    ``J`` swaps the two copies of W.  With theta(l, m) = (l, m') this is a
    doubly commuting rep; it is fully coisometric when both rows are.
    """
    p, q = a[0].shape[0], b[0].shape[0]
    z = np.zeros((q, q))
    J = np.block([[z, np.eye(q)], [np.eye(q), z]])
    D = [np.block([[b[0], z], [z, b[1]]]), np.block([[b[1], z], [z, b[0]]])]
    if order == "v_major":
        A = tuple(np.kron(x, J) for x in a)
        B = tuple(np.kron(np.eye(p), y) for y in D)
    elif order == "w_major":
        A = tuple(np.kron(J, x) for x in a)
        B = tuple(np.kron(y, np.eye(p)) for y in D)
    else:
        raise ValueError(f"unknown order {order!r}")
    theta = {(0, 0): (0, 1), (0, 1): (0, 0), (1, 0): (1, 1), (1, 1): (1, 0)}
    g = ThetaKGraph(2, (2, 2), {(0, 1): theta})
    return KGraphRep(g, 2 * p * q, (A, B))


def not_doubly_commuting() -> KGraphRep:
    """Fully coisometric rep on C^3 with m = (2, 3) that is not doubly commuting."""
    theta = cycle_theta([(0, 0), (1, 2), (0, 1), (0, 2)])
    g = ThetaKGraph(2, (2, 3), {(0, 1): theta})
    h = 0.5
    A1 = np.array([[0, 0, 0], [0, 0, 0], [h, h, 0]])
    A2 = np.diag([1, 1, R2])
    B1 = np.array([[h, h, 0], [h, h, 0], [0, 0, 0]])
    B2 = np.array([[h, h, 0], [-h, -h, 0], [0, 0, R2]])
    B3 = np.array([[0, 0, 0], [0, 0, 0], [h, h, 0]])
    return KGraphRep(g, 3, ((A1, A2), (B1, B2, B3)))


def fc_algebra_generators() -> list[np.ndarray]:
    """Generators of the algebra {[[λ, 0], [γ - λ, γ]]}."""
    return [np.array([[1.0, 0], [-1, 0]]), np.array([[0.0, 0], [1, 1]])]


def loops(n: int) -> GraphRep:
    """Single vertex, n loops, each acting as ``n^{-1/2}`` on C."""
    return GraphRep(single_vertex_graph(n), 1, (np.eye(1),),
                    tuple(np.full((1, 1), 1 / np.sqrt(n)) for _ in range(n)))


def three_cycle() -> GraphRep:
    """Unitary rep of the directed 3-cycle on C^3, vertex v ↦ e_v."""
    g = cycle_graph(3)
    eye = np.eye(3)
    sigma = tuple(np.outer(eye[v], eye[v]) for v in range(3))
    A = tuple(np.outer(eye[(i + 1) % 3], eye[i]) for i in range(3))
    return GraphRep(g, 3, sigma, A)
