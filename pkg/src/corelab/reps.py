"""Matrix representations of graph correspondences and single-vertex k-graphs.

Conventions
-----------
* ``E(n) ⊗ H`` is indexed by ``word_index * dim + h`` with words taken from
  :func:`corelab.kgraphs.words_of_degree`.
* For a graph rep the row operator is ``[A(e) σ(s(e))]_e`` as a
  ``dim x (|E| dim)`` matrix, so ``E ⊗ H`` is embedded in ``C^{|E| dim}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence

import numpy as np

from .graphs import DirectedGraph, single_vertex_graph
from .kgraphs import ThetaKGraph, normal_form, words_of_degree
from .numerics import DEFAULT_TOL, Tolerance, as_matrix, is_psd, min_eigenvalue, operator_norm

__all__ = [
    "RepresentationError",
    "GraphRep",
    "KGraphRep",
    "row_operator",
    "is_completely_contractive",
    "is_isometric",
    "is_fully_coisometric",
    "a_tilde_n",
    "is_doubly_commuting",
    "doubly_commuting_residual",
    "defect_operator",
    "satisfies_popescu",
    "regular_dilation_condition",
    "product_rep",
    "POPESCU_GRID",
]

POPESCU_GRID = (0.5, 0.8, 0.9, 0.95, 0.99)


class RepresentationError(ValueError):
    """Matrix data violates a representation invariant."""


def _max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def _square(m, dim: int, name: str) -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape != (dim, dim):
        raise RepresentationError(f"{name} has shape {a.shape}, expected ({dim}, {dim})")
    a = a.copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GraphRep:
    """Covariant pair (A, σ) for the correspondence of a directed graph."""

    graph: DirectedGraph
    dim: int
    sigma: tuple[np.ndarray, ...]
    A: tuple[np.ndarray, ...]
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        g, d = self.graph, self.dim
        if len(self.sigma) != g.vertex_count:
            raise RepresentationError(f"need {g.vertex_count} vertex projections, got {len(self.sigma)}")
        if len(self.A) != g.edge_count:
            raise RepresentationError(f"need {g.edge_count} edge matrices, got {len(self.A)}")
        sig = tuple(_square(p, d, f"sigma[{v + 1}]") for v, p in enumerate(self.sigma))
        A = tuple(_square(a, d, f"A[{e + 1}]") for e, a in enumerate(self.A))
        object.__setattr__(self, "sigma", sig)
        object.__setattr__(self, "A", A)
        eq = self.tol.eq_tol * 10
        for v, p in enumerate(sig):
            r = max(_max_abs(p - p.conj().T), _max_abs(p @ p - p))
            if r > eq:
                raise RepresentationError(f"sigma[{v + 1}] is not an orthogonal projection (residual {r:.3e})")
        total = sum(sig, np.zeros((d, d), complex))
        r = _max_abs(total - np.eye(d))
        if r > eq:
            raise RepresentationError(f"vertex projections do not sum to I (residual {r:.3e})")
        for e, a in enumerate(A):
            s, t = g.edges[e]
            r = _max_abs(sig[t] @ a @ sig[s] - a)
            if r > eq:
                raise RepresentationError(
                    f"A[{e + 1}] violates covariance sigma(r)A sigma(s) = A (residual {r:.3e})")

    @classmethod
    def single_vertex(cls, matrices: Sequence, tol: Tolerance = DEFAULT_TOL) -> "GraphRep":
        mats = [as_matrix(a) for a in matrices]
        if not mats:
            raise RepresentationError("need at least one matrix to fix the dimension")
        d = mats[0].shape[0]
        return cls(single_vertex_graph(len(mats)), d, (np.eye(d),), tuple(mats), tol)

    @property
    def kind(self) -> str:
        return "graph"

    def generators(self) -> list[np.ndarray]:
        return list(self.A) + list(self.sigma)

    def sigma_projections(self) -> list[np.ndarray]:
        return list(self.sigma)

    def rows(self) -> list[list[np.ndarray]]:
        return [[a @ self.sigma[self.graph.source(e)] for e, a in enumerate(self.A)]]

    def conjugate(self, u: np.ndarray, v: np.ndarray | None = None) -> "GraphRep":
        """The rep ``u X v`` (``v`` defaults to ``u*``); u square unitary or isometric frame."""
        v = u.conj().T if v is None else v
        return GraphRep(self.graph, u.shape[0], tuple(u @ p @ v for p in self.sigma),
                        tuple(u @ a @ v for a in self.A), self.tol)

    def compress(self, frame: np.ndarray) -> "GraphRep":
        """Compression ``F* X F`` to the range of an orthonormal frame."""
        f = as_matrix(frame)
        return GraphRep(self.graph, f.shape[1], tuple(f.conj().T @ p @ f for p in self.sigma),
                        tuple(f.conj().T @ a @ f for a in self.A), self.tol)

    def direct_sum(self, other: "GraphRep") -> "GraphRep":
        if other.graph != self.graph:
            raise RepresentationError("direct sum needs the same graph")
        bd = lambda x, y: np.block([[x, np.zeros((x.shape[0], y.shape[1]))],
                                    [np.zeros((y.shape[0], x.shape[1])), y]])
        return GraphRep(self.graph, self.dim + other.dim,
                        tuple(bd(x, y) for x, y in zip(self.sigma, other.sigma)),
                        tuple(bd(x, y) for x, y in zip(self.A, other.A)), self.tol)


@dataclass(frozen=True, eq=False)
class KGraphRep:
    """Rows ``A^(i) = [A^(i)_0, ..]`` satisfying the theta commutation relations."""

    kgraph: ThetaKGraph
    dim: int
    rows_: tuple[tuple[np.ndarray, ...], ...]
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        g, d = self.kgraph, self.dim
        if len(self.rows_) != g.k:
            raise RepresentationError(f"need {g.k} rows, got {len(self.rows_)}")
        rows = []
        for i, row in enumerate(self.rows_):
            if len(row) != g.m[i]:
                raise RepresentationError(f"row {i + 1} needs {g.m[i]} matrices, got {len(row)}")
            rows.append(tuple(_square(a, d, f"A^({i + 1})[{l + 1}]") for l, a in enumerate(row)))
        object.__setattr__(self, "rows_", tuple(rows))
        r, where = self.commutation_residual()
        if r > 10 * self.tol.eq_tol * max(1.0, self._scale()):
            raise RepresentationError(f"commutation relation fails at {where} (residual {r:.3e})")

    def _scale(self) -> float:
        return max((operator_norm(a) for row in self.rows_ for a in row), default=1.0) ** 2

    def commutation_residual(self) -> tuple[float, str]:
        worst, where = 0.0, ""
        g = self.kgraph
        for (i, j), perm in g.theta.items():
            for (l, m), (lp, mp) in perm.items():
                r = _max_abs(self.rows_[i][l] @ self.rows_[j][m] - self.rows_[j][mp] @ self.rows_[i][lp])
                if r > worst:
                    worst = r
                    where = (f"A^({i + 1})_{l + 1} A^({j + 1})_{m + 1} = "
                             f"A^({j + 1})_{mp + 1} A^({i + 1})_{lp + 1}")
        return worst, where

    @property
    def kind(self) -> str:
        return "single_vertex_kgraph"

    def generators(self) -> list[np.ndarray]:
        return [a for row in self.rows_ for a in row]

    def sigma_projections(self) -> list[np.ndarray]:
        return [np.eye(self.dim, dtype=complex)]

    def rows(self) -> list[list[np.ndarray]]:
        return [list(r) for r in self.rows_]

    def word_matrix(self, word) -> np.ndarray:
        out = np.eye(self.dim, dtype=complex)
        for c, l in word:
            out = out @ self.rows_[c][l]
        return out

    def conjugate(self, u: np.ndarray, v: np.ndarray | None = None) -> "KGraphRep":
        v = u.conj().T if v is None else v
        return KGraphRep(self.kgraph, u.shape[0],
                         tuple(tuple(u @ a @ v for a in row) for row in self.rows_), self.tol)

    def compress(self, frame: np.ndarray) -> "KGraphRep":
        f = as_matrix(frame)
        return KGraphRep(self.kgraph, f.shape[1],
                         tuple(tuple(f.conj().T @ a @ f for a in row) for row in self.rows_), self.tol)

    def direct_sum(self, other: "KGraphRep") -> "KGraphRep":
        bd = lambda x, y: np.block([[x, np.zeros((x.shape[0], y.shape[1]))],
                                    [np.zeros((y.shape[0], x.shape[1])), y]])
        return KGraphRep(self.kgraph, self.dim + other.dim,
                         tuple(tuple(bd(x, y) for x, y in zip(r1, r2))
                               for r1, r2 in zip(self.rows_, other.rows_)), self.tol)


Rep = GraphRep | KGraphRep


def _colors(rep: Rep, color: int | None) -> list[int]:
    n = len(rep.rows())
    if color is None:
        return list(range(n))
    if not 0 <= color < n:
        raise ValueError(f"invalid color {color + 1}; rep has {n} colors")
    return [color]


def row_operator(rep: Rep, color: int | None = None) -> np.ndarray:
    """Block row ``[A_1 .. A_m]`` of one color (0-based)."""
    if isinstance(rep, KGraphRep) and color is None:
        if rep.kgraph.k != 1:
            raise ValueError("color is required for k-graph reps with k > 1")
        color = 0
    (c,) = _colors(rep, color if color is not None else 0)
    row = rep.rows()[c]
    if not row:
        return np.zeros((rep.dim, 0), dtype=complex)
    return np.hstack(row)


def is_completely_contractive(rep: Rep, tol: Tolerance = DEFAULT_TOL) -> bool:
    return all(operator_norm(row_operator(rep, c)) <= 1 + tol.eq_tol for c in _colors(rep, None))


def is_isometric(rep: Rep, tol: Tolerance = DEFAULT_TOL) -> bool:
    eq = 10 * tol.eq_tol
    if isinstance(rep, GraphRep):
        if rep.graph.edge_count == 0:
            return True
        for e, f in product(range(rep.graph.edge_count), repeat=2):
            want = rep.sigma[rep.graph.source(e)] if e == f else 0
            if _max_abs(rep.A[e].conj().T @ rep.A[f] - want) > eq:
                return False
        return True
    eye = np.eye(rep.dim)
    for row in rep.rows():
        for l, m in product(range(len(row)), repeat=2):
            if _max_abs(row[l].conj().T @ row[m] - (eye if l == m else 0)) > eq:
                return False
    return True


def coisometry_residual(rep: Rep) -> float:
    eye = np.eye(rep.dim)
    return max(_max_abs(r @ r.conj().T - eye)
               for r in (row_operator(rep, c) for c in _colors(rep, None)))


def is_fully_coisometric(rep: Rep, tol: Tolerance = DEFAULT_TOL) -> bool:
    return coisometry_residual(rep) <= 10 * tol.eq_tol


def a_tilde_n(rep: KGraphRep, n: Sequence[int]) -> np.ndarray:
    """Block row over ``words_of_degree(n)``; block w is the product of its letters."""
    words = words_of_degree(rep.kgraph, n)
    return np.hstack([rep.word_matrix(w) for w in words])


def _t_matrix(g: ThetaKGraph, i: int, j: int) -> np.ndarray:
    """Permutation E_i ⊗ E_j -> E_j ⊗ E_i induced by theta_ij."""
    mi, mj = g.m[i], g.m[j]
    t = np.zeros((mj * mi, mi * mj))
    for (l, m), (lp, mp) in g.theta[(i, j)].items():
        t[mp * mi + lp, l * mj + m] = 1.0
    return t


def doubly_commuting_residual(rep: KGraphRep) -> float:
    g, d = rep.kgraph, rep.dim
    worst = 0.0
    for i, j in combinations(range(g.k), 2):
        ai, aj = row_operator(rep, i), row_operator(rep, j)
        lhs = aj.conj().T @ ai
        rhs = (np.kron(np.eye(g.m[j]), ai) @ np.kron(_t_matrix(g, i, j), np.eye(d))
               @ np.kron(np.eye(g.m[i]), aj.conj().T))
        worst = max(worst, _max_abs(lhs - rhs))
    return worst


def is_doubly_commuting(rep: KGraphRep, tol: Tolerance = DEFAULT_TOL) -> bool:
    return doubly_commuting_residual(rep) <= 10 * tol.eq_tol


def defect_operator(rep: KGraphRep, s: float) -> np.ndarray:
    r"""``Δ_s = Σ_{0 ≤ n ≤ (1..1)} (-s²)^{|n|} Ã_n Ã_n*``."""
    if not 0 < s < 1:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    k = rep.kgraph.k
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for n in product((0, 1), repeat=k):
        a = a_tilde_n(rep, n)
        out += (-s * s) ** sum(n) * (a @ a.conj().T)
    return (out + out.conj().T) / 2


def satisfies_popescu(rep: KGraphRep, grid: Sequence[float] = POPESCU_GRID,
                      tol: Tolerance = DEFAULT_TOL) -> tuple[bool, dict[float, bool]]:
    """Sampled Popescu condition: Δ_s ≥ 0 on the grid points above the last failure."""
    grid = sorted(float(s) for s in grid)
    if not grid:
        raise ValueError("empty grid")
    verdicts = {s: is_psd(defect_operator(rep, s), tol) for s in grid}
    failing = [s for s in grid if not verdicts[s]]
    above = [s for s in grid if not failing or s > failing[-1]]
    return bool(above), verdicts


def _product_permutation(g: ThetaKGraph, first: Sequence[int], second: Sequence[int]) -> np.ndarray:
    """Matrix of E(first) ⊗ E(second) -> E(first + second), (μ, ν) ↦ μν."""
    wa, wb = words_of_degree(g, first), words_of_degree(g, second)
    total = tuple(a + b for a, b in zip(first, second))
    index = {w: i for i, w in enumerate(words_of_degree(g, total))}
    p = np.zeros((len(index), len(wa) * len(wb)))
    for ia, mu in enumerate(wa):
        for ib, nu in enumerate(wb):
            p[index[normal_form(g, mu + nu)], ia * len(wb) + ib] = 1.0
    return p


def regular_dilation_condition(rep: KGraphRep, tol: Tolerance = DEFAULT_TOL
                               ) -> dict[frozenset[int], tuple[bool, float]]:
    """For each color subset v: PSD verdict and min eigenvalue of
    ``Σ_{u ⊆ v} (-1)^{|u|} I_{E(e(v) - e(u))} ⊗ Ã_{e(u)}* Ã_{e(u)}``.

    The term for u lives on ``E(e(v)-e(u)) ⊗ E(e(u)) ⊗ H`` and is carried to
    ``E(e(v)) ⊗ H`` by the product map of the semigroup.
    """
    g, d = rep.kgraph, rep.dim
    out = {}
    for size in range(g.k + 1):
        for v in combinations(range(g.k), size):
            ev = tuple(1 if c in v else 0 for c in range(g.k))
            n_v = len(words_of_degree(g, ev))
            total = np.zeros((n_v * d, n_v * d), dtype=complex)
            for usize in range(len(v) + 1):
                for u in combinations(v, usize):
                    eu = tuple(1 if c in u else 0 for c in range(g.k))
                    rest = tuple(a - b for a, b in zip(ev, eu))
                    a = a_tilde_n(rep, eu)
                    n_rest = len(words_of_degree(g, rest))
                    term = np.kron(np.eye(n_rest), a.conj().T @ a)
                    p = np.kron(_product_permutation(g, rest, eu), np.eye(d))
                    total += (-1) ** usize * (p @ term @ p.T)
            total = (total + total.conj().T) / 2
            lam = min_eigenvalue(total, tol)
            out[frozenset(v)] = (bool(lam >= -tol.psd_tol), lam)
    return out


def product_rep(rep: KGraphRep, n: Sequence[int]) -> GraphRep:
    """Single-vertex graph rep with one loop per word of degree n."""
    words = words_of_degree(rep.kgraph, n)
    return GraphRep(single_vertex_graph(len(words)), rep.dim, (np.eye(rep.dim),),
                    tuple(rep.word_matrix(w) for w in words), rep.tol)
