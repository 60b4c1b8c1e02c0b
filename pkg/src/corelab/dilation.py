"""Truncated minimal isometric dilations of graph representations.

The dilation space is ``V ⊕ L_0 ⊕ .. ⊕ L_{N-1}`` where level ``n`` has basis
``p ⊗ w`` with ``p`` a path of length ``n`` (vertices for ``n = 0``) and
``w`` running over a frame of ``W_0^{s(p)}``.  The wandering space ``W_0`` is
the range of the defect ``D = (Q - Ã*Ã)^{1/2}`` inside ``E ⊗ V``, with ``Q``
the projection onto ``E ⊗ V = ⊕_e σ(s(e))V``.

On ``V``: ``S(e) v = A(e) v ⊕ D(e ⊗ v)``; on levels ``S(e)`` prepends ``e``.
The top level is mapped to zero, so the isometry relations hold exactly on
``V ⊕ L_0 ⊕ .. ⊕ L_{N-2}`` (the *interior*).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .graphs import paths_of_length
from .numerics import (DEFAULT_TOL, Subspace, Tolerance, as_matrix, orthonormal_range,
                       psd_sqrt, range_frame)
from .reps import (GraphRep, KGraphRep, RepresentationError, is_completely_contractive,
                   is_fully_coisometric, product_rep, row_operator)

__all__ = [
    "TruncatedDilation",
    "build_dilation",
    "verify_dilation",
    "DilationCheck",
    "wandering_dimension",
    "WanderingReport",
    "pullback_to_V",
    "dilation_coisometry_check",
    "CoisometryReport",
    "word_span",
]


def _max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def _norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


@dataclass(frozen=True, eq=False)
class TruncatedDilation:
    base: GraphRep
    depth: int
    defect: np.ndarray = field(repr=False)
    wandering: Subspace
    wandering_by_vertex: tuple[Subspace, ...]
    # level n: tuple of (path edges, vertex of W_0 component, frame index)
    levels: tuple[tuple[tuple[tuple[int, ...], int, int], ...], ...] = field(repr=False)
    offsets: tuple[int, ...]
    S: tuple[np.ndarray, ...] = field(repr=False)
    rho: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def total_dim(self) -> int:
        return self.offsets[-1]

    @property
    def alpha(self) -> int:
        return self.wandering.dim

    def level_slice(self, n: int) -> slice:
        """Coordinates of level n; ``n = -1`` denotes V."""
        if n == -1:
            return slice(0, self.base.dim)
        return slice(self.offsets[n], self.offsets[n + 1])

    def level_dims(self) -> list[int]:
        return [len(lv) for lv in self.levels]

    def interior_projection(self) -> np.ndarray:
        p = np.zeros(self.total_dim)
        p[: self.offsets[self.depth - 1]] = 1.0  # V and levels 0..N-2
        return np.diag(p)

    def boundary_projection(self) -> np.ndarray:
        return np.eye(self.total_dim) - self.interior_projection()

    def embedding(self) -> np.ndarray:
        """Isometry V -> H onto the first coordinates."""
        return np.eye(self.total_dim, self.base.dim)


def build_dilation(rep: GraphRep, depth: int, tol: Tolerance = DEFAULT_TOL) -> TruncatedDilation:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not is_completely_contractive(rep, tol):
        raise RepresentationError("representation is not completely contractive")
    g, d = rep.graph, rep.dim
    E = g.edge_count
    at = row_operator(rep)
    q = np.zeros((E * d, E * d), dtype=complex)
    for e in range(E):
        blk = slice(e * d, (e + 1) * d)
        q[blk, blk] = rep.sigma[g.source(e)]
    defect_sq = q - at.conj().T @ at
    defect = psd_sqrt(defect_sq, tol)
    # D commutes with the left action; split W_0 by range vertex.  Ranks are
    # read off D² where rounding errors are not amplified by the square root.
    by_vertex = []
    for u in range(g.vertex_count):
        r_u = np.zeros(E * d)
        for e in range(E):
            if g.range(e) == u:
                r_u[e * d:(e + 1) * d] = 1.0
        by_vertex.append(orthonormal_range(defect_sq * r_u[None, :], tol, scale=1.0))
    wandering = orthonormal_range(np.hstack([np.zeros((E * d, 0))] + [w.frame for w in by_vertex]), tol)

    levels = [tuple(((), u, k) for u in range(g.vertex_count) for k in range(by_vertex[u].dim))]
    for n in range(1, depth):
        levels.append(tuple((p.edges, p.source, k) for p in paths_of_length(g, n)
                            for k in range(by_vertex[p.source].dim)))
    offsets = [d]
    for lv in levels:
        offsets.append(offsets[-1] + len(lv))
    total = offsets[-1]
    index = {}
    for n, lv in enumerate(levels):
        for i, key in enumerate(lv):
            index[key] = offsets[n] + i

    S = []
    for e in range(E):
        s = np.zeros((total, total), dtype=complex)
        s[:d, :d] = rep.A[e]
        src = rep.sigma[g.source(e)]
        u = g.range(e)
        col = defect[:, e * d:(e + 1) * d] @ src
        coords = by_vertex[u].frame.conj().T @ col
        for k in range(by_vertex[u].dim):
            s[index[((), u, k)], :d] = coords[k]
        for n in range(depth - 1):
            for (path, w, k) in levels[n]:
                end = path[0] if path else None
                r_p = g.range(end) if path else w
                if r_p == g.source(e):
                    s[index[((e,) + path, w, k)], index[(path, w, k)]] = 1.0
        S.append(s)

    rho = []
    for v in range(g.vertex_count):
        r = np.zeros((total, total), dtype=complex)
        r[:d, :d] = rep.sigma[v]
        for n, lv in enumerate(levels):
            for i, (path, w, _) in enumerate(lv):
                r_p = g.range(path[0]) if path else w
                if r_p == v:
                    r[offsets[n] + i, offsets[n] + i] = 1.0
        rho.append(r)
    return TruncatedDilation(rep, depth, defect, wandering, tuple(by_vertex),
                             tuple(levels), tuple(offsets), tuple(S), tuple(rho))


def word_span(S: Sequence[np.ndarray], start: np.ndarray, max_length: int,
              tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """``span{S(p) x : |p| ≤ max_length, x ∈ range(start)}``."""
    n = start.shape[0]
    cur = range_frame(start, tol, scale=1.0)
    total = cur
    for _ in range(max_length):
        if cur.shape[1] == 0:
            break
        cur = range_frame(np.hstack([np.zeros((n, 0))] + [s @ cur for s in S]), tol, scale=1.0)
        # only the part of the new words outside the current span matters
        fresh = cur - total @ (total.conj().T @ cur)
        total = np.hstack([total, range_frame(fresh, tol, scale=1.0)])
    return orthonormal_range(total, tol, scale=1.0)


@dataclass(frozen=True)
class DilationCheck:
    """Residuals per axiom; a verdict is ``residual < threshold``."""

    residuals: dict
    threshold: float

    @property
    def verdicts(self) -> dict:
        return {k: (v < self.threshold) for k, v in self.residuals.items()}

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())


def verify_dilation(S, rho, base: GraphRep | KGraphRep, v_embed: np.ndarray | None = None,
                    boundary: np.ndarray | None = None, tol: Tolerance = DEFAULT_TOL) -> DilationCheck:
    """Check the dilation axioms for candidate operators on a finite space H.

    ``S``: one matrix per edge (graph base) or one list per color (k-graph
    base, single vertex, ``rho`` may be None).  ``v_embed`` is an isometry
    V -> H (default: first coordinates); ``boundary`` a projection onto the
    declared truncation boundary, excluded from isometry, coisometry and
    minimality checks.
    """
    if isinstance(base, KGraphRep):
        return _verify_kgraph(S, base, v_embed, boundary, tol)
    S = [as_matrix(s) for s in S]
    rho = [as_matrix(r) for r in rho]
    g, d = base.graph, base.dim
    if len(S) != g.edge_count or len(rho) != g.vertex_count:
        raise ValueError("need one operator per edge and one projection per vertex")
    h = S[0].shape[0] if S else rho[0].shape[0]
    for m in S + rho:
        if m.shape != (h, h):
            raise ValueError(f"candidate operators must all be {h}x{h}")
    f = np.eye(h, d) if v_embed is None else as_matrix(v_embed)
    if f.shape != (h, d):
        raise ValueError(f"v_embed must be {h}x{d}")
    pv = f @ f.conj().T
    eye = np.eye(h)
    interior = eye if boundary is None else eye - as_matrix(boundary)
    res = {}
    res["rho_representation"] = max(
        max(_max_abs(r @ r - r), _max_abs(r - r.conj().T)) for r in rho)
    res["rho_representation"] = max(res["rho_representation"], _max_abs(sum(rho) - eye))
    res["axiom1_V_reduces_rho"] = max(
        max(_max_abs(r @ pv - pv @ r), _max_abs(f.conj().T @ r @ f - s))
        for r, s in zip(rho, base.sigma))
    res["axiom2_Vperp_invariant"] = max((_max_abs(pv @ s @ (eye - pv)) for s in S), default=0.0)
    res["axiom3_compression"] = max((_max_abs(f.conj().T @ s @ f - a) for s, a in zip(S, base.A)),
                                    default=0.0)
    res["covariance"] = max((_max_abs(rho[g.range(e)] @ s @ rho[g.source(e)] - s)
                             for e, s in enumerate(S)), default=0.0)
    iso = 0.0
    for e, fe in product(range(len(S)), repeat=2):
        want = rho[g.source(e)] if e == fe else 0.0
        iso = max(iso, _max_abs((S[e].conj().T @ S[fe] - want) @ interior))
    res["isometric"] = iso
    res["fully_coisometric"] = _max_abs(interior @ (sum((s @ s.conj().T for s in S), np.zeros((h, h))) - eye)
                                        @ interior)
    span = word_span(S, f, h, tol)
    res["minimal"] = _norm((eye - span.projector) @ interior)
    return DilationCheck(res, 10 * tol.eq_tol)


def _verify_kgraph(S, base: KGraphRep, v_embed, boundary, tol) -> DilationCheck:
    g = base.kgraph
    if len(S) != g.k:
        raise ValueError(f"need {g.k} rows of candidate operators")
    rows = [[as_matrix(s) for s in row] for row in S]
    h = rows[0][0].shape[0]
    rho = [np.eye(h)]
    res = {}
    for c in range(g.k):
        e_c = tuple(1 if i == c else 0 for i in range(g.k))
        sub = verify_dilation(rows[c], rho, product_rep(base, e_c), v_embed, boundary, tol)
        for key, val in sub.residuals.items():
            if key == "minimal":
                continue
            res[f"color{c + 1}_{key}"] = val
    comm = 0.0
    for (i, j), perm in g.theta.items():
        for (l, m), (lp, mp) in perm.items():
            comm = max(comm, _max_abs(rows[i][l] @ rows[j][m] - rows[j][mp] @ rows[i][lp]))
    res["commutation"] = comm
    cand = KGraphRep(g, h, tuple(tuple(r) for r in rows), Tolerance(eq_tol=max(1.0, comm + 1)))
    from .reps import doubly_commuting_residual
    res["doubly_commuting"] = doubly_commuting_residual(cand)
    f = np.eye(h, base.dim) if v_embed is None else as_matrix(v_embed)
    eye = np.eye(h)
    interior = eye if boundary is None else eye - as_matrix(boundary)
    span = word_span([s for row in rows for s in row], f, h, tol)
    res["minimal"] = _norm((eye - span.projector) @ interior)
    return DilationCheck(res, 10 * tol.eq_tol)


@dataclass(frozen=True)
class WanderingReport:
    alpha: int                         # rank of the defect of the rep on V
    alpha_vhat: int | None = None      # same for the compression to V̂
    blocks: tuple[tuple[int, int, int], ...] = ()   # (d_h, m_h, alpha_h)

    @property
    def block_sum(self) -> int | None:
        return sum(m * a for _, m, a in self.blocks) if self.blocks else None


def _defect_rank(rep: GraphRep, tol: Tolerance) -> int:
    g, d = rep.graph, rep.dim
    E = g.edge_count
    at = row_operator(rep)
    q = np.zeros((E * d, E * d), dtype=complex)
    for e in range(E):
        q[e * d:(e + 1) * d, e * d:(e + 1) * d] = rep.sigma[g.source(e)]
    return orthonormal_range(q - at.conj().T @ at, tol, scale=1.0).dim


def wandering_dimension(rep: GraphRep, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> WanderingReport:
    """α = rank(I - Ã*Ã), and per-block α_h on the compression to V̂ when the
    rep is fully coisometric."""
    alpha = _defect_rank(rep, tol)
    if not is_fully_coisometric(rep, tol):
        return WanderingReport(alpha)
    from .structure import block_decomposition, minimal_cyclic_coinvariant, rep_algebra
    vhat = minimal_cyclic_coinvariant(rep_algebra(rep, tol), tol, seed)
    small = rep.compress(vhat.frame)
    dec = block_decomposition(rep_algebra(small, tol), tol, seed)
    blocks = []
    for b in dec.blocks:
        piece = small.compress(b.representative.frame)
        blocks.append((b.d, b.m, _defect_rank(piece, tol)))
    return WanderingReport(alpha, _defect_rank(small, tol), tuple(blocks))


def pullback_to_V(dil: TruncatedDilation, vectors, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Span of the V-components of ``S(p)* x`` over all paths p (including the
    empty path) up to the truncation depth."""
    x = as_matrix(vectors)
    d, n = dil.base.dim, dil.total_dim
    if x.shape[0] != n:
        raise ValueError(f"vectors must have {n} rows")
    cur = orthonormal_range(x, tol, scale=max(1.0, _norm(x)))
    collected = [cur.frame[:d]]
    for _ in range(dil.depth + 1):
        if cur.dim == 0:
            break
        cur = orthonormal_range(np.hstack([np.zeros((n, 0))] + [s.conj().T @ cur.frame for s in dil.S]),
                                tol, scale=1.0)
        collected.append(cur.frame[:d])
    return orthonormal_range(np.hstack(collected), tol, scale=1.0)


@dataclass(frozen=True)
class CoisometryReport:
    level_residuals: tuple[float, ...]   # V first, then levels 0..N-2
    interior_residual: float
    fully_coisometric: bool
    base_fully_coisometric: bool

    @property
    def consistent(self) -> bool:
        return self.fully_coisometric == self.base_fully_coisometric


def dilation_coisometry_check(dil: TruncatedDilation, tol: Tolerance = DEFAULT_TOL) -> CoisometryReport:
    n = dil.total_dim
    m = sum((s @ s.conj().T for s in dil.S), np.zeros((n, n), complex)) - np.eye(n)
    k = dil.offsets[dil.depth - 1]      # interior = first k coordinates
    inner = m[:k, :k]
    res = [_max_abs(inner[dil.level_slice(lv)]) for lv in range(-1, dil.depth - 1)]
    total = _max_abs(inner)
    return CoisometryReport(tuple(res), total, total < tol.eq_tol, is_fully_coisometric(dil.base, tol))
