"""Generated algebras, minimal coinvariant subspaces and unitary invariants.

Terminology: for an algebra ``alg`` on C^n a subspace is *coinvariant* when
it is invariant under the adjoint algebra ``alg*``, and *cyclic* when
``alg[s] = C^n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .numerics import (DEFAULT_TOL, Subspace, Tolerance, as_matrix, null_space,
                       orthonormal_range, projection_distance, subspace_complement_within,
                       _rank)
from .reps import GraphRep, KGraphRep, product_rep, row_operator, is_fully_coisometric

__all__ = [
    "StructureError",
    "CyclicityError",
    "OperatorAlgebra",
    "generate_algebra",
    "rep_algebra",
    "commutant",
    "intertwiner_space",
    "minimal_coinvariant",
    "minimal_coinvariant_family",
    "minimal_cyclic_coinvariant",
    "is_minimal_cyclic_coinvariant",
    "phi_map",
    "phi_fixed_points",
    "Block",
    "BlockDecomposition",
    "block_decomposition",
    "EquivalenceResult",
    "unitary_equivalence",
    "WmReport",
    "wm_equals_vhat",
    "span_distance",
]


class StructureError(ValueError):
    """An algebraic precondition failed numerically."""


class CyclicityError(StructureError):
    """The computed coinvariant subspace is not cyclic."""


def _soft(tol: Tolerance) -> float:
    # slack for internal consistency checks on accumulated products
    return 100 * tol.eq_tol


# ---------------------------------------------------------------------------
# spans of matrices

def _orthonormalize(mats: Sequence[np.ndarray], n: int, tol: Tolerance,
                    basis: list[np.ndarray] | None = None) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Extend an HS-orthonormal ``basis`` by ``mats`` (Gram-Schmidt, two passes).

    Returns ``(basis, added)``.
    """
    basis = [] if basis is None else list(basis)
    added = []
    thresh = tol.rank_rel_tol * n * n
    for m in mats:
        v = np.array(m, dtype=complex)
        scale = np.linalg.norm(v)
        if scale == 0:
            continue
        for _ in range(2):
            for b in basis:
                v = v - np.vdot(b, v) * b
        r = np.linalg.norm(v)
        if r > thresh * max(1.0, scale):
            v = v / r
            basis.append(v)
            added.append(v)
    return basis, added


def span_basis(mats: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """HS-orthonormal basis of a span of equally shaped matrices (SVD based)."""
    mats = [as_matrix(m) for m in mats]
    if not mats:
        return []
    shape = mats[0].shape
    stack = np.array([m.ravel() for m in mats]).T
    sub = orthonormal_range(stack, tol, scale=1.0)
    return [sub.frame[:, j].reshape(shape) for j in range(sub.dim)]


def span_distance(a: Sequence[np.ndarray], b: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> float:
    """Projection distance between two spans of matrices."""
    a, b = span_basis(a, tol), span_basis(b, tol)
    shape = (a or b)[0].shape if (a or b) else (0, 0)
    sa = Subspace(int(np.prod(shape)), np.array([m.ravel() for m in a]).T if a else np.zeros((int(np.prod(shape)), 0)))
    sb = Subspace(int(np.prod(shape)), np.array([m.ravel() for m in b]).T if b else np.zeros((int(np.prod(shape)), 0)))
    return projection_distance(sa, sb)


@dataclass(frozen=True, eq=False)
class OperatorAlgebra:
    """Unital matrix algebra stored by an HS-orthonormal basis."""

    dim: int
    basis: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(np.asarray(b, dtype=complex) for b in self.basis))

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def adjoint(self) -> "OperatorAlgebra":
        return OperatorAlgebra(self.dim, tuple(b.conj().T for b in self.basis))

    def residual(self, m) -> float:
        v = as_matrix(m).astype(complex)
        for b in self.basis:
            v = v - np.vdot(b, v) * b
        return float(np.linalg.norm(v))

    def contains(self, m, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.residual(m) <= _soft(tol) * max(1.0, float(np.linalg.norm(m)))

    def is_star_closed(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(self.contains(b.conj().T, tol) for b in self.basis)

    def is_closed(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(self.contains(a @ b, tol) for a in self.basis for b in self.basis)

    def compress(self, frame: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> "OperatorAlgebra":
        """``{F* b F}`` for an orthonormal frame F; an algebra when range(F) is
        invariant or coinvariant."""
        f = as_matrix(frame)
        return OperatorAlgebra(f.shape[1], tuple(span_basis([f.conj().T @ b @ f for b in self.basis], tol)))

    def apply(self, vectors) -> Subspace:
        """The cyclic subspace ``alg[vectors]``."""
        v = as_matrix(vectors)
        if v.shape[1] == 0:
            return Subspace.zero(self.dim)
        scale = float(np.linalg.norm(v, 2))
        return orthonormal_range(np.hstack([b @ v for b in self.basis]), scale=scale)

    def leaves_invariant(self, s: Subspace, tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(s.residual(b @ s.frame) <= _soft(tol) for b in self.basis)

    def matrices(self) -> list[np.ndarray]:
        return list(self.basis)


def generate_algebra(generators: Sequence[np.ndarray], dim: int,
                     tol: Tolerance = DEFAULT_TOL) -> OperatorAlgebra:
    """Unital algebra generated by ``generators`` (span of words, to a fixpoint)."""
    gens = [as_matrix(g) for g in generators]
    for g in gens:
        if g.shape != (dim, dim):
            raise ValueError(f"generator has shape {g.shape}, expected ({dim}, {dim})")
    basis, frontier = _orthonormalize([np.eye(dim)] + gens, dim, tol)
    while frontier:
        basis, frontier = _orthonormalize([g @ b for b in frontier for g in gens], dim, tol, basis)
        if len(basis) > dim * dim:
            raise StructureError("span exceeded dim^2; tolerance too loose")
    return OperatorAlgebra(dim, tuple(basis))


def rep_algebra(rep: GraphRep | KGraphRep, tol: Tolerance = DEFAULT_TOL) -> OperatorAlgebra:
    """The unital algebra generated by every operator of a representation."""
    return generate_algebra(rep.generators(), rep.dim, tol)


def _commutation_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-major vec of ``T x - y T`` for T of shape (y.rows, x.rows)."""
    p, q = y.shape[0], x.shape[0]
    return np.kron(np.eye(p), x.T) - np.kron(y, np.eye(q))


def intertwiner_space(xs: Sequence[np.ndarray], ys: Sequence[np.ndarray],
                      tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Basis of ``{T : T x_i = y_i T for all i}``."""
    xs, ys = [as_matrix(x) for x in xs], [as_matrix(y) for y in ys]
    if len(xs) != len(ys):
        raise ValueError("generator lists differ in length")
    p = ys[0].shape[0] if ys else 0
    q = xs[0].shape[0] if xs else 0
    if not xs:
        raise ValueError("need at least one pair")
    k = np.vstack([_commutation_matrix(x, y) for x, y in zip(xs, ys)])
    ns = null_space(k, tol)
    return [ns[:, j].reshape(p, q) for j in range(ns.shape[1])]


def commutant(alg: OperatorAlgebra, tol: Tolerance = DEFAULT_TOL) -> OperatorAlgebra:
    basis = intertwiner_space(alg.basis, alg.basis, tol)
    return OperatorAlgebra(alg.dim, tuple(basis))


# ---------------------------------------------------------------------------
# minimal invariant subspaces

def _radical(mats: list[np.ndarray], tol: Tolerance) -> list[np.ndarray]:
    """Jacobson radical via the trace form: {x : tr(xy) = 0 for all y}."""
    if not mats:
        return []
    gram = np.array([[np.trace(a @ b) for b in mats] for a in mats])
    coeffs = null_space(gram, tol)
    return [sum(c * m for c, m in zip(coeffs[:, j], mats)) for j in range(coeffs.shape[1])]


def _common_kernel(mats: list[np.ndarray], r: int, tol: Tolerance) -> np.ndarray:
    return null_space(np.vstack(mats), tol) if mats else np.eye(r, dtype=complex)


def _eigenspaces(c: np.ndarray, hermitian: bool, tol: Tolerance) -> list[np.ndarray]:
    """Eigenspaces of a diagonalisable matrix, grouped by nearby eigenvalues."""
    r = c.shape[0]
    scale = max(1.0, float(np.linalg.norm(c, 2)))
    if hermitian:
        w, v = np.linalg.eigh((c + c.conj().T) / 2)
    else:
        w = np.linalg.eigvals(c)
    order = np.lexsort((w.imag, w.real)) if not hermitian else np.arange(r)
    w = w[order]
    clusters: list[list[int]] = []
    gap = 1e-6 * scale
    for i in range(r):
        for cl in clusters:
            if abs(w[i] - np.mean(w[cl])) < gap:
                cl.append(i)
                break
        else:
            clusters.append([i])
    spaces = []
    for cl in clusters:
        if hermitian:
            sub = orthonormal_range(v[:, order[cl]], tol, scale=1.0)
            spaces.append(sub.frame)
        else:
            lam = np.mean(w[cl])
            _, _, vh = np.linalg.svd(c - lam * np.eye(r))
            spaces.append(orthonormal_range(vh[r - len(cl):].conj().T, tol, scale=1.0).frame)
    return spaces


def _random_element(mats: list[np.ndarray], rng: np.random.Generator) -> np.ndarray:
    coef = rng.normal(size=len(mats)) + 1j * rng.normal(size=len(mats))
    return sum(a * m for a, m in zip(coef, mats))


def _split_by_commutant(mats: list[np.ndarray], r: int, rng: np.random.Generator,
                        tol: Tolerance) -> list[np.ndarray] | None:
    """Eigenspaces of a generic commutant element of a semisimple algebra, or
    None when the commutant is trivial."""
    comm = intertwiner_space(mats, mats, tol)
    if len(comm) <= 1:
        return None
    c = _random_element(comm, rng)
    star = all(np.linalg.norm(c.conj().T @ m - m @ c.conj().T) <= _soft(tol) * max(1.0, np.linalg.norm(m))
               for m in mats)
    if star:
        c = c + c.conj().T
    return _eigenspaces(c, star, tol)


def _pick(spaces: list[np.ndarray], seed: np.ndarray | None) -> np.ndarray:
    def key(f):
        overlap = float(np.linalg.norm(f.conj().T @ seed)) if seed is not None else 0.0
        lead = int(np.argmax(np.abs(f[:, 0]) > 1e-9))
        return (-round(overlap, 9), lead)
    return min(spaces, key=key)


def _minimal_invariant(mats: list[np.ndarray], w: Subspace, tol: Tolerance,
                       rng: np.random.Generator, seed: np.ndarray | None = None) -> Subspace:
    """A minimal invariant subspace of span(mats) inside the invariant ``w``.

    The restricted algebra B on W is inspected: B = M_r means W is minimal;
    a nonzero radical J shrinks W to the annihilator of J; otherwise B is
    semisimple and an eigenspace of a generic commutant element is one
    simple summand.
    """
    while True:
        f = w.frame
        r = f.shape[1]
        if r <= 1:
            return w
        restricted = span_basis([f.conj().T @ m @ f for m in mats], tol)
        if len(restricted) == r * r:
            return w
        rad = _radical(restricted, tol)
        if rad:
            k = _common_kernel(rad, r, tol)
            if k.shape[1] == 0 or k.shape[1] == r:
                raise StructureError("radical annihilator is degenerate; tolerance issue")
            w = orthonormal_range(f @ k, tol, scale=1.0)
            continue
        spaces = _split_by_commutant(restricted, r, rng, tol)
        if spaces is None:  # semisimple with trivial commutant is simple
            return w
        local_seed = f.conj().T @ seed if seed is not None else None
        w = orthonormal_range(f @ _pick(spaces, local_seed), tol, scale=1.0)


def minimal_coinvariant(alg: OperatorAlgebra, seed, tol: Tolerance = DEFAULT_TOL,
                        rng_seed: int = 0) -> Subspace:
    """A minimal ``alg*``-invariant subspace inside ``alg*[seed]``."""
    v = as_matrix(seed)
    if not np.any(np.abs(v) > 0):
        raise ValueError("seed must be nonzero")
    star = alg.adjoint()
    w = star.apply(v)
    vec = v[:, 0] / np.linalg.norm(v[:, 0])
    return _minimal_invariant(star.matrices(), w, tol, np.random.default_rng(rng_seed), vec)


def minimal_coinvariant_family(alg: OperatorAlgebra, tol: Tolerance = DEFAULT_TOL,
                               seed: int = 0, seeding: str = "basis") -> list[Subspace]:
    """Maximal orthogonal family of minimal ``alg*``-invariant subspaces, greedily.

    After ``W_1..W_r`` are chosen, the next member is searched in
    ``V ⊖ alg[W_1 ⊕ .. ⊕ W_r]``, the largest ``alg*``-invariant subspace
    orthogonal to the family.
    """
    if seeding not in ("basis", "random"):
        raise ValueError("seeding must be 'basis' or 'random'")
    n = alg.dim
    rng = np.random.default_rng(seed)
    star = alg.adjoint().matrices()
    family: list[Subspace] = []
    rest = Subspace.full(n)
    while rest.dim > 0:
        p = rest.projector
        if seeding == "basis":
            norms = np.linalg.norm(p, axis=0)
            i = int(np.flatnonzero(norms > 1e-6)[0]) if np.any(norms > 1e-6) else int(np.argmax(norms))
            vec = p[:, i]
        else:
            vec = p @ (rng.normal(size=n) + 1j * rng.normal(size=n))
        vec = vec / np.linalg.norm(vec)
        w = orthonormal_range(np.hstack([m @ vec[:, None] for m in star]), tol, scale=1.0)
        w = _minimal_invariant(star, w, tol, rng, vec)
        family.append(w)
        covered = alg.apply(np.hstack([x.frame for x in family]))
        rest = covered.complement(tol) if covered.dim < n else Subspace.zero(n)
    return family


def minimal_cyclic_coinvariant(alg: OperatorAlgebra, tol: Tolerance = DEFAULT_TOL,
                               seed: int = 0, seeding: str = "basis") -> Subspace:
    """The sum of a maximal orthogonal family of minimal coinvariant subspaces."""
    family = minimal_coinvariant_family(alg, tol, seed, seeding)
    vhat = orthonormal_range(np.hstack([w.frame for w in family]), tol, scale=1.0)
    star = alg.adjoint()
    if not star.leaves_invariant(vhat, tol):
        raise StructureError("computed subspace is not coinvariant")
    if alg.apply(vhat.frame).dim != alg.dim:
        raise CyclicityError(f"alg[V̂] has dim {alg.apply(vhat.frame).dim} < {alg.dim}")
    return vhat


def _is_cyclic(alg: OperatorAlgebra, s: Subspace) -> bool:
    return s.dim > 0 and alg.apply(s.frame).dim == alg.dim


def _center(mats: list[np.ndarray], tol: Tolerance) -> list[np.ndarray]:
    # coefficients c with [Σ c_i m_i, m_j] = 0 for every j
    cols = []
    for m in mats:
        cols.append(np.concatenate([(m @ x - x @ m).ravel() for x in mats]))
    coeffs = null_space(np.array(cols).T, tol)
    return [sum(c * m for c, m in zip(coeffs[:, j], mats)) for j in range(coeffs.shape[1])]


def is_minimal_cyclic_coinvariant(alg: OperatorAlgebra, s: Subspace, tol: Tolerance = DEFAULT_TOL,
                                  seed: int = 0, trials: int = 3) -> bool:
    """Decide whether ``s`` is a minimal cyclic coinvariant subspace.

    Maximal proper coinvariant subspaces of ``s`` are ``s ⊖ u`` with ``u`` a
    minimal invariant subspace of the compression of ``alg`` to ``s``.  Such
    ``u`` live in the socle and fall into isotypic classes; cyclicity of
    ``s ⊖ u`` is a Zariski-open condition on ``u`` inside a class, so it is
    tested on a few generic members of each class.
    """
    if s.ambient_dim != alg.dim:
        raise ValueError("subspace and algebra dimensions differ")
    if s.dim == 0:
        return False
    if not alg.adjoint().leaves_invariant(s, tol) or not _is_cyclic(alg, s):
        return False
    rng = np.random.default_rng(seed)
    f = s.frame
    comp = span_basis([f.conj().T @ b @ f for b in alg.basis], tol)
    r = s.dim
    rad = _radical(comp, tol)
    soc = _common_kernel(rad, r, tol) if rad else np.eye(r, dtype=complex)
    on_soc = span_basis([soc.conj().T @ m @ soc for m in comp], tol)
    center = _center(on_soc, tol)
    if len(center) > 1:
        z = _random_element(center, rng)
        iso = _eigenspaces(z, False, tol)
    else:
        iso = [np.eye(soc.shape[1], dtype=complex)]
    for block in iso:
        mats = span_basis([block.conj().T @ m @ block for m in on_soc], tol)
        for _ in range(trials):
            spaces = _split_by_commutant(mats, block.shape[1], rng, tol)
            # a trivial commutant means the whole class is one simple summand
            local = block if spaces is None else block @ spaces[int(rng.integers(len(spaces)))]
            u = orthonormal_range(f @ soc @ local, tol, scale=1.0)
            if _is_cyclic(alg, subspace_complement_within(s, u, tol)):
                return False
            if spaces is None:
                break
    return True


# ---------------------------------------------------------------------------
# Φ_A

def _check_sigma_commutant(rep, x: np.ndarray, tol: Tolerance) -> None:
    for p in rep.sigma_projections():
        r = float(np.max(np.abs(x @ p - p @ x))) if x.size else 0.0
        if r > _soft(tol) * max(1.0, float(np.max(np.abs(x)))):
            raise ValueError(f"X does not commute with the vertex projections (residual {r:.3e})")


def phi_map(rep: GraphRep | KGraphRep, x, color: int | None = None,
            tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``Φ(X) = Ã (I ⊗ X) Ã*`` for one color, or for the product row (1..1)."""
    x = as_matrix(x)
    if x.shape != (rep.dim, rep.dim):
        raise ValueError(f"X must be {rep.dim}x{rep.dim}")
    _check_sigma_commutant(rep, x, tol)
    if isinstance(rep, KGraphRep) and color is None:
        mats = product_rep(rep, (1,) * rep.kgraph.k).A
    else:
        row = row_operator(rep, color)
        mats = [row[:, i * rep.dim:(i + 1) * rep.dim] for i in range(row.shape[1] // rep.dim)]
    return sum((a @ x @ a.conj().T for a in mats), np.zeros_like(x))


def phi_fixed_points(rep: GraphRep | KGraphRep, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Basis of ``{X ∈ σ' : Φ_i(X) = X for every color i}``."""
    d = rep.dim
    eye = np.eye(d * d)
    blocks = [_commutation_matrix(p, p) for p in rep.sigma_projections()]
    for row in rep.rows():
        blocks.append(sum((np.kron(a, a.conj()) for a in row), np.zeros((d * d, d * d), complex)) - eye)
    ns = null_space(np.vstack(blocks), tol)
    return [ns[:, j].reshape(d, d) for j in range(ns.shape[1])]


# ---------------------------------------------------------------------------
# block structure

def _polar_unitary(t: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(t)
    return u @ vh


@dataclass(frozen=True, eq=False)
class Block:
    """One isotypic class: ``m`` copies of a ``d``-dimensional irreducible."""

    d: int
    m: int
    members: tuple[Subspace, ...]
    intertwiners: tuple[np.ndarray, ...]   # ambient partial isometries U_0 -> U_j
    central_projection: np.ndarray = field(repr=False)

    @property
    def representative(self) -> Subspace:
        return self.members[0]


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    dim: int
    blocks: tuple[Block, ...]
    reconstruction_distance: float

    def summary(self) -> list[tuple[int, int]]:
        return [(b.d, b.m) for b in self.blocks]


def block_decomposition(alg: OperatorAlgebra, tol: Tolerance = DEFAULT_TOL,
                        seed: int = 0) -> BlockDecomposition:
    """Decompose a *-algebra into ``⊕ M_{d_h} ⊗ I_{m_h}``."""
    if not alg.is_star_closed(tol):
        raise StructureError("algebra is not *-closed")
    family = minimal_coinvariant_family(alg, tol, seed)
    if sum(w.dim for w in family) != alg.dim:
        raise StructureError("minimal family does not exhaust the space")
    restricted = [[w.frame.conj().T @ b @ w.frame for b in alg.basis] for w in family]
    classes: list[list[int]] = []
    unitaries: dict[int, np.ndarray] = {}
    for i, w in enumerate(family):
        for cl in classes:
            j = cl[0]
            if family[j].dim != w.dim:
                continue
            ts = intertwiner_space(restricted[j], restricted[i], tol)
            if ts:
                unitaries[i] = _polar_unitary(ts[0])
                cl.append(i)
                break
        else:
            classes.append([i])
            unitaries[i] = np.eye(w.dim, dtype=complex)
    blocks = []
    recon = []
    for cl in classes:
        rep0 = family[cl[0]]
        members = tuple(family[i] for i in cl)
        ints = tuple(family[i].frame @ unitaries[i] @ rep0.frame.conj().T for i in cl)
        proj = sum(m.projector for m in members)
        blocks.append(Block(rep0.dim, len(cl), members, ints, proj))
        d = rep0.dim
        for a in range(d):
            for b in range(d):
                e = np.zeros((d, d))
                e[a, b] = 1.0
                base = rep0.frame @ e @ rep0.frame.conj().T
                recon.append(sum(w @ base @ w.conj().T for w in ints))
    dist = span_distance(recon, alg.basis, tol)
    return BlockDecomposition(alg.dim, tuple(blocks), dist)


# ---------------------------------------------------------------------------
# unitary equivalence

@dataclass(frozen=True, eq=False)
class EquivalenceResult:
    verdict: str  # "equivalent" | "not equivalent" | "similar, unitary not certified"
    unitary: np.ndarray | None = None
    residual: float | None = None

    def __bool__(self) -> bool:
        return self.verdict == "equivalent"


def _same_structure(a, b) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, GraphRep):
        return a.graph == b.graph
    return a.kgraph.m == b.kgraph.m and a.kgraph.theta == b.kgraph.theta


def unitary_equivalence(rep_a: GraphRep | KGraphRep, rep_b: GraphRep | KGraphRep,
                        tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> EquivalenceResult:
    """Search for a unitary U with ``U X_a U* = X_b`` for every operator.

    The intertwiners of the *-closed families are computed, a generic
    element is tested for invertibility and replaced by its polar unitary,
    and the relations are re-verified with that unitary.
    """
    if not _same_structure(rep_a, rep_b):
        raise StructureError("representations have different structure data")
    if rep_a.dim != rep_b.dim:
        raise ValueError(f"dimension mismatch: {rep_a.dim} vs {rep_b.dim}")
    d = rep_a.dim
    ga, gb = rep_a.generators(), rep_b.generators()
    rng = np.random.default_rng(seed)
    scale = max(1.0, max((float(np.linalg.norm(x, 2)) for x in ga), default=1.0))
    same = max((float(np.linalg.norm(x - y, 2)) for x, y in zip(ga, gb)), default=0.0)
    if same < 10 * tol.eq_tol * scale:
        return EquivalenceResult("equivalent", np.eye(d, dtype=complex), same)

    def search(xs, ys):
        space = intertwiner_space(xs, ys, tol)
        if not space:
            return None
        for _ in range(d * d):
            t = _random_element(space, rng)
            s = np.linalg.svd(t, compute_uv=False)
            if s[-1] > 1e-6 * s[0]:
                return t
        return None

    t = search(ga + [g.conj().T for g in ga], gb + [g.conj().T for g in gb])
    if t is not None:
        u = _polar_unitary(t)
        # the global phase is free; make the trace (or largest entry) real positive
        tr = np.trace(u)
        ref = tr if abs(tr) > 1e-8 else u.flat[np.argmax(np.abs(u))]
        u = u * (abs(ref) / ref)
        res = max(float(np.linalg.norm(u @ x - y @ u, 2)) for x, y in zip(ga, gb))
        if res < 10 * tol.eq_tol * scale:
            return EquivalenceResult("equivalent", u, res)
    if search(ga, gb) is not None or t is not None:
        return EquivalenceResult("similar, unitary not certified")
    return EquivalenceResult("not equivalent")


# ---------------------------------------------------------------------------
# product-system comparison

@dataclass(frozen=True)
class WmReport:
    """``mode`` is "equality" for m ≥ (1..1) and "containment" otherwise;
    ``holds`` is the verdict in that mode.  Both verdicts are always filled."""

    m: tuple[int, ...]
    dim_vhat: int
    dim_wm: int
    mode: str
    holds: bool
    equal: bool
    contained: bool
    distance: float               # projection distance between W_m and V̂
    containment_residual: float   # size of the part of W_m outside V̂
    vhat: Subspace = field(repr=False)
    wm: Subspace = field(repr=False)


def wm_equals_vhat(rep: KGraphRep, m: Sequence[int], tol: Tolerance = DEFAULT_TOL,
                   seed: int = 0, threshold: float | None = None) -> WmReport:
    """Compare ``V̂`` with the minimal cyclic coinvariant subspace ``W_m`` of
    the product rep of degree m."""
    m = tuple(int(x) for x in m)
    if len(m) != rep.kgraph.k or any(x < 0 for x in m) or not any(m):
        raise ValueError(f"m must be a nonzero vector in N^{rep.kgraph.k}")
    if not is_fully_coisometric(rep, tol):
        raise StructureError("rep is not fully coisometric")
    thr = _soft(tol) if threshold is None else threshold
    vhat = minimal_cyclic_coinvariant(rep_algebra(rep, tol), tol, seed)
    wm = minimal_cyclic_coinvariant(rep_algebra(product_rep(rep, m), tol), tol, seed)
    dist = projection_distance(vhat, wm)
    res = vhat.residual(wm.frame)
    equal, contained = dist < thr, res < thr
    mode = "equality" if all(x >= 1 for x in m) else "containment"
    holds = equal if mode == "equality" else contained
    return WmReport(m, vhat.dim, wm.dim, mode, holds, equal, contained, dist, res, vhat, wm)
