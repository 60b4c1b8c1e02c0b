import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corelab import catalog
from corelab.graphs import single_vertex_graph
from corelab.numerics import DEFAULT_TOL, Subspace, orthonormal_range, projection_distance
from corelab.reps import GraphRep, KGraphRep, is_fully_coisometric, product_rep
from corelab.structure import (OperatorAlgebra, StructureError, block_decomposition, commutant,
                               generate_algebra, intertwiner_space, is_minimal_cyclic_coinvariant,
                               minimal_coinvariant, minimal_coinvariant_family,
                               minimal_cyclic_coinvariant, phi_fixed_points, phi_map, rep_algebra,
                               span_distance, unitary_equivalence, wm_equals_vhat)

from conftest import coisometric_row, random_unitary
from oracles import algebra_dim, is_cyclic, is_invariant, krylov_span, minimal_coordinate_cyclic_coinvariant

R2 = 1 / np.sqrt(2)
FC = generate_algebra(catalog.fc_algebra_generators(), 2)


def full_algebra(n):
    units = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n))
            e[i, j] = 1
            units.append(e)
    return generate_algebra(units, n)


def diagonal_algebra(n):
    return generate_algebra([np.diag(np.arange(1.0, n + 1))], n)


def span(*vecs):
    return orthonormal_range(np.array(vecs, dtype=complex).T, scale=1.0)


def irreducible_rep(d, seed):
    return GraphRep.single_vertex(coisometric_row(d, 2, np.random.default_rng(seed)))


FC_REPS = {
    "atomic_flip": catalog.atomic_flip(),
    "not_partially_iso": catalog.not_partially_iso(),
    "not_doubly_commuting": catalog.not_doubly_commuting(),
    "loops_2": catalog.loops(2),
    "three_cycle": catalog.three_cycle(),
}


# --- algebras ---------------------------------------------------------------

def test_generate_algebra_examples():
    assert generate_algebra([np.eye(3)], 3).dimension == 1
    d = generate_algebra([np.diag([1.0, 2.0])], 2)
    assert d.dimension == 2
    assert all(abs(b[0, 1]) < 1e-12 and abs(b[1, 0]) < 1e-12 for b in d.basis)


def test_generate_algebra_matches_product_closure_oracle():
    ndc = catalog.not_doubly_commuting()
    alg = rep_algebra(ndc)
    assert alg.dimension == algebra_dim(ndc.generators(), 3) == 5
    # rank-one operators on the cyclic part: A_1 = e_3 (e_1 + e_2)^T / 2
    a1 = ndc.rows()[0][0]
    assert np.linalg.matrix_rank(a1) == 1 and alg.contains(a1)
    assert alg.is_closed()


def test_generate_algebra_idempotent():
    alg = rep_algebra(catalog.not_partially_iso())
    again = generate_algebra(alg.basis, alg.dim)
    assert span_distance(again.basis, alg.basis) < 1e-9


def test_commutant_examples():
    assert commutant(full_algebra(3)).dimension == 1
    assert commutant(generate_algebra([np.eye(3)], 3)).dimension == 9
    c = commutant(diagonal_algebra(2))
    assert span_distance(c.basis, diagonal_algebra(2).basis) < 1e-9


@st.composite
def star_algebras(draw):
    """Block diagonal *-algebras with repeated blocks, conjugated by a unitary."""
    seed = draw(st.integers(0, 2**31))
    g = np.random.default_rng(seed)
    sizes = draw(st.lists(st.integers(1, 2), min_size=1, max_size=2))
    mult = draw(st.lists(st.integers(1, 2), min_size=len(sizes), max_size=len(sizes)))
    n = sum(d * m for d, m in zip(sizes, mult))
    gens = []
    for _ in range(2):
        blocks = []
        for d, m in zip(sizes, mult):
            x = g.normal(size=(d, d)) + 1j * g.normal(size=(d, d))
            blocks += [x] * m
        full = np.zeros((n, n), complex)
        k = 0
        for b in blocks:
            full[k:k + len(b), k:k + len(b)] = b
            k += len(b)
        gens.append(full)
    u = random_unitary(n, g)
    gens = [u @ x @ u.conj().T for x in gens]
    return generate_algebra(gens + [x.conj().T for x in gens], n), sizes, mult


@settings(max_examples=25, deadline=None)
@given(star_algebras())
def test_double_commutant_of_star_algebra(data):
    alg, _, _ = data
    cc = commutant(commutant(alg))
    assert span_distance(cc.basis, alg.basis) < 1e-7


def test_double_commutant_contains_non_star_algebra():
    cc = commutant(commutant(FC))
    assert all(cc.contains(b) for b in FC.basis)
    assert cc.dimension >= FC.dimension


# --- minimal coinvariant subspaces -----------------------------------------

def test_minimal_coinvariant_examples():
    w = minimal_coinvariant(full_algebra(3), np.array([[1.0], [0], [0]]))
    assert w.dim == 3
    w = minimal_coinvariant(FC, np.array([[1.0], [0]]))
    assert w.equals(span([1, 0]))
    w = minimal_coinvariant(diagonal_algebra(2), np.array([[1.0], [1.0]]))
    assert w.equals(span([1, 0]))


def test_minimal_coinvariant_finds_non_basis_minimum():
    # diagonal algebra on C^2 with seed e_1 + e_2: every frame vector of C^2 in
    # the (1, ±1) basis is cyclic, yet C^2 is not minimal
    w = minimal_coinvariant(diagonal_algebra(2), np.array([[R2], [R2]]))
    assert w.dim == 1


def test_vhat_of_not_doubly_commuting():
    ndc = catalog.not_doubly_commuting()
    vhat = minimal_cyclic_coinvariant(rep_algebra(ndc))
    u = span([1, 1, 0])
    assert vhat.equals(u)
    # independent check: u is invariant under every adjoint and cyclic
    gens = ndc.generators()
    assert is_invariant([g.conj().T for g in gens], u.frame)
    assert is_cyclic(gens, u.frame, 3)
    # span{e1, e2} is coinvariant and cyclic but contains u, so it is not minimal
    e12 = Subspace.coordinate(3, [0, 1])
    assert is_invariant([g.conj().T for g in gens], e12.frame) and is_cyclic(gens, e12.frame, 3)
    assert not is_minimal_cyclic_coinvariant(rep_algebra(ndc), e12)
    # among coordinate subspaces span{e1, e2} is the minimum; u is not a coordinate subspace
    assert minimal_coordinate_cyclic_coinvariant(gens, 3) == [(0, 1)]


@pytest.mark.parametrize("order,coords", [("v_major", [0, 1, 2, 3]), ("w_major", [0, 2, 4, 6])])
def test_not_partially_iso_against_coordinate_oracle(order, coords):
    rep = catalog.not_partially_iso(order)
    color1 = product_rep(rep, (1, 0))
    assert minimal_coordinate_cyclic_coinvariant(color1.generators(), 8) == [tuple(coords)]
    assert minimal_coordinate_cyclic_coinvariant(rep.generators(), 8) == [tuple(coords)]
    want = Subspace.coordinate(8, coords)
    assert minimal_cyclic_coinvariant(rep_algebra(color1)).equals(want)
    assert minimal_cyclic_coinvariant(rep_algebra(rep)).equals(want)


def test_not_partially_iso_b1_adjoint():
    e = np.eye(8)
    b1_v = catalog.not_partially_iso("v_major").rows()[1][0]
    b1_w = catalog.not_partially_iso("w_major").rows()[1][0]
    assert np.array_equal(b1_v.conj().T @ e[:, 0], e[:, 1])
    assert np.array_equal(b1_w.conj().T @ e[:, 0], e[:, 2])


def test_vhat_of_full_algebra_is_everything():
    assert minimal_cyclic_coinvariant(full_algebra(3)).dim == 3


def test_fc_fixture_minimality():
    assert is_minimal_cyclic_coinvariant(FC, span([1, 0]))
    assert is_minimal_cyclic_coinvariant(FC, span([1, 1]))
    assert not is_minimal_cyclic_coinvariant(FC, Subspace.full(2))
    assert not is_minimal_cyclic_coinvariant(FC, span([0, 1]))   # not coinvariant


def test_full_algebra_rejects_proper_subspace():
    assert not is_minimal_cyclic_coinvariant(full_algebra(3), Subspace.coordinate(3, [0]))
    assert is_minimal_cyclic_coinvariant(full_algebra(3), Subspace.full(3))


def test_fc_random_seeding_finds_both_minima():
    found = set()
    for seed in range(20):
        fam = minimal_coinvariant_family(FC, seed=seed, seeding="random")
        (w,) = fam
        found.add("x0" if w.equals(span([1, 0])) else "xx" if w.equals(span([1, 1])) else "?")
    assert found == {"x0", "xx"}


@pytest.mark.parametrize("name", sorted(FC_REPS))
def test_vhat_properties_on_fixtures(name):
    rep = FC_REPS[name]
    alg = rep_algebra(rep)
    vhat = minimal_cyclic_coinvariant(alg)
    gens = rep.generators()
    assert is_invariant([g.conj().T for g in gens], vhat.frame)
    assert krylov_span(gens, vhat.frame).shape[1] == rep.dim
    for w in minimal_coinvariant_family(alg):
        # every nonzero cyclic subspace of alg* restricted to w is w itself
        for j in range(w.dim):
            assert krylov_span([g.conj().T for g in gens], w.frame[:, j:j + 1]).shape[1] == w.dim
    assert is_minimal_cyclic_coinvariant(alg, vhat)


@pytest.mark.parametrize("name", sorted(FC_REPS))
def test_vhat_unique_over_seeds_for_coisometric_reps(name):
    alg = rep_algebra(FC_REPS[name])
    ref = minimal_cyclic_coinvariant(alg)
    for seed in range(20):
        other = minimal_cyclic_coinvariant(alg, seed=seed, seeding="random")
        assert projection_distance(ref, other) < DEFAULT_TOL.eq_tol


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 3), st.integers(1, 3))
def test_vhat_unique_for_random_coisometric_sums(seed, d1, d2):
    g = np.random.default_rng(seed)
    a = GraphRep.single_vertex(coisometric_row(d1, 2, g))
    b = GraphRep.single_vertex(coisometric_row(d2, 2, g))
    rep = a.direct_sum(b).conjugate(random_unitary(d1 + d2, g))
    alg = rep_algebra(rep)
    ref = minimal_cyclic_coinvariant(alg)
    for s in range(5):
        assert projection_distance(ref, minimal_cyclic_coinvariant(alg, seed=s, seeding="random")) < 1e-8


# --- Phi ----------------------------------------------------------------------

def test_phi_map_examples():
    rep = catalog.not_doubly_commuting()
    assert np.allclose(phi_map(rep, np.eye(3), color=0), np.eye(3))
    assert np.allclose(phi_map(rep, np.eye(3)), np.eye(3))
    u = random_unitary(2, np.random.default_rng(1))
    single = GraphRep.single_vertex([u])
    x = np.array([[1.0, 2.0], [0.5, -1.0]])
    assert np.allclose(phi_map(single, x), u @ x @ u.conj().T)


def test_commutant_elements_are_fixed():
    rep = catalog.atomic_flip()
    for x in commutant(rep_algebra(rep)).basis:
        for c in range(2):
            assert np.allclose(phi_map(rep, x, color=c), x)


def test_irreducible_fixed_points_are_scalars():
    rep = irreducible_rep(3, 4)
    assert rep_algebra(rep).dimension == 9
    (x,) = phi_fixed_points(rep)
    assert np.allclose(x / x[0, 0], np.eye(3))


def test_doubled_irreducible_fixed_points():
    base = irreducible_rep(2, 7)
    w = random_unitary(2, np.random.default_rng(8))
    doubled = base.direct_sum(base.conjugate(w))
    fixed = phi_fixed_points(doubled)
    assert len(fixed) == 4
    # each fixed point has the form [[a I, b W*], [c W, d I]]
    for x in fixed:
        tl, tr, bl, br = x[:2, :2], x[:2, 2:], x[2:, :2], x[2:, 2:]
        assert np.allclose(tl, tl[0, 0] * np.eye(2), atol=1e-9)
        assert np.allclose(br, br[0, 0] * np.eye(2), atol=1e-9)
        assert np.allclose(bl @ w.conj().T, (bl @ w.conj().T)[0, 0] * np.eye(2), atol=1e-9)
        assert np.allclose(tr @ w, (tr @ w)[0, 0] * np.eye(2), atol=1e-9)


@pytest.mark.parametrize("name", sorted(FC_REPS))
def test_fixed_points_equal_commutant_on_vhat(name):
    rep = FC_REPS[name]
    vhat = minimal_cyclic_coinvariant(rep_algebra(rep))
    small = rep.compress(vhat.frame)
    fixed = phi_fixed_points(small)
    comm = commutant(rep_algebra(small)).basis
    assert span_distance(fixed, comm) < 1e-7


def test_fixed_points_contain_commutant():
    # coisometric, so Phi(I) = I and every commutant element is fixed
    rep = GraphRep.single_vertex(coisometric_row(3, 2, np.random.default_rng(2))
                                 ).direct_sum(GraphRep.single_vertex([R2 * np.eye(1)] * 2))
    fixed = phi_fixed_points(rep)
    for x in commutant(rep_algebra(rep)).basis:
        assert span_distance(fixed + [x], fixed) < 1e-7


# --- blocks -------------------------------------------------------------------

def test_block_decomposition_examples():
    assert block_decomposition(full_algebra(3)).summary() == [(3, 1)]
    assert block_decomposition(diagonal_algebra(3)).summary() == [(1, 1)] * 3
    base = irreducible_rep(2, 11)
    doubled = base.direct_sum(base.conjugate(random_unitary(2, np.random.default_rng(3))))
    dec = block_decomposition(rep_algebra(doubled))
    assert dec.summary() == [(2, 2)]
    (blk,) = dec.blocks
    w = blk.intertwiners[1]
    # the explicit unitary carries one copy onto the other and intertwines the rep
    for a in doubled.A:
        assert np.allclose(w @ a @ blk.members[0].projector, a @ w @ blk.members[0].projector, atol=1e-9)
    assert dec.reconstruction_distance < 1e-8


def test_block_decomposition_needs_star_algebra():
    with pytest.raises(StructureError):
        block_decomposition(FC)


@settings(max_examples=20, deadline=None)
@given(star_algebras())
def test_block_decomposition_counts(data):
    alg, sizes, mult = data
    dec = block_decomposition(alg)
    assert sum(d * m for d, m in dec.summary()) == alg.dim
    assert dec.reconstruction_distance < 1e-7
    assert sum(d * d for d, _ in dec.summary()) == alg.dimension


# --- unitary equivalence -------------------------------------------------------

def test_equivalence_with_itself():
    rep = irreducible_rep(3, 5)
    res = unitary_equivalence(rep, rep)
    assert res.verdict == "equivalent"
    u = res.unitary
    assert np.allclose(u, u[0, 0] * np.eye(3))   # Schur: I up to a phase


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31))
def test_equivalence_with_conjugate(seed):
    g = np.random.default_rng(seed)
    rep = catalog.not_partially_iso() if seed % 2 else catalog.not_doubly_commuting()
    u0 = random_unitary(rep.dim, g)
    other = rep.conjugate(u0)
    res = unitary_equivalence(rep, other, seed=seed)
    assert res
    u = res.unitary
    for x, y in zip(rep.generators(), other.generators()):
        assert np.linalg.norm(u @ x - y @ u, 2) < 10 * DEFAULT_TOL.eq_tol
    assert unitary_equivalence(other, rep, seed=seed)


def test_inequivalent_scalars():
    a = GraphRep.single_vertex([[[0.5]]])
    b = GraphRep.single_vertex([[[0.6]]])
    assert unitary_equivalence(a, b).verdict == "not equivalent"


def test_equivalence_structure_mismatch():
    with pytest.raises(StructureError):
        unitary_equivalence(catalog.loops(2), catalog.loops(3))


# --- W_m --------------------------------------------------------------------------

@pytest.mark.parametrize("m", [(1, 1), (1, 0), (0, 1)])
def test_atomic_flip_wm_equals_vhat(m):
    w = wm_equals_vhat(catalog.atomic_flip(), m)
    assert w.equal and w.dim_vhat == w.dim_wm == 4


def test_not_partially_iso_wm_10():
    # W_(1,0) comes out equal to V-hat, both e_1 ⊗ W^(2) of dimension 4
    w = wm_equals_vhat(catalog.not_partially_iso(), (1, 0))
    assert w.dim_wm == 4 and w.dim_vhat == 4 and w.equal


WM_DEGREES = [(1, 1), (2, 1), (1, 2), (1, 0), (0, 1), (2, 0)]
KG_FC = ["atomic_flip", "not_partially_iso", "not_doubly_commuting"]


@pytest.mark.parametrize("name", KG_FC)
@pytest.mark.parametrize("m", [m for m in WM_DEGREES if min(m) >= 1])
def test_wm_equality_for_full_degrees(name, m):
    assert wm_equals_vhat(FC_REPS[name], m).equal


@pytest.mark.parametrize("name", KG_FC)
@pytest.mark.parametrize("m", [m for m in WM_DEGREES if min(m) == 0])
def test_wm_contained_in_vhat_for_partial_degrees(name, m):
    w = wm_equals_vhat(FC_REPS[name], m)
    assert w.contained, f"dim W_m = {w.dim_wm}, dim V-hat = {w.dim_vhat}, residual {w.containment_residual:.2e}"


def test_wm_rejects_bad_input():
    with pytest.raises(ValueError):
        wm_equals_vhat(catalog.atomic_flip(), (0, 0))
    rep = KGraphRep(catalog.atomic_flip().kgraph, 4, tuple(tuple(0.5 * a for a in r)
                                                          for r in catalog.atomic_flip().rows()))
    with pytest.raises(StructureError):
        wm_equals_vhat(rep, (1, 1))
