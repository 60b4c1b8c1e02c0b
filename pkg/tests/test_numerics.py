import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from corelab.numerics import (DEFAULT_TOL, Subspace, Tolerance, fix_phase, is_psd, kron,
                              min_eigenvalue, null_space, operator_norm, orthonormal_range,
                              projection_distance, psd_sqrt, solve_linear_space,
                              subspace_complement_within, subspace_intersect, subspace_sum)

R2 = 1 / np.sqrt(2)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def cmats(rows, cols):
    return st.tuples(arrays(float, (rows, cols), elements=finite),
                     arrays(float, (rows, cols), elements=finite)).map(lambda t: t[0] + 1j * t[1])


# --- tolerance -------------------------------------------------------------

def test_tolerance_defaults():
    t = Tolerance()
    assert (t.eq_tol, t.psd_tol, t.rank_rel_tol) == (1e-9, 1e-7, 1e-10)


def test_tolerance_env_override(monkeypatch):
    monkeypatch.setenv("CORELAB_TOL", "1e-6")
    assert Tolerance.from_env().eq_tol == 1e-6
    assert Tolerance.from_env(1e-4).eq_tol == 1e-4
    monkeypatch.delenv("CORELAB_TOL")
    assert Tolerance.from_env() == DEFAULT_TOL


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_tolerance_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        Tolerance(eq_tol=bad)


# --- ranges and subspaces --------------------------------------------------

def test_range_of_identity():
    s = orthonormal_range(np.eye(3))
    assert s.dim == 3
    assert np.allclose(s.frame, np.eye(3))


def test_range_of_vector_and_rank_one():
    s = orthonormal_range(np.array([[1.0], [1.0]]))
    assert s.dim == 1
    assert np.allclose(np.abs(s.frame[:, 0]), [R2, R2])
    t = orthonormal_range(np.ones((2, 2)))
    assert t.dim == 1 and t.equals(s)


def test_rounding_noise_has_rank_zero():
    noise = 1e-17 * np.array([[1.0, 2.0], [3.0, -1.0]])
    assert orthonormal_range(noise, scale=1.0).dim == 0
    assert null_space(noise).shape == (2, 2)


@settings(max_examples=60, deadline=None)
@given(cmats(5, 3))
def test_range_frame_is_orthonormal(m):
    f = orthonormal_range(m).frame
    assert np.max(np.abs(f.conj().T @ f - np.eye(f.shape[1])), initial=0) < DEFAULT_TOL.eq_tol


@settings(max_examples=40, deadline=None)
@given(cmats(4, 2), st.integers(0, 2**31))
def test_equal_subspaces_have_identical_frames(m, seed):
    s = orthonormal_range(m)
    g = np.random.default_rng(seed)
    mix = g.normal(size=(s.dim, s.dim)) + 1j * g.normal(size=(s.dim, s.dim)) + 3 * np.eye(s.dim)
    t = orthonormal_range(s.frame @ mix)
    assert t.dim == s.dim
    assert np.allclose(s.frame, t.frame, atol=1e-8)


def test_fix_phase_makes_first_component_real_positive():
    v = fix_phase(np.array([0, -1j, 1]))
    assert v[1].real > 0 and abs(v[1].imag) < 1e-15


def test_projection_distance_basics():
    e1, e2 = Subspace.coordinate(2, [0]), Subspace.coordinate(2, [1])
    assert projection_distance(e1, e1) == 0
    assert np.isclose(projection_distance(e1, e2), 1.0)
    with pytest.raises(ValueError):
        projection_distance(e1, Subspace.full(3))


def test_intersections():
    full = Subspace.full(3)
    assert subspace_intersect(full, full).dim == 3
    assert subspace_intersect(Subspace.coordinate(2, [0]), Subspace.coordinate(2, [1])).dim == 0
    x = subspace_intersect(Subspace.coordinate(3, [0, 1]), Subspace.coordinate(3, [1, 2]))
    assert x.equals(Subspace.coordinate(3, [1]))


@settings(max_examples=50, deadline=None)
@given(cmats(4, 2), cmats(4, 3))
def test_intersection_inside_both_and_large_enough(ma, mb):
    a, b = orthonormal_range(ma), orthonormal_range(mb)
    x = subspace_intersect(a, b)
    assert a.residual(x.frame) < DEFAULT_TOL.eq_tol
    assert b.residual(x.frame) < DEFAULT_TOL.eq_tol
    assert x.dim >= a.dim + b.dim - 4


def test_complements():
    e1 = Subspace.coordinate(2, [0])
    assert subspace_complement_within(Subspace.full(2), e1).equals(Subspace.coordinate(2, [1]))
    assert subspace_complement_within(e1, e1).dim == 0
    whole = orthonormal_range(np.array([[1.0, 0], [1, 0], [0, 1]]))
    part = orthonormal_range(np.array([[1.0], [1], [0]]))
    assert subspace_complement_within(whole, part).equals(Subspace.coordinate(3, [2]))


def test_subspace_sum():
    s = subspace_sum([Subspace.coordinate(3, [0]), Subspace.coordinate(3, [0, 1])])
    assert s.equals(Subspace.coordinate(3, [0, 1]))


# --- PSD -------------------------------------------------------------------

def test_psd_examples():
    p = np.array([[0.5, -0.5], [-0.5, 0.5]])
    assert is_psd(np.eye(2))
    assert not is_psd(np.diag([1.0, -1.0]))
    assert is_psd(p)
    assert np.isclose(min_eigenvalue(p), 0.0, atol=1e-15)


def test_psd_rejects_non_hermitian():
    with pytest.raises(ValueError):
        is_psd(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_psd_sqrt_examples():
    assert np.allclose(psd_sqrt(np.eye(3)), np.eye(3))
    assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    p = np.array([[0.5, -0.5], [-0.5, 0.5]])
    assert np.allclose(psd_sqrt(p), p)


def test_psd_sqrt_keeps_the_rank_of_a_projection():
    # eigenvalues that are zero up to rounding must not come back as ~1e-8
    g = np.random.default_rng(3)
    q, _ = np.linalg.qr(g.normal(size=(6, 6)) + 1j * g.normal(size=(6, 6)))
    p = q[:, :3] @ q[:, :3].conj().T
    assert orthonormal_range(psd_sqrt(p), scale=1.0).dim == 3


def test_psd_sqrt_rejects_negative():
    with pytest.raises(ValueError):
        psd_sqrt(np.diag([1.0, -0.1]))


@settings(max_examples=60, deadline=None)
@given(cmats(4, 4))
def test_psd_sqrt_squares_back(z):
    m = z @ z.conj().T
    r = psd_sqrt(m)
    assert np.max(np.abs(r @ r - m)) < 10 * DEFAULT_TOL.eq_tol * max(1.0, np.max(np.abs(m)))
    assert np.allclose(r, r.conj().T)


# --- misc ------------------------------------------------------------------

def test_operator_norms():
    assert np.isclose(operator_norm(np.eye(2)), 1)
    assert np.isclose(operator_norm(np.array([[R2, R2]])), 1)
    assert np.isclose(operator_norm(2 * np.eye(3)), 2)


def test_kron_layout():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(kron(np.diag([1, 0]), np.eye(2)), np.diag([1, 1, 0, 0]))
    e12 = np.array([[0, 1], [0, 0]])
    e21 = e12.T
    want = np.zeros((4, 4))
    want[1, 2] = 1
    assert np.array_equal(kron(e12, e21), want)


def imats(rows, cols):
    # integer entries make every product exact, so layout is compared bit for bit
    return arrays(np.int64, (rows, cols), elements=st.integers(-5, 5))


@settings(max_examples=30, deadline=None)
@given(imats(2, 3), imats(2, 2), imats(3, 1))
def test_kron_associative(a, b, c):
    assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


def test_solve_linear_space_examples():
    d = np.diag([1.0, 2.0])
    assert len(solve_linear_space([lambda x: x @ np.eye(2) - np.eye(2) @ x], 2)) == 4
    sol = solve_linear_space([lambda x: x @ d - d @ x], 2)
    assert len(sol) == 2
    for x in sol:
        assert abs(x[0, 1]) < 1e-12 and abs(x[1, 0]) < 1e-12
    assert solve_linear_space([lambda x: x], 2) == []


@settings(max_examples=30, deadline=None)
@given(cmats(3, 3), cmats(3, 3))
def test_solve_linear_space_solutions_satisfy_constraints(a, b):
    cons = [lambda x: a @ x - x @ a, lambda x: (x @ b - b @ x)[:1]]
    for x in solve_linear_space(cons, 3):
        for f in cons:
            assert np.max(np.abs(f(x)), initial=0) < DEFAULT_TOL.eq_tol * max(1.0, np.abs(a).max(), np.abs(b).max())
