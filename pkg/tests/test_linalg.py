import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurifold.linalg import (
    AlgebraError,
    RealLieAlgebra,
    bilinear_isotropy,
    borel_subalgebra_sl,
    commutator,
    elementary,
    killing_form,
    matrix_exponential,
    nilpotency_analysis,
    realify,
    sl,
    so,
    span,
    strictly_upper_sl,
    subspace_bracket_residual,
    trace_form,
    u,
    unrealify,
)

E12, E21 = elementary(2, 0, 1), elementary(2, 1, 0)
H = np.diag([1.0, -1.0]).astype(complex)


def su11_basis():
    return [1j * H, E12 + E21, 1j * (E12 - E21)]


# commutator ------------------------------------------------------------------

def test_commutator_identity_is_zero():
    B = np.arange(9.0).reshape(3, 3)
    assert np.all(commutator(np.eye(3), B) == 0)


def test_commutator_e12_e21():
    assert np.allclose(commutator(E12, E21), np.diag([1, -1]))


def test_commutator_matches_naive_loops():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    B = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    naive = np.zeros((5, 5), dtype=complex)
    for i in range(5):
        for j in range(5):
            for k in range(5):
                naive[i, j] += A[i, k] * B[k, j] - B[i, k] * A[k, j]
    assert np.allclose(commutator(A, B), naive, atol=1e-13)


def test_commutator_shape_mismatch():
    with pytest.raises(AlgebraError):
        commutator(np.eye(2), np.eye(3))


# exponential -----------------------------------------------------------------

def test_exp_zero_and_diagonal():
    assert np.allclose(matrix_exponential(np.zeros((3, 3))), np.eye(3))
    a = np.array([0.3, -1.2, 2.0 + 1j])
    assert np.allclose(matrix_exponential(np.diag(a)), np.diag(np.exp(a)), atol=1e-14)


def test_exp_nilpotent_truncates():
    N = np.array([[0, 2.0, -1.0], [0, 0, 0], [0, 0, 0]])
    assert np.allclose(matrix_exponential(N), np.eye(3) + N, atol=1e-15)


def _mp_expm(A, dps=40):
    with mpmath.workdps(dps):
        M = mpmath.matrix([[mpmath.mpc(complex(x)) for x in row] for row in A])
        E = mpmath.expm(M, method="taylor")
        return np.array([[complex(E[i, j]) for j in range(A.shape[1])] for i in range(A.shape[0])])


def test_exp_matches_high_precision_series():
    rng = np.random.default_rng(1)
    for _ in range(5):
        A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        A *= 2.0 / np.linalg.norm(A)
        ref = _mp_expm(A)
        assert np.max(np.abs(matrix_exponential(A) - ref)) <= 1e-12 * max(1, np.max(np.abs(ref)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 5.0))
def test_exp_inverse_property(seed, scale):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    A *= scale / np.linalg.norm(A)
    assert np.max(np.abs(matrix_exponential(A) @ matrix_exponential(-A) - np.eye(3))) <= 1e-10


# realification and membership -------------------------------------------------

def test_realify_round_trip():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.array_equal(unrealify(realify(A), 3), A)


def test_membership_and_coords():
    g = sl(2)
    assert g.dim == 6
    assert g.contains(E12 + 1j * H)
    assert not g.contains(np.eye(2))
    with pytest.raises(AlgebraError):
        g.coords(np.eye(2))
    X = 0.5 * E12 - 2j * E21
    assert np.allclose(g.matrix(g.coords(X)), X)


def test_non_closed_basis_rejected():
    with pytest.raises(AlgebraError):
        RealLieAlgebra([E12, E21])


# Jacobi, Killing form ------------------------------------------------------------

@pytest.mark.parametrize("alg", [sl(2), sl(3), so(5), so(7), u(3), u(4)], ids=lambda a: a.name)
def test_jacobi_and_closure(alg):
    assert alg.jacobi_residual() <= 1e-10
    assert alg.closure_residual() <= 1e-10


def test_killing_abelian_is_zero():
    a = RealLieAlgebra([1j * H])
    assert killing_form(a, 1j * H, 2j * H) == 0


def test_killing_sl2_matches_explicit_ad_trace():
    # independent oracle: ad matrices of H on the fixed realified basis, by hand
    basis = [H, E12, E21, 1j * H, 1j * E12, 1j * E21]
    R = np.stack([realify(b) for b in basis], axis=1)
    ad = np.linalg.lstsq(R, np.stack([realify(commutator(H, b)) for b in basis], axis=1), rcond=None)[0]
    assert killing_form(sl(2), H, H) == pytest.approx(np.trace(ad @ ad))
    # real Killing form of realified sl(n, C) is 2 Re of the complex one: 2 * 2n tr(XY)
    assert killing_form(sl(2), H, H) == pytest.approx(2 * 4 * 2)


def test_killing_su11_orthogonal_to_i_su11():
    g = sl(2)
    for X in su11_basis():
        for Y in su11_basis():
            assert abs(killing_form(g, X, 1j * Y)) <= 1e-12


@pytest.mark.parametrize("alg", [sl(2), so(5), u(3)], ids=lambda a: a.name)
def test_killing_invariance(alg):
    rng = np.random.default_rng(3)
    for _ in range(100):
        X, Y, Z = (alg.matrix(rng.normal(size=alg.dim)) for _ in range(3))
        B = lambda a, b: killing_form(alg, a, b)
        assert abs(B(X, Y) - B(Y, X)) <= 1e-9
        assert abs(B(commutator(Z, X), Y) + B(X, commutator(Z, Y))) <= 1e-9


# subspaces --------------------------------------------------------------------

def test_span_full_and_empty():
    g = sl(2)
    full = span(g, [g.matrix(np.eye(6)[k]) for k in range(6)])
    assert np.allclose(full.projector, np.eye(6))
    empty = span(g, [])
    assert empty.dim == 0 and np.allclose(empty.projector, 0)


def test_su11_projection_along_complement():
    g = sl(2)
    su11 = span(g, su11_basis(), complement=[1j * b for b in su11_basis()])
    assert su11.dim == 3
    # H = -i (iH) lies in the complement i*su(1,1)
    assert np.allclose(su11.project(H), 0, atol=1e-12)
    P = su11.projector
    assert np.max(np.abs(P @ P - P)) <= 1e-12
    for b in su11_basis():
        assert np.allclose(su11.project(1j * b), 0, atol=1e-12)
        assert np.allclose(su11.project(b), b, atol=1e-12)


def test_nilpotency_abelian():
    g = sl(2)
    a = span(g, [H])
    r = nilpotency_analysis(a)
    assert r.derived.dim == 0 and r.nilpotent and r.input_nilpotent


def test_borel_sl2_derived():
    b = borel_subalgebra_sl(2)
    assert b.dim == 4
    r = nilpotency_analysis(b)
    assert r.derived.dim == 2
    assert r.derived.contains(E12) and r.derived.contains(1j * E12)
    assert r.derived_series == [2, 0]
    assert r.nilpotent and not r.input_nilpotent


def test_borel_sl3():
    g = sl(3)
    b = borel_subalgebra_sl(3, g)
    assert b.dim == 10
    assert subspace_bracket_residual(b, b, b) <= 1e-12
    r = nilpotency_analysis(b)
    n = strictly_upper_sl(3, g)
    assert r.derived.dim == n.dim == 6
    for X in n.basis:
        assert r.derived.contains(X)
    assert r.nilpotent


def test_isotropy():
    g = sl(3)
    ok, _ = bilinear_isotropy(span(g, []), trace_form)
    assert ok
    ok, _ = bilinear_isotropy(strictly_upper_sl(3, g), trace_form)
    assert ok
    Hs = span(g, [np.diag([1, -1, 0]).astype(complex)])
    ok, wit = bilinear_isotropy(Hs, trace_form)
    assert not ok
    assert wit[2] == pytest.approx(2.0)
