import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurifold.cartan import (
    EmbeddingError,
    SignatureForm,
    assemble_borel,
    block_closed_form,
    cartan_embed,
    coset_invariance_test,
    diagonal_unitary_witness,
    random_borel,
    random_SL,
    random_SU,
    random_su,
    sigma_map,
    sl2_inverse_adjoint_formula,
)

S11, S21 = SignatureForm(1, 1), SignatureForm(2, 1)
seeds = st.integers(0, 2 ** 32 - 1)


def test_signature_form():
    assert np.array_equal(S21.I_pq, np.diag([1, 1, -1]))
    assert np.array_equal(S21.I_pq @ S21.I_pq, np.eye(3))
    with pytest.raises(EmbeddingError):
        SignatureForm(0, 0)


def test_sigma_examples():
    assert np.array_equal(sigma_map(S11, np.eye(2)), np.eye(2))
    h = diagonal_unitary_witness(S11, 0.7)
    assert np.allclose(sigma_map(S11, h), h.conj().T)
    assert np.allclose(sigma_map(S11, h), np.linalg.inv(h))
    with pytest.raises(EmbeddingError):
        sigma_map(S11, np.eye(3))


@settings(max_examples=50, deadline=None)
@given(seeds, st.sampled_from([S11, S21]))
def test_sigma_involutive_antimultiplicative(seed, sig):
    rng = np.random.default_rng(seed)
    a, b = (rng.normal(size=(sig.n, sig.n)) + 1j * rng.normal(size=(sig.n, sig.n)) for _ in range(2))
    assert np.max(np.abs(sigma_map(sig, sigma_map(sig, a)) - a)) <= 1e-12
    assert np.allclose(sigma_map(sig, a @ b), sigma_map(sig, b) @ sigma_map(sig, a), atol=1e-12)


def test_embedding_of_identity():
    for v in ("inverse-adjoint", "adjoint"):
        assert np.allclose(cartan_embed(S21, np.eye(3), v), np.eye(3))


def test_singular_rejected():
    with pytest.raises(EmbeddingError):
        cartan_embed(S11, np.zeros((2, 2)))
    with pytest.raises(EmbeddingError):
        cartan_embed(S11, np.eye(2), "other")


def test_sl2_inverse_adjoint_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a1 = np.exp(rng.normal() + 1j * rng.uniform(-3, 3))
        a2 = 1 / a1
        c = complex(*rng.normal(size=2))
        b = np.array([[a1, c], [0, a2]])
        # entries written out by hand, independent of the block formula
        expected = np.array([[a1 * np.conj(a2) + abs(c) ** 2, c * np.conj(a1)],
                             [a2 * np.conj(c), a2 * np.conj(a1)]])
        assert np.allclose(cartan_embed(S11, b, "inverse-adjoint"), expected, atol=1e-10)
        assert np.allclose(sl2_inverse_adjoint_formula(a1, c, a2), expected)


def test_diagonal_witness():
    h = diagonal_unitary_witness(S11)
    assert np.allclose(cartan_embed(S11, h, "inverse-adjoint"), np.diag([1j, -1j]))
    assert np.allclose(cartan_embed(S11, h, "adjoint"), np.eye(2))
    assert np.linalg.norm(cartan_embed(S11, h, "inverse-adjoint") - np.eye(2)) >= 0.5


@pytest.mark.parametrize("sig", [S11, S21], ids=["11", "21"])
def test_block_form_agrees(sig):
    rng = np.random.default_rng(1)
    for _ in range(50):
        A1, C, A2 = random_borel(sig, rng)
        b = assemble_borel(sig, A1, C, A2)
        for v in ("inverse-adjoint", "adjoint"):
            assert np.max(np.abs(block_closed_form(sig, A1, C, A2, v) - cartan_embed(sig, b, v))) <= 1e-10


def test_block_form_unitary_diagonal():
    a1, a2 = np.exp(0.4j), np.exp(-0.4j)
    out = block_closed_form(S11, [[a1]], [[0]], [[a2]], "inverse-adjoint")
    assert np.allclose(out, np.diag([a1 / np.conj(a1), a2 / np.conj(a2)]))
    assert np.allclose(out, np.diag([a1 * a1, a2 * a2]))


def test_block_form_errors():
    with pytest.raises(EmbeddingError):
        block_closed_form(S11, [[2.0]], [[0]], [[2.0]])   # det 4
    with pytest.raises(EmbeddingError):
        block_closed_form(S21, [[1, 0], [1, 1]], [0, 0], [[1]])


def test_random_su_is_in_su():
    rng = np.random.default_rng(2)
    for sig in (S11, S21):
        A = random_su(sig, rng)
        assert np.allclose(sigma_map(sig, A), -A, atol=1e-14)
        assert abs(np.trace(A)) <= 1e-14 and np.linalg.norm(A) <= 2
        h = random_SU(sig, rng)
        assert np.allclose(h @ sig.I_pq @ h.conj().T, sig.I_pq, atol=1e-12)
        assert abs(np.linalg.det(h) - 1) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([S11, S21]))
def test_adjoint_image_properties(seed, sig):
    rng = np.random.default_rng(seed)
    g = random_SL(sig, rng)
    P = cartan_embed(sig, g, "adjoint")
    assert np.max(np.abs(sigma_map(sig, P) - P)) <= 1e-10
    assert abs(np.linalg.det(P) - 1) <= 1e-10
    h = random_SU(sig, rng)
    assert np.max(np.abs(cartan_embed(sig, g @ h, "adjoint") - P)) <= 1e-10


def test_variants_agree_on_involutive_elements():
    # conj(g)^T squared = I makes both formulas equal
    rng = np.random.default_rng(3)
    for sig in (S11, S21):
        for _ in range(10):
            Q, _ = np.linalg.qr(rng.normal(size=(sig.n, sig.n)))
            D = np.diag(rng.choice([-1.0, 1.0], sig.n))
            g = Q @ D @ Q.T  # real symmetric involution: conj(g)^T = g and g @ g = I
            assert np.allclose(g.conj().T @ g.conj().T, np.eye(sig.n))
            assert np.allclose(cartan_embed(sig, g, "inverse-adjoint"), cartan_embed(sig, g, "adjoint"), atol=1e-12)
    assert np.allclose(cartan_embed(S11, -np.eye(2), "inverse-adjoint"), cartan_embed(S11, -np.eye(2), "adjoint"))


@pytest.mark.parametrize("sig", [S11, S21], ids=["11", "21"])
def test_coset_invariance(sig):
    c = coset_invariance_test(sig, "adjoint", 100, seed=0)
    assert c.passed and c.max_deviation <= 1e-10 and c.witness is None
    p = coset_invariance_test(sig, "inverse-adjoint", 100, seed=0)
    assert not p.passed and p.max_deviation >= 0.5 and p.witness is not None
    with pytest.raises(EmbeddingError):
        coset_invariance_test(sig, n_samples=0)
