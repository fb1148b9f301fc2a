"""Involutions of SL(p+q, C) and the Cartan embedding of SL(p+q, C)/SU(p,q).

Two embeddings are provided.  ``"adjoint"`` is ``g I conj(g)^T I``, which is
constant on cosets ``gH``.  ``"inverse-adjoint"`` is ``g I (conj(g)^T)^{-1} I``,
which is not; :func:`coset_invariance_test` reports the failure with a witness.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import matrix_exponential

VARIANTS = ("inverse-adjoint", "adjoint")


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class SignatureForm:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.p + self.q == 0:
            raise EmbeddingError(f"invalid signature ({self.p}, {self.q})")

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def I_pq(self) -> np.ndarray:
        return np.diag([1.0] * self.p + [-1.0] * self.q).astype(complex)


def _square(sig: SignatureForm, g) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    if g.shape != (sig.n, sig.n):
        raise EmbeddingError(f"expected a {sig.n}x{sig.n} matrix, got shape {g.shape}")
    return g


def sigma_map(sig: SignatureForm, g) -> np.ndarray:
    g = _square(sig, g)
    I = sig.I_pq
    return I @ g.conj().T @ I


def _check_invertible(g: np.ndarray, what: str = "g"):
    if abs(np.linalg.det(g)) < 1e-12 or np.linalg.cond(g) > 1e12:
        raise EmbeddingError(f"{what} is singular")


def cartan_embed(sig: SignatureForm, g, variant: str = "adjoint") -> np.ndarray:
    g = _square(sig, g)
    if variant not in VARIANTS:
        raise EmbeddingError(f"unknown variant {variant!r}")
    _check_invertible(g)
    I = sig.I_pq
    gh = g.conj().T
    if variant == "inverse-adjoint":
        return g @ I @ np.linalg.inv(gh) @ I
    return g @ I @ gh @ I


def assemble_borel(sig: SignatureForm, A1, C, A2) -> np.ndarray:
    A1 = np.atleast_2d(np.asarray(A1, dtype=complex))
    A2 = np.atleast_2d(np.asarray(A2, dtype=complex))
    C = np.asarray(C, dtype=complex).reshape(sig.p, sig.q)
    if A1.shape != (sig.p, sig.p) or A2.shape != (sig.q, sig.q):
        raise EmbeddingError("block sizes do not match the signature")
    return np.block([[A1, C], [np.zeros((sig.q, sig.p)), A2]])


def block_closed_form(sig: SignatureForm, A1, C, A2, variant: str = "inverse-adjoint") -> np.ndarray:
    """Two-factor block product for ``b = [[A1, C], [0, A2]]``.

    inverse-adjoint: ``[[A1, -C], [0, -A2]] @ inv([[A1^*, 0], [-C^*, -A2^*]])``
    adjoint:         ``[[A1, -C], [0, -A2]] @ [[A1^*, 0], [C^*, -A2^*]]``
    """
    if variant not in VARIANTS:
        raise EmbeddingError(f"unknown variant {variant!r}")
    b = assemble_borel(sig, A1, C, A2)
    A1, A2 = b[: sig.p, : sig.p], b[sig.p:, sig.p:]
    C = b[: sig.p, sig.p:]
    for blk, name in ((A1, "A1"), (A2, "A2")):
        if np.any(np.tril(blk, -1)):
            raise EmbeddingError(f"{name} must be upper triangular")
        _check_invertible(blk, name)
    if abs(np.linalg.det(b) - 1) > 1e-10:
        raise EmbeddingError("assembled element does not have determinant 1")
    Zpq = np.zeros((sig.p, sig.q))
    left = np.block([[A1, -C], [Zpq.T, -A2]])
    if variant == "inverse-adjoint":
        right = np.block([[A1.conj().T, Zpq], [-C.conj().T, -A2.conj().T]])
        return left @ np.linalg.inv(right)
    right = np.block([[A1.conj().T, Zpq], [C.conj().T, -A2.conj().T]])
    return left @ right


def sl2_inverse_adjoint_formula(a1: complex, c: complex, a2: complex) -> np.ndarray:
    """Closed form of the inverse-adjoint variant on ``[[a1, c], [0, a2]]`` with ``a1 a2 = 1``."""
    return np.array([[a1 * np.conj(a2) + abs(c) ** 2, c * np.conj(a1)],
                     [a2 * np.conj(c), a2 * np.conj(a1)]])


# sampling -----------------------------------------------------------------------

def random_su(sig: SignatureForm, rng: np.random.Generator, max_norm: float = 2.0) -> np.ndarray:
    """Random element of su(p,q) (``sigma(A) = -A``, traceless) with Frobenius norm <= max_norm."""
    n = sig.n
    Y = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    A = 0.5 * (Y - sigma_map(sig, Y))
    A -= np.trace(A) / n * np.eye(n)
    return A * (max_norm * rng.uniform(0.1, 1.0) / np.linalg.norm(A))


def random_SU(sig: SignatureForm, rng: np.random.Generator) -> np.ndarray:
    return matrix_exponential(random_su(sig, rng))


def random_SL(sig: SignatureForm, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    n = sig.n
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    X -= np.trace(X) / n * np.eye(n)
    return matrix_exponential(scale * X / np.linalg.norm(X))


def random_borel(sig: SignatureForm, rng: np.random.Generator):
    """Blocks ``(A1, C, A2)`` of a random upper-triangular element of determinant 1."""
    n = sig.n
    d = np.exp(rng.normal(scale=0.5, size=n) + 1j * rng.uniform(-np.pi, np.pi, n))
    d[-1] = 1.0 / np.prod(d[:-1])
    U = np.triu(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), 1)
    b = np.diag(d) + U
    return b[: sig.p, : sig.p], b[: sig.p, sig.p:], b[sig.p:, sig.p:]


def diagonal_unitary_witness(sig: SignatureForm, theta: float = np.pi / 4) -> np.ndarray:
    """``diag(e^{i theta}, e^{-i theta}, 1, ...)`` in SU(p,q)."""
    d = np.ones(sig.n, dtype=complex)
    d[0] = np.exp(1j * theta)
    d[-1] = np.exp(-1j * theta)
    return np.diag(d)


@dataclass
class CosetReport:
    variant: str
    p: int
    q: int
    n_samples: int
    max_deviation: float
    passed: bool
    witness: dict | None
    tol: float


def coset_invariance_test(sig: SignatureForm, variant: str = "adjoint", n_samples: int = 100,
                          seed: int = 0, tol: float = 1e-10) -> CosetReport:
    """Max of ``|Psi(g h) - Psi(g)|`` over random ``g`` in SL and ``h`` in SU(p,q).

    The diagonal-unitary pair ``(g, h) = (I, diag(e^{i pi/4}, ..., e^{-i pi/4}))``
    is always included as the first sample.
    """
    if n_samples < 1:
        raise EmbeddingError("need at least one sample")
    rng = np.random.default_rng(seed)
    samples = [(np.eye(sig.n, dtype=complex), diagonal_unitary_witness(sig))]
    while len(samples) < n_samples:
        samples.append((random_SL(sig, rng), random_SU(sig, rng)))
    worst, wit = -1.0, None
    for g, h in samples:
        dev = float(np.linalg.norm(cartan_embed(sig, g @ h, variant) - cartan_embed(sig, g, variant)))
        if dev > worst:
            worst, wit = dev, {"g": g, "h": h, "deviation": dev}
    passed = worst <= tol
    return CosetReport(variant, sig.p, sig.q, n_samples, worst, passed, None if passed else wit, tol)
