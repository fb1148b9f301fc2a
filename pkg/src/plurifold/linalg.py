"""Dense complex matrices and real Lie algebras of them.

A real Lie algebra of complex ``d x d`` matrices is handled through realified
coordinates: every matrix is flattened to ``2 d**2`` reals (real parts, then
imaginary parts) so that real forms such as su(p, q) and real spans of complex
matrices are ordinary real subspaces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

MEMBERSHIP_TOL = 1e-9
PIVOT_TOL = 1e-10


class AlgebraError(ValueError):
    """Raised for dimension mismatches, non-members and non-subalgebras."""


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise AlgebraError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise AlgebraError("matrix has non-finite entries")
    return A


def commutator(A, B) -> np.ndarray:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise AlgebraError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def matrix_exponential(A) -> np.ndarray:
    """Scaling-and-squaring Pade exponential (scipy's implementation).

    Raises ``OverflowError`` when the result is not finite.
    """
    A = as_matrix(A)
    with np.errstate(over="ignore", invalid="ignore"):
        E = scipy.linalg.expm(A)
    if not np.all(np.isfinite(E)):
        raise OverflowError("matrix exponential overflowed")
    return E


def realify(A) -> np.ndarray:
    A = np.asarray(A)
    return np.concatenate([A.real.ravel(), A.imag.ravel()])


def unrealify(v, dim: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    k = dim * dim
    return (v[:k] + 1j * v[k:]).reshape(dim, dim)


def elementary(dim: int, i: int, j: int) -> np.ndarray:
    """Matrix unit with a one in row ``i``, column ``j`` (0-based)."""
    E = np.zeros((dim, dim), dtype=complex)
    E[i, j] = 1.0
    return E


def pivoted_span(vectors: np.ndarray, tol: float = PIVOT_TOL) -> list[int]:
    """Indices of a maximal independent subset of the columns of ``vectors``.

    Column-pivoted QR; a pivot counts when ``|R_kk| > tol * max(1, |R_00|)``.
    Returned indices are sorted so the chosen generators keep their order.
    """
    vectors = np.atleast_2d(vectors)
    if vectors.size == 0 or vectors.shape[1] == 0:
        return []
    _, R, piv = scipy.linalg.qr(vectors, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return []
    rank = int(np.sum(diag > tol * max(1.0, diag[0])))
    return sorted(int(p) for p in piv[:rank])


class RealLieAlgebra:
    """Real span of complex square matrices, closed under the commutator."""

    def __init__(self, basis: Sequence, tol_closure: float = MEMBERSHIP_TOL,
                 name: str = "", check: bool = True):
        mats = [as_matrix(b) for b in basis]
        if not mats:
            raise AlgebraError("a Lie algebra needs at least one basis element")
        dim = mats[0].shape[0]
        if any(m.shape != (dim, dim) for m in mats):
            raise AlgebraError("basis matrices have different sizes")
        self.ambient_dim = dim
        self.basis = mats
        self.tol = tol_closure
        self.name = name
        self._R = np.stack([realify(m) for m in mats], axis=1)
        if np.linalg.matrix_rank(self._R, tol=PIVOT_TOL) != len(mats):
            raise AlgebraError("basis is not real-linearly independent")
        self._pinv = np.linalg.pinv(self._R)
        if check:
            res = self.closure_residual()
            if res > tol_closure:
                raise AlgebraError(f"basis not closed under bracket (residual {res:.3e})")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __repr__(self):
        return f"RealLieAlgebra({self.name or '?'}, dim={self.dim}, ambient={self.ambient_dim})"

    # coordinates -----------------------------------------------------------
    def coords(self, A, check: bool = True) -> np.ndarray:
        v = realify(as_matrix(A))
        c = self._pinv @ v
        if check:
            res = np.linalg.norm(self._R @ c - v)
            if res > self.tol * max(1.0, np.linalg.norm(v)):
                raise AlgebraError(f"matrix is not in {self.name or 'the algebra'} (residual {res:.3e})")
        return c

    def membership_residual(self, A) -> float:
        v = realify(as_matrix(A))
        return float(np.linalg.norm(self._R @ (self._pinv @ v) - v))

    def contains(self, A, tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        return self.membership_residual(A) <= tol

    def matrix(self, coords) -> np.ndarray:
        c = np.asarray(coords, dtype=float)
        return unrealify(self._R @ c, self.ambient_dim)

    def gram(self) -> np.ndarray:
        """Euclidean Gram matrix of the realified basis."""
        return self._R.T @ self._R

    # structure -------------------------------------------------------------
    def structure_constants(self) -> np.ndarray:
        """``c[i, j, k]``: coordinate ``k`` of ``[e_i, e_j]``."""
        if not hasattr(self, "_c"):
            B = np.stack(self.basis)
            br = np.einsum("iab,jbc->ijac", B, B)
            br = br - br.transpose(1, 0, 2, 3)
            flat = np.concatenate([br.real.reshape(self.dim, self.dim, -1),
                                   br.imag.reshape(self.dim, self.dim, -1)], axis=-1)
            self._c = np.einsum("kv,ijv->ijk", self._pinv, flat)
            self._bracket_flat = flat
        return self._c

    def closure_residual(self) -> float:
        c = self.structure_constants()
        recon = np.einsum("vk,ijk->ijv", self._R, c)
        return float(np.max(np.linalg.norm(recon - self._bracket_flat, axis=-1), initial=0.0))

    def ad(self, X) -> np.ndarray:
        """Matrix of ``ad X`` in the basis coordinates."""
        x = self.coords(X)
        return np.einsum("i,ijk->kj", x, self.structure_constants())

    def jacobi_residual(self) -> float:
        c = self.structure_constants()
        # [[e_i, e_j], e_k] = c_ijl c_lkm
        t = np.einsum("ijl,lkm->ijkm", c, c)
        jac = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        # coordinates may be in a non-orthonormal basis; measure matrix norms
        return float(np.max(np.linalg.norm(np.einsum("vm,ijkm->ijkv", self._R, jac), axis=-1)))


def killing_form(alg: RealLieAlgebra, X, Y) -> float:
    """``trace(ad X ad Y)`` in the algebra's own basis."""
    return float(np.trace(alg.ad(X) @ alg.ad(Y)))


@dataclass
class Subspace:
    """Real subspace of a :class:`RealLieAlgebra`.

    ``coords`` has one row per basis vector (parent coordinates).  The
    projector acts on parent coordinates, onto this subspace along
    ``complement`` (or along the Euclidean-orthogonal complement of the
    realified ambient space when no complement was declared).
    """

    parent: RealLieAlgebra
    coords: np.ndarray
    projector: np.ndarray = field(repr=False)
    name: str = ""

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    @property
    def basis(self) -> list[np.ndarray]:
        return [self.parent.matrix(c) for c in self.coords]

    def project(self, A) -> np.ndarray:
        return self.parent.matrix(self.projector @ self.parent.coords(A))

    def local_coords(self, A, check: bool = True) -> np.ndarray:
        """Coordinates of ``A`` in this subspace's basis."""
        c = self.parent.coords(A)
        if self.dim == 0:
            if check and np.linalg.norm(c) > self.parent.tol:
                raise AlgebraError("nonzero vector in the zero subspace")
            return np.zeros(0)
        x, *_ = np.linalg.lstsq(self.coords.T, c, rcond=None)
        if check:
            res = np.linalg.norm(self.parent.matrix(self.coords.T @ x) - self.parent.matrix(c))
            if res > self.parent.tol * max(1.0, np.linalg.norm(c)):
                raise AlgebraError(f"matrix not in subspace {self.name!r} (residual {res:.3e})")
        return x

    def matrix(self, local) -> np.ndarray:
        return self.parent.matrix(self.coords.T @ np.asarray(local, dtype=float))

    def distance(self, A) -> float:
        """Frobenius distance from ``A`` to the subspace (orthogonal sense)."""
        A = as_matrix(A)
        if self.dim == 0:
            return float(np.linalg.norm(A))
        R = np.stack([realify(b) for b in self.basis], axis=1)
        v = realify(A)
        x, *_ = np.linalg.lstsq(R, v, rcond=None)
        return float(np.linalg.norm(R @ x - v))

    def contains(self, A, tol: float | None = None) -> bool:
        tol = self.parent.tol if tol is None else tol
        return self.distance(A) <= tol


def _projector(parent: RealLieAlgebra, U: np.ndarray, W: np.ndarray | None) -> np.ndarray:
    """Projector (parent coordinates) onto the column span of ``U``."""
    N = parent.dim
    k = U.shape[1]
    if k == 0:
        return np.zeros((N, N))
    if W is None:
        G = parent.gram()
        return U @ np.linalg.solve(U.T @ G @ U, U.T @ G)
    M = np.hstack([U, W])
    if M.shape[1] != N or np.linalg.matrix_rank(M, tol=PIVOT_TOL) != N:
        raise AlgebraError("subspace and declared complement do not form a direct sum")
    Minv = np.linalg.inv(M)
    return U @ Minv[:k]


def span(alg: RealLieAlgebra, generators: Sequence, complement: Sequence | None = None,
         name: str = "") -> Subspace:
    """Span of ``generators`` inside ``alg`` with a projector onto it.

    Redundant generators are dropped (pivoted QR).  When ``complement`` is
    given, the projector is taken along its span.
    """
    cols = [alg.coords(g) for g in generators]
    if cols:
        C = np.stack(cols, axis=1)
        keep = pivoted_span(C)
        U = C[:, keep]
    else:
        U = np.zeros((alg.dim, 0))
    W = None
    if complement is not None:
        wc = [alg.coords(g) for g in complement]
        W = np.stack(wc, axis=1) if wc else np.zeros((alg.dim, 0))
        W = W[:, pivoted_span(W)] if W.shape[1] else W
    return Subspace(alg, U.T.copy(), _projector(alg, U, W), name)


def subspace_bracket_residual(A: Subspace, B: Subspace, target: Subspace) -> float:
    """Largest distance of ``[a, b]`` from ``target`` over basis pairs."""
    worst = 0.0
    for a in A.basis:
        for b in B.basis:
            worst = max(worst, target.distance(commutator(a, b)))
    return worst


def bracket_span(alg: RealLieAlgebra, A: Subspace, B: Subspace, name: str = "") -> Subspace:
    return span(alg, [commutator(a, b) for a in A.basis for b in B.basis], name=name)


@dataclass
class NilpotencyReport:
    derived: Subspace
    derived_series: list[int]       # dims of the lower central series of the derived algebra
    lower_central_series: list[int]  # dims of the lower central series of the input
    nilpotent: bool                  # the derived algebra's series reaches 0
    input_nilpotent: bool


def _lower_central(alg: RealLieAlgebra, sub: Subspace, max_steps: int = 64) -> list[int]:
    dims = [sub.dim]
    cur = sub
    for _ in range(max_steps):
        if cur.dim == 0:
            break
        nxt = bracket_span(alg, sub, cur)
        if nxt.dim == cur.dim:
            break
        dims.append(nxt.dim)
        cur = nxt
    return dims


def nilpotency_analysis(sub: Subspace) -> NilpotencyReport:
    alg = sub.parent
    if subspace_bracket_residual(sub, sub, sub) > alg.tol:
        raise AlgebraError("subspace is not closed under the bracket")
    derived = bracket_span(alg, sub, sub, name=f"[{sub.name},{sub.name}]")
    dseries = _lower_central(alg, derived)
    series = _lower_central(alg, sub)
    return NilpotencyReport(derived, dseries, series,
                            nilpotent=dseries[-1] == 0,
                            input_nilpotent=series[-1] == 0)


def bilinear_isotropy(sub: Subspace, form: Callable, tol: float = MEMBERSHIP_TOL):
    """Whether ``form`` vanishes on all pairs from ``sub``.

    Returns ``(True, None)`` or ``(False, (X, Y, value))`` for the worst pair.
    """
    basis = sub.basis
    worst = None
    for i, X in enumerate(basis):
        for Y in basis[i:]:
            val = form(X, Y)
            if abs(val) > tol and (worst is None or abs(val) > abs(worst[2])):
                worst = (X, Y, val)
    return worst is None, worst


def trace_form(X, Y) -> complex:
    """Complex-bilinear trace form ``tr(XY)``."""
    return complex(np.trace(np.asarray(X) @ np.asarray(Y)))


# standard algebras -----------------------------------------------------------

def sl_basis(n: int) -> list[np.ndarray]:
    """Real basis of realified sl(n, C): H_k, E_ij and their i-multiples."""
    mats = []
    for k in range(n - 1):
        mats.append(elementary(n, k, k) - elementary(n, k + 1, k + 1))
    for i in range(n):
        for j in range(n):
            if i != j:
                mats.append(elementary(n, i, j))
    return mats + [1j * m for m in mats]


def sl(n: int) -> RealLieAlgebra:
    if n < 2:
        raise AlgebraError("sl(n) needs n >= 2")
    return RealLieAlgebra(sl_basis(n), name=f"sl({n},C)")


def so_basis(n: int) -> list[np.ndarray]:
    return [elementary(n, i, j) - elementary(n, j, i)
            for i in range(n) for j in range(i + 1, n)]


def so(n: int) -> RealLieAlgebra:
    return RealLieAlgebra(so_basis(n), name=f"so({n})")


def u_basis(n: int) -> list[np.ndarray]:
    mats = [1j * elementary(n, k, k) for k in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            mats.append(elementary(n, i, j) - elementary(n, j, i))
            mats.append(1j * (elementary(n, i, j) + elementary(n, j, i)))
    return mats


def u(n: int) -> RealLieAlgebra:
    return RealLieAlgebra(u_basis(n), name=f"u({n})")


def borel_subalgebra_sl(n: int, alg: RealLieAlgebra | None = None) -> Subspace:
    """Upper-triangular traceless matrices as a real subspace of sl(n, C)."""
    if n < 2:
        raise AlgebraError("Borel subalgebra needs n >= 2")
    alg = alg if alg is not None else sl(n)
    gens = [elementary(n, k, k) - elementary(n, k + 1, k + 1) for k in range(n - 1)]
    gens += [elementary(n, i, j) for i in range(n) for j in range(i + 1, n)]
    gens += [1j * g for g in gens]
    return span(alg, gens, name=f"b({n})")


def strictly_upper_sl(n: int, alg: RealLieAlgebra | None = None) -> Subspace:
    alg = alg if alg is not None else sl(n)
    gens = [elementary(n, i, j) for i in range(n) for j in range(i + 1, n)]
    gens += [1j * g for g in gens]
    return span(alg, gens, name=f"n({n})")
