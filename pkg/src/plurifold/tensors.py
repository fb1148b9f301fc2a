"""Pointwise tensor calculus on a real vector space with a complex structure.

Vector-valued bilinear maps (and difference tensors ``S_X Y``) are stored as
arrays ``T[a, b, k]``: component ``k`` of ``T(e_a, e_b)``.  Complexified
vectors are :class:`~plurifold.bicomplex.Bicomplex` pairs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bicomplex import Bicomplex

ACS_TOL = 1e-12


def standard_complex_structure(dim: int) -> np.ndarray:
    """Interleaved block structure ``diag([[0, -1], [1, 0]], ...)``."""
    if dim % 2 or dim < 2:
        raise ValueError(f"complex structure needs an even dimension, got {dim}")
    J = np.zeros((dim, dim))
    for k in range(0, dim, 2):
        J[k + 1, k] = 1.0
        J[k, k + 1] = -1.0
    return J


@dataclass(frozen=True)
class ACSSpace:
    J: np.ndarray

    def __post_init__(self):
        J = np.asarray(self.J, dtype=float)
        object.__setattr__(self, "J", J)
        n = J.shape[0]
        if J.shape != (n, n) or n % 2 or n == 0:
            raise ValueError(f"J must be an even-dimensional square operator, got {J.shape}")
        res = np.max(np.abs(J @ J + np.eye(n)))
        if res > ACS_TOL * max(1.0, np.max(np.abs(J)) ** 2):
            raise ValueError(f"J**2 != -id (residual {res:.3e})")

    @property
    def dim(self) -> int:
        return self.J.shape[0]

    @classmethod
    def standard(cls, dim: int) -> "ACSSpace":
        return cls(standard_complex_structure(dim))

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator) -> "ACSSpace":
        """A conjugate ``P J0 P^-1`` of the standard structure."""
        while True:
            P = rng.uniform(-1, 1, (dim, dim)) + 2 * np.eye(dim)
            if np.linalg.cond(P) < 50:
                break
        return cls(P @ standard_complex_structure(dim) @ np.linalg.inv(P))

    def projector(self, which: str) -> Bicomplex:
        """``(id -+ eps J) / 2`` as a bicomplex operator."""
        half = 0.5 * np.eye(self.dim)
        if which == "1,0":
            return Bicomplex(half, -0.5 * self.J)
        if which == "0,1":
            return Bicomplex(half, 0.5 * self.J)
        raise ValueError(f"unknown type {which!r}; expected '1,0' or '0,1'")


def _check_vec(space: ACSSpace, v: Bicomplex):
    if np.shape(v.re)[0] != space.dim or np.shape(v.im)[0] != space.dim:
        raise ValueError("vector dimension does not match the space")


def type_project(space: ACSSpace, v: Bicomplex, which: str) -> Bicomplex:
    _check_vec(space, v)
    return space.projector(which) @ v


def apply_J(space: ACSSpace, v: Bicomplex) -> Bicomplex:
    return v.map(lambda x: space.J @ x)


def eval_bilinear(T: np.ndarray, x: Bicomplex, y: Bicomplex) -> Bicomplex:
    """eps-bilinear extension of ``T`` evaluated at ``(x, y)``.

    ``x`` and ``y`` may hold single vectors or matrices whose columns are
    vectors; in the latter case the result is indexed ``[col_x, col_y, k]``.
    """
    if np.ndim(x.re) == 1:
        f = lambda a, b: np.einsum("i,j,ijk->k", a, b, T)
    else:
        f = lambda a, b: np.einsum("ia,jb,ijk->abk", a, b, T)
    return Bicomplex(f(x.re, y.re) - f(x.im, y.im), f(x.re, y.im) + f(x.im, y.re))


def mixed_values(space: ACSSpace, B: np.ndarray) -> Bicomplex:
    """``B(P' e_a, P'' e_b)`` for all basis pairs, indexed ``[a, b, k]``."""
    if B.shape[0] != space.dim or B.shape[1] != space.dim:
        raise ValueError("bilinear map does not match the space dimension")
    return eval_bilinear(B, space.projector("1,0"), space.projector("0,1"))


def one_one_part(space: ACSSpace, B: np.ndarray):
    """Evaluator ``(Z, Wbar) -> B(Z^{1,0}, Wbar^{0,1})`` of the eps-bilinear extension."""
    if B.shape[0] != space.dim or B.shape[1] != space.dim:
        raise ValueError("bilinear map does not match the space dimension")
    P1 = space.projector("1,0")
    P2 = space.projector("0,1")

    def evaluate(Z: Bicomplex, Wbar: Bicomplex) -> Bicomplex:
        _check_vec(space, Z)
        _check_vec(space, Wbar)
        return eval_bilinear(B, P1 @ Z, P2 @ Wbar)

    return evaluate


def one_one_tensor(space: ACSSpace, B: np.ndarray) -> np.ndarray:
    """The real (1,1)-component of ``B``: ``B(P'X, P''Y) + B(P''X, P'Y)``."""
    m = mixed_values(space, B)
    # the second term is the eps-conjugate of the first
    return 2.0 * m.re


def one_one_norm(space: ACSSpace, B: np.ndarray) -> tuple[float, tuple[int, int]]:
    m = mixed_values(space, B)
    norms = np.sqrt(np.sum(m.re ** 2 + m.im ** 2, axis=-1))
    idx = np.unravel_index(int(np.argmax(norms)), norms.shape)
    return float(norms[idx]), (int(idx[0]), int(idx[1]))


def alternation(S: np.ndarray) -> np.ndarray:
    """``alt(S)(X, Y) = S_X Y - S_Y X``."""
    S = np.asarray(S)
    return S - S.transpose(1, 0, 2)


def endomorphisms(S: np.ndarray) -> np.ndarray:
    """``M[a]``: matrix of ``S_{e_a}``."""
    return np.asarray(S).transpose(0, 2, 1)


def from_endomorphisms(M: np.ndarray) -> np.ndarray:
    return np.asarray(M).transpose(0, 2, 1)


@dataclass
class NCReport:
    j_linear: bool
    j_linear_residual: float
    alt_one_one_residual: float
    mixed_residual: float
    alt_one_one_zero: bool
    mixed_zero: bool
    member: bool
    agree: bool
    witness: tuple[int, int] | None
    tol: float


def nc_membership(space: ACSSpace, S: np.ndarray, tol: float = 1e-9) -> NCReport:
    """Membership of a difference tensor in the Nijenhuis-type connection space.

    Checks J-linearity of every ``S_X``, the vanishing of ``alt(S)^{1,1}``
    and, independently, ``S_Z Wbar = 0`` over a (1,0) basis.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (space.dim,) * 3:
        raise ValueError(f"difference tensor must have shape {(space.dim,) * 3}")
    M = endomorphisms(S)
    jres = float(np.max(np.abs(M @ space.J - space.J @ M)))
    alt_res, _ = one_one_norm(space, alternation(S))
    mixed_res, wit = one_one_norm(space, S)
    alt_zero = alt_res <= tol
    mixed_zero = mixed_res <= tol
    j_lin = jres <= tol
    return NCReport(
        j_linear=j_lin,
        j_linear_residual=jres,
        alt_one_one_residual=alt_res,
        mixed_residual=mixed_res,
        alt_one_one_zero=alt_zero,
        mixed_zero=mixed_zero,
        member=j_lin and alt_zero,
        agree=alt_zero == mixed_zero,
        witness=None if mixed_zero else wit,
        tol=tol,
    )


# generators of test tensors ----------------------------------------------------

def random_tensor(dim: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, (dim, dim, dim))


def make_j_linear(space: ACSSpace, S: np.ndarray) -> np.ndarray:
    """Project every ``S_X`` onto the J-commuting endomorphisms."""
    J = space.J
    M = endomorphisms(S)
    return from_endomorphisms(0.5 * (M - J @ M @ J))


def _shift(space: ACSSpace, M: np.ndarray) -> np.ndarray:
    """``X -> J S_{JX}`` as a stack of endomorphisms."""
    MJ = np.einsum("ac,akb->ckb", space.J, M)
    return space.J @ MJ


def complex_linear_part(space: ACSSpace, S: np.ndarray) -> np.ndarray:
    """``S_X -> (S_X - J S_{JX}) / 2``; lands in the connection space for J-linear S."""
    M = endomorphisms(S)
    return from_endomorphisms(0.5 * (M - _shift(space, M)))


def antilinear_part(space: ACSSpace, S: np.ndarray) -> np.ndarray:
    M = endomorphisms(S)
    return from_endomorphisms(0.5 * (M + _shift(space, M)))


def planted_nonmember(space: ACSSpace, index: int = 0) -> np.ndarray:
    """``S_X = f(X) id + f(JX) J`` with ``f`` the ``index``-th coordinate functional.

    Every ``S_X`` commutes with J, but ``S_Z Wbar = (f(X) - eps f(JX)) Wbar``
    for ``Z = X - eps JX``.
    """
    n = space.dim
    f = np.zeros(n)
    f[index] = 1.0
    fJ = space.J.T @ f  # fJ(X) = f(JX)
    M = np.einsum("a,kb->akb", f, np.eye(n)) + np.einsum("a,kb->akb", fJ, space.J)
    return from_endomorphisms(M)
