"""Reductive pairs, the twistor and complexified models, and invariant geometry
at the base point: Nijenhuis tensors, Nomizu maps, nearly Kaehler analysis.

Vectors in ``m`` are handled as coordinate arrays in the ``m`` basis of the
pair; operators on ``m`` (complex structures, Nomizu maps) are real matrices
in those coordinates.  Bilinear maps on ``m`` use the layout ``T[a, b, k]``
of :mod:`plurifold.tensors`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bicomplex import Bicomplex
from .linalg import (
    AlgebraError,
    RealLieAlgebra,
    Subspace,
    commutator,
    elementary,
    sl,
    so_basis,
    span,
    u_basis,
)
from .tensors import standard_complex_structure

INCLUSION_TOL = 1e-12


class ModelError(ValueError):
    pass


def _stack_subspace(alg: RealLieAlgebra, parts: list[Subspace], name: str) -> Subspace:
    coords = np.vstack([p.coords for p in parts]) if parts else np.zeros((0, alg.dim))
    U = coords.T
    G = alg.gram()
    P = U @ np.linalg.solve(U.T @ G @ U, U.T @ G) if U.shape[1] else np.zeros((alg.dim,) * 2)
    return Subspace(alg, coords, P, name)


class ReductivePair:
    """Decomposition ``g = h + m`` with ``[h, m] in m``."""

    def __init__(self, g: RealLieAlgebra, h: Subspace, m: Subspace, name: str = "",
                 tol: float = INCLUSION_TOL):
        if h.dim + m.dim != g.dim:
            raise ModelError(f"dim h + dim m = {h.dim + m.dim} != dim g = {g.dim}")
        T = np.vstack([h.coords, m.coords]).T
        if np.linalg.matrix_rank(T, tol=1e-10) != g.dim:
            raise ModelError("h and m do not span g as a direct sum")
        self.g, self.h, self.m = g, h, m
        self.name = name
        self._split = np.linalg.inv(T)
        self.inclusions = {
            "[h,h] in h": self._off_residual(h, h, "m"),
            "[h,m] in m": self._off_residual(h, m, "h"),
        }
        self.inclusions["[m,m] in h"] = self._off_residual(m, m, "m")
        if self.inclusions["[h,h] in h"] > tol or self.inclusions["[h,m] in m"] > tol:
            raise ModelError(f"not reductive: {self.inclusions}")
        self.symmetric = self.inclusions["[m,m] in h"] <= tol
        self._bracket_m = None

    def __repr__(self):
        return f"ReductivePair({self.name!r}, dim h={self.h.dim}, dim m={self.m.dim})"

    @property
    def dim_m(self) -> int:
        return self.m.dim

    # projections -----------------------------------------------------------------
    def split(self, A) -> tuple[np.ndarray, np.ndarray]:
        """``(h coordinates, m coordinates)`` of a matrix in ``g``."""
        c = self._split @ self.g.coords(A)
        return c[: self.h.dim], c[self.h.dim:]

    def split_unchecked(self, A) -> tuple[np.ndarray, np.ndarray]:
        """Like :meth:`split` after orthogonal projection onto ``g`` (for noisy inputs)."""
        c = self._split @ self.g.coords(A, check=False)
        return c[: self.h.dim], c[self.h.dim:]

    def m_coords(self, A) -> np.ndarray:
        return self.split(A)[1]

    def h_coords(self, A) -> np.ndarray:
        return self.split(A)[0]

    def proj_m(self, A) -> np.ndarray:
        return self.m.matrix(self.m_coords(A))

    def proj_h(self, A) -> np.ndarray:
        return self.h.matrix(self.h_coords(A))

    def m_matrix(self, x) -> np.ndarray:
        return self.m.matrix(x)

    def _off_residual(self, A: Subspace, B: Subspace, off: str) -> float:
        worst = 0.0
        for a in A.basis:
            for b in B.basis:
                hc, mc = self.split(commutator(a, b))
                part = self.m.matrix(mc) if off == "m" else self.h.matrix(hc)
                worst = max(worst, float(np.linalg.norm(part)))
        return worst

    # brackets on m ---------------------------------------------------------------
    def bracket_tensor(self) -> np.ndarray:
        """``C[a, b, k]``: coordinate ``k`` of ``[e_a, e_b]_m``."""
        if self._bracket_m is None:
            B = self.m.basis
            n = len(B)
            C = np.zeros((n, n, n))
            for a in range(n):
                for b in range(a + 1, n):
                    C[a, b] = self.m_coords(commutator(B[a], B[b]))
                    C[b, a] = -C[a, b]
            self._bracket_m = C
        return self._bracket_m

    def bracket_m(self, x, y) -> np.ndarray:
        return np.einsum("a,b,abk->k", x, y, self.bracket_tensor())

    def isotropy_action(self) -> list[np.ndarray]:
        """``ad(H)`` restricted to ``m`` for each basis element ``H`` of ``h``."""
        out = []
        for H in self.h.basis:
            out.append(np.stack([self.m_coords(commutator(H, E)) for E in self.m.basis], axis=1))
        return out

    def operator_on_m(self, f) -> np.ndarray:
        """Matrix (m coordinates) of a real-linear map given on matrices."""
        return np.stack([self.m_coords(f(E)) for E in self.m.basis], axis=1)


class TwistorModel(ReductivePair):
    """Reductive pair with ``m = p + v`` and complex structures on both blocks.

    The ``m`` basis lists the ``p`` basis first, then the ``v`` basis.
    """

    def __init__(self, g, h: Subspace, p: Subspace, v: Subspace, JH, JV, name: str = "",
                 tol: float = INCLUSION_TOL):
        m = _stack_subspace(g, [p, v], "m")
        super().__init__(g, h, m, name=name, tol=tol)
        self.p, self.v = p, v
        self.JH = np.asarray(JH, dtype=float)
        self.JV = np.asarray(JV, dtype=float)
        for label, J in (("JH", self.JH), ("JV", self.JV)):
            if np.max(np.abs(J @ J + np.eye(J.shape[0])), initial=0.0) > 1e-12:
                raise ModelError(f"{label}**2 != -id")
        self.inclusions["[p,v] in p"] = self._block_residual(p, v, target="p")
        if self.inclusions["[p,v] in p"] > tol:
            raise ModelError(f"[p, v] not in p: {self.inclusions['[p,v] in p']:.3e}")
        self.fiber_sign = 1

    @property
    def dim_p(self) -> int:
        return self.p.dim

    @property
    def dim_v(self) -> int:
        return self.v.dim

    @property
    def p_slice(self) -> slice:
        return slice(0, self.p.dim)

    @property
    def v_slice(self) -> slice:
        return slice(self.p.dim, self.m.dim)

    def _block_residual(self, A: Subspace, B: Subspace, target: str) -> float:
        worst = 0.0
        sl_ = self.p_slice if target == "p" else self.v_slice
        for a in A.basis:
            for b in B.basis:
                hc, mc = self.split(commutator(a, b))
                rest = mc.copy()
                rest[sl_] = 0.0
                off = self.h.matrix(hc) + self.m.matrix(rest)
                worst = max(worst, float(np.linalg.norm(off)))
        return worst

    def block_operator(self, JH, JV) -> np.ndarray:
        J = np.zeros((self.m.dim, self.m.dim))
        J[self.p_slice, self.p_slice] = JH
        J[self.v_slice, self.v_slice] = JV
        return J

    def proj_p(self, x) -> np.ndarray:
        y = np.array(x, dtype=float)
        y[self.v_slice] = 0.0
        return y

    def proj_v(self, x) -> np.ndarray:
        y = np.array(x, dtype=float)
        y[self.p_slice] = 0.0
        return y


# invariant tensors ----------------------------------------------------------------

def acs_residuals(pair: ReductivePair, J: np.ndarray) -> dict[str, float]:
    n = pair.dim_m
    res = {"square": float(np.max(np.abs(J @ J + np.eye(n))))}
    res["invariance"] = max((float(np.max(np.abs(A @ J - J @ A))) for A in pair.isotropy_action()),
                            default=0.0)
    return res


def check_acs(pair: ReductivePair, J: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    J = np.asarray(J, dtype=float)
    if J.shape != (pair.dim_m, pair.dim_m):
        raise ModelError(f"complex structure must be {pair.dim_m}x{pair.dim_m}")
    res = acs_residuals(pair, J)
    if res["square"] > tol:
        raise ModelError(f"J**2 != -id (residual {res['square']:.3e})")
    if res["invariance"] > tol:
        raise ModelError(f"J is not invariant under the isotropy (residual {res['invariance']:.3e})")
    return J


def trace_metric(pair: ReductivePair) -> np.ndarray:
    """Gram matrix of ``-Re tr(XY) / 2`` on the ``m`` basis."""
    B = np.stack(pair.m.basis)
    return -0.5 * np.einsum("aij,bji->ab", B, B).real


def twistor_metric(model: TwistorModel, t: float) -> np.ndarray:
    """Trace metric on ``p`` plus ``t`` times the trace metric on the fiber."""
    if not t > 0:
        raise ValueError(f"fiber scale must be positive, got {t}")
    G = trace_metric(model)
    P, V = model.p_slice, model.v_slice
    if G[P, V].size and np.max(np.abs(G[P, V])) > 1e-12:
        raise ModelError("horizontal and vertical blocks are not trace-orthogonal")
    G[P, V] = 0.0
    G[V, P] = 0.0
    G[V, V] *= t
    return G


def check_metric(pair: ReductivePair, G: np.ndarray, tol: float = 1e-10) -> dict:
    G = np.asarray(G, dtype=float)
    sym = float(np.max(np.abs(G - G.T)))
    s = np.linalg.svd(G, compute_uv=False)
    ev = np.linalg.eigvalsh(0.5 * (G + G.T))
    inv = max((float(np.max(np.abs(A.T @ G + G @ A))) for A in pair.isotropy_action()), default=0.0)
    if sym > tol:
        raise ModelError(f"metric not symmetric ({sym:.3e})")
    if s.min() <= tol:
        raise ModelError("metric is degenerate")
    return {"symmetry": sym, "min_singular": float(s.min()), "invariance": inv,
            "signature": (int(np.sum(ev > 0)), int(np.sum(ev < 0)))}


def nijenhuis_tensor(pair: ReductivePair, J: np.ndarray) -> np.ndarray:
    """``N(X, Y) = [JX, JY] - [X, Y] - J[X, JY] - J[JX, Y]`` with m-projected brackets."""
    C = pair.bracket_tensor()
    t1 = np.einsum("ca,db,cdk->abk", J, J, C)
    t3 = np.einsum("kl,adl,db->abk", J, C, J)
    t4 = np.einsum("kl,cbl,ca->abk", J, C, J)
    return t1 - C - t3 - t4


def nijenhuis_at_origin(pair: ReductivePair, J: np.ndarray, X, Y) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != (pair.dim_m,) or Y.shape != (pair.dim_m,):
        raise ModelError("arguments must be m-coordinate vectors")
    br = pair.bracket_m
    return br(J @ X, J @ Y) - br(X, Y) - J @ br(X, J @ Y) - J @ br(J @ X, Y)


@dataclass
class NomizuMap:
    L: np.ndarray          # L[a, b, k]: component k of Lambda(e_a) e_b
    skew_residual: float
    torsion_residual: float

    def apply(self, X, Y) -> np.ndarray:
        return np.einsum("a,b,abk->k", X, Y, self.L)

    def operator(self, X) -> np.ndarray:
        return np.einsum("a,abk->kb", X, self.L)


def nomizu_map(pair: ReductivePair, G: np.ndarray) -> NomizuMap:
    """Levi-Civita Nomizu map of an invariant metric with Gram matrix ``G``.

    ``2<L(X)Y, Z> = <[X,Y]_m, Z> - <[Y,Z]_m, X> + <[Z,X]_m, Y>``.
    """
    G = np.asarray(G, dtype=float)
    if np.linalg.svd(G, compute_uv=False).min() <= 1e-12:
        raise ModelError("singular Gram matrix")
    C = pair.bracket_tensor()
    c = np.einsum("abk,kc->abc", C, G)
    rhs = c - c.transpose(2, 0, 1) + c.transpose(1, 2, 0)
    L = 0.5 * np.einsum("kc,abc->abk", np.linalg.inv(G), rhs)
    # <L(X)Y, Z> + <Y, L(X)Z>
    lg = np.einsum("abk,kc->abc", L, G)
    skew = float(np.max(np.abs(lg + lg.transpose(0, 2, 1)), initial=0.0))
    tors = float(np.max(np.abs(L - L.transpose(1, 0, 2) - C), initial=0.0))
    return NomizuMap(L, skew, tors)


def covariant_derivative_J(nomizu: NomizuMap, J: np.ndarray) -> np.ndarray:
    """``DJ[a, b, :] = (nabla_{e_a} J) e_b = L(e_a) J e_b - J L(e_a) e_b``."""
    L = nomizu.L
    return np.einsum("db,adk->abk", J, L) - np.einsum("kl,abl->abk", J, L)


@dataclass
class NKReport:
    t: float
    nk_residual: float
    torsion: np.ndarray = field(repr=False)
    skew_residual: float
    nijenhuis_residual: float        # |N - 4T| with the bracket formula for N
    nijenhuis_lc_residual: float     # |N - 4T| with N rebuilt from nabla J
    nijenhuis_sign: int              # N(bracket formula) = sign * N(from nabla J)
    trace_residual: float
    nabla_J_norm: float
    nomizu_skew_residual: float
    nomizu_torsion_residual: float
    metric: np.ndarray = field(repr=False)

    @property
    def kahler(self) -> bool:
        return self.nabla_J_norm <= 1e-10


def _metric_for(model: ReductivePair, t: float) -> np.ndarray:
    if isinstance(model, TwistorModel):
        return twistor_metric(model, t)
    if not t > 0:
        raise ValueError(f"scale must be positive, got {t}")
    return trace_metric(model)


def nk_residual_of(DJ: np.ndarray) -> float:
    """``max |(nabla_X J)Y + (nabla_Y J)X|`` over basis pairs."""
    return float(np.max(np.linalg.norm(DJ + DJ.transpose(1, 0, 2), axis=-1), initial=0.0))


def nk_residual(model: ReductivePair, J: np.ndarray, t: float) -> float:
    lam = nomizu_map(model, _metric_for(model, t))
    return nk_residual_of(covariant_derivative_J(lam, J))


def nearly_kahler_analysis(model: ReductivePair, J: np.ndarray, t: float = 1.0) -> NKReport:
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    G = _metric_for(model, t)
    lam = nomizu_map(model, G)
    DJ = covariant_derivative_J(lam, J)
    T = np.einsum("db,adk->abk", J, DJ)  # (nabla_X J) J Y
    tau = np.einsum("abk,kc->abc", T, G)
    skew = float(max(np.max(np.abs(tau + tau.transpose(1, 0, 2)), initial=0.0),
                     np.max(np.abs(tau + tau.transpose(0, 2, 1)), initial=0.0)))
    N = nijenhuis_tensor(model, J)
    # N from the torsion-free connection:
    # (nabla_{JX} J)Y - (nabla_{JY} J)X - J(nabla_X J)Y + J(nabla_Y J)X
    DJJ = np.einsum("ca,cbk->abk", J, DJ)
    JDJ = np.einsum("kl,abl->abk", J, DJ)
    N_lc = DJJ - DJJ.transpose(1, 0, 2) - JDJ + JDJ.transpose(1, 0, 2)
    sign = 1 if np.linalg.norm(N - N_lc) <= np.linalg.norm(N + N_lc) else -1
    trace = -0.5 * np.einsum("ab,abk->k", np.linalg.inv(G), T)
    return NKReport(
        t=float(t),
        nk_residual=nk_residual_of(DJ),
        torsion=T,
        skew_residual=skew,
        nijenhuis_residual=float(np.max(np.abs(N - 4 * T), initial=0.0)),
        nijenhuis_lc_residual=float(np.max(np.abs(N_lc - 4 * T), initial=0.0)),
        nijenhuis_sign=sign,
        trace_residual=float(np.linalg.norm(trace)),
        nabla_J_norm=float(np.max(np.abs(DJ), initial=0.0)),
        nomizu_skew_residual=lam.skew_residual,
        nomizu_torsion_residual=lam.torsion_residual,
        metric=G,
    )


@dataclass
class ScanReport:
    t_star: float | None
    residual: float
    found: bool
    unique: bool
    degenerate: bool
    grid: np.ndarray = field(repr=False)
    curve: np.ndarray = field(repr=False)


def nk_parameter_scan(model: ReductivePair, J: np.ndarray, t_range=(0.05, 2.0),
                      steps: int = 81, found_tol: float = 1e-10) -> ScanReport:
    """Scan the fiber scale for the nearly Kaehler condition.

    Log-spaced grid, then bisection on the slope of the residual around the
    grid minimiser.  ``found`` requires the refined residual to reach
    ``found_tol``; ``unique`` requires a single local minimum on the grid.
    ``degenerate`` flags a minimiser where ``nabla J`` vanishes (Kaehler).
    """
    lo, hi = map(float, t_range)
    if not 0 < lo < hi:
        raise ValueError(f"invalid range {t_range}")
    grid = np.geomspace(lo, hi, steps)
    curve = np.array([nk_residual(model, J, t) for t in grid])
    if np.max(curve) <= found_tol:
        return ScanReport(None, float(np.max(curve)), True, False, True, grid, curve)
    i = int(np.argmin(curve))
    minima = [k for k in range(steps)
              if (k == 0 or curve[k] < curve[k - 1]) and (k == steps - 1 or curve[k] <= curve[k + 1])]
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, steps - 1)]
    f = lambda t: nk_residual(model, J, t)
    for _ in range(200):
        if b - a <= 4e-16 * b:
            break
        m1 = a + (b - a) / 4
        m2 = b - (b - a) / 4
        if f(m1) < f(m2):
            b = 0.5 * (a + b) if f(m1) <= f(0.5 * (a + b)) else m2
        else:
            a = 0.5 * (a + b) if f(m2) <= f(0.5 * (a + b)) else m1
    cands = [a, 0.5 * (a + b), b]
    t_star = min(cands, key=f)
    res = f(t_star)
    lam = nomizu_map(model, _metric_for(model, t_star))
    kahler = float(np.max(np.abs(covariant_derivative_J(lam, J)))) <= found_tol
    return ScanReport(float(t_star), float(res), res <= found_tol, len(minima) == 1, kahler, grid, curve)


@dataclass
class TorsionPredicates:
    vv_zero: bool
    vv_residual: float
    vv_witness: tuple[int, int] | None
    pp_in_v: bool
    pp_residual: float
    pv_in_p: bool
    pv_residual: float
    pv_nonzero: bool
    pv_norm: float
    pv_witness: tuple[int, int] | None
    pp_spans_v: bool


def special_torsion_analysis(model: TwistorModel, T: np.ndarray, tol: float = 1e-10) -> TorsionPredicates:
    T = np.asarray(T, dtype=float)
    n = model.dim_m
    if T.shape != (n, n, n):
        raise ModelError(f"torsion must have shape {(n, n, n)}")
    if np.max(np.abs(T + T.transpose(1, 0, 2))) > tol:
        raise ModelError("torsion is not antisymmetric")
    P = list(range(model.dim_p))
    V = list(range(model.dim_p, n))
    norms = np.linalg.norm(T, axis=-1)

    def worst(block, rows, cols):
        if not rows or not cols:
            return 0.0, None
        sub = block[np.ix_(rows, cols)]
        k = np.unravel_index(int(np.argmax(sub)), sub.shape)
        return float(sub[k]), (rows[k[0]], cols[k[1]])

    vv, vv_w = worst(norms, V, V)
    pp, _ = worst(np.linalg.norm(T[..., P], axis=-1), P, P)
    pv_off, _ = worst(np.linalg.norm(T[..., V], axis=-1), P, V)
    pv, pv_w = worst(norms, P, V)
    vals = T[np.ix_(P, P, V)].reshape(-1, len(V)) if P and V else np.zeros((0, len(V)))
    rank = np.linalg.matrix_rank(vals, tol=1e-8) if vals.size else 0
    return TorsionPredicates(
        vv_zero=vv <= tol, vv_residual=vv, vv_witness=vv_w if vv > tol else None,
        pp_in_v=pp <= tol, pp_residual=pp,
        pv_in_p=pv_off <= tol, pv_residual=pv_off,
        pv_nonzero=pv > tol, pv_norm=pv, pv_witness=pv_w if pv > tol else None,
        pp_spans_v=rank == len(V),
    )


def symmetric_curvature(pair: ReductivePair, X, Y, Z):
    """``R(X, Y)Z = -[[X, Y], Z]`` projected to ``m``.

    Inputs are matrices or :class:`Bicomplex` pairs of matrices (then the
    result is the eps-trilinear extension).
    """
    if not pair.symmetric:
        raise ModelError("curvature formula needs a symmetric pair")
    if isinstance(X, Bicomplex) or isinstance(Y, Bicomplex) or isinstance(Z, Bicomplex):
        X, Y, Z = (w if isinstance(w, Bicomplex) else Bicomplex.real(np.asarray(w, dtype=complex))
                   for w in (X, Y, Z))
        from .bicomplex import bracket
        return (-bracket(bracket(X, Y), Z)).map(pair.proj_m)
    return -pair.proj_m(commutator(commutator(X, Y), Z))


# models ------------------------------------------------------------------------------

def _embed_lower(A: np.ndarray, size: int) -> np.ndarray:
    k = A.shape[0]
    M = np.zeros((size, size), dtype=complex)
    M[size - k:, size - k:] = A
    return M


def _operator(sub: Subspace, f) -> np.ndarray:
    return np.stack([sub.local_coords(f(E)) for E in sub.basis], axis=1) if sub.dim else np.zeros((0, 0))


def _orient_fiber(model: TwistorModel) -> TwistorModel:
    """Fix the sign of the fiber structure so that ``J1 = JV + JH`` is integrable at o."""
    for sign in (1, -1):
        J1 = model.block_operator(model.JH, sign * model.JV)
        if np.max(np.abs(nijenhuis_tensor(model, J1)), initial=0.0) <= 1e-10:
            model.JV = sign * model.JV
            model.fiber_sign = sign
            return model
    raise ModelError("no fiber orientation makes J1 integrable at the base point")


def build_complexified_pair(p: int, q: int) -> ReductivePair:
    """``sl(p+q, C) = su(p,q) + i su(p,q)`` split by ``A -> I A^h I``."""
    n = p + q
    if p < 0 or q < 0 or n < 2:
        raise ModelError("complexified pair needs p, q >= 0 and p + q >= 2")
    g = sl(n)
    I = np.diag([1.0] * p + [-1.0] * q)
    sigma = lambda A: I @ np.conj(A).T @ I
    hg = [0.5 * (A - sigma(A)) for A in g.basis]
    mg = [0.5 * (A + sigma(A)) for A in g.basis]
    h = span(g, hg, complement=mg, name=f"su({p},{q})")
    m = span(g, mg, complement=hg, name=f"i su({p},{q})")
    pair = ReductivePair(g, h, m, name=f"complexified-su:{p}:{q}")
    pair.signature = (p, q)
    pair.I_pq = I
    pair.sigma = sigma
    return pair


def build_s2n_twistor(n: int) -> TwistorModel:
    """``so(2n+1) = u(n) + (p + v)``, the twistor space of ``S^{2n}``."""
    if n < 2:
        raise ModelError("twistor model of S^{2n} needs n >= 2")
    d = 2 * n + 1
    g = RealLieAlgebra(so_basis(d), name=f"so({d})")
    J0 = standard_complex_structure(2 * n)
    X = lambda w: _embed_p(w, d)
    pg = [X(e) for e in np.eye(2 * n)]
    low = [_embed_lower(A, d) for A in so_basis(2 * n)]
    block = lambda M: M[1:, 1:]
    comm = [_embed_lower(0.5 * (block(A) - J0 @ block(A) @ J0), d) for A in low]
    anti = [_embed_lower(0.5 * (block(A) + J0 @ block(A) @ J0), d) for A in low]
    p = span(g, pg, name="p")
    h = span(g, comm, name=f"u({n})")
    v = span(g, anti, name="fiber")
    JH = _operator(p, lambda M: X(J0 @ _p_vector(M)))
    JV = _operator(v, lambda M: _embed_lower(J0 @ block(M), d))
    model = TwistorModel(g, h, p, v, JH, JV, name=f"s2n-twistor:{n}")
    model.J0 = J0
    return _orient_fiber(model)


def _embed_p(w, d: int) -> np.ndarray:
    M = np.zeros((d, d), dtype=complex)
    M[0, 1:] = np.conj(w)
    M[1:, 0] = -np.asarray(w)
    return M


def _p_vector(M: np.ndarray) -> np.ndarray:
    return -M[1:, 0]


def build_cpn_flag(n: int, r: int) -> TwistorModel:
    """``u(n+1) = (u(r) + u(1) + u(n-r)) + (p + v)``, the twistor space ``Z_r(CP^n)``.

    Index 0 carries the ``u(1)``; indices ``1..r`` and ``r+1..n`` the two blocks.
    The fiber is ``{A in M(r, n-r, C)}`` placed off-diagonally in ``u(n)``.
    """
    if n < 1 or not 1 <= r <= n:
        raise ModelError(f"need n >= 1 and 1 <= r <= n, got n={n}, r={r}")
    s = n - r
    d = n + 1
    g = RealLieAlgebra(u_basis(d), name=f"u({d})")
    jvec = np.array([1j] * r + [-1j] * s)
    pg = []
    for k in range(n):
        for c in (1.0, 1j):
            w = np.zeros(n, dtype=complex)
            w[k] = c
            pg.append(_embed_p(w, d))
    R = list(range(1, r + 1))
    S = list(range(r + 1, d))

    def fiber_el(A: np.ndarray) -> np.ndarray:
        M = np.zeros((d, d), dtype=complex)
        M[np.ix_(R, S)] = A
        M[np.ix_(S, R)] = -np.conj(A).T
        return M

    vg = []
    for i in range(r):
        for j in range(s):
            for c in (1.0, 1j):
                A = np.zeros((r, s), dtype=complex)
                A[i, j] = c
                vg.append(fiber_el(A))
    hg = [1j * elementary(d, k, k) for k in range(d)]
    for blk in (R, S):
        for a_ in range(len(blk)):
            for b_ in range(a_ + 1, len(blk)):
                i, j = blk[a_], blk[b_]
                hg.append(elementary(d, i, j) - elementary(d, j, i))
                hg.append(1j * (elementary(d, i, j) + elementary(d, j, i)))
    p = span(g, pg, name="p")
    v = span(g, vg, name="fiber")
    h = span(g, hg, name=f"u({r})+u(1)+u({s})")
    JH = _operator(p, lambda M: _embed_p(jvec * _p_vector(M), d))
    JV = _operator(v, lambda M: fiber_el(1j * M[np.ix_(R, S)])) if v.dim else np.zeros((0, 0))
    model = TwistorModel(g, h, p, v, JH, JV, name=f"cpn-flag:{n}:{r}")
    return _orient_fiber(model)


def build_hermitian_fiber(n: int) -> tuple[ReductivePair, np.ndarray]:
    """Hermitian symmetric pair ``so(2n) = u(n) + v`` with ``J(A) = J0 A``."""
    if n < 1:
        raise ModelError("need n >= 1")
    g = RealLieAlgebra(so_basis(2 * n), name=f"so({2 * n})")
    J0 = standard_complex_structure(2 * n)
    h = span(g, [0.5 * (A - J0 @ A @ J0) for A in g.basis], name=f"u({n})")
    m = span(g, [0.5 * (A + J0 @ A @ J0) for A in g.basis], name="v")
    pair = ReductivePair(g, h, m, name=f"so({2 * n})/u({n})")
    return pair, pair.operator_on_m(lambda A: J0 @ A)


def build_abelian_twistor() -> TwistorModel:
    """Flat toy model: diagonal ``u(1)^4`` with trivial isotropy."""
    g = RealLieAlgebra([1j * elementary(4, k, k) for k in range(4)], name="u(1)^4")
    h = span(g, [], name="0")
    p = span(g, g.basis[:2], name="p")
    v = span(g, g.basis[2:], name="fiber")
    J = standard_complex_structure(2)
    return TwistorModel(g, h, p, v, J, J, name="abelian")


def build_model(descriptor: str) -> ReductivePair:
    """Parse ``s2n-twistor:n``, ``cpn-flag:n:r``, ``complexified-su:p:q`` or ``abelian-twistor``."""
    name, *params = descriptor.split(":")
    try:
        args = [int(x) for x in params]
    except ValueError:
        raise ModelError(f"non-integer parameter in model {descriptor!r}") from None
    builders = {
        "s2n-twistor": (build_s2n_twistor, 1),
        "cpn-flag": (build_cpn_flag, 2),
        "complexified-su": (build_complexified_pair, 2),
        "abelian-twistor": (build_abelian_twistor, 0),
    }
    if name not in builders:
        raise ModelError(f"unknown model {name!r}")
    fn, nargs = builders[name]
    if len(args) != nargs:
        raise ModelError(f"model {name!r} takes {nargs} parameter(s), got {len(args)}")
    try:
        return fn(*args)
    except AlgebraError as exc:
        raise ModelError(str(exc)) from exc
