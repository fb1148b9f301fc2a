"""Framings into matrix groups and finite-difference Maurer-Cartan analysis.

A framing on a chart ``z in C^k`` is ``F(z) = exp(L(z)) (I + N(z))`` where
``L`` and ``N`` are finite sums ``coeff * matrix * prod z_i^a_i conj(z_i)^b_i``.
Real directions are indexed ``mu = 2*i`` (``x_i``) and ``mu = 2*i + 1``
(``y_i``).  Complexified values use :class:`~plurifold.bicomplex.Bicomplex`
with ``alpha(Z_i) = (alpha(d/dx_i) - eps alpha(d/dy_i)) / 2``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Callable, Sequence

import numpy as np

from .bicomplex import Bicomplex, bracket
from .homogeneous import ReductivePair
from .linalg import (
    Subspace,
    bilinear_isotropy,
    borel_subalgebra_sl,
    elementary,
    matrix_exponential,
    nilpotency_analysis,
    realify,
    trace_form,
)


class FramingError(ValueError):
    pass


def _dec(x) -> Decimal:
    if isinstance(x, Decimal):
        return x
    if isinstance(x, float):
        return Decimal(repr(x))
    return Decimal(str(x))


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"^(?P<re>[+-]?{_NUM})?(?:(?P<im>[+-]?(?:{_NUM})?)j)?$")


def _parse_complex_str(text: str) -> tuple[Decimal, Decimal]:
    """Exact parse of ``"a"``, ``"bj"`` or ``"a+bj"`` into decimal parts."""
    m = _COMPLEX_RE.match(text.replace(" ", ""))
    if not m or (m.group("re") is None and m.group("im") is None):
        raise FramingError(f"cannot parse complex coefficient {text!r}")
    re_, im = m.group("re"), m.group("im")
    if im is not None and re_ is not None and not im.startswith(("+", "-")):
        re_, im = None, re_ + im  # "2j" is a pure imaginary, not 2 + 1j
    if im in ("", "+", "-"):
        im += "1"
    return Decimal(re_ or "0"), Decimal(im or "0")


def _dec_pair(c) -> tuple[Decimal, Decimal]:
    if isinstance(c, (tuple, list)):
        return _dec(c[0]), _dec(c[1])
    if isinstance(c, str):
        return _parse_complex_str(c)
    c = complex(c)
    return _dec(c.real), _dec(c.imag)


@dataclass(frozen=True)
class Term:
    """``coeff * matrix * prod z_i^z_exp[i] * conj(z_i)^zbar_exp[i]``."""

    matrix: tuple           # rows of (re, im) Decimal pairs
    coeff: tuple[Decimal, Decimal]
    z_exp: tuple[int, ...]
    zbar_exp: tuple[int, ...]

    @classmethod
    def make(cls, matrix, coeff=1, z_exp=(1,), zbar_exp=None) -> "Term":
        M = np.asarray(matrix, dtype=complex) if not _is_decimal_matrix(matrix) else None
        if M is not None:
            rows = tuple(tuple(_dec_pair(x) for x in row) for row in M)
        else:
            rows = tuple(tuple((_dec(x[0]), _dec(x[1])) for x in row) for row in matrix)
        z_exp = tuple(int(a) for a in z_exp)
        zbar_exp = tuple(int(b) for b in (zbar_exp if zbar_exp is not None else [0] * len(z_exp)))
        if len(z_exp) != len(zbar_exp) or any(a < 0 for a in z_exp + zbar_exp):
            raise FramingError("exponent lists must have equal length and be nonnegative")
        return cls(rows, _dec_pair(coeff), z_exp, zbar_exp)

    @property
    def array(self) -> np.ndarray:
        return np.array([[complex(float(re), float(im)) for re, im in row] for row in self.matrix])

    @property
    def coefficient(self) -> complex:
        return complex(float(self.coeff[0]), float(self.coeff[1]))

    @property
    def holomorphic(self) -> bool:
        return all(b == 0 for b in self.zbar_exp)

    def monomial(self, z: np.ndarray) -> complex:
        val = self.coefficient
        for zi, a, b in zip(z, self.z_exp, self.zbar_exp):
            val *= zi ** a * np.conj(zi) ** b
        return val

    def to_dict(self) -> dict:
        return {
            "matrix": [[[str(re), str(im)] for re, im in row] for row in self.matrix],
            "coeff": [str(self.coeff[0]), str(self.coeff[1])],
            "z": list(self.z_exp),
            "zbar": list(self.zbar_exp),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Term":
        try:
            rows = tuple(tuple((Decimal(str(e[0])), Decimal(str(e[1]))) for e in row) for row in d["matrix"])
            coeff = (Decimal(str(d["coeff"][0])), Decimal(str(d["coeff"][1])))
            z = tuple(int(a) for a in d["z"])
            zbar = tuple(int(b) for b in d.get("zbar", [0] * len(z)))
        except (KeyError, IndexError, TypeError, ArithmeticError) as exc:
            raise FramingError(f"malformed term: {exc!r}") from None
        return cls(rows, coeff, z, zbar)


def _is_decimal_matrix(matrix) -> bool:
    try:
        return isinstance(matrix[0][0], (tuple, list))
    except (TypeError, IndexError):
        return False


@dataclass(frozen=True)
class Framing:
    chart_dim: int
    dim: int
    exp_terms: tuple[Term, ...] = ()
    unipotent_terms: tuple[Term, ...] = ()
    group: str = "SL"

    def __post_init__(self):
        for t in self.exp_terms + self.unipotent_terms:
            if len(t.z_exp) != self.chart_dim:
                raise FramingError("term exponents do not match the chart dimension")
            if len(t.matrix) != self.dim or any(len(r) != self.dim for r in t.matrix):
                raise FramingError("term matrix does not match the framing dimension")

    @property
    def holomorphic(self) -> bool:
        return all(t.holomorphic for t in self.exp_terms + self.unipotent_terms)

    @property
    def is_borel(self) -> bool:
        for t in self.exp_terms:
            A = t.array
            if np.any(A != np.diag(np.diag(A))) or abs(np.trace(A)) > 0:
                return False
        return all(not np.any(np.tril(t.array)) for t in self.unipotent_terms)

    def log_part(self, z) -> np.ndarray:
        L = np.zeros((self.dim, self.dim), dtype=complex)
        for t in self.exp_terms:
            L += t.monomial(z) * t.array
        return L

    def unipotent_part(self, z) -> np.ndarray:
        N = np.zeros((self.dim, self.dim), dtype=complex)
        for t in self.unipotent_terms:
            N += t.monomial(z) * t.array
        return N

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return matrix_exponential(self.log_part(z)) @ (np.eye(self.dim) + self.unipotent_part(z))

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "dim": self.dim,
            "chart_dim": self.chart_dim,
            "exp_terms": [t.to_dict() for t in self.exp_terms],
            "unipotent_terms": [t.to_dict() for t in self.unipotent_terms],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Framing":
        try:
            return cls(
                chart_dim=int(d["chart_dim"]),
                dim=int(d["dim"]),
                exp_terms=tuple(Term.from_dict(t) for t in d.get("exp_terms", [])),
                unipotent_terms=tuple(Term.from_dict(t) for t in d.get("unipotent_terms", [])),
                group=str(d.get("group", "SL")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FramingError(f"malformed framing: {exc}") from None


def _unit(k: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(k))


_DEFAULT_COEFFS = ["1", "0.7+0.3j", "-0.5+0.6j", "0.8-0.4j", "0.45+0.9j", "-0.6-0.35j",
                   "0.9+0.15j", "0.3-0.75j", "-0.85+0.2j", "0.55+0.5j"]


def borel_framing(p: int, q: int, coefficients: Sequence | None = None) -> Framing:
    """Holomorphic framing of the Borel subgroup of ``SL(p+q, C)``.

    ``L(z) = sum_k c_k z_k H_k`` (diagonal, traceless) and
    ``N(z) = sum c z E_ij`` over ``i < j``, one chart coordinate per generator.
    """
    n = p + q
    if p < 0 or q < 0 or n < 2:
        raise FramingError("Borel framing needs p + q >= 2")
    gens_l = [elementary(n, k, k) - elementary(n, k + 1, k + 1) for k in range(n - 1)]
    gens_n = [elementary(n, i, j) for i in range(n) for j in range(i + 1, n)]
    k = len(gens_l) + len(gens_n)
    if coefficients is None:
        coefficients = ["1"] * k if n == 2 else [_DEFAULT_COEFFS[i % len(_DEFAULT_COEFFS)] for i in range(k)]
    if len(coefficients) != k:
        raise FramingError(f"expected {k} coefficients, got {len(coefficients)}")
    coeffs = [_dec_pair(c) for c in coefficients]
    exp_terms = tuple(Term.make(G, c, _unit(k, i)) for i, (G, c) in enumerate(zip(gens_l, coeffs)))
    off = len(gens_l)
    uni = tuple(Term.make(G, c, _unit(k, off + i)) for i, (G, c) in enumerate(zip(gens_n, coeffs[off:])))
    F = Framing(k, n, exp_terms, uni, "SL")
    if not F.holomorphic:
        raise FramingError("Borel framing must be holomorphic")
    return F


def exp_framing(X, Y=None) -> Framing:
    """``exp(z X)``, or ``exp(z X + conj(z) Y)`` when ``Y`` is given (chart dimension 1)."""
    X = np.asarray(X, dtype=complex)
    terms = [Term.make(X, 1, (1,), (0,))]
    if Y is not None:
        terms.append(Term.make(np.asarray(Y, dtype=complex), 1, (0,), (1,)))
    return Framing(1, X.shape[0], tuple(terms), (), "SL")


def commuting_framing(X, Y) -> Framing:
    """``exp(z1 X + z2 Y)``; equals ``exp(z1 X) exp(z2 Y)`` when ``[X, Y] = 0``."""
    X = np.asarray(X, dtype=complex)
    return Framing(2, X.shape[0], (Term.make(X, 1, (1, 0)), Term.make(np.asarray(Y), 1, (0, 1))), (), "SL")


# finite differences ------------------------------------------------------------

@dataclass(frozen=True)
class FDConfig:
    step: float = 1e-4
    levels: int = 3
    seed: int = 0
    radius: float = 0.8

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("FD step must be positive")
        if self.levels < 2:
            raise ValueError("need at least two refinement levels")

    def with_step(self, step: float) -> "FDConfig":
        return FDConfig(step, self.levels, self.seed, self.radius)


def sample_points(F: Framing, n: int, seed: int = 0, radius: float = 0.8) -> list[np.ndarray]:
    """Uniform points of the polydisc; points with ``|det F| < 1e-8`` are redrawn."""
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        r = radius * np.sqrt(rng.uniform(0, 1, F.chart_dim))
        th = rng.uniform(0, 2 * np.pi, F.chart_dim)
        z = r * np.exp(1j * th)
        if abs(np.linalg.det(F(z))) >= 1e-8:
            pts.append(z)
    return pts


class _Stencil:
    """Cached evaluations of ``F`` on a lattice around ``z`` with spacing ``h``."""

    def __init__(self, F: Framing, z, h: float):
        self.F = F
        self.z = np.asarray(z, dtype=complex)
        self.h = h
        self.ndir = 2 * F.chart_dim
        self._cache: dict[tuple, np.ndarray] = {}

    def at(self, offset: dict[int, int]) -> np.ndarray:
        key = tuple(sorted((m, s) for m, s in offset.items() if s))
        if key not in self._cache:
            w = self.z.copy()
            for mu, s in key:
                w[mu // 2] += s * self.h * (1 if mu % 2 == 0 else 1j)
            self._cache[key] = self.F(w)
        return self._cache[key]

    def d1(self, mu: int, base: dict | None = None) -> np.ndarray:
        base = dict(base or {})
        up, dn = dict(base), dict(base)
        up[mu] = up.get(mu, 0) + 1
        dn[mu] = dn.get(mu, 0) - 1
        return (self.at(up) - self.at(dn)) / (2 * self.h)

    def d2(self, mu: int, nu: int) -> np.ndarray:
        h = self.h
        if mu == nu:
            return (self.at({mu: 1}) - 2 * self.at({}) + self.at({mu: -1})) / h ** 2
        return (self.at({mu: 1, nu: 1}) - self.at({mu: 1, nu: -1})
                - self.at({mu: -1, nu: 1}) + self.at({mu: -1, nu: -1})) / (4 * h ** 2)


def _step(cfg: FDConfig, z) -> float:
    return cfg.step * max(1.0, float(np.max(np.abs(z), initial=0.0)))


def _inverse(F0: np.ndarray) -> np.ndarray:
    if abs(np.linalg.det(F0)) < 1e-8:
        raise FramingError("framing is singular at the sample point")
    return np.linalg.inv(F0)


@dataclass
class PullbackSample:
    z: np.ndarray
    alpha: list[np.ndarray]           # alpha(d/dx_1), alpha(d/dy_1), ...
    alpha_z: list[Bicomplex]          # alpha(Z_i)
    alpha_zbar: list[Bicomplex]       # alpha(Zbar_i)
    membership_residual: float | None = None


def pullback_form(F: Framing, z, cfg: FDConfig = FDConfig(), algebra=None) -> PullbackSample:
    st = _Stencil(F, z, _step(cfg, z))
    Finv = _inverse(st.at({}))
    alpha = [Finv @ st.d1(mu) for mu in range(st.ndir)]
    az = [Bicomplex(0.5 * alpha[2 * i], -0.5 * alpha[2 * i + 1]) for i in range(F.chart_dim)]
    azb = [Bicomplex(0.5 * alpha[2 * i], 0.5 * alpha[2 * i + 1]) for i in range(F.chart_dim)]
    mem = None
    if algebra is not None:
        mem = max(algebra.membership_residual(a) for a in alpha)
    return PullbackSample(np.asarray(z, dtype=complex), alpha, az, azb, mem)


def _bnorm(b: Bicomplex) -> float:
    return b.norm()


def _bvec(b: Bicomplex) -> np.ndarray:
    return np.concatenate([realify(b.re), realify(b.im)])


def _proj(pair: ReductivePair, part: str):
    def f(A):
        hc, mc = pair.split_unchecked(A)
        return pair.m.matrix(mc) if part == "m" else pair.h.matrix(hc)
    return f


# Maurer-Cartan residual ------------------------------------------------------------

@dataclass
class MCResidual:
    values: np.ndarray           # (pairs, D) realified residual matrices
    max_norm: float
    mc1_values: np.ndarray | None
    mc1_max_norm: float | None
    witness: tuple[int, int] | None


def mc_residual(F: Framing, z, cfg: FDConfig = FDConfig(), pair: ReductivePair | None = None,
                perturbation: Callable | None = None) -> MCResidual:
    """``d_mu alpha_nu - d_nu alpha_mu + [alpha_mu, alpha_nu]`` by nested central differences.

    ``perturbation(w, mu)`` is added to ``alpha_mu`` at every evaluation
    point (used to plant defects).
    """
    h = _step(cfg, z)
    st = _Stencil(F, z, h)
    ndir = st.ndir
    z = np.asarray(z, dtype=complex)

    def shifted(offset):
        w = z.copy()
        for mu, s in offset.items():
            w[mu // 2] += s * h * (1 if mu % 2 == 0 else 1j)
        return w

    def alpha(nu, offset):
        a = _inverse(st.at(offset)) @ st.d1(nu, offset)
        if perturbation is not None:
            a = a + perturbation(shifted(offset), nu)
        return a

    def d(mu, nu):  # d_mu alpha_nu
        return (alpha(nu, {mu: 1}) - alpha(nu, {mu: -1})) / (2 * h)

    a0 = [alpha(nu, {}) for nu in range(ndir)]
    pm = _proj(pair, "m") if pair is not None else None
    ph = _proj(pair, "h") if pair is not None else None
    vals, vals1, idx = [], [], []
    for mu in range(ndir):
        for nu in range(mu + 1, ndir):
            dmn, dnm = d(mu, nu), d(nu, mu)
            vals.append(realify(dmn - dnm + a0[mu] @ a0[nu] - a0[nu] @ a0[mu]))
            idx.append((mu, nu))
            if pair is not None:
                r = (pm(dmn) - pm(dnm)
                     + _comm(ph(a0[mu]), pm(a0[nu])) - _comm(ph(a0[nu]), pm(a0[mu])))
                vals1.append(realify(r))
    V = np.array(vals) if vals else np.zeros((0, 2 * F.dim ** 2))
    norms = np.linalg.norm(V, axis=-1) if len(V) else np.zeros(0)
    wit = idx[int(np.argmax(norms))] if len(norms) else None
    V1 = np.array(vals1) if pair is not None and vals1 else None
    return MCResidual(V, float(norms.max(initial=0.0)), V1,
                      None if V1 is None else float(np.linalg.norm(V1, axis=-1).max(initial=0.0)), wit)


def _comm(A, B):
    return A @ B - B @ A


# pluriharmonic residual --------------------------------------------------------------

@dataclass
class PluriharmonicResidual:
    tensor: list[list[Bicomplex]] = field(repr=False)   # R[i][j] for dzbar_i ^ dz_j
    max_norm: float
    witness: tuple[int, int]
    symmetry_residual: float

    def vector(self) -> np.ndarray:
        return np.array([_bvec(R) for row in self.tensor for R in row])


def pluriharmonic_residual(F: Framing, pair: ReductivePair, z, cfg: FDConfig = FDConfig()) -> PluriharmonicResidual:
    """``R_ij = dbar_i(pi_m alpha(Z_j)) + [pi_h alpha(Zbar_i), pi_m alpha(Z_j)]``.

    The zbar-derivative uses ``dbar(F^-1 dF) = -(F^-1 dbar F)(F^-1 dF) + F^-1 dbar d F``.
    Also returns the residual of the symmetry between ``R_ij`` and its
    counterpart ``d_j(pi_m alpha(Zbar_i)) + [pi_h alpha(Z_j), pi_m alpha(Zbar_i)]``.
    """
    if pair is None or not hasattr(pair, "split_unchecked"):
        raise FramingError("a reductive pair with projectors is required")
    k = F.chart_dim
    st = _Stencil(F, z, _step(cfg, z))
    Finv = _inverse(st.at({}))
    d1 = [st.d1(mu) for mu in range(2 * k)]
    left = lambda b: Bicomplex(Finv @ b.re, Finv @ b.im)
    dz = [left(Bicomplex(0.5 * d1[2 * j], -0.5 * d1[2 * j + 1])) for j in range(k)]
    dzb = [left(Bicomplex(0.5 * d1[2 * i], 0.5 * d1[2 * i + 1])) for i in range(k)]
    pm, ph = _proj(pair, "m"), _proj(pair, "h")
    R = [[None] * k for _ in range(k)]
    worst, wit, sym = -1.0, (0, 0), 0.0
    for i in range(k):
        xi, yi = 2 * i, 2 * i + 1
        for j in range(k):
            xj, yj = 2 * j, 2 * j + 1
            second = left(Bicomplex(0.25 * (st.d2(xi, xj) + st.d2(yi, yj)),
                                    0.25 * (st.d2(yi, xj) - st.d2(xi, yj))))
            D = second - (dzb[i] @ dz[j])
            Rij = D.map(pm) + bracket(dzb[i].map(ph), dz[j].map(pm))
            Dc = second - (dz[j] @ dzb[i])
            Rc = Dc.map(pm) + bracket(dz[j].map(ph), dzb[i].map(pm))
            sym = max(sym, (Rij - Rc).norm())
            R[i][j] = Rij
            nrm = Rij.norm()
            if nrm > worst:
                worst, wit = nrm, (i, j)
    return PluriharmonicResidual(R, worst, wit, sym)


# convergence studies -----------------------------------------------------------------

@dataclass
class ConvergenceReport:
    steps: list[float]
    norms: list[float]
    slopes: list[float]
    slope: float
    extrapolated: float
    at_floor: bool
    monotone: bool


def convergence_study(evaluate: Callable[[float], np.ndarray], step: float, levels: int = 3,
                      floor: float = 1e-11) -> ConvergenceReport:
    """Run ``evaluate`` at ``step, step/2, ...`` and fit central-difference order.

    ``evaluate`` returns signed residual items, shape ``(K, D)``; the norm of a
    level is the largest item norm.  Richardson extrapolation assumes an
    ``h**2`` leading error and uses the two finest levels.  A level counts as
    rounding-limited when its norm is below ``max(floor, 10 eps / h**2)``, the
    cancellation error of a second difference quotient of unit-size data.
    """
    if levels < 2:
        raise ValueError("need at least two levels")
    steps = [step / 2 ** l for l in range(levels)]
    vals = [np.atleast_2d(np.asarray(evaluate(h), dtype=float)) for h in steps]
    norms = [float(np.max(np.linalg.norm(v, axis=-1), initial=0.0)) for v in vals]
    slopes = []
    for a, b in zip(norms, norms[1:]):
        slopes.append(float(np.log2(a / b)) if a > 0 and b > 0 else float("nan"))
    ex = (4 * vals[-1] - vals[-2]) / 3
    extrap = float(np.max(np.linalg.norm(ex, axis=-1), initial=0.0))
    eps = np.finfo(float).eps
    at_floor = all(n <= max(floor, 10 * eps / h ** 2) for n, h in zip(norms, steps))
    monotone = all(b <= a for a, b in zip(norms, norms[1:]))
    return ConvergenceReport(steps, norms, slopes, slopes[-1], extrap, at_floor, monotone)


# curvature condition ----------------------------------------------------------------

@dataclass
class CurvatureReport:
    point_norms: list[float]
    max_norm: float
    witness: tuple[int, int, int] | None           # (point index, i, j)
    nonzero_fraction: float
    n_distance: float | None                        # distance to the copy of n in h (x) C
    n_distance_image: float | None                  # distance of iota(C) to n in g
    n_isotropic: bool | None
    isotropy_witness: tuple | None
    borel: bool
    values: list[list[Bicomplex]] = field(repr=False, default_factory=list)


def _kappa(pair: ReductivePair, A: np.ndarray) -> Bicomplex:
    """``g -> h (x) C``: ``A -> pi_h A - eps i pi_m A`` (inverse of ``a + eps b -> a + i b``)."""
    hc, mc = pair.split_unchecked(A)
    return Bicomplex(pair.h.matrix(hc), -1j * pair.m.matrix(mc))


def curvature_values(F: Framing, pair: ReductivePair, z, cfg: FDConfig) -> list[Bicomplex]:
    s = pullback_form(F, z, cfg)
    pm = _proj(pair, "m")
    am = [a.map(pm) for a in s.alpha_z]
    return [bracket(am[i], am[j]) for i in range(F.chart_dim) for j in range(i + 1, F.chart_dim)]


def curvature_condition_check(F: Framing, pair: ReductivePair, points, cfg: FDConfig = FDConfig(),
                              nilpotent: Subspace | None = None, tol: float = 1e-3) -> CurvatureReport:
    """Brackets ``C_ij = [pi_m alpha(Z_i), pi_m alpha(Z_j)]`` at each point.

    Values are Richardson-extrapolated from steps ``h`` and ``h/2``.  For Borel
    framings the report also gives the distance of every ``C_ij`` to the image
    of ``n = [b, b]`` in ``h (x) C`` and the isotropy of ``n`` for ``tr(XY)``.
    """
    k = F.chart_dim
    pairs_ij = [(i, j) for i in range(k) for j in range(i + 1, k)]
    borel = F.is_borel and all(
        np.max(np.abs(np.tril(F(z), -1)), initial=0.0) <= 1e-12 for z in points)
    if borel and nilpotent is None:
        b = borel_subalgebra_sl(F.dim, pair.g)
        nilpotent = nilpotency_analysis(b).derived
    if nilpotent is not None and borel:
        kap = np.stack([_bvec(_kappa(pair, N)) for N in nilpotent.basis], axis=1)
        nmat = np.stack([realify(N) for N in nilpotent.basis], axis=1)
    values, norms, witness, best = [], [], None, -1.0
    dist = dist_img = 0.0
    for pidx, z in enumerate(points):
        c1 = curvature_values(F, pair, z, cfg)
        c2 = curvature_values(F, pair, z, cfg.with_step(cfg.step / 2))
        C = [Bicomplex((4 * b.re - a.re) / 3, (4 * b.im - a.im) / 3) for a, b in zip(c1, c2)]
        values.append(C)
        pn = [c.norm() for c in C]
        norms.append(max(pn, default=0.0))
        for (i, j), nv in zip(pairs_ij, pn):
            if nv > best:
                best, witness = nv, (pidx, i, j)
        if nilpotent is not None and borel:
            for c in C:
                v = _bvec(c)
                x, *_ = np.linalg.lstsq(kap, v, rcond=None)
                dist = max(dist, float(np.linalg.norm(kap @ x - v)))
                w = realify(c.re + 1j * c.im)
                y, *_ = np.linalg.lstsq(nmat, w, rcond=None)
                dist_img = max(dist_img, float(np.linalg.norm(nmat @ y - w)))
    iso = iso_w = None
    if nilpotent is not None and borel:
        iso, iso_w = bilinear_isotropy(nilpotent, trace_form, tol=1e-12)
    frac = float(np.mean([n >= tol for n in norms])) if norms else 0.0
    return CurvatureReport(norms, max(norms, default=0.0), witness, frac,
                           dist if borel else None, dist_img if borel else None,
                           iso, iso_w, borel, values)
