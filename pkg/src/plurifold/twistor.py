"""The two almost complex structures of a twistor model and the horizontal
defect that keeps the fiber-reversed structure from satisfying the torsion
condition for associated families.

The defect is evaluated with algebraic brackets at the base point.  It
stands in for the basic/vertical vector-field computation and is labelled
as such in reports.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .homogeneous import ModelError, TwistorModel, nijenhuis_at_origin
from .linalg import commutator

SQUARE_TOL = 1e-12


@dataclass
class TwistorACSPair:
    model: TwistorModel
    J1: np.ndarray
    J2: np.ndarray


def build_J1_J2(model: TwistorModel) -> TwistorACSPair:
    if getattr(model, "JH", None) is None or getattr(model, "JV", None) is None:
        raise ModelError("model has no horizontal/vertical complex structures")
    J1 = model.block_operator(model.JH, model.JV)
    J2 = model.block_operator(model.JH, -model.JV)
    eye = np.eye(model.dim_m)
    for label, J in (("J1", J1), ("J2", J2)):
        res = np.max(np.abs(J @ J + eye))
        if res > SQUARE_TOL:
            raise ModelError(f"{label}**2 != -id (residual {res:.3e})")
    return TwistorACSPair(model, J1, J2)


def _check_block(model: TwistorModel, x, block: str):
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim_m,):
        raise ModelError("expected an m-coordinate vector")
    other = model.v_slice if block == "p" else model.p_slice
    if np.max(np.abs(x[other]), initial=0.0) > 1e-12:
        raise ModelError(f"argument is not in the {'horizontal' if block == 'p' else 'vertical'} block")
    return x


def horizontal_defect(pair: TwistorACSPair, X, V) -> np.ndarray:
    """``2 pi_p([J1 V, J1 X])`` in m coordinates (vertical entries zero)."""
    model = pair.model
    X = _check_block(model, X, "p")
    V = _check_block(model, V, "v")
    br = commutator(model.m_matrix(pair.J1 @ V), model.m_matrix(pair.J1 @ X))
    return 2.0 * model.proj_p(model.m_coords(br))


def vertical_leak(pair: TwistorACSPair, X, V) -> float:
    """Norm of everything in ``[J1 V, J1 X]`` outside ``p``."""
    model = pair.model
    br = commutator(model.m_matrix(pair.J1 @ V), model.m_matrix(pair.J1 @ X))
    hc, mc = model.split(br)
    return float(np.linalg.norm(model.h.matrix(hc) + model.m_matrix(model.proj_v(mc))))


@dataclass
class WitnessReport:
    max_norm: float
    pair: tuple[int, int] | None     # (horizontal index, vertical index) in m coordinates
    defect: np.ndarray | None
    violated: bool
    n2_horizontal_norm: float
    n1_norm: float
    vertical_leak: float
    verdict: str
    tol: float


def obstruction_witness(pair: TwistorACSPair, tol: float = 1e-10) -> WitnessReport:
    """Exhaustive scan of basis pairs ``(X in p, V in v)`` for the largest defect.

    Norms are Frobenius norms of the corresponding matrices.
    """
    model = pair.model
    eye = np.eye(model.dim_m)
    best, best_pair, best_defect = 0.0, None, None
    leak = 0.0
    for a in range(model.dim_p):
        for b in range(model.dim_p, model.dim_m):
            d = horizontal_defect(pair, eye[a], eye[b])
            leak = max(leak, vertical_leak(pair, eye[a], eye[b]))
            nrm = float(np.linalg.norm(model.m_matrix(d)))
            if nrm > best:
                best, best_pair, best_defect = nrm, (a, b), d
    violated = best > tol
    n2h = n1 = 0.0
    if best_pair is not None:
        X, V = eye[best_pair[0]], eye[best_pair[1]]
        N2 = nijenhuis_at_origin(model, pair.J2, X, V)
        N1 = nijenhuis_at_origin(model, pair.J1, X, V)
        n2h = float(np.linalg.norm(model.m_matrix(model.proj_p(N2))))
        n1 = float(np.linalg.norm(model.m_matrix(N1)))
    verdict = ("torsion condition violated" if violated
               else "condition not violated by this test")
    return WitnessReport(best, best_pair, best_defect, violated, n2h, n1, leak, verdict, tol)
