import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurifold.homogeneous import ModelError, build_abelian_twistor, build_model
from plurifold.linalg import realify
from plurifold.twistor import build_J1_J2, horizontal_defect, obstruction_witness, vertical_leak

MODELS = ["s2n-twistor:2", "s2n-twistor:3", "cpn-flag:2:1", "cpn-flag:3:1", "cpn-flag:3:2"]


@pytest.fixture(scope="module")
def pairs():
    return {d: build_J1_J2(build_model(d)) for d in MODELS}


def _defect_oracle(model, J1, X, V):
    """Bracket of the matrices, split by least squares against the p, v and h bases."""
    M = lambda x: sum(c * B for c, B in zip(x, model.m.basis))
    br = M(J1 @ V) @ M(J1 @ X) - M(J1 @ X) @ M(J1 @ V)
    basis = model.m.basis + model.h.basis
    R = np.stack([realify(B) for B in basis], axis=1)
    c = np.linalg.lstsq(R, realify(br), rcond=None)[0]
    d = np.zeros(model.dim_m)
    d[model.p_slice] = 2 * c[: model.dim_p]
    return d


@pytest.mark.parametrize("desc", MODELS)
def test_defect_matches_matrix_oracle(pairs, desc):
    pair = pairs[desc]
    m = pair.model
    e = np.eye(m.dim_m)
    for a in range(m.dim_p):
        for b in range(m.dim_p, m.dim_m):
            assert np.allclose(horizontal_defect(pair, e[a], e[b]), _defect_oracle(m, pair.J1, e[a], e[b]),
                               atol=1e-12)


def test_zero_input(pairs):
    pair = pairs["s2n-twistor:2"]
    m = pair.model
    V = np.eye(m.dim_m)[m.dim_p]
    assert np.all(horizontal_defect(pair, np.zeros(m.dim_m), V) == 0)


def test_s4_first_pair_norm(pairs):
    pair = pairs["s2n-twistor:2"]
    m = pair.model
    e = np.eye(m.dim_m)
    d = horizontal_defect(pair, e[0], e[m.dim_p])
    assert np.linalg.norm(m.m_matrix(d)) >= 1


def test_wrong_block_rejected(pairs):
    pair = pairs["s2n-twistor:2"]
    m = pair.model
    e = np.eye(m.dim_m)
    with pytest.raises(ModelError):
        horizontal_defect(pair, e[m.dim_p], e[m.dim_p])


@pytest.mark.parametrize("desc", MODELS)
def test_witness(pairs, desc):
    w = obstruction_witness(pairs[desc])
    assert w.violated and w.max_norm >= 1
    assert w.verdict == "torsion condition violated"
    assert w.vertical_leak <= 1e-12
    assert w.n1_norm <= 1e-12 and w.n2_horizontal_norm > 0


def test_abelian_model_not_violated():
    w = obstruction_witness(build_J1_J2(build_abelian_twistor()))
    assert not w.violated and w.max_norm == 0
    assert w.verdict == "condition not violated by this test"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(MODELS))
def test_bilinear_and_J_invariant(seed, desc):
    pair = build_J1_J2(build_model(desc))
    m = pair.model
    rng = np.random.default_rng(seed)

    def rand(block):
        x = np.zeros(m.dim_m)
        sl = m.p_slice if block == "p" else m.v_slice
        x[sl] = rng.normal(size=sl.stop - sl.start)
        return x

    X, X2, V = rand("p"), rand("p"), rand("v")
    a, b = rng.normal(size=2)
    lhs = horizontal_defect(pair, a * X + b * X2, V)
    rhs = a * horizontal_defect(pair, X, V) + b * horizontal_defect(pair, X2, V)
    assert np.allclose(lhs, rhs, atol=1e-10)
    n = lambda d: np.linalg.norm(m.m_matrix(d))
    assert abs(n(horizontal_defect(pair, pair.J1 @ X, pair.J1 @ V)) - n(horizontal_defect(pair, X, V))) <= 1e-10
    assert vertical_leak(pair, X, V) <= 1e-12 * max(1.0, np.linalg.norm(X) * np.linalg.norm(V))
