import numpy as np
import pytest
from hypothesis import given, settings

from conftest import diagonal_states, field_states, pure_states
from fockladder.errors import InvalidParameter, TruncationOverflow, ZeroNormState
from fockladder.fock import (
    DiagonalState,
    LadderOp,
    LadderPipeline,
    PureState,
    apply_ac,
    apply_annihilate,
    apply_ca,
    apply_create,
    apply_pipeline,
    freeze,
    normalize,
    padded,
)
from fockladder.observables import ladder_expectations, moments
from fockladder.states import make_coherent_mean, make_number, make_thermal

OPS = [apply_create, apply_annihilate, apply_ac, apply_ca,
       lambda s: apply_pipeline(s, LadderPipeline(LadderOp.CA, 3))]


def vec(state, dim=None):
    v = state.amplitudes if isinstance(state, PureState) else state.weights
    return padded(v, dim or v.size)


def dense_a(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


# -- trivial ladder examples -------------------------------------------------

@pytest.mark.parametrize("n", [0, 1, 4])
def test_create_number_state(n):
    out = apply_create(make_number(n))
    np.testing.assert_allclose(np.abs(vec(out, n + 2)), np.eye(n + 2)[n + 1], atol=1e-15)
    assert out.trunc_dim >= n + 2


def test_annihilate_one_photon():
    np.testing.assert_allclose(np.abs(vec(apply_annihilate(make_number(1)), 2)), [1, 0])


@pytest.mark.parametrize("state", [make_number(0), DiagonalState(np.array([1.0, 0.0]))])
def test_annihilate_vacuum_fails(state):
    with pytest.raises(ZeroNormState):
        apply_annihilate(state)
    with pytest.raises(ZeroNormState):
        apply_ac(state)


def test_ca_vacuum_fixed():
    np.testing.assert_allclose(np.abs(vec(apply_ca(make_number(0)))), [1.0])


@pytest.mark.parametrize("n", [1, 2, 5, 9])
@pytest.mark.parametrize("k", [1, 4, 20])
def test_number_state_fixed_points(n, k):
    s = make_number(n)
    for op in (LadderOp.AC, LadderOp.CA):
        out = apply_pipeline(s, LadderPipeline(op, k))
        np.testing.assert_allclose(vec(out, n + 1), vec(s), atol=1e-14)


def test_create_raises_coherent_mean():
    # mean shift var/(mean+1) + 1 with var = mean = 1
    s = make_coherent_mean(1.0)
    assert moments(apply_create(s)).mean - moments(s).mean == pytest.approx(1.5, abs=1e-9)


def test_annihilate_keeps_coherent_mean():
    s = make_coherent_mean(2.3)
    assert moments(apply_annihilate(s)).mean == pytest.approx(moments(s).mean, abs=1e-9)


def test_ac_on_coherent_is_photon_added():
    s = make_coherent_mean(0.8)
    a, b = apply_ac(s), apply_create(s)
    dim = max(a.trunc_dim, b.trunc_dim)
    assert abs(np.vdot(vec(a, dim), vec(b, dim))) ** 2 == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("nbar", [0.3, 1.0])
def test_thermal_ac_ca_weights(nbar):
    z = nbar / (1 + nbar)
    ac, ca = apply_ac(make_thermal(nbar)), apply_ca(make_thermal(nbar))
    n = np.arange(400)
    for out, expect in ((ac, n**2 * z**n), (ca, (n + 1) ** 2 * z**n)):
        expect = expect / expect.sum()
        dim = out.trunc_dim
        np.testing.assert_allclose(out.weights, expect[:dim], rtol=1e-11)
        assert expect[dim:].sum() < out.tail_tol


# -- normalize -------------------------------------------------------------

def test_normalize_unit_state():
    s = make_number(2)
    out, norm = normalize(s)
    assert norm == pytest.approx(1.0)
    np.testing.assert_allclose(vec(out), vec(s))


def test_normalize_reports_squared_norm():
    out, norm = normalize(PureState(np.array([1.0, 1.0])))
    assert norm == pytest.approx(2.0)
    np.testing.assert_allclose(vec(out).real, [2**-0.5, 2**-0.5])


def test_normalize_thermal_ac_numerator():
    # unnormalised sum n^2 nbar^n/(1+nbar)^n at nbar = 1 has trace (1+2nbar)(1+nbar)nbar = 6
    n = np.arange(200)
    _, norm = normalize(DiagonalState(n**2 * 0.5**n))
    assert norm == pytest.approx(6.0, rel=1e-12)


def test_normalize_zero():
    with pytest.raises(ZeroNormState):
        normalize(PureState(np.zeros(3)))


# -- pipelines, truncation --------------------------------------------------

@pytest.mark.parametrize("op", [LadderOp.AC, LadderOp.CA])
@pytest.mark.parametrize("k", [1, 3, 8])
@pytest.mark.parametrize("make", [lambda: make_thermal(0.57), lambda: make_coherent_mean(1.3)])
def test_pipeline_matches_sequence(op, k, make):
    s = make()
    fused = apply_pipeline(s, LadderPipeline(op, k))
    seq = s
    for _ in range(k):
        seq = apply_ca(seq) if op is LadderOp.CA else apply_ac(seq)
    dim = max(fused.trunc_dim, seq.trunc_dim)
    np.testing.assert_allclose(vec(fused, dim), vec(seq, dim), rtol=0, atol=1e-12)


def test_pipeline_widens_cutoff():
    s = make_thermal(0.57)
    out = apply_pipeline(s, LadderPipeline(LadderOp.AC, 20))
    assert out.trunc_dim > s.trunc_dim
    w = out.weights
    assert w[-1] / w.sum() < s.tail_tol
    assert abs(w.sum() - 1) < 1e-10


def test_pipeline_overflow():
    with pytest.raises(TruncationOverflow):
        apply_pipeline(make_thermal(50.0), LadderPipeline(LadderOp.AC, 25), max_dim=256)


def test_pipeline_rejects_bad_k():
    with pytest.raises(InvalidParameter):
        LadderPipeline(LadderOp.AC, 0)
    with pytest.raises(InvalidParameter):
        LadderPipeline(LadderOp.AC, 1.5)


def test_states_are_immutable():
    s = make_number(2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1.0


# -- dense-matrix oracle ---------------------------------------------------

@pytest.mark.parametrize("seed", range(4))
def test_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    dim = 8
    a = dense_a(dim)
    ad = a.T
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    pure = PureState(c / np.linalg.norm(c))
    w = rng.random(6)
    diag = DiagonalState(w / w.sum())
    mats = {apply_create: ad, apply_annihilate: a, apply_ac: ad @ a, apply_ca: a @ ad}
    for fn, m in mats.items():
        ref = m @ vec(pure, dim)
        np.testing.assert_allclose(vec(fn(pure), dim), ref / np.linalg.norm(ref), atol=1e-12)
        rho = m @ np.diag(vec(diag, dim)) @ m.T
        rho /= np.trace(rho)
        np.testing.assert_allclose(np.diag(vec(fn(diag), dim)), rho, atol=1e-12)


# -- properties -------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(field_states)
def test_variant_preserved(state):
    for op in OPS:
        assert type(op(state)) is type(state)


@settings(max_examples=60, deadline=None)
@given(field_states)
def test_commutator_witness(state):
    for s in [state] + [op(state) for op in OPS]:
        ac, ca = ladder_expectations(s)
        assert ca - ac == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(field_states)
def test_moment_shift_identities(state):
    m = moments(state)
    up, down = moments(apply_create(state)), moments(apply_annihilate(state))
    assert up.mean - m.mean == pytest.approx(m.variance / (m.mean + 1) + 1, abs=1e-9)
    assert down.mean - m.mean == pytest.approx(m.variance / m.mean - 1, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(pure_states(), diagonal_states())
def test_outputs_normalized(pure, diag):
    for s in (pure, diag):
        for op in OPS:
            assert op(s).populations.sum() == pytest.approx(1.0, abs=1e-10)


def test_moment_shift_on_frozen_thermal():
    s = freeze(apply_ac(make_thermal(2.5)))
    m, up = moments(s), moments(apply_create(s))
    assert up.mean - m.mean == pytest.approx(m.variance / (m.mean + 1) + 1, abs=1e-9)


def test_high_power_stays_finite():
    # amplitudes reach ~1e150 before renormalisation; populations would overflow
    s = apply_pipeline(make_coherent_mean(0.57), LadderPipeline(LadderOp.AC, 150))
    assert np.all(np.isfinite(s.populations))
    assert s.populations.sum() == pytest.approx(1.0, abs=1e-12)


def test_pipeline_beyond_double_range_raises():
    with pytest.raises(TruncationOverflow):
        apply_pipeline(make_coherent_mean(0.57), LadderPipeline(LadderOp.AC, 200))
