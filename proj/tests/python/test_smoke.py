"""Smoke tests for the python bindings."""

import math

import pytest

import couplewave as cw


def test_bessel_half_integer_closed_form():
    want = math.sqrt(math.pi / 2.0) * math.exp(-1.0)
    assert cw.bessel_k(0.5, 1.0) == pytest.approx(want, rel=1e-10)
    with pytest.raises(ValueError):
        cw.bessel_k(0.5, -1.0)


def test_phi_and_rho_values():
    assert cw.phi(1, 0.0) == pytest.approx(2.0)
    assert cw.phi(3, 1.0) == pytest.approx(4.0 * math.pi * math.sinh(1.0), rel=1e-9)
    got = cw.rho(2.0, 1.0)
    want = math.sqrt(math.pi / 2.0) * 2.0 * math.exp(-2.0)
    assert got == pytest.approx(want, rel=1e-9)
    assert cw.rho_log_derivative(2.0, 0.0) == pytest.approx(0.0, abs=1e-10)


def test_m_weight():
    d = cw.DampingSpec.scattering(1.0, 2.0)
    assert cw.m_weight(d, 0.0) == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_classifier_regimes():
    sub = cw.classify(1, cw.DampingSpec.none(), cw.ExponentPair(2.0, 2.0))
    assert sub.regime == cw.Regime.SUBCRITICAL
    assert sub.theta == pytest.approx(1.0 / 3.0)

    out = cw.classify(1, cw.DampingSpec.scale_invariant(2.0), cw.ExponentPair(2.0, 2.0))
    assert out.regime == cw.Regime.OUT_OF_RANGE
    assert out.n_eff == 3.0


def test_schedule_and_identities():
    sched = cw.build_schedule(1.0, cw.ExponentPair(2.0, 2.0), 8)
    assert sched.ell[1] == pytest.approx(1.25)
    assert sched.Lambda_limit == pytest.approx(3.0)
    lhs, rhs = cw.double_sum_identity(2.0, 10)
    assert lhs == rhs == 2036.0
    alpha, beta, gamma = cw.closed_forms(2.0, cw.ExponentPair(1.5, 2.0), 2)
    assert alpha == pytest.approx(4.0)
    assert beta == gamma


def test_envelope_monotone():
    exps = cw.ExponentPair(2.0, 2.0)
    cl = cw.classify(1, cw.DampingSpec.none(), exps)
    sched = cw.build_schedule(1.0, exps, 20)
    ic = cw.iteration_constants(sched, cl, cw.BaseConstants(), 20)
    env = cw.envelope(cl, ic)
    assert env.exponent == pytest.approx(-3.0)
    assert env.bound(0.1) > env.bound(0.2)


def test_tiny_run_and_trace():
    cfg = cw.ModelConfig()
    cfg.n = 1
    cfg.exps = cw.ExponentPair(2.0, 2.0)
    cfg.damping = cw.DampingSpec.none()
    cfg.epsilon = 0.0
    cfg.grid.dr = 1.0 / 16
    cfg.time.t_max = 1.0
    traced = cw.run_with_trace(cfg)
    assert traced.report.status == cw.RunStatus.COMPLETED_TO_TMAX
    assert max(abs(x) for x in traced.trace.U0) == 0.0

    cfg.epsilon = 0.5
    result = cw.run(cfg)
    assert result.report.initial_peak > 0.0
    assert len(result.snapshots) >= 2


def test_config_error_paths():
    cfg = cw.ModelConfig()
    cfg.data.u0_amp = 2.0  # violates u1 >= u0
    with pytest.raises(ValueError):
        cfg.validate()
