import math

import pytest

import pimex


def test_scheme_names():
    assert pimex.scheme_names() == ["imex1", "imex2", "imex3", "imex4"]


def test_tableaux_verify():
    for name in pimex.scheme_names():
        report = pimex.verify_tableau(name)
        assert report["all_passed"], report


def test_unknown_scheme():
    with pytest.raises(pimex.PimexError):
        pimex.tableau("imex9")


def test_simulate_piston():
    cfg = pimex.default_config("piston")
    cfg.update(T=0.5, dt=0.05)
    out = pimex.simulate(cfg)
    assert math.isfinite(out["J"]) and out["J"] > 0
    assert out["series"]["t"][0] == 0.0
    assert out["series"]["t"][-1] == pytest.approx(0.5)


def test_grad_check_scalar_decay():
    out = pimex.grad_check(pimex.default_config("scalar-decay"))
    assert out["passed"]
    assert out["rel_adjoint_direct"] < 1e-10
    assert out["rel_adjoint_closed_form"] < 1e-6


def test_grad_check_coarse_step_misses_closed_form():
    # Discrete gradient is exact for the discrete objective, not the continuous one.
    cfg = pimex.default_config("scalar-decay")
    cfg.update(scheme="imex2", dt=0.01)
    out = pimex.grad_check(cfg)
    assert out["rel_adjoint_direct"] < 1e-10
    assert out["rel_adjoint_closed_form"] > 1e-6
    assert not out["passed"]


def test_gradient_methods_agree():
    cfg = pimex.default_config("scalar-decay")
    adj = pimex.gradient(cfg, [0.5], "adjoint")
    direct = pimex.gradient(cfg, [0.5], "direct")
    assert adj["grad"][0] == pytest.approx(direct["grad"][0], rel=1e-10)


def test_closed_form():
    mu, T = 0.3, 2.0
    h = 1e-6
    fd = (pimex.scalar_decay_objective(mu + h, T) - pimex.scalar_decay_objective(mu - h, T)) / (2 * h)
    assert pimex.scalar_decay_gradient(mu, T) == pytest.approx(fd, rel=1e-7)


def test_roe_flux_consistency():
    U = [1.0, 0.5, 2.5]
    F = pimex.roe_flux(U, U)
    rho, m, E = U
    u = m / rho
    p = 0.4 * (E - 0.5 * rho * u * u)
    assert list(F) == pytest.approx([m, m * u + p, (E + p) * u], rel=1e-14)


def test_order_study_linear_model():
    cfg = pimex.default_config("linear-model")
    out = pimex.order_study(cfg)
    assert out["passed"], out["schemes"]


def test_invalid_config():
    with pytest.raises(pimex.ConfigError):
        pimex.normalize_config({"dt": -1.0})
