"""Smoke tests for the python bindings."""

import json
import math

import pytest

import levy_codebook as lcb


BS_MODEL = json.dumps(
    {
        "model": "bs",
        "sigma": 0.2,
        "x0": 0.0,
        "grid": {"dT": 0.05, "nT": 21, "du": 0.05, "nu": 800},
    }
)

BNS_MODEL = json.dumps(
    {
        "model": "bns",
        "lambda": 1.0,
        "delta": -0.5,
        "eta": {"kind": "compound-poisson-exp", "rate": 1.0, "theta": 2.0},
        "psiL": {"diffusion": 0.01},
        "x0": 0.0,
        "grid": {"dT": 0.05, "nT": 21, "du": 0.25, "nu": 40},
    }
)


def bs_call(spot, strike, sigma, tau):
    sd = sigma * math.sqrt(tau)
    d1 = (math.log(spot / strike) + 0.5 * sd * sd) / sd
    d2 = d1 - sd
    phi = lambda x: 0.5 * math.erfc(-x / math.sqrt(2.0))
    return spot * phi(d1) - strike * phi(d2)


def test_exponent_closed_forms():
    e = lcb.CharExponent.pi_form(1.0, lcb.JumpSpec.none())
    v = e(1.0 + 0.0j)
    assert abs(v - (-0.5 - 0.5j)) < 1e-14
    assert e.martingale_defect() < 1e-14

    eta = lcb.CharExponent.subordinator(lcb.JumpSpec.compound_poisson_exp(1.0, 2.0))
    assert abs(eta(0.5j) - (-0.2)) < 1e-14


def test_exponent_domain_error():
    eta = lcb.CharExponent.subordinator(lcb.JumpSpec.compound_poisson_exp(1.0, 2.0))
    with pytest.raises(ValueError):
        eta(-3.0j)


def test_black_scholes_pricing_matches_the_closed_form():
    strikes = [0.5, 0.9, 1.0, 1.2, 2.0]
    calls = lcb.price_calls(BS_MODEL, strikes, 1.0)
    for k, c in zip(strikes, calls):
        assert abs(c - bs_call(1.0, k, 0.2, 1.0)) < 1e-7


def test_codebook_surface_operations():
    grid = lcb.GridSpec(dT=0.05, nT=21, du=0.05, nu=800)
    surf = lcb.black_scholes_codebook(0.2, grid)
    cum = surf.integrate_maturity(0.0, 1.0, 1.0)
    assert abs(cum - (-0.02 - 0.02j)) < 1e-13
    assert surf.seminorm(1.0, 1.0) == pytest.approx(0.02 * math.sqrt(2.0))
    assert surf.pi_check_passes(0.0)


def test_roundtrip_recovers_the_codebook():
    err, cells = lcb.roundtrip_error(BS_MODEL, dx=0.01, x_half_width=2.0)
    assert cells > 1000
    assert err < 1e-3


def test_evolution_and_checks():
    out = lcb.evolve(BNS_MODEL, horizon=1.0, seed=7, solver="picard")
    assert out["times"][-1] == pytest.approx(1.0)
    state = out["states"][-1]
    assert state.time() == pytest.approx(1.0)
    assert state.pi_check_passes(0.0)

    report = lcb.check_risk_neutral(BNS_MODEL, horizon=1.0, n_paths=5000, steps=100, seed=1)
    assert report["pass"]
    names = [c["name"] for c in report["checks"]]
    assert any("martingale" in n for n in names)
