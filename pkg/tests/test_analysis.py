import math

import numpy as np
import pytest

from conclusive_teleport.analysis import (
    DEFAULT_GRID,
    McEstimate,
    closed_form_success,
    make_grid,
    monte_carlo,
    report,
    sweep,
)
from conclusive_teleport.protocols import ChannelParams, InputParams, ParameterError

import oracles

INP = InputParams(0.6, 0.8)


def test_closed_forms():
    ch = ChannelParams.from_alpha_sq(0.8)
    assert closed_form_success(1, ch) == pytest.approx(0.32, abs=1e-15)
    assert closed_form_success(2, ch) == pytest.approx(0.40, abs=1e-15)
    assert closed_form_success(2, ChannelParams.from_alpha_sq(0.5)) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ParameterError):
        closed_form_success(3, ch)


def test_report_shapes():
    ch = ChannelParams.from_alpha_sq(0.7)
    assert len(report(1, ch, INP).leaves) == 8
    assert len(report(2, ch, INP).leaves) == 12


@pytest.mark.parametrize("scheme", [1, 2])
def test_report_deviation(scheme):
    rep = report(scheme, ChannelParams.from_alpha_sq(0.7), INP)
    assert rep.max_abs_deviation < 1e-12
    assert abs(rep.total_probability - 1) < 1e-12


def test_report_product_channel():
    for scheme in (1, 2):
        rep = report(scheme, ChannelParams(1, 0), INP)
        assert not any(lf.success and lf.probability > 0 for lf in rep.leaves)


@pytest.mark.parametrize("scheme", [1, 2])
def test_report_leaves_match_projector_oracle(scheme):
    rng = np.random.default_rng(17 + scheme)
    ch = ChannelParams.from_alpha_sq(rng.uniform(0.5, 1.0))
    a, b = oracles.random_inputs(rng)
    rep = report(scheme, ch, InputParams(a, b))
    leaves_fn = oracles.scheme1_leaves if scheme == 1 else oracles.scheme2_leaves
    expected = leaves_fn(ch.alpha, ch.beta, a, b)
    assert len(expected) == len(rep.leaves)
    for lf in rep.leaves:
        key = (lf.bell.value, lf.basis) if scheme == 1 else (lf.bell.value, str(lf.ancilla)) + (
            (lf.basis,) if lf.basis else ()
        )
        v = expected[key]
        assert abs(lf.probability - np.vdot(v, v).real) < 1e-12


def test_default_grid():
    assert len(DEFAULT_GRID) == 11
    assert make_grid(0.5, 1.0, 0.05) == list(DEFAULT_GRID)


@pytest.mark.parametrize("args", [(0.5, 1.0, 0.0), (0.5, 1.0, -0.1), (1.0, 0.5, 0.1), (0.5, float("nan"), 0.1)])
def test_make_grid_rejects(args):
    with pytest.raises(ParameterError):
        make_grid(*args)


def test_sweep_rows():
    rows = sweep(DEFAULT_GRID, INP)
    assert len(rows) == 11
    first, last = rows[0], rows[-1]
    assert first.scheme1_prob == pytest.approx(0.5, abs=1e-12)
    assert first.scheme2_prob == pytest.approx(1.0, abs=1e-12)
    assert last.scheme1_prob == pytest.approx(0.0, abs=1e-12)
    assert last.scheme2_prob == pytest.approx(0.0, abs=1e-12)
    for row in rows:
        assert row.ratio == pytest.approx(row.alpha_sq, abs=1e-12)
        assert row.scheme2_prob >= row.scheme1_prob - 1e-12
        assert -1e-12 <= row.scheme1_prob <= 1 + 1e-12
    # strictly decreasing above alpha^2 = 0.5
    p1 = [r.scheme1_prob for r in rows]
    p2 = [r.scheme2_prob for r in rows]
    assert all(x > y for x, y in zip(p1, p1[1:]))
    assert all(x > y for x, y in zip(p2, p2[1:]))


def test_sweep_rejects_out_of_range():
    with pytest.raises(ParameterError):
        sweep([0.4], INP)


def test_mc_estimate_fields():
    est = McEstimate(trials=100, successes=25)
    assert est.estimate == 0.25
    assert est.std_error == pytest.approx(math.sqrt(0.25 * 0.75 / 100))
    assert McEstimate(10, 10).z_score(1.0) == 0.0
    assert McEstimate(10, 10).z_score(0.5) is None


def test_monte_carlo_scheme1():
    ch = ChannelParams.from_alpha_sq(0.8)
    est = monte_carlo(1, ch, INP, 100_000, seed=123)
    assert abs(est.estimate - 0.32) < 5 * est.std_error
    assert monte_carlo(1, ch, INP, 100_000, seed=123).successes == est.successes


def test_monte_carlo_ghz_limit():
    est = monte_carlo(2, ChannelParams.from_alpha_sq(0.5), INP, 5000, seed=9)
    assert est.successes == est.trials


@pytest.mark.parametrize("trials", [0, -5, 2.5])
def test_monte_carlo_rejects_trials(trials):
    with pytest.raises(ParameterError):
        monte_carlo(1, ChannelParams.from_alpha_sq(0.8), INP, trials, seed=1)
