import math

import numpy as np
import pytest

import bcolab


def test_disc_ratio_at_center_fibre():
    disc = bcolab.ConvexBody.ball(np.zeros(2), 1.0)
    assert bcolab.psi_point(disc, np.array([3.0, 0.0]), np.zeros(2)) == pytest.approx(0.5, abs=1e-14)
    t_in, t_out = bcolab.ray_clip(disc, np.array([3.0, 0.0]), np.array([-1.0, 0.0]))
    assert (t_in, t_out) == pytest.approx((2.0, 4.0))


def test_psi_avg_interval_is_exact():
    r = bcolab.psi_avg(bcolab.ConvexBody.interval(-1.0, 1.0), np.array([3.0]), 16, 1)
    assert r["avg"] == 0.5


def test_errors_carry_codes():
    disc = bcolab.ConvexBody.ball(np.zeros(2), 1.0)
    with pytest.raises(bcolab.Error, match="XInsideBody"):
        bcolab.psi_point(disc, np.array([0.5, 0.0]), np.zeros(2))


def test_box_position():
    box = bcolab.ConvexBody.box(np.zeros(2), np.array([2.0, 1.0]))
    r = bcolab.msa_transform(box)
    assert r["converged"]
    assert np.allclose(r["T"], np.diag([1 / math.sqrt(2), math.sqrt(2)]), atol=1e-6)


def test_grid_and_bound():
    g = bcolab.epsilon_grid(1, 2, 1.0)
    assert g["eps0"] == 1 / 2097152
    assert len(g["levels"]) <= 140
    assert bcolab.regret_bound(100, 1, 0.0, 0.0, 2.0) == 3.0


def test_property_run_and_replay():
    assert "key" in bcolab.properties()
    r = bcolab.run_property("psi_invariance", 5, 3)
    assert r["passed"] and r["trials"] == 5
    ok, text = bcolab.replay_trial("psi_invariance", 3, r["worst_trial"])
    assert ok and "PASS" in text


def test_small_sweep():
    s = bcolab.run_sweep(n=20, atoms=3, seeds=3, seed=1)
    assert s["seeds"] == 3
    assert s["mean_regret"] <= s["bound_value"]


def test_cli_usage():
    code, _, err = bcolab.cli([])
    assert code == 2 and "verify" in err
