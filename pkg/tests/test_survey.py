import numpy as np
import pandas as pd
import pytest

from clientlab.regression import DAY_CAP, build_model_suite, ols_cluster_fit, regression_sample
from clientlab.survey import (
    Effects,
    client_effect_monte_carlo,
    draw_outcomes,
    simulate_design,
    simulate_survey,
)


def test_reproducible_from_seed():
    a = simulate_survey(villages=4, households=30, seed=9)
    b = simulate_survey(villages=4, households=30, seed=9)
    pd.testing.assert_frame_equal(a.frame, b.frame)
    assert a.meta == b.meta
    c = simulate_survey(villages=4, households=30, seed=10)
    assert not a.frame.equals(c.frame)


def test_shape_and_columns():
    data = simulate_survey(villages=5, households=20, seed=1)
    f = data.frame
    assert len(f) == 100
    assert f["village_id"].nunique() == 5
    assert f["days_worked"].between(0, DAY_CAP).all()
    assert set(f["participation"].unique()) <= {0, 1}
    assert ((f["days_worked"] > 0) <= (f["participation"] == 1)).all()
    assert set(data.kinds) == set(f.columns)
    assert data.meta["true_client_effect"] == 0.15


def test_game_villages_have_single_elite_patron():
    data = simulate_survey(villages=6, households=50, seed=2, reciprocal_rate=0, one_way_rate=0)
    f = data.frame
    for _, v in f.groupby("village_id"):
        assert v["client"].sum() > 0
        assert (v.loc[v["client"] == 1, "concentration_raw"] == 4).all()
    assert (f["clientelism_score"] > 0).all()


def test_design_shared_across_effects():
    design = simulate_design(villages=4, households=30, seed=3)
    a = draw_outcomes(design, Effects(client=0.15))
    b = draw_outcomes(design, Effects(client=0.0))
    shared = [c for c in a.frame.columns if c not in ("participation", "days_worked")]
    pd.testing.assert_frame_equal(a.frame[shared], b.frame[shared])
    # common random numbers: a positive effect only ever switches participation on
    assert (a.frame["participation"] >= b.frame["participation"]).all()


def test_random_network_source():
    data = simulate_survey(villages=4, households=30, seed=4, network="random")
    assert data.meta["network"] == "random"
    assert data.frame["client"].any()


def test_invalid_arguments():
    with pytest.raises(ValueError):
        simulate_survey(villages=1)
    with pytest.raises(ValueError):
        simulate_survey(households=2)
    with pytest.raises(ValueError):
        simulate_survey(network="lattice")
    with pytest.raises(ValueError):
        Effects(base=1.5)


def test_indices_columns_match_library():
    design = simulate_design(villages=3, households=25, seed=6)
    f = design.frame
    z = f["concentration_raw"].to_numpy(dtype=float)
    np.testing.assert_allclose(f["concentration_z"], (z - z.mean()) / z.std())


def test_sign_recovery_small_batch():
    draws = client_effect_monte_carlo(range(12), true_effects=(0.15,))[0.15]
    assert [d.seed for d in draws] == list(range(12))
    assert sum(d.estimate > 0 for d in draws) >= 12 * 0.95


def test_days_model_runs():
    data = simulate_survey(villages=12, households=60, seed=8)
    spec = next(s for s in build_model_suite(("days_worked",), ("fe",)) if s.model == "5")
    fit = ols_cluster_fit(regression_sample(data, "days_worked"), spec)
    assert np.isfinite(fit.coef("client"))
