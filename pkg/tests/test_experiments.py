import json

import numpy as np
import pytest

from fraccontrol.experiments import (ConfigError, SweepConfig, constant_audit, cost_sweep,
                                     horizons_for, product_asymptotics)


def test_config_validation():
    with pytest.raises(ConfigError):
        SweepConfig(T_list=[0.3])
    with pytest.raises(ConfigError):
        SweepConfig(T_list=[0.6, 0.3, 0.5, 0.2])
    with pytest.raises(ConfigError):
        SweepConfig(T_list=[0.6, 0.5, 0.0, -0.1])
    with pytest.raises(ConfigError):
        SweepConfig(model="schrodinger", method="both")
    with pytest.raises(ConfigError):
        SweepConfig(N_policy="adaptive")


def test_config_from_json_rejects_unknown_keys(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"s": 0.8, "colour": "red"}))
    with pytest.raises(ConfigError):
        SweepConfig.from_json(p)
    p.write_text(json.dumps({"s": 0.8, "T_list": [0.5, 0.4, 0.3, 0.2]}))
    cfg = SweepConfig.from_json(p)
    assert cfg.s == 0.8 and cfg.manifest()["T_list"] == [0.5, 0.4, 0.3, 0.2]


def test_spectral_policy_reaches_level():
    cfg = SweepConfig()
    for T in cfg.T_list:
        N = cfg.n_modes(T)
        lam = (np.pi * N) ** 1.5
        assert lam * T >= cfg.level
        assert (np.pi * (N - 1)) ** 1.5 * T < cfg.level
    assert SweepConfig(N_policy="fixed", N_fixed=17).n_modes(0.2) == 17


def test_sweep_rows_carry_manifest(tmp_path):
    cfg = SweepConfig(T_list=[0.6, 0.5, 0.4, 0.3], N_policy="fixed", N_fixed=20,
                      output_path=str(tmp_path / "sweep"))
    res = cost_sweep(cfg)
    assert [r.T for r in res.rows] == [0.6, 0.5, 0.4, 0.3]
    costs = [r.log_cost for r in res.rows]
    assert all(a < b for a, b in zip(costs, costs[1:]))       # cost grows as T shrinks
    for r in res.rows:
        assert {"s", "T", "N", "dps", "seed"} <= set(r.manifest)
        assert r.margin == pytest.approx(r.log_cost - r.lower_bound_exponent)
    assert (tmp_path / "sweep.csv").exists()
    data = json.loads((tmp_path / "sweep.json").read_text())
    assert data["fit"]["tau_hat"] == pytest.approx(res.fit.tau_hat)


def test_sweep_pool_is_deterministic():
    kw = dict(T_list=[0.6, 0.5, 0.4, 0.3], N_policy="fixed", N_fixed=15)
    a = cost_sweep(SweepConfig(**kw))
    b = cost_sweep(SweepConfig(workers=2, **kw))
    assert [r.log_cost for r in a.rows] == [r.log_cost for r in b.rows]


def test_schrodinger_sweep_runs():
    res = cost_sweep(SweepConfig(model="schrodinger", T_list=[0.6, 0.5, 0.4, 0.3],
                                 N_policy="fixed", N_fixed=12))
    assert all(np.isfinite(r.log_cost) for r in res.rows)


def test_constant_audit_all_pass():
    rows = constant_audit()
    assert all(r.passed for r in rows)
    q2 = next(r for r in rows if r.name == "Q_2_zero")
    assert abs(q2.value) < 1e-6
    assert any(r.name == "kappa_2alpha_vs_2theta" for r in rows)


def test_product_asymptotics_rows():
    rows = product_asymptotics(0.75, 200, 100_000)
    assert {r.name for r in rows} == {"product_plus", "product_minus"}
    assert all(r.passed for r in rows)


def test_horizon_rule_matches_default_endpoints():
    T = horizons_for(0.75)
    ref = SweepConfig().T_list
    assert T[0] == pytest.approx(ref[0], rel=0.01) and T[-1] == pytest.approx(ref[-1], rel=0.01)


def test_fit_separates_exponents_at_s09():
    # tau = 1.25 at s = 0.9; the fit must prefer it over tau = 2 by more than 10x
    res = cost_sweep(SweepConfig(s=0.9, T_list=horizons_for(0.9), dps=80))
    f = res.fit
    assert f.residual_at(2.0) / f.residual_at(1.25) > 10
    assert abs(f.tau_hat - 1.25) / 1.25 < 0.2
