import json

import pytest

from config.settings import THREADS_ENV_VAR, RunConfig, build_run_config, read_config_file, resolve_threads
from feature_selection.schemas import DEFAULT_METHODS
from utils.errors import ConfigError


def test_defaults():
    cfg = RunConfig()
    assert cfg.target_id == "AAPL.Close"
    assert cfg.horizon == 10
    assert cfg.methods == DEFAULT_METHODS
    assert len(cfg.schedule().fractions) == 17
    assert str(cfg.start_date) == "2016-01-01" and str(cfg.end_date) == "2024-01-28"


def test_key_value_file_with_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# desk run\nk=5\nmethods=var,cor,dtw\nfull-schedule=true\nsynthetic=n_rows=200,seed=3\n")
    cfg = build_run_config(path, seed=11, k=None)
    assert cfg.k == 5
    assert cfg.seed == 11
    assert cfg.methods == ("var", "cor", "dtw")
    assert len(cfg.schedule().fractions) == 81
    assert cfg.synthetic.n_rows == 200 and cfg.synthetic.seed == 3


def test_json_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"k": 4, "epsilon_match": 0.5, "dtw_band": 3}))
    cfg = build_run_config(path)
    assert cfg.metric_params().epsilon_match == 0.5
    assert cfg.metric_params().dtw_band == 3


@pytest.mark.parametrize("content", ["bogus=1\n", "methods=var,genetic\n", "k=0\n", "k=60\n", "shrink_policy=middle\n"])
def test_invalid_config(tmp_path, content):
    path = tmp_path / "bad.cfg"
    path.write_text(content)
    with pytest.raises(ConfigError):
        build_run_config(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "nope.cfg")


def test_both_sources_rejected():
    with pytest.raises(ConfigError):
        build_run_config(data_dir="data", synthetic="n_rows=100")


def test_selector_specs_carry_the_settings():
    cfg = RunConfig(methods="lasso,simulated", k=7, seed=2, sa_iters=9, lasso_path_len=20, prescreen=30)
    lasso, sa = cfg.selector_specs()
    assert (lasso.method_id, lasso.k, lasso.seed, lasso.wrapper_prescreen) == ("lasso", 7, 2, 30)
    assert lasso.lasso_params.path_len == 20
    assert sa.sa_params.iters == 9


def test_snapshot_leaves_out_runtime_settings():
    a = RunConfig(out_dir="a", threads=2).snapshot()
    b = RunConfig(out_dir="b", threads=8, no_timestamp=True).snapshot()
    assert a == b
    assert a["prng"] == "numpy.PCG64"
    assert a["schedule"][0] == 1.0 and a["schedule"][-1] == 0.2
    assert "out_dir" not in a
    json.dumps(a)


def test_resolve_threads(monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "3")
    assert resolve_threads(RunConfig()) == 3
    assert resolve_threads(RunConfig(threads=5)) == 5
    monkeypatch.setenv(THREADS_ENV_VAR, "zero")
    with pytest.raises(ConfigError):
        resolve_threads(RunConfig())
    monkeypatch.delenv(THREADS_ENV_VAR)
    assert resolve_threads(RunConfig()) >= 1
