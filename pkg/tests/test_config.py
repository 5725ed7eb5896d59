import argparse
import os

import pytest

from config import ConfigError, RunConfig, Settings, load_settings
from spaces import DEFAULT_HEIGHT


def test_defaults_from_an_empty_environment(clean_env):
    settings = load_settings(clean_env)
    assert settings == Settings(threads=1, log_dir=None, log_level="INFO", default_height=DEFAULT_HEIGHT, seed=0)


def test_values_are_parsed():
    settings = load_settings({
        "INJEKT_THREADS": "4",
        "INJEKT_LOG_LEVEL": "debug",
        "INJEKT_LOG_DIR": "logs",
        "INJEKT_DEFAULT_HEIGHT": "25",
        "INJEKT_SEED": " 9 ",
    })
    assert settings.threads == 4
    assert settings.log_level == "DEBUG"
    assert settings.log_dir == "logs"
    assert settings.default_height == 25
    assert settings.seed == 9


def test_blank_values_fall_back_to_defaults():
    assert load_settings({"INJEKT_THREADS": "  ", "INJEKT_LOG_DIR": ""}).threads == 1


@pytest.mark.parametrize("env", [
    {"INJEKT_THREADS": "many"},
    {"INJEKT_THREADS": "0"},
    {"INJEKT_LOG_LEVEL": "loud"},
    {"INJEKT_DEFAULT_HEIGHT": "0"},
    {"INJEKT_SEED": "-1"},
])
def test_invalid_values_raise(env):
    with pytest.raises(ConfigError):
        load_settings(env)


def test_dotenv_file_is_read(tmp_path, monkeypatch):
    path = tmp_path / ".env"
    path.write_text("INJEKT_THREADS=3\nINJEKT_SEED=11\n", encoding="utf-8")
    monkeypatch.setattr(os, "environ", {})
    settings = load_settings(dotenv_path=str(path))
    assert settings.threads == 3
    assert settings.seed == 11


def test_run_config_from_args():
    args = argparse.Namespace(command="sepinv", seed=None, trials=50, height=None, primes=[13, 19],
                              report=None, out="x.json", format="text")
    run = RunConfig.from_args(args, Settings(threads=3, seed=7, default_height=20))
    assert (run.seed, run.trials, run.height, run.workers) == (7, 50, 20, 3)
    assert run.primes == (13, 19)
    assert run.output == "x.json"
    assert run.to_json()["primes"] == [13, 19]


def test_explicit_seed_beats_the_environment():
    args = argparse.Namespace(command="verify", seed=0, trials=None)
    run = RunConfig.from_args(args, Settings(seed=7))
    assert run.seed == 0
    assert run.trials == 0
    assert run.report_format == "json"


@pytest.mark.parametrize("kwargs", [
    {"report_format": "yaml"},
    {"trials": -1},
    {"height": 0},
    {"workers": 0},
])
def test_run_config_validation(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(subcommand="verify", **kwargs)
