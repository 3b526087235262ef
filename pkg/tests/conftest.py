"""Shared fixtures and hypothesis configuration."""

import json
import math

import pytest
from hypothesis import HealthCheck, settings

from ssqw.model import CoinProfile, LimitCoin, WalkParameters, validate_parameters
from strategies import E1_DOCUMENT

settings.register_profile(
    "suite",
    max_examples=50,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def e1_params() -> WalkParameters:
    return validate_parameters(0.5, math.sqrt(0.75))


@pytest.fixture
def e1_profile() -> CoinProfile:
    return CoinProfile(LimitCoin.symmetric(0.8, 0.6), LimitCoin.symmetric(0.0, 1.0))


@pytest.fixture
def e1_profile_path(tmp_path):
    path = tmp_path / "e1.json"
    path.write_text(json.dumps(E1_DOCUMENT))
    return str(path)
