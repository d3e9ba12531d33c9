"""
Shared fixtures.
"""

import json
import logging

import pytest

from gdofkit.core.channel import ChannelMatrix
from gdofkit.core.factory import load_package_config

logging.basicConfig(level=logging.INFO)

FIG_ALPHA = [
    ["6/5", "11/10", "9/10"],
    ["9/10", "13/10", "7/10"],
    ["7/10", "9/10", "1"],
]


@pytest.fixture
def test_cfg():
    return load_package_config(config_name="test_config")


@pytest.fixture
def example_channel() -> ChannelMatrix:
    """Conforming channel whose outer region is met by the F part of order 123."""
    return ChannelMatrix.from_rows(FIG_ALPHA)


@pytest.fixture
def example_channel_file(tmp_path):
    path = tmp_path / "channel.json"
    path.write_text(json.dumps({"alpha": FIG_ALPHA}), encoding="utf-8")
    return path
