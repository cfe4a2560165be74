import pytest

from rsocc.harness import packet_spec
from rsocc.modulation import PacketSpec
from tests import get_config


@pytest.fixture
def spec():
    return PacketSpec()


@pytest.fixture
def config():
    return get_config()


@pytest.fixture
def ideal_spec(config):
    return packet_spec(config)


@pytest.fixture
def chdir(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    return tmp_path
