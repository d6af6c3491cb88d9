import pytest
from fastapi.testclient import TestClient

from embedsvc.config import ServiceConfig
from embedsvc.service import create_app

MODELS = ("albert", "bert", "longformer")


@pytest.fixture
def config():
    return ServiceConfig.from_names(MODELS, backend="hash", max_batch=16)


@pytest.fixture
def client(config):
    with TestClient(create_app(config)) as c:
        yield c


@pytest.fixture
def pairs_csv(tmp_path):
    path = tmp_path / "pairs.csv"
    path.write_text(
        "pair_id,req1_id,req1_text,req2_id,req2_text,label\n"
        "p0,a0,the system shall process payments,b0,the system shall process payments,duplicate\n"
        "p1,a1,the gateway routes messages,b1,alerts appear on the dashboard,neutral\n"
        "p2,a2,sensor data is stored daily,b2,daily storage of sensor data,duplicate\n",
        encoding="utf-8",
    )
    return path
