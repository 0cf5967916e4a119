"""
=============================================================================
test_api_v1.py - Тестирование API v1
=============================================================================

Проверяет эндпоинты сервиса прогонов: ключи доступа, запуск прогона,
статус, отчет, последовательность, историю, удаление и служебные
эндпоинты. Фоновые задачи FastAPI TestClient выполняет до возврата ответа,
поэтому прогон завершен к моменту следующего запроса.

Запуск:
    pytest test_api_v1.py

Автор: Команда Atomichack 3.0
Дата: 2025
=============================================================================
"""

import pytest
from fastapi import FastAPI
from fastapi.testclient import TestClient

from api.v1 import storage, tasks
from api.v1.middleware import setup_middleware
from api.v1.storage import StorageManager
from main import app
from processing import genealogy
from processing.errors import SeedFailure
from processing.models import RunConfig, SeedConfig


# =============================================================================
# КОНФИГУРАЦИЯ
# =============================================================================

API_KEY = "demo-api-key-123"
HEADERS = {"X-API-Key": API_KEY}
SMALL_RUN = {"adams": 4, "generations": 3, "verify_runs": 1, "verify_trials": 1}


@pytest.fixture
def client(tmp_path):
    previous = storage.use_storage(StorageManager(tmp_path))
    yield TestClient(app)
    storage.use_storage(previous)


def start_run(client, payload=None):
    response = client.post("/api/v1/runs", json=payload or SMALL_RUN, headers=HEADERS)
    assert response.status_code == 201, response.text
    return response.json()['task_id']


# =============================================================================
# КЛЮЧИ ДОСТУПА
# =============================================================================

def test_missing_api_key(client):
    assert client.get("/api/v1/history").status_code == 401


def test_invalid_api_key(client):
    response = client.get("/api/v1/history", headers={"X-API-Key": "wrong-key"})
    assert response.status_code == 403


# =============================================================================
# ПРОГОН
# =============================================================================

def test_run_lifecycle(client):
    response = client.post("/api/v1/runs", json=SMALL_RUN, headers=HEADERS)
    assert response.status_code == 201
    created = response.json()
    assert created['status'] == "pending"
    task_id = created['task_id']

    response = client.get(f"/api/v1/status/{task_id}", headers=HEADERS)
    assert "X-Process-Time" in response.headers
    status = response.json()
    assert status['status'] == "completed"
    assert status['progress'] == 100
    assert status['run_config']['seed']['adams'] == 4
    assert status['error_code'] is None

    report = client.get(f"/api/v1/report/{task_id}", headers=HEADERS).json()
    assert report['new_counts'] == [4, 6, 3, 3]
    assert report['run_metadata']['config_digest'] == created['config_digest']

    sequence = client.get(f"/api/v1/sequence/{task_id}", headers=HEADERS).json()
    assert sequence['sequence'] == "4, 6, 3, 3"
    cumulative = client.get(f"/api/v1/sequence/{task_id}", params={"convention": "cumulative"},
                            headers=HEADERS).json()
    assert cumulative['sequence'] == "4, 6, 7, 9"


def test_failed_run_records_error_code(client, monkeypatch):
    def no_seed(run_config, instance, attempt):
        raise SeedFailure("посев невозможен")

    monkeypatch.setattr(genealogy, "seed_ledger", no_seed)
    task_id = start_run(client)
    status = client.get(f"/api/v1/status/{task_id}", headers=HEADERS).json()
    assert status['status'] == "failed"
    assert status['error_code'] == "SeedFailure"
    assert client.get(f"/api/v1/report/{task_id}", headers=HEADERS).status_code == 409


@pytest.mark.parametrize("payload", [
    {"adams": 1},
    {"generations": -2},
    {"field": "prime", "prime": 7},
    {"field": "rational", "prime": 2 ** 61 - 1},
])
def test_invalid_run_request(client, payload):
    response = client.post("/api/v1/runs", json=payload, headers=HEADERS)
    assert response.status_code == 422


def test_too_many_active_runs(client):
    for _ in range(tasks.MAX_CONCURRENT_TASKS):
        tasks.task_manager.create_task(storage_run_config())
    response = client.post("/api/v1/runs", json=SMALL_RUN, headers=HEADERS)
    assert response.status_code == 429
    assert client.get("/health").json()['load']['available_slots'] == 0


def storage_run_config():
    return RunConfig(seed=SeedConfig(adams=4), max_generation=1)


# =============================================================================
# ИСТОРИЯ И УДАЛЕНИЕ
# =============================================================================

def test_history_and_filter(client):
    first = start_run(client)
    second = start_run(client, {**SMALL_RUN, "adams": 5, "generations": 2})
    pending = tasks.task_manager.create_task(storage_run_config())

    history = client.get("/api/v1/history", headers=HEADERS).json()
    assert history['total'] == 3
    assert {item['task_id'] for item in history['items']} == {first, second, pending}

    completed = client.get("/api/v1/history", params={"status": "completed"}, headers=HEADERS).json()
    assert completed['total'] == 2
    assert {item['adams'] for item in completed['items']} == {4, 5}

    page = client.get("/api/v1/history", params={"skip": 1, "limit": 1}, headers=HEADERS).json()
    assert len(page['items']) == 1 and page['total'] == 3


def test_report_not_ready(client):
    task_id = tasks.task_manager.create_task(storage_run_config())
    assert client.get(f"/api/v1/report/{task_id}", headers=HEADERS).status_code == 409
    assert client.get(f"/api/v1/sequence/{task_id}", headers=HEADERS).status_code == 409


def test_unknown_task(client):
    assert client.get("/api/v1/status/nope", headers=HEADERS).status_code == 404
    assert client.get("/api/v1/report/nope", headers=HEADERS).status_code == 404
    assert client.delete("/api/v1/results/nope", headers=HEADERS).status_code == 404


def test_delete_result(client):
    task_id = start_run(client)
    response = client.delete(f"/api/v1/results/{task_id}", headers=HEADERS)
    assert response.status_code == 200
    assert response.json()['deleted'] is True
    assert storage.get_storage().load_report(task_id) is None
    assert client.get(f"/api/v1/status/{task_id}", headers=HEADERS).status_code == 404


def test_storage_survives_restart(client, tmp_path):
    task_id = start_run(client)
    reopened = StorageManager(tmp_path)
    task = reopened.get_task(task_id)
    assert task['status'] == "completed"
    assert task['completed_at'] >= task['created_at']
    assert reopened.load_report(task_id).new_counts == [4, 6, 3, 3]


def test_running_task_cannot_be_deleted(client):
    task_id = tasks.task_manager.create_task(storage_run_config())
    tasks.task_manager.start_task(task_id)
    assert client.delete(f"/api/v1/results/{task_id}", headers=HEADERS).status_code == 409


# =============================================================================
# СЛУЖЕБНЫЕ ЭНДПОИНТЫ
# =============================================================================

def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body['status'] == "ok"
    assert body['load']['max_concurrent'] == tasks.MAX_CONCURRENT_TASKS


def test_metrics(client):
    start_run(client)
    response = client.get("/metrics")
    assert response.status_code == 200
    assert "run_duration_seconds" in response.text
    assert "candidate_pairs_evaluated_total" in response.text


def test_rate_limit():
    limited = FastAPI()

    @limited.get("/api/v1/ping")
    async def ping():
        return {"pong": True}

    setup_middleware(limited, max_requests=3, window_seconds=60)
    client = TestClient(limited)
    codes = [client.get("/api/v1/ping").status_code for _ in range(5)]
    assert codes == [200, 200, 200, 429, 429]
