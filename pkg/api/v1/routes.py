"""
=============================================================================
api/v1/routes.py - Роутеры API v1
=============================================================================

Эндпоинты сервиса прогонов генеалогии:
- Запуск прогона в фоне
- Статус задачи
- JSON-отчет и строка последовательности
- История с фильтрацией
- Удаление результатов

Автор: Команда Atomichack 3.0
Дата: 2025
=============================================================================
"""

from typing import Literal, Optional

from fastapi import APIRouter, BackgroundTasks, Depends, Header, HTTPException, Query, status
from pydantic import ValidationError

from processing import emit_sequence
from processing.models import Report

from .models import (DeleteResponse, ErrorResponse, HistoryItem, HistoryResponse, RunRequest,
                     SequenceResponse, TaskCreatedResponse, TaskStatus, TaskStatusResponse)
from .tasks import MAX_CONCURRENT_TASKS, process_task_background, task_manager


# =============================================================================
# СОЗДАНИЕ РОУТЕРА
# =============================================================================

router = APIRouter(
    prefix="/api/v1",
    tags=["API v1"],
    responses={
        401: {"model": ErrorResponse, "description": "Unauthorized"},
        403: {"model": ErrorResponse, "description": "Forbidden"},
        429: {"model": ErrorResponse, "description": "Too Many Requests"},
    }
)


# =============================================================================
# ЗАВИСИМОСТИ
# =============================================================================

VALID_API_KEYS = {
    "demo-api-key-123",
    "test-api-key-456",
    "dev-api-key-789"
}


async def verify_api_key(x_api_key: Optional[str] = Header(None)) -> str:
    """
    Проверяет API ключ из заголовка X-API-Key.

    Исключения:
        HTTPException: 401 если ключа нет, 403 если ключ неизвестен
    """
    if not x_api_key:
        raise HTTPException(status_code=status.HTTP_401_UNAUTHORIZED,
                            detail="API key is missing. Provide X-API-Key header.")
    if x_api_key not in VALID_API_KEYS:
        raise HTTPException(status_code=status.HTTP_403_FORBIDDEN, detail="Invalid API key")
    return x_api_key


def _require_task(task_id: str) -> dict:
    task = task_manager.get_task_status(task_id)
    if task is None:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=f"Task {task_id} not found")
    return task


def _require_report(task_id: str) -> Report:
    task = _require_task(task_id)
    if task['status'] != TaskStatus.COMPLETED.value:
        raise HTTPException(status_code=status.HTTP_409_CONFLICT,
                            detail=f"Task {task_id} is {task['status']}, report is not ready")
    report = task_manager.get_report(task_id)
    if report is None:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=f"Report for {task_id} not found")
    return report


# =============================================================================
# ЭНДПОИНТЫ
# =============================================================================

@router.post(
    "/runs",
    response_model=TaskCreatedResponse,
    status_code=status.HTTP_201_CREATED,
    summary="Запуск прогона генеалогии",
)
async def create_run(request: RunRequest, background_tasks: BackgroundTasks,
                     api_key: str = Depends(verify_api_key)):
    """
    Создает задачу прогона и выполняет ее в фоне.
    Не более MAX_CONCURRENT_TASKS активных задач одновременно.
    """
    try:
        run_config = request.to_run_config()
    except ValidationError as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
                            detail=str(e))

    if not task_manager.can_create_task():
        raise HTTPException(status_code=status.HTTP_429_TOO_MANY_REQUESTS,
                            detail=f"Too many active runs (max {MAX_CONCURRENT_TASKS})")

    task_id = task_manager.create_task(run_config)
    background_tasks.add_task(process_task_background, task_id, run_config)
    return TaskCreatedResponse(task_id=task_id, status=TaskStatus.PENDING,
                               message="Run queued", config_digest=run_config.digest())


@router.get("/status/{task_id}", response_model=TaskStatusResponse, summary="Статус задачи")
async def get_status(task_id: str, api_key: str = Depends(verify_api_key)):
    task = _require_task(task_id)
    return TaskStatusResponse(
        task_id=task_id,
        status=TaskStatus(task['status']),
        progress=task.get('progress', 0),
        created_at=task['created_at'],
        started_at=task.get('started_at'),
        completed_at=task.get('completed_at'),
        last_message=task.get('last_message'),
        run_config=task['run_config'],
        error_message=task.get('error_message'),
        error_code=task.get('error_code'),
    )


@router.get("/report/{task_id}", response_model=Report, summary="JSON-отчет прогона")
async def get_report(task_id: str, api_key: str = Depends(verify_api_key)):
    return _require_report(task_id)


@router.get("/sequence/{task_id}", response_model=SequenceResponse, summary="Последовательность прогона")
async def get_sequence(task_id: str,
                       convention: Literal["new", "cumulative"] = Query("new"),
                       api_key: str = Depends(verify_api_key)):
    report = _require_report(task_id)
    return SequenceResponse(task_id=task_id, convention=convention,
                            sequence=emit_sequence(report, convention))


@router.get("/history", response_model=HistoryResponse, summary="История прогонов")
async def get_history(skip: int = Query(0, ge=0),
                      limit: int = Query(10, ge=1, le=100),
                      status_filter: Optional[TaskStatus] = Query(None, alias="status"),
                      api_key: str = Depends(verify_api_key)):
    history = task_manager.get_history(skip=skip, limit=limit,
                                       status=status_filter.value if status_filter else None)
    items = [
        HistoryItem(
            task_id=task['task_id'],
            status=TaskStatus(task['status']),
            adams=task['run_config']['seed']['adams'],
            generations=task['run_config']['max_generation'],
            created_at=task['created_at'],
            completed_at=task.get('completed_at'),
            progress=task.get('progress', 0),
        )
        for task in history['items']
    ]
    return HistoryResponse(items=items, total=history['total'], skip=skip, limit=limit)


@router.delete("/results/{task_id}", response_model=DeleteResponse, summary="Удаление результата")
async def delete_result(task_id: str, api_key: str = Depends(verify_api_key)):
    task = _require_task(task_id)
    if task['status'] == TaskStatus.PROCESSING.value:
        raise HTTPException(status_code=status.HTTP_409_CONFLICT, detail="Cannot delete a running task")
    deleted = task_manager.delete_task(task_id)
    return DeleteResponse(task_id=task_id, message="Result deleted" if deleted else "Nothing to delete",
                          deleted=deleted)
