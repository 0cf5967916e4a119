"""
=============================================================================
api/v1/tasks.py - Управление задачами прогонов
=============================================================================

Этот модуль создает задачи прогонов, ограничивает число одновременно
активных задач и выполняет прогон в фоне (в executor, чтобы не блокировать
цикл событий).

Автор: Команда Atomichack 3.0
Дата: 2025
=============================================================================
"""

import asyncio
import threading
import time
import traceback
import uuid
from datetime import datetime
from typing import Any, Dict, Optional

from processing import console, run_full_analysis
from processing.errors import GenealogyError, error_code_name
from processing.models import Report, RunConfig

from .storage import get_storage


# =============================================================================
# КОНСТАНТЫ
# =============================================================================

# Максимальное количество одновременно активных (pending + processing) задач
MAX_CONCURRENT_TASKS = 4

ACTIVE_STATUSES = ('pending', 'processing')


# =============================================================================
# КЛАСС МЕНЕДЖЕРА ЗАДАЧ
# =============================================================================

class TaskManager:
    """
    Менеджер задач прогонов.
    Переходы статусов и проверка лимита выполняются под блокировкой.
    """

    def __init__(self):
        self._lock = threading.Lock()

    def can_create_task(self) -> bool:
        with self._lock:
            return len(get_storage().tasks_with_status(*ACTIVE_STATUSES)) < MAX_CONCURRENT_TASKS

    def get_current_load(self) -> Dict[str, int]:
        storage = get_storage()
        processing = len(storage.tasks_with_status('processing'))
        pending = len(storage.tasks_with_status('pending'))
        return {
            'processing': processing,
            'pending': pending,
            'total_active': processing + pending,
            'max_concurrent': MAX_CONCURRENT_TASKS,
            'available_slots': max(0, MAX_CONCURRENT_TASKS - processing - pending),
        }

    def create_task(self, run_config: RunConfig) -> str:
        """
        Регистрирует задачу прогона в хранилище.

        Возвращает:
            str: ID задачи
        """
        task_id = str(uuid.uuid4())
        get_storage().create_task(task_id, {
            'task_id': task_id,
            'status': 'pending',
            'progress': 0,
            'created_at': datetime.now(),
            'started_at': None,
            'completed_at': None,
            'last_message': None,
            'run_config': run_config.model_dump(mode="json"),
            'config_digest': run_config.digest(),
            'error_message': None,
            'error_code': None,
        })
        console.log(f"Создана задача {task_id}: k={run_config.seed.adams}, "
                    f"поколений {run_config.max_generation}", "ЗАДАЧИ")
        return task_id

    def start_task(self, task_id: str) -> bool:
        with self._lock:
            started = get_storage().update_task(task_id, status='processing', started_at=datetime.now(),
                                                progress=0)
        if started:
            console.log(f"Задача {task_id} запущена", "ЗАДАЧИ")
        return started

    def update_progress(self, task_id: str, progress: int, message: Optional[str] = None) -> bool:
        updates: Dict[str, Any] = {'progress': min(100, max(0, progress))}
        if message:
            updates['last_message'] = message
        return get_storage().update_task(task_id, **updates)

    def complete_task(self, task_id: str, report: Optional[Report] = None,
                      error: Optional[BaseException] = None) -> bool:
        """
        Завершает задачу: с отчетом - completed, с ошибкой - failed.
        Имя ошибки движка попадает в error_code, прочие ошибки - InternalError.
        """
        storage = get_storage()
        with self._lock:
            task = storage.get_task(task_id)
            if task is None:
                return False
            if report is not None:
                storage.save_report(task_id, report)
                storage.update_task(task_id, status='completed', progress=100, completed_at=datetime.now())
            else:
                code = error_code_name(error) if isinstance(error, GenealogyError) else "InternalError"
                storage.update_task(task_id, status='failed', completed_at=datetime.now(),
                                    error_message=str(error), error_code=code)
        console.log(f"Задача {task_id}: {'completed' if report is not None else 'failed'}", "ЗАДАЧИ")
        return True

    def get_task_status(self, task_id: str) -> Optional[Dict[str, Any]]:
        return get_storage().get_task(task_id)

    def get_report(self, task_id: str) -> Optional[Report]:
        return get_storage().load_report(task_id)

    def delete_task(self, task_id: str) -> bool:
        """Удаляет задачу и ее отчет"""
        storage = get_storage()
        with self._lock:
            storage.delete_report(task_id)
            deleted = storage.delete_task(task_id)
        if deleted:
            console.log(f"Задача {task_id} удалена", "ЗАДАЧИ")
        return deleted

    def get_history(self, skip: int = 0, limit: int = 10, status: Optional[str] = None) -> Dict[str, Any]:
        """История задач, новые первыми"""
        tasks = get_storage().tasks_with_status(*([status] if status else []))
        tasks.sort(key=lambda t: t.get('created_at') or datetime.min, reverse=True)
        return {'items': tasks[skip:skip + limit], 'total': len(tasks), 'skip': skip, 'limit': limit}


# =============================================================================
# ГЛОБАЛЬНЫЙ ЭКЗЕМПЛЯР МЕНЕДЖЕРА ЗАДАЧ
# =============================================================================

task_manager = TaskManager()


# =============================================================================
# ФУНКЦИЯ ДЛЯ ВЫПОЛНЕНИЯ ПРОГОНА В ФОНЕ
# =============================================================================

def _execute_run(task_id: str, run_config: RunConfig) -> Report:
    def progress_callback(stage: str, progress: int, message: str):
        task_manager.update_progress(task_id, progress, message)
        console.log(f"[{task_id}] {progress}% - {stage}: {message}")

    report, _ = run_full_analysis(run_config, progress_callback=progress_callback)
    return report


async def process_task_background(task_id: str, run_config: RunConfig):
    """Выполняет прогон задачи и сохраняет отчет"""
    task_manager.start_task(task_id)
    start_time = time.perf_counter()
    try:
        loop = asyncio.get_running_loop()
        report = await loop.run_in_executor(None, _execute_run, task_id, run_config)
    except GenealogyError as e:
        console.log(f"[{task_id}] {error_code_name(e)}: {e}", "ЗАДАЧИ")
        task_manager.complete_task(task_id, error=e)
        return
    except Exception as e:
        console.log(f"[{task_id}] Ошибка прогона: {e}", "ЗАДАЧИ")
        traceback.print_exc()
        task_manager.complete_task(task_id, error=e)
        return
    task_manager.complete_task(task_id, report=report)
    console.log(f"[{task_id}] Прогон завершен за {time.perf_counter() - start_time:.1f}s", "ЗАДАЧИ")
