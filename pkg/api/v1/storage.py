"""
=============================================================================
api/v1/storage.py - Хранение задач и отчетов сервиса прогонов
=============================================================================

Задачи хранятся в одном JSON-файле (tasks.json), отчеты прогонов - по
одному файлу схемы Report на задачу в каталоге reports/. Запись атомарна
(временный файл + os.replace), данные переживают перезапуск сервиса.
Каталог задается config.STORAGE_DIR (GENEALOGY_STORAGE_DIR).

Автор: Команда Atomichack 3.0
Дата: 2025
=============================================================================
"""

import json
import os
import threading
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

import config
from processing import console
from processing.models import Report


DATETIME_FIELDS = ('created_at', 'started_at', 'completed_at')


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding='utf-8')
    os.replace(tmp, path)


def _encode_task(task: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v.isoformat() if isinstance(v, datetime) else v for k, v in task.items()}


def _decode_task(task: Dict[str, Any]) -> Dict[str, Any]:
    decoded = dict(task)
    for key in DATETIME_FIELDS:
        value = decoded.get(key)
        if isinstance(value, str):
            try:
                decoded[key] = datetime.fromisoformat(value)
            except ValueError:
                decoded[key] = None
    return decoded


# =============================================================================
# ХРАНИЛИЩЕ ПРОГОНОВ
# =============================================================================

class StorageManager:
    """
    Задачи прогонов и их отчеты.
    Изменения задач выполняются под одной блокировкой и сразу пишутся на диск.
    """

    def __init__(self, storage_dir: Path = config.STORAGE_DIR):
        self._lock = threading.Lock()
        self.storage_dir = Path(storage_dir)
        self.tasks_file = self.storage_dir / "tasks.json"
        self.reports_dir = self.storage_dir / "reports"
        self.reports_dir.mkdir(parents=True, exist_ok=True)
        self._tasks = self._read_tasks()

    def _read_tasks(self) -> Dict[str, Dict[str, Any]]:
        if not self.tasks_file.exists():
            return {}
        try:
            data = json.loads(self.tasks_file.read_text(encoding='utf-8'))
        except (OSError, ValueError) as e:
            console.log(f"tasks.json не прочитан, начинаем с пустого списка: {e}", "ХРАНИЛИЩЕ")
            return {}
        console.log(f"Загружено задач: {len(data)}", "ХРАНИЛИЩЕ")
        return {task_id: _decode_task(task) for task_id, task in data.items()}

    def _flush(self):
        encoded = {task_id: _encode_task(task) for task_id, task in self._tasks.items()}
        _write_atomic(self.tasks_file, json.dumps(encoded, indent=2, ensure_ascii=False))

    # =========================================================================
    # ЗАДАЧИ
    # =========================================================================

    def create_task(self, task_id: str, task_data: Dict[str, Any]) -> bool:
        with self._lock:
            if task_id in self._tasks:
                return False
            self._tasks[task_id] = dict(task_data)
            self._flush()
        return True

    def get_task(self, task_id: str) -> Optional[Dict[str, Any]]:
        with self._lock:
            task = self._tasks.get(task_id)
            return dict(task) if task is not None else None

    def update_task(self, task_id: str, **updates: Any) -> bool:
        with self._lock:
            task = self._tasks.get(task_id)
            if task is None:
                return False
            task.update(updates)
            self._flush()
        return True

    def delete_task(self, task_id: str) -> bool:
        with self._lock:
            if self._tasks.pop(task_id, None) is None:
                return False
            self._flush()
        return True

    def tasks_with_status(self, *statuses: str) -> List[Dict[str, Any]]:
        """Копии задач с одним из статусов; без аргументов - все задачи"""
        with self._lock:
            return [dict(task) for task in self._tasks.values()
                    if not statuses or task.get('status') in statuses]

    # =========================================================================
    # ОТЧЕТЫ
    # =========================================================================

    def _report_file(self, task_id: str) -> Path:
        return self.reports_dir / f"{task_id}.json"

    def save_report(self, task_id: str, report: Report) -> Path:
        path = self._report_file(task_id)
        _write_atomic(path, report.model_dump_json())
        console.log(f"Отчет задачи {task_id} сохранен", "ХРАНИЛИЩЕ")
        return path

    def load_report(self, task_id: str) -> Optional[Report]:
        path = self._report_file(task_id)
        if not path.exists():
            return None
        try:
            return Report.model_validate_json(path.read_text(encoding='utf-8'))
        except (OSError, ValidationError) as e:
            console.log(f"Отчет {task_id} поврежден: {e}", "ХРАНИЛИЩЕ")
            return None

    def delete_report(self, task_id: str) -> bool:
        path = self._report_file(task_id)
        if not path.exists():
            return False
        path.unlink()
        return True


# =============================================================================
# ГЛОБАЛЬНЫЙ ЭКЗЕМПЛЯР
# =============================================================================

_storage = StorageManager()


def get_storage() -> StorageManager:
    return _storage


def use_storage(manager: StorageManager) -> StorageManager:
    """Подменяет хранилище сервиса; возвращает прежнее"""
    global _storage
    previous, _storage = _storage, manager
    return previous
