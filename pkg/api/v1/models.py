"""
=============================================================================
api/v1/models.py - Pydantic модели для API v1
=============================================================================

Схемы запросов и ответов сервиса прогонов: запрос прогона (те же
параметры, что и флаги командной строки), статус задачи, история,
последовательность, удаление и ошибки.

Автор: Команда Atomichack 3.0
Дата: 2025
=============================================================================
"""

from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

import config
from processing.models import (FieldKind, FieldSpec, Gender, MatingPolicy, MatingPolicyKind,
                               RunConfig, SeedConfig, SeedMode)


# =============================================================================
# ENUMS
# =============================================================================

class TaskStatus(str, Enum):
    """Статусы задач"""
    PENDING = "pending"
    PROCESSING = "processing"
    COMPLETED = "completed"
    FAILED = "failed"


# =============================================================================
# REQUEST MODELS
# =============================================================================

class RunRequest(BaseModel):
    """Запрос на прогон генеалогии"""
    adams: int = Field(default=4, ge=2, description="Число Адамов k")
    generations: int = Field(default=5, ge=0, description="Последнее вычисляемое поколение")
    policy: MatingPolicyKind = Field(default=MatingPolicyKind.ALL_PAIRS)
    seed_mode: SeedMode = Field(default=SeedMode.GENERIC)
    field: FieldKind = Field(default=FieldKind.PRIME)
    prime: Optional[int] = Field(default=None, description="Модуль; по умолчанию выбирается")
    rng_seed: int = Field(default=config.DEFAULT_RNG_SEED, ge=0, le=config.MAX_RNG_SEED)
    verify_runs: int = Field(default=config.DEFAULT_VERIFY_RUNS, ge=1)
    verify_trials: int = Field(default=config.DEFAULT_VERIFY_TRIALS, ge=0)
    sample_bound: int = Field(default=config.DEFAULT_SAMPLE_BOUND, ge=config.MIN_SAMPLE_BOUND)
    resample_limit: int = Field(default=config.DEFAULT_RESAMPLE_LIMIT, ge=1)
    dual: bool = Field(default=False, description="Посев прямыми")

    def to_run_config(self) -> RunConfig:
        """
        RunConfig прогона (в сервисе всегда один процесс на задачу).

        Исключения:
            ValidationError: недопустимая комбинация параметров
        """
        return RunConfig(
            seed=SeedConfig(
                adams=self.adams,
                mode=self.seed_mode,
                field_spec=FieldSpec(kind=self.field, prime=self.prime, rng_seed=self.rng_seed,
                                     sample_bound=self.sample_bound),
            ),
            policy=MatingPolicy(kind=self.policy),
            max_generation=self.generations,
            verify_runs=self.verify_runs,
            verify_trials=self.verify_trials,
            resample_limit=self.resample_limit,
            seed_gender=Gender.LINE if self.dual else Gender.POINT,
        )

    class Config:
        json_schema_extra = {
            "example": {
                "adams": 4,
                "generations": 5,
                "policy": "all-pairs",
                "seed_mode": "generic",
                "field": "prime",
                "verify_runs": 2
            }
        }


# =============================================================================
# RESPONSE MODELS
# =============================================================================

class TaskCreatedResponse(BaseModel):
    """Ответ при создании задачи"""
    task_id: str = Field(..., description="Уникальный идентификатор задачи")
    status: TaskStatus = Field(..., description="Текущий статус задачи")
    message: str = Field(..., description="Информационное сообщение")
    config_digest: str = Field(..., description="Дайджест конфигурации прогона")


class TaskStatusResponse(BaseModel):
    """Детальный статус задачи"""
    task_id: str
    status: TaskStatus
    progress: int = Field(..., ge=0, le=100, description="Прогресс выполнения (0-100%)")
    created_at: datetime
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    last_message: Optional[str] = None
    run_config: Dict[str, Any]
    error_message: Optional[str] = None
    error_code: Optional[str] = Field(None, description="Имя ошибки движка (SeedFailure, ...)")

    class Config:
        json_schema_extra = {
            "example": {
                "task_id": "550e8400-e29b-41d4-a716-446655440000",
                "status": "processing",
                "progress": 45,
                "created_at": "2025-10-23T10:00:00",
                "started_at": "2025-10-23T10:00:01",
                "completed_at": None,
                "last_message": "Поколение 4",
                "run_config": {"seed": {"adams": 4}},
                "error_message": None,
                "error_code": None
            }
        }


class SequenceResponse(BaseModel):
    """Последовательность прогона одной строкой"""
    task_id: str
    convention: Literal["new", "cumulative"]
    sequence: str

    class Config:
        json_schema_extra = {
            "example": {
                "task_id": "550e8400-e29b-41d4-a716-446655440000",
                "convention": "new",
                "sequence": "4, 6, 3, 3, 6, 16"
            }
        }


class HistoryItem(BaseModel):
    """Элемент истории прогонов"""
    task_id: str
    status: TaskStatus
    adams: int
    generations: int
    created_at: datetime
    completed_at: Optional[datetime] = None
    progress: int


class HistoryResponse(BaseModel):
    """Ответ с историей прогонов"""
    items: List[HistoryItem] = Field(..., description="Список прогонов")
    total: int = Field(..., description="Общее количество записей")
    skip: int
    limit: int


class ErrorResponse(BaseModel):
    """Стандартный ответ об ошибке"""
    error: str = Field(..., description="Тип ошибки")
    message: str = Field(..., description="Описание ошибки")
    details: Optional[Dict[str, Any]] = Field(None, description="Дополнительные детали")


class DeleteResponse(BaseModel):
    """Ответ на удаление результата"""
    task_id: str
    message: str
    deleted: bool
