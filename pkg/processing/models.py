"""
=============================================================================
processing/models.py - Pydantic модели конфигурации, отчета и снимков
=============================================================================

Этот модуль содержит все Pydantic схемы движка: параметры поля и посева,
политику спаривания, конфигурацию прогона, схему JSON-отчета и схему
файла снимка. Валидаторы проверяют инварианты при создании объектов.

Автор: Команда Atomichack 3.0
Дата: 2025
=============================================================================
"""

import hashlib
import json
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator
from sympy import isprime

import config


# =============================================================================
# ENUMS
# =============================================================================

class FieldKind(str, Enum):
    """Тип поля координат"""
    RATIONALS = "rational"
    PRIME = "prime"


class Gender(str, Enum):
    """Пол объекта: точка (мужчина) или прямая (женщина)"""
    POINT = "point"
    LINE = "line"

    @property
    def opposite(self) -> "Gender":
        return Gender.LINE if self is Gender.POINT else Gender.POINT


class SeedMode(str, Enum):
    """Режим посева Адамов"""
    GENERIC = "generic"
    CONIC = "conic"


class MatingPolicyKind(str, Enum):
    """Кто с кем спаривается"""
    ALL_PAIRS = "all-pairs"
    SAME_GENERATION = "same-generation"


# =============================================================================
# КОНФИГУРАЦИЯ ПРОГОНА
# =============================================================================

class FieldSpec(BaseModel):
    """Параметры поля и генератора случайных координат"""
    kind: FieldKind = Field(default=FieldKind.PRIME, description="rational или prime")
    prime: Optional[int] = Field(default=None, description="Простой модуль (только prime); None - выбрать автоматически")
    rng_seed: int = Field(default=config.DEFAULT_RNG_SEED, ge=0, le=config.MAX_RNG_SEED)
    sample_bound: int = Field(default=config.DEFAULT_SAMPLE_BOUND, ge=config.MIN_SAMPLE_BOUND)

    @field_validator('prime')
    @classmethod
    def validate_prime(cls, v):
        if v is None:
            return v
        if v.bit_length() < config.MIN_PRIME_BITS:
            raise ValueError(f'Модуль должен быть не короче {config.MIN_PRIME_BITS} бит')
        if v % 2 == 0 or not isprime(v):
            raise ValueError('Модуль должен быть нечетным простым числом')
        return v

    @model_validator(mode='after')
    def validate_kind(self):
        if self.kind is FieldKind.RATIONALS and self.prime is not None:
            raise ValueError('Модуль задается только для режима prime')
        return self

    class Config:
        json_schema_extra = {
            "example": {"kind": "prime", "prime": None, "rng_seed": 20140619, "sample_bound": 1000000}
        }


class SeedConfig(BaseModel):
    """Число Адамов и способ их размещения"""
    adams: int = Field(..., ge=2, description="Число Адамов k")
    mode: SeedMode = Field(default=SeedMode.GENERIC)
    field_spec: FieldSpec = Field(default_factory=FieldSpec)


class MatingPolicy(BaseModel):
    """Политика спаривания"""
    kind: MatingPolicyKind = Field(default=MatingPolicyKind.ALL_PAIRS)


class RunConfig(BaseModel):
    """Полная конфигурация прогона по поколениям"""
    seed: SeedConfig
    policy: MatingPolicy = Field(default_factory=MatingPolicy)
    max_generation: int = Field(default=5, ge=0)
    verify_runs: int = Field(default=config.DEFAULT_VERIFY_RUNS, ge=1)
    resample_limit: int = Field(default=config.DEFAULT_RESAMPLE_LIMIT, ge=1)
    seed_gender: Gender = Field(default=Gender.POINT, description="line - двойственный посев прямыми")
    workers: int = Field(default=config.DEFAULT_WORKERS, ge=1)
    verify_trials: int = Field(default=config.DEFAULT_VERIFY_TRIALS, ge=0)

    @property
    def field_spec(self) -> FieldSpec:
        return self.seed.field_spec

    def digest(self) -> str:
        """
        SHA-256 от полей, определяющих реестр: посев, поле, политика, пол посева.
        Глубина, число экземпляров, число процессов и лимиты в дайджест не входят.
        """
        payload = {
            "seed": self.seed.model_dump(mode="json"),
            "policy": self.policy.model_dump(mode="json"),
            "seed_gender": self.seed_gender.value,
        }
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    class Config:
        json_schema_extra = {
            "example": {
                "seed": {"adams": 4, "mode": "generic", "field_spec": {"kind": "prime"}},
                "policy": {"kind": "all-pairs"},
                "max_generation": 5,
                "verify_runs": 2
            }
        }


# =============================================================================
# СХЕМА ОТЧЕТА
# =============================================================================

class InstanceInfo(BaseModel):
    """Один независимый экземпляр (поле + поток случайных чисел)"""
    instance: int
    attempt: int
    prime: Optional[int] = None
    stream_seed: str


class RunMetadata(BaseModel):
    tool_version: str = config.TOOL_VERSION
    run_config: RunConfig
    config_digest: str
    instances: List[InstanceInfo]


class GenerationRow(BaseModel):
    """Строка таблицы поколений"""
    generation: int
    gender: Gender
    candidate_pairs: int
    new: int
    rediscoveries: int
    cumulative: int


class Certificate(BaseModel):
    """Сертификат чуда: все построения общего ребенка"""
    expressions: List[str]
    rendered_text: str


class MiracleEntry(BaseModel):
    """Класс когении вместе с сертификатом"""
    gender: Gender = Field(..., description="Пол членов класса (родителей)")
    members: List[int]
    member_pedigrees: List[str]
    child_id: int
    child_generation: int
    trivial: bool
    witness_instances: int
    certificate: Certificate


class VerificationStatus(BaseModel):
    state: str = Field(..., description="verified | single-instance | published-mismatch")
    agreeing_instances: int
    published_terms_matched: int
    unverified_from_generation: Optional[int] = None


class Report(BaseModel):
    """JSON-отчет прогона"""
    schema_version: int = config.REPORT_SCHEMA_VERSION
    run_metadata: RunMetadata
    new_counts: List[int]
    cumulative_by_gender: List[int]
    generations_computed: int
    generation_table: List[GenerationRow]
    miracles: List[MiracleEntry]
    trivial_class_count: int
    coincidence_summary: Dict[str, int]
    timings: Dict[str, float]
    verification_status: VerificationStatus

    @model_validator(mode='after')
    def validate_counts(self):
        adams = self.run_metadata.run_config.seed.adams
        if not self.new_counts or self.new_counts[0] != adams:
            raise ValueError('new_counts[0] должен равняться числу Адамов')
        if len(self.cumulative_by_gender) != len(self.new_counts):
            raise ValueError('Длины new_counts и cumulative_by_gender различаются')
        for g, total in enumerate(self.cumulative_by_gender):
            if total != sum(self.new_counts[g::-2]):
                raise ValueError(f'cumulative_by_gender[{g}] не согласован с new_counts')
        runs = self.run_metadata.run_config.verify_runs
        for entry in self.miracles:
            if entry.witness_instances < runs:
                raise ValueError('witness_instances меньше verify_runs')
        return self


# =============================================================================
# СХЕМА СНИМКА
# =============================================================================

class ObjectRecord(BaseModel):
    """Запись одного объекта реестра"""
    id: int
    gender: Gender
    c1: str
    c2: str
    birth: int
    adam_index: Optional[int] = None
    first_parents: Optional[Tuple[int, int]] = None
    parent_pairs: List[Tuple[int, int]] = Field(default_factory=list)


class GenerationRecord(BaseModel):
    index: int
    gender: Gender
    new_ids: List[int]
    candidate_pairs: int = 0
    rediscoveries: int = 0


class SnapshotFile(BaseModel):
    """Самоописывающий файл снимка реестра"""
    format_version: int
    config_digest: str
    field_spec: FieldSpec
    instance: InstanceInfo
    adams: int
    seed_gender: Gender
    generations: List[GenerationRecord]
    objects: List[ObjectRecord]


__all__ = [
    'FieldKind', 'Gender', 'SeedMode', 'MatingPolicyKind',
    'FieldSpec', 'SeedConfig', 'MatingPolicy', 'RunConfig',
    'InstanceInfo', 'RunMetadata', 'GenerationRow', 'Certificate', 'MiracleEntry',
    'VerificationStatus', 'Report', 'ObjectRecord', 'GenerationRecord', 'SnapshotFile',
]
