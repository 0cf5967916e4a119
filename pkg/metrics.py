"""
=============================================================================
metrics.py - Метрики Prometheus для мониторинга прогонов генеалогии
=============================================================================

Метрики движка:

1. generation_duration_seconds - время вычисления одного поколения
2. candidate_pairs_evaluated_total - вычисленные пары родителей
3. objects_born_total - новые объекты (точки и прямые)
4. coincidence_events_total - совпадения (тривиальные и нетривиальные)
5. instances_resampled_total - пересэмплированные экземпляры
6. verification_trials_total - проверочные экземпляры кандидатов-чудес
7. run_duration_seconds - время полного прогона
8. memory_usage_bytes - использование памяти

Автор: Команда Atomichack 3.0
Дата: 2025
=============================================================================
"""

import psutil
from prometheus_client import Counter, Gauge, Histogram


# =============================================================================
# ОПРЕДЕЛЕНИЕ МЕТРИК
# =============================================================================

generation_duration_seconds = Histogram(
    'generation_duration_seconds',
    'Время вычисления одного поколения в секундах',
    ['field_kind', 'gender'],
    buckets=(0.01, 0.1, 0.5, 1, 5, 10, 30, 60, 300, float('inf'))
)

candidate_pairs_evaluated_total = Counter(
    'candidate_pairs_evaluated_total',
    'Общее количество вычисленных пар родителей',
    ['field_kind']
)

objects_born_total = Counter(
    'objects_born_total',
    'Общее количество новых объектов',
    ['gender']  # point / line
)

coincidence_events_total = Counter(
    'coincidence_events_total',
    'Совпадения: один ребенок от нескольких пар родителей',
    ['kind']  # trivial / nontrivial
)

instances_resampled_total = Counter(
    'instances_resampled_total',
    'Экземпляры, отброшенные из-за вырожденного посева',
    ['reason']  # degenerate / mismatch
)

verification_trials_total = Counter(
    'verification_trials_total',
    'Свежие экземпляры при проверке кандидатов-чудес',
    ['outcome']  # confirmed / refuted / resampled
)

run_duration_seconds = Histogram(
    'run_duration_seconds',
    'Время полного прогона в секундах',
    ['field_kind', 'status'],
    buckets=(1, 5, 10, 30, 60, 120, 300, 600, 1200, float('inf'))
)

memory_usage_bytes = Gauge(
    'memory_usage_bytes',
    'Использование памяти процессом в байтах',
    ['type']  # rss / vms / percent
)


# =============================================================================
# HELPER ФУНКЦИИ
# =============================================================================

def update_memory_metrics():
    """Обновляет метрики памяти текущего процесса через psutil"""
    try:
        process = psutil.Process()
        mem_info = process.memory_info()
        memory_usage_bytes.labels(type='rss').set(mem_info.rss)
        memory_usage_bytes.labels(type='vms').set(mem_info.vms)
        memory_usage_bytes.labels(type='percent').set(process.memory_percent())
    except Exception as e:
        print(f">>> Ошибка обновления метрик памяти: {e}")


def record_generation(field_kind: str, gender: str, pairs: int, born: int, duration: float):
    """
    Записывает метрики одного поколения.

    Параметры:
        field_kind (str): 'rational' или 'prime'
        gender (str): Пол новорожденных ('point' / 'line')
        pairs (int): Вычисленные пары родителей
        born (int): Новые объекты
        duration (float): Продолжительность в секундах
    """
    candidate_pairs_evaluated_total.labels(field_kind=field_kind).inc(pairs)
    objects_born_total.labels(gender=gender).inc(born)
    generation_duration_seconds.labels(field_kind=field_kind, gender=gender).observe(duration)
    update_memory_metrics()


def record_coincidences(trivial: int, nontrivial: int):
    coincidence_events_total.labels(kind='trivial').inc(trivial)
    coincidence_events_total.labels(kind='nontrivial').inc(nontrivial)


def record_resample(reason: str):
    instances_resampled_total.labels(reason=reason).inc()


def record_verification_trial(outcome: str):
    verification_trials_total.labels(outcome=outcome).inc()


def record_run(field_kind: str, status: str, duration: float):
    """Записывает время полного прогона"""
    run_duration_seconds.labels(field_kind=field_kind, status=status).observe(duration)
    update_memory_metrics()


__all__ = [
    'generation_duration_seconds',
    'candidate_pairs_evaluated_total',
    'objects_born_total',
    'coincidence_events_total',
    'instances_resampled_total',
    'verification_trials_total',
    'run_duration_seconds',
    'memory_usage_bytes',
    'update_memory_metrics',
    'record_generation',
    'record_coincidences',
    'record_resample',
    'record_verification_trial',
    'record_run',
]
