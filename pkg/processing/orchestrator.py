"""
=============================================================================
processing/orchestrator.py - Главный модуль оркестрации прогона
=============================================================================

Этот модуль координирует все этапы прогона генеалогии:
1. Возобновление из снимков (если задано)
2. Расписание поколений на нескольких независимых экземплярах
3. Извлечение классов когении
4. Проверка нетривиальных классов на свежих экземплярах
5. Сборка отчета

Автор: Команда Atomichack 3.0
=============================================================================
"""

import time
from pathlib import Path
from typing import Callable, Optional

from . import console
from .genealogy import run_schedule
from .miracles import extract_cogeny_classes, verify_classes
from .models import Report, RunConfig
from .report_generator import build_report
from .snapshots import SnapshotWriter, restore_for_resume

# Импортируем модуль метрик для мониторинга
try:
    import metrics
    METRICS_ENABLED = True
except ImportError:
    METRICS_ENABLED = False
    console.log("Модуль metrics недоступен. Метрики отключены.")


# =============================================================================
# ОСНОВНАЯ ФУНКЦИЯ ПРОГОНА
# =============================================================================

def run_full_analysis(run_config: RunConfig,
                      progress_callback: Optional[Callable[[str, int, str], None]] = None,
                      snapshot_dir: Optional[Path] = None,
                      resume: Optional[Path] = None):
    """
    Выполняет полный прогон: поколения, чудеса, проверка, отчет.

    Параметры:
        run_config (RunConfig): Конфигурация прогона
        progress_callback: Функция (stage, percent, message) для отслеживания прогресса
        snapshot_dir (Path, optional): Каталог снимков после каждого поколения
        resume (Path, optional): Снимок или каталог снимков для возобновления

    Возвращает:
        tuple[Report, ScheduleResult]: Отчет и результат расписания

    Исключения:
        SeedFailure, VerificationMismatch, CogenyViolation,
        FormatMismatch, ConfigDigestMismatch - пробрасываются вызывающему
    """
    started = time.perf_counter()
    status = "error"
    console.log(f"Прогон: k={run_config.seed.adams}, поколений {run_config.max_generation}, "
                f"поле {run_config.field_spec.kind.value}, политика {run_config.policy.kind.value}", "ПРОГОН")
    try:
        # =====================================================================
        # ЭТАП 1: ВОЗОБНОВЛЕНИЕ (0-5%)
        # =====================================================================
        restored = None
        if resume is not None:
            if progress_callback:
                progress_callback("Возобновление", 2, f"Чтение снимков {resume}")
            restored = restore_for_resume(Path(resume), run_config)

        writer = SnapshotWriter(Path(snapshot_dir), run_config) if snapshot_dir is not None else None

        # =====================================================================
        # ЭТАП 2: ПОКОЛЕНИЯ (5-80%)
        # =====================================================================
        def schedule_progress(stage: str, percent: int, message: str):
            if progress_callback:
                progress_callback("Поколения", 5 + percent * 75 // 100, message)

        t0 = time.perf_counter()
        schedule = run_schedule(run_config, restored, writer, schedule_progress)
        schedule_seconds = time.perf_counter() - t0
        console.log(f"Последовательность: {schedule.new_counts}", "ПРОГОН")

        # =====================================================================
        # ЭТАП 3: КЛАССЫ КОГЕНИИ (80-85%)
        # =====================================================================
        if progress_callback:
            progress_callback("Когения", 80, "Извлечение классов когении")
        t0 = time.perf_counter()
        classes = extract_cogeny_classes(schedule.ledger)
        cogeny_seconds = time.perf_counter() - t0
        console.log(f"Классов когении: {len(classes)}, "
                    f"нетривиальных: {sum(1 for c in classes if not c.trivial)}", "КОГЕНИЯ")

        # =====================================================================
        # ЭТАП 4: ПРОВЕРКА (85-95%)
        # =====================================================================
        if progress_callback:
            progress_callback("Проверка", 85, "Проверка чудес на свежих экземплярах")
        t0 = time.perf_counter()
        confirmed = verify_classes(schedule.ledger, classes, run_config.seed, run_config.verify_trials,
                                   schedule.agreeing_instances, run_config.resample_limit)
        verification_seconds = time.perf_counter() - t0

        # =====================================================================
        # ЭТАП 5: ОТЧЕТ (95-100%)
        # =====================================================================
        if progress_callback:
            progress_callback("Отчет", 95, "Сборка отчета")
        report: Report = build_report(run_config, schedule, classes, confirmed, {
            'schedule': schedule_seconds,
            'cogeny': cogeny_seconds,
            'verification': verification_seconds,
            'total': time.perf_counter() - started,
        })
        if progress_callback:
            progress_callback("Завершение", 100, "Прогон завершен")
        status = "success"
        return report, schedule
    finally:
        if METRICS_ENABLED:
            metrics.record_run(run_config.field_spec.kind.value, status, time.perf_counter() - started)
