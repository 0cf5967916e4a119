"""
=============================================================================
processing/report_generator.py - Модуль генерации отчетов прогона
=============================================================================

Этот модуль собирает JSON-отчет (схема Report) из результатов расписания
и найденных чудес, строит таблицу поколений (pandas) и печатает
последовательность для поиска в OEIS:

    new        - новые объекты каждого поколения: 4, 6, 3, 3, 6, 16, ...
    cumulative - все различные объекты пола поколения g, рожденные не позже g

Автор: Команда Atomichack 3.0
=============================================================================
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

import config
from . import console
from .genealogy import ScheduleResult
from .miracles import CogenyClass, certificate_terms, render_pedigree
from .models import (Certificate, GenerationRow, MiracleEntry, Report, RunConfig,
                     RunMetadata, VerificationStatus)
from .pedigree import render_term


# =============================================================================
# ТАБЛИЦА ПОКОЛЕНИЙ
# =============================================================================

def generation_table(schedule: ScheduleResult) -> pd.DataFrame:
    """
    Таблица поколений основного экземпляра.

    Колонки: generation, gender, candidate_pairs, new, rediscoveries,
    cumulative, seconds. cumulative - накопленная сумма new внутри пола.
    """
    rows = [{
        'generation': g.index,
        'gender': g.gender.value,
        'candidate_pairs': g.candidate_pairs,
        'new': len(g.new_ids),
        'rediscoveries': g.rediscoveries,
        'seconds': round(g.seconds, 4),
    } for g in schedule.ledger.generations]
    df = pd.DataFrame(rows, columns=['generation', 'gender', 'candidate_pairs', 'new',
                                     'rediscoveries', 'seconds'])
    df['cumulative'] = df.groupby('gender')['new'].cumsum()
    return df[['generation', 'gender', 'candidate_pairs', 'new', 'rediscoveries', 'cumulative', 'seconds']]


# =============================================================================
# СВЕРКА С ОПУБЛИКОВАННЫМИ ПОСЛЕДОВАТЕЛЬНОСТЯМИ
# =============================================================================

def known_sequence(run_config: RunConfig) -> Optional[List[int]]:
    key = (run_config.seed.adams, run_config.policy.kind.value, run_config.seed.mode.value)
    return config.KNOWN_SEQUENCES.get(key)


def verification_status(run_config: RunConfig, new_counts: Sequence[int],
                        agreeing_instances: int) -> VerificationStatus:
    """
    Состояние проверки: published-mismatch, если хоть один член расходится
    с опубликованным; иначе verified при >= 2 согласных экземплярах.
    """
    known = known_sequence(run_config) or []
    matched = 0
    mismatch = False
    for ours, published in zip(new_counts, known):
        if ours != published:
            mismatch = True
            break
        matched += 1
    if mismatch:
        state = "published-mismatch"
    elif agreeing_instances >= 2:
        state = "verified"
    else:
        state = "single-instance"
    unverified = len(known) if len(new_counts) > len(known) else None
    return VerificationStatus(state=state, agreeing_instances=agreeing_instances,
                              published_terms_matched=matched, unverified_from_generation=unverified)


# =============================================================================
# СБОРКА ОТЧЕТА
# =============================================================================

def miracle_entry(schedule: ScheduleResult, cls: CogenyClass) -> MiracleEntry:
    ledger = schedule.ledger
    expressions = [render_term(t, ledger.seed_gender) for t in certificate_terms(ledger, cls)]
    return MiracleEntry(
        gender=cls.gender,
        members=list(cls.members),
        member_pedigrees=[render_pedigree(ledger, m) for m in cls.members],
        child_id=cls.child_id,
        child_generation=cls.child_generation,
        trivial=cls.trivial,
        witness_instances=cls.witness_instances,
        certificate=Certificate(expressions=expressions, rendered_text=" = ".join(expressions)),
    )


def build_report(run_config: RunConfig, schedule: ScheduleResult,
                 classes: Sequence[CogenyClass], confirmed: Sequence[CogenyClass],
                 timings: Dict[str, float]) -> Report:
    """
    Собирает отчет прогона.

    Параметры:
        run_config (RunConfig): Конфигурация прогона
        schedule (ScheduleResult): Результат run_schedule
        classes: Все классы когении основного экземпляра
        confirmed: Нетривиальные классы, подтвержденные проверкой
        timings (dict): Время этапов в секундах
    """
    ledger = schedule.ledger
    trivial_classes = sum(1 for c in classes if c.trivial)
    nontrivial_classes = len(classes) - trivial_classes
    trivial_events = sum(1 for e in schedule.coincidence_log if e.pre_existing)

    all_timings = dict(timings)
    for g in ledger.generations[1:]:
        all_timings[f"generation_{g.index}"] = round(g.seconds, 6)

    return Report(
        run_metadata=RunMetadata(
            run_config=run_config,
            config_digest=run_config.digest(),
            instances=[l.instance for l in schedule.instances],
        ),
        new_counts=list(schedule.new_counts),
        cumulative_by_gender=list(schedule.cumulative_by_gender),
        generations_computed=ledger.last_generation,
        generation_table=[GenerationRow(generation=g.index, gender=g.gender, candidate_pairs=g.candidate_pairs,
                                        new=len(g.new_ids), rediscoveries=g.rediscoveries,
                                        cumulative=schedule.cumulative_by_gender[g.index])
                          for g in ledger.generations],
        miracles=[miracle_entry(schedule, c) for c in confirmed],
        trivial_class_count=trivial_classes,
        coincidence_summary={
            'events': len(schedule.coincidence_log),
            'trivial_events': trivial_events,
            'nontrivial_events': len(schedule.coincidence_log) - trivial_events,
            'cogeny_classes': len(classes),
            'trivial_classes': trivial_classes,
            'nontrivial_classes': nontrivial_classes,
            'refuted_classes': nontrivial_classes - len(confirmed),
        },
        timings={k: round(v, 6) for k, v in all_timings.items()},
        verification_status=verification_status(run_config, schedule.new_counts,
                                                 schedule.agreeing_instances),
    )


# =============================================================================
# ВЫВОД
# =============================================================================

def emit_sequence(report: Report, convention: str = "new") -> str:
    """
    Одна строка чисел через ", " в выбранном соглашении.

    Параметры:
        report (Report): Готовый отчет
        convention (str): 'new' или 'cumulative'
    """
    if convention == "new":
        values = report.new_counts
    elif convention == "cumulative":
        values = report.cumulative_by_gender
    else:
        raise ValueError(f"Неизвестное соглашение: {convention}")
    return ", ".join(str(v) for v in values)


def write_report(report: Report, path: Path, table: Optional[pd.DataFrame] = None) -> Path:
    """
    Записывает JSON-отчет и, если передана, таблицу поколений рядом (.csv).

    Возвращает:
        Path: путь к JSON-файлу
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(report.model_dump_json(indent=2))
    if table is not None:
        table.to_csv(path.with_suffix('.csv'), index=False)
    console.log(f"Отчет сохранен: {path}", "ОТЧЕТ")
    return path
