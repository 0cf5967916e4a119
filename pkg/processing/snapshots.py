"""
=============================================================================
processing/snapshots.py - Снимки реестра и возобновление прогона
=============================================================================

Снимок - самоописывающий JSON-файл (схема SnapshotFile): версия формата,
дайджест конфигурации, спецификация поля, сведения об экземпляре и все
объекты с точными координатами в десятичной записи.

При записи каталога снимков каждый экземпляр после каждого поколения
сохраняется в файл instance-II-generation-GG.json. Возобновление из
каталога берет последнее поколение каждого экземпляра, не превышающее
глубину прогона; более глубокий реестр обрезается до этой глубины.

Автор: Команда Atomichack 3.0
=============================================================================
"""

import os
import re
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import ValidationError

import config
from . import console
from .errors import ConfigDigestMismatch, FormatMismatch
from .field import make_field
from .genealogy import Generation, Ledger
from .geometry import GeomObject
from .models import GenerationRecord, ObjectRecord, RunConfig, SnapshotFile


_SNAPSHOT_NAME = re.compile(r"instance-(\d+)-generation-(\d+)\.json")


# =============================================================================
# ЗАПИСЬ
# =============================================================================

def to_snapshot(ledger: Ledger, run_config: RunConfig) -> SnapshotFile:
    """Снимок реестра в виде pydantic-модели"""
    to_text = ledger.field.to_text
    objects = []
    for object_id, obj in enumerate(ledger.objects):
        first = ledger.first_parents[object_id]
        objects.append(ObjectRecord(
            id=object_id,
            gender=obj.gender,
            c1=to_text(obj.c1),
            c2=to_text(obj.c2),
            birth=ledger.births[object_id],
            adam_index=object_id + 1 if first is None else None,
            first_parents=first,
            parent_pairs=ledger.parent_pairs(object_id),
        ))
    generations = [GenerationRecord(index=g.index, gender=g.gender, new_ids=g.new_ids,
                                    candidate_pairs=g.candidate_pairs, rediscoveries=g.rediscoveries)
                   for g in ledger.generations]
    return SnapshotFile(
        format_version=config.SNAPSHOT_FORMAT_VERSION,
        config_digest=run_config.digest(),
        field_spec=run_config.field_spec,
        instance=ledger.instance,
        adams=ledger.adams,
        seed_gender=ledger.seed_gender,
        generations=generations,
        objects=objects,
    )


def snapshot(ledger: Ledger, path: Path, run_config: RunConfig) -> Path:
    """
    Записывает снимок реестра (только завершенные поколения).

    Возвращает:
        Path: путь к записанному файлу
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(to_snapshot(ledger, run_config).model_dump_json())
    os.replace(tmp, path)
    return path


def snapshot_name(instance: int, generation: int) -> str:
    return f"instance-{instance:02d}-generation-{generation:02d}.json"


class SnapshotWriter:
    """Хук run_schedule: снимок каждого экземпляра после каждого поколения"""

    def __init__(self, directory: Path, run_config: RunConfig):
        self.directory = Path(directory)
        self.run_config = run_config
        self.directory.mkdir(parents=True, exist_ok=True)

    def __call__(self, ledger: Ledger):
        path = self.directory / snapshot_name(ledger.instance.instance, ledger.last_generation)
        snapshot(ledger, path, self.run_config)
        console.log(f"Снимок сохранен: {path}", "СНИМОК")


# =============================================================================
# ЧТЕНИЕ
# =============================================================================

def load_snapshot_file(path: Path) -> SnapshotFile:
    """
    Читает и проверяет файл снимка.

    Исключения:
        FormatMismatch: не JSON, не та схема или другая версия формата
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = SnapshotFile.model_validate_json(f.read())
    except (ValidationError, ValueError) as e:
        raise FormatMismatch(f"{path}: файл не является снимком ({e.__class__.__name__})") from e
    if data.format_version != config.SNAPSHOT_FORMAT_VERSION:
        raise FormatMismatch(f"{path}: версия формата {data.format_version}, "
                             f"ожидалась {config.SNAPSHOT_FORMAT_VERSION}")
    return data


def from_snapshot(data: SnapshotFile) -> Ledger:
    """
    Реестр из снимка: те же id, координаты, родословные и пары родителей.

    Исключения:
        FormatMismatch: записи объектов противоречат друг другу
    """
    field = make_field(data.field_spec, data.instance.prime)
    records = sorted(data.objects, key=lambda r: r.id)
    if [r.id for r in records] != list(range(len(records))) or len(records) < data.adams:
        raise FormatMismatch("Пропуски в нумерации объектов снимка")

    def make(record: ObjectRecord) -> GeomObject:
        try:
            return GeomObject(record.gender, field.from_text(record.c1), field.from_text(record.c2))
        except ValueError as e:
            raise FormatMismatch(f"Объект {record.id}: {e}") from e

    ledger = Ledger(field, [make(r) for r in records[:data.adams]], data.instance)
    try:
        for record in records[data.adams:]:
            ledger._add(make(record), record.birth, tuple(record.first_parents))
    except (TypeError, ValueError) as e:
        raise FormatMismatch(f"Некорректная запись объекта: {e}") from e
    for record in records:
        pairs = [tuple(p) for p in record.parent_pairs]
        extra = pairs[1:] if record.first_parents is not None else pairs
        if extra:
            ledger.extra_pairs[record.id] = extra
    ledger.generations = [Generation(g.index, g.gender, list(g.new_ids), g.candidate_pairs, g.rediscoveries)
                          for g in data.generations]
    ledger.rebuild_coincidences()
    return ledger


def restore(path: Path, run_config: Optional[RunConfig] = None) -> Ledger:
    """
    Восстанавливает реестр из файла снимка.

    Параметры:
        path (Path): Файл снимка
        run_config (RunConfig, optional): Если задан, дайджест обязан совпасть

    Исключения:
        FormatMismatch: файл другой версии или не снимок
        ConfigDigestMismatch: снимок сделан с другой конфигурацией
    """
    data = load_snapshot_file(Path(path))
    if run_config is not None and data.config_digest != run_config.digest():
        raise ConfigDigestMismatch(f"{path}: дайджест {data.config_digest[:12]} "
                                   f"не совпадает с {run_config.digest()[:12]}")
    return from_snapshot(data)


def restore_for_resume(path: Path, run_config: RunConfig) -> Dict[int, Ledger]:
    """
    Реестры для возобновления: файл (один экземпляр) или каталог снимков.
    Из каталога берется последнее поколение экземпляра не глубже
    run_config.max_generation; если таких нет - самое раннее, его обрежет
    run_instance.
    """
    path = Path(path)
    if path.is_file():
        ledger = restore(path, run_config)
        return {ledger.instance.instance: ledger}

    found: Dict[int, List[tuple]] = {}
    for entry in path.glob("instance-*-generation-*.json"):
        match = _SNAPSHOT_NAME.fullmatch(entry.name)
        if not match:
            continue
        found.setdefault(int(match.group(1)), []).append((int(match.group(2)), entry))
    latest: Dict[int, tuple] = {}
    for instance, entries in found.items():
        within = [e for e in entries if e[0] <= run_config.max_generation]
        latest[instance] = max(within) if within else min(entries)
    if not latest:
        raise FormatMismatch(f"{path}: снимки не найдены")
    restored = {}
    for instance, (generation, entry) in sorted(latest.items()):
        restored[instance] = restore(entry, run_config)
        console.log(f"Экземпляр {instance} восстановлен по поколение {generation}", "СНИМОК")
    return restored
