"""
=============================================================================
processing/genealogy.py - Размножение по поколениям и реестр объектов
=============================================================================

Поколение 0 - k Адамов. Поколение g рождает объекты пола, противоположного
поколению g-1: нечетные поколения (при посеве точками) - прямые, четные -
точки. Ребенок, совпавший с уже существующим объектом того же пола, не
новый: в реестр добавляется только еще одна пара его родителей.

Порядок:
    - id глобальны для обоих полов и выдаются в порядке открытия,
      Адамы - id 0..k-1;
    - пары перебираются лексикографически по (меньший id, больший id);
    - пары, оба члена которых старше поколения g-1, уже вычислялись двумя
      поколениями раньше и не перебираются повторно.

Автор: Команда Atomichack 3.0
=============================================================================
"""

import hashlib
import random
import time
from bisect import bisect_right
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

from . import console
from .errors import DegenerateConfiguration, SeedFailure, UnknownId, VerificationMismatch
from .field import Field, choose_prime, derive_seed, make_field
from .geometry import GeomObject, seed_points
from .models import FieldKind, Gender, InstanceInfo, MatingPolicy, MatingPolicyKind, RunConfig
from .parallel import evaluate_pairs
from .pedigree import AdamTerm, BirthTerm, Term

try:
    import metrics
    METRICS_ENABLED = True
except ImportError:
    METRICS_ENABLED = False


Pair = Tuple[int, int]
ProgressCallback = Callable[[str, int, str], None]


# =============================================================================
# ЗАПИСИ РЕЕСТРА
# =============================================================================

@dataclass
class Generation:
    """Одно завершенное поколение"""
    index: int
    gender: Gender
    new_ids: List[int]
    candidate_pairs: int = 0
    rediscoveries: int = 0
    seconds: float = 0.0


class CoincidenceEvent(NamedTuple):
    """Один ребенок, полученный в поколении от нескольких пар или уже существовавший"""
    generation: int
    child_id: int
    pairs: Tuple[Pair, ...]
    pre_existing: bool


class GenerationResult(NamedTuple):
    new_ids: List[int]
    coincidences: List[CoincidenceEvent]


# =============================================================================
# РЕЕСТР
# =============================================================================

class Ledger:
    """
    Реестр всех объектов одного экземпляра.

    Координаты, поколение рождения и первая пара родителей объекта после
    создания не меняются; множество пар родителей только растет.
    """

    def __init__(self, field: Field, adams: List[GeomObject], instance: InstanceInfo):
        if not adams:
            raise ValueError("Нужен хотя бы один Адам")
        self.field = field
        self.instance = instance
        self.seed_gender = adams[0].gender
        self.adams = len(adams)
        self.objects: List[GeomObject] = []
        self.births: List[int] = []
        self.first_parents: List[Optional[Pair]] = []
        self.extra_pairs: Dict[int, List[Pair]] = {}
        self.index: Dict[Gender, Dict[tuple, int]] = {Gender.POINT: {}, Gender.LINE: {}}
        self.generations: List[Generation] = []
        self.coincidences: List[CoincidenceEvent] = []
        for obj in adams:
            self._add(obj, 0, None)
        self.generations.append(Generation(0, self.seed_gender, list(range(len(adams)))))

    def __len__(self):
        return len(self.objects)

    def _add(self, obj: GeomObject, birth: int, parents: Optional[Pair]) -> int:
        registry = self.index[obj.gender]
        if obj.coords in registry:
            raise ValueError(f"Объект {obj} уже зарегистрирован")
        new_id = len(self.objects)
        self.objects.append(obj)
        self.births.append(birth)
        self.first_parents.append(parents)
        registry[obj.coords] = new_id
        return new_id

    # -------------------------------------------------------------------------
    # Чтение
    # -------------------------------------------------------------------------

    @property
    def last_generation(self) -> int:
        return len(self.generations) - 1

    def check_id(self, object_id: int):
        if not 0 <= object_id < len(self.objects):
            raise UnknownId(f"Нет объекта с id {object_id}")

    def parent_pairs(self, object_id: int) -> List[Pair]:
        """Все пары родителей: первая, затем остальные в порядке открытия"""
        self.check_id(object_id)
        first = self.first_parents[object_id]
        pairs = [first] if first is not None else []
        return pairs + self.extra_pairs.get(object_id, [])

    def generation_gender(self, index: int) -> Gender:
        return self.seed_gender if index % 2 == 0 else self.seed_gender.opposite

    def term(self, object_id: int) -> Term:
        """
        Первая родословная объекта в виде терма.

        Исключения:
            UnknownId: нет такого id
        """
        self.check_id(object_id)
        stack, built = [object_id], {}
        while stack:
            current = stack[-1]
            parents = self.first_parents[current]
            if parents is None:
                built[current] = AdamTerm(current + 1)
                stack.pop()
                continue
            missing = [p for p in parents if p not in built]
            if missing:
                stack.extend(missing)
                continue
            built[current] = BirthTerm(built[parents[0]], built[parents[1]])
            stack.pop()
        return built[object_id]

    def new_counts(self) -> List[int]:
        return [len(g.new_ids) for g in self.generations]

    def cumulative_by_gender(self) -> List[int]:
        counts = self.new_counts()
        return [sum(counts[g::-2]) for g in range(len(counts))]

    def digest(self) -> str:
        """
        SHA-256 от комбинаторной структуры: id, пол, поколение, первая пара,
        отсортированные пары родителей. Координаты не входят, поэтому два
        экземпляра общего положения дают одинаковый дайджест.
        """
        h = hashlib.sha256()
        for object_id, obj in enumerate(self.objects):
            pairs = sorted(self.parent_pairs(object_id))
            h.update(f"{object_id}|{obj.gender.value}|{self.births[object_id]}|"
                     f"{self.first_parents[object_id]}|{pairs};".encode("utf-8"))
        return h.hexdigest()

    def rebuild_coincidences(self):
        """
        Восстанавливает журнал совпадений по парам родителей.
        Пара вычисляется в поколении, следующем за рождением младшего родителя.
        """
        events = []
        for child_id in range(len(self.objects)):
            by_generation: Dict[int, List[Pair]] = {}
            for pair in self.parent_pairs(child_id):
                g = max(self.births[pair[0]], self.births[pair[1]]) + 1
                by_generation.setdefault(g, []).append(pair)
            for g, pairs in by_generation.items():
                pre_existing = self.births[child_id] < g
                if pre_existing or len(pairs) > 1:
                    events.append(CoincidenceEvent(g, child_id, tuple(pairs), pre_existing))
        events.sort(key=lambda e: (e.generation, e.child_id))
        self.coincidences = events

    def truncate(self, generation: int):
        """
        Обрезает реестр до поколения generation включительно.

        Объекты рождаются в порядке id, поэтому оставшиеся объекты - префикс.
        Пары родителей, вычисленные позже generation, отбрасываются, журнал
        совпадений строится заново.
        """
        if generation < 0:
            raise ValueError(f"Поколение должно быть >= 0, получено {generation}")
        if generation >= self.last_generation:
            return
        keep = bisect_right(self.births, generation)
        del self.objects[keep:]
        del self.births[keep:]
        del self.first_parents[keep:]
        self.index = {Gender.POINT: {}, Gender.LINE: {}}
        for object_id, obj in enumerate(self.objects):
            self.index[obj.gender][obj.coords] = object_id
        extra: Dict[int, List[Pair]] = {}
        for object_id, pairs in self.extra_pairs.items():
            if object_id >= keep:
                continue
            kept = [p for p in pairs if max(self.births[p[0]], self.births[p[1]]) + 1 <= generation]
            if kept:
                extra[object_id] = kept
        self.extra_pairs = extra
        del self.generations[generation + 1:]
        self.rebuild_coincidences()


# =============================================================================
# ОДНО ПОКОЛЕНИЕ
# =============================================================================

def eligible_parents(ledger: Ledger, gen_index: int, policy: MatingPolicy) -> Tuple[List[int], List[int]]:
    """
    (строки, свежие) для поколения gen_index.

    Строки - допустимые родители по политике в порядке id, свежие - объекты
    поколения gen_index-1. Пара (строка, свежий) перебирается, если id
    свежего больше id строки.
    """
    previous = ledger.generations[gen_index - 1]
    fresh = list(previous.new_ids)
    if policy.kind is MatingPolicyKind.SAME_GENERATION:
        return fresh, fresh
    rows = [i for i, obj in enumerate(ledger.objects) if obj.gender is previous.gender]
    return rows, fresh


def next_generation(ledger: Ledger, gen_index: int, policy: MatingPolicy,
                    workers: int = 1) -> GenerationResult:
    """
    Вычисляет поколение gen_index и добавляет его в реестр.

    Параметры:
        ledger (Ledger): Реестр с завершенными поколениями 0..gen_index-1
        gen_index (int): Номер поколения (>= 1)
        policy (MatingPolicy): Политика спаривания
        workers (int): Число процессов для вычисления пар

    Возвращает:
        GenerationResult: новые id по возрастанию и события совпадений

    Исключения:
        DegenerateConfiguration: вырожденная пара; реестр экземпляра
                                 после этого непригоден
    """
    if gen_index < 1 or gen_index != len(ledger.generations):
        raise ValueError(f"Ожидалось поколение {len(ledger.generations)}, получено {gen_index}")

    start = time.perf_counter()
    child_gender = ledger.generation_gender(gen_index)
    rows, fresh = eligible_parents(ledger, gen_index, policy)
    starts = [bisect_right(fresh, row) for row in rows]
    objects = ledger.objects
    children = evaluate_pairs(ledger.field, [objects[i].coords for i in rows], starts,
                              [objects[i].coords for i in fresh], workers=workers,
                              desc=f"Поколение {gen_index}")

    registry = ledger.index[child_gender]
    first_id = len(objects)
    new_ids: List[int] = []
    repeated: Dict[int, List[Pair]] = {}
    position = 0
    for row, row_start in zip(rows, starts):
        for partner in fresh[row_start:]:
            coords = children[position]
            position += 1
            pair = (row, partner)
            existing = registry.get(coords)
            if existing is None:
                new_ids.append(ledger._add(GeomObject(child_gender, *coords), gen_index, pair))
                continue
            ledger.extra_pairs.setdefault(existing, []).append(pair)
            repeated.setdefault(existing, []).append(pair)

    events = []
    for child_id in sorted(repeated):
        pre_existing = child_id < first_id
        pairs = repeated[child_id] if pre_existing else [ledger.first_parents[child_id]] + repeated[child_id]
        events.append(CoincidenceEvent(gen_index, child_id, tuple(pairs), pre_existing))

    seconds = time.perf_counter() - start
    ledger.generations.append(Generation(gen_index, child_gender, new_ids, len(children),
                                         len(children) - len(new_ids), seconds))
    ledger.coincidences.extend(events)

    if METRICS_ENABLED:
        trivial = sum(1 for e in events if e.pre_existing)
        metrics.record_generation(ledger.field.kind.value, child_gender.value,
                                  len(children), len(new_ids), seconds)
        metrics.record_coincidences(trivial, len(events) - trivial)
    return GenerationResult(new_ids, events)


# =============================================================================
# ЭКЗЕМПЛЯРЫ
# =============================================================================

def seed_ledger(config: RunConfig, instance: int, attempt: int) -> Ledger:
    """
    Свежий реестр экземпляра: поле, модуль и Адамы из собственного потока.

    Исключения:
        SeedFailure: Адамов не удалось разместить
    """
    spec = config.field_spec
    stream_seed = derive_seed(spec.rng_seed, "instance", instance, attempt)
    stream = random.Random(stream_seed)
    prime = None
    if spec.kind is FieldKind.PRIME:
        prime = spec.prime if spec.prime is not None else choose_prime(stream)
    field = make_field(spec, prime)
    adams = seed_points(config.seed, field, stream, config.resample_limit, config.seed_gender)
    info = InstanceInfo(instance=instance, attempt=attempt, prime=prime, stream_seed=str(stream_seed))
    return Ledger(field, adams, info)


def grow(ledger: Ledger, config: RunConfig,
         on_generation: Optional[Callable[[Ledger], None]] = None,
         progress_callback: Optional[ProgressCallback] = None):
    """Доращивает реестр до config.max_generation"""
    tag = f"ЭКЗЕМПЛЯР {ledger.instance.instance}"
    for gen_index in range(len(ledger.generations), config.max_generation + 1):
        if progress_callback:
            percent = int(100 * (gen_index - 1) / max(config.max_generation, 1))
            progress_callback("generation", percent, f"Поколение {gen_index}")
        result = next_generation(ledger, gen_index, config.policy, config.workers)
        generation = ledger.generations[-1]
        console.log(f"Поколение {gen_index}: пар {generation.candidate_pairs}, "
                    f"новых {len(result.new_ids)}, совпадений {len(result.coincidences)} "
                    f"({generation.seconds:.2f} сек)", tag)
        if on_generation:
            on_generation(ledger)


def run_instance(config: RunConfig, instance: int,
                 restored: Optional[Ledger] = None,
                 on_generation: Optional[Callable[[Ledger], None]] = None,
                 progress_callback: Optional[ProgressCallback] = None) -> Ledger:
    """
    Один независимый экземпляр до config.max_generation.

    Вырожденная пара отбрасывает весь экземпляр; посев повторяется со
    следующей попыткой (новый поток), не более config.resample_limit раз.

    Исключения:
        SeedFailure: лимит попыток исчерпан
    """
    attempt = 0
    if restored is not None:
        if restored.last_generation > config.max_generation:
            console.log(f"Экземпляр {instance} восстановлен по поколение {restored.last_generation}, "
                        f"обрезка до {config.max_generation}", "СНИМОК")
            restored.truncate(config.max_generation)
        try:
            grow(restored, config, on_generation, progress_callback)
            return restored
        except DegenerateConfiguration as e:
            console.log(f"Восстановленный экземпляр вырожден: {e}", "ПОСЕВ")
            attempt = restored.instance.attempt + 1

    while attempt < config.resample_limit:
        try:
            ledger = seed_ledger(config, instance, attempt)
            grow(ledger, config, on_generation, progress_callback)
            return ledger
        except DegenerateConfiguration as e:
            console.log(f"Экземпляр {instance}, попытка {attempt}: {e}. Пересэмплирование", "ПОСЕВ")
            if METRICS_ENABLED:
                metrics.record_resample("degenerate")
            attempt += 1
    raise SeedFailure(f"Экземпляр {instance}: {config.resample_limit} вырожденных попыток подряд")


# =============================================================================
# РАСПИСАНИЕ
# =============================================================================

@dataclass
class ScheduleResult:
    """Итог прогона: основной реестр и сведения о всех экземплярах"""
    ledger: Ledger
    instances: List[Ledger]
    agreeing_instances: int
    new_counts: List[int] = dc_field(default_factory=list)
    cumulative_by_gender: List[int] = dc_field(default_factory=list)
    coincidence_log: List[CoincidenceEvent] = dc_field(default_factory=list)
    digest: str = ""


def run_schedule(config: RunConfig,
                 restored: Optional[Dict[int, Ledger]] = None,
                 on_generation: Optional[Callable[[Ledger], None]] = None,
                 progress_callback: Optional[ProgressCallback] = None) -> ScheduleResult:
    """
    Прогон поколений 1..max_generation на verify_runs независимых экземплярах.

    Экземпляры обязаны совпасть по векторам счетчиков и дайджесту реестра.
    При расхождении берутся дополнительные экземпляры (не более
    resample_limit), пока какой-то исход не наберет verify_runs голосов.

    Параметры:
        config (RunConfig): Конфигурация прогона
        restored (dict, optional): Восстановленные реестры по номеру экземпляра
        on_generation: Вызывается после каждого поколения каждого экземпляра
        progress_callback: Функция (stage, percent, message)

    Исключения:
        VerificationMismatch: исходы так и не совпали
        SeedFailure: экземпляр не удалось посеять
    """
    restored = restored or {}
    ledgers: List[Ledger] = []
    votes: Dict[Tuple[Tuple[int, ...], str], List[int]] = {}

    def launch(instance: int):
        console.log(f"Запуск экземпляра {instance}", "РАСПИСАНИЕ")
        ledger = run_instance(config, instance, restored.get(instance), on_generation, progress_callback)
        ledgers.append(ledger)
        key = (tuple(ledger.new_counts()), ledger.digest())
        votes.setdefault(key, []).append(len(ledgers) - 1)

    for instance in range(config.verify_runs):
        launch(instance)

    extra = 0
    while max(len(v) for v in votes.values()) < config.verify_runs:
        if extra >= config.resample_limit:
            summary = "; ".join(f"{list(k[0])} x{len(v)}" for k, v in votes.items())
            raise VerificationMismatch(f"Экземпляры не согласованы: {summary}")
        console.log("Экземпляры разошлись, дополнительный экземпляр", "РАСПИСАНИЕ")
        if METRICS_ENABLED:
            metrics.record_resample("mismatch")
        launch(config.verify_runs + extra)
        extra += 1

    winners = max(votes.values(), key=len)
    primary = ledgers[winners[0]]
    return ScheduleResult(
        ledger=primary,
        instances=ledgers,
        agreeing_instances=len(winners),
        new_counts=primary.new_counts(),
        cumulative_by_gender=primary.cumulative_by_gender(),
        coincidence_log=list(primary.coincidences),
        digest=primary.digest(),
    )
