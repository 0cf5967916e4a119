"""
=============================================================================
processing/miracles.py - Классы когении, проверка чудес и сертификаты
=============================================================================

Объекты одного пола когеничны, если любые два из них дают одного и того же
ребенка (три точки на одной прямой, три прямые через одну точку). Для
каждого объекта с несколькими парами родителей строится граф на его
родителях (ребра - пары родителей); компоненты размера >= 3 - классы
когении. Закон когении требует, чтобы компоненты были кликами: недостающие
ребра вычисляются явно, расхождение - CogenyViolation.

Класс тривиален, если ребенок существовал до того, как члены класса могли
встретиться.

Проверка кандидатов - вычисление выражений на свежих независимых экземплярах
общего положения: кандидат подтвержден, если все выражения совпали на
каждом экземпляре. Символьных доказательств инструмент не строит.

Автор: Команда Atomichack 3.0
=============================================================================
"""

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import config
from . import console
from .errors import CogenyViolation, DegenerateConfiguration, SeedFailure
from .field import choose_prime, derive_stream, make_field
from .genealogy import Ledger
from .geometry import GeomObject, join, meet, seed_points
from .models import FieldKind, Gender, SeedConfig
from .pedigree import BirthTerm, Term, evaluate, permutation_images, permute_term, render_term

try:
    import metrics
    METRICS_ENABLED = True
except ImportError:
    METRICS_ENABLED = False


IDENTICAL = "identical"
COGENICAL = "cogenical"


# =============================================================================
# КЛАССЫ КОГЕНИИ
# =============================================================================

@dataclass
class CogenyClass:
    """Клика попарно дающих одного ребенка объектов"""
    gender: Gender
    members: Tuple[int, ...]
    child_id: int
    child_generation: int
    trivial: bool
    witness_instances: int = 1


def _child(ledger: Ledger, a: int, b: int) -> GeomObject:
    x, y = ledger.objects[a], ledger.objects[b]
    return join(ledger.field, x, y) if x.gender is Gender.POINT else meet(ledger.field, x, y)


def _components(pairs: Sequence[Tuple[int, int]]) -> List[List[int]]:
    """Компоненты связности графа, заданного ребрами (union-find)"""
    parent: Dict[int, int] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: Dict[int, List[int]] = {}
    for node in sorted(parent):
        groups.setdefault(find(node), []).append(node)
    return list(groups.values())


def extract_cogeny_classes(ledger: Ledger) -> List[CogenyClass]:
    """
    Классы когении завершенного реестра.

    Возвращает:
        List[CogenyClass]: по возрастанию id ребенка, затем по членам

    Исключения:
        CogenyViolation: child(A,B) = child(A,C), но child(B,C) другой
    """
    classes = []
    for child_id in sorted(ledger.extra_pairs):
        pairs = ledger.parent_pairs(child_id)
        if len(pairs) < 2:
            continue
        edges = set(pairs)
        target = ledger.objects[child_id]
        for members in _components(pairs):
            if len(members) < 3:
                continue
            for a, b in itertools.combinations(members, 2):
                if (a, b) in edges:
                    continue
                produced = _child(ledger, a, b)
                if produced != target:
                    raise CogenyViolation(
                        f"Объект {child_id}: пары родителей связаны через общего родителя, "
                        f"но child({a},{b}) = {produced} != {target}")
            births = max(ledger.births[m] for m in members)
            classes.append(CogenyClass(
                gender=ledger.objects[members[0]].gender,
                members=tuple(members),
                child_id=child_id,
                child_generation=ledger.births[child_id],
                trivial=ledger.births[child_id] < births + 1,
            ))
    return classes


def certificate_terms(ledger: Ledger, cls: CogenyClass) -> List[Term]:
    """Все построения общего ребенка: по одному на пару членов класса"""
    member_terms = {m: ledger.term(m) for m in cls.members}
    return [BirthTerm(member_terms[a], member_terms[b])
            for a, b in itertools.combinations(cls.members, 2)]


def render_pedigree(ledger: Ledger, object_id: int) -> str:
    """
    Первая родословная объекта в грамматике сертификатов.

    Исключения:
        UnknownId: нет такого id
    """
    return render_term(ledger.term(object_id), ledger.seed_gender)


# =============================================================================
# ПРОВЕРКА КАНДИДАТОВ
# =============================================================================

@dataclass
class VerificationOutcome:
    confirmed: bool
    witness_instances: int
    refuted_at: Optional[int] = None


def _holds(values: List[GeomObject], relation: str, field) -> bool:
    if relation == IDENTICAL:
        return all(v == values[0] for v in values[1:])
    children = [join(field, x, y) if x.gender is Gender.POINT else meet(field, x, y)
                for x, y in itertools.combinations(values, 2)]
    return all(c == children[0] for c in children[1:])


def _fresh_instance(seed: SeedConfig, trial: int, attempt: int, seed_gender: Gender,
                    resample_limit: int, label: str):
    spec = seed.field_spec
    stream = derive_stream(spec.rng_seed, label, trial, attempt)
    prime = None
    if spec.kind is FieldKind.PRIME:
        prime = spec.prime if spec.prime is not None else choose_prime(stream)
    field = make_field(spec, prime)
    return field, seed_points(seed, field, stream, resample_limit, seed_gender)


def verify_candidates(candidates: Sequence[Sequence[Term]], seed: SeedConfig,
                      trials: int = config.DEFAULT_VERIFY_TRIALS,
                      relation: str = IDENTICAL,
                      seed_gender: Gender = Gender.POINT,
                      resample_limit: int = config.DEFAULT_RESAMPLE_LIMIT,
                      label: str = "verify") -> List[VerificationOutcome]:
    """
    Пакетная проверка кандидатов на trials свежих экземплярах.

    Параметры:
        candidates: Списки выражений (по одному списку на кандидата)
        seed (SeedConfig): Число Адамов, режим посева и поле экземпляров
        trials (int): Число свежих экземпляров (>= 1)
        relation (str): identical - выражения обозначают один объект;
                        cogenical - выражения попарно дают одного ребенка
        seed_gender (Gender): Пол Адамов
        resample_limit (int): Лимит пересэмплирования одного экземпляра
        label (str): Метка потоков (разные метки - независимые экземпляры)

    Возвращает:
        List[VerificationOutcome]: по одному на кандидата

    Исключения:
        SeedFailure: экземпляр вырожден resample_limit раз подряд
    """
    if trials < 1:
        raise ValueError("Нужен хотя бы один экземпляр")
    if relation not in (IDENTICAL, COGENICAL):
        raise ValueError(f"Неизвестное отношение: {relation}")

    outcomes = [VerificationOutcome(True, 0) for _ in candidates]
    for trial in range(trials):
        for attempt in range(resample_limit):
            try:
                field, adams = _fresh_instance(seed, trial, attempt, seed_gender, resample_limit, label)
                memo: Dict[Term, GeomObject] = {}
                verdicts = [None if not outcome.confirmed
                            else _holds([evaluate(t, adams, field, memo) for t in expressions], relation, field)
                            for expressions, outcome in zip(candidates, outcomes)]
                break
            except DegenerateConfiguration:
                if METRICS_ENABLED:
                    metrics.record_verification_trial("resampled")
                continue
        else:
            raise SeedFailure(f"Проверочный экземпляр {trial}: {resample_limit} вырожденных попыток")

        for outcome, verdict in zip(outcomes, verdicts):
            if verdict is None:
                continue
            if verdict:
                outcome.witness_instances += 1
            else:
                outcome.confirmed = False
                outcome.refuted_at = trial
            if METRICS_ENABLED:
                metrics.record_verification_trial("confirmed" if verdict else "refuted")
    return outcomes


def verify_candidate(expressions: Sequence[Term], seed: SeedConfig,
                     trials: int = config.DEFAULT_VERIFY_TRIALS,
                     relation: str = IDENTICAL, **kwargs) -> VerificationOutcome:
    """Проверка одного кандидата; см. verify_candidates"""
    return verify_candidates([expressions], seed, trials, relation, **kwargs)[0]


def verify_orbit(expressions: Sequence[Term], seed: SeedConfig,
                 trials: int = config.DEFAULT_VERIFY_TRIALS,
                 relation: str = COGENICAL, stream=None, **kwargs) -> List[VerificationOutcome]:
    """
    Проверка кандидата и всех его образов при перестановках Адамов
    (вся группа при k <= 5, выборка при большем k).
    """
    images = [[permute_term(t, perm) for t in expressions]
              for perm in permutation_images(seed.adams, stream)]
    console.log(f"Проверка орбиты: {len(images)} образов, {trials} экземпляров", "ПРОВЕРКА")
    return verify_candidates(images, seed, trials, relation, **kwargs)


def verify_classes(ledger: Ledger, classes: Sequence[CogenyClass], seed: SeedConfig,
                   trials: int, agreeing_instances: int,
                   resample_limit: int = config.DEFAULT_RESAMPLE_LIMIT) -> List[CogenyClass]:
    """
    Проверяет нетривиальные классы на свежих экземплярах.

    Свидетельств у класса - agreeing_instances (согласные экземпляры прогона)
    плюс подтвердившие экземпляры проверки. Опровергнутые классы не возвращаются.
    """
    nontrivial = [c for c in classes if not c.trivial]
    if trials <= 0 or not nontrivial:
        for c in nontrivial:
            c.witness_instances = agreeing_instances
        return nontrivial
    outcomes = verify_candidates([certificate_terms(ledger, c) for c in nontrivial], seed, trials,
                                 IDENTICAL, ledger.seed_gender, resample_limit)
    confirmed = []
    for cls, outcome in zip(nontrivial, outcomes):
        if outcome.confirmed:
            cls.witness_instances = agreeing_instances + outcome.witness_instances
            confirmed.append(cls)
        else:
            console.log(f"Класс с ребенком {cls.child_id} опровергнут на экземпляре {outcome.refuted_at}",
                        "ПРОВЕРКА")
    return confirmed
