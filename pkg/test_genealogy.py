"""
=============================================================================
test_genealogy.py - Тесты размножения по поколениям и расписания
=============================================================================

Запуск:
    pytest test_genealogy.py            # быстрые
    pytest -m slow test_genealogy.py    # приемочные прогоны глубоких поколений

Автор: Команда Atomichack 3.0
=============================================================================
"""

import pytest

import config
from conftest import make_config
from processing import genealogy
from processing.errors import DegenerateConfiguration, SeedFailure, UnknownId, VerificationMismatch
from processing.genealogy import next_generation, run_instance, run_schedule, seed_ledger
from processing.geometry import join, meet
from processing.models import FieldKind, Gender, MatingPolicyKind
from processing.pedigree import NAMED_INDIVIDUALS, eve


# =============================================================================
# ЧЕТЫРЕ АДАМА
# =============================================================================

@pytest.fixture(scope="module")
def four_adams():
    return run_schedule(make_config(4, 5))


def test_four_adams_counts(four_adams):
    assert four_adams.new_counts == [4, 6, 3, 3, 6, 16]
    assert four_adams.cumulative_by_gender == [4, 6, 7, 9, 13, 25]


def test_generation_genders_alternate(four_adams):
    genders = [g.gender for g in four_adams.ledger.generations]
    assert genders == [Gender.POINT, Gender.LINE] * 3


def test_second_generation_rediscovers_adams(four_adams):
    second = four_adams.ledger.generations[2]
    assert second.candidate_pairs == 15
    assert second.rediscoveries == 12
    assert second.new_ids == [10, 11, 12]


def test_second_generation_coincidences_are_adams(four_adams):
    events = [e for e in four_adams.coincidence_log if e.generation == 2]
    assert [e.child_id for e in events] == [0, 1, 2, 3]
    assert all(e.pre_existing and len(e.pairs) == 3 for e in events)


def test_adam_is_clone_of_its_daughters(four_adams):
    ledger = four_adams.ledger
    assert ledger.parent_pairs(0) == [(4, 5), (4, 6), (5, 6)]
    for a, b in ledger.parent_pairs(0):
        assert meet(ledger.field, ledger.objects[a], ledger.objects[b]) == ledger.objects[0]


def test_first_born_terms(four_adams):
    ledger = four_adams.ledger
    assert ledger.term(4) == eve(1, 2)
    assert ledger.term(9) == eve(3, 4)
    assert ledger.term(10) == NAMED_INDIVIDUALS["Abel"]
    assert ledger.term(11) == NAMED_INDIVIDUALS["Cain"]
    assert ledger.term(12) == NAMED_INDIVIDUALS["Seth"]


def test_every_object_is_the_child_of_each_parent_pair(four_adams):
    ledger = four_adams.ledger
    field = ledger.field
    for object_id in range(ledger.adams, len(ledger)):
        for a, b in ledger.parent_pairs(object_id):
            x, y = ledger.objects[a], ledger.objects[b]
            produced = join(field, x, y) if x.gender is Gender.POINT else meet(field, x, y)
            assert produced == ledger.objects[object_id]
            assert ledger.births[object_id] <= max(ledger.births[a], ledger.births[b]) + 1


def test_unknown_id(four_adams):
    with pytest.raises(UnknownId):
        four_adams.ledger.term(10 ** 6)
    with pytest.raises(KeyError):
        four_adams.ledger.parent_pairs(-1)


def test_instances_agree(four_adams):
    assert four_adams.agreeing_instances == 2
    primes = {l.instance.prime for l in four_adams.instances}
    assert len(primes) == 2
    assert len({l.digest() for l in four_adams.instances}) == 1


# =============================================================================
# ДРУГИЕ ЧИСЛА АДАМОВ И ПОЛИТИКИ
# =============================================================================

def test_five_adams_all_pairs():
    schedule = run_schedule(make_config(5, 4))
    assert schedule.new_counts == [5, 10, 15, 90, 3495]


def test_five_adams_same_generation():
    schedule = run_schedule(make_config(5, 4, policy=MatingPolicyKind.SAME_GENERATION))
    assert schedule.new_counts == [5, 10, 15, 75, 2080]
    assert schedule.cumulative_by_gender == [5, 10, 20, 85, 2100]
    second = schedule.ledger.generations[2]
    assert second.candidate_pairs == 45
    assert second.rediscoveries == 30


@pytest.mark.parametrize("adams, generations, policy, expected", [
    (2, 3, MatingPolicyKind.ALL_PAIRS, [2, 1, 0, 0]),
    (3, 5, MatingPolicyKind.ALL_PAIRS, [3, 3, 0, 0, 0, 0]),
    (4, 6, MatingPolicyKind.SAME_GENERATION, [4, 6, 3, 3, 0, 0, 0]),
])
def test_extinction(adams, generations, policy, expected):
    assert run_schedule(make_config(adams, generations, policy=policy)).new_counts == expected


def test_zero_generations_is_seed_only():
    schedule = run_schedule(make_config(4, 0))
    assert schedule.new_counts == [4]
    assert schedule.coincidence_log == []


def test_dual_seeding_gives_same_counts():
    dual = run_schedule(make_config(4, 5, seed_gender=Gender.LINE))
    assert dual.new_counts == [4, 6, 3, 3, 6, 16]
    assert dual.ledger.generations[1].gender is Gender.POINT


def test_dual_seeding_gives_same_counts_for_five_adams():
    dual = run_schedule(make_config(5, 4, seed_gender=Gender.LINE, verify_runs=1))
    generic = run_schedule(make_config(5, 4, verify_runs=1))
    assert dual.new_counts == generic.new_counts == [5, 10, 15, 90, 3495]
    assert [g.gender for g in dual.ledger.generations] == [Gender.LINE, Gender.POINT] * 2 + [Gender.LINE]


def test_generation_gender_alternates_from_seed():
    ledger = seed_ledger(make_config(4, 2, seed_gender=Gender.LINE), 0, 0)
    assert [ledger.generation_gender(i) for i in range(4)] == [Gender.LINE, Gender.POINT] * 2


def test_rational_and_prime_modes_agree():
    rational = run_schedule(make_config(4, 6, field=FieldKind.RATIONALS, verify_runs=1))
    prime = run_schedule(make_config(4, 6, verify_runs=1))
    assert rational.new_counts == prime.new_counts == [4, 6, 3, 3, 6, 16, 84]
    assert rational.digest == prime.digest


def test_same_config_is_deterministic():
    first = run_schedule(make_config(4, 5, rng_seed=99))
    second = run_schedule(make_config(4, 5, rng_seed=99))
    assert [l.instance for l in first.instances] == [l.instance for l in second.instances]
    assert [o.coords for o in first.ledger.objects] == [o.coords for o in second.ledger.objects]


def test_worker_count_does_not_change_result(monkeypatch):
    monkeypatch.setattr(config, "PARALLEL_MIN_PAIRS", 0)
    results = [run_schedule(make_config(4, 6, workers=workers, verify_runs=1)) for workers in (1, 2, 8)]
    assert {tuple(r.new_counts) for r in results} == {(4, 6, 3, 3, 6, 16, 84)}
    assert len({r.digest for r in results}) == 1
    coords = [[o.coords for o in r.ledger.objects] for r in results]
    assert coords[0] == coords[1] == coords[2]


def test_generation_index_must_follow_ledger():
    ledger = seed_ledger(make_config(4, 2), 0, 0)
    with pytest.raises(ValueError):
        next_generation(ledger, 2, make_config(4, 2).policy)


# =============================================================================
# ОБРЕЗКА РЕЕСТРА
# =============================================================================

def test_truncate_matches_shallow_run():
    deep = run_instance(make_config(4, 6, verify_runs=1), 0)
    shallow = run_instance(make_config(4, 4, verify_runs=1), 0)
    deep.truncate(4)
    assert deep.new_counts() == shallow.new_counts() == [4, 6, 3, 3, 6]
    assert deep.objects == shallow.objects
    assert [deep.parent_pairs(i) for i in range(len(deep))] == \
           [shallow.parent_pairs(i) for i in range(len(shallow))]
    assert deep.coincidences == shallow.coincidences
    assert deep.digest() == shallow.digest()


def test_truncate_to_seed_and_beyond_depth():
    ledger = run_instance(make_config(4, 3, verify_runs=1), 0)
    ledger.truncate(7)
    assert ledger.new_counts() == [4, 6, 3, 3]
    ledger.truncate(0)
    assert ledger.new_counts() == [4]
    assert ledger.coincidences == [] and ledger.extra_pairs == {}
    assert len(ledger.index[Gender.LINE]) == 0
    with pytest.raises(ValueError):
        ledger.truncate(-1)


# =============================================================================
# ПЕРЕСЭМПЛИРОВАНИЕ И ГОЛОСОВАНИЕ
# =============================================================================

def test_degenerate_instances_exhaust_resample_limit(monkeypatch):
    calls = []

    def always_degenerate(config, instance, attempt):
        calls.append(attempt)
        raise DegenerateConfiguration("вырожденный посев")

    monkeypatch.setattr(genealogy, "seed_ledger", always_degenerate)
    with pytest.raises(SeedFailure):
        run_instance(make_config(4, 2, resample_limit=3), 0)
    assert calls == [0, 1, 2]


class FakeLedger:
    """Реестр-заглушка с заданными счетчиками"""

    def __init__(self, counts, instance):
        self.counts = counts
        self.instance = instance
        self.coincidences = []

    def new_counts(self):
        return list(self.counts)

    def cumulative_by_gender(self):
        return [sum(self.counts[g::-2]) for g in range(len(self.counts))]

    def digest(self):
        return "digest-" + "-".join(map(str, self.counts))


def test_disagreeing_instance_is_outvoted(monkeypatch):
    outcomes = iter([[4, 6, 3], [4, 6, 2], [4, 6, 3]])
    monkeypatch.setattr(genealogy, "run_instance",
                        lambda config, instance, *args: FakeLedger(next(outcomes), instance))
    schedule = run_schedule(make_config(4, 2))
    assert schedule.new_counts == [4, 6, 3]
    assert schedule.agreeing_instances == 2
    assert len(schedule.instances) == 3
    assert schedule.ledger.instance == 0


def test_persistent_disagreement_raises(monkeypatch):
    counter = iter(range(100))
    monkeypatch.setattr(genealogy, "run_instance",
                        lambda config, instance, *args: FakeLedger([4, 6, next(counter)], instance))
    with pytest.raises(VerificationMismatch):
        run_schedule(make_config(4, 2, resample_limit=2))


# =============================================================================
# ПРИЕМОЧНЫЕ ПРОГОНЫ
# =============================================================================

@pytest.mark.slow
def test_four_adams_through_generation_eight():
    schedule = run_schedule(make_config(4, 8, verify_runs=2))
    assert schedule.new_counts == [4, 6, 3, 3, 6, 16, 84, 1716, 719628]
    assert schedule.agreeing_instances == 2


@pytest.mark.slow
def test_four_adams_rational_through_generation_seven():
    schedule = run_schedule(make_config(4, 7, field=FieldKind.RATIONALS, verify_runs=1))
    assert schedule.new_counts == [4, 6, 3, 3, 6, 16, 84, 1716]


@pytest.mark.slow
def test_six_adams_through_generation_four():
    schedule = run_schedule(make_config(6, 4, verify_runs=1))
    assert schedule.new_counts == [6, 15, 45, 855, 342000]
