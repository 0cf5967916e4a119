"""
=============================================================================
test_geometry.py - Тесты точек, прямых, инцидентности и коник
=============================================================================

Запуск:
    pytest test_geometry.py

Автор: Команда Atomichack 3.0
=============================================================================
"""

import random
from fractions import Fraction

import pytest

from processing.errors import DegenerateConfiguration, SeedFailure
from processing.field import PrimeField, RationalField
from processing.geometry import (GeomObject, conic_determinant, incident, join, line, meet, on_conic,
                                 point, sample_conic_points, seed_points)
from processing.models import FieldKind, FieldSpec, Gender, SeedConfig, SeedMode


Q = RationalField()
P61 = PrimeField(2 ** 61 - 1)


def random_points(field, count, seed=1):
    stream = random.Random(seed)
    return [point(field, field.sample(stream), field.sample(stream)) for _ in range(count)]


# =============================================================================
# JOIN / MEET
# =============================================================================

def test_join_of_axis_points():
    assert join(Q, point(Q, 1, 0), point(Q, 0, 1)) == line(Q, -1, -1)


def test_join_horizontal_line():
    l = join(Q, point(Q, 1, 1), point(Q, -1, 1))
    assert l == line(Q, 0, -1)
    assert incident(Q, point(Q, 1, 1), l) and incident(Q, point(Q, -1, 1), l)


def test_meet_of_two_lines():
    assert meet(Q, line(Q, -1, -1), line(Q, 1, -1)) == point(Q, 0, 1)


def test_equal_parents_are_degenerate():
    p = point(Q, 2, 3)
    with pytest.raises(DegenerateConfiguration):
        join(Q, p, p)
    l = line(Q, 2, 3)
    with pytest.raises(DegenerateConfiguration):
        meet(Q, l, l)


def test_line_through_origin_is_degenerate():
    with pytest.raises(DegenerateConfiguration):
        join(Q, point(Q, 1, 1), point(Q, 2, 2))


def test_parallel_lines_are_degenerate():
    with pytest.raises(DegenerateConfiguration):
        meet(Q, line(Q, 1, 1), line(Q, 2, 2))


def test_zero_line_is_rejected():
    with pytest.raises(DegenerateConfiguration):
        GeomObject(Gender.LINE, Fraction(0), Fraction(0))


def test_mixed_genders_rejected():
    with pytest.raises(TypeError):
        join(Q, point(Q, 1, 2), line(Q, 1, 2))


def test_origin_is_never_incident():
    origin = point(Q, 0, 0)
    for l in (line(Q, 1, 0), line(Q, -3, 7), line(Q, Fraction(1, 2), 5)):
        assert not incident(Q, origin, l)


@pytest.mark.parametrize("field", [Q, P61])
def test_join_and_meet_are_incident_to_parents(field):
    a, b, c, d = random_points(field, 4, seed=5)
    l, m = join(field, a, b), join(field, c, d)
    assert incident(field, a, l) and incident(field, b, l)
    x = meet(field, l, m)
    assert incident(field, x, l) and incident(field, x, m)


@pytest.mark.parametrize("field", [Q, P61])
def test_child_does_not_depend_on_parent_order(field):
    a, b = random_points(field, 2, seed=9)
    assert join(field, a, b) == join(field, b, a)


@pytest.mark.parametrize("field", [Q, P61])
def test_shared_parent_is_cloned(field):
    a, b, c = random_points(field, 3, seed=13)
    assert meet(field, join(field, a, b), join(field, a, c)) == a


def test_duality_same_formula_for_both_genders():
    p, q = point(Q, 3, 5), point(Q, -2, 7)
    l, m = line(Q, 3, 5), line(Q, -2, 7)
    assert join(Q, p, q).coords == meet(Q, l, m).coords


# =============================================================================
# КОНИКИ
# =============================================================================

@pytest.mark.parametrize("field", [RationalField(sample_bound=1000), P61])
def test_conic_points_satisfy_conic(field):
    coords, conic = sample_conic_points(field, random.Random(17), 6)
    assert len(set(coords)) == 6
    assert all(on_conic(field, conic, p) for p in coords)
    assert field.is_zero(conic_determinant(field, coords))


def test_generic_six_points_not_on_conic():
    coords = [p.coords for p in random_points(P61, 6, seed=23)]
    assert not P61.is_zero(conic_determinant(P61, coords))


def test_conic_determinant_needs_six_points():
    with pytest.raises(ValueError):
        conic_determinant(Q, [(Fraction(1), Fraction(2))] * 5)


# =============================================================================
# ПОСЕВ
# =============================================================================

@pytest.mark.parametrize("k", [2, 4])
def test_generic_seed_points_are_joinable(k):
    seed = SeedConfig(adams=k, mode=SeedMode.GENERIC, field_spec=FieldSpec(kind=FieldKind.PRIME))
    adams = seed_points(seed, P61, random.Random(1))
    assert len(set(adams)) == k
    for i in range(k):
        for j in range(i + 1, k):
            join(P61, adams[i], adams[j])


def test_conic_seed_points_lie_on_one_conic():
    seed = SeedConfig(adams=6, mode=SeedMode.CONIC, field_spec=FieldSpec(kind=FieldKind.PRIME))
    adams = seed_points(seed, P61, random.Random(2))
    assert P61.is_zero(conic_determinant(P61, [a.coords for a in adams]))


def test_dual_seed_gives_lines():
    seed = SeedConfig(adams=3)
    adams = seed_points(seed, P61, random.Random(4), gender=Gender.LINE)
    assert all(a.gender is Gender.LINE for a in adams)


def test_seed_failure_when_field_too_small():
    seed = SeedConfig(adams=4)
    with pytest.raises(SeedFailure):
        seed_points(seed, PrimeField(2), random.Random(0), resample_limit=5)


# =============================================================================
# СВОЙСТВА НА СЛУЧАЙНЫХ ПАРАХ
# =============================================================================

def test_swapped_sign_of_second_coordinate_fails_incidence():
    p, q = random_points(P61, 2, seed=31)
    (s, t), (s2, t2) = p.coords, q.coords
    det = P61.sub(P61.mul(s, t2), P61.mul(s2, t))
    swapped = line(P61, P61.div(P61.sub(t, t2), det), P61.div(P61.sub(s, s2), det))
    assert not incident(P61, p, swapped)
    assert incident(P61, p, join(P61, p, q))


def test_incidence_and_clone_law_on_many_random_triples():
    stream = random.Random(2024)
    for _ in range(1000):
        a, b, c = (point(P61, P61.sample(stream), P61.sample(stream)) for _ in range(3))
        ab, ac = join(P61, a, b), join(P61, a, c)
        assert incident(P61, a, ab) and incident(P61, b, ab)
        assert meet(P61, ab, ac) == a
        x = meet(P61, ab, join(P61, b, c))
        assert x == b


@pytest.mark.parametrize("field", [Q, P61])
def test_join_and_meet_share_formula_on_many_random_pairs(field):
    stream = random.Random(4096)
    for _ in range(1000):
        x1, x2, y1, y2 = (field.sample(stream) for _ in range(4))
        assert join(field, point(field, x1, x2), point(field, y1, y2)).coords == \
               meet(field, line(field, x1, x2), line(field, y1, y2)).coords


@pytest.mark.parametrize("field", [Q, P61])
def test_complete_quadrangle_diagonal_points(field):
    stream = random.Random(512)
    for _ in range(1000):
        a, b, c, d = (point(field, field.sample(stream), field.sample(stream)) for _ in range(4))
        ab, cd = join(field, a, b), join(field, c, d)
        ac, bd = join(field, a, c), join(field, b, d)
        ad, bc = join(field, a, d), join(field, b, c)
        x, y, z = meet(field, ab, cd), meet(field, ac, bd), meet(field, ad, bc)
        assert incident(field, x, ab) and incident(field, x, cd)
        assert incident(field, y, ac) and incident(field, y, bd)
        assert join(field, a, x) == ab and join(field, c, x) == cd
        assert meet(field, join(field, x, a), join(field, y, a)) == a
        diagonal = join(field, x, y)
        assert meet(field, diagonal, ab) == x and meet(field, diagonal, ac) == y
        assert not incident(field, z, diagonal)
