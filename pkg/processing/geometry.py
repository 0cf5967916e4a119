"""
=============================================================================
processing/geometry.py - Точки, прямые и две операции рождения
=============================================================================

Объекты хранятся в аффинных картах:

    точка  (s, t)  - обычная точка плоскости
    прямая [a, b]  - прямая a*x + b*y + 1 = 0 (прямые через начало координат
                     в этой карте не представимы)

Обе операции рождения - одна и та же формула (двойственность):

    combine((s,t), (s',t')) = ( (t-t')/(s*t'-s'*t) , (s'-s)/(s*t'-s'*t) )

join применяет ее к двум точкам и возвращает прямую, meet - к двум прямым
и возвращает точку. Знак второй координаты выведен из системы
a*s + b*t = -1, a*s' + b*t' = -1 по правилу Крамера; нормативна
инцидентность, а не печатная формула.

Автор: Команда Atomichack 3.0
=============================================================================
"""

import random
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import config
from .errors import DegenerateConfiguration, SeedFailure
from .field import Field, Scalar
from .models import Gender, SeedConfig, SeedMode


Coords = Tuple[Scalar, Scalar]
Conic = Tuple[Scalar, Scalar, Scalar, Scalar, Scalar, Scalar]


# =============================================================================
# ГЕОМЕТРИЧЕСКИЙ ОБЪЕКТ
# =============================================================================

@dataclass(frozen=True, slots=True)
class GeomObject:
    """Точка (s,t) или прямая [a,b] с каноническими координатами"""
    gender: Gender
    c1: Scalar
    c2: Scalar

    def __post_init__(self):
        if self.gender is Gender.LINE and self.c1 == 0 and self.c2 == 0:
            raise DegenerateConfiguration("[0,0] не является прямой")

    @property
    def coords(self) -> Coords:
        return (self.c1, self.c2)

    def __str__(self):
        if self.gender is Gender.POINT:
            return f"({self.c1},{self.c2})"
        return f"[{self.c1},{self.c2}]"


def point(field: Field, s, t) -> GeomObject:
    return GeomObject(Gender.POINT, field.canon(s), field.canon(t))


def line(field: Field, a, b) -> GeomObject:
    return GeomObject(Gender.LINE, field.canon(a), field.canon(b))


# =============================================================================
# ОПЕРАЦИИ РОЖДЕНИЯ
# =============================================================================

def combine(field: Field, u: Coords, v: Coords) -> Coords:
    """
    Общая формула join/meet над парами координат.

    Исключения:
        DegenerateConfiguration: u == v или s*t' - s'*t == 0
    """
    s, t = u
    s2, t2 = v
    det = field.sub(field.mul(s, t2), field.mul(s2, t))
    if field.is_zero(det):
        raise DegenerateConfiguration(f"Нулевой определитель для {u} и {v}")
    inv = field.inv(det)
    return field.mul(field.sub(t, t2), inv), field.mul(field.sub(s2, s), inv)


def _birth(field: Field, x: GeomObject, y: GeomObject, parent_gender: Gender) -> GeomObject:
    if x.gender is not parent_gender or y.gender is not parent_gender:
        raise TypeError(f"Оба родителя должны быть пола {parent_gender.value}")
    if x == y:
        raise DegenerateConfiguration(f"Родители совпадают: {x}")
    c1, c2 = combine(field, x.coords, y.coords)
    return GeomObject(parent_gender.opposite, c1, c2)


def join(field: Field, p: GeomObject, q: GeomObject) -> GeomObject:
    """
    Прямая через две различные точки.

    Исключения:
        DegenerateConfiguration: p == q или прямая проходит через начало координат
    """
    return _birth(field, p, q, Gender.POINT)


def meet(field: Field, l: GeomObject, m: GeomObject) -> GeomObject:
    """
    Точка пересечения двух различных прямых.

    Исключения:
        DegenerateConfiguration: l == m или прямые параллельны
    """
    return _birth(field, l, m, Gender.LINE)


def incident(field: Field, p: GeomObject, l: GeomObject) -> bool:
    """True, если a*s + b*t + 1 == 0 точно"""
    value = field.add(field.add(field.mul(l.c1, p.c1), field.mul(l.c2, p.c2)), field.one())
    return field.is_zero(value)


# =============================================================================
# МАТРИЦЫ 3x3 И КОНИКИ
# =============================================================================

def _det3(field: Field, m) -> Scalar:
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    mul, sub, add = field.mul, field.sub, field.add
    return add(sub(mul(a, sub(mul(e, i), mul(f, h))), mul(b, sub(mul(d, i), mul(f, g)))),
               mul(c, sub(mul(d, h), mul(e, g))))


def _adjugate3(field: Field, m):
    """Присоединенная матрица (транспонированные алгебраические дополнения)"""
    mul, sub = field.mul, field.sub
    cof = [[None] * 3 for _ in range(3)]
    for r in range(3):
        for c in range(3):
            rows = [x for x in range(3) if x != r]
            cols = [y for y in range(3) if y != c]
            minor = sub(mul(m[rows[0]][cols[0]], m[rows[1]][cols[1]]),
                        mul(m[rows[0]][cols[1]], m[rows[1]][cols[0]]))
            cof[r][c] = minor if (r + c) % 2 == 0 else field.neg(minor)
    return [[cof[c][r] for c in range(3)] for r in range(3)]


def _mat_vec(field: Field, m, v):
    return [field.add(field.add(field.mul(row[0], v[0]), field.mul(row[1], v[1])), field.mul(row[2], v[2]))
            for row in m]


def conic_value(field: Field, conic: Conic, p: Coords) -> Scalar:
    """Значение квадратичной формы A*x^2 + B*x*y + C*y^2 + D*x + E*y + F в точке"""
    x, y = p
    mul, add = field.mul, field.add
    terms = [mul(x, x), mul(x, y), mul(y, y), x, y, field.one()]
    value = field.zero()
    for coefficient, term in zip(conic, terms):
        value = add(value, mul(coefficient, term))
    return value


def on_conic(field: Field, conic: Conic, p: Coords) -> bool:
    return field.is_zero(conic_value(field, conic, p))


def determinant(field: Field, matrix: Sequence[Sequence[Scalar]]) -> Scalar:
    """Определитель квадратной матрицы методом Гаусса над полем"""
    rows = [list(row) for row in matrix]
    n = len(rows)
    result = field.one()
    for col in range(n):
        pivot = next((r for r in range(col, n) if not field.is_zero(rows[r][col])), None)
        if pivot is None:
            return field.zero()
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            result = field.neg(result)
        pivot_value = rows[col][col]
        result = field.mul(result, pivot_value)
        inv = field.inv(pivot_value)
        for r in range(col + 1, n):
            factor = field.mul(rows[r][col], inv)
            if field.is_zero(factor):
                continue
            rows[r] = [field.sub(x, field.mul(factor, y)) for x, y in zip(rows[r], rows[col])]
    return result


def conic_determinant(field: Field, points: Sequence[Coords]) -> Scalar:
    """
    Определитель 6x6 матрицы инцидентности коник для шести точек.
    Равен нулю тогда и только тогда, когда точки лежат на одной конике.
    """
    if len(points) != 6:
        raise ValueError("Нужно ровно шесть точек")
    mul = field.mul
    matrix = [[mul(x, x), mul(x, y), mul(y, y), x, y, field.one()] for x, y in points]
    return determinant(field, matrix)


def sample_conic_points(field: Field, stream: random.Random, k: int) -> Tuple[List[Coords], Conic]:
    """
    k точек на случайной невырожденной конике.

    Коника - образ окружности u -> ((1-u^2)/(1+u^2), 2u/(1+u^2)) под случайным
    проективным преобразованием M с ненулевым определителем. В однородных
    координатах точка окружности - (1-u^2, 2u, 1+u^2), ее образ - M*h.

    Возвращает:
        (координаты точек, коэффициенты коники (A, B, C, D, E, F))

    Исключения:
        DegenerateConfiguration: det M == 0, точка ушла на бесконечность
                                 или параметры совпали
    """
    matrix = [[field.sample(stream) for _ in range(3)] for _ in range(3)]
    if field.is_zero(_det3(field, matrix)):
        raise DegenerateConfiguration("Вырожденное проективное преобразование")

    one = field.one()
    two = field.add(one, one)
    params = [field.sample(stream) for _ in range(k)]
    if len(set(params)) != k:
        raise DegenerateConfiguration("Совпадающие параметры на конике")

    coords = []
    for u in params:
        uu = field.mul(u, u)
        h = [field.sub(one, uu), field.mul(two, u), field.add(one, uu)]
        x, y, z = _mat_vec(field, matrix, h)
        if field.is_zero(z):
            raise DegenerateConfiguration("Точка коники на бесконечности")
        inv = field.inv(z)
        coords.append((field.mul(x, inv), field.mul(y, inv)))

    # Q = adj(M)^T * diag(1, 1, -1) * adj(M)
    adj = _adjugate3(field, matrix)
    signs = [one, one, field.neg(one)]
    q = [[field.zero()] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            total = field.zero()
            for r in range(3):
                total = field.add(total, field.mul(signs[r], field.mul(adj[r][i], adj[r][j])))
            q[i][j] = total
    conic = (q[0][0], field.mul(two, q[0][1]), q[1][1],
             field.mul(two, q[0][2]), field.mul(two, q[1][2]), q[2][2])
    return coords, conic


# =============================================================================
# ПОСЕВ АДАМОВ
# =============================================================================

def _pairwise_generic(field: Field, coords: Sequence[Coords]) -> bool:
    """Все пары различны и допускают join/meet"""
    if len(set(coords)) != len(coords):
        return False
    for i in range(len(coords)):
        for j in range(i + 1, len(coords)):
            try:
                combine(field, coords[i], coords[j])
            except DegenerateConfiguration:
                return False
    return True


def seed_points(seed: SeedConfig, field: Field, stream: random.Random,
                resample_limit: int = config.DEFAULT_RESAMPLE_LIMIT,
                gender: Gender = Gender.POINT) -> List[GeomObject]:
    """
    k Адамов в общем положении.

    GENERIC - 2k независимых случайных координат; CONIC - k точек на одной
    случайной невырожденной конике. Попарная различимость и join-совместимость
    проверяются, неудачная попытка пересэмплируется.

    Параметры:
        seed (SeedConfig): Число Адамов и режим
        field: Поле координат
        stream (random.Random): Поток случайных чисел этого экземпляра
        resample_limit (int): Максимум попыток
        gender (Gender): LINE - двойственный посев прямыми

    Исключения:
        SeedFailure: после resample_limit неудачных попыток
    """
    for _ in range(resample_limit):
        try:
            coords, _conic = sample_seed_coords(seed, field, stream)
        except DegenerateConfiguration:
            continue
        if _pairwise_generic(field, coords):
            return [GeomObject(gender, c1, c2) for c1, c2 in coords]
    raise SeedFailure(f"Не удалось разместить {seed.adams} Адамов за {resample_limit} попыток")


def sample_seed_coords(seed: SeedConfig, field: Field, stream: random.Random):
    """Одна попытка посева: (координаты, коника или None)"""
    if seed.mode is SeedMode.CONIC:
        return sample_conic_points(field, stream, seed.adams)
    return [(field.sample(stream), field.sample(stream)) for _ in range(seed.adams)], None
