"""
=============================================================================
processing/field.py - Точная арифметика полей координат
=============================================================================

Два поля с каноническими представлениями элементов:

    RationalField - рациональные числа (fractions.Fraction: несократимая
                    дробь с положительным знаменателем), эталонный режим
    PrimeField    - вычеты по простому модулю p >= 2^60 (int в [0, p-1]),
                    быстрый режим "отпечатков"

Скаляр - это сам канонический Python-объект (Fraction или int): он
неизменяем, хешируется по каноническому виду и безопасно передается
между процессами.

Случайные потоки - экземпляры random.Random, зерно которых выводится
через SHA-256 из rng_seed и меток назначения. Один поток - один потребитель.

Автор: Команда Atomichack 3.0
=============================================================================
"""

import hashlib
import random
import re
from fractions import Fraction
from typing import Union

from sympy import nextprime

import config
from .errors import DivisionByZero
from .models import FieldKind, FieldSpec


Scalar = Union[int, Fraction]

_RATIONAL_TEXT = re.compile(r"-?\d+(/[1-9]\d*)?")


# =============================================================================
# ПОЛЕ РАЦИОНАЛЬНЫХ ЧИСЕЛ
# =============================================================================

class RationalField:
    """Поле Q. Элементы - Fraction в несократимом виде."""

    kind = FieldKind.RATIONALS
    prime = None

    def __init__(self, sample_bound: int = config.DEFAULT_SAMPLE_BOUND):
        self.sample_bound = sample_bound

    def __repr__(self):
        return f"RationalField(sample_bound={self.sample_bound})"

    def __eq__(self, other):
        return isinstance(other, RationalField) and other.sample_bound == self.sample_bound

    def __hash__(self):
        return hash(("Q", self.sample_bound))

    def canon(self, x) -> Fraction:
        return Fraction(x)

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def inv(self, x):
        if x == 0:
            raise DivisionByZero("Обращение нуля в поле Q")
        return 1 / x

    def div(self, x, y):
        if y == 0:
            raise DivisionByZero("Деление на ноль в поле Q")
        return x / y

    def is_zero(self, x) -> bool:
        return x == 0

    def sample(self, stream: random.Random) -> Fraction:
        """Числитель в [-B, B], знаменатель в [1, B]"""
        bound = self.sample_bound
        return Fraction(stream.randint(-bound, bound), stream.randint(1, bound))

    def to_text(self, x) -> str:
        return str(x)

    def from_text(self, text: str) -> Fraction:
        if not _RATIONAL_TEXT.fullmatch(text):
            raise ValueError(f"Некорректная запись рационального числа: {text!r}")
        return Fraction(text)


# =============================================================================
# ПРОСТОЕ ПОЛЕ
# =============================================================================

class PrimeField:
    """Поле вычетов по простому модулю. Элементы - int в [0, p-1]."""

    kind = FieldKind.PRIME

    def __init__(self, prime: int):
        self.prime = prime

    def __repr__(self):
        return f"PrimeField(prime={self.prime})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.prime == self.prime

    def __hash__(self):
        return hash(("Fp", self.prime))

    def canon(self, x) -> int:
        if isinstance(x, Fraction):
            return self.from_rational(x)
        return int(x) % self.prime

    def from_rational(self, q: Fraction) -> int:
        """Образ рационального числа при редукции по модулю p"""
        den = q.denominator % self.prime
        if den == 0:
            raise DivisionByZero(f"Знаменатель {q.denominator} кратен модулю")
        return q.numerator * pow(den, -1, self.prime) % self.prime

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def add(self, x, y):
        return (x + y) % self.prime

    def sub(self, x, y):
        return (x - y) % self.prime

    def mul(self, x, y):
        return x * y % self.prime

    def neg(self, x):
        return -x % self.prime

    def inv(self, x):
        if x == 0:
            raise DivisionByZero("Обращение нуля в простом поле")
        return pow(x, -1, self.prime)

    def div(self, x, y):
        return x * self.inv(y) % self.prime

    def is_zero(self, x) -> bool:
        return x == 0

    def sample(self, stream: random.Random) -> int:
        return stream.randrange(self.prime)

    def to_text(self, x) -> str:
        return str(x)

    def from_text(self, text: str) -> int:
        if not text.isdigit():
            raise ValueError(f"Некорректная запись вычета: {text!r}")
        value = int(text)
        if value >= self.prime:
            raise ValueError(f"Вычет {value} вне диапазона [0, p-1]")
        return value


Field = Union[RationalField, PrimeField]


# =============================================================================
# ОПЕРАЦИИ
# =============================================================================

_OPS = ('add', 'sub', 'mul', 'div')


def arith(field: Field, x: Scalar, y: Scalar, op: str) -> Scalar:
    """
    Точная операция поля над каноническими скалярами.

    Параметры:
        field: Поле (RationalField или PrimeField)
        x, y: Канонические скаляры этого поля
        op (str): 'add', 'sub', 'mul' или 'div'

    Возвращает:
        Scalar: Результат в каноническом виде

    Исключения:
        DivisionByZero: op == 'div' и y == 0
    """
    if op not in _OPS:
        raise ValueError(f"Неизвестная операция: {op}")
    return getattr(field, op)(x, y)


def sample_scalar(field: Field, stream: random.Random) -> Scalar:
    """Равномерно выбранный канонический скаляр; детерминирован состоянием потока"""
    return field.sample(stream)


# =============================================================================
# СЛУЧАЙНЫЕ ПОТОКИ И ВЫБОР МОДУЛЯ
# =============================================================================

def derive_seed(rng_seed: int, *labels) -> int:
    """64-битное зерно потока из rng_seed и меток (назначение, экземпляр, попытка)"""
    text = ":".join([str(rng_seed)] + [str(label) for label in labels])
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


def derive_stream(rng_seed: int, *labels) -> random.Random:
    """Новый независимый поток для одного потребителя"""
    return random.Random(derive_seed(rng_seed, *labels))


def choose_prime(stream: random.Random, bits: int = config.PRIME_BITS) -> int:
    """Случайное простое из [2^(bits-1), 2^bits)"""
    while True:
        candidate = nextprime(stream.randrange(2 ** (bits - 1), 2 ** bits))
        if candidate < 2 ** bits:
            return int(candidate)


def make_field(spec: FieldSpec, prime: int | None = None) -> Field:
    """
    Создает поле по спецификации.

    Параметры:
        spec (FieldSpec): Спецификация поля
        prime (int, optional): Модуль экземпляра; по умолчанию spec.prime

    Исключения:
        ValueError: режим prime без модуля
    """
    if spec.kind is FieldKind.RATIONALS:
        return RationalField(spec.sample_bound)
    modulus = prime if prime is not None else spec.prime
    if modulus is None:
        raise ValueError("Для режима prime необходим модуль")
    return PrimeField(modulus)
