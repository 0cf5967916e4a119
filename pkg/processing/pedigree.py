"""
=============================================================================
processing/pedigree.py - Родословные: термы, печать, разбор, вычисление
=============================================================================

Родословная - дерево построения объекта из Адамов:

    AdamTerm(i)          - i-й Адам (нумерация с 1)
    BirthTerm(x, y)      - ребенок x и y (пол ребенка противоположен полу x, y)

Текстовая грамматика сертификатов:

    term := Adam_i | Eve_{i,j} | SonOf(term,term) | DaughterOf(term,term) | Имя
    Eve_{i,j} == DaughterOf(Adam_i,Adam_j), E_{i,j} - синоним Eve_{i,j}

SonOf порождает точку, DaughterOf - прямую. Имена из NAMED_INDIVIDUALS
(Abel, Reuven, ...) раскрываются в свои родословные.

Автор: Команда Atomichack 3.0
=============================================================================
"""

import itertools
import random
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import config
from .errors import PedigreeSyntaxError, UnknownId
from .field import Field
from .geometry import GeomObject, join, meet
from .models import Gender


# =============================================================================
# ТЕРМЫ
# =============================================================================

@dataclass(frozen=True)
class AdamTerm:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise PedigreeSyntaxError(f"Номер Адама должен быть >= 1: {self.index}")


@dataclass(frozen=True)
class BirthTerm:
    left: "Term"
    right: "Term"


Term = Union[AdamTerm, BirthTerm]


def adam(i: int) -> AdamTerm:
    return AdamTerm(i)


def eve(i: int, j: int) -> BirthTerm:
    return BirthTerm(AdamTerm(i), AdamTerm(j))


def child(x: Term, y: Term) -> BirthTerm:
    return BirthTerm(x, y)


def term_gender(term: Term, leaf_gender: Gender = Gender.POINT) -> Gender:
    """
    Пол объекта, который обозначает терм.

    Исключения:
        PedigreeSyntaxError: родители разного пола
    """
    if isinstance(term, AdamTerm):
        return leaf_gender
    left = term_gender(term.left, leaf_gender)
    right = term_gender(term.right, leaf_gender)
    if left is not right:
        raise PedigreeSyntaxError("Родители в BirthTerm разного пола")
    return left.opposite


def adam_indices(term: Term) -> List[int]:
    """Номера Адамов, встречающихся в терме (по возрастанию, без повторов)"""
    found = set()
    stack = [term]
    while stack:
        node = stack.pop()
        if isinstance(node, AdamTerm):
            found.add(node.index)
        else:
            stack.extend((node.left, node.right))
    return sorted(found)


# =============================================================================
# ПЕЧАТЬ
# =============================================================================

def render_term(term: Term, leaf_gender: Gender = Gender.POINT) -> str:
    """
    Текст родословной в грамматике сертификатов.

    Ключевое слово выбирается по полу ребенка: прямая - DaughterOf,
    точка - SonOf. Дочь двух Адамов-точек сокращается до Eve_{i,j}.
    """
    if isinstance(term, AdamTerm):
        return f"Adam_{term.index}"
    gender = term_gender(term, leaf_gender)
    if (gender is Gender.LINE and leaf_gender is Gender.POINT
            and isinstance(term.left, AdamTerm) and isinstance(term.right, AdamTerm)):
        return f"Eve_{{{term.left.index},{term.right.index}}}"
    keyword = "DaughterOf" if gender is Gender.LINE else "SonOf"
    return f"{keyword}({render_term(term.left, leaf_gender)},{render_term(term.right, leaf_gender)})"


# =============================================================================
# РАЗБОР
# =============================================================================

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<adam>Adam_(?P<adam_i>\d+))"
    r"|(?P<eve>(?:Eve|E)_\{\s*(?P<eve_i>\d+)\s*,\s*(?P<eve_j>\d+)\s*\})"
    r"|(?P<keyword>SonOf|DaughterOf)"
    r"|(?P<name>[A-Z][a-z]+)"
    r"|(?P<punct>[(),])"
    r")"
)


class _Parser:
    """Рекурсивный спуск по токенам грамматики сертификатов"""

    def __init__(self, text: str, leaf_gender: Gender):
        self.text = text
        self.pos = 0
        self.leaf_gender = leaf_gender

    def error(self, message: str) -> PedigreeSyntaxError:
        return PedigreeSyntaxError(f"{message} (позиция {self.pos} в {self.text!r})")

    def next_token(self):
        match = _TOKEN.match(self.text, self.pos)
        if not match or match.end() == self.pos:
            raise self.error("Неожиданный символ")
        self.pos = match.end()
        return match

    def expect(self, symbol: str):
        match = self.next_token()
        if match.group("punct") != symbol:
            raise self.error(f"Ожидался символ {symbol!r}")

    def parse_term(self) -> Term:
        match = self.next_token()
        if match.group("adam"):
            return self.checked(lambda: AdamTerm(int(match.group("adam_i"))))
        if match.group("eve"):
            if self.leaf_gender is not Gender.POINT:
                raise self.error("Eve_{i,j} допустима только при посеве точками")
            i, j = int(match.group("eve_i")), int(match.group("eve_j"))
            if i == j:
                raise self.error(f"Eve_{{{i},{j}}}: родители совпадают")
            return self.checked(lambda: eve(i, j))
        if match.group("name"):
            name = match.group("name")
            if name not in NAMED_INDIVIDUALS or self.leaf_gender is not Gender.POINT:
                raise self.error(f"Неизвестное имя {name!r}")
            return NAMED_INDIVIDUALS[name]
        keyword = match.group("keyword")
        if not keyword:
            raise self.error("Ожидался терм")
        self.expect("(")
        left = self.parse_term()
        self.expect(",")
        right = self.parse_term()
        self.expect(")")
        term = BirthTerm(left, right)
        wanted = Gender.LINE if keyword == "DaughterOf" else Gender.POINT
        if term_gender(term, self.leaf_gender) is not wanted:
            raise self.error(f"{keyword} не согласован с полом родителей")
        return term

    def checked(self, build):
        try:
            return build()
        except PedigreeSyntaxError as e:
            raise self.error(str(e)) from None

    def parse(self) -> Term:
        term = self.parse_term()
        if self.text[self.pos:].strip():
            raise self.error("Лишний текст после терма")
        return term


def parse_term(text: str, leaf_gender: Gender = Gender.POINT) -> Term:
    """
    Разбирает текст сертификата обратно в терм.

    Исключения:
        PedigreeSyntaxError: нарушение грамматики или несогласованный пол
    """
    return _Parser(text, leaf_gender).parse()


# =============================================================================
# ВЫЧИСЛЕНИЕ
# =============================================================================

def evaluate(term: Term, adams: Sequence[GeomObject], field: Field,
             memo: Optional[Dict[Term, GeomObject]] = None) -> GeomObject:
    """
    Объект, который терм обозначает на конкретном посеве.

    Параметры:
        term: Родословная
        adams: Посеянные Адамы (adams[0] - Adam_1)
        field: Поле координат посева
        memo (dict, optional): Общий кеш подтермов для пакетных вычислений

    Исключения:
        UnknownId: номер Адама больше числа посеянных
        DegenerateConfiguration: родители совпали или вырожденная пара
    """
    if memo is None:
        memo = {}
    cached = memo.get(term)
    if cached is not None:
        return cached
    if isinstance(term, AdamTerm):
        if term.index > len(adams):
            raise UnknownId(f"Adam_{term.index} при {len(adams)} Адамах")
        value = adams[term.index - 1]
    else:
        x = evaluate(term.left, adams, field, memo)
        y = evaluate(term.right, adams, field, memo)
        value = join(field, x, y) if x.gender is Gender.POINT else meet(field, x, y)
    memo[term] = value
    return value


# =============================================================================
# ПЕРЕСТАНОВКИ АДАМОВ
# =============================================================================

def permute_term(term: Term, permutation: Sequence[int]) -> Term:
    """Переименовывает Адамов: Adam_i -> Adam_{permutation[i-1]+1}"""
    if isinstance(term, AdamTerm):
        return AdamTerm(permutation[term.index - 1] + 1)
    return BirthTerm(permute_term(term.left, permutation), permute_term(term.right, permutation))


def permutation_images(k: int, stream: Optional[random.Random] = None,
                       sample_size: int = config.SAMPLED_PERMUTATIONS) -> List[Tuple[int, ...]]:
    """
    Перестановки Адамов для проверки орбиты.

    Для k <= 5 - вся симметрическая группа, иначе тождественная перестановка
    и sample_size - 1 случайных (без повторов).
    """
    if k <= 5:
        return list(itertools.permutations(range(k)))
    stream = stream or random.Random(k)
    images = [tuple(range(k))]
    seen = set(images)
    while len(images) < sample_size:
        perm = list(range(k))
        stream.shuffle(perm)
        perm = tuple(perm)
        if perm not in seen:
            seen.add(perm)
            images.append(perm)
    return images


# =============================================================================
# ИМЕНОВАННЫЕ ПОТОМКИ ЧЕТЫРЕХ АДАМОВ И ИЗВЕСТНЫЕ ЧУДЕСА
# =============================================================================

def _named_individuals() -> Dict[str, Term]:
    abel = child(eve(1, 2), eve(3, 4))
    cain = child(eve(1, 3), eve(2, 4))
    seth = child(eve(1, 4), eve(2, 3))
    sara = child(abel, cain)
    rivka = child(abel, seth)
    lea = child(cain, seth)
    return {
        "Abel": abel, "Cain": cain, "Seth": seth,
        "Sara": sara, "Rivka": rivka, "Lea": lea,
        "Reuven": child(eve(1, 2), lea),
        "Shimon": child(eve(1, 3), rivka),
        "Levi": child(eve(1, 4), sara),
        "Yehuda": child(eve(2, 3), sara),
        "Dan": child(eve(2, 4), rivka),
        "Naphtali": child(eve(3, 4), lea),
    }


NAMED_INDIVIDUALS: Dict[str, Term] = _named_individuals()

# Тройки точек поколения 4, лежащие на одной прямой (k = 4)
FOUR_ADAM_TRIPLES: List[Tuple[str, str, str]] = [
    ("Reuven", "Shimon", "Yehuda"),
    ("Reuven", "Levi", "Dan"),
    ("Shimon", "Levi", "Naphtali"),
    ("Yehuda", "Dan", "Naphtali"),
]

# Тройки прямых, проходящих через одну точку (k = 5)
FIVE_ADAM_TRIPLES: List[Tuple[str, str, str]] = [
    ("Eve_{1,2}",
     "DaughterOf(SonOf(Eve_{1,3},Eve_{4,5}),SonOf(Eve_{2,4},Eve_{3,5}))",
     "DaughterOf(SonOf(Eve_{1,4},Eve_{3,5}),SonOf(Eve_{2,3},Eve_{4,5}))"),
    ("DaughterOf(Adam_1,SonOf(Eve_{2,3},Eve_{4,5}))",
     "DaughterOf(Adam_2,SonOf(Eve_{1,4},Eve_{3,5}))",
     "DaughterOf(Adam_5,SonOf(Eve_{1,3},Eve_{2,4}))"),
    ("DaughterOf(Adam_1,SonOf(Eve_{2,3},Eve_{4,5}))",
     "DaughterOf(SonOf(E_{1,2},E_{3,4}),SonOf(E_{1,3},E_{2,5}))",
     "DaughterOf(SonOf(E_{1,4},E_{2,5}),SonOf(E_{1,5},E_{3,4}))"),
    ("DaughterOf(SonOf(E_{1,2},E_{3,4}),SonOf(E_{1,3},E_{2,4}))",
     "DaughterOf(SonOf(E_{1,2},E_{3,5}),SonOf(E_{1,3},E_{2,5}))",
     "DaughterOf(SonOf(E_{2,4},E_{3,5}),SonOf(E_{2,5},E_{3,4}))"),
]

# Тройка точек шестиугольника 1-2-6-3-4-5 на конике
PASCAL_TRIPLE: Tuple[str, str, str] = (
    "SonOf(Eve_{1,2},Eve_{3,4})",
    "SonOf(Eve_{1,5},Eve_{3,6})",
    "SonOf(Eve_{2,6},Eve_{4,5})",
)
