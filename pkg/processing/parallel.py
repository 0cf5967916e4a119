"""
=============================================================================
processing/parallel.py - Параллельное вычисление детей по парам родителей
=============================================================================

Пары одного поколения перечисляются в лексикографическом порядке
(меньший id, больший id). Строка - один допустимый родитель, ее партнеры -
свежие объекты (рожденные в предыдущем поколении) с большим id. Строки
режутся на непрерывные диапазоны, диапазоны вычисляются в пуле процессов,
результаты склеиваются в исходном порядке. Ни порядок, ни результат не
зависят от числа процессов.

Автор: Команда Atomichack 3.0
=============================================================================
"""

from multiprocessing import Pool
from typing import Callable, List, NamedTuple, Sequence, Tuple

from tqdm import tqdm

import config
from .field import Field
from .geometry import Coords, combine


class ChunkTask(NamedTuple):
    """Непрерывный диапазон строк для одного процесса"""
    field: Field
    rows: List[Coords]          # координаты родителей-строк диапазона
    starts: List[int]           # индекс первого партнера строки в fresh
    fresh: List[Coords]         # координаты свежих партнеров (по возрастанию id)


def run_parallel(func: Callable, items: Sequence, desc: str = "Пары",
                 processes: int | None = None, safe_mode: bool = False) -> list:
    """
    Pool.imap или последовательный цикл с индикатором tqdm.

    Параметры:
        func: Функция одного аргумента (должна импортироваться из модуля)
        items: Элементы в нужном порядке
        desc (str): Подпись индикатора
        processes (int): Число процессов пула
        safe_mode (bool): True - всё в текущем процессе
    """
    total = len(items)
    if total == 0:
        return []
    disable = not config.VERBOSE

    if safe_mode:
        return [func(item) for item in tqdm(items, total=total, desc=f"{desc} (safe)",
                                            dynamic_ncols=True, smoothing=0.1, disable=disable)]

    with Pool(processes=processes) as pool:
        return list(tqdm(pool.imap(func, items), total=total, desc=desc,
                         dynamic_ncols=True, smoothing=0.1, disable=disable))


def evaluate_chunk(task: ChunkTask) -> List[Coords]:
    """Дети всех пар диапазона в лексикографическом порядке"""
    field, fresh = task.field, task.fresh
    out = []
    append = out.append
    for row, start in zip(task.rows, task.starts):
        for partner in fresh[start:]:
            append(combine(field, row, partner))
    return out


def plan_chunks(pair_counts: Sequence[int], parts: int) -> List[Tuple[int, int]]:
    """
    Делит строки на не более чем parts непрерывных диапазонов [lo, hi)
    с примерно равным числом пар.
    """
    total = sum(pair_counts)
    if total == 0:
        return []
    target = -(-total // parts)
    chunks = []
    lo, acc = 0, 0
    for i, count in enumerate(pair_counts):
        acc += count
        if acc >= target:
            chunks.append((lo, i + 1))
            lo, acc = i + 1, 0
    if lo < len(pair_counts) and acc > 0:
        chunks.append((lo, len(pair_counts)))
    return chunks


def evaluate_pairs(field: Field, rows: Sequence[Coords], starts: Sequence[int],
                   fresh: Sequence[Coords], workers: int = 1, desc: str = "Пары") -> List[Coords]:
    """
    Координаты детей всех пар (rows[i], fresh[j]), j >= starts[i], строка за строкой.

    При workers == 1 или малом числе пар всё считается в текущем процессе.

    Исключения:
        DegenerateConfiguration: вырожденная пара (из любого процесса)
    """
    fresh = list(fresh)
    pair_counts = [len(fresh) - s for s in starts]
    total = sum(pair_counts)
    if workers <= 1 or total < config.PARALLEL_MIN_PAIRS:
        return evaluate_chunk(ChunkTask(field, list(rows), list(starts), fresh))

    tasks = [ChunkTask(field, list(rows[lo:hi]), list(starts[lo:hi]), fresh)
             for lo, hi in plan_chunks(pair_counts, workers * 4)]
    results = run_parallel(evaluate_chunk, tasks, desc=desc, processes=workers)
    out = []
    for chunk in results:
        out.extend(chunk)
    return out
