"""
=============================================================================
config.py - Конфигурационный файл проекта
=============================================================================

Этот модуль содержит все константы и настройки движка генеалогии точек
и прямых. Централизация настроек упрощает изменение параметров
и поддержку кода.

Автор: Команда Atomichack 3.0
Дата: 2025
=============================================================================
"""

import os
from pathlib import Path


# =============================================================================
# ВЕРСИИ И ФОРМАТЫ
# =============================================================================

TOOL_VERSION = "3.0.0"

# Версия схемы JSON-отчета (поле schema_version)
REPORT_SCHEMA_VERSION = 1

# Версия формата файлов снимков (snapshot). Снимок другой версии не читается.
SNAPSHOT_FORMAT_VERSION = 1


# =============================================================================
# НАСТРОЙКИ ПОЛЕЙ
# =============================================================================

# Граница числителя/знаменателя случайных рациональных координат
DEFAULT_SAMPLE_BOUND = 10 ** 6

# Минимально допустимая граница (запас "общности положения")
MIN_SAMPLE_BOUND = 1000

# Простые числа для режима отпечатков: не короче MIN_PRIME_BITS бит,
# автоматически выбираются из диапазона [2^(PRIME_BITS-1), 2^PRIME_BITS)
MIN_PRIME_BITS = 60
PRIME_BITS = 61

# Верхняя граница 64-битного зерна генератора
MAX_RNG_SEED = 2 ** 64 - 1
DEFAULT_RNG_SEED = 20140619


# =============================================================================
# ПАРАМЕТРЫ ПРОГОНА
# =============================================================================

# Сколько раз пересэмплировать вырожденный экземпляр до SeedFailure
DEFAULT_RESAMPLE_LIMIT = 32

# Число независимых экземпляров, счетчики которых обязаны совпасть
DEFAULT_VERIFY_RUNS = 2

# Число дополнительных свежих экземпляров при проверке кандидатов-чудес
DEFAULT_VERIFY_TRIALS = 3

# Число случайных перестановок Адамов при проверке орбиты для k > 5
SAMPLED_PERMUTATIONS = 20

# Количество рабочих процессов (1 - вычисление в текущем процессе)
DEFAULT_WORKERS = 1

# Минимальное число пар в поколении, начиная с которого имеет смысл пул процессов
PARALLEL_MIN_PAIRS = 20000


# =============================================================================
# ОПУБЛИКОВАННЫЕ ПОСЛЕДОВАТЕЛЬНОСТИ
# =============================================================================

# Ключ: (число Адамов, политика, режим посева) -> новые объекты по поколениям
KNOWN_SEQUENCES = {
    (4, "all-pairs", "generic"): [4, 6, 3, 3, 6, 16, 84, 1716, 719628],
    (5, "all-pairs", "generic"): [5, 10, 15, 90, 3495],
    (6, "all-pairs", "generic"): [6, 15, 45, 855, 342000],
    (5, "same-generation", "generic"): [5, 10, 15, 75, 2080],
    (3, "all-pairs", "generic"): [3, 3, 0],
    (2, "all-pairs", "generic"): [2, 1, 0],
    (4, "same-generation", "generic"): [4, 6, 3, 3, 0],
}


# =============================================================================
# ХРАНИЛИЩЕ И ЛОГИРОВАНИЕ
# =============================================================================

# Каталог хранилища задач HTTP-сервиса и отчетов командной строки
STORAGE_DIR = Path(os.environ.get("GENEALOGY_STORAGE_DIR", "storage"))

# Подкаталог STORAGE_DIR для отчетов командной строки без --out
CLI_REPORTS_SUBDIR = "runs"

# Подробный вывод в консоль (GENEALOGY_VERBOSE=0 отключает)
VERBOSE = os.environ.get("GENEALOGY_VERBOSE", "1") != "0"


# =============================================================================
# КОДЫ ВОЗВРАТА CLI
# =============================================================================

EXIT_CODES = {
    "ok": 0,
    "failure": 1,
    "usage": 2,
    "SeedFailure": 3,
    "VerificationMismatch": 4,
    "CogenyViolation": 5,
    "FormatMismatch": 6,
    "ConfigDigestMismatch": 6,
    "DegenerateConfiguration": 7,
    "PedigreeSyntaxError": 8,
    "UnknownId": 8,
}
