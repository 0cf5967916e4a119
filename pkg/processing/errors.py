"""
=============================================================================
processing/errors.py - Иерархия исключений движка
=============================================================================

Все исключения принимают одно текстовое сообщение, поэтому без потерь
передаются из рабочих процессов пула обратно в главный процесс.

Автор: Команда Atomichack 3.0
=============================================================================
"""


class GenealogyError(Exception):
    """Базовый класс всех ошибок движка"""


class DivisionByZero(GenealogyError, ZeroDivisionError):
    """Деление на ноль в поле"""


class DegenerateConfiguration(GenealogyError):
    """Вырожденная конфигурация: совпадающие родители, параллельные прямые,
    прямая через начало координат. Экземпляр пересэмплируется целиком."""


class SeedFailure(GenealogyError):
    """Исчерпан лимит пересэмплирования"""


class VerificationMismatch(GenealogyError):
    """Независимые экземпляры дали разные счетчики или генеалогии"""


class FormatMismatch(GenealogyError):
    """Файл снимка другой версии формата или поврежден"""


class ConfigDigestMismatch(GenealogyError):
    """Снимок записан для другой конфигурации прогона"""


class CogenyViolation(GenealogyError):
    """Нарушен закон когении: граф родительских пар не распадается на клики"""


class UnknownId(GenealogyError, KeyError):
    """Объекта с таким id нет в реестре"""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class PedigreeSyntaxError(GenealogyError, ValueError):
    """Текст родословной не соответствует грамматике"""


def error_code_name(error: BaseException) -> str:
    """Возвращает имя класса ошибки движка (ключ таблицы кодов возврата)"""
    for cls in type(error).__mro__:
        if cls.__module__ == __name__ and cls is not GenealogyError:
            return cls.__name__
    return "failure"
