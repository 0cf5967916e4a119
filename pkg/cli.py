"""
=============================================================================
cli.py - Командная строка движка генеалогии
=============================================================================

Запускает прогон, пишет JSON-отчет и таблицу поколений, печатает
последовательность одной строкой для поиска в OEIS.

Примеры:
    python cli.py --adams 4 --generations 5 --field prime --verify-runs 2
    python cli.py --adams 6 --seed-mode conic --generations 3 --field rational
    python cli.py --adams 5 --policy same-generation --generations 4 --emit-sequence cumulative
    python cli.py --adams 4 --generations 6 --resume snapshots/

Коды возврата - config.EXIT_CODES.

Автор: Команда Atomichack 3.0
=============================================================================
"""

import argparse
import sys
import traceback
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

import config
from processing import console, emit_sequence, run_full_analysis, write_report
from processing.errors import GenealogyError, error_code_name
from processing.report_generator import generation_table
from processing.models import (FieldKind, FieldSpec, Gender, MatingPolicy, MatingPolicyKind,
                               Report, RunConfig, SeedConfig, SeedMode)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genealogy",
        description="Перечислительная геометрическая генеалогия точек и прямых",
    )
    parser.add_argument("--adams", type=int, default=4, help="Число Адамов k (>= 2)")
    parser.add_argument("--generations", type=int, default=5, help="Последнее вычисляемое поколение")
    parser.add_argument("--policy", choices=[p.value for p in MatingPolicyKind],
                        default=MatingPolicyKind.ALL_PAIRS.value)
    parser.add_argument("--seed-mode", choices=[m.value for m in SeedMode], default=SeedMode.GENERIC.value)
    parser.add_argument("--field", choices=[k.value for k in FieldKind], default=FieldKind.PRIME.value)
    parser.add_argument("--prime", type=int, default=None, help="Модуль (>= 2^60); по умолчанию выбирается")
    parser.add_argument("--rng-seed", type=int, default=config.DEFAULT_RNG_SEED)
    parser.add_argument("--verify-runs", type=int, default=config.DEFAULT_VERIFY_RUNS)
    parser.add_argument("--verify-trials", type=int, default=config.DEFAULT_VERIFY_TRIALS,
                        help="Свежие экземпляры для проверки чудес")
    parser.add_argument("--sample-bound", type=int, default=config.DEFAULT_SAMPLE_BOUND)
    parser.add_argument("--resample-limit", type=int, default=config.DEFAULT_RESAMPLE_LIMIT)
    parser.add_argument("--workers", type=int, default=config.DEFAULT_WORKERS)
    parser.add_argument("--dual", action="store_true", help="Посев прямыми вместо точек")
    parser.add_argument("--out", default=None,
                        help="Путь JSON-отчета (рядом пишется .csv); по умолчанию STORAGE_DIR/runs/")
    parser.add_argument("--no-report", action="store_true", help="Не записывать отчет")
    parser.add_argument("--snapshot", default=None, help="Каталог снимков после каждого поколения")
    parser.add_argument("--resume", default=None, help="Файл или каталог снимков")
    parser.add_argument("--emit-sequence", choices=["new", "cumulative"], default="new")
    parser.add_argument("--quiet", action="store_true", help="Только строка последовательности")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    RunConfig из разобранных флагов.

    Исключения:
        ValidationError: недопустимые значения
    """
    field_spec = FieldSpec(kind=args.field, prime=args.prime, rng_seed=args.rng_seed,
                           sample_bound=args.sample_bound)
    return RunConfig(
        seed=SeedConfig(adams=args.adams, mode=args.seed_mode, field_spec=field_spec),
        policy=MatingPolicy(kind=args.policy),
        max_generation=args.generations,
        verify_runs=args.verify_runs,
        verify_trials=args.verify_trials,
        resample_limit=args.resample_limit,
        workers=args.workers,
        seed_gender=Gender.LINE if args.dual else Gender.POINT,
    )


def default_report_path(report: Report) -> Path:
    """STORAGE_DIR/runs/run-<дайджест>-g<глубина>.json"""
    name = f"run-{report.run_metadata.config_digest[:12]}-g{report.generations_computed}.json"
    return Path(config.STORAGE_DIR) / config.CLI_REPORTS_SUBDIR / name


def run_cli(argv: Optional[List[str]] = None) -> int:
    """
    Выполняет прогон по флагам командной строки.

    Возвращает:
        int: код возврата (0 - успех)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return config.EXIT_CODES["usage"] if e.code else config.EXIT_CODES["ok"]

    verbose = config.VERBOSE
    console.set_verbose(verbose and not args.quiet)
    try:
        return _run(args)
    finally:
        console.set_verbose(verbose)


def _run(args: argparse.Namespace) -> int:
    try:
        run_config = config_from_args(args)
    except ValidationError as e:
        console.safe_print(f"Ошибка конфигурации:\n{e}", file=sys.stderr)
        return config.EXIT_CODES["usage"]

    try:
        report, schedule = run_full_analysis(run_config, snapshot_dir=args.snapshot, resume=args.resume)
    except GenealogyError as e:
        name = error_code_name(e)
        console.safe_print(f"{name}: {e}", file=sys.stderr)
        return config.EXIT_CODES.get(name, config.EXIT_CODES["failure"])
    except Exception as e:
        traceback.print_exc()
        console.safe_print(f"Ошибка: {e}", file=sys.stderr)
        return config.EXIT_CODES["failure"]

    if not args.no_report:
        write_report(report, args.out or default_report_path(report), generation_table(schedule))

    status = report.verification_status
    console.log(f"Проверка: {status.state}, согласных экземпляров {status.agreeing_instances}, "
                f"совпало с опубликованным {status.published_terms_matched}", "ИТОГ")
    console.log(f"Нетривиальных чудес: {len(report.miracles)}, "
                f"тривиальных классов: {report.trivial_class_count}", "ИТОГ")
    print(emit_sequence(report, args.emit_sequence), flush=True)
    return config.EXIT_CODES["ok"]


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
