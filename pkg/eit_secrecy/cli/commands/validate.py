# cli/commands/validate.py
"""`validate <check>`：运行一个注册的数值校验，写出数据表并按判据给出退出码。"""
import argparse
import logging

from eit_secrecy.cli.io import finish_run
from eit_secrecy.core.check_registry import check_registry
from eit_secrecy.core.errors import ConfigurationError

logger = logging.getLogger(__name__)

VALIDATION_FAILED = 2


def register(subparsers) -> None:
    parser = subparsers.add_parser("validate", help="运行数值校验")
    parser.add_argument("check", nargs="?", help="校验名称，见 --list")
    parser.add_argument("--list", action="store_true", help="列出所有已注册的校验")
    parser.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", help="覆盖校验参数，可重复"
    )
    parser.add_argument("--cardu", default=None, help="table2 的 |U| 范围，例如 5..12")
    parser.add_argument("--seed", type=int, default=None)
    parser.set_defaults(func=run_check)


def parse_overrides(pairs: list[str]) -> dict[str, str]:
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"--set expects KEY=VALUE, got {pair!r}")
        overrides[key.strip().replace("-", "_")] = _coerce(value.strip())
    return overrides


def _coerce(value: str):
    """逗号分隔的值作为列表交给 pydantic 做类型转换。"""
    if "," in value:
        return [v.strip() for v in value.split(",") if v.strip()]
    return value


def run_check(args: argparse.Namespace) -> int:
    if args.list or not args.check:
        for name in check_registry.list_checks():
            check = check_registry.get_check(name)
            print(f"{name:18s} {check.display_name}  {check.description}")
        return 0

    check = check_registry.get_check(args.check)
    if check is None:
        raise ConfigurationError(f"unknown check {args.check!r}; available: {', '.join(check_registry.list_checks())}")

    fields = check.Params.model_fields
    params = parse_overrides(args.set)
    unknown = sorted(set(params) - set(fields))
    if unknown:
        raise ConfigurationError(f"check {check.name!r} has no parameters {unknown}; known: {sorted(fields)}")
    if args.cardu is not None and "card_range" in fields:
        params["card_range"] = args.cardu
    if args.seed is not None and "seed" in fields:
        params["seed"] = args.seed
    if "units" in fields:
        params.setdefault("units", args.units)
    try:
        check.parse_params(params)
    except ValueError as e:
        raise ConfigurationError(f"invalid parameters for check {check.name!r}: {e}") from e

    logger.info("🚀 Running check '%s' (%s)", check.name, check.display_name)
    report = check.run(params)

    tables = {f"validate_{check.name}": report.rows}
    for key, rows in report.tables.items():
        tables[f"validate_{check.name}_{key}"] = rows
    seeds = {"seed": params["seed"]} if "seed" in params else {}
    for path in finish_run(args, f"validate {check.name}", tables, seeds=seeds):
        print(path)

    for criterion in report.criteria:
        if criterion.passed:
            logger.info("✅ %s: %s", criterion.name, criterion.detail)
        else:
            logger.error("❌ %s: %s", criterion.name, criterion.detail)
        print(f"{'PASS' if criterion.passed else 'FAIL'}  {criterion.name}  {criterion.detail}")
    return 0 if report.passed else VALIDATION_FAILED
