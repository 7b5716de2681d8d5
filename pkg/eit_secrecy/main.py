# main.py
import logging
import sys

from eit_secrecy.cli.router import build_parser
from eit_secrecy.core.errors import SecrecyError
from eit_secrecy.core.log import configure_logging

logger = logging.getLogger("eit_secrecy")

INPUT_ERROR = 3


def _report(e: SecrecyError) -> int:
    logger.error("❌ %s: %s", type(e).__name__, e)
    print(f"error: {e}", file=sys.stderr)
    return INPUT_ERROR


def main(argv: list[str] | None = None) -> int:
    """命令行入口：0 成功，2 校验未通过，3 输入或数值定义域错误。"""
    try:
        # 解析参数时才读取 .env 配置
        parser = build_parser()
    except SecrecyError as e:
        configure_logging()
        return _report(e)
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except SecrecyError as e:
        # 所有已知错误在这里统一转换为退出码
        return _report(e)


if __name__ == "__main__":
    sys.exit(main())
