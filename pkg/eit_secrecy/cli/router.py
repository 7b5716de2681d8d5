# cli/router.py
import argparse

from eit_secrecy import __version__
# 每个子命令一个模块，各自提供 register(subparsers)
from eit_secrecy.cli.commands import capacity, channel, validate
from eit_secrecy.core.settings import get_settings

COMMANDS = (channel, capacity, validate)


def build_parser() -> argparse.ArgumentParser:
    """聚合所有子命令；新增命令只需在 COMMANDS 里加一个模块。"""
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="eit-secrecy",
        description="窃听信道保密指标的欧氏信息论局部近似：矩阵束谱、乘子 LP、C_SIC 与数值校验。",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--output-dir", default=settings.output_dir, help="输出目录（EIT_SECRECY_OUTPUT_DIR）")
    parser.add_argument("--units", choices=("nats", "bits"), default=settings.units, help="输出单位")
    parser.add_argument("--workers", type=int, default=settings.workers, help="扫描使用的线程数")
    parser.add_argument("--log-level", default=settings.log_level, help="日志级别")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(subparsers)
    return parser
