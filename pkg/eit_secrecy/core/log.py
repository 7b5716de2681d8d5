# core/log.py
import logging

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """配置根 logger，只应由 CLI 入口调用一次。"""
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT)
    # numpy/scipy 之外的第三方库保持安静
    logging.getLogger("dotenv").setLevel(logging.WARNING)
