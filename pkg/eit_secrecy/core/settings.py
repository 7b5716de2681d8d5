# core/settings.py
import os
from functools import cache

from dotenv import load_dotenv

from eit_secrecy.core.errors import ConfigurationError

# 加载环境变量
load_dotenv()

_UNITS = ("nats", "bits")
_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings:
    """运行配置，全部来自环境变量（支持 .env 文件）。"""

    def __init__(self):
        self.output_dir = os.getenv("EIT_SECRECY_OUTPUT_DIR", "results")
        self.workers = self._read_int("EIT_SECRECY_WORKERS", min(4, os.cpu_count() or 1))
        self.log_level = os.getenv("EIT_SECRECY_LOG_LEVEL", "INFO").upper()
        self.units = os.getenv("EIT_SECRECY_UNITS", "nats").lower()

        if self.workers < 1:
            raise ConfigurationError(f"EIT_SECRECY_WORKERS must be >= 1, got {self.workers}")
        if self.log_level not in _LEVELS:
            raise ConfigurationError(f"EIT_SECRECY_LOG_LEVEL must be one of {_LEVELS}, got {self.log_level!r}")
        if self.units not in _UNITS:
            raise ConfigurationError(f"EIT_SECRECY_UNITS must be one of {_UNITS}, got {self.units!r}")

    @staticmethod
    def _read_int(name: str, default: int) -> int:
        raw = os.getenv(name)
        if raw is None or raw == "":
            return default
        try:
            return int(raw)
        except ValueError as e:
            raise ConfigurationError(f"{name} must be an integer, got {raw!r}") from e


@cache
def get_settings() -> Settings:
    """首次调用时读取配置并缓存；非法值在调用处抛出 ConfigurationError。"""
    return Settings()
