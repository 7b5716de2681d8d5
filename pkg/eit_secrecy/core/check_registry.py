# core/check_registry.py
import importlib
import logging
import pkgutil
from typing import Dict

from eit_secrecy.checks.base_check import BaseCheck

logger = logging.getLogger(__name__)


class CheckRegistry:
    """
    校验注册中心。
    自动发现并加载 'eit_secrecy.checks' 包中定义的所有校验。
    """

    def __init__(self):
        self.checks: Dict[str, BaseCheck] = {}
        logger.debug("🚀 Initializing check registry...")
        self._discover_checks()
        logger.debug("✅ Registry initialized. Found %d checks.", len(self.checks))

    def _discover_checks(self):
        """递归扫描 checks 包下的所有模块，注册其中每个具体的 BaseCheck 子类。"""
        from eit_secrecy import checks

        for module_info in pkgutil.walk_packages(path=checks.__path__, prefix=checks.__name__ + "."):
            try:
                module = importlib.import_module(module_info.name)
                for attribute_name in dir(module):
                    attribute = getattr(module, attribute_name)

                    # 只要具体子类，跳过基类本身和从别处导入进来的抽象类
                    if (
                        isinstance(attribute, type)
                        and issubclass(attribute, BaseCheck)
                        and attribute is not BaseCheck
                        and not getattr(attribute, "__abstractmethods__", None)
                    ):
                        check = attribute()
                        if check.name in self.checks and type(self.checks[check.name]) is not attribute:
                            logger.warning("⚠️ Duplicate check name '%s' found. Overwriting.", check.name)
                        self.checks[check.name] = check
                        logger.debug("  ✅ Registered check '%s' from module %s", check.name, module_info.name)
            except Exception as e:
                logger.error("❌ Error discovering checks in module %s: %s", module_info.name, e)

    def get_check(self, name: str) -> BaseCheck | None:
        """根据名称获取一个已注册的校验实例。"""
        return self.checks.get(name)

    def list_checks(self) -> list[str]:
        """列出所有已注册的校验名称（排序后）。"""
        return sorted(self.checks)


# 全局单例，首次导入时完成发现
check_registry = CheckRegistry()
