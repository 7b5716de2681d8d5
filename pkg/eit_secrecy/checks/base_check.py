# checks/base_check.py
from abc import ABC, abstractmethod
from typing import Any

from pydantic import BaseModel, Field


class CheckCriterion(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class CheckReport(BaseModel):
    name: str
    rows: list[dict[str, Any]] = Field(default_factory=list)
    # 附加表，CLI 写成 <name>_<key>.csv
    tables: dict[str, list[dict[str, Any]]] = Field(default_factory=dict)
    criteria: list[CheckCriterion] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def failed(self) -> list[CheckCriterion]:
        return [c for c in self.criteria if not c.passed]


class BaseCheck(ABC):
    """
    一个可复现的数值校验：跑一组实验，产出数据表和若干通过 / 失败判据。
    参数由子类的 Params 模型声明，未给出的字段取默认值。
    """

    Params: type[BaseModel] = BaseModel

    @property
    @abstractmethod
    def name(self) -> str:
        """唯一技术名称（CLI 里用），例如 'table1'"""
        pass

    @property
    @abstractmethod
    def display_name(self) -> str:
        """友好名称，例如 'LP 求解器 vs 穷举顶点'"""
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        """简短描述，用作帮助提示。"""
        pass

    def parse_params(self, params: dict[str, Any] | None) -> BaseModel:
        return self.Params(**(params or {}))

    @abstractmethod
    def run(self, params: dict[str, Any] | None = None) -> CheckReport:
        """执行校验并返回报告。"""
        pass
