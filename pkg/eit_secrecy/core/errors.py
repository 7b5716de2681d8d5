# core/errors.py
"""
统一的异常体系。
所有数值模块抛出的错误都继承自 SecrecyError，CLI 只需在一处捕获即可映射为退出码。
"""


class SecrecyError(Exception):
    """工具箱所有错误的根类。"""


class ConfigurationError(SecrecyError, ValueError):
    """环境变量或 .env 配置不合法。"""


class InvalidDistributionError(SecrecyError, ValueError):
    """Pmf 或转移矩阵不满足概率约束。"""


class DimensionError(SecrecyError, ValueError):
    """维度不匹配。"""


class DomainError(SecrecyError, ValueError):
    """参数超出定义域（支撑集、零概率、取值范围等）。"""


class PerturbationValidityError(DomainError):
    """扰动后的条件分布出现负概率。"""

    def __init__(self, symbol: int, value: float, message: str | None = None):
        self.symbol = symbol
        self.value = value
        super().__init__(
            message or f"perturbed conditional is invalid at symbol x={symbol} (value {value:.3e} < 0)"
        )


class SingularPencilError(DomainError):
    """限制在 S⊥ 上的 Λ 不是正定的，矩阵束 (V, Λ) 无法白化。"""


class InfeasibleLpError(SecrecyError):
    """乘子 LP 的可行域为空。"""


class ConstructionError(SecrecyError):
    """信道构造失败（例如量化后出现零概率输出格）。"""


class NonCommutingError(SecrecyError):
    """要求 V 与 Λ 可交换的操作被用在了不可交换的系统上。"""


class ConvergenceWarning(UserWarning):
    """迭代算法在最大迭代次数内未收敛。"""


class ChannelFileError(SecrecyError, ValueError):
    """信道 JSON 文件无法解析或内容不合法。"""
