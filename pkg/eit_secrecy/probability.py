# probability.py
"""
有限字母表上的精确概率与信息量，作为整个工具箱的基准真值。
内部单位统一为 nats，base=2 只在输出时做换算。
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import rel_entr

from eit_secrecy.core.errors import DimensionError, DomainError, InvalidDistributionError

PMF_TOL = 1e-12
INTERIOR_FLOOR = 1e-12

_BASES = (2, 2.0, math.e)


def _check_base(base: float) -> float:
    if base not in _BASES:
        raise DomainError(f"log base must be 2 or e, got {base!r}")
    return float(base)


def to_units(value_nats: float, units: str) -> float:
    """nats → 指定单位（'nats' 或 'bits'）。"""
    if units == "nats":
        return value_nats
    if units == "bits":
        return value_nats / math.log(2.0)
    raise DomainError(f"unknown units {units!r}")


@dataclass(frozen=True)
class Pmf:
    """有限字母表上的概率质量函数，构造后不可变。"""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.probs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidDistributionError(f"Pmf must be a non-empty vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidDistributionError("Pmf contains non-finite entries")
        if np.any(arr < 0):
            raise InvalidDistributionError(f"Pmf has negative entry {arr.min():.3e}")
        total = arr.sum()
        if abs(total - 1.0) > PMF_TOL:
            raise InvalidDistributionError(f"Pmf sums to {total!r}, expected 1 within {PMF_TOL}")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @classmethod
    def uniform(cls, n: int) -> "Pmf":
        if n < 1:
            raise InvalidDistributionError(f"alphabet size must be >= 1, got {n}")
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def renormalized(cls, values) -> "Pmf":
        """显式归一化：非负向量除以其总和。"""
        arr = np.asarray(values, dtype=float)
        if np.any(arr < 0):
            raise InvalidDistributionError(f"cannot renormalize negative entry {arr.min():.3e}")
        total = arr.sum()
        if total <= 0:
            raise InvalidDistributionError("cannot renormalize an all-zero vector")
        return cls(arr / total)

    def __len__(self) -> int:
        return self.probs.size

    @property
    def size(self) -> int:
        return self.probs.size

    @property
    def min_prob(self) -> float:
        return float(self.probs.min())

    def is_strictly_interior(self, floor: float = INTERIOR_FLOOR) -> bool:
        return bool(np.all(self.probs >= floor))

    def sqrt(self) -> np.ndarray:
        return np.sqrt(self.probs)


@dataclass(frozen=True)
class TransitionMatrix:
    """
    列随机的转移矩阵 P(output|input)。
    行对应输出符号、列对应输入符号，使得 P_Y = M @ P_X。
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidDistributionError(f"transition matrix must be 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidDistributionError("transition matrix contains non-finite entries")
        if np.any(arr < 0):
            raise InvalidDistributionError(f"transition matrix has negative entry {arr.min():.3e}")
        col_sums = arr.sum(axis=0)
        bad = np.flatnonzero(np.abs(col_sums - 1.0) > PMF_TOL)
        if bad.size:
            x = int(bad[0])
            raise InvalidDistributionError(f"column x={x} sums to {col_sums[x]!r}, expected 1")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def identity(cls, n: int) -> "TransitionMatrix":
        return cls(np.eye(n))

    @property
    def n_outputs(self) -> int:
        return self.entries.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.entries.shape[1]

    def column(self, x: int) -> np.ndarray:
        return self.entries[:, x]


def entropy(p: Pmf, base: float = math.e) -> float:
    """H(p) = −Σ p log p，约定 0·log 0 = 0。"""
    b = _check_base(base)
    return float(stats.entropy(p.probs, base=b))


def kl_divergence(q: Pmf, p: Pmf, base: float = math.e) -> float:
    """D(q‖p)，要求 supp(q) ⊆ supp(p)。"""
    b = _check_base(base)
    if q.size != p.size:
        raise DimensionError(f"KL between alphabets of size {q.size} and {p.size}")
    outside = np.flatnonzero((q.probs > 0) & (p.probs == 0))
    if outside.size:
        raise DomainError(f"supp(q) not contained in supp(p): q({int(outside[0])}) > 0 = p({int(outside[0])})")
    value = float(np.sum(rel_entr(q.probs, p.probs)))
    return max(value, 0.0) / math.log(b)


def chi_squared(q: Pmf, p: Pmf) -> float:
    """χ²(q, p) = Σ (q−p)²/p，p 必须严格内点。"""
    if q.size != p.size:
        raise DimensionError(f"chi-squared between alphabets of size {q.size} and {p.size}")
    if not p.is_strictly_interior():
        raise DomainError(f"chi-squared reference has a zero entry (min {p.min_prob:.3e})")
    diff = q.probs - p.probs
    return float(np.sum(diff * diff / p.probs))


def output_marginal(ch: TransitionMatrix, px: Pmf) -> Pmf:
    """P_Y = P_{Y|X} @ P_X。"""
    if ch.n_inputs != px.size:
        raise DimensionError(f"channel has {ch.n_inputs} inputs but Pmf has {px.size} symbols")
    return Pmf(ch.entries @ px.probs)


def mutual_information(px: Pmf, ch: TransitionMatrix, base: float = math.e) -> float:
    """I(X;Y) = Σ_x P_X(x) D(P_{Y|X}(·|x) ‖ P_Y)。"""
    b = _check_base(base)
    py = output_marginal(ch, px)
    support = px.probs > 0
    w = ch.entries[:, support]
    divergences = np.sum(rel_entr(w, py.probs[:, None]), axis=0)
    value = float(px.probs[support] @ divergences)
    return max(value, 0.0) / math.log(b)
