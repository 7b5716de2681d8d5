# eit.py
"""
局部几何：DTM、V 与 Λ、扰动子空间 S⊥、扰动后的条件分布，以及互信息的二次近似。

约定：扰动向量 L 按列存放，形状 |X|×|U|；所有近似值以 nats 为单位。
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from eit_secrecy.channels import WiretapChannel, commutator_norm
from eit_secrecy.core.errors import DimensionError, DomainError, PerturbationValidityError
from eit_secrecy.probability import Pmf, TransitionMatrix, output_marginal

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-9
CONSISTENCY_TOL = 1e-9
NEGATIVE_CLIP = -1e-15


def dtm(ch: TransitionMatrix, px: Pmf) -> np.ndarray:
    """B = diag(P_Y)^{-1/2} · P_{Y|X} · diag(P_X)^{1/2}。"""
    if not px.is_strictly_interior():
        raise DomainError(f"P_X has a zero entry (min {px.min_prob:.3e}); the DTM needs a strictly interior input")
    py = output_marginal(ch, px)
    if not py.is_strictly_interior():
        raise DomainError(f"output marginal has a zero entry (min {py.min_prob:.3e}); the DTM is undefined")
    return ch.entries * np.sqrt(px.probs)[None, :] / np.sqrt(py.probs)[:, None]


def householder_basis(sqrt_px: np.ndarray) -> np.ndarray:
    """
    S⊥ 的确定性正交基：Householder 反射 H 把 e1 映到 √P_X，取 H 的后 n−1 列。
    """
    n = sqrt_px.size
    w = -sqrt_px.copy()
    w[0] += 1.0
    norm2 = float(w @ w)
    h = np.eye(n)
    if norm2 > 0.0:
        h -= 2.0 * np.outer(w, w) / norm2
    return h[:, 1:]


@dataclass(frozen=True)
class EitSystem:
    """窃听信道在参考输入处的局部几何。"""

    px: Pmf
    sqrt_px: np.ndarray
    basis: np.ndarray
    b_y: np.ndarray
    b_z: np.ndarray
    v: np.ndarray
    lam: np.ndarray

    @property
    def nx(self) -> int:
        return self.sqrt_px.size

    @property
    def dim(self) -> int:
        """S⊥ 的维数 |X|−1。"""
        return self.basis.shape[1]

    @property
    def commutator(self) -> float:
        return commutator_norm(self.v, self.lam)


def eit_system(wc: WiretapChannel) -> EitSystem:
    b_y = dtm(wc.bob, wc.px)
    b_z = dtm(wc.eve, wc.px)
    sqrt_px = wc.px.sqrt()
    system = EitSystem(
        px=wc.px,
        sqrt_px=sqrt_px,
        basis=householder_basis(sqrt_px),
        b_y=b_y,
        b_z=b_z,
        v=b_y.T @ b_y,
        lam=b_z.T @ b_z,
    )
    logger.debug("built EIT system |X|=%d, ‖[V,Λ]‖_F=%.3e", system.nx, system.commutator)
    return system


def _as_columns(l: np.ndarray) -> np.ndarray:
    arr = np.asarray(l, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionError(f"perturbations must be a vector or an |X|×|U| grid, got shape {arr.shape}")
    return arr


def reproject(l: np.ndarray, sqrt_px: np.ndarray) -> np.ndarray:
    """去掉 √P_X 方向的分量（显式调用，不会自动发生）。"""
    cols = _as_columns(l)
    fixed = cols - np.outer(sqrt_px, sqrt_px @ cols)
    return fixed if np.ndim(l) == 2 else fixed[:, 0]


def max_valid_epsilon(px: Pmf, l: np.ndarray) -> float:
    """
    使所有 P_X + ε√P_X·L_u 仍为合法分布的最大 ε。
    只有负分量起约束作用；全零扰动返回 +inf。
    """
    cols = _as_columns(l)
    if cols.shape[0] != px.size:
        raise DimensionError(f"perturbations have {cols.shape[0]} rows but |X|={px.size}")
    root = px.sqrt()[:, None]
    negative = cols < 0
    if not np.any(negative):
        return math.inf
    return float(np.min(np.broadcast_to(root, cols.shape)[negative] / -cols[negative]))


def perturbed_conditional(px: Pmf, lu: np.ndarray, epsilon: float) -> Pmf:
    """P_{X|U=u} = P_X + ε·√P_X ⊙ L_u。"""
    lu = np.asarray(lu, dtype=float)
    if lu.shape != (px.size,):
        raise DimensionError(f"perturbation has shape {lu.shape}, expected ({px.size},)")
    if epsilon < 0:
        raise DomainError(f"epsilon must be non-negative, got {epsilon!r}")
    drift = float(px.sqrt() @ lu)
    if abs(drift) > ORTHOGONALITY_TOL:
        raise DomainError(f"perturbation is not orthogonal to √P_X (inner product {drift:.3e})")

    values = px.probs + epsilon * px.sqrt() * lu
    bad = np.flatnonzero(values < NEGATIVE_CLIP)
    if bad.size:
        x = int(bad[np.argmin(values[bad])])
        raise PerturbationValidityError(
            x, float(values[x]),
            f"perturbed conditional is invalid at symbol x={x} (value {values[x]:.3e}); "
            f"epsilon={epsilon:g} exceeds the validity bound {max_valid_epsilon(px, lu):.6g}",
        )
    return Pmf.renormalized(np.clip(values, 0.0, None))


@dataclass(frozen=True)
class PerturbationStrategy:
    """消息分布 P_U、按列存放的扰动 L_u 与尺度 ε。"""

    px: Pmf
    pu: Pmf
    l: np.ndarray
    epsilon: float

    def __post_init__(self):
        l = _as_columns(self.l).copy()
        if l.shape != (self.px.size, self.pu.size):
            raise DimensionError(f"L has shape {l.shape}, expected ({self.px.size}, {self.pu.size})")
        drift = np.abs(self.px.sqrt() @ l)
        if drift.max() > ORTHOGONALITY_TOL:
            u = int(np.argmax(drift))
            raise DomainError(f"L_{u} is not orthogonal to √P_X (inner product {drift[u]:.3e})")
        mean = l @ self.pu.probs
        if np.max(np.abs(mean)) > CONSISTENCY_TOL:
            raise DomainError(f"Σ_u P_U(u)·L_u ≠ 0 (max |component| {np.max(np.abs(mean)):.3e})")
        if not (0.0 < self.epsilon <= 1.0):
            raise DomainError(f"epsilon must lie in (0, 1], got {self.epsilon!r}")
        bound = max_valid_epsilon(self.px, l)
        if self.epsilon > bound * (1.0 + 1e-12):
            raise DomainError(f"epsilon={self.epsilon:g} exceeds the validity bound {bound:.6g}")
        l.setflags(write=False)
        object.__setattr__(self, "l", l)

    @classmethod
    def clipped(cls, px: Pmf, pu: Pmf, l: np.ndarray, epsilon: float | None = None) -> "PerturbationStrategy":
        """ε 取 min(请求值或 1, max_valid_epsilon)；请求值被截断时记录警告。"""
        bound = min(1.0, max_valid_epsilon(px, l))
        if epsilon is None:
            return cls(px, pu, l, bound)
        if epsilon > bound:
            logger.warning("⚠️ epsilon=%g clipped to %.6g to keep every conditional valid", epsilon, bound)
            return cls(px, pu, l, bound)
        return cls(px, pu, l, epsilon)

    @classmethod
    def antipodal(cls, px: Pmf, direction: np.ndarray, epsilon: float) -> "PerturbationStrategy":
        """两条等概率消息，L = [d, −d]。"""
        d = np.asarray(direction, dtype=float)
        return cls(px, Pmf.uniform(2), np.column_stack([d, -d]), epsilon)

    @property
    def card_u(self) -> int:
        return self.pu.size

    def conditionals(self) -> np.ndarray:
        """|X|×|U| 矩阵，第 u 列是 P_{X|U=u}。"""
        return np.column_stack(
            [perturbed_conditional(self.px, self.l[:, u], self.epsilon).probs for u in range(self.card_u)]
        )


def _check_dims(s: PerturbationStrategy, sys: EitSystem) -> None:
    if s.l.shape[0] != sys.nx:
        raise DimensionError(f"strategy lives on |X|={s.l.shape[0]} but the system has |X|={sys.nx}")


def _weighted_form(s: PerturbationStrategy, m: np.ndarray) -> float:
    return float(s.pu.probs @ np.einsum("xu,xy,yu->u", s.l, m, s.l))


def quadratic_sums(s: PerturbationStrategy, sys: EitSystem) -> tuple[float, float, float]:
    """未缩放的 (Σ p‖L‖², Σ p LᵀVL, Σ p LᵀΛL)。"""
    _check_dims(s, sys)
    rate = float(s.pu.probs @ np.sum(s.l * s.l, axis=0))
    return rate, _weighted_form(s, sys.v), _weighted_form(s, sys.lam)


def eit_mi_x(s: PerturbationStrategy) -> float:
    return 0.5 * s.epsilon**2 * float(s.pu.probs @ np.sum(s.l * s.l, axis=0))


def eit_mi_y(s: PerturbationStrategy, sys: EitSystem) -> float:
    _check_dims(s, sys)
    return 0.5 * s.epsilon**2 * _weighted_form(s, sys.v)


def eit_mi_z(s: PerturbationStrategy, sys: EitSystem) -> float:
    _check_dims(s, sys)
    return 0.5 * s.epsilon**2 * _weighted_form(s, sys.lam)


def random_directions(sys: EitSystem, n: int, rng: np.random.Generator) -> np.ndarray:
    """S⊥ 单位球面上均匀分布的 n 个方向，形状 |X|×n。"""
    coords = rng.standard_normal((sys.dim, n))
    coords /= np.linalg.norm(coords, axis=0, keepdims=True)
    return sys.basis @ coords
