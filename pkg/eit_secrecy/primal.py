# primal.py
"""
EIT 近似 SIC 问题的直接数值求解，用于交叉验证对偶 / LP 路径。

变量是 S⊥ 基坐标下的矩阵 C（(|X|−1)×|U|），L = basis·C 自动与 √P_X 正交；
目标 Σ_u p_u c_uᵀV⊥c_u 在 Σ p‖c‖² ≤ R'、Σ p cᵀΛ⊥c ≤ Θ' 上最大化。
每步：自然梯度 2V⊥c_u → 沿活跃约束法向投影（只保留正乘子）→ 去掉加权均值 → 径向缩放到可行边界。
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from eit_secrecy.capacity import LpForm, approximate_secrecy_capacity, lmi_dual
from eit_secrecy.core.errors import DomainError, InfeasibleLpError
from eit_secrecy.core.pool import ordered_map
from eit_secrecy.eit import EitSystem, PerturbationStrategy, max_valid_epsilon, quadratic_sums
from eit_secrecy.probability import Pmf
from eit_secrecy.spectral import restrict, sym_eig

logger = logging.getLogger(__name__)

STEP_SCALE = 1e-2
IMPROVEMENT_TOL = 1e-12
STALL_WINDOW = 50
ACTIVE_REL = 1e-9


@dataclass(frozen=True)
class PrimalResult:
    strategy: PerturbationStrategy
    objective: float
    rate_used: float
    leakage_used: float
    converged: bool
    iterations: int
    rate_budget: float
    leakage_budget: float
    # 请求的 ε 是否能让缩放后的 L 保持全部条件分布合法；为 False 时 strategy.epsilon 是合法上界
    epsilon_requested: float | None = None
    epsilon_realizable: bool = True


def _inner(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> float:
    """P_U 加权内积 Σ_u p_u a_uᵀb_u。"""
    return float(np.sum(a * b * p))


def _center(c: np.ndarray, p: np.ndarray) -> np.ndarray:
    return c - (c @ p)[:, None]


def _to_boundary(c: np.ndarray, p: np.ndarray, l_perp: np.ndarray, rp: float, thp: float) -> np.ndarray:
    rate = _inner(c, c, p)
    leak = _inner(c, l_perp @ c, p)
    factor = math.inf
    if rate > 0:
        factor = min(factor, math.sqrt(rp / rate))
    if leak > 1e-300:
        factor = min(factor, math.sqrt(thp / leak))
    return c if not math.isfinite(factor) else c * factor


def _project_gradient(
    grad: np.ndarray, c: np.ndarray, p: np.ndarray, l_perp: np.ndarray, rp: float, thp: float
) -> tuple[np.ndarray, np.ndarray]:
    """
    去掉活跃约束法向的分量（加权内积下的最小二乘），负乘子对应的约束不再视为活跃。
    返回 (投影梯度, [μ_rate, μ_leak])。
    """
    normals = {}
    if _inner(c, c, p) >= rp * (1.0 - ACTIVE_REL):
        normals["rate"] = 2.0 * c
    lc = l_perp @ c
    if _inner(c, lc, p) >= thp * (1.0 - ACTIVE_REL):
        normals["leak"] = 2.0 * lc

    mu = {"rate": 0.0, "leak": 0.0}
    keys = list(normals)
    while keys:
        gram = np.array([[_inner(normals[a], normals[b], p) for b in keys] for a in keys])
        rhs = np.array([_inner(normals[a], grad, p) for a in keys])
        coef = np.linalg.lstsq(gram, rhs, rcond=None)[0]
        if np.all(coef >= 0):
            mu.update(dict(zip(keys, coef)))
            break
        keys.pop(int(np.argmin(coef)))
    projected = grad.copy()
    for key in keys:
        projected -= mu[key] * normals[key]
    return projected, np.array([mu["rate"], mu["leak"]])


def _single_run(
    v_perp: np.ndarray,
    l_perp: np.ndarray,
    rp: float,
    thp: float,
    card_u: int,
    rng: np.random.Generator,
    max_iters: int,
    step: float,
    optimize_pu: bool,
) -> tuple[float, np.ndarray, np.ndarray, bool, int]:
    m = v_perp.shape[0]
    p = np.full(card_u, 1.0 / card_u)
    c = _to_boundary(_center(rng.standard_normal((m, card_u)), p), p, l_perp, rp, thp)

    def objective(cc: np.ndarray, pp: np.ndarray) -> float:
        return _inner(cc, v_perp @ cc, pp)

    f = objective(c, p)
    history = [f]
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        grad = 2.0 * v_perp @ c
        direction, mu = _project_gradient(grad, c, p, l_perp, rp, thp)
        c = _to_boundary(_center(c + step * direction, p), p, l_perp, rp, thp)

        if optimize_pu:
            # 镜像下降：拉格朗日函数对 p_u 的偏导是 c_uᵀ(V − μ_r I − μ_l Λ)c_u
            score = np.einsum("iu,ij,ju->u", c, v_perp - mu[0] * np.eye(m) - mu[1] * l_perp, c)
            logits = np.log(p) + step * score
            p = np.exp(logits - logits.max())
            p /= p.sum()
            c = _to_boundary(_center(c, p), p, l_perp, rp, thp)

        f = objective(c, p)
        history.append(f)
        if it >= STALL_WINDOW and history[-1] - history[-1 - STALL_WINDOW] < IMPROVEMENT_TOL * max(1.0, abs(f)):
            converged = True
            break
    return f, c, p, converged, it


def optimize_primal(
    sys: EitSystem,
    rp: float,
    thp: float,
    card_u: int,
    seed: int = 0,
    restarts: int = 8,
    max_iters: int = 5000,
    epsilon: float | None = None,
    optimize_pu: bool = False,
    workers: int = 1,
) -> PrimalResult:
    """
    多起点投影梯度上升，返回各起点中目标值最大的可行解。
    rp、thp 是缩放后的预算 R' = 2R/ε²、Θ' = 2Θ/ε²。
    给出 epsilon 时返回的策略就用这个 ε，eit_mi_x / eit_mi_y 与 (R, Θ) 单位一致；
    缩放后的 L 在该 ε 下不合法时 epsilon_realizable 为 False，策略改用合法上界并记警告。
    不给 epsilon 时策略的 ε 取 min(1, 合法上界)，只有比值类量有意义。
    """
    if card_u < 2:
        raise DomainError(f"need at least two messages, got |U|={card_u}")
    if not (rp > 0 and thp > 0):
        raise DomainError(f"budgets must be positive, got R'={rp!r}, Θ'={thp!r}")
    if restarts < 1 or max_iters < 1:
        raise DomainError("restarts and max_iters must be >= 1")
    if epsilon is not None and not (0.0 < epsilon <= 1.0):
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon!r}")

    v_perp = restrict(sys.v, sys.basis)
    l_perp = restrict(sys.lam, sys.basis)
    lam_max = float(sym_eig(v_perp)[0][0])
    step = STEP_SCALE / lam_max if lam_max > 1e-15 else STEP_SCALE

    seeds = np.random.SeedSequence(seed).spawn(restarts)

    def run(child: np.random.SeedSequence):
        return _single_run(v_perp, l_perp, rp, thp, card_u, np.random.default_rng(child), max_iters, step, optimize_pu)

    runs = ordered_map(run, seeds, workers)
    best = max(range(restarts), key=lambda k: (runs[k][0], -k))
    f, c, p, converged, iters = runs[best]
    if not converged:
        logger.warning("⚠️ primal run did not stall within %d iterations (|U|=%d, best objective %.6g)", max_iters, card_u, f)

    pu = Pmf.renormalized(p)
    l = sys.basis @ c
    bound = min(1.0, max_valid_epsilon(sys.px, l))
    realizable = epsilon is None or epsilon <= bound * (1.0 + 1e-12)
    if not realizable:
        logger.warning(
            "⚠️ budget-scaled perturbation needs epsilon <= %.6g but %g was requested; "
            "the returned strategy uses the bound",
            bound, epsilon,
        )
    strategy = PerturbationStrategy(sys.px, pu, l, epsilon if realizable and epsilon is not None else bound)
    rate, utility, leakage = quadratic_sums(strategy, sys)
    return PrimalResult(
        strategy=strategy,
        objective=utility,
        rate_used=rate,
        leakage_used=leakage,
        converged=converged,
        iterations=iters,
        rate_budget=rp,
        leakage_budget=thp,
        epsilon_requested=epsilon,
        epsilon_realizable=realizable,
    )


@dataclass(frozen=True)
class InvarianceRow:
    card_u: int
    primal_objective: float
    primal_value: float
    dual_min: float | None
    lmi: float
    paper_literal: float | None
    converged: bool
    epsilon_realizable: bool = True


def pu_invariance_sweep(
    sys: EitSystem,
    r: float,
    theta: float,
    epsilon: float,
    card_range,
    seed: int = 0,
    restarts: int = 8,
    max_iters: int = 5000,
    workers: int = 1,
) -> list[InvarianceRow]:
    """
    对每个 |U| 求解原问题，并与对偶值并列。
    primal_value = 目标值·ε²/2，与 (R, Θ) 单位下的对偶值可直接比较。
    """
    if not (0.0 < epsilon <= 1.0):
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon!r}")
    rp, thp = 2.0 * r / epsilon**2, 2.0 * theta / epsilon**2

    dual = approximate_secrecy_capacity(sys, r, theta, LpForm.DUAL_MIN)
    dual_min = dual.value if dual.form is LpForm.DUAL_MIN else None
    lmi = lmi_dual(sys, r, theta).value
    try:
        literal = approximate_secrecy_capacity(sys, r, theta, LpForm.PAPER_LITERAL_MAX).value
    except InfeasibleLpError:
        literal = None

    def row(card: int) -> InvarianceRow:
        res = optimize_primal(
            sys, rp, thp, card, seed=int(np.random.SeedSequence([seed, card]).generate_state(1)[0]),
            restarts=restarts, max_iters=max_iters, epsilon=epsilon,
        )
        return InvarianceRow(
            card_u=card,
            primal_objective=res.objective,
            primal_value=0.5 * epsilon**2 * res.objective,
            dual_min=dual_min,
            lmi=lmi,
            paper_literal=literal,
            converged=res.converged,
            epsilon_realizable=res.epsilon_realizable,
        )

    cards = list(card_range)
    logger.info("🚀 |U|-invariance sweep over %s (R=%g, Θ=%g, ε=%g)", cards, r, theta, epsilon)
    return ordered_map(row, cards, workers)


def achieved_ratio(strategy: PerturbationStrategy, sys: EitSystem) -> float:
    """(Σ p LᵀVL)/(Σ p LᵀΛL)。"""
    _, utility, leakage = quadratic_sums(strategy, sys)
    if leakage <= 1e-12:
        raise DomainError(f"strategy leaks nothing to Eve (aggregate {leakage:.3e}); the ratio is undefined")
    return utility / leakage


@dataclass(frozen=True)
class KktAlignment:
    rho: float
    nu: float
    residuals: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0


def kkt_alignment(result: PrimalResult, sys: EitSystem, active_rel: float = 1e-6) -> KktAlignment:
    """
    由活跃约束估计 (ρ̂, ν̂)：对所有消息联立最小二乘 V L_u ≈ ρ L_u + ν Λ L_u；
    残差为 ‖(−V + ρ̂I + ν̂Λ)L_u‖ / ‖L_u‖。
    """
    l = np.asarray(result.strategy.l)
    weights = np.sqrt(result.strategy.pu.probs)
    use_rate = result.rate_used >= result.rate_budget * (1.0 - active_rel)
    use_leak = result.leakage_used >= result.leakage_budget * (1.0 - active_rel)

    target = ((sys.v @ l) * weights).ravel(order="F")
    columns = []
    if use_rate:
        columns.append((l * weights).ravel(order="F"))
    if use_leak:
        columns.append(((sys.lam @ l) * weights).ravel(order="F"))
    coef = np.linalg.lstsq(np.column_stack(columns), target, rcond=None)[0] if columns else np.array([])
    coef = list(coef)
    rho = float(coef.pop(0)) if use_rate else 0.0
    nu = float(coef.pop(0)) if use_leak else 0.0

    stationarity = -sys.v @ l + rho * l + nu * (sys.lam @ l)
    norms = np.linalg.norm(l, axis=0)
    residuals = np.where(norms > 0, np.linalg.norm(stationarity, axis=0) / np.where(norms > 0, norms, 1.0), 0.0)
    return KktAlignment(rho=rho, nu=nu, residuals=residuals)
