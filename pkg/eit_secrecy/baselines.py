# baselines.py
"""
精确信息量的校验器与参考算法：具体扰动策略的精确互信息、信息瓶颈 Blahut–Arimoto、
全局保密收缩系数的 Monte Carlo 下界、以及二次近似下的效用 / 泄露样本。
"""
import logging
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp, rel_entr

from eit_secrecy.channels import WiretapChannel
from eit_secrecy.core.errors import ConvergenceWarning, DomainError
from eit_secrecy.core.pool import ordered_map
from eit_secrecy.eit import EitSystem, PerturbationStrategy, eit_system, max_valid_epsilon, random_directions
from eit_secrecy.probability import Pmf, TransitionMatrix, mutual_information
from eit_secrecy.spectral import pencil_spectrum

logger = logging.getLogger(__name__)


class ExactMi(NamedTuple):
    iux: float
    iuy: float
    iuz: float


def exact_strategy_mi(wc: WiretapChannel, s: PerturbationStrategy) -> ExactMi:
    """联合分布 P_U(u)·P_{X|U}(x|u)·信道 下的精确 I(U;X)、I(U;Y)、I(U;Z)，单位 nats。"""
    if s.px.size != wc.nx:
        raise DomainError(f"strategy lives on |X|={s.px.size} but the channel has |X|={wc.nx}")
    pxu = s.conditionals()
    return ExactMi(
        iux=mutual_information(s.pu, TransitionMatrix(pxu)),
        iuy=mutual_information(s.pu, TransitionMatrix(wc.bob.entries @ pxu)),
        iuz=mutual_information(s.pu, TransitionMatrix(wc.eve.entries @ pxu)),
    )


@dataclass(frozen=True)
class IbCurvePoint:
    rate: float
    utility: float
    beta: float
    converged: bool = True
    iterations: int = 0


def _ib_fixed_point(
    log_px: np.ndarray,
    w: np.ndarray,
    beta: float,
    card_u: int,
    rng: np.random.Generator,
    tol: float,
    max_iters: int,
) -> tuple[np.ndarray, bool, int]:
    """
    log 域的 IB 自洽迭代。q[x, u] = log P(u|x)，w[y, x] = P(y|x)。
    收敛判据：Σ_x P_X(x)·D(q_new(·|x) ‖ q(·|x)) < tol。
    """
    px = np.exp(log_px)
    q = np.log(np.maximum(rng.dirichlet(np.ones(card_u), size=px.size), 1e-300))
    for it in range(1, max_iters + 1):
        joint = np.exp(q + log_px[:, None])            # P(x, u)
        pu = joint.sum(axis=0)
        alive = pu > 1e-300
        pyu = np.where(alive, (w @ joint) / np.where(alive, pu, 1.0), (w @ px)[:, None])
        # D(P(·|x) ‖ P(·|u))，形状 |X|×|U|
        div = np.sum(rel_entr(w[:, :, None], pyu[:, None, :]), axis=0)
        log_pu = np.log(np.where(alive, pu, 1e-300))
        logits = log_pu[None, :] - beta * div
        q_new = logits - logsumexp(logits, axis=1, keepdims=True)
        change = float(px @ np.sum(np.exp(q_new) * (q_new - q), axis=1))
        q = q_new
        if change < tol:
            return q, True, it
    return q, False, max_iters


def _ib_point(px: Pmf, ch: TransitionMatrix, q: np.ndarray, beta: float, converged: bool, iters: int) -> IbCurvePoint:
    enc = np.exp(q)
    enc /= enc.sum(axis=1, keepdims=True)
    rate = mutual_information(px, TransitionMatrix(enc.T))
    joint = enc * px.probs[:, None]
    pu = Pmf.renormalized(joint.sum(axis=0))
    alive = pu.probs > 0
    pyu = ch.entries @ joint[:, alive] / pu.probs[alive]
    pyu /= pyu.sum(axis=0, keepdims=True)
    utility = mutual_information(Pmf.renormalized(pu.probs[alive]), TransitionMatrix(pyu))
    return IbCurvePoint(rate=rate, utility=utility, beta=beta, converged=converged, iterations=iters)


def blahut_arimoto_ib(
    px: Pmf,
    ch: TransitionMatrix,
    beta_grid,
    card_u: int,
    seed: int = 0,
    tol: float = 1e-12,
    max_iters: int = 20000,
    restarts: int = 4,
    workers: int = 1,
) -> list[IbCurvePoint]:
    """
    对每个 β 做若干次 Dirichlet(1) 随机初始化的 IB 迭代，保留效用最大的那次。
    未收敛的点保留并标记 converged=False。结果按 rate 升序。
    """
    betas = [float(b) for b in beta_grid]
    if not betas or any(b <= 0 for b in betas):
        raise DomainError(f"beta grid must be non-empty and positive, got {beta_grid!r}")
    if card_u < 2:
        raise DomainError(f"need |U| >= 2, got {card_u}")
    if ch.n_inputs != px.size:
        raise DomainError(f"channel has {ch.n_inputs} inputs but |X|={px.size}")

    with np.errstate(divide="ignore"):
        log_px = np.log(px.probs)
    w = ch.entries
    children = np.random.SeedSequence(seed).spawn(len(betas))

    def solve(task: tuple[float, np.random.SeedSequence]) -> IbCurvePoint:
        beta, child = task
        rng = np.random.default_rng(child)
        best = None
        for _ in range(restarts):
            q, ok, iters = _ib_fixed_point(log_px, w, beta, card_u, rng, tol, max_iters)
            point = _ib_point(px, ch, q, beta, ok, iters)
            if best is None or point.utility > best.utility:
                best = point
        if not best.converged:
            logger.debug("IB iteration at β=%g hit the %d-iteration cap", beta, max_iters)
        return best

    logger.info("🚀 Blahut–Arimoto IB over %d β values (|U|=%d)", len(betas), card_u)
    points = ordered_map(solve, list(zip(betas, children)), workers)
    missing = [pt.beta for pt in points if not pt.converged]
    if missing:
        logger.warning("⚠️ IB did not converge for β in %s", missing)
        warnings.warn(f"IB did not converge for β in {missing}", ConvergenceWarning, stacklevel=2)
    return sorted(points, key=lambda pt: (pt.rate, pt.beta))


@dataclass(frozen=True)
class GlobalContraction:
    eta_glo_lower_bound: float
    eta_loc: float
    upper_bound: float
    ratios: np.ndarray

    @property
    def within_bound(self) -> bool:
        return bool(np.all(self.ratios <= self.upper_bound * (1.0 + 1e-12)))


def mc_global_contraction(
    wc: WiretapChannel,
    n_samples: int,
    eps_grid,
    seed: int = 0,
    include_principal: bool = True,
) -> GlobalContraction:
    """
    随机可行策略（S⊥ 上均匀方向的对称消息对）的精确 I(U;Y)/I(U;Z) 的最大值，
    作为 η_glo 的下界；同时给出 η_loc 与上界 (2/P_min)·η_loc。
    """
    if n_samples < 1:
        raise DomainError(f"need at least one sample, got {n_samples}")
    eps_grid = np.asarray(list(eps_grid), dtype=float)
    if eps_grid.size == 0 or np.any(eps_grid <= 0):
        raise DomainError("epsilon grid must be non-empty and positive")

    sys = eit_system(wc)
    spec = pencil_spectrum(sys)
    rng = np.random.default_rng(seed)
    directions = random_directions(sys, n_samples, rng)
    epsilons = rng.choice(eps_grid, size=n_samples)
    if include_principal:
        principal = spec.modes[:, 0] / np.linalg.norm(spec.modes[:, 0])
        directions = np.column_stack([principal, directions])
        epsilons = np.concatenate([[eps_grid.min()], epsilons])

    ratios = []
    for k in range(directions.shape[1]):
        d = directions[:, k]
        eps = min(float(epsilons[k]), 0.99 * max_valid_epsilon(sys.px, np.column_stack([d, -d])), 1.0)
        mi = exact_strategy_mi(wc, PerturbationStrategy.antipodal(sys.px, d, eps))
        if mi.iuz > 1e-15:
            ratios.append(mi.iuy / mi.iuz)
    if not ratios:
        raise DomainError("every sampled strategy had zero leakage; the ratio is undefined")

    ratios = np.array(ratios)
    eta = spec.d_max
    result = GlobalContraction(
        eta_glo_lower_bound=float(ratios.max()),
        eta_loc=eta,
        upper_bound=2.0 / sys.px.min_prob * eta,
        ratios=ratios,
    )
    if not result.within_bound:
        logger.error("❌ sampled ratio %.6g exceeds (2/P_min)·η_loc = %.6g", ratios.max(), result.upper_bound)
    return result


@dataclass(frozen=True)
class LeakageSamples:
    leakage: np.ndarray
    utility: np.ndarray
    eta_loc: float

    @property
    def ratios(self) -> np.ndarray:
        return self.utility / self.leakage


def utility_leakage_samples(sys: EitSystem, n: int, seed: int = 0, epsilon: float = 0.1) -> LeakageSamples:
    """
    二次近似下的 (泄露, 效用) 样本：(ε²/2)·LᵀΛL 与 (ε²/2)·LᵀVL，L 为 S⊥ 上的单位方向。
    第一个样本是主广义特征方向。
    """
    if n < 1:
        raise DomainError(f"need at least one sample, got {n}")
    spec = pencil_spectrum(sys)
    principal = spec.modes[:, :1] / np.linalg.norm(spec.modes[:, 0])
    rng = np.random.default_rng(seed)
    l = np.column_stack([principal, random_directions(sys, n - 1, rng)]) if n > 1 else principal
    scale = 0.5 * epsilon**2
    return LeakageSamples(
        leakage=scale * np.einsum("xn,xy,yn->n", l, sys.lam, l),
        utility=scale * np.einsum("xn,xy,yn->n", l, sys.v, l),
        eta_loc=spec.d_max,
    )
