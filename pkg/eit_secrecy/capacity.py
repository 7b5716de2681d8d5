# capacity.py
"""
乘子 LP、可行性判据、工作区间分析、C_SIC、BSWC 闭式解与 KKT 恒等式检查。

LP 只有两个变量 (ρ, ν)，主求解器对所有约束对做顶点枚举；
exhaustive_vertex_search 是独立写成的校验实现，scipy_lp_value 给出通用 LP 求解器的结果。
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import linalg, optimize

from eit_secrecy.channels import quantized_awgn_wiretap
from eit_secrecy.core.errors import DomainError, InfeasibleLpError, NonCommutingError, SingularPencilError
from eit_secrecy.eit import EitSystem, eit_system
from eit_secrecy.spectral import PencilSpectrum, pencil_spectrum, restrict, sym_eig

logger = logging.getLogger(__name__)

ACTIVE_TOL = 1e-9
CLAMP_TOL = 1e-12
REGIME_TOL = 1e-12
KKT_TOL = 1e-9


class LpForm(str, Enum):
    PAPER_LITERAL_MAX = "PaperLiteralMax"
    DUAL_MIN = "DualMin"
    LMI_DUAL = "LmiDual"


class Regime(str, Enum):
    RATE_DOMINANT = "RateDominant"
    LEAKAGE_DOMINANT = "LeakageDominant"
    INTERMEDIATE = "Intermediate"


@dataclass(frozen=True)
class LpProblem:
    r: float
    theta: float
    d: np.ndarray
    lam: np.ndarray
    c_max: float

    def __post_init__(self):
        if not (self.r > 0 and self.theta > 0):
            raise DomainError(f"budgets must be positive, got R={self.r!r}, Θ={self.theta!r}")
        if self.d.size < 1 or self.d.shape != self.lam.shape:
            raise DomainError(f"need matching non-empty mode data, got {self.d.shape} and {self.lam.shape}")
        if np.any(self.lam <= 0):
            raise DomainError(f"companion values must be positive, min {self.lam.min():.3e}")

    @property
    def n_modes(self) -> int:
        return self.d.size


@dataclass(frozen=True)
class LpSolution:
    rho: float
    nu: float
    value: float
    active_modes: tuple[int, ...]
    form: LpForm
    r: float
    theta: float

    @property
    def regime(self) -> Regime:
        # 原点两者皆为 0，按速率主导处理
        if self.nu < REGIME_TOL:
            return Regime.RATE_DOMINANT
        if self.rho < REGIME_TOL:
            return Regime.LEAKAGE_DOMINANT
        return Regime.INTERMEDIATE


def build_lp(spec: PencilSpectrum, r: float, theta: float) -> LpProblem:
    return LpProblem(
        r=float(r),
        theta=float(theta),
        d=np.array(spec.d, dtype=float),
        lam=np.array(spec.lam, dtype=float),
        c_max=spec.lam_max_perp_v * float(r),
    )


def _constraint_lines(lp: LpProblem, form: LpForm) -> list[tuple[float, float, float]]:
    """每条约束写成 a·ρ + b·ν ≥ c。"""
    lines = [(1.0, float(lam), float(d * lam)) for d, lam in zip(lp.d, lp.lam)]
    lines += [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]
    if form is LpForm.PAPER_LITERAL_MAX:
        lines.append((-lp.r, -lp.theta, -lp.c_max))
    return lines


def _intersect(p: tuple[float, float, float], q: tuple[float, float, float]) -> tuple[float, float] | None:
    a1, b1, c1 = p
    a2, b2, c2 = q
    det = a1 * b2 - a2 * b1
    scale = max(abs(a1), abs(b1), 1.0) * max(abs(a2), abs(b2), 1.0)
    if abs(det) <= 1e-14 * scale:
        return None
    return (c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det


def _vertices(lp: LpProblem, form: LpForm) -> list[tuple[float, float]]:
    lines = _constraint_lines(lp, form)
    found = []
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            point = _intersect(lines[i], lines[j])
            if point is None:
                continue
            rho, nu = point
            if rho < -CLAMP_TOL or nu < -CLAMP_TOL:
                continue
            rho, nu = max(rho, 0.0), max(nu, 0.0)
            if all(a * rho + b * nu >= c - ACTIVE_TOL for a, b, c in lines):
                found.append((rho, nu))
    return found


def active_modes(lp: LpProblem, rho: float, nu: float) -> tuple[int, ...]:
    slack = rho + nu * lp.lam - lp.d * lp.lam
    return tuple(int(j) for j in np.flatnonzero(np.abs(slack) <= ACTIVE_TOL))


def solve_lp(lp: LpProblem, form: LpForm = LpForm.DUAL_MIN) -> LpSolution:
    """
    两变量 LP 的顶点枚举。
    DualMin：min ρR+νΘ；PaperLiteralMax：max ρR+νΘ，并附加 ρR+νΘ ≤ C_max。
    最优顶点并列时取字典序最小的 (ρ, ν)。
    """
    if form is LpForm.LMI_DUAL:
        raise DomainError("the LMI dual needs the EIT system; use lmi_dual()")
    vertices = _vertices(lp, form)
    if not vertices:
        raise InfeasibleLpError(
            f"multiplier LP ({form.value}) is infeasible for R={lp.r:g}, Θ={lp.theta:g}: "
            f"need λmax⊥(V)·R = {lp.c_max:.6g} > Θ·d_max = {lp.theta * float(lp.d.max()):.6g}"
        )
    values = [rho * lp.r + nu * lp.theta for rho, nu in vertices]
    best = min(values) if form is LpForm.DUAL_MIN else max(values)
    tol = 1e-12 * max(1.0, abs(best))
    rho, nu = min(v for v, val in zip(vertices, values) if abs(val - best) <= tol)
    return LpSolution(
        rho=rho,
        nu=nu,
        value=rho * lp.r + nu * lp.theta,
        active_modes=active_modes(lp, rho, nu),
        form=form,
        r=lp.r,
        theta=lp.theta,
    )


def exhaustive_vertex_search(lp: LpProblem, form: LpForm = LpForm.DUAL_MIN) -> tuple[float, float, float]:
    """
    校验用的穷举：把全部约束写成 G·x ≥ h，逐对求解 2×2 方程组并筛选可行点。
    返回 (value, rho, nu)。
    """
    g = [[1.0, lam] for lam in lp.lam] + [[1.0, 0.0], [0.0, 1.0]]
    h = [d * lam for d, lam in zip(lp.d, lp.lam)] + [0.0, 0.0]
    if form is LpForm.PAPER_LITERAL_MAX:
        g.append([-lp.r, -lp.theta])
        h.append(-lp.c_max)
    g, h = np.array(g), np.array(h)
    objective = np.array([lp.r, lp.theta])

    best = None
    for i, j in itertools.combinations(range(len(h)), 2):
        sub = g[[i, j]]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, h[[i, j]])
        if np.any(x < -1e-12) or np.any(g @ x < h - 1e-9):
            continue
        x = np.maximum(x, 0.0)
        value = float(objective @ x)
        better = best is None or (value < best[0] if form is LpForm.DUAL_MIN else value > best[0])
        if better:
            best = (value, float(x[0]), float(x[1]))
    if best is None:
        raise InfeasibleLpError(f"no feasible vertex for the {form.value} LP")
    return best


def scipy_lp_value(lp: LpProblem, form: LpForm = LpForm.DUAL_MIN) -> float:
    """同一个 LP 交给 scipy.optimize.linprog (HiGHS) 求解。"""
    a_ub = -np.column_stack([np.ones_like(lp.lam), lp.lam])
    b_ub = -(lp.d * lp.lam)
    c = np.array([lp.r, lp.theta])
    if form is LpForm.PAPER_LITERAL_MAX:
        a_ub = np.vstack([a_ub, c])
        b_ub = np.append(b_ub, lp.c_max)
        c = -c
    res = optimize.linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(0, None), (0, None)], method="highs")
    if res.status == 2:
        raise InfeasibleLpError(f"linprog reports the {form.value} LP infeasible")
    if res.status != 0:
        raise InfeasibleLpError(f"linprog failed on the {form.value} LP: {res.message}")
    return float(res.fun) if form is LpForm.DUAL_MIN else -float(res.fun)


def feasibility_check(spec: PencilSpectrum, r: float, theta: float) -> bool:
    """λmax⊥(V)·R > Θ·d_max 严格成立。"""
    return spec.lam_max_perp_v * r > theta * spec.d_max


def c_sic(sol: LpSolution) -> float:
    return sol.rho * sol.r + sol.nu * sol.theta


def lmi_dual(sys: EitSystem, r: float, theta: float) -> LpSolution:
    """
    二次问题的精确对偶：min ρR+νΘ  s.t. ρI + νΛ − V ⪰ 0 (在 S⊥ 上), ρ, ν ≥ 0。
    对固定 ν 最优 ρ = max(0, λmax⊥(V − νΛ))，剩下关于 ν 的一维凸问题。
    Λ⊥ 奇异时同样适用。
    """
    if not (r > 0 and theta > 0):
        raise DomainError(f"budgets must be positive, got R={r!r}, Θ={theta!r}")
    v_perp = restrict(sys.v, sys.basis)
    l_perp = restrict(sys.lam, sys.basis)
    lam_max = float(sym_eig(v_perp)[0][0])

    def rho_at(nu: float) -> float:
        return max(0.0, float(sym_eig(v_perp - nu * l_perp)[0][0]))

    def objective(nu: float) -> float:
        return rho_at(nu) * r + nu * theta

    upper = lam_max * r / theta
    l_eigs = sym_eig(l_perp)[0]
    if l_eigs.size and l_eigs.min() > 1e-12:
        # ν ≥ d_max 时 ρ = 0，再往右只会变大
        upper = min(upper, float(linalg.eigh(v_perp, l_perp, eigvals_only=True)[-1]))
    upper = max(upper, 0.0)

    candidates = [0.0, upper]
    if upper > 0.0:
        res = optimize.minimize_scalar(
            objective, bounds=(0.0, upper), method="bounded",
            options={"xatol": 1e-13 * max(1.0, upper), "maxiter": 2000},
        )
        candidates.append(float(res.x))
    values = [objective(nu) for nu in candidates]
    best = min(values)
    nu = min(nu for nu, val in zip(candidates, values) if val <= best + 1e-15 * max(1.0, abs(best)))
    rho = rho_at(nu)
    return LpSolution(
        rho=rho, nu=nu, value=rho * r + nu * theta, active_modes=(), form=LpForm.LMI_DUAL, r=float(r), theta=float(theta)
    )


def approximate_secrecy_capacity(
    sys: EitSystem, r: float, theta: float, form: LpForm = LpForm.DUAL_MIN
) -> LpSolution:
    """谱分解 → 建 LP → 求解；矩阵束奇异时退回 LMI 对偶。"""
    if form is LpForm.LMI_DUAL:
        return lmi_dual(sys, r, theta)
    try:
        spec = pencil_spectrum(sys)
    except SingularPencilError as e:
        logger.warning("⚠️ %s; falling back to the LMI dual", e)
        return lmi_dual(sys, r, theta)
    return solve_lp(build_lp(spec, r, theta), form)


def eve_quantization_sweep(
    nz_values,
    eve_snrs_db,
    nx: int = 8,
    ny: int = 8,
    bob_db: float = 8.0,
    r: float = 0.5,
    theta: float = 0.1,
    form: LpForm = LpForm.LMI_DUAL,
) -> list[dict]:
    """C_SIC 随 Eve 的 Eb/N0 与量化级数 |Z| 的变化；|Z| < |X| 时矩阵束奇异，走 LMI 对偶。"""
    rows = []
    for nz in nz_values:
        for eve_db in eve_snrs_db:
            sys = eit_system(quantized_awgn_wiretap(nx, ny, int(nz), bob_db, float(eve_db)))
            sol = approximate_secrecy_capacity(sys, r, theta, form)
            rows.append({
                "nz": int(nz), "eve_db": float(eve_db), "rho": sol.rho, "nu": sol.nu,
                "value": sol.value, "regime": sol.regime.value, "form": sol.form.value,
            })
    return rows


@dataclass(frozen=True)
class RegimeReport:
    c_rate: float
    c_leak: float
    c_inter: float
    interior_vertices: list[tuple[float, float]] = field(default_factory=list)
    dual_min: LpSolution | None = None
    paper_literal: LpSolution | None = None

    @property
    def c_sic_max(self) -> float:
        return max(self.c_rate, self.c_leak, self.c_inter)


def interior_vertices(lp: LpProblem) -> list[tuple[float, float]]:
    """
    两条模态约束线或一条模态线与 C_max 线的交点中，ρ>0、ν>0、满足全部模态约束
    且 ρR+νΘ ≤ C_max 的那些。
    """
    modes = [(1.0, float(lam), float(d * lam)) for d, lam in zip(lp.d, lp.lam)]
    cap = (lp.r, lp.theta, lp.c_max)
    pairs = list(itertools.combinations(modes, 2)) + [(m, cap) for m in modes]
    out = []
    for p, q in pairs:
        point = _intersect(p, q)
        if point is None:
            continue
        rho, nu = point
        if rho <= REGIME_TOL or nu <= REGIME_TOL:
            continue
        if any(rho + lam * nu < c - ACTIVE_TOL for _, lam, c in modes):
            continue
        if rho * lp.r + nu * lp.theta > lp.c_max + ACTIVE_TOL:
            continue
        out.append((rho, nu))
    return sorted(set(out))


def regime_report(lp: LpProblem, spec: PencilSpectrum) -> RegimeReport:
    """三类候选容量 C_R、C_Θ、C_inter，以及两种 LP 形式下的分类。"""
    inner = interior_vertices(lp)
    c_inter = max((rho * lp.r + nu * lp.theta for rho, nu in inner), default=-math.inf)
    try:
        literal = solve_lp(lp, LpForm.PAPER_LITERAL_MAX)
    except InfeasibleLpError as e:
        logger.info("PaperLiteralMax infeasible: %s", e)
        literal = None
    return RegimeReport(
        c_rate=min(spec.lam_max_perp_v * lp.r, lp.c_max),
        c_leak=min(spec.d_max * lp.theta, lp.c_max),
        c_inter=c_inter,
        interior_vertices=inner,
        dual_min=solve_lp(lp, LpForm.DUAL_MIN),
        paper_literal=literal,
    )


def bswc_c_sic(p_bob: float, q_eve: float, r: float, theta: float) -> float:
    """BSWC 的分段闭式解。"""
    for label, value in (("p_bob", p_bob), ("q_eve", q_eve)):
        if not (0.0 <= value <= 1.0):
            raise DomainError(f"{label} must lie in [0, 1], got {value!r}")
    if not (r > 0 and theta >= 0):
        raise DomainError(f"need R > 0 and Θ >= 0, got R={r!r}, Θ={theta!r}")
    lam_v = (1.0 - 2.0 * p_bob) ** 2
    lam_l = (1.0 - 2.0 * q_eve) ** 2
    if lam_l == 0.0 or lam_l <= theta / r:
        return lam_v * r
    return lam_v / lam_l * theta


@dataclass(frozen=True)
class KktCheck:
    modes: tuple[int, ...]
    residuals: np.ndarray
    tol: float = KKT_TOL

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def kkt_commuting_check(spec: PencilSpectrum, sol: LpSolution, tol: float = KKT_TOL) -> KktCheck:
    """可交换情形下逐个活跃模态计算 |(d_V)_j − ρ* − ν*(d_Λ)_j|，其中 (d_V)_j = d_j·λ_j。"""
    if not spec.commuting:
        raise NonCommutingError(
            "KKT eigenvalue identity only holds when V and Λ commute; "
            "use primal.kkt_alignment on a primal solution instead"
        )
    modes = sol.active_modes
    idx = np.array(modes, dtype=int)
    residuals = np.abs(spec.d[idx] * spec.lam[idx] - sol.rho - sol.nu * spec.lam[idx])
    return KktCheck(modes=modes, residuals=residuals, tol=tol)
