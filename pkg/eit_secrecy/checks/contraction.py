# checks/contraction.py
"""
保密局部收缩系数：BSWC 闭式解、二次近似下的效用 ≤ η·泄露、
精确比值的 Monte Carlo 夹逼，以及 BSWC 上 η_loc 与 (2/P_min)·η_loc 的包络表。
"""
import numpy as np
from pydantic import BaseModel

from eit_secrecy.baselines import mc_global_contraction, utility_leakage_samples
from eit_secrecy.channels import WiretapChannel, bswc
from eit_secrecy.checks.base_check import BaseCheck, CheckCriterion, CheckReport
from eit_secrecy.eit import eit_system
from eit_secrecy.probability import Pmf, TransitionMatrix
from eit_secrecy.spectral import eta_loc_sec

GRID = [round(0.05 * k, 2) for k in range(1, 10)]


def ternary_channel(mix: float = 0.995) -> WiretapChannel:
    """|X|=3、P_X=[0.4,0.3,0.3]，Eve 是 Bob 的轻微退化版本，η_loc 接近 1。"""
    bob = np.array([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]])
    blur = mix * np.eye(3) + (1.0 - mix) / 3.0
    return WiretapChannel(px=Pmf(np.array([0.4, 0.3, 0.3])), bob=TransitionMatrix(bob), eve=TransitionMatrix(blur @ bob))


class ContractionParams(BaseModel):
    p_grid: list[float] = GRID
    q_grid: list[float] = GRID
    bound_q: list[float] = [0.1, 0.25, 0.4]
    bound_points: int = 46
    p_bob: float = 0.1
    q_eve: float = 0.25
    n_quadratic: int = 10000
    n_mc: int = 10000
    eps_grid: list[float] = [0.01, 0.02, 0.05]
    seed: int = 0


class ContractionCheck(BaseCheck):
    Params = ContractionParams

    @property
    def name(self) -> str:
        return "contraction"

    @property
    def display_name(self) -> str:
        return "保密收缩系数与全局夹逼"

    @property
    def description(self) -> str:
        return "η_loc 的 BSWC 闭式解、二次层面的效用/泄露上界、精确比值的 (2/P_min)·η_loc 上界。"

    def run(self, params=None) -> CheckReport:
        p = self.parse_params(params)

        closed_form_gap = 0.0
        for pb in p.p_grid:
            for qe in p.q_grid:
                expected = (1 - 2 * pb) ** 2 / (1 - 2 * qe) ** 2
                closed_form_gap = max(closed_form_gap, abs(eta_loc_sec(eit_system(bswc(pb, qe))) - expected))

        rows = []
        worst_violation = 0.0
        worst_equality = 0.0
        for label, wc in (("bswc", bswc(p.p_bob, p.q_eve)), ("ternary", ternary_channel())):
            samples = utility_leakage_samples(eit_system(wc), p.n_quadratic, seed=p.seed)
            excess = samples.utility - samples.eta_loc * samples.leakage
            worst_violation = max(worst_violation, float(excess.max()))
            worst_equality = max(worst_equality, abs(samples.ratios[0] - samples.eta_loc) / samples.eta_loc)
            ratios = samples.ratios
            rows.append({
                "channel": label, "eta_loc": samples.eta_loc, "samples": ratios.size,
                "ratio_min": float(ratios.min()), "ratio_median": float(np.median(ratios)),
                "ratio_max": float(ratios.max()), "principal_ratio": float(ratios[0]),
            })

        mc = mc_global_contraction(bswc(p.p_bob, p.q_eve), p.n_mc, p.eps_grid, seed=p.seed)
        bounds = []
        for qe in p.bound_q:
            for pb in np.linspace(0.0, 0.45, p.bound_points):
                eta = eta_loc_sec(eit_system(bswc(float(pb), qe)))
                bounds.append({"q_eve": qe, "p_bob": float(pb), "eta_loc": eta, "upper": 4.0 * eta})

        criteria = [
            CheckCriterion(
                name="bswc_closed_form",
                passed=bool(closed_form_gap <= 1e-10),
                detail=f"max |η_loc − (1−2p)²/(1−2q)²| = {closed_form_gap:.3e}",
            ),
            CheckCriterion(
                name="quadratic_bound",
                passed=bool(worst_violation <= 1e-12 and worst_equality <= 1e-9),
                detail=f"max(utility − η·leakage) = {worst_violation:.3e}, principal-mode gap = {worst_equality:.3e}",
            ),
            CheckCriterion(
                name="global_sandwich",
                passed=bool(mc.within_bound and mc.eta_glo_lower_bound >= mc.eta_loc - 1e-3),
                detail=(
                    f"sampled max {mc.eta_glo_lower_bound:.6f}, η_loc {mc.eta_loc:.6f}, "
                    f"upper bound {mc.upper_bound:.6f}"
                ),
            ),
        ]
        return CheckReport(name=self.name, rows=rows, tables={"bounds": bounds}, criteria=criteria)
