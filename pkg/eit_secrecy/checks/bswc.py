# checks/bswc.py
from pydantic import BaseModel

from eit_secrecy.capacity import LpForm, approximate_secrecy_capacity, bswc_c_sic, build_lp, solve_lp
from eit_secrecy.channels import bswc
from eit_secrecy.checks.base_check import BaseCheck, CheckCriterion, CheckReport
from eit_secrecy.eit import eit_system
from eit_secrecy.spectral import pencil_spectrum

GRID = [round(0.05 * k, 2) for k in range(1, 10)]


class BswcParams(BaseModel):
    p_grid: list[float] = GRID
    q_grid: list[float] = GRID
    ratios: list[float] = [round(0.01 * k, 2) for k in range(1, 101)]
    budgets: list[float] = [0.1, 0.5, 1.0]
    tol: float = 1e-12
    knee_p: float = 0.1
    knee_q: float = 0.25
    knee_r: float = 0.5
    tiny_theta: float = 1e-12


class BswcClosedFormCheck(BaseCheck):
    Params = BswcParams

    @property
    def name(self) -> str:
        return "bswc"

    @property
    def display_name(self) -> str:
        return "BSWC 闭式解、拐点与完美保密极限"

    @property
    def description(self) -> str:
        return "DualMin LP 与分段闭式解逐点一致；Θ/R 扫描的斜率、饱和值与拐点；Θ → 0 与 q = 0.5 两种极限。"

    def run(self, params=None) -> CheckReport:
        p = self.parse_params(params)
        rows = []
        worst = 0.0
        for pb in p.p_grid:
            for qe in p.q_grid:
                spec = pencil_spectrum(eit_system(bswc(pb, qe)))
                for r in p.budgets:
                    for ratio in p.ratios:
                        lp_value = solve_lp(build_lp(spec, r, ratio * r), LpForm.DUAL_MIN).value
                        closed = bswc_c_sic(pb, qe, r, ratio * r)
                        worst = max(worst, abs(lp_value - closed))
                        rows.append({"p_bob": pb, "q_eve": qe, "r": r, "ratio": ratio, "lp": lp_value, "closed_form": closed})

        # Θ/R 扫描：初始斜率 d_max，饱和值 λmax⊥(V)，拐点 λmax⊥(V)/d_max
        spec = pencil_spectrum(eit_system(bswc(p.knee_p, p.knee_q)))
        lo = solve_lp(build_lp(spec, p.knee_r, 1e-3 * p.knee_r), LpForm.DUAL_MIN)
        hi = solve_lp(build_lp(spec, p.knee_r, 10.0 * p.knee_r), LpForm.DUAL_MIN)
        slope = lo.value / (1e-3 * p.knee_r)
        plateau = hi.value / p.knee_r
        knee = plateau / slope
        expected_knee = (1 - 2 * p.knee_q) ** 2

        tiny = [
            solve_lp(build_lp(pencil_spectrum(eit_system(bswc(pb, qe))), 0.5, p.tiny_theta), LpForm.DUAL_MIN).value
            for pb in p.p_grid
            for qe in p.q_grid
        ]
        useless_eve = [
            abs(approximate_secrecy_capacity(eit_system(bswc(pb, 0.5)), 0.5, theta).value - (1 - 2 * pb) ** 2 * 0.5)
            for pb in p.p_grid
            for theta in (p.tiny_theta, 0.05, 1.0)
        ]

        criteria = [
            CheckCriterion(
                name="closed_form_equivalence",
                passed=bool(worst <= p.tol),
                detail=f"max |LP − closed form| = {worst:.3e} over {len(rows)} points",
            ),
            CheckCriterion(
                name="regime_structure",
                passed=bool(
                    abs(slope - spec.d_max) <= 1e-6
                    and abs(plateau - spec.lam_max_perp_v) <= 1e-6
                    and abs(knee - expected_knee) <= 1e-9
                ),
                detail=f"slope {slope:.9f}, plateau {plateau:.9f}, knee Θ/R = {knee:.12f} (expected {expected_knee:.12f})",
            ),
            CheckCriterion(
                name="perfect_secrecy_limit",
                passed=bool(max(tiny) <= 1e-10 and max(useless_eve) <= 1e-12),
                detail=f"max C_SIC at Θ={p.tiny_theta:g}: {max(tiny):.3e}; q=0.5 deviation from λ_V·R: {max(useless_eve):.3e}",
            ),
        ]
        return CheckReport(name=self.name, rows=rows, criteria=criteria)
