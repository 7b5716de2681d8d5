# checks/kkt.py
import numpy as np
from pydantic import BaseModel

from eit_secrecy.capacity import LpForm, build_lp, kkt_commuting_check, solve_lp
from eit_secrecy.channels import bswc
from eit_secrecy.checks.base_check import BaseCheck, CheckCriterion, CheckReport
from eit_secrecy.eit import eit_system
from eit_secrecy.spectral import pencil_spectrum


class KktParams(BaseModel):
    q_eve: float = 0.25
    r: float = 0.5
    theta: float = 0.05
    p_min: float = 0.0
    p_max: float = 0.45
    n_points: int = 46
    tol: float = 1e-9


class KktIdentityCheck(BaseCheck):
    Params = KktParams

    @property
    def name(self) -> str:
        return "kkt"

    @property
    def display_name(self) -> str:
        return "BSWC 上的 KKT 特征值恒等式"

    @property
    def description(self) -> str:
        return "沿 p_bob 扫描 BSWC，检查 DualMin 解满足 λ_V = ρ* + ν*·λ_Λ。"

    def run(self, params=None) -> CheckReport:
        p = self.parse_params(params)
        rows = []
        worst = 0.0
        for p_bob in np.linspace(p.p_min, p.p_max, p.n_points):
            spec = pencil_spectrum(eit_system(bswc(float(p_bob), p.q_eve)))
            sol = solve_lp(build_lp(spec, p.r, p.theta), LpForm.DUAL_MIN)
            check = kkt_commuting_check(spec, sol, p.tol)
            lam_l = float(spec.lam[0])
            worst = max(worst, check.max_residual)
            rows.append({
                "p_bob": float(p_bob), "c_sic": sol.value, "rho": sol.rho, "nu": sol.nu,
                "lam_v": float(spec.d[0] * lam_l), "rho_plus_nu_lam": sol.rho + sol.nu * lam_l,
                "regime": sol.regime.value, "residual": check.max_residual,
            })
        criteria = [
            CheckCriterion(
                name="kkt_identity",
                passed=bool(worst <= p.tol),
                detail=f"max |λ_V − ρ* − ν*λ_Λ| = {worst:.3e} over {len(rows)} points",
            )
        ]
        return CheckReport(name=self.name, rows=rows, criteria=criteria)
