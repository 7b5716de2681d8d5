# checks/ib.py
"""BSC 上的信息瓶颈曲线（Blahut–Arimoto）与 EIT-IB 直线的比较。"""
import math

from pydantic import BaseModel

from eit_secrecy.baselines import blahut_arimoto_ib
from eit_secrecy.channels import bsc
from eit_secrecy.checks.base_check import BaseCheck, CheckCriterion, CheckReport
from eit_secrecy.core.settings import get_settings
from eit_secrecy.eit import dtm
from eit_secrecy.probability import Pmf, mutual_information, to_units
from eit_secrecy.spectral import contraction_coefficient

# β_c = 1/(1−2p)² = 1.5625，网格在它之上加密
DEFAULT_BETAS = [1.0, 1.5, 1.57, 1.58, 1.6, 1.65, 1.7, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1000.0]


class IbParams(BaseModel):
    crossover: float = 0.1
    card_u: int = 2
    betas: list[float] = DEFAULT_BETAS
    seed: int = 0
    tol: float = 1e-12
    max_iters: int = 20000
    restarts: int = 4
    min_rate: float = 1e-3
    slope_tol: float = 0.01
    saturation_tol_bits: float = 1e-3
    units: str = "bits"


class InformationBottleneckCheck(BaseCheck):
    Params = IbParams

    @property
    def name(self) -> str:
        return "ib"

    @property
    def display_name(self) -> str:
        return "IB 曲线 vs EIT-IB"

    @property
    def description(self) -> str:
        return "BSC 均匀输入下的 IB 曲线：饱和值等于 I(X;Y)，小速率斜率等于 σ₂²(B)。"

    def run(self, params=None) -> CheckReport:
        p = self.parse_params(params)
        px = Pmf.uniform(2)
        ch = bsc(p.crossover)
        eta = contraction_coefficient(dtm(ch, px))
        i_xy = mutual_information(px, ch)

        points = blahut_arimoto_ib(
            px, ch, p.betas, p.card_u, seed=p.seed, tol=p.tol, max_iters=p.max_iters,
            restarts=p.restarts, workers=get_settings().workers,
        )
        rows = [
            {
                "beta": pt.beta, "rate": to_units(pt.rate, p.units), "utility": to_units(pt.utility, p.units),
                "eit_utility": to_units(min(eta * pt.rate, i_xy), p.units),
                "converged": pt.converged, "iterations": pt.iterations,
            }
            for pt in points
        ]

        good = [pt for pt in points if pt.converged]
        informative = [pt for pt in good if pt.rate > p.min_rate]
        slope = informative[0].utility / informative[0].rate if informative else math.nan
        top = max((pt.utility for pt in good), default=math.nan)
        saturation_gap = abs(to_units(top, "bits") - to_units(i_xy, "bits"))

        slopes = [
            (b.utility - a.utility) / (b.rate - a.rate)
            for a, b in zip(good, good[1:])
            if b.rate - a.rate > 1e-9
        ]
        concave = all(s2 <= s1 + 1e-6 for s1, s2 in zip(slopes, slopes[1:]))
        monotone = all(b.utility >= a.utility - 1e-9 for a, b in zip(good, good[1:]))

        criteria = [
            CheckCriterion(
                name="saturation",
                passed=bool(saturation_gap <= p.saturation_tol_bits),
                detail=f"max utility {to_units(top, 'bits'):.6f} bits vs I(X;Y) = {to_units(i_xy, 'bits'):.6f} bits",
            ),
            CheckCriterion(
                name="small_rate_slope",
                passed=bool(abs(slope - eta) <= p.slope_tol),
                detail=f"utility/rate at the lowest informative point = {slope:.5f}, σ₂²(B) = {eta:.5f}",
            ),
            CheckCriterion(
                name="concave_non_decreasing",
                passed=bool(concave and monotone),
                detail=f"{len(good)} converged points",
            ),
        ]
        return CheckReport(name=self.name, rows=rows, criteria=criteria)
