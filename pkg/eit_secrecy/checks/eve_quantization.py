# checks/eve_quantization.py
"""Eve 的量化级数 |Z| 越细，Eve 得到的信息越多，C_SIC 不应上升。"""
from collections import defaultdict

from pydantic import BaseModel

from eit_secrecy.capacity import LpForm, eve_quantization_sweep
from eit_secrecy.checks.base_check import BaseCheck, CheckCriterion, CheckReport


class EveQuantizationParams(BaseModel):
    nz_values: list[int] = [2, 4, 8, 16]
    eve_snrs_db: list[float] = [-2.0, 0.0, 2.0, 4.0]
    nx: int = 8
    ny: int = 8
    bob_db: float = 8.0
    r: float = 0.5
    theta: float = 0.1
    tol: float = 1e-9


class EveQuantizationCheck(BaseCheck):
    Params = EveQuantizationParams

    @property
    def name(self) -> str:
        return "eve-quantization"

    @property
    def display_name(self) -> str:
        return "Eve 量化级数单调性"

    @property
    def description(self) -> str:
        return "|X|=8、Bob 8 dB 的量化 AWGN 窃听信道上，LMI 对偶值随 |Z| 增大单调不增。"

    def run(self, params=None) -> CheckReport:
        p = self.parse_params(params)
        rows = eve_quantization_sweep(
            sorted(p.nz_values), p.eve_snrs_db, nx=p.nx, ny=p.ny, bob_db=p.bob_db,
            r=p.r, theta=p.theta, form=LpForm.LMI_DUAL,
        )
        by_snr = defaultdict(list)
        for row in rows:
            by_snr[row["eve_db"]].append(row["value"])
        increases = [
            (snr, i)
            for snr, values in by_snr.items()
            for i, (a, b) in enumerate(zip(values, values[1:]))
            if b > a + p.tol
        ]
        criteria = [
            CheckCriterion(
                name="non_increasing_in_nz",
                passed=bool(not increases),
                detail=f"(eve_db, step) pairs where C_SIC grew with |Z|: {increases}",
            )
        ]
        return CheckReport(name=self.name, rows=rows, criteria=criteria)
