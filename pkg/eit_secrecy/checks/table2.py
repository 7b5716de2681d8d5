# checks/table2.py
"""原问题在不同 |U| 下的最优值与对偶值的对照。"""
from pydantic import BaseModel, field_validator

from eit_secrecy.channels import quantized_awgn_wiretap
from eit_secrecy.checks.base_check import BaseCheck, CheckCriterion, CheckReport
from eit_secrecy.core.settings import get_settings
from eit_secrecy.eit import eit_system
from eit_secrecy.primal import pu_invariance_sweep


def parse_card_range(value) -> list[int]:
    """'5..12' → [5, …, 12]；也接受列表或单个整数。"""
    if isinstance(value, str):
        if ".." in value:
            lo, hi = value.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in value.split(",") if v.strip()]
    if isinstance(value, int):
        return [value]
    return [int(v) for v in value]


class Table2Params(BaseModel):
    nx: int = 8
    bob_db: float = 8.0
    eve_db: float = 0.0
    seed: int = 7
    r: float = 0.4
    theta: float = 0.02
    epsilon: float = 1.0
    card_range: list[int] = list(range(5, 13))
    restarts: int = 8
    max_iters: int = 5000
    spread_tol: float = 0.05

    @field_validator("card_range", mode="before")
    @classmethod
    def _cards(cls, value):
        return parse_card_range(value)


class PrimalDualCheck(BaseCheck):
    Params = Table2Params

    @property
    def name(self) -> str:
        return "table2"

    @property
    def display_name(self) -> str:
        return "原问题 vs 对偶 LP（|U| 不变性）"

    @property
    def description(self) -> str:
        return "|X|=8 信道上对每个 |U| 运行多起点原问题求解，检查弱对偶与 |U| 间的相对离散度。"

    def run(self, params=None) -> CheckReport:
        p = self.parse_params(params)
        wc = quantized_awgn_wiretap(p.nx, p.nx, p.nx, p.bob_db, p.eve_db, rng_seed=p.seed)
        table = pu_invariance_sweep(
            eit_system(wc), p.r, p.theta, p.epsilon, p.card_range,
            seed=p.seed, restarts=p.restarts, max_iters=p.max_iters, workers=get_settings().workers,
        )
        rows = [
            {
                "card_u": row.card_u, "primal_value": row.primal_value,
                "primal_objective": row.primal_objective, "dual_min": row.dual_min,
                "lmi_dual": row.lmi, "paper_literal_max": row.paper_literal, "converged": row.converged,
                "epsilon_realizable": row.epsilon_realizable,
            }
            for row in table
        ]

        values = [row.primal_value for row in table]
        mean = sum(values) / len(values)
        spread = (max(values) - min(values)) / mean if mean > 0 else 0.0
        over_lmi = [row.card_u for row in table if row.primal_value > row.lmi + 1e-9]
        over_max = [
            row.card_u for row in table if row.paper_literal is not None and row.primal_value > row.paper_literal + 1e-9
        ]
        criteria = [
            CheckCriterion(
                name="primal_below_dual",
                passed=bool(not over_lmi and not over_max),
                detail=f"rows above the LMI dual: {over_lmi}; above PaperLiteralMax: {over_max}",
            ),
            CheckCriterion(
                name="primal_spread",
                passed=bool(spread <= p.spread_tol),
                detail=f"relative spread {spread:.4%} (limit {p.spread_tol:.0%})",
            ),
        ]
        return CheckReport(name=self.name, rows=rows, criteria=criteria)
