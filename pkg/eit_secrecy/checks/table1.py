# checks/table1.py
"""顶点枚举 vs 独立穷举 vs scipy linprog，覆盖一族带种子的量化 AWGN 信道。"""
import logging

from pydantic import BaseModel

from eit_secrecy.capacity import LpForm, build_lp, exhaustive_vertex_search, scipy_lp_value, solve_lp
from eit_secrecy.channels import awgn_family
from eit_secrecy.checks.base_check import BaseCheck, CheckCriterion, CheckReport
from eit_secrecy.core.errors import InfeasibleLpError
from eit_secrecy.eit import eit_system
from eit_secrecy.spectral import pencil_spectrum

logger = logging.getLogger(__name__)

FORMS = (LpForm.DUAL_MIN, LpForm.PAPER_LITERAL_MAX)


class Table1Params(BaseModel):
    n_channels: int = 20
    nx_values: list[int] = [3, 5, 8]
    ratios: list[float] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0]
    r: float = 0.5
    seed: int = 0
    jitter: float = 0.3
    exhaustive_tol: float = 1e-9
    linprog_tol: float = 1e-7


def _value_or_none(fn, *args):
    try:
        out = fn(*args)
    except InfeasibleLpError:
        return None
    return out[0] if isinstance(out, tuple) else getattr(out, "value", out)


class LpOracleCheck(BaseCheck):
    Params = Table1Params

    @property
    def name(self) -> str:
        return "table1"

    @property
    def display_name(self) -> str:
        return "LP 顶点枚举 vs 穷举搜索"

    @property
    def description(self) -> str:
        return "solve_lp (两种形式) 与独立的穷举顶点搜索、scipy linprog 在 Θ/R 网格上逐点比较。"

    def run(self, params=None) -> CheckReport:
        p = self.parse_params(params)
        rows = []
        worst_exhaustive = 0.0
        worst_linprog = 0.0
        mismatched_feasibility = 0

        for draw in awgn_family(p.n_channels, p.nx_values, p.seed, p.jitter):
            spec = pencil_spectrum(eit_system(draw.channel))
            for ratio in p.ratios:
                lp = build_lp(spec, p.r, ratio * p.r)
                for form in FORMS:
                    solver = _value_or_none(solve_lp, lp, form)
                    exhaustive = _value_or_none(exhaustive_vertex_search, lp, form)
                    linprog = _value_or_none(scipy_lp_value, lp, form)
                    diff = None
                    if solver is None or exhaustive is None:
                        mismatched_feasibility += (solver is None) != (exhaustive is None)
                    else:
                        diff = abs(solver - exhaustive)
                        worst_exhaustive = max(worst_exhaustive, diff)
                        if linprog is not None:
                            worst_linprog = max(worst_linprog, abs(solver - linprog))
                    rows.append({
                        "channel": draw.index, "nx": draw.nx,
                        "bob_db": draw.ebn0_bob_db, "eve_db": draw.ebn0_eve_db,
                        "ratio": ratio, "form": form.value,
                        "vertex_value": solver, "exhaustive_value": exhaustive,
                        "linprog_value": linprog, "abs_diff": diff,
                    })

        criteria = [
            CheckCriterion(
                name="vertex_matches_exhaustive",
                passed=bool(worst_exhaustive <= p.exhaustive_tol and mismatched_feasibility == 0),
                detail=f"max |Δ| = {worst_exhaustive:.3e}, feasibility disagreements = {mismatched_feasibility}",
            ),
            CheckCriterion(
                name="vertex_matches_linprog",
                passed=bool(worst_linprog <= p.linprog_tol),
                detail=f"max |Δ| = {worst_linprog:.3e}",
            ),
        ]
        return CheckReport(name=self.name, rows=rows, criteria=criteria)
