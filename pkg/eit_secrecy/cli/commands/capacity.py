# cli/commands/capacity.py
"""
`capacity` 子命令：单点求解、Θ 与 Θ/R 扫描、工作区间、Eve 量化扫描、BSWC 对照、可达比值。
每一行都同时给出 DualMin、PaperLiteralMax 与 LMI 对偶三种形式；矩阵束奇异只影响当前行。
"""
import argparse
import logging
from functools import partial

import numpy as np

from eit_secrecy.capacity import (
    LpForm,
    approximate_secrecy_capacity,
    bswc_c_sic,
    build_lp,
    eve_quantization_sweep,
    lmi_dual,
    regime_report,
    solve_lp,
)
from eit_secrecy.channels import bswc, true_secrecy_capacity_bswc
from eit_secrecy.cli.io import finish_run, in_units, load_channel
from eit_secrecy.core.errors import DomainError, InfeasibleLpError, SingularPencilError
from eit_secrecy.core.pool import ordered_map
from eit_secrecy.eit import EitSystem, eit_system
from eit_secrecy.primal import achieved_ratio, optimize_primal
from eit_secrecy.spectral import PencilSpectrum, pencil_spectrum

logger = logging.getLogger(__name__)

LP_FORMS = (LpForm.DUAL_MIN, LpForm.PAPER_LITERAL_MAX)
NAT_COLUMNS = ("r", "theta", "value", "c_sic", "closed_form", "true_capacity", "c_rate", "c_leak", "c_inter",
               "c_sic_max", "dual_min", "paper_literal")


def register(subparsers) -> None:
    parser = subparsers.add_parser("capacity", help="近似局部保密容量 C_SIC")
    actions = parser.add_subparsers(dest="action", required=True)

    solve = actions.add_parser("solve", help="单个 (R, Θ) 点")
    solve.add_argument("channel")
    solve.add_argument("--r", type=float, default=0.5)
    solve.add_argument("--theta", type=float, default=0.05)
    solve.set_defaults(func=solve_point)

    theta = actions.add_parser("sweep-theta", help="固定 R 扫描 Θ")
    theta.add_argument("channel")
    theta.add_argument("--r", type=float, default=0.5)
    theta.add_argument("--theta-min", type=float, default=0.005)
    theta.add_argument("--theta-max", type=float, default=0.5)
    theta.add_argument("--points", type=int, default=100)
    theta.set_defaults(func=sweep_theta)

    ratio = actions.add_parser("sweep-ratio", help="固定 R 扫描 Θ/R，输出归一化容量 C_SIC/R")
    ratio.add_argument("channel")
    ratio.add_argument("--r", type=float, default=0.5)
    ratio.add_argument("--ratio-min", type=float, default=0.01)
    ratio.add_argument("--ratio-max", type=float, default=2.0)
    ratio.add_argument("--points", type=int, default=200)
    ratio.set_defaults(func=sweep_ratio)

    regimes = actions.add_parser("regimes", help="C_R、C_Θ、C_inter 三类候选值随 Θ 的变化")
    regimes.add_argument("channel")
    regimes.add_argument("--r", type=float, default=0.5)
    regimes.add_argument("--theta-min", type=float, default=0.005)
    regimes.add_argument("--theta-max", type=float, default=0.5)
    regimes.add_argument("--points", type=int, default=100)
    regimes.set_defaults(func=regimes_sweep)

    eve = actions.add_parser("sweep-eve", help="C_SIC 随 Eve 的 Eb/N0 与量化级数 |Z| 的变化")
    eve.add_argument("--nz", type=int, nargs="+", default=[2, 4, 8, 16])
    eve.add_argument("--eve-snr", type=float, nargs="+", default=[float(v) for v in range(-4, 9)])
    eve.add_argument("--nx", type=int, default=8)
    eve.add_argument("--ny", type=int, default=8)
    eve.add_argument("--bob-snr", type=float, default=8.0)
    eve.add_argument("--r", type=float, default=0.5)
    eve.add_argument("--theta", type=float, default=0.1)
    eve.add_argument("--form", choices=[f.value for f in LpForm], default=LpForm.LMI_DUAL.value)
    eve.set_defaults(func=sweep_eve)

    bswc_cmd = actions.add_parser("sweep-bswc", help="BSWC 上 C_SIC 与真实保密容量对照")
    bswc_cmd.add_argument("--q", type=float, default=0.45)
    bswc_cmd.add_argument("--r", type=float, default=1.0)
    bswc_cmd.add_argument("--ratio", type=float, default=0.085, help="Θ/R")
    bswc_cmd.add_argument("--p-max", type=float, default=0.45)
    bswc_cmd.add_argument("--points", type=int, default=46)
    bswc_cmd.set_defaults(func=sweep_bswc)

    achieved = actions.add_parser("ratio", help="原问题解的效用/泄露比值与 η_loc_sec")
    achieved.add_argument("channel")
    achieved.add_argument("--theta", type=float, default=0.05)
    achieved.add_argument("--ratios", type=float, nargs="+", default=[0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
                          help="R/Θ 网格")
    achieved.add_argument("--cardu", type=int, default=4)
    achieved.add_argument("--epsilon", type=float, default=1.0)
    achieved.add_argument("--seed", type=int, default=0)
    achieved.add_argument("--restarts", type=int, default=4)
    achieved.add_argument("--max-iters", type=int, default=3000)
    achieved.set_defaults(func=achieved_ratios)


def _spectrum_or_none(sys: EitSystem) -> PencilSpectrum | None:
    try:
        return pencil_spectrum(sys)
    except SingularPencilError as e:
        logger.warning("⚠️ %s; only the LMI dual is reported", e)
        return None


def _solution_cells(sol) -> dict:
    return {"rho": sol.rho, "nu": sol.nu, "value": sol.value, "regime": sol.regime.value, "form": sol.form.value}


def solve_rows(sys: EitSystem, spec: PencilSpectrum | None, r: float, theta: float, **extra) -> list[dict]:
    """一个 (R, Θ) 点上三种形式各一行。"""
    rows = []
    for form in LP_FORMS:
        row = {**extra, "r": r, "theta": theta}
        if spec is None:
            row.update(rho=None, nu=None, value=None, regime=None, form=form.value, status="singular pencil")
        else:
            try:
                row.update(_solution_cells(solve_lp(build_lp(spec, r, theta), form)), status="ok")
            except InfeasibleLpError:
                row.update(rho=None, nu=None, value=None, regime=None, form=form.value, status="infeasible")
        rows.append(row)
    rows.append({**extra, "r": r, "theta": theta, **_solution_cells(lmi_dual(sys, r, theta)), "status": "ok"})
    return rows


def _flatten(chunks: list[list[dict]]) -> list[dict]:
    return [row for chunk in chunks for row in chunk]


def _grid_rows(args, thetas, extra_fn) -> list[dict]:
    """extra_fn(k, θ) 给出每个网格点附加的参数列。"""
    sys = eit_system(load_channel(args.channel))
    spec = _spectrum_or_none(sys)
    logger.info("🚀 Sweeping %d grid points", len(thetas))
    points = list(enumerate(float(th) for th in thetas))
    chunks = ordered_map(lambda kt: solve_rows(sys, spec, args.r, kt[1], **extra_fn(*kt)), points, args.workers)
    return _flatten(chunks)


def _report(paths) -> int:
    for path in paths:
        print(path)
    return 0


def solve_point(args: argparse.Namespace) -> int:
    sys = eit_system(load_channel(args.channel))
    rows = solve_rows(sys, _spectrum_or_none(sys), args.r, args.theta)
    return _report(finish_run(args, "capacity solve", {"capacity_solve": in_units(rows, NAT_COLUMNS, args.units)}))


def sweep_theta(args: argparse.Namespace) -> int:
    thetas = np.linspace(args.theta_min, args.theta_max, args.points)
    rows = _grid_rows(args, thetas, lambda k, th: {"index": k})
    return _report(finish_run(args, "capacity sweep-theta", {"capacity_sweep_theta": in_units(rows, NAT_COLUMNS, args.units)}))


def sweep_ratio(args: argparse.Namespace) -> int:
    ratios = np.linspace(args.ratio_min, args.ratio_max, args.points)
    rows = _grid_rows(args, ratios * args.r, lambda k, th: {"index": k, "theta_over_r": th / args.r})
    for row in rows:
        row["normalized"] = None if row["value"] is None else row["value"] / args.r
    return _report(finish_run(args, "capacity sweep-ratio", {"capacity_sweep_ratio": in_units(rows, NAT_COLUMNS, args.units)}))


def _regime_row(sys: EitSystem, spec: PencilSpectrum | None, r: float, theta: float) -> dict:
    row = {"r": r, "theta": theta}
    if spec is None:
        lmi = lmi_dual(sys, r, theta)
        row.update(status="singular pencil", lmi_dual=lmi.value, lmi_regime=lmi.regime.value)
        return row
    rep = regime_report(build_lp(spec, r, theta), spec)
    row.update(
        c_rate=rep.c_rate,
        c_leak=rep.c_leak,
        c_inter=rep.c_inter if np.isfinite(rep.c_inter) else None,
        c_sic_max=rep.c_sic_max,
        n_interior=len(rep.interior_vertices),
        dual_min=rep.dual_min.value,
        dual_regime=rep.dual_min.regime.value,
        paper_literal=rep.paper_literal.value if rep.paper_literal else None,
        literal_regime=rep.paper_literal.regime.value if rep.paper_literal else None,
        status="ok",
    )
    return row


def regimes_sweep(args: argparse.Namespace) -> int:
    sys = eit_system(load_channel(args.channel))
    spec = _spectrum_or_none(sys)
    thetas = np.linspace(args.theta_min, args.theta_max, args.points)
    rows = ordered_map(lambda th: _regime_row(sys, spec, args.r, float(th)), thetas, args.workers)
    return _report(finish_run(args, "capacity regimes", {"capacity_regimes": in_units(rows, NAT_COLUMNS, args.units)}))


def sweep_eve(args: argparse.Namespace) -> int:
    rows = eve_quantization_sweep(
        args.nz, args.eve_snr, nx=args.nx, ny=args.ny, bob_db=args.bob_snr,
        r=args.r, theta=args.theta, form=LpForm(args.form),
    )
    return _report(finish_run(args, "capacity sweep-eve", {"capacity_sweep_eve": in_units(rows, NAT_COLUMNS, args.units)}))


def _bswc_row(p_bob: float, q: float, r: float, theta: float) -> dict:
    sol = approximate_secrecy_capacity(eit_system(bswc(p_bob, q)), r, theta, LpForm.DUAL_MIN)
    return {
        "p_bob": p_bob, "q_eve": q, "r": r, "theta": theta,
        "c_sic": sol.value, "regime": sol.regime.value, "form": sol.form.value,
        "closed_form": bswc_c_sic(p_bob, q, r, theta),
        "true_capacity": true_secrecy_capacity_bswc(p_bob, q),
    }


def sweep_bswc(args: argparse.Namespace) -> int:
    grid = [float(p) for p in np.linspace(0.0, args.p_max, args.points)]
    rows = ordered_map(partial(_bswc_row, q=args.q, r=args.r, theta=args.ratio * args.r), grid, args.workers)
    return _report(finish_run(args, "capacity sweep-bswc", {"capacity_sweep_bswc": in_units(rows, NAT_COLUMNS, args.units)}))


def achieved_ratios(args: argparse.Namespace) -> int:
    sys = eit_system(load_channel(args.channel))
    spec = _spectrum_or_none(sys)
    eta = spec.d_max if spec is not None else None
    eps2 = args.epsilon**2
    rows = []
    for k, ratio in enumerate(args.ratios):
        r = ratio * args.theta
        res = optimize_primal(
            sys, 2.0 * r / eps2, 2.0 * args.theta / eps2, args.cardu, seed=args.seed + k,
            restarts=args.restarts, max_iters=args.max_iters, epsilon=args.epsilon, workers=args.workers,
        )
        row = {"r_over_theta": ratio, "r": r, "theta": args.theta, "eta_loc_sec": eta, "converged": res.converged,
               "epsilon_realizable": res.epsilon_realizable}
        try:
            row.update(achieved_ratio=achieved_ratio(res.strategy, sys), status="ok")
        except DomainError as e:
            row.update(achieved_ratio=None, status=str(e))
        rows.append(row)
    return _report(finish_run(
        args, "capacity ratio", {"capacity_ratio": in_units(rows, NAT_COLUMNS, args.units)}, seeds={"primal": args.seed}
    ))
