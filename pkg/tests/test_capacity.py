import itertools
import math

import numpy as np
import pytest

from eit_secrecy.capacity import (
    LpForm,
    LpProblem,
    LpSolution,
    Regime,
    approximate_secrecy_capacity,
    build_lp,
    bswc_c_sic,
    c_sic,
    eve_quantization_sweep,
    exhaustive_vertex_search,
    feasibility_check,
    interior_vertices,
    kkt_commuting_check,
    lmi_dual,
    regime_report,
    scipy_lp_value,
    solve_lp,
)
from eit_secrecy.channels import bswc, quantized_awgn_wiretap
from eit_secrecy.core.errors import DomainError, InfeasibleLpError, NonCommutingError
from eit_secrecy.eit import eit_system
from eit_secrecy.spectral import pencil_spectrum

GRID = [round(0.05 * k, 2) for k in range(1, 10)]


@pytest.fixture
def bswc_spec(bswc_system):
    return pencil_spectrum(bswc_system)


class TestBuildLp:
    def test_bswc_constraint(self, bswc_spec):
        lp = build_lp(bswc_spec, 0.5, 0.05)
        assert lp.n_modes == 1
        assert lp.lam[0] == pytest.approx(0.25)
        assert lp.d[0] * lp.lam[0] == pytest.approx(0.64)
        assert lp.c_max == pytest.approx(0.32)

    def test_five_symbol_channel_has_four_modes(self, awgn5):
        assert build_lp(pencil_spectrum(eit_system(awgn5)), 0.5, 0.05).n_modes == 4

    def test_scaling_r_scales_cap_only(self, bswc_spec):
        a, b = build_lp(bswc_spec, 0.5, 0.05), build_lp(bswc_spec, 1.5, 0.05)
        assert b.c_max == pytest.approx(3.0 * a.c_max)
        np.testing.assert_array_equal(a.d, b.d)
        np.testing.assert_array_equal(a.lam, b.lam)

    def test_budgets_must_be_positive(self, bswc_spec):
        with pytest.raises(DomainError):
            build_lp(bswc_spec, 0.5, 0.0)


class TestSolveLp:
    def test_leakage_branch(self, bswc_spec):
        sol = solve_lp(build_lp(bswc_spec, 0.5, 0.05), LpForm.DUAL_MIN)
        assert (sol.rho, sol.nu) == pytest.approx((0.0, 2.56))
        assert sol.value == pytest.approx(0.128)
        assert sol.regime is Regime.LEAKAGE_DOMINANT
        assert sol.active_modes == (0,)

    def test_rate_branch(self, bswc_spec):
        sol = solve_lp(build_lp(bswc_spec, 0.5, 0.2), LpForm.DUAL_MIN)
        assert (sol.rho, sol.nu) == pytest.approx((0.64, 0.0))
        assert sol.value == pytest.approx(0.32)
        assert sol.regime is Regime.RATE_DOMINANT

    def test_tie_goes_to_smaller_rho(self, bswc_spec):
        # λ_Λ = Θ/R：两个轴上的顶点同为最优
        sol = solve_lp(build_lp(bswc_spec, 0.5, 0.125), LpForm.DUAL_MIN)
        assert sol.rho == 0.0
        assert sol.value == pytest.approx(0.32)

    def test_literal_max_on_bswc(self, bswc_spec):
        sol = solve_lp(build_lp(bswc_spec, 0.5, 0.05), LpForm.PAPER_LITERAL_MAX)
        assert sol.value == pytest.approx(0.32)

    def test_literal_max_infeasible(self):
        lp = LpProblem(r=1.0, theta=1.0, d=np.array([4.0]), lam=np.array([1.0]), c_max=1.0)
        with pytest.raises(InfeasibleLpError):
            solve_lp(lp, LpForm.PAPER_LITERAL_MAX)
        with pytest.raises(InfeasibleLpError):
            exhaustive_vertex_search(lp, LpForm.PAPER_LITERAL_MAX)

    def test_lmi_form_is_refused(self, bswc_spec):
        with pytest.raises(DomainError):
            solve_lp(build_lp(bswc_spec, 0.5, 0.05), LpForm.LMI_DUAL)

    def test_origin_is_rate_dominant(self):
        sol = LpSolution(rho=0.0, nu=0.0, value=0.0, active_modes=(), form=LpForm.DUAL_MIN, r=1.0, theta=1.0)
        assert sol.regime is Regime.RATE_DOMINANT
        assert c_sic(sol) == 0.0

    @pytest.mark.parametrize("form", [LpForm.DUAL_MIN, LpForm.PAPER_LITERAL_MAX])
    def test_matches_oracles(self, awgn5, form):
        spec = pencil_spectrum(eit_system(awgn5))
        for ratio in (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0):
            lp = build_lp(spec, 0.5, 0.5 * ratio)
            value = solve_lp(lp, form).value
            assert value == pytest.approx(exhaustive_vertex_search(lp, form)[0], abs=1e-9)
            assert value == pytest.approx(scipy_lp_value(lp, form), abs=1e-7)


class TestCapacityHelpers:
    def test_c_sic(self):
        sol = LpSolution(rho=0.0, nu=2.56, value=0.0, active_modes=(0,), form=LpForm.DUAL_MIN, r=0.5, theta=0.05)
        assert c_sic(sol) == pytest.approx(0.128)
        sol = LpSolution(rho=0.64, nu=0.0, value=0.0, active_modes=(0,), form=LpForm.DUAL_MIN, r=0.5, theta=0.05)
        assert c_sic(sol) == pytest.approx(0.32)

    def test_feasibility(self, bswc_spec):
        assert feasibility_check(bswc_spec, 0.5, 0.05)
        knee = bswc_spec.lam_max_perp_v / bswc_spec.d_max
        assert not feasibility_check(bswc_spec, 1.0, 1.0001 * knee)
        assert not feasibility_check(bswc_spec, 1.0, 2.0 * knee)

    def test_bswc_has_no_interior_vertex(self, bswc_spec):
        lp = build_lp(bswc_spec, 0.5, 0.05)
        report = regime_report(lp, bswc_spec)
        assert report.interior_vertices == []
        assert report.c_inter == -math.inf
        assert report.c_rate == pytest.approx(0.32)
        assert report.c_leak == pytest.approx(0.128)
        assert report.dual_min.value == pytest.approx(0.128)

    def test_interior_vertices_are_feasible(self, awgn8_system):
        spec = pencil_spectrum(awgn8_system)
        lines = list(zip(spec.d * spec.lam, spec.lam))
        for ratio in np.linspace(0.01, 1.0, 25):
            lp = build_lp(spec, 0.5, 0.5 * ratio)
            for rho, nu in interior_vertices(lp):
                assert rho > 0 and nu > 0
                assert all(rho + lam * nu >= c - 1e-9 for c, lam in lines)
                assert rho * lp.r + nu * lp.theta <= lp.c_max + 1e-9

    def test_interior_vertices_against_brute_force(self, awgn8_system):
        spec = pencil_spectrum(awgn8_system)
        lp = build_lp(spec, 0.5, 0.02)
        lines = [np.array([1.0, lam, d * lam]) for d, lam in zip(spec.d, spec.lam)]
        lines.append(np.array([lp.r, lp.theta, lp.c_max]))
        expected = set()
        for a, b in itertools.combinations(lines, 2):
            m = np.array([a[:2], b[:2]])
            if abs(np.linalg.det(m)) < 1e-14:
                continue
            rho, nu = np.linalg.solve(m, [a[2], b[2]])
            ok = rho > 1e-12 and nu > 1e-12
            ok = ok and all(rho + line[1] * nu >= line[2] - 1e-9 for line in lines[:-1])
            ok = ok and rho * lp.r + nu * lp.theta <= lp.c_max + 1e-9
            if ok:
                expected.add((round(rho, 9), round(nu, 9)))
        got = {(round(rho, 9), round(nu, 9)) for rho, nu in interior_vertices(lp)}
        assert got == expected


class TestClosedForm:
    def test_values(self):
        assert bswc_c_sic(0.1, 0.25, 0.5, 0.05) == pytest.approx(0.128)
        for theta in (0.0, 0.01, 0.3):
            assert bswc_c_sic(0.1, 0.5, 0.5, theta) == pytest.approx(0.32)
        assert bswc_c_sic(0.5, 0.25, 0.5, 0.05) == 0.0
        assert bswc_c_sic(0.5, 0.25, 0.5, 0.4) == 0.0

    def test_equivalence_grid(self):
        for p, q in itertools.product(GRID, GRID):
            spec = pencil_spectrum(eit_system(bswc(p, q)))
            for r in (0.1, 0.5, 1.0):
                for ratio in (0.01, 0.05, 0.1, 0.2, 0.25, 0.5, 0.81, 1.0):
                    lp_value = solve_lp(build_lp(spec, r, ratio * r), LpForm.DUAL_MIN).value
                    assert abs(lp_value - bswc_c_sic(p, q, r, ratio * r)) <= 1e-12

    def test_normalized_curve_shape(self, bswc_spec):
        r = 0.5
        ratios = np.linspace(0.005, 1.0, 200)
        curve = [solve_lp(build_lp(bswc_spec, r, x * r), LpForm.DUAL_MIN).value / r for x in ratios]
        assert np.all(np.diff(curve) >= -1e-12)
        assert curve[0] / ratios[0] == pytest.approx(bswc_spec.d_max, abs=1e-6)
        assert curve[-1] == pytest.approx(bswc_spec.lam_max_perp_v, abs=1e-6)
        knee = bswc_spec.lam_max_perp_v / bswc_spec.d_max
        assert knee == pytest.approx(0.25, abs=1e-9)

    def test_perfect_secrecy_limit(self):
        for p, q in itertools.product(GRID, GRID):
            sol = approximate_secrecy_capacity(eit_system(bswc(p, q)), 0.5, 1e-12)
            assert sol.value <= 1e-10

    def test_useless_eve(self, caplog):
        sol = approximate_secrecy_capacity(eit_system(bswc(0.1, 0.5)), 0.5, 1e-12)
        assert sol.form is LpForm.LMI_DUAL
        assert sol.value == pytest.approx(0.32, abs=1e-12)
        assert sol.regime is Regime.RATE_DOMINANT
        assert "falling back" in caplog.text


class TestMonotonicity:
    @pytest.mark.parametrize("theta", [0.005, 0.02, 0.1])
    def test_non_decreasing_in_rate_budget(self, awgn8_system, awgn5, theta):
        for sys in (awgn8_system, eit_system(awgn5), eit_system(bswc(0.1, 0.25))):
            spec = pencil_spectrum(sys)
            values = [solve_lp(build_lp(spec, r, theta), LpForm.DUAL_MIN).value for r in np.linspace(0.01, 2.0, 120)]
            assert np.all(np.diff(values) >= -1e-12)

    def test_non_decreasing_in_leakage_budget(self, awgn8_system):
        spec = pencil_spectrum(awgn8_system)
        values = [solve_lp(build_lp(spec, 0.4, theta), LpForm.DUAL_MIN).value for theta in np.linspace(1e-3, 0.5, 120)]
        assert np.all(np.diff(values) >= -1e-12)


class TestKkt:
    def test_identity_along_p_bob(self):
        for p in np.linspace(0.0, 0.45, 46):
            spec = pencil_spectrum(eit_system(bswc(float(p), 0.25)))
            check = kkt_commuting_check(spec, solve_lp(build_lp(spec, 0.5, 0.05)))
            assert check.passed, p

    def test_perturbed_multipliers_fail(self, bswc_spec):
        sol = solve_lp(build_lp(bswc_spec, 0.5, 0.05))
        shifted = LpSolution(
            rho=sol.rho + 0.01, nu=sol.nu, value=sol.value, active_modes=sol.active_modes,
            form=sol.form, r=sol.r, theta=sol.theta,
        )
        check = kkt_commuting_check(bswc_spec, shifted)
        assert check.max_residual == pytest.approx(0.01)
        assert not check.passed

    def test_non_commuting_refused(self):
        spec = pencil_spectrum(eit_system(quantized_awgn_wiretap(5, 5, 5, 8.0, 2.0)))
        with pytest.raises(NonCommutingError):
            kkt_commuting_check(spec, solve_lp(build_lp(spec, 0.5, 0.05)))


class TestLmiDual:
    def test_matches_dual_min_on_bswc(self, bswc_system, bswc_spec):
        for theta in (0.01, 0.05, 0.125, 0.3):
            expected = solve_lp(build_lp(bswc_spec, 0.5, theta)).value
            assert lmi_dual(bswc_system, 0.5, theta).value == pytest.approx(expected, abs=1e-9)

    def test_bounds_dual_min_from_above(self, awgn8_system):
        spec = pencil_spectrum(awgn8_system)
        for ratio in (0.02, 0.05, 0.2, 1.0):
            relaxed = solve_lp(build_lp(spec, 0.4, 0.4 * ratio)).value
            assert lmi_dual(awgn8_system, 0.4, 0.4 * ratio).value >= relaxed - 1e-9

    def test_singular_pencil(self):
        sys = eit_system(bswc(0.2, 0.5))
        assert lmi_dual(sys, 0.7, 0.01).value == pytest.approx(0.36 * 0.7, abs=1e-12)


class TestEveQuantization:
    def test_non_increasing_in_nz(self):
        rows = eve_quantization_sweep([2, 4, 8, 16], [0.0, 3.0])
        for snr in (0.0, 3.0):
            values = [row["value"] for row in rows if row["eve_db"] == snr]
            assert len(values) == 4
            assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))
