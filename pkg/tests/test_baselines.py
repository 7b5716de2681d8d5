import warnings

import numpy as np
import pytest

from eit_secrecy.baselines import (
    blahut_arimoto_ib,
    exact_strategy_mi,
    mc_global_contraction,
    utility_leakage_samples,
)
from eit_secrecy.channels import WiretapChannel, bsc, bswc
from eit_secrecy.checks.contraction import ternary_channel
from eit_secrecy.core.errors import ConvergenceWarning, DomainError
from eit_secrecy.eit import PerturbationStrategy, eit_mi_x, eit_mi_y, eit_mi_z, eit_system
from eit_secrecy.probability import Pmf, mutual_information


class TestExactStrategyMi:
    def test_zero_perturbation(self, bswc_channel):
        s = PerturbationStrategy.antipodal(Pmf.uniform(2), np.zeros(2), 0.3)
        assert exact_strategy_mi(bswc_channel, s) == pytest.approx((0.0, 0.0, 0.0), abs=1e-15)

    def test_close_to_quadratic_for_small_epsilon(self, bswc_channel, bswc_system, tau):
        s = PerturbationStrategy.antipodal(Pmf.uniform(2), tau, 0.02)
        exact = exact_strategy_mi(bswc_channel, s)
        assert exact.iux == pytest.approx(eit_mi_x(s), abs=2e-6)
        assert exact.iuy == pytest.approx(eit_mi_y(s, bswc_system), abs=2e-6)
        assert exact.iuz == pytest.approx(eit_mi_z(s, bswc_system), abs=2e-6)

    def test_error_grows_at_least_cubically(self, bswc_channel, tau):
        def error(eps):
            s = PerturbationStrategy.antipodal(Pmf.uniform(2), tau, eps)
            return abs(exact_strategy_mi(bswc_channel, s).iux - eit_mi_x(s))

        assert error(0.2) / error(0.02) >= 900.0

    def test_alphabet_mismatch(self, awgn8, tau):
        s = PerturbationStrategy.antipodal(Pmf.uniform(2), tau, 0.1)
        with pytest.raises(DomainError):
            exact_strategy_mi(awgn8, s)


class TestInformationBottleneck:
    def test_below_critical_beta_is_trivial(self):
        (pt,) = blahut_arimoto_ib(Pmf.uniform(2), bsc(0.1), [1.2], 2, seed=1)
        assert pt.rate < 1e-6
        assert pt.utility < 1e-6

    def test_saturates_at_channel_information(self):
        (pt,) = blahut_arimoto_ib(Pmf.uniform(2), bsc(0.1), [1000.0], 2, seed=1)
        target = mutual_information(Pmf.uniform(2), bsc(0.1), base=2)
        assert pt.utility / np.log(2.0) == pytest.approx(target, abs=1e-3)

    def test_points_sorted_by_rate(self):
        points = blahut_arimoto_ib(Pmf.uniform(2), bsc(0.1), [1000.0, 3.0, 10.0], 2, seed=2)
        rates = [pt.rate for pt in points]
        assert rates == sorted(rates)

    def test_unconverged_points_are_flagged(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            (pt,) = blahut_arimoto_ib(Pmf.uniform(2), bsc(0.1), [3.0], 2, max_iters=1, restarts=1)
        assert not pt.converged
        assert any(issubclass(w.category, ConvergenceWarning) for w in caught)

    def test_argument_checks(self):
        with pytest.raises(DomainError):
            blahut_arimoto_ib(Pmf.uniform(2), bsc(0.1), [], 2)
        with pytest.raises(DomainError):
            blahut_arimoto_ib(Pmf.uniform(2), bsc(0.1), [1.0], 1)


class TestGlobalContraction:
    def test_bswc_sandwich(self):
        mc = mc_global_contraction(bswc(0.1, 0.25), 500, [0.01, 0.02, 0.05], seed=3)
        assert mc.within_bound
        assert mc.eta_loc == pytest.approx(2.56)
        assert mc.upper_bound == pytest.approx(4.0 * 2.56)
        assert mc.eta_glo_lower_bound >= mc.eta_loc - 1e-3

    def test_identical_legs(self, awgn5):
        same = WiretapChannel(px=awgn5.px, bob=awgn5.bob, eve=awgn5.bob)
        mc = mc_global_contraction(same, 50, [0.05], seed=4)
        np.testing.assert_allclose(mc.ratios, 1.0, atol=1e-12)

    def test_argument_checks(self, bswc_channel):
        with pytest.raises(DomainError):
            mc_global_contraction(bswc_channel, 0, [0.01])
        with pytest.raises(DomainError):
            mc_global_contraction(bswc_channel, 10, [])

    @pytest.mark.slow
    def test_ternary_full_protocol(self):
        mc = mc_global_contraction(ternary_channel(), 10_000, [0.01, 0.02, 0.05], seed=0)
        assert mc.within_bound
        assert mc.eta_glo_lower_bound >= mc.eta_loc - 1e-3


class TestQuadraticSamples:
    def test_bswc_single_ratio(self, bswc_system):
        samples = utility_leakage_samples(bswc_system, 200, seed=1)
        np.testing.assert_allclose(samples.ratios, 2.56, rtol=1e-12)

    def test_bound_and_equality(self, awgn8_system):
        samples = utility_leakage_samples(awgn8_system, 10_000, seed=2)
        assert np.max(samples.utility - samples.eta_loc * samples.leakage) <= 1e-12
        assert samples.ratios[0] == pytest.approx(samples.eta_loc, rel=1e-9)

    def test_single_sample_is_principal(self, awgn5):
        samples = utility_leakage_samples(eit_system(awgn5), 1)
        assert samples.ratios.size == 1
        assert samples.ratios[0] == pytest.approx(samples.eta_loc, rel=1e-9)

    def test_ternary_is_peaked_near_one(self):
        samples = utility_leakage_samples(eit_system(ternary_channel()), 2000, seed=5)
        assert np.median(samples.ratios) == pytest.approx(1.0, abs=0.02)
