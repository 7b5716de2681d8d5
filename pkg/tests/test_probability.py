import math

import numpy as np
import pytest

from eit_secrecy.channels import bsc
from eit_secrecy.core.errors import DimensionError, DomainError, InvalidDistributionError
from eit_secrecy.probability import (
    Pmf,
    TransitionMatrix,
    chi_squared,
    entropy,
    kl_divergence,
    mutual_information,
    output_marginal,
    to_units,
)


class TestPmf:
    def test_rejects_bad_vectors(self):
        with pytest.raises(InvalidDistributionError):
            Pmf(np.array([0.5, 0.6]))
        with pytest.raises(InvalidDistributionError):
            Pmf(np.array([1.2, -0.2]))
        with pytest.raises(InvalidDistributionError):
            Pmf(np.array([]))

    def test_is_immutable(self):
        p = Pmf.uniform(3)
        with pytest.raises(ValueError):
            p.probs[0] = 1.0

    def test_renormalized_and_interior(self):
        p = Pmf.renormalized([2.0, 1.0, 1.0])
        np.testing.assert_allclose(p.probs, [0.5, 0.25, 0.25])
        assert p.is_strictly_interior()
        assert not Pmf(np.array([1.0, 0.0])).is_strictly_interior()


class TestTransitionMatrix:
    def test_columns_must_sum_to_one(self):
        with pytest.raises(InvalidDistributionError):
            TransitionMatrix(np.array([[0.9, 0.2], [0.1, 0.9]]))

    def test_shape_accessors(self):
        m = TransitionMatrix(np.full((3, 2), 1.0 / 3.0))
        assert (m.n_outputs, m.n_inputs) == (3, 2)


class TestEntropy:
    def test_uniform_binary_is_one_bit(self):
        assert entropy(Pmf.uniform(2), base=2) == pytest.approx(1.0, abs=1e-15)

    def test_point_mass(self):
        assert entropy(Pmf(np.array([1.0, 0.0])), base=2) == 0.0

    def test_skewed_binary(self):
        assert entropy(Pmf(np.array([0.1, 0.9])), base=2) == pytest.approx(0.468996, abs=1e-6)

    def test_unknown_base(self):
        with pytest.raises(DomainError):
            entropy(Pmf.uniform(2), base=10)


class TestDivergences:
    def test_kl_identity_is_zero(self):
        p = Pmf(np.array([0.2, 0.3, 0.5]))
        assert kl_divergence(p, p) == 0.0

    def test_kl_values(self):
        half = Pmf.uniform(2)
        assert kl_divergence(Pmf(np.array([0.6, 0.4])), half) == pytest.approx(0.020136, abs=1e-6)
        assert kl_divergence(Pmf(np.array([1.0, 0.0])), half, base=2) == pytest.approx(1.0)

    def test_kl_support_violation(self):
        with pytest.raises(DomainError):
            kl_divergence(Pmf.uniform(2), Pmf(np.array([1.0, 0.0])))

    def test_chi_squared_values(self):
        half = Pmf.uniform(2)
        assert chi_squared(half, half) == 0.0
        assert chi_squared(Pmf(np.array([0.6, 0.4])), half) == pytest.approx(0.04)
        assert chi_squared(Pmf(np.array([0.25, 0.75])), half) == pytest.approx(0.25)

    def test_chi_squared_needs_full_support(self):
        with pytest.raises(DomainError):
            chi_squared(Pmf.uniform(2), Pmf(np.array([1.0, 0.0])))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            kl_divergence(Pmf.uniform(2), Pmf.uniform(3))


class TestMarginalAndMutualInformation:
    def test_output_marginal(self):
        px = Pmf(np.array([0.8, 0.2]))
        np.testing.assert_allclose(output_marginal(TransitionMatrix.identity(2), px).probs, px.probs)
        np.testing.assert_allclose(output_marginal(bsc(0.1), Pmf.uniform(2)).probs, [0.5, 0.5])
        np.testing.assert_allclose(output_marginal(bsc(0.1), px).probs, [0.74, 0.26])

    def test_mutual_information(self):
        u = Pmf.uniform(2)
        assert mutual_information(u, TransitionMatrix.identity(2), base=2) == pytest.approx(1.0)
        assert mutual_information(Pmf(np.array([0.3, 0.7])), bsc(0.5)) == pytest.approx(0.0, abs=1e-15)
        assert mutual_information(u, bsc(0.1), base=2) == pytest.approx(0.531004, abs=1e-6)

    def test_input_size_mismatch(self):
        with pytest.raises(DimensionError):
            mutual_information(Pmf.uniform(3), bsc(0.1))

    def test_units(self):
        assert to_units(math.log(2.0), "bits") == pytest.approx(1.0)
        assert to_units(0.3, "nats") == 0.3
        with pytest.raises(DomainError):
            to_units(1.0, "hartleys")


def _random_pmf(rng: np.random.Generator, n: int, floor: float = 0.0) -> Pmf:
    return Pmf.renormalized(rng.dirichlet(np.ones(n)) + floor)


class TestDivergenceInvariants:
    def test_kl_is_non_negative_and_vanishes_only_at_identity(self, rng):
        for _ in range(500):
            n = int(rng.integers(2, 9))
            q, p = _random_pmf(rng, n), _random_pmf(rng, n, floor=0.01)
            value = kl_divergence(q, p)
            assert value > 0.0
            assert kl_divergence(p, p) == 0.0

    def test_quadratic_sandwich(self, rng):
        worst_lower, worst_upper = math.inf, math.inf
        for _ in range(10_000):
            n = int(rng.integers(2, 9))
            p = _random_pmf(rng, n, floor=0.01)
            q = _random_pmf(rng, n)
            kl, chi2 = kl_divergence(q, p), chi_squared(q, p)
            worst_lower = min(worst_lower, kl - 0.5 * p.min_prob * chi2)
            worst_upper = min(worst_upper, chi2 - kl)
        assert worst_lower >= -1e-12
        assert worst_upper >= -1e-12


class TestMarginalInvariants:
    def test_output_marginal_is_linear(self, rng):
        for _ in range(200):
            nx, ny = int(rng.integers(2, 7)), int(rng.integers(2, 7))
            ch = TransitionMatrix(rng.dirichlet(np.ones(ny), size=nx).T)
            p1, p2 = _random_pmf(rng, nx), _random_pmf(rng, nx)
            alpha = float(rng.uniform())
            mixed = output_marginal(ch, Pmf.renormalized(alpha * p1.probs + (1 - alpha) * p2.probs))
            expected = alpha * output_marginal(ch, p1).probs + (1 - alpha) * output_marginal(ch, p2).probs
            np.testing.assert_allclose(mixed.probs, expected, atol=1e-12, rtol=0)

    def test_mutual_information_below_entropies(self, rng):
        for _ in range(500):
            nx, ny = int(rng.integers(2, 7)), int(rng.integers(2, 7))
            ch = TransitionMatrix(rng.dirichlet(np.ones(ny), size=nx).T)
            px = _random_pmf(rng, nx)
            mi = mutual_information(px, ch)
            assert 0.0 <= mi <= entropy(px) + 1e-12
            assert mi <= entropy(output_marginal(ch, px)) + 1e-12
