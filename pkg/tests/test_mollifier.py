"""
Tests for Dirac sequences, fiber Dirac sequences and approximate units.
"""
import math

import numpy as np
import pytest

from app.core.config import MollifierTolerances
from app.core.exceptions import GridTooCoarse, QuadratureControlError
from app.models.mollifier import SampledFunction
from app.services.mollifier_service import Bump, MollifierService, default_test_functions, tilted_density


@pytest.fixture
def profile(mollifier):
    return mollifier.standard_profile(1)


class TestProfiles:
    """The standard bump normalized to unit integral."""

    @pytest.mark.parametrize("dim", [1, 2])
    def test_profile_moments(self, mollifier, dim):
        """The first moment of a unit-ball profile lies strictly between 0 and 1."""
        profile = mollifier.standard_profile(dim)
        assert profile.normalization > 0
        assert 0 < profile.first_moment < 1

    def test_unsupported_dimension(self, mollifier):
        """Only d = 1 and d = 2 are modelled."""
        with pytest.raises(ValueError):
            mollifier.standard_profile(3)

    def test_pairing_with_one(self, mollifier, profile):
        """eps_n integrates to 1 on the configured grids."""
        deviations = mollifier.normalization_check(profile, [1, 4, 16, 64])
        assert max(deviations) <= 1e-8

    def test_support(self, profile):
        """eps_n vanishes outside [-1/n, 1/n]."""
        y = np.array([-0.3, -0.2, 0.0, 0.2, 0.3])
        values = profile.scaled(4, y)
        assert values[0] == 0 and values[-1] == 0
        assert values[2] == pytest.approx(4 * math.exp(-1) / profile.normalization)

    def test_coarse_grid(self, mollifier, profile):
        """A fixed grid that does not resolve eps_n is refused."""
        coarse = SampledFunction(name="coarse", func=np.cos, h=0.5)
        with pytest.raises(GridTooCoarse):
            mollifier.dirac_pairing(coarse, profile, 1)

    def test_function_is_sampled_per_grid(self, mollifier, profile, mocker):
        """The callable is evaluated afresh on the refined grid."""
        func = mocker.Mock(side_effect=np.cos)
        f = SampledFunction(name="cos", func=func)
        coarse = mollifier.dirac_pairing(f, profile, 4)
        fine = mollifier.dirac_pairing(f, profile, 4, refine=2)
        sizes = [len(call.args[0]) for call in func.call_args_list]
        assert len(sizes) == 2 and sizes[1] > sizes[0]
        assert fine == pytest.approx(coarse, abs=1e-8)


class TestDiracRate:
    """|int f eps_n - f(0)| <= (C / n) sup|f'|."""

    def test_rate_holds(self, mollifier, profile):
        """Every default test function stays under its bound."""
        report = mollifier.dirac_rate_experiment(default_test_functions(), profile, [4, 8, 16, 32])
        assert report.passed
        assert report.details["max_ratio"] <= 1.0 + 1e-6
        constant = next(t for t in report.tables if t.name == "constant")
        assert max(constant.errors) < 1e-7

    def test_abs_is_sharp(self, mollifier, profile):
        """For f = |y| the error is exactly C / n."""
        report = mollifier.dirac_rate_experiment([SampledFunction(name="abs", func=np.abs, gradient_bound=1.0)], profile, [8, 16])
        assert report.tables[0].ratios == pytest.approx([1.0, 1.0], rel=1e-3)

    def test_quadrature_control(self, profile):
        """A grid-doubling tolerance that nothing can meet raises."""
        strict = MollifierService(MollifierTolerances(doubling_relative=0.0, doubling_floor=-1.0))
        with pytest.raises(QuadratureControlError):
            strict.dirac_rate_experiment(default_test_functions()[:1], profile, [4])


class TestLocalModels:
    """Partitions of unity, fiber Dirac sequences and the group R."""

    def test_patch_centers(self, mollifier):
        """Centers are spaced 0.5, ordered outward, and cover the margin."""
        centers = mollifier.patch_centers(2.0)
        assert centers[:3] == [0.0, 0.5, -0.5]
        assert max(centers) == 2.5 and min(centers) == -2.5

    def test_partition_of_unity(self, mollifier):
        """The chi_i sum to 1 on the window."""
        x = np.linspace(-2.0, 2.0, 81)
        chi = mollifier.partition_of_unity(x, mollifier.patch_centers(2.0))
        assert np.allclose(chi.sum(axis=0), 1.0)
        assert (chi >= 0).all()

    @pytest.mark.slow
    def test_fiber_dirac(self, mollifier, profile):
        """pi_*(f e_n) -> f(x, 0) for constant and varying fiber densities."""
        g = Bump(0.0, 2.0)
        functions = [
            SampledFunction(name="g(x)cos(y)", func=lambda x, y: g(x) * np.cos(y)),
            SampledFunction(name="g(x)y", func=lambda x, y: g(x) * y),
        ]
        ns = [1, 2, 4, 8, 16, 32]
        constant = mollifier.fiber_dirac_experiment(functions, profile, ns)
        varying = mollifier.fiber_dirac_experiment(functions, profile, ns, density=tilted_density)
        mass = mollifier.fiber_dirac_experiment(functions, profile, ns, density=tilted_density, normalization="mass")
        assert constant.passed and varying.passed and mass.passed
        assert varying.details["density"] == "custom"
        assert mass.details["normalization"] == "mass"
        for same, other in zip(constant.tables, varying.tables):
            # dividing by rho and integrating against rho cancels
            assert same.errors == pytest.approx(other.errors, abs=1e-12)
        linear_constant, linear_mass = constant.tables[1], mass.tables[1]
        assert max(linear_constant.errors[3:]) < 1e-12
        assert all(e > 1e-6 for e in linear_mass.errors[3:])
        assert linear_mass.errors[-1] < 1e-2

    def test_fiber_normalization_is_checked(self, mollifier, profile):
        """Unknown normalizations are refused."""
        with pytest.raises(ValueError):
            mollifier.fiber_dirac_experiment([], profile, [1], normalization="volume")

    def test_group_approx_unit(self, mollifier, profile):
        """a * eps_n -> a uniformly, with the same errors for a translate."""
        functions = [SampledFunction(name="bump", func=Bump(0.0)), SampledFunction(name="translated", func=Bump(0.37))]
        report = mollifier.group_approx_unit_demo(functions, profile, [1, 2, 4, 8, 16, 32])
        assert report.passed
        assert report.tables[0].errors == pytest.approx(report.tables[1].errors, abs=1e-9)
        assert "numerical evidence" in report.label
