import logging
import math
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np
from scipy.integrate import quad, simpson

from app.core.config import MollifierTolerances, settings
from app.core.exceptions import GridTooCoarse, QuadratureControlError
from app.models.mollifier import BumpProfile, ErrorTable, ExperimentReport, SampledFunction

logger = logging.getLogger(__name__)

PATCH_SPACING = 0.5
PATCH_RADIUS = 0.5
FIBER_NORMALIZATIONS = ("pointwise", "mass")


def _raw_bump(r: float) -> float:
    return math.exp(-1.0 / (1.0 - r * r)) if abs(r) < 1.0 else 0.0


def _bump_array(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def _even_grid(lo: float, hi: float, h: float) -> np.ndarray:
    """Uniform grid on [lo, hi] with an even number of intervals and spacing <= h."""
    intervals = max(2, int(math.ceil((hi - lo) / h)))
    intervals += intervals % 2
    return np.linspace(lo, hi, intervals + 1)


def default_test_functions() -> List[SampledFunction]:
    return [
        SampledFunction(name="constant", func=lambda y: np.ones_like(y), gradient_bound=0.0),
        SampledFunction(name="linear", func=lambda y: 1.0 + 2.0 * y, gradient_bound=2.0),
        SampledFunction(name="cos", func=np.cos, gradient_bound=math.sin(1.0)),
        SampledFunction(name="abs", func=np.abs, gradient_bound=1.0),
    ]


def tilted_density(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Strictly positive fiber density, not even in y."""
    return np.exp(0.5 * np.sin(x) + y)


class MollifierService:
    """Dirac sequences, fiber Dirac sequences and approximate units in local models."""

    def __init__(self, tolerances: Optional[MollifierTolerances] = None):
        self.tol = tolerances or settings.MOLLIFIER

    def standard_profile(self, dim: int = 1) -> BumpProfile:
        if dim == 1:
            z = quad(_raw_bump, -1.0, 1.0, epsabs=1e-14, epsrel=1e-14)[0]
            m1 = 2.0 * quad(lambda r: r * _raw_bump(r), 0.0, 1.0, epsabs=1e-14, epsrel=1e-14)[0] / z
        elif dim == 2:
            z = 2.0 * math.pi * quad(lambda r: r * _raw_bump(r), 0.0, 1.0, epsabs=1e-14, epsrel=1e-14)[0]
            m1 = 2.0 * math.pi * quad(lambda r: r * r * _raw_bump(r), 0.0, 1.0, epsabs=1e-14, epsrel=1e-14)[0] / z
        else:
            raise ValueError("profiles exist for d = 1 and d = 2")
        profile = BumpProfile(dim=dim, normalization=z, first_moment=m1)
        check = self._profile_integral(profile)
        if abs(check - 1.0) > self.tol.profile:
            raise QuadratureControlError("profile normalization failed", check)
        return profile

    def _profile_integral(self, profile: BumpProfile) -> float:
        if profile.dim == 1:
            return quad(lambda r: float(profile(np.array([r]))[0]), -1.0, 1.0, epsabs=1e-14, epsrel=1e-14)[0]
        return 2.0 * math.pi * quad(lambda r: r * float(profile(np.array([[r, 0.0]]))[0]), 0.0, 1.0, epsabs=1e-14, epsrel=1e-14)[0]

    def _spacing(self, f: SampledFunction, n: int, refine: int = 1) -> float:
        h = f.h if f.h is not None else self.tol.resolution / n
        if h * n > self.tol.max_h_times_n:
            raise GridTooCoarse(f"grid spacing h = {h} does not resolve eps_{n} (h*n > {self.tol.max_h_times_n})", [h, n])
        return h / refine

    def dirac_pairing(self, f: SampledFunction, profile: BumpProfile, n: int, refine: int = 1) -> float:
        """Composite Simpson value of the integral of f * eps_n."""
        if n < 1:
            raise ValueError("n must be >= 1")
        h = self._spacing(f, n, refine)
        y = _even_grid(-1.0 / n, 1.0 / n, h)
        if profile.dim == 1:
            return float(simpson(f(y) * profile.scaled(n, y), x=y))
        Y1, Y2 = np.meshgrid(y, y, indexing="ij")
        values = f(Y1, Y2) * profile.scaled(n, np.stack([Y1, Y2], axis=-1))
        return float(simpson(simpson(values, x=y, axis=1), x=y))

    def normalization_check(self, profile: BumpProfile, ns: Iterable[int]) -> List[float]:
        one = SampledFunction(name="one", func=(lambda *ys: np.ones_like(ys[0])), dim=profile.dim)
        deviations = [abs(self.dirac_pairing(one, profile, n) - 1.0) for n in ns]
        worst = max(deviations, default=0.0)
        if worst > self.tol.normalization:
            raise QuadratureControlError("eps_n does not integrate to 1", worst)
        return deviations

    def _control(self, name: str, coarse: Sequence[float], fine: Sequence[float]) -> None:
        """Grid doubling must move every error by less than the relative tolerance."""
        for k, (a, b) in enumerate(zip(coarse, fine)):
            if abs(a - b) > self.tol.doubling_relative * max(abs(a), abs(b)) + self.tol.doubling_floor:
                logger.error("quadrature control failed for %s at position %d: %g vs %g", name, k, a, b)
                raise QuadratureControlError(f"grid doubling changed the {name} error from {a} to {b}", [name, k])

    def dirac_rate_experiment(self, functions: Sequence[SampledFunction], profile: BumpProfile, ns: Sequence[int]) -> ExperimentReport:
        """|int f eps_n - f(0)| <= (C / n) sup|f'| with C = int |y| eps(y) dy."""
        C = profile.first_moment
        tables, ok = [], True
        for f in functions:
            f0 = float(f(np.array([0.0]))[0])
            errors = [abs(self.dirac_pairing(f, profile, n) - f0) for n in ns]
            refined = [abs(self.dirac_pairing(f, profile, n, refine=2) - f0) for n in ns]
            self._control(f.name, errors, refined)
            bounds = [C * f.gradient_bound / n for n in ns]
            ratios = [e / b if b > 0 else 0.0 for e, b in zip(errors, bounds)]
            holds = all(e <= b * (1.0 + 1e-6) + self.tol.normalization for e, b in zip(errors, bounds))
            ok = ok and holds
            tables.append(ErrorTable(name=f.name, n=list(ns), errors=errors, bounds=bounds, ratios=ratios, refined_errors=refined))
        return ExperimentReport(
            experiment="dirac_rate", passed=ok, tables=tables,
            details={"C": C, "max_ratio": max((max(t.ratios, default=0.0) for t in tables), default=0.0)},
        )

    # Fiber Dirac sequence on the trivial bundle R x R -> R

    def patch_centers(self, half_width: float) -> List[float]:
        """Centers spaced 0.5 covering [-half_width - 0.5, half_width + 0.5], ordered outward."""
        k_max = int(math.ceil((half_width + PATCH_RADIUS) / PATCH_SPACING))
        order = [0]
        for k in range(1, k_max + 1):
            order += [k, -k]
        return [k * PATCH_SPACING for k in order]

    def partition_of_unity(self, x: np.ndarray, centers: Sequence[float]) -> np.ndarray:
        """chi_i(x) = psi_i(x) / sum_j psi_j(x); rows follow ``centers``."""
        psi = np.array([_bump_array((x - c) / PATCH_RADIUS) for c in centers])
        total = psi.sum(axis=0)
        return psi / np.where(total > 0, total, 1.0)

    def fiber_dirac_experiment(
        self,
        functions: Sequence[SampledFunction],
        profile: BumpProfile,
        ns: Sequence[int],
        density: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
        half_width: float = 2.0,
        normalization: str = "pointwise",
    ) -> ExperimentReport:
        """sup_x |pi_*(f e_n)(x) - f(x, 0)| where pi_* integrates along y against rho.

        ``pointwise``: e_n = sum_{i<=n} chi_i(x) eps_n(y) / rho(x, y), so rho
        cancels in pi_* up to rounding. ``mass``: e_n = sum_{i<=n} chi_i(x)
        eps_n(y) / m_n(x) with m_n(x) = int eps_n(y) rho(x, y) dy, so pi_*
        averages f against eps_n * rho and the density changes the errors.
        """
        if normalization not in FIBER_NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {FIBER_NORMALIZATIONS}")
        rho = density or (lambda x, y: np.ones(np.broadcast(x, y).shape))
        centers = self.patch_centers(half_width)
        x = np.linspace(-half_width, half_width, 401)
        chi = self.partition_of_unity(x, centers)

        def errors_at(refine: int, f: SampledFunction) -> List[float]:
            out = []
            for n in ns:
                h = self._spacing(f, n, refine)
                y = _even_grid(-1.0 / n, 1.0 / n, h)
                X, Y = np.meshgrid(x, y, indexing="ij")
                weight = chi[: min(n, len(centers))].sum(axis=0)
                r = rho(X, Y)
                eps = profile.scaled(n, Y)
                if normalization == "mass":
                    mass = simpson(eps * r, x=y, axis=1)
                    e_n = weight[:, None] * eps / mass[:, None]
                else:
                    e_n = weight[:, None] * eps / r
                pushed = simpson(f(X, Y) * e_n * r, x=y, axis=1)
                out.append(float(np.max(np.abs(pushed - f(x, np.zeros_like(x))))))
            return out

        tables, ok = [], True
        for f in functions:
            errors, refined = errors_at(1, f), errors_at(2, f)
            self._control(f.name, errors, refined)
            ok = ok and self._decays(errors)
            tables.append(ErrorTable(name=f.name, n=list(ns), errors=errors, refined_errors=refined))
        return ExperimentReport(
            experiment="fiber_dirac", passed=ok, tables=tables,
            details={
                "patches": len(centers), "half_width": half_width,
                "density": "custom" if density else "constant", "normalization": normalization,
            },
        )

    def group_approx_unit_demo(self, functions: Sequence[SampledFunction], profile: BumpProfile, ns: Sequence[int], half_width: float = 1.5) -> ExperimentReport:
        """sup_x |(a * eps_n)(x) - a(x)| for convolution on the group R."""
        x0 = np.linspace(-half_width, half_width, 601)

        def errors_at(refine: int, a: SampledFunction) -> List[float]:
            shift = getattr(a.func, "shift", 0.0)
            x = x0 + shift
            out = []
            for n in ns:
                h = self._spacing(a, n, refine)
                y = _even_grid(-1.0 / n, 1.0 / n, h)
                conv = simpson(a(x[:, None] - y[None, :]) * profile.scaled(n, y)[None, :], x=y, axis=1)
                out.append(float(np.max(np.abs(conv - a(x)))))
            return out

        tables, ok = [], True
        for a in functions:
            errors, refined = errors_at(1, a), errors_at(2, a)
            self._control(a.name, errors, refined)
            ok = ok and self._decays(errors)
            tables.append(ErrorTable(name=a.name, n=list(ns), errors=errors, refined_errors=refined))
        return ExperimentReport(experiment="group_approx_unit", passed=ok, tables=tables)

    def _decays(self, errors: Sequence[float]) -> bool:
        """Eventually nonincreasing over the second half of the range, ending below target."""
        if not errors:
            return True
        tail = errors[len(errors) // 2:]
        monotone = all(b <= a + self.tol.doubling_floor for a, b in zip(tail, tail[1:]))
        return monotone and errors[-1] < self.tol.decay_target


class Bump:
    """Callable bump a(x) = exp(-1/(1 - (x - shift)^2)), remembering its shift."""

    def __init__(self, shift: float = 0.0, width: float = 1.0):
        self.shift = shift
        self.width = width

    def __call__(self, x):
        return _bump_array((np.asarray(x, dtype=float) - self.shift) / self.width)

