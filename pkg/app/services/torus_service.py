import cmath
import logging
import math
import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core import linalg
from app.core.config import settings
from app.core.exceptions import ModeRangeError, SchemaError, ThetaMismatch, ZeroElement
from app.core.scalars import ONE
from app.models.algebra import Algebra
from app.models.certificate import Certificate, failed, passed
from app.models.torus import AveragingReport, Mode, TorusElement
from app.services.algebra_service import AlgebraService
from app.services.constructor_service import cyclic_table

logger = logging.getLogger(__name__)

THETA_PRESETS = {
    "golden": (math.sqrt(5.0) - 1.0) / 2.0,
    "silver": math.sqrt(2.0) - 1.0,
}

# coefficient, then a product of u^k / v^m factors
_TERM = re.compile(r"\s*([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*\*?\s*((?:[uv](?:\^\(?-?\d+\)?)?\s*)*)")
_FACTOR = re.compile(r"([uv])(?:\^\(?(-?\d+)\)?)?")


def parse_theta(text: str) -> Tuple[float, Optional[Fraction]]:
    """"golden", "silver", "p/q" or a decimal; rationals keep their exact value."""
    key = text.strip().lower()
    if key in THETA_PRESETS:
        return THETA_PRESETS[key], None
    try:
        if "/" in key:
            frac = Fraction(key)
            return float(frac), frac
        value = float(key)
    except ValueError:
        raise SchemaError(f"cannot read theta from {text!r}", "$.theta")
    return value, None


class TorusService:
    """The u, v polynomial model of the noncommutative torus and its averages."""

    def __init__(self, algebras: Optional[AlgebraService] = None, max_mode: Optional[int] = None):
        self.algebras = algebras or AlgebraService()
        self.max_mode = max_mode or settings.TORUS_MAX_MODE

    # Elements

    def element(self, coeffs: Dict[Mode, complex], theta: float, rational: Optional[Fraction] = None) -> TorusElement:
        clean = {mode: complex(c) for mode, c in coeffs.items() if c != 0}
        for k, m in clean:
            if abs(k) > self.max_mode or abs(m) > self.max_mode:
                raise ModeRangeError(f"mode ({k}, {m}) exceeds |k|, |m| <= {self.max_mode}", [k, m])
        return TorusElement(theta=theta, coeffs=clean, rational=rational)

    def monomial(self, k: int, m: int, theta: float, rational: Optional[Fraction] = None, coeff: complex = 1.0) -> TorusElement:
        return self.element({(k, m): coeff}, theta, rational)

    def parse_element(self, text: str, theta: float, rational: Optional[Fraction] = None) -> TorusElement:
        """Read sums like "u+v", "2*u^-1 v^2 - 0.5" into an element."""
        total: Dict[Mode, complex] = {}
        pos, first = 0, True
        text = text.strip()
        while pos < len(text):
            match = _TERM.match(text, pos)
            sign, coeff, factors = match.groups()
            if match.end() == pos or (not coeff and not factors.strip()) or (sign is None and not first):
                raise SchemaError(f"cannot parse torus element near {text[pos:]!r}", "$.element")
            term = self.monomial(0, 0, theta, rational, (-1.0 if sign == "-" else 1.0) * (float(coeff) if coeff else 1.0))
            for letter, power in _FACTOR.findall(factors):
                p = int(power) if power else 1
                term = self._mul(term, self.monomial(p, 0, theta, rational) if letter == "u" else self.monomial(0, p, theta, rational))
            for mode, c in term.coeffs.items():
                total[mode] = total.get(mode, 0) + c
            pos, first = match.end(), False
        return self.element(total, theta, rational)

    def _phase(self, theta: float, rational: Optional[Fraction], x: int) -> complex:
        """e^{2 pi i theta x}, exact on the unit circle when theta x is an integer."""
        if rational is not None and (rational * x).denominator == 1:
            return 1.0 + 0j
        return cmath.exp(2j * math.pi * theta * x)

    def _mul_coeffs(self, theta: float, rational: Optional[Fraction], a: Dict[Mode, complex], b: Dict[Mode, complex]) -> Dict[Mode, complex]:
        out: Dict[Mode, complex] = {}
        for (k, m), c in a.items():
            for (k2, m2), d in b.items():
                key = (k + k2, m + m2)
                out[key] = out.get(key, 0) + c * d * self._phase(theta, rational, m * k2)
        return {mode: c for mode, c in out.items() if c != 0}

    def _mul(self, a: TorusElement, b: TorusElement) -> TorusElement:
        return TorusElement(theta=a.theta, coeffs=self._mul_coeffs(a.theta, a.rational, a.coeffs, b.coeffs), rational=a.rational)

    def torus_mul(self, a: TorusElement, b: TorusElement) -> TorusElement:
        """(u^k v^m)(u^k' v^m') = e^{2 pi i theta m k'} u^{k+k'} v^{m+m'}."""
        if a.theta != b.theta or a.rational != b.rational:
            raise ThetaMismatch(f"theta {a.theta} != {b.theta}", [a.theta, b.theta])
        product = self._mul(a, b)
        return self.element(product.coeffs, a.theta, a.rational)

    def torus_star(self, a: TorusElement) -> TorusElement:
        """(u^k v^m)^* = e^{2 pi i theta k m} u^-k v^-m, coefficients conjugated."""
        coeffs = {(-k, -m): c.conjugate() * self._phase(a.theta, a.rational, k * m) for (k, m), c in a.coeffs.items()}
        return self.element(coeffs, a.theta, a.rational)

    # Averages

    def dirichlet_factor(self, theta: float, x: int, n: int, rational: Optional[Fraction] = None) -> float:
        """D_n(x theta) = sin(pi (2n+1) x theta) / ((2n+1) sin(pi x theta)); 1 when x theta is an integer."""
        if x == 0 or (rational is not None and (rational * x).denominator == 1):
            return 1.0
        arg = math.pi * theta * x
        return math.sin((2 * n + 1) * arg) / ((2 * n + 1) * math.sin(arg))

    def _scale(self, a: TorusElement, n: int, on_k: bool) -> TorusElement:
        coeffs = {
            (k, m): c * self.dirichlet_factor(a.theta, k if on_k else m, n, a.rational)
            for (k, m), c in a.coeffs.items()
        }
        return self.element(coeffs, a.theta, a.rational)

    def phi1_partial(self, a: TorusElement, n: int) -> TorusElement:
        """(1/(2n+1)) sum_j u^j a u^-j: mode (k, m) scaled by D_n(m theta)."""
        if n < 0:
            raise ValueError("n must be >= 0")
        return self._scale(a, n, on_k=False)

    def phi2_partial(self, a: TorusElement, n: int) -> TorusElement:
        """(1/(2n+1)) sum_j v^j a v^-j: mode (k, m) scaled by D_n(k theta)."""
        if n < 0:
            raise ValueError("n must be >= 0")
        return self._scale(a, n, on_k=True)

    def torus_literal_average(self, a: TorusElement, n: int, generator: str) -> TorusElement:
        """Phi_1 (generator "u") or Phi_2 (generator "v") by explicit conjugation sums."""
        if generator not in ("u", "v"):
            raise ValueError("generator must be 'u' or 'v'")
        out: Dict[Mode, complex] = {}
        for j in range(-n, n + 1):
            before, after = ((j, 0), (-j, 0)) if generator == "u" else ((0, j), (0, -j))
            left = self._mul_coeffs(a.theta, a.rational, {before: 1.0 + 0j}, a.coeffs)
            for mode, c in self._mul_coeffs(a.theta, a.rational, left, {after: 1.0 + 0j}).items():
                out[mode] = out.get(mode, 0) + c
        return self.element({mode: c / (2 * n + 1) for mode, c in out.items()}, a.theta, a.rational)

    def resonant_modes(self, theta: float, rational: Optional[Fraction], ks: Sequence[int]) -> List[int]:
        """Modes k with k theta an integer; their Phi_2 factor is 1 for every n."""
        if rational is None:
            return []
        return [k for k in ks if k and (rational * k).denominator == 1]

    def simplicity_experiment(
        self,
        a: TorusElement,
        ns: Sequence[int],
        tolerance: float = 1e-3,
        literal_up_to: int = 512,
        factor_modes: Sequence[int] = tuple(range(1, 9)),
    ) -> AveragingReport:
        """c_n = Phi_1,n(Phi_2,n(a* a)) against nu * 1 with nu = sum |a_km|^2."""
        if a.is_zero():
            raise ZeroElement("the simplicity experiment needs a nonzero element", None)
        b = self.torus_mul(self.torus_star(a), a)
        nu = float(sum(abs(c) ** 2 for c in a.coeffs.values()))
        target = self.monomial(0, 0, a.theta, a.rational, nu)
        residuals, literal_dev = [], 0.0
        for n in ns:
            c_n = self.phi1_partial(self.phi2_partial(b, n), n)
            residuals.append(c_n.distance(target))
            if n <= literal_up_to:
                literal = self.torus_literal_average(self.torus_literal_average(b, n, "v"), n, "u")
                literal_dev = max(literal_dev, literal.distance(c_n))
        resonant = [mode for mode in b.support() if mode != (0, 0) and self._frozen(a, mode)]
        for mode in resonant:
            logger.warning("mode %s is fixed by both averages at theta = %s", mode, a.rational)
        flagged = self.resonant_modes(a.theta, a.rational, factor_modes)
        for k in flagged:
            logger.warning("Phi_2 factor of mode k = %d is 1 for all n at theta = %s", k, a.rational)
        factors = {f"k={k}": [self.dirichlet_factor(a.theta, k, n, a.rational) for n in ns] for k in factor_modes}
        ok = bool(residuals) and residuals[-1] < tolerance and not resonant
        if a.rational is not None:
            note = f"rational theta: modes {flagged} are not suppressed; the algebra is not simple"
        else:
            sines = [abs(math.sin(math.pi * a.theta * x)) for mode in b.support() for x in mode if x]
            note = f"min |sin(pi x theta)| over supported modes = {min(sines, default=1.0):.6g}"
        return AveragingReport(
            theta=a.theta, nu=nu, n=list(ns), residuals=residuals, factors=factors,
            literal_deviation=literal_dev, resonant_modes=resonant, passed=ok, note=note,
        )

    def _frozen(self, a: TorusElement, mode: Mode) -> bool:
        return all(x == 0 or (a.rational is not None and (a.rational * x).denominator == 1) for x in mode)

    # Finite models

    def clock_shift_check(self, N: int) -> Certificate:
        """Shift U, clock V with VU = e^{2 pi i / N} UV; u^k v^m -> U^k V^m is multiplicative at theta = 1/N."""
        if N < 2:
            raise ValueError("N must be >= 2")
        omega = cmath.exp(2j * math.pi / N)
        U = np.roll(np.eye(N, dtype=complex), 1, axis=0)
        V = np.diag([omega ** j for j in range(N)])
        relation = float(np.max(np.abs(V @ U - omega * U @ V)))
        rational = Fraction(1, N)

        def rep(x: TorusElement) -> np.ndarray:
            out = np.zeros((N, N), dtype=complex)
            for (k, m), c in x.coeffs.items():
                out += c * np.linalg.matrix_power(U, k % N) @ np.linalg.matrix_power(V, m % N)
            return out

        worst, witness = relation, None
        modes = [(k, m) for k in range(N) for m in range(N)]
        for k, m in modes:
            x = self.monomial(k, m, 1.0 / N, rational)
            for k2, m2 in modes:
                y = self.monomial(k2, m2, 1.0 / N, rational)
                dev = float(np.max(np.abs(rep(x) @ rep(y) - rep(self._mul(x, y)))))
                if dev > worst:
                    worst = dev
                if dev > 1e-10 and witness is None:
                    witness = {"modes": [[k, m], [k2, m2]], "deviation": dev}
        identity_ok = float(np.max(np.abs(rep(self.monomial(0, 0, 1.0 / N, rational)) - np.eye(N)))) <= 1e-12
        if witness is None and relation <= 1e-10 and identity_ok:
            return passed("clock_shift", N=N, relation_deviation=relation, max_deviation=worst)
        return failed("clock_shift", witness or {"relation_deviation": relation}, N=N, max_deviation=worst)

    def crossed_product_bridge(self, q: int) -> Certificate:
        """A(Z_q x| Z_q) for rotation equals C(Z_q) x| Z_q built from its product formula.

        1_x delta_g corresponds to the arrow (g, g^-1 x); the conjugation identity
        delta_g (1_y) delta_g^-1 = 1_{g y} is checked on every basis pair.
        """
        if q < 1:
            raise ValueError("q must be >= 1")
        constructors, groupoids = self.algebras.constructors, self.algebras.groupoids
        group = constructors.group_groupoid(cyclic_table(q), name=f"Z{q}")
        act = [[(x + g) % q for x in range(q)] for g in range(q)]
        G = constructors.action_groupoid(group, q, act)
        conv = self.algebras.as_algebra(groupoids.counting_haar(G))

        products = {}
        for g in range(q):
            for x in range(q):
                for h in range(q):
                    for y in range(q):
                        if x == act[g][y]:
                            products[(g * q + x, h * q + y)] = {group.mul(g, h) * q + x: ONE}
        crossed = Algebra(name=f"C(Z{q}) x| Z{q}", dim=q * q, products=products)
        mapping = {g * q + x: {g * q + act[group.inv[g]][x]: ONE} for g in range(q) for x in range(q)}
        certificate = self.algebras.check_algebra_iso(mapping, crossed, conv)
        if not certificate.passed:
            return certificate

        e = group.unit[0]
        for g in range(q):
            d_g = {g * q + x: ONE for x in range(q)}
            d_inv = {group.inv[g] * q + x: ONE for x in range(q)}
            for y in range(q):
                lhs = conv.multiply(conv.multiply(d_g, {e * q + y: ONE}), d_inv)
                rhs = {e * q + act[g][y]: ONE}
                if not linalg.same(lhs, rhs):
                    return failed("crossed_product", {"g": g, "y": y}, q=q, dim=q * q)
        return passed("crossed_product", q=q, dim=q * q, conjugation_pairs=q * q)
