import asyncio
import logging
import random
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from app.core import linalg
from app.core.config import settings
from app.core.exceptions import WorkbenchError
from app.core.scalars import ONE
from app.models.bibundle import Bibundle
from app.models.bornology import PolytopalDisk
from app.models.catalog import CatalogEntry, CatalogReport, EntryOutcome
from app.models.certificate import Certificate, failed, passed
from app.models.groupoid import HaarSystem
from app.models.mollifier import SampledFunction
from app.repositories.catalog_repository_interface import CatalogRepositoryInterface
from app.services.bimodule_service import BimoduleService
from app.services.bornology_service import REAL_CIRCLING_NOTE, BornologyService
from app.services.mollifier_service import Bump, MollifierService, default_test_functions, tilted_density
from app.services.random_instance_service import RandomInstanceService
from app.services.torus_service import TorusService, parse_theta

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0


def _all(name: str, certificates: List[Certificate], **details) -> Certificate:
    """Aggregate: passes iff every certificate passes; the first failure is the witness."""
    for index, certificate in enumerate(certificates):
        if not certificate.passed:
            return failed(name, {"instance": index, "certificate": certificate.name, "witness": certificate.witness}, count=len(certificates), **details)
    return passed(name, count=len(certificates), **details)


def _expect_failure(name: str, certificate: Certificate) -> Certificate:
    if certificate.passed:
        return failed(name, {"unexpectedly_passed": certificate.name})
    return passed(name, observed=certificate.witness)


class CatalogService:
    """Builds every catalog entry and runs its certificates."""

    def __init__(
        self,
        repository: CatalogRepositoryInterface,
        seed: Optional[int] = None,
        threads: Optional[int] = None,
        bimodules: Optional[BimoduleService] = None,
        bornology: Optional[BornologyService] = None,
        mollifier: Optional[MollifierService] = None,
        torus: Optional[TorusService] = None,
        random_instances: Optional[RandomInstanceService] = None,
    ):
        self.repository = repository
        self.seed = seed if seed is not None else (settings.SEED if settings.SEED is not None else DEFAULT_SEED)
        self.threads = threads or settings.THREADS
        self.bimodules = bimodules or BimoduleService()
        self.algebras = self.bimodules.algebras
        self.bibundles = self.bimodules.bibundles
        self.groupoids = self.algebras.groupoids
        self.constructors = self.algebras.constructors
        self.bornology = bornology or BornologyService()
        self.mollifier = mollifier or MollifierService()
        self.torus = torus or TorusService(self.algebras)
        self.random_instances = random_instances or RandomInstanceService(self.groupoids, self.constructors, self.bibundles)

    # Runner

    async def run_catalog(self, timings: bool = False) -> CatalogReport:
        entries = await self.repository.list_entries()
        semaphore = asyncio.Semaphore(self.threads)

        async def run(entry: CatalogEntry) -> EntryOutcome:
            async with semaphore:
                return await asyncio.to_thread(self.run_entry, entry, timings)

        outcomes = await asyncio.gather(*(run(entry) for entry in entries))
        return CatalogReport(entries=sorted(outcomes, key=lambda outcome: outcome.name), seed=self.seed)

    def run_entry(self, entry: CatalogEntry, timings: bool = False) -> EntryOutcome:
        logger.info("catalog entry %s started", entry.name)
        start = time.perf_counter()
        runner: Optional[Callable] = getattr(self, f"_run_{entry.kind}", None)
        error = None
        certificates: List[Certificate] = []
        if runner is None:
            error = {"error": f"unknown entry kind {entry.kind!r}"}
        else:
            try:
                certificates = runner(entry)
            except WorkbenchError as exc:
                logger.debug("catalog entry %s raised %s", entry.name, exc)
                error = exc.to_dict()
        by_name = {c.name: c for c in certificates}
        missing = [name for name in entry.expected if name not in by_name]
        ok = error is None and not missing and all(by_name[name].passed for name in entry.expected)
        elapsed = time.perf_counter() - start
        logger.info("catalog entry %s finished in %.3fs (%s)", entry.name, elapsed, "pass" if ok else "FAIL")
        return EntryOutcome(
            name=entry.name, kind=entry.kind, passed=ok, certificates=certificates,
            missing=missing, error=error, elapsed=round(elapsed, 3) if timings else None,
        )

    def _rng(self, entry: CatalogEntry) -> random.Random:
        return random.Random(f"{self.seed}:{entry.name}")

    def _counting(self, G) -> HaarSystem:
        return self.groupoids.counting_haar(G)

    # Algebras

    def _run_matrix_units(self, entry: CatalogEntry) -> List[Certificate]:
        n = entry.params["n"]
        haar = self._counting(self.constructors.pair_groupoid(n))
        table = self.algebras.structure_constants(haar).table
        expected = {
            (x * n + z, z * n + y): {x * n + y: ONE}
            for x in range(n) for z in range(n) for y in range(n)
        }
        same = set(table) == set(expected) and all(linalg.same(table[key], expected[key]) for key in expected)
        matrix_units = passed("matrix_units", nonzero=len(expected)) if same else failed("matrix_units", {"n": n})
        return [matrix_units, self.bimodules.self_induced_check(self.algebras.as_algebra(haar))]

    def _run_z2_split(self, entry: CatalogEntry) -> List[Certificate]:
        Z2 = self.constructors.z2_groupoid()
        A = self.algebras.as_algebra(self._counting(Z2))
        iso = self.algebras.check_algebra_iso(self.algebras.z2_split_map(), self.algebras.field_product(2), A)
        group = self.groupoids.orbits_and_isotropy(Z2)
        points = self.groupoids.orbits_and_isotropy(self.constructors.unit_groupoid(2))
        shape = lambda report: (len(report.orbits), report.isotropy_orders())
        details = {"Z2": shape(group), "two_points": shape(points)}
        distinguish = (
            passed("orbits_distinguish", **details)
            if shape(group) == (1, [2]) and shape(points) == (2, [1, 1])
            else failed("orbits_distinguish", details)
        )
        return [iso, distinguish, self.bimodules.self_induced_check(A)]

    def _run_tensor_iso(self, entry: CatalogEntry) -> List[Certificate]:
        G = self.constructors.from_shorthand(entry.params["first"])
        H = self.constructors.from_shorthand(entry.params["second"])
        return [self.algebras.tensor_algebra_iso(self._counting(G), self._counting(H)).certificate]

    def _run_haar_change(self, entry: CatalogEntry) -> List[Certificate]:
        G = self.constructors.from_shorthand(entry.params["groupoid"])
        source = self.groupoids.canonical_haar(G, [Fraction(u) for u in entry.params["u"]])
        _, certificate = self.algebras.haar_change_iso(source, self._counting(G))
        return [certificate]

    def _run_orbit_ideal(self, entry: CatalogEntry) -> List[Certificate]:
        G = self.constructors.from_shorthand(entry.params["groupoid"])
        A = self.algebras.as_algebra(self._counting(G))
        ideal = self.algebras.ideal_check(A, self.algebras.orbit_ideal(G, entry.params["objects"]))
        non_unit = next(g for g in range(G.n_arrows) if G.src[g] != G.tgt[g])
        return [ideal, _expect_failure("non_ideal_detected", self.algebras.ideal_check(A, [{non_unit: ONE}]))]

    def _run_separability(self, entry: CatalogEntry) -> List[Certificate]:
        A = self.algebras.as_algebra(self._counting(self.constructors.from_shorthand(entry.params["groupoid"])))
        certificates = []
        for side in ("left", "right", "bimodule"):
            result = self.algebras.find_separability_section(A, side)
            name = f"separable_{side}"
            certificates.append(passed(name) if result.found else failed(name, {"note": result.note}))
        zero = self.algebras.find_separability_section(self.algebras.zero_algebra(1), "bimodule")
        certificates.append(
            passed("zero_algebra_not_separable", note=zero.note) if not zero.found else failed("zero_algebra_not_separable", {"found": True})
        )
        return certificates

    # Bimodules

    def _morita_bibundle(self, params: dict) -> Bibundle:
        shorthand = {key: value for key, value in params.items() if key not in ("bibundle", "blocks")}
        return self.bibundles.from_shorthand({"kind": params["bibundle"], **shorthand}, "$.params")

    def _run_morita(self, entry: CatalogEntry) -> List[Certificate]:
        P = self._morita_bibundle(entry.params)
        left, right = self._counting(P.left), self._counting(P.right)
        certificates = self.bimodules.morita_check(P, left, right)
        MP = self.bimodules.conv_bimodule(P, left, right)
        certificates += [
            self.bimodules.smoothness_check(MP, "left"),
            self.bimodules.smoothness_check(MP, "right"),
            self.bimodules.nondegeneracy_class(MP, "left"),
            self.bimodules.nondegeneracy_class(MP, "right"),
            self.bimodules.projectivity_report(MP, "right"),
            self.bimodules.dagger_matches_opposite(P, left, right),
        ]
        if entry.params["bibundle"] == "cech":
            certificates.append(self._cech_dimension(entry.params, certificates))
        return certificates

    def _cech_dimension(self, params: dict, certificates: List[Certificate]) -> Certificate:
        """dim M(P) (x) M(P^dagger) = sum over x of (number of sets containing x)^2."""
        blocks = [sum(1 for U in params["cover"] if x in U) ** 2 for x in range(params["points"])]
        tau = next((c for c in certificates if c.name == "morita_left_tau_hat"), None)
        tensor_dim = tau.details.get("tensor_dim") if tau is not None else None
        details = {"blocks": blocks, "tensor_dim": tensor_dim}
        if blocks == params["blocks"] and tensor_dim == sum(blocks):
            return passed("cech_dimension", **details)
        return failed("cech_dimension", details)

    def _run_zero_action(self, entry: CatalogEntry) -> List[Certificate]:
        A = self.algebras.as_algebra(self._counting(self.constructors.from_shorthand(entry.params["groupoid"])))
        M = self.bimodules.zero_action_module(A, entry.params["dim"])
        smooth = self.bimodules.smoothness_check(M, "left")
        degenerate = self.bimodules.nondegeneracy_class(M, "left")
        section = self.bimodules.find_module_section(M, "right")
        no_section = passed("zero_action_no_section", note=section.note) if not section.found else failed("zero_action_no_section", {"found": True})
        return [
            smooth,
            _expect_failure("zero_action_not_smooth", smooth),
            _expect_failure("zero_action_degenerate", degenerate),
            no_section,
        ]

    def _tau_pair(self, name: str):
        C = self.constructors
        if name == "point_terminal":
            G = C.pair_groupoid(2)
            return self.bibundles.point_bibundle(G, 1), self.bibundles.terminal_bibundle(G)
        if name == "anchor_terminal":
            P = self.bibundles.anchor_bibundle(C.from_shorthand({"kind": "cech", "points": 3, "cover": [[0, 1], [1, 2]]}))
            return P, self.bibundles.terminal_bibundle(P.right)
        if name == "cech_roundtrip":
            P = self.bibundles.hom_bibundle(C.cech_projection([[0, 1], [1, 2]], 3))
            return P, self.bibundles.opposite_bibundle(P)
        if name == "transversal":
            G = C.product_groupoid(C.pair_groupoid(3), C.z2_groupoid())
            Q = self.bibundles.hom_bibundle(C.inclusion_hom(G, [0]))
            return self.bibundles.opposite_bibundle(Q), Q
        raise ValueError(f"unknown pair {name!r}")

    def _haars(self, *groupoids) -> List[HaarSystem]:
        """Canonical Haar systems with u(x) = x + 1, so weights are not all 1."""
        return [self.groupoids.canonical_haar(G, [Fraction(x + 1) for x in range(G.n_objects)]) for G in groupoids]

    def _run_tau_pair(self, entry: CatalogEntry) -> List[Certificate]:
        P, Q = self._tau_pair(entry.params["pair"])
        h0, h1, h2 = self._haars(P.left, P.right, Q.right)
        MP = self.bimodules.conv_bimodule(P, h0, h1)
        MQ = self.bimodules.conv_bimodule(Q, h1, h2)
        return [self.bimodules.tau_hat(MP, MQ).certificate]

    def _run_tau_coherence(self, entry: CatalogEntry) -> List[Certificate]:
        G = self.constructors.pair_groupoid(2)
        P = self.bibundles.point_bibundle(G, 0)
        Q = self.bibundles.identity_bibundle(G)
        R = self.bibundles.terminal_bibundle(G)
        point, g, terminal = self._haars(P.left, G, R.right)
        MP = self.bimodules.conv_bimodule(P, point, g)
        MQ = self.bimodules.conv_bimodule(Q, g, g)
        MR = self.bimodules.conv_bimodule(R, g, terminal)
        coherence = self.bimodules.tau_coherence_check(MP, MQ, MR)
        Q2 = self.bibundles.hom_bibundle(self.constructors.identity_hom(G))
        psi = self.bibundles.find_biequivariant_iso(Q, Q2)
        if psi is None:
            return [coherence, failed("tau_naturality", {"reason": "identity bibundles are not isomorphic"})]
        MQ2 = self.bimodules.conv_bimodule(Q2, g, g)
        naturality = self.bimodules.tau_naturality_check(MP, MP, MQ, MQ2, list(range(P.n_points)), list(psi.mapping))
        return [coherence, naturality]

    # Bibundles and homomorphisms

    def _run_hom_morita(self, entry: CatalogEntry) -> List[Certificate]:
        C = self.constructors
        S3 = C.named_group("S3")
        homs = [
            C.identity_hom(S3),
            C.terminal_hom(C.pair_groupoid(3)),
            C.terminal_hom(C.z2_groupoid()),
            C.inclusion_hom(C.pair_groupoid(3), [0]),
            C.cech_projection([[0, 1], [1, 2]], 3),
            C.diagonal_hom(C.z2_groupoid()),
            C.anchor_hom(C.pair_groupoid(2)),
            C.point_hom(C.pair_groupoid(2), 0),
        ]
        criteria = [self.bibundles.hom_morita_shadow(phi) for phi in homs]
        principal = [self.bibundles.is_right_principal(self.bibundles.hom_bibundle(phi)) for phi in homs]
        principal_certs = [
            passed("right_principal") if c.passed else failed("right_principal", c.failures()) for c in principal
        ]
        return [
            _all("hom_morita_criterion", criteria, morita=[c.details.get("is_morita") for c in criteria]),
            _all("hom_bibundles_principal", principal_certs),
        ]

    def _run_natural_equivalence(self, entry: CatalogEntry) -> List[Certificate]:
        G = self.constructors.pair_groupoid(2)
        phi = self.constructors.point_hom(G, 0)
        psi = self.constructors.point_hom(G, 1)
        # tau_0 is the arrow 0 -> 1 of pair(2), at index t * n + s = 2
        return [self.bibundles.natural_equivalence_check(phi, psi, [2])]

    # Torus

    def _run_crossed_product(self, entry: CatalogEntry) -> List[Certificate]:
        return [self.torus.crossed_product_bridge(entry.params["q"])]

    def _run_clock_shift(self, entry: CatalogEntry) -> List[Certificate]:
        return [self.torus.clock_shift_check(entry.params["N"])]

    def _run_torus_dirichlet(self, entry: CatalogEntry) -> List[Certificate]:
        T = self.torus
        half = Fraction(1, 2)
        factor = T.dirichlet_factor(float(half), 1, 1, half)
        phi2 = passed("phi2_factor", value=factor) if abs(factor + 1 / 3) <= 1e-12 else failed("phi2_factor", {"value": factor})

        worst = 0.0
        thetas = [parse_theta("golden"), parse_theta("1/2"), parse_theta("1/3")]
        for theta, rational in thetas:
            for k in range(-8, 9):
                a = T.monomial(k, 1, theta, rational)
                for n in (0, 1, 2, 7, 64, 512):
                    worst = max(
                        worst,
                        T.phi1_partial(a, n).distance(T.torus_literal_average(a, n, "u")),
                        T.phi2_partial(a, n).distance(T.torus_literal_average(a, n, "v")),
                    )
        literal = passed("closed_form_literal", max_deviation=worst) if worst <= 1e-10 else failed("closed_form_literal", {"max_deviation": worst})

        theta, rational = thetas[0]
        one = T.monomial(0, 0, theta, rational)
        bounded = all(abs(T.dirichlet_factor(theta, k, n)) <= 1.0 + 1e-15 for k in range(-8, 9) for n in range(0, 64))
        unital = all(T.phi1_partial(one, n).distance(one) == 0 and T.phi2_partial(one, n).distance(one) == 0 for n in range(0, 8))
        averages = passed("averages_unital", bounded=bounded) if unital and bounded else failed("averages_unital", {"unital": unital, "bounded": bounded})
        return [phi2, literal, averages]

    def _torus_ns(self, n_max: int) -> List[int]:
        ns, n = [], 1
        while n < n_max:
            ns.append(n)
            n *= 2
        return ns + [n_max]

    def _run_torus_simplicity(self, entry: CatalogEntry) -> List[Certificate]:
        theta, rational = parse_theta(entry.params["theta"])
        a = self.torus.parse_element(entry.params["element"], theta, rational)
        report = self.torus.simplicity_experiment(a, self._torus_ns(entry.params["n_max"]))
        details = {"nu": report.nu, "final_residual": report.residuals[-1], "literal_deviation": report.literal_deviation}
        simplicity = passed("simplicity", **details) if report.passed and report.literal_deviation <= 1e-10 else failed("simplicity", details)
        b = self.torus.torus_mul(self.torus.torus_star(a), a)
        expected = sum(abs(c) ** 2 for c in a.coeffs.values())
        gap = abs(b.coefficient(0, 0) - expected)
        parseval = passed("parseval", nu=expected) if gap <= 1e-12 else failed("parseval", {"gap": gap})
        return [simplicity, parseval]

    def _run_torus_resonance(self, entry: CatalogEntry) -> List[Certificate]:
        theta, rational = parse_theta(entry.params["theta"])
        k = entry.params["k"]
        ns = list(range(0, 65))
        factors = [self.torus.dirichlet_factor(theta, k, n, rational) for n in ns]
        a = self.torus.element({(0, 0): 1.0, (k, 0): 1.0}, theta, rational)
        report = self.torus.simplicity_experiment(a, ns[1:])
        frozen = all(f == 1.0 for f in factors)
        details = {"k": k, "resonant_modes": [list(mode) for mode in report.resonant_modes], "note": report.note}
        if frozen and report.resonant_modes and not report.passed:
            return [passed("resonance_detected", **details)]
        return [failed("resonance_detected", {"factors_frozen": frozen}, **details)]

    # Mollifiers

    def _run_dirac_rate(self, entry: CatalogEntry) -> List[Certificate]:
        ns = entry.params["n"]
        profile = self.mollifier.standard_profile(1)
        deviations = self.mollifier.normalization_check(profile, ns)
        report = self.mollifier.dirac_rate_experiment(default_test_functions(), profile, ns)
        rate = passed("dirac_rate", **report.details) if report.passed else failed("dirac_rate", report.details)
        return [passed("normalization", max_deviation=max(deviations)), rate]

    def _run_fiber_dirac(self, entry: CatalogEntry) -> List[Certificate]:
        ns = entry.params["n"]
        profile = self.mollifier.standard_profile(1)
        g = Bump(0.0, 2.0)
        functions = [
            SampledFunction(name="g(x)", func=lambda x, y: g(x) * np.ones_like(y)),
            SampledFunction(name="g(x)cos(y)", func=lambda x, y: g(x) * np.cos(y)),
            SampledFunction(name="g(x)y", func=lambda x, y: g(x) * y),
        ]
        runs = {
            "fiber_dirac_constant": self.mollifier.fiber_dirac_experiment(functions, profile, ns),
            "fiber_dirac_varying": self.mollifier.fiber_dirac_experiment(functions, profile, ns, density=tilted_density),
            "fiber_dirac_mass": self.mollifier.fiber_dirac_experiment(
                functions, profile, ns, density=tilted_density, normalization="mass",
            ),
        }
        certificates = []
        for name, report in runs.items():
            final = {t.name: t.errors[-1] for t in report.tables}
            certificates.append(passed(name, final_errors=final, **report.details) if report.passed else failed(name, final))
        constant, mass = runs["fiber_dirac_constant"].tables, runs["fiber_dirac_mass"].tables
        gap = max(abs(a - b) for s, t in zip(constant, mass) for a, b in zip(s.errors, t.errors))
        sensitive = passed("fiber_density_enters", max_gap=gap) if gap > 1e-8 else failed("fiber_density_enters", {"max_gap": gap})
        return certificates + [sensitive]

    def _run_group_approx_unit(self, entry: CatalogEntry) -> List[Certificate]:
        ns = entry.params["n"]
        profile = self.mollifier.standard_profile(1)
        functions = [SampledFunction(name="bump", func=Bump(0.0)), SampledFunction(name="translated bump", func=Bump(0.37))]
        report = self.mollifier.group_approx_unit_demo(functions, profile, ns)
        final = {t.name: t.errors[-1] for t in report.tables}
        unit = passed("group_approx_unit", final_errors=final) if report.passed else failed("group_approx_unit", final)
        gap = max(abs(a - b) for a, b in zip(report.tables[0].errors, report.tables[1].errors))
        invariant = passed("translation_invariant", max_gap=gap) if gap <= 1e-9 else failed("translation_invariant", {"max_gap": gap})
        return [unit, invariant]

    # Bornology

    def _run_gauge_example(self, entry: CatalogEntry) -> List[Certificate]:
        D = PolytopalDisk(dim=2, generators=((1, 0), (0, 1)))
        half = Fraction(1, 2)
        gauge = self.bornology.disked_hull_gauge(D, (half, half))
        value = passed("gauge_value", value=str(gauge.value)) if gauge.value == 1 else failed("gauge_value", {"value": str(gauge.value)})
        circled = self.bornology.circled_hull_membership(D.generators, (half, -half))
        circled_cert = passed("circled_hull", note=REAL_CIRCLING_NOTE) if circled else failed("circled_hull", {"point": ["1/2", "-1/2"]}, note=REAL_CIRCLING_NOTE)
        return [value, self.bornology.is_norming(D), circled_cert]

    def _run_mackey_example(self, entry: CatalogEntry) -> List[Certificate]:
        D = PolytopalDisk(dim=2, generators=((1, 0), (0, 1)))
        seq = [(Fraction(1, n), Fraction(0)) for n in range(1, 65)]
        rate = self.bornology.mackey_rate(seq, (0, 0), D)
        details = {"slope": rate.slope, "convergent": rate.convergent}
        if rate.slope is not None and abs(rate.slope + 1) <= 0.05:
            return [passed("mackey_rate", **details)]
        return [failed("mackey_rate", details)]

    # Randomized suites

    def _run_random_groupoids(self, entry: CatalogEntry) -> List[Certificate]:
        rng = self._rng(entry)
        R, C = self.random_instances, self.constructors
        axioms, haar, opposite, full = [], [], [], []
        for _ in range(settings.RANDOM_TRIPLES * 2):
            G = R.random_groupoid(rng, 50)
            try:
                self.groupoids.validate_groupoid(G)
                axioms.append(passed("axioms"))
            except WorkbenchError as exc:
                axioms.append(failed("axioms", exc.to_dict()))
            weights = R.random_weights(rng, G)
            depends_on_target = all(weights[h] == weights[G.unit[G.tgt[h]]] for h in range(G.n_arrows))
            try:
                self.groupoids.validate_haar(G, weights)
                accepted = True
            except WorkbenchError:
                accepted = False
            haar.append(passed("haar") if accepted == depends_on_target else failed("haar", {"accepted": accepted}))
            twice = C.opposite_groupoid(C.opposite_groupoid(G))
            opposite.append(passed("opposite") if twice.tables() == G.tables() else failed("opposite", None))
            sub = C.full_subgroupoid(G, range(G.n_objects))
            full.append(passed("full") if sub.tables() == G.tables() else failed("full", None))
        return [
            _all("groupoid_axioms", axioms, seed=self.seed),
            _all("haar_invariance", haar, seed=self.seed),
            _all("opposite_involution", opposite, seed=self.seed),
            _all("full_subgroupoid_identity", full, seed=self.seed),
        ]

    def _run_random_convolution(self, entry: CatalogEntry) -> List[Certificate]:
        rng = self._rng(entry)
        R = self.random_instances
        results: Dict[str, List[Certificate]] = {}
        for _ in range(settings.RANDOM_TRIPLES):
            G = R.random_groupoid(rng, 60)
            haar = R.random_haar(rng, G)
            a, b, c = (self.algebras.element(haar, R.random_vector(rng, G)) for _ in range(3))
            for certificate in self.algebras.convolution_laws(a, b, c):
                results.setdefault(certificate.name, []).append(certificate)
        return [_all(f"convolution_{name}", certificates, seed=self.seed) for name, certificates in results.items()]

    def _conv_chain(self, chain) -> List:
        return [
            self.bimodules.conv_bimodule(P, chain.haars[i], chain.haars[i + 1])
            for i, P in enumerate(chain.bibundles)
        ]

    def _run_random_tau(self, entry: CatalogEntry) -> List[Certificate]:
        rng = self._rng(entry)
        results, steps = [], {}
        for _ in range(settings.RANDOM_PAIRS):
            chain = self.random_instances.random_chain(rng, 2)
            for kind in chain.steps:
                steps[kind] = steps.get(kind, 0) + 1
            MP, MQ = self._conv_chain(chain)
            results.append(self.bimodules.tau_hat(MP, MQ).certificate)
        return [_all("tau_hat_random", results, seed=self.seed, steps=dict(sorted(steps.items())))]

    def _run_random_coherence(self, entry: CatalogEntry) -> List[Certificate]:
        rng = self._rng(entry)
        results = []
        for _ in range(settings.RANDOM_TRIPLES):
            chain = self.random_instances.random_chain(rng, 3)
            MP, MQ, MR = self._conv_chain(chain)
            results.append(self.bimodules.tau_coherence_check(MP, MQ, MR))
        return [_all("tau_coherence_random", results, seed=self.seed)]

    def _run_random_gauge(self, entry: CatalogEntry) -> List[Certificate]:
        rng = self._rng(entry)
        gauge = self.bornology.disked_hull_gauge
        homogeneity, triangle = [], []
        for _ in range(settings.RANDOM_GAUGE_INSTANCES):
            D, v, w, s = self.random_instances.random_gauge_instance(rng)
            gv, gw = gauge(D, v).value, gauge(D, w).value
            gs = gauge(D, [s * c for c in v]).value
            gvw = gauge(D, [a + b for a, b in zip(v, w)]).value
            if s == 0:
                ok = gs == 0
            else:
                ok = (gv is None and gs is None) or (gv is not None and gs == abs(s) * gv)
            homogeneity.append(passed("homogeneity") if ok else failed("homogeneity", {"scale": str(s)}))
            if gv is None or gw is None:
                ok = True
            else:
                ok = gvw is not None and gvw <= gv + gw
            triangle.append(passed("triangle") if ok else failed("triangle", {"v": [str(c) for c in v], "w": [str(c) for c in w]}))
        return [_all("gauge_homogeneity", homogeneity, seed=self.seed), _all("gauge_triangle", triangle, seed=self.seed)]
