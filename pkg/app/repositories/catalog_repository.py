from typing import List, Optional, Sequence

from app.models.catalog import CatalogEntry
from app.repositories.catalog_repository_interface import CatalogRepositoryInterface

MORITA_EXPECTED = [
    "biprincipal",
    "morita_left_tau_hat",
    "morita_left",
    "morita_right_tau_hat",
    "morita_right",
    "smooth_left",
    "smooth_right",
    "nondegenerate_left",
    "nondegenerate_right",
    "projective_right",
    "dagger_opposite",
]

PAIR2 = {"kind": "pair", "n": 2}
Z2 = {"kind": "group", "name": "Z2"}
Z3 = {"kind": "group", "name": "Z3"}
S3 = {"kind": "group", "name": "S3"}
CECH3 = {"kind": "cech", "points": 3, "cover": [[0, 1], [1, 2]]}
CECH5 = {"kind": "cech", "points": 5, "cover": [[0, 1, 2], [2, 3, 4], [1, 3]]}
SWAP_PAIRS = [[0, 1], [1, 0], [2, 3], [3, 2]]


def release_entries() -> List[CatalogEntry]:
    """The acceptance catalog."""
    entries = [
        CatalogEntry(name=f"matrix-units-pair-{n}", kind="matrix_units", params={"n": n}, expected=["matrix_units", "self_induced"])
        for n in (2, 3, 4)
    ]
    entries += [
        CatalogEntry(name="z2-vs-two-points", kind="z2_split", expected=["algebra_iso", "orbits_distinguish", "self_induced"]),
        CatalogEntry(name="morita-identity-s3", kind="morita", params={"bibundle": "identity", "groupoid": S3}, expected=MORITA_EXPECTED),
        CatalogEntry(name="morita-pair-base-3", kind="morita", params={"bibundle": "terminal", "groupoid": {"kind": "pair", "n": 3}}, expected=MORITA_EXPECTED),
        CatalogEntry(
            name="morita-cech-3", kind="morita",
            params={"bibundle": "cech", "points": 3, "cover": CECH3["cover"], "blocks": [1, 4, 1]},
            expected=MORITA_EXPECTED + ["cech_dimension"],
        ),
        CatalogEntry(
            name="morita-cech-5", kind="morita",
            params={"bibundle": "cech", "points": 5, "cover": CECH5["cover"], "blocks": [1, 4, 4, 4, 1]},
            expected=MORITA_EXPECTED + ["cech_dimension"],
        ),
        CatalogEntry(name="morita-gauge-z2", kind="morita", params={"bibundle": "gauge", "group": "Z2", "points": 4, "ract": SWAP_PAIRS}, expected=MORITA_EXPECTED),
        CatalogEntry(
            name="morita-principal-bundle-z2", kind="morita",
            params={"bibundle": "principal_bundle", "group": "Z2", "points": 4, "act": [[0, 1, 2, 3], [1, 0, 3, 2]]},
            expected=MORITA_EXPECTED,
        ),
        CatalogEntry(name="morita-matrix-pair2-z2", kind="morita", params={"bibundle": "matrix", "n": 2, "group": "Z2"}, expected=MORITA_EXPECTED),
    ]
    for first, second, label in (
        (PAIR2, Z2, "pair2-z2"),
        (Z2, Z3, "z2-z3"),
        (PAIR2, PAIR2, "pair2-pair2"),
        (CECH3, Z2, "cech3-z2"),
        (S3, PAIR2, "s3-pair2"),
    ):
        entries.append(CatalogEntry(name=f"tensor-iso-{label}", kind="tensor_iso", params={"first": first, "second": second}, expected=["algebra_iso"]))
    entries += [
        CatalogEntry(name="haar-change-cech3", kind="haar_change", params={"groupoid": CECH3, "u": ["1", "2", "1/3", "5"]}, expected=["algebra_iso"]),
        CatalogEntry(name="orbit-ideal", kind="orbit_ideal", params={"groupoid": {"kind": "union", "parts": [PAIR2, Z2]}, "objects": [0, 1]}, expected=["ideal", "non_ideal_detected"]),
        CatalogEntry(name="separability-s3", kind="separability", params={"groupoid": S3}, expected=["separable_left", "separable_right", "separable_bimodule", "zero_algebra_not_separable"]),
        CatalogEntry(name="zero-action-fixture", kind="zero_action", params={"groupoid": Z2, "dim": 2}, expected=["zero_action_not_smooth", "zero_action_degenerate", "zero_action_no_section"]),
        CatalogEntry(name="tau-point-terminal", kind="tau_pair", params={"pair": "point_terminal"}, expected=["tau_hat"]),
        CatalogEntry(name="tau-anchor-terminal", kind="tau_pair", params={"pair": "anchor_terminal"}, expected=["tau_hat"]),
        CatalogEntry(name="tau-cech-roundtrip", kind="tau_pair", params={"pair": "cech_roundtrip"}, expected=["tau_hat"]),
        CatalogEntry(name="tau-transversal", kind="tau_pair", params={"pair": "transversal"}, expected=["tau_hat"]),
        CatalogEntry(name="tau-coherence-catalog", kind="tau_coherence", expected=["tau_coherence", "tau_naturality"]),
        CatalogEntry(name="hom-morita-criterion", kind="hom_morita", expected=["hom_morita_criterion", "hom_bibundles_principal"]),
        CatalogEntry(name="natural-equivalence-points", kind="natural_equivalence", expected=["natural_equivalence"]),
    ]
    entries += [
        CatalogEntry(name=f"crossed-product-z{q}", kind="crossed_product", params={"q": q}, expected=["crossed_product"])
        for q in (1, 2, 3, 4)
    ]
    entries += [
        CatalogEntry(name=f"clock-shift-{N}", kind="clock_shift", params={"N": N}, expected=["clock_shift"])
        for N in (2, 3)
    ]
    entries += [
        CatalogEntry(name="torus-dirichlet", kind="torus_dirichlet", expected=["phi2_factor", "closed_form_literal", "averages_unital"]),
        CatalogEntry(
            name="torus-simplicity-golden", kind="torus_simplicity",
            params={"theta": "golden", "element": "u+v", "n_max": 4000}, expected=["simplicity", "parseval"],
        ),
        CatalogEntry(name="torus-rational-resonance", kind="torus_resonance", params={"theta": "1/3", "k": 3}, expected=["resonance_detected"]),
        CatalogEntry(name="mollifier-dirac-rate", kind="dirac_rate", params={"n": [4, 8, 16, 32, 64]}, expected=["normalization", "dirac_rate"]),
        CatalogEntry(name="mollifier-fiber-dirac", kind="fiber_dirac", params={"n": [1, 2, 4, 8, 16, 32]}, expected=["fiber_dirac_constant", "fiber_dirac_varying", "fiber_dirac_mass", "fiber_density_enters"]),
        CatalogEntry(name="mollifier-group-approx-unit", kind="group_approx_unit", params={"n": [1, 2, 4, 8, 16, 32]}, expected=["group_approx_unit", "translation_invariant"]),
        CatalogEntry(name="bornology-unit-square", kind="gauge_example", expected=["gauge_value", "norming", "circled_hull"]),
        CatalogEntry(name="bornology-mackey-rate", kind="mackey_example", expected=["mackey_rate"]),
        CatalogEntry(name="random-groupoids", kind="random_groupoids", expected=["groupoid_axioms", "haar_invariance", "opposite_involution", "full_subgroupoid_identity"]),
        CatalogEntry(name="random-convolution", kind="random_convolution", expected=["convolution_associativity", "convolution_star_antihomomorphism", "convolution_star_involution", "convolution_unit"]),
        CatalogEntry(name="random-tau-pairs", kind="random_tau", expected=["tau_hat_random"]),
        CatalogEntry(name="random-tau-coherence", kind="random_coherence", expected=["tau_coherence_random"]),
        CatalogEntry(name="random-gauge", kind="random_gauge", expected=["gauge_homogeneity", "gauge_triangle"]),
    ]
    return sorted(entries, key=lambda entry: entry.name)


def broken_fixture_entries() -> List[CatalogEntry]:
    """One healthy entry and one that expects a zero-action module to be smooth."""
    return [
        CatalogEntry(name="crossed-product-z2", kind="crossed_product", params={"q": 2}, expected=["crossed_product"]),
        CatalogEntry(name="broken-zero-action", kind="zero_action", params={"groupoid": Z2, "dim": 2}, expected=["smooth_left"]),
    ]


class InMemoryCatalogRepository(CatalogRepositoryInterface):
    """Catalog held in memory."""

    def __init__(self, entries: Optional[Sequence[CatalogEntry]] = None):
        self.entries = {entry.name: entry for entry in (release_entries() if entries is None else entries)}

    async def list_entries(self) -> List[CatalogEntry]:
        """Get all entries, sorted by name."""
        return [self.entries[name] for name in sorted(self.entries)]

    async def get_entry(self, name: str) -> Optional[CatalogEntry]:
        """Get an entry by name."""
        return self.entries.get(name)
