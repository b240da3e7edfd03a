"""
Tests for the catalog runner: entry outcomes, failure reporting and seeding.
"""
import pytest

from app.models.catalog import CatalogEntry
from app.repositories.catalog_repository import InMemoryCatalogRepository, broken_fixture_entries, release_entries


def pick(*names):
    entries = {entry.name: entry for entry in release_entries()}
    return [entries[name] for name in names]


class TestCatalogRunner:
    """run_catalog builds each entry and checks its expected certificates."""

    async def test_broken_fixture(self, catalog_service_factory):
        """Exactly the broken entry fails; the healthy one passes."""
        report = await catalog_service_factory(broken_fixture_entries()).run_catalog()
        assert report.failures == ["broken-zero-action"]
        assert not report.passed
        healthy = next(o for o in report.entries if o.name == "crossed-product-z2")
        assert healthy.passed and healthy.elapsed is None

    async def test_outcomes_sorted_with_seed(self, catalog_service_factory):
        """Entries come back ordered by name, with the run seed."""
        entries = pick("clock-shift-3", "bornology-unit-square", "matrix-units-pair-2")
        report = await catalog_service_factory(entries, seed=11).run_catalog(timings=True)
        assert [o.name for o in report.entries] == ["bornology-unit-square", "clock-shift-3", "matrix-units-pair-2"]
        assert report.seed == 11
        assert report.passed
        assert all(o.elapsed is not None for o in report.entries)

    @pytest.mark.parametrize("name", [
        "z2-vs-two-points",
        "tensor-iso-pair2-z2",
        "haar-change-cech3",
        "orbit-ideal",
        "morita-cech-3",
        "morita-pair-base-3",
        "morita-matrix-pair2-z2",
        "tau-cech-roundtrip",
        "tau-transversal",
        "hom-morita-criterion",
        "random-convolution",
        "tau-point-terminal",
        "natural-equivalence-points",
        "torus-rational-resonance",
        "bornology-mackey-rate",
    ])
    async def test_release_entry_passes(self, catalog_service_factory, name):
        """Selected release entries pass every expected certificate."""
        report = await catalog_service_factory(pick(name)).run_catalog()
        outcome = report.entries[0]
        assert outcome.passed, outcome.model_dump()
        assert not outcome.missing

    async def test_unknown_kind(self, catalog_service_factory):
        """An entry kind without a runner is an error, not a crash."""
        entry = CatalogEntry(name="mystery", kind="nope", expected=["anything"])
        outcome = (await catalog_service_factory([entry]).run_catalog()).entries[0]
        assert not outcome.passed
        assert "nope" in outcome.error["error"]

    async def test_missing_certificate(self, catalog_service_factory):
        """Expected names that no certificate carries are listed."""
        entry = CatalogEntry(name="q2", kind="crossed_product", params={"q": 2}, expected=["crossed_product", "absent"])
        outcome = (await catalog_service_factory([entry]).run_catalog()).entries[0]
        assert outcome.missing == ["absent"]
        assert not outcome.passed

    async def test_domain_error_recorded(self, catalog_service_factory):
        """A domain error while building an entry becomes its error record."""
        entry = CatalogEntry(
            name="zero-weight", kind="haar_change",
            params={"groupoid": {"kind": "pair", "n": 2}, "u": ["1", "0"]}, expected=["algebra_iso"],
        )
        outcome = (await catalog_service_factory([entry]).run_catalog()).entries[0]
        assert outcome.error["error"] == "NotPositive"
        assert outcome.certificates == []

    async def test_repository(self):
        """The in-memory repository lists by name and looks entries up."""
        repository = InMemoryCatalogRepository()
        names = [entry.name for entry in await repository.list_entries()]
        assert names == sorted(names)
        assert (await repository.get_entry("clock-shift-2")).kind == "clock_shift"
        assert await repository.get_entry("absent") is None


class TestSeeding:
    """Randomized entries are reproducible from the seed."""

    async def test_same_seed_same_report(self, catalog_service_factory):
        """Two runs with one seed produce identical outcomes."""
        entries = pick("random-tau-pairs")
        first = await catalog_service_factory(entries, seed=3).run_catalog()
        second = await catalog_service_factory(entries, seed=3).run_catalog()
        assert first.model_dump() == second.model_dump()
        assert first.passed

    @pytest.mark.slow
    async def test_release_catalog(self, catalog_service_factory):
        """The whole release catalog passes."""
        report = await catalog_service_factory(release_entries(), seed=0, threads=4).run_catalog()
        assert report.failures == []
