import random

import pytest

from app.repositories.catalog_repository import InMemoryCatalogRepository
from app.repositories.document_repository import JsonDocumentRepository
from app.services.algebra_service import AlgebraService
from app.services.bibundle_service import BibundleService
from app.services.bimodule_service import BimoduleService
from app.services.bornology_service import BornologyService
from app.services.catalog_service import CatalogService
from app.services.constructor_service import ConstructorService
from app.services.groupoid_service import GroupoidService
from app.services.mollifier_service import MollifierService
from app.services.random_instance_service import RandomInstanceService
from app.services.torus_service import TorusService


@pytest.fixture
def groupoids():
    """Groupoid validation and Haar systems."""
    return GroupoidService()


@pytest.fixture
def constructors():
    """Groupoid constructors."""
    return ConstructorService()


@pytest.fixture
def algebras(groupoids, constructors):
    """Convolution algebras sharing the groupoid services."""
    return AlgebraService(groupoids, constructors)


@pytest.fixture
def bibundles(groupoids, constructors):
    """Bibundle laws, principality and composition."""
    return BibundleService(groupoids, constructors)


@pytest.fixture
def bimodules(algebras, bibundles):
    """Convolution bimodules and the functoriality constraint."""
    return BimoduleService(algebras, bibundles)


@pytest.fixture
def bornology():
    return BornologyService()


@pytest.fixture
def mollifier():
    return MollifierService()


@pytest.fixture
def torus(algebras):
    return TorusService(algebras)


@pytest.fixture
def random_instances(groupoids, constructors, bibundles):
    return RandomInstanceService(groupoids, constructors, bibundles)


@pytest.fixture
def rng():
    """A fixed-seed generator; tests never draw hidden entropy."""
    return random.Random(20240601)


@pytest.fixture
def documents(algebras, bibundles):
    """JSON document repository over the shared services."""
    return JsonDocumentRepository(algebras, bibundles)


@pytest.fixture
def counting(groupoids):
    """Counting Haar system of a groupoid."""
    return groupoids.counting_haar


@pytest.fixture
def catalog_service_factory(bimodules):
    """Build a catalog service over a chosen list of entries."""
    def factory(entries, seed=7, threads=2):
        return CatalogService(InMemoryCatalogRepository(entries), seed=seed, threads=threads, bimodules=bimodules)
    return factory
