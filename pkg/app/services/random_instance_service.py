import logging
import random
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple

from app.core.config import settings
from app.core.linalg import SparseVec
from app.core.scalars import gaussian
from app.models.bibundle import Bibundle
from app.models.bornology import PolytopalDisk
from app.models.groupoid import FiniteGroupoid, GroupoidHom, HaarSystem
from app.services.bibundle_service import BibundleService
from app.services.constructor_service import ConstructorService, cyclic_table, symmetric_table
from app.services.groupoid_service import GroupoidService

logger = logging.getLogger(__name__)

STEP_KINDS = ("identity", "terminal", "relabel", "transversal", "anchor")


class BibundleChain(NamedTuple):
    """Composable right principal bibundles G_0 -> G_1 -> ... with a Haar system per groupoid."""

    haars: List[HaarSystem]
    bibundles: List[Bibundle]
    steps: List[str]


class GaugeInstance(NamedTuple):
    disk: PolytopalDisk
    v: Tuple[Fraction, ...]
    w: Tuple[Fraction, ...]
    scale: Fraction


class RandomInstanceService:
    """Seeded generators for the randomized property suites; all entropy comes from ``rng``."""

    def __init__(
        self,
        groupoids: Optional[GroupoidService] = None,
        constructors: Optional[ConstructorService] = None,
        bibundles: Optional[BibundleService] = None,
        max_points: Optional[int] = None,
    ):
        self.groupoids = groupoids or GroupoidService()
        self.constructors = constructors or ConstructorService()
        self.bibundles = bibundles or BibundleService(self.groupoids, self.constructors)
        self.max_points = max_points or settings.RANDOM_MAX_POINTS

    # Groupoids and Haar systems

    def _group(self, rng: random.Random) -> FiniteGroupoid:
        kind = rng.choice(["Z1", "Z2", "Z3", "S3"])
        if kind == "S3":
            table, labels = symmetric_table(3)
            return self.constructors.group_groupoid(table, labels, name="S3")
        return self.constructors.group_groupoid(cyclic_table(int(kind[1])), name=kind)

    def _block(self, rng: random.Random) -> FiniteGroupoid:
        return self.constructors.product_groupoid(self.constructors.pair_groupoid(rng.randint(1, 3)), self._group(rng))

    def random_groupoid(self, rng: random.Random, max_arrows: int = 60) -> FiniteGroupoid:
        """Disjoint union of one or two blocks pair(n) x group, randomly relabelled."""
        while True:
            G = self._block(rng)
            if rng.random() < 0.5:
                G = self.constructors.disjoint_union(G, self._block(rng))
            if G.n_arrows <= max_arrows:
                break
        G, _ = self.random_relabel(rng, G)
        return G

    def random_relabel(self, rng: random.Random, G: FiniteGroupoid) -> Tuple[FiniteGroupoid, GroupoidHom]:
        """A relabelled copy of G together with the isomorphism G -> copy."""
        objects = list(range(G.n_objects))
        arrows = list(range(G.n_arrows))
        rng.shuffle(objects)
        rng.shuffle(arrows)
        copy = self.constructors.relabel_groupoid(G, objects, arrows)
        iso = GroupoidHom(source=G, target=copy, on_objects=tuple(objects), on_arrows=tuple(arrows), name="relabel")
        return copy, iso

    def random_haar(self, rng: random.Random, G: FiniteGroupoid) -> HaarSystem:
        u = [Fraction(rng.randint(1, 5), rng.randint(1, 3)) for _ in range(G.n_objects)]
        return self.groupoids.canonical_haar(G, u)

    def random_weights(self, rng: random.Random, G: FiniteGroupoid) -> List[Fraction]:
        """Arbitrary positive weights; invariant only by chance."""
        if rng.random() < 0.5:
            return list(self.random_haar(rng, G).weights)
        return [Fraction(rng.randint(1, 3)) for _ in range(G.n_arrows)]

    def random_vector(self, rng: random.Random, G: FiniteGroupoid, density: float = 0.4) -> SparseVec:
        """Sparse function on arrows with small Gaussian-integer values."""
        vec = {g: gaussian(rng.randint(-3, 3), rng.randint(-2, 2)) for g in range(G.n_arrows) if rng.random() < density}
        return {g: c for g, c in vec.items() if c}

    # Bibundles

    def random_step(self, rng: random.Random, G: FiniteGroupoid) -> Tuple[Bibundle, str]:
        """A right principal bibundle out of G, drawn from a fixed menu of constructions."""
        kind = rng.choice(STEP_KINDS)
        if kind == "identity":
            return self.bibundles.identity_bibundle(G), kind
        if kind == "terminal":
            return self.bibundles.terminal_bibundle(G), kind
        if kind == "relabel":
            _, iso = self.random_relabel(rng, G)
            return self.bibundles.hom_bibundle(iso), kind
        if kind == "transversal":
            keep = []
            for orbit in self.groupoids.orbits_and_isotropy(G).orbits:
                keep += rng.sample(orbit, rng.randint(1, len(orbit)))
            inclusion = self.constructors.inclusion_hom(G, keep)
            return self.bibundles.opposite_bibundle(self.bibundles.hom_bibundle(inclusion)), kind
        return self.bibundles.anchor_bibundle(G), kind

    def random_chain(self, rng: random.Random, length: int, max_arrows: int = 12) -> BibundleChain:
        """``length`` composable right principal bibundles, each with at most max_points points."""
        G = self.random_groupoid(rng, max_arrows)
        haars = [self.random_haar(rng, G)]
        bibundles, steps = [], []
        attempts = 0
        while len(bibundles) < length:
            attempts += 1
            P, kind = self.random_step(rng, G)
            if P.n_points > self.max_points and attempts < 50:
                continue
            if P.n_points > self.max_points:
                P, kind = self.bibundles.terminal_bibundle(G), "terminal"
            G = P.right
            bibundles.append(P)
            steps.append(kind)
            haars.append(self.random_haar(rng, G))
            attempts = 0
        return BibundleChain(haars=haars, bibundles=bibundles, steps=steps)

    # Disks

    def random_disk(self, rng: random.Random, dim: int) -> PolytopalDisk:
        count = rng.randint(dim, 2 * dim)
        generators = []
        while len(generators) < count:
            g = tuple(Fraction(rng.randint(-3, 3)) for _ in range(dim))
            if any(g):
                generators.append(g)
        return PolytopalDisk(dim=dim, generators=tuple(generators))

    def random_point(self, rng: random.Random, dim: int) -> Tuple[Fraction, ...]:
        return tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(dim))

    def random_gauge_instance(self, rng: random.Random, max_dim: int = 6) -> GaugeInstance:
        dim = rng.randint(1, max_dim)
        scale = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        return GaugeInstance(self.random_disk(rng, dim), self.random_point(rng, dim), self.random_point(rng, dim), scale)
