import asyncio
from typing import Optional

from app.core.config import settings
from app.core.exceptions import CommandError
from app.models.certificate import Certificate
from app.repositories.catalog_repository import InMemoryCatalogRepository, broken_fixture_entries, release_entries
from app.schemas.report import Report, build_report
from app.services.catalog_service import DEFAULT_SEED, CatalogService


def get_catalog_service(repository: InMemoryCatalogRepository, seed: Optional[int]) -> CatalogService:
    """Dependency to get catalog service."""
    return CatalogService(repository, seed=seed)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("catalog", parents=parents, help="Build every catalog entry and run its certificates")
    parser.add_argument("--entry", action="append", default=[], help="run only this entry (repeatable)")
    parser.add_argument("--broken-fixture", action="store_true", help="run the fixture catalog with one broken entry")
    parser.add_argument("--list", action="store_true", help="list entry names without running them")
    parser.set_defaults(handler=run_catalog)


def run_catalog(args) -> Report:
    """One certificate per entry; entry certificates are kept in its details."""
    entries = broken_fixture_entries() if args.broken_fixture else release_entries()
    if args.entry:
        known = {entry.name for entry in entries}
        unknown = sorted(set(args.entry) - known)
        if unknown:
            raise CommandError(2, {"error": "unknown catalog entry", "witness": unknown})
        entries = [entry for entry in entries if entry.name in args.entry]
    if args.list:
        values = {"entries": sorted((entry.name, entry.kind) for entry in entries)}
        return build_report(args.argv, [], values)

    seed = args.seed if args.seed is not None else (settings.SEED if settings.SEED is not None else DEFAULT_SEED)
    service = get_catalog_service(InMemoryCatalogRepository(entries), seed)
    report = asyncio.run(service.run_catalog(timings=args.timings))

    certificates = []
    for outcome in report.entries:
        witness = None
        if not outcome.passed:
            witness = {
                "error": outcome.error,
                "missing": outcome.missing,
                "failed": [c.name for c in outcome.certificates if not c.passed],
            }
        details = {"kind": outcome.kind, "certificates": outcome.certificates}
        certificates.append(Certificate(name=outcome.name, passed=outcome.passed, witness=witness, details=details))
    values = {"entries": len(report.entries), "failures": report.failures}
    timings = {outcome.name: outcome.elapsed for outcome in report.entries} if args.timings else None
    return build_report(args.argv, certificates, values, seed=report.seed, timings=timings)
