from fractions import Fraction
from typing import Tuple

from app.core.exceptions import CommandError, SchemaError, WorkbenchError
from app.models.certificate import failed, passed
from app.repositories.document_repository import JsonDocumentRepository, digest
from app.schemas.report import Report, build_report
from app.services.bornology_service import REAL_CIRCLING_NOTE, BornologyService


def get_bornology_service() -> BornologyService:
    """Dependency to get bornology service."""
    return BornologyService()


def get_document_repository() -> JsonDocumentRepository:
    """Dependency to get the document repository."""
    return JsonDocumentRepository()


def register(subparsers, parents) -> None:
    gauge = subparsers.add_parser("gauge", parents=parents, help="Minkowski gauge of a point for a polytopal disk")
    gauge.add_argument("--disk", required=True, help="disk document")
    gauge.add_argument("--point", required=True, help='comma separated rationals, e.g. "1/2,1/2"')
    gauge.add_argument("--circled", action="store_true", help="also decide membership in the circled hull")
    gauge.set_defaults(handler=gauge_value)

    mackey = subparsers.add_parser("mackey", parents=parents, help="Gauge convergence rate of a sequence")
    mackey.add_argument("--seq", required=True, help="sequence document")
    mackey.add_argument("--disk", required=True, help="disk document")
    mackey.set_defaults(handler=mackey_rate)


def parse_point(text: str) -> Tuple[Fraction, ...]:
    try:
        return tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"bad point {text!r}", "$.point")


def gauge_value(args) -> Report:
    """The LP optimum with its dual certificate; +inf off the span of the disk."""
    bornology = get_bornology_service()
    repository = get_document_repository()
    try:
        D = repository.load_disk(args.disk)
        v = parse_point(args.point)
        result = bornology.disked_hull_gauge(D, v)
        certificates = [passed("gauge", value="+inf" if result.infinite else result.value), bornology.is_norming(D)]
        if args.circled:
            inside = bornology.circled_hull_membership(D.generators, v)
            certificates.append(passed("circled_hull", note=REAL_CIRCLING_NOTE) if inside else failed("circled_hull", {"point": list(v)}, note=REAL_CIRCLING_NOTE))
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    values = {
        "value": "+inf" if result.infinite else result.value,
        "coefficients": result.coefficients,
        "dual": result.dual,
    }
    return build_report(args.argv, certificates, values, {args.disk: digest(args.disk)})


def mackey_rate(args) -> Report:
    bornology = get_bornology_service()
    repository = get_document_repository()
    try:
        D = repository.load_disk(args.disk)
        seq = repository.load_sequence(args.seq)
        if seq.dim != D.dim:
            raise SchemaError(f"sequence has dimension {seq.dim}, disk {D.dim}", "$.dim")
        rate = bornology.mackey_rate(seq.points, seq.limit, D)
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    details = {"slope": rate.slope}
    certificate = passed("mackey_convergent", **details) if rate.convergent else failed("mackey_convergent", details)
    values = {"gauges": rate.gauges, "slope": rate.slope}
    return build_report(args.argv, [certificate], values, {path: digest(path) for path in (args.seq, args.disk)})
