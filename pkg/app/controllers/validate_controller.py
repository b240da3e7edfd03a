from app.core.exceptions import CommandError, SchemaError, WorkbenchError
from app.models.certificate import failed, passed
from app.repositories.document_repository import JsonDocumentRepository, digest
from app.schemas.report import Report, build_report
from app.services.bornology_service import BornologyService


def get_document_repository() -> JsonDocumentRepository:
    """Dependency to get the document repository."""
    return JsonDocumentRepository()


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("validate", parents=parents, help="Validate a JSON document of any kind")
    parser.add_argument("document", help="groupoid, haar, bibundle, element, linear_map, subspace, field_product, disk or sequence")
    parser.set_defaults(handler=validate)


def _summary(repository: JsonDocumentRepository, kind: str, data) -> dict:
    if kind == "groupoid":
        G = repository.decode_groupoid(data)
        orbits = repository.groupoids.orbits_and_isotropy(G)
        return {
            "n_objects": G.n_objects, "n_arrows": G.n_arrows,
            "orbits": orbits.orbits, "isotropy_orders": orbits.isotropy_orders(),
        }
    if kind == "haar":
        haar = repository.decode_haar(data)
        return {"n_arrows": haar.groupoid.n_arrows, "u": repository.groupoids.normal_form(haar)}
    if kind == "bibundle":
        P = repository.decode_bibundle(data)
        return {
            "n_points": P.n_points,
            "right_principal": repository.bibundles.is_right_principal(P).passed,
            "biprincipal": repository.bibundles.is_biprincipal(P).passed,
        }
    if kind == "element":
        return {"support": sorted(repository.decode_element(data))}
    if kind == "disk":
        D = repository.decode_disk(data)
        return {"dim": D.dim, "generators": D.size, "norming": BornologyService().is_norming(D).passed}
    if kind == "sequence":
        seq = repository.decode_sequence(data)
        return {"dim": seq.dim, "length": len(seq.points)}
    return {}


def validate(args) -> Report:
    """Validate a document; domain-law violations fail the certificate with a witness."""
    repository = get_document_repository()
    try:
        data = repository.read(args.document)
        kind = repository.kind_of(data)
        try:
            values = {"kind": kind, **_summary(repository, kind, data)}
            certificate = passed("valid")
        except SchemaError:
            raise
        except WorkbenchError as e:
            values = {"kind": kind}
            certificate = failed("valid", e.to_dict())
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    return build_report(args.argv, [certificate], values, {args.document: digest(args.document)})
