from app.core.exceptions import CommandError, SchemaError, WorkbenchError
from app.core.scalars import format_scalar
from app.models.certificate import failed, passed
from app.repositories.document_repository import JsonDocumentRepository, digest
from app.schemas.report import Report, build_report
from app.services.algebra_service import SIDES, AlgebraService


def get_algebra_service() -> AlgebraService:
    """Dependency to get algebra service."""
    return AlgebraService()


def get_document_repository(algebras: AlgebraService) -> JsonDocumentRepository:
    """Dependency to get the document repository."""
    return JsonDocumentRepository(algebras)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("algebra", help="Convolution algebra commands")
    commands = parser.add_subparsers(dest="algebra_command", required=True)

    structure = commands.add_parser("structure-constants", parents=parents, help="Structure constants of A(G)")
    structure.add_argument("groupoid", help="groupoid document")
    structure.add_argument("--haar", help="Haar document (default: counting measure)")
    structure.set_defaults(handler=structure_constants)

    iso = commands.add_parser("iso-check", parents=parents, help="Certify a linear map as an algebra isomorphism")
    iso.add_argument("--map", dest="map_path", required=True, help="linear map document A -> B")
    iso.add_argument("source", help="groupoid, haar or field_product document")
    iso.add_argument("target", help="groupoid, haar or field_product document")
    iso.set_defaults(handler=iso_check)

    ideal = commands.add_parser("ideal-check", parents=parents, help="Certify a subspace as a two-sided ideal")
    ideal.add_argument("algebra", help="groupoid or haar document")
    group = ideal.add_mutually_exclusive_group(required=True)
    group.add_argument("--subspace", help="subspace document")
    group.add_argument("--objects", help="comma separated union of orbits, e.g. 0,1")
    ideal.set_defaults(handler=ideal_check)

    separability = commands.add_parser("separability", parents=parents, help="Search for a section of multiplication")
    separability.add_argument("algebra", help="groupoid, haar or field_product document")
    separability.add_argument("--side", choices=SIDES + ("all",), default="all")
    separability.set_defaults(handler=separability_check)


def structure_constants(args) -> Report:
    """Nonzero structure constants delta_g * delta_h = w(h) delta_gh."""
    algebras = get_algebra_service()
    repository = get_document_repository(algebras)
    try:
        G = repository.load_groupoid(args.groupoid)
        haar = repository.load_haar(args.haar, G) if args.haar else algebras.groupoids.counting_haar(G)
        if haar.groupoid.tables() != G.tables():
            raise SchemaError("the Haar document lives on another groupoid", "$.groupoid")
        constants = algebras.structure_constants(haar)
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    table = {
        f"{g},{h}": {str(k): format_scalar(c) for k, c in sorted(vec.items())}
        for (g, h), vec in sorted(constants.table.items())
    }
    values = {"dim": G.n_arrows, "nonzero": len(table), "table": table, "weights": list(haar.weights)}
    inputs = {path: digest(path) for path in (args.groupoid, args.haar) if path}
    return build_report(args.argv, [], values, inputs)


def iso_check(args) -> Report:
    """f(xy) = f(x)f(y) on basis pairs, and f bijective by exact rank."""
    algebras = get_algebra_service()
    repository = get_document_repository(algebras)
    try:
        f = repository.load_linear_map(args.map_path)
        A = repository.load_algebra(args.source)
        B = repository.load_algebra(args.target)
        certificate = algebras.check_algebra_iso(f, A, B)
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    inputs = {path: digest(path) for path in (args.map_path, args.source, args.target)}
    return build_report(args.argv, [certificate], {"dim": [A.dim, B.dim]}, inputs)


def ideal_check(args) -> Report:
    algebras = get_algebra_service()
    repository = get_document_repository(algebras)
    try:
        A = repository.load_algebra(args.algebra)
        if args.subspace:
            vectors = repository.load_subspace(args.subspace)
        else:
            if A.haar is None:
                raise SchemaError("--objects needs a groupoid or haar document", "$.kind")
            try:
                objects = [int(x) for x in args.objects.split(",") if x.strip()]
            except ValueError:
                raise SchemaError(f"bad object list {args.objects!r}", "$.objects")
            vectors = algebras.orbit_ideal(A.haar.groupoid, objects)
        certificate = algebras.ideal_check(A, vectors)
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    inputs = {path: digest(path) for path in (args.algebra, args.subspace) if path}
    return build_report(args.argv, [certificate], {"spanning_vectors": len(vectors)}, inputs)


def separability_check(args) -> Report:
    algebras = get_algebra_service()
    repository = get_document_repository(algebras)
    sides = SIDES if args.side == "all" else (args.side,)
    certificates, values = [], {}
    try:
        A = repository.load_algebra(args.algebra)
        for side in sides:
            result = algebras.find_separability_section(A, side)
            name = f"separable_{side}"
            certificates.append(passed(name) if result.found else failed(name, {"note": result.note}))
            if result.found:
                values[f"section_{side}"] = {
                    str(i): {str(k): format_scalar(c) for k, c in sorted(vec.items())}
                    for i, vec in sorted(result.section.items())
                }
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    return build_report(args.argv, certificates, values, {args.algebra: digest(args.algebra)})
