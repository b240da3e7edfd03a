from app.core.exceptions import CommandError, WorkbenchError
from app.models.bibundle import PrincipalityCertificate
from app.models.certificate import Certificate, failed, passed
from app.repositories.document_repository import JsonDocumentRepository, digest
from app.schemas.report import Report, build_report
from app.services.bibundle_service import BibundleService


def get_bibundle_service() -> BibundleService:
    """Dependency to get bibundle service."""
    return BibundleService()


def get_document_repository(bibundles: BibundleService) -> JsonDocumentRepository:
    """Dependency to get the document repository."""
    return JsonDocumentRepository(bibundles=bibundles)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("bibundle", help="Bibundle commands")
    commands = parser.add_subparsers(dest="bibundle_command", required=True)

    principal = commands.add_parser("principal-check", parents=parents, help="Check right/left principality")
    principal.add_argument("bibundle", help="bibundle document")
    principal.add_argument("--side", choices=("right", "left", "both"), default="right")
    principal.set_defaults(handler=principal_check)

    compose = commands.add_parser("compose", parents=parents, help="Compose P o_H Q")
    compose.add_argument("first", help="bibundle document P")
    compose.add_argument("second", help="bibundle document Q")
    compose.add_argument("--permissive", action="store_true", help="allow a non-principal P (logged)")
    compose.add_argument("--save", help="write the composite bibundle document here")
    compose.set_defaults(handler=compose_bibundles)

    morita = commands.add_parser("morita-check", parents=parents, help="Check biprincipality")
    morita.add_argument("bibundle", help="bibundle document")
    morita.set_defaults(handler=morita_check)


def principality(name: str, certificate: PrincipalityCertificate) -> Certificate:
    if certificate.passed:
        return passed(name)
    laws = ("l_surjective", "char_map_injective", "char_map_surjective")
    return failed(name, {law: getattr(certificate, law).witness for law in laws if not getattr(certificate, law).holds})


def principal_check(args) -> Report:
    bibundles = get_bibundle_service()
    repository = get_document_repository(bibundles)
    try:
        P = repository.load_bibundle(args.bibundle)
        certificates = []
        if args.side in ("right", "both"):
            certificates.append(principality("right_principal", bibundles.is_right_principal(P)))
        if args.side in ("left", "both"):
            certificates.append(principality("left_principal", bibundles.is_right_principal(bibundles.swap(P))))
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    return build_report(args.argv, certificates, {"n_points": P.n_points}, {args.bibundle: digest(args.bibundle)})


def compose_bibundles(args) -> Report:
    """Orbit space of the fiber product under the middle groupoid."""
    bibundles = get_bibundle_service()
    repository = get_document_repository(bibundles)
    try:
        P = repository.load_bibundle(args.first)
        Q = repository.load_bibundle(args.second)
        composition = bibundles.composition(P, Q, permissive=args.permissive)
        R = bibundles.validate_bibundle(composition.bibundle)
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    if args.save:
        repository.save_bibundle(R, args.save)
    values = {
        "n_points": R.n_points,
        "fiber_product": len(composition.pairs),
        "orbits": {f"{p},{q}": point for (p, q), point in sorted(composition.orbit_of.items())},
        "bibundle": repository.encode_bibundle(R),
    }
    certificate = principality("right_principal", bibundles.is_right_principal(R))
    return build_report(args.argv, [certificate], values, {path: digest(path) for path in (args.first, args.second)})


def morita_check(args) -> Report:
    """Biprincipality of P, i.e. P is a Morita bibundle."""
    bibundles = get_bibundle_service()
    repository = get_document_repository(bibundles)
    try:
        P = repository.load_bibundle(args.bibundle)
        certificate = bibundles.is_biprincipal(P)
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    certificates = [
        principality("right_principal", certificate.right),
        principality("left_principal", certificate.left),
    ]
    return build_report(args.argv, certificates, {"n_points": P.n_points}, {args.bibundle: digest(args.bibundle)})
