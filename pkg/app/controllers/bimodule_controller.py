from typing import Optional

from app.core.exceptions import CommandError, WorkbenchError
from app.models.certificate import passed
from app.models.groupoid import FiniteGroupoid, HaarSystem
from app.repositories.document_repository import JsonDocumentRepository, digest
from app.schemas.report import Report, build_report
from app.services.bimodule_service import BimoduleService


def get_bimodule_service() -> BimoduleService:
    """Dependency to get bimodule service."""
    return BimoduleService()


def get_document_repository(bimodules: BimoduleService) -> JsonDocumentRepository:
    """Dependency to get the document repository."""
    return JsonDocumentRepository(bimodules.algebras, bimodules.bibundles)


def _haar_options(parser, names) -> None:
    for name in names:
        parser.add_argument(f"--{name}-haar", help=f"Haar document on the {name} groupoid (default: counting measure)")


def register(subparsers, parents) -> None:
    tensor = subparsers.add_parser("tensor", parents=parents, help="M(P) (x)_A(H) M(Q) as a coequalizer quotient")
    tensor.add_argument("first", help="bibundle document P")
    tensor.add_argument("second", help="bibundle document Q")
    _haar_options(tensor, ("left", "middle", "right"))
    tensor.set_defaults(handler=tensor_product)

    tau = subparsers.add_parser("tau-check", parents=parents, help="Certify tau: M(P) (x) M(Q) -> M(P o Q)")
    tau.add_argument("first", help="bibundle document P")
    tau.add_argument("second", help="bibundle document Q")
    _haar_options(tau, ("left", "middle", "right"))
    tau.set_defaults(handler=tau_check)

    morita = subparsers.add_parser("morita-check", parents=parents, help="Biprincipality and both Morita composites")
    morita.add_argument("bibundle", help="bibundle document P")
    _haar_options(morita, ("left", "right"))
    morita.set_defaults(handler=morita_check)


def _haar(repository: JsonDocumentRepository, path: Optional[str], G: FiniteGroupoid) -> HaarSystem:
    if path is None:
        return repository.groupoids.counting_haar(G)
    return repository.load_haar(path, G)


def _inputs(*paths) -> dict:
    return {path: digest(path) for path in paths if path}


def tensor_product(args) -> Report:
    bimodules = get_bimodule_service()
    repository = get_document_repository(bimodules)
    try:
        P = repository.load_bibundle(args.first)
        Q = repository.load_bibundle(args.second)
        middle = _haar(repository, args.middle_haar, P.right)
        MP = bimodules.conv_bimodule(P, _haar(repository, args.left_haar, P.left), middle)
        MQ = bimodules.conv_bimodule(Q, middle, _haar(repository, args.right_haar, Q.right))
        tensor = bimodules.tensor_over(MP, MQ)
        bimodules.check_bimodule_axioms(tensor.bimodule)
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    quotient = tensor.quotient
    values = {
        "dim": quotient.dim,
        "ambient_dim": quotient.ambient_dim,
        "relations_rank": quotient.relations.rank,
        "basis": [list(quotient.split(c)) for c in quotient.free_columns],
    }
    certificate = passed("tensor_bimodule", dim=quotient.dim)
    inputs = _inputs(args.first, args.second, args.left_haar, args.middle_haar, args.right_haar)
    return build_report(args.argv, [certificate], values, inputs)


def tau_check(args) -> Report:
    """Well-definedness on the balancing relations, exact bijectivity and bimodule linearity."""
    bimodules = get_bimodule_service()
    repository = get_document_repository(bimodules)
    try:
        P = repository.load_bibundle(args.first)
        Q = repository.load_bibundle(args.second)
        middle = _haar(repository, args.middle_haar, P.right)
        MP = bimodules.conv_bimodule(P, _haar(repository, args.left_haar, P.left), middle)
        MQ = bimodules.conv_bimodule(Q, middle, _haar(repository, args.right_haar, Q.right))
        tau = bimodules.tau_hat(MP, MQ)
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    values = {"matrix": tau.matrix, "composite_points": tau.composition.bibundle.n_points}
    inputs = _inputs(args.first, args.second, args.left_haar, args.middle_haar, args.right_haar)
    return build_report(args.argv, [tau.certificate], values, inputs)


def morita_check(args) -> Report:
    bimodules = get_bimodule_service()
    repository = get_document_repository(bimodules)
    try:
        P = repository.load_bibundle(args.bibundle)
        left = _haar(repository, args.left_haar, P.left)
        right = _haar(repository, args.right_haar, P.right)
        certificates = bimodules.morita_check(P, left, right)
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    values = {"n_points": P.n_points, "left_dim": P.left.n_arrows, "right_dim": P.right.n_arrows}
    return build_report(args.argv, certificates, values, _inputs(args.bibundle, args.left_haar, args.right_haar))
