from app.core.exceptions import CommandError, SchemaError, WorkbenchError
from app.models.certificate import failed, passed
from app.schemas.report import Report, build_report
from app.services.torus_service import TorusService, parse_theta


def get_torus_service() -> TorusService:
    """Dependency to get torus service."""
    return TorusService()


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("torus-run", parents=parents, help="Averaging experiment on the noncommutative torus")
    parser.add_argument("--theta", required=True, help='"golden", "silver", "p/q" or a decimal')
    parser.add_argument("--element", required=True, help='Laurent polynomial in u, v, e.g. "u+v" or "1+2*u^3*v^-1"')
    parser.add_argument("--n-max", type=int, default=4000)
    parser.add_argument("--tolerance", type=float, default=1e-3)
    parser.set_defaults(handler=torus_run)


def doubling(n_max: int):
    ns, n = [], 1
    while n < n_max:
        ns.append(n)
        n *= 2
    return ns + [n_max]


def torus_run(args) -> Report:
    """c_n = Phi_1,n(Phi_2,n(a* a)) against nu * 1 over n = 1, 2, 4, ..., n_max."""
    torus = get_torus_service()
    try:
        if args.n_max < 1:
            raise SchemaError("--n-max must be positive", "$.n_max")
        theta, rational = parse_theta(args.theta)
        a = torus.parse_element(args.element, theta, rational)
        report = torus.simplicity_experiment(a, doubling(args.n_max), tolerance=args.tolerance)
        b = torus.torus_mul(torus.torus_star(a), a)
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    details = {"nu": report.nu, "final_residual": report.residuals[-1], "note": report.note}
    witness = {"resonant_modes": report.resonant_modes, "final_residual": report.residuals[-1]}
    certificates = [passed("simplicity", **details) if report.passed else failed("simplicity", witness, **details)]
    gap = abs(b.coefficient(0, 0) - report.nu)
    certificates.append(passed("parseval", nu=report.nu) if gap <= 1e-12 else failed("parseval", {"gap": gap}))
    values = {"theta": theta, "rational": str(rational) if rational is not None else None, "experiment": report}
    return build_report(args.argv, certificates, values)
