import re
from typing import List

import numpy as np

from app.core.exceptions import CommandError, SchemaError, WorkbenchError
from app.models.certificate import failed, passed
from app.models.mollifier import SampledFunction
from app.schemas.report import Report, build_report
from app.services.mollifier_service import Bump, MollifierService, default_test_functions

EXPERIMENTS = ("rate", "fiber", "group", "all")
_RANGE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")


def get_mollifier_service() -> MollifierService:
    """Dependency to get mollifier service."""
    return MollifierService()


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("dirac-run", parents=parents, help="Mollifier convergence experiments")
    parser.add_argument("--profile", choices=("std",), default="std", help="bump profile exp(-1/(1-y^2)) normalized")
    parser.add_argument("--n", dest="ns", default="4,8,16,32,64", help='"a..b" or a comma list')
    parser.add_argument("--experiment", choices=EXPERIMENTS, default="rate")
    parser.set_defaults(handler=dirac_run)


def parse_ns(text: str) -> List[int]:
    match = _RANGE.match(text)
    try:
        ns = list(range(int(match.group(1)), int(match.group(2)) + 1)) if match else [int(p) for p in text.split(",")]
    except ValueError:
        raise SchemaError(f"bad n list {text!r}", "$.n")
    if not ns or min(ns) < 1:
        raise SchemaError("n values must be positive integers", "$.n")
    return ns


def dirac_run(args) -> Report:
    """Raw error tables for external plotting; pointwise numerical evidence only."""
    mollifier = get_mollifier_service()
    experiments = ("rate", "fiber", "group") if args.experiment == "all" else (args.experiment,)
    certificates, values = [], {}
    try:
        ns = parse_ns(args.ns)
        profile = mollifier.standard_profile(1)
        deviations = mollifier.normalization_check(profile, ns)
        worst = max(deviations)
        normalization = mollifier.tol.normalization
        certificates.append(
            passed("normalization", max_deviation=worst) if worst <= normalization else failed("normalization", {"max_deviation": worst})
        )
        values["profile"] = {"normalization": profile.normalization, "first_moment": profile.first_moment}
        for experiment in experiments:
            if experiment == "rate":
                report = mollifier.dirac_rate_experiment(default_test_functions(), profile, ns)
            elif experiment == "fiber":
                g = Bump(0.0, 2.0)
                functions = [SampledFunction(name="g(x)cos(y)", func=lambda x, y: g(x) * np.cos(y))]
                report = mollifier.fiber_dirac_experiment(functions, profile, ns)
            else:
                functions = [SampledFunction(name="bump", func=Bump(0.0))]
                report = mollifier.group_approx_unit_demo(functions, profile, ns)
            certificates.append(passed(report.experiment) if report.passed else failed(report.experiment, {"tables": [t.name for t in report.tables]}))
            values[report.experiment] = report
    except WorkbenchError as e:
        raise CommandError(e.exit_code, e.to_dict())
    return build_report(args.argv, certificates, values)
