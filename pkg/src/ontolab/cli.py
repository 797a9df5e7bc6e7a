"""
Command-line interface.

    ontolab validate MODEL
    ontolab onticity MODEL [--require-ontic]
    ontolab decompose MODEL -o OUT [--require-ontic]
    ontolab pbr MODEL [--report OUT]
    ontolab lewis born-check --theta T --basis-angle B [--samples N --seed S]
    ontolab lewis overlap --theta1 T1 --theta2 T2

Reports go to stdout (or --report) as JSON, log messages to stderr. Exit codes:
0 on success, 1 when a verdict is negative, 2 on input or usage errors.
"""

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .config import RunConfig
from .exceptions import OntolabError, PsiEpistemicInput
from .io import SCHEMA_HELP, dump_report, load_model
from .ontology import Onticity, born_residual, overlap_matrix
from .pbr import build_scenario, exclusion_witness, run_pbr_experiment
from .quantum import bloch_state, qubit_basis
from .representation import (
    SubsystemVerdict,
    construct_label_map,
    fiber_decomposition,
    subsystem_onticity_check,
    verify_delta_form,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


class _Parser(argparse.ArgumentParser):
    "ArgumentParser that appends the model-file layout to usage errors"

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n\n{SCHEMA_HELP}")
        raise SystemExit(EXIT_INPUT)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("run options")
    group.add_argument("--config", help="JSON file of run settings")
    group.add_argument("--seed", type=int, help="unsigned 64-bit seed (default 0)")
    group.add_argument("--eps", type=float, help="support threshold (default 1e-12)")
    group.add_argument("--samples", type=int, help="Monte Carlo samples (default 100000)")
    group.add_argument("--cap", type=int, help="largest product ontic space (default 1e6)")
    group.add_argument("--workers", type=int, help="parallel sampling streams (default 1)")
    group.add_argument(
        "--e0-measure", choices=("uniform", "axial"), help="E0 measure of the qubit model"
    )
    group.add_argument(
        "--allow-outside-hemisphere",
        action="store_true",
        default=None,
        help="use the delta-branch fallback for polar angles >= pi/2",
    )
    group.add_argument("--report", help="write the JSON report here instead of stdout")
    group.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(
        prog="ontolab",
        description="Analyse finite ontological models of quantum systems.",
        epilog=SCHEMA_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = commands.add_parser("validate", parents=[common], help="load and check a model")
    p.add_argument("model")
    p.set_defaults(handler=cmd_validate)

    p = commands.add_parser("onticity", parents=[common], help="psi-ontic or psi-epistemic")
    p.add_argument("model")
    p.add_argument("--require-ontic", action="store_true")
    p.set_defaults(handler=cmd_onticity)

    p = commands.add_parser("decompose", parents=[common], help="delta-form decomposition")
    p.add_argument("model")
    p.add_argument("-o", "--output", required=True, help="decomposition JSON file")
    p.add_argument("--require-ontic", action="store_true")
    p.set_defaults(handler=cmd_decompose)

    p = commands.add_parser("pbr", parents=[common], help="PBR exclusion witness")
    p.add_argument("model")
    p.set_defaults(handler=cmd_pbr)

    lewis = commands.add_parser("lewis", help="psi-epistemic qubit model")
    lewis_commands = lewis.add_subparsers(
        dest="lewis_command", required=True, parser_class=_Parser
    )

    p = lewis_commands.add_parser("born-check", parents=[common], help="Monte Carlo Born rule")
    p.add_argument("--theta", type=float, required=True, help="polar angle of the state")
    p.add_argument("--phi", type=float, default=0.0, help="azimuth of the state")
    p.add_argument("--basis-angle", type=float, required=True, help="polar angle of the basis")
    p.add_argument("--basis-phi", type=float, default=0.0, help="azimuth of the basis")
    p.set_defaults(handler=cmd_born_check)

    p = lewis_commands.add_parser("overlap", parents=[common], help="epistemic overlap")
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta2", type=float, required=True)
    p.add_argument("--phi1", type=float, default=0.0)
    p.add_argument("--phi2", type=float, default=0.0)
    p.set_defaults(handler=cmd_overlap)
    return parser


def cmd_validate(args, config: RunConfig) -> int:
    model = load_model(args.model)
    dump_report(
        {
            "valid": True,
            "dimension": model.dimension,
            "ontic_points": model.space.size,
            "preparations": len(model.preparations),
            "responses": len(model.responses),
            "born_residual": born_residual(model),
        },
        args.report,
    )
    return EXIT_OK


def _has_product_structure(model) -> bool:
    return model.space.factors is not None and all(
        p.product is not None for p in model.preparations
    )


def cmd_onticity(args, config: RunConfig) -> int:
    model = load_model(args.model)
    overlaps = overlap_matrix(model, config.eps)
    report = overlaps.to_dict()
    negative = overlaps.classification is Onticity.PSI_EPISTEMIC
    if _has_product_structure(model) and not negative:
        verdicts = subsystem_onticity_check(model, config.eps)
        report["subsystems"] = [v.to_dict() for v in verdicts]
        negative = any(v.verdict is SubsystemVerdict.VIOLATION for v in verdicts)
    dump_report(report, args.report)
    return EXIT_NEGATIVE if negative and args.require_ontic else EXIT_OK


def cmd_decompose(args, config: RunConfig) -> int:
    model = load_model(args.model)
    try:
        label_map = construct_label_map(model, config.eps)
    except PsiEpistemicInput as e:
        logger.warning("%s", e)
        dump_report(
            {
                "classification": Onticity.PSI_EPISTEMIC.value,
                "offending_pair": list(e.pair),
                "overlap": e.mass,
                "decomposition": None,
            },
            args.output,
        )
        return EXIT_NEGATIVE if args.require_ontic else EXIT_OK
    decomposition = fiber_decomposition(model, label_map)
    check = verify_delta_form(model, decomposition)
    dump_report(
        {
            "classification": Onticity.PSI_ONTIC.value,
            "label_map": label_map.to_dict(),
            "decomposition": decomposition.to_dict(),
            "delta_form": check.to_dict(),
        },
        args.output,
    )
    dump_report(check.to_dict(), args.report)
    return EXIT_OK if check.holds else EXIT_NEGATIVE


def cmd_pbr(args, config: RunConfig) -> int:
    model = load_model(args.model)
    if model.dimension == 4:
        report = exclusion_witness(model, build_scenario(), config.eps)
    else:
        report = run_pbr_experiment(model, config.eps, config.product_space_cap)
    dump_report(report.to_dict(), args.report)
    return EXIT_OK


def cmd_born_check(args, config: RunConfig) -> int:
    model = config.lewis_model()
    psi = bloch_state(args.theta, args.phi)
    basis = qubit_basis(args.basis_angle, args.basis_phi)
    check = model.born_check(psi, basis, config.mc_samples, config.seed, config.workers)
    report = check.to_dict()
    report.update(seed=config.seed, workers=config.workers, e0_measure=config.e0_measure)
    dump_report(report, args.report)
    return EXIT_OK


def cmd_overlap(args, config: RunConfig) -> int:
    model = config.lewis_model()
    psi = bloch_state(args.theta1, args.phi1)
    phi = bloch_state(args.theta2, args.phi2)
    estimate = model.overlap_mc(psi, phi, config.mc_samples, config.seed)
    report = estimate.to_dict()
    report.update(seed=config.seed, e0_measure=config.e0_measure)
    dump_report(report, args.report)
    return EXIT_OK


def _configure_logging(verbosity: int):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    logging.getLogger("ontolab").setLevel(level)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run ontolab with the given arguments and return the exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code not in (0, None) else EXIT_OK
    _configure_logging(args.verbose)
    try:
        base = RunConfig.from_file(args.config) if args.config else None
        config = RunConfig.from_args(args, base)
        return args.handler(args, config)
    except (OntolabError, OSError) as e:
        sys.stderr.write(f"ontolab: error: {e}\n")
        return EXIT_INPUT


cli_dispatch = main


if __name__ == "__main__":
    sys.exit(main())
