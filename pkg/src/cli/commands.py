"""
Command Line Interface
check, eval and report commands over a JSON space configuration
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from geometry.conformal import ConformalFactor, s_tensor, transform_frame
from geometry.errors import DimensionError, ExpressionError, GeometryError, SingularEvaluationError
from geometry.invariants import Stroke
from geometry.sampler import PointGeometry
from geometry.tensors import MIXED_3, MIXED_4, Slot
from verify.checks import AllPointsSingularError, CheckKind, VerificationReport
from verify.suite import CATALOGUE, run_suite
from .config import ConfigError, SpaceConfig
from .formatting import format_components, parse_point

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

_DOWN_DOWN = (Slot.DOWN, Slot.DOWN)

# Tensor name -> (printed symbol, variance, getter)
Quantity = Tuple[str, Tuple[Slot, ...], Callable[[PointGeometry, SpaceConfig], np.ndarray]]
QUANTITIES: Dict[str, Quantity] = {
    "gamma": ("Gamma", MIXED_3, lambda geo, cfg: geo.weitzenbock.coeff),
    "weitzenbock": ("Gamma", MIXED_3, lambda geo, cfg: geo.weitzenbock.coeff),
    "lambda": ("Lambda", MIXED_3, lambda geo, cfg: geo.torsion.components),
    "C": ("C", (Slot.DOWN,), lambda geo, cfg: geo.C.components),
    "T": ("T", MIXED_3, lambda geo, cfg: geo.T.components),
    "K": ("K", MIXED_4, lambda geo, cfg: geo.K.components),
    "B": ("B", MIXED_4, lambda geo, cfg: geo.B.components),
    "Q": ("Q", MIXED_4, lambda geo, cfg: geo.Q.components),
    "conn-gamma": ("conn-gamma", MIXED_3, lambda geo, cfg: geo.conn_gamma.coeff),
    "conn-hat": ("conn-hat", MIXED_3, lambda geo, cfg: geo.conn_hat.coeff),
    "conn-circ": ("conn-circ", MIXED_3, lambda geo, cfg: geo.conn_circ.coeff),
    "R-lc": ("R-lc", MIXED_4, lambda geo, cfg: geo.curvature_lc.components),
    "R-sym": ("R-sym", MIXED_4, lambda geo, cfg: geo.curvature_sym.components),
    "christoffel": ("Gamma-lc", MIXED_3, lambda geo, cfg: geo.christoffel.coeff),
    "symmetric": ("Gamma-sym", MIXED_3, lambda geo, cfg: geo.symmetric.coeff),
    "contortion": ("gamma", MIXED_3, lambda geo, cfg: geo.contortion.components),
    "metric": ("g", _DOWN_DOWN, lambda geo, cfg: geo.metric.g.value),
    "S": ("S", _DOWN_DOWN, lambda geo, cfg: _s_components(geo, cfg)),
}


def _s_components(geo: PointGeometry, cfg: SpaceConfig) -> np.ndarray:
    rho = ConformalFactor(cfg.build_rho()).sample(geo.point, geo.metric)
    return s_tensor(rho, geo.metric, geo.christoffel).down


def setup_logging(verbose: bool = False, quiet: bool = False):
    """Configure the root logger once for command-line use"""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the check, eval and report sub-commands"""
    parser = argparse.ArgumentParser(
        prog="apspace-verify",
        description="Conformal-change verification for absolute-parallelism spaces")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    def suite_options(sub, default_format):
        sub.add_argument("config", help="space configuration (JSON)")
        sub.add_argument("--tol", type=float, help="tolerance for every non-oracle check")
        sub.add_argument("--points", type=int, help="number of random sample points")
        sub.add_argument("--seed", type=int, help="sampling seed")
        sub.add_argument("--stroke", choices=[s.value for s in Stroke],
                         help="connection behind the stroke derivative in B and Q")
        sub.add_argument("--workers", type=int, help="threads evaluating points")
        sub.add_argument("--format", choices=["text", "json"], default=default_format,
                         help=f"report format (default {default_format})")
        sub.add_argument("-o", "--output", help="write the report to a file instead of stdout")

    suite_options(commands.add_parser("check", help="run the verification suite"), "text")
    suite_options(commands.add_parser("report", help="emit the full verification report"), "json")

    evaluate = commands.add_parser("eval", help="print components of one quantity at a point")
    evaluate.add_argument("config", help="space configuration (JSON)")
    evaluate.add_argument("--point", required=True, help="coordinates 'c1,...,cn'")
    evaluate.add_argument("--tensor", required=True, choices=sorted(QUANTITIES), help="quantity to print")
    evaluate.add_argument("--rho-bar", action="store_true", help="evaluate on the conformally changed frame")
    evaluate.add_argument("--stroke", choices=[s.value for s in Stroke], help="stroke convention for B and Q")
    return parser


def apply_overrides(cfg: SpaceConfig, args: argparse.Namespace) -> SpaceConfig:
    """Command-line flags take precedence over the configuration file"""
    if getattr(args, "points", None) is not None:
        if args.points < 1:
            raise ConfigError("--points must be >= 1")
        cfg.num_points = args.points
        cfg.points = None
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        cfg.seed = args.seed
    if getattr(args, "stroke", None) is not None:
        cfg.stroke = Stroke(args.stroke)
    if getattr(args, "workers", None) is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        cfg.workers = args.workers
    if getattr(args, "tol", None) is not None:
        if not args.tol > 0:
            raise ConfigError("--tol must be > 0")
        oracle_names = {entry[0] for entry in CATALOGUE if entry[1] is CheckKind.ORACLE}
        kept = {key: value for key, value in cfg.tolerances.items()
                if key in oracle_names or key == CheckKind.ORACLE.value}
        kept.update({kind.value: args.tol for kind in CheckKind if kind is not CheckKind.ORACLE})
        cfg.tolerances = kept
    return cfg


def _emit(text: str, output: Optional[str]):
    if output:
        Path(output).write_text(text + "\n")
        logger.info("report written to %s", output)
    else:
        print(text)


def _run(args: argparse.Namespace) -> VerificationReport:
    cfg = apply_overrides(SpaceConfig.load(args.config), args)
    cfg.check_tolerance_keys([entry[0] for entry in CATALOGUE])
    return run_suite(cfg.build_space(), cfg.build_rho(), cfg.suite_settings())


def cmd_check(args: argparse.Namespace) -> int:
    """Run the suite; exit 0 iff every gating check passes"""
    report = _run(args)
    _emit(report.to_json() if args.format == "json" else report.to_text(), args.output)
    for failure in report.failures():
        logger.warning("FAILED %s (max deviation %.3e, tolerance %.1e)",
                       failure.name, failure.max_rel, failure.spec.tolerance)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_report(args: argparse.Namespace) -> int:
    """Full report, structured by default"""
    return cmd_check(args)


def cmd_eval(args: argparse.Namespace) -> int:
    """Print the components of one quantity at one point"""
    cfg = apply_overrides(SpaceConfig.load(args.config), args)
    space = cfg.build_space()
    if args.rho_bar:
        space = transform_frame(space, cfg.build_rho())
    try:
        point = parse_point(args.point, cfg.dimension)
    except (ValueError, ExpressionError) as e:
        raise ConfigError(str(e), field="--point")
    if cfg.domain:
        bounds = np.asarray(cfg.domain, dtype=float)
        if np.any(point < bounds[:, 0]) or np.any(point > bounds[:, 1]):
            raise ConfigError(f"point {point.tolist()} lies outside the domain", field="--point")
    symbol, variance, getter = QUANTITIES[args.tensor]
    geo = PointGeometry(space, point, cfg.stroke)
    try:
        components = getter(geo, cfg)
    except SingularEvaluationError as e:
        raise ConfigError(f"singular at point {point.tolist()}: {e}", field="--point")
    print(format_components(symbol, variance, components))
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "report": cmd_report,
    "eval": cmd_eval,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns 0 on success, 1 on check failure, 2 on usage or configuration errors"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return int(exit_request.code or 0)
    setup_logging(args.verbose, args.quiet)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ExpressionError, DimensionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except AllPointsSingularError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except GeometryError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
