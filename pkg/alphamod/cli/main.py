"""
Command-line front end
======================

    alphamod covering build|validate   --alpha A --dim n --grid N [--period L]
    alphamod norm function|symbol      --input obj.json --alpha A [--p --q --s | --s1 --s2]
    alphamod op apply|commutator|norm-estimate --symbol sigma.json [--input f.json] [--lipschitz a.json]
    alphamod verify thm11|thm12|lemmas|appendix|all [--alpha 0,0.5,1] [--trials T] [--seed S] [--out DIR]

Exit codes: 0 success, 1 usage or configuration error, 2 a check or
validation failed.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from alphamod.cli.reports import emit_report, to_json, write_verification
from alphamod.config import settings
from alphamod.core.covering import build_covering
from alphamod.core.operators import (
    commutator_apply,
    commutator_twisted,
    make_lipschitz,
    operator_norm_estimate,
    quantize_apply,
)
from alphamod.core.spaces import alpha_modulation_norm, product_symbol_norm
from alphamod.exceptions import AlphamodError, DomainTagError
from alphamod.models.grid import SampledFunction, SampledSymbol, dumps_envelope, from_envelope
from alphamod.models.run_config import RunConfig
from alphamod.models.spaces import NormParams
from alphamod.verify.checks import TARGETS, run_verification
from alphamod.verify.suites import load_verify_defaults

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2


class UsageError(Exception):
    """Bad command line; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _alpha_list(text: str) -> List[float]:
    try:
        return [float(token) for token in text.split(",") if token.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid alpha list {text!r}") from e


# ============================================================================
# PARSER
# ============================================================================

def _grid_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dim", type=int, default=None, help="Space dimension n (1 or 2)")
    parser.add_argument("--grid", type=int, default=None, help="Lattice points per axis N")
    parser.add_argument("--period", type=float, default=None, help="Torus period L (default 2 pi)")


def _common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="YAML overlay for the defaults")
    parser.add_argument("--out", type=Path, default=None, help="Output file (or directory for verify)")
    parser.add_argument("--format", choices=["csv", "json"], default="json", help="Report format")
    parser.add_argument("--strict-band", action="store_true", default=None, help="Raise on band violations")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alphamod", description="Alpha-modulation spaces and pseudo-differential operators")
    verbs = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    covering = verbs.add_parser("covering", help="Build or validate an alpha-covering")
    covering.add_argument("action", choices=["build", "validate"])
    covering.add_argument("--alpha", type=float, required=True)
    _grid_arguments(covering)
    _common_arguments(covering)

    norm = verbs.add_parser("norm", help="Alpha-modulation norm of a function or symbol")
    norm.add_argument("action", choices=["function", "symbol"])
    norm.add_argument("--input", type=Path, required=True, help="JSON envelope")
    norm.add_argument("--alpha", type=float, default=0.0)
    norm.add_argument("--p", default="2")
    norm.add_argument("--q", default="2")
    norm.add_argument("--s", type=float, default=0.0)
    norm.add_argument("--s1", type=float, default=0.0)
    norm.add_argument("--s2", type=float, default=0.0)
    _common_arguments(norm)

    op = verbs.add_parser("op", help="Apply operators and commutators")
    op.add_argument("action", choices=["apply", "commutator", "norm-estimate"])
    op.add_argument("--symbol", type=Path, required=True, help="Symbol envelope")
    op.add_argument("--input", type=Path, default=None, help="Function envelope")
    op.add_argument("--lipschitz", type=Path, default=None, help="Real function envelope for the commutator")
    op.add_argument("--twisted", action="store_true", help="Use the twisted-symbol commutator")
    op.add_argument("--tol", type=float, default=None)
    op.add_argument("--max-iter", type=int, default=None)
    op.add_argument("--seed", type=int, default=0)
    _common_arguments(op)

    verify = verbs.add_parser("verify", help="Run bound verification suites")
    verify.add_argument("target", choices=list(TARGETS))
    verify.add_argument("--alpha", type=_alpha_list, default=None, help="Comma-separated alphas")
    verify.add_argument("--trials", type=int, default=None)
    verify.add_argument("--seed", type=int, default=42)
    verify.add_argument("--jobs", type=int, default=None, help="Worker processes (ALPHAMOD_JOBS)")
    verify.add_argument("--no-refine", action="store_true", help="Skip the N -> 2N refinement pass")
    verify.add_argument("--drift", type=float, default=None, help="Override the refinement drift tolerance")
    _grid_arguments(verify)
    _common_arguments(verify)
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


# ============================================================================
# HELPERS
# ============================================================================

def _run_config(args: argparse.Namespace, command: str) -> RunConfig:
    defaults = load_verify_defaults(getattr(args, "config", None))
    suite = defaults.suite
    alphas = getattr(args, "alpha", None)
    if isinstance(alphas, float):
        alphas = [alphas]
    overrides: Dict[str, Any] = {}
    if getattr(args, "drift", None) is not None:
        overrides["ceilings"] = {"drift": args.drift}
    return RunConfig(
        command=command,
        alphas=alphas if alphas is not None else defaults.checks.alphas,
        dim=getattr(args, "dim", None) or suite.dim,
        points_per_axis=getattr(args, "grid", None) or suite.points_per_axis,
        period=getattr(args, "period", None) or suite.period,
        trials=getattr(args, "trials", None),
        seed=getattr(args, "seed", 42),
        jobs=getattr(args, "jobs", None),
        refine=not getattr(args, "no_refine", False),
        strict_band=args.strict_band,
        config_path=getattr(args, "config", None),
        input_path=getattr(args, "input", None),
        symbol_path=getattr(args, "symbol", None),
        lipschitz_path=getattr(args, "lipschitz", None),
        output_path=args.out,
        output_format=args.format,
        overrides=overrides,
    )


def _load(path: Optional[Path], what: str) -> Any:
    if path is None:
        raise UsageError(f"--{what} is required for this command")
    if not path.exists():
        raise FileNotFoundError(f"{what} file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return from_envelope(json.load(fh))
        except AlphamodError:
            raise
        except (KeyError, ValueError) as e:
            raise DomainTagError(f"malformed envelope {path}: {e}") from e


def _load_function(path: Optional[Path], what: str = "input") -> SampledFunction:
    obj = _load(path, what)
    if not isinstance(obj, SampledFunction):
        raise DomainTagError(f"{path} holds a symbol, expected a function")
    return obj


def _load_symbol(path: Optional[Path]) -> SampledSymbol:
    obj = _load(path, "symbol")
    if not isinstance(obj, SampledSymbol):
        raise DomainTagError(f"{path} holds a function, expected a symbol")
    return obj


def _write_text(path: Optional[Path], text: str) -> None:
    if path is None:
        print(text)
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote {path}")


# ============================================================================
# VERBS
# ============================================================================

def run_covering(args: argparse.Namespace) -> int:
    config = _run_config(args, f"covering {args.action}")
    ceiling = load_verify_defaults(config.config_path).ceilings.partition_residual
    covering = build_covering(config.alphas[0], config.grid())
    report = covering.admissibility
    if args.action == "build":
        if config.output_path is not None:
            emit_report(covering, config.output_format, config.output_path)
        else:
            print(to_json(covering.summary()))
        return EXIT_OK

    if config.output_path is not None:
        emit_report(report, config.output_format, config.output_path)
    for key, value in report.to_dict().items():
        print(f"{key:<28} {value}")
    failed = False
    if report.partition_residual > ceiling:
        print(f"❌ partition residual {report.partition_residual:.3e} exceeds {ceiling:.0e}")
        failed = True
    if report.support_violations > 0:
        print(f"❌ {report.support_violations} window samples active outside their pieces")
        failed = True
    if failed:
        return EXIT_FAILED
    print(f"✅ alpha={config.alphas[0]:g} covering admissible ({report.piece_count} pieces)")
    return EXIT_OK


def run_norm(args: argparse.Namespace) -> int:
    config = _run_config(args, f"norm {args.action}")
    if args.action == "function":
        f = _load_function(config.input_path)
        params = NormParams(alpha=args.alpha, p=args.p, q=args.q, s=args.s)
        breakdown = alpha_modulation_norm(f, params, build_covering(args.alpha, f.grid), config.strict_band)
    else:
        obj = _load(config.input_path, "input")
        if not isinstance(obj, SampledSymbol):
            raise DomainTagError(f"{config.input_path} holds a function, expected a symbol")
        params = NormParams(alpha=args.alpha, s1=args.s1, s2=args.s2)
        breakdown = product_symbol_norm(obj, params, build_covering(args.alpha, obj.grid), config.strict_band)
    if config.output_path is not None:
        emit_report(breakdown, config.output_format, config.output_path)
    print(f"{breakdown.total:.17g}")
    return EXIT_OK


def run_op(args: argparse.Namespace) -> int:
    config = _run_config(args, f"op {args.action}")
    sigma = _load_symbol(config.symbol_path)
    if args.action == "norm-estimate":
        power = load_verify_defaults(config.config_path).power_iteration
        result = operator_norm_estimate(
            sigma,
            tol=args.tol if args.tol is not None else power.tol,
            max_iter=args.max_iter if args.max_iter is not None else power.max_iter,
            seed=args.seed,
        )
        payload = {"norm": result.norm, "iterations": result.iterations, "converged": result.converged}
        _write_text(config.output_path, to_json(payload).rstrip("\n"))
        return EXIT_OK if result.converged else EXIT_FAILED

    f = _load_function(config.input_path)
    if args.action == "apply":
        out = quantize_apply(sigma, f)
    else:
        a = make_lipschitz(_load_function(config.lipschitz_path, "lipschitz"))
        commutator: Callable[..., SampledFunction] = commutator_twisted if args.twisted else commutator_apply
        out = commutator(sigma, a, f, config.strict_band)
    _write_text(config.output_path, dumps_envelope(out))
    return EXIT_OK


def run_verify(args: argparse.Namespace) -> int:
    config = _run_config(args, f"verify {args.target}")
    if config.strict_band is not None:
        settings.STRICT_BAND = config.strict_band
        os.environ["ALPHAMOD_STRICT_BAND"] = str(config.strict_band).lower()
    defaults = load_verify_defaults(config.config_path, config.suite_overrides())
    logger.info(f"=== verify {args.target}: N={config.points_per_axis}, dim={config.dim}, seed={config.seed} ===")
    reports = run_verification(
        args.target,
        defaults=defaults,
        alphas=config.alphas,
        trials=config.trials,
        seed=config.seed,
        jobs=config.jobs,
        refined=config.refine,
    )
    if config.output_path is not None:
        write_verification(reports, config.output_path)
    for report in reports:
        status = "✅" if report.passed else "❌"
        print(f"{status} {report.name:<36} max={report.max_ratio:.6g} median={report.median_ratio:.6g}")
    return EXIT_OK if all(report.passed for report in reports) else EXIT_FAILED


VERBS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "covering": run_covering,
    "norm": run_norm,
    "op": run_op,
    "verify": run_verify,
}


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run the verb; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"alphamod: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(args.verbose)
    try:
        return VERBS[args.verb](args)
    except UsageError as e:
        logger.error(f"Usage error: {e}")
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
    except FileNotFoundError as e:
        logger.error(str(e))
    except AlphamodError as e:
        logger.error(f"{type(e).__name__}: {e}")
    except OSError as e:
        logger.error(f"I/O error: {e}")
    return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
