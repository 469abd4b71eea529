"""
pmerge command line

Subcommands print CSV (or JSON for dominate) to stdout; logs go to stderr.
Exit codes: 0 success, 2 input error, 3 domain or method error.
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence, TextIO

from pmerge_sdk import PMergeSDK
from pmerge_sdk.core.pvector import lsc_version, read_pvector_csv
from pmerge_sdk.merging import gamma_K, improvement_ratio_mstar, parse_method
from pmerge_sdk.merging.methods import format_real
from pmerge_sdk.models.base_models import InputError, PMergeError
from pmerge_lab.analysis import m_family_domination, m_scaled_domination
from pmerge_lab.discovery import discovery_matrix, median_discovery_matrix
from pmerge_lab.export import (
    COEFFICIENT_HEADER,
    CATEGORY_HEADER,
    CDF_HEADER,
    DM_HEADER,
    EPSILON_HEADER,
    MERGE_HEADER,
    RATIO_HEADER,
    ResultExporter,
    category_rows,
    cdf_rows,
    coefficient_rows,
    dm_rows,
    epsilon_rows,
    merge_rows,
    write_csv,
)
from pmerge_lab.simulation import (
    DiscreteScenario,
    ZTestModel,
    borderline_epsilon,
    default_grid,
    empirical_cdfs,
)
from config.settings import get_simulation_config, setup_logging

logger = logging.getLogger(__name__)

ALL_METHODS = ["bonferroni", "simes", "hommel", "grid-harmonic", "m:r=-1", "m-star:r=-1"]


def _method_list(text: str) -> List[str]:
    if text.strip() == "all":
        return list(ALL_METHODS)
    return [m.strip() for m in text.split(",") if m.strip()]


def _alphas(text: str) -> List[float]:
    try:
        return [float(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Cannot parse thresholds {text!r}")


def _warn_if_invalid(method_names: Sequence[str]):
    for name in method_names:
        method = parse_method(name)
        if not method.universally_valid:
            logger.warning(f"{method.name} is not a valid p-merging function under arbitrary dependence")


def cmd_merge(args, out: TextIO) -> int:
    sdk = PMergeSDK()
    method = sdk.method(args.method)
    _warn_if_invalid([args.method])
    p = read_pvector_csv(args.input)
    write_csv(out, MERGE_HEADER, merge_rows([sdk.merge(p, method)]), args.seed)
    if args.lsc:
        out.write(f"# lsc={format_real(lsc_version(method, p))}\n")
    return 0


def cmd_coeffs(args, out: TextIO) -> int:
    coeffs = PMergeSDK().coefficients(args.r, args.K)
    write_csv(out, COEFFICIENT_HEADER, coefficient_rows([coeffs]), args.seed)
    return 0


def _model(args) -> ZTestModel:
    return ZTestModel(K=args.K, K1=args.K1, mu_alt=args.mu, rho=args.rho,
                      flip_last=args.flip_last, seed=args.seed)


def cmd_dm(args, out: TextIO) -> int:
    family = parse_method(args.family)
    if args.input:
        dm = discovery_matrix(read_pvector_csv(args.input), family, args.corner, args.alphas,
                              threads=args.threads)
    else:
        model = _model(args)
        samples = [model.draw(i) for i in range(args.median_of)]
        dm = median_discovery_matrix(samples, family, args.corner, alphas=args.alphas,
                                     threads=args.threads)

    if args.output_dir:
        exporter = ResultExporter(args.output_dir, timestamped=False)
        for path in exporter.export_discovery_matrix(dm, f"dm_{family.tag.value}", args.seed):
            logger.info(f"Wrote {path}")
        return 0

    write_csv(out, DM_HEADER, dm_rows(dm), args.seed)
    out.write("# categories\n")
    write_csv(out, CATEGORY_HEADER, category_rows(dm, args.alphas))
    return 0


def cmd_simulate(args, out: TextIO) -> int:
    methods = _method_list(args.methods)
    _warn_if_invalid(methods)

    if args.mode == "epsilon":
        epsilons = {}
        for name in methods:
            scenario = DiscreteScenario(args.K, args.K1, args.alpha_target, args.discretize)
            epsilons[parse_method(name).name] = borderline_epsilon(scenario, name)
        write_csv(out, EPSILON_HEADER, epsilon_rows(epsilons, args.K1), args.seed)
        return 0

    grid = default_grid(args.discretize is not None, args.grid_size)
    curves = empirical_cdfs(_model(args), methods, args.reps, grid, args.discretize, args.threads)
    write_csv(out, CDF_HEADER, cdf_rows(curves), args.seed)
    return 0


def cmd_ratio(args, out: TextIO) -> int:
    gamma = gamma_K(args.K)
    mstar = format_real(improvement_ratio_mstar(args.K)) if args.K >= 3 else ""
    write_csv(out, RATIO_HEADER, [[str(args.K), format_real(gamma), mstar]], args.seed)
    return 0


def cmd_dominate(args, out: TextIO) -> int:
    if args.a is not None or args.b is not None:
        if args.a is None or args.b is None:
            raise InputError("Scaled comparison needs both --a and --b")
        verdict = m_scaled_domination(args.r, args.a, args.s, args.b, args.K)
    else:
        verdict = m_family_domination(args.r, args.s, args.K)
    out.write(verdict.to_json() + "\n")
    return 0


def _add_model_flags(parser: argparse.ArgumentParser, K: int, K1: int, rho: float):
    simulation_config = get_simulation_config()
    parser.add_argument("--K", type=int, default=K, help=f"Number of p-values (default {K})")
    parser.add_argument("--K1", type=int, default=K1, help=f"Number of alternatives (default {K1})")
    parser.add_argument("--rho", type=float, default=rho, help=f"Bulk correlation (default {rho})")
    parser.add_argument("--mu", type=float, default=simulation_config["mu_alt"],
                        help="Alternative mean")
    parser.add_argument("--flip-last", action="store_true",
                        help="Last observation negatively correlated with the rest")


def build_parser() -> argparse.ArgumentParser:
    simulation_config = get_simulation_config()
    parser = argparse.ArgumentParser(
        prog="pmerge",
        description="Merge p-values under arbitrary dependence",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  pmerge merge pvalues.csv hommel
  pmerge coeffs --r -1 --K 3
  pmerge dm pvalues.csv --family grid-harmonic --corner 120
  pmerge simulate epsilon --K 1000000 --K1 1000 --methods all
  pmerge ratio --K 100
  pmerge dominate --r 2 --s 5 --K 3
        """
    )
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--log-file", action="store_true", help="Also write a log file")
    parser.add_argument("--seed", type=int, default=simulation_config["seed"],
                        help="Random seed (default from PMERGE_SEED or 42)")
    parser.add_argument("--threads", type=int, default=simulation_config["threads"],
                        help="Worker threads (default from PMERGE_THREADS)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    merge = subparsers.add_parser("merge", help="Merge the p-values of a CSV file")
    merge.add_argument("input", help="CSV file with one p-value per line")
    merge.add_argument("method", help="Method string, e.g. hommel, m:r=-1, induced:mstar:r=-1")
    merge.add_argument("--lsc", action="store_true", help="Also print the lower semicontinuous version")
    merge.set_defaults(handler=cmd_merge)

    coeffs = subparsers.add_parser("coeffs", help="Solve the M-family coefficients")
    coeffs.add_argument("--r", type=float, required=True)
    coeffs.add_argument("--K", type=int, required=True)
    coeffs.set_defaults(handler=cmd_coeffs)

    dm = subparsers.add_parser("dm", help="Discovery matrix of a CSV file or of simulated inputs")
    dm.add_argument("input", nargs="?", help="CSV file (simulate from the model flags if omitted)")
    dm.add_argument("--family", default="grid-harmonic")
    dm.add_argument("--corner", type=int, default=None)
    dm.add_argument("--alphas", type=_alphas, default=list(simulation_config["default_alphas"]))
    dm.add_argument("--median-of", type=int, default=1,
                    help="Element-wise median over this many simulated inputs")
    dm.add_argument("--output-dir", default=None, help="Write the two CSV files here instead of stdout")
    _add_model_flags(dm, K=1000, K1=10, rho=0.9)
    dm.set_defaults(handler=cmd_dm)

    simulate = subparsers.add_parser("simulate", help="Empirical CDFs or borderline epsilon")
    simulate.add_argument("mode", choices=["cdf", "epsilon"])
    simulate.add_argument("--methods", default="all", help="Comma-separated methods or 'all'")
    simulate.add_argument("--reps", type=int, default=10_000)
    simulate.add_argument("--grid-size", type=int, default=simulation_config["cdf_grid_size"])
    simulate.add_argument("--discretize", type=int, default=None, metavar="D",
                          help="Replace p by ceil(D p)/D before merging")
    simulate.add_argument("--alpha-target", type=float, default=0.01)
    _add_model_flags(simulate, K=1000, K1=10, rho=0.9)
    simulate.set_defaults(handler=cmd_simulate)

    ratio = subparsers.add_parser("ratio", help="Improvement ratios gamma_K and 1-(K-1)c_{-1}")
    ratio.add_argument("--K", type=int, required=True)
    ratio.set_defaults(handler=cmd_ratio)

    dominate = subparsers.add_parser("dominate", help="Domination verdict for the M-family")
    dominate.add_argument("--r", type=float, required=True)
    dominate.add_argument("--s", type=float, required=True)
    dominate.add_argument("--K", type=int, required=True)
    dominate.add_argument("--a", type=float, default=None, help="Scale of M_r (with --b)")
    dominate.add_argument("--b", type=float, default=None, help="Scale of M_s (with --a)")
    dominate.set_defaults(handler=cmd_dominate)

    return parser


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    """Run the command line; returns the exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging("DEBUG" if args.verbose else None, log_to_file=args.log_file)
    out = out or sys.stdout

    try:
        return args.handler(args, out)
    except PMergeError as e:
        logger.error(e.message)
        return e.exit_code
    except (OSError, UnicodeDecodeError) as e:
        logger.error(f"Cannot read input: {e}")
        return InputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
