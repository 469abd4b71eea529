#!/usr/bin/env python3
"""
Reproduce the simulation tables: empirical CDFs of merged p-values, borderline
epsilon for discrete p-values and discovery-matrix corners

Full scale (K = 10^6, 10^5 replications) takes hours; --quick runs the same
experiments on small inputs in about a minute.
"""

import argparse
import logging
import sys

from pmerge_sdk.merging import parse_method
from pmerge_sdk.models.base_models import NoRejectionError, PMergeError
from pmerge_lab.discovery import median_discovery_matrix
from pmerge_lab.export import EPSILON_HEADER, ResultExporter, epsilon_rows
from pmerge_lab.simulation import DiscreteScenario, ZTestModel, borderline_epsilon, default_grid, empirical_cdfs
from config.settings import get_simulation_config, setup_logging

logger = logging.getLogger(__name__)

METHODS = ["bonferroni", "hommel", "simes", "m:r=-1", "m-star:r=-1", "grid-harmonic"]
CORRELATIONS = (0.9, 0.5, 0.0)


def _file_label(name: str) -> str:
    return name.replace(":", "_").replace("=", "")


def reproduce_cdfs(exporter: ResultExporter, K: int, reps: int, seed: int, threads: int) -> list:
    """CDF curves for each correlation, for 1% alternatives and for discretized inputs"""
    simulation_config = get_simulation_config()
    runs = [(f"cdf_rho{rho}", K // 1000, rho, None) for rho in CORRELATIONS]
    runs.append(("cdf_rho0.9_alt1pct", K // 100, 0.9, None))
    runs.append(("cdf_rho0.9_discrete", K // 1000, 0.9, simulation_config["discretize_D"]))

    paths = []
    for filename, K1, rho, D in runs:
        print(f"📈 {filename}: K={K}, K1={K1}, rho={rho}, reps={reps}")
        model = ZTestModel(K=K, K1=max(K1, 1), rho=rho, flip_last=True, seed=seed)
        curves = empirical_cdfs(model, METHODS, reps, default_grid(D is not None), D, threads)
        paths.append(exporter.export_cdfs(curves, filename, seed))
    return paths


def reproduce_epsilons(exporter: ResultExporter, K: int, alternatives: list) -> list:
    """Borderline epsilon for every method and number of small p-values, raw and discretized"""
    D = get_simulation_config()["discretize_D"]
    paths = []
    for discretize_D, filename in ((None, "epsilon"), (D, "epsilon_discrete")):
        rows = []
        for K1 in alternatives:
            epsilons = {}
            for name in METHODS:
                try:
                    epsilons[name] = borderline_epsilon(DiscreteScenario(K, K1, 0.01, discretize_D), name)
                except NoRejectionError as e:
                    logger.warning(f"Skipping {name} for K1={K1}: {e.message}")
            rows.extend(epsilon_rows(epsilons, K1))
            print(f"🎯 {filename} K1={K1}: " + ", ".join(f"{m}={v:.3g}" for m, v in epsilons.items()))
        paths.append(exporter.export_table(EPSILON_HEADER, rows, filename))
    return paths


def reproduce_discovery_matrices(exporter: ResultExporter, K: int, corner: int, median_of: int,
                                 seed: int, threads: int) -> list:
    """Median discovery-matrix corners for every family and correlation"""
    paths = []
    for rho in CORRELATIONS:
        model = ZTestModel(K=K, K1=K // 10, rho=rho, flip_last=True, seed=seed)
        samples = [model.draw(i) for i in range(median_of)]
        matrices = {}
        for name in METHODS:
            print(f"🧮 DM rho={rho} {name}: corner {corner}, median of {median_of}")
            matrices[_file_label(name)] = median_discovery_matrix(samples, parse_method(name), corner,
                                                                  threads=threads)
        paths.extend(exporter.export_multiple_matrices(matrices, f"dm_rho{rho}", seed))
    return paths


def main() -> int:
    simulation_config = get_simulation_config()
    parser = argparse.ArgumentParser(
        description="Reproduce the simulation tables as CSV files",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python reproduce_figures.py --quick
  python reproduce_figures.py --only epsilon
  PMERGE_THREADS=8 python reproduce_figures.py --output-dir figures
        """
    )
    parser.add_argument("--quick", action="store_true", help="Small inputs and few replications")
    parser.add_argument("--only", choices=["cdf", "epsilon", "dm"], default=None)
    parser.add_argument("--output-dir", default=None, help="Directory for the CSV files")
    parser.add_argument("--seed", type=int, default=simulation_config["seed"])
    parser.add_argument("--threads", type=int, default=simulation_config["threads"])
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args()

    setup_logging("DEBUG" if args.verbose else None)

    if args.quick:
        K_cdf, reps, K_eps, alternatives, K_dm, corner, median_of = 10_000, 1_000, 10_000, [1, 10, 100], 1000, 40, 3
    else:
        K_cdf, reps, K_eps, alternatives = 1_000_000, 100_000, 1_000_000, [1, 10, 100, 1000, 10_000]
        K_dm, corner, median_of = 1000, simulation_config["default_corner"], 10

    print("🎯 pmerge - simulation reproduction")
    print("=" * 50)
    exporter = ResultExporter(args.output_dir)

    try:
        created = []
        if args.only in (None, "epsilon"):
            created += reproduce_epsilons(exporter, K_eps, alternatives)
        if args.only in (None, "dm"):
            created += reproduce_discovery_matrices(exporter, K_dm, corner, median_of, args.seed, args.threads)
        if args.only in (None, "cdf"):
            created += reproduce_cdfs(exporter, K_cdf, reps, args.seed, args.threads)
    except PMergeError as e:
        print(f"❌ Reproduction failed: {e.message}")
        logger.error(f"Reproduction failed: {e.message} {e.details}", exc_info=True)
        return e.exit_code

    print(f"\n✅ Wrote {len(created)} files to {exporter.output_dir}")
    for path in created:
        print(f"   {path.name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
