#!/usr/bin/env python3
"""
Run Examples Script - Quick tour of the SDK and the lab
"""

import sys

import numpy as np


def run_sdk_examples() -> bool:
    """Merging, coefficients, calibrators"""
    from pmerge_sdk import PMergeSDK
    from pmerge_sdk.merging import gamma_K, improvement_ratio_mstar

    print("🚀 Running SDK Examples...")
    print("=" * 50)

    try:
        sdk = PMergeSDK()
        p = [0.01, 0.04, 0.9]
        for method in ["bonferroni", "simes", "hommel", "grid-harmonic", "m:r=-1", "m-star:r=-1"]:
            result = sdk.merge(p, method)
            print(f"   {method:>14}: {result.p:.6g}")

        coeffs = sdk.coefficients(-1, 10)
        print(f"\n   Harmonic coefficients K=10: c={coeffs.c_r:.6g}, d={coeffs.d_r:.6g}, b={coeffs.b_rK:.6g}")

        report = sdk.admissibility("mstar:r=-1", 5)
        print(f"   M* calibrator admissibility condition for K=5: {report.satisfied}")

        print(f"   gamma_K for K=100: {gamma_K(100):.4f}; M* ratio for K=100: {improvement_ratio_mstar(100):.4f}")
        return True

    except Exception as e:
        print(f"❌ Failed to run SDK examples: {e}")
        return False


def run_lab_examples() -> bool:
    """Discovery matrix, simulation and domination"""
    from pmerge_lab.analysis import m_family_domination
    from pmerge_lab.discovery import discovery_matrix, true_discovery_lower_bound
    from pmerge_lab.simulation import DiscreteScenario, ZTestModel, borderline_epsilon

    print("\n🚀 Running Lab Examples...")
    print("=" * 50)

    try:
        model = ZTestModel(K=200, K1=20, rho=0.5, seed=7)
        p = model.draw(0)
        dm = discovery_matrix(p, "grid-harmonic", corner=20)
        bounds = [true_discovery_lower_bound(dm, l, 0.05) for l in (5, 10, 20)]
        print(f"   True discoveries among the 5/10/20 smallest at 95%: {bounds}")

        scenario = DiscreteScenario(10_000, 10)
        for method in ["bonferroni", "hommel", "grid-harmonic"]:
            print(f"   Borderline eps for {method}: {borderline_epsilon(scenario, method):.3g}")

        verdict = m_family_domination(-1.0, 0.0, 5)
        print(f"   Harmonic vs geometric, K=5: {verdict.relation}")
        print(f"   Median p-value of the draw: {np.median(p.values):.3g}")
        return True

    except Exception as e:
        print(f"❌ Failed to run lab examples: {e}")
        return False


def main():
    """Main function"""
    print("🎯 pmerge - Example Runner")
    print("=" * 50)

    if len(sys.argv) > 1 and sys.argv[1] == "lab":
        success = run_lab_examples()
    elif len(sys.argv) > 1 and sys.argv[1] == "sdk":
        success = run_sdk_examples()
    else:
        sdk_success = run_sdk_examples()
        lab_success = run_lab_examples()
        success = sdk_success and lab_success

    if success:
        print("\n✅ All examples completed successfully!")
    else:
        print("\n❌ Some examples failed!")
        sys.exit(1)


if __name__ == "__main__":
    main()
