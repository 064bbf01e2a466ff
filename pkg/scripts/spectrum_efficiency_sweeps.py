"""Spectrum efficiency of the cooperative scheme and the fixed-UCA baseline.

Sweeps BS coverage radius (K = 2000) and BS height (R_BS = 100 m).
"""

from _common import parser, run_and_write


def main():
    args = parser(__doc__.splitlines()[0], "spectrum_efficiency").parse_args()
    sweeps = [
        ("vs_radius", "bs_coverage_radius", (100.0, 200.0, 300.0, 400.0, 500.0), {}),
        ("vs_height", "bs_height", (10.0, 20.0, 30.0, 40.0, 50.0), {"bs_coverage_radius": 100.0}),
    ]
    for name, variable, values, changes in sweeps:
        res = run_and_write(args, name, variable, values, ("se", "cu"), **changes)
        for p in res.points:
            print(f"  {variable}={p.value:g}: COW {p.mean_se_total:.2f} (steered {p.mean_se_steered:.2f}), "
                  f"fixed UCA {p.mean_se_fixed_baseline:.2f} bit/s/Hz, success {p.p_success_any:.3f}")


if __name__ == "__main__":
    main()
