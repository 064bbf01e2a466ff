"""Analytic and Monte Carlo formation probability against BS coverage radius.

Reference setup: f = 1 GHz, H = 10 m, D_max = 10 m, eps = 0.5 m, K = 2000.
Prints both analytic exponent conventions next to the Monte Carlo estimate.
"""

from _common import parser, run_and_write

RADII = (100.0, 200.0, 300.0, 400.0, 500.0)


def main():
    args = parser(__doc__.splitlines()[0], "formation_probability").parse_args()
    res = run_and_write(args, "vs_radius", "bs_coverage_radius", RADII, ("pcow", "cu"))
    print(f"{'R_BS':>6} {'E=K':>8} {'E=pairs':>8} {'MC':>7} {'stderr':>7}")
    for p in res.points:
        print(f"{p.value:6.0f} {p.p_cow_analytic_per_user:8.4f} {p.p_cow_analytic_per_pair:8.4f} "
              f"{p.p_cow_statistical:7.4f} {p.stderr:7.4f}")


if __name__ == "__main__":
    main()
