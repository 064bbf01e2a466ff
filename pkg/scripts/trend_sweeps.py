"""Formation probability and selected-CU count against K, D_max, eps and H."""

from _common import parser, run_and_write

SWEEPS = [
    ("vs_users", "user_count", (1000, 2000, 3000, 4000), {"bs_coverage_radius": 400.0}),
    ("vs_d2d_max", "d2d_max", (10.0, 15.0, 20.0, 25.0), {"bs_coverage_radius": 500.0}),
    ("vs_eps", "ring_half_width", (0.05, 0.25, 0.5), {"bs_coverage_radius": 300.0}),
    ("vs_height", "bs_height", (10.0, 20.0, 30.0, 40.0, 50.0), {"bs_coverage_radius": 400.0}),
]


def main():
    args = parser(__doc__.splitlines()[0], "trends").parse_args()
    for name, variable, values, changes in SWEEPS:
        res = run_and_write(args, name, variable, values, ("pcow", "cu"), **changes)
        cells = ", ".join(f"{p.value:g}: {p.p_cow_statistical:.3f}" for p in res.points)
        print(f"  {variable} -> {cells}")


if __name__ == "__main__":
    main()
