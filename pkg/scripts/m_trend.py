"""Cross-formulation metrics as the particle count grows.

    python scripts/m_trend.py --b 46 60 100
"""
import argparse
import math
import warnings

from smallscatter import MaterialSpec, ScatteringConfig, build_lattice, design
from smallscatter.compare import diff_grids, diff_ori_red
from smallscatter.lattice import partition
from smallscatter.scattering import solve_ie, solve_ori, solve_red


def main():
    # desk-scale lattices are coarser than the scale-separation heuristics expect
    warnings.simplefilter("ignore", UserWarning)
    ap = argparse.ArgumentParser()
    ap.add_argument("--b", type=int, nargs="+", default=[46, 60, 100])
    ap.add_argument("--precision", default="double", choices=["double", "single"])
    args = ap.parse_args()
    spec = design(-1 + 0.001j, MaterialSpec(k=2 * math.pi * 1000 / 34400))
    print(f"{'b':>5} {'M':>10} {'ORI-RED':>9} {'RED-IE':>9} {'ORI-IE':>9} {'ORI s':>7}")
    for b in args.b:
        cfg = ScatteringConfig(build_lattice(b=b), spec, p_side=20, c_side=40, precision=args.precision)
        part = partition(cfg.lat, 20)
        ori, red, ie = solve_ori(cfg), solve_red(cfg), solve_ie(cfg)
        d1 = diff_ori_red(ori.solution, red.solution, part).metric
        d2 = diff_grids(ie.solution, red.solution, part, a_centered=True).metric
        d3 = diff_grids(ori.solution, ie.solution, part, a_centered=False).metric
        print(f"{b:>5} {b**3:>10} {d1:9.5f} {d2:9.5f} {d3:9.5f} {ori.elapsed:7.1f}")


if __name__ == "__main__":
    main()
