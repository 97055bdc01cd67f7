"""Command line front end.

    smallscatter run <config>
    smallscatter design <config> --n=<complex>
    smallscatter compare <tableA> <tableB> --partition <p_side>

Exit codes: 0 success, 2 config error, 3 solver non-convergence, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from itertools import combinations
from pathlib import Path

import numpy as np

from . import compare as cmp
from .config import ConfigError, ExperimentConfig, format_complex, load_config, parse_complex
from .lattice import partition
from .material import h_from_target_n, n_from_h
from .scattering import FORMULATIONS, field_from_sources, report_values, solve_formulation, sources

log = logging.getLogger("smallscatter")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


def _header(cfg_hash: str, formulation: str, extra: str = "") -> str:
    line = f"# config_hash={cfg_hash} formulation={formulation}"
    return line + (f" {extra}" if extra else "") + "\n"


def _write_table(path: Path, header: str, columns: str, rows: np.ndarray, fmts) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header)
        fh.write(columns + "\n")
        np.savetxt(fh, rows, fmt=fmts, delimiter=",")


def write_grid_table(path, cfg_hash, formulation, points, values) -> None:
    rows = np.column_stack([points, values.real, values.imag])
    _write_table(Path(path), _header(cfg_hash, formulation), "x,y,z,re,im", rows, ["%.6f"] * 3 + ["%.9e"] * 2)


def read_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Points and complex values of an x,y,z,re,im CSV table."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip() and not ln.startswith("#")]
    if lines and lines[0].split(",")[0].strip() == "x":
        lines = lines[1:]
    if not lines:
        raise ValueError(f"{path}: no data rows")
    data = np.loadtxt(lines, delimiter=",", ndmin=2)
    return data[:, :3], data[:, 3] + 1j * data[:, 4]


def central_slice(scfg, rep) -> tuple[float, np.ndarray]:
    """Field on the plane x = centre, sampled at the solution's own (y, z) nodes."""
    u = np.asarray(rep.solution)
    n = u.shape[0]
    side = scfg.lat.side
    x0 = scfg.lat.origin[0] + side / 2
    if rep.formulation == "ORI":
        # particle nodes: use the node plane closest to the centre
        i = int(round((x0 - scfg.lat.origin[0]) / scfg.lat.d))
        i = min(i, n - 1)
        return scfg.lat.origin[0] + i * scfg.lat.d, u[i]
    pos, q, tol = sources(scfg, rep)
    t = (np.arange(n) + 0.5) * side / n
    yy, zz = np.meshgrid(t + scfg.lat.origin[1], t + scfg.lat.origin[2], indexing="ij")
    pts = np.column_stack([np.full(yy.size, x0), yy.ravel(), zz.ravel()])
    return x0, field_from_sources(pts, pos, q, scfg.spec, skip_tol=tol).reshape(n, n)


def _pair_diff(a: str, b: str, sols: dict, part) -> cmp.DiffReport:
    order = {"ORI": 0, "RED": 1, "IE": 2}
    a, b = sorted((a, b), key=order.get)
    if (a, b) == ("ORI", "RED"):
        return cmp.diff_ori_red(sols["ORI"], sols["RED"], part)
    if (a, b) == ("RED", "IE"):
        return cmp.diff_grids(sols["IE"], sols["RED"], part, a_centered=True, pair="RED-IE")
    return cmp.diff_grids(sols["ORI"], sols["IE"], part, a_centered=False, pair="ORI-IE")


def run(config_path, output_dir=None) -> int:
    try:
        cfg = load_config(config_path)
        if output_dir is not None:
            cfg = replace(cfg, output_dir=str(output_dir))
        scfgs = {f: cfg.scattering(f) for f in cfg.formulations}
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    out = Path(cfg.output_dir)
    h = cfg.hash()
    manifest = [f"config_hash={h}"]
    status = EXIT_OK
    sols = {}
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.txt").write_text(cfg.canonical(), encoding="utf-8")
        for form in FORMULATIONS:
            if form not in scfgs:
                continue
            scfg = scfgs[form]
            rep = solve_formulation(scfg)
            summary = {"config_hash": h, **rep.summary()}
            (out / f"{form}_report.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
            np.save(out / f"{form}_solution.npy", np.asarray(rep.solution))
            pts, vals = report_values(scfg, rep, n=cfg.report_n)
            write_grid_table(out / f"{form}_grid.csv", h, form, pts, vals)
            x0, plane = central_slice(scfg, rep)
            ii, jj = np.indices(plane.shape)
            rows = np.column_stack([ii.ravel(), jj.ravel(), plane.real.ravel(), plane.imag.ravel()])
            _write_table(out / f"{form}_slice.csv", _header(h, form, f"x={x0:.6f}"), "i,j,re,im", rows,
                         ["%d", "%d", "%.9e", "%.9e"])
            state = "converged" if rep.converged else "NOT CONVERGED"
            manifest.append(
                f"{form}: {state} iterations={rep.iterations} rel_residual={rep.rel_residual:.6e} "
                f"time={rep.elapsed:.2f}s"
            )
            print(manifest[-1])
            if rep.converged:
                sols[form] = np.asarray(rep.solution)
            else:
                status = EXIT_SOLVER
        if len(sols) >= 2:
            part = partition(next(iter(scfgs.values())).lat, cfg.p_side)
            for a, b in combinations([f for f in FORMULATIONS if f in sols], 2):
                dr = _pair_diff(a, b, sols, part)
                rows = np.array(dr.rows())
                _write_table(out / f"diff_{dr.pair}.csv", _header(h, dr.pair, f"metric={dr.metric:.9e}"),
                             "subcube,mean_abs_diff", rows, ["%d", "%.9e"])
                manifest.append(f"diff {dr.pair}: {dr.rounded:.4f} ({dr.metric:.6e})")
                print(manifest[-1])
        if status != EXIT_OK:
            manifest.append("FAILED: solver did not converge; artifacts above are partial")
        (out / "MANIFEST.txt").write_text("\n".join(manifest) + "\n", encoding="utf-8")
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


def design_cmd(config_path, n_text: str) -> int:
    try:
        cfg = load_config(config_path)
        n_target = parse_complex(n_text)
        base = cfg.base_material()
        h = h_from_target_n(n_target, base)
        check = n_from_h(replace(base, h=h, force=True))
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    lines = [
        f"n_target={format_complex(n_target)}",
        f"h={h.real:.5E}{'+' if h.imag >= 0 else '-'}i{abs(h.imag):.5E}",
        f"h_exact={format_complex(h, '.17g')}",
        f"n_check={format_complex(check, '.12g')}",
    ]
    print("\n".join(lines))
    try:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "design.txt").write_text(f"# config_hash={cfg.hash()}\n" + "\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def compare_cmd(table_a, table_b, p_side: int, side: float = 1.0) -> int:
    try:
        pa, va = read_table(table_a)
        pb, vb = read_table(table_b)
    except (OSError, ValueError) as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        dr = cmp.nearest_diff(pa, va, pb, vb, p_side, side=side)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"metric={dr.rounded:.4f} ({dr.metric:.6e})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smallscatter", description=__doc__.split("\n\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("run", help="solve the configured formulations and write tables")
    p.add_argument("config")
    p.add_argument("-o", "--output-dir", default=None)
    p = sub.add_parser("design", help="impedance h for a target refraction coefficient")
    p.add_argument("config")
    p.add_argument("--n", required=True, help="target refraction coefficient, e.g. --n=-1+0.001i")
    p = sub.add_parser("compare", help="sup-mean difference of two x,y,z,re,im tables")
    p.add_argument("table_a")
    p.add_argument("table_b")
    p.add_argument("--partition", type=int, required=True)
    p.add_argument("--side", type=float, default=1.0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.cmd == "run":
        return run(args.config, args.output_dir)
    if args.cmd == "design":
        return design_cmd(args.config, args.n)
    return compare_cmd(args.table_a, args.table_b, args.partition, args.side)


if __name__ == "__main__":
    sys.exit(main())
