"""Command line entry point: ``kpz-endpoint <command> [flags]``.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import density as dens
from . import lppsim, output, stats, verification

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
KS_THRESHOLD = 0.08


class UsageError(Exception):
    pass


def _numerics(args):
    kw = {}
    if getattr(args, "nodes", None) is not None:
        kw["nodes"] = args.nodes
    if getattr(args, "cutoff", None) is not None:
        kw["cutoff_floor"] = args.cutoff
    try:
        return dens.NumericsConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _threads(args):
    return args.threads if args.threads else (os.cpu_count() or 1)


def _range(lo, hi, step):
    if step is None or not step > 0:
        raise UsageError(f"step must be positive, got {step}")
    if not hi >= lo:
        raise UsageError(f"empty range [{lo}, {hi}]")
    k = int(round((hi - lo) / step))
    return lo + step * np.arange(k + 1)


def _prepare_out(path):
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    if not parent.is_dir():
        raise OSError(f"output directory {parent} does not exist")
    if not os.access(parent, os.W_OK):
        raise OSError(f"output directory {parent} is not writable")
    return path


def _finish(args, cfg, outputs, t0, out):
    manifest = output.RunManifest(
        command=args.command,
        config=cfg,
        wall_time_s=time.perf_counter() - t0,
        outputs=[str(p) for p in outputs],
    )
    path = output.sibling(out, ".manifest.json")
    manifest.write(path)
    return path


def cmd_fgoe(args):
    t0 = time.perf_counter()
    cfg = _numerics(args)
    s = _range(args.min, args.max, args.step)
    out = _prepare_out(args.out)
    vals = np.array([dens.f_goe(x, cfg) for x in s])
    outputs = [output.write_csv(out, ["s", "F_GOE"], [s, vals])]
    if args.svg:
        from .plotting import plot_fgoe

        outputs.append(plot_fgoe(s, vals, out.with_suffix(".svg")))
    _finish(args, {"numerics": asdict(cfg), "s_min": args.min, "s_max": args.max,
                   "step": args.step}, outputs, t0, out)
    return EXIT_OK


def cmd_joint(args):
    t0 = time.perf_counter()
    cfg = _numerics(args)
    step = args.step or 0.02
    t_grid = dens.symmetric_grid(args.t_half_width, step)
    m_grid = _range(args.min if args.min is not None else -3.0,
                    args.max if args.max is not None else 1.5, step)
    out = _prepare_out(args.out)
    table = dens.joint_table(t_grid, m_grid, cfg, threads=_threads(args))
    tt, mm = np.meshgrid(table.t_grid, table.m_grid, indexing="ij")
    outputs = [output.write_csv(out, ["t", "m", "f"], [tt.ravel(), mm.ravel(), table.values.ravel()])]
    if args.svg:
        from .plotting import plot_joint

        outputs.append(plot_joint(table, out.with_suffix(".svg")))
    _finish(args, {"numerics": asdict(cfg), "t_grid": [float(t_grid[0]), float(t_grid[-1])],
                   "m_grid": [float(m_grid[0]), float(m_grid[-1])], "step": step},
            outputs, t0, out)
    return EXIT_OK


def _summary_dict(table):
    mom = stats.moments(table)
    fit = stats.tail_fit(table)
    d = mom._asdict()
    d.update({"tail_c": fit.c, "tail_cubic_r2": fit.cubic_r2, "tail_quad_r2": fit.quad_r2})
    return mom, d


def cmd_endpoint(args):
    t0 = time.perf_counter()
    cfg = _numerics(args)
    if args.max is not None:
        cfg = replace(cfg, t_max=args.max)
    if args.step is not None:
        cfg = replace(cfg, dt=args.step)
    out = _prepare_out(args.out)
    table = dens.endpoint_table(cfg=cfg, threads=_threads(args))
    mom, summary = _summary_dict(table)
    outputs = [
        output.write_csv(out, ["t", "f_end"], [table.t_grid, table.values]),
        output.write_json(output.sibling(out, "_moments.json"), summary),
    ]
    if args.svg:
        from .plotting import plot_endpoint

        outputs.append(plot_endpoint(table, mom, out.with_suffix(".svg")))
    _finish(args, {"numerics": asdict(cfg)}, outputs, t0, out)
    return EXIT_OK


def cmd_verify(args):
    t0 = time.perf_counter()
    cfg = dens.NumericsConfig(nodes=args.nodes or (80 if args.level == "fast" else 160))
    if args.cutoff is not None:
        cfg = replace(cfg, cutoff_floor=args.cutoff)
    out = _prepare_out(args.out) if args.out else None
    checks = verification.run(args.level, cfg, threads=_threads(args), echo=print)
    ok = all(c.passed for c in checks)
    print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    if out is not None:
        report = [{"name": c.name, "residual": c.residual, "tolerance": c.tolerance,
                   "passed": c.passed} for c in checks]
        outputs = [output.write_json(out, {"level": args.level, "checks": report, "passed": ok})]
        _finish(args, {"numerics": asdict(cfg), "level": args.level}, outputs, t0, out)
    return EXIT_OK if ok else EXIT_FAIL


def _cache_dir():
    root = os.environ.get("KPZ_ENDPOINT_CACHE") or os.path.join(
        os.environ.get("XDG_CACHE_HOME") or os.path.expanduser("~/.cache"), "kpz_endpoint"
    )
    return Path(root)


def cached_endpoint_table(cfg, threads=None):
    """EndpointTable for ``cfg``, read from or written to the on-disk cache."""
    key = hashlib.sha256(json.dumps(asdict(cfg), sort_keys=True).encode()).hexdigest()[:16]
    path = _cache_dir() / f"endpoint_{key}.csv"
    if path.exists():
        _, data = output.read_csv(path)
        return dens.EndpointTable(data[:, 0], data[:, 1], cfg)
    table = dens.endpoint_table(cfg=cfg, threads=threads)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        output.write_csv(path, ["t", "f_end"], [table.t_grid, table.values])
    except OSError:
        pass  # cache is best effort
    return table


def cmd_lpp(args):
    t0 = time.perf_counter()
    try:
        lcfg = lppsim.LppConfig(q=args.q, n=args.n, samples=args.samples, seed=args.seed,
                                c3=args.c3)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    ncfg = _numerics(args)
    out = _prepare_out(args.out)
    batch = lppsim.sample_endpoints(lcfg, threads=_threads(args))
    ref = cached_endpoint_table(ncfg, threads=_threads(args))
    ks = lppsim.ks_distance(batch, ref)
    x = batch.rescaled
    report = {
        "ks": ks,
        "kurtosis": lppsim.excess_kurtosis(x),
        "variance": float(np.var(x)),
        "mean": float(np.mean(x)),
        "reference_kurtosis": stats.moments(ref).excess_kurtosis,
        "ks_threshold": KS_THRESHOLD,
        "passed": ks < KS_THRESHOLD,
    }
    outputs = [
        output.write_csv(out, ["sample_index", "y", "rescaled"],
                         [np.arange(lcfg.samples), batch.endpoints_y, batch.rescaled]),
        output.write_json(output.sibling(out, "_report.json"), report),
    ]
    if args.svg:
        from .plotting import plot_lpp

        mom = stats.moments(ref)
        sd = np.sqrt(mom.variance)
        z_ref = (ref.t_grid - mom.mean) / sd
        outputs.append(plot_lpp((x - x.mean()) / x.std(), z_ref, ref.values * sd / mom.mass,
                                out.with_suffix(".svg")))
    print(json.dumps({k: report[k] for k in ("ks", "kurtosis", "variance")}, sort_keys=True))
    _finish(args, {"lpp": asdict(lcfg), "numerics": asdict(ncfg)}, outputs, t0, out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="kpz-endpoint", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_required=True):
        sp.add_argument("--out", required=out_required, help="output file path")
        sp.add_argument("--nodes", type=int, default=None, help="quadrature nodes (default 80)")
        sp.add_argument("--cutoff", type=float, default=None, help="cutoff floor L (default 12)")
        sp.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
        sp.add_argument("--svg", action="store_true", help="also render an SVG figure")

    sp = sub.add_parser("fgoe", help="tabulate F_GOE(s)")
    sp.add_argument("--min", type=float, default=-5.0)
    sp.add_argument("--max", type=float, default=3.0)
    sp.add_argument("--step", type=float, default=0.05)
    common(sp)
    sp.set_defaults(func=cmd_fgoe)

    sp = sub.add_parser("joint", help="joint density f(t, m) on a grid")
    sp.add_argument("--min", type=float, default=None, help="lowest m (default -3)")
    sp.add_argument("--max", type=float, default=None, help="highest m (default 1.5)")
    sp.add_argument("--step", type=float, default=None, help="grid step in t and m (default 0.02)")
    sp.add_argument("--t-half-width", type=float, default=2.5, help="t grid is [-w, w] (default 2.5)")
    common(sp)
    sp.set_defaults(func=cmd_joint)

    sp = sub.add_parser("endpoint", help="endpoint density f_end(t) and its moments")
    sp.add_argument("--max", type=float, default=None, help="t grid is [-max, max] (default 4)")
    sp.add_argument("--step", type=float, default=None, help="t step (default 0.02)")
    common(sp)
    sp.set_defaults(func=cmd_endpoint)

    sp = sub.add_parser("verify", help="run the invariant suites")
    sp.add_argument("--level", choices=["fast", "full"], default="fast")
    common(sp, out_required=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("lpp", help="LPP endpoint Monte-Carlo vs f_end")
    sp.add_argument("--q", type=float, default=0.5)
    sp.add_argument("--n", type=int, default=500)
    sp.add_argument("--samples", type=int, default=20000)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--c3", type=float, default=None,
                    help="optional transversal constant for physical units")
    common(sp)
    sp.set_defaults(func=cmd_lpp)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"kpz-endpoint {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kpz-endpoint {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
