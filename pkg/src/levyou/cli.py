"""Command line front end.

Every command writes CSV tables (header row, ``%.17g`` numbers), an optional
``rates.json`` and a ``manifest.json`` with the command line, configuration,
versions, wall time and SHA-256 digests of all outputs.  Exit codes: 0 on
success, 2 for domain errors, 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import platform
import sys
import time
from importlib import metadata
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

from ._accel import backend
from .errors import DomainError, InsufficientRunLength, NumericalError

log = logging.getLogger("levyou")

FLOAT_FMT = "%.17g"


# ---------------------------------------------------------------------------
# helpers

def parse_grid(spec: str) -> np.ndarray:
    """``"a:b:n"`` -> ``linspace(a, b, n)``; a comma list is taken verbatim."""
    try:
        if ":" in spec:
            a, b, n = spec.split(":")
            n = int(n)
            if n < 1:
                raise ValueError
            return np.linspace(float(a), float(b), n)
        return np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError:
        raise DomainError(f"bad grid spec {spec!r}; use a:b:n or a comma list") from None


def parse_window(spec: str):
    try:
        a, b = (float(v) for v in spec.split(":"))
    except ValueError:
        raise DomainError(f"bad window {spec!r}; use a:b") from None
    return a, b


def write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> Path:
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, data, fmt=FLOAT_FMT, delimiter=",", header=",".join(header), comments="")
    return path


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _versions() -> Dict[str, str]:
    out = {"python": platform.python_version(), "backend": backend()}
    for pkg in ("artifact", "numpy", "scipy", "numba"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = "absent"
    return out


def write_manifest(outdir: Path, argv: List[str], args: argparse.Namespace,
                   files: List[Path], wall: float) -> Path:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "argv": argv,
        "command": args.command,
        "config": config,
        "seed": config.get("seed"),
        "versions": _versions(),
        "wall_time_s": wall,
        "outputs": {p.name: sha256(p) for p in files},
    }
    path = outdir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _observables(names: str):
    from .observables import builtin_observable
    return [builtin_observable(n.strip()) for n in names.split(",") if n.strip()]


# ---------------------------------------------------------------------------
# commands

def cmd_eigen(args, outdir: Path) -> List[Path]:
    from .eigen import EigenFunction
    if args.lam >= 1 and args.mu != 2.0:
        raise DomainError(f"lambda={args.lam} >= 1 is not an eigenvalue for mu < 2: "
                          "the Fourier form |k|^-lambda requires lambda < 1")
    ef = EigenFunction(args.parity, args.lam, args.mu)
    if args.space == "fourier":
        k = parse_grid(args.grid or "-5:5:200")
        vals = ef.fourier(k)
        cols, header = [k, vals.real, vals.imag], ["k", "re", "im"]
    else:
        x = parse_grid(args.grid or "-10:10:201")
        cols, header = [x, ef.real(x)], ["x", "value"]
    return [write_csv(outdir / "eigen.csv", header, cols)]


def cmd_kernel(args, outdir: Path) -> List[Path]:
    from . import kernel
    if args.what == "zg":
        z = np.linspace(args.zmin, args.zmax, args.n)
        v = kernel.zg(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            env = np.where(z == 0, 0.0, np.abs(v) / (math.sqrt(2) * np.abs(z)))
        cols = [z, v, math.sqrt(2) * z, -math.sqrt(2) * z, env]
        header = ["z", "zg", "envelope_plus", "envelope_minus", "envelope_ratio"]
        return [write_csv(outdir / "zg.csv", header, cols)]
    if args.what in ("t1half", "t22"):
        x = parse_grid(args.grid or "-5:5:100")
        kid = kernel.T1_HALF if args.what == "t1half" else kernel.T2_2
        # the table runs over the singular coordinate at fixed chi
        vals = (kernel.kernel_real(kid, args.chi, x) if kid == kernel.T1_HALF
                else kernel.kernel_real(kid, x, args.chi))
        return [write_csv(outdir / f"{args.what}.csv", ["x", "kernel"], [x, vals])]
    # apply
    from .eigen import phi_real_cauchy, phi_real_gauss
    pts = parse_grid(args.grid or "-3:3:25")
    if args.source == "cauchy":
        out = kernel.apply_kernel_density(kernel.T1_HALF, lambda v: phi_real_cauchy("even", 0, v),
                                          pts, args.tol)
        ref = np.exp(-pts ** 2 / 2) / math.sqrt(2 * math.pi)
    else:
        out = kernel.apply_kernel_density(kernel.T2_2, lambda v: phi_real_gauss("even", 0, v),
                                          pts, args.tol)
        ref = 1 / (math.pi * (1 + pts ** 2))
    return [write_csv(outdir / "apply.csv", ["coordinate", "value", "reference"],
                      [pts, out.values, ref])]


def _rates(series, mu, alpha, window) -> Dict[str, dict]:
    from .evolve import nearest_ladder_rate
    from .numerics import fit_rate
    out = {}
    for name, s in series.items():
        try:
            fit = fit_rate(s, window)
            out[name] = {"rate": fit.rate, "window": list(window), "npoints": fit.npoints,
                         "nearest_ladder_rate": nearest_ladder_rate(fit.rate, mu, alpha)}
        except DomainError as exc:
            out[name] = {"rate": None, "window": list(window), "error": str(exc)}
    return out


def _write_series(outdir: Path, prefix: str, series, rates) -> List[Path]:
    files = []
    for name, s in series.items():
        files.append(write_csv(outdir / f"{prefix}_{name}.csv", ["tau", "value", "error"],
                               [s.taus, s.values, s.errors]))
    path = outdir / "rates.json"
    path.write_text(json.dumps(rates, indent=2, sort_keys=True) + "\n")
    files.append(path)
    return files


def _mc_config(args, steps, ensemble, initial, record_every):
    from .montecarlo import SimConfig
    return SimConfig(args.mu, args.dt, steps, ensemble, args.seed, initial, record_every)


def _record_every(taus, dt):
    h = taus[1] - taus[0] if taus.size > 1 else dt
    r = int(round(h / dt))
    if r < 1 or not np.allclose(np.diff(taus), r * dt) or taus[0] != 0:
        raise DomainError("MC needs a uniform tau grid starting at 0 with spacing a multiple of dt")
    return r


def cmd_relax(args, outdir: Path) -> List[Path]:
    from .evolve import StablePDFParams, point_mass
    taus = parse_grid(args.taus)
    obs = _observables(args.observables)
    if args.method == "quadrature":
        from .observables import delta_series
        p0 = point_mass(args.x0) if args.alpha is None else StablePDFParams(args.alpha, args.x0).charfn()
        series = {u.name: delta_series(u, p0, args.mu, taus) for u in obs}
    else:
        from .montecarlo import ensemble_delta
        initial = args.x0 if args.alpha is None else StablePDFParams(args.alpha, args.x0)
        every = _record_every(taus, args.dt)
        cfg = _mc_config(args, every * (taus.size - 1), args.N, initial, every)
        series = ensemble_delta(cfg, obs)
    rates = _rates(series, args.mu, args.alpha, parse_window(args.window))
    return _write_series(outdir, "relax", series, rates)


def cmd_corr(args, outdir: Path) -> List[Path]:
    taus = parse_grid(args.taus)
    obs = _observables(args.observables)
    if args.method == "quadrature":
        from .observables import corr_series
        series = {u.name: corr_series(u, args.mu, taus) for u in obs}
    else:
        from .montecarlo import trajectory_autocorr
        every = _record_every(taus, args.dt)
        cfg = _mc_config(args, int(round(args.T / args.dt)), 1, 0.0, every)
        series = trajectory_autocorr(cfg, obs, float(taus[-1]))
    rates = _rates(series, args.mu, None, parse_window(args.window))
    return _write_series(outdir, "corr", series, rates)


def cmd_simulate(args, outdir: Path) -> List[Path]:
    from .evolve import StablePDFParams
    from .montecarlo import simulate_trajectory
    initial = args.x0 if args.alpha is None else StablePDFParams(args.alpha, args.x0)
    every = max(1, int(round(args.record / args.dt)))
    cfg = _mc_config(args, int(round(args.T / args.dt)), 1, initial, every)
    xs = simulate_trajectory(cfg)
    t = np.arange(1, xs.size + 1) * every * args.dt
    return [write_csv(outdir / "trajectory.csv", ["t", "x"], [t, xs])]


def cmd_replay(args, outdir: Path) -> List[Path]:
    src = Path(args.manifest)
    manifest = json.loads(src.read_text())
    argv = list(manifest["argv"])
    rerun = outdir / "rerun"
    if "--out" in argv:
        argv[argv.index("--out") + 1] = str(rerun)
    else:
        argv += ["--out", str(rerun)]
    code = main(argv)
    if code != 0:
        raise NumericalError(f"replayed command exited with code {code}")
    mismatched = []
    for name, digest in manifest["outputs"].items():
        path = rerun / name
        if not path.exists() or sha256(path) != digest:
            mismatched.append(name)
    report = outdir / "replay.json"
    report.write_text(json.dumps({"source": str(src), "mismatched": mismatched}, indent=2) + "\n")
    if mismatched:
        raise NumericalError(f"replay differs from manifest in: {', '.join(mismatched)}")
    print(f"replay reproduced {len(manifest['outputs'])} outputs bit-identically")
    return [report]


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levyou", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False):
        sp.add_argument("--out", default=".", help="output directory")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("eigen", help="eigenfunction tables")
    e.add_argument("--mu", type=float, required=True)
    e.add_argument("--lambda", dest="lam", type=float, required=True)
    e.add_argument("--parity", default="even")
    e.add_argument("--space", choices=("fourier", "real"), default="real")
    e.add_argument("--grid", help="a:b:n or comma list")
    common(e)
    e.set_defaults(func=cmd_eigen)

    k = sub.add_parser("kernel", help="scaling function and real-space kernels")
    k.add_argument("--what", choices=("zg", "t1half", "t22", "apply"), required=True)
    k.add_argument("--zmin", type=float, default=-10.0)
    k.add_argument("--zmax", type=float, default=10.0)
    k.add_argument("--n", type=int, default=2001)
    k.add_argument("--chi", type=float, default=0.0)
    k.add_argument("--grid")
    k.add_argument("--from", dest="source", choices=("cauchy", "gauss"), default="cauchy")
    k.add_argument("--tol", type=float, default=1e-9)
    common(k)
    k.set_defaults(func=cmd_kernel)

    for name, fn, helptext in (("relax", cmd_relax, "distance to equilibrium"),
                               ("corr", cmd_corr, "stationary autocorrelation")):
        r = sub.add_parser(name, help=helptext)
        r.add_argument("--mu", type=float, required=True)
        r.add_argument("--observables", default="cos_half,sin_half,sign,box2,signed_box2")
        r.add_argument("--method", choices=("quadrature", "mc"), default="quadrature")
        r.add_argument("--dt", type=float, default=0.01)
        r.add_argument("--window", default="0.5:3")
        if name == "relax":
            r.add_argument("--alpha", type=float, help="stable initial law (point mass if omitted)")
            r.add_argument("--x0", type=float, default=0.0, help="initial location")
            r.add_argument("--taus", default="0:4:41")
            r.add_argument("--N", type=int, default=10 ** 5)
        else:
            r.add_argument("--taus", default="0:3:31")
            r.add_argument("--T", type=float, default=1e4, help="trajectory length")
        common(r, seed=True)
        r.set_defaults(func=fn)

    s = sub.add_parser("simulate", help="single trajectory of the process")
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--alpha", type=float)
    s.add_argument("--x0", type=float, default=0.0)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--T", type=float, default=100.0)
    s.add_argument("--record", type=float, default=0.1, help="recording interval")
    common(s, seed=True)
    s.set_defaults(func=cmd_simulate)

    rp = sub.add_parser("replay", help="rerun a manifest and compare output digests")
    rp.add_argument("manifest")
    common(rp)
    rp.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(name)s: %(message)s")
    outdir = Path(args.out)
    start = time.perf_counter()
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        files = args.func(args, outdir)
    except InsufficientRunLength as exc:
        print(f"levyou: error: {exc} (required total time >= {exc.required:g})", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"levyou: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"levyou: numerical failure: {exc}", file=sys.stderr)
        return 3
    write_manifest(outdir, argv, args, files, time.perf_counter() - start)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
