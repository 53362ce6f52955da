"""Command-line front end.

Subcommands: steady, evans, contour, spectrum, evolve, sweep, check.
Every run is deterministic: floats are rendered in shortest round-trip
form, JSON keys are sorted, and sweep rows are emitted in sorted
parameter order regardless of worker completion order. Exit codes:
0 success, 1 inconclusive or nonconvergent, 2 usage error.

Flag precedence: command-line flags override config-file keys override
built-in defaults. The config file is flat ``key = value`` text with
``#`` comments; keys are the long flag names with dashes or underscores.
"""
from __future__ import annotations

import argparse
import json
import multiprocessing
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import diagnostics, spectrum as spectrum_mod
from .evolve import evolve as run_evolve, fit_decay, perturb
from .errors import InconclusiveError, NonconvergenceError, NSChannelError
from .evans import evans, stability_index
from .steady import FlowParams, SteadyProfile, classify, solve_steady
from .thermo import GammaLaw

SCHEMA_VERSION = 1

__all__ = ["RunConfig", "main", "run"]


@dataclass
class RunConfig:
    """Resolved parameters for one invocation."""

    nu: float = 1.0
    gamma: float = 1.4
    kappa: float = 1.0
    rho0: float = 2.0
    u0: float = 1.5
    u1: float = 1.0
    n: int | None = None  # profile grid size; solver default if None
    # contour / spectrum
    M: float = 10.0
    delta: float = 0.0
    n0: int = 64
    N: int = 128
    box: str = ""
    # evolve
    eps: float = 0.01
    mode: int = 1
    T: float = 20.0
    dt: float | None = None
    grid: int = 1024
    reference: str = "baseline"
    # misc
    delta_weight: float | None = None
    out: str | None = None
    profile: str | None = None

    def flow_params(self) -> FlowParams:
        return FlowParams(nu=self.nu, rho0=self.rho0, u0=self.u0, u1=self.u1)

    def law(self) -> GammaLaw:
        return GammaLaw(kappa=self.kappa, gamma=self.gamma)


def _fmt(x) -> str:
    """Shortest round-trip decimal rendering."""
    return repr(float(x))


def _out_path(name: str | None) -> str | None:
    if name is None:
        return None
    if os.path.isabs(name):
        return name
    return os.path.join(os.environ.get("NSCHANNEL_OUTDIR", "."), name)


def _emit_json(payload: dict, path: str | None):
    payload = dict(payload)
    payload["schema_version"] = SCHEMA_VERSION
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def write_profile_csv(path: str, profile: SteadyProfile):
    """Profile table with a header comment carrying the solve metadata
    needed to reconstruct the profile exactly on re-read."""
    p = profile.params
    law = profile.law
    with open(path, "w") as fh:
        fh.write(
            f"# b={_fmt(profile.b)} m={_fmt(profile.m)} nu={_fmt(p.nu)} "
            f"rho0={_fmt(p.rho0)} u0={_fmt(p.u0)} u1={_fmt(p.u1)} "
            f"kappa={_fmt(law.kappa)} gamma={_fmt(law.gamma)}\n"
        )
        fh.write("x,rho,u,rho_x,u_x\n")
        for i in range(profile.n + 1):
            fh.write(
                ",".join(
                    _fmt(v)
                    for v in (
                        profile.x[i], profile.rho[i], profile.u[i],
                        profile.rho_x[i], profile.u_x[i],
                    )
                )
                + "\n"
            )


def read_profile_csv(path: str) -> SteadyProfile:
    """Inverse of :func:`write_profile_csv` (bit-exact round trip)."""
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("# "):
            raise ValueError(f"{path}: missing profile metadata header")
        meta = dict(tok.split("=", 1) for tok in header[2:].split())
        cols = fh.readline().strip()
        if cols != "x,rho,u,rho_x,u_x":
            raise ValueError(f"{path}: unexpected columns {cols!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    params = FlowParams(
        nu=float(meta["nu"]), rho0=float(meta["rho0"]),
        u0=float(meta["u0"]), u1=float(meta["u1"]),
    )
    law = GammaLaw(kappa=float(meta["kappa"]), gamma=float(meta["gamma"]))
    return SteadyProfile(
        x=data[:, 0], rho=data[:, 1], u=data[:, 2],
        rho_x=data[:, 3], u_x=data[:, 4],
        b=float(meta["b"]), m=float(meta["m"]), params=params, law=law,
    )


def _load_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


_FIELD_TYPES = {
    "nu": float, "gamma": float, "kappa": float, "rho0": float, "u0": float,
    "u1": float, "n": int, "M": float, "delta": float, "n0": int, "N": int,
    "box": str, "eps": float, "mode": int, "T": float, "dt": float,
    "grid": int, "reference": str, "delta_weight": float, "out": str,
    "profile": str,
}


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, raw in _load_config_file(args.config).items():
            if key not in _FIELD_TYPES:
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, _FIELD_TYPES[key](raw))
    for key in _FIELD_TYPES:
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    return cfg


def _resolve_profile(cfg: RunConfig) -> SteadyProfile:
    if cfg.profile:
        return read_profile_csv(cfg.profile)
    return solve_steady(cfg.flow_params(), cfg.law(), n=cfg.n)


def _add_flow_flags(sub):
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--profile", help="read profile from CSV instead of solving")
    sub.add_argument("--out", help="output file (default: stdout / cwd)")
    for name in ("nu", "gamma", "kappa", "rho0", "u0", "u1"):
        sub.add_argument(f"--{name}", type=float)
    sub.add_argument("--n", type=int, help="profile grid intervals")


def _cmd_steady(cfg: RunConfig) -> int:
    profile = solve_steady(cfg.flow_params(), cfg.law(), n=cfg.n)
    out = _out_path(cfg.out)
    if out:
        write_profile_csv(out, profile)
    summary = {
        "b": profile.b, "m": profile.m,
        "rho_end": float(profile.rho[-1]),
        "slope_class": classify(profile).label,
        "nodes": profile.n,
    }
    _emit_json(summary, None)
    return 0


def _cmd_evans(cfg: RunConfig, lam_re: float, lam_im: float, index: bool) -> int:
    profile = _resolve_profile(cfg)
    ev = evans(complex(lam_re, lam_im), profile)
    payload = {
        "lam_re": lam_re, "lam_im": lam_im,
        "d_scaled_re": ev.d_scaled.real, "d_scaled_im": ev.d_scaled.imag,
        "log_scale": ev.log_scale,
    }
    if index:
        si = stability_index(profile)
        payload["stability_index"] = si.product
        payload["lam_big"] = si.lam_big
    _emit_json(payload, _out_path(cfg.out))
    return 0


def _cmd_contour(cfg: RunConfig) -> int:
    profile = _resolve_profile(cfg)
    contour = spectrum_mod.build_contour(cfg.M, cfg.delta, cfg.n0)
    report = spectrum_mod.winding_number(profile, contour)
    out = _out_path(cfg.out)
    if out:
        with open(out, "w") as fh:
            fh.write("lam_re,lam_im\n")
            for lam in report.contour.samples:
                fh.write(f"{_fmt(lam.real)},{_fmt(lam.imag)}\n")
    _emit_json(
        {
            "M": cfg.M, "delta": cfg.delta,
            "winding": report.winding, "verdict": report.verdict,
            "min_abs_on_contour": report.min_abs_on_contour,
            "nodes": len(report.contour.samples),
            "detail": report.detail,
        },
        None,
    )
    return 0 if report.verdict != "Inconclusive" else 1


def _cmd_spectrum(cfg: RunConfig, abscissa: bool) -> int:
    profile = _resolve_profile(cfg)
    payload: dict = {}
    if cfg.box:
        parts = cfg.box.split(":")
        if len(parts) != 4:
            raise ValueError(f"--box wants re_lo:re_hi:im_lo:im_hi, got {cfg.box!r}")
        box = tuple(float(p) for p in parts)
        roots = spectrum_mod.locate_roots(profile, box)
        payload["box"] = list(box)
        payload["roots"] = [
            {"re": r.lam.real, "im": r.lam.imag, "residual": r.residual}
            for r in roots
        ]
    if abscissa:
        payload["spectral_abscissa"] = spectrum_mod.spectral_abscissa(
            profile, M=cfg.M
        )
    if not payload:
        raise ValueError("spectrum: give --box and/or --abscissa")
    _emit_json(payload, _out_path(cfg.out))
    return 0


def _cmd_evolve(cfg: RunConfig, fit: bool) -> int:
    profile = _resolve_profile(cfg)
    state = perturb(profile, cfg.eps, cfg.mode, n=cfg.grid)
    hist = run_evolve(state, profile, cfg.T, dt=cfg.dt, reference=cfg.reference)
    out = _out_path(cfg.out)
    lines = ["t,l2,h1,h2h3"]
    for i in range(len(hist.t)):
        lines.append(
            f"{_fmt(hist.t[i])},{_fmt(hist.l2[i])},"
            f"{_fmt(hist.h1[i])},{_fmt(hist.h2h3[i])}"
        )
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if fit:
        f = fit_decay(hist)
        _emit_json(
            {
                "theta": f.theta, "c": f.c, "residual": f.residual,
                "window": list(f.window),
            },
            (out + ".fit.json") if out else None,
        )
    return 0


def _sweep_tuple(task):
    """Worker: solve and classify one parameter tuple (spawn-safe)."""
    nu, rho0, u0, u1, M = task
    try:
        profile = solve_steady(FlowParams(nu=nu, rho0=rho0, u0=u0, u1=u1),
                               GammaLaw())
        report = spectrum_mod.winding_number(
            profile, spectrum_mod.build_contour(M)
        )
        return (nu, rho0, u0, u1, profile.b,
                report.winding if report.winding is not None else -1,
                report.verdict)
    except NSChannelError as exc:
        return (nu, rho0, u0, u1, float("nan"), -1,
                f"Inconclusive({type(exc).__name__})")


def _parse_range(text: str) -> np.ndarray:
    """lo:hi:k -> k log-spaced points in [lo, hi]."""
    lo, hi, k = text.split(":")
    return np.geomspace(float(lo), float(hi), int(k))


def _cmd_sweep(cfg: RunConfig, ranges: dict, jobs: int) -> int:
    grids = {
        key: _parse_range(ranges[key])
        for key in ("nu", "rho0", "u0", "u1")
    }
    tasks = sorted(
        (float(nu), float(rho0), float(u0), float(u1), cfg.M)
        for nu in grids["nu"]
        for rho0 in grids["rho0"]
        for u0 in grids["u0"]
        for u1 in grids["u1"]
    )
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            rows = pool.map(_sweep_tuple, tasks)
    else:
        rows = [_sweep_tuple(t) for t in tasks]
    rows.sort(key=lambda r: r[:4])
    out = _out_path(cfg.out)
    lines = ["nu,rho0,u0,u1,b,winding,verdict"]
    for nu, rho0, u0, u1, b, w, verdict in rows:
        lines.append(
            f"{_fmt(nu)},{_fmt(rho0)},{_fmt(u0)},{_fmt(u1)},"
            f"{_fmt(b)},{w},{verdict}"
        )
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    bad = sum(1 for r in rows if r[6] != "SpectrallyStable")
    _emit_json({"tuples": len(rows), "nonstable_or_inconclusive": bad}, None)
    return 0 if bad == 0 else 1


def _cmd_check(cfg: RunConfig, cond2: bool, weights: bool) -> int:
    profile = _resolve_profile(cfg)
    payload: dict = {}
    if cond2:
        payload["cond2"] = diagnostics.cond2_check(profile)
    if weights:
        _, report = diagnostics.goodman_weights(profile, cfg.delta_weight)
        payload["weights"] = report
    if not payload:
        raise ValueError("check: give --cond2 and/or --weights")
    _emit_json(payload, _out_path(cfg.out))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nschannel",
        description="Steady states and stability of viscous channel gas flow.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("steady", help="solve a steady profile")
    _add_flow_flags(s)

    s = subs.add_parser("evans", help="evaluate the Evans function")
    _add_flow_flags(s)
    s.add_argument("--lam-re", type=float, default=0.0)
    s.add_argument("--lam-im", type=float, default=0.0)
    s.add_argument("--index", action="store_true",
                   help="also report the stability index")

    s = subs.add_parser("contour", help="winding number on a contour")
    _add_flow_flags(s)
    s.add_argument("--M", type=float)
    s.add_argument("--delta", type=float)
    s.add_argument("--n0", type=int)

    s = subs.add_parser("spectrum", help="locate eigenvalues")
    _add_flow_flags(s)
    s.add_argument("--box", help="re_lo:re_hi:im_lo:im_hi")
    s.add_argument("--M", type=float)
    s.add_argument("--abscissa", action="store_true")

    s = subs.add_parser("evolve", help="time-dependent perturbation run")
    _add_flow_flags(s)
    s.add_argument("--eps", type=float)
    s.add_argument("--mode", type=int)
    s.add_argument("--T", type=float)
    s.add_argument("--dt", type=float)
    s.add_argument("--grid", type=int)
    s.add_argument("--reference", choices=["profile", "baseline"])
    s.add_argument("--fit", action="store_true")

    s = subs.add_parser("sweep", help="verdict sweep over a parameter grid")
    _add_flow_flags(s)
    s.add_argument("--M", type=float)
    s.add_argument("--nu-range", default="0.1:10:4")
    s.add_argument("--rho0-range", default="1:10:4")
    s.add_argument("--u0-range", default="1:10:4")
    s.add_argument("--u1-range", default="1:10:4")
    s.add_argument("--jobs", type=int, default=1)

    s = subs.add_parser("check", help="diagnostics report")
    _add_flow_flags(s)
    s.add_argument("--cond2", action="store_true")
    s.add_argument("--weights", action="store_true")
    s.add_argument("--delta", type=float, dest="delta_weight")

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = build_config(args)
        if args.command == "steady":
            return _cmd_steady(cfg)
        if args.command == "evans":
            return _cmd_evans(cfg, args.lam_re, args.lam_im, args.index)
        if args.command == "contour":
            return _cmd_contour(cfg)
        if args.command == "spectrum":
            return _cmd_spectrum(cfg, args.abscissa)
        if args.command == "evolve":
            return _cmd_evolve(cfg, args.fit)
        if args.command == "sweep":
            ranges = {
                "nu": args.nu_range, "rho0": args.rho0_range,
                "u0": args.u0_range, "u1": args.u1_range,
            }
            return _cmd_sweep(cfg, ranges, args.jobs)
        if args.command == "check":
            return _cmd_check(cfg, args.cond2, args.weights)
        raise ValueError(f"unknown command {args.command!r}")
    except (InconclusiveError, NonconvergenceError) as exc:
        sys.stderr.write(f"inconclusive: {exc}\n")
        return 1
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
