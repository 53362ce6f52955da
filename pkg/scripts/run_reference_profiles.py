#!/usr/bin/env python3
"""Solve the two reference channel flows, write their profile tables, and
record the Evans-function winding on the standard contours.

Outputs (in --outdir, default ./out):
  profile_accel.csv / profile_decel.csv   steady profiles
  contour_<case>_M<M>.csv                 refined contour nodes
  summary.json                            endpoints, windings, indices
"""
import argparse
import json
import os

from nschannel.cli import write_profile_csv, _fmt
from nschannel.evans import stability_index
from nschannel.spectrum import build_contour, winding_number
from nschannel.steady import FlowParams, classify, solve_steady
from nschannel.thermo import GammaLaw

CASES = {
    "accel": FlowParams(nu=1.0, rho0=3.0, u0=2.0, u1=3.0),
    "decel": FlowParams(nu=1.0, rho0=2.0, u0=1.5, u1=1.0),
    "decel_thin": FlowParams(nu=0.1, rho0=2.0, u0=1.5, u1=1.0),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="out")
    ap.add_argument("--M", type=float, nargs="*", default=[10.0, 20.0])
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    law = GammaLaw()
    summary = {}
    for name, params in CASES.items():
        profile = solve_steady(params, law)
        write_profile_csv(os.path.join(args.outdir, f"profile_{name}.csv"),
                          profile)
        entry = {
            "b": profile.b,
            "rho_end": float(profile.rho[-1]),
            "slope_class": classify(profile).label,
            "stability_index": stability_index(profile).product,
            "windings": {},
        }
        for M in args.M:
            rep = winding_number(profile, build_contour(M))
            entry["windings"][str(M)] = {
                "winding": rep.winding, "verdict": rep.verdict,
            }
            path = os.path.join(args.outdir, f"contour_{name}_M{M:g}.csv")
            with open(path, "w") as fh:
                fh.write("lam_re,lam_im\n")
                for lam in rep.contour.samples:
                    fh.write(f"{_fmt(lam.real)},{_fmt(lam.imag)}\n")
        summary[name] = entry
        print(name, json.dumps(entry["windings"]))

    with open(os.path.join(args.outdir, "summary.json"), "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)


if __name__ == "__main__":
    main()
