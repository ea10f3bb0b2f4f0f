"""Singular points of f_L, f_N and cusps of the pedals along the tube over gamma4.

    python3 scripts/gamma4_singularities.py [--name tube-gamma4] [--samples 64]
"""
import argparse
from collections import Counter

from lightlike import catalog, frame_for, lightcone_pedal, lightlike_ruled_surface, singular_locus
from lightlike.pedal import DegeneratePedalError, pedal_cusps
from lightlike.ruled import crosscheck_residual


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--name", default="tube-gamma4")
    ap.add_argument("--samples", type=int)
    args = ap.parse_args()
    fr = frame_for(catalog(args.name), samples=args.samples)[2]
    for kind in "LN":
        recs = singular_locus(lightlike_ruled_surface(fr, kind))
        print(f"f_{kind}: {dict(Counter(r.kind for r in recs))}")
        for r in recs:
            if r.kind == "swallowtail":
                x = ", ".join(f"{c:+.6f}" for c in r.point)
                print(f"  u = {r.param:.9f}  {r.kind:16s} v = {r.v:+.6f}  ({x})  route gap {crosscheck_residual(r):.1e}")
        try:
            cusps = pedal_cusps(lightcone_pedal(fr, kind))
        except DegeneratePedalError as exc:
            print(f"  pedal: {exc}")
            continue
        print(f"  pedal cusps: {len(cusps)} at u = " + ", ".join(f"{p.param:.6f}" for p in cusps))


if __name__ == "__main__":
    main()
