"""Write OBJ/CSV geometry for every catalog entry (surface, f_L, f_N, locus, pedals).

    python3 scripts/export_figure_data.py --out figures [--grid 64x16]
"""
import argparse
from pathlib import Path

from lightlike import catalog, catalog_names
from lightlike.report import MeshError, StageError, mesh

TARGETS = ("surface", "locus", "f_L", "f_N", "pedal_L", "pedal_N")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--grid", default="64x16")
    ap.add_argument("--names", nargs="*", default=None)
    args = ap.parse_args()
    grid = tuple(int(x) for x in args.grid.split("x"))
    for name in args.names or catalog_names():
        spec = catalog(name)
        for target in TARGETS:
            try:
                path = mesh(spec, target, grid, args.out / name)
                print(f"{name:18s} {target:8s} {path}")
            except (StageError, MeshError) as exc:
                print(f"{name:18s} {target:8s} skipped: {exc}")


if __name__ == "__main__":
    main()
