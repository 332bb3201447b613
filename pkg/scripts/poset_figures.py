"""Write Graphviz files of the symmetric Newton polygon posets and print the
stratum dimensions next to each polygon.

    python3 scripts/poset_figures.py --gmax 4 --out-dir figures
"""
import argparse
from pathlib import Path

from npg.newton import np_sdim, poset_covers, poset_dot, symmetric_nps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gmax", type=int, default=4)
    ap.add_argument("--out-dir", default="figures")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for g in range(1, args.gmax + 1):
        nps = symmetric_nps(g)
        (out / f"symmetric_g{g}.dot").write_text(poset_dot(nps, name=f"symmetric_g{g}"))
        print(f"g = {g}: {len(nps)} symmetric polygons, {len(poset_covers(nps))} covers")
        for xi in nps:
            print(f"  sdim {np_sdim(xi):3d}  {xi}")


if __name__ == "__main__":
    main()
