"""Realize every specialization gamma -> beta with 0 < d < h <= HMAX from the
seed display of gamma and report counts and timings per (h, d).

    python3 scripts/grothendieck_sweep.py --hmax 6 --p 3
"""
import argparse
import time

from npg.deform import realize
from npg.display import np_seed_display
from npg.newton import enumerate_np, is_above
from npg.semilinear import required_precision
from npg.witt import make_ring


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--hmax", type=int, default=5)
    ap.add_argument("--p", type=int, default=2)
    args = ap.parse_args()
    total = 0
    for h in range(2, args.hmax + 1):
        for d in range(1, h):
            R = make_ring(args.p, 1, required_precision(h - d, 1))
            nps = enumerate_np(h, d)
            t0 = time.perf_counter()
            pairs = extended = 0
            for gamma in nps:
                base = np_seed_display(gamma, R)
                for beta in nps:
                    if is_above(gamma, beta):
                        w = realize(base, beta)
                        pairs += 1
                        extended += w.assignment.field.m > 1
            total += pairs
            print(f"h={h} d={d}: {len(nps):3d} polygons, {pairs:4d} pairs, "
                  f"{extended} needed a field extension, {time.perf_counter() - t0:.2f}s")
    print(f"{total} specializations realized")


if __name__ == "__main__":
    main()
