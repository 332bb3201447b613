"""Stress the normal-form algorithms: scramble seed displays by random
(symplectic) base changes and count recoveries, normalizations and timings.

    python3 scripts/normal_form_stress.py --reps 20 --hmax 6 --gmax 3
"""
import argparse
import random
import time
from collections import Counter

from npg.cayley import np_fast
from npg.deform import manin
from npg.display import np_seed_display, random_symplectic
from npg.errors import NPGError
from npg.newton import enumerate_np, symmetric_nps
from npg.normalform import normal_form, symplectic_normal_form
from npg.semilinear import MatrixW, base_change, required_precision
from npg.witt import make_ring


def plain(args, rng, tally):
    for p in args.primes:
        for h in range(2, args.hmax + 1):
            for d in range(1, h):
                R = make_ring(p, 1, 2 * (h - d) + 4)
                for beta in enumerate_np(h, d):
                    if beta.multiplicity(0):
                        continue
                    D = np_seed_display(beta, R)
                    for _ in range(args.reps):
                        U = MatrixW.random_invertible(R, h, rng)
                        try:
                            res = normal_form(base_change(D.module(), U))
                        except NPGError as exc:
                            tally[f"plain {type(exc).__name__}"] += 1
                            continue
                        ok = np_fast(res.display) == beta
                        tally["plain ok" if ok else "plain wrong polygon"] += 1
                        tally["plain normalized"] += res.normalized


def symplectic(args, rng, tally):
    for p in args.primes:
        for g in range(1, args.gmax + 1):
            for xi in symmetric_nps(g):
                if xi.multiplicity(0):
                    continue
                w = manin(xi, p, N=required_precision(g, 1) + g + 2)
                for _ in range(args.reps):
                    U = random_symplectic(w.display.ring, g, rng)
                    try:
                        res = symplectic_normal_form(base_change(w.display.module(), U), w.gram)
                    except NPGError as exc:
                        tally[f"symplectic {type(exc).__name__}"] += 1
                        continue
                    ok = np_fast(res.display) == xi
                    tally["symplectic ok" if ok else "symplectic wrong polygon"] += 1
                    tally[f"symplectic over GF({res.display.ring.field.order})"] += 1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--hmax", type=int, default=5)
    ap.add_argument("--gmax", type=int, default=3)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3, 5])
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    tally = Counter()
    t0 = time.perf_counter()
    plain(args, rng, tally)
    symplectic(args, rng, tally)
    for key in sorted(tally):
        print(f"{key:<32} {tally[key]}")
    print(f"{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
