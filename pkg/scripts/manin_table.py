"""Tabulate Manin witnesses: for each symmetric polygon, the parameters
switched on, the field needed and the time taken.

    python3 scripts/manin_table.py --gmax 3 --primes 2 3 5
"""
import argparse
import time

from npg.display import a_number
from npg.deform import manin
from npg.newton import symmetric_nps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gmax", type=int, default=3)
    ap.add_argument("--primes", type=int, nargs="+", default=[2, 3])
    args = ap.parse_args()
    print(f"{'g':>2} {'p':>2}  {'polygon':<34} {'params':>6} {'field':>6} {'a':>2} {'sec':>6}")
    for g in range(1, args.gmax + 1):
        for p in args.primes:
            for xi in symmetric_nps(g):
                t0 = time.perf_counter()
                w = manin(xi, p)
                dt = time.perf_counter() - t0
                print(f"{g:>2} {p:>2}  {str(xi):<34} {len(w.assignment):>6} "
                      f"{'GF(%d)' % w.assignment.field.order:>6} {a_number(w.display):>2} {dt:>6.2f}")


if __name__ == "__main__":
    main()
