"""The `npg` command line.

Exit codes: 0 success, 1 verification failure, 2 usage error.  Human output
goes to stdout, diagnostics to stderr; `--json` switches stdout to JSON.
"""
from __future__ import annotations

import argparse
import contextlib
import io as _stdio
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import io as npg_io
from .acceptance import CRITERIA, run_all, run_criterion
from .cayley import np_fast, np_hull
from .deform import chain, manin, realize, realize_symmetric
from .display import (DisplayMatrix, a_number, is_formal, np_seed_display,
                      p_rank, standard_gram)
from .errors import NPGError, UsageError, VerificationError
from .newton import (enumerate_np, is_above, np_dim, np_sdim,
                     parse_np, poset_covers, poset_dot, symmetric_nps)
from .normalform import normal_form, symplectic_normal_form
from .semilinear import np_oracle, required_precision
from .witt import make_ring

log = logging.getLogger("npg")


@dataclass(frozen=True)
class CommandResult:
    code: int
    stdout: str
    stderr: str


class _Ctx:
    def __init__(self, args, out, err):
        self.args = args
        self.out = out
        self.err = err

    def say(self, *parts):
        print(*parts, file=self.out)

    def warn(self, *parts):
        print(*parts, file=self.err)

    def emit(self, payload, text):
        """JSON payload under --json, the text lines otherwise."""
        if self.args.json:
            print(json.dumps(payload, sort_keys=True), file=self.out)
        else:
            for line in ([text] if isinstance(text, str) else text):
                print(line, file=self.out)


# -- helpers -----------------------------------------------------------------------------

def _np_arg(text: str):
    try:
        return parse_np(text)
    except NPGError as exc:
        raise UsageError(f"cannot parse polygon {text!r}: {exc}") from exc


def _load_display(path) -> DisplayMatrix:
    return npg_io.load(path, "display")


def _load_gram(path, disp: DisplayMatrix):
    if path is None:
        if disp.d != disp.c:
            raise UsageError("a symplectic form needs d = c")
        return standard_gram(disp.ring, disp.d)
    gram = npg_io.load(path, "gram")
    if gram.ring is not disp.ring:
        raise UsageError("Gram form and display live over different rings")
    return gram


def _oracle_ready(disp: DisplayMatrix) -> DisplayMatrix:
    need = required_precision(disp.c, disp.ring.m)
    if disp.ring.N < need:
        raise UsageError(f"display precision N = {disp.ring.N} is below the {need} the oracle needs")
    return disp


def _write(ctx, obj, path):
    if path is None:
        ctx.out.write(npg_io.dumps(obj))
    else:
        npg_io.save(obj, path)
        ctx.warn(f"wrote {path}")


def _witness_lines(w) -> list[str]:
    lines = [f"special: {w.special_np}", f"generic: {w.generic_np}",
             f"field: GF({w.assignment.field.order}), precision N = {w.display.ring.N}"]
    for (r, s), v in w.assignment.values:
        lines.append(f"  t[{r},{s}] = {v!r}")
    return lines


def _witness_payload(w) -> dict:
    return {"special_np": str(w.special_np), "generic_np": str(w.generic_np),
            "a_number": a_number(w.display), "field_order": w.assignment.field.order,
            "assignment": [[r, s, list(v.coeffs)] for (r, s), v in w.assignment.values]}


# -- np ------------------------------------------------------------------------------------

def cmd_np_enum(ctx):
    a = ctx.args
    if a.symmetric and a.h != 2 * a.d:
        raise UsageError("symmetric polygons have h = 2d")
    nps = enumerate_np(a.h, a.d, symmetric=a.symmetric)
    ctx.emit([str(p) for p in nps], [str(p) for p in nps])
    return 0


def cmd_np_cmp(ctx):
    b, g = _np_arg(ctx.args.np1), _np_arg(ctx.args.np2)
    if b.endpoint != g.endpoint:
        raise UsageError(f"incomparable endpoints: {b.endpoint} vs {g.endpoint}")
    if b == g:
        rel = "equal"
    elif is_above(b, g):
        rel = "above"
    elif is_above(g, b):
        rel = "below"
    else:
        rel = "incomparable"
    ctx.emit({"relation": rel, "np1": str(b), "np2": str(g)}, rel)
    return 0


def cmd_np_dim(ctx):
    beta = _np_arg(ctx.args.np)
    n = np_sdim(beta) if ctx.args.symmetric else np_dim(beta)
    ctx.emit({"np": str(beta), "symmetric": ctx.args.symmetric, "dim": n}, str(n))
    return 0


def cmd_np_poset(ctx):
    a = ctx.args
    if a.g is not None:
        if not a.symmetric:
            nps = enumerate_np(2 * a.g, a.g)
        else:
            nps = symmetric_nps(a.g)
    elif a.h is not None and a.d is not None:
        nps = enumerate_np(a.h, a.d, symmetric=a.symmetric)
    else:
        raise UsageError("give --g, or --h and --d")
    if a.dot:
        ctx.out.write(poset_dot(nps))
        return 0
    covers = poset_covers(nps)
    ctx.emit({"polygons": [str(p) for p in nps],
              "covers": [[str(lo), str(hi)] for lo, hi in covers]},
             [f"{lo} < {hi}" for lo, hi in covers] or [str(p) for p in nps])
    return 0


# -- display -------------------------------------------------------------------------------

def cmd_display_np(ctx):
    disp = _load_display(ctx.args.inp)
    method = ctx.args.method
    if method == "oracle":
        got = np_oracle(_oracle_ready(disp).module())
    elif method == "cayley":
        got = np_fast(disp)
    else:
        got = np_hull(disp)
    ctx.emit({"np": str(got), "method": method, "breakpoints": [list(b) for b in got.breakpoints]}, str(got))
    return 0


def cmd_display_invariants(ctx):
    disp = _oracle_ready(_load_display(ctx.args.inp))
    inv = {"d": disp.d, "c": disp.c, "a_number": a_number(disp), "p_rank": p_rank(disp),
           "formal": is_formal(disp), "np": str(np_oracle(disp.module()))}
    ctx.emit(inv, [f"{k}: {v}" for k, v in inv.items()])
    return 0


def cmd_display_seed(ctx):
    a = ctx.args
    beta = _np_arg(a.np)
    N = a.N if a.N is not None else required_precision(beta.c, a.m)
    disp = np_seed_display(beta, make_ring(a.p, a.m, N))
    _write(ctx, disp, a.out)
    return 0


def cmd_display_normalform(ctx):
    a = ctx.args
    disp = _load_display(a.inp)
    module = disp.module()
    if a.symplectic:
        res = symplectic_normal_form(module, _load_gram(a.gram, disp))
    else:
        res = normal_form(module)
    out = res.display
    _write(ctx, out, a.out)
    ctx.warn(f"precision N = {res.precision}, normalized: {res.normalized}")
    for note in res.notes:
        ctx.warn(f"note: {note}")
    if out.ring.N >= out.c + 2:
        ctx.warn(f"polygon: {np_fast(out)}")
    return 0


# -- realizations ------------------------------------------------------------------------------

def cmd_realize(ctx):
    a = ctx.args
    base = _load_display(a.source)
    target = _np_arg(a.target)
    if a.symmetric:
        w = realize_symmetric((base, _load_gram(a.gram, base)), target)
    else:
        w = realize(base, target)
    _write(ctx, w, a.out)
    if a.out:
        ctx.emit(_witness_payload(w), _witness_lines(w))
    return 0


def cmd_manin(ctx):
    a = ctx.args
    xi = _np_arg(a.xi)
    if xi.h != 2 * a.g:
        raise UsageError(f"{xi} has height {xi.h}, expected 2g = {2 * a.g}")
    w = manin(xi, a.p)
    if a.out:
        _write(ctx, w, a.out)
        ctx.emit(_witness_payload(w), _witness_lines(w))
    else:
        _write(ctx, w, None)
    return 0


def cmd_chain(ctx):
    a = ctx.args
    xis = [_np_arg(t) for t in a.nps.split(";") if t.strip()]
    if len(xis) >= 2 and not is_above(xis[0], xis[1]) and is_above(xis[1], xis[0]):
        xis.reverse()  # accept the chain listed from the generic end too
    ws = chain(xis, a.p)
    if a.out_dir:
        Path(a.out_dir).mkdir(parents=True, exist_ok=True)
        for i, w in enumerate(ws, start=1):
            npg_io.save(w, Path(a.out_dir) / f"link_{i}.json")
    payload = [_witness_payload(w) for w in ws]
    lines = [f"link {i}: {w.special_np} -> {w.generic_np} (GF({w.assignment.field.order}))"
             for i, w in enumerate(ws, start=1)] or ["empty chain"]
    ctx.emit(payload, lines)
    return 0


def cmd_verify(ctx):
    w = npg_io.load(ctx.args.inp, "witness")
    ok, report = npg_io.verify_witness(w)
    ctx.emit({"ok": ok, "report": report}, report + [("verified" if ok else "VERIFICATION FAILED")])
    return 0 if ok else 1


# -- selftest ----------------------------------------------------------------------------------

def _threads() -> int:
    raw = os.environ.get("NPG_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"NPG_THREADS must be an integer, got {raw!r}") from None


def cmd_selftest(ctx):
    a = ctx.args
    only = None
    if a.only:
        try:
            only = {int(x) for x in a.only.split(",")}
        except ValueError:
            raise UsageError(f"--only takes comma-separated criterion numbers, got {a.only!r}") from None
        if not only <= {n for n, _, _ in CRITERIA}:
            raise UsageError("unknown criterion number")
    threads = _threads()
    numbers = [n for n, _, _ in CRITERIA if not only or n in only]
    if threads > 1:
        # separate processes; criterion 10 then only counts its own p-rank checks
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_criterion, numbers, [a.quick] * len(numbers),
                                    [a.seed] * len(numbers)))
        for r in results:
            ctx.say(r.line())
    else:
        results = run_all(a.quick, a.seed, only=only, report=lambda r: (ctx.say(r.line()), ctx.out.flush()))
    failed = [r for r in results if not r.passed]
    if a.json:
        ctx.say(json.dumps([r.__dict__ for r in results], sort_keys=True))
    if failed:
        ctx.warn("failed criteria: " + ", ".join(f"{r.number} ({r.title})" for r in failed))
        return 1
    ctx.say(f"all {len(results)} criteria passed")
    return 0


# -- parser ----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--no-color", action="store_true", help="plain output (the default)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="npg", parents=[common],
                                     description="Newton polygons, displays and their deformations.")
    sub = parser.add_subparsers(dest="command", required=True)

    np_p = sub.add_parser("np", help="Newton polygon combinatorics")
    np_sub = np_p.add_subparsers(dest="np_command", required=True)
    p = np_sub.add_parser("enum", parents=[common], help="list polygons of height h and dimension d")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--symmetric", action="store_true")
    p.set_defaults(func=cmd_np_enum)
    p = np_sub.add_parser("cmp", parents=[common], help="compare two polygons")
    p.add_argument("np1")
    p.add_argument("np2")
    p.set_defaults(func=cmd_np_cmp)
    p = np_sub.add_parser("dim", parents=[common], help="stratum dimension")
    p.add_argument("np")
    p.add_argument("--symmetric", action="store_true")
    p.set_defaults(func=cmd_np_dim)
    p = np_sub.add_parser("poset", parents=[common], help="cover relations or DOT graph")
    p.add_argument("--g", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_np_poset)

    d_p = sub.add_parser("display", help="display matrices")
    d_sub = d_p.add_subparsers(dest="display_command", required=True)
    p = d_sub.add_parser("np", parents=[common], help="Newton polygon of a display")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--method", choices=("oracle", "cayley", "hull"), default="oracle")
    p.set_defaults(func=cmd_display_np)
    p = d_sub.add_parser("invariants", parents=[common], help="a-number, p-rank, formality, polygon")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_display_invariants)
    p = d_sub.add_parser("seed", parents=[common], help="normal form with a given polygon")
    p.add_argument("--np", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--N", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_display_seed)
    p = d_sub.add_parser("normalform", parents=[common], help="bring a display into normal form")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--symplectic", action="store_true")
    p.add_argument("--gram", help="Gram form file (default: the standard form)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_display_normalform)

    p = sub.add_parser("realize", parents=[common], help="deform a normal form to a target polygon")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--gram", help="Gram form file (default: the standard form)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("manin", parents=[common], help="quasi-polarized witness for a symmetric polygon")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--xi", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_manin)

    p = sub.add_parser("chain", parents=[common], help="witnesses along a chain of symmetric polygons")
    p.add_argument("--nps", required=True, help='"NP;NP;..." from the most special down')
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("verify", parents=[common], help="re-verify a witness file")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    p.add_argument("--quick", action="store_true", help="g <= 2, h <= 4")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_selftest)
    return parser


def _dispatch(argv, out, err) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=err)
    ctx = _Ctx(args, out, err)
    try:
        return args.func(ctx)
    except UsageError as exc:
        print(f"npg: error: {exc}", file=err)
        return 2
    except VerificationError as exc:
        print(f"npg: verification failed: {exc}", file=err)
        return 1
    except NPGError as exc:
        print(f"npg: {type(exc).__name__}: {exc}", file=err)
        return 1


def run(argv) -> CommandResult:
    """Run a command with captured output (for tests and embedding)."""
    out, err = _stdio.StringIO(), _stdio.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = _dispatch(list(argv), out, err)
    return CommandResult(code, out.getvalue(), err.getvalue())


def main(argv=None) -> int:
    return _dispatch(sys.argv[1:] if argv is None else list(argv), sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
