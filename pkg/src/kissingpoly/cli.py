"""Command-line front end.

Every subcommand writes one JSON document or one CSV table (to ``--out``
or standard output).  Outputs start with a provenance header naming the
package version, the parsed flags and the precision, and contain no
timestamps, so identical flags give identical bytes.  Exit codes: 0
success, 1 usage or computation error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .numerics import (
    KissingError,
    PrecisionPolicy,
    cabs,
    fmt_complex,
    fmt_real,
    to_mpc,
    workprec,
)

__all__ = ["main", "run", "build_parser"]

FORMATS = ("json", "csv")


class UsageError(Exception):
    """Invalid command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- argument types

def _int(s):
    try:
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None


def _omega(s):
    try:
        to_mpc(s, 64)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"expected a number or 're,im', got {s!r}") from None
    return s


def _range(s):
    parts = s.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected '<a>:<b>', got {s!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected '<a>:<b>' with numbers, got {s!r}") from None
    if not a < b:
        raise argparse.ArgumentTypeError(f"range must satisfy a < b, got {s!r}")
    return parts[0].strip(), parts[1].strip()


def _float(s):
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {s!r}") from None


def _common() -> argparse.ArgumentParser:
    # global flags, accepted before or after the subcommand
    p = _Parser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--bits", type=_int, default=argparse.SUPPRESS, help="working precision in bits (default 256)")
    g.add_argument("--rel-tol", type=_float, default=argparse.SUPPRESS, help="relative tolerance (default 1e-30)")
    g.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS, help="output format")
    g.add_argument("--out", default=argparse.SUPPRESS, help="output file (default standard output)")
    g.add_argument("--threads", type=_int, default=argparse.SUPPRESS,
                   help="worker threads (default KP_THREADS or 1)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = _Parser(prog="kissingpoly", parents=[common],
                description="Polynomials orthogonal with respect to exp(i omega x) on [-1, 1].")
    p.add_argument("--version", action="version", version=f"kissingpoly {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_)

    s = add("moments", "moments mu_0..mu_m")
    s.add_argument("--n", type=_int, required=True, help="highest moment index m")
    s.add_argument("--omega", type=_omega, required=True)

    s = add("hankel", "Hankel determinant h_n and its omega-derivatives")
    s.add_argument("--n", type=_int, required=True)
    s.add_argument("--omega", type=_omega, required=True)
    s.add_argument("--deriv", type=_int, choices=(0, 1, 2), default=0)

    s = add("poly", "coefficients of p_n (or p~_n = h_{n-1} p_n)")
    s.add_argument("--n", type=_int, required=True)
    s.add_argument("--omega", type=_omega, required=True)
    s.add_argument("--tilde", action="store_true", help="the always-existing scaled polynomial")
    s.add_argument("--eval", type=_omega, default=None, metavar="RE,IM", help="also evaluate at this point")

    s = add("recurrence", "three-term recurrence coefficients alpha_0..alpha_{m-1}, beta_1..beta_{m-1}")
    s.add_argument("--m", type=_int, required=True)
    s.add_argument("--omega", type=_omega, required=True)

    s = add("trajectory", "roots of p_n along a range of real omega")
    s.add_argument("--n", type=_int, required=True)
    s.add_argument("--omega-range", type=_range, required=True, metavar="A:B")
    s.add_argument("--steps", type=_int, required=True)

    s = add("scan", "real zeros of h_n by grid scan and refinement")
    s.add_argument("--n", type=_int, required=True)
    s.add_argument("--range", type=_range, required=True, metavar="A:B")
    s.add_argument("--grid", type=_int, default=1000)

    s = add("zeros", "complex zeros of h_n")
    s.add_argument("--n", type=_int, required=True)
    s.add_argument("--quadrant", action="store_true", help="first quadrant only (default: all mirror images)")
    s.add_argument("--refine-from", choices=("peel", "grid"), default="peel")
    s.add_argument("--re-range", type=_range, default=("0", "30"), metavar="A:B", help="grid seeds, real part")
    s.add_argument("--im-range", type=_range, default=("0", "8"), metavar="A:B", help="grid seeds, imaginary part")
    s.add_argument("--grid", type=_int, default=16, help="grid seeds per axis")

    s = add("peel", "Lambert-W predictions for one onion peel")
    s.add_argument("--parity", choices=("even", "odd"), required=True)
    s.add_argument("--N", type=_int, required=True)
    s.add_argument("--k", type=_int, required=True)
    s.add_argument("--refine", action="store_true", help="refine each prediction by Newton")

    s = add("kissing", "kissing events: real zeros of h_2N and the degeneracy of p~_{2N+1}")
    s.add_argument("--N", type=_int, required=True)
    s.add_argument("--range", type=_range, required=True, metavar="A:B")

    s = add("oracle", "Heine quadrature value of h_{n-1} (and p_n)")
    s.add_argument("--n", type=_int, required=True)
    s.add_argument("--omega", type=_omega, required=True)
    s.add_argument("--order", type=_int, default=None)
    s.add_argument("--eval", type=_omega, default=None, metavar="RE,IM", help="also evaluate p_n here")

    s = add("verify", "run verification suites")
    s.add_argument("--suite", choices=("closedforms", "toda", "heine", "leading", "laguerre", "peel",
                                       "kissing", "scanprops", "all"), default="all")
    s.add_argument("--tol", type=_float, default=None, help="replace the main tolerance of the suite")
    return p


# ---------------------------------------------------------------- serialization

class _Ctx:
    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.bits = args.bits
        self.policy = PrecisionPolicy(args.bits, args.rel_tol, max(4096, args.bits))
        self.threads = args.threads

    def c(self, z):
        return fmt_complex(z, self.bits)

    def r(self, x):
        return fmt_real(x, self.bits)

    def v(self, x):
        """Real values as a string, complex ones as a pair."""
        from gmpy2 import mpc

        if isinstance(x, mpc):
            return self.c(x)
        return self.r(x)

    def provenance(self) -> dict:
        a = self.args
        flags = {k: v for k, v in sorted(vars(a).items()) if k not in ("out",)}
        return {"program": "kissingpoly", "version": __version__, "command": a.command,
                "bits": a.bits, "rel_tol": a.rel_tol, "threads": a.threads, "flags": _jsonable(flags)}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


def _emit_json(ctx, payload: dict) -> str:
    doc = {"provenance": ctx.provenance()}
    doc.update(payload)
    return json.dumps(doc, indent=2) + "\n"


def _emit_csv(ctx, header: list, rows: list) -> str:
    buf = io.StringIO()
    prov = ctx.provenance()
    buf.write(f"# {prov['program']} {prov['version']} command={prov['command']} bits={prov['bits']} "
              f"rel_tol={prov['rel_tol']} threads={prov['threads']}\n")
    buf.write("# flags " + json.dumps(prov["flags"], sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _table(ctx, payload: dict, header: list, rows: list, default: str = "json") -> str:
    fmt = ctx.args.format or default
    if fmt == "csv":
        return _emit_csv(ctx, header, rows)
    return _emit_json(ctx, payload)


def _flat(pair):
    return list(pair)


# ---------------------------------------------------------------- subcommands

def _cmd_moments(ctx):
    from .moments import moments

    seq = moments(ctx.args.n, ctx.args.omega, ctx.policy)
    vals = [ctx.c(z) for z in seq.values]
    rows = [[k] + v for k, v in enumerate(vals)]
    return _table(ctx, {"mu": vals}, ["k", "re", "im"], rows)


def _cmd_hankel(ctx):
    from .hankel import hankel_jet

    a = ctx.args
    jet = hankel_jet(a.n, a.omega, a.deriv, ctx.policy)
    payload = {"h": ctx.v(jet[0])}
    if a.deriv:
        payload["derivative"] = {"order": a.deriv, "value": ctx.v(jet[a.deriv])}
    rows = [[k] + ctx.c(v) for k, v in enumerate(jet)]
    return _table(ctx, payload, ["order", "re", "im"], rows)


def _cmd_poly(ctx):
    from .orthopoly import evaluate, monic_op, tilde_op

    a = ctx.args
    poly = tilde_op(a.n, a.omega, ctx.policy) if a.tilde else monic_op(a.n, a.omega, ctx.policy)
    coeffs = [ctx.c(c) for c in poly.coeffs]
    payload = {"kind": "tilde" if a.tilde else "monic", "n": a.n, "coeffs": coeffs}
    if a.tilde:
        payload["numerical_degree"] = poly.numerical_degree()
    if a.eval is not None:
        payload["value"] = ctx.c(evaluate(poly, a.eval, ctx.policy))
    rows = [[k] + c for k, c in enumerate(coeffs)]
    return _table(ctx, payload, ["power", "re", "im"], rows)


def _cmd_recurrence(ctx):
    from .orthopoly import recurrence_coeffs

    rc = recurrence_coeffs(ctx.args.m, ctx.args.omega, ctx.policy)
    al = [ctx.v(x) for x in rc.alphas]
    be = [ctx.v(x) for x in rc.betas]
    rows = [[n, "alpha"] + ctx.c(x) for n, x in enumerate(rc.alphas)]
    rows += [[n + 1, "beta"] + ctx.c(x) for n, x in enumerate(rc.betas)]
    return _table(ctx, {"alpha": al, "beta": be}, ["n", "name", "re", "im"], rows)


def _cmd_trajectory(ctx):
    from .roots import trajectory

    a = ctx.args
    lo, hi = a.omega_range
    samples = trajectory(a.n, lo, hi, a.steps, ctx.policy)
    rows, out = [], []
    for s in samples:
        w = ctx.r(s.omega.real if hasattr(s.omega, "real") else s.omega)
        for j, z in enumerate(s.roots):
            rows.append([w, j] + ctx.c(z) + [int(s.exists)])
        out.append({"omega": w, "exists": s.exists, "roots": [ctx.c(z) for z in s.roots]})
    return _table(ctx, {"n": a.n, "samples": out}, ["omega", "root_index", "re", "im", "exists_flag"], rows,
                  default="csv")


def _cmd_scan(ctx):
    from .roots import real_zero_scan

    a = ctx.args
    lo, hi = a.range
    zs = real_zero_scan(a.n, lo, hi, a.grid, ctx.policy, threads=ctx.threads)
    rows = [[ctx.r(z.omega.real), int(z.suspected_double), ctx.r(z.refine_residual)] for z in zs]
    payload = {"n": a.n, "zeros": [{"omega": r[0], "suspected_double": bool(r[1]), "residual": r[2]}
                                   for r in rows]}
    return _table(ctx, payload, ["omega", "suspected_double", "residual"], rows, default="csv")


def _mirror(zs, bits):
    # h_n(-omega) = h_n(omega) and h_n(conj omega) = conj h_n(omega)
    out = []
    with workprec(bits):
        for z in zs:
            out += [z, -z.conjugate(), -z, z.conjugate()] if z.imag != 0 else [z, -z]
    return out


def _dedupe(zs, tol):
    out = []
    for z in zs:
        if all(cabs(z - w) > tol for w in out):
            out.append(z)
    return out


def _cmd_zeros(ctx):
    from gmpy2 import mpc

    from .asymptotics import _peel_q, peel_prediction
    from .numerics import NoConvergence
    from .roots import complex_zero_refine, pmap

    a = ctx.args
    if a.n < 1:
        raise UsageError("argument --n: zeros needs n >= 1")
    pol = ctx.policy
    if a.refine_from == "peel":
        parity, N = ("odd", (a.n + 1) // 2) if a.n % 2 else ("even", a.n // 2)
        seeds = []
        for k in range(N):
            q = _peel_q(parity, N, k)
            for ell in range(2 * q):
                seeds += [p.omega_pred for p in peel_prediction(parity, N, k, ell, pol)]
        dist = 1
    else:
        (r0, r1), (i0, i1) = a.re_range, a.im_range
        g = max(a.grid, 2)
        seeds = []
        for i in range(g):
            for j in range(g):
                re = float(r0) + (float(r1) - float(r0)) * (i + 0.5) / g
                im = float(i0) + (float(i1) - float(i0)) * (j + 0.5) / g
                seeds.append(f"{re!r},{im!r}")
        dist = None

    def refine(s):
        try:
            return complex_zero_refine(a.n, s, pol, max_distance=dist)
        except NoConvergence:
            return None

    found = [z for z in pmap(refine, seeds, ctx.threads) if z is not None]
    with workprec(pol.bits):
        zs = [mpc(z.omega.real, 0) if z.kind == "real-line" else z.omega for z in found]
        zs = [z if z.imag >= 0 else z.conjugate() for z in zs]
        zs = [z if z.real >= 0 else -z.conjugate() for z in zs]
    zs = _dedupe(zs, 1e-12)
    zs.sort(key=lambda z: (float(cabs(z)), float(z.real)))
    if not a.quadrant:
        zs = _dedupe(_mirror(zs, pol.bits), 1e-12)
    vals = [ctx.c(z) for z in zs]
    rows = [[j] + v for j, v in enumerate(vals)]
    return _table(ctx, {"n": a.n, "source": a.refine_from, "seeds": len(seeds), "zeros": vals},
                  ["index", "re", "im"], rows)


def _cmd_peel(ctx):
    from .asymptotics import _peel_q, peel_coefficient, peel_prediction, peel_ratio_raw, peel_ratio_simplified
    from .numerics import NoConvergence
    from .roots import complex_zero_refine

    a = ctx.args
    pol = ctx.policy
    q = _peel_q(a.parity, a.N, a.k)
    preds = [p for ell in range(2 * q) for p in peel_prediction(a.parity, a.N, a.k, ell, pol)]
    preds.sort(key=lambda p: cabs(p.omega_pred))
    out, rows = [], []
    for p in preds:
        item = {"ell": p.ell, "branch": p.branch, "omega_pred": ctx.c(p.omega_pred)}
        row = [p.ell, p.branch] + ctx.c(p.omega_pred)
        if a.refine:
            try:
                z = complex_zero_refine(p.n, p.omega_pred, pol, max_distance=1).omega
                with workprec(pol.bits):
                    d = cabs(z - p.omega_pred)
                item["omega_refined"], item["discrepancy"] = ctx.c(z), ctx.r(d)
                row += ctx.c(z) + [ctx.r(d)]
            except NoConvergence:
                item["omega_refined"], item["discrepancy"] = None, None
                row += ["", "", ""]
        out.append(item)
        rows.append(row)
    c0 = peel_coefficient(a.parity, a.N, a.k)
    c1 = peel_coefficient(a.parity, a.N, a.k + 1)
    payload = {"parity": a.parity, "N": a.N, "k": a.k, "n": 2 * a.N - 1 if a.parity == "odd" else 2 * a.N,
               "coefficients": [str(c0), str(c1)],
               "ratio_raw": ctx.c(peel_ratio_raw(a.parity, a.N, a.k, pol)),
               "ratio_simplified": ctx.c(peel_ratio_simplified(a.parity, a.N, a.k, pol)),
               "predictions": out}
    header = ["ell", "branch", "pred_re", "pred_im"] + (["ref_re", "ref_im", "discrepancy"] if a.refine else [])
    return _table(ctx, payload, header, rows)


def _cmd_kissing(ctx):
    from .roots import kissing_detect

    a = ctx.args
    lo, hi = a.range
    ev = kissing_detect(a.N, lo, hi, ctx.policy, threads=ctx.threads)
    rows = [[ctx.r(e.omega)] + ctx.c(e.constant) + [ctx.r(e.residual), ctx.r(e.root_distance)] for e in ev]
    payload = {"N": a.N, "events": [{"omega": r[0], "constant": r[1:3], "residual": r[3], "root_distance": r[4]}
                                    for r in rows]}
    return _table(ctx, payload, ["omega", "const_re", "const_im", "residual", "root_distance"], rows)


def _cmd_oracle(ctx):
    from .hankel import hankel_value
    from .oracle import default_order, heine_hankel, heine_poly
    from .orthopoly import evaluate, monic_op

    a = ctx.args
    pol = ctx.policy
    order = a.order or default_order(a.n, a.omega)
    q = heine_hankel(a.n, a.omega, order, pol, threads=ctx.threads)
    h = hankel_value(a.n - 1, a.omega, pol)
    with workprec(pol.bits):
        rel = cabs(q - h) / cabs(h) if h != 0 else cabs(q)
    payload = {"n": a.n, "order": order, "h": ctx.c(q), "determinant": ctx.v(h), "rel_diff": ctx.r(rel)}
    rows = [["h", a.n - 1] + ctx.c(q) + [ctx.r(rel)]]
    if a.eval is not None:
        pq = heine_poly(a.n, a.omega, a.eval, order, pol, threads=ctx.threads)
        pv = evaluate(monic_op(a.n, a.omega, pol), a.eval, pol)
        with workprec(pol.bits):
            prel = cabs(pq - pv) / max(cabs(pv), 1)
        payload.update({"p": ctx.c(pq), "p_linear_system": ctx.c(pv), "p_rel_diff": ctx.r(prel)})
        rows.append(["p", a.n] + ctx.c(pq) + [ctx.r(prel)])
    return _table(ctx, payload, ["quantity", "index", "re", "im", "rel_diff"], rows)


def _cmd_verify(ctx):
    from .verify import run_suite

    a = ctx.args
    res = run_suite(a.suite, ctx.policy, a.tol, ctx.threads)
    for r in res:
        print(r.line(), file=sys.stderr)
    rows = [[r.criterion, r.name, "PASS" if r.passed else "FAIL", r.detail] for r in res]
    text = _table(ctx, {"suite": a.suite, "passed": all(r.passed for r in res),
                        "results": [r.as_dict() for r in res]},
                  ["criterion", "name", "verdict", "detail"], rows)
    return text, (0 if all(r.passed for r in res) else 2)


COMMANDS = {
    "moments": _cmd_moments,
    "hankel": _cmd_hankel,
    "poly": _cmd_poly,
    "recurrence": _cmd_recurrence,
    "trajectory": _cmd_trajectory,
    "scan": _cmd_scan,
    "zeros": _cmd_zeros,
    "peel": _cmd_peel,
    "kissing": _cmd_kissing,
    "oracle": _cmd_oracle,
    "verify": _cmd_verify,
}


def _threads_default():
    v = os.environ.get("KP_THREADS")
    if v is None:
        return 1
    try:
        t = int(v)
    except ValueError:
        raise UsageError(f"KP_THREADS must be a positive integer, got {v!r}") from None
    if t < 1:
        raise UsageError(f"KP_THREADS must be a positive integer, got {v!r}")
    return t


def _finish(args):
    defaults = {"bits": 256, "rel_tol": 1e-30, "format": None, "out": None}
    for k, v in defaults.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if not hasattr(args, "threads"):
        args.threads = _threads_default()
    if args.bits < 64:
        raise UsageError(f"argument --bits: must be >= 64, got {args.bits}")
    if not 0 < args.rel_tol < 1:
        raise UsageError(f"argument --rel-tol: must lie in (0, 1), got {args.rel_tol}")
    if args.threads < 1:
        raise UsageError(f"argument --threads: must be >= 1, got {args.threads}")
    return args


def run(argv=None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the subcommand and return the exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = _finish(build_parser().parse_args(argv))
        ctx = _Ctx(args, argv)
        old = sys.stderr
        sys.stderr = stderr
        try:
            res = COMMANDS[args.command](ctx)
        finally:
            sys.stderr = old
    except UsageError as e:
        print(f"kissingpoly: usage error: {e}", file=stderr)
        return 1
    except KissingError as e:
        print(f"kissingpoly: {type(e).__name__}: {e}", file=stderr)
        return 1
    except ValueError as e:
        print(f"kissingpoly: ValueError: {e}", file=stderr)
        return 1
    text, code = res if isinstance(res, tuple) else (res, 0)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    """Console entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
