"""Command-line front end: ``sublevel <subcommand> [flags]``.

Every run writes its effective configuration as a ``# config:`` comment
(CSV) or a ``config`` key (JSON); the timestamp sits on its own line/key
so the data rows are byte-identical across reruns with the same flags.

Exit codes: 0 success, 1 invalid input, 2 accuracy budget exceeded,
3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys

import numpy as np

from . import cnseq, experiments, mahler, meanmeasure
from .errors import AccuracyError, InvalidInputError
from .sampling import THREADS_ENV, default_threads
from .trigpoly import AlgebraicPoly, TrigPoly

EXIT_OK, EXIT_INVALID, EXIT_ACCURACY, EXIT_INTERNAL = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _ints(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _complexes(text):
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad coefficient list: {text!r}") from exc


def _grid(text):
    """'lo:hi:count' log-spaced, or a comma list."""
    if ":" in text:
        try:
            lo, hi, cnt = text.split(":")
            return list(np.logspace(math.log10(float(lo)), math.log10(float(hi)), int(cnt)))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}; use lo:hi:count") from exc
    return _floats(text)


def _load_trig(args) -> TrigPoly:
    if args.poly:
        with open(args.poly) as fh:
            return TrigPoly.from_json(fh.read())
    if args.coeffs:
        return TrigPoly.from_coeffs(args.coeffs)
    raise InvalidInputError("give --poly FILE or --coeffs LIST")


def _load_alg(args) -> AlgebraicPoly:
    if args.coeffs:
        return AlgebraicPoly(tuple(args.coeffs))
    if args.poly:
        f = _load_trig(args)
        if any(w != int(w) or w < 0 for w in f.freqs):
            raise InvalidInputError("algebraic input needs nonnegative integer frequencies")
        c = np.zeros(int(f.freqs[-1]) + 1, dtype=complex)
        c[[int(w) for w in f.freqs]] = f.coefficients
        return AlgebraicPoly(tuple(c))
    raise InvalidInputError("give --coeffs LIST or --poly FILE")


def _poly_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--poly", help="TrigPoly JSON file {\"terms\": [{\"omega\", \"re\", \"im\"}]}")
    g.add_argument("--coeffs", type=_complexes,
                   help="coefficients of exponents 0,1,2,... e.g. \"1,0,-1\" or \"1,0.5+2j\"")


def _sampling_flags(p, samples=10**6):
    p.add_argument("--window", type=float, default=None,
                   help="half-width L of [-L, L]; default one exact period when available")
    p.add_argument("--samples", type=int, default=samples)


# ---------------------------------------------------------------- handlers
# each returns (columns, rows, extra) ; extra is a dict of result metadata

def _run_jf(a):
    f = _load_trig(a)
    c = meanmeasure.estimate_J(f, a.u, a.window, a.samples, a.seed, a.threads)
    rows = [[u, j, s] for u, j, s in zip(c.thresholds, c.estimates, c.std_errors)]
    return ["u", "j_estimate", "std_error"], rows, {"window": c.window, "exact_period": c.exact_period}


def _run_xi(a):
    f = _load_trig(a)
    r = meanmeasure.estimate_Xi(f, a.omega, a.k, a.u, a.v, a.window, a.samples, a.seed, a.threads)
    return ["omega", "k", "u", "v", "xi_estimate", "std_error"], \
        [[r.omega, r.k, r.u, r.v, r.value, r.std_error]], {}


def _run_kf(a):
    f = _load_trig(a)
    rows = []
    for u in a.u:
        k = meanmeasure.estimate_K(f, u, a.omega_grid, a.k_max, a.v_grid, a.window, a.samples,
                                   a.seed, a.threads, return_details=True)
        rows.append([u, k.value, k.omega, k.k, k.v, k.xi, k.analytic])
    return ["u", "k_estimate", "omega", "k", "v", "xi", "analytic"], rows, {}


def _run_bound(a):
    rows = [[a.n, a.height, u, meanmeasure.theorem1_bound(a.n, a.height, u)] for u in a.u]
    return ["n", "height", "u", "bound"], rows, {}


def _run_cn(a):
    s = cnseq.cn_series(a.n_max, a.checkpoints)
    return ["n", "log_cn", "cn_over_n"], [list(r) for r in s.rows()], \
        {"max_compensation_residue": float(np.max(s.residue))}


def _run_mahler(a):
    p = _load_alg(a)
    rows = []
    if a.method in ("jensen", "both"):
        rows.append(mahler.mahler_jensen(p, quad_tol=a.tol))
    if a.method in ("quadrature", "both"):
        rows.append(mahler.mahler_quadrature_poly(p, a.tol, max_panels=a.max_panels))
    cols = ["method", "m", "m_plus", "m_minus", "log_m", "log_m_plus", "log_m_minus", "err"]
    return cols, [[t.method, t.m, t.m_plus, t.m_minus, t.log_m, t.log_m_plus, t.log_m_minus, t.err]
                  for t in rows], {}


def _run_phin(a):
    for N in a.N_list:
        if N > a.cap:
            raise InvalidInputError(f"N = {N} exceeds --cap {a.cap}")
    t = mahler.phiN_growth(a.N_list, a.tol, a.samples, a.seed, a.max_panels, a.threads)
    rows = [[r.N, r.log_mplus_quadrature, r.log_mplus_sampling, r.err] for r in t.rows]
    return ["N", "log_mplus_quadrature", "log_mplus_sampling", "err"], rows, \
        {"fitted_exponent": t.exponent}


def _run_farey(a):
    fr = mahler.farey_angles(a.N)
    return ["index", "numerator", "denominator", "angle"], \
        [[i, x.numerator, x.denominator, float(x)] for i, x in enumerate(fr)], {"count": len(fr)}


def _run_examples(a):
    rows = []
    for n in a.n_list:
        lp = mahler.mahler_jensen(experiments.pn(n)).log_m_minus
        lq = mahler.mahler_jensen(experiments.qn(n)).log_m_minus
        rows.append([n, lp, lq, experiments.log_mminus_qn_closed(n), -2 * n / math.pi,
                     int(lp > -1), int(lq < -2 * n / math.pi)])
    return ["n", "log_mminus_pn", "log_mminus_qn", "log_mminus_qn_closed", "minus_2n_over_pi",
            "pn_gt_minus_1", "qn_lt_minus_2n_over_pi"], rows, {}


def _run_conj3(a):
    law = experiments.SamplingLaw(exponents=a.exponents, real=a.real)
    rep = experiments.conj3_trial(a.n, a.trials, a.seed, a.tol, law, a.threads)
    rows = [[v["trial"], v["side"], v["log_m_minus"], v["jensen"], v["quadrature"]]
            for v in rep.violations]
    extra = {"lower_log_m_minus_qn": rep.lower, "upper_log_m_minus_pn": rep.upper,
             "endpoint_checks": rep.endpoint_checks, "unconfirmed": rep.unconfirmed,
             "failures": len(rep.failures), "summary": rep.summary}
    return ["trial", "side", "log_m_minus", "reverified_jensen", "reverified_quadrature"], rows, extra


def _run_best(a):
    r = experiments.best_constant_probe(a.n, a.trials, a.u_grid, a.seed, a.samples)
    return ["n", "value", "std_error", "argmax_u", "c_n", "qn_family"], \
        [[r.n, r.value, r.std_error, r.argmax_u, r.c_n, float(r.qn_family)]], {}


def _run_disc(a):
    if a.angles is not None:
        pts, label = a.angles, "angles"
    elif a.farey is not None:
        pts, label = [float(x) for x in mahler.farey_angles(a.farey)], f"farey({a.farey})"
    elif a.pn is not None:
        pts, label = experiments.root_angles(experiments.pn(a.pn)), f"pn({a.pn})"
    elif a.qn is not None:
        pts, label = experiments.root_angles(experiments.qn(a.qn)), f"qn({a.qn})"
    else:
        raise InvalidInputError("give one of --angles, --farey, --pn, --qn")
    return ["points", "n_points", "star_discrepancy"], \
        [[label, len(pts), experiments.star_discrepancy(pts)]], {}


def _run_lemma2(a):
    r = meanmeasure.lemma2_trial(a.seed, a.trials)
    return ["trials", "violations", "degenerate", "rejected", "worst_ratio"], \
        [[r.trials, r.violations, r.degenerate, r.rejected, r.worst_ratio]], {}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default ${THREADS_ENV} or 1)")

    parser = _Parser(prog="sublevel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("jf", parents=[common], help="sublevel measure J_f(u)")
    _poly_flags(p)
    p.add_argument("--u", type=_grid, required=True)
    _sampling_flags(p)
    p.set_defaults(func=_run_jf)

    p = sub.add_parser("xi", parents=[common], help="Xi_{f,omega,k,u}(v)")
    _poly_flags(p)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    _sampling_flags(p)
    p.set_defaults(func=_run_xi)

    p = sub.add_parser("kf", parents=[common], help="grid estimate of K_f(u)")
    _poly_flags(p)
    p.add_argument("--u", type=_grid, required=True)
    p.add_argument("--omega-grid", type=_floats, default=[0.0])
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--v-grid", type=_grid, default=list(meanmeasure.DEFAULT_V_GRID))
    _sampling_flags(p, samples=1 << 18)
    p.set_defaults(func=_run_kf)

    p = sub.add_parser("bound", parents=[common], help="C_n H^(-1/n) u^(1/n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--height", type=float, default=1.0)
    p.add_argument("--u", type=_grid, required=True)
    p.set_defaults(func=_run_bound)

    p = sub.add_parser("cn", parents=[common], help="constant sequence C_n")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--checkpoints", type=int, default=None)
    p.set_defaults(func=_run_cn)

    p = sub.add_parser("mahler", parents=[common], help="Mahler triple of a polynomial")
    _poly_flags(p)
    p.add_argument("--method", choices=("jensen", "quadrature", "both"), default="both")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-panels", type=int, default=2_000_000)
    p.set_defaults(func=_run_mahler)

    p = sub.add_parser("phin-growth", parents=[common], help="log M+(Phi_N) growth table")
    p.add_argument("--N-list", dest="N_list", type=_ints, default=[5, 10, 20, 40, 80])
    p.add_argument("--N", dest="N_list", type=lambda s: [int(s)], help="single N")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-panels", type=int, default=4_000_000)
    p.add_argument("--samples", type=int, default=1 << 22)
    p.add_argument("--cap", type=int, default=mahler.PHI_N_CAP)
    p.set_defaults(func=_run_phin)

    p = sub.add_parser("farey", parents=[common], help="Farey angles of order N")
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=_run_farey)

    p = sub.add_parser("examples", parents=[common], help="P_n / Q_n Mahler table")
    p.add_argument("--n-list", type=_ints, default=list(range(2, 13)))
    p.set_defaults(func=_run_examples)

    p = sub.add_parser("conj3", parents=[common], help="randomized M- chain probe")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--exponents", choices=("sparse", "dense"), default="sparse")
    p.add_argument("--real", action="store_true", help="real +-coefficients instead of complex")
    p.set_defaults(func=_run_conj3)

    p = sub.add_parser("best-constant", parents=[common], help="best-constant probe")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--u-grid", type=_grid, default=list(np.logspace(-3, 0.5, 15)))
    p.add_argument("--samples", type=int, default=1 << 16)
    p.set_defaults(func=_run_best)

    p = sub.add_parser("discrepancy", parents=[common], help="star discrepancy of angles")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--angles", type=_floats)
    g.add_argument("--farey", type=int)
    g.add_argument("--pn", type=int)
    g.add_argument("--qn", type=int)
    p.set_defaults(func=_run_disc)

    p = sub.add_parser("lemma2", parents=[common], help="interval-length property trials")
    p.add_argument("--trials", type=int, default=10_000)
    p.set_defaults(func=_run_lemma2)
    return parser


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def _config(args) -> dict:
    skip = {"func", "output", "format"}
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if isinstance(v, list):
            v = [_plain(x) for x in v]
        cfg[k] = _plain(v)
    cfg["format"] = args.format
    return cfg


def _plain(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, np.generic):
        return v.item()
    return v


def render(args, columns, rows, extra) -> str:
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    cfg = _config(args)
    if args.format == "json":
        doc = {"config": cfg, "result": extra,
               "data": [dict(zip(columns, [_plain(c) for c in r])) for r in rows],
               "timestamp": stamp}
        return json.dumps(doc, indent=1, default=_plain) + "\n"
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(cfg, sort_keys=True, default=_plain) + "\n")
    if extra:
        buf.write("# result: " + json.dumps(extra, sort_keys=True, default=_plain) + "\n")
    buf.write("# timestamp: " + stamp + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(c) for c in r])
    return buf.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    if args.threads is None:
        args.threads = default_threads()
    try:
        columns, rows, extra = args.func(args)
        text = render(args, columns, rows, extra)
    except (InvalidInputError, OSError, ValueError) as exc:
        print(f"sublevel {args.subcommand}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AccuracyError as exc:
        print(f"sublevel {args.subcommand}: accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except Exception as exc:  # noqa: BLE001
        print(f"sublevel {args.subcommand}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
