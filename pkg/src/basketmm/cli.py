"""Command-line front end: ``basketmm run`` and ``basketmm greeks``."""
import argparse
import csv
import io
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .calibrate_lognormal import calibrate_lognormal
from .exceptions import BasketError
from .greeks import finite_difference_greeks, greeks_lognormal
from .metrics import GOOD_PRICE_THRESHOLD, CaseResult, c1_c2
from .montecarlo import McConfig, mc_price_strikes
from .moments import basket_moments_lognormal
from .pricing import price_basket
from .scenarios import LAW_NAMES, load_scenarios

RUN_COLUMNS = ["scenario", "law", "strike", "closed_price", "mc_mean", "mc_se", "abs_pct_err"]
GREEK_COLUMNS = ["scenario", "strike", "case", "dP_dmu", "dP_dsigma", "dP_deta", "dx_deta"]
FD_COLUMNS = ["fd_dmu", "fd_dsigma", "fd_deta", "fd_max_rel_err"]
OUT_DIR_ENV = "BASKETMM_OUT_DIR"
DEFAULT_PATHS = 1_000_000
DEFAULT_SEED = 42


class CommandError(Exception):
    pass


def _num(value, digits):
    if value is None:
        return ""
    return f"{value:.{digits}f}"


def _strike(k):
    text = f"{k:.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _render(columns, rows, fmt):
    if fmt == "markdown":
        lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text, args, stem):
    out = args.out
    if out is None and os.environ.get(OUT_DIR_ENV):
        ext = "md" if args.format == "markdown" else "csv"
        out = Path(os.environ[OUT_DIR_ENV]) / f"{stem}.{ext}"
    if out is None:
        sys.stdout.write(text)
        return
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def _select(scenarios, args):
    if args.scenario:
        known = {s.name for s in scenarios}
        missing = [n for n in args.scenario if n not in known]
        if missing:
            raise CommandError(f"no scenario named {', '.join(map(repr, missing))}")
        scenarios = [s for s in scenarios if s.name in args.scenario]
    if args.law:
        for s in scenarios:
            s.laws = list(args.law)
    return scenarios


def _run_unit(sc, law, args):
    """Price one (scenario, law) pair over all its strikes."""
    closed = mc = None
    try:
        if args.method in ("closed", "both"):
            closed = [price_basket(sc.spec.with_strike(k), law).price for k in sc.strikes]
        if args.method in ("mc", "both"):
            cfg = McConfig(
                paths=args.paths or sc.mc_paths or DEFAULT_PATHS,
                seed=args.seed if args.seed is not None else (sc.mc_seed if sc.mc_seed is not None else DEFAULT_SEED),
                streams=args.streams,
                antithetic=args.antithetic,
                workers=args.workers,
            )
            mc = mc_price_strikes(sc.spec, sc.strikes, cfg, law)
    except BasketError as exc:
        raise CommandError(f"[{sc.name} / {law}] {exc}") from exc
    return closed, mc


def cmd_run(args):
    scenarios = _select(load_scenarios(args.file), args)
    units = [(sc, law) for sc in scenarios for law in sc.laws]
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda u: _run_unit(u[0], u[1], args), units))
    else:
        results = [_run_unit(sc, law, args) for sc, law in units]

    rows, groups, report = [], {}, []
    for (sc, law), (closed, mc) in zip(units, results):
        for i, k in enumerate(sc.strikes):
            cp = closed[i] if closed else None
            mr = mc[i] if mc else None
            err = None
            if cp is not None and mr is not None:
                if mr.mean == 0:
                    raise CommandError(f"[{sc.name} / {law}] MC benchmark is zero at strike {_strike(k)}")
                case = CaseResult(cp, mr.mean, f"{sc.name}/{law}/{_strike(k)}")
                err = 100.0 * case.rel_error
                groups.setdefault((sc.group_key, law), []).append(case)
                report.append((case.label, err))
            rows.append([sc.name, law, _strike(k), _num(cp, 6),
                         _num(mr.mean if mr else None, 6), _num(mr.std_error if mr else None, 4), _num(err, 2)])
    for (group, law), cases in groups.items():
        c1, c2 = c1_c2(cases)
        rows.append([group, law, "C1", "", "", "", _num(c1, 2)])
        rows.append([group, law, "C2", "", "", "", _num(c2, 2)])

    _emit(_render(RUN_COLUMNS, rows, args.format), args, f"{Path(str(args.file)).stem}_{args.method}")
    if args.tolerance_report:
        _tolerance_report(report, groups)
    return 0


def _tolerance_report(report, groups):
    limit = 100.0 * GOOD_PRICE_THRESHOLD
    err = sys.stderr
    if not report:
        print("tolerance report: nothing to compare (needs --method both)", file=err)
        return
    for label, pct in report:
        print(f"{'PASS' if pct < limit else 'FAIL'} {label}: {pct:.2f}% (limit {limit:.0f}%)", file=err)
    bad = sum(pct >= limit for _, pct in report)
    print(f"{len(report) - bad}/{len(report)} cases within {limit:.0f}% across {len(groups)} groups", file=err)


def cmd_greeks(args):
    scenarios = _select(load_scenarios(args.file), args)
    for sc in scenarios:
        other = [law for law in sc.laws if law != "lognormal"]
        if other:
            raise CommandError(
                f"greeks are available for the log-normal model only; scenario {sc.name!r} uses "
                f"{', '.join(other)} (pass --law lognormal to override)")
    columns = GREEK_COLUMNS + (FD_COLUMNS if args.fd_check else [])
    rows = []
    for sc in scenarios:
        spec = sc.spec
        r, T = spec.rate, spec.horizon
        try:
            ms = basket_moments_lognormal(spec)
            p = calibrate_lognormal(ms)
            for k in sc.strikes:
                g = greeks_lognormal(p, ms, k, r, T)
                row = [sc.name, _strike(k), g.case] + [_num(v, 8) for v in (g.dP_dmu, g.dP_dsigma, g.dP_deta, g.dx_deta)]
                if args.fd_check:
                    fd = finite_difference_greeks(ms, k, r, T)
                    analytic = (g.dP_dmu, g.dP_dsigma, g.dP_deta)
                    rel = max(abs(a - f) / max(abs(a), abs(f), 1e-6) for a, f in zip(analytic, fd))
                    row += [_num(v, 8) for v in fd] + [f"{rel:.2e}"]
                rows.append(row)
        except BasketError as exc:
            raise CommandError(f"[{sc.name} / lognormal] {exc}") from exc
    _emit(_render(columns, rows, args.format), args, f"{Path(str(args.file)).stem}_greeks")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="basketmm", description="Basket call pricing by moment matching.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="scenario YAML file, or 'table2' for the bundled scenarios")
        p.add_argument("--format", choices=("csv", "markdown"), default="csv")
        p.add_argument("--out", help=f"output path (default: stdout, or ${OUT_DIR_ENV}/<name>)")
        p.add_argument("--scenario", action="append", help="only run the named scenario (repeatable)")
        p.add_argument("--law", action="append", choices=LAW_NAMES, help="override the scenario laws (repeatable)")

    run = sub.add_parser("run", help="closed-form and/or Monte Carlo prices with C1/C2 footers")
    common(run)
    run.add_argument("--method", choices=("closed", "mc", "both"), default="both")
    run.add_argument("--paths", type=int, help=f"MC paths (default: file value or {DEFAULT_PATHS})")
    run.add_argument("--seed", type=int, help=f"MC seed (default: file value or {DEFAULT_SEED})")
    run.add_argument("--streams", type=int, default=1, help="independent RNG streams per MC run")
    run.add_argument("--workers", type=int, default=1, help="threads per MC run (results do not depend on it)")
    run.add_argument("--antithetic", action="store_true")
    run.add_argument("--jobs", type=int, default=1, help="(scenario, law) pairs priced concurrently")
    run.add_argument("--tolerance-report", action="store_true", help="per-case pass/fail vs 2%% on stderr")
    run.set_defaults(func=cmd_run)

    gr = sub.add_parser("greeks", help="analytic Greeks of the log-normal approximation")
    common(gr)
    gr.add_argument("--fd-check", action="store_true", help="add finite-difference columns")
    gr.set_defaults(func=cmd_greeks)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CommandError, BasketError, OSError) as exc:
        print(f"basketmm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
