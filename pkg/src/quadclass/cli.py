"""Command line interface: classgroup, verify, scan, wada-fixtures, factor.

Exit codes: 0 ok, 2 domain error, 3 scale limit or certification failure,
4 an inconsistency between computation and the theorem being checked.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

from . import __version__
from .errors import CertificationFailure, DomainError, ScaleLimit
from .family import build_field_spec, view_disc
from .intcore import factor, is_prime, primes_up_to
from .records import (
    EXEMPT,
    FIELD_COUNTEREXAMPLE,
    INCONSISTENT,
    INCONSISTENT_STATUSES,
    NO_DIVISIBILITY,
    SKIPPED,
    VERIFIED,
    RunConfig,
    append_atomically,
    classgroup_record,
    encode,
    error_kind,
    file_has_content,
    header_record,
    sort_key,
    verify_record,
)
from .wada import COUNTEREXAMPLE, load_fixtures, table2_report

EXIT_OK, EXIT_DOMAIN, EXIT_SCALE, EXIT_INCONSISTENT = 0, 2, 3, 4


def _int(text: str) -> int:
    """Integer argument; accepts 1e9 style and underscores."""
    try:
        if "e" in text.lower():
            return int(float(text))
        return int(text.replace("_", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _int_set(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(_int(lo), _int(hi) + 1))
        else:
            out.append(_int(part))
    return sorted(set(out))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--enum-bound", type=_int, help="largest |disc| for reduced-form enumeration (env QUADCLASS_ENUM_BOUND)")
    common.add_argument("--bsgs-bound", type=_int, help="Euler product truncation for the BSGS class number interval")
    common.add_argument("--jobs", type=_int, default=1, help="worker processes for sweeps")
    common.add_argument("--format", choices=("jsonl", "csv", "table"), default="jsonl")
    common.add_argument("--out", metavar="PATH", help="append output to PATH instead of stdout")

    ap = argparse.ArgumentParser(prog="quadclass", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"quadclass {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    cg = sub.add_parser("classgroup", parents=[common], help="class group structure of one discriminant")
    cg.add_argument("--disc", type=_int)
    cg.add_argument("--p", type=_int)
    cg.add_argument("--q", type=_int)
    cg.add_argument("--n", type=_int)
    cg.add_argument(
        "--view",
        choices=("field", "order"),
        default="field",
        help="with --p/--q/--n: field discriminant -4D or order discriminant 4(p^2-2q^n)",
    )
    cg.add_argument("--method", choices=("auto", "enumerate", "bsgs"), default="auto")

    v = sub.add_parser("verify", parents=[common], help="check the order-n class for one (p, q, n)")
    v.add_argument("--p", type=_int, required=True)
    v.add_argument("--q", type=_int, required=True)
    v.add_argument("--n", type=_int, required=True)

    sc = sub.add_parser("scan", parents=[common], help="verify every (p, q, n) in a range")
    sc.add_argument("--p-max", type=_int, required=True)
    sc.add_argument("--q-max", type=_int, required=True)
    sc.add_argument("--n-set", type=_int_set, required=True, help="e.g. 3,5,7 or 3-9")
    sc.add_argument("--disc-max", type=_int, help="drop tuples whose field |disc| exceeds this")
    sc.add_argument("--figure", metavar="PATH", help="also write an h vs |disc| plot")

    wf = sub.add_parser("wada-fixtures", parents=[common], help="classify tabulated class group structures")
    wf.add_argument("--fixtures", metavar="PATH", help="JSON-lines fixture file (default: bundled table)")
    wf.add_argument(
        "--verify-max",
        type=_int,
        default=0,
        help="recompute structures whose |disc| is at most this and compare",
    )
    wf.add_argument("--figure", metavar="PATH", help="also write an odd-heavy count bar chart")

    fa = sub.add_parser("factor", parents=[common], help="factor an integer")
    fa.add_argument("value", type=_int)
    return ap


def _config(args) -> RunConfig:
    return RunConfig.from_env(
        enumeration_bound=args.enum_bound,
        bsgs_truncation=args.bsgs_bound,
        parallelism=args.jobs,
        output_format=args.format,
        output_path=args.out,
    )


def _emit(cfg: RunConfig, command: str, records: list[dict], summary: dict | None = None, **extra) -> None:
    fmt = cfg.output_format
    view = records
    if fmt == "table":
        view = [{k: v for k, v in r.items() if k not in ("oracle", "generators")} for r in records]
    first = cfg.output_path is None or not file_has_content(cfg.output_path)
    text = encode(
        view,
        fmt,
        header=header_record(command, cfg, **extra) if fmt == "jsonl" else None,
        summary=summary,
        column_header=first or fmt == "table",
    )
    if cfg.output_path:
        append_atomically(cfg.output_path, text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _error_record(command: str, exc: Exception, **context) -> dict:
    return {"command": command, **context, "error": f"{type(exc).__name__}: {exc}"}


def cmd_classgroup(args, cfg: RunConfig) -> int:
    if args.disc is not None:
        if any(x is not None for x in (args.p, args.q, args.n)):
            raise DomainError("give either --disc or --p/--q/--n, not both")
        disc, label = args.disc, None
    else:
        if any(x is None for x in (args.p, args.q, args.n)):
            raise DomainError("give --disc or all of --p, --q, --n")
        spec = build_field_spec(args.p, args.q, args.n)
        disc, label = view_disc(spec, args.view), spec.label
    rec = classgroup_record(disc, cfg, method=args.method, label=label)
    _emit(cfg, "classgroup", [rec])
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    rec = verify_record(args.p, args.q, args.n, cfg)
    _emit(cfg, "verify", [rec])
    return _record_exit([rec])


def _record_exit(records: list[dict]) -> int:
    if any(r.get("status") in INCONSISTENT_STATUSES for r in records):
        return EXIT_INCONSISTENT
    if len(records) == 1 and records[0].get("status") == SKIPPED:
        kind = error_kind(records[0].get("error"))
        return EXIT_SCALE if kind in ("ScaleLimit", "CertificationFailure") else EXIT_DOMAIN
    return EXIT_OK


def scan_tuples(p_max: int, q_max: int, n_set, disc_max: int | None = None) -> list[tuple[int, int, int]]:
    """Distinct odd primes p <= p_max, q <= q_max, n in n_set, with p^2 < 2 q^n."""
    for n in n_set:
        if n < 3 or n % 2 == 0:
            raise DomainError(f"n={n} must be an odd integer >= 3")
    ps = [int(x) for x in primes_up_to(max(p_max, 2)) if x > 2 and x <= p_max]
    qs = [int(x) for x in primes_up_to(max(q_max, 2)) if x > 2 and x <= q_max]
    out = []
    for p in ps:
        for q in qs:
            for n in n_set:
                if p == q or p * p >= 2 * q**n:
                    continue
                if disc_max is not None and abs(build_field_spec(p, q, n).delta.value) > disc_max:
                    continue
                out.append((p, q, n))
    return out


def run_scan(tuples, cfg: RunConfig) -> list[dict]:
    work = partial(_verify_tuple, cfg=cfg)
    if cfg.parallelism > 1 and len(tuples) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            records = list(pool.map(work, tuples, chunksize=4))
    else:
        records = [work(t) for t in tuples]
    return sorted(records, key=sort_key)


def _verify_tuple(t, cfg: RunConfig) -> dict:
    return verify_record(*t, cfg)


def scan_summary(records: list[dict]) -> dict:
    statuses = (VERIFIED, EXEMPT, NO_DIVISIBILITY, FIELD_COUNTEREXAMPLE, INCONSISTENT, SKIPPED)
    summary = {"records": len(records)}
    for s in statuses:
        summary[s] = sum(1 for r in records if r["status"] == s)
    return summary


def cmd_scan(args, cfg: RunConfig) -> int:
    tuples = scan_tuples(args.p_max, args.q_max, args.n_set, args.disc_max)
    records = run_scan(tuples, cfg)
    _emit(cfg, "scan", records, scan_summary(records))
    if args.figure:
        from .plots import scan_figure

        scan_figure(records, args.figure)
    return EXIT_INCONSISTENT if any(r["status"] in INCONSISTENT_STATUSES for r in records) else EXIT_OK


def fixture_records(fixtures, cfg: RunConfig, verify_max: int = 0) -> list[dict]:
    out = []
    for fx in fixtures:
        row = table2_report(fx.structure, expr=fx.expr)
        rec = {"row": fx.row, "expr": fx.expr, "p": fx.p, "q": fx.q, "n": fx.n, "disc": fx.disc}
        rec.update({k: v for k, v in row.as_dict().items() if k not in ("expr", "source")})
        rec.update(mark=fx.mark or None, mismatches=list(fx.mismatches), computed=None, agrees=None, error=None)
        if abs(fx.disc) <= verify_max:
            try:
                got = classgroup_record(fx.disc, cfg)["structure"]
                rec.update(computed=got, agrees=got == list(fx.structure))
            except (ScaleLimit, CertificationFailure, DomainError) as exc:
                rec["error"] = f"{type(exc).__name__}: {exc}"
        out.append(rec)
    return out


def cmd_wada_fixtures(args, cfg: RunConfig) -> int:
    records = fixture_records(load_fixtures(args.fixtures), cfg, args.verify_max)
    summary = {
        "rows": len(records),
        "counterexamples": [r["row"] for r in records if r["wada"] == COUNTEREXAMPLE],
        "column_mismatches": sum(1 for r in records if r["mismatches"]),
        "recomputed": sum(1 for r in records if r["computed"] is not None),
        "disagreements": sum(1 for r in records if r["agrees"] is False),
    }
    _emit(cfg, "wada-fixtures", records, summary)
    if args.figure:
        from .plots import fixtures_figure

        fixtures_figure(records, args.figure)
    return EXIT_INCONSISTENT if summary["disagreements"] else EXIT_OK


def cmd_factor(args, cfg: RunConfig) -> int:
    if args.value < 1:
        raise DomainError("factor expects a positive integer")
    f = factor(args.value)
    rec = {"value": args.value, "factors": [list(pe) for pe in f.factors], "prime": is_prime(args.value), "text": str(f)}
    _emit(cfg, "factor", [rec])
    return EXIT_OK


COMMANDS = {
    "classgroup": cmd_classgroup,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "wada-fixtures": cmd_wada_fixtures,
    "factor": cmd_factor,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    context = {k: getattr(args, k) for k in ("disc", "p", "q", "n") if getattr(args, k, None) is not None}
    try:
        cfg = _config(args)
    except DomainError as exc:
        sys.stdout.write(encode([_error_record(args.command, exc, **context)], "jsonl"))
        return EXIT_DOMAIN
    try:
        return COMMANDS[args.command](args, cfg)
    except DomainError as exc:
        _emit(cfg, args.command, [_error_record(args.command, exc, **context)])
        return EXIT_DOMAIN
    except (ScaleLimit, CertificationFailure) as exc:
        _emit(cfg, args.command, [_error_record(args.command, exc, **context)])
        return EXIT_SCALE


if __name__ == "__main__":
    sys.exit(main())
