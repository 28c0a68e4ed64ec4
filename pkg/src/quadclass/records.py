"""Result records for the CLI and their JSON-lines / CSV / table encodings."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .classgroup import DEFAULT_ENUM_BOUND, DEFAULT_TRUNCATION, enum_bound_from_env, group_structure, sylow_parts, two_rank
from .errors import DomainError, QuadclassError
from .family import build_field_spec, check_hypotheses, oracle_all_primes, verify_order_n
from .qform import Discriminant
from .wada import classify, remaining_parts

FORMATS = ("jsonl", "csv", "table")

# Field names of a verification record, in output order.  The first block
# is the stable public interface; the rest are additional diagnostics.
RECORD_FIELDS = (
    "p", "q", "n", "d", "s", "D", "disc",
    "hyp_size", "hyp_nonsquare", "hyp_cube",
    "h", "structure", "order_A", "matches", "divides", "wada", "error",
    "status", "ramified", "two_rank",
    "order_disc", "h_order", "structure_order", "order_A_order", "matches_order", "divides_order",
    "oracle_candidates", "oracle",
)  # fmt: skip

STRING_FIELDS = {"wada", "error", "status", "expr", "method", "label", "command", "mark", "text"}

# Record statuses.  "field-counterexample" means Theorem-style hypotheses hold
# but the field class group has no element of order n, while the order
# Z[sqrt(d)] still does.
VERIFIED = "verified"
EXEMPT = "exempt"
NO_DIVISIBILITY = "no-divisibility"
FIELD_COUNTEREXAMPLE = "field-counterexample"
INCONSISTENT = "inconsistent"
SKIPPED = "skipped"
INCONSISTENT_STATUSES = {FIELD_COUNTEREXAMPLE, INCONSISTENT}


@dataclass(frozen=True)
class RunConfig:
    enumeration_bound: int = DEFAULT_ENUM_BOUND
    bsgs_truncation: int = DEFAULT_TRUNCATION
    parallelism: int = 1
    output_format: str = "jsonl"
    output_path: str | None = None

    def __post_init__(self):
        if self.enumeration_bound <= 0 or self.bsgs_truncation <= 0 or self.parallelism <= 0:
            raise DomainError("bounds and parallelism must be positive")
        if self.output_format not in FORMATS:
            raise DomainError(f"unknown format {self.output_format!r}; choose from {FORMATS}")

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        overrides = {k: v for k, v in overrides.items() if v is not None}
        overrides.setdefault("enumeration_bound", enum_bound_from_env())
        return cls(**overrides)

    def public(self) -> dict:
        """Settings that can change results; parallelism and paths cannot."""
        d = asdict(self)
        d.pop("output_path")
        d.pop("parallelism")
        return d


def _error_text(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def error_kind(text: str | None) -> str | None:
    return text.split(":", 1)[0] if text else None


def _structure_kw(cfg: RunConfig) -> dict:
    return {"enum_bound": cfg.enumeration_bound, "truncation": cfg.bsgs_truncation}


def verify_record(p: int, q: int, n: int, cfg: RunConfig | None = None) -> dict:
    """Everything known about (p, q, n): hypotheses, class groups of the
    field and of Z[sqrt(d)], the order of the class of P*Q in each, and the
    ell-th power obstruction search."""
    cfg = cfg or RunConfig()
    rec = dict.fromkeys(RECORD_FIELDS)
    rec.update(p=p, q=q, n=n)
    try:
        hyp = check_hypotheses(p, q, n)
        rec.update(hyp_size=hyp.size_ok, hyp_nonsquare=hyp.nonsquare_ok, hyp_cube=hyp.cube_ok)
        spec = build_field_spec(p, q, n)
        rec.update(d=spec.d, s=spec.s, D=spec.D, disc=spec.delta.value, order_disc=spec.order_disc)

        g = group_structure(spec.delta, **_structure_kw(cfg))
        field = verify_order_n(spec, h=g.h, require_hypotheses=False)
        genus = two_rank(spec.delta)
        rec.update(
            h=g.h,
            structure=list(g.invariant_factors),
            order_A=field.order,
            matches=field.matches,
            divides=g.h % n == 0,
            wada=classify(g).kind,
            ramified=genus.ramified_prime_count,
            two_rank=genus.two_rank,
        )

        go = g if spec.s == 1 else group_structure(spec.order_disc, **_structure_kw(cfg))
        order = verify_order_n(spec, h=go.h, require_hypotheses=False, view="order")
        rec.update(
            h_order=go.h,
            structure_order=list(go.invariant_factors),
            order_A_order=order.order,
            matches_order=order.matches,
            divides_order=go.h % n == 0,
        )

        oracle = []
        for rep in oracle_all_primes(spec):
            oracle.append(
                {
                    "ell": rep.ell,
                    "kind": rep.kind,
                    "norm_solutions": [list(uv) for uv in rep.norm_solutions],
                    "candidates": [[c.u, c.v] for c in rep.candidates],
                }
            )
        rec["oracle"] = oracle
        rec["oracle_candidates"] = sum(len(o["candidates"]) for o in oracle)
        rec["status"] = _status(hyp.all_ok, rec)
    except (QuadclassError, ArithmeticError) as exc:
        rec["error"] = _error_text(exc)
        rec["status"] = SKIPPED
    return rec


def _status(hyp_ok: bool, rec: dict) -> str:
    if hyp_ok:
        if rec["matches"] and rec["divides"] and rec["oracle_candidates"] == 0:
            return VERIFIED
        if rec["matches_order"] and rec["divides_order"]:
            return FIELD_COUNTEREXAMPLE
        return INCONSISTENT
    if rec["divides"] or rec["divides_order"]:
        return EXEMPT
    return NO_DIVISIBILITY


def sort_key(rec: dict):
    disc = rec.get("disc")
    return (abs(disc) if disc is not None else float("inf"), rec["p"], rec["q"], rec["n"])


def classgroup_record(disc: int, cfg: RunConfig | None = None, *, method: str = "auto", label: str | None = None) -> dict:
    cfg = cfg or RunConfig()
    D = Discriminant.of(disc)
    g = group_structure(D, method=method, **_structure_kw(cfg))
    verdict = classify(g)
    rec = {
        "label": label,
        "disc": D.value,
        "fundamental": D.fundamental,
        "conductor": D.conductor,
        "h": g.h,
        "structure": list(g.invariant_factors),
        "generators": [list(f.tuple()) for f in g.generators],
        "ramified": None,
        "two_rank": None,
        "two_parts": list(sylow_parts(g, 2)),
        "three_parts": list(sylow_parts(g, 3)),
        "five_parts": list(sylow_parts(g, 5)),
        "remaining": list(remaining_parts(g.invariant_factors)),
        "wada": verdict.kind,
        "odd_heavy": verdict.odd_heavy_count,
    }
    if D.fundamental:
        genus = two_rank(D)
        rec["ramified"] = genus.ramified_prime_count
        rec["two_rank"] = genus.two_rank
    return rec


# -- encodings -------------------------------------------------------------


def header_record(command: str, cfg: RunConfig, **extra) -> dict:
    return {"header": {"tool": "quadclass", "version": __version__, "command": command, "config": cfg.public(), **extra}}


def _cell(key: str, value) -> str:
    if value is None:
        return ""
    if key in STRING_FIELDS:
        return str(value)
    return json.dumps(value, separators=(",", ":"))


def _uncell(key: str, text: str):
    if text == "":
        return None
    if key in STRING_FIELDS:
        return text
    return json.loads(text)


def encode(records: list[dict], fmt: str, *, header: dict | None = None, summary: dict | None = None, column_header: bool = True) -> str:
    if fmt == "jsonl":
        lines = []
        if header is not None:
            lines.append(json.dumps(header))
        lines += [json.dumps(r) for r in records]
        if summary is not None:
            lines.append(json.dumps({"summary": summary}))
        return "".join(line + "\n" for line in lines)
    keys = list(records[0]) if records else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if column_header and keys:
            w.writerow(keys)
        for r in records:
            w.writerow([_cell(k, r.get(k)) for k in keys])
        return buf.getvalue()
    if fmt == "table":
        rows = [[_cell(k, r.get(k)) for k in keys] for r in records]
        widths = [max([len(k)] + [len(row[i]) for row in rows]) for i, k in enumerate(keys)]
        out = []
        if keys:
            out.append("  ".join(k.ljust(w) for k, w in zip(keys, widths)).rstrip())
            out.append("  ".join("-" * w for w in widths))
        out += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
        if summary is not None:
            out.append("")
            out.append("summary: " + ", ".join(f"{k}={v}" for k, v in summary.items()))
        return "".join(line + "\n" for line in out)
    raise DomainError(f"unknown format {fmt!r}")


def decode(text: str, fmt: str) -> list[dict]:
    """Inverse of ``encode`` for jsonl and csv (result records only)."""
    if fmt == "jsonl":
        recs = [json.loads(line) for line in text.splitlines() if line.strip()]
        return [r for r in recs if "header" not in r and "summary" not in r]
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            return []
        keys = rows[0]
        return [{k: _uncell(k, v) for k, v in zip(keys, row)} for row in rows[1:] if row != keys]
    raise DomainError(f"cannot decode format {fmt!r}")


def append_atomically(path: str | os.PathLike, text: str) -> None:
    """Append ``text`` with a single write on an O_APPEND descriptor, then fsync."""
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    fd = os.open(p, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
    try:
        data = text.encode()
        written = 0
        while written < len(data):
            written += os.write(fd, data[written:])
        os.fsync(fd)
    finally:
        os.close(fd)


def file_has_content(path) -> bool:
    try:
        return Path(path).stat().st_size > 0
    except FileNotFoundError:
        return False

