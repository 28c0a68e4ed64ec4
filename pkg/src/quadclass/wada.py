"""Classification of class group structures against Wada's conjecture.

The conjecture allows a class group to be cyclic or of type
``(h1, h2, 2^r1, ..., 2^rk)``.  With invariant factors in a divisibility
chain that means at most two factors may carry an odd part.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .classgroup import ClassGroupStructure, group_structure, sylow_parts
from .errors import DomainError, QuadclassError, ScaleLimit
from .intcore import factor

CYCLIC = "Cyclic"
CONFORMING = "ConformingType"
COUNTEREXAMPLE = "Counterexample"

FIXTURE_FIELDS = ("structure", "two_parts", "three_parts", "five_parts", "remaining")


@dataclass(frozen=True)
class WadaVerdict:
    kind: str
    odd_heavy_count: int


def _odd_part(x: int) -> int:
    while x % 2 == 0:
        x //= 2
    return x


def normalize_chain(factors) -> tuple[int, ...]:
    chain = tuple(int(x) for x in factors if int(x) != 1)
    if any(x < 1 for x in chain):
        raise DomainError(f"invariant factors must be positive: {list(factors)}")
    for big, small in zip(chain, chain[1:]):
        if big % small:
            raise DomainError(f"{list(chain)} is not a descending divisibility chain")
    return chain


def classify(factors) -> WadaVerdict:
    if isinstance(factors, ClassGroupStructure):
        factors = factors.invariant_factors
    chain = normalize_chain(factors)
    heavy = sum(1 for x in chain if _odd_part(x) > 1)
    if len(chain) <= 1:
        return WadaVerdict(CYCLIC, heavy)
    if heavy <= 2:
        # In a chain the odd-carrying factors form a prefix, so the tail is 2-power.
        assert all(_odd_part(x) == 1 for x in chain[2:])
        return WadaVerdict(CONFORMING, heavy)
    return WadaVerdict(COUNTEREXAMPLE, heavy)


def remaining_parts(factors) -> tuple[int, ...]:
    """Prime-power parts of the factors for primes other than 2, 3, 5, ascending."""
    parts = []
    for x in normalize_chain(factors):
        for ell, e in factor(x).factors:
            if ell > 5:
                parts.append(ell**e)
    return tuple(sorted(parts))


@dataclass(frozen=True)
class Table2Row:
    expr: str
    structure: tuple[int, ...]
    two_parts: tuple[int, ...]
    three_parts: tuple[int, ...]
    five_parts: tuple[int, ...]
    remaining: tuple[int, ...]
    verdict: WadaVerdict
    source: str = "computed"

    def as_dict(self) -> dict:
        return {
            "expr": self.expr,
            "structure": list(self.structure),
            "two_parts": list(self.two_parts),
            "three_parts": list(self.three_parts),
            "five_parts": list(self.five_parts),
            "remaining": list(self.remaining),
            "wada": self.verdict.kind,
            "odd_heavy": self.verdict.odd_heavy_count,
            "source": self.source,
        }


def table2_report(source, *, expr: str | None = None, compute: bool = True, **kw) -> Table2Row:
    """One Table 2 style row.

    ``source`` is a ClassGroupStructure, a plain invariant-factor list, or a
    FieldSpec-like object with ``order_disc``; the latter is computed unless
    ``compute`` is False, in which case ScaleLimit is raised.
    """
    origin = "supplied"
    if hasattr(source, "order_disc"):
        if not compute:
            raise ScaleLimit(f"{source.label} needs a fixture or compute=True")
        expr = expr or source.label
        source = group_structure(source.order_disc, **kw)
        origin = "computed"
    if isinstance(source, ClassGroupStructure):
        expr = expr or str(source.discriminant)
        factors = source.invariant_factors
        origin = "computed"
    else:
        factors = source
    chain = normalize_chain(factors)
    return Table2Row(
        expr=expr or "",
        structure=chain,
        two_parts=sylow_parts(chain, 2),
        three_parts=sylow_parts(chain, 3),
        five_parts=sylow_parts(chain, 5),
        remaining=remaining_parts(chain),
        verdict=classify(chain),
        source=origin,
    )


@dataclass(frozen=True)
class Fixture:
    row: int
    expr: str
    p: int
    q: int
    n: int
    structure: tuple[int, ...]
    two_parts: tuple[int, ...]
    three_parts: tuple[int, ...]
    five_parts: tuple[int, ...]
    remaining: tuple[int, ...]
    mark: str = ""
    source: str = "published"
    mismatches: tuple[str, ...] = field(default=(), compare=False)

    @property
    def disc(self) -> int:
        """Discriminant 4(p^2 - 2 q^n) the tabulated structure belongs to."""
        return 4 * (self.p**2 - 2 * self.q**self.n)


def default_fixture_path():
    return resources.files("quadclass").joinpath("data/table2.jsonl")


def load_fixtures(path=None) -> list[Fixture]:
    """Read Table 2 fixture records and check the printed columns.

    Each record's structure must be a divisibility chain (DomainError
    otherwise).  Printed Sylow columns that disagree with the ones derived
    from the structure are listed in ``Fixture.mismatches`` rather than
    rejected.
    """
    src = Path(path) if path is not None else default_fixture_path()
    out = []
    for lineno, line in enumerate(src.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rec = json.loads(line)
            p, q, n = int(rec["p"]), int(rec["q"]), int(rec["n"])
            cols = {k: tuple(int(x) for x in rec.get(k, [])) for k in FIXTURE_FIELDS}
        except (ValueError, KeyError, TypeError) as exc:
            raise DomainError(f"{src}:{lineno}: malformed fixture record ({exc})") from None
        try:
            derived = table2_report(cols["structure"])
        except QuadclassError as exc:
            raise DomainError(f"{src}:{lineno}: {exc}") from None
        mismatches = tuple(
            f"{k}: printed {list(cols[k])}, derived {list(getattr(derived, k))}"
            for k in FIXTURE_FIELDS[1:]
            if tuple(sorted(cols[k])) != getattr(derived, k)
        )
        out.append(
            Fixture(
                row=int(rec.get("row", len(out) + 1)),
                expr=rec.get("expr", f"{p}^2-2*{q}^{n}"),
                p=p,
                q=q,
                n=n,
                mark=rec.get("mark", ""),
                source=rec.get("source", "published"),
                mismatches=mismatches,
                **cols,
            )
        )
    return out


@dataclass
class ScanResult:
    counterexamples: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    examined: int = 0


def scan_counterexamples(items, *, classify_only: bool = False, **kw) -> ScanResult:
    """Classify every item and keep the counterexamples.

    Items are FieldSpecs (structure computed for the field discriminant),
    Fixtures (the printed vector is classified; nothing is computed), or
    (label, factors) pairs.  Items hitting ScaleLimit or CertificationFailure
    are collected in ``skipped`` with the error text.
    """
    result = ScanResult()
    keyed = []
    for item in items:
        result.examined += 1
        try:
            if isinstance(item, Fixture):
                verdict = classify(item.structure)
                key = (abs(item.disc), item.p, item.q, item.n)
            elif hasattr(item, "delta"):
                if classify_only:
                    raise ScaleLimit("structure not supplied")
                g = group_structure(item.delta, **kw)
                verdict = classify(g)
                key = (abs(item.delta.value), item.p, item.q, item.n)
            else:
                label, factors = item
                verdict = classify(factors)
                key = (0, 0, 0, 0, str(label))
        except (ScaleLimit, QuadclassError) as exc:
            result.skipped.append((item, f"{type(exc).__name__}: {exc}"))
            continue
        if verdict.kind == COUNTEREXAMPLE:
            keyed.append((key, item, verdict))
    keyed.sort(key=lambda t: t[0])
    result.counterexamples = [(item, verdict) for _, item, verdict in keyed]
    return result
