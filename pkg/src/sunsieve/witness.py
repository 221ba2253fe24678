"""Witness searches for decompositions n = x + y.

Every search walks y = 1, 2, ..., n-1 and returns the first hit, so records
are canonical. The two forms are

    value1 = x + n y        = n + (n-1) y
    value2 = x^2 + n y^2    = (n+1) y^2 - 2 n y + n^2
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

from .arithmetic import big_omega, factorize, is_prime

log = logging.getLogger(__name__)

TASKS = ("sun-prime", "almost-3", "almost-4", "combined-11")
CSV_COLUMNS = ("n", "kind", "y", "x", "value1", "omega1", "value2", "omega2")


@dataclass(frozen=True)
class WitnessRecord:
    n: int
    y: int | None
    x: int | None
    value1: int | None
    value2: int | None
    omega1: int | None
    omega2: int | None
    kind: str

    @property
    def found(self) -> bool:
        return self.y is not None

    @classmethod
    def failure(cls, n: int, kind: str) -> "WitnessRecord":
        return cls(n, None, None, None, None, None, None, kind)

    def to_json(self) -> dict:
        return asdict(self)


def value1(n: int, y: int) -> int:
    return n + (n - 1) * y


def value2(n: int, y: int) -> int:
    return (n + 1) * y * y - 2 * n * y + n * n


def _record(n: int, y: int, kind: str, omega1: int | None = None, omega2: int | None = None) -> WitnessRecord:
    v1, v2 = value1(n, y), value2(n, y)
    return WitnessRecord(
        n=n,
        y=y,
        x=n - y,
        value1=v1,
        value2=v2,
        omega1=big_omega(v1) if omega1 is None else omega1,
        omega2=big_omega(v2) if omega2 is None else omega2,
        kind=kind,
    )


def _omega_at_most(m: int, r: int) -> int | None:
    """Omega(m) if it is <= r, else None."""
    if r < 1:
        return None
    if is_prime(m):
        return 1
    k = factorize(m).big_omega
    return k if k <= r else None


def find_sun_witness(n: int) -> WitnessRecord | None:
    """Smallest y with x + ny and x^2 + ny^2 both prime."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    for y in range(1, n):
        if is_prime(value1(n, y)) and is_prime(value2(n, y)):
            return _record(n, y, "sun-prime", 1, 1)
    log.error("no sun-prime decomposition for n = %d", n)
    return None


def find_almost_prime_witness(n: int, variant: int, r: int) -> WitnessRecord | None:
    """Smallest y with Omega(F_n^variant(y)) <= r."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if variant not in (1, 2):
        raise ValueError(f"variant must be 1 or 2, got {variant}")
    form = value1 if variant == 1 else value2
    for y in range(1, n):
        k = _omega_at_most(form(n, y), r)
        if k is not None:
            if variant == 1:
                return _record(n, y, f"almost-{r}", omega1=k)
            return _record(n, y, f"almost-{r}", omega2=k)
    return None


def find_combined_witness(n: int, bound: int = 11) -> WitnessRecord | None:
    """Smallest y with Omega(value1) + Omega(value2) <= bound."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    for y in range(1, n):
        k1 = _omega_at_most(value1(n, y), bound - 1)
        if k1 is None:
            continue
        k2 = _omega_at_most(value2(n, y), bound - k1)
        if k2 is not None:
            return _record(n, y, f"combined-{bound}", k1, k2)
    return None


def run_task(task: str, n: int) -> WitnessRecord:
    """The witness for ``task`` at n, or an explicit failure record."""
    if task == "sun-prime":
        rec = find_sun_witness(n)
    elif task == "almost-3":
        rec = find_almost_prime_witness(n, 1, 3)
    elif task == "almost-4":
        rec = find_almost_prime_witness(n, 2, 4)
    elif task == "combined-11":
        rec = find_combined_witness(n, 11)
    else:
        raise ValueError(f"unknown task {task!r}; expected one of {TASKS}")
    return rec if rec is not None else WitnessRecord.failure(n, task)


def _cell(v) -> str:
    return "" if v is None else str(v)


def csv_header() -> str:
    return ",".join(CSV_COLUMNS) + "\n"


def csv_row(rec: WitnessRecord) -> str:
    return ",".join(_cell(getattr(rec, c)) for c in CSV_COLUMNS) + "\n"


def json_line(rec: WitnessRecord) -> str:
    return "  " + json.dumps(rec.to_json(), separators=(", ", ": "))


def render(records, fmt: str) -> str:
    if fmt == "csv":
        return csv_header() + "".join(csv_row(r) for r in records)
    if fmt == "json":
        lines = [json_line(r) for r in records]
        return "[\n" + ",\n".join(lines) + "\n]\n" if lines else "[]\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(records, fmt: str, path) -> None:
    path = Path(path)
    try:
        path.write_text(render(records, fmt), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report {path}: {exc}") from exc


def _int_or_none(s: str) -> int | None:
    return None if s == "" else int(s)


def load_report(path, fmt: str | None = None) -> list[WitnessRecord]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    fmt = fmt or ("json" if text.lstrip().startswith("[") else "csv")
    if fmt == "json":
        return [WitnessRecord(**obj) for obj in json.loads(text)]
    rows = csv.DictReader(io.StringIO(text))
    if tuple(rows.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected CSV header {rows.fieldnames}")
    return [
        WitnessRecord(
            n=int(row["n"]),
            kind=row["kind"],
            **{k: _int_or_none(row[k]) for k in ("y", "x", "value1", "value2", "omega1", "omega2")},
        )
        for row in rows
    ]


def audit_record(rec: WitnessRecord) -> list[str]:
    """Problems with one record; empty when it re-derives cleanly."""
    if not rec.found:
        return [f"n={rec.n}: no witness recorded for {rec.kind}"]
    n, y = rec.n, rec.y
    problems = []
    if not (0 < y < n and rec.x == n - y):
        problems.append(f"n={n}: bad decomposition x={rec.x}, y={y}")
        return problems
    if rec.value1 != value1(n, y) or rec.value2 != value2(n, y):
        problems.append(f"n={n}: values do not match y={y}")
    if rec.value2 != rec.x**2 + n * y * y:
        problems.append(f"n={n}: value2 != x^2 + n y^2")
    o1, o2 = big_omega(value1(n, y)), big_omega(value2(n, y))
    if (rec.omega1, rec.omega2) != (o1, o2):
        problems.append(f"n={n}: omegas {rec.omega1},{rec.omega2} != recomputed {o1},{o2}")
    kind = rec.kind
    ok = {
        "sun-prime": o1 == 1 and o2 == 1,
        "almost-3": o1 <= 3,
        "almost-4": o2 <= 4,
        "combined-11": o1 + o2 <= 11,
    }.get(kind, True)
    if not ok:
        problems.append(f"n={n}: record violates its kind {kind}")
    return problems


def audit_report(records) -> list[str]:
    return [p for rec in records for p in audit_record(rec)]
