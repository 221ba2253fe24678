"""Range scans over n with block-ordered output and checkpoint/resume.

Blocks of BLOCK_SIZE consecutive n are computed independently (possibly in
worker processes) and written strictly in ascending order by the calling
process, the only writer. After each block the report is flushed and the
checkpoint is replaced atomically, so a killed scan resumes by truncating
the report to the recorded offset and continuing with the next block.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .witness import TASKS, WitnessRecord, csv_header, csv_row, json_line, run_task

log = logging.getLogger(__name__)

BLOCK_SIZE = 1024
WORKERS_ENV = "SUNSIEVE_WORKERS"


class CheckpointError(RuntimeError):
    """Checkpoint missing fields or describing a different scan."""


@dataclass
class ScanCheckpoint:
    task: str
    start: int
    stop: int
    fmt: str
    last_completed: int
    offset: int
    failures: list[int] = field(default_factory=list)
    witnesses: int = 0
    y_sum: int = 0
    y_min: int | None = None
    y_max: int | None = None

    @property
    def complete(self) -> bool:
        return self.last_completed >= self.stop - 1

    def add(self, rec: WitnessRecord) -> None:
        if rec.found:
            self.witnesses += 1
            self.y_sum += rec.y
            self.y_min = rec.y if self.y_min is None else min(self.y_min, rec.y)
            self.y_max = rec.y if self.y_max is None else max(self.y_max, rec.y)
        else:
            self.failures.append(rec.n)

    def summary(self) -> dict:
        return {
            "task": self.task,
            "from": self.start,
            "to": self.stop - 1,
            "complete": self.complete,
            "last_completed": self.last_completed,
            "records": self.last_completed - self.start + 1,
            "witnesses": self.witnesses,
            "failure_count": len(self.failures),
            "failures": list(self.failures),
            "largest_failure": max(self.failures) if self.failures else None,
            "min_y": self.y_min,
            "max_y": self.y_max,
            "mean_y": self.y_sum / self.witnesses if self.witnesses else None,
        }

    def save(self, path: Path) -> None:
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: Path) -> "ScanCheckpoint":
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            return cls(**data)
        except (ValueError, TypeError) as exc:
            raise CheckpointError(f"malformed checkpoint {path}: {exc}") from exc


def default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


def _run_block(task: str, lo: int, hi: int) -> list[WitnessRecord]:
    return [run_task(task, n) for n in range(lo, hi)]


def _blocks(lo: int, stop: int):
    while lo < stop:
        hi = min(lo + BLOCK_SIZE, stop)
        yield lo, hi
        lo = hi


def _block_text(records, fmt: str, first: bool) -> str:
    if fmt == "csv":
        return "".join(csv_row(r) for r in records)
    body = ",\n".join(json_line(r) for r in records)
    return body if first else ",\n" + body


def scan_range(
    task: str,
    start: int,
    stop: int,
    workers: int | None = None,
    out: str | os.PathLike | None = None,
    checkpoint: str | os.PathLike | None = None,
    fmt: str = "csv",
    max_blocks: int | None = None,
) -> dict:
    """Scan n in [start, stop) and write one record per n to ``out``.

    ``max_blocks`` stops early after that many new blocks (the checkpoint
    then describes a partial scan, exactly as after a crash). Returns the
    summary dict.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}; expected one of {TASKS}")
    if not 2 <= start < stop:
        raise ValueError(f"need 2 <= from < to, got {start}, {stop}")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    workers = default_workers() if workers is None else workers
    out_path = Path(out) if out is not None else None
    ck_path = Path(checkpoint) if checkpoint is not None else None

    state = None
    if ck_path is not None and ck_path.exists():
        state = ScanCheckpoint.load(ck_path)
        if (state.task, state.start, state.stop, state.fmt) != (task, start, stop, fmt):
            raise CheckpointError(
                f"checkpoint {ck_path} is for {state.task} [{state.start}, {state.stop}) {state.fmt}; "
                f"refusing to reuse it for {task} [{start}, {stop}) {fmt}"
            )
        if out_path is None or not out_path.exists() or out_path.stat().st_size < state.offset:
            raise CheckpointError(f"report {out_path} is missing or shorter than checkpoint offset")
    if state is None:
        state = ScanCheckpoint(task, start, stop, fmt, last_completed=start - 1, offset=0)

    fh = None
    if out_path is not None:
        mode = "r+b" if state.offset else "wb"
        fh = open(out_path, mode)
        fh.truncate(state.offset)
        fh.seek(state.offset)
        if state.offset == 0:
            fh.write((csv_header() if fmt == "csv" else "[\n").encode())

    pending = list(_blocks(state.last_completed + 1, stop))
    if max_blocks is not None:
        pending = pending[:max_blocks]
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 and len(pending) > 1 else None
    try:
        if pool is None:
            results = (_run_block(task, lo, hi) for lo, hi in pending)
        else:
            # map yields in submission order: this is the sequencer
            results = pool.map(_run_block, *zip(*[(task, lo, hi) for lo, hi in pending]))
        for (lo, hi), records in zip(pending, results):
            first = state.last_completed < start
            for rec in records:
                state.add(rec)
                if not rec.found:
                    log.warning("%s: no witness for n = %d", task, rec.n)
            state.last_completed = hi - 1
            if fh is not None:
                fh.write(_block_text(records, fmt, first).encode())
                if fmt == "json" and state.complete:
                    fh.write(b"\n]\n")
                fh.flush()
                os.fsync(fh.fileno())
                state.offset = fh.tell()
            if ck_path is not None:
                state.save(ck_path)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
        if fh is not None:
            fh.close()
    return state.summary()
