"""Structured JSON event lines on stderr."""
from __future__ import annotations

import json
import os
import sys
import time
from contextlib import contextmanager
from typing import Iterator


def _enabled() -> bool:
    return os.getenv("BUNDLER_LOG", "1") not in ("0", "false", "off")


def log_event(msg: str, run_id: str = "", stage: str = "", **extra) -> None:
    if not _enabled():
        return
    entry = {"msg": msg, "run_id": run_id, "stage": stage}
    entry.update(extra)
    print(json.dumps(entry, default=str), file=sys.stderr)


@contextmanager
def stage_timer(stage: str, timings: dict[str, float], run_id: str = "") -> Iterator[None]:
    """Record wall-clock seconds of a pipeline stage into ``timings[stage]``."""
    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start
        timings[stage] = elapsed
        log_event("stage_done", run_id, stage, seconds=round(elapsed, 4))
