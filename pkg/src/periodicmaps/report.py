"""Machine-readable verification reports and deterministic partition helpers."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

VERDICTS = ("pass", "fail", "found", "none", "indeterminate")

THREADS_ENV = "PERIODICMAPS_THREADS"


@dataclass
class Report:
    command: str
    inputs: dict[str, Any]
    verdict: str
    counts: dict[str, Any] = field(default_factory=dict)
    certificates: list[Any] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def ok(self) -> bool:
        return self.verdict in ("pass", "found")

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "verdict": self.verdict,
            "counts": self.counts,
            "certificates": self.certificates,
            "details": self.details,
        }

    def to_json(self) -> str:
        # sorted keys and fixed separators keep output byte-stable
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, default=str) + "\n"


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)


def map_partitions(fn: Callable, parts: Sequence, threads: int = 1) -> list:
    """Apply ``fn`` to every partition; results come back in partition order."""
    if threads <= 1 or len(parts) <= 1:
        return [fn(p) for p in parts]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, parts))


def chunk(seq: Iterable, n: int) -> list[list]:
    seq = list(seq)
    n = max(1, n)
    size = -(-len(seq) // n) if seq else 1
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def fixture_path(name: str):
    """Path of a data file shipped with the package."""
    from importlib.resources import files

    return files("periodicmaps") / "data" / name
