"""Structured record stream shared by the solver, harness and CLI."""

from __future__ import annotations

import json
from typing import Any, Iterable


class Trace:
    def __init__(self) -> None:
        self.records: list[dict[str, Any]] = []

    def emit(self, event: str, **fields: Any) -> None:
        self.records.append({"event": event, **fields})

    def events(self, name: str) -> list[dict[str, Any]]:
        return [r for r in self.records if r["event"] == name]

    def __len__(self) -> int:
        return len(self.records)


def dumps_record(record: dict[str, Any]) -> str:
    """One canonical JSON line: sorted keys, no spaces, ASCII only."""
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def dumps_records(records: Iterable[dict[str, Any]]) -> str:
    return "".join(dumps_record(r) + "\n" for r in records)


def loads_records(text: str) -> list[dict[str, Any]]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]
