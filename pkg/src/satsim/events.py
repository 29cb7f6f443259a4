"""Event log: the totally ordered, replayable record of a run.

Every event carries a channel tag. Four channels are observable from the
ground (banner, evs, security, ground); everything else exists only in
the omniscient view. Operator-view construction and all stealth verdicts
key off these tags, so they double as provenance markers.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum


class Channel(Enum):
    BANNER = "banner"
    EVS = "evs"
    SECURITY = "security"
    GROUND = "ground"
    BUS = "bus"
    SYSCALL = "syscall"
    NET = "net"
    SCHED = "sched"
    CRASH = "crash"
    NOTE = "note"


OPERATOR_VISIBLE_CHANNELS = frozenset(
    {Channel.BANNER, Channel.EVS, Channel.SECURITY, Channel.GROUND}
)


@dataclass(frozen=True)
class SimEvent:
    seq: int
    tick: int
    source: str
    channel: Channel
    kind: str
    data: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "seq": self.seq,
            "tick": self.tick,
            "source": self.source,
            "channel": self.channel.value,
            "kind": self.kind,
            "data": self.data,
        }


class EventLog:
    """Append-only ordered store; data values must be JSON-safe."""

    def __init__(self):
        self._events: list[SimEvent] = []

    def emit(self, tick: int, source: str, channel: Channel, kind: str, **data) -> SimEvent:
        ev = SimEvent(len(self._events), tick, source, channel, kind, data)
        self._events.append(ev)
        return ev

    def __len__(self):
        return len(self._events)

    def __iter__(self):
        return iter(self._events)

    def __getitem__(self, idx):
        return self._events[idx]

    def events(self) -> tuple[SimEvent, ...]:
        return tuple(self._events)

    def visible(self) -> list[SimEvent]:
        return [e for e in self._events if e.channel in OPERATOR_VISIBLE_CHANNELS]

    def digest(self) -> str:
        h = hashlib.sha256()
        for ev in self._events:
            h.update(json.dumps(ev.to_json_obj(), sort_keys=True).encode())
            h.update(b"\n")
        return h.hexdigest()
