"""Ground-side receivers: records, operator attribution, exfil ledger.

One physical endpoint receives everything the radio transmits, mirroring
a flight radio hard-wired to a single ground station. Arrivals are
matched against the realized downlink schedule (the byte-exact multiset
of packets the radio legitimately forwarded off the bus each tick);
surplus arrivals are what an adversary camped on the downlink actually
gained, and they populate the exfiltration ledger.

Every record is attributed to "radio" - the ground has no visibility
into which onboard component originated a packet.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .events import Channel, EventLog
from .packets import CodecError, SpacePacket, decode
from .registry import REGISTRY

SCHEDULED = "scheduled"
SURPLUS = "surplus"


class DownlinkScheduleBoard:
    """Per-tick multiset of bytes the radio forwarded from its bus pipe."""

    def __init__(self):
        self._by_tick: dict[int, Counter] = {}

    def record(self, tick: int, data: bytes):
        self._by_tick.setdefault(tick, Counter())[data] += 1

    def consume(self, tick: int, data: bytes) -> bool:
        # arrival may trail the forward by a tick when a real socket is in play
        for t in (tick, tick - 1):
            bucket = self._by_tick.get(t)
            if bucket and bucket[data] > 0:
                bucket[data] -= 1
                return True
        return False


@dataclass(frozen=True)
class GroundRecord:
    arrival_tick: int
    raw: bytes
    decode_status: str  # Ok | Truncated | BadLength | EmptyPayload
    mid_raw: int | None
    mid_name: str | None
    seq_count: int | None
    classification: str  # scheduled | surplus
    attribution: str = "radio"

    def to_json_obj(self) -> dict:
        return {
            "arrival_tick": self.arrival_tick,
            "raw_hex": self.raw.hex(),
            "decode_status": self.decode_status,
            "mid": self.mid_raw,
            "mid_name": self.mid_name,
            "seq_count": self.seq_count,
            "classification": self.classification,
            "attribution": self.attribution,
        }


class GroundStation:
    def __init__(self, log: EventLog, schedule_board: DownlinkScheduleBoard, now=lambda: 0):
        self.log = log
        self.schedule_board = schedule_board
        self.now = now
        self.records: list[GroundRecord] = []
        self.exfil_ledger: list[GroundRecord] = []

    def receive(self, data: bytes) -> GroundRecord:
        tick = self.now()
        out = decode(data)
        if isinstance(out, SpacePacket):
            status = "Ok"
            mid_raw: int | None = out.mid.raw
            mid_name = REGISTRY.name_of(out.mid)
            seq: int | None = out.seq_count
        else:
            assert isinstance(out, CodecError)
            status = out.kind.value
            mid_raw = mid_name = seq = None
        scheduled = self.schedule_board.consume(tick, data)
        record = GroundRecord(
            arrival_tick=tick,
            raw=data,
            decode_status=status,
            mid_raw=mid_raw,
            mid_name=mid_name,
            seq_count=seq,
            classification=SCHEDULED if scheduled else SURPLUS,
        )
        self.records.append(record)
        if record.classification == SURPLUS and status == "Ok":
            self.exfil_ledger.append(record)
        # the operator-facing record carries no schedule classification
        self.log.emit(
            tick, "ground", Channel.GROUND, "ground_record",
            decode_status=status, mid=mid_raw, mid_name=mid_name,
            seq=seq, length=len(data),
        )
        return record

    def ledger_bytes(self) -> list[bytes]:
        return [r.raw for r in self.exfil_ledger]
