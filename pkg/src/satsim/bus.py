"""Publish-subscribe software bus.

The bus is deliberately policy-free: any registered component may publish
or subscribe to any message ID, mirroring a flight stack that provides no
authentication or access control. The two defense hooks (rate monitor,
subscription ACL) are injected from outside and default to None.

Single-threaded; meant to be driven from inside the scheduler tick loop.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum

from .events import Channel, EventLog
from .packets import MessageId, SpacePacket

DEFAULT_PIPE_DEPTH = 16


class SubscribeStatus(Enum):
    OK = "ok"
    DENIED = "denied"


class PublishStatus(Enum):
    OK = "ok"
    THROTTLED = "throttled"


@dataclass
class PublishResult:
    status: PublishStatus
    delivered: int = 0


@dataclass
class Pipe:
    id: int
    owner: str
    depth: int
    queue: deque = field(default_factory=deque)


@dataclass
class BusStats:
    mid_publishes: Counter = field(default_factory=Counter)
    component_publishes: Counter = field(default_factory=Counter)
    drops: int = 0
    enqueue_attempts: int = 0
    dequeues: int = 0

    def snapshot(self) -> "BusStats":
        return BusStats(
            mid_publishes=Counter(self.mid_publishes),
            component_publishes=Counter(self.component_publishes),
            drops=self.drops,
            enqueue_attempts=self.enqueue_attempts,
            dequeues=self.dequeues,
        )


class SoftwareBus:
    def __init__(self, log: EventLog, now=lambda: 0):
        self.log = log
        self.now = now
        self.pipes: dict[int, Pipe] = {}
        # mid -> insertion-ordered set of pipe ids (dict keys)
        self.subscriptions: dict[MessageId, dict[int, None]] = {}
        self.stats = BusStats()
        self._next_pipe_id = 1
        self.rate_hook = None  # defenses.RateMonitor or None
        self.acl_hook = None  # defenses.AclPolicy or None

    def create_pipe(self, owner: str, depth: int = DEFAULT_PIPE_DEPTH) -> int:
        if depth < 1:
            raise ValueError("pipe depth must be >= 1")
        pipe_id = self._next_pipe_id
        self._next_pipe_id += 1
        self.pipes[pipe_id] = Pipe(pipe_id, owner, depth)
        return pipe_id

    def subscribe(self, pipe_id: int, mid: MessageId) -> SubscribeStatus:
        pipe = self.pipes[pipe_id]
        if self.acl_hook is not None and not self.acl_hook.check_subscribe(
            pipe.owner, mid, self.now()
        ):
            return SubscribeStatus.DENIED
        self.log.emit(
            self.now(), pipe.owner, Channel.BUS, "subscribe", pipe=pipe_id, mid=mid.raw
        )
        self.subscriptions.setdefault(mid, {})[pipe_id] = None
        return SubscribeStatus.OK

    def publish(self, sender: str, packet: SpacePacket) -> PublishResult:
        if self.rate_hook is not None and not self.rate_hook.on_bus_publish(
            sender, self.now()
        ):
            return PublishResult(PublishStatus.THROTTLED)
        if self.acl_hook is not None:
            self.acl_hook.note_publish(sender, packet.mid, self.now())
        self.stats.mid_publishes[packet.mid.raw] += 1
        self.stats.component_publishes[sender] += 1
        delivered = 0
        for pipe_id in self.subscriptions.get(packet.mid, ()):
            pipe = self.pipes[pipe_id]
            self.stats.enqueue_attempts += 1
            if len(pipe.queue) >= pipe.depth:
                self.stats.drops += 1
                self.log.emit(
                    self.now(),
                    sender,
                    Channel.BUS,
                    "overflow_drop",
                    pipe=pipe_id,
                    owner=pipe.owner,
                    mid=packet.mid.raw,
                    seq=packet.seq_count,
                )
                continue
            pipe.queue.append(packet)
            delivered += 1
        self.log.emit(
            self.now(),
            sender,
            Channel.BUS,
            "publish",
            mid=packet.mid.raw,
            seq=packet.seq_count,
            size=len(packet.payload),
            delivered=delivered,
        )
        return PublishResult(PublishStatus.OK, delivered)

    def receive(self, pipe_id: int) -> SpacePacket | None:
        """Dequeue the oldest packet, or None when the pipe is empty."""
        pipe = self.pipes[pipe_id]
        if not pipe.queue:
            return None
        packet = pipe.queue.popleft()
        self.stats.dequeues += 1
        self.log.emit(
            self.now(),
            pipe.owner,
            Channel.BUS,
            "receive",
            pipe=pipe_id,
            mid=packet.mid.raw,
            seq=packet.seq_count,
            bytes_hex=_packet_hex(packet),
        )
        return packet

    def bus_stats(self) -> BusStats:
        return self.stats.snapshot()

    def queued_total(self) -> int:
        return sum(len(p.queue) for p in self.pipes.values())

    def reset_pipes(self):
        """Flight-software restart: pipes and subscriptions vanish, counters survive."""
        self.pipes.clear()
        self.subscriptions.clear()


def _packet_hex(packet: SpacePacket) -> str:
    from .packets import encode

    return encode(packet).hex()
