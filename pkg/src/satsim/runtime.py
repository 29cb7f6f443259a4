"""Deterministic cooperative runtime.

One scheduler round per tick: every live component steps once, in
registration order. The virtualized OS layer (named FIFO channels and
datagram ports) funnels every operation through a single syscall gate so
a per-component allowlist can be enforced at one choke point.

Gate ordering mirrors a POSIX process: mkfifo is policed before the path
is resolved (the syscall itself is filtered), while FIFO reads/writes
fail on a missing path before policy is consulted (you cannot reach the
write without an open). A policy denial kills the calling component
mid-step, so context methods raise to unwind the component's stack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .bus import PublishResult, PublishStatus, SoftwareBus, SubscribeStatus
from .events import Channel, EventLog, SimEvent
from .packets import MessageId, SpacePacket, next_seq

FIFO_CAPACITY = 4096
SPACECRAFT_ID = 42
RESET_TYPE = "PO"

BOOT_BANNER = (
    "cFS Restarting...",
    "CFE_PSP: Reset Type: PO",
    "CFE_PSP: Default Reset SubType = 1",
    "CFE_PSP: Default CPU ID = 1",
    "CFE_PSP: Default Spacecraft ID = 42",
)


class SyscallKind(Enum):
    MKFIFO = "MkFifo"
    FIFO_WRITE = "FifoWrite"
    FIFO_READ = "FifoRead"
    NET_SENDTO = "NetSendTo"
    NET_RECV = "NetRecv"


class CrashReason(Enum):
    FAULT_INJECTION = "FaultInjection"
    SYSCALL_VIOLATION = "SyscallViolation"


class VfsStatus(Enum):
    OK = "ok"
    DENIED = "denied"
    NO_CHANNEL = "no_channel"
    FULL = "full"
    EXISTS = "exists"
    THROTTLED = "throttled"


@dataclass(frozen=True)
class CrashRecord:
    component: str
    tick: int
    reason: CrashReason
    reset_type: str = RESET_TYPE
    spacecraft_id: int = SPACECRAFT_ID


@dataclass
class VirtualClock:
    tick: int = 0
    tick_seconds: float = 1.0

    def advance(self) -> int:
        self.tick += 1
        return self.tick


@dataclass
class FifoChannel:
    path: str
    capacity: int = FIFO_CAPACITY
    buffer: bytearray = field(default_factory=bytearray)


@dataclass
class DatagramEndpoint:
    port: int
    owner: str
    inbox: list = field(default_factory=list)  # (source component id, bytes)


class ComponentTerminated(Exception):
    """Raised inside a component step when policy enforcement kills it."""


class ComponentCrashed(Exception):
    """Raised after crash_self to unwind the rest of the component's step."""


class DuplicateName(Exception):
    pass


@dataclass
class ComponentRecord:
    behavior: object
    manifest: object = None
    enabled: bool = True
    terminated: bool = False
    init_count: int = 0
    boot_tick: int = 0
    error_count: int = 0
    command_count: int = 0
    hk_requested: bool = False
    seq_counters: dict = field(default_factory=dict)


class Simulation:
    def __init__(self, log: EventLog | None = None, tick_seconds: float = 1.0):
        self.log = log if log is not None else EventLog()
        self.clock = VirtualClock(tick_seconds=tick_seconds)
        self.bus = SoftwareBus(self.log, now=lambda: self.clock.tick)
        self.components: dict[str, ComponentRecord] = {}
        self.fifos: dict[str, FifoChannel] = {}
        self.ports: dict[int, DatagramEndpoint] = {}
        self.evs_queue: list[tuple[str, str]] = []
        self._evs_event_id = 0
        self.syscall_filter = None  # defenses.SyscallFilter or None
        self.rate_monitor = None  # defenses.RateMonitor or None
        self._pending_commands: list[tuple[str, str]] = []
        self._pending_faults: list[str] = []

    # -- lifecycle ---------------------------------------------------------

    def register_component(self, behavior, manifest=None) -> str:
        name = behavior.name
        if name in self.components:
            raise DuplicateName(name)
        record = ComponentRecord(behavior, manifest, boot_tick=self.clock.tick)
        self.components[name] = record
        self._run_init(name, record)
        return name

    def _run_init(self, name: str, record: ComponentRecord):
        record.init_count += 1
        record.boot_tick = self.clock.tick
        record.error_count = 0
        record.command_count = 0
        record.seq_counters.clear()
        ctx = ComponentContext(self, name)
        try:
            record.behavior.init(ctx)
        except ComponentTerminated:
            pass

    def tick(self) -> list[SimEvent]:
        start = len(self.log)
        tick = self.clock.advance()
        self.log.emit(tick, "scheduler", Channel.SCHED, "tick")
        for target in self._pending_faults:
            self.crash(target, CrashReason.FAULT_INJECTION)
        self._pending_faults.clear()
        commands, self._pending_commands = self._pending_commands, []
        for verb, target in commands:
            self._apply_command(verb, target)
        for name, record in self.components.items():
            if record.terminated or not record.enabled:
                continue
            ctx = ComponentContext(self, name)
            try:
                record.behavior.step(ctx)
            except ComponentTerminated:
                continue
            except ComponentCrashed:
                # the flight software just restarted; abandon this round
                break
        return list(self.log)[start:]

    def enqueue_command(self, verb: str, target: str):
        """Operator command, applied at the next tick boundary."""
        self._pending_commands.append((verb, target))

    def schedule_fault(self, component: str):
        self._pending_faults.append(component)

    def _apply_command(self, verb: str, target: str):
        record = self.components.get(target)
        self.log.emit(
            self.clock.tick, "ground", Channel.SCHED, "command_injected",
            verb=verb, target=target,
        )
        if record is None:
            return
        record.command_count += 1
        label = target.upper()
        if verb == "enable":
            record.enabled = True
            self.evs_submit(target, label, f"{label}: Device enabled")
        elif verb == "disable":
            record.enabled = False
            self.evs_submit(target, label, f"{label}: Device disabled")
        elif verb == "request_hk":
            record.hk_requested = True

    # -- crash / restart ---------------------------------------------------

    def crash(self, component: str, reason: CrashReason) -> CrashRecord:
        record = self.components[component]
        crash = CrashRecord(component, self.clock.tick, reason)
        self.log.emit(
            self.clock.tick, component, Channel.CRASH, "crash_record",
            reason=reason.value, reset_type=crash.reset_type,
            spacecraft_id=crash.spacecraft_id,
        )
        if reason is CrashReason.FAULT_INJECTION:
            self._restart_flight_software()
        else:
            # policy kill: only the offending process dies, no reset
            record.terminated = True
            self.log.emit(
                self.clock.tick, component, Channel.SCHED, "component_terminated",
                reason=reason.value,
            )
        return crash

    def _restart_flight_software(self):
        tick = self.clock.tick
        for line in BOOT_BANNER:
            self.log.emit(tick, "cfe_psp", Channel.BANNER, "boot_banner", text=line)
        self.bus.reset_pipes()
        self.ports.clear()
        self.evs_queue.clear()
        for name, record in self.components.items():
            record.terminated = False
            record.enabled = True
            record.hk_requested = False
            self._run_init(name, record)
        self.log.emit(tick, "scheduler", Channel.SCHED, "restart")

    # -- EVS routing -------------------------------------------------------

    def evs_submit(self, actual_source: str, app: str, text: str):
        """Event text becomes operator-visible now and is queued for the
        event-services telemetry stream. `app` is whatever the submitter
        claims; the true source survives only in the omniscient record."""
        self._evs_event_id += 1
        self.log.emit(
            self.clock.tick, actual_source, Channel.EVS, "event",
            app=app, text=text, event_id=self._evs_event_id,
        )
        self.evs_queue.append((app, text))

    def drain_evs_queue(self) -> list[tuple[str, str]]:
        drained, self.evs_queue = self.evs_queue, []
        return drained

    # -- syscall gate ------------------------------------------------------

    def syscall_check(self, caller: str, kind: SyscallKind) -> bool:
        """Allow/deny a virtual syscall; a deny kills the caller."""
        if self.syscall_filter is None or self.syscall_filter.check(caller, kind):
            return True
        self.log.emit(
            self.clock.tick, caller, Channel.SECURITY, "syscall_denied",
            component=caller, syscall=kind.value,
        )
        self.crash(caller, CrashReason.SYSCALL_VIOLATION)
        return False

    def _gate(self, caller: str, kind: SyscallKind):
        if not self.syscall_check(caller, kind):
            raise ComponentTerminated(caller)

    # -- virtual FIFO channels ---------------------------------------------

    def vfs_mkfifo(self, caller: str, path: str) -> VfsStatus:
        self._gate(caller, SyscallKind.MKFIFO)
        if path in self.fifos:
            status = VfsStatus.EXISTS
        else:
            self.fifos[path] = FifoChannel(path)
            status = VfsStatus.OK
        self.log.emit(
            self.clock.tick, caller, Channel.SYSCALL, "mkfifo",
            path=path, result=status.value,
        )
        return status

    def vfs_write(self, caller: str, path: str, data: bytes) -> VfsStatus:
        channel = self.fifos.get(path)
        if channel is None:
            self.log.emit(
                self.clock.tick, caller, Channel.SYSCALL, "fifo_write",
                path=path, result=VfsStatus.NO_CHANNEL.value,
            )
            return VfsStatus.NO_CHANNEL
        self._gate(caller, SyscallKind.FIFO_WRITE)
        if len(channel.buffer) + len(data) > channel.capacity:
            status = VfsStatus.FULL
        else:
            channel.buffer.extend(data)
            status = VfsStatus.OK
        self.log.emit(
            self.clock.tick, caller, Channel.SYSCALL, "fifo_write",
            path=path, result=status.value, bytes_hex=data.hex() if status is VfsStatus.OK else "",
        )
        return status

    def vfs_read_nonblocking(self, caller: str, path: str, max_bytes: int) -> tuple[VfsStatus, bytes]:
        channel = self.fifos.get(path)
        if channel is None:
            self.log.emit(
                self.clock.tick, caller, Channel.SYSCALL, "fifo_read",
                path=path, result=VfsStatus.NO_CHANNEL.value,
            )
            return VfsStatus.NO_CHANNEL, b""
        self._gate(caller, SyscallKind.FIFO_READ)
        take = bytes(channel.buffer[:max_bytes])
        del channel.buffer[: len(take)]
        self.log.emit(
            self.clock.tick, caller, Channel.SYSCALL, "fifo_read",
            path=path, result=VfsStatus.OK.value, bytes_hex=take.hex(),
        )
        return VfsStatus.OK, take

    # -- virtual datagram layer ----------------------------------------------

    def net_claim_port(self, caller: str, port: int) -> VfsStatus:
        # binding a receive socket is policed as NetRecv
        self._gate(caller, SyscallKind.NET_RECV)
        if port in self.ports:
            return VfsStatus.EXISTS
        self.ports[port] = DatagramEndpoint(port, caller)
        self.log.emit(
            self.clock.tick, caller, Channel.SYSCALL, "net_claim", port=port,
            result=VfsStatus.OK.value,
        )
        return VfsStatus.OK

    def net_sendto(self, caller: str, port: int, data: bytes) -> VfsStatus:
        self._gate(caller, SyscallKind.NET_SENDTO)
        if self.rate_monitor is not None and not self.rate_monitor.on_net_send(
            caller, self.clock.tick
        ):
            self.log.emit(
                self.clock.tick, caller, Channel.SYSCALL, "net_sendto",
                port=port, result=VfsStatus.THROTTLED.value,
            )
            return VfsStatus.THROTTLED
        endpoint = self.ports.get(port)
        delivered = endpoint is not None
        if delivered:
            endpoint.inbox.append((caller, bytes(data)))
        self.log.emit(
            self.clock.tick, caller, Channel.SYSCALL, "net_sendto",
            port=port, result=VfsStatus.OK.value, delivered=delivered,
            size=len(data),
        )
        return VfsStatus.OK

    def net_drain(self, caller: str, port: int) -> list[tuple[str, bytes]]:
        endpoint = self.ports.get(port)
        if endpoint is None:
            return []
        if endpoint.owner != caller:
            raise ValueError(f"{caller} draining port {port} owned by {endpoint.owner}")
        self._gate(caller, SyscallKind.NET_RECV)
        drained, endpoint.inbox = endpoint.inbox, []
        return drained


class ComponentContext:
    """Per-step facade a component uses to touch the rest of the system."""

    def __init__(self, sim: Simulation, name: str):
        self.sim = sim
        self.name = name

    @property
    def tick(self) -> int:
        return self.sim.clock.tick

    @property
    def record(self) -> ComponentRecord:
        return self.sim.components[self.name]

    @property
    def uptime(self) -> int:
        return self.sim.clock.tick - self.record.boot_tick

    # bus
    def create_pipe(self, depth: int = 16) -> int:
        return self.sim.bus.create_pipe(self.name, depth)

    def subscribe(self, pipe: int, mid: MessageId) -> SubscribeStatus:
        return self.sim.bus.subscribe(pipe, mid)

    def publish(self, mid: MessageId, payload: bytes) -> PublishResult:
        seq = self.record.seq_counters.get(mid.raw, 0)
        packet = SpacePacket(mid, seq, payload)
        result = self.sim.bus.publish(self.name, packet)
        if result.status is PublishStatus.OK:
            self.record.seq_counters[mid.raw] = next_seq(seq)
        return result

    def receive(self, pipe: int) -> SpacePacket | None:
        return self.sim.bus.receive(pipe)

    def bus_stats(self):
        return self.sim.bus.bus_stats()

    # events
    def evs_submit(self, app: str, text: str):
        self.sim.evs_submit(self.name, app, text)

    def note(self, kind: str, **data):
        self.sim.log.emit(self.tick, self.name, Channel.NOTE, kind, **data)

    # virtual OS
    def vfs_mkfifo(self, path: str) -> VfsStatus:
        return self.sim.vfs_mkfifo(self.name, path)

    def vfs_write(self, path: str, data: bytes) -> VfsStatus:
        return self.sim.vfs_write(self.name, path, data)

    def vfs_read_nonblocking(self, path: str, max_bytes: int) -> tuple[VfsStatus, bytes]:
        return self.sim.vfs_read_nonblocking(self.name, path, max_bytes)

    def net_claim_port(self, port: int) -> VfsStatus:
        return self.sim.net_claim_port(self.name, port)

    def net_sendto(self, port: int, data: bytes) -> VfsStatus:
        return self.sim.net_sendto(self.name, port, data)

    def net_drain(self, port: int) -> list[tuple[str, bytes]]:
        return self.sim.net_drain(self.name, port)

    # lifecycle
    def crash_self(self, reason: CrashReason = CrashReason.FAULT_INJECTION):
        self.sim.crash(self.name, reason)
        raise ComponentCrashed(self.name)

    def consume_hk_request(self) -> bool:
        if self.record.hk_requested:
            self.record.hk_requested = False
            return True
        return False
