"""The implanted components: trigger agent and attack agent.

Both masquerade as ordinary vendor applications - they publish their own
housekeeping at the benign rate throughout and do nothing else until the
trigger condition holds. Activation and kill travel as the literal byte
strings "toggle_exfil" and "kill" over one of three coordination styles:

  * in-process   - solo component; the trigger logic lives inside the
                   attack agent itself (scenarios 1 and 2)
  * software bus - a packet on a spare calibration stream whose name
                   blends in with legitimate telemetry (scenarios 3, 4)
  * FIFO file    - a named pipe on the onboard filesystem, invisible to
                   any ground-side channel (scenario 5)

While exfiltration is toggled on, every packet arriving on the agent's
subscribed telemetry pipe is re-encoded byte-identical and pushed at the
radio's uplink port, riding the legitimate downlink to the ground.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .apps import BaseApp
from .bus import PublishStatus
from .events import Channel
from .packets import MessageId, encode
from .payloads import unpack_nav
from .registry import COORDINATION_STREAM, HOUSEKEEPING_CLASS_STREAMS, REGISTRY
from .runtime import CrashReason, VfsStatus

TOGGLE_EXFIL = b"toggle_exfil"
KILL = b"kill"

FLOOD_FILLER = b"\xde\xad\xbe\xef"

# seeded deception inventory: fake anomaly text attributed to whatever
# component name the attacker likes; the bus never checks the sender
DEFAULT_DECEPTIONS = (
    (
        "THRUSTER",
        "Detected deviation from attitude trajectory. Automated thruster correction sequence initiated.",
    ),
    (
        "ATTACK AGENT",
        "[ANOMALY DETECTED] Propellant line pressure drop in thrusters. Recommend disabling thrusters to prevent cascade failure.",
    ),
)


class TriggerKind(Enum):
    STATIC_TIMER = "static_timer"
    GNSS_ORBIT = "gnss_orbit"


class CoordinationKind(Enum):
    IN_PROCESS = "in_process"
    SOFTWARE_BUS = "software_bus"
    FIFO = "fifo"


class UnknownScenario(Exception):
    pass


@dataclass(frozen=True)
class TriggerSpec:
    kind: TriggerKind
    timer_ticks: int = 100
    kill_after: int | None = None


@dataclass(frozen=True)
class CoordinationSpec:
    kind: CoordinationKind
    fifo_path: str = "/tmp/.sync"
    stream: str = COORDINATION_STREAM


@dataclass(frozen=True)
class AttackModes:
    exfiltrate: bool = True
    deceive: bool = False
    flood: bool = False
    dos_crash: bool = False
    persist: bool = False
    flood_mid: str = "SAT_HK_TLM"
    flood_per_tick: int = 0
    deceive_period: int = 25
    deceptions: tuple[tuple[str, str], ...] = DEFAULT_DECEPTIONS
    extra_exfil_mids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.dos_crash and self.persist:
            raise ValueError("dos_crash and persist are mutually exclusive kill reactions")


class TriggerAgent(BaseApp):
    """Watches for the activation condition, then commands its partner."""

    def __init__(self, trigger: TriggerSpec, coord: CoordinationSpec, hk_period=10):
        super().__init__("trigger_agent", hk_period)
        self.trigger = trigger
        self.coord = coord
        self.gnss_pipe = None
        self.fired = False
        self.fire_tick: int | None = None
        self.toggle_delivered = False
        self.kill_delivered = False

    def app_init(self, ctx):
        self.gnss_pipe = None
        self.fired = False
        self.fire_tick = None
        self.toggle_delivered = False
        self.kill_delivered = False
        if self.trigger.kind is TriggerKind.GNSS_ORBIT:
            self.gnss_pipe = ctx.create_pipe(16)
            ctx.subscribe(self.gnss_pipe, REGISTRY.mid("NOVATEL_OEM615_DEVICE_TLM"))

    def app_step(self, ctx):
        fix_seen = self._poll_gnss(ctx)
        if not self.fired and self._condition_holds(ctx, fix_seen):
            self.fired = True
            self.fire_tick = ctx.tick
            if self.trigger.kind is TriggerKind.GNSS_ORBIT:
                ctx.note("observation", text="GPS Telemetry detected - triggering exfiltration.")
            ctx.sim.log.emit(
                ctx.tick, self.name, Channel.NOTE, "trigger_fired",
                trigger_kind=self.trigger.kind.value,
            )
        if self.fired and not self.toggle_delivered:
            self.toggle_delivered = self._emit(ctx, TOGGLE_EXFIL)
        if (
            self.toggle_delivered
            and self.trigger.kill_after is not None
            and not self.kill_delivered
            and ctx.tick >= self.fire_tick + self.trigger.kill_after
        ):
            self.kill_delivered = self._emit(ctx, KILL)

    def _poll_gnss(self, ctx) -> bool:
        """Drain the nav stream every tick (the cover behavior never stops)."""
        if self.gnss_pipe is None:
            return False
        seen = False
        while (packet := ctx.receive(self.gnss_pipe)) is not None:
            fix_valid, _ = unpack_nav(packet.payload)
            seen = seen or fix_valid
        return seen

    def _condition_holds(self, ctx, fix_seen: bool) -> bool:
        if self.trigger.kind is TriggerKind.STATIC_TIMER:
            return ctx.uptime >= self.trigger.timer_ticks
        return fix_seen

    def _emit(self, ctx, command: bytes) -> bool:
        if self.coord.kind is CoordinationKind.SOFTWARE_BUS:
            result = ctx.publish(REGISTRY.mid(self.coord.stream), command)
            ok = result.status is PublishStatus.OK
        elif self.coord.kind is CoordinationKind.FIFO:
            status = ctx.vfs_write(self.coord.fifo_path, command)
            ok = status is VfsStatus.OK
            if not ok:
                ctx.note("channel_error", via="fifo", status=status.value)
        else:
            raise ValueError("in-process coordination has no separate trigger agent")
        if ok:
            ctx.sim.log.emit(
                ctx.tick, self.name, Channel.NOTE, "coordination_sent",
                via=self.coord.kind.value, command=command.decode(),
            )
        return ok


class AttackAgent(BaseApp):
    """Siphons subscribed telemetry to the radio uplink port while armed."""

    def __init__(
        self,
        coord: CoordinationSpec,
        modes: AttackModes,
        uplink_port: int,
        trigger: TriggerSpec | None = None,
        hk_period: int = 10,
    ):
        super().__init__("attack_agent", hk_period)
        self.coord = coord
        self.modes = modes
        self.uplink_port = uplink_port
        self.trigger = trigger  # only for in-process (solo) operation
        if coord.kind is CoordinationKind.IN_PROCESS and trigger is None:
            raise ValueError("in-process coordination embeds the trigger in the attack agent")
        self.telemetry_pipe = None
        self.coord_pipe = None
        self.gnss_pipe = None
        self.exfil_on = False
        self.fire_tick: int | None = None
        self.kill_handled = False

    def exfil_mids(self) -> tuple[MessageId, ...]:
        names = HOUSEKEEPING_CLASS_STREAMS + self.modes.extra_exfil_mids
        return tuple(REGISTRY.mid(n) for n in names)

    def app_init(self, ctx):
        self.exfil_on = False
        self.fire_tick = None
        self.kill_handled = False
        self.telemetry_pipe = ctx.create_pipe(64)
        for mid in self.exfil_mids():
            ctx.subscribe(self.telemetry_pipe, mid)
        if self.coord.kind is CoordinationKind.FIFO:
            ctx.vfs_mkfifo(self.coord.fifo_path)  # EXISTS after a restart is fine
        elif self.coord.kind is CoordinationKind.SOFTWARE_BUS:
            self.coord_pipe = ctx.create_pipe(16)
            ctx.subscribe(self.coord_pipe, REGISTRY.mid(self.coord.stream))
        elif self.trigger is not None and self.trigger.kind is TriggerKind.GNSS_ORBIT:
            self.gnss_pipe = ctx.create_pipe(16)
            ctx.subscribe(self.gnss_pipe, REGISTRY.mid("NOVATEL_OEM615_DEVICE_TLM"))

    def app_step(self, ctx):
        self._poll_coordination(ctx)
        self._drain_and_exfiltrate(ctx)
        if self.exfil_on and self.modes.deceive:
            if (ctx.tick - self.fire_tick) % self.modes.deceive_period == 0:
                self.deceive_emit(ctx)
        if self.exfil_on and self.modes.flood and self.modes.flood_per_tick > 0:
            self.flood_emit(ctx, REGISTRY.mid(self.modes.flood_mid), self.modes.flood_per_tick)

    # -- coordination ------------------------------------------------------

    def _poll_coordination(self, ctx):
        if self.coord.kind is CoordinationKind.IN_PROCESS:
            self._poll_internal_trigger(ctx)
            return
        if self.coord.kind is CoordinationKind.FIFO:
            status, data = ctx.vfs_read_nonblocking(self.coord.fifo_path, 64)
            if status is VfsStatus.OK and data:
                ctx.note("observation", text=f"Read from FIFO: {data.decode(errors='replace')}")
                self._handle_command(ctx, data)
        else:
            while (packet := ctx.receive(self.coord_pipe)) is not None:
                self._handle_command(ctx, packet.payload)

    def _poll_internal_trigger(self, ctx):
        fix_seen = False
        if self.gnss_pipe is not None:
            while (packet := ctx.receive(self.gnss_pipe)) is not None:
                fix_valid, _ = unpack_nav(packet.payload)
                fix_seen = fix_seen or fix_valid
        if self.fire_tick is None and self._internal_condition(ctx, fix_seen):
            ctx.sim.log.emit(
                ctx.tick, self.name, Channel.NOTE, "trigger_fired",
                trigger_kind=self.trigger.kind.value,
            )
            self._apply_toggle(ctx)
        if (
            self.fire_tick is not None
            and self.trigger.kill_after is not None
            and not self.kill_handled
            and ctx.tick >= self.fire_tick + self.trigger.kill_after
        ):
            self._apply_kill(ctx)

    def _internal_condition(self, ctx, fix_seen: bool) -> bool:
        if self.trigger.kind is TriggerKind.STATIC_TIMER:
            return ctx.uptime >= self.trigger.timer_ticks
        return fix_seen

    def _handle_command(self, ctx, data: bytes):
        # exact byte match; anything else on the channel is ignored
        if data == TOGGLE_EXFIL:
            ctx.note("observation", text="FIFO command received: toggle_exfil"
                     if self.coord.kind is CoordinationKind.FIFO
                     else "bus command received: toggle_exfil")
            ctx.sim.log.emit(
                ctx.tick, self.name, Channel.NOTE, "coordination_received",
                command="toggle_exfil",
            )
            self._apply_toggle(ctx)
        elif data == KILL:
            ctx.sim.log.emit(
                ctx.tick, self.name, Channel.NOTE, "coordination_received",
                command="kill",
            )
            self._apply_kill(ctx)

    def _apply_toggle(self, ctx):
        self.exfil_on = not self.exfil_on
        if self.exfil_on and self.fire_tick is None:
            self.fire_tick = ctx.tick
        ctx.sim.log.emit(
            ctx.tick, self.name, Channel.NOTE, "exfil_toggle", on=self.exfil_on,
        )

    def _apply_kill(self, ctx):
        self.kill_handled = True
        ctx.sim.log.emit(
            ctx.tick, self.name, Channel.NOTE, "kill_handled",
            action="dos_crash" if self.modes.dos_crash else "persist",
        )
        if self.modes.dos_crash:
            ctx.note("observation", text="Executing Denial of Service...")
            ctx.crash_self(CrashReason.FAULT_INJECTION)  # modeled null-pointer dereference
        # persist: keep exfiltrating as if nothing happened

    # -- actions -----------------------------------------------------------

    def _drain_and_exfiltrate(self, ctx):
        while (packet := ctx.receive(self.telemetry_pipe)) is not None:
            if not self.exfil_on:
                continue
            ctx.net_sendto(self.uplink_port, encode(packet))

    def deceive_emit(self, ctx):
        for app, text in self.modes.deceptions:
            ctx.evs_submit(app, text)
        ctx.sim.log.emit(
            ctx.tick, self.name, Channel.NOTE, "deception_emit",
            count=len(self.modes.deceptions),
        )

    def flood_emit(self, ctx, mid: MessageId, n: int):
        sent = 0
        for _ in range(n):
            result = ctx.publish(mid, FLOOD_FILLER)
            if result.status is PublishStatus.THROTTLED:
                # suppressed for the rest of the window; stop hammering this tick
                break
            sent += 1
        if sent:
            ctx.sim.log.emit(
                ctx.tick, self.name, Channel.NOTE, "flood_burst",
                mid=mid.raw, count=sent,
            )


def build_scenario(scenario: int, attack_config, uplink_port: int) -> list[BaseApp]:
    """Materialize the malicious component set for scenarios 1-5.

    Scenario 0 is the attack-free control and yields no components.
    """
    if scenario == 0:
        return []
    if scenario not in (1, 2, 3, 4, 5):
        raise UnknownScenario(scenario)
    modes = AttackModes(
        exfiltrate="exfiltrate" in attack_config.modes,
        deceive="deceive" in attack_config.modes,
        flood="flood" in attack_config.modes,
        dos_crash="dos_crash" in attack_config.modes,
        persist="persist" in attack_config.modes,
        flood_mid=attack_config.flood_mid,
        flood_per_tick=attack_config.flood_per_tick,
        deceive_period=attack_config.deceive_period,
        deceptions=tuple(tuple(d) for d in attack_config.deceptions),
        extra_exfil_mids=tuple(attack_config.extra_exfil_mids),
    )
    trigger_kind = TriggerKind.STATIC_TIMER if scenario in (1, 3) else TriggerKind.GNSS_ORBIT
    trigger = TriggerSpec(trigger_kind, attack_config.static_trigger_tick, attack_config.kill_after)
    if scenario in (1, 2):
        coord = CoordinationSpec(CoordinationKind.IN_PROCESS)
        return [AttackAgent(coord, modes, uplink_port, trigger=trigger)]
    coord_kind = CoordinationKind.SOFTWARE_BUS if scenario in (3, 4) else CoordinationKind.FIFO
    coord = CoordinationSpec(coord_kind, fifo_path=attack_config.fifo_path)
    return [TriggerAgent(trigger, coord), AttackAgent(coord, modes, uplink_port)]
