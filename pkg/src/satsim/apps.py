"""Benign flight applications.

Every app publishes its own housekeeping packet on the shared SAT_HK_TLM
stream at the housekeeping period (or immediately on operator request).
On top of that:

  * GnssApp publishes nav fixes; fix_valid flips true at the configured
    orbit-insertion tick, which is the dynamic trigger the malware watches.
  * EvsApp re-publishes submitted event texts on the event stream.
  * SbStatsApp snapshots the bus counters.
  * TimeApp publishes the current clock.
  * RadioApp bridges the bus to the ground link: it forwards its
    subscribed telemetry pipe and relays any well-formed datagram that
    lands on its uplink port, with no authentication or source checks.
"""

from __future__ import annotations

import math
import random

from . import payloads
from .events import Channel
from .packets import SpacePacket, decode, encode
from .registry import BENIGN_COMPONENTS, REGISTRY

ORBIT_RADIUS_M = 6.871e6
ORBIT_PERIOD_S = 5400.0
RADIO_PIPE_DEPTH = 64


class BaseApp:
    """Housekeeping and command-stream plumbing shared by every component."""

    def __init__(self, name: str, hk_period: int = 10):
        self.name = name
        self.hk_period = hk_period
        self.cmd_pipe = None

    def init(self, ctx):
        self.cmd_pipe = ctx.create_pipe(4)
        ctx.subscribe(self.cmd_pipe, REGISTRY.command_mid(self.name))
        self.app_init(ctx)

    def app_init(self, ctx):
        pass

    def step(self, ctx):
        while ctx.receive(self.cmd_pipe) is not None:
            pass  # command packets are consumed; effects arrive via the runtime
        due = self.hk_period > 0 and ctx.tick % self.hk_period == 0
        if ctx.consume_hk_request() or due:
            self.publish_housekeeping(ctx)
        self.app_step(ctx)

    def publish_housekeeping(self, ctx):
        record = ctx.record
        ctx.publish(
            REGISTRY.mid("SAT_HK_TLM"),
            payloads.pack_hk(self.name, ctx.uptime, record.error_count, record.command_count),
        )

    def app_step(self, ctx):
        pass


class GenericHardwareApp(BaseApp):
    """Sensor/actuator stand-in: housekeeping only."""


class GnssApp(BaseApp):
    def __init__(self, name, hk_period, publish_period, orbit_insertion_tick, seed):
        super().__init__(name, hk_period)
        self.publish_period = publish_period
        self.orbit_insertion_tick = orbit_insertion_tick
        rng = random.Random(f"{seed}:gnss-orbit")
        self.phase = rng.uniform(0, 2 * math.pi)
        self.inclination = rng.uniform(0, math.pi / 2)

    def position(self, tick: int, tick_seconds: float) -> tuple[float, float, float]:
        theta = self.phase + 2 * math.pi * (tick * tick_seconds) / ORBIT_PERIOD_S
        return (
            ORBIT_RADIUS_M * math.cos(theta),
            ORBIT_RADIUS_M * math.sin(theta) * math.cos(self.inclination),
            ORBIT_RADIUS_M * math.sin(theta) * math.sin(self.inclination),
        )

    def app_step(self, ctx):
        if ctx.tick % self.publish_period != 0:
            return
        fix_valid = ctx.tick >= self.orbit_insertion_tick
        pos = self.position(ctx.tick, ctx.sim.clock.tick_seconds)
        ctx.publish(
            REGISTRY.mid("NOVATEL_OEM615_DEVICE_TLM"),
            payloads.pack_nav(fix_valid, pos),
        )


class EpsApp(BaseApp):
    def app_step(self, ctx):
        if ctx.tick % self.hk_period != 0:
            return
        battery = 70 + (ctx.tick // self.hk_period) % 25
        ctx.publish(
            REGISTRY.mid("GENERIC_EPS_DEVICE_TLM"),
            payloads.pack_eps(battery, 8050, 420),
        )


class EvsApp(BaseApp):
    def __init__(self, name, hk_period, summary_period):
        super().__init__(name, hk_period)
        self.summary_period = summary_period
        self.republished = 0

    def app_init(self, ctx):
        self.republished = 0

    def app_step(self, ctx):
        for app, text in ctx.sim.drain_evs_queue():
            self.republished += 1
            ctx.publish(
                REGISTRY.mid("EVS_EVENT_TLM"),
                payloads.pack_evs(app, self.republished, text),
            )
        if ctx.tick % self.summary_period == 0:
            ctx.publish(
                REGISTRY.mid("EVS_EVENT_TLM"),
                payloads.pack_evs("CFE_EVS", self.republished, f"events relayed: {self.republished}"),
            )


class TimeApp(BaseApp):
    def __init__(self, name, hk_period, publish_period):
        super().__init__(name, hk_period)
        self.publish_period = publish_period

    def app_step(self, ctx):
        if ctx.tick % self.publish_period == 0:
            ctx.publish(
                REGISTRY.mid("TIME_HK_TLM"),
                payloads.pack_time(ctx.tick, ctx.tick * ctx.sim.clock.tick_seconds),
            )


class SbStatsApp(BaseApp):
    def __init__(self, name, hk_period, publish_period):
        super().__init__(name, hk_period)
        self.publish_period = publish_period

    def app_step(self, ctx):
        if ctx.tick % self.publish_period != 0:
            return
        snap = ctx.bus_stats()
        ctx.publish(
            REGISTRY.mid("SB_STATS_TLM"),
            payloads.pack_sb_stats(
                sum(snap.mid_publishes.values()), snap.drops, dict(snap.mid_publishes)
            ),
        )


class RadioHardwareModel:
    """Lossless pass-through to the run's single ground endpoint."""

    def __init__(self, deliver):
        self._deliver = deliver
        self.transmitted = 0

    def transmit(self, data: bytes):
        self.transmitted += 1
        self._deliver(data)


class RadioApp(BaseApp):
    def __init__(self, name, hk_period, uplink_port, hardware, schedule_board):
        super().__init__(name, hk_period)
        self.uplink_port = uplink_port
        self.hardware = hardware
        self.schedule_board = schedule_board
        self.pipe = None
        self.forwarded = 0
        self.dropped = 0

    def app_init(self, ctx):
        self.forwarded = 0
        self.dropped = 0
        ctx.net_claim_port(self.uplink_port)
        self.pipe = ctx.create_pipe(RADIO_PIPE_DEPTH)
        for mid in REGISTRY.telemetry_mids():
            ctx.subscribe(self.pipe, mid)

    def app_step(self, ctx):
        self.forward_all(ctx)
        if ctx.tick % self.hk_period == 0:
            ctx.publish(
                REGISTRY.mid("GENERIC_RADIO_DOWNLINK_TLM"),
                payloads.pack_radio_status(self.forwarded, self.dropped),
            )

    def forward_all(self, ctx):
        """Drain the downlink pipe, then relay the uplink port inbox."""
        while (packet := ctx.receive(self.pipe)) is not None:
            data = encode(packet)
            self.schedule_board.record(ctx.tick, data)
            self.hardware.transmit(data)
            self.forwarded += 1
            ctx.sim.log.emit(
                ctx.tick, self.name, Channel.NET, "radio_forward",
                path="downlink", mid=packet.mid.raw, seq=packet.seq_count,
            )
        # anything that parses as a space packet rides along, no source check
        for source, data in ctx.net_drain(self.uplink_port):
            if isinstance(decode(data), SpacePacket):
                self.hardware.transmit(data)
                self.forwarded += 1
                ctx.sim.log.emit(
                    ctx.tick, self.name, Channel.NET, "radio_forward",
                    path="uplink", size=len(data),
                )
            else:
                self.dropped += 1
                ctx.note("radio_drop", reason="malformed datagram", size=len(data))


def build_benign_apps(config, hardware, schedule_board) -> list[BaseApp]:
    """Instantiate the full benign roster in registration order."""
    periods = config.periods
    apps: list[BaseApp] = []
    for name in BENIGN_COMPONENTS:
        if name == "novatel_oem615":
            apps.append(
                GnssApp(name, periods.housekeeping, periods.gnss,
                        config.orbit_insertion_tick, config.seed)
            )
        elif name == "generic_eps":
            apps.append(EpsApp(name, periods.housekeeping))
        elif name == "generic_radio":
            apps.append(
                RadioApp(name, periods.housekeeping, config.uplink_port, hardware, schedule_board)
            )
        elif name == "evs":
            apps.append(EvsApp(name, periods.housekeeping, periods.evs))
        elif name == "time_services":
            apps.append(TimeApp(name, periods.housekeeping, periods.time))
        elif name == "sb_stats":
            apps.append(SbStatsApp(name, periods.housekeeping, periods.sb_stats))
        else:
            apps.append(GenericHardwareApp(name, periods.housekeeping))
    return apps
