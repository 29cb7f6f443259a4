"""Run orchestration: wire everything together and execute ticks.

RunController builds one fully-configured simulation from a
ScenarioConfig and exposes a step()/finish() surface, so batch runs and
the paced live server share the exact same machinery (a served session
with no operator input produces the same operator view as a batch run).
"""

from __future__ import annotations

import socket
from dataclasses import dataclass

from .apps import RadioHardwareModel, build_benign_apps
from .config import ScenarioConfig, manifests_from_config
from .defenses import AclPolicy, RateMonitor, SyscallFilter, Verdict, compute_verdict
from .events import Channel, EventLog, SimEvent
from .ground import DownlinkScheduleBoard, GroundStation
from .malware import build_scenario
from .registry import COORDINATION_STREAM, REGISTRY
from .reports import build_report
from .runtime import Simulation
from .sparta import RunSummary, sparta_report

RECOMMENDED_DEFENSE = {
    0: (),
    1: ("rate",),
    2: ("rate",),
    3: ("acl",),
    4: ("acl",),
    5: ("syscall",),
}

COUNTERMEASURE_LABEL = {
    0: "-",
    1: "Runtime Behavior Monitoring",
    2: "Runtime Behavior Monitoring",
    3: "Software Bus Auth. & Access Control",
    4: "Software Bus Auth. & Access Control",
    5: "Syscall Filtering / OS Hardening",
}

ROW_META = {
    0: ("Benign", "-", "-"),
    1: ("Solo", "Time", "-"),
    2: ("Solo", "Dynamic", "-"),
    3: ("Colluding", "Time", "Software Bus"),
    4: ("Colluding", "Dynamic", "Software Bus"),
    5: ("Colluding", "Dynamic", "FIFO File"),
}


@dataclass
class RunResult:
    config: ScenarioConfig
    sim: Simulation
    log: EventLog
    ground: GroundStation
    summary: RunSummary
    verdict: Verdict
    report: dict


class _UdpLink:
    """Real datagram transport for the ground link (loopback-grade)."""

    def __init__(self, host: str, port: int):
        self.addr = (host, port)
        self.rx = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self.rx.bind((host, port))
        self.rx.setblocking(False)
        self.tx = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)

    def deliver(self, data: bytes):
        self.tx.sendto(data, self.addr)

    def drain(self, receive_cb):
        while True:
            try:
                data, _ = self.rx.recvfrom(65600)
            except BlockingIOError:
                return
            receive_cb(data)

    def close(self):
        self.rx.close()
        self.tx.close()


class RunController:
    def __init__(self, config: ScenarioConfig):
        config.validate()
        self.config = config
        self.manifests = manifests_from_config(config)
        self.log = EventLog()
        self.sim = Simulation(self.log, tick_seconds=config.tick_seconds)

        # defenses install before any component init runs
        self.rate_monitor = None
        self.acl = None
        if "rate" in config.defenses:
            self.rate_monitor = RateMonitor(config.rate.to_policy(), self.log)
            self.sim.rate_monitor = self.rate_monitor
            self.sim.bus.rate_hook = self.rate_monitor
        if "acl" in config.defenses:
            self.acl = AclPolicy(self.manifests, self.log)
            self.sim.bus.acl_hook = self.acl
        if "syscall" in config.defenses:
            self.sim.syscall_filter = SyscallFilter(self.manifests)

        self.schedule_board = DownlinkScheduleBoard()
        self.ground = GroundStation(self.log, self.schedule_board, now=lambda: self.sim.clock.tick)
        self.udp_link = None
        if config.endpoint.mode == "datagram":
            self.udp_link = _UdpLink(config.endpoint.host, config.endpoint.port)
            deliver = self.udp_link.deliver
        else:
            deliver = self.ground.receive
        hardware = RadioHardwareModel(deliver)

        self.radio = None
        for app in build_benign_apps(config, hardware, self.schedule_board):
            self.sim.register_component(app, self.manifests.get(app.name))
            if app.name == "generic_radio":
                self.radio = app
        self.malicious_names: list[str] = []
        for agent in build_scenario(config.scenario, config.attack, config.uplink_port):
            self.sim.register_component(agent, self.manifests.get(agent.name))
            self.malicious_names.append(agent.name)

    def step(self) -> list[SimEvent]:
        inject = self.config.inject_crash
        if inject is not None and inject["tick"] == self.sim.clock.tick + 1:
            self.sim.schedule_fault(inject["component"])
        events = self.sim.tick()
        if self.udp_link is not None:
            self.udp_link.drain(self.ground.receive)
        return events

    def enqueue_command(self, verb: str, target: str) -> bool:
        if verb not in ("enable", "disable", "request_hk", "noop"):
            return False
        if verb != "noop" and target not in self.sim.components:
            return False
        if verb != "noop":
            self.sim.enqueue_command(verb, target)
        return True

    def finish(self, score: dict | None = None) -> RunResult:
        self._flush_radio()
        if self.udp_link is not None:
            import time

            for _ in range(5):  # settle any in-flight datagrams
                time.sleep(0.01)
                self.udp_link.drain(self.ground.receive)
            self.udp_link.close()
        summary = self.summarize()
        verdict = compute_verdict(
            self.config.scenario,
            self.config.defenses,
            summary.exfil_intended,
            summary.ledger_size,
            summary.security_event_indices,
        )
        stealth = self._stealth(summary)
        report = build_report(
            self.config.to_json_obj(),
            self.log,
            self.ground.exfil_ledger,
            verdict,
            stealth,
            sparta_report(summary),
            summary,
            self._counters(summary),
            score,
        )
        return RunResult(self.config, self.sim, self.log, self.ground, summary, verdict, report)

    def _flush_radio(self):
        """Let the radio finish transmitting whatever is still buffered.

        The last tick's bus traffic and injected datagrams would otherwise
        sit in the pipe/inbox forever, which would understate both the
        ground record and the exfil ledger.
        """
        from .runtime import ComponentContext

        if self.radio is None:
            return
        record = self.sim.components.get(self.radio.name)
        if record is None or record.terminated or not record.enabled:
            return
        # marks the end of the deterministic tick rounds: everything before
        # this event is a prefix of any longer run with the same config
        self.log.emit(self.sim.clock.tick, "scheduler", Channel.SCHED, "end_of_run_flush")
        self.radio.forward_all(ComponentContext(self.sim, self.radio.name))

    # -- distillation --------------------------------------------------------

    def summarize(self) -> RunSummary:
        malicious = set(self.malicious_names)
        trigger_fired = False
        gnss_fired = False
        static_fired = False
        kill_issued = False
        coordination_consumed = False
        exfil_sends = 0
        flood = 0
        deceptions = 0
        malware_crash = False
        security: list[int] = []
        activity: list[int] = []
        for e in self.log:
            if e.channel is Channel.SECURITY:
                security.append(e.seq)
            if e.source in malicious:
                if e.kind == "trigger_fired":
                    trigger_fired = True
                    gnss_fired |= e.data["trigger_kind"] == "gnss_orbit"
                    static_fired |= e.data["trigger_kind"] == "static_timer"
                    activity.append(e.tick)
                elif e.kind == "coordination_sent":
                    activity.append(e.tick)
                elif e.kind == "coordination_received":
                    coordination_consumed = True
                    activity.append(e.tick)
                elif e.kind == "kill_handled":
                    kill_issued = True
                elif e.kind == "net_sendto" and e.data.get("result") == "ok":
                    exfil_sends += 1
                    activity.append(e.tick)
                elif e.kind == "flood_burst":
                    flood += e.data["count"]
                    activity.append(e.tick)
                elif e.kind == "deception_emit":
                    deceptions += 1
                    activity.append(e.tick)
                elif e.kind == "crash_record" and e.data["reason"] == "FaultInjection":
                    malware_crash = True
                    activity.append(e.tick)
        return RunSummary(
            scenario=self.config.scenario,
            malicious_components=tuple(self.malicious_names),
            trigger_fired=trigger_fired,
            gnss_trigger_fired=gnss_fired,
            static_timer_fired=static_fired,
            kill_issued=kill_issued,
            coordination_consumed=coordination_consumed,
            exfil_sends=exfil_sends,
            ledger_size=len(self.ground.exfil_ledger),
            flood_publishes=flood,
            deception_emissions=deceptions,
            malware_crash=malware_crash,
            security_event_indices=tuple(security),
            exfil_intended=self.config.scenario != 0 and "exfiltrate" in self.config.attack.modes,
            first_activity_tick=min(activity) if activity else None,
            last_activity_tick=max(activity) if activity else None,
            throttles=self.rate_monitor.throttle_count if self.rate_monitor else 0,
            acl_subscribe_denials=self.acl.subscribe_denials if self.acl else 0,
            acl_publish_violations=self.acl.publish_violations if self.acl else 0,
            syscall_denials=sum(
                1 for e in self.log if e.kind == "syscall_denied" and e.channel is Channel.SECURITY
            ),
        )

    def _stealth(self, summary: RunSummary) -> dict:
        coordination_mid = REGISTRY.mid(COORDINATION_STREAM).raw
        coordination_visible = any(
            r.mid_raw == coordination_mid for r in self.ground.records
        )
        statically_detectable = self.config.scenario in (1, 2)
        stealth = (
            self.config.scenario != 0
            and not statically_detectable
            and not coordination_visible
            and not summary.security_event_indices
        )
        return {
            "stealth": stealth,
            # solo implants concentrate trigger+attack logic in one binary,
            # which pre-launch program analysis can flag; reported as a
            # static annotation, not simulated
            "statically_detectable": statically_detectable,
            "coordination_visible": coordination_visible,
            "security_events": len(summary.security_event_indices),
        }

    def _counters(self, summary: RunSummary) -> dict:
        stats = self.sim.bus.bus_stats()
        return {
            "bus_publishes": sum(stats.mid_publishes.values()),
            "bus_drops": stats.drops,
            "throttles": summary.throttles,
            "acl_subscribe_denials": summary.acl_subscribe_denials,
            "acl_publish_violations": summary.acl_publish_violations,
            "syscall_denials": summary.syscall_denials,
            "ground_records": len(self.ground.records),
            "exfil_ledger": summary.ledger_size,
        }


def run(config: ScenarioConfig) -> RunResult:
    controller = RunController(config)
    for _ in range(config.run_ticks):
        controller.step()
    return controller.finish()


def replay_check(config: ScenarioConfig) -> bool:
    """Run twice; true iff the omniscient logs are byte-identical."""
    return run(config).report["log_digest"] == run(config).report["log_digest"]


def run_matrix(base: ScenarioConfig | None = None, scenarios=(1, 2, 3, 4, 5)) -> dict:
    """Scenario x defense grid: no defenses vs each row's countermeasure."""
    base = base if base is not None else ScenarioConfig()
    rows = []
    for scenario in scenarios:
        res_none = run(base.with_overrides(scenario=scenario, defenses=()))
        res_cm = run(
            base.with_overrides(scenario=scenario, defenses=RECOMMENDED_DEFENSE[scenario])
        )
        detection_kinds = sorted(
            {
                res_cm.log[i].kind
                for i in res_cm.verdict.evidence
            }
        )
        actor, trigger, coordination = ROW_META[scenario]
        rows.append(
            {
                "scenario": scenario,
                "actor": actor,
                "trigger": trigger,
                "coordination": coordination,
                "stealth": res_none.report["stealth"]["stealth"],
                "stealth_basis": res_none.report["stealth"],
                "countermeasure": COUNTERMEASURE_LABEL[scenario],
                "verdicts": {
                    "none": res_none.verdict.outcome.value,
                    "countermeasure": res_cm.verdict.outcome.value,
                },
                "detection_kinds": detection_kinds,
                "exfil_ledger_sizes": {
                    "none": res_none.summary.ledger_size,
                    "countermeasure": res_cm.summary.ledger_size,
                },
            }
        )
    return {"format_version": 1, "rows": rows}
