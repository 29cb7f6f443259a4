from satsim import ScenarioConfig, run
from satsim.bus import PublishStatus, SoftwareBus, SubscribeStatus
from satsim.config import PeriodsConfig
from satsim.defenses import (
    AclPolicy,
    ComponentManifest,
    Outcome,
    RateMonitor,
    RateMonitorPolicy,
    RateScope,
    SyscallFilter,
    compute_verdict,
)
from satsim.events import Channel, EventLog
from satsim.packets import MessageId, SpacePacket
from satsim.runtime import SyscallKind

HK = MessageId(0x0801)
NAV = MessageId(0x0810)


def test_rate_threshold_boundary():
    log = EventLog()
    monitor = RateMonitor(RateMonitorPolicy(window=50, threshold=100), log)
    allowed = sum(1 for _ in range(100) if monitor.on_bus_publish("a", tick=5))
    assert allowed == 100
    assert not any(e.kind == "rate_warning" for e in log)
    assert monitor.on_bus_publish("a", tick=6) is False
    warnings = [e for e in log if e.kind == "rate_warning"]
    assert len(warnings) == 1
    # still throttled within the window, but no second warning
    assert monitor.on_bus_publish("a", tick=30) is False
    assert len([e for e in log if e.kind == "rate_warning"]) == 1


def test_rate_window_reset_opens_new_episode():
    log = EventLog()
    monitor = RateMonitor(RateMonitorPolicy(window=50, threshold=10), log)
    for _ in range(11):
        monitor.on_bus_publish("a", tick=1)
    assert monitor.on_bus_publish("a", tick=50) is True  # new window
    for _ in range(10):
        monitor.on_bus_publish("a", tick=55)
    warnings = [e for e in log if e.kind == "rate_warning"]
    assert len(warnings) == 2


def test_rate_counters_are_per_component():
    log = EventLog()
    monitor = RateMonitor(RateMonitorPolicy(window=50, threshold=5), log)
    for _ in range(5):
        assert monitor.on_bus_publish("a", 1)
    assert monitor.on_bus_publish("b", 1) is True


def test_rate_scope_selectivity():
    log = EventLog()
    monitor = RateMonitor(RateMonitorPolicy(window=50, threshold=1, scope=RateScope.NET_SEND), log)
    for _ in range(10):
        assert monitor.on_bus_publish("a", 1) is True  # out of scope
    assert monitor.on_net_send("a", 1) is True
    assert monitor.on_net_send("a", 1) is False


def test_rate_scope_both_shares_one_counter():
    log = EventLog()
    monitor = RateMonitor(RateMonitorPolicy(window=50, threshold=2, scope=RateScope.BOTH), log)
    assert monitor.on_bus_publish("a", 1)
    assert monitor.on_net_send("a", 1)
    assert monitor.on_net_send("a", 1) is False


def manifest(name, subs=(), pubs=()):
    return ComponentManifest(
        name,
        allowed_subscriptions=frozenset(subs),
        allowed_publications=frozenset(pubs),
    )


def test_acl_subscribe_allow_and_deny():
    log = EventLog()
    bus = SoftwareBus(log)
    bus.acl_hook = AclPolicy({"gnss": manifest("gnss", subs=[NAV])}, log)
    pipe = bus.create_pipe("gnss")
    assert bus.subscribe(pipe, NAV) is SubscribeStatus.OK
    assert bus.subscribe(pipe, HK) is SubscribeStatus.DENIED
    denials = [e for e in log if e.kind == "acl_subscribe_denied"]
    assert len(denials) == 1
    assert denials[0].data == {"component": "gnss", "mid": HK.raw}
    assert denials[0].channel is Channel.SECURITY
    # table unchanged: a publish reaches nobody
    assert bus.publish("x", SpacePacket(HK, 0, b"\x01")).delivered == 0


def test_acl_missing_manifest_is_default_deny():
    log = EventLog()
    bus = SoftwareBus(log)
    bus.acl_hook = AclPolicy({}, log)
    pipe = bus.create_pipe("mystery")
    assert bus.subscribe(pipe, NAV) is SubscribeStatus.DENIED


def test_acl_publish_violation_detected_not_blocked():
    log = EventLog()
    bus = SoftwareBus(log)
    bus.acl_hook = AclPolicy(
        {"a": manifest("a", pubs=[NAV]), "l": manifest("l", subs=[HK])}, log
    )
    pipe = bus.create_pipe("l")
    assert bus.subscribe(pipe, HK) is SubscribeStatus.OK
    result = bus.publish("a", SpacePacket(HK, 0, b"\x01"))
    assert result.status is PublishStatus.OK and result.delivered == 1
    violations = [e for e in log if e.kind == "acl_publish_violation"]
    assert len(violations) == 1


def test_syscall_filter_default_deny_semantics():
    filt = SyscallFilter({"r": ComponentManifest("r", allowed_syscalls=frozenset({SyscallKind.NET_RECV}))})
    assert filt.check("r", SyscallKind.NET_RECV)
    assert not filt.check("r", SyscallKind.MKFIFO)
    assert not filt.check("unknown", SyscallKind.NET_RECV)


def test_verdict_rules():
    blocked = compute_verdict(5, ("syscall",), True, 0, (3,))
    assert blocked.outcome is Outcome.BLOCKED
    detected = compute_verdict(1, ("rate",), True, 42, (7, 9))
    assert detected.outcome is Outcome.DETECTED
    undetected = compute_verdict(5, (), True, 42, ())
    assert undetected.outcome is Outcome.UNDETECTED
    assert compute_verdict(0, (), False, 0, ()).outcome is Outcome.UNDETECTED


def test_defense_monotonicity_on_ledger():
    base = ScenarioConfig(scenario=4, run_ticks=200)
    plain = run(base).summary.ledger_size
    for defenses in (("rate",), ("acl",), ("syscall",), ("rate", "acl", "syscall")):
        guarded = run(base.with_overrides(defenses=defenses)).summary.ledger_size
        assert guarded <= plain, defenses


def test_syscall_filter_blocks_s5_at_init():
    res = run(ScenarioConfig(scenario=5, run_ticks=150, defenses=("syscall",)))
    assert res.summary.ledger_size == 0
    assert res.verdict.outcome is Outcome.BLOCKED
    assert res.summary.syscall_denials >= 1
    # trigger agent keeps retrying into a missing channel, not a denial
    channel_errors = [e for e in res.log if e.kind == "channel_error"]
    assert channel_errors and all(
        e.data["status"] == "no_channel" for e in channel_errors
    )
    # attack agent terminated exactly once (at init), no flight-software reset
    assert not any(e.kind == "boot_banner" for e in res.log)


def test_acl_blocks_s3_subscriptions_and_flags_publish():
    res = run(ScenarioConfig(scenario=3, run_ticks=200, defenses=("acl",)))
    assert res.verdict.outcome in (Outcome.BLOCKED, Outcome.DETECTED)
    assert res.summary.ledger_size == 0
    assert res.summary.acl_subscribe_denials >= 1
    assert res.summary.acl_publish_violations >= 1  # coordination stream publish


def test_benign_run_with_correct_manifests_zero_denials():
    res = run(ScenarioConfig(scenario=0, run_ticks=200, defenses=("rate", "acl", "syscall")))
    c = res.report["counters"]
    assert c["throttles"] == 0
    assert c["acl_subscribe_denials"] == 0
    assert c["acl_publish_violations"] == 0
    assert c["syscall_denials"] == 0


def test_syscall_filter_kills_solo_agent_at_first_send():
    # scenario 1 never touches a FIFO; the kill comes at the first sendto
    res = run(ScenarioConfig(scenario=1, run_ticks=200, defenses=("syscall",)))
    assert res.verdict.outcome is Outcome.BLOCKED
    assert res.summary.ledger_size == 0
    denied = [e for e in res.log if e.kind == "syscall_denied"]
    assert denied and denied[0].data["syscall"] == "NetSendTo"
    assert denied[0].tick >= 100  # dormant until the trigger fired


def test_rate_monitor_insufficient_when_exfil_stays_below_threshold():
    # slower housekeeping keeps the burst under 100 actions per window:
    # the defense stays quiet and the report says so
    cfg = ScenarioConfig(
        scenario=1, run_ticks=300, defenses=("rate",),
        periods=PeriodsConfig(gnss=5, housekeeping=50, evs=50, sb_stats=50, time=50),
    )
    res = run(cfg)
    assert res.summary.ledger_size > 0
    assert res.verdict.outcome is Outcome.UNDETECTED
    assert res.report["counters"]["throttles"] == 0
