"""Cross-cutting scenario runs: defense stacks, crash loops, timeline."""

from satsim import ScenarioConfig, replay_check, run
from satsim.config import AttackConfig
from satsim.defenses import Outcome


def test_full_capability_attack_under_all_defenses():
    cfg = ScenarioConfig(
        scenario=5, run_ticks=300, orbit_insertion_tick=60,
        defenses=("rate", "acl", "syscall"),
        attack=AttackConfig(
            modes=("exfiltrate", "deceive", "flood", "dos_crash"),
            kill_after=100, flood_per_tick=25,
        ),
    )
    res = run(cfg)
    assert res.verdict.outcome is Outcome.BLOCKED
    assert res.summary.ledger_size == 0
    # the syscall filter killed the agent before any covert channel existed
    assert res.summary.syscall_denials >= 1
    assert res.summary.flood_publishes == 0
    assert res.summary.deception_emissions == 0


def test_s4_syscall_filter_kills_at_first_send():
    # bus coordination needs no syscalls; the first sendto is the tripwire
    res = run(ScenarioConfig(scenario=4, run_ticks=250, defenses=("syscall",)))
    assert res.verdict.outcome is Outcome.BLOCKED
    denied = [e for e in res.log if e.kind == "syscall_denied"]
    assert denied and denied[0].data["syscall"] == "NetSendTo"
    assert denied[0].tick >= 100
    # coordination itself went through: the toggle was consumed pre-kill
    assert res.summary.coordination_consumed


def test_s3_with_acl_and_rate_stacked():
    res = run(ScenarioConfig(scenario=3, run_ticks=250, defenses=("rate", "acl")))
    assert res.verdict.outcome is Outcome.BLOCKED
    assert res.summary.acl_subscribe_denials >= 1
    assert res.summary.ledger_size == 0


def test_dos_crash_loop_restarts_repeatedly():
    cfg = ScenarioConfig(
        scenario=5, run_ticks=400, orbit_insertion_tick=30,
        attack=AttackConfig(modes=("exfiltrate", "dos_crash"), kill_after=50),
    )
    res = run(cfg)
    restarts = [e.tick for e in res.log if e.kind == "restart"]
    assert len(restarts) >= 2, "kill->crash->re-arm should cycle"
    crashes = [
        e for e in res.log
        if e.kind == "crash_record" and e.source == "attack_agent"
    ]
    assert len(crashes) == len(restarts)
    # exfiltration happened in more than one arming cycle
    send_ticks = sorted(
        e.tick for e in res.log
        if e.kind == "net_sendto" and e.source == "attack_agent"
    )
    assert send_ticks[0] < restarts[0] < send_ticks[-1]
    assert replay_check(cfg)


def test_timeline_order_for_scenario_5():
    # compromise precedes dormancy precedes trigger precedes exfil
    res = run(ScenarioConfig(scenario=5, run_ticks=200))
    mkfifo = next(e for e in res.log if e.kind == "mkfifo")
    fired = next(e for e in res.log if e.kind == "trigger_fired")
    toggled = next(e for e in res.log if e.kind == "coordination_sent")
    received = next(e for e in res.log if e.kind == "coordination_received")
    first_send = next(
        e for e in res.log if e.kind == "net_sendto" and e.source == "attack_agent"
    )
    assert mkfifo.seq < fired.seq <= toggled.seq < received.seq < first_send.seq
    assert mkfifo.tick == 0


def test_extra_stream_widens_the_take():
    base = ScenarioConfig(scenario=5, run_ticks=200)
    wide = base.with_overrides(
        attack=AttackConfig(extra_exfil_mids=("GENERIC_EPS_DEVICE_TLM", "NOVATEL_OEM615_DEVICE_TLM"))
    )
    take_base = run(base).summary.ledger_size
    take_wide = run(wide).summary.ledger_size
    assert take_wide > take_base
