import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Idle, Scripted
from satsim.defenses import ComponentManifest, SyscallFilter
from satsim.events import OPERATOR_VISIBLE_CHANNELS, Channel
from satsim.packets import MessageId
from satsim.runtime import (
    FIFO_CAPACITY,
    ComponentTerminated,
    CrashReason,
    DuplicateName,
    Simulation,
    SyscallKind,
    VfsStatus,
)

HK = MessageId(0x0801)


def test_register_runs_init_once(sim):
    inits = []
    sim.register_component(Scripted("gnss", on_init=lambda ctx: inits.append(ctx.tick)))
    assert inits == [0]
    assert sim.components["gnss"].init_count == 1


def test_register_duplicate_name(sim):
    sim.register_component(Idle("gnss"))
    with pytest.raises(DuplicateName):
        sim.register_component(Idle("gnss"))


def test_step_order_is_registration_order(sim):
    order = []
    for name in ("b", "a", "c"):
        sim.register_component(Scripted(name, on_step=lambda ctx, n=name: order.append(n)))
    sim.tick()
    assert order == ["b", "a", "c"]


def test_tick_idle_components_only_clock_event(sim):
    sim.register_component(Idle("x"))
    events = sim.tick()
    assert [e.kind for e in events] == ["tick"]
    assert sim.clock.tick == 1


def test_tick_determinism():
    def run():
        sim = Simulation()
        sim.register_component(
            Scripted("a", on_step=lambda ctx: ctx.publish(HK, bytes([ctx.tick % 256])))
        )
        for _ in range(20):
            sim.tick()
        return sim.log.digest()

    assert run() == run()


# -- virtual FIFO ------------------------------------------------------------


def test_fifo_write_then_read_consumes(sim):
    sim.register_component(Idle("attack_agent"))
    assert sim.vfs_mkfifo("attack_agent", "/tmp/.sync") is VfsStatus.OK
    assert sim.vfs_write("trigger_agent", "/tmp/.sync", b"toggle_exfil") is VfsStatus.OK
    status, data = sim.vfs_read_nonblocking("attack_agent", "/tmp/.sync", 64)
    assert status is VfsStatus.OK and data == b"toggle_exfil"
    status, data = sim.vfs_read_nonblocking("attack_agent", "/tmp/.sync", 64)
    assert status is VfsStatus.OK and data == b""


def test_fifo_mkfifo_exists(sim):
    sim.vfs_mkfifo("a", "/tmp/f")
    assert sim.vfs_mkfifo("a", "/tmp/f") is VfsStatus.EXISTS


def test_fifo_missing_path(sim):
    assert sim.vfs_write("a", "/tmp/nope", b"x") is VfsStatus.NO_CHANNEL
    status, data = sim.vfs_read_nonblocking("a", "/tmp/nope", 8)
    assert status is VfsStatus.NO_CHANNEL and data == b""


def test_fifo_full_writes_nothing(sim):
    sim.vfs_mkfifo("a", "/tmp/f")
    assert sim.vfs_write("a", "/tmp/f", b"\x00" * FIFO_CAPACITY) is VfsStatus.OK
    assert sim.vfs_write("a", "/tmp/f", b"x") is VfsStatus.FULL
    status, data = sim.vfs_read_nonblocking("a", "/tmp/f", FIFO_CAPACITY + 10)
    assert len(data) == FIFO_CAPACITY


@given(
    ops=st.lists(
        st.one_of(
            st.tuples(st.just("w"), st.binary(min_size=1, max_size=40)),
            st.tuples(st.just("r"), st.integers(min_value=0, max_value=64)),
        ),
        max_size=60,
    )
)
@settings(max_examples=120)
def test_fifo_erasure_accounting(ops):
    # written bytes = read bytes + residual, for any interleaving
    sim = Simulation()
    sim.vfs_mkfifo("a", "/f")
    written = 0
    read = 0
    for op, arg in ops:
        if op == "w":
            if sim.vfs_write("a", "/f", arg) is VfsStatus.OK:
                written += len(arg)
        else:
            status, data = sim.vfs_read_nonblocking("a", "/f", arg)
            read += len(data)
    residual = len(sim.fifos["/f"].buffer)
    assert written == read + residual


# -- syscall policy ----------------------------------------------------------


def manifest(name, syscalls=()):
    return ComponentManifest(name, allowed_syscalls=frozenset(syscalls))


def test_no_filter_always_allows(sim):
    sim.register_component(Idle("x"))
    assert sim.syscall_check("x", SyscallKind.MKFIFO) is True
    assert not sim.components["x"].terminated


def test_default_deny_under_empty_filter(sim):
    sim.register_component(Idle("novatel_oem615"))
    sim.syscall_filter = SyscallFilter({})
    assert sim.syscall_check("novatel_oem615", SyscallKind.FIFO_READ) is False
    assert sim.components["novatel_oem615"].terminated


def test_allowlisted_kind_passes_others_kill(sim):
    sim.register_component(Idle("attack_agent"))
    sim.syscall_filter = SyscallFilter(
        {"attack_agent": manifest("attack_agent", [SyscallKind.NET_RECV])}
    )
    assert sim.syscall_check("attack_agent", SyscallKind.NET_RECV) is True
    with pytest.raises(ComponentTerminated):
        sim.vfs_mkfifo("attack_agent", "/tmp/.sync")
    assert sim.components["attack_agent"].terminated
    kinds = [e.kind for e in sim.log if e.channel is Channel.SECURITY]
    assert "syscall_denied" in kinds


def test_write_to_missing_path_is_no_channel_not_deny(sim):
    # path resolution fails before the policy is consulted
    sim.register_component(Idle("trigger_agent"))
    sim.syscall_filter = SyscallFilter({})
    assert sim.vfs_write("trigger_agent", "/tmp/.sync", b"kill") is VfsStatus.NO_CHANNEL
    assert not sim.components["trigger_agent"].terminated


def test_syscall_invisibility_without_filter(sim):
    sim.register_component(Idle("a"))
    sim.vfs_mkfifo("a", "/tmp/x")
    sim.vfs_write("a", "/tmp/x", b"hello")
    sim.vfs_read_nonblocking("a", "/tmp/x", 16)
    sim.net_claim_port("a", 5010)
    sim.net_sendto("a", 5010, b"data")
    visible = [e for e in sim.log if e.channel in OPERATOR_VISIBLE_CHANNELS]
    assert visible == []


# -- datagram layer ----------------------------------------------------------


def test_sendto_claimed_port_delivers_in_order(sim):
    sim.net_claim_port("radio", 6010)
    sim.net_sendto("attacker", 6010, b"one")
    sim.net_sendto("attacker", 6010, b"two")
    assert sim.net_drain("radio", 6010) == [("attacker", b"one"), ("attacker", b"two")]


def test_sendto_unclaimed_port_discards_silently(sim):
    assert sim.net_sendto("a", 9999, b"junk") is VfsStatus.OK


def test_drain_foreign_port_rejected(sim):
    sim.net_claim_port("radio", 6010)
    with pytest.raises(ValueError):
        sim.net_drain("imposter", 6010)


# -- crash / restart ---------------------------------------------------------


def test_crash_emits_reset_banner_and_reinits_all(sim):
    inits = {"a": 0, "b": 0}
    for name in ("a", "b"):
        sim.register_component(Scripted(name, on_init=lambda ctx, n=name: inits.__setitem__(n, inits[n] + 1)))
    pipe = sim.bus.create_pipe("a", 4)
    sim.bus.subscribe(pipe, HK)
    for _ in range(3):
        sim.tick()
    record = sim.crash("a", CrashReason.FAULT_INJECTION)
    assert record.reset_type == "PO" and record.spacecraft_id == 42
    banner = [e.data["text"] for e in sim.log if e.kind == "boot_banner"]
    assert "CFE_PSP: Reset Type: PO" in banner
    assert "CFE_PSP: Default Spacecraft ID = 42" in banner
    assert inits == {"a": 2, "b": 2}
    assert sim.bus.pipes == {}  # pipes cleared
    assert sim.clock.tick == 3  # clock preserved


def test_restart_preserves_fifo_channels(sim):
    sim.register_component(Idle("a"))
    sim.vfs_mkfifo("a", "/tmp/.sync")
    sim.vfs_write("a", "/tmp/.sync", b"kill")
    sim.crash("a", CrashReason.FAULT_INJECTION)
    status, data = sim.vfs_read_nonblocking("a", "/tmp/.sync", 16)
    assert data == b"kill"


def test_crash_of_benign_component_same_mechanics(sim):
    sim.register_component(Idle("generic_adcs"))
    sim.crash("generic_adcs", CrashReason.FAULT_INJECTION)
    assert any(e.kind == "restart" for e in sim.log)


def test_syscall_violation_terminates_without_reset(sim):
    sim.register_component(Idle("attack_agent"))
    sim.register_component(Idle("b"))
    sim.syscall_filter = SyscallFilter({})
    sim.syscall_check("attack_agent", SyscallKind.MKFIFO)
    assert sim.components["attack_agent"].terminated
    assert not any(e.kind == "boot_banner" for e in sim.log)
    assert sim.components["b"].init_count == 1  # no global re-init


def test_terminated_component_skipped_until_restart(sim):
    steps = []
    sim.register_component(Scripted("a", on_step=lambda ctx: steps.append(ctx.tick)))
    sim.syscall_filter = SyscallFilter({})
    sim.syscall_check("a", SyscallKind.MKFIFO)
    sim.tick()
    assert steps == []
    sim.syscall_filter = None
    sim.crash("a", CrashReason.FAULT_INJECTION)  # full restart revives it
    sim.tick()
    assert steps != []


def test_operator_command_enable_emits_evs_text(sim):
    sim.register_component(Idle("generic_torquer"))
    sim.enqueue_command("enable", "generic_torquer")
    sim.tick()
    texts = [e.data["text"] for e in sim.log if e.channel is Channel.EVS]
    assert "GENERIC_TORQUER: Device enabled" in texts


def test_disabled_component_does_not_step(sim):
    steps = []
    sim.register_component(Scripted("x", on_step=lambda ctx: steps.append(ctx.tick)))
    sim.enqueue_command("disable", "x")
    sim.tick()
    sim.tick()
    assert steps == []
