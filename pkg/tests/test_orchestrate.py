import json

from satsim import ScenarioConfig, replay_check, run, run_matrix
from satsim.orchestrate import RunController


def events_json(log):
    return [json.dumps(e.to_json_obj(), sort_keys=True) for e in log]


def test_replay_check_true_for_fixed_config():
    assert replay_check(ScenarioConfig(scenario=5, run_ticks=120))


def test_seed_changes_gnss_payloads_only_where_expected():
    a = run(ScenarioConfig(scenario=0, seed=1, run_ticks=60))
    b = run(ScenarioConfig(scenario=0, seed=2, run_ticks=60))
    assert a.report["log_digest"] != b.report["log_digest"]
    # the difference is confined to nav payload bytes: ground record streams
    # carry the same mids in the same order
    mids_a = [r.mid_name for r in a.ground.records]
    mids_b = [r.mid_name for r in b.ground.records]
    assert mids_a == mids_b


def test_log_prefix_relation_across_run_lengths():
    short = run(ScenarioConfig(scenario=3, seed=5, run_ticks=80))
    long = run(ScenarioConfig(scenario=3, seed=5, run_ticks=160))
    short_events = events_json(short.log)
    long_events = events_json(long.log)
    cut = next(
        i for i, e in enumerate(short.log) if e.kind == "end_of_run_flush"
    )
    assert short_events[:cut] == long_events[:cut]


def test_empty_matrix():
    assert run_matrix(scenarios=()) == {"format_version": 1, "rows": []}


def test_matrix_row_meta():
    matrix = run_matrix(ScenarioConfig(run_ticks=160), scenarios=(4,))
    row = matrix["rows"][0]
    assert (row["actor"], row["trigger"], row["coordination"]) == (
        "Colluding", "Dynamic", "Software Bus",
    )
    assert row["countermeasure"] == "Software Bus Auth. & Access Control"


def test_rate_only_defense_across_scenarios():
    # the verdict definition applied to rate-only runs: every scenario's
    # exfiltration burst crosses the default threshold, so all are Detected
    for scenario in (1, 3, 5):
        res = run(ScenarioConfig(scenario=scenario, run_ticks=200, defenses=("rate",)))
        assert res.verdict.outcome.value == "Detected", scenario
        assert res.summary.ledger_size > 0


def test_scenario_zero_control_run():
    res = run(ScenarioConfig(scenario=0, run_ticks=120))
    assert res.summary.ledger_size == 0
    assert res.report["sparta"]["ids"] == []
    assert res.verdict.outcome.value == "Undetected"


def test_inject_crash_restarts_at_configured_tick():
    res = run(
        ScenarioConfig(
            scenario=0, run_ticks=100,
            inject_crash={"component": "generic_imu", "tick": 40},
        )
    )
    restarts = [e.tick for e in res.log if e.kind == "restart"]
    assert restarts == [40]
    for record in res.sim.components.values():
        assert record.init_count == 2


def test_controller_step_returns_tick_events():
    ctrl = RunController(ScenarioConfig(scenario=0, run_ticks=10))
    events = ctrl.step()
    assert events[0].kind == "tick"
    assert all(e.tick == 1 for e in events)


def test_datagram_endpoint_mode_loopback():
    from satsim.config import EndpointConfig

    cfg = ScenarioConfig(
        scenario=0, run_ticks=60,
        endpoint=EndpointConfig(mode="datagram", host="127.0.0.1", port=0),
    )
    # port 0 would fail bind-then-send symmetry; pick an ephemeral port
    import socket

    probe = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    cfg = cfg.with_overrides(endpoint=EndpointConfig(mode="datagram", port=port))
    res = run(cfg)
    assert len(res.ground.records) > 0
    statuses = {r.decode_status for r in res.ground.records}
    assert statuses == {"Ok"}


def test_matrix_scenario_zero_is_an_all_benign_row():
    matrix = run_matrix(ScenarioConfig(run_ticks=120), scenarios=(0,))
    row = matrix["rows"][0]
    assert row["actor"] == "Benign"
    assert row["coordination"] == "-"
    assert row["verdicts"] == {"none": "Undetected", "countermeasure": "Undetected"}
    assert row["exfil_ledger_sizes"] == {"none": 0, "countermeasure": 0}
