from collections import Counter
from random import Random

import pytest

from conftest import fast_config, run_in_process, states_after

from wirespec.channel import in_process_pair
from wirespec.coverage import Coverage
from wirespec.engine import Role, Verdict, default_strategy, run_test, selfplay
from wirespec.generate import GenConfig, Generator
from wirespec.iuts import StreamReader, start_in_thread
from wirespec.iuts.myp import (
    FAULT_FORMAT,
    FAULT_TRACE,
    IutBehavior,
    run_myp_client,
    run_myp_server,
)


def myp_server(fault=None, seed=42):
    def iut(ch):
        run_myp_server(ch, IutBehavior("srv", "server", fault), seed=seed)

    return iut


def test_correct_server_passes(myp_spec):
    rep = run_in_process(myp_spec, "Server", myp_server(), fast_config(max_steps=60, seed=1))
    assert rep.verdict is Verdict.PASS
    assert rep.steps == 60
    directions = {d for d, _ in rep.trace}
    assert directions == {"?", "!"}
    # every Ask is answered by a Data before anything else happens
    for (d1, m1), (d2, m2) in zip(rep.trace, rep.trace[1:]):
        if (d1, m1) == ("?", "Ask"):
            assert (d2, m2) == ("!", "Data")


def test_format_fault_detected(myp_spec):
    rep = run_in_process(
        myp_spec, "Server", myp_server(fault=FAULT_FORMAT), fast_config(max_steps=200, seed=1)
    )
    assert rep.verdict is Verdict.INVALID_FORMAT
    assert rep.offending is not None
    assert "b'000001'" in rep.detail


def test_trace_fault_detected(myp_spec):
    rep = run_in_process(
        myp_spec, "Server", myp_server(fault=FAULT_TRACE), fast_config(max_steps=200, seed=1)
    )
    assert rep.verdict is Verdict.INVALID_TRACE
    assert rep.trace[-1] == ("!", "Data")


def test_client_role_iut(myp_spec):
    rep = run_in_process(
        myp_spec,
        "Client",
        lambda ch: run_myp_client(ch, seed=9),
        fast_config(max_steps=200, seed=2),
    )
    assert rep.verdict is Verdict.PASS


def test_engine_never_sends_outside_enabled_inputs(myp_spec):
    lts = myp_spec.actors["Server"]
    sent_ok = []

    def checking_strategy(states, choices, coverage, rng):
        allowed = set(lts.enabled_inputs(states))
        choice = default_strategy(states, choices, coverage, rng)
        sent_ok.append(choice in allowed)
        return choice

    rep = run_in_process(
        myp_spec, "Server", myp_server(), fast_config(max_steps=40, seed=3),
        strategy=checking_strategy,
    )
    assert rep.verdict is Verdict.PASS
    assert sent_ok and all(sent_ok)


def test_state_sets_match_brute_force_replay(myp_spec):
    lts = myp_spec.actors["Server"]
    rep = run_in_process(myp_spec, "Server", myp_server(), fast_config(max_steps=50, seed=4))
    assert rep.verdict is Verdict.PASS
    trace = []
    for direction, msg, engine_states in rep.step_log:
        trace.append((direction, msg))
        assert engine_states == states_after(lts, trace)


def test_inconclusive_on_silent_peer_without_inputs(myp_spec):
    # test the Client model against a peer that never talks: the engine
    # cannot send (Starting has no receive edges) and must call livelock
    def mute(ch):
        StreamReader(ch).read_exact(1)

    rep = run_in_process(
        myp_spec, "Client", mute,
        fast_config(max_steps=50, seed=5, max_consecutive_timeouts=3),
    )
    assert rep.verdict is Verdict.INCONCLUSIVE
    assert "livelock" in rep.detail


def test_close_without_quit_edge_is_trace_error(myp_spec):
    def hangup(ch):
        reader = StreamReader(ch)
        reader.read_exact(1)  # consume the first Ask, then vanish
        ch.close()

    rep = run_in_process(myp_spec, "Server", hangup, fast_config(max_steps=50, seed=6))
    assert rep.verdict is Verdict.INVALID_TRACE
    assert rep.trace[-1] == ("quit", None)


def test_stalled_partial_message_is_format_error(myp_spec):
    def staller(ch):
        reader = StreamReader(ch)
        reader.read_exact(1)
        ch.send(b"\x00\x00\x00\x00")  # Data header + half a count, then silence
        reader.read_exact(1)  # park until the engine gives up

    rep = run_in_process(
        myp_spec, "Server", staller,
        fast_config(max_steps=50, seed=7, max_consecutive_timeouts=3),
    )
    assert rep.verdict is Verdict.INVALID_FORMAT
    assert "stalled" in rep.detail


def test_close_mid_message_is_format_error(myp_spec):
    def truncator(ch):
        reader = StreamReader(ch)
        reader.read_exact(1)
        ch.send(b"\x00\x00\x00")  # truncated Data
        ch.close()

    rep = run_in_process(myp_spec, "Server", truncator, fast_config(max_steps=50, seed=8))
    assert rep.verdict is Verdict.INVALID_FORMAT
    assert "closed mid-message" in rep.detail


def test_default_strategy_uniform():
    rng = Random(0)
    draws = Counter(
        default_strategy(frozenset(), ["Ask", "Done"], None, rng) for _ in range(1000)
    )
    assert 0.4 <= draws["Ask"] / 1000 <= 0.6
    assert default_strategy(frozenset(), ["Only"], None, rng) == "Only"


def test_verdict_exit_codes():
    assert Verdict.PASS.exit_code == 0
    assert Verdict.INVALID_FORMAT.exit_code == 1
    assert Verdict.INVALID_TRACE.exit_code == 2
    assert Verdict.INCONCLUSIVE.exit_code == 3


def test_coverage_records_presence_absence_and_enums(imap_spec):
    lts = imap_spec.actors["IMAPServer"]
    cov = Coverage(imap_spec, lts)
    gen = Generator(imap_spec, GenConfig(seed=0))
    cov.record_message(gen.message("OkResp"))
    assert cov.enums[("StatusResponseId", "ok")] == 1
    assert cov.fields[("OkResp", "resp")] == 1
    assert cov.fields[("StatusResponse", "tag")] == 1


def test_coverage_optional_goals(myp_spec):
    cov = Coverage(myp_spec, myp_spec.actors["Server"])
    assert ("Data", "foot") in cov.optional
    for seed in range(30):
        cov.record_message(Generator(myp_spec, GenConfig(seed=seed)).message("Data"))
    present, absent = cov.optional[("Data", "foot")]
    assert present > 0 and absent > 0
    # absent footers do not count as field occurrences
    assert cov.fields[("Data", "foot")] == present


def test_zero_step_run_reports_zero_coverage(myp_spec):
    def server(ch):
        StreamReader(ch).read_exact(1)

    rep = run_in_process(myp_spec, "Server", server, fast_config(max_steps=0, seed=0))
    assert rep.verdict is Verdict.PASS and rep.steps == 0
    summary = rep.coverage.summary()
    assert summary["transitions"] == (0, 3)
    assert summary["fields"][0] == 0


def test_uncovered_edges_reported_when_strategy_is_biased(myp_spec):
    def only_ask(states, choices, coverage, rng):
        return "Ask" if "Ask" in choices else default_strategy(states, choices, coverage, rng)

    rep = run_in_process(
        myp_spec, "Server", myp_server(), fast_config(max_steps=30, seed=9),
        strategy=only_ask,
    )
    assert rep.verdict is Verdict.PASS
    uncovered = {str(e) for e in rep.coverage.uncovered_transitions()}
    assert uncovered == {"Serving -?Done-> Serving"}


def test_selfplay_client_vs_server_passes(myp_spec):
    rep = selfplay(myp_spec, "Client", "Server", fast_config(max_steps=60, seed=11))
    assert rep.verdict is Verdict.PASS
    assert rep.role is Role.ACTOR


def test_selfplay_server_vs_client_passes(myp_spec):
    rep = selfplay(myp_spec, "Server", "Client", fast_config(max_steps=60, seed=12))
    assert rep.verdict is Verdict.PASS


def test_selfplay_detects_model_mismatch(myp_spec):
    from wirespec.resolve import resolve
    from wirespec.syntax import parse_spec
    from wirespec.cli import bundled_spec_path

    # edit the Server model to answer Ask with Done instead of Data
    source = bundled_spec_path("myp").read_text().replace(
        "on Ask  do send Data continue", "on Ask do send Done continue"
    )
    broken = resolve(parse_spec(source))
    verdicts = set()
    for seed in range(8):
        rep = selfplay(broken, "Client", "Server", fast_config(max_steps=40, seed=seed))
        verdicts.add(rep.verdict)
        if rep.verdict is Verdict.PASS:
            # a Pass is only legitimate when the client quit before engaging
            assert rep.trace == [("quit", None)]
    assert Verdict.INVALID_TRACE in verdicts or Verdict.INCONCLUSIVE in verdicts


def test_actor_role_animates_server_model(myp_spec):
    # engine animating the Server model must behave like a correct server
    engine_end, probe_end = in_process_pair()
    thread = start_in_thread(
        run_test, myp_spec, "Server", engine_end,
        fast_config(max_steps=20, seed=14), role=Role.ACTOR,
    )
    probe_end.send(b"\x40")  # Ask
    reader = StreamReader(probe_end)
    header = reader.read_exact(1)
    assert header == b"\x00"  # a Data reply
    probe_end.close()
    engine_end.close()
    thread.join(timeout=5)
