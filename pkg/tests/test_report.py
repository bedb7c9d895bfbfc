from conftest import fast_config, run_in_process

from wirespec.engine import Verdict
from wirespec.iuts.myp import run_myp_server
from wirespec.report import render, render_machine


def test_machine_report_shape(myp_spec):
    rep = run_in_process(
        myp_spec, "Server", lambda ch: run_myp_server(ch, seed=3),
        fast_config(max_steps=20, seed=5),
    )
    assert rep.verdict is Verdict.PASS
    text = render_machine(rep, myp_spec)
    lines = text.splitlines()
    assert lines[0] == "verdict: Pass"
    assert "actor: Server" in lines
    assert "seed: 5" in lines
    assert "steps: 20" in lines
    assert "trace:" in lines and "transitions:" in lines and "summary:" in lines
    # trace entries are numbered and direction-tagged
    first = lines[lines.index("trace:") + 1]
    assert first.startswith("  1 ") and first[4] in "?!"
    # summary covers all four goal kinds
    tail = text[text.index("summary:"):]
    for kind in ("transitions", "fields", "enums", "optional-goals"):
        assert kind in tail


def test_text_report_marks_uncovered(myp_spec):
    rep = run_in_process(
        myp_spec, "Server", lambda ch: run_myp_server(ch, seed=3),
        fast_config(max_steps=0, seed=5),
    )
    text = render(rep, myp_spec, "text")
    assert "✗" in text  # nothing covered in a zero-step run
    assert "0/3" in text


def test_reports_have_no_wallclock_content(myp_spec):
    a = run_in_process(
        myp_spec, "Server", lambda ch: run_myp_server(ch, seed=3),
        fast_config(max_steps=15, seed=6),
    )
    b = run_in_process(
        myp_spec, "Server", lambda ch: run_myp_server(ch, seed=3),
        fast_config(max_steps=15, seed=6),
    )
    assert render_machine(a, myp_spec) == render_machine(b, myp_spec)
