from zinc_bridge.logging import LoggingContext
from zinc_bridge.monitoring import Monitor
from zinc_bridge.utils import Timer


def test_timer_as_block_and_decorator():
    durations = []
    timer = Timer(durations.append)
    with timer:
        pass
    assert timer.elapsed is not None and timer.elapsed >= 0

    @timer
    def double(value):
        return 2 * value

    assert double(3) == 6 and double(4) == 8
    assert len(durations) == 3


def test_verdict_metrics():
    monitor = Monitor()
    monitor.observe_verdict("correct", 0.0)
    monitor.observe_verdict("incorrect", 2.0)
    monitor.observe_verdict("unverified")
    registry = monitor.registry
    assert registry.get_sample_value(
        "zinc_bridge_verdict_total", {"verdict": "incorrect"}
    ) == 1.0
    assert registry.get_sample_value("zinc_bridge_relative_error_count") == 2.0
    assert registry.get_sample_value(
        "zinc_bridge_relative_error_bucket", {"le": "1.0"}
    ) == 1.0


def test_stage_timer_counts_observations():
    monitor = Monitor(namespace="test")
    for _ in range(2):
        with monitor.time_stage("parse"):
            pass
    value = monitor.registry.get_sample_value(
        "test_stage_duration_seconds_count", {"stage": "parse"}
    )
    assert value == 2.0


def test_logging_context_copies_per_event():
    context = LoggingContext("check a.fzn").with_input("a.fzn")
    verdict = context.with_verdict("correct")
    assert verdict["oracle.verdict"] == "correct"
    assert "oracle.verdict" not in context
    assert context.with_exit_code(4)["exit.code"] == 4
    assert context["run.command"] == "check a.fzn"
    assert context["input.path"] == "a.fzn"
