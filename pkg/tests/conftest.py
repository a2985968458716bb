import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# non-hypothesis tests that belong to the property suites (``-m property``)
_PROPERTY_TESTS = ("test_root_invariance_of_maps", "test_stochastic_parameters_give_a_distribution")

_outcomes: dict[str, str] = {}
_property_ids: set[str] = set()
_criteria: list[tuple[int, str]] = []


def pytest_collection_modifyitems(config, items):
    for item in items:
        mod = item.module.__name__
        if mod == "test_acceptance":
            continue
        fn = getattr(item, "function", None)
        if (getattr(fn, "is_hypothesis_test", False) or mod == "test_invariance"
                or item.originalname in _PROPERTY_TESTS):
            item.add_marker(pytest.mark.property)
    # acceptance checks last, so they can see the property results of the same session
    items.sort(key=lambda it: it.module.__name__ == "test_acceptance")
    _property_ids.update(it.nodeid for it in items if it.get_closest_marker("property"))


def pytest_runtest_logreport(report):
    # a failure in any phase sticks; otherwise keep the call outcome
    if report.outcome != "passed" or report.when == "call":
        if _outcomes.get(report.nodeid) in (None, "passed"):
            _outcomes[report.nodeid] = report.outcome


def property_outcomes() -> dict[str, str]:
    """Outcomes so far of the property tests collected in this session."""
    return {k: _outcomes[k] for k in _property_ids if k in _outcomes}


def record_criterion(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title}" + (f" [{detail}]" if detail else "")
    _criteria.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_criteria, key=lambda c: c[0]):
        terminalreporter.write_line(line)
