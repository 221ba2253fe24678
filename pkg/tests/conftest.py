"""Collects outcomes of tests tagged ``@pytest.mark.criterion(k, label)`` and
prints one PASS/FAIL line per criterion at the end of the run."""

import pytest

_results: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, label): acceptance criterion number and label")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    k, label = marker.args
    entry = _results.setdefault(k, {"label": label, "ok": True, "ran": False, "notes": []})
    if report.when == "call":
        entry["ran"] = True
        entry["notes"].extend(v for name, v in item.user_properties if name == "measured")
    if report.failed:
        entry["ok"] = False


@pytest.fixture
def measured(request):
    """Attach a short measured-value note to the criterion line."""

    def note(text):
        request.node.user_properties.append(("measured", text))

    return note


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        entry = _results[k]
        status = "PASS" if entry["ok"] and entry["ran"] else "FAIL"
        line = f"criterion {k}: {status}  {entry['label']}"
        if entry["notes"]:
            line += "  [" + "; ".join(entry["notes"]) + "]"
        terminalreporter.write_line(line)
