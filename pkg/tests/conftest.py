import re

import pytest

from feltpen.presets import build_presets


@pytest.fixture(scope="session")
def preset_dir(tmp_path_factory):
    """Simulated pen presets, built once per test session."""
    out = tmp_path_factory.mktemp("presets")
    build_presets(str(out))
    return str(out)


_CRITERION_RE = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            match = _CRITERION_RE.search(getattr(report, "nodeid", ""))
            if match:
                number = int(match.group(1))
                name = match.group(2).replace("_", " ")
                lines[number] = (name, "PASS" if status == "passed" else "FAIL")
    if not lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(lines):
        name, verdict = lines[number]
        terminalreporter.write_line(f"criterion {number:2d} ({name}): {verdict}")
