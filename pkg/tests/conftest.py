import re


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One summary line per acceptance criterion."""
    lines = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", rep.nodeid)
            if m:
                num = int(m.group(1))
                status = "PASS" if outcome == "passed" else "FAIL"
                # A later failure overrides an earlier pass for the same number.
                if lines.get(num) != "FAIL":
                    lines[num] = status
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for num in sorted(lines):
            terminalreporter.write_line(f"criterion {num}: {lines[num]}")
