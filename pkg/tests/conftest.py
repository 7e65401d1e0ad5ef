"""Shared pytest plumbing: the acceptance module records one line per
criterion here; the terminal summary prints them after the run so the
pass/fail ledger is visible without -s."""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
