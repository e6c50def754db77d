"""Shared test plumbing: the acceptance suite's one-line-per-criterion summary."""

ACCEPTANCE_LINES: list[str] = []


def record_verdict(name: str, ok: bool, detail: str) -> bool:
    line = f"{name} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
