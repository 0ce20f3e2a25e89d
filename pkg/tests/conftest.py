"""Shared hooks: the acceptance suite reports one verdict line per criterion."""

VERDICTS: dict[int, str] = {}


def record_verdict(n: int, checks: dict, detail: str = "") -> None:
    """Store the verdict for criterion ``n`` and fail the calling test if any check is false."""
    failed = [name for name, ok in checks.items() if not ok]
    status = "FAIL" if failed else "PASS"
    line = f"criterion {n}: {status}"
    if failed:
        line += "  failed: " + "; ".join(failed)
    if detail:
        line += f"  [{detail}]"
    VERDICTS[n] = line
    print(line)
    assert not failed, line


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[n])
