CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(k: int, ok: bool, detail: str) -> None:
    CRITERIA[k] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in range(1, 11):
        if k not in CRITERIA:
            tr.write_line(f"criterion {k:2d}: NOT RUN")
            continue
        ok, detail = CRITERIA[k]
        tr.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
