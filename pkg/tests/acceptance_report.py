"""Collects one pass/fail line per acceptance criterion.

The acceptance tests append lines here; the conftest terminal-summary
hook prints them after the run so the verdicts are visible even when
pytest captures stdout.
"""

LINES: list[str] = []


def record(name: str, ok: bool, elapsed: float, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    line = f"{name}: {verdict} ({elapsed:.3f}s)"
    if detail:
        line += f" {detail}"
    LINES.append(line)
    print(line)
