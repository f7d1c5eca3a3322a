"""PASS/FAIL lines collected by the acceptance tests and printed by the
terminal-summary hook in conftest."""

LINES: list[str] = []
