"""Collects one pass/fail line per acceptance criterion for the session summary."""

RESULTS: list = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
