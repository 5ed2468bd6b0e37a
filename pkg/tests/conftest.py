from pathlib import Path

import pytest

from expcut.syntax import parse_expansion_proof, parse_lk_proof

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


def read(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


@pytest.fixture
def example():
    return parse_expansion_proof(read("example.exp"))


@pytest.fixture
def example_lk():
    return parse_lk_proof(read("example.lk"))


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when == "call" and "test_acceptance.py::test_criterion_" in rep.nodeid:
                name = rep.nodeid.split("test_criterion_", 1)[1]
                number = int(name.split("_", 1)[0])
                lines.append((number, f"criterion {number} ({name.split('_', 1)[1]}): {'PASS' if outcome == 'passed' else 'FAIL'}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
