import itertools

import pytest

from painted_moduli.core import PaintedSet

ACCEPTANCE_LINES: list[str] = []


def stable_words(lo: int, hi: int, min_white: int = 2) -> list[str]:
    return ["".join(w) for n in range(lo, hi + 1) for w in itertools.product("wb", repeat=n)
            if w.count("w") >= min_white]


def P(word: str) -> PaintedSet:
    return PaintedSet.from_word(word)


@pytest.fixture
def record():
    def _record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", help="run the long checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="slow; use --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
