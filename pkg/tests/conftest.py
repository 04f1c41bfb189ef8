from pathlib import Path

import pytest

from m2a.lexer import tokenize
from m2a.parser import parse_source, parse_term
from m2a.signature import build_poset

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
GOLDEN = HERE / "golden"
CORPUS = ["peano_simple", "peano", "toy_compiler", "chain"]

_criteria: dict[int, tuple[str, str, str]] = {}


def load(name: str):
    return parse_source((FIXTURES / f"{name}.maude").read_text())[0]


def term(module, text: str):
    return parse_term(tokenize(text), module.vars, module.all_ops,
                      literal_sort=module.literal_sort, poset=build_poset(module))


@pytest.fixture
def peano():
    return load("peano")


@pytest.fixture
def toy():
    return load("toy_compiler")


@pytest.fixture
def chain():
    return load("chain")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = getattr(report, "criterion", None)
    if mark is None:
        return
    number, title = mark
    detail = getattr(report, "criterion_detail", "")
    _criteria[number] = ("PASS" if report.passed else "FAIL", title, detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = m.args
        rep.criterion_detail = getattr(item, "criterion_detail", "")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        verdict, title, detail = _criteria[number]
        line = f"{verdict}  {number}. {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
