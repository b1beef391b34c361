from __future__ import annotations

import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def bundled_dict():
    from sv2svt.resources import bundled_dictionary

    return bundled_dictionary()


@pytest.fixture(scope="session")
def mini_readings():
    from sv2svt.resources import bundled_readings

    return bundled_readings()


STUB_CONFIG = """\
work_dir = {work_dir}
tempo_bpm = 120
branch_order = {branch_order}
adapter.transcribe.command = {python} -m sv2svt.stubs transcribe {{input}} {{output}}
adapter.align.command = {python} -m sv2svt.stubs align {{input}} {{output}}
adapter.vme.command = {python} -m sv2svt.stubs vme {{input}} {{output}}
adapter.translate.command = {python} -m sv2svt.stubs translate {{input}} {{output}} {{target_syllables}}
adapter.segment.command = {python} -m sv2svt.stubs segment
adapter.readings.command = {python} -m sv2svt.stubs readings {{input}} {{output}}
"""


def write_stub_config(path: Path, work_dir: Path, branch_order: str = "parallel") -> Path:
    path.write_text(
        STUB_CONFIG.format(
            work_dir=work_dir, branch_order=branch_order, python=sys.executable
        ),
        encoding="utf-8",
    )
    return path


@pytest.fixture()
def stub_config(tmp_path):
    def factory(branch_order: str = "parallel", name: str = "pipeline.cfg"):
        from sv2svt.pipeline import load_config

        config_path = write_stub_config(
            tmp_path / name, tmp_path / "work", branch_order
        )
        return load_config(config_path, env={})

    return factory


# ---------------------------------------------------------------------------
# Acceptance reporting: test_acceptance.py registers its criteria here and a
# terminal-summary hook prints one pass/fail line per criterion.
# ---------------------------------------------------------------------------

ACCEPTANCE_PREFIX = "tests/test_acceptance.py::"
_criterion_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    nodeid = report.nodeid.replace("\\", "/")
    if "test_acceptance.py::" not in nodeid:
        return
    name = nodeid.split("::", 1)[1]
    _criterion_results[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criterion_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _criterion_results.items():
        label = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{label}] {name}")
