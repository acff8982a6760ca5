import pytest

from advsem.evaluation import JudgmentStore
from advsem.models import Ensemble, tiny_conv_model
from advsem.target import ingest_dump
from advsem.taxonomy import load_bundled_taxonomy

from support import FIXTURES


@pytest.fixture(scope="session")
def tiny_model():
    return tiny_conv_model("m0", seed=1)


@pytest.fixture(scope="session")
def tiny_ensemble(tiny_model):
    return Ensemble((tiny_model, tiny_conv_model("m1", seed=2)))


@pytest.fixture(scope="session")
def taxonomy():
    return load_bundled_taxonomy()


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def paper_dump():
    return ingest_dump(FIXTURES / "paper_dump.jsonl")


@pytest.fixture(scope="session")
def paper_store():
    return JudgmentStore(FIXTURES / "paper_judgments.jsonl")


# -- acceptance reporting ----------------------------------------------------
# one visible pass/fail line per acceptance criterion at the end of the run

def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            lines.append((name, outcome.upper()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, outcome in sorted(lines):
            terminalreporter.write_line(f"[{outcome:>6}] {name}")
